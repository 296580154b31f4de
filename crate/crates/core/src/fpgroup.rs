//! Finitely presented groups: free reduction, Tietze elimination of
//! generators and Todd-Coxeter enumeration over the trivial subgroup.

use std::collections::HashMap;

use crate::tribool::TriBool;

/// A word in numbered generators; `(k, false)` is `k⁻¹`.
pub type GenWord = Vec<(usize, bool)>;

pub fn free_reduce(w: &mut GenWord) {
    let mut out: GenWord = Vec::with_capacity(w.len());
    for &(k, s) in w.iter() {
        if matches!(out.last(), Some(&(k2, s2)) if k2 == k && s2 != s) {
            out.pop();
        } else {
            out.push((k, s));
        }
    }
    *w = out;
}

pub fn cyclic_reduce(w: &mut GenWord) {
    free_reduce(w);
    let mut lo = 0;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo].0 == w[hi - 1].0 && w[lo].1 != w[hi - 1].1 {
        lo += 1;
        hi -= 1;
    }
    *w = w[lo..hi].to_vec();
}

pub fn invert(w: &[(usize, bool)]) -> GenWord {
    w.iter().rev().map(|&(k, s)| (k, !s)).collect()
}

/// Relators after repeatedly solving for a generator that occurs once.
#[derive(Clone, Debug)]
pub struct Tietze {
    pub gens: usize,
    /// Eliminated generators, as words in the survivors.
    pub subst: Vec<Option<GenWord>>,
    pub rels: Vec<GenWord>,
}

impl Tietze {
    pub fn new(gens: usize, rels: Vec<GenWord>) -> Tietze {
        let mut rels: Vec<GenWord> = rels
            .into_iter()
            .map(|mut r| {
                cyclic_reduce(&mut r);
                r
            })
            .filter(|r| !r.is_empty())
            .collect();
        let mut subst: Vec<Option<GenWord>> = vec![None; gens];
        loop {
            let mut pick = None;
            'find: for (ri, r) in rels.iter().enumerate() {
                let mut count: HashMap<usize, usize> = HashMap::new();
                for &(k, _) in r {
                    *count.entry(k).or_insert(0) += 1;
                }
                for (pos, &(k, _)) in r.iter().enumerate() {
                    if count[&k] == 1 {
                        pick = Some((ri, pos));
                        break 'find;
                    }
                }
            }
            let Some((ri, pos)) = pick else { break };
            let r = rels.remove(ri);
            let (k, sign) = r[pos];
            // rotated: k^sign · rest = 1
            let rest: GenWord = r[pos + 1..].iter().chain(&r[..pos]).copied().collect();
            let mut expr = if sign { invert(&rest) } else { rest };
            free_reduce(&mut expr);
            let sub = |w: &GenWord| -> GenWord {
                let mut out = Vec::new();
                for &(j, s) in w {
                    if j != k {
                        out.push((j, s));
                    } else if s {
                        out.extend_from_slice(&expr);
                    } else {
                        out.extend(invert(&expr));
                    }
                }
                out
            };
            for s in subst.iter_mut().flatten() {
                *s = sub(s);
                free_reduce(s);
            }
            for r in rels.iter_mut() {
                *r = sub(r);
                cyclic_reduce(r);
            }
            rels.retain(|r| !r.is_empty());
            subst[k] = Some(expr);
        }
        Tietze { gens, subst, rels }
    }

    /// No relators survive: the group is free on the survivors.
    pub fn is_free(&self) -> bool {
        self.rels.is_empty()
    }

    pub fn survivors(&self) -> Vec<usize> {
        (0..self.gens).filter(|&k| self.subst[k].is_none()).collect()
    }

    /// `w` in the surviving generators, freely reduced.
    pub fn rewrite(&self, w: &[(usize, bool)]) -> GenWord {
        let mut out = Vec::new();
        for &(k, s) in w {
            match &self.subst[k] {
                Some(e) if s => out.extend_from_slice(e),
                Some(e) => out.extend(invert(e)),
                None => out.push((k, s)),
            }
        }
        free_reduce(&mut out);
        out
    }
}

/// A complete coset table of the trivial subgroup: the regular action.
#[derive(Clone, Debug)]
pub struct CosetTable {
    /// `table[c][2k]` is `c·k`, `table[c][2k+1]` is `c·k⁻¹`.
    table: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn trace(&self, w: &[(usize, bool)]) -> usize {
        w.iter().fold(0, |c, &(k, s)| self.table[c][2 * k + usize::from(!s)])
    }

    pub fn is_trivial(&self, w: &[(usize, bool)]) -> bool {
        self.trace(w) == 0
    }
}

struct Enumerator {
    cols: usize,
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    limit: usize,
}

impl Enumerator {
    fn rep(&mut self, mut c: usize) -> usize {
        while self.parent[c] != c {
            self.parent[c] = self.parent[self.parent[c]];
            c = self.parent[c];
        }
        c
    }

    fn define(&mut self, c: usize, x: usize) -> Option<()> {
        if self.table.len() >= self.limit {
            return None;
        }
        let d = self.table.len();
        self.table.push(vec![None; self.cols]);
        self.parent.push(d);
        self.table[c][x] = Some(d);
        self.table[d][x ^ 1] = Some(c);
        Some(())
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi] = lo;
            queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.cols {
                let Some(f) = self.table[e][x] else { continue };
                self.table[f][x ^ 1] = None;
                let (e1, f1) = (self.rep(e), self.rep(f));
                if let Some(g) = self.table[e1][x] {
                    self.merge(f1, g, &mut queue);
                } else if let Some(h) = self.table[f1][x ^ 1] {
                    self.merge(e1, h, &mut queue);
                } else {
                    self.table[e1][x] = Some(f1);
                    self.table[f1][x ^ 1] = Some(e1);
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Option<()> {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0isize, w.len() as isize - 1);
        loop {
            while i <= j {
                let Some(n) = self.table[f][w[i as usize]] else { break };
                f = n;
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Some(());
            }
            while j >= i {
                let Some(n) = self.table[b][w[j as usize] ^ 1] else { break };
                b = n;
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Some(());
            }
            if i == j {
                let x = w[i as usize];
                self.table[f][x] = Some(b);
                self.table[b][x ^ 1] = Some(f);
                return Some(());
            }
            self.define(f, w[i as usize])?;
        }
    }
}

/// Enumerates the cosets of the trivial subgroup; `None` past `limit`.
pub fn todd_coxeter(gens: usize, rels: &[GenWord], limit: usize) -> Option<CosetTable> {
    let cols = 2 * gens;
    let rels: Vec<Vec<usize>> =
        rels.iter().map(|r| r.iter().map(|&(k, s)| 2 * k + usize::from(!s)).collect()).collect();
    let mut en = Enumerator { cols, table: vec![vec![None; cols]], parent: vec![0], limit: limit.max(1) };
    let mut c = 0;
    while c < en.table.len() {
        for r in &rels {
            if en.parent[c] != c {
                break;
            }
            en.scan_and_fill(c, r)?;
        }
        for x in 0..cols {
            if en.parent[c] == c && en.table[c][x].is_none() {
                en.define(c, x)?;
            }
        }
        c += 1;
    }
    let live: Vec<usize> = (0..en.table.len()).filter(|&c| en.parent[c] == c).collect();
    let index: HashMap<usize, usize> = live.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut table = Vec::with_capacity(live.len());
    for &c in &live {
        let mut row = Vec::with_capacity(cols);
        for x in 0..cols {
            let d = en.table[c][x]?;
            let d = en.rep(d);
            row.push(index[&d]);
        }
        table.push(row);
    }
    Some(CosetTable { table })
}

/// Word problem for a presentation: free after elimination, finite by
/// enumeration, or undecided.
#[derive(Clone, Debug)]
pub enum WordProblem {
    Free(Tietze),
    Finite(Tietze, Vec<usize>, CosetTable),
    Undecided(Tietze),
}

impl WordProblem {
    pub fn new(gens: usize, rels: Vec<GenWord>, limit: usize) -> WordProblem {
        let t = Tietze::new(gens, rels);
        if t.is_free() {
            return WordProblem::Free(t);
        }
        let surv = t.survivors();
        let mut renum = vec![usize::MAX; gens];
        for (i, &k) in surv.iter().enumerate() {
            renum[k] = i;
        }
        let rels: Vec<GenWord> = t.rels.iter().map(|r| r.iter().map(|&(k, s)| (renum[k], s)).collect()).collect();
        match todd_coxeter(surv.len(), &rels, limit) {
            Some(table) => WordProblem::Finite(t, renum, table),
            None => WordProblem::Undecided(t),
        }
    }

    pub fn is_trivial(&self, w: &[(usize, bool)]) -> TriBool {
        match self {
            WordProblem::Free(t) => TriBool::from_bool(t.rewrite(w).is_empty()),
            WordProblem::Finite(t, renum, table) => {
                let w: GenWord = t.rewrite(w).iter().map(|&(k, s)| (renum[k], s)).collect();
                TriBool::from_bool(table.is_trivial(&w))
            }
            WordProblem::Undecided(t) => {
                if t.rewrite(w).is_empty() {
                    TriBool::Yes
                } else {
                    TriBool::Unknown
                }
            }
        }
    }

    /// Group order when finite and enumerated.
    pub fn order(&self) -> Option<usize> {
        match self {
            WordProblem::Finite(_, _, t) => Some(t.order()),
            _ => None,
        }
    }
}
