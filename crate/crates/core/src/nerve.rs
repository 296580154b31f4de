//! The nerve up to level 2 and `π1` of its realization.
//!
//! Level 1 holds arrows, object edges and one diagonal per arrow edge.
//! Level 2 holds composable pairs, the two triangles splitting each
//! naturality square along its diagonal, and degeneracies of edges and
//! diagonals. A 2-simplex with faces `(d0, d1, d2)` reads "`d0` then `d2`
//! is `d1`". Faces of the object graph are attached as extra 2-cells.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::fpgroup::{GenWord, WordProblem};
use crate::graph::Cell;
use crate::groupoid::GraphGroupoid;
use crate::homotopy::{
    abelianized_isotropy, fundamental_groupoid, HomotopyError, Letter, StarOracle, Word, WordEqConfig,
};
use crate::snf::{abelian_group, AbelianGroup, SnfError};
use crate::tribool::TriBool;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NerveError {
    #[error("simplicial identity {identity} fails at {simplex}")]
    Identity { identity: &'static str, simplex: String },
    #[error("unknown object #{0}")]
    UnknownObject(usize),
    #[error(transparent)]
    Snf(#[from] SnfError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind1 {
    Arrow(usize),
    Edge(usize),
    Diagonal(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct Simplex1 {
    pub kind: Kind1,
    pub name: String,
    /// Source object.
    pub d0: usize,
    /// Target object.
    pub d1: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind2 {
    /// `(g1, g2)` with `s(g1) = t(g2)`.
    Composable(usize, usize),
    /// `g` then `t(ξ)` against the diagonal of `ξ`.
    Upper(usize),
    /// `s(ξ)` then `g′` against the diagonal of `ξ`.
    Lower(usize),
    /// Degeneracies `s0`, `s1` of a level-1 simplex.
    Degenerate0(usize),
    Degenerate1(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct Simplex2 {
    pub kind: Kind2,
    /// Level-1 faces `d0`, `d1`, `d2`.
    pub d: [usize; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct NerveSkeleton {
    pub objects: usize,
    pub level1: Vec<Simplex1>,
    pub level2: Vec<Simplex2>,
    /// Object-graph faces as closed words of level-1 simplices.
    pub extra: Vec<GenWord>,
    #[serde(skip)]
    arrows: usize,
    #[serde(skip)]
    edges: usize,
}

impl NerveSkeleton {
    pub fn arrow_simplex(&self, a: usize) -> usize {
        a
    }

    pub fn edge_simplex(&self, e: usize) -> usize {
        self.arrows + e
    }

    pub fn diagonal_simplex(&self, xi: usize) -> usize {
        self.arrows + self.edges + xi
    }

    /// Checks `d_i d_j = d_{j-1} d_i` for `i < j` on level 2.
    pub fn check_simplicial_identities(&self) -> Result<(), NerveError> {
        let l1 = &self.level1;
        for (n, s) in self.level2.iter().enumerate() {
            let [a, b, c] = s.d;
            let checks = [
                ("d0d1 = d0d0", l1[b].d0 == l1[a].d0),
                ("d0d2 = d1d0", l1[c].d0 == l1[a].d1),
                ("d1d2 = d1d1", l1[c].d1 == l1[b].d1),
            ];
            if let Some((identity, _)) = checks.iter().find(|(_, ok)| !ok) {
                return Err(NerveError::Identity { identity, simplex: format!("#{n} {:?}", s.kind) });
            }
        }
        Ok(())
    }

    /// Boundary read as a loop: `d0 · d2 · d1⁻¹`.
    pub fn boundary(&self, s: &Simplex2) -> GenWord {
        vec![(s.d[0], true), (s.d[2], true), (s.d[1], false)]
    }
}

pub fn nerve_skeleton(g: &GraphGroupoid) -> Result<NerveSkeleton, NerveError> {
    let na = g.arrow_count();
    let ne = g.g0.edge_count();
    let mut level1 = Vec::new();
    for a in 0..na {
        level1.push(Simplex1 {
            kind: Kind1::Arrow(a),
            name: g.arrow_name(a).to_string(),
            d0: g.s.vertex_image(a),
            d1: g.t.vertex_image(a),
        });
    }
    for e in 0..ne {
        let d = g.g0.edge(e);
        level1.push(Simplex1 { kind: Kind1::Edge(e), name: d.name.clone(), d0: d.tail, d1: d.head });
    }
    for xi in 0..g.g1.edge_count() {
        let c = Cell::E(xi, true);
        level1.push(Simplex1 {
            kind: Kind1::Diagonal(xi),
            name: format!("diag({})", g.g1.edge_name(xi)),
            d0: g.s.vertex_image(g.g1.tail(c)),
            d1: g.t.vertex_image(g.g1.head(c)),
        });
    }

    let mut level2 = Vec::new();
    for p in 0..g.comp.graph.vertex_count() {
        let (h, k) = g.comp.split(Cell::V(p));
        let (h, k) = (h.as_vertex().expect("vertex"), k.as_vertex().expect("vertex"));
        level2.push(Simplex2 { kind: Kind2::Composable(h, k), d: [k, g.m.vertex_image(p), h] });
    }
    // an object cell as a level-1 simplex with its direction
    let cell1 = |c: Cell| -> (usize, bool) {
        match c {
            Cell::V(x) => (g.u.vertex_image(x), true),
            Cell::E(e, f) => (na + e, f),
        }
    };
    for xi in 0..g.g1.edge_count() {
        let c = Cell::E(xi, true);
        let (a, b) = (g.g1.tail(c), g.g1.head(c));
        let diag = na + ne + xi;
        let d = match cell1(g.tgt(c)) {
            (t, true) => [a, diag, t],
            (t, false) => [diag, a, t],
        };
        level2.push(Simplex2 { kind: Kind2::Upper(xi), d });
        let d = match cell1(g.src(c)) {
            (s, true) => [s, diag, b],
            (s, false) => [s, b, diag],
        };
        level2.push(Simplex2 { kind: Kind2::Lower(xi), d });
    }
    for i in na..level1.len() {
        let (s, t) = (level1[i].d0, level1[i].d1);
        level2.push(Simplex2 { kind: Kind2::Degenerate0(i), d: [i, i, g.u.vertex_image(t)] });
        level2.push(Simplex2 { kind: Kind2::Degenerate1(i), d: [g.u.vertex_image(s), i, i] });
    }
    let extra = g.g0.faces().iter().map(|f| f.steps.iter().map(|&(e, fw)| (na + e, fw)).collect()).collect();
    let n = NerveSkeleton { objects: g.object_count(), level1, level2, extra, arrows: na, edges: ne };
    n.check_simplicial_identities()?;
    Ok(n)
}

/// Spanning-tree presentation of `π1` of the realized 2-skeleton.
#[derive(Clone, Debug)]
pub struct Pi1Presentation {
    pub basepoint: usize,
    /// Names of the non-tree level-1 simplices.
    pub generators: Vec<String>,
    pub relators: Vec<GenWord>,
    pub abelian: AbelianGroup,
    gen_of: Vec<Option<usize>>,
}

impl Pi1Presentation {
    /// A word of level-1 simplices in the generators (tree simplices vanish).
    pub fn generator_word(&self, w: &[(usize, bool)]) -> GenWord {
        w.iter().filter_map(|&(c, f)| self.gen_of[c].map(|k| (k, f))).collect()
    }
}

pub fn pi1_from_nerve(g: &GraphGroupoid, x: usize) -> Result<(NerveSkeleton, Pi1Presentation), NerveError> {
    if x >= g.object_count() {
        return Err(NerveError::UnknownObject(x));
    }
    let n = nerve_skeleton(g)?;
    let l1 = &n.level1;
    let mut seen = vec![false; n.objects];
    let mut tree = vec![false; l1.len()];
    seen[x] = true;
    let mut queue = VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        // highest index first
        for (i, s) in l1.iter().enumerate().rev() {
            let other = if s.d0 == v {
                s.d1
            } else if s.d1 == v {
                s.d0
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                tree[i] = true;
                queue.push_back(other);
            }
        }
    }
    let mut gen_of = vec![None; l1.len()];
    let mut generators = Vec::new();
    for (i, s) in l1.iter().enumerate() {
        if seen[s.d0] && !tree[i] {
            gen_of[i] = Some(generators.len());
            generators.push(s.name.clone());
        }
    }
    let mut p =
        Pi1Presentation { basepoint: x, generators, relators: Vec::new(), abelian: AbelianGroup::trivial(), gen_of };
    let mut relators = Vec::new();
    for s in &n.level2 {
        if seen[l1[s.d[0]].d0] {
            relators.push(p.generator_word(&n.boundary(s)));
        }
    }
    for f in &n.extra {
        if f.first().is_some_and(|&(c, _)| seen[l1[c].d0]) {
            relators.push(p.generator_word(f));
        }
    }
    let rows: Vec<Vec<i128>> = relators
        .iter()
        .map(|r| {
            let mut row = vec![0i128; p.generators.len()];
            for &(k, f) in r {
                row[k] += if f { 1 } else { -1 };
            }
            row
        })
        .filter(|row| row.iter().any(|&v| v != 0))
        .collect();
    p.abelian = abelian_group(p.generators.len(), &rows)?;
    p.relators = relators;
    Ok((n, p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pi1Comparison {
    pub verdict: TriBool,
    pub nerve: AbelianGroup,
    pub homotopy: AbelianGroup,
    /// Nerve relators checked in `G⋆`, and `G⋆` relations checked in the nerve group.
    pub checked: (usize, usize),
}

/// Image of a level-1 simplex in `G⋆`.
fn simplex_word(g: &GraphGroupoid, s: &Simplex1) -> Word {
    match s.kind {
        Kind1::Arrow(a) => Word::arrow(g, a),
        Kind1::Edge(e) => Word { start: s.d0, letters: vec![Letter::Edge(e, true)] },
        Kind1::Diagonal(xi) => {
            let c = Cell::E(xi, true);
            let mut w = Word::arrow(g, g.g1.tail(c));
            if let Cell::E(e, f) = g.tgt(c) {
                w.letters.push(Letter::Edge(e, f));
            }
            w
        }
    }
}

/// Compares the nerve presentation with `G⋆` at `x`: abelianizations,
/// then the generator matching in both directions.
pub fn compare_pi1(g: &Arc<GraphGroupoid>, x: usize, cfg: &WordEqConfig) -> Result<Pi1Comparison, NerveError> {
    let (n, p) = pi1_from_nerve(g, x)?;
    let homotopy = abelianized_isotropy(g, x)?;
    let mut out = Pi1Comparison { verdict: TriBool::Yes, nerve: p.abelian.clone(), homotopy, checked: (0, 0) };
    if out.nerve != out.homotopy {
        out.verdict = TriBool::No;
        return Ok(out);
    }
    let oracle = StarOracle::new(g.clone())?;
    let labels = oracle.components();
    for s in &n.level2 {
        if labels[n.level1[s.d[0]].d0] != labels[x] {
            continue;
        }
        let [a, b, c] = s.d.map(|i| simplex_word(g, &n.level1[i]));
        let lhs = a.concat(&c, g)?;
        out.verdict = out.verdict.and(oracle.word_equal(&lhs, &b, cfg)?);
        out.checked.0 += 1;
    }
    let wp = WordProblem::new(p.generators.len(), p.relators.clone(), cfg.max_words);
    let pres = fundamental_groupoid(g.clone());
    for r in &pres.relations {
        if labels[r.lhs.start] != labels[x] {
            continue;
        }
        let mut w: GenWord = letters_to_simplices(&n, &r.lhs);
        w.extend(crate::fpgroup::invert(&letters_to_simplices(&n, &r.rhs)));
        out.verdict = out.verdict.and(wp.is_trivial(&p.generator_word(&w)));
        out.checked.1 += 1;
    }
    Ok(out)
}

fn letters_to_simplices(n: &NerveSkeleton, w: &Word) -> GenWord {
    w.letters
        .iter()
        .map(|&l| match l {
            Letter::Edge(e, f) => (n.edge_simplex(e), f),
            Letter::Arrow(a) => (n.arrow_simplex(a), true),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::corpus;

    #[test]
    fn level_counts() {
        let c = corpus();
        let n = nerve_skeleton(&c.groupoid("PT2")).unwrap();
        assert_eq!(n.level2.iter().filter(|s| matches!(s.kind, Kind2::Composable(..))).count(), 4);
        let refl = c.groupoid("REFL");
        let n = nerve_skeleton(&refl).unwrap();
        let base = n.level1.iter().filter(|s| !matches!(s.kind, Kind1::Diagonal(_))).count();
        assert_eq!(base, 8);
        let uc3 = c.groupoid("UC3");
        let n = nerve_skeleton(&uc3).unwrap();
        for s in n.level2.iter().filter(|s| matches!(s.kind, Kind2::Composable(..))) {
            let Kind2::Composable(h, k) = s.kind else { unreachable!() };
            assert_eq!(uc3.u.vertex_image(uc3.s.vertex_image(h)), h);
            assert_eq!(uc3.u.vertex_image(uc3.s.vertex_image(k)), k);
        }
    }

    #[test]
    fn nerve_groups() {
        let c = corpus();
        for (name, x, want) in [("PT2", "star", "Z/2"), ("REFL", "0", "Z/2"), ("UC3", "v0", "Z"), ("ROT", "r0", "Z")] {
            let g = c.groupoid(name);
            let (_, p) = pi1_from_nerve(&g, g.object(x).unwrap()).unwrap();
            assert_eq!(p.abelian.to_string(), want, "{name}");
            let cmp = compare_pi1(&g, g.object(x).unwrap(), &WordEqConfig::default()).unwrap();
            assert_eq!(cmp.verdict, TriBool::Yes, "{name}");
        }
    }
}
