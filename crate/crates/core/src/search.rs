//! Backtracking search for graph maps constrained by transport along links.
//!
//! The unknown is a graph map `X → Y`. Links `c → c'` between cells of `X`
//! say that the value at `c'` is a function of the value at `c`, so one
//! choice per linked component fixes the component. Components are tried
//! in order (those containing vertices first); the first component's
//! candidates are explored in parallel and the lowest-index success wins.
//! A search seed shuffles candidate lists; solutions may change, existence
//! cannot.

use std::collections::VecDeque;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::graph::{Cell, Graph, UnionFind};
use crate::par;

pub(crate) trait Problem: Sync {
    type Out: Send;
    fn domain(&self) -> &Graph;
    fn codomain(&self) -> &Graph;
    /// `(from, to, label)`: value(to) = transport(label, value(from)).
    fn links(&self) -> Vec<(Cell, Cell, usize)>;
    fn transport(&self, label: usize, value: Cell) -> Option<Cell>;
    fn candidates(&self, rep: Cell) -> Vec<Cell>;
    fn finish(&self, vmap: Vec<usize>, emap: Vec<Cell>) -> Option<Self::Out>;
}

struct Plan {
    nv: usize,
    comps: Vec<Vec<usize>>,
    cands: Vec<Vec<Cell>>,
    /// Outgoing links per node: (from cell, to cell, label).
    out: Vec<Vec<(Cell, Cell, usize)>>,
}

fn node(c: Cell, nv: usize) -> usize {
    match c {
        Cell::V(v) => v,
        Cell::E(e, _) => nv + e,
    }
}

fn cell(n: usize, nv: usize) -> Cell {
    if n < nv {
        Cell::V(n)
    } else {
        Cell::E(n - nv, true)
    }
}

type Assign = Vec<Option<Cell>>;

fn get(a: &Assign, c: Cell, nv: usize) -> Option<Cell> {
    match c {
        Cell::V(v) => a[v],
        Cell::E(e, fwd) => a[nv + e].map(|x| x.oriented(fwd)),
    }
}

impl Plan {
    fn new<P: Problem>(p: &P) -> Plan {
        let x = p.domain();
        let nv = x.vertex_count();
        let n = nv + x.edge_count();
        let mut uf = UnionFind::new(n);
        let mut out = vec![Vec::new(); n];
        for (a, b, l) in p.links() {
            uf.union(node(a, nv), node(b, nv));
            out[node(a, nv)].push((a, b, l));
        }
        let labels = uf.labels();
        let nc = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut comps = vec![Vec::new(); nc];
        for (i, &l) in labels.iter().enumerate() {
            comps[l].push(i);
        }
        comps.sort_by_key(|c| (c[0] >= nv, c[0]));
        let mut cands: Vec<Vec<Cell>> = comps.iter().map(|c| p.candidates(cell(c[0], nv))).collect();
        if let Some(seed) = par::search_seed() {
            let mut rng = StdRng::seed_from_u64(seed);
            for c in &mut cands {
                c.shuffle(&mut rng);
            }
        }
        Plan { nv, comps, cands, out }
    }

    fn propagate<P: Problem>(&self, p: &P, comp: usize, value: Cell, a: &mut Assign) -> bool {
        let nv = self.nv;
        let y = p.codomain();
        let set = |a: &mut Assign, c: Cell, val: Cell| -> Option<bool> {
            let (idx, val) = match c {
                Cell::V(v) => (v, val),
                Cell::E(e, fwd) => (nv + e, val.oriented(fwd)),
            };
            match a[idx] {
                Some(old) => (old == val).then_some(false),
                None => {
                    a[idx] = Some(val);
                    Some(true)
                }
            }
        };
        let rep = self.comps[comp][0];
        if set(a, cell(rep, nv), value).is_none() {
            return false;
        }
        let mut queue = VecDeque::from([rep]);
        while let Some(n) = queue.pop_front() {
            for &(from, to, label) in &self.out[n] {
                let Some(v) = get(a, from, nv) else { continue };
                let Some(w) = p.transport(label, v) else { return false };
                match set(a, to, w) {
                    None => return false,
                    Some(true) => queue.push_back(node(to, nv)),
                    Some(false) => {}
                }
            }
        }
        let x = p.domain();
        for &n in &self.comps[comp] {
            match (n < nv, a[n]) {
                (true, Some(Cell::V(_))) => {}
                (true, _) | (false, None) => return false,
                (false, Some(val)) => {
                    let ed = x.edge(n - nv);
                    for (end, vend) in [(ed.tail, y.tail(val)), (ed.head, y.head(val))] {
                        if let Some(Cell::V(w)) = a[end] {
                            if w != vend {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn finish<P: Problem>(&self, p: &P, a: &Assign) -> Option<P::Out> {
        let nv = self.nv;
        let vmap = (0..nv).map(|v| a[v].and_then(Cell::as_vertex)).collect::<Option<Vec<_>>>()?;
        let emap = (0..p.domain().edge_count()).map(|e| a[nv + e]).collect::<Option<Vec<_>>>()?;
        p.finish(vmap, emap)
    }

    fn extend<P: Problem>(&self, p: &P, comp: usize, a: Assign, out: &mut Vec<P::Out>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if comp == self.comps.len() {
            if let Some(r) = self.finish(p, &a) {
                out.push(r);
            }
            return;
        }
        for &c in &self.cands[comp] {
            let mut b = a.clone();
            if self.propagate(p, comp, c, &mut b) {
                self.extend(p, comp + 1, b, out, limit);
                if out.len() >= limit {
                    return;
                }
            }
        }
    }
}

/// The first solution in candidate order.
pub(crate) fn solve_first<P: Problem>(p: &P) -> Option<P::Out> {
    let plan = Plan::new(p);
    let n = plan.nv + p.domain().edge_count();
    if plan.comps.is_empty() {
        return plan.finish(p, &vec![None; n]);
    }
    par::find_map_first(&plan.cands[0], |&c| {
        let mut a = vec![None; n];
        if !plan.propagate(p, 0, c, &mut a) {
            return None;
        }
        let mut out = Vec::new();
        plan.extend(p, 1, a, &mut out, 1);
        out.pop()
    })
}

/// Up to `limit` solutions in candidate order.
pub(crate) fn solve_all<P: Problem>(p: &P, limit: usize) -> Vec<P::Out> {
    let plan = Plan::new(p);
    let n = plan.nv + p.domain().edge_count();
    let mut out = Vec::new();
    plan.extend(p, 0, vec![None; n], &mut out, limit);
    out
}
