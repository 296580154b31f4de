//! Groupoid actions on graphs, bibundles, and the dictionary between
//! right-principal bibundles and generalized maps.
//!
//! A right action of `G` on `M` along `ρ: M → G0` is defined on pairs
//! `(x, g)` with `ρ(x) = t(g)` and satisfies `ρ(x·g) = s(g)`. A left action
//! of `K` along `τ` is defined on `(h, x)` with `s(h) = τ(x)` and satisfies
//! `τ(h·x) = t(h)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{Cell, FiberProduct, Graph, GraphError, GraphMap};
use crate::groupoid::{
    all_oriented_cells, build_groupoid, quotient_graph, same_groupoid, Functor, GraphGroupoid, GroupoidError, Quotient,
    QuotientMode,
};
use crate::par;
use crate::search::{self, Problem};
use crate::span::{GeneralizedMap, SpanError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BibundleError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error("action {axiom} fails at {witness}")]
    Action { axiom: &'static str, witness: String },
    #[error("bibundle {axiom} fails at {witness}")]
    Bibundle { axiom: &'static str, witness: String },
    #[error("`{0}` is not right principal")]
    NotRightPrincipal(String),
    #[error("`{0}` is not biprincipal")]
    NotBiprincipal(String),
    #[error("composition anchors mismatch: `{0}` vs `{1}`")]
    AnchorMismatch(String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone)]
pub struct GroupoidAction {
    pub side: Side,
    pub groupoid: Arc<GraphGroupoid>,
    pub carrier: Arc<Graph>,
    pub moment: GraphMap,
    /// Pairs `(h, x)` for left actions, `(x, g)` for right actions.
    pub domain: FiberProduct,
    pub act: GraphMap,
}

impl fmt::Debug for GroupoidAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} action of {} on {:?}", self.side, self.groupoid.name, self.carrier)
    }
}

impl GroupoidAction {
    /// Builds from a closure `f(arrow, point)` and validates.
    pub fn new(
        side: Side,
        groupoid: Arc<GraphGroupoid>,
        moment: GraphMap,
        mut f: impl FnMut(Cell, Cell) -> Option<Cell>,
    ) -> Result<GroupoidAction, BibundleError> {
        let carrier = moment.source().clone();
        let moment = moment.retarget(groupoid.g0.clone())?;
        let domain = match side {
            Side::Left => FiberProduct::new(&groupoid.s, &moment)?,
            Side::Right => FiberProduct::new(&moment, &groupoid.t)?,
        };
        let d = domain.clone();
        let act = GraphMap::from_cell_fn(domain.graph.clone(), carrier.clone(), |c| {
            let (a, b) = d.split(c);
            match side {
                Side::Left => f(a, b),
                Side::Right => f(b, a),
            }
        })
        .map_err(|e| BibundleError::Action { axiom: "graph map", witness: e.to_string() })?;
        let a = GroupoidAction { side, groupoid, carrier, moment, domain, act };
        a.validate()?;
        Ok(a)
    }

    /// `g` acting on `x` from this action's side.
    pub fn apply(&self, g: Cell, x: Cell) -> Option<Cell> {
        let c = match self.side {
            Side::Left => self.domain.pair(g, x)?,
            Side::Right => self.domain.pair(x, g)?,
        };
        Some(self.act.apply(c))
    }

    fn split(&self, c: Cell) -> (Cell, Cell) {
        let (a, b) = self.domain.split(c);
        match self.side {
            Side::Left => (a, b),
            Side::Right => (b, a),
        }
    }

    pub fn validate(&self) -> Result<(), BibundleError> {
        let g = &self.groupoid;
        let m = &self.carrier;
        let err = |axiom, w: String| BibundleError::Action { axiom, witness: w };
        for c in self.domain.graph.cells() {
            let (h, x) = self.split(c);
            let hx = self.act.apply(c);
            let want = match self.side {
                Side::Left => g.tgt(h),
                Side::Right => g.src(h),
            };
            if self.moment.apply(hx) != want {
                return Err(err("moment condition", format!("({},{})", g.g1.cell_name(h), m.cell_name(x))));
            }
        }
        for x in m.cells() {
            if self.apply(g.unit(self.moment.apply(x)), x) != Some(x) {
                return Err(err("unit law", m.cell_name(x)));
            }
        }
        let mut by_end: HashMap<Cell, Vec<Cell>> = HashMap::new();
        for c in all_oriented_cells(&g.g1) {
            let key = match self.side {
                Side::Left => g.src(c),
                Side::Right => g.tgt(c),
            };
            by_end.entry(key).or_default().push(c);
        }
        for c in self.domain.graph.cells() {
            let (h, x) = self.split(c);
            let hx = self.act.apply(c);
            let next_key = self.moment.apply(hx);
            for &h2 in by_end.get(&next_key).map(Vec::as_slice).unwrap_or(&[]) {
                let (lhs, rhs) = match self.side {
                    Side::Left => (self.apply(h2, hx), g.mul(h2, h).and_then(|p| self.apply(p, x))),
                    Side::Right => (self.apply(h2, hx), g.mul(h, h2).and_then(|p| self.apply(p, x))),
                };
                if lhs.is_none() || lhs != rhs {
                    return Err(err(
                        "associativity",
                        format!("({},{},{})", g.g1.cell_name(h2), g.g1.cell_name(h), m.cell_name(x)),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The action groupoid: for a left action arrows `(h, x): x → h·x`, for a
/// right action arrows `(x, g): x·g → x`.
pub fn translation_groupoid(a: &GroupoidAction, name: &str) -> Result<GraphGroupoid, BibundleError> {
    let g = &a.groupoid;
    let d = &a.domain;
    let side = a.side;
    let pair = |arrow: Cell, x: Cell| match side {
        Side::Left => d.pair(arrow, x),
        Side::Right => d.pair(x, arrow),
    };
    let grp = build_groupoid(
        name,
        a.carrier.clone(),
        d.graph.clone(),
        &mut |c| {
            let (h, x) = a.split(c);
            match side {
                Side::Left => Some(x),
                Side::Right => a.apply(h, x),
            }
        },
        &mut |c| {
            let (h, x) = a.split(c);
            match side {
                Side::Left => a.apply(h, x),
                Side::Right => Some(x),
            }
        },
        &mut |x| pair(g.unit(a.moment.apply(x)), x),
        &mut |c| {
            let (h, x) = a.split(c);
            pair(g.inverse(h), a.apply(h, x)?)
        },
        &mut |p, q| {
            let (h2, x2) = a.split(p);
            let (h1, x1) = a.split(q);
            match side {
                Side::Left => pair(g.mul(h2, h1)?, x1),
                Side::Right => pair(g.mul(h2, h1)?, x2),
            }
        },
    )?;
    Ok(grp)
}

/// A `K`-`G` bibundle: left `K` action along `τ`, right `G` action along `ρ`.
#[derive(Clone)]
pub struct Bibundle {
    pub name: String,
    pub k: Arc<GraphGroupoid>,
    pub g: Arc<GraphGroupoid>,
    pub carrier: Arc<Graph>,
    pub tau: GraphMap,
    pub rho: GraphMap,
    pub left: GroupoidAction,
    pub right: GroupoidAction,
}

impl fmt::Debug for Bibundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bibundle({}: {} ⇝ {}, carrier {:?})", self.name, self.k.name, self.g.name, self.carrier)
    }
}

impl Bibundle {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        k: Arc<GraphGroupoid>,
        g: Arc<GraphGroupoid>,
        tau: GraphMap,
        rho: GraphMap,
        lact: impl FnMut(Cell, Cell) -> Option<Cell>,
        mut ract: impl FnMut(Cell, Cell) -> Option<Cell>,
    ) -> Result<Bibundle, BibundleError> {
        let left = GroupoidAction::new(Side::Left, k.clone(), tau, lact)?;
        let right = GroupoidAction::new(Side::Right, g.clone(), rho, |a, x| ract(x, a))?;
        let b = Bibundle {
            name: name.into(),
            carrier: left.carrier.clone(),
            tau: left.moment.clone(),
            rho: right.moment.clone(),
            k,
            g,
            left,
            right,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn lact(&self, h: Cell, x: Cell) -> Option<Cell> {
        self.left.apply(h, x)
    }

    pub fn ract(&self, x: Cell, g: Cell) -> Option<Cell> {
        self.right.apply(g, x)
    }

    pub fn validate(&self) -> Result<(), BibundleError> {
        self.left.validate()?;
        self.right.validate()?;
        let m = &self.carrier;
        let err = |axiom, w: String| BibundleError::Bibundle { axiom, witness: w };
        for c in self.right.domain.graph.cells() {
            let (g, x) = self.right.split(c);
            if self.tau.apply(self.right.act.apply(c)) != self.tau.apply(x) {
                return Err(err(
                    "τ-invariance of the right action",
                    format!("({},{})", m.cell_name(x), self.g.g1.cell_name(g)),
                ));
            }
        }
        for c in self.left.domain.graph.cells() {
            let (h, x) = self.left.split(c);
            let hx = self.left.act.apply(c);
            if self.rho.apply(hx) != self.rho.apply(x) {
                return Err(err(
                    "ρ-invariance of the left action",
                    format!("({},{})", self.k.g1.cell_name(h), m.cell_name(x)),
                ));
            }
            for g in all_oriented_cells(&self.g.g1) {
                if self.g.tgt(g) != self.rho.apply(x) {
                    continue;
                }
                let lhs = self.ract(hx, g);
                let rhs = self.ract(x, g).and_then(|xg| self.lact(h, xg));
                if lhs.is_none() || lhs != rhs {
                    return Err(err(
                        "commuting actions",
                        format!("({},{},{})", self.k.g1.cell_name(h), m.cell_name(x), self.g.g1.cell_name(g)),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// `G ⇝ G` on `G1` with `τ = t`, `ρ = s`, both actions by multiplication.
pub fn unit_bibundle(g: &Arc<GraphGroupoid>) -> Bibundle {
    Bibundle::new(
        format!("unit({})", g.name),
        g.clone(),
        g.clone(),
        g.t.clone(),
        g.s.clone(),
        |h, x| g.mul(h, x),
        |x, a| g.mul(x, a),
    )
    .expect("unit bibundle is valid")
}

/// The bibundle of a functor `φ: K → G` on pairs `(x, g)` with `φ(x) = t(g)`.
pub fn strict_bibundle(phi: &Functor) -> Result<Bibundle, BibundleError> {
    let (k, g) = (phi.source.clone(), phi.target.clone());
    let fp = FiberProduct::new(&phi.f0.retarget(g.g0.clone())?, &g.t)?;
    let tau = fp.p1.clone();
    let rho = g.s.compose(&fp.p2)?;
    let b = Bibundle::new(
        format!("strict({})", phi.name),
        k.clone(),
        g.clone(),
        tau,
        rho,
        |h, c| {
            let (_, a) = fp.split(c);
            fp.pair(k.tgt(h), g.mul(phi.ar(h), a)?)
        },
        |c, a2| {
            let (x, a) = fp.split(c);
            fp.pair(x, g.mul(a, a2)?)
        },
    )?;
    Ok(b)
}

/// The unit section `x ↦ (x, u(φx))` of a strict bibundle.
pub fn strict_section(phi: &Functor, b: &Bibundle) -> Option<GraphMap> {
    let g = &phi.target;
    let fp = FiberProduct::new(&phi.f0.retarget(g.g0.clone()).ok()?, &g.t).ok()?;
    let sec =
        GraphMap::from_cell_fn(phi.source.g0.clone(), fp.graph.clone(), |x| fp.pair(x, g.unit(phi.ob(x)))).ok()?;
    sec.retarget(b.carrier.clone()).ok()
}

/// Index for arrows `(h, x, g)` of a double translation groupoid.
#[derive(Clone, Debug)]
pub struct DoubleIndex {
    hx: FiberProduct,
    hxg: FiberProduct,
}

impl DoubleIndex {
    pub fn cell(&self, h: Cell, x: Cell, g: Cell) -> Option<Cell> {
        self.hxg.pair(self.hx.pair(h, x)?, g)
    }

    pub fn split(&self, c: Cell) -> (Cell, Cell, Cell) {
        let (hx, g) = self.hxg.split(c);
        let (h, x) = self.hx.split(hx);
        (h, x, g)
    }
}

/// `K ⋉ M ⋊ G`: arrows `(h, x, g)` with `s(h) = τ(x)`, `s(g) = ρ(x)`, from
/// `x` to `h·x·g⁻¹`; `(h, x, g)(h′, x′, g′) = (hh′, x′, gg′)`.
pub fn double_translation_groupoid(b: &Bibundle) -> Result<(GraphGroupoid, DoubleIndex), BibundleError> {
    let (k, g) = (&b.k, &b.g);
    let hx = FiberProduct::new(&k.s, &b.tau)?;
    let rho_x = b.rho.compose(&hx.p2)?;
    let hxg = FiberProduct::new(&rho_x, &g.s)?;
    let ix = DoubleIndex { hx, hxg };
    let target = |c: Cell| -> Option<Cell> {
        let (h, x, a) = ix.split(c);
        b.lact(h, b.ract(x, g.inverse(a))?)
    };
    let grp = build_groupoid(
        format!("{}⋉{}⋊{}", k.name, b.name, g.name),
        b.carrier.clone(),
        ix.hxg.graph.clone(),
        &mut |c| Some(ix.split(c).1),
        &mut |c| target(c),
        &mut |x| ix.cell(k.unit(b.tau.apply(x)), x, g.unit(b.rho.apply(x))),
        &mut |c| {
            let (h, _, a) = ix.split(c);
            ix.cell(k.inverse(h), target(c)?, g.inverse(a))
        },
        &mut |p, q| {
            let (h2, _, a2) = ix.split(p);
            let (h1, x1, a1) = ix.split(q);
            ix.cell(k.mul(h2, h1)?, x1, g.mul(a2, a1)?)
        },
    )?;
    Ok((grp, ix))
}

/// `(x, g) ↦ (x·g, x)` from `M ×_{G0} G1` to `M ×_{K0} M` is a graph
/// isomorphism and `τ` is surjective.
pub fn is_right_principal(b: &Bibundle) -> bool {
    let Ok(dom) = FiberProduct::new(&b.rho, &b.g.t) else { return false };
    let Ok(cod) = FiberProduct::new(&b.tau, &b.tau) else { return false };
    let alpha = GraphMap::from_cell_fn(dom.graph.clone(), cod.graph.clone(), |c| {
        let (x, a) = dom.split(c);
        cod.pair(b.ract(x, a)?, x)
    });
    matches!(alpha, Ok(a) if a.is_isomorphism()) && b.tau.is_surjective()
}

/// Mirror image of [`is_right_principal`] for the left action.
pub fn is_left_principal(b: &Bibundle) -> bool {
    let Ok(dom) = FiberProduct::new(&b.k.s, &b.tau) else { return false };
    let Ok(cod) = FiberProduct::new(&b.rho, &b.rho) else { return false };
    let alpha = GraphMap::from_cell_fn(dom.graph.clone(), cod.graph.clone(), |c| {
        let (h, x) = dom.split(c);
        cod.pair(b.lact(h, x)?, x)
    });
    matches!(alpha, Ok(a) if a.is_isomorphism()) && b.rho.is_surjective()
}

pub fn is_biprincipal(b: &Bibundle) -> bool {
    is_right_principal(b) && is_left_principal(b)
}

/// A quotient carrier with a chosen representative for every cell.
struct Carrier {
    q: Quotient,
    vrep: Vec<usize>,
    erep: Vec<Cell>,
}

impl Carrier {
    fn new(g: &Arc<Graph>, pairs: &[(Cell, Cell)]) -> Result<Carrier, BibundleError> {
        let q = quotient_graph(g, pairs, QuotientMode::Reflexive)?;
        let mut vrep = vec![usize::MAX; q.graph.vertex_count()];
        for v in (0..g.vertex_count()).rev() {
            vrep[q.map.vertex_image(v)] = v;
        }
        let mut erep = vec![None; q.graph.edge_count()];
        for e in (0..g.edge_count()).rev() {
            if let Cell::E(j, o) = q.map.apply(Cell::E(e, true)) {
                erep[j] = Some(Cell::E(e, o));
            }
        }
        let erep = erep.into_iter().map(|c| c.expect("every quotient edge has a preimage")).collect();
        Ok(Carrier { q, vrep, erep })
    }

    fn lift(&self, c: Cell) -> Cell {
        match c {
            Cell::V(v) => Cell::V(self.vrep[v]),
            Cell::E(e, fwd) => self.erep[e].oriented(fwd),
        }
    }

    fn project(&self, c: Cell) -> Cell {
        self.q.map.apply(c)
    }

    fn descend(&self, target: Arc<Graph>, f: impl Fn(Cell) -> Option<Cell>) -> Result<GraphMap, BibundleError> {
        Ok(GraphMap::from_cell_fn(self.q.graph.clone(), target, |c| f(self.lift(c)))?)
    }
}

/// `M ×_{G0} N` modulo `(x, y)·g = (x·g, g⁻¹·y)`.
pub fn compose_bibundles(b1: &Bibundle, b2: &Bibundle) -> Result<Bibundle, BibundleError> {
    if !same_groupoid(&b1.g, &b2.k) {
        return Err(BibundleError::AnchorMismatch(b1.g.name.clone(), b2.k.name.clone()));
    }
    for b in [b1, b2] {
        if !is_right_principal(b) {
            return Err(BibundleError::NotRightPrincipal(b.name.clone()));
        }
    }
    let g = &b1.g;
    let p = FiberProduct::new(&b1.rho, &b2.tau.retarget(b1.rho.target().clone())?)?;
    let by_target = index_by(&g.g1, |c| g.tgt(c), g);
    let mut pairs = Vec::new();
    for c in p.graph.cells() {
        let (x, y) = p.split(c);
        for &a in by_target.get(&b1.rho.apply(x)).map(Vec::as_slice).unwrap_or(&[]) {
            let moved = b1.ract(x, a).and_then(|xa| p.pair(xa, b2.lact(g.inverse(a), y)?));
            pairs.push((c, moved.expect("diagonal action is defined")));
        }
    }
    let q = Carrier::new(&p.graph, &pairs)?;
    let tau = q.descend(b1.k.g0.clone(), |c| Some(b1.tau.apply(p.split(c).0)))?;
    let rho = q.descend(b2.g.g0.clone(), |c| Some(b2.rho.apply(p.split(c).1)))?;
    let b = Bibundle::new(
        format!("{}.{}", b2.name, b1.name),
        b1.k.clone(),
        b2.g.clone(),
        tau,
        rho,
        |h, c| {
            let (x, y) = p.split(q.lift(c));
            Some(q.project(p.pair(b1.lact(h, x)?, y)?))
        },
        |c, l| {
            let (x, y) = p.split(q.lift(c));
            Some(q.project(p.pair(x, b2.ract(y, l)?)?))
        },
    )?;
    Ok(b)
}

fn index_by(g1: &Graph, key: impl Fn(Cell) -> Cell, _g: &GraphGroupoid) -> HashMap<Cell, Vec<Cell>> {
    let mut out: HashMap<Cell, Vec<Cell>> = HashMap::new();
    for c in all_oriented_cells(g1) {
        out.entry(key(c)).or_default().push(c);
    }
    out
}

/// Swaps the anchors: `g * x = x·g⁻¹`, `x * h = h⁻¹·x`.
pub fn inverse_bibundle(b: &Bibundle) -> Result<Bibundle, BibundleError> {
    if !is_biprincipal(b) {
        return Err(BibundleError::NotBiprincipal(b.name.clone()));
    }
    Bibundle::new(
        format!("inv({})", b.name),
        b.g.clone(),
        b.k.clone(),
        b.rho.clone(),
        b.tau.clone(),
        |a, x| b.ract(x, b.g.inverse(a)),
        |x, h| b.lact(b.k.inverse(h), x),
    )
}

/// The span `K ← K⋉M⋊G → G` with legs `(τ, p1)` and `(ρ, p3)`.
pub fn gamma(b: &Bibundle) -> Result<GeneralizedMap, BibundleError> {
    if !is_right_principal(b) {
        return Err(BibundleError::NotRightPrincipal(b.name.clone()));
    }
    let (d, ix) = double_translation_groupoid(b)?;
    let d = Arc::new(d);
    let eps = Functor::from_fns(
        format!("eps[{}]", b.name),
        d.clone(),
        b.k.clone(),
        |x| Some(b.tau.apply(x)),
        |c| Some(ix.split(c).0),
    )?;
    let phi = Functor::from_fns(
        format!("phi[{}]", b.name),
        d,
        b.g.clone(),
        |x| Some(b.rho.apply(x)),
        |c| Some(ix.split(c).2),
    )?;
    Ok(GeneralizedMap::new(format!("gamma({})", b.name), eps, phi)?)
}

/// The bibundle of a span `K ←ε− J −φ→ G`: triples `(d, a, b)` with
/// `s(d) = ε(a)`, `t(b) = φ(a)`, modulo `(d, a, b)·j = (d ε(j), s(j), φ(j)⁻¹ b)`.
pub fn gamma_inv(f: &GeneralizedMap) -> Result<Bibundle, BibundleError> {
    let (eps, phi) = (&f.left, &f.right);
    let (k, j, g) = (eps.target.clone(), f.apex.clone(), phi.target.clone());
    let da = FiberProduct::new(&k.s, &eps.f0.retarget(k.g0.clone())?)?;
    let phi_a = phi.f0.retarget(g.g0.clone())?.compose(&da.p2)?;
    let dab = FiberProduct::new(&phi_a, &g.t)?;
    let cell = |d: Cell, a: Cell, b: Cell| dab.pair(da.pair(d, a)?, b);
    let split = |c: Cell| {
        let (x, b) = dab.split(c);
        let (d, a) = da.split(x);
        (d, a, b)
    };
    let by_target = index_by(&j.g1, |c| j.tgt(c), &j);
    let mut pairs = Vec::new();
    for c in dab.graph.cells() {
        let (d, a, b) = split(c);
        for &jj in by_target.get(&a).map(Vec::as_slice).unwrap_or(&[]) {
            let moved = k.mul(d, eps.ar(jj)).and_then(|d2| cell(d2, j.src(jj), g.mul(g.inverse(phi.ar(jj)), b)?));
            pairs.push((c, moved.expect("apex action is defined")));
        }
    }
    let q = Carrier::new(&dab.graph, &pairs)?;
    let tau = q.descend(k.g0.clone(), |c| Some(k.tgt(split(c).0)))?;
    let rho = q.descend(g.g0.clone(), |c| Some(g.src(split(c).2)))?;
    Bibundle::new(
        format!("gamma_inv({})", f.name),
        k.clone(),
        g.clone(),
        tau,
        rho,
        |h, c| {
            let (d, a, b) = split(q.lift(c));
            Some(q.project(cell(k.mul(h, d)?, a, b)?))
        },
        |c, a2| {
            let (d, a, b) = split(q.lift(c));
            Some(q.project(cell(d, a, g.mul(b, a2)?)?))
        },
    )
}

/// A section `σ: K0 → M` of `τ`, by exhaustive backtracking.
pub fn find_section(b: &Bibundle) -> Option<GraphMap> {
    let k0 = &b.k.g0;
    let m = &b.carrier;
    let nv = k0.vertex_count();
    let mut fibers = vec![Vec::new(); nv];
    for x in 0..m.vertex_count() {
        fibers[b.tau.vertex_image(x)].push(x);
    }
    let mut over_edge: HashMap<usize, Vec<Cell>> = HashMap::new();
    for c in all_oriented_cells(m) {
        if let Cell::E(e, true) = b.tau.apply(c) {
            over_edge.entry(e).or_default().push(c);
        }
    }
    // edges are checked as soon as both endpoints are placed
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for e in 0..k0.edge_count() {
        let ed = k0.edge(e);
        due[ed.tail.max(ed.head)].push(e);
    }
    let lift = |e: usize, sigma: &[usize]| -> Option<Cell> {
        let ed = k0.edge(e);
        over_edge.get(&e)?.iter().copied().find(|&c| m.tail(c) == sigma[ed.tail] && m.head(c) == sigma[ed.head])
    };
    fn dfs(
        v: usize,
        sigma: &mut Vec<usize>,
        fibers: &[Vec<usize>],
        due: &[Vec<usize>],
        lift: &dyn Fn(usize, &[usize]) -> Option<Cell>,
    ) -> bool {
        if v == fibers.len() {
            return true;
        }
        for &c in &fibers[v] {
            sigma.push(c);
            if due[v].iter().all(|&e| lift(e, sigma).is_some()) && dfs(v + 1, sigma, fibers, due, lift) {
                return true;
            }
            sigma.pop();
        }
        false
    }
    let sigma = if nv == 0 {
        Some(Vec::new())
    } else {
        par::find_map_first(&fibers[0], |&c| {
            let mut sigma = vec![c];
            let ok = due[0].iter().all(|&e| lift(e, &sigma).is_some()) && dfs(1, &mut sigma, &fibers, &due, &lift);
            ok.then_some(sigma)
        })
    }?;
    let emap = (0..k0.edge_count()).map(|e| lift(e, &sigma)).collect::<Option<Vec<_>>>()?;
    GraphMap::new(k0.clone(), m.clone(), sigma, emap).ok()
}

pub fn has_section(b: &Bibundle) -> bool {
    find_section(b).is_some()
}

/// `f: M → N` is a graph isomorphism over both anchors intertwining both actions.
pub fn check_bibundle_iso(b1: &Bibundle, b2: &Bibundle, f: &GraphMap) -> bool {
    if !same_groupoid(&b1.k, &b2.k) || !same_groupoid(&b1.g, &b2.g) || !f.is_isomorphism() {
        return false;
    }
    for x in b1.carrier.cells() {
        let fx = f.apply(x);
        if b2.tau.apply(fx) != b1.tau.apply(x) || b2.rho.apply(fx) != b1.rho.apply(x) {
            return false;
        }
    }
    for c in b1.left.domain.graph.cells() {
        let (h, x) = b1.left.split(c);
        if b2.lact(h, f.apply(x)) != Some(f.apply(b1.left.act.apply(c))) {
            return false;
        }
    }
    for c in b1.right.domain.graph.cells() {
        let (a, x) = b1.right.split(c);
        if b2.ract(f.apply(x), a) != Some(f.apply(b1.right.act.apply(c))) {
            return false;
        }
    }
    true
}

/// Searches for a bibundle isomorphism; a value on one cell fixes its orbit.
pub fn search_bibundle_iso(b1: &Bibundle, b2: &Bibundle) -> Option<GraphMap> {
    if !same_groupoid(&b1.k, &b2.k) || !same_groupoid(&b1.g, &b2.g) {
        return None;
    }
    if b1.carrier.vertex_count() != b2.carrier.vertex_count() || b1.carrier.edge_count() != b2.carrier.edge_count() {
        return None;
    }
    search::solve_first(&IsoProblem::new(b1, b2))
}

struct IsoProblem<'a> {
    b1: &'a Bibundle,
    b2: &'a Bibundle,
    /// Label `i < k_arrows.len()` acts from the left, the rest from the right.
    k_arrows: Vec<Cell>,
    g_arrows: Vec<Cell>,
    by_anchor: HashMap<(Cell, Cell, bool), Vec<Cell>>,
}

impl<'a> IsoProblem<'a> {
    fn new(b1: &'a Bibundle, b2: &'a Bibundle) -> Self {
        let mut by_anchor: HashMap<(Cell, Cell, bool), Vec<Cell>> = HashMap::new();
        for c in all_oriented_cells(&b2.carrier) {
            by_anchor.entry((b2.tau.apply(c), b2.rho.apply(c), c.is_vertex())).or_default().push(c);
        }
        IsoProblem { b1, b2, k_arrows: all_oriented_cells(&b1.k.g1), g_arrows: all_oriented_cells(&b1.g.g1), by_anchor }
    }
}

impl Problem for IsoProblem<'_> {
    type Out = GraphMap;

    fn domain(&self) -> &Graph {
        &self.b1.carrier
    }

    fn codomain(&self) -> &Graph {
        &self.b2.carrier
    }

    fn links(&self) -> Vec<(Cell, Cell, usize)> {
        let mut out = Vec::new();
        let nk = self.k_arrows.len();
        for x in all_oriented_cells(&self.b1.carrier) {
            for (i, &h) in self.k_arrows.iter().enumerate() {
                if let Some(y) = self.b1.lact(h, x) {
                    out.push((x, y, i));
                }
            }
            for (i, &a) in self.g_arrows.iter().enumerate() {
                if let Some(y) = self.b1.ract(x, a) {
                    out.push((x, y, nk + i));
                }
            }
        }
        out
    }

    fn transport(&self, label: usize, v: Cell) -> Option<Cell> {
        let nk = self.k_arrows.len();
        if label < nk {
            self.b2.lact(self.k_arrows[label], v)
        } else {
            self.b2.ract(v, self.g_arrows[label - nk])
        }
    }

    fn candidates(&self, rep: Cell) -> Vec<Cell> {
        let key = (self.b1.tau.apply(rep), self.b1.rho.apply(rep), rep.is_vertex());
        self.by_anchor.get(&key).cloned().unwrap_or_default()
    }

    fn finish(&self, vmap: Vec<usize>, emap: Vec<Cell>) -> Option<GraphMap> {
        let f = GraphMap::new(self.b1.carrier.clone(), self.b2.carrier.clone(), vmap, emap).ok()?;
        check_bibundle_iso(self.b1, self.b2, &f).then_some(f)
    }
}
