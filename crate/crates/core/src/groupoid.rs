//! Groupoids internal to graphs, functors, natural transformations,
//! isotropy and orbits, essential equivalences and weak pullbacks.
//!
//! Every structure map is a [`GraphMap`]. Multiplication is defined on the
//! fiber product of `s` (first factor) and `t` (second factor): `m(h, g)` is
//! "h after g" and requires `s(h) = t(g)`. All axioms are checked on vertices
//! and on edges.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{product, same_graph, Cell, FiberProduct, Graph, GraphError, GraphMap, UnionFind};
use crate::search;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{axiom} violated at {witness}")]
    Axiom { axiom: &'static str, witness: String },
    #[error("functor {equation} fails at {witness}")]
    Functor { equation: &'static str, witness: String },
    #[error("natural transformation {equation} fails at {witness}")]
    NatTrans { equation: &'static str, witness: String },
    #[error("mismatched groupoids: {0}")]
    Mismatch(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("quotient is not a graph: {0}")]
    BadQuotient(String),
}

impl GroupoidError {
    fn axiom(axiom: &'static str, witness: impl Into<String>) -> Self {
        GroupoidError::Axiom { axiom, witness: witness.into() }
    }
}

/// A groupoid whose objects and arrows form finite graphs.
#[derive(Clone)]
pub struct GraphGroupoid {
    pub name: String,
    pub g0: Arc<Graph>,
    pub g1: Arc<Graph>,
    pub s: GraphMap,
    pub t: GraphMap,
    pub u: GraphMap,
    pub inv: GraphMap,
    /// Composable pairs `(h, g)` with `s(h) = t(g)`.
    pub comp: FiberProduct,
    pub m: GraphMap,
}

impl fmt::Debug for GraphGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphGroupoid")
            .field("name", &self.name)
            .field("objects", &self.g0)
            .field("arrows", &self.g1)
            .finish()
    }
}

type CellFn<'a> = dyn FnMut(Cell) -> Option<Cell> + 'a;

/// Builds a groupoid from cell-level closures and validates it.
///
/// Closures see vertices and forward edges; `mul` sees arbitrary oriented
/// composable pairs `(h, g)`.
#[allow(clippy::too_many_arguments)]
pub fn build_groupoid(
    name: impl Into<String>,
    g0: Arc<Graph>,
    g1: Arc<Graph>,
    s: &mut CellFn<'_>,
    t: &mut CellFn<'_>,
    u: &mut CellFn<'_>,
    inv: &mut CellFn<'_>,
    mul: &mut dyn FnMut(Cell, Cell) -> Option<Cell>,
) -> Result<GraphGroupoid, GroupoidError> {
    let g = assemble_groupoid(name, g0, g1, s, t, u, inv, mul)?;
    g.validate()?;
    Ok(g)
}

/// Same as [`build_groupoid`] without the final validation.
#[allow(clippy::too_many_arguments)]
pub fn assemble_groupoid(
    name: impl Into<String>,
    g0: Arc<Graph>,
    g1: Arc<Graph>,
    s: &mut CellFn<'_>,
    t: &mut CellFn<'_>,
    u: &mut CellFn<'_>,
    inv: &mut CellFn<'_>,
    mul: &mut dyn FnMut(Cell, Cell) -> Option<Cell>,
) -> Result<GraphGroupoid, GroupoidError> {
    let wrap = |what: &'static str| move |e: GraphError| GroupoidError::axiom("structure map", format!("{what}: {e}"));
    let s = GraphMap::from_cell_fn(g1.clone(), g0.clone(), s).map_err(wrap("s"))?;
    let t = GraphMap::from_cell_fn(g1.clone(), g0.clone(), t).map_err(wrap("t"))?;
    let u = GraphMap::from_cell_fn(g0.clone(), g1.clone(), u).map_err(wrap("u"))?;
    let inv = GraphMap::from_cell_fn(g1.clone(), g1.clone(), inv).map_err(wrap("inv"))?;
    let comp = FiberProduct::new(&s, &t)?;
    let comp_ref = comp.clone();
    let m = GraphMap::from_cell_fn(comp.graph.clone(), g1.clone(), |c| {
        let (h, g) = comp_ref.split(c);
        mul(h, g)
    })
    .map_err(wrap("m"))?;
    Ok(GraphGroupoid { name: name.into(), g0, g1, s, t, u, inv, comp, m })
}

impl GraphGroupoid {
    /// A finite groupoid (edgeless object and arrow graphs).
    ///
    /// `compose(h, g)` returns the index of `h∘g`; units and inverses are
    /// read off the table.
    pub fn edgeless<F>(
        name: &str,
        objects: &[&str],
        arrows: &[(&str, &str, &str)],
        compose: F,
    ) -> Result<GraphGroupoid, GroupoidError>
    where
        F: Fn(usize, usize) -> usize,
    {
        let g0 = Arc::new(Graph::from_strs(objects, &[])?);
        let g1 = Arc::new(Graph::from_strs(&arrows.iter().map(|a| a.0).collect::<Vec<_>>(), &[])?);
        let src: Vec<usize> = arrows.iter().map(|a| g0.vertex(a.1)).collect::<Result<_, _>>()?;
        let tgt: Vec<usize> = arrows.iter().map(|a| g0.vertex(a.2)).collect::<Result<_, _>>()?;
        let n = arrows.len();
        let unit: Vec<Option<usize>> = (0..g0.vertex_count())
            .map(|x| (0..n).find(|&a| src[a] == x && tgt[a] == x && compose(a, a) == a))
            .collect();
        let inverse = |a: usize| -> Option<usize> {
            let ut = unit[tgt[a]]?;
            (0..n).find(|&b| src[b] == tgt[a] && tgt[b] == src[a] && compose(a, b) == ut)
        };
        build_groupoid(
            name,
            g0,
            g1,
            &mut |c| c.as_vertex().map(|a| Cell::V(src[a])),
            &mut |c| c.as_vertex().map(|a| Cell::V(tgt[a])),
            &mut |c| c.as_vertex().and_then(|x| unit[x]).map(Cell::V),
            &mut |c| c.as_vertex().and_then(inverse).map(Cell::V),
            &mut |h, g| Some(Cell::V(compose(h.as_vertex()?, g.as_vertex()?))),
        )
    }

    /// The unit groupoid `u(X)`: only identity arrows.
    pub fn unit_groupoid(name: &str, x: Arc<Graph>) -> GraphGroupoid {
        build_groupoid(name, x.clone(), x, &mut Some, &mut Some, &mut Some, &mut Some, &mut |_, g| Some(g))
            .expect("unit groupoid is valid")
    }

    /// The pair groupoid on a set: one arrow between any two objects.
    pub fn pair_groupoid(name: &str, objects: &[&str]) -> GraphGroupoid {
        let n = objects.len();
        let names: Vec<String> = (0..n * n).map(|i| format!("({},{})", objects[i / n], objects[i % n])).collect();
        // arrow (y,x) goes from x to y
        let arrows: Vec<(&str, &str, &str)> =
            (0..n * n).map(|i| (names[i].as_str(), objects[i % n], objects[i / n])).collect();
        GraphGroupoid::edgeless(name, objects, &arrows, |h, g| (h / n) * n + g % n).expect("pair groupoid is valid")
    }

    /// The trivial groupoid with one object and one arrow.
    pub fn trivial(name: &str) -> GraphGroupoid {
        GraphGroupoid::edgeless(name, &["pt"], &[("1", "pt", "pt")], |_, _| 0).expect("trivial groupoid is valid")
    }

    /// Action groupoid of a group (one-object edgeless groupoid) acting on
    /// a graph from the left: arrows `(h, x): x → h·x`.
    pub fn group_action<F>(
        name: &str,
        group: &GraphGroupoid,
        space: Arc<Graph>,
        act: F,
    ) -> Result<GraphGroupoid, GroupoidError>
    where
        F: Fn(usize, Cell) -> Cell,
    {
        if group.object_count() != 1 || group.g1.edge_count() != 0 {
            return Err(GroupoidError::Mismatch(format!("{} is not a finite group", group.name)));
        }
        let prod = product(&group.g1, &space);
        let el = |c: Cell| c.as_vertex().expect("group elements are vertices");
        let mul = |a: usize, b: usize| {
            group.m.vertex_image(
                group.comp.pair(Cell::V(a), Cell::V(b)).and_then(Cell::as_vertex).expect("group composes"),
            )
        };
        let one = group.u.vertex_image(0);
        build_groupoid(
            name,
            space.clone(),
            prod.graph.clone(),
            &mut |c| Some(prod.split(c).1),
            &mut |c| {
                let (h, x) = prod.split(c);
                Some(act(el(h), x))
            },
            &mut |x| prod.pair(Cell::V(one), x),
            &mut |c| {
                let (h, x) = prod.split(c);
                prod.pair(Cell::V(group.inv.vertex_image(el(h))), act(el(h), x))
            },
            &mut |a, b| {
                let (h2, _) = prod.split(a);
                let (h1, x) = prod.split(b);
                prod.pair(Cell::V(mul(el(h2), el(h1))), x)
            },
        )
    }

    /// `h∘g` on cells, when composable.
    pub fn mul(&self, h: Cell, g: Cell) -> Option<Cell> {
        self.comp.pair(h, g).map(|c| self.m.apply(c))
    }

    pub fn src(&self, g: Cell) -> Cell {
        self.s.apply(g)
    }

    pub fn tgt(&self, g: Cell) -> Cell {
        self.t.apply(g)
    }

    pub fn unit(&self, x: Cell) -> Cell {
        self.u.apply(x)
    }

    pub fn inverse(&self, g: Cell) -> Cell {
        self.inv.apply(g)
    }

    pub fn object(&self, name: &str) -> Result<usize, GroupoidError> {
        self.g0.vertex(name).map_err(|_| GroupoidError::UnknownObject(name.to_string()))
    }

    pub fn arrow(&self, name: &str) -> Result<usize, GroupoidError> {
        Ok(self.g1.vertex(name)?)
    }

    pub fn object_name(&self, x: usize) -> &str {
        self.g0.vertex_name(x)
    }

    pub fn arrow_name(&self, g: usize) -> &str {
        self.g1.vertex_name(g)
    }

    pub fn arrow_count(&self) -> usize {
        self.g1.vertex_count()
    }

    pub fn object_count(&self) -> usize {
        self.g0.vertex_count()
    }

    /// Arrow-vertices from `x` to `y`.
    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.g1.vertex_count()).filter(|&g| self.s.vertex_image(g) == x && self.t.vertex_image(g) == y).collect()
    }

    /// All oriented arrow cells keyed by their (source, target) cells.
    pub fn hom_cells(&self) -> HashMap<(Cell, Cell), Vec<Cell>> {
        let mut out: HashMap<(Cell, Cell), Vec<Cell>> = HashMap::new();
        for c in oriented_cells(&self.g1) {
            out.entry((self.src(c), self.tgt(c))).or_default().push(c);
        }
        out
    }

    /// Checks every groupoid axiom on vertices and edges.
    pub fn validate(&self) -> Result<(), GroupoidError> {
        self.g0.validate()?;
        self.g1.validate()?;
        let g1 = &self.g1;
        let name = |c: Cell| g1.cell_name(c);
        let pair_name = |h: Cell, g: Cell| format!("({},{})", g1.cell_name(h), g1.cell_name(g));

        for c in self.comp.graph.cells() {
            let (h, g) = self.comp.split(c);
            let hg = self.m.apply(c);
            if self.src(hg) != self.src(g) || self.tgt(hg) != self.tgt(h) {
                return Err(GroupoidError::axiom("source/target axiom", pair_name(h, g)));
            }
        }
        for x in self.g0.cells() {
            let ux = self.unit(x);
            if self.src(ux) != x || self.tgt(ux) != x {
                return Err(GroupoidError::axiom("unit axiom", self.g0.cell_name(x)));
            }
        }
        for g in g1.cells() {
            let right = self.mul(g, self.unit(self.src(g)));
            let left = self.mul(self.unit(self.tgt(g)), g);
            if right != Some(g) || left != Some(g) {
                return Err(GroupoidError::axiom("unit axiom", name(g)));
            }
        }
        let by_target = {
            let mut m: HashMap<Cell, Vec<Cell>> = HashMap::new();
            for c in oriented_cells(g1) {
                m.entry(self.tgt(c)).or_default().push(c);
            }
            m
        };
        for c in self.comp.graph.cells() {
            let (a, b) = self.comp.split(c);
            let ab = self.m.apply(c);
            for &d in by_target.get(&self.src(b)).map(Vec::as_slice).unwrap_or(&[]) {
                let lhs = self.mul(ab, d);
                let rhs = self.mul(b, d).and_then(|bd| self.mul(a, bd));
                if lhs.is_none() || lhs != rhs {
                    return Err(GroupoidError::axiom(
                        "associativity axiom",
                        format!("({},{},{})", name(a), name(b), name(d)),
                    ));
                }
            }
        }
        for g in g1.cells() {
            let gi = self.inverse(g);
            if self.inverse(gi) != g
                || self.mul(g, gi) != Some(self.unit(self.tgt(g)))
                || self.mul(gi, g) != Some(self.unit(self.src(g)))
            {
                return Err(GroupoidError::axiom("inverse axiom", name(g)));
            }
        }
        Ok(())
    }

    /// Isotropy group at an object.
    pub fn isotropy_group(&self, x: usize) -> Result<FiniteGroup, GroupoidError> {
        if x >= self.object_count() {
            return Err(GroupoidError::UnknownObject(format!("#{x}")));
        }
        let elems = self.hom(x, x);
        let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let table = elems
            .iter()
            .map(|&h| {
                elems
                    .iter()
                    .map(|&g| {
                        let hg = self.mul(Cell::V(h), Cell::V(g)).and_then(Cell::as_vertex).expect("loops compose");
                        pos[&hg]
                    })
                    .collect()
            })
            .collect();
        let identity = pos[&self.u.vertex_image(x)];
        Ok(FiniteGroup { elements: elems.iter().map(|&g| self.arrow_name(g).to_string()).collect(), table, identity })
    }

    pub fn orbits(&self) -> Orbits {
        let pairs: Vec<(Cell, Cell)> = self.g1.cells().map(|c| (self.src(c), self.tgt(c))).collect();
        let q = quotient_graph(&self.g0, &pairs, QuotientMode::Lenient).expect("lenient quotient never fails");
        let block_of: Vec<usize> = (0..self.object_count()).map(|v| q.map.vertex_image(v)).collect();
        let mut blocks = vec![Vec::new(); q.graph.vertex_count()];
        for (v, &b) in block_of.iter().enumerate() {
            blocks[b].push(self.object_name(v).to_string());
        }
        Orbits { blocks, block_of, space: q.graph, quotient: q.map, folded_edges: q.folded }
    }
}

fn oriented_cells(g: &Graph) -> impl Iterator<Item = Cell> + '_ {
    (0..g.vertex_count()).map(Cell::V).chain((0..g.edge_count()).flat_map(|e| [Cell::E(e, true), Cell::E(e, false)]))
}

pub(crate) fn all_oriented_cells(g: &Graph) -> Vec<Cell> {
    oriented_cells(g).collect()
}

pub fn same_groupoid(a: &GraphGroupoid, b: &GraphGroupoid) -> bool {
    same_graph(&a.g0, &b.g0) && same_graph(&a.g1, &b.g1) && a.s.agrees_with(&b.s) && a.t.agrees_with(&b.t)
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    /// Order of element `a`.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.table[x][a];
            k += 1;
        }
        k
    }
}

#[derive(Clone, Debug)]
pub struct Orbits {
    pub blocks: Vec<Vec<String>>,
    pub block_of: Vec<usize>,
    pub space: Arc<Graph>,
    pub quotient: GraphMap,
    /// Edges whose orbit contains their own reverse, collapsed in the orbit space.
    pub folded_edges: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientMode {
    /// Reject edges identified with their reverse or with a vertex.
    Strict,
    /// Collapse edges identified with a vertex; reject folded edges.
    Reflexive,
    /// Collapse both kinds onto a vertex.
    Lenient,
}

#[derive(Clone, Debug)]
pub struct Quotient {
    pub graph: Arc<Graph>,
    pub map: GraphMap,
    pub folded: Vec<String>,
}

/// Coequalizer of a graph by cell identifications.
///
/// Vertex classes are generated by vertex pairs and by endpoints of paired
/// edges. Class names are `[rep]` with the lowest-index member as `rep`.
pub fn quotient_graph(g: &Arc<Graph>, pairs: &[(Cell, Cell)], mode: QuotientMode) -> Result<Quotient, GroupoidError> {
    let nv = g.vertex_count();
    let ne = g.edge_count();
    let mut vu = UnionFind::new(nv);
    // node 2e is (e,+), 2e+1 is (e,-)
    let mut eu = UnionFind::new(2 * ne);
    let node = |e: usize, fwd: bool| 2 * e + usize::from(!fwd);
    let mut collapsed = vec![false; ne];
    for &(a, b) in pairs {
        vu.union(g.tail(a), g.tail(b));
        vu.union(g.head(a), g.head(b));
        match (a, b) {
            (Cell::E(x, fx), Cell::E(y, fy)) => {
                eu.union(node(x, fx), node(y, fy));
                eu.union(node(x, !fx), node(y, !fy));
            }
            (Cell::E(x, _), Cell::V(_)) | (Cell::V(_), Cell::E(x, _)) => {
                if mode == QuotientMode::Strict {
                    return Err(GroupoidError::BadQuotient(format!(
                        "edge `{}` is identified with a vertex",
                        g.edge_name(x)
                    )));
                }
                collapsed[x] = true;
            }
            (Cell::V(_), Cell::V(_)) => {}
        }
    }
    let mut folded_class = vec![false; 2 * ne];
    let mut folded = Vec::new();
    for e in 0..ne {
        let r = eu.find(node(e, true));
        let fold = r == eu.find(node(e, false));
        if fold || collapsed[e] {
            if fold && mode != QuotientMode::Lenient {
                return Err(GroupoidError::BadQuotient(format!(
                    "edge `{}` is identified with its reverse",
                    g.edge_name(e)
                )));
            }
            folded_class[r] = true;
            folded_class[eu.find(node(e, false))] = true;
        }
    }
    for e in 0..ne {
        if folded_class[eu.find(node(e, true))] {
            folded.push(g.edge_name(e).to_string());
            vu.union(g.edge(e).tail, g.edge(e).head);
        }
    }
    let vlabel = vu.labels();
    let nblocks = vlabel.iter().copied().max().map_or(0, |m| m + 1);
    let mut vnames = vec![String::new(); nblocks];
    for v in (0..nv).rev() {
        vnames[vlabel[v]] = format!("[{}]", g.vertex_name(v));
    }
    let mut edges = Vec::new();
    let mut class_edge: HashMap<usize, Cell> = HashMap::new();
    let mut emap = Vec::with_capacity(ne);
    for e in 0..ne {
        let rp = eu.find(node(e, true));
        if folded_class[rp] {
            emap.push(Cell::V(vlabel[g.edge(e).tail]));
            continue;
        }
        if let Some(&c) = class_edge.get(&rp) {
            emap.push(c);
            continue;
        }
        let rm = eu.find(node(e, false));
        if let Some(&c) = class_edge.get(&rm) {
            emap.push(c.reversed());
            continue;
        }
        let id = edges.len();
        edges.push((
            format!("[{}]", g.edge_name(e)),
            vnames[vlabel[g.edge(e).tail]].clone(),
            vnames[vlabel[g.edge(e).head]].clone(),
        ));
        class_edge.insert(rp, Cell::E(id, true));
        emap.push(Cell::E(id, true));
    }
    let qg = Arc::new(Graph::new(vnames, edges)?);
    let map = GraphMap::new(g.clone(), qg.clone(), vlabel, emap)?;
    Ok(Quotient { graph: qg, map, folded })
}

/// A functor between graph groupoids.
#[derive(Clone)]
pub struct Functor {
    pub name: String,
    pub source: Arc<GraphGroupoid>,
    pub target: Arc<GraphGroupoid>,
    pub f0: GraphMap,
    pub f1: GraphMap,
}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functor({}: {} -> {})", self.name, self.source.name, self.target.name)
    }
}

impl Functor {
    pub fn new(
        name: impl Into<String>,
        source: Arc<GraphGroupoid>,
        target: Arc<GraphGroupoid>,
        f0: GraphMap,
        f1: GraphMap,
    ) -> Result<Functor, GroupoidError> {
        let f = Functor { name: name.into(), source, target, f0, f1 };
        f.validate()?;
        Ok(f)
    }

    /// Builds from cell closures and validates.
    pub fn from_fns(
        name: impl Into<String>,
        source: Arc<GraphGroupoid>,
        target: Arc<GraphGroupoid>,
        f0: impl FnMut(Cell) -> Option<Cell>,
        f1: impl FnMut(Cell) -> Option<Cell>,
    ) -> Result<Functor, GroupoidError> {
        let f0 = GraphMap::from_cell_fn(source.g0.clone(), target.g0.clone(), f0)?;
        let f1 = GraphMap::from_cell_fn(source.g1.clone(), target.g1.clone(), f1)?;
        Functor::new(name, source, target, f0, f1)
    }

    pub fn identity(g: Arc<GraphGroupoid>) -> Functor {
        Functor {
            name: format!("id_{}", g.name),
            f0: GraphMap::identity(g.g0.clone()),
            f1: GraphMap::identity(g.g1.clone()),
            source: g.clone(),
            target: g,
        }
    }

    pub fn ob(&self, c: Cell) -> Cell {
        self.f0.apply(c)
    }

    pub fn ar(&self, c: Cell) -> Cell {
        self.f1.apply(c)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Functor) -> Result<Functor, GroupoidError> {
        if !same_groupoid(&inner.target, &self.source) {
            return Err(GroupoidError::Mismatch(format!("cannot compose {} after {}", self.name, inner.name)));
        }
        Ok(Functor {
            name: format!("{}*{}", self.name, inner.name),
            source: inner.source.clone(),
            target: self.target.clone(),
            f0: self.f0.compose(&inner.f0.retarget(self.f0.source().clone())?)?,
            f1: self.f1.compose(&inner.f1.retarget(self.f1.source().clone())?)?,
        })
    }

    pub fn validate(&self) -> Result<(), GroupoidError> {
        let (k, g) = (&self.source, &self.target);
        if !same_graph(self.f0.source(), &k.g0)
            || !same_graph(self.f0.target(), &g.g0)
            || !same_graph(self.f1.source(), &k.g1)
            || !same_graph(self.f1.target(), &g.g1)
        {
            return Err(GroupoidError::Mismatch(format!("components of {} have wrong graphs", self.name)));
        }
        let err = |equation, c: Cell, graph: &Graph| GroupoidError::Functor { equation, witness: graph.cell_name(c) };
        for h in k.g1.cells() {
            let fh = self.ar(h);
            if g.src(fh) != self.ob(k.src(h)) {
                return Err(err("s∘f1 = f0∘s", h, &k.g1));
            }
            if g.tgt(fh) != self.ob(k.tgt(h)) {
                return Err(err("t∘f1 = f0∘t", h, &k.g1));
            }
            if self.ar(k.inverse(h)) != g.inverse(fh) {
                return Err(err("f1∘inv = inv∘f1", h, &k.g1));
            }
        }
        for x in k.g0.cells() {
            if self.ar(k.unit(x)) != g.unit(self.ob(x)) {
                return Err(err("f1∘u = u∘f0", x, &k.g0));
            }
        }
        for c in k.comp.graph.cells() {
            let (a, b) = k.comp.split(c);
            if g.mul(self.ar(a), self.ar(b)) != Some(self.ar(k.m.apply(c))) {
                return Err(GroupoidError::Functor {
                    equation: "f1∘m = m∘(f1×f1)",
                    witness: format!("({},{})", k.g1.cell_name(a), k.g1.cell_name(b)),
                });
            }
        }
        Ok(())
    }

    pub fn agrees_with(&self, other: &Functor) -> bool {
        self.f0.agrees_with(&other.f0) && self.f1.agrees_with(&other.f1)
    }
}

/// A natural transformation `from ⇒ to`: `T(x): from(x) → to(x)`.
#[derive(Clone)]
pub struct NatTrans {
    pub from: Functor,
    pub to: Functor,
    pub t: GraphMap,
}

impl fmt::Debug for NatTrans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NatTrans({} => {}: {:?})", self.from.name, self.to.name, self.t)
    }
}

impl NatTrans {
    pub fn new(from: Functor, to: Functor, t: GraphMap) -> Result<NatTrans, GroupoidError> {
        let n = NatTrans { from, to, t };
        n.validate()?;
        Ok(n)
    }

    pub fn from_fn(from: Functor, to: Functor, t: impl FnMut(Cell) -> Option<Cell>) -> Result<NatTrans, GroupoidError> {
        let t = GraphMap::from_cell_fn(from.source.g0.clone(), from.target.g1.clone(), t)?;
        NatTrans::new(from, to, t)
    }

    /// `T(x) = u(φ(x))`.
    pub fn identity(f: Functor) -> NatTrans {
        let g = f.target.clone();
        let t = g.u.compose(&f.f0).expect("identity 2-cell composes");
        NatTrans { from: f.clone(), to: f, t }
    }

    pub fn at(&self, x: Cell) -> Cell {
        self.t.apply(x)
    }

    pub fn validate(&self) -> Result<(), GroupoidError> {
        let (phi, psi) = (&self.from, &self.to);
        if !same_groupoid(&phi.source, &psi.source) || !same_groupoid(&phi.target, &psi.target) {
            return Err(GroupoidError::Mismatch("natural transformation between non-parallel functors".into()));
        }
        let (k, g) = (&phi.source, &phi.target);
        if !same_graph(self.t.source(), &k.g0) || !same_graph(self.t.target(), &g.g1) {
            return Err(GroupoidError::Mismatch("component map has wrong graphs".into()));
        }
        for x in k.g0.cells() {
            let tx = self.at(x);
            if g.src(tx) != phi.ob(x) {
                return Err(GroupoidError::NatTrans { equation: "s∘T = φ0", witness: k.g0.cell_name(x) });
            }
            if g.tgt(tx) != psi.ob(x) {
                return Err(GroupoidError::NatTrans { equation: "t∘T = ψ0", witness: k.g0.cell_name(x) });
            }
        }
        for h in k.g1.cells() {
            let lhs = g.mul(psi.ar(h), self.at(k.src(h)));
            let rhs = g.mul(self.at(k.tgt(h)), phi.ar(h));
            if lhs.is_none() || lhs != rhs {
                return Err(GroupoidError::NatTrans {
                    equation: "ψ(h)∘T(x) = T(y)∘φ(h)", witness: k.g1.cell_name(h)
                });
            }
        }
        Ok(())
    }

    pub fn agrees_with(&self, other: &NatTrans) -> bool {
        self.t.agrees_with(&other.t)
    }
}

/// `b·a`: first `a: φ ⇒ ψ`, then `b: ψ ⇒ χ`.
pub fn nat_vertical(a: &NatTrans, b: &NatTrans) -> Result<NatTrans, GroupoidError> {
    if !a.to.agrees_with(&b.from) {
        return Err(GroupoidError::Mismatch("vertical composite of non-adjacent 2-cells".into()));
    }
    let g = a.from.target.clone();
    NatTrans::from_fn(a.from.clone(), b.to.clone(), |x| g.mul(b.at(x), a.at(x)))
}

/// Horizontal composite of `a: φ ⇒ ψ` (K→G) and `b: φ' ⇒ ψ'` (G→L): `φ'φ ⇒ ψ'ψ`.
pub fn nat_horizontal(a: &NatTrans, b: &NatTrans) -> Result<NatTrans, GroupoidError> {
    let from = b.from.compose(&a.from)?;
    let to = b.to.compose(&a.to)?;
    let l = b.from.target.clone();
    NatTrans::from_fn(from, to, |x| l.mul(b.at(a.to.ob(x)), b.from.ar(a.at(x))))
}

/// Lowest-index natural transformation `φ ⇒ ψ`, if any.
pub fn search_nat_trans(phi: &Functor, psi: &Functor) -> Option<NatTrans> {
    search::solve_first(&NatProblem::new(phi, psi))
}

/// Every natural transformation `φ ⇒ ψ` (exponential; desk-scale inputs only).
pub fn enumerate_nat_trans(phi: &Functor, psi: &Functor) -> Vec<NatTrans> {
    search::solve_all(&NatProblem::new(phi, psi), usize::MAX)
}

/// Components are linked by arrows: `T(y) = ψ(h) T(x) φ(h)⁻¹` for `h: x → y`.
struct NatProblem<'a> {
    phi: &'a Functor,
    psi: &'a Functor,
    arrows: Vec<Cell>,
    homs: HashMap<(Cell, Cell), Vec<Cell>>,
}

impl<'a> NatProblem<'a> {
    fn new(phi: &'a Functor, psi: &'a Functor) -> Self {
        NatProblem { phi, psi, arrows: all_oriented_cells(&phi.source.g1), homs: phi.target.hom_cells() }
    }
}

impl search::Problem for NatProblem<'_> {
    type Out = NatTrans;

    fn domain(&self) -> &Graph {
        &self.phi.source.g0
    }

    fn codomain(&self) -> &Graph {
        &self.phi.target.g1
    }

    fn links(&self) -> Vec<(Cell, Cell, usize)> {
        let k = &self.phi.source;
        self.arrows.iter().enumerate().map(|(i, &h)| (k.src(h), k.tgt(h), i)).collect()
    }

    fn transport(&self, label: usize, tx: Cell) -> Option<Cell> {
        let g = &self.phi.target;
        let h = self.arrows[label];
        g.mul(g.mul(self.psi.ar(h), tx)?, g.inverse(self.phi.ar(h)))
    }

    fn candidates(&self, rep: Cell) -> Vec<Cell> {
        self.homs.get(&(self.phi.ob(rep), self.psi.ob(rep))).cloned().unwrap_or_default()
    }

    fn finish(&self, vmap: Vec<usize>, emap: Vec<Cell>) -> Option<NatTrans> {
        let t = GraphMap::new(self.phi.source.g0.clone(), self.phi.target.g1.clone(), vmap, emap).ok()?;
        NatTrans::new(self.phi.clone(), self.psi.clone(), t).ok()
    }
}

/// Outcome of the essential-equivalence test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssEqCertificate {
    pub essentially_surjective: bool,
    pub fully_faithful: bool,
    pub witness: Option<String>,
    /// First object pair `(x, y, |K(x,y)|, |G(φx,φy)|)` with differing hom-set sizes.
    pub hom_mismatch: Option<(String, String, usize, usize)>,
}

impl EssEqCertificate {
    pub fn holds(&self) -> bool {
        self.essentially_surjective && self.fully_faithful
    }
}

/// The source-target map `G1 → G0 × G0` together with the product.
fn anchor_map(g: &GraphGroupoid) -> (FiberProduct, GraphMap) {
    let prod = product(&g.g0, &g.g0);
    let st = GraphMap::from_cell_fn(g.g1.clone(), prod.graph.clone(), |c| prod.pair(g.src(c), g.tgt(c)))
        .expect("(s,t) is a graph map");
    (prod, st)
}

/// Tests (i) `t∘pr1: G1 ×_{G0} K0 → G0` is surjective and (ii) `K1` is the
/// pullback of `(s,t)` along `φ0 × φ0`.
pub fn is_essential_equivalence(phi: &Functor) -> EssEqCertificate {
    let (k, g) = (&phi.source, &phi.target);
    let fp =
        FiberProduct::new(&g.s, &phi.f0.retarget(g.s.target().clone()).expect("same objects")).expect("common target");
    let tp = g.t.compose(&fp.p1).expect("composable");
    let essentially_surjective = tp.is_surjective();
    let mut witness = None;
    if !essentially_surjective {
        let hit: std::collections::HashSet<usize> = (0..fp.graph.vertex_count()).map(|v| tp.vertex_image(v)).collect();
        witness = (0..g.object_count())
            .find(|v| !hit.contains(v))
            .map(|v| format!("object `{}` is not reached", g.object_name(v)))
            .or_else(|| Some("some object edge is not reached".to_string()));
    }

    let (gprod, gst) = anchor_map(g);
    let kprod = product(&k.g0, &k.g0);
    let phi2 = GraphMap::from_cell_fn(kprod.graph.clone(), gprod.graph.clone(), |c| {
        let (a, b) = kprod.split(c);
        gprod.pair(phi.ob(a), phi.ob(b))
    })
    .expect("φ0×φ0 is a graph map");
    let pb = FiberProduct::new(&gst, &phi2).expect("common target");
    let canon =
        GraphMap::from_cell_fn(k.g1.clone(), pb.graph.clone(), |h| pb.pair(phi.ar(h), kprod.pair(k.src(h), k.tgt(h))?))
            .expect("canonical comparison is a graph map");
    let fully_faithful = canon.is_isomorphism();
    let mut hom_mismatch = None;
    if !fully_faithful {
        'outer: for x in 0..k.object_count() {
            for y in 0..k.object_count() {
                let a = k.hom(x, y).len();
                let b = g.hom(phi.f0.vertex_image(x), phi.f0.vertex_image(y)).len();
                if a != b {
                    hom_mismatch = Some((k.object_name(x).to_string(), k.object_name(y).to_string(), a, b));
                    break 'outer;
                }
            }
        }
        if witness.is_none() {
            witness = Some(match &hom_mismatch {
                Some((x, y, a, b)) => format!("|hom({x},{y})| = {a} ≠ {b}"),
                None => "arrow edges are not the pullback of (s,t)".to_string(),
            });
        }
    }
    EssEqCertificate { essentially_surjective, fully_faithful, witness, hom_mismatch }
}

/// Cell bookkeeping for weak pullback objects `(x, g, y)` and arrows `(k, g, l)`.
#[derive(Clone, Debug)]
pub struct TripleIndex {
    obj_a: FiberProduct,
    obj: FiberProduct,
    arr_a: FiberProduct,
    arr: FiberProduct,
}

impl TripleIndex {
    pub fn object_cell(&self, x: Cell, g: Cell, y: Cell) -> Option<Cell> {
        self.obj.pair(self.obj_a.pair(x, g)?, y)
    }

    pub fn split_object(&self, c: Cell) -> (Cell, Cell, Cell) {
        let (xg, y) = self.obj.split(c);
        let (x, g) = self.obj_a.split(xg);
        (x, g, y)
    }

    pub fn arrow_cell(&self, k: Cell, g: Cell, l: Cell) -> Option<Cell> {
        self.arr.pair(self.arr_a.pair(k, g)?, l)
    }

    pub fn split_arrow(&self, c: Cell) -> (Cell, Cell, Cell) {
        let (kg, l) = self.arr.split(c);
        let (k, g) = self.arr_a.split(kg);
        (k, g, l)
    }
}

/// The weak pullback of `ψ: K → G` and `φ: L → G` with its projections and
/// the 2-cell `ψ p1 ⇒ φ p3`.
#[derive(Clone, Debug)]
pub struct WeakPullback {
    pub groupoid: Arc<GraphGroupoid>,
    pub p1: Functor,
    pub p3: Functor,
    pub cell: NatTrans,
    pub index: TripleIndex,
}

pub fn weak_pullback(psi: &Functor, phi: &Functor) -> Result<WeakPullback, GroupoidError> {
    if !same_groupoid(&psi.target, &phi.target) {
        return Err(GroupoidError::Mismatch("weak pullback of functors with different targets".into()));
    }
    let (k, l, g) = (psi.source.clone(), phi.source.clone(), psi.target.clone());
    let g0 = g.g0.clone();
    let psi0 = psi.f0.retarget(g0.clone())?;
    let phi0 = phi.f0.retarget(g0.clone())?;
    let obj_a = FiberProduct::new(&psi0, &g.s)?;
    let obj = FiberProduct::new(&g.t.compose(&obj_a.p2)?, &phi0)?;
    let arr_a = FiberProduct::new(&psi0.compose(&k.s)?, &g.s)?;
    let arr = FiberProduct::new(&g.t.compose(&arr_a.p2)?, &phi0.compose(&l.s)?)?;
    let w = TripleIndex { obj_a, obj, arr_a, arr };

    let target = |c: Cell| -> Option<Cell> {
        let (kk, gg, ll) = w.split_arrow(c);
        let g2 = g.mul(g.mul(phi.ar(ll), gg)?, g.inverse(psi.ar(kk)))?;
        w.object_cell(k.tgt(kk), g2, l.tgt(ll))
    };
    let grp = Arc::new(build_groupoid(
        format!("{}x{}", psi.name, phi.name),
        w.obj.graph.clone(),
        w.arr.graph.clone(),
        &mut |c| {
            let (kk, gg, ll) = w.split_arrow(c);
            w.object_cell(k.src(kk), gg, l.src(ll))
        },
        &mut |c| target(c),
        &mut |c| {
            let (x, gg, y) = w.split_object(c);
            w.arrow_cell(k.unit(x), gg, l.unit(y))
        },
        &mut |c| {
            let (kk, _, ll) = w.split_arrow(c);
            let (_, g2, _) = w.split_object(target(c)?);
            w.arrow_cell(k.inverse(kk), g2, l.inverse(ll))
        },
        &mut |a, b| {
            let (k2, _, l2) = w.split_arrow(a);
            let (k1, g1, l1) = w.split_arrow(b);
            w.arrow_cell(k.mul(k2, k1)?, g1, l.mul(l2, l1)?)
        },
    )?);
    let p1 = Functor::from_fns(
        format!("p1[{}]", grp.name),
        grp.clone(),
        k.clone(),
        |c| Some(w.split_object(c).0),
        |c| Some(w.split_arrow(c).0),
    )?;
    let p3 = Functor::from_fns(
        format!("p3[{}]", grp.name),
        grp.clone(),
        l.clone(),
        |c| Some(w.split_object(c).2),
        |c| Some(w.split_arrow(c).2),
    )?;
    let cell = NatTrans::from_fn(psi.compose(&p1)?, phi.compose(&p3)?, |c| Some(w.split_object(c).1))?;
    Ok(WeakPullback { groupoid: grp, p1, p3, cell, index: w })
}

/// Object-pair hom-set sizes, keyed by names (for reports).
pub fn hom_table(g: &GraphGroupoid) -> BTreeMap<(String, String), usize> {
    let mut out = BTreeMap::new();
    for a in 0..g.arrow_count() {
        let key = (g.object_name(g.s.vertex_image(a)).to_string(), g.object_name(g.t.vertex_image(a)).to_string());
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt2() -> Arc<GraphGroupoid> {
        Arc::new(
            GraphGroupoid::edgeless("PT2", &["star"], &[("1", "star", "star"), ("tau", "star", "star")], |h, g| h ^ g)
                .unwrap(),
        )
    }

    #[test]
    fn builtin_shapes_validate() {
        let c3 = Arc::new(Graph::cycle(3, "v", "e"));
        GraphGroupoid::unit_groupoid("UC3", c3).validate().unwrap();
        pt2().validate().unwrap();
        let pair = GraphGroupoid::pair_groupoid("PAIR2", &["a", "b"]);
        pair.validate().unwrap();
        assert_eq!(pair.orbits().blocks.len(), 1);
    }

    #[test]
    fn broken_multiplication_names_inverse_axiom() {
        let g0 = Arc::new(Graph::from_strs(&["star"], &[]).unwrap());
        let g1 = Arc::new(Graph::from_strs(&["1", "tau"], &[]).unwrap());
        let err = build_groupoid(
            "bad",
            g0,
            g1,
            &mut |_| Some(Cell::V(0)),
            &mut |_| Some(Cell::V(0)),
            &mut |_| Some(Cell::V(0)),
            &mut Some,
            &mut |h, g| Some(Cell::V(h.as_vertex()? | g.as_vertex()?)),
        )
        .unwrap_err();
        assert!(err.to_string().contains("inverse axiom"), "{err}");
    }

    #[test]
    fn isotropy_of_point_groupoid() {
        let g = pt2();
        let iso = g.isotropy_group(0).unwrap();
        assert_eq!(iso.order(), 2);
        assert_eq!(iso.element_order(1 - iso.identity), 2);
    }

    #[test]
    fn nat_trans_on_point_groupoid() {
        let g = pt2();
        let id = Functor::identity(g.clone());
        let all = enumerate_nat_trans(&id, &id);
        assert_eq!(all.len(), 2);
        let a = NatTrans::identity(id.clone());
        let b = &all[1];
        assert!(nat_vertical(b, &a).unwrap().agrees_with(b));
        assert!(nat_horizontal(b, &a).unwrap().agrees_with(b));
    }

    #[test]
    fn weak_pullback_of_identities_counts_arrows() {
        let g = pt2();
        let id = Functor::identity(g.clone());
        let wp = weak_pullback(&id, &id).unwrap();
        assert_eq!(wp.groupoid.object_count(), g.arrow_count());
        assert!(is_essential_equivalence(&wp.p1).holds());
    }

    #[test]
    fn trivial_into_pair_is_essential_equivalence() {
        let one = Arc::new(GraphGroupoid::trivial("1"));
        let pair = Arc::new(GraphGroupoid::pair_groupoid("PAIR2", &["a", "b"]));
        let f = Functor::from_fns("incl", one, pair.clone(), |_| Some(Cell::V(0)), |_| Some(Cell::V(0))).unwrap();
        let cert = is_essential_equivalence(&f);
        assert!(cert.holds(), "{cert:?}");
    }
}
