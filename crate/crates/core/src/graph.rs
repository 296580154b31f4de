//! Finite directed graphs, graph maps with edge collapse, edge paths and
//! fiber products.
//!
//! Graphs are directed, but every edge carries a formal reverse: a [`Cell`]
//! is either a vertex or an edge taken with an orientation. Graph maps send
//! vertices to vertices and edges to oriented cells, so an edge may be
//! collapsed onto a vertex (reflexive-graph semantics). Fiber products are
//! computed on oriented cells, which makes them genuine pullbacks in this
//! category.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("dangling endpoint: edge `{edge}` references absent vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("mismatched graphs: {0}")]
    Mismatch(String),
    #[error("map is not a graph map: {0}")]
    NotAGraphMap(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// A vertex, or an edge traversed forwards (`true`) or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    V(usize),
    E(usize, bool),
}

impl Cell {
    pub fn reversed(self) -> Cell {
        match self {
            Cell::V(v) => Cell::V(v),
            Cell::E(e, fwd) => Cell::E(e, !fwd),
        }
    }

    /// Reverse when `forward` is false.
    pub fn oriented(self, forward: bool) -> Cell {
        if forward {
            self
        } else {
            self.reversed()
        }
    }

    pub fn is_vertex(self) -> bool {
        matches!(self, Cell::V(_))
    }

    pub fn as_vertex(self) -> Option<usize> {
        match self {
            Cell::V(v) => Some(v),
            Cell::E(..) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeData {
    pub name: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<EdgeData>,
    vindex: HashMap<String, usize>,
    eindex: HashMap<String, usize>,
    /// Closed paths declared contractible (2-cells of the object space).
    faces: Vec<EdgePath>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.vertices)
            .field(
                "edges",
                &self
                    .edges
                    .iter()
                    .map(|e| format!("{}:{}->{}", e.name, self.vertices[e.tail], self.vertices[e.head]))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl Graph {
    /// Builds and validates a graph from vertex names and `(edge, tail, head)` triples.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Graph, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut vindex = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vindex.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(v.clone()));
            }
        }
        let mut out = Vec::new();
        let mut eindex = HashMap::new();
        for (name, tail, head) in edges {
            let t = *vindex
                .get(&tail)
                .ok_or_else(|| GraphError::DanglingEndpoint { edge: name.clone(), vertex: tail.clone() })?;
            let h = *vindex
                .get(&head)
                .ok_or_else(|| GraphError::DanglingEndpoint { edge: name.clone(), vertex: head.clone() })?;
            if eindex.insert(name.clone(), out.len()).is_some() {
                return Err(GraphError::DuplicateId(name));
            }
            out.push(EdgeData { name, tail: t, head: h });
        }
        Ok(Graph { vertices, edges: out, vindex, eindex, faces: Vec::new() })
    }

    /// Same as [`Graph::new`] with borrowed string triples.
    pub fn from_strs(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Graph, GraphError> {
        Graph::new(
            vertices.iter().copied(),
            edges.iter().map(|(n, t, h)| (n.to_string(), t.to_string(), h.to_string())),
        )
    }

    pub fn empty() -> Graph {
        Graph::new(Vec::<String>::new(), Vec::new()).expect("empty graph is valid")
    }

    /// The graph with a single vertex and no edges (terminal object).
    pub fn point() -> Graph {
        Graph::new(["*"], Vec::new()).expect("point graph is valid")
    }

    /// Cycle `C_n` with vertices `{prefix}0..` and edges `{edge_prefix}i: i -> i+1`.
    pub fn cycle(n: usize, prefix: &str, edge_prefix: &str) -> Graph {
        let vs: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let es = (0..n).map(|i| (format!("{edge_prefix}{i}"), vs[i].clone(), vs[(i + 1) % n].clone()));
        Graph::new(vs.clone(), es.collect::<Vec<_>>()).expect("cycle is valid")
    }

    /// Attaches 2-cells; each face must be a closed path.
    pub fn with_faces(mut self, faces: Vec<EdgePath>) -> Result<Graph, GraphError> {
        for f in &faces {
            f.validate(&self)?;
            if f.end(&self) != f.start {
                return Err(GraphError::InvalidPath(format!("face at `{}` is not closed", self.vertices[f.start])));
            }
        }
        self.faces = faces;
        Ok(self)
    }

    pub fn faces(&self) -> &[EdgePath] {
        &self.faces
    }

    /// Re-checks the structural invariants.
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut seen = HashSet::new();
        for v in &self.vertices {
            if !seen.insert(v) {
                return Err(GraphError::DuplicateId(v.clone()));
            }
        }
        let mut seen = HashSet::new();
        for e in &self.edges {
            if !seen.insert(&e.name) {
                return Err(GraphError::DuplicateId(e.name.clone()));
            }
            for end in [e.tail, e.head] {
                if end >= self.vertices.len() {
                    return Err(GraphError::DanglingEndpoint { edge: e.name.clone(), vertex: format!("#{end}") });
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edges[e].name
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeData] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &EdgeData {
        &self.edges[e]
    }

    pub fn vertex(&self, name: &str) -> Result<usize, GraphError> {
        self.vindex.get(name).copied().ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<usize, GraphError> {
        self.eindex.get(name).copied().ok_or_else(|| GraphError::UnknownEdge(name.to_string()))
    }

    pub fn tail(&self, c: Cell) -> usize {
        match c {
            Cell::V(v) => v,
            Cell::E(e, true) => self.edges[e].tail,
            Cell::E(e, false) => self.edges[e].head,
        }
    }

    pub fn head(&self, c: Cell) -> usize {
        self.tail(c.reversed())
    }

    /// Every vertex followed by every edge in forward orientation.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.vertices.len()).map(Cell::V).chain((0..self.edges.len()).map(|e| Cell::E(e, true)))
    }

    /// Oriented edge cells leaving `v` (reversed edges included).
    pub fn oriented_edges_at(&self, v: usize) -> Vec<Cell> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail == v {
                out.push(Cell::E(i, true));
            }
            if e.head == v {
                out.push(Cell::E(i, false));
            }
        }
        out
    }

    pub fn cell_name(&self, c: Cell) -> String {
        match c {
            Cell::V(v) => self.vertices[v].clone(),
            Cell::E(e, true) => self.edges[e].name.clone(),
            Cell::E(e, false) => format!("~{}", self.edges[e].name),
        }
    }

    /// Parses `v`, `e`, or `~e` (reversed edge); vertex names win over edge names.
    pub fn parse_cell(&self, s: &str) -> Result<Cell, GraphError> {
        if let Some(v) = self.vindex.get(s) {
            return Ok(Cell::V(*v));
        }
        if let Some(e) = self.eindex.get(s) {
            return Ok(Cell::E(*e, true));
        }
        if let Some(rest) = s.strip_prefix('~') {
            if let Some(e) = self.eindex.get(rest) {
                return Ok(Cell::E(*e, false));
            }
        }
        Err(GraphError::UnknownEdge(s.to_string()))
    }

    /// Connected components of the underlying undirected graph, as a vertex labelling.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.tail, e.head);
        }
        uf.labels()
    }
}

/// A graph map. Edges go to oriented edges or collapse onto a vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct GraphMap {
    source: Arc<Graph>,
    target: Arc<Graph>,
    vmap: Vec<usize>,
    emap: Vec<Cell>,
}

impl fmt::Debug for GraphMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for c in self.source.cells() {
            m.entry(&self.source.cell_name(c), &self.target.cell_name(self.apply(c)));
        }
        m.finish()
    }
}

impl GraphMap {
    pub fn new(
        source: Arc<Graph>,
        target: Arc<Graph>,
        vmap: Vec<usize>,
        emap: Vec<Cell>,
    ) -> Result<GraphMap, GraphError> {
        if vmap.len() != source.vertex_count() || emap.len() != source.edge_count() {
            return Err(GraphError::NotAGraphMap("map is not total".into()));
        }
        for &v in &vmap {
            if v >= target.vertex_count() {
                return Err(GraphError::NotAGraphMap(format!("vertex image #{v} out of range")));
            }
        }
        for (i, &c) in emap.iter().enumerate() {
            let ed = source.edge(i);
            let (t, h) = (vmap[ed.tail], vmap[ed.head]);
            let ok = match c {
                Cell::V(v) => v < target.vertex_count() && t == v && h == v,
                Cell::E(f, _) => f < target.edge_count() && target.tail(c) == t && target.head(c) == h,
            };
            if !ok {
                return Err(GraphError::NotAGraphMap(format!(
                    "edge `{}` -> `{}` breaks endpoint compatibility",
                    ed.name,
                    if matches!(c, Cell::E(f, _) if f >= target.edge_count())
                        || matches!(c, Cell::V(v) if v >= target.vertex_count())
                    {
                        "?".to_string()
                    } else {
                        target.cell_name(c)
                    }
                )));
            }
        }
        Ok(GraphMap { source, target, vmap, emap })
    }

    /// Builds a map from its action on cells. `f` must send vertices to vertices.
    pub fn from_cell_fn<F>(source: Arc<Graph>, target: Arc<Graph>, mut f: F) -> Result<GraphMap, GraphError>
    where
        F: FnMut(Cell) -> Option<Cell>,
    {
        let mut vmap = Vec::with_capacity(source.vertex_count());
        for v in 0..source.vertex_count() {
            match f(Cell::V(v)) {
                Some(Cell::V(w)) => vmap.push(w),
                _ => return Err(GraphError::NotAGraphMap(format!("no vertex image for `{}`", source.vertex_name(v)))),
            }
        }
        let mut emap = Vec::with_capacity(source.edge_count());
        for e in 0..source.edge_count() {
            match f(Cell::E(e, true)) {
                Some(c) => emap.push(c),
                None => return Err(GraphError::NotAGraphMap(format!("no image for edge `{}`", source.edge_name(e)))),
            }
        }
        GraphMap::new(source, target, vmap, emap)
    }

    pub fn identity(g: Arc<Graph>) -> GraphMap {
        let vmap = (0..g.vertex_count()).collect();
        let emap = (0..g.edge_count()).map(|e| Cell::E(e, true)).collect();
        GraphMap { source: g.clone(), target: g, vmap, emap }
    }

    /// Collapses everything onto the vertex `v` of `target`.
    pub fn constant(source: Arc<Graph>, target: Arc<Graph>, v: usize) -> GraphMap {
        let vmap = vec![v; source.vertex_count()];
        let emap = vec![Cell::V(v); source.edge_count()];
        GraphMap { source, target, vmap, emap }
    }

    pub fn source(&self) -> &Arc<Graph> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Graph> {
        &self.target
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vmap[v]
    }

    pub fn edge_image(&self, e: usize) -> Cell {
        self.emap[e]
    }

    pub fn apply(&self, c: Cell) -> Cell {
        match c {
            Cell::V(v) => Cell::V(self.vmap[v]),
            Cell::E(e, fwd) => self.emap[e].oriented(fwd),
        }
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &GraphMap) -> Result<GraphMap, GraphError> {
        if !same_graph(&inner.target, &self.source) {
            return Err(GraphError::Mismatch("target of inner map differs from source of outer map".into()));
        }
        let vmap = inner.vmap.iter().map(|&v| self.vmap[v]).collect();
        let emap = inner.emap.iter().map(|&c| self.apply(c)).collect();
        Ok(GraphMap { source: inner.source.clone(), target: self.target.clone(), vmap, emap })
    }

    /// Same assignments with the target graph replaced by an equal graph.
    pub fn retarget(&self, target: Arc<Graph>) -> Result<GraphMap, GraphError> {
        if !same_graph(&self.target, &target) {
            return Err(GraphError::Mismatch("retarget to a different graph".into()));
        }
        Ok(GraphMap { target, ..self.clone() })
    }

    /// Same assignments with the source graph replaced by an equal graph.
    pub fn resource(&self, source: Arc<Graph>) -> Result<GraphMap, GraphError> {
        if !same_graph(&self.source, &source) {
            return Err(GraphError::Mismatch("resource to a different graph".into()));
        }
        Ok(GraphMap { source, ..self.clone() })
    }

    /// Cell-wise equality of two parallel maps.
    pub fn agrees_with(&self, other: &GraphMap) -> bool {
        self.vmap == other.vmap && self.emap == other.emap
    }

    /// Surjective on vertices and on edges (an edge is hit in either orientation).
    pub fn is_surjective(&self) -> bool {
        let mut vhit = vec![false; self.target.vertex_count()];
        for &v in &self.vmap {
            vhit[v] = true;
        }
        let mut ehit = vec![false; self.target.edge_count()];
        for c in &self.emap {
            if let Cell::E(f, _) = c {
                ehit[*f] = true;
            }
        }
        vhit.into_iter().all(|b| b) && ehit.into_iter().all(|b| b)
    }

    /// Bijective on vertices and on edges, with no collapsed edge.
    pub fn is_isomorphism(&self) -> bool {
        if self.vmap.len() != self.target.vertex_count() || self.emap.len() != self.target.edge_count() {
            return false;
        }
        let mut vhit = vec![false; self.target.vertex_count()];
        for &v in &self.vmap {
            if std::mem::replace(&mut vhit[v], true) {
                return false;
            }
        }
        let mut ehit = vec![false; self.target.edge_count()];
        for c in &self.emap {
            match c {
                Cell::V(_) => return false,
                Cell::E(f, _) => {
                    if std::mem::replace(&mut ehit[*f], true) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<GraphMap> {
        if !self.is_isomorphism() {
            return None;
        }
        let mut vmap = vec![0; self.target.vertex_count()];
        for (v, &w) in self.vmap.iter().enumerate() {
            vmap[w] = v;
        }
        let mut emap = vec![Cell::V(0); self.target.edge_count()];
        for (e, c) in self.emap.iter().enumerate() {
            if let Cell::E(f, fwd) = c {
                emap[*f] = Cell::E(e, *fwd);
            }
        }
        Some(GraphMap { source: self.target.clone(), target: self.source.clone(), vmap, emap })
    }
}

pub fn same_graph(a: &Arc<Graph>, b: &Arc<Graph>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `f ∘ g`; errors when `target(g) != source(f)`.
pub fn compose_graph_maps(f: &GraphMap, g: &GraphMap) -> Result<GraphMap, GraphError> {
    f.compose(g)
}

pub fn graph_surjective(f: &GraphMap) -> bool {
    f.is_surjective()
}

pub fn graph_iso_check(f: &GraphMap) -> bool {
    f.is_isomorphism()
}

/// A path of oriented edges starting at `start`; empty means constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgePath {
    pub start: usize,
    pub steps: Vec<(usize, bool)>,
}

impl EdgePath {
    pub fn constant(v: usize) -> EdgePath {
        EdgePath { start: v, steps: Vec::new() }
    }

    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        if self.start >= g.vertex_count() {
            return Err(GraphError::InvalidPath(format!("start #{} out of range", self.start)));
        }
        let mut at = self.start;
        for (i, &(e, fwd)) in self.steps.iter().enumerate() {
            if e >= g.edge_count() {
                return Err(GraphError::InvalidPath(format!("step {i}: edge #{e} out of range")));
            }
            let c = Cell::E(e, fwd);
            if g.tail(c) != at {
                return Err(GraphError::InvalidPath(format!(
                    "step {i}: `{}` does not start at `{}`",
                    g.cell_name(c),
                    g.vertex_name(at)
                )));
            }
            at = g.head(c);
        }
        Ok(())
    }

    pub fn end(&self, g: &Graph) -> usize {
        self.steps.iter().fold(self.start, |_, &(e, fwd)| g.head(Cell::E(e, fwd)))
    }

    pub fn reversed(&self, g: &Graph) -> EdgePath {
        EdgePath { start: self.end(g), steps: self.steps.iter().rev().map(|&(e, fwd)| (e, !fwd)).collect() }
    }

    /// Image of the path under a graph map; collapsed steps disappear.
    pub fn map(&self, f: &GraphMap) -> EdgePath {
        let steps = self
            .steps
            .iter()
            .filter_map(|&(e, fwd)| match f.apply(Cell::E(e, fwd)) {
                Cell::E(f, d) => Some((f, d)),
                Cell::V(_) => None,
            })
            .collect();
        EdgePath { start: f.vertex_image(self.start), steps }
    }
}

/// Cancels adjacent `e e⁻¹` pairs until none remain.
pub fn free_reduce(g: &Graph, p: &EdgePath) -> Result<EdgePath, GraphError> {
    p.validate(g)?;
    let mut out: Vec<(usize, bool)> = Vec::with_capacity(p.steps.len());
    for &(e, fwd) in &p.steps {
        if matches!(out.last(), Some(&(e2, f2)) if e2 == e && f2 != fwd) {
            out.pop();
        } else {
            out.push((e, fwd));
        }
    }
    Ok(EdgePath { start: p.start, steps: out })
}

/// Pullback of `f: A -> C` and `g: B -> C` on oriented cells, with both projections.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub graph: Arc<Graph>,
    pub p1: GraphMap,
    pub p2: GraphMap,
    index: HashMap<(Cell, Cell), Cell>,
}

impl FiberProduct {
    pub fn new(f: &GraphMap, g: &GraphMap) -> Result<FiberProduct, GraphError> {
        if !same_graph(f.target(), g.target()) {
            return Err(GraphError::Mismatch("fiber product of maps with different targets".into()));
        }
        let a = f.source().clone();
        let b = g.source().clone();
        let mut names = NameAlloc::default();
        let mut vertices = Vec::new();
        let mut pv = Vec::new();
        let mut index = HashMap::new();
        // vertices of B grouped by image
        let mut b_by_image: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..b.vertex_count() {
            b_by_image.entry(g.vertex_image(v)).or_default().push(v);
        }
        for x in 0..a.vertex_count() {
            if let Some(ys) = b_by_image.get(&f.vertex_image(x)) {
                for &y in ys {
                    index.insert((Cell::V(x), Cell::V(y)), Cell::V(vertices.len()));
                    vertices.push(names.alloc(format!("({},{})", a.vertex_name(x), b.vertex_name(y))));
                    pv.push((x, y));
                }
            }
        }
        let mut b_cells_by_image: HashMap<Cell, Vec<Cell>> = HashMap::new();
        for y in 0..b.vertex_count() {
            b_cells_by_image.entry(Cell::V(g.vertex_image(y))).or_default().push(Cell::V(y));
        }
        for e in 0..b.edge_count() {
            for fwd in [true, false] {
                let c = Cell::E(e, fwd);
                b_cells_by_image.entry(g.apply(c)).or_default().push(c);
            }
        }
        let mut edges = Vec::new();
        let mut pe: Vec<(Cell, Cell)> = Vec::new();
        let mut push_edge = |alpha: Cell, beta: Cell, edges: &mut Vec<(String, String, String)>| {
            let tail = index[&(Cell::V(a.tail(alpha)), Cell::V(b.tail(beta)))];
            let head = index[&(Cell::V(a.head(alpha)), Cell::V(b.head(beta)))];
            let name = names.alloc(format!("({},{})", a.cell_name(alpha), b.cell_name(beta)));
            index.insert((alpha, beta), Cell::E(edges.len(), true));
            edges.push((
                name,
                vertices[tail.as_vertex().unwrap()].clone(),
                vertices[head.as_vertex().unwrap()].clone(),
            ));
            pe.push((alpha, beta));
        };
        for e in 0..a.edge_count() {
            let alpha = Cell::E(e, true);
            if let Some(betas) = b_cells_by_image.get(&f.apply(alpha)) {
                for &beta in betas {
                    push_edge(alpha, beta, &mut edges);
                }
            }
        }
        for x in 0..a.vertex_count() {
            let alpha = Cell::V(x);
            if let Some(betas) = b_cells_by_image.get(&f.apply(alpha)) {
                for &beta in betas {
                    if let Cell::E(_, true) = beta {
                        push_edge(alpha, beta, &mut edges);
                    }
                }
            }
        }
        let graph = Graph::new(vertices, edges)?;
        let faces = fiber_faces(f, g, &index);
        let graph = Arc::new(graph.with_faces(faces)?);
        let p1 = GraphMap::new(
            graph.clone(),
            a.clone(),
            pv.iter().map(|p| p.0).collect(),
            pe.iter().map(|p| p.0).collect(),
        )?;
        let p2 = GraphMap::new(
            graph.clone(),
            b.clone(),
            pv.iter().map(|p| p.1).collect(),
            pe.iter().map(|p| p.1).collect(),
        )?;
        Ok(FiberProduct { graph, p1, p2, index })
    }

    /// The product cell with components `(alpha, beta)`, if the images agree.
    pub fn pair(&self, alpha: Cell, beta: Cell) -> Option<Cell> {
        match (alpha, beta) {
            (Cell::E(_, false), _) => self.pair(alpha.reversed(), beta.reversed()).map(Cell::reversed),
            (Cell::V(_), Cell::E(_, false)) => self.pair(alpha, beta.reversed()).map(Cell::reversed),
            _ => self.index.get(&(alpha, beta)).copied(),
        }
    }

    pub fn split(&self, c: Cell) -> (Cell, Cell) {
        (self.p1.apply(c), self.p2.apply(c))
    }
}

fn lookup(index: &HashMap<(Cell, Cell), Cell>, alpha: Cell, beta: Cell) -> Option<Cell> {
    match (alpha, beta) {
        (Cell::E(_, false), _) | (Cell::V(_), Cell::E(_, false)) => {
            index.get(&(alpha.reversed(), beta.reversed())).map(|c| c.reversed())
        }
        _ => index.get(&(alpha, beta)).copied(),
    }
}

fn step_of(c: Cell) -> (usize, bool) {
    match c {
        Cell::E(e, fwd) => (e, fwd),
        Cell::V(_) => unreachable!("fiber product cell over an edge is an edge"),
    }
}

/// Every closed lift of the face `face` of `f.source()` through `g`,
/// as cell pairs `(alpha, beta)`.
fn lift_face(face: &EdgePath, f: &GraphMap, g: &GraphMap) -> Vec<(usize, Vec<(Cell, Cell)>)> {
    let b = g.source();
    let cells: Vec<Cell> = face.steps.iter().map(|&(e, fwd)| Cell::E(e, fwd)).collect();
    let mut out = Vec::new();
    for y0 in (0..b.vertex_count()).filter(|&y| g.vertex_image(y) == f.vertex_image(face.start)) {
        let mut stack: Vec<(usize, usize, Vec<(Cell, Cell)>)> = vec![(0, y0, Vec::new())];
        while let Some((i, y, acc)) = stack.pop() {
            if i == cells.len() {
                if y == y0 {
                    out.push((y0, acc));
                }
                continue;
            }
            let alpha = cells[i];
            let image = f.apply(alpha);
            let betas = match image {
                Cell::V(_) => vec![Cell::V(y)],
                Cell::E(..) => b.oriented_edges_at(y).into_iter().filter(|&c| g.apply(c) == image).collect(),
            };
            for beta in betas {
                let mut next = acc.clone();
                next.push((alpha, beta));
                stack.push((i + 1, b.head(beta), next));
            }
        }
    }
    out
}

/// 2-cells of a fiber product: the two triangles filling each pair of
/// edges collapsed onto a common vertex, and lifts of the factors' faces.
fn fiber_faces(f: &GraphMap, g: &GraphMap, index: &HashMap<(Cell, Cell), Cell>) -> Vec<EdgePath> {
    let a = f.source();
    let b = g.source();
    let path = |start: (usize, usize), cells: &[(Cell, Cell)]| -> Option<EdgePath> {
        let start = lookup(index, Cell::V(start.0), Cell::V(start.1))?.as_vertex()?;
        let steps = cells.iter().map(|&(x, y)| lookup(index, x, y).map(step_of)).collect::<Option<Vec<_>>>()?;
        Some(EdgePath { start, steps })
    };
    let mut faces = Vec::new();
    for ea in 0..a.edge_count() {
        let al = Cell::E(ea, true);
        let Cell::V(z) = f.apply(al) else { continue };
        for eb in 0..b.edge_count() {
            for fwd in [true, false] {
                let be = Cell::E(eb, fwd);
                if g.apply(be) != Cell::V(z) {
                    continue;
                }
                let (ta, ha, tb, hb) = (a.tail(al), a.head(al), b.tail(be), b.head(be));
                let diag = (al.reversed(), be.reversed());
                faces.extend(path((ta, tb), &[(al, Cell::V(tb)), (Cell::V(ha), be), diag]));
                faces.extend(path((ta, tb), &[(Cell::V(ta), be), (al, Cell::V(hb)), diag]));
            }
        }
    }
    for face in a.faces() {
        for (y0, lift) in lift_face(face, f, g) {
            faces.extend(path((face.start, y0), &lift));
        }
    }
    for face in b.faces() {
        for (x0, lift) in lift_face(face, g, f) {
            let swapped: Vec<(Cell, Cell)> = lift.iter().map(|&(y, x)| (x, y)).collect();
            faces.extend(path((x0, face.start), &swapped));
        }
    }
    faces
}

/// Product of two graphs (fiber product over the point).
pub fn product(a: &Arc<Graph>, b: &Arc<Graph>) -> FiberProduct {
    let pt = Arc::new(Graph::point());
    let fa = GraphMap::constant(a.clone(), pt.clone(), 0);
    let fb = GraphMap::constant(b.clone(), pt, 0);
    FiberProduct::new(&fa, &fb).expect("maps into the point share a target")
}

pub fn fiber_product_graph(f: &GraphMap, g: &GraphMap) -> Result<FiberProduct, GraphError> {
    FiberProduct::new(f, g)
}

#[derive(Default)]
pub(crate) struct NameAlloc {
    used: HashSet<String>,
}

impl NameAlloc {
    pub(crate) fn alloc(&mut self, base: String) -> String {
        if self.used.insert(base.clone()) {
            return base;
        }
        let mut k = 1;
        loop {
            let cand = format!("{base}#{k}");
            if self.used.insert(cand.clone()) {
                return cand;
            }
            k += 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // smaller root wins so labels are deterministic
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }

    /// Dense block labels in order of first appearance.
    pub fn labels(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut label = HashMap::new();
        (0..n)
            .map(|i| {
                let r = self.find(i);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Arc<Graph> {
        Arc::new(Graph::from_strs(&["-1", "0", "1"], &[("a", "-1", "0"), ("b", "0", "1")]).unwrap())
    }

    fn c6_to_c3() -> GraphMap {
        let c6 = Arc::new(Graph::cycle(6, "r", "f"));
        let c3 = Arc::new(Graph::cycle(3, "v", "e"));
        GraphMap::new(c6, c3, (0..6).map(|i| i % 3).collect(), (0..6).map(|i| Cell::E(i % 3, true)).collect()).unwrap()
    }

    #[test]
    fn validate_graph_examples() {
        assert!(Graph::empty().validate().is_ok());
        assert!(Graph::cycle(3, "v", "e").validate().is_ok());
        let err = Graph::from_strs(&["x"], &[("e", "x", "y")]).unwrap_err();
        assert!(err.to_string().contains("dangling endpoint"));
        let err = Graph::from_strs(&["x", "x"], &[]).unwrap_err();
        assert_eq!(err, GraphError::DuplicateId("x".into()));
    }

    #[test]
    fn compose_examples() {
        let q = c6_to_c3();
        let id = GraphMap::identity(q.source().clone());
        assert!(q.compose(&id).unwrap().agrees_with(&q));

        let i3 = path3();
        let r =
            GraphMap::new(i3.clone(), i3.clone(), vec![2, 1, 0], vec![Cell::E(1, false), Cell::E(0, false)]).unwrap();
        assert!(r.compose(&r).unwrap().agrees_with(&GraphMap::identity(i3.clone())));

        let pt = Arc::new(Graph::point());
        let collapse = GraphMap::constant(q.target().clone(), pt.clone(), 0);
        let composed = collapse.compose(&q).unwrap();
        assert!(composed.agrees_with(&GraphMap::constant(q.source().clone(), pt, 0)));

        assert!(q.compose(&q).is_err());
    }

    #[test]
    fn graph_map_rejects_bad_endpoints() {
        let i3 = path3();
        let bad = GraphMap::new(i3.clone(), i3.clone(), vec![0, 1, 2], vec![Cell::E(1, true), Cell::E(0, true)]);
        assert!(bad.is_err());
        let collapse_bad = GraphMap::new(i3.clone(), i3, vec![0, 1, 2], vec![Cell::V(0), Cell::E(1, true)]);
        assert!(collapse_bad.is_err());
    }

    #[test]
    fn free_reduce_examples() {
        let g =
            Graph::from_strs(&["v", "w", "x", "y"], &[("e1", "v", "w"), ("e2", "w", "x"), ("e3", "w", "y")]).unwrap();
        let p = EdgePath { start: 0, steps: vec![(0, true), (0, false)] };
        assert_eq!(free_reduce(&g, &p).unwrap(), EdgePath::constant(0));
        let p = EdgePath { start: 0, steps: vec![(0, true), (1, true), (1, false), (2, true)] };
        let r = free_reduce(&g, &p).unwrap();
        assert_eq!(r.steps, vec![(0, true), (2, true)]);
        assert_eq!(free_reduce(&g, &r).unwrap(), r);
        let bad = EdgePath { start: 1, steps: vec![(0, true)] };
        assert!(free_reduce(&g, &bad).is_err());
    }

    #[test]
    fn fiber_product_examples() {
        let c3 = Arc::new(Graph::cycle(3, "v", "e"));
        let id = GraphMap::identity(c3.clone());
        let fp = FiberProduct::new(&id, &id).unwrap();
        assert_eq!(fp.graph.vertex_count(), 3);
        assert_eq!(fp.graph.edge_count(), 3);
        assert!(fp.p1.is_isomorphism());

        let a = Arc::new(Graph::from_strs(&["p", "q"], &[]).unwrap());
        let pt = Arc::new(Graph::point());
        let f = GraphMap::constant(a.clone(), pt.clone(), 0);
        let fp = FiberProduct::new(&f, &f).unwrap();
        assert_eq!((fp.graph.vertex_count(), fp.graph.edge_count()), (4, 0));

        let q = c6_to_c3();
        let fp = FiberProduct::new(&q, &q).unwrap();
        assert_eq!((fp.graph.vertex_count(), fp.graph.edge_count()), (12, 12));
        assert!(FiberProduct::new(&q, &GraphMap::identity(q.source().clone())).is_err());
    }

    #[test]
    fn product_pairs_collapsed_edges_both_ways() {
        let i2 = Arc::new(Graph::from_strs(&["p", "q"], &[("e", "p", "q")]).unwrap());
        let fp = product(&i2, &i2);
        // (e,v) x2, (v,e) x2, (e,e), (e,~e)
        assert_eq!(fp.graph.edge_count(), 6);
        let d = fp.pair(Cell::E(0, true), Cell::E(0, false)).unwrap();
        assert_eq!(fp.split(d), (Cell::E(0, true), Cell::E(0, false)));
        let back = fp.pair(Cell::E(0, false), Cell::E(0, true)).unwrap();
        assert_eq!(back, d.reversed());
        // two triangles for each diagonal
        assert_eq!(fp.graph.faces().len(), 4);
        let sq = product(&fp.graph, &Arc::new(Graph::point()));
        assert_eq!(sq.graph.faces().len(), 4);
    }

    #[test]
    fn surjective_and_iso_examples() {
        let c3 = Arc::new(Graph::cycle(3, "v", "e"));
        let id = GraphMap::identity(c3.clone());
        assert!(graph_surjective(&id) && graph_iso_check(&id));
        let pt = Arc::new(Graph::point());
        let incl = GraphMap::new(pt.clone(), c3.clone(), vec![0], vec![]).unwrap();
        assert!(!graph_surjective(&incl));
        let q = c6_to_c3();
        assert!(graph_surjective(&q));
        assert!(!graph_iso_check(&q));
        let collapse = GraphMap::constant(c3, pt, 0);
        assert!(!graph_iso_check(&collapse));
    }
}
