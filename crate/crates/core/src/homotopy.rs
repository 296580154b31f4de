//! Fundamental groupoids of graph groupoids.
//!
//! `G⋆` is presented by generators (object edges and arrows) and relations:
//! units vanish, adjacent arrows compose, every arrow edge `ξ: g → g'`
//! gives `[g]·t(ξ) = s(ξ)·[g']`, and every face of the object graph is
//! null-homotopic. Words are read in traversal order, so `[g][h]` means
//! "first `g`, then `h`" and equals `[h∘g]`.
//!
//! For étale groupoids every word pushes to a unique normal form
//! `(path class, arrow)`, which decides equality whenever the face
//! relations of the object graph can be eliminated. Otherwise equality is
//! semi-decided by bounded rewriting, with abelianization as the refuter.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::fpgroup::{GenWord, Tietze};
use crate::graph::{Cell, EdgePath, Graph, GraphError, UnionFind};
use crate::groupoid::{Functor, GraphGroupoid};
use crate::snf::{AbelianGroup, Cokernel, SnfError};
use crate::tribool::TriBool;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Snf(#[from] SnfError),
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("G-path joint {index} fails: {detail}")]
    Joint { index: usize, detail: String },
    #[error("endpoints do not match: {0}")]
    EndpointMismatch(String),
    #[error("unknown object #{0}")]
    UnknownObject(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    /// An oriented object edge.
    Edge(usize, bool),
    /// An arrow vertex.
    Arrow(usize),
}

/// A word in the generators of `G⋆`, starting at object `start`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    pub start: usize,
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn empty(x: usize) -> Word {
        Word { start: x, letters: Vec::new() }
    }

    pub fn arrow(g: &GraphGroupoid, a: usize) -> Word {
        Word { start: g.s.vertex_image(a), letters: vec![Letter::Arrow(a)] }
    }

    /// The word of an object path.
    pub fn path(p: &EdgePath) -> Word {
        Word { start: p.start, letters: p.steps.iter().map(|&(e, f)| Letter::Edge(e, f)).collect() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Validates the chaining and returns the final object.
    pub fn end(&self, g: &GraphGroupoid) -> Result<usize, HomotopyError> {
        if self.start >= g.object_count() {
            return Err(HomotopyError::UnknownObject(self.start));
        }
        let mut at = self.start;
        for (i, &l) in self.letters.iter().enumerate() {
            let (from, to) = match l {
                Letter::Edge(e, f) if e < g.g0.edge_count() => (g.g0.tail(Cell::E(e, f)), g.g0.head(Cell::E(e, f))),
                Letter::Arrow(a) if a < g.arrow_count() => (g.s.vertex_image(a), g.t.vertex_image(a)),
                _ => return Err(HomotopyError::MalformedWord(format!("letter {i} is out of range"))),
            };
            if from != at {
                return Err(HomotopyError::MalformedWord(format!(
                    "letter {i} starts at `{}`, expected `{}`",
                    g.object_name(from),
                    g.object_name(at)
                )));
            }
            at = to;
        }
        Ok(at)
    }

    pub fn concat(&self, other: &Word, g: &GraphGroupoid) -> Result<Word, HomotopyError> {
        let end = self.end(g)?;
        if end != other.start {
            return Err(HomotopyError::EndpointMismatch(format!(
                "`{}` ends at `{}` but `{}` starts at `{}`",
                self.display(g),
                g.object_name(end),
                other.display(g),
                g.object_name(other.start)
            )));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Word { start: self.start, letters })
    }

    pub fn inverse(&self, g: &GraphGroupoid) -> Result<Word, HomotopyError> {
        let end = self.end(g)?;
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|&l| match l {
                Letter::Edge(e, f) => Letter::Edge(e, !f),
                Letter::Arrow(a) => Letter::Arrow(g.inv.vertex_image(a)),
            })
            .collect();
        Ok(Word { start: end, letters })
    }

    pub fn display(&self, g: &GraphGroupoid) -> String {
        if self.letters.is_empty() {
            return format!("1_{}", g.object_name(self.start.min(g.object_count().saturating_sub(1))));
        }
        self.letters
            .iter()
            .map(|&l| match l {
                Letter::Edge(e, f) => g.g0.cell_name(Cell::E(e, f)),
                Letter::Arrow(a) => format!("[{}]", g.arrow_name(a)),
            })
            .collect::<Vec<_>>()
            .join(".")
    }

    /// Parses `1_x` or dot-separated letters: `[arrow]`, `edge`, `~edge`.
    pub fn parse(g: &GraphGroupoid, start: usize, text: &str) -> Result<Word, HomotopyError> {
        let text = text.trim();
        if text.is_empty() || text.starts_with("1_") {
            return Ok(Word::empty(start));
        }
        let mut letters = Vec::new();
        for tok in text.split('.') {
            if let Some(name) = tok.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                letters.push(Letter::Arrow(g.arrow(name).map_err(|_| HomotopyError::MalformedWord(tok.into()))?));
            } else {
                match g.g0.parse_cell(tok) {
                    Ok(Cell::E(e, f)) => letters.push(Letter::Edge(e, f)),
                    _ => return Err(HomotopyError::MalformedWord(tok.into())),
                }
            }
        }
        let w = Word { start, letters };
        w.end(g)?;
        Ok(w)
    }
}

/// An alternating sequence `g0, α1, g1, …, αn, gn` of arrows and object paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GPath {
    pub arrows: Vec<usize>,
    pub paths: Vec<EdgePath>,
}

impl GPath {
    pub fn constant(g: &GraphGroupoid, x: usize) -> GPath {
        GPath { arrows: vec![g.u.vertex_image(x)], paths: Vec::new() }
    }

    pub fn source(&self, g: &GraphGroupoid) -> usize {
        g.s.vertex_image(self.arrows[0])
    }

    pub fn target(&self, g: &GraphGroupoid) -> usize {
        g.t.vertex_image(*self.arrows.last().expect("nonempty"))
    }
}

pub fn validate_gpath(g: &GraphGroupoid, p: &GPath) -> Result<(), HomotopyError> {
    if p.arrows.len() != p.paths.len() + 1 {
        return Err(HomotopyError::Joint {
            index: 0,
            detail: format!("{} arrows need {} paths", p.arrows.len(), p.arrows.len().saturating_sub(1)),
        });
    }
    if let Some(&a) = p.arrows.iter().find(|&&a| a >= g.arrow_count()) {
        return Err(HomotopyError::Joint { index: 0, detail: format!("arrow #{a} out of range") });
    }
    for (i, alpha) in p.paths.iter().enumerate() {
        alpha.validate(&g.g0).map_err(|e| HomotopyError::Joint { index: i + 1, detail: e.to_string() })?;
        let from = g.t.vertex_image(p.arrows[i]);
        let to = g.s.vertex_image(p.arrows[i + 1]);
        if alpha.start != from || alpha.end(&g.g0) != to {
            return Err(HomotopyError::Joint {
                index: i + 1,
                detail: format!("path must run from `{}` to `{}`", g.object_name(from), g.object_name(to)),
            });
        }
    }
    Ok(())
}

/// `q` after `p`; the last arrow of `p` and the first of `q` are multiplied.
pub fn gpath_concat(g: &GraphGroupoid, p: &GPath, q: &GPath) -> Result<GPath, HomotopyError> {
    validate_gpath(g, p)?;
    validate_gpath(g, q)?;
    let last = *p.arrows.last().expect("nonempty");
    let fused = g
        .mul(Cell::V(q.arrows[0]), Cell::V(last))
        .and_then(Cell::as_vertex)
        .ok_or_else(|| HomotopyError::EndpointMismatch("G-paths do not meet".into()))?;
    let mut arrows = p.arrows[..p.arrows.len() - 1].to_vec();
    arrows.push(fused);
    arrows.extend_from_slice(&q.arrows[1..]);
    let mut paths = p.paths.clone();
    paths.extend_from_slice(&q.paths);
    Ok(GPath { arrows, paths })
}

pub fn gpath_inverse(g: &GraphGroupoid, p: &GPath) -> Result<GPath, HomotopyError> {
    validate_gpath(g, p)?;
    Ok(GPath {
        arrows: p.arrows.iter().rev().map(|&a| g.inv.vertex_image(a)).collect(),
        paths: p.paths.iter().rev().map(|a| a.reversed(&g.g0)).collect(),
    })
}

pub fn gpath_to_word(g: &GraphGroupoid, p: &GPath) -> Result<Word, HomotopyError> {
    validate_gpath(g, p)?;
    let mut letters = vec![Letter::Arrow(p.arrows[0])];
    for (alpha, &a) in p.paths.iter().zip(&p.arrows[1..]) {
        letters.extend(alpha.steps.iter().map(|&(e, f)| Letter::Edge(e, f)));
        letters.push(Letter::Arrow(a));
    }
    Ok(Word { start: p.source(g), letters })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Unit,
    Comp,
    Edge,
    Face,
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub kind: RelationKind,
    pub lhs: Word,
    pub rhs: Word,
}

/// `G⋆` as generators and relations.
#[derive(Clone, Debug)]
pub struct PresentedGroupoid {
    pub groupoid: Arc<GraphGroupoid>,
    pub relations: Vec<Relation>,
}

impl PresentedGroupoid {
    pub fn generator_count(&self) -> usize {
        self.groupoid.g0.edge_count() + self.groupoid.arrow_count()
    }
}

fn edge_letter(c: Cell) -> Option<Letter> {
    match c {
        Cell::E(e, f) => Some(Letter::Edge(e, f)),
        Cell::V(_) => None,
    }
}

pub fn fundamental_groupoid(g: Arc<GraphGroupoid>) -> PresentedGroupoid {
    let mut relations = Vec::new();
    for x in 0..g.object_count() {
        relations.push(Relation {
            kind: RelationKind::Unit,
            lhs: Word::arrow(&g, g.u.vertex_image(x)),
            rhs: Word::empty(x),
        });
    }
    for c in 0..g.comp.graph.vertex_count() {
        let (h, k) = g.comp.split(Cell::V(c));
        let (h, k) = (h.as_vertex().expect("vertex"), k.as_vertex().expect("vertex"));
        relations.push(Relation {
            kind: RelationKind::Comp,
            lhs: Word { start: g.s.vertex_image(k), letters: vec![Letter::Arrow(k), Letter::Arrow(h)] },
            rhs: Word::arrow(&g, g.m.vertex_image(c)),
        });
    }
    for xi in 0..g.g1.edge_count() {
        let c = Cell::E(xi, true);
        let (a, b) = (g.g1.tail(c), g.g1.head(c));
        let mut lhs = vec![Letter::Arrow(a)];
        lhs.extend(edge_letter(g.tgt(c)));
        let mut rhs: Vec<Letter> = edge_letter(g.src(c)).into_iter().collect();
        rhs.push(Letter::Arrow(b));
        relations.push(Relation {
            kind: RelationKind::Edge,
            lhs: Word { start: g.s.vertex_image(a), letters: lhs },
            rhs: Word { start: g.s.vertex_image(a), letters: rhs },
        });
    }
    for f in g.g0.faces() {
        relations.push(Relation { kind: RelationKind::Face, lhs: Word::path(f), rhs: Word::empty(f.start) });
    }
    PresentedGroupoid { groupoid: g, relations }
}

/// Budgets for the semi-decision layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordEqConfig {
    /// Rewriting depth (also the hom-set enumeration depth).
    pub depth: usize,
    /// Cap on words explored per side.
    pub max_words: usize,
}

impl Default for WordEqConfig {
    fn default() -> Self {
        WordEqConfig { depth: 8, max_words: 20_000 }
    }
}

/// Path classes in an object graph with faces, through a spanning forest
/// and Tietze elimination of the face relations.
#[derive(Clone, Debug)]
pub struct LoopOracle {
    comp: Vec<usize>,
    /// Step arriving at each vertex from its parent.
    parent: Vec<Option<(usize, bool)>>,
    gen_of: Vec<Option<usize>>,
    gen_comp: Vec<usize>,
    tietze: Tietze,
}

impl LoopOracle {
    pub fn new(g: &Graph) -> LoopOracle {
        let nv = g.vertex_count();
        let mut comp = vec![usize::MAX; nv];
        let mut parent = vec![None; nv];
        let mut tree = vec![false; g.edge_count()];
        let mut ncomp = 0;
        for root in 0..nv {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = ncomp;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for c in g.oriented_edges_at(v) {
                    let w = g.head(c);
                    if comp[w] == usize::MAX {
                        comp[w] = ncomp;
                        let Cell::E(e, f) = c else { unreachable!() };
                        parent[w] = Some((e, f));
                        tree[e] = true;
                        queue.push_back(w);
                    }
                }
            }
            ncomp += 1;
        }
        let mut gen_of = vec![None; g.edge_count()];
        let mut gen_comp = Vec::new();
        for e in 0..g.edge_count() {
            if !tree[e] {
                gen_of[e] = Some(gen_comp.len());
                gen_comp.push(comp[g.edge(e).tail]);
            }
        }
        let faces: Vec<GenWord> = g
            .faces()
            .iter()
            .map(|f| f.steps.iter().filter_map(|&(e, fwd)| gen_of[e].map(|k| (k, fwd))).collect())
            .collect();
        let tietze = Tietze::new(gen_comp.len(), faces);
        LoopOracle { comp, parent, gen_of, gen_comp, tietze }
    }

    /// No relations survive elimination: path classes are decided exactly.
    pub fn exact(&self) -> bool {
        self.tietze.is_free()
    }

    /// Whether the component of `v` has trivial fundamental group (certified).
    pub fn simply_connected_at(&self, v: usize) -> bool {
        let c = self.comp[v];
        let t = &self.tietze;
        (0..self.gen_comp.len()).all(|k| self.gen_comp[k] != c || t.subst[k].is_some())
            && t.rels.iter().all(|r| r.iter().all(|&(k, _)| self.gen_comp[k] != c))
    }

    /// Whether the component of `v` has a free, nontrivial fundamental group.
    pub fn free_nontrivial_at(&self, v: usize) -> bool {
        let c = self.comp[v];
        let t = &self.tietze;
        t.rels.iter().all(|r| r.iter().all(|&(k, _)| self.gen_comp[k] != c))
            && (0..self.gen_comp.len()).any(|k| self.gen_comp[k] == c && t.subst[k].is_none())
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.comp[a] == self.comp[b]
    }

    /// Reduced word of a path in the surviving generators.
    pub fn path_word(&self, steps: &[(usize, bool)]) -> GenWord {
        let w: GenWord = steps.iter().filter_map(|&(e, f)| self.gen_of[e].map(|k| (k, f))).collect();
        self.tietze.rewrite(&w)
    }

    fn to_root(&self, g: &Graph, mut v: usize) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        while let Some((e, f)) = self.parent[v] {
            out.push((e, !f));
            v = g.head(Cell::E(e, !f));
        }
        out
    }

    /// A spanning-forest path from `x` to `z` (same component).
    pub fn tree_path(&self, g: &Graph, x: usize, z: usize) -> EdgePath {
        let mut steps = self.to_root(g, x);
        steps.extend(self.to_root(g, z).iter().rev().map(|&(e, f)| (e, !f)));
        let mut out: Vec<(usize, bool)> = Vec::new();
        for (e, f) in steps {
            if matches!(out.last(), Some(&(e2, f2)) if e2 == e && f2 != f) {
                out.pop();
            } else {
                out.push((e, f));
            }
        }
        EdgePath { start: x, steps: out }
    }
}

/// `(path, arrow)` with the path freely reduced and the arrow non-unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub start: usize,
    pub path: Vec<(usize, bool)>,
    pub pivot: usize,
    pub arrow: Option<usize>,
}

/// The decision layer for one groupoid.
pub struct StarOracle {
    pub groupoid: Arc<GraphGroupoid>,
    pub presentation: PresentedGroupoid,
    etale: bool,
    loops: LoopOracle,
    /// `(arrow, oriented object edge at its target)` ↦ `(source cell, next arrow)`.
    lift: HashMap<(usize, Cell), (Cell, usize)>,
    abel: Cokernel,
    /// Arrow edges leaving each arrow, as `(edge cell, far arrow)`.
    arrow_moves: Vec<Vec<(Cell, usize)>>,
}

impl fmt::Debug for StarOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StarOracle({}, etale: {})", self.groupoid.name, self.etale)
    }
}

/// `s` and `t` restrict to bijections from arrow edges at each arrow onto
/// object edges at its source and target.
pub fn is_etale(g: &GraphGroupoid) -> bool {
    (0..g.arrow_count()).all(|a| {
        let out = g.g1.oriented_edges_at(a);
        [(&g.s, g.s.vertex_image(a)), (&g.t, g.t.vertex_image(a))].iter().all(|(map, x)| {
            let mut images: Vec<Cell> = out.iter().map(|&c| map.apply(c)).collect();
            if images.iter().any(|c| c.is_vertex()) {
                return false;
            }
            images.sort();
            let mut want = g.g0.oriented_edges_at(*x);
            want.sort();
            images == want
        })
    })
}

impl StarOracle {
    pub fn new(g: Arc<GraphGroupoid>) -> Result<StarOracle, HomotopyError> {
        let presentation = fundamental_groupoid(g.clone());
        let etale = is_etale(&g);
        let loops = LoopOracle::new(&g.g0);
        let mut lift = HashMap::new();
        let mut arrow_moves = vec![Vec::new(); g.arrow_count()];
        for a in 0..g.arrow_count() {
            for c in g.g1.oriented_edges_at(a) {
                let far = g.g1.head(c);
                arrow_moves[a].push((c, far));
                if etale {
                    lift.insert((a, g.tgt(c)), (g.src(c), far));
                }
            }
        }
        let ne = g.g0.edge_count();
        let rows: Vec<Vec<i128>> = presentation
            .relations
            .iter()
            .map(|r| {
                let mut v = abelian_vector(&r.lhs, ne, g.arrow_count());
                for (x, y) in v.iter_mut().zip(abelian_vector(&r.rhs, ne, g.arrow_count())) {
                    *x -= y;
                }
                v
            })
            .collect();
        let abel = Cokernel::new(ne + g.arrow_count(), &rows)?;
        Ok(StarOracle { groupoid: g, presentation, etale, loops, lift, abel, arrow_moves })
    }

    pub fn is_etale(&self) -> bool {
        self.etale
    }

    pub fn loops(&self) -> &LoopOracle {
        &self.loops
    }

    /// Free reduction, unit deletion and merging of adjacent arrows.
    pub fn simplify(&self, w: &Word) -> Word {
        let g = &self.groupoid;
        let mut out: Vec<Letter> = Vec::with_capacity(w.letters.len());
        for &l in &w.letters {
            match l {
                Letter::Edge(e, f) => {
                    if out.last() == Some(&Letter::Edge(e, !f)) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Letter::Arrow(h) => {
                    let mut h = h;
                    if let Some(&Letter::Arrow(k)) = out.last() {
                        out.pop();
                        h = g.mul(Cell::V(h), Cell::V(k)).and_then(Cell::as_vertex).expect("adjacent arrows compose");
                    }
                    if g.u.vertex_image(g.s.vertex_image(h)) != h {
                        out.push(Letter::Arrow(h));
                    }
                }
            }
        }
        Word { start: w.start, letters: out }
    }

    /// Pushes arrows to the right; étale groupoids only.
    pub fn normal_form(&self, w: &Word) -> Option<NormalForm> {
        if !self.etale {
            return None;
        }
        let g = &self.groupoid;
        let mut path: Vec<(usize, bool)> = Vec::new();
        let mut arrow: Option<usize> = None;
        let push = |path: &mut Vec<(usize, bool)>, c: Cell| {
            if let Cell::E(e, f) = c {
                if path.last() == Some(&(e, !f)) {
                    path.pop();
                } else {
                    path.push((e, f));
                }
            }
        };
        for &l in &w.letters {
            match l {
                Letter::Edge(e, f) => match arrow {
                    Some(a) => {
                        let &(src, next) = self.lift.get(&(a, Cell::E(e, f)))?;
                        push(&mut path, src);
                        arrow = Some(next);
                    }
                    None => push(&mut path, Cell::E(e, f)),
                },
                Letter::Arrow(h) => {
                    arrow = Some(match arrow {
                        Some(a) => g.mul(Cell::V(h), Cell::V(a)).and_then(Cell::as_vertex)?,
                        None => h,
                    });
                }
            }
        }
        let pivot = EdgePath { start: w.start, steps: path.clone() }.end(&g.g0);
        let arrow = arrow.filter(|&a| g.u.vertex_image(g.s.vertex_image(a)) != a);
        Some(NormalForm { start: w.start, path, pivot, arrow })
    }

    pub fn normal_word(&self, nf: &NormalForm) -> Word {
        let mut letters: Vec<Letter> = nf.path.iter().map(|&(e, f)| Letter::Edge(e, f)).collect();
        letters.extend(nf.arrow.map(Letter::Arrow));
        Word { start: nf.start, letters }
    }

    /// A hashable key that identifies the class of `w` when the object
    /// graph's path classes are decided exactly.
    pub fn class_key(&self, w: &Word) -> Option<(usize, usize, GenWord, Option<usize>)> {
        if !self.loops.exact() {
            return None;
        }
        let nf = self.normal_form(w)?;
        Some((nf.start, nf.pivot, self.loops.path_word(&nf.path), nf.arrow))
    }

    pub fn abelian_image(&self, w: &Word) -> Vec<i128> {
        abelian_vector(w, self.groupoid.g0.edge_count(), self.groupoid.arrow_count())
    }

    fn abelian_differs(&self, a: &Word, b: &Word) -> bool {
        matches!(self.abel.same_class(&self.abelian_image(a), &self.abelian_image(b)), Ok(false))
    }

    pub fn word_reduce(&self, w: &Word) -> Result<Word, HomotopyError> {
        w.end(&self.groupoid)?;
        Ok(match self.normal_form(w) {
            Some(nf) => self.normal_word(&nf),
            None => self.simplify(w),
        })
    }

    pub fn word_equal(&self, a: &Word, b: &Word, cfg: &WordEqConfig) -> Result<TriBool, HomotopyError> {
        let g = &self.groupoid;
        let (ea, eb) = (a.end(g)?, b.end(g)?);
        if a.start != b.start || ea != eb {
            return Ok(TriBool::No);
        }
        if let (Some(na), Some(nb)) = (self.normal_form(a), self.normal_form(b)) {
            if na.pivot != nb.pivot {
                return Ok(TriBool::No);
            }
            let (wa, wb) = (self.loops.path_word(&na.path), self.loops.path_word(&nb.path));
            if wa == wb && na.arrow == nb.arrow {
                return Ok(TriBool::Yes);
            }
            if self.loops.exact() {
                return Ok(TriBool::No);
            }
        }
        let (sa, sb) = (self.simplify(a), self.simplify(b));
        if sa == sb {
            return Ok(TriBool::Yes);
        }
        if self.abelian_differs(a, b) {
            return Ok(TriBool::No);
        }
        Ok(if self.rewrite_meet(&sa, &sb, cfg) { TriBool::Yes } else { TriBool::Unknown })
    }

    /// One-step rewrites along arrow-edge relations, in both directions.
    fn neighbours(&self, w: &Word) -> Vec<Word> {
        let g = &self.groupoid;
        let mut out = Vec::new();
        let n = w.letters.len();
        for i in 0..n {
            let Letter::Arrow(a) = w.letters[i] else { continue };
            for &(c, far) in &self.arrow_moves[a] {
                // [a]·t(ξ) → s(ξ)·[far]
                let (sx, tx) = (g.src(c), g.tgt(c));
                let consume = match tx {
                    Cell::V(_) => Some(i + 1),
                    Cell::E(e, f) => (i + 1 < n && w.letters[i + 1] == Letter::Edge(e, f)).then_some(i + 2),
                };
                if let Some(j) = consume {
                    let mut l = w.letters[..i].to_vec();
                    l.extend(edge_letter(sx));
                    l.push(Letter::Arrow(far));
                    l.extend_from_slice(&w.letters[j..]);
                    out.push(self.simplify(&Word { start: w.start, letters: l }));
                }
                // s(ξ)·[a] → [far]·t(ξ), reading ξ backwards from `a`
                let consume = match sx {
                    Cell::V(_) => Some(i),
                    Cell::E(e, f) => (i > 0 && w.letters[i - 1] == Letter::Edge(e, !f)).then(|| i - 1),
                };
                if let Some(j) = consume {
                    let mut l = w.letters[..j].to_vec();
                    l.push(Letter::Arrow(far));
                    l.extend(edge_letter(tx.reversed()));
                    l.extend_from_slice(&w.letters[i + 1..]);
                    out.push(self.simplify(&Word { start: w.start, letters: l }));
                }
            }
        }
        out
    }

    fn rewrite_meet(&self, a: &Word, b: &Word, cfg: &WordEqConfig) -> bool {
        let mut seen = [HashSet::from([a.clone()]), HashSet::from([b.clone()])];
        let mut frontier = [vec![a.clone()], vec![b.clone()]];
        for _ in 0..cfg.depth {
            for side in 0..2 {
                let mut next = Vec::new();
                for w in &frontier[side] {
                    for v in self.neighbours(w) {
                        if seen[1 - side].contains(&v) {
                            return true;
                        }
                        if seen[side].len() < cfg.max_words && seen[side].insert(v.clone()) {
                            next.push(v);
                        }
                    }
                }
                frontier[side] = next;
            }
        }
        false
    }

    /// Hom-set of `G⋆` from `x` to `y`.
    pub fn hom_set(&self, x: usize, y: usize) -> HomSet {
        let g = &self.groupoid;
        if !self.etale || !self.loops.exact() {
            return HomSet::Unknown;
        }
        let comp: Vec<usize> = (0..g.object_count()).filter(|&z| self.loops.same_component(x, z)).collect();
        let mut out = Vec::new();
        for &z in &comp {
            for a in g.hom(z, y) {
                let p = self.loops.tree_path(&g.g0, x, z);
                let mut w = Word::path(&p);
                w.letters.push(Letter::Arrow(a));
                out.push(w);
            }
        }
        if out.is_empty() {
            return HomSet::Finite(out);
        }
        if self.loops.simply_connected_at(x) {
            HomSet::Finite(out)
        } else {
            HomSet::Infinite
        }
    }

    /// Connected components of `G⋆` (objects joined by edges or arrows).
    pub fn components(&self) -> Vec<usize> {
        let g = &self.groupoid;
        let mut uf = UnionFind::new(g.object_count());
        for e in g.g0.edges() {
            uf.union(e.tail, e.head);
        }
        for a in 0..g.arrow_count() {
            uf.union(g.s.vertex_image(a), g.t.vertex_image(a));
        }
        uf.labels()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomSet {
    Finite(Vec<Word>),
    Infinite,
    Unknown,
}

fn abelian_vector(w: &Word, ne: usize, na: usize) -> Vec<i128> {
    let mut v = vec![0i128; ne + na];
    for &l in &w.letters {
        match l {
            Letter::Edge(e, f) => v[e] += if f { 1 } else { -1 },
            Letter::Arrow(a) => v[ne + a] += 1,
        }
    }
    v
}

pub fn word_reduce(g: &Arc<GraphGroupoid>, w: &Word) -> Result<Word, HomotopyError> {
    StarOracle::new(g.clone())?.word_reduce(w)
}

pub fn word_equal(g: &Arc<GraphGroupoid>, a: &Word, b: &Word, cfg: &WordEqConfig) -> Result<TriBool, HomotopyError> {
    StarOracle::new(g.clone())?.word_equal(a, b, cfg)
}

/// Image of a word under `φ⋆`; collapsed edges disappear.
pub fn map_word(phi: &Functor, w: &Word) -> Word {
    let letters = w
        .letters
        .iter()
        .filter_map(|&l| match l {
            Letter::Edge(e, f) => edge_letter(phi.ob(Cell::E(e, f))),
            Letter::Arrow(a) => Some(Letter::Arrow(phi.f1.vertex_image(a))),
        })
        .collect();
    Word { start: phi.f0.vertex_image(w.start), letters }
}

/// Checks that `φ⋆` sends every relation of `K⋆` to an equality in `G⋆`.
pub fn induced_functor_star(phi: &Functor, target: &StarOracle, cfg: &WordEqConfig) -> Result<TriBool, HomotopyError> {
    let pres = fundamental_groupoid(phi.source.clone());
    let mut verdicts = Vec::with_capacity(pres.relations.len());
    for r in &pres.relations {
        verdicts.push(target.word_equal(&map_word(phi, &r.lhs), &map_word(phi, &r.rhs), cfg)?);
    }
    Ok(TriBool::all(verdicts))
}

/// `i_G`: each arrow to its one-letter word, each object edge to itself.
pub fn canonical_i(g: &GraphGroupoid, c: Cell) -> Word {
    match c {
        Cell::V(a) => Word::arrow(g, a),
        Cell::E(..) => Word { start: g.s.vertex_image(g.g1.tail(c)), letters: vec![] },
    }
}

/// Abelianization of `π1(G⋆, x)`: generators in the component of `x`,
/// a spanning forest killed, relations restricted, Smith normal form.
pub fn abelianized_isotropy(g: &GraphGroupoid, x: usize) -> Result<AbelianGroup, HomotopyError> {
    if x >= g.object_count() {
        return Err(HomotopyError::UnknownObject(x));
    }
    let ne = g.g0.edge_count();
    let na = g.arrow_count();
    // connection graph: object edges first, then arrows
    let mut links: Vec<(usize, usize, usize)> = (0..ne).map(|e| (g.g0.edge(e).tail, g.g0.edge(e).head, e)).collect();
    links.extend((0..na).map(|a| (g.s.vertex_image(a), g.t.vertex_image(a), ne + a)));
    let mut uf = UnionFind::new(g.object_count());
    let mut killed = vec![false; ne + na];
    for &(p, q, id) in &links {
        if uf.union(p, q) {
            killed[id] = true;
        }
    }
    let lab = uf.labels();
    let here = lab[x];
    let in_comp = |id: usize| -> bool {
        let v = if id < ne { g.g0.edge(id).tail } else { g.s.vertex_image(id - ne) };
        lab[v] == here
    };
    let cols: Vec<usize> = (0..ne + na).filter(|&id| in_comp(id) && !killed[id]).collect();
    let col_of: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let pres = fundamental_groupoid(Arc::new(g.clone()));
    let mut rows = Vec::new();
    for r in &pres.relations {
        if lab[r.lhs.start] != here {
            continue;
        }
        let mut v = abelian_vector(&r.lhs, ne, na);
        for (a, b) in v.iter_mut().zip(abelian_vector(&r.rhs, ne, na)) {
            *a -= b;
        }
        let row: Vec<i128> = {
            let mut row = vec![0; cols.len()];
            for (id, &c) in v.iter().enumerate() {
                if let Some(&j) = col_of.get(&id) {
                    row[j] += c;
                }
            }
            row
        };
        if row.iter().any(|&c| c != 0) {
            rows.push(row);
        }
    }
    Ok(crate::snf::abelian_group(cols.len(), &rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::corpus;

    fn cfg() -> WordEqConfig {
        WordEqConfig::default()
    }

    #[test]
    fn tau_squared_is_trivial() {
        let c = corpus();
        let g = c.groupoid("PT2");
        let o = StarOracle::new(g.clone()).unwrap();
        let tau = g.arrow("tau").unwrap();
        let w = Word { start: 0, letters: vec![Letter::Arrow(tau), Letter::Arrow(tau)] };
        assert_eq!(o.word_equal(&w, &Word::empty(0), &cfg()).unwrap(), TriBool::Yes);
        assert_eq!(o.word_equal(&Word::arrow(&g, tau), &Word::empty(0), &cfg()).unwrap(), TriBool::No);
    }

    #[test]
    fn edge_cancellation() {
        let c = corpus();
        let g = c.groupoid("UC3");
        let w = Word { start: 0, letters: vec![Letter::Edge(0, true), Letter::Edge(0, false)] };
        assert_eq!(word_reduce(&g, &w).unwrap(), Word::empty(0));
        let loop3 = Word { start: 0, letters: (0..3).map(|e| Letter::Edge(e, true)).collect() };
        assert_eq!(word_equal(&g, &loop3, &Word::empty(0), &cfg()).unwrap(), TriBool::No);
    }

    #[test]
    fn reflection_isotropy() {
        let c = corpus();
        let g = c.groupoid("REFL");
        let o = StarOracle::new(g.clone()).unwrap();
        assert!(o.is_etale());
        let zero = g.object("0").unwrap();
        let tau0 = g.arrow("(tau,0)").unwrap();
        assert_eq!(o.word_equal(&Word::arrow(&g, tau0), &Word::empty(zero), &cfg()).unwrap(), TriBool::No);
        for x in 0..3 {
            for y in 0..3 {
                match o.hom_set(x, y) {
                    HomSet::Finite(v) => assert_eq!(v.len(), 2),
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    #[test]
    fn abelianized_builtins() {
        let c = corpus();
        let cases = [("PT2", "star", "Z/2"), ("REFL", "0", "Z/2"), ("UC3", "v0", "Z"), ("ROT", "r0", "Z")];
        for (name, x, want) in cases {
            let g = c.groupoid(name);
            let got = abelianized_isotropy(&g, g.object(x).unwrap()).unwrap();
            assert_eq!(got.to_string(), want, "{name}");
        }
    }

    #[test]
    fn gpath_operations() {
        let c = corpus();
        let g = c.groupoid("REFL");
        let zero = g.object("0").unwrap();
        let tau0 = g.arrow("(tau,0)").unwrap();
        let p = GPath { arrows: vec![tau0], paths: vec![] };
        let pp = gpath_concat(&g, &p, &p).unwrap();
        assert_eq!(pp.arrows, vec![g.u.vertex_image(zero)]);
        let b = g.g0.edge_id("b").unwrap();
        let q = GPath {
            arrows: vec![tau0, g.arrow("(1,1)").unwrap()],
            paths: vec![EdgePath { start: zero, steps: vec![(b, true)] }],
        };
        validate_gpath(&g, &q).unwrap();
        let inv = gpath_inverse(&g, &q).unwrap();
        let both = gpath_concat(&g, &inv, &q).unwrap();
        let w = gpath_to_word(&g, &both).unwrap();
        let o = StarOracle::new(g.clone()).unwrap();
        assert_eq!(o.word_equal(&w, &Word::empty(w.start), &cfg()).unwrap(), TriBool::Yes);
        let bad = GPath { arrows: vec![tau0, tau0], paths: vec![EdgePath { start: zero, steps: vec![(b, true)] }] };
        assert!(validate_gpath(&g, &bad).is_err());
    }
}
