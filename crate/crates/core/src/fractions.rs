//! Essential 1-homotopy equivalences, the weak homotopy pullback, spans
//! with W-class left legs and the BF axioms on a finite roster.
//!
//! `G⋆` is materialized as a graph groupoid whose arrows are normal-form
//! classes. This needs an étale `G` whose object components are simply
//! connected after face elimination; anything else has infinite hom-sets
//! and is reported as a truncation failure.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::builtins::Corpus;
use crate::graph::{Cell, EdgePath, Graph, GraphError};
use crate::groupoid::{
    build_groupoid, is_essential_equivalence, same_groupoid, weak_pullback, Functor, GraphGroupoid, GroupoidError,
    NatTrans, TripleIndex,
};
use crate::homotopy::{abelianized_isotropy, map_word, HomSet, HomotopyError, Letter, StarOracle, Word, WordEqConfig};
use crate::span::{GeneralizedMap, LegClass, SpanError};
use crate::tribool::TriBool;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FractionsError {
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error("`{0}` is not certified as an essential 1-homotopy equivalence")]
    NotInW(String),
    #[error("mismatched groupoids: {0}")]
    Mismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationConfig {
    /// Longest object path allowed in a normal form.
    pub max_len: usize,
    pub word: WordEqConfig,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig { max_len: 8, word: WordEqConfig::default() }
    }
}

impl TruncationConfig {
    pub fn with_depth(depth: usize) -> Self {
        TruncationConfig { max_len: depth, word: WordEqConfig { depth, ..WordEqConfig::default() } }
    }
}

/// `G⋆` as a graph groupoid on the same object graph, with `i_G: G → G⋆`.
pub struct StarGroupoid {
    pub base: Arc<GraphGroupoid>,
    pub star: Arc<GraphGroupoid>,
    pub i: Functor,
    pub oracle: StarOracle,
    keys: HashMap<(usize, usize, usize), usize>,
    words: Vec<Word>,
}

impl std::fmt::Debug for StarGroupoid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StarGroupoid({})", self.star.name)
    }
}

impl StarGroupoid {
    pub fn new(g: Arc<GraphGroupoid>, cfg: &TruncationConfig) -> Result<StarGroupoid, FractionsError> {
        let oracle = StarOracle::new(g.clone())?;
        if !oracle.is_etale() {
            return Err(FractionsError::TruncationInsufficient(format!(
                "`{}` is not étale; its normal forms are not computed",
                g.name
            )));
        }
        let loops = oracle.loops();
        let mut keys = HashMap::new();
        let mut words = Vec::new();
        for x in 0..g.object_count() {
            if !loops.exact() || !loops.simply_connected_at(x) {
                return Err(FractionsError::TruncationInsufficient(format!(
                    "hom-sets at `{}` are infinite",
                    g.object_name(x)
                )));
            }
            for z in (0..g.object_count()).filter(|&z| loops.same_component(x, z)) {
                let p = loops.tree_path(&g.g0, x, z);
                if p.steps.len() > cfg.max_len {
                    return Err(FractionsError::TruncationInsufficient(format!(
                        "normal form from `{}` to `{}` needs length {}",
                        g.object_name(x),
                        g.object_name(z),
                        p.steps.len()
                    )));
                }
                for a in (0..g.arrow_count()).filter(|&a| g.s.vertex_image(a) == z) {
                    let mut w = Word::path(&p);
                    w.letters.push(Letter::Arrow(a));
                    keys.insert((x, z, a), words.len());
                    words.push(oracle.word_reduce(&w)?);
                }
            }
        }
        let mut star = StarGroupoid { star: g.clone(), i: Functor::identity(g.clone()), base: g, oracle, keys, words };
        star.assemble()?;
        Ok(star)
    }

    /// Star arrow holding the class of `w`.
    pub fn class_of(&self, w: &Word) -> Option<usize> {
        let g = &self.base;
        let nf = self.oracle.normal_form(w)?;
        let a = nf.arrow.unwrap_or_else(|| g.u.vertex_image(nf.pivot));
        self.keys.get(&(nf.start, nf.pivot, a)).copied()
    }

    pub fn word_of(&self, a: usize) -> &Word {
        &self.words[a]
    }

    fn assemble(&mut self) -> Result<(), FractionsError> {
        let g = self.base.clone();
        let n = self.words.len();
        let src = |a: usize| self.words[a].start;
        let tgt = |a: usize| self.words[a].end(&g).expect("valid normal word");
        let around = |x: usize| -> Vec<Cell> {
            let mut v = vec![Cell::V(x)];
            v.extend(g.g0.oriented_edges_at(x));
            v
        };
        let shift = |w: usize, alpha: Cell, beta: Cell| -> Option<usize> {
            let mut letters: Vec<Letter> = Vec::new();
            if let Cell::E(e, f) = alpha {
                letters.push(Letter::Edge(e, !f));
            }
            letters.extend_from_slice(&self.words[w].letters);
            if let Cell::E(e, f) = beta {
                letters.push(Letter::Edge(e, f));
            }
            self.class_of(&Word { start: g.g0.head(alpha), letters })
        };
        let name = |w: usize| format!("{}:{}", g.object_name(src(w)), self.words[w].display(&g));
        let vnames: Vec<String> = (0..n).map(name).collect();

        let mut edge_of: HashMap<(usize, Cell, Cell), Cell> = HashMap::new();
        let mut edges: Vec<(usize, usize, Cell, Cell)> = Vec::new();
        for w in 0..n {
            for alpha in around(src(w)) {
                for beta in around(tgt(w)) {
                    if alpha.is_vertex() && beta.is_vertex() || edge_of.contains_key(&(w, alpha, beta)) {
                        continue;
                    }
                    let w2 = shift(w, alpha, beta).ok_or_else(|| {
                        FractionsError::TruncationInsufficient(format!("no class for `{}` shifted", vnames[w]))
                    })?;
                    let idx = edges.len();
                    edge_of.insert((w, alpha, beta), Cell::E(idx, true));
                    edge_of.insert((w2, alpha.reversed(), beta.reversed()), Cell::E(idx, false));
                    edges.push((w, w2, alpha, beta));
                }
            }
        }

        // 2-cells: move one end then the other, against moving both at once;
        // and object faces dragged along either end
        let mut faces = Vec::new();
        let step = |c: Cell| match c {
            Cell::E(e, f) => (e, f),
            Cell::V(_) => unreachable!("star edges only"),
        };
        for w in 0..n {
            for alpha in g.g0.oriented_edges_at(src(w)) {
                for beta in g.g0.oriented_edges_at(tgt(w)) {
                    let both = edge_of[&(w, alpha, beta)].reversed();
                    let wa = shift(w, alpha, Cell::V(tgt(w))).expect("closed");
                    let wb = shift(w, Cell::V(src(w)), beta).expect("closed");
                    let first =
                        [edge_of[&(w, alpha, Cell::V(tgt(w)))], edge_of[&(wa, Cell::V(g.g0.head(alpha)), beta)], both];
                    let second =
                        [edge_of[&(w, Cell::V(src(w)), beta)], edge_of[&(wb, alpha, Cell::V(g.g0.head(beta)))], both];
                    for tri in [first, second] {
                        faces.push(EdgePath { start: w, steps: tri.iter().map(|&c| step(c)).collect() });
                    }
                }
            }
            for face in g.g0.faces() {
                for at_source in [true, false] {
                    let here = if at_source { src(w) } else { tgt(w) };
                    if face.start != here {
                        continue;
                    }
                    let mut cur = w;
                    let mut steps = Vec::new();
                    for &(e, f) in &face.steps {
                        let c = Cell::E(e, f);
                        let (alpha, beta) = if at_source { (c, Cell::V(tgt(cur))) } else { (Cell::V(src(cur)), c) };
                        let cell = edge_of[&(cur, alpha, beta)];
                        steps.push(step(cell));
                        cur = shift(cur, alpha, beta).expect("closed");
                    }
                    faces.push(EdgePath { start: w, steps });
                }
            }
        }

        let g1 = Graph::new(
            vnames.clone(),
            edges
                .iter()
                .map(|&(w, w2, a, b)| {
                    (
                        format!("{}|{}|{}", vnames[w], g.g0.cell_name(a), g.g0.cell_name(b)),
                        vnames[w].clone(),
                        vnames[w2].clone(),
                    )
                })
                .collect::<Vec<_>>(),
        )?
        .with_faces(faces)?;
        let g1 = Arc::new(g1);

        let decode = |c: Cell| -> (usize, Cell, Cell) {
            match c {
                Cell::V(w) => (w, Cell::V(src(w)), Cell::V(tgt(w))),
                Cell::E(e, true) => (edges[e].0, edges[e].2, edges[e].3),
                Cell::E(e, false) => (edges[e].1, edges[e].2.reversed(), edges[e].3.reversed()),
            }
        };
        let encode = |w: usize, a: Cell, b: Cell| -> Option<Cell> {
            if a.is_vertex() && b.is_vertex() {
                Some(Cell::V(w))
            } else {
                edge_of.get(&(w, a, b)).copied()
            }
        };
        let inv_word = |w: usize| self.class_of(&self.words[w].inverse(&g).expect("valid"));
        let mul_word = |h: usize, k: usize| self.class_of(&self.words[k].concat(&self.words[h], &g).ok()?);
        let star = build_groupoid(
            format!("{}*", g.name),
            g.g0.clone(),
            g1.clone(),
            &mut |c| Some(decode(c).1),
            &mut |c| Some(decode(c).2),
            &mut |c| {
                let x = g.g0.tail(c);
                encode(self.keys[&(x, x, g.u.vertex_image(x))], c, c)
            },
            &mut |c| {
                let (w, a, b) = decode(c);
                encode(inv_word(w)?, b, a)
            },
            &mut |h, k| {
                let (wh, bh, ch) = decode(h);
                let (wk, ak, _) = decode(k);
                encode(mul_word(wh, wk)?, ak, ch).filter(|_| bh == decode(k).2)
            },
        )?;
        let star = Arc::new(star);
        let i = Functor::from_fns(format!("i_{}", g.name), g.clone(), star.clone(), Some, |c| match c {
            Cell::V(a) => self.class_of(&Word::arrow(&g, a)).map(Cell::V),
            Cell::E(..) => {
                let a = self.class_of(&Word::arrow(&g, g.g1.tail(c)))?;
                encode(a, g.src(c), g.tgt(c))
            }
        })?;
        self.star = star;
        self.i = i;
        Ok(())
    }
}

/// `a(x)`: a word from `φ(x)` to `ψ(x)` for every object `x`.
#[derive(Clone, Debug)]
pub struct HomotopyWitness {
    pub from: Functor,
    pub to: Functor,
    pub a: Vec<Word>,
}

impl HomotopyWitness {
    pub fn identity(phi: &Functor) -> HomotopyWitness {
        HomotopyWitness {
            from: phi.clone(),
            to: phi.clone(),
            a: (0..phi.source.object_count()).map(|x| Word::empty(phi.f0.vertex_image(x))).collect(),
        }
    }

    /// `a(x) = [T(x)]`.
    pub fn from_nat_trans(t: &NatTrans) -> HomotopyWitness {
        let g = &t.from.target;
        HomotopyWitness {
            from: t.from.clone(),
            to: t.to.clone(),
            a: (0..t.from.source.object_count())
                .map(|x| Word::arrow(g, t.at(Cell::V(x)).as_vertex().expect("objects go to arrows")))
                .collect(),
        }
    }

    fn check_shape(&self) -> Result<(), FractionsError> {
        let (phi, psi) = (&self.from, &self.to);
        if !same_groupoid(&phi.source, &psi.source) || !same_groupoid(&phi.target, &psi.target) {
            return Err(FractionsError::MalformedWitness("functors are not parallel".into()));
        }
        if self.a.len() != phi.source.object_count() {
            return Err(FractionsError::MalformedWitness(format!(
                "{} components for {} objects",
                self.a.len(),
                phi.source.object_count()
            )));
        }
        let g = &phi.target;
        for (x, w) in self.a.iter().enumerate() {
            let end = w.end(g)?;
            if w.start != phi.f0.vertex_image(x) || end != psi.f0.vertex_image(x) {
                return Err(FractionsError::MalformedWitness(format!(
                    "a({}) = {} has the wrong endpoints",
                    phi.source.object_name(x),
                    w.display(g)
                )));
            }
        }
        Ok(())
    }
}

/// Naturality of `a` on every arrow and object edge of the source.
pub fn check_homotopy_witness(h: &HomotopyWitness, cfg: &WordEqConfig) -> Result<TriBool, FractionsError> {
    h.check_shape()?;
    let oracle = StarOracle::new(h.from.target.clone())?;
    check_homotopy_witness_with(h, &oracle, cfg)
}

pub fn check_homotopy_witness_with(
    h: &HomotopyWitness,
    oracle: &StarOracle,
    cfg: &WordEqConfig,
) -> Result<TriBool, FractionsError> {
    h.check_shape()?;
    let (phi, psi) = (&h.from, &h.to);
    let k = &phi.source;
    let g = &phi.target;
    let mut gens: Vec<Word> = (0..k.arrow_count()).map(|a| Word::arrow(k, a)).collect();
    gens.extend(
        (0..k.g0.edge_count()).map(|e| Word { start: k.g0.edge(e).tail, letters: vec![Letter::Edge(e, true)] }),
    );
    let mut verdict = TriBool::Yes;
    for w in gens {
        let (x, y) = (w.start, w.end(k)?);
        let lhs = h.a[x].concat(&map_word(psi, &w), g)?;
        let rhs = map_word(phi, &w).concat(&h.a[y], g)?;
        verdict = verdict.and(oracle.word_equal(&lhs, &rhs, cfg)?);
        if verdict.is_no() {
            break;
        }
    }
    Ok(verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WCertificate {
    pub functor: String,
    pub verdict: TriBool,
    pub essentially_surjective: TriBool,
    pub pi0_injective: TriBool,
    pub isotropy_bijective: TriBool,
    /// The verdict came from the functor being an essential equivalence.
    pub via_essential_equivalence: bool,
    pub notes: Vec<String>,
}

/// Whether `φ⋆` is an essential equivalence of fundamental groupoids.
///
/// Surjectivity and `π0` are decided by union-find on `G⋆`. Full
/// faithfulness reduces to isotropy bijections at one object per component,
/// decided exactly for finite isotropy and refuted by abelianization
/// otherwise. Unresolved cases fall back on `E ⊆ W`.
pub fn is_essential_1homotopy_equivalence(
    phi: &Functor,
    cfg: &TruncationConfig,
) -> Result<WCertificate, FractionsError> {
    let (k, g) = (&phi.source, &phi.target);
    let ko = StarOracle::new(k.clone())?;
    let go = StarOracle::new(g.clone())?;
    let (kc, gc) = (ko.components(), go.components());
    let mut notes = Vec::new();
    let ob = |x: usize| phi.f0.vertex_image(x);

    let hit: std::collections::HashSet<usize> = (0..k.object_count()).map(|x| gc[ob(x)]).collect();
    let missed = (0..g.object_count()).find(|&y| !hit.contains(&gc[y]));
    if let Some(y) = missed {
        notes.push(format!("`{}` is not reached", g.object_name(y)));
    }
    let es = TriBool::from_bool(missed.is_none());

    let mut pi0 = TriBool::Yes;
    'pairs: for x in 0..k.object_count() {
        for y in x + 1..k.object_count() {
            if kc[x] != kc[y] && gc[ob(x)] == gc[ob(y)] {
                notes.push(format!("`{}` and `{}` become connected", k.object_name(x), k.object_name(y)));
                pi0 = TriBool::No;
                break 'pairs;
            }
        }
    }

    let mut iso = TriBool::Yes;
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..k.object_count() {
        if !reps.iter().any(|&r| kc[r] == kc[x]) {
            reps.push(x);
        }
    }
    for &x in &reps {
        let here = isotropy_bijection(phi, &ko, &go, x, cfg, &mut notes)?;
        iso = iso.and(here);
        if iso.is_no() {
            break;
        }
    }

    let mut verdict = es.and(pi0).and(iso);
    let mut via = false;
    if verdict == TriBool::Unknown && is_essential_equivalence(phi).holds() {
        verdict = TriBool::Yes;
        via = true;
        notes.push("essential equivalence".into());
    }
    Ok(WCertificate {
        functor: phi.name.clone(),
        verdict,
        essentially_surjective: es,
        pi0_injective: pi0,
        isotropy_bijective: iso,
        via_essential_equivalence: via,
        notes,
    })
}

fn isotropy_bijection(
    phi: &Functor,
    ko: &StarOracle,
    go: &StarOracle,
    x: usize,
    cfg: &TruncationConfig,
    notes: &mut Vec<String>,
) -> Result<TriBool, FractionsError> {
    let (k, g) = (&phi.source, &phi.target);
    let y = phi.f0.vertex_image(x);
    let too_long = |v: &[Word]| v.iter().any(|w| w.len() > cfg.max_len + 1);
    match (ko.hom_set(x, x), go.hom_set(y, y)) {
        (HomSet::Finite(a), HomSet::Finite(b)) => {
            if too_long(&a) || too_long(&b) {
                notes.push(format!("isotropy at `{}` exceeds the length budget", k.object_name(x)));
                return Ok(TriBool::Unknown);
            }
            let mut images = Vec::with_capacity(a.len());
            for w in &a {
                images.push(go.class_key(&map_word(phi, w)).expect("finite hom-sets are exact"));
            }
            let mut targets: Vec<_> = b.iter().map(|w| go.class_key(w).expect("exact")).collect();
            images.sort();
            targets.sort();
            let injective = images.windows(2).all(|p| p[0] != p[1]);
            if injective && images == targets {
                Ok(TriBool::Yes)
            } else {
                notes.push(format!(
                    "isotropy at `{}`: {} elements map onto {} of {}",
                    k.object_name(x),
                    a.len(),
                    {
                        images.dedup();
                        images.len()
                    },
                    b.len()
                ));
                Ok(TriBool::No)
            }
        }
        (HomSet::Finite(a), HomSet::Infinite) | (HomSet::Infinite, HomSet::Finite(a)) => {
            notes.push(format!("isotropy at `{}`: finite ({}) against infinite", k.object_name(x), a.len()));
            Ok(TriBool::No)
        }
        _ => {
            let (ak, ag) = (abelianized_isotropy(k, x)?, abelianized_isotropy(g, y)?);
            if ak != ag {
                notes.push(format!("abelianized isotropy at `{}`: {ak} vs {ag}", k.object_name(x)));
                Ok(TriBool::No)
            } else {
                Ok(TriBool::Unknown)
            }
        }
    }
}

/// The weak homotopy pullback of `ε: J → G` and `φ: K → G`: the weak
/// pullback of `i_G ε` and `i_G φ` over `G⋆`.
pub struct HomotopyPullback {
    pub groupoid: Arc<GraphGroupoid>,
    /// Projection to `J`.
    pub p1: Functor,
    /// Projection to `K`.
    pub p3: Functor,
    /// `ε p1 ⇒ φ p3`.
    pub square: HomotopyWitness,
    pub star: StarGroupoid,
    pub index: TripleIndex,
}

pub fn weak_homotopy_pullback(
    eps: &Functor,
    phi: &Functor,
    cfg: &TruncationConfig,
) -> Result<HomotopyPullback, FractionsError> {
    if !same_groupoid(&eps.target, &phi.target) {
        return Err(FractionsError::Mismatch(format!("{} and {} have different targets", eps.name, phi.name)));
    }
    let cert = is_essential_1homotopy_equivalence(eps, cfg)?;
    if !cert.verdict.is_yes() {
        return Err(FractionsError::NotInW(eps.name.clone()));
    }
    let star = StarGroupoid::new(eps.target.clone(), cfg)?;
    let wp = weak_pullback(&star.i.compose(eps)?, &star.i.compose(phi)?)?;
    let mut grp = (*wp.groupoid).clone();
    grp.name = format!("whp({},{})", eps.name, phi.name);
    let grp = Arc::new(grp);
    let p1 =
        Functor::new(format!("p1[{}]", grp.name), grp.clone(), eps.source.clone(), wp.p1.f0.clone(), wp.p1.f1.clone())?;
    let p3 =
        Functor::new(format!("p3[{}]", grp.name), grp.clone(), phi.source.clone(), wp.p3.f0.clone(), wp.p3.f1.clone())?;
    let square = HomotopyWitness {
        from: eps.compose(&p1)?,
        to: phi.compose(&p3)?,
        a: (0..grp.object_count())
            .map(|o| {
                let (_, w, _) = wp.index.split_object(Cell::V(o));
                star.word_of(w.as_vertex().expect("object vertex")).clone()
            })
            .collect(),
    };
    Ok(HomotopyPullback { groupoid: grp, p1, p3, square, star, index: wp.index })
}

/// A span whose left leg is certified in W.
#[derive(Clone, Debug)]
pub struct WSpan {
    pub map: GeneralizedMap,
    pub certificate: WCertificate,
}

impl WSpan {
    pub fn new(map: GeneralizedMap, cfg: &TruncationConfig) -> Result<WSpan, FractionsError> {
        let certificate = is_essential_1homotopy_equivalence(&map.left, cfg)?;
        if !certificate.verdict.is_yes() {
            return Err(FractionsError::NotInW(map.left.name.clone()));
        }
        Ok(WSpan { map: GeneralizedMap { class: LegClass::W, ..map }, certificate })
    }

    pub fn from_legs(
        name: impl Into<String>,
        left: Functor,
        right: Functor,
        cfg: &TruncationConfig,
    ) -> Result<WSpan, FractionsError> {
        WSpan::new(GeneralizedMap::unchecked(name, left, right, LegClass::W)?, cfg)
    }

    pub fn identity(g: &Arc<GraphGroupoid>, cfg: &TruncationConfig) -> Result<WSpan, FractionsError> {
        let id = Functor::identity(g.clone());
        WSpan::from_legs(format!("id({})", g.name), id.clone(), id, cfg)
    }
}

/// `g ∘ f` through the weak homotopy pullback of `g.left` and `f.right`.
pub fn compose_wspans(
    f: &WSpan,
    g: &WSpan,
    cfg: &TruncationConfig,
) -> Result<(WSpan, HomotopyPullback), FractionsError> {
    if !same_groupoid(f.map.codomain(), g.map.domain()) {
        return Err(FractionsError::Mismatch(format!("{} then {}", f.map.name, g.map.name)));
    }
    let p = weak_homotopy_pullback(&g.map.left, &f.map.right, cfg)?;
    let left = f.map.left.compose(&p.p3)?;
    let right = g.map.right.compose(&p.p1)?;
    let out = WSpan::from_legs(format!("{}.{}", g.map.name, f.map.name), left, right, cfg)?;
    Ok((out, p))
}

/// `u: L → J`, `v: L → J′` in W, `H: ωu ⇒ ω′v`, `H′: φu ⇒ φ′v`.
#[derive(Clone, Debug)]
pub struct TwoCellWitness {
    pub l: Arc<GraphGroupoid>,
    pub u: Functor,
    pub v: Functor,
    pub h: HomotopyWitness,
    pub h2: HomotopyWitness,
}

pub fn check_1homotopy(
    f: &WSpan,
    g: &WSpan,
    w: &TwoCellWitness,
    cfg: &TruncationConfig,
) -> Result<TriBool, FractionsError> {
    let (f, g) = (&f.map, &g.map);
    if !same_groupoid(f.domain(), g.domain()) || !same_groupoid(f.codomain(), g.codomain()) {
        return Err(FractionsError::MalformedWitness("spans are not parallel".into()));
    }
    if !same_groupoid(&w.u.source, &w.l) || !same_groupoid(&w.v.source, &w.l) {
        return Err(FractionsError::MalformedWitness("u and v must start at L".into()));
    }
    if !same_groupoid(&w.u.target, &f.apex) || !same_groupoid(&w.v.target, &g.apex) {
        return Err(FractionsError::MalformedWitness("u and v must land in the apexes".into()));
    }
    let legs = [
        (&w.h, f.left.compose(&w.u)?, g.left.compose(&w.v)?, "H"),
        (&w.h2, f.right.compose(&w.u)?, g.right.compose(&w.v)?, "H'"),
    ];
    for (h, from, to, label) in &legs {
        if !h.from.agrees_with(from) || !h.to.agrees_with(to) {
            return Err(FractionsError::MalformedWitness(format!("{label} has the wrong functors")));
        }
    }
    let mut verdict = is_essential_1homotopy_equivalence(&w.u, cfg)?.verdict;
    verdict = verdict.and(is_essential_1homotopy_equivalence(&w.v, cfg)?.verdict);
    for (h, ..) in &legs {
        if verdict.is_no() {
            break;
        }
        verdict = verdict.and(check_homotopy_witness(h, &cfg.word)?);
    }
    Ok(verdict)
}

/// Yes iff the right leg is in W; the inverse is the reversed span.
pub fn wspan_invertibility(f: &WSpan, cfg: &TruncationConfig) -> Result<(TriBool, Option<WSpan>), FractionsError> {
    let cert = is_essential_1homotopy_equivalence(&f.map.right, cfg)?;
    let inverse = cert.verdict.is_yes().then(|| WSpan { map: f.map.reversed(), certificate: cert.clone() });
    Ok((cert.verdict, inverse))
}

/// `φ: K → G` with `ψ: G → K`, `T: ψφ ⇒ id_K` and `T′: φψ ⇒ id_G`.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub phi: Functor,
    pub psi: Functor,
    pub unit: NatTrans,
    pub counit: NatTrans,
}

/// `H: ηφ ⇒ ηψ`, and the proposed `ε: K′ → K` with `G: φε ⇒ ψε`
/// such that `H·ε = η·G`.
#[derive(Clone, Debug)]
pub struct Bf4Instance {
    pub eta: Functor,
    pub h: HomotopyWitness,
    pub eps: Functor,
    pub g: HomotopyWitness,
}

/// `T: ε ⇒ δ` with `δ` in W.
#[derive(Clone, Debug)]
pub struct Bf5Instance {
    pub eps: Functor,
    pub delta: Functor,
    pub t: HomotopyWitness,
}

#[derive(Clone, Debug, Default)]
pub struct BfRoster {
    pub equivalences: Vec<Equivalence>,
    /// `(φ, ψ)` to test `ψ∘φ`.
    pub compositions: Vec<(Functor, Functor)>,
    /// `(ε, φ)` over a common target.
    pub pullbacks: Vec<(Functor, Functor)>,
    pub bf4: Vec<Bf4Instance>,
    pub bf5: Vec<Bf5Instance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BfReport {
    pub bf1: TriBool,
    pub bf2: TriBool,
    pub bf3: TriBool,
    pub bf4: TriBool,
    pub bf5: TriBool,
    pub notes: Vec<String>,
}

fn w_verdict(phi: &Functor, cfg: &TruncationConfig) -> Result<TriBool, FractionsError> {
    Ok(is_essential_1homotopy_equivalence(phi, cfg)?.verdict)
}

pub fn bf_axiom_suite(roster: &BfRoster, cfg: &TruncationConfig) -> Result<BfReport, FractionsError> {
    let mut notes = Vec::new();
    let mut note = |axiom: &str, what: &str, v: TriBool| {
        if !v.is_yes() {
            notes.push(format!("{axiom} {what}: {v}"));
        }
        v
    };

    let mut bf1 = TriBool::Yes;
    for e in &roster.equivalences {
        let ok = e.unit.validate().is_ok()
            && e.counit.validate().is_ok()
            && e.unit.from.agrees_with(&e.psi.compose(&e.phi)?)
            && e.unit.to.agrees_with(&Functor::identity(e.phi.source.clone()))
            && e.counit.from.agrees_with(&e.phi.compose(&e.psi)?)
            && e.counit.to.agrees_with(&Functor::identity(e.phi.target.clone()));
        let v = if ok { w_verdict(&e.phi, cfg)? } else { TriBool::No };
        bf1 = bf1.and(note("BF1", &e.phi.name, v));
    }

    let mut bf2 = TriBool::Yes;
    for (phi, psi) in &roster.compositions {
        let pre = w_verdict(phi, cfg)?.and(w_verdict(psi, cfg)?);
        let v = if pre.is_yes() { w_verdict(&psi.compose(phi)?, cfg)? } else { TriBool::Unknown };
        bf2 = bf2.and(note("BF2", &format!("{}*{}", psi.name, phi.name), v));
    }

    let mut bf3 = TriBool::Yes;
    for (eps, phi) in &roster.pullbacks {
        let v = match weak_homotopy_pullback(eps, phi, cfg) {
            Ok(p) => w_verdict(&p.p3, cfg)?.and(check_homotopy_witness(&p.square, &cfg.word)?),
            Err(FractionsError::TruncationInsufficient(_)) => TriBool::Unknown,
            Err(e) => return Err(e),
        };
        bf3 = bf3.and(note("BF3", &format!("({},{})", eps.name, phi.name), v));
    }

    let mut bf4 = TriBool::Yes;
    for inst in &roster.bf4 {
        let v = check_bf4(inst, cfg)?;
        bf4 = bf4.and(note("BF4", &inst.eta.name, v));
    }

    let mut bf5 = TriBool::Yes;
    for inst in &roster.bf5 {
        let pre = check_homotopy_witness(&inst.t, &cfg.word)?.and(w_verdict(&inst.delta, cfg)?);
        let v = if pre.is_yes() { w_verdict(&inst.eps, cfg)? } else { pre.and(TriBool::Unknown) };
        bf5 = bf5.and(note("BF5", &inst.eps.name, v));
    }

    Ok(BfReport { bf1, bf2, bf3, bf4, bf5, notes })
}

fn check_bf4(inst: &Bf4Instance, cfg: &TruncationConfig) -> Result<TriBool, FractionsError> {
    let j = &inst.eta.target;
    if !same_groupoid(&inst.h.from.target, j) || !same_groupoid(&inst.g.from.source, &inst.eps.source) {
        return Err(FractionsError::MalformedWitness("BF4 instance does not fit together".into()));
    }
    let mut v = check_homotopy_witness(&inst.h, &cfg.word)?
        .and(check_homotopy_witness(&inst.g, &cfg.word)?)
        .and(w_verdict(&inst.eps, cfg)?);
    if v.is_no() {
        return Ok(v);
    }
    let oracle = StarOracle::new(j.clone())?;
    for x in 0..inst.eps.source.object_count() {
        let lhs = &inst.h.a[inst.eps.f0.vertex_image(x)];
        let rhs = map_word(&inst.eta, &inst.g.a[x]);
        v = v.and(oracle.word_equal(lhs, &rhs, &cfg.word)?);
    }
    Ok(v)
}

/// The roster used for the BF report on the built-in corpus.
pub fn builtin_roster(c: &Corpus) -> Result<BfRoster, FractionsError> {
    let (pt2, refl, pair2, one) = (c.groupoid("PT2"), c.groupoid("REFL"), c.groupoid("PAIR2"), c.groupoid("ONE"));
    let mut roster = BfRoster::default();

    for name in ["PT2", "REFL", "UC3"] {
        let id = Functor::identity(c.groupoid(name));
        roster.equivalences.push(Equivalence {
            phi: id.clone(),
            psi: id.clone(),
            unit: NatTrans::identity(id.clone()),
            counit: NatTrans::identity(id),
        });
    }
    let to_one =
        Functor::from_fns("pair_to_one", pair2.clone(), one.clone(), |_| Some(Cell::V(0)), |_| Some(Cell::V(0)))?;
    let incl_a = c.functor("incl_a");
    let a = pair2.object("a")?;
    let back = incl_a.compose(&to_one)?;
    let counit = NatTrans::from_fn(back.clone(), Functor::identity(pair2.clone()), |x| {
        let x = x.as_vertex()?;
        pair2.hom(a, x).first().copied().map(Cell::V)
    })?;
    roster.equivalences.push(Equivalence {
        phi: incl_a.clone(),
        psi: to_one.clone(),
        unit: NatTrans::identity(to_one.compose(&incl_a)?),
        counit,
    });

    roster.compositions = vec![
        (c.functor("i"), c.functor("c")),
        (c.functor("c"), c.functor("i")),
        (c.functor("q"), c.functor("id_UC3")),
        (c.functor("incl_a"), to_one.clone()),
    ];
    roster.pullbacks = vec![
        (c.functor("c"), c.functor("id_PT2")),
        (c.functor("c"), c.functor("c")),
        (c.functor("id_REFL"), c.functor("id_REFL")),
        (c.functor("incl_b"), c.functor("incl_a")),
    ];

    let tau = pt2.arrow("tau")?;
    let tau0 = refl.arrow("(tau,0)")?;
    let (cf, i) = (c.functor("c"), c.functor("i"));
    let id_pt2 = c.functor("id_PT2");
    roster.bf4.push(Bf4Instance {
        eta: cf.clone(),
        h: HomotopyWitness { from: cf.compose(&i)?, to: cf.compose(&i)?, a: vec![Word::arrow(&pt2, tau)] },
        eps: id_pt2.clone(),
        g: HomotopyWitness { from: i.compose(&id_pt2)?, to: i.compose(&id_pt2)?, a: vec![Word::arrow(&refl, tau0)] },
    });

    let (ia, ib) = (c.functor("incl_a"), c.functor("incl_b"));
    let ab = pair2.hom(a, pair2.object("b")?)[0];
    roster.bf5.push(Bf5Instance {
        eps: ia.clone(),
        delta: ib.clone(),
        t: HomotopyWitness { from: ia, to: ib, a: vec![Word::arrow(&pair2, ab)] },
    });
    Ok(roster)
}

/// The inverse pair of the reflection example: `f = (c, id): PT2 ⇝ REFL`,
/// `g = (id, c): REFL ⇝ PT2`, the composite `g ∘ f`, the identity span of
/// `PT2` and a 2-cell between them through `u: PT2 → P` at the object `0`.
pub struct InverseExample {
    pub f: WSpan,
    pub g: WSpan,
    pub composite: WSpan,
    pub pullback: HomotopyPullback,
    pub identity: WSpan,
    pub witness: TwoCellWitness,
}

pub fn reflection_inverse_example(c: &Corpus, cfg: &TruncationConfig) -> Result<InverseExample, FractionsError> {
    let (pt2, refl) = (c.groupoid("PT2"), c.groupoid("REFL"));
    let (cf, id_refl, i) = (c.functor("c"), c.functor("id_REFL"), c.functor("i"));
    let f = WSpan::from_legs("(c,id)", cf.clone(), id_refl.clone(), cfg)?;
    let g = WSpan::from_legs("(id,c)", id_refl, cf, cfg)?;
    let (composite, pullback) = compose_wspans(&f, &g, cfg)?;
    let identity = WSpan::identity(&pt2, cfg)?;
    let p = &pullback;
    let zero = refl.object("0")?;
    let unit0 = p
        .star
        .class_of(&Word::empty(zero))
        .ok_or_else(|| FractionsError::TruncationInsufficient("unit class missing".into()))?;
    let u = Functor::from_fns(
        "u",
        pt2.clone(),
        p.groupoid.clone(),
        |_| p.index.object_cell(Cell::V(zero), Cell::V(unit0), Cell::V(zero)),
        |a| {
            let k = i.ar(a);
            p.index.arrow_cell(k, Cell::V(unit0), k)
        },
    )?;
    let v = Functor::identity(pt2.clone());
    let h = HomotopyWitness::identity(&composite.map.left.compose(&u)?);
    let h = HomotopyWitness { to: identity.map.left.compose(&v)?, ..h };
    let h2 = HomotopyWitness::identity(&composite.map.right.compose(&u)?);
    let h2 = HomotopyWitness { to: identity.map.right.compose(&v)?, ..h2 };
    let witness = TwoCellWitness { l: pt2, u, v, h, h2 };
    Ok(InverseExample { f, g, composite, pullback, identity, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::corpus;

    fn cfg() -> TruncationConfig {
        TruncationConfig::default()
    }

    #[test]
    fn star_of_edgeless_is_itself() {
        let c = corpus();
        let s = StarGroupoid::new(c.groupoid("PT2"), &cfg()).unwrap();
        assert_eq!(s.star.arrow_count(), 2);
        assert_eq!(s.star.g1.edge_count(), 0);
    }

    #[test]
    fn star_of_reflection() {
        let c = corpus();
        let s = StarGroupoid::new(c.groupoid("REFL"), &cfg()).unwrap();
        assert_eq!(s.star.arrow_count(), 18);
        s.i.validate().unwrap();
        assert!(matches!(StarGroupoid::new(c.groupoid("UC3"), &cfg()), Err(FractionsError::TruncationInsufficient(_))));
    }

    #[test]
    fn w_verdicts() {
        let c = corpus();
        assert_eq!(is_essential_1homotopy_equivalence(&c.functor("c"), &cfg()).unwrap().verdict, TriBool::Yes);
        assert_eq!(is_essential_1homotopy_equivalence(&c.functor("i"), &cfg()).unwrap().verdict, TriBool::Yes);
        assert_eq!(is_essential_1homotopy_equivalence(&c.functor("q"), &cfg()).unwrap().verdict, TriBool::Yes);
        assert_eq!(is_essential_1homotopy_equivalence(&c.functor("collapse"), &cfg()).unwrap().verdict, TriBool::No);
        assert_eq!(is_essential_1homotopy_equivalence(&c.functor("bang"), &cfg()).unwrap().verdict, TriBool::No);
    }

    #[test]
    fn pullback_sizes() {
        let c = corpus();
        let p = weak_homotopy_pullback(&c.functor("c"), &c.functor("id_PT2"), &cfg()).unwrap();
        assert_eq!(p.groupoid.object_count(), 6);
        assert_eq!(check_homotopy_witness(&p.square, &cfg().word).unwrap(), TriBool::Yes);
        let p = weak_homotopy_pullback(&c.functor("id_REFL"), &c.functor("id_REFL"), &cfg()).unwrap();
        assert_eq!(p.groupoid.object_count(), 18);
        assert_eq!(is_essential_1homotopy_equivalence(&p.p3, &cfg()).unwrap().verdict, TriBool::Yes);
    }

    #[test]
    fn witnesses_on_the_point() {
        let c = corpus();
        let pt2 = c.groupoid("PT2");
        let id = c.functor("id_PT2");
        let tau = Word::arrow(&pt2, pt2.arrow("tau").unwrap());
        let h = HomotopyWitness { from: id.clone(), to: id.clone(), a: vec![tau] };
        assert_eq!(check_homotopy_witness(&h, &WordEqConfig::default()).unwrap(), TriBool::Yes);
        assert_eq!(
            check_homotopy_witness(&HomotopyWitness::identity(&id), &WordEqConfig::default()).unwrap(),
            TriBool::Yes
        );
    }

    #[test]
    fn reflection_pair_is_inverse() {
        let c = corpus();
        let ex = reflection_inverse_example(&c, &cfg()).unwrap();
        assert_eq!(ex.pullback.groupoid.object_count(), 18);
        let v = check_1homotopy(&ex.composite, &ex.identity, &ex.witness, &cfg()).unwrap();
        assert_eq!(v, TriBool::Yes);
        // f against itself; the identity 2-cell passes, a(0) = (tau,0) on the REFL leg does not
        let refl = c.groupoid("REFL");
        let id = Functor::identity(refl.clone());
        let same = TwoCellWitness {
            l: refl.clone(),
            u: id.clone(),
            v: id.clone(),
            h: HomotopyWitness::identity(&ex.f.map.left.compose(&id).unwrap()),
            h2: HomotopyWitness::identity(&ex.f.map.right.compose(&id).unwrap()),
        };
        assert_eq!(check_1homotopy(&ex.f, &ex.f, &same, &cfg()).unwrap(), TriBool::Yes);
        let mut bad = same.clone();
        bad.h2.a[refl.object("0").unwrap()] = Word::arrow(&refl, refl.arrow("(tau,0)").unwrap());
        assert_eq!(check_1homotopy(&ex.f, &ex.f, &bad, &cfg()).unwrap(), TriBool::No);
        assert_eq!(wspan_invertibility(&ex.f, &cfg()).unwrap().0, TriBool::Yes);
    }

    #[test]
    fn builtin_bf_suite() {
        let c = corpus();
        let report = bf_axiom_suite(&builtin_roster(&c).unwrap(), &cfg()).unwrap();
        assert_eq!(
            [report.bf1, report.bf2, report.bf3, report.bf4, report.bf5],
            [TriBool::Yes; 5],
            "{:?}",
            report.notes
        );
        assert_eq!(bf_axiom_suite(&BfRoster::default(), &cfg()).unwrap().bf1, TriBool::Yes);
    }
}
