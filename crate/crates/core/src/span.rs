//! Generalized maps as spans `K ← J → G` whose left leg is an essential
//! equivalence, their composition through weak pullbacks, and witnessed
//! isomorphisms of spans.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupoid::{
    is_essential_equivalence, same_groupoid, search_nat_trans, weak_pullback, Functor, GraphGroupoid, GroupoidError,
    NatTrans,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("left leg of `{0}` is not an essential equivalence")]
    LeftLegNotEssential(String),
    #[error("middle groupoids differ: `{0}` vs `{1}`")]
    MiddleMismatch(String, String),
    #[error("legs of `{0}` do not share the apex")]
    ApexMismatch(String),
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegClass {
    E,
    W,
}

#[derive(Clone)]
pub struct GeneralizedMap {
    pub name: String,
    pub apex: Arc<GraphGroupoid>,
    pub left: Functor,
    pub right: Functor,
    pub class: LegClass,
}

impl fmt::Debug for GeneralizedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} <-{}- {} -{}-> {}",
            self.name, self.left.target.name, self.left.name, self.apex.name, self.right.name, self.right.target.name
        )
    }
}

impl GeneralizedMap {
    /// An E-class span; the left leg must be an essential equivalence.
    pub fn new(name: impl Into<String>, left: Functor, right: Functor) -> Result<GeneralizedMap, SpanError> {
        let g = GeneralizedMap::unchecked(name, left, right, LegClass::E)?;
        if !is_essential_equivalence(&g.left).holds() {
            return Err(SpanError::LeftLegNotEssential(g.name));
        }
        Ok(g)
    }

    /// A span whose left leg is certified elsewhere.
    pub fn unchecked(
        name: impl Into<String>,
        left: Functor,
        right: Functor,
        class: LegClass,
    ) -> Result<GeneralizedMap, SpanError> {
        let name = name.into();
        if !same_groupoid(&left.source, &right.source) {
            return Err(SpanError::ApexMismatch(name));
        }
        Ok(GeneralizedMap { name, apex: left.source.clone(), left, right, class })
    }

    /// The strict map `(id, φ)`.
    pub fn strict(phi: &Functor) -> GeneralizedMap {
        GeneralizedMap {
            name: format!("({})", phi.name),
            apex: phi.source.clone(),
            left: Functor::identity(phi.source.clone()),
            right: phi.clone(),
            class: LegClass::E,
        }
    }

    pub fn domain(&self) -> &Arc<GraphGroupoid> {
        &self.left.target
    }

    pub fn codomain(&self) -> &Arc<GraphGroupoid> {
        &self.right.target
    }

    /// Legs swapped (only a generalized map when the right leg is essential).
    pub fn reversed(&self) -> GeneralizedMap {
        GeneralizedMap {
            name: format!("rev({})", self.name),
            apex: self.apex.clone(),
            left: self.right.clone(),
            right: self.left.clone(),
            class: self.class,
        }
    }
}

pub fn identity_span(g: &Arc<GraphGroupoid>) -> GeneralizedMap {
    let id = Functor::identity(g.clone());
    GeneralizedMap { name: format!("id({})", g.name), apex: g.clone(), left: id.clone(), right: id, class: LegClass::E }
}

/// `g ∘ f` for `f: K ⇝ G`, `g: G ⇝ L`, with apex the weak pullback of
/// `f.right` and `g.left`.
pub fn compose_spans(f: &GeneralizedMap, g: &GeneralizedMap) -> Result<GeneralizedMap, SpanError> {
    if !same_groupoid(f.codomain(), g.domain()) {
        return Err(SpanError::MiddleMismatch(f.codomain().name.clone(), g.domain().name.clone()));
    }
    let wp = weak_pullback(&f.right, &g.left)?;
    let left = f.left.compose(&wp.p1)?;
    let right = g.right.compose(&wp.p3)?;
    let class = if f.class == LegClass::E && g.class == LegClass::E { LegClass::E } else { LegClass::W };
    let out = GeneralizedMap::unchecked(format!("{}.{}", g.name, f.name), left, right, class)?;
    if class == LegClass::E && !is_essential_equivalence(&out.left).holds() {
        return Err(SpanError::LeftLegNotEssential(out.name));
    }
    Ok(out)
}

/// Data exhibiting `f ~ g`: `α: L → J`, `β: L → J′`, `T: εα ⇒ ε′β`, `T′: φα ⇒ φ′β`.
#[derive(Clone, Debug)]
pub struct SpanIsoWitness {
    pub l: Arc<GraphGroupoid>,
    pub alpha: Functor,
    pub beta: Functor,
    pub t: NatTrans,
    pub t2: NatTrans,
}

/// Validates every witness condition.
pub fn check_span_iso(f: &GeneralizedMap, g: &GeneralizedMap, w: &SpanIsoWitness) -> Result<bool, SpanError> {
    if !same_groupoid(f.domain(), g.domain()) || !same_groupoid(f.codomain(), g.codomain()) {
        return Err(SpanError::MalformedWitness("spans are not parallel".into()));
    }
    if !same_groupoid(&w.alpha.source, &w.l) || !same_groupoid(&w.beta.source, &w.l) {
        return Err(SpanError::MalformedWitness("α and β must share their source".into()));
    }
    if !same_groupoid(&w.alpha.target, &f.apex) || !same_groupoid(&w.beta.target, &g.apex) {
        return Err(SpanError::MalformedWitness("α, β must land in the apexes".into()));
    }
    if w.alpha.validate().is_err() || w.beta.validate().is_err() {
        return Ok(false);
    }
    if !is_essential_equivalence(&w.alpha).holds() || !is_essential_equivalence(&w.beta).holds() {
        return Ok(false);
    }
    let ea = f.left.compose(&w.alpha)?;
    let eb = g.left.compose(&w.beta)?;
    let pa = f.right.compose(&w.alpha)?;
    let pb = g.right.compose(&w.beta)?;
    let ok = w.t.from.agrees_with(&ea)
        && w.t.to.agrees_with(&eb)
        && w.t2.from.agrees_with(&pa)
        && w.t2.to.agrees_with(&pb)
        && w.t.validate().is_ok()
        && w.t2.validate().is_ok();
    Ok(ok)
}

/// Looks for a witness with `L` the weak pullback of the left legs.
pub fn search_span_iso(f: &GeneralizedMap, g: &GeneralizedMap) -> Result<Option<SpanIsoWitness>, SpanError> {
    if !same_groupoid(f.domain(), g.domain()) || !same_groupoid(f.codomain(), g.codomain()) {
        return Ok(None);
    }
    let wp = weak_pullback(&f.left, &g.left)?;
    let pa = f.right.compose(&wp.p1)?;
    let pb = g.right.compose(&wp.p3)?;
    let Some(t2) = search_nat_trans(&pa, &pb) else { return Ok(None) };
    let w = SpanIsoWitness { l: wp.groupoid.clone(), alpha: wp.p1, beta: wp.p3, t: wp.cell, t2 };
    Ok(check_span_iso(f, g, &w)?.then_some(w))
}

/// Witness for `(εδ, φδ) ~ (ε, φ)` when `δ: J′ → J` is an essential equivalence.
pub fn precompose(f: &GeneralizedMap, delta: &Functor) -> Result<(GeneralizedMap, SpanIsoWitness), SpanError> {
    let g = GeneralizedMap::new(format!("{}.{}", f.name, delta.name), f.left.compose(delta)?, f.right.compose(delta)?)?;
    let l = delta.source.clone();
    let w = SpanIsoWitness {
        l: l.clone(),
        alpha: delta.clone(),
        beta: Functor::identity(l),
        t: NatTrans::identity(g.left.clone()),
        t2: NatTrans::identity(g.right.clone()),
    };
    Ok((g, w))
}

/// Both legs are essential equivalences.
pub fn morita_certificate_check(f: &GeneralizedMap) -> bool {
    is_essential_equivalence(&f.left).holds() && is_essential_equivalence(&f.right).holds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::corpus;

    #[test]
    fn unit_law_and_strict_composite() {
        let c = corpus();
        let q = GeneralizedMap::strict(&c.functor("q"));
        let id = identity_span(&c.groupoid("UC3"));
        let comp = compose_spans(&q, &id).unwrap();
        assert!(search_span_iso(&comp, &q).unwrap().is_some());
    }

    #[test]
    fn morita_examples() {
        let c = corpus();
        assert!(morita_certificate_check(&GeneralizedMap::strict(&c.functor("q"))));
        assert!(!morita_certificate_check(&GeneralizedMap::strict(&c.functor("c"))));
        assert!(morita_certificate_check(&identity_span(&c.groupoid("PT2"))));
    }

    #[test]
    fn precompose_witness_checks() {
        let c = corpus();
        let f = identity_span(&c.groupoid("PAIR2"));
        let (g, w) = precompose(&f, &c.functor("incl_a")).unwrap();
        assert!(check_span_iso(&f, &g, &w).unwrap());
    }
}
