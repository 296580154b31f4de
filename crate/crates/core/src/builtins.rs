//! The built-in example corpus.
//!
//! - `PT2`: one object `star`, arrows `1` and `tau` (the group Z/2).
//! - `PAIR2`: pair groupoid on `a`, `b`.
//! - `ONE`: the trivial groupoid.
//! - `UC3`: unit groupoid of the 3-cycle.
//! - `REFL`: Z/2 acting on the path `-1 -a- 0 -b- 1` by reflection.
//! - `ROT`: Z/2 acting on the 6-cycle by the antipodal shift.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::graph::{Cell, Graph};
use crate::groupoid::{Functor, GraphGroupoid};

pub fn pt2() -> GraphGroupoid {
    GraphGroupoid::edgeless("PT2", &["star"], &[("1", "star", "star"), ("tau", "star", "star")], |h, g| h ^ g)
        .expect("PT2 is valid")
}

pub fn pair2() -> GraphGroupoid {
    GraphGroupoid::pair_groupoid("PAIR2", &["a", "b"])
}

pub fn one() -> GraphGroupoid {
    GraphGroupoid::trivial("ONE")
}

pub fn uc3() -> GraphGroupoid {
    GraphGroupoid::unit_groupoid("UC3", Arc::new(Graph::cycle(3, "v", "e")))
}

pub fn path3() -> Graph {
    Graph::from_strs(&["-1", "0", "1"], &[("a", "-1", "0"), ("b", "0", "1")]).expect("path is valid")
}

/// Reflection of the 3-vertex path.
pub fn reflect(c: Cell) -> Cell {
    match c {
        Cell::V(v) => Cell::V(2 - v),
        Cell::E(e, fwd) => Cell::E(1 - e, !fwd),
    }
}

/// Antipodal shift of the 6-cycle.
pub fn antipode(c: Cell) -> Cell {
    match c {
        Cell::V(v) => Cell::V((v + 3) % 6),
        Cell::E(e, fwd) => Cell::E((e + 3) % 6, fwd),
    }
}

pub fn refl() -> GraphGroupoid {
    GraphGroupoid::group_action("REFL", &pt2(), Arc::new(path3()), |h, c| if h == 0 { c } else { reflect(c) })
        .expect("REFL is valid")
}

pub fn rot() -> GraphGroupoid {
    GraphGroupoid::group_action("ROT", &pt2(), Arc::new(Graph::cycle(6, "r", "f")), |h, c| {
        if h == 0 {
            c
        } else {
            antipode(c)
        }
    })
    .expect("ROT is valid")
}

/// Every built-in groupoid, shared so functors between them compose.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub groupoids: BTreeMap<String, Arc<GraphGroupoid>>,
    pub functors: BTreeMap<String, Functor>,
}

impl Corpus {
    pub fn groupoid(&self, name: &str) -> Arc<GraphGroupoid> {
        self.groupoids[name].clone()
    }

    pub fn functor(&self, name: &str) -> Functor {
        self.functors[name].clone()
    }
}

/// Groupoids and functors of the corpus.
///
/// Functors: `q: ROT → UC3` (index mod 3), `c: REFL → PT2` (constant on
/// objects), `i: PT2 → REFL` (at `0`), `incl_a`, `incl_b: ONE → PAIR2`,
/// `collapse: UC3 → ONE`, `bang: PT2 → ONE`, and identities `id_*`.
pub fn corpus() -> Corpus {
    let mut gs = BTreeMap::new();
    for g in [pt2(), pair2(), one(), uc3(), refl(), rot()] {
        gs.insert(g.name.clone(), Arc::new(g));
    }
    let get = |n: &str| -> Arc<GraphGroupoid> { gs[n].clone() };
    let mut fs = BTreeMap::new();
    let mut add = |f: Functor| {
        fs.insert(f.name.clone(), f);
    };
    for g in gs.values() {
        add(Functor::identity(g.clone()));
    }
    let (rot, uc3, refl, pt2, one, pair2) = (get("ROT"), get("UC3"), get("REFL"), get("PT2"), get("ONE"), get("PAIR2"));

    let q = Functor::from_fns("q", rot.clone(), uc3.clone(), |c| Some(mod3(c)), |a| Some(mod3(rot.src(a))))
        .expect("q is a functor");
    add(q);

    let c = Functor::from_fns(
        "c",
        refl.clone(),
        pt2.clone(),
        |_| Some(Cell::V(0)),
        |a| Some(Cell::V(arrow_group(&refl, a))),
    )
    .expect("c is a functor");
    add(c);

    let i = Functor::from_fns(
        "i",
        pt2.clone(),
        refl.clone(),
        |_| Some(Cell::V(1)),
        |h| Some(action_arrow(&refl, h.as_vertex()?, Cell::V(1))),
    )
    .expect("i is a functor");
    add(i);

    for (name, v) in [("incl_a", 0), ("incl_b", 1)] {
        let unit = pair2.u.vertex_image(v);
        add(Functor::from_fns(name, one.clone(), pair2.clone(), |_| Some(Cell::V(v)), |_| Some(Cell::V(unit)))
            .expect("inclusion is a functor"));
    }
    add(Functor::from_fns("collapse", uc3.clone(), one.clone(), |_| Some(Cell::V(0)), |_| Some(Cell::V(0)))
        .expect("collapse is a functor"));
    add(Functor::from_fns("bang", pt2.clone(), one.clone(), |_| Some(Cell::V(0)), |_| Some(Cell::V(0)))
        .expect("bang is a functor"));
    Corpus { groupoids: gs, functors: fs }
}

fn mod3(c: Cell) -> Cell {
    match c {
        Cell::V(v) => Cell::V(v % 3),
        Cell::E(e, fwd) => Cell::E(e % 3, fwd),
    }
}

/// For an action groupoid, the group element of an arrow cell.
fn arrow_group(g: &GraphGroupoid, a: Cell) -> usize {
    let name = g.g1.cell_name(match a {
        Cell::V(_) => a,
        Cell::E(..) => Cell::V(g.g1.tail(a)),
    });
    usize::from(name.starts_with("(tau,"))
}

/// The arrow `(h, x)` of an action groupoid.
fn action_arrow(g: &GraphGroupoid, h: usize, x: Cell) -> Cell {
    let hname = if h == 0 { "1" } else { "tau" };
    let name = format!("({hname},{})", g.g0.cell_name(x));
    g.g1.parse_cell(&name).expect("action arrow exists")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::is_essential_equivalence;

    #[test]
    fn corpus_validates() {
        let c = corpus();
        for g in c.groupoids.values() {
            g.validate().unwrap();
        }
        for f in c.functors.values() {
            f.validate().unwrap();
        }
    }

    #[test]
    fn refl_shape() {
        let g = refl();
        assert_eq!((g.arrow_count(), g.g1.edge_count()), (6, 4));
        let zero = g.object("0").unwrap();
        assert_eq!(g.isotropy_group(zero).unwrap().order(), 2);
        assert_eq!(g.isotropy_group(g.object("-1").unwrap()).unwrap().order(), 1);
    }

    #[test]
    fn rot_orbit_space_is_triangle() {
        let o = rot().orbits();
        assert_eq!((o.space.vertex_count(), o.space.edge_count()), (3, 3));
        assert!(o.folded_edges.is_empty());
    }

    #[test]
    fn essential_equivalence_examples() {
        let c = corpus();
        assert!(is_essential_equivalence(&c.functor("q")).holds());
        let cert = is_essential_equivalence(&c.functor("c"));
        assert!(!cert.holds());
        assert_eq!(cert.hom_mismatch, Some(("-1".into(), "-1".into(), 1, 2)));
        assert_eq!(cert.witness.as_deref(), Some("|hom(-1,-1)| = 1 ≠ 2"));
    }
}
