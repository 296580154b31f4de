//! Acceptance criteria 1–9, one line each with its runtime.

use std::sync::Arc;
use std::time::{Duration, Instant};

use groupoid_calc::bibundle::{
    gamma, gamma_inv, has_section, search_bibundle_iso, strict_bibundle, unit_bibundle, Bibundle, BibundleError,
};
use groupoid_calc::builtins::corpus;
use groupoid_calc::fractions::{
    bf_axiom_suite, builtin_roster, check_1homotopy, check_homotopy_witness, is_essential_1homotopy_equivalence,
    reflection_inverse_example, weak_homotopy_pullback, FractionsError, HomotopyWitness, TruncationConfig,
};
use groupoid_calc::graph::{Cell, EdgePath, Graph, GraphError, GraphMap};
use groupoid_calc::groupoid::{
    build_groupoid, enumerate_nat_trans, is_essential_equivalence, nat_horizontal, nat_vertical, Functor,
    GraphGroupoid, GroupoidError, NatTrans,
};
use groupoid_calc::homotopy::{abelianized_isotropy, Word};
use groupoid_calc::io::{builtin_examples, resolve, Library, SpanClass, SpanDef};
use groupoid_calc::nerve::{compare_pi1, pi1_from_nerve};
use groupoid_calc::span::{check_span_iso, compose_spans, identity_span, search_span_iso, GeneralizedMap};
use groupoid_calc::TriBool;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn library() -> Library {
    resolve(&builtin_examples()).expect("corpus resolves")
}

// ---------------------------------------------------------------- criterion 1

#[derive(Clone, Copy)]
enum Field {
    S,
    T,
    U,
    Inv,
    M,
}

fn mutate_groupoid(g: &GraphGroupoid, field: Field, at: &str, to: &str) -> Result<GraphGroupoid, GroupoidError> {
    let c1 = |s: &str| g.g1.parse_cell(s).expect("arrow cell");
    let c0 = |s: &str| g.g0.parse_cell(s).expect("object cell");
    let over = |m: &GraphMap, key: Option<Cell>, val: Option<Cell>| {
        let m = m.clone();
        move |c: Cell| if Some(c) == key { val } else { Some(m.apply(c)) }
    };
    let (mut ks, mut kt, mut ku, mut ki) = (None, None, None, None);
    let (mut vs, mut vt, mut vu, mut vi) = (None, None, None, None);
    let mut km = None;
    match field {
        Field::S => (ks, vs) = (Some(c1(at)), Some(c0(to))),
        Field::T => (kt, vt) = (Some(c1(at)), Some(c0(to))),
        Field::U => (ku, vu) = (Some(c0(at)), Some(c1(to))),
        Field::Inv => (ki, vi) = (Some(c1(at)), Some(c1(to))),
        Field::M => {
            let (h, x) = at.split_once('|').expect("pair");
            km = Some(((c1(h), c1(x)), c1(to)));
        }
    }
    build_groupoid(
        format!("{}*", g.name),
        g.g0.clone(),
        g.g1.clone(),
        &mut over(&g.s, ks, vs),
        &mut over(&g.t, kt, vt),
        &mut over(&g.u, ku, vu),
        &mut over(&g.inv, ki, vi),
        &mut |h, x| match km {
            Some((key, val)) if key == (h, x) => Some(val),
            _ => g.mul(h, x),
        },
    )
}

fn mutate_functor(f: &Functor, arrows: bool, at: &str, to: &str) -> Result<Functor, GroupoidError> {
    let (k, g) = (&f.source, &f.target);
    let (key, val) = if arrows {
        (k.g1.parse_cell(at).expect("cell"), g.g1.parse_cell(to).expect("cell"))
    } else {
        (k.g0.parse_cell(at).expect("cell"), g.g0.parse_cell(to).expect("cell"))
    };
    Functor::from_fns(
        format!("{}*", f.name),
        k.clone(),
        g.clone(),
        |c| Some(if !arrows && c == key { val } else { f.ob(c) }),
        |c| Some(if arrows && c == key { val } else { f.ar(c) }),
    )
}

fn mutate_nat(
    from: &Functor,
    to: &Functor,
    base: impl Fn(Cell) -> Cell,
    at: &str,
    val: &str,
) -> Result<NatTrans, GroupoidError> {
    let key = from.source.g0.parse_cell(at).expect("cell");
    let val = from.target.g1.parse_cell(val).expect("cell");
    NatTrans::from_fn(from.clone(), to.clone(), |c| Some(if c == key { val } else { base(c) }))
}

fn groupoid_axiom(e: &GroupoidError) -> String {
    match e {
        GroupoidError::Axiom { axiom, .. } => axiom.to_string(),
        GroupoidError::Functor { equation, .. } | GroupoidError::NatTrans { equation, .. } => equation.to_string(),
        GroupoidError::Graph(GraphError::NotAGraphMap(_)) => "graph map".into(),
        other => format!("other: {other}"),
    }
}

fn bibundle_axiom(e: &BibundleError) -> String {
    match e {
        BibundleError::Action { axiom, .. } | BibundleError::Bibundle { axiom, .. } => axiom.to_string(),
        other => format!("other: {other}"),
    }
}

/// Two commuting-looking Z/2 actions on `{p, q, r}` that do not commute.
fn three_point_bibundle(left_swap: (usize, usize), right_swap: (usize, usize)) -> Result<Bibundle, BibundleError> {
    let pt2 = corpus().groupoid("PT2");
    let m = Arc::new(Graph::from_strs(&["p", "q", "r"], &[]).expect("graph"));
    let anchor = GraphMap::constant(m.clone(), pt2.g0.clone(), 0);
    let tau = Cell::V(pt2.arrow("tau").expect("tau"));
    let swap = |(a, b): (usize, usize), x: Cell| match x {
        Cell::V(v) if v == a => Cell::V(b),
        Cell::V(v) if v == b => Cell::V(a),
        other => other,
    };
    Bibundle::new(
        "three",
        pt2.clone(),
        pt2.clone(),
        anchor.clone(),
        anchor,
        |h, x| Some(if h == tau { swap(left_swap, x) } else { x }),
        |x, a| Some(if a == tau { swap(right_swap, x) } else { x }),
    )
}

fn criterion1() -> Check {
    let lib = library();
    let c = corpus();
    let mut checked = 0;
    for g in lib.groupoids.values() {
        g.validate().map_err(|e| format!("{}: {e}", g.name))?;
        checked += 1;
    }
    for f in lib.functors.values() {
        f.validate().map_err(|e| format!("{}: {e}", f.name))?;
        checked += 1;
    }
    let functors: Vec<&Functor> = lib.functors.values().collect();
    for phi in &functors {
        for psi in &functors {
            if Arc::ptr_eq(&phi.source, &psi.source) && Arc::ptr_eq(&phi.target, &psi.target) {
                for t in enumerate_nat_trans(phi, psi) {
                    t.validate().map_err(|e| format!("{} => {}: {e}", phi.name, psi.name))?;
                    checked += 1;
                }
            }
        }
    }
    for t in lib.nat_transes.values() {
        t.validate().map_err(|e| e.to_string())?;
        checked += 1;
    }
    let mut bundles: Vec<Bibundle> = lib.bibundles.values().cloned().collect();
    for f in lib.functors.values() {
        bundles.push(strict_bibundle(f).map_err(|e| e.to_string())?);
    }
    for g in lib.groupoids.values() {
        bundles.push(unit_bibundle(g));
    }
    for b in &bundles {
        b.left.validate().map_err(|e| format!("{}: {e}", b.name))?;
        b.right.validate().map_err(|e| format!("{}: {e}", b.name))?;
        b.validate().map_err(|e| format!("{}: {e}", b.name))?;
        checked += 3;
    }

    let (pt2, pair2, refl, uc3) = (c.groupoid("PT2"), c.groupoid("PAIR2"), c.groupoid("REFL"), c.groupoid("UC3"));
    let mut mutations: Vec<(&str, &str, String)> = Vec::new();
    let mut g = |label: &'static str, want: &'static str, r: Result<GraphGroupoid, GroupoidError>| {
        mutations.push((label, want, r.err().map_or("accepted".into(), |e| groupoid_axiom(&e))));
    };
    g("PT2 m(tau,tau)=tau", "inverse axiom", mutate_groupoid(&pt2, Field::M, "tau|tau", "tau"));
    g("PT2 m(1,tau)=1", "unit axiom", mutate_groupoid(&pt2, Field::M, "1|tau", "1"));
    g("PT2 u(star)=tau", "unit axiom", mutate_groupoid(&pt2, Field::U, "star", "tau"));
    g("PT2 inv(tau)=1", "inverse axiom", mutate_groupoid(&pt2, Field::Inv, "tau", "1"));
    g("PAIR2 m((a,b),(b,a))=(b,b)", "source/target axiom", mutate_groupoid(&pair2, Field::M, "(a,b)|(b,a)", "(b,b)"));
    g("PAIR2 inv((a,b))=(a,b)", "inverse axiom", mutate_groupoid(&pair2, Field::Inv, "(a,b)", "(a,b)"));
    g("PAIR2 u(a)=(b,b)", "unit axiom", mutate_groupoid(&pair2, Field::U, "a", "(b,b)"));
    g("PAIR2 s((a,a))=b", "structure map", mutate_groupoid(&pair2, Field::S, "(a,a)", "b"));
    g("PAIR2 t((b,b))=a", "structure map", mutate_groupoid(&pair2, Field::T, "(b,b)", "a"));
    g("REFL inv((tau,0))=(1,0)", "structure map", mutate_groupoid(&refl, Field::Inv, "(tau,0)", "(1,0)"));
    g("REFL u(a)=(tau,a)", "structure map", mutate_groupoid(&refl, Field::U, "a", "(tau,a)"));
    g(
        "REFL m((tau,0),(tau,0))=(tau,0)",
        "structure map",
        mutate_groupoid(&refl, Field::M, "(tau,0)|(tau,0)", "(tau,0)"),
    );
    let z3 =
        GraphGroupoid::edgeless("Z3", &["o"], &[("e", "o", "o"), ("a", "o", "o"), ("b", "o", "o")], |h, g| (h + g) % 3)
            .map_err(|e| e.to_string())?;
    g("Z3 m(a,a)=e", "associativity axiom", mutate_groupoid(&z3, Field::M, "a|a", "e"));
    g("Z3 m(a,e)=b", "unit axiom", mutate_groupoid(&z3, Field::M, "a|e", "b"));
    g("UC3 t(v0)=v1", "structure map", mutate_groupoid(&uc3, Field::T, "v0", "v1"));

    let mut f = |label: &'static str, want: &'static str, r: Result<Functor, GroupoidError>| {
        mutations.push((label, want, r.err().map_or("accepted".into(), |e| groupoid_axiom(&e))));
    };
    f("q f0(r0)=v1", "graph map", mutate_functor(&c.functor("q"), false, "r0", "v1"));
    f("i f1(tau)=(tau,1)", "s∘f1 = f0∘s", mutate_functor(&c.functor("i"), true, "tau", "(tau,1)"));
    f("i f0(star)=1", "s∘f1 = f0∘s", mutate_functor(&c.functor("i"), false, "star", "1"));
    f("id_PT2 f1(1)=tau", "f1∘u = u∘f0", mutate_functor(&c.functor("id_PT2"), true, "1", "tau"));
    f("id_PAIR2 f1((a,b))=(b,a)", "s∘f1 = f0∘s", mutate_functor(&c.functor("id_PAIR2"), true, "(a,b)", "(b,a)"));
    f("c f1((tau,-1))=1", "graph map", mutate_functor(&c.functor("c"), true, "(tau,-1)", "1"));
    f("id_PAIR2 f1((b,a))=(a,a)", "f1∘inv = inv∘f1", mutate_functor(&c.functor("id_PAIR2"), true, "(b,a)", "(a,a)"));

    let trivial = lib.functors["trivial_PT2"].clone();
    let id_pt2 = c.functor("id_PT2");
    let id_refl = c.functor("id_REFL");
    let id_pair = c.functor("id_PAIR2");
    let mut n = |label: &'static str, want: &'static str, r: Result<NatTrans, GroupoidError>| {
        mutations.push((label, want, r.err().map_or("accepted".into(), |e| groupoid_axiom(&e))));
    };
    n("id_PT2⇒trivial T(star)=1", "ψ(h)∘T(x) = T(y)∘φ(h)", mutate_nat(&id_pt2, &trivial, |x| pt2.unit(x), "star", "1"));
    n(
        "id_REFL⇒id_REFL T(-1)=(tau,-1)",
        "graph map",
        mutate_nat(&id_refl, &id_refl, |x| refl.unit(x), "-1", "(tau,-1)"),
    );
    n("id_PAIR2⇒id_PAIR2 T(a)=(b,a)", "t∘T = ψ0", mutate_nat(&id_pair, &id_pair, |x| pair2.unit(x), "a", "(b,a)"));
    n("id_PAIR2⇒id_PAIR2 T(a)=(a,b)", "s∘T = φ0", mutate_nat(&id_pair, &id_pair, |x| pair2.unit(x), "a", "(a,b)"));

    let tau = Cell::V(pt2.arrow("tau").expect("tau"));
    let one = Cell::V(pt2.arrow("1").expect("1"));
    let mut b = |label: &'static str, want: &'static str, r: Result<Bibundle, BibundleError>| {
        mutations.push((label, want, r.err().map_or("accepted".into(), |e| bibundle_axiom(&e))));
    };
    let unit_pt2 = |lact: &dyn Fn(Cell, Cell) -> Option<Cell>| {
        Bibundle::new("u*", pt2.clone(), pt2.clone(), pt2.t.clone(), pt2.s.clone(), lact, |x, a| pt2.mul(x, a))
    };
    b(
        "unit(PT2) tau·tau=tau",
        "associativity",
        unit_pt2(&|h, x| if (h, x) == (tau, tau) { Some(tau) } else { pt2.mul(h, x) }),
    );
    b("unit(PT2) 1·tau=1", "unit law", unit_pt2(&|h, x| if (h, x) == (one, tau) { Some(one) } else { pt2.mul(h, x) }));
    let (aa, ab, bb) = (
        pair2.g1.parse_cell("(a,a)").expect("cell"),
        pair2.g1.parse_cell("(a,b)").expect("cell"),
        pair2.g1.parse_cell("(b,b)").expect("cell"),
    );
    b(
        "unit(PAIR2) (a,a)·(a,b)=(b,b)",
        "moment condition",
        Bibundle::new(
            "u*",
            pair2.clone(),
            pair2.clone(),
            pair2.t.clone(),
            pair2.s.clone(),
            |h, x| if (h, x) == (aa, ab) { Some(bb) } else { pair2.mul(h, x) },
            |x, a| pair2.mul(x, a),
        ),
    );
    b("three points, swaps (p,q) and (q,r)", "commuting actions", three_point_bibundle((0, 1), (1, 2)));
    ensure(three_point_bibundle((0, 1), (0, 1)).is_ok(), || "equal swaps should form a bibundle".into())?;

    let graph_kind = |e: GraphError| match e {
        GraphError::DanglingEndpoint { .. } => "dangling endpoint".to_string(),
        GraphError::InvalidPath(_) => "invalid path".to_string(),
        other => format!("other: {other}"),
    };
    let dangling = Graph::from_strs(&["x"], &[("e", "x", "y")]).err().map_or("accepted".into(), graph_kind);
    mutations.push(("edge to an absent vertex", "dangling endpoint", dangling));
    let open = Graph::from_strs(&["x", "y"], &[("e", "x", "y")])
        .expect("graph")
        .with_faces(vec![EdgePath { start: 0, steps: vec![(0, true)] }])
        .err()
        .map_or("accepted".into(), graph_kind);
    mutations.push(("face that is not closed", "invalid path", open));

    let wrong: Vec<String> = mutations
        .iter()
        .filter(|(_, want, got)| want != got)
        .map(|(label, want, got)| format!("{label}: expected `{want}`, got `{got}`"))
        .collect();
    ensure(wrong.is_empty(), || wrong.join("; "))?;
    ensure(mutations.len() >= 20, || format!("only {} mutations", mutations.len()))?;
    Ok(format!("{checked} structures valid; {} single-field mutations rejected by the named axiom", mutations.len()))
}

// ---------------------------------------------------------------- criterion 2

fn criterion2() -> Check {
    let c = corpus();
    let q = is_essential_equivalence(&c.functor("q"));
    ensure(q.holds(), || format!("q rejected: {:?}", q.witness))?;
    let cc = is_essential_equivalence(&c.functor("c"));
    ensure(!cc.holds() && cc.essentially_surjective && !cc.fully_faithful, || {
        "c should fail full faithfulness only".into()
    })?;
    ensure(cc.hom_mismatch == Some(("-1".into(), "-1".into(), 1, 2)), || format!("witness {:?}", cc.hom_mismatch))?;
    Ok("q essential; c fails with |hom(-1,-1)| = 1 ≠ 2".into())
}

// ---------------------------------------------------------------- criterion 3

fn criterion3() -> Check {
    let c = corpus();
    let depths: Vec<TriBool> = (1..=8)
        .map(|d| {
            is_essential_1homotopy_equivalence(&c.functor("c"), &TruncationConfig::with_depth(d)).map(|w| w.verdict)
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(depths[7].is_yes(), || format!("W(c) at depth 8: {}", depths[7]))?;
    let first = depths.iter().position(|v| v.is_yes()).map_or(0, |i| i + 1);
    let cfg = TruncationConfig::with_depth(8);
    let ex = reflection_inverse_example(&c, &cfg).map_err(|e| e.to_string())?;
    let v = check_1homotopy(&ex.composite, &ex.identity, &ex.witness, &cfg).map_err(|e| e.to_string())?;
    ensure(v.is_yes(), || format!("composite vs identity: {v}"))?;
    Ok(format!(
        "W(c) = yes from depth {first}; (id,c)∘(c,id) ≅ id(PT2) certified through a {}-object pullback",
        ex.pullback.groupoid.object_count()
    ))
}

// ---------------------------------------------------------------- criterion 4

fn criterion4() -> Check {
    let c = corpus();
    let cfg = TruncationConfig::with_depth(8);
    let mut seen = Vec::new();
    for (name, base, want) in
        [("PT2", "star", vec![2u128]), ("REFL", "0", vec![2]), ("UC3", "v0", vec![0]), ("ROT", "r0", vec![0])]
    {
        let g = c.groupoid(name);
        let x = g.object(base).map_err(|e| e.to_string())?;
        let h = abelianized_isotropy(&g, x).map_err(|e| e.to_string())?;
        let (_, p) = pi1_from_nerve(&g, x).map_err(|e| e.to_string())?;
        ensure(h.invariant_factors() == want, || format!("{name} homotopy: {h}"))?;
        ensure(p.abelian.invariant_factors() == want, || format!("{name} nerve: {}", p.abelian))?;
        let cmp = compare_pi1(&g, x, &cfg.word).map_err(|e| e.to_string())?;
        ensure(cmp.verdict.is_yes(), || format!("{name} compare_pi1: {}", cmp.verdict))?;
        seen.push(format!("{name}→{h}"));
    }
    Ok(format!("{} on both pipelines, compare_pi1 yes", seen.join(", ")))
}

// ---------------------------------------------------------------- criterion 5

fn criterion5() -> Check {
    let c = corpus();
    let mut pairs = 0;
    for f in ["q", "c"] {
        let f = c.functor(f);
        for x in 0..f.source.object_count() {
            let y = f.f0.vertex_image(x);
            let a = abelianized_isotropy(&f.source, x).map_err(|e| e.to_string())?;
            let b = abelianized_isotropy(&f.target, y).map_err(|e| e.to_string())?;
            let an = pi1_from_nerve(&f.source, x).map_err(|e| e.to_string())?.1.abelian;
            let bn = pi1_from_nerve(&f.target, y).map_err(|e| e.to_string())?.1.abelian;
            ensure(a == b && an == bn && a == an, || {
                format!("{} at {}: {a} / {b} / {an} / {bn}", f.name, f.source.object_name(x))
            })?;
            pairs += 1;
        }
    }
    Ok(format!("abelianized π1 preserved at all {pairs} objects of q and c"))
}

// ---------------------------------------------------------------- criterion 6

fn criterion6() -> Check {
    let lib = library();
    let mut bundles: Vec<Bibundle> = lib.bibundles.values().cloned().collect();
    for f in lib.functors.values() {
        let b = strict_bibundle(f).map_err(|e| e.to_string())?;
        ensure(has_section(&b), || format!("strict bibundle of {} has no section", f.name))?;
        bundles.push(b);
    }
    for b in &bundles {
        let back = gamma_inv(&gamma(b).map_err(|e| format!("{}: {e}", b.name))?).map_err(|e| e.to_string())?;
        ensure(search_bibundle_iso(&back, b).is_some(), || format!("Γ⁻¹Γ({}) not isomorphic", b.name))?;
    }
    let mut spans: Vec<GeneralizedMap> = builtin_examples()
        .spans
        .iter()
        .filter(|(_, d)| !matches!(d, SpanDef::Legs { class: SpanClass::W, .. }))
        .map(|(n, _)| lib.spans[n].clone())
        .collect();
    spans.extend(lib.functors.values().map(GeneralizedMap::strict));
    for s in &spans {
        let back = gamma(&gamma_inv(s).map_err(|e| format!("{}: {e}", s.name))?).map_err(|e| e.to_string())?;
        let w = search_span_iso(&back, s).map_err(|e| e.to_string())?;
        let ok = match &w {
            Some(w) => check_span_iso(&back, s, w).map_err(|e| e.to_string())?,
            None => false,
        };
        ensure(ok, || format!("ΓΓ⁻¹({}) not isomorphic", s.name))?;
    }
    let inv = &lib.bibundles["inv-double-cover"];
    ensure(!has_section(inv), || "inverse double cover has a section".into())?;
    Ok(format!(
        "{} bibundles and {} spans round-trip; strict bibundles have sections; inverse double cover has none",
        bundles.len(),
        spans.len()
    ))
}

// ---------------------------------------------------------------- criterion 7

fn span_iso(f: &GeneralizedMap, g: &GeneralizedMap) -> Result<bool, String> {
    match search_span_iso(f, g).map_err(|e| e.to_string())? {
        Some(w) => check_span_iso(f, g, &w).map_err(|e| e.to_string()),
        None => Ok(false),
    }
}

fn criterion7() -> Check {
    let lib = library();
    let c = corpus();
    let s = |n: &str| lib.spans[n].clone();
    let strict = |n: &str| GeneralizedMap::strict(&c.functor(n));
    let triples = [
        (strict("q"), strict("collapse"), identity_span(&c.groupoid("ONE"))),
        (s("morita-q"), strict("q"), strict("collapse")),
        (strict("i"), strict("c"), strict("bang")),
    ];
    let comp = |f: &GeneralizedMap, g: &GeneralizedMap| compose_spans(f, g).map_err(|e| e.to_string());
    for (f, g, h) in &triples {
        for x in [f, g, h] {
            let left = comp(&identity_span(x.domain()), x)?;
            let right = comp(x, &identity_span(x.codomain()))?;
            ensure(span_iso(&left, x)? && span_iso(&right, x)?, || format!("unit law fails for {}", x.name))?;
        }
        let a = comp(&comp(f, g)?, h)?;
        let b = comp(f, &comp(g, h)?)?;
        ensure(span_iso(&a, &b)?, || format!("associativity fails for ({}, {}, {})", f.name, g.name, h.name))?;
    }

    let pt2 = c.groupoid("PT2");
    let ends = [c.functor("id_PT2"), lib.functors["trivial_PT2"].clone()];
    let mut cells: Vec<NatTrans> = Vec::new();
    for a in &ends {
        for b in &ends {
            cells.extend(enumerate_nat_trans(a, b));
        }
    }
    let mut instances = 0;
    for a in &cells {
        for a2 in cells.iter().filter(|x| a.to.agrees_with(&x.from)) {
            for b in &cells {
                for b2 in cells.iter().filter(|x| b.to.agrees_with(&x.from)) {
                    let lhs = nat_horizontal(
                        &nat_vertical(a, a2).map_err(|e| e.to_string())?,
                        &nat_vertical(b, b2).map_err(|e| e.to_string())?,
                    )
                    .map_err(|e| e.to_string())?;
                    let rhs = nat_vertical(
                        &nat_horizontal(a, b).map_err(|e| e.to_string())?,
                        &nat_horizontal(a2, b2).map_err(|e| e.to_string())?,
                    )
                    .map_err(|e| e.to_string())?;
                    ensure(lhs.agrees_with(&rhs), || "interchange law fails".into())?;
                    instances += 1;
                }
            }
        }
    }
    ensure(pt2.arrow_count() == 2 && instances > 0, || "no interchange instances".into())?;
    Ok(format!(
        "unit and associativity on {} triples; interchange on {instances} instances over {} 2-cells",
        triples.len(),
        cells.len()
    ))
}

// ---------------------------------------------------------------- criterion 8

fn criterion8() -> Check {
    let c = corpus();
    let cfg = TruncationConfig::with_depth(8);
    let roster = builtin_roster(&c).map_err(|e| e.to_string())?;
    let r = bf_axiom_suite(&roster, &cfg).map_err(|e| e.to_string())?;
    let all = [r.bf1, r.bf2, r.bf3, r.bf4, r.bf5];
    ensure(all.iter().all(|v| v.is_yes()), || format!("{all:?} {:?}", r.notes))?;
    let mut bad = roster.clone();
    let refl = c.groupoid("REFL");
    bad.bf4[0].g.a[0] = Word::empty(refl.object("0").map_err(|e| e.to_string())?);
    let r2 = bf_axiom_suite(&bad, &cfg).map_err(|e| e.to_string())?;
    ensure(r2.bf4.is_no(), || format!("corrupted BF4 gave {}", r2.bf4))?;
    Ok("BF1–BF5 yes at depth 8; corrupted BF4 witness rejected".into())
}

// ---------------------------------------------------------------- criterion 9

fn tri<E>(r: Result<TriBool, E>) -> TriBool {
    r.unwrap_or(TriBool::Unknown)
}

/// Every verdict-valued query over the corpus at one budget.
fn corpus_queries(lib: &Library, cfg: &TruncationConfig) -> Vec<(String, TriBool)> {
    let mut out = Vec::new();
    for (name, f) in &lib.functors {
        out.push((format!("W({name})"), tri(is_essential_1homotopy_equivalence(f, cfg).map(|w| w.verdict))));
    }
    for (name, w) in &lib.witnesses {
        out.push((format!("homotopy({name})"), tri(check_homotopy_witness(w, &cfg.word))));
    }
    for (name, g) in &lib.groupoids {
        for x in 0..g.object_count() {
            out.push((format!("compare_pi1({name},{x})"), tri(compare_pi1(g, x, &cfg.word).map(|c| c.verdict))));
        }
    }
    let c = corpus();
    if let Ok(roster) = builtin_roster(&c) {
        for (eps, phi) in &roster.pullbacks {
            let v = weak_homotopy_pullback(eps, phi, cfg).and_then(|p| {
                let sq = check_homotopy_witness(&p.square, &cfg.word)?;
                Ok::<_, FractionsError>(sq.and(is_essential_1homotopy_equivalence(&p.p3, cfg)?.verdict))
            });
            out.push((format!("whp({},{})", eps.name, phi.name), tri(v)));
        }
        let r = bf_axiom_suite(&roster, cfg).map(|r| TriBool::all([r.bf1, r.bf2, r.bf3, r.bf4, r.bf5]));
        out.push(("bf-suite".into(), tri(r)));
    }
    let inverse = reflection_inverse_example(&c, cfg)
        .and_then(|ex| check_1homotopy(&ex.composite, &ex.identity, &ex.witness, cfg));
    out.push(("inverse-example".into(), tri(inverse)));
    let pt2 = c.groupoid("PT2");
    let tau = Word::arrow(&pt2, pt2.arrow("tau").expect("tau"));
    let twice = HomotopyWitness {
        from: c.functor("id_PT2"),
        to: c.functor("id_PT2"),
        a: vec![tau.concat(&tau, &pt2).expect("loop")],
    };
    out.push(("homotopy(tau.tau)".into(), tri(check_homotopy_witness(&twice, &cfg.word))));
    out
}

fn criterion9() -> Check {
    let lib = library();
    let runs: Vec<Vec<(String, TriBool)>> =
        (1..=8).map(|d| corpus_queries(&lib, &TruncationConfig::with_depth(d))).collect();
    let n = runs[0].len();
    for (i, a) in runs.iter().enumerate() {
        for b in &runs[i + 1..] {
            for k in 0..n {
                let (va, vb) = (a[k].1, b[k].1);
                ensure(!(va.is_yes() && vb.is_no() || va.is_no() && vb.is_yes()), || {
                    format!("{} flips {va}→{vb}", a[k].0)
                })?;
            }
        }
    }
    let unknown: Vec<usize> = runs.iter().map(|r| r.iter().filter(|(_, v)| *v == TriBool::Unknown).count()).collect();
    let at8: Vec<&String> = runs[7].iter().filter(|(_, v)| *v == TriBool::Unknown).map(|(q, _)| q).collect();
    ensure(at8.is_empty(), || format!("unknown at depth 8: {at8:?}"))?;
    Ok(format!("{n} queries × depths 1..8, no yes↔no flips; unknown counts by depth {unknown:?}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("axiom suites and mutations", Duration::from_secs(5), criterion1),
        ("essential equivalence", Duration::from_secs(1), criterion2),
        ("reflection example in W", Duration::from_secs(30), criterion3),
        ("abelianized π1, two pipelines", Duration::from_secs(10), criterion4),
        ("π1 invariance under q and c", Duration::from_secs(10), criterion5),
        ("Γ dictionary and sections", Duration::from_secs(20), criterion6),
        ("bicategory laws", Duration::from_secs(10), criterion7),
        ("BF suite", Duration::from_secs(60), criterion8),
        ("soundness regression", Duration::from_secs(120), criterion9),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("over budget {budget:?}: {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {} [{status}] {name} ({:.2}s, budget {}s): {detail}",
            i + 1,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
