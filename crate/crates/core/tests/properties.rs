use std::sync::Arc;

use proptest::prelude::*;

use groupoid_calc::builtins::corpus;
use groupoid_calc::graph::Cell;
use groupoid_calc::groupoid::GraphGroupoid;
use groupoid_calc::homotopy::{word_equal, Letter, Word, WordEqConfig};
use groupoid_calc::io::{builtin_examples, parse, print, resolve, Document, GraphDef};
use groupoid_calc::snf::{abelian_group, smith_normal_form};
use groupoid_calc::TriBool;

fn matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|r| (0..cols).map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum()).collect()).collect()
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// gcd of all k×k minors.
fn determinantal_divisor(m: &[Vec<i128>], k: usize) -> i128 {
    let cols = m.first().map_or(0, Vec::len);
    let mut g = 0;
    for rs in subsets(m.len(), k) {
        for cs in subsets(cols, k) {
            let minor: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
            g = gcd(g, det(&minor));
        }
    }
    g
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i128>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i128..=9, c), r))
}

proptest! {
    #[test]
    fn snf_diagonalizes_with_unimodular_factors(m in matrix()) {
        let cols = m[0].len();
        let s = smith_normal_form(&m, cols).unwrap();
        let d = matmul(&matmul(&s.u, &m), &s.v);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let want = if i == j { s.diag.get(i).copied().unwrap_or(0) } else { 0 };
                prop_assert_eq!(x, want, "entry ({}, {})", i, j);
            }
        }
        prop_assert_eq!(det(&s.u).abs(), 1);
        prop_assert_eq!(det(&s.v).abs(), 1);
        for w in s.diag.windows(2) {
            prop_assert!(w[0] > 0 && w[1] % w[0] == 0);
        }
    }

    #[test]
    fn snf_matches_determinantal_divisors(m in matrix()) {
        let cols = m[0].len();
        let s = smith_normal_form(&m, cols).unwrap();
        let mut prefix = 1;
        for k in 1..=m.len().min(cols) {
            let dk = determinantal_divisor(&m, k);
            match s.diag.get(k - 1) {
                Some(&d) => {
                    prefix *= d;
                    prop_assert_eq!(dk, prefix, "k = {}", k);
                }
                None => prop_assert_eq!(dk, 0, "k = {}", k),
            }
        }
        let g = abelian_group(cols, &m).unwrap();
        prop_assert_eq!(g.rank, cols - s.diag.len());
    }

    #[test]
    fn perturbed_cyclic_tables_are_rejected(n in 2usize..=6, h in 0usize..6, g in 0usize..6, shift in 1usize..6) {
        let (h, g) = (h % n, g % n);
        let bad = ((h + g) % n + shift % n) % n;
        prop_assume!(bad != (h + g) % n);
        let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        let arrows: Vec<(&str, &str, &str)> = names.iter().map(|a| (a.as_str(), "o", "o")).collect();
        let table = |x: usize, y: usize| if (x, y) == (h, g) { bad } else { (x + y) % n };
        prop_assert!(GraphGroupoid::edgeless("Zn", &["o"], &arrows, table).is_err());
        prop_assert!(GraphGroupoid::edgeless("Zn", &["o"], &arrows, |x, y| (x + y) % n).is_ok());
    }

    #[test]
    fn graph_documents_round_trip(n in 1usize..6, raw in prop::collection::vec((0usize..6, 0usize..6), 0..8)) {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges = raw
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (format!("e{i}"), vertices[a % n].clone(), vertices[b % n].clone()))
            .collect();
        let mut doc = Document { schema_version: 1, ..Document::default() };
        doc.graphs.insert("X".into(), GraphDef { vertices, edges, faces: vec![] });
        let text = print(&doc);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(print(&back), text);
        prop_assert!(resolve(&back).is_ok());
    }
}

#[test]
fn corpus_document_round_trips() {
    let doc = builtin_examples();
    let text = print(&doc);
    assert_eq!(parse(&text).unwrap(), doc);
}

/// A walk from `start` with one letter per entry of `choices`.
fn walk(g: &GraphGroupoid, start: usize, choices: &[usize]) -> Word {
    let mut w = Word::empty(start);
    let mut x = start;
    for &c in choices {
        let edges = g.g0.oriented_edges_at(x);
        let arrows: Vec<usize> = (0..g.arrow_count()).filter(|&a| g.s.vertex_image(a) == x).collect();
        let k = c % (edges.len() + arrows.len());
        if k < edges.len() {
            let Cell::E(e, fwd) = edges[k] else { unreachable!() };
            w.letters.push(Letter::Edge(e, fwd));
            x = g.g0.head(edges[k]);
        } else {
            let a = arrows[k - edges.len()];
            w.letters.push(Letter::Arrow(a));
            x = g.t.vertex_image(a);
        }
    }
    w
}

fn groupoids() -> Vec<Arc<GraphGroupoid>> {
    let c = corpus();
    ["PT2", "PAIR2", "REFL", "UC3", "ROT"].iter().map(|n| c.groupoid(n)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_equality_is_monotone_in_depth(
        which in 0usize..5,
        start in 0usize..6,
        a in prop::collection::vec(0usize..12, 0..6),
        b in prop::collection::vec(0usize..12, 0..6),
    ) {
        let g = &groupoids()[which];
        let start = start % g.object_count();
        let (wa, wb) = (walk(g, start, &a), walk(g, start, &b));
        let mut seen = TriBool::Unknown;
        for depth in 1..=8 {
            let cfg = WordEqConfig { depth, max_words: 20_000 };
            let v = word_equal(g, &wa, &wb, &cfg).unwrap();
            if seen != TriBool::Unknown {
                prop_assert_eq!(v, seen, "depth {} changed a settled verdict", depth);
            }
            seen = v;
        }
    }

    #[test]
    fn inserted_backtracks_are_never_refuted(
        which in 0usize..5,
        start in 0usize..6,
        a in prop::collection::vec(0usize..12, 0..6),
        detour in prop::collection::vec(0usize..12, 1..4),
    ) {
        let g = &groupoids()[which];
        let start = start % g.object_count();
        let w = walk(g, start, &a);
        let end = w.end(g).unwrap();
        let d = walk(g, end, &detour);
        let padded = w.concat(&d, g).unwrap().concat(&d.inverse(g).unwrap(), g).unwrap();
        let v = word_equal(g, &w, &padded, &WordEqConfig::default()).unwrap();
        prop_assert!(!v.is_no(), "w and w·d·d⁻¹ were separated");
    }
}
