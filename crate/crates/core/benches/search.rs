use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use groupoid_calc::bibundle::{has_section, inverse_bibundle, strict_bibundle};
use groupoid_calc::builtins::corpus;
use groupoid_calc::fractions::{bf_axiom_suite, builtin_roster, TruncationConfig};
use groupoid_calc::io::{builtin_examples, resolve};
use groupoid_calc::par::set_parallel;
use groupoid_calc::span::{compose_spans, search_span_iso, GeneralizedMap};

fn modes(c: &mut Criterion) {
    let corpus = corpus();
    let lib = resolve(&builtin_examples()).unwrap();
    let strict = |n: &str| GeneralizedMap::strict(&corpus.functor(n));
    let (f, g, h) = (lib.spans["morita-q"].clone(), strict("q"), strict("collapse"));
    let a = compose_spans(&compose_spans(&f, &g).unwrap(), &h).unwrap();
    let b = compose_spans(&f, &compose_spans(&g, &h).unwrap()).unwrap();
    let cover = inverse_bibundle(&strict_bibundle(&corpus.functor("q")).unwrap()).unwrap();
    let roster = builtin_roster(&corpus).unwrap();
    let cfg = TruncationConfig::with_depth(8);

    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for parallel in [false, true] {
        let mode = if parallel { "parallel" } else { "sequential" };
        set_parallel(parallel);
        group.bench_with_input(BenchmarkId::new("span_iso", mode), &(), |bch, _| {
            bch.iter(|| search_span_iso(&a, &b).unwrap().is_some())
        });
        group.bench_with_input(BenchmarkId::new("section", mode), &(), |bch, _| bch.iter(|| has_section(&cover)));
        group.bench_with_input(BenchmarkId::new("bf_suite", mode), &(), |bch, _| {
            bch.iter(|| bf_axiom_suite(&roster, &cfg).unwrap())
        });
    }
    set_parallel(true);
    group.finish();
}

criterion_group!(benches, modes);
criterion_main!(benches);
