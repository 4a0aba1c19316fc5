use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use drsmatch_bench::{corpus_text, pairs};
use drsmatch_core::synth::SynthParams;
use drsmatch_core::{match_forms, optimal_match, parse_corpus, MatchConfig, OracleLimits};

fn restarts(c: &mut Criterion) {
    let work = pairs(20, &SynthParams::sweep(), 1);
    let mut group = c.benchmark_group("match_forms");
    for restarts in [1, 5, 20] {
        let config = MatchConfig::default().with_restarts(restarts);
        group.bench_with_input(BenchmarkId::from_parameter(restarts), &config, |b, config| {
            b.iter(|| {
                for (s, g) in &work {
                    black_box(match_forms(s, g, config));
                }
            })
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let small = pairs(50, &SynthParams::default(), 2);
    let large = pairs(10, &SynthParams::sweep(), 3);
    let limits = OracleLimits::default();
    let mut group = c.benchmark_group("optimal_match");
    for (name, work) in [("small", &small), ("large", &large)] {
        group.bench_function(name, |b| {
            b.iter(|| {
                for (s, g) in work {
                    let _ = black_box(optimal_match(s, g, &limits));
                }
            })
        });
    }
    group.finish();
}

fn parsing(c: &mut Criterion) {
    let text = corpus_text(200, 4);
    c.bench_function("parse_corpus/200", |b| b.iter(|| parse_corpus(black_box(&text)).unwrap()));
}

criterion_group!(benches, restarts, oracle, parsing);
criterion_main!(benches);
