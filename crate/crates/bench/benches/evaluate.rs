use std::hint::black_box;

use bellforge::bell::{ChshEvaluator, DetectorModel, HeraldSpec};
use bellforge::fock::ModeSystem;
use bellforge_bench::{fig2a_setup, fig2d_setup, params};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn evaluate(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    let setup = fig2a_setup();
    let p = params(setup.num_params());
    for d in [4, 11] {
        let mut ev = ChshEvaluator::new(ModeSystem::bipartite(), d, None, DetectorModel::perfect()).unwrap();
        group.bench_with_input(BenchmarkId::new("tms_8d", d), &d, |b, _| {
            b.iter(|| ev.evaluate(black_box(&setup), black_box(&p)).unwrap())
        });
    }
    let setup = fig2d_setup();
    let p = params(setup.num_params());
    for d in [4, 11] {
        let mut ev =
            ChshEvaluator::new(ModeSystem::heralded(), d, Some(HeraldSpec::default()), DetectorModel::perfect())
                .unwrap();
        group.bench_with_input(BenchmarkId::new("heralded", d), &d, |b, _| {
            b.iter(|| ev.evaluate(black_box(&setup), black_box(&p)).unwrap())
        });
    }
    group.finish();
}

fn single_parameter_change(c: &mut Criterion) {
    let setup = fig2d_setup();
    let mut p = params(setup.num_params());
    let mut ev =
        ChshEvaluator::new(ModeSystem::heralded(), 4, Some(HeraldSpec::default()), DetectorModel::new(0.9).unwrap())
            .unwrap();
    let mut k = 0;
    c.bench_function("evaluate/heralded_one_change", |b| {
        b.iter(|| {
            k = (k + 1) % p.len();
            p[k] += 1e-3;
            ev.evaluate(&setup, black_box(&p)).unwrap()
        })
    });
}

criterion_group!(benches, evaluate, single_parameter_change);
criterion_main!(benches);
