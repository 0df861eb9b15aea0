use std::hint::black_box;

use bellforge::agent::{AgentMemory, Percept, PsParameters};
use bellforge::anneal::{anneal, AnnealRun, AnnealSchedule, ChshObjective};
use bellforge::bell::{ChshEvaluator, DetectorModel};
use bellforge::fock::ModeSystem;
use bellforge_bench::fig2a_setup;
use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn anneal_fixed_setup(c: &mut Criterion) {
    let setup = fig2a_setup();
    let schedule = AnnealSchedule::default();
    let mut ev = ChshEvaluator::new(ModeSystem::bipartite(), 4, None, DetectorModel::perfect()).unwrap();
    c.bench_function("anneal/tms_8d_trial_20", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        b.iter(|| {
            let mut objective = ChshObjective { evaluator: &mut ev, setup: &setup };
            let run = AnnealRun { trial: 20, threshold: 3.0, schedule: &schedule, start: None };
            anneal(setup.num_params(), &mut objective, run, &mut rng).unwrap()
        })
    });
}

fn agent_step(c: &mut Criterion) {
    let mut memory = AgentMemory::new(PsParameters::default()).unwrap();
    let percepts: Vec<Percept> = (0..50).map(|i| Percept::new(format!("s{i}"))).collect();
    let actions: Vec<usize> = (0..20).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut i = 0;
    c.bench_function("agent/sample_and_update", |b| {
        b.iter(|| {
            let s = &percepts[i % percepts.len()];
            i += 1;
            let a = memory.sample_action(s, &actions, &mut rng).unwrap();
            memory.step_update((s, a), (i % 7 == 0) as u8).unwrap();
            black_box(a)
        })
    });
}

criterion_group!(benches, anneal_fixed_setup, agent_step);
criterion_main!(benches);
