use bellforge::agent::{AgentMemory, MemorySnapshot, Percept, PsParameters};
use bellforge::fock::{Element, Setup};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn percept(n: usize) -> Percept {
    let mut elements = vec![Element::two_mode_squeezer(0, 1).unwrap()];
    elements.extend(Element::all_tagged_displacements().into_iter().take(n));
    Percept::of(&Setup::canonical(elements).unwrap())
}

#[test]
fn equal_structures_give_equal_percepts() {
    let a = Setup::canonical(vec![Element::beam_splitter(0, 1).unwrap()]).unwrap();
    let b = Setup::canonical(vec![Element::beam_splitter(0, 1).unwrap()]).unwrap();
    let c = Setup::canonical(vec![Element::beam_splitter(1, 2).unwrap()]).unwrap();
    assert_eq!(Percept::of(&a), Percept::of(&b));
    assert_ne!(Percept::of(&a), Percept::of(&c));
}

#[test]
fn fresh_policy_is_uniform() {
    let m = AgentMemory::default();
    let actions: Vec<usize> = (0..20).collect();
    for p in m.policy(&percept(0), &actions).unwrap() {
        assert!((p - 0.05).abs() < 1e-15);
    }
}

#[test]
fn softmax_of_two_actions() {
    let mut m = AgentMemory::default();
    let s = percept(1);
    m.set_h(&s, 0, 2.0);
    let p = m.policy(&s, &[0, 1]).unwrap();
    let e = std::f64::consts::E;
    assert!((p[0] - e / (1.0 + e)).abs() < 1e-15);
    assert!((p[0] - 0.731).abs() < 1e-3);
}

#[test]
fn degenerate_policy_always_picks_dominant_action() {
    let mut m = AgentMemory::default();
    let s = percept(2);
    m.set_h(&s, 4, 1000.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        assert_eq!(m.sample_action(&s, &[1, 4, 7], &mut rng).unwrap(), 4);
    }
}

#[test]
fn uniform_sampling_frequencies() {
    let m = AgentMemory::default();
    let s = percept(0);
    let actions: Vec<usize> = (0..20).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws = 100_000;
    let mut counts = [0usize; 20];
    for _ in 0..draws {
        counts[m.sample_action(&s, &actions, &mut rng).unwrap()] += 1;
    }
    let p = 1.0 / 20.0;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - draws as f64 * p).abs() <= 3.0 * sigma, "count {c}");
    }
}

#[test]
fn identical_seeds_draw_identically() {
    let mut m = AgentMemory::default();
    let s = percept(0);
    m.set_h(&s, 2, 1.5);
    let actions: Vec<usize> = (0..6).collect();
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..200).map(|_| m.sample_action(&s, &actions, &mut rng).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(draw(5), draw(5));
}

#[test]
fn snapshot_roundtrip() {
    let mut m = AgentMemory::new(PsParameters { gamma: 0.01, eta: 0.2 }).unwrap();
    m.step_update((&percept(0), 1), 1).unwrap();
    m.step_update((&percept(1), 5), 0).unwrap();
    let labels: Vec<String> = (0..6).map(|i| format!("A{i}")).collect();
    let json = serde_json::to_string(&m.snapshot(&labels)).unwrap();
    let back: MemorySnapshot = serde_json::from_str(&json).unwrap();
    assert_eq!(back.actions, labels);
    assert_eq!(AgentMemory::from_snapshot(&back).unwrap(), m);

    let mut bad = back.clone();
    bad.version = 99;
    assert!(AgentMemory::from_snapshot(&bad).is_err());
}

fn arb_steps() -> impl Strategy<Value = Vec<(usize, usize, u8)>> {
    prop::collection::vec((0usize..4, 0usize..5, 0u8..=1), 1..60)
}

proptest! {
    #[test]
    fn glow_bounded_and_latest_pair_glows(steps in arb_steps()) {
        let mut m = AgentMemory::default();
        for &(s, a, r) in &steps {
            m.step_update((&percept(s), a), r).unwrap();
            prop_assert_eq!(m.glow(&percept(s), a), 1.0);
            for s2 in 0..4 {
                for a2 in 0..5 {
                    let g = m.glow(&percept(s2), a2);
                    prop_assert!((0.0..=1.0).contains(&g));
                }
            }
        }
    }

    #[test]
    fn policy_stays_normalized(steps in arb_steps()) {
        let mut m = AgentMemory::default();
        let actions: Vec<usize> = (0..5).collect();
        for &(s, a, r) in &steps {
            m.step_update((&percept(s), a), r).unwrap();
            let p = m.policy(&percept(s), &actions).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn policy_is_shift_invariant(hs in prop::collection::vec(-5.0f64..5.0, 1..20), c in -50.0f64..50.0) {
        let s = percept(0);
        let mut m1 = AgentMemory::default();
        let mut m2 = AgentMemory::default();
        for (a, &h) in hs.iter().enumerate() {
            m1.set_h(&s, a, h);
            m2.set_h(&s, a, h + c);
        }
        let actions: Vec<usize> = (0..hs.len()).collect();
        let p1 = m1.policy(&s, &actions).unwrap();
        let p2 = m2.policy(&s, &actions).unwrap();
        for (x, y) in p1.iter().zip(&p2) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn damping_contracts_toward_one(h0 in -10.0f64..10.0, n in 1usize..50) {
        let mut m = AgentMemory::default();
        let s = percept(3);
        m.set_h(&s, 0, h0);
        let mut prev = (h0 - 1.0).abs();
        for _ in 0..n {
            m.step_update((&percept(0), 9), 0).unwrap();
            let dev = (m.h(&s, 0) - 1.0).abs();
            prop_assert!((dev - prev * (1.0 - 1e-3)).abs() <= 1e-12 * prev.max(1.0));
            prop_assert!(dev <= prev);
            prev = dev;
        }
    }
}
