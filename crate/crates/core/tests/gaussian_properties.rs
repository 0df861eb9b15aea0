use std::f64::consts::PI;

use bellforge::fock::{Element, ElementKind, FockSimulator, ModeSystem, PureState, Setup};
use bellforge::gaussian::{
    canonical_decompose, chsh_count, commute_displacement, commute_displacement_squeezing, compose_bogolyubov_plan,
    compose_plan, parameter_count, random_bogolyubov, random_unitary, reck_decompose, validate_bogolyubov,
    BogolyubovTransform, DecompositionPlan, Layer, LinearOpticsUnitary, Party, PlanEntry,
};
use bellforge::C64;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn wrapped(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    r.min(2.0 * PI - r)
}

#[test]
fn identity_mesh_is_trivial() {
    for n in 1..6 {
        let plan = reck_decompose(&LinearOpticsUnitary::identity(n));
        assert_eq!(plan.count(ElementKind::BeamSplitter), n * (n - 1) / 2);
        assert!(plan.entries.iter().all(|e| wrapped(e.value) < 1e-15));
    }
}

#[test]
fn real_rotation_is_one_beam_splitter() {
    let theta = 0.4f64;
    let (s, c) = theta.sin_cos();
    let u = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]).map(C64::from);
    let plan = reck_decompose(&LinearOpticsUnitary::new(u).unwrap());
    let bs: Vec<&PlanEntry> = plan.entries.iter().filter(|e| e.kind == ElementKind::BeamSplitter).collect();
    assert_eq!(bs.len(), 1);
    assert!((bs[0].value - theta).abs() < 1e-15);
    assert_eq!(bs[0].modes, vec![0, 1]);
    assert!(plan.entries.iter().filter(|e| e.kind == ElementKind::PhaseShifter).all(|e| wrapped(e.value) < 1e-15));
}

#[test]
fn compose_small_plans() {
    assert_eq!(compose_plan(&DecompositionPlan::empty(3), 3).unwrap(), DMatrix::identity(3, 3));
    let phi = 0.9f64;
    let plan = DecompositionPlan {
        n: 2,
        entries: vec![PlanEntry::new(ElementKind::PhaseShifter, vec![0], phi, Layer::Phases)],
    };
    let u = compose_plan(&plan, 2).unwrap();
    let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::from_polar(1.0, phi), C64::from(1.0)]));
    assert!(max_abs(&(u - expected)) < 1e-15);
    let bad = DecompositionPlan {
        n: 2,
        entries: vec![PlanEntry::new(ElementKind::SingleModeSqueezerRe, vec![0], 0.1, Layer::Squeezing)],
    };
    assert!(compose_plan(&bad, 2).is_err());
}

#[test]
fn mesh_round_trips_and_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..350 {
        let n = 2 + case % 7;
        let u = random_unitary(n, &mut rng);
        let plan = reck_decompose(&u);
        assert_eq!(plan.count(ElementKind::BeamSplitter), n * (n - 1) / 2);
        assert!(plan.count(ElementKind::PhaseShifter) <= n * (n + 1) / 2);
        assert_eq!(plan.entries.len(), n * n);
        let err = max_abs(&(compose_plan(&plan, n).unwrap() - u.matrix()));
        assert!(err <= 1e-9, "n={n}: {err}");
    }
}

#[test]
fn non_unitary_rejected() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]).map(C64::from);
    assert!(LinearOpticsUnitary::new(m).is_err());
}

#[test]
fn canonical_form_of_identity_and_single_squeezer() {
    let c = canonical_decompose(&BogolyubovTransform::identity(3)).unwrap();
    assert_eq!(c.g, vec![0.0; 3]);
    assert!(c.beta.iter().all(|b| b.norm() == 0.0));
    assert!(max_abs(&(c.u.matrix() - DMatrix::<C64>::identity(3, 3))) < 1e-15);
    assert!(max_abs(&(c.v.matrix() - DMatrix::<C64>::identity(3, 3))) < 1e-15);

    let r = 0.7;
    let c = canonical_decompose(&BogolyubovTransform::squeezers(&[r])).unwrap();
    assert!((c.g[0] - r).abs() < 1e-12);
    assert_eq!(c.beta[0], C64::from(0.0));
    assert!((c.u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn canonical_form_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..250 {
        let n = 1 + case % 6;
        let (t, mut g) = random_bogolyubov(n, 1.0, &mut rng);
        assert!(validate_bogolyubov(&t).pass);
        let c = canonical_decompose(&t).unwrap();
        let err = c.transform().distance(&t);
        assert!(err <= 1e-8, "case {case}: {err}");
        g.sort_by(|a, b| b.total_cmp(a));
        for (x, y) in c.g.iter().zip(&g) {
            assert!((x - y).abs() <= 1e-8, "case {case}: {:?} vs {g:?}", c.g);
        }
        assert!(c.g.windows(2).all(|w| w[0] >= w[1]));
        let via_plan = compose_bogolyubov_plan(&c.to_plan(), n).unwrap();
        assert!(via_plan.distance(&t) <= 1e-8, "case {case}");
    }
}

#[test]
fn partially_squeezed_transforms_decompose() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..6 {
        let g: Vec<f64> = (0..n).map(|m| if m % 2 == 0 { 0.5 } else { 0.0 }).collect();
        let t = BogolyubovTransform::linear(random_unitary(n, &mut rng).into_matrix())
            .then(&BogolyubovTransform::squeezers(&g))
            .unwrap()
            .then(&BogolyubovTransform::linear(random_unitary(n, &mut rng).into_matrix()))
            .unwrap();
        let c = canonical_decompose(&t).unwrap();
        assert!(c.transform().distance(&t) <= 1e-8);
    }
}

#[test]
fn invalid_transform_rejected() {
    let t = BogolyubovTransform::new(DMatrix::identity(2, 2), DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
    assert!(canonical_decompose(&t).is_err());
}

#[test]
fn composition_preserves_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..7 {
        let (a, _) = random_bogolyubov(n, 1.0, &mut rng);
        let (b, _) = random_bogolyubov(n, 1.0, &mut rng);
        let r = validate_bogolyubov(&a.then(&b).unwrap());
        assert!(r.residual_i <= 1e-7 && r.residual_ii <= 1e-7);
    }
}

#[test]
fn parameter_counts() {
    assert_eq!(chsh_count(3, 1, 1).unwrap(), 23);
    assert_eq!(chsh_count(2, 1, 1).unwrap(), 16);
    for n in 1..=6 {
        assert_eq!(parameter_count(n, &[Party { settings: 1, modes: n }]).unwrap(), n * n + 2 * n);
        for ka in 0..=n {
            for kb in 0..=n - ka {
                let parties = [Party { settings: 2, modes: ka }, Party { settings: 2, modes: kb }];
                assert_eq!(chsh_count(n, ka, kb).unwrap(), parameter_count(n, &parties).unwrap());
            }
        }
    }
}

#[test]
fn displacement_commutation_formulas() {
    let alpha = DVector::from_vec(vec![C64::new(0.3, -0.2), C64::new(-0.1, 0.4)]);
    assert_eq!(commute_displacement(&LinearOpticsUnitary::identity(2), &alpha).unwrap(), alpha);
    let phi = 0.8;
    let ps = LinearOpticsUnitary::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
        C64::from_polar(1.0, phi),
        C64::from(1.0),
    ])))
    .unwrap();
    let beta = commute_displacement(&ps, &alpha).unwrap();
    assert!((beta[0] - alpha[0] * C64::from_polar(1.0, phi)).norm() < 1e-15);
    assert!(commute_displacement(&ps, &DVector::zeros(3)).is_err());

    // Mode-space check against the composed transforms.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = random_unitary(2, &mut rng);
    let lhs = BogolyubovTransform::displacement(alpha.clone())
        .then(&BogolyubovTransform::linear(u.matrix().clone()))
        .unwrap();
    let rhs = BogolyubovTransform::linear(u.matrix().clone())
        .then(&BogolyubovTransform::displacement(commute_displacement(&u, &alpha).unwrap()))
        .unwrap();
    assert!(lhs.distance(&rhs) < 1e-14);
    let g = [0.3, -0.6];
    let lhs = BogolyubovTransform::displacement(alpha.clone()).then(&BogolyubovTransform::squeezers(&g)).unwrap();
    let rhs = BogolyubovTransform::squeezers(&g)
        .then(&BogolyubovTransform::displacement(commute_displacement_squeezing(&g, &alpha).unwrap()))
        .unwrap();
    assert!(lhs.distance(&rhs) < 1e-14);
}

fn run(sim: &FockSimulator, elements: Vec<(Element, f64)>) -> PureState {
    let params: Vec<f64> = elements.iter().map(|e| e.1).collect();
    let setup = Setup::canonical(elements.into_iter().map(|e| e.0).collect()).unwrap();
    sim.apply_setup(&setup, &params, (0, 0)).unwrap()
}

fn displace(mode: usize, alpha: C64) -> Vec<(Element, f64)> {
    vec![
        (Element::single_mode(ElementKind::DisplacementRe, mode).unwrap(), alpha.re),
        (Element::single_mode(ElementKind::DisplacementIm, mode).unwrap(), alpha.im),
    ]
}

#[test]
fn displacement_commutation_in_fock_space() {
    let sim = FockSimulator::new(ModeSystem::bipartite(), 20).unwrap();
    let alpha = C64::new(0.3, -0.2);
    let phi = 0.8;

    let mut first = displace(0, alpha);
    first.push((Element::phase_shifter(0), phi));
    let mut second = vec![(Element::phase_shifter(0), phi)];
    second.extend(displace(0, alpha * C64::from_polar(1.0, phi)));
    let f = run(&sim, first).fidelity(&run(&sim, second));
    assert!(f >= 1.0 - 1e-8, "{f}");

    let g = 0.2;
    let beta = commute_displacement_squeezing(&[g], &DVector::from_vec(vec![alpha])).unwrap()[0];
    let sms = || (Element::single_mode(ElementKind::SingleModeSqueezerRe, 0).unwrap(), g);
    let mut first = displace(0, alpha);
    first.push(sms());
    let mut second = vec![sms()];
    second.extend(displace(0, beta));
    let f = run(&sim, first).fidelity(&run(&sim, second));
    assert!(f >= 1.0 - 1e-8, "{f}");
}

#[test]
fn mesh_acts_on_coherent_states_as_its_matrix() {
    let sim = FockSimulator::new(ModeSystem::bipartite(), 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..5 {
        let u = random_unitary(2, &mut rng);
        let alpha = DVector::from_fn(2, |_, _| C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)));
        let (setup, params) = reck_decompose(&u).to_setup().unwrap();
        let mut elements = displace(0, alpha[0]);
        elements.extend(displace(1, alpha[1]));
        elements.extend(setup.elements().iter().cloned().zip(params));
        let out = run(&sim, elements);
        let beta = u.matrix() * &alpha;
        let mut expected = displace(0, beta[0]);
        expected.extend(displace(1, beta[1]));
        let f = out.fidelity(&run(&sim, expected));
        assert!(f >= 1.0 - 1e-6, "{f}");
    }
}

#[test]
fn state_preparation_reproduces_vacuum_image() {
    let sim = FockSimulator::new(ModeSystem::bipartite(), 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let (t, _) = random_bogolyubov(2, 0.3, &mut rng);
        let t = BogolyubovTransform::new(t.f, t.h, t.alpha.map(|z| z * 0.4)).unwrap();
        let c = canonical_decompose(&t).unwrap();
        let full = {
            let (setup, params) = c.to_plan().to_setup().unwrap();
            sim.apply_setup(&setup, &params, (0, 0)).unwrap()
        };
        let prep = c.state_preparation();
        let with_phases = {
            let (setup, params) = prep.to_plan(true).to_setup().unwrap();
            sim.apply_setup(&setup, &params, (0, 0)).unwrap()
        };
        let f = full.fidelity(&with_phases);
        assert!(f >= 1.0 - 1e-8, "{f}");

        let without = {
            let (setup, params) = prep.to_plan(false).to_setup().unwrap();
            sim.apply_setup(&setup, &params, (0, 0)).unwrap()
        };
        for (x, y) in without.amplitudes().iter().zip(with_phases.amplitudes()) {
            assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-12);
        }
        assert!(prep.to_plan(false).entries.iter().all(|e| e.kind != ElementKind::DisplacementIm));
    }
}
