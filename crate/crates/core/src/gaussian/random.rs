use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{BogolyubovTransform, LinearOpticsUnitary};
use crate::C64;

fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) / 2f64.sqrt()
    })
}

/// Haar-distributed unitary.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LinearOpticsUnitary {
    let (q, r) = ginibre(n, rng).qr().unpack();
    let phases = DVector::from_iterator(
        n,
        r.diagonal().iter().map(|z| if z.norm() > 0.0 { z / z.norm() } else { C64::from(1.0) }),
    );
    let u = q * DMatrix::from_diagonal(&phases);
    LinearOpticsUnitary::new(u).expect("QR factor is unitary")
}

/// Random transform `D V SMS U` with squeezing amplitudes drawn from
/// `[0, max_g)` and displacements with parts in `[-1, 1)`. Returns the
/// transform and the squeezing amplitudes used.
pub fn random_bogolyubov<R: Rng + ?Sized>(n: usize, max_g: f64, rng: &mut R) -> (BogolyubovTransform, Vec<f64>) {
    let u = random_unitary(n, rng).into_matrix();
    let v = random_unitary(n, rng).into_matrix();
    let g: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..max_g)).collect();
    let alpha = DVector::from_fn(n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let t = BogolyubovTransform::linear(u)
        .then(&BogolyubovTransform::squeezers(&g))
        .and_then(|t| t.then(&BogolyubovTransform::linear(v)))
        .and_then(|t| t.then(&BogolyubovTransform::displacement(alpha)))
        .expect("factors share the mode count");
    (t, g)
}
