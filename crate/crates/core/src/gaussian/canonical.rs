use nalgebra::{DMatrix, DVector};

use super::{
    reck_decompose, validate_bogolyubov, BogolyubovTransform, DecompositionPlan, GaussianError, Layer,
    LinearOpticsUnitary, PlanEntry, Result,
};
use crate::fock::ElementKind;
use crate::C64;

/// Takagi values below this count as zero squeezing.
const ZERO_SQUEEZING: f64 = 1e-10;

/// `G = D_beta V SMS_g U`: `U` acts first, then real squeezers, then `V`,
/// then the displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub beta: DVector<C64>,
    pub v: LinearOpticsUnitary,
    /// Squeezing amplitudes, non-negative and descending.
    pub g: Vec<f64>,
    pub u: LinearOpticsUnitary,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn transform(&self) -> BogolyubovTransform {
        BogolyubovTransform::linear(self.u.matrix().clone())
            .then(&BogolyubovTransform::squeezers(&self.g))
            .and_then(|t| t.then(&BogolyubovTransform::linear(self.v.matrix().clone())))
            .and_then(|t| t.then(&BogolyubovTransform::displacement(self.beta.clone())))
            .expect("factors share the mode count")
    }

    /// Element plan: mesh for `U`, squeezers, mesh for `V`, and each
    /// displacement as a real displacement between opposite phases.
    pub fn to_plan(&self) -> DecompositionPlan {
        let n = self.n();
        let mut plan = DecompositionPlan::empty(n);
        plan.extend_stage(reck_decompose(&self.u), 0);
        plan.extend_stage(squeezing_plan(&self.g), 1);
        plan.extend_stage(reck_decompose(&self.v), 2);
        let phi: Vec<f64> = self.beta.iter().map(|b| b.arg()).collect();
        let r: Vec<f64> = self.beta.iter().map(|b| b.norm()).collect();
        plan.extend_stage(displacement_plan(&r, Some(&phi)), 3);
        plan
    }

    /// Reduction for states prepared from the vacuum: `U` is dropped, and
    /// the phase in front of each real displacement is merged into `V`.
    pub fn state_preparation(&self) -> StatePreparation {
        let phases = DVector::from_iterator(self.n(), self.beta.iter().map(|b| C64::from_polar(1.0, -b.arg())));
        let v = DMatrix::from_diagonal(&phases) * self.v.matrix();
        StatePreparation {
            g: self.g.clone(),
            v: LinearOpticsUnitary::new(v).expect("phase times unitary is unitary"),
            displacement: self.beta.iter().map(|b| b.norm()).collect(),
            output_phases: self.beta.iter().map(|b| b.arg()).collect(),
        }
    }
}

/// Vacuum preparation `PS(phi) D_Re(r) V SMS_g |0>`. The trailing phases do
/// not change photon-counting statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePreparation {
    pub g: Vec<f64>,
    pub v: LinearOpticsUnitary,
    pub displacement: Vec<f64>,
    pub output_phases: Vec<f64>,
}

impl StatePreparation {
    pub fn to_plan(&self, with_output_phases: bool) -> DecompositionPlan {
        let mut plan = DecompositionPlan::empty(self.g.len());
        plan.extend_stage(squeezing_plan(&self.g), 0);
        plan.extend_stage(reck_decompose(&self.v), 1);
        let mut d = displacement_plan(&self.displacement, None);
        if with_output_phases {
            for (m, &phi) in self.output_phases.iter().enumerate() {
                d.entries.push(PlanEntry::new(ElementKind::PhaseShifter, vec![m], phi, Layer::Displacement));
            }
        }
        plan.extend_stage(d, 2);
        plan
    }
}

fn squeezing_plan(g: &[f64]) -> DecompositionPlan {
    DecompositionPlan {
        n: g.len(),
        entries: g
            .iter()
            .enumerate()
            .map(|(m, &x)| PlanEntry::new(ElementKind::SingleModeSqueezerRe, vec![m], x, Layer::Squeezing))
            .collect(),
    }
}

fn displacement_plan(r: &[f64], phi: Option<&[f64]>) -> DecompositionPlan {
    let mut entries = Vec::new();
    for (m, &x) in r.iter().enumerate() {
        let p = phi.map_or(0.0, |p| p[m]);
        if phi.is_some() {
            entries.push(PlanEntry::new(ElementKind::PhaseShifter, vec![m], -p, Layer::Displacement));
        }
        entries.push(PlanEntry::new(ElementKind::DisplacementRe, vec![m], x, Layer::Displacement));
        if phi.is_some() {
            entries.push(PlanEntry::new(ElementKind::PhaseShifter, vec![m], p, Layer::Displacement));
        }
    }
    DecompositionPlan { n: r.len(), entries }
}

/// Factorizes a valid transform into `D_beta V SMS_g U`.
///
/// `F H^T = V diag(cosh g sinh g) V^T` is a Takagi factorization, obtained
/// from the eigenvectors `(x, y)` of `[[Re A, Im A], [Im A, -Re A]]` with
/// positive eigenvalues as `x + iy`. Then `U = cosh(g)^-1 V^dagger F`.
pub fn canonical_decompose(t: &BogolyubovTransform) -> Result<CanonicalForm> {
    let report = validate_bogolyubov(t);
    if !report.pass {
        return Err(GaussianError::NotBogolyubov(report.residual_i, report.residual_ii));
    }
    let n = t.n();
    let a = &t.f * t.h.transpose();
    let a = (&a + a.transpose()) * C64::from(0.5);
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = a[(r, c)];
            m[(r, c)] = z.re;
            m[(r, c + n)] = z.im;
            m[(r + n, c)] = z.im;
            m[(r + n, c + n)] = -z.re;
        }
    }
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut sigma = Vec::with_capacity(n);
    let mut columns: Vec<DVector<C64>> = Vec::with_capacity(n);
    for &k in order.iter().take(n) {
        let lambda = eig.eigenvalues[k];
        if lambda <= ZERO_SQUEEZING {
            break;
        }
        let col = eig.eigenvectors.column(k);
        columns.push(DVector::from_fn(n, |r, _| C64::new(col[r], col[r + n])));
        sigma.push(lambda);
    }
    // Unsqueezed modes: any orthonormal completion.
    for e in 0..n {
        if columns.len() == n {
            break;
        }
        let mut w = DVector::<C64>::zeros(n);
        w[e] = C64::from(1.0);
        for c in &columns {
            let proj = c.dotc(&w);
            w -= c * proj;
        }
        let norm = w.norm();
        if norm > 0.5 {
            columns.push(w / C64::from(norm));
            sigma.push(0.0);
        }
    }

    let v = DMatrix::from_columns(&columns);
    let g: Vec<f64> = sigma.iter().map(|&s| (0.5 * (-1.0 + (1.0 + 4.0 * s * s).sqrt())).sqrt().asinh()).collect();
    let c_inv = DMatrix::from_diagonal(&DVector::from_iterator(n, g.iter().map(|x| C64::from(1.0 / x.cosh()))));
    let u = c_inv * v.adjoint() * &t.f;
    Ok(CanonicalForm { beta: t.alpha.clone(), v: LinearOpticsUnitary::new(v)?, g, u: LinearOpticsUnitary::new(u)? })
}

/// `beta` with `U D_alpha = D_beta U`.
pub fn commute_displacement(u: &LinearOpticsUnitary, alpha: &DVector<C64>) -> Result<DVector<C64>> {
    if alpha.len() != u.n() {
        return Err(GaussianError::Shape(format!("{} modes, displacement of length {}", u.n(), alpha.len())));
    }
    Ok(u.matrix() * alpha)
}

/// `beta` with `SMS_g D_alpha = D_beta SMS_g`.
pub fn commute_displacement_squeezing(g: &[f64], alpha: &DVector<C64>) -> Result<DVector<C64>> {
    if alpha.len() != g.len() {
        return Err(GaussianError::Shape(format!("{} modes, displacement of length {}", g.len(), alpha.len())));
    }
    Ok(DVector::from_fn(g.len(), |m, _| alpha[m] * g[m].cosh() + alpha[m].conj() * g[m].sinh()))
}
