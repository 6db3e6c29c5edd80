//! Quadratic generators from the second-order expansion around a branch.
//!
//! Fluctuation operators are ordered (a, b₁, b₂). The Hamiltonian part is
//! a†·h·a + a·k·a + h.c. of the second term, and the loss channel L = √κ a
//! enters through m = κ l⊗l with l = (1, 0, 0).

use num_complex::Complex64 as C64;

use super::branch::{mean_field_flow, MeanFieldBranch};
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLiouvillian {
    pub h: ComplexMatrix,
    pub k: ComplexMatrix,
    pub m: ComplexMatrix,
    /// Residual linear drift of (a, b₁, b₂, a†, b₁†, b₂†) per √N.
    pub g: [C64; 6],
    pub branch: MeanFieldBranch,
}

/// Relative bound on the linear residual of a shifted generator.
pub const LINEAR_TERM_TOL: f64 = 1e-8;

const SIGN: [f64; 2] = [1.0, -1.0];

fn coupling_scale(p: &ModelParams) -> f64 {
    [p.omega.abs(), p.omega0, p.lambda_d.abs(), p.lambda_s.abs(), p.kappa, 1.0].into_iter().fold(0.0, f64::max)
}

fn loss_matrix(p: &ModelParams) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3, 3);
    m[(0, 0)] = C64::new(p.kappa, 0.0);
    m
}

/// Mean-field energy per atom in the scaled variables A = ⟨a⟩/√N and
/// B_i = ⟨b_i⟩/√N, with the square roots of the spin mapping kept exact.
pub fn classical_energy(p: &ModelParams, a: C64, b: [C64; 2]) -> f64 {
    let mut e = p.omega * a.norm_sqr() + p.omega0 * (b[0].norm_sqr() + b[1].norm_sqr());
    for (i, bi) in b.iter().enumerate() {
        let x = 2.0 * bi.re * (1.0 - bi.norm_sqr()).sqrt();
        e += coupling_field(p, a, SIGN[i]) * x;
    }
    e
}

/// G_i = λ_D (A + A*) + s_i iλ_S (A − A*), real for every A.
fn coupling_field(p: &ModelParams, a: C64, s: f64) -> f64 {
    2.0 * p.lambda_d * a.re - 2.0 * s * p.lambda_s * a.im
}

/// Analytic Wirtinger Hessian (h, k) of `classical_energy` at (A, B).
pub fn quadratic_coefficients(p: &ModelParams, a: C64, b: [C64; 2]) -> (ComplexMatrix, ComplexMatrix) {
    let i = C64::new(0.0, 1.0);
    let mut h = ComplexMatrix::zeros(3, 3);
    let mut k = ComplexMatrix::zeros(3, 3);
    h[(0, 0)] = C64::new(p.omega, 0.0);
    for n in 0..2 {
        let s = SIGN[n];
        let bb = b[n];
        let bc = bb.conj();
        let r = (1.0 - bb.norm_sqr()).sqrt();
        let re2 = 2.0 * bb.re;
        // derivatives of X(B) = (B + B*) √(1 − |B|²)
        let dx = r - re2 * bc / (2.0 * r);
        let dxx = -bc / r - re2 * bc * bc / (4.0 * r.powi(3));
        let dxcx = -re2 / r - re2 * bb.norm_sqr() / (4.0 * r.powi(3));
        let g = coupling_field(p, a, s);
        let j = n + 1;
        h[(0, j)] = (p.lambda_d - s * i * p.lambda_s) * dx;
        h[(j, 0)] = h[(0, j)].conj();
        h[(j, j)] = C64::new(p.omega0 + g * dxcx, 0.0);
        k[(0, j)] = 0.5 * (p.lambda_d + s * i * p.lambda_s) * dx;
        k[(j, 0)] = k[(0, j)];
        k[(j, j)] = 0.5 * g * dxx;
    }
    (h, k)
}

pub fn build_normal_liouvillian(p: &ModelParams) -> QuadraticLiouvillian {
    let zero = C64::new(0.0, 0.0);
    let (h, k) = quadratic_coefficients(p, zero, [zero; 2]);
    QuadraticLiouvillian { h, k, m: loss_matrix(p), g: [zero; 6], branch: MeanFieldBranch::normal() }
}

/// Generator around a shifted branch. Fails when the branch leaves a
/// linear residual, i.e. is not a stationary point of the mean-field flow.
pub fn build_superradiant_liouvillian(p: &ModelParams, b: &MeanFieldBranch) -> Result<QuadraticLiouvillian> {
    if b.betas().iter().any(|x| x.norm_sqr() >= 2.0) {
        return Err(Error::InvalidParams("branch outside |β|² < 2".into()));
    }
    let f = mean_field_flow(p, b.alpha, b.beta1, b.beta2);
    let s = -std::f64::consts::FRAC_1_SQRT_2;
    let lin = [f[0], s * f[1], s * f[2]];
    let g = [lin[0], lin[1], lin[2], lin[0].conj(), lin[1].conj(), lin[2].conj()];
    let norm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > LINEAR_TERM_TOL * coupling_scale(p) {
        return Err(Error::NonvanishingLinearTerm { norm });
    }
    let bs = [s * b.beta1, s * b.beta2];
    let (h, k) = quadratic_coefficients(p, b.alpha, bs);
    Ok(QuadraticLiouvillian { h, k, m: loss_matrix(p), g, branch: *b })
}

/// Builds the generator for any branch kind.
pub fn build_liouvillian(p: &ModelParams, b: &MeanFieldBranch) -> Result<QuadraticLiouvillian> {
    match b.kind {
        super::BranchKind::Normal => Ok(build_normal_liouvillian(p)),
        super::BranchKind::Superradiant => build_superradiant_liouvillian(p, b),
    }
}

/// Keeps branches with |β_i|² ∈ [0, 2], a Hermitian quadratic form and
/// spin vectors on the Bloch sphere, and marks them physical.
pub fn filter_physical_branches(p: &ModelParams, branches: &[MeanFieldBranch]) -> Vec<MeanFieldBranch> {
    branches
        .iter()
        .filter(|b| {
            let finite = [b.alpha, b.beta1, b.beta2].iter().all(|z| z.re.is_finite() && z.im.is_finite());
            if !finite || b.betas().iter().any(|x| !(0.0..2.0).contains(&x.norm_sqr())) {
                return false;
            }
            let on_sphere = b.spin_vectors().iter().all(|v| (v.iter().map(|c| c * c).sum::<f64>().sqrt() - 0.5).abs() <= 1e-9);
            let s = -std::f64::consts::FRAC_1_SQRT_2;
            let (h, _) = quadratic_coefficients(p, b.alpha, [s * b.beta1, s * b.beta2]);
            on_sphere && h.is_finite() && h.is_hermitian(1e-12 * coupling_scale(p))
        })
        .map(|b| MeanFieldBranch { physical: true, ..*b })
        .collect()
}
