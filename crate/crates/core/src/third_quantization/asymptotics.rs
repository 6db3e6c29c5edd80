use num_complex::Complex64 as C64;

use super::SpectralData;
use crate::linalg::PolyCoeffs;
use crate::model::ModelParams;

/// Sextic in χ for the normal-phase rapidities in its published form,
/// coefficients in ascending degree.
///
/// This form is not the characteristic polynomial of X for the generator
/// built here: it coincides with det(χ − X) only after doubling the pairing
/// matrix K (see tests). Kept verbatim for comparison.
pub fn normal_rapidity_polynomial(p: &ModelParams) -> PolyCoeffs {
    let (w, w0, k, ld, ls) = (p.omega, p.omega0, p.kappa, p.lambda_d, p.lambda_s);
    let (ld2, ls2) = (ld * ld, ls * ls);
    let v2 = ld2 + ls2;
    let w02 = w0 * w0;
    PolyCoeffs::from_real(&[
        w02 * (-20.0 * w * w0 * v2 + 4.0 * (9.0 * ld2 + ls2) * (ld2 + 9.0 * ls2) + w02 * (k * k + w * w)),
        24.0 * k * w02 * v2 - 4.0 * k * w02 * w02,
        4.0 * (2.0 * w02 * (-6.0 * v2 + k * k + w * w) - 20.0 * w * w0 * v2 + 36.0 * v2 * v2 + w02 * w02),
        96.0 * k * v2 - 32.0 * k * w02,
        16.0 * (-12.0 * v2 + k * k + w * w + 2.0 * w02),
        -64.0 * k,
        64.0,
    ])
}

/// Below this κ/ω₀ the large-κ expansion is flagged as unreliable.
pub const LARGE_KAPPA_MIN_RATIO: f64 = 10.0;

/// i n₁ω₀ + 2 n₂ Γ²/κ with Γ² = λ_D² + λ_S².
pub fn large_kappa_eigenvalue(p: &ModelParams, n1: i64, n2: i64) -> C64 {
    large_kappa_eigenvalue_with(p, p.v() * p.v(), n1, n2)
}

/// i n₁ω₀ + 2 n₂ Γ²/κ for a given Γ².
pub fn large_kappa_eigenvalue_with(p: &ModelParams, gamma_sq: f64, n1: i64, n2: i64) -> C64 {
    if p.kappa < LARGE_KAPPA_MIN_RATIO * p.omega0 {
        log::warn!("large-kappa expansion used at kappa/omega0 = {:.3}", p.kappa / p.omega0);
    }
    if n2 == 0 {
        return C64::new(0.0, n1 as f64 * p.omega0);
    }
    C64::new(2.0 * n2 as f64 * gamma_sq / p.kappa, n1 as f64 * p.omega0)
}

/// Γ² = κ · min |Re χ| over the rapidities with nonzero real part, so that
/// the slow lattice step −2χ has real part of magnitude 2Γ²/κ.
pub fn gamma_squared(sd: &SpectralData, kappa: f64) -> Option<f64> {
    let scale = sd.rapidities.iter().map(|c| c.norm()).fold(0.0, f64::max);
    sd.rapidities
        .iter()
        .map(|c| c.re.abs())
        .filter(|&r| r > 1e-12 * scale.max(1.0))
        .min_by(f64::total_cmp)
        .map(|r| kappa * r)
}
