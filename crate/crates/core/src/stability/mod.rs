//! Linear stability of the one- and two-point sectors, closed-system
//! frequencies and phase labels, and (φ, ω) sweeps.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, PolyCoeffs};
use crate::model::{build_liouvillian, filter_physical_branches, solve_shift_equations, BranchKind, MeanFieldBranch, ModelParams};
use crate::moments::drift_and_diffusion;
use crate::third_quantization::{assemble_structure, rapidities};

/// Relative bound on |Re| for a spectrum to count as purely imaginary.
pub const IMAGINARY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedPhase {
    Normal,
    Superradiant,
    Inaccessible,
}

impl ClosedPhase {
    pub fn label(&self) -> &'static str {
        match self {
            ClosedPhase::Normal => "normal",
            ClosedPhase::Superradiant => "superradiant",
            ClosedPhase::Inaccessible => "inaccessible",
        }
    }
}

/// (max Re λ, |Im λ|) over the drift spectrum; among eigenvalues sharing the
/// largest real part the one with the largest |Im| is reported.
pub fn one_point_stability(a_drift: &crate::linalg::ComplexMatrix) -> Result<(f64, f64)> {
    let ev = eigenvalues(a_drift)?;
    Ok(max_re_pair(&ev))
}

fn max_re_pair(ev: &[C64]) -> (f64, f64) {
    let max = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let tie = 1e-12 * ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let im = ev.iter().filter(|z| z.re >= max - tie).map(|z| z.im.abs()).fold(0.0, f64::max);
    (max, im)
}

/// max Re(λ_i + λ_j) over pairs of drift eigenvalues, i ≤ j.
pub fn two_point_stability(a_drift: &crate::linalg::ComplexMatrix) -> Result<f64> {
    let ev = eigenvalues(a_drift)?;
    Ok(pair_sum_max(&ev))
}

fn pair_sum_max(ev: &[C64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..ev.len() {
        for j in i..ev.len() {
            best = best.max(ev[i].re + ev[j].re);
        }
    }
    best
}

/// Coefficients (ascending) of the published closed-system cubic in f.
pub fn closed_cubic(p: &ModelParams) -> PolyCoeffs {
    let (w, w0, ld, ls) = (p.omega, p.omega0, p.lambda_d, p.lambda_s);
    let (ld2, ls2) = (ld * ld, ls * ls);
    let v2 = ld2 + ls2;
    let w02 = w0 * w0;
    PolyCoeffs::from_real(&[
        w02 * (w * w0 - 2.0 * (9.0 * ld2 + ls2)) * (w * w0 - 2.0 * (ld2 + 9.0 * ls2)) / 64.0,
        (2.0 * w02 * (w * w - 6.0 * v2) - 20.0 * w * w0 * v2 + 36.0 * v2 * v2 + w02 * w02) / 16.0,
        0.25 * (-12.0 * v2 + w * w + 2.0 * w02),
        1.0,
    ])
}

/// Roots f of the published closed-system cubic (κ ignored), sorted by
/// (re, im).
pub fn closed_frequencies(p: &ModelParams) -> Result<[C64; 3]> {
    let mut r = closed_cubic(p).roots()?;
    r.sort_by(crate::linalg::eig::cmp_re_im);
    Ok([r[0], r[1], r[2]])
}

/// ν = 2√(−f) for each cubic root.
pub fn bogoliubov_frequencies(f: &[C64; 3]) -> [C64; 3] {
    f.map(|f| 2.0 * (-f).sqrt())
}

fn purely_imaginary(ev: &[C64]) -> bool {
    let scale = ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
    ev.iter().all(|z| z.re.abs() <= IMAGINARY_TOL * scale)
}

/// Closed-system phase from the κ = 0 generator: normal when the unshifted
/// spectrum is purely imaginary, superradiant when that holds only on some
/// physical shifted branch, inaccessible otherwise.
pub fn classify_closed_phase(p: &ModelParams) -> Result<ClosedPhase> {
    let closed = p.with_kappa(0.0);
    let normal = MeanFieldBranch::normal();
    if branch_is_oscillatory(&closed, &normal)? {
        return Ok(ClosedPhase::Normal);
    }
    let branches = filter_physical_branches(&closed, &solve_shift_equations(&closed)?);
    for b in branches.iter().filter(|b| b.kind == BranchKind::Superradiant) {
        if branch_is_oscillatory(&closed, b).unwrap_or(false) {
            return Ok(ClosedPhase::Superradiant);
        }
    }
    Ok(ClosedPhase::Inaccessible)
}

fn branch_is_oscillatory(p: &ModelParams, b: &MeanFieldBranch) -> Result<bool> {
    let l = build_liouvillian(p, b)?;
    Ok(purely_imaginary(&rapidities(&assemble_structure(&l))?.rapidities))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchStability {
    pub branch: MeanFieldBranch,
    pub max_re_one_point: f64,
    pub im_at_max_one_point: f64,
    pub max_re_two_point: f64,
}

pub fn branch_stability(p: &ModelParams, b: &MeanFieldBranch) -> Result<BranchStability> {
    let (a, _) = drift_and_diffusion(&build_liouvillian(p, b)?);
    let ev = eigenvalues(&a)?;
    let (max_re, im) = max_re_pair(&ev);
    Ok(BranchStability { branch: *b, max_re_one_point: max_re, im_at_max_one_point: im, max_re_two_point: pair_sum_max(&ev) })
}

/// Stability of every physical branch, normal branch first.
pub fn all_branch_stabilities(p: &ModelParams) -> Result<Vec<BranchStability>> {
    let branches = filter_physical_branches(p, &solve_shift_equations(p)?);
    branches.iter().map(|b| branch_stability(p, b)).collect()
}

/// The physical superradiant branch with the smallest one-point max Re,
/// ties broken by smaller |α|.
pub fn most_stable_superradiant(all: &[BranchStability]) -> Option<&BranchStability> {
    all.iter()
        .filter(|s| s.branch.kind == BranchKind::Superradiant)
        .min_by(|a, b| a.max_re_one_point.total_cmp(&b.max_re_one_point).then(a.branch.alpha.norm().total_cmp(&b.branch.alpha.norm())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRecord {
    pub phi_deg: f64,
    pub omega: f64,
    pub max_re_one_point: f64,
    pub im_at_max_one_point: f64,
    pub max_re_two_point: f64,
    pub max_re_sr_one_point: Option<f64>,
    pub im_at_max_sr_one_point: Option<f64>,
    pub max_re_sr_two_point: Option<f64>,
    /// Two-point max Re of the more stable of the normal and best superradiant branch.
    pub max_re_best_two_point: f64,
    pub branch_kind: BranchKind,
    pub physical_branches: usize,
    pub closed_phase: Option<ClosedPhase>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(start: f64, end: f64, points: usize) -> Self {
        Self { start, end, points }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n).map(|k| if n == 1 { self.start } else { self.start + (self.end - self.start) * k as f64 / (n - 1) as f64 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub phi_deg: Axis,
    pub omega: Axis,
    /// Also label each cell with its closed-system phase.
    pub classify_closed: bool,
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self { phi_deg: Axis::new(0.0, 90.0, 181), omega: Axis::new(10.0, 300.0, 200), classify_closed: true }
    }
}

fn nan_record(phi_deg: f64, omega: f64, err: String) -> StabilityRecord {
    StabilityRecord {
        phi_deg,
        omega,
        max_re_one_point: f64::NAN,
        im_at_max_one_point: f64::NAN,
        max_re_two_point: f64::NAN,
        max_re_sr_one_point: None,
        im_at_max_sr_one_point: None,
        max_re_sr_two_point: None,
        max_re_best_two_point: f64::NAN,
        branch_kind: BranchKind::Normal,
        physical_branches: 0,
        closed_phase: None,
        error: Some(err),
    }
}

pub fn stability_record(p: &ModelParams, classify_closed: bool) -> StabilityRecord {
    let (phi, omega) = (p.phi_deg(), p.omega);
    let all = match all_branch_stabilities(p) {
        Ok(a) => a,
        Err(e) => return nan_record(phi, omega, e.to_string()),
    };
    let Some(normal) = all.iter().find(|s| s.branch.kind == BranchKind::Normal) else {
        return nan_record(phi, omega, "normal branch missing".into());
    };
    let sr = most_stable_superradiant(&all);
    let (best_2pt, kind) = match sr {
        Some(s) if s.max_re_two_point < normal.max_re_two_point => (s.max_re_two_point, BranchKind::Superradiant),
        _ => (normal.max_re_two_point, BranchKind::Normal),
    };
    let (closed_phase, error) = if classify_closed {
        match classify_closed_phase(p) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    StabilityRecord {
        phi_deg: phi,
        omega,
        max_re_one_point: normal.max_re_one_point,
        im_at_max_one_point: normal.im_at_max_one_point,
        max_re_two_point: normal.max_re_two_point,
        max_re_sr_one_point: sr.map(|s| s.max_re_one_point),
        im_at_max_sr_one_point: sr.map(|s| s.im_at_max_one_point),
        max_re_sr_two_point: sr.map(|s| s.max_re_two_point),
        max_re_best_two_point: best_2pt,
        branch_kind: kind,
        physical_branches: all.len(),
        closed_phase,
        error,
    }
}

/// Evaluates every (φ, ω) cell with V = |λ| of `p_base`; records come back
/// φ-major, ω-minor regardless of scheduling.
pub fn sweep_phase_diagram(grid: &PhaseGrid, p_base: &ModelParams) -> Result<Vec<StabilityRecord>> {
    if grid.phi_deg.points < 2 || grid.omega.points < 2 {
        return Err(Error::InvalidParams("phase grid needs at least 2 points per axis".into()));
    }
    p_base.validate()?;
    let v = p_base.v();
    let phis = grid.phi_deg.values();
    let omegas = grid.omega.values();
    let cells: Vec<(f64, f64)> = phis.iter().flat_map(|&f| omegas.iter().map(move |&w| (f, w))).collect();
    Ok(cells
        .par_iter()
        .map(|&(phi, omega)| match ModelParams::from_polar(omega, p_base.omega0, v, phi, p_base.kappa, p_base.n_atoms) {
            Ok(p) => StabilityRecord { phi_deg: phi, omega, ..stability_record(&p, grid.classify_closed) },
            Err(e) => nan_record(phi, omega, e.to_string()),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::third_quantization::normal_rapidity_polynomial;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn decoupled_one_point() {
        let p = ModelParams::new(46.0, 7.4, 0.0, 0.0, 1250.0, 2000.0).unwrap();
        let (a, _) = drift_and_diffusion(&build_liouvillian(&p, &MeanFieldBranch::normal()).unwrap());
        let (re, im) = one_point_stability(&a).unwrap();
        assert!(re.abs() < 1e-12);
        assert!((im - 7.4).abs() < 1e-12);
    }

    #[test]
    fn oscillating_normal_branch() {
        let p = ModelParams::new(46.0, 7.4, 6.3, 7.25, 1250.0, 2000.0).unwrap();
        let s = branch_stability(&p, &MeanFieldBranch::normal()).unwrap();
        assert!(s.max_re_one_point > 0.0);
        assert!((s.im_at_max_one_point - 7.4).abs() < 0.2 * 7.4, "{}", s.im_at_max_one_point);
        assert!(s.max_re_two_point >= 2.0 * s.max_re_one_point - 1e-12);
    }

    #[test]
    fn two_point_of_stable_drift_is_negative() {
        let a = crate::linalg::ComplexMatrix::from_diag(&[c(-1.0, 3.0), c(-0.5, -2.0), c(-2.0, 0.0)]);
        assert_eq!(two_point_stability(&a).unwrap(), -1.0);
        assert_eq!(one_point_stability(&a).unwrap(), (-0.5, 2.0));
    }

    #[test]
    fn decoupled_cubic_roots() {
        let p = ModelParams::new(46.0, 7.4, 0.0, 0.0, 1250.0, 1.0).unwrap();
        let f = closed_frequencies(&p).unwrap();
        let want = [c(-46.0 * 46.0 / 4.0, 0.0), c(-7.4 * 7.4 / 4.0, 0.0), c(-7.4 * 7.4 / 4.0, 0.0)];
        for (x, y) in f.iter().zip(want) {
            assert!((x - y).norm() < 1e-10 * y.norm(), "{x} vs {y}");
        }
        let nu = bogoliubov_frequencies(&f);
        assert!((nu[0] - c(46.0, 0.0)).norm() < 1e-9);
    }

    /// With f = χ² the cubic is the κ = 0 published sextic divided by 64.
    #[test]
    fn cubic_is_closed_limit_of_sextic() {
        let p = ModelParams::new(46.0, 7.4, 6.3, 7.25, 0.0, 1.0).unwrap();
        let sextic = normal_rapidity_polynomial(&p);
        for f in closed_frequencies(&p).unwrap() {
            for chi in [f.sqrt(), -f.sqrt()] {
                assert!(sextic.eval(chi).norm() < 1e-9 * sextic.eval_abs(chi));
            }
        }
    }

    #[test]
    fn weak_coupling_is_normal() {
        let p = ModelParams::from_polar(46.0, 7.4, 0.5, 30.0, 1250.0, 1.0).unwrap();
        assert_eq!(classify_closed_phase(&p).unwrap(), ClosedPhase::Normal);
        for f in closed_frequencies(&p).unwrap() {
            assert!(f.im.abs() < 1e-9 && f.re < 0.0);
        }
    }

    /// On λ_S = 0 the model is a Dicke model with coupling √2 λ_D for the
    /// collective spin of 2N atoms, so the closed transition sits at
    /// λ_D = √(ωω₀/8). Located here by bisection on the classification.
    #[test]
    fn dicke_line_transition() {
        let (w, w0) = (46.0, 7.4);
        let label = |ld: f64| classify_closed_phase(&ModelParams::new(w, w0, ld, 0.0, 0.0, 1.0).unwrap()).unwrap();
        let (mut lo, mut hi) = (1.0, 30.0);
        assert_eq!(label(lo), ClosedPhase::Normal);
        assert_eq!(label(hi), ClosedPhase::Superradiant);
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if label(mid) == ClosedPhase::Normal {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let want = (w * w0 / 8.0f64).sqrt();
        assert!((lo - want).abs() < 1e-3 * want, "{lo} vs {want}");
    }

    /// At V = 92.5 the normal phase needs ω > 8V²/ω₀ ≈ 9250; below it the
    /// lowest-energy shifted branch carries real frequencies.
    #[test]
    fn closed_regions_across_threshold() {
        for phi in [0.0, 20.0, 45.0, 70.0, 90.0] {
            for w in [10.0, 50.0, 150.0, 300.0] {
                let p = ModelParams::from_polar(w, 7.4, 92.5, phi, 0.0, 1.0).unwrap();
                assert_eq!(classify_closed_phase(&p).unwrap(), ClosedPhase::Superradiant, "{phi} {w}");
            }
            let p = ModelParams::from_polar(2e4, 7.4, 92.5, phi, 0.0, 1.0).unwrap();
            assert_eq!(classify_closed_phase(&p).unwrap(), ClosedPhase::Normal);
        }
    }

    /// The energy is bounded below, so its minimum over the physical
    /// branches always has a purely imaginary spectrum.
    #[test]
    fn energy_minimum_is_oscillatory() {
        use crate::model::classical_energy;
        let s = -std::f64::consts::FRAC_1_SQRT_2;
        for (w, phi) in [(10.0, 45.0), (50.0, 60.0), (100.0, 85.0)] {
            let p = ModelParams::from_polar(w, 7.4, 92.5, phi, 0.0, 1.0).unwrap();
            let bs = filter_physical_branches(&p, &solve_shift_equations(&p).unwrap());
            let e = |b: &MeanFieldBranch| classical_energy(&p, b.alpha, [s * b.beta1, s * b.beta2]);
            let min = bs.iter().min_by(|a, b| e(a).total_cmp(&e(b))).unwrap();
            assert_eq!(min.kind, BranchKind::Superradiant);
            assert!(branch_is_oscillatory(&p, min).unwrap());
        }
    }

    /// Normal label at κ = 0 ⇔ rapidities hug the imaginary axis as κ → 0⁺.
    #[test]
    fn closed_label_matches_small_kappa_limit() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = ModelParams::from_polar(rng.gen_range(10.0..300.0), 7.4, rng.gen_range(1.0..100.0), rng.gen_range(0.0..90.0), 1e-6, 1.0).unwrap();
            let normal = classify_closed_phase(&p).unwrap() == ClosedPhase::Normal;
            let chi = rapidities(&assemble_structure(&build_liouvillian(&p, &MeanFieldBranch::normal()).unwrap())).unwrap().rapidities;
            let max_re = chi.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
            assert_eq!(normal, max_re < 1e-4, "{p:?} {max_re}");
        }
    }

    #[test]
    fn small_grid_smoke() {
        let base = ModelParams::from_polar(46.0, 7.4, 121.65, 0.0, 1250.0, 2000.0).unwrap();
        let grid = PhaseGrid { phi_deg: Axis::new(10.0, 80.0, 2), omega: Axis::new(20.0, 200.0, 2), classify_closed: true };
        let recs = sweep_phase_diagram(&grid, &base).unwrap();
        assert_eq!(recs.len(), 4);
        assert_eq!((recs[0].phi_deg, recs[0].omega), (10.0, 20.0));
        assert_eq!((recs[1].phi_deg, recs[1].omega), (10.0, 200.0));
        for r in &recs {
            assert!(r.error.is_none(), "{:?}", r.error);
            assert!(r.max_re_one_point.is_finite() && r.max_re_two_point.is_finite());
            assert!(r.closed_phase.is_some());
            assert!(r.im_at_max_one_point >= 0.0);
        }
        assert_eq!(recs, sweep_phase_diagram(&grid, &base).unwrap());
    }

    /// Swapping (λ_D, λ_S) → (λ_D, −λ_S) relabels b₁ ↔ b₂.
    #[test]
    fn labels_invariant_under_relabelling() {
        let p = ModelParams::new(80.0, 7.4, 60.0, 40.0, 1250.0, 2000.0).unwrap();
        let q = p.with_couplings(60.0, -40.0);
        let (a, b) = (stability_record(&p, true), stability_record(&q, true));
        assert!((a.max_re_one_point - b.max_re_one_point).abs() < 1e-8 * a.max_re_one_point.abs().max(1.0));
        assert!((a.max_re_best_two_point - b.max_re_best_two_point).abs() < 1e-6 * a.max_re_best_two_point.abs().max(1.0));
        assert_eq!(a.closed_phase, b.closed_phase);
        assert_eq!(a.physical_branches, b.physical_branches);
    }
}
