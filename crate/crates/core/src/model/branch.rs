//! Mean-field shift branches.
//!
//! Shifts are scaled so that ⟨a⟩ = √N α and ⟨b_i⟩ = -√(N/2) β_i; the spin
//! of branch i then has ⟨J_z⟩/N = (|β_i|² - 1)/2 and ⟨J_x⟩/N = -Re β_i q_i
//! with q_i = √(2 - |β_i|²), so |β_i|² ∈ [0, 2] covers the Bloch sphere.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::params::ModelParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchKind {
    Normal,
    Superradiant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldBranch {
    pub alpha: C64,
    pub beta1: C64,
    pub beta2: C64,
    pub kind: BranchKind,
    pub physical: bool,
}

/// Shifts below this magnitude count as the normal branch.
pub const SHIFT_ZERO: f64 = 1e-9;
/// Residual bound for an accepted shift solution.
pub const SHIFT_RESIDUAL: f64 = 1e-8;
/// Seed budget for the multi-start search.
pub const SEED_BUDGET: usize = 10_000;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

impl MeanFieldBranch {
    pub fn normal() -> Self {
        Self { alpha: ZERO, beta1: ZERO, beta2: ZERO, kind: BranchKind::Normal, physical: true }
    }

    pub fn new(alpha: C64, beta1: C64, beta2: C64) -> Self {
        let big = alpha.norm().max(beta1.norm()).max(beta2.norm());
        let kind = if big > SHIFT_ZERO { BranchKind::Superradiant } else { BranchKind::Normal };
        Self { alpha, beta1, beta2, kind, physical: false }
    }

    pub fn betas(&self) -> [C64; 2] {
        [self.beta1, self.beta2]
    }

    /// Mean spin vector (S_x, S_y, S_z)/N of each condensate, with
    /// S_x = (J₊ + J₋)/2; its length is 1/2 for every |β|² ≤ 2.
    pub fn spin_vectors(&self) -> [[f64; 3]; 2] {
        self.betas().map(|b| {
            let q = (2.0 - b.norm_sqr()).max(0.0).sqrt();
            // ⟨J₋⟩/N = -β q / 2 from J₋ = √(N - b†b) b at b = -√(N/2) β.
            let jm = -b * q * 0.5;
            [jm.re, -jm.im, 0.5 * (b.norm_sqr() - 1.0)]
        })
    }
}

/// Mean-field velocity (α̇, β̇₁, β̇₂) at a given shift.
pub fn mean_field_flow(p: &ModelParams, alpha: C64, beta1: C64, beta2: C64) -> [C64; 3] {
    let i = C64::new(0.0, 1.0);
    let q1 = (2.0 - beta1.norm_sqr()).sqrt();
    let q2 = (2.0 - beta2.norm_sqr()).sqrt();
    let x1 = -beta1.re * q1;
    let x2 = -beta2.re * q2;
    let adot = -(p.kappa + i * p.omega) * alpha - i * p.lambda_d * (x1 + x2) - p.lambda_s * (x1 - x2);
    let g1 = p.lambda_d * alpha.re - p.lambda_s * alpha.im;
    let g2 = p.lambda_d * alpha.re + p.lambda_s * alpha.im;
    let bdot = |b: C64, q: f64, g: f64| -i * p.omega0 * b + 2.0 * i * g * (q - b.re * b / q);
    [adot, bdot(beta1, q1, g1), bdot(beta2, q2, g2)]
}

/// Largest component of the mean-field velocity.
pub fn shift_residual(p: &ModelParams, b: &MeanFieldBranch) -> f64 {
    mean_field_flow(p, b.alpha, b.beta1, b.beta2).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The six shift equations in the typeset form, evaluated literally.
///
/// Entries 0 and 1 are `√α - rhs` and `√α* - rhs`; entries 2..6 are the
/// left-hand sides of the `= 0` equations. Diagnostic only: this system is
/// not mutually consistent away from the normal branch (see tests).
pub fn printed_shift_residuals(p: &ModelParams, b: &MeanFieldBranch) -> [C64; 6] {
    let i = C64::new(0.0, 1.0);
    let (ld, ls, k, w, w0, n) = (p.lambda_d, p.lambda_s, p.kappa, p.omega, p.omega0, p.n_atoms);
    let (a, b1, b2) = (b.alpha, b.beta1, b.beta2);
    let (a_c, b1c, b2c) = (a.conj(), b1.conj(), b2.conj());
    let s1 = (C64::new(2.0, 0.0) - b1 * b1c).sqrt();
    let s2 = (C64::new(2.0, 0.0) - b2 * b2c).sqrt();
    let sum = s1 * (b1c + b1) + (b2c + b2) * s2;
    let num = -ls * sum + i * ld * sum;
    let r2 = std::f64::consts::SQRT_2;
    let e0 = a.sqrt() - num / (r2 * (k + i * w));
    let e1 = a_c.sqrt() - num / (r2 * (k - i * w));
    let d1 = ((C64::new(2.0, 0.0) - b1 * b1c) / n).sqrt();
    let d2 = ((C64::new(2.0, 0.0) - b2 * b2c) / n).sqrt();
    let f1 = 3.0 * b1 * b1c + b1c - 4.0;
    let e2 = (r2 * a * f1 * (ls + i * ld) + i * (4.0 * w0 * s1 * b1c + r2 * a_c * f1 * (ld + i * ls))) / d1;
    let e3 = (r2 * a * f1 * (ls + i * ld) + i * (4.0 * w0 * s1 * b1c + r2 * f1 * a_c * (ld + i * ls))) / d1;
    let f2 = 3.0 * b2 * b2c + b2c - 4.0;
    let e4 = (i * r2 * a * f2 * (ld + i * ls) + r2 * f2 * a_c * (ls + i * ld) + 4.0 * i * w0 * s2 * b2c) / d2;
    let f2b = 3.0 * b2 * b2c + b2 - 4.0;
    let e5 = (r2 * a * f2b * (ls - i * ld) - i * (4.0 * b2 * w0 * s2 + r2 * f2b * a_c * (ld - i * ls))) / d2;
    [e0, e1, e2, e3, e4, e5]
}

/// Stationarity residual of the reduced problem with real β and α eliminated.
fn reduced_alpha(p: &ModelParams, x: [f64; 2]) -> Option<C64> {
    let i = C64::new(0.0, 1.0);
    let den = p.kappa + i * p.omega;
    if den.norm() == 0.0 {
        return None;
    }
    let jx = x.map(|xi| -xi * (2.0 - xi * xi).sqrt());
    Some((-i * p.lambda_d * (jx[0] + jx[1]) - p.lambda_s * (jx[0] - jx[1])) / den)
}

fn reduced_residual(p: &ModelParams, x: [f64; 2]) -> Option<[f64; 2]> {
    if x.iter().any(|xi| xi * xi >= 2.0) {
        return None;
    }
    let a = reduced_alpha(p, x)?;
    let g = [p.lambda_d * a.re - p.lambda_s * a.im, p.lambda_d * a.re + p.lambda_s * a.im];
    let mut r = [0.0; 2];
    for k in 0..2 {
        let q = (2.0 - x[k] * x[k]).sqrt();
        r[k] = p.omega0 * x[k] * q - 4.0 * g[k] * (1.0 - x[k] * x[k]);
    }
    Some(r)
}

fn newton<const D: usize>(f: impl Fn(&[f64; D]) -> Option<[f64; D]>, mut x: [f64; D], scale: f64, max_iter: usize) -> Option<[f64; D]> {
    let norm = |r: &[f64; D]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r = f(&x)?;
    let mut nr = norm(&r);
    for _ in 0..max_iter {
        if nr <= 1e-14 * scale {
            return Some(x);
        }
        let mut jac = [[0.0; D]; D];
        for j in 0..D {
            let h = 1e-7 * (1.0 + x[j].abs());
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(&xp)?, f(&xm)?);
            for i in 0..D {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let dx = solve_real(jac, r.map(|v| -v))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut xn = x;
            for i in 0..D {
                xn[i] += t * dx[i];
            }
            if let Some(rn) = f(&xn) {
                let nn = norm(&rn);
                if nn < nr || nn <= 1e-14 * scale {
                    x = xn;
                    r = rn;
                    nr = nn;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (nr <= 1e-11 * scale).then_some(x)
}

fn solve_real<const D: usize>(mut a: [[f64; D]; D], mut b: [f64; D]) -> Option<[f64; D]> {
    for k in 0..D {
        let p = (k..D).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(p, k);
        b.swap(p, k);
        for i in k + 1..D {
            let f = a[i][k] / a[k][k];
            for j in k..D {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = [0.0; D];
    for k in (0..D).rev() {
        let mut s = b[k];
        for j in k + 1..D {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn flow_real(p: &ModelParams, v: &[f64; 6]) -> Option<[f64; 6]> {
    let a = C64::new(v[0], v[1]);
    let b1 = C64::new(v[2], v[3]);
    let b2 = C64::new(v[4], v[5]);
    if b1.norm_sqr() >= 2.0 || b2.norm_sqr() >= 2.0 {
        return None;
    }
    let f = mean_field_flow(p, a, b1, b2);
    Some([f[0].re, f[0].im, f[1].re, f[1].im, f[2].re, f[2].im])
}

/// Finds all stationary shifts by multi-start damped Newton.
///
/// Seeds: a grid over the real-β reduced problem (α eliminated), the same
/// grid at κ = 0, and random complex seeds; every candidate is polished on
/// the full six-dimensional real system. The normal branch is always first.
pub fn solve_shift_equations(p: &ModelParams) -> Result<Vec<MeanFieldBranch>> {
    p.validate()?;
    let scale = 1.0 + p.omega.abs() + p.omega0 + p.lambda_d.abs() + p.lambda_s.abs() + p.kappa;
    let mut seeds: Vec<[f64; 6]> = Vec::new();
    let grid = 24usize;
    let lim = 1.41;
    let closed = ModelParams { kappa: 0.0, ..*p };
    let mut reduced: Vec<[f64; 2]> = Vec::new();
    for pp in [p, &closed] {
        for i in 0..grid {
            for j in 0..grid {
                let x0 = [-lim + 2.0 * lim * (i as f64 + 0.5) / grid as f64, -lim + 2.0 * lim * (j as f64 + 0.5) / grid as f64];
                if let Some(x) = newton(|x| reduced_residual(pp, *x), x0, scale, 60) {
                    if !reduced.iter().any(|r| (r[0] - x[0]).abs() + (r[1] - x[1]).abs() < 1e-8) {
                        reduced.push(x);
                    }
                }
            }
        }
    }
    for x in &reduced {
        let a = reduced_alpha(p, *x).unwrap_or(ZERO);
        seeds.push([a.re, a.im, x[0], 0.0, x[1], 0.0]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let n_random = 256.min(SEED_BUDGET.saturating_sub(seeds.len()));
    for _ in 0..n_random {
        seeds.push([
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-1.4..1.4),
            rng.gen_range(-0.3..0.3),
            rng.gen_range(-1.4..1.4),
            rng.gen_range(-0.3..0.3),
        ]);
    }
    seeds.truncate(SEED_BUDGET);

    let mut found: Vec<MeanFieldBranch> = vec![MeanFieldBranch::normal()];
    let mut converged_any = false;
    for s in seeds {
        let Some(v) = newton(|v| flow_real(p, v), s, scale, 80) else { continue };
        converged_any = true;
        let b = MeanFieldBranch::new(C64::new(v[0], v[1]), C64::new(v[2], v[3]), C64::new(v[4], v[5]));
        if b.beta1.norm_sqr() > 2.0 - 1e-9 || b.beta2.norm_sqr() > 2.0 - 1e-9 {
            continue;
        }
        if shift_residual(p, &b) > SHIFT_RESIDUAL {
            continue;
        }
        let dup = found.iter().any(|f| {
            (f.alpha - b.alpha).norm().max((f.beta1 - b.beta1).norm()).max((f.beta2 - b.beta2).norm()) < 1e-6
        });
        if !dup {
            found.push(b);
        }
    }
    if !converged_any && found.len() == 1 && reduced.is_empty() {
        return Err(Error::RootFindingFailure("no seed converged".into()));
    }
    for f in found.iter_mut() {
        if f.kind == BranchKind::Normal {
            *f = MeanFieldBranch::normal();
        }
    }
    found.dedup_by(|a, b| a.kind == BranchKind::Normal && b.kind == BranchKind::Normal);
    found[1..].sort_by(|a, b| {
        a.alpha
            .norm()
            .total_cmp(&b.alpha.norm())
            .then(a.beta1.re.total_cmp(&b.beta1.re))
            .then(a.beta2.re.total_cmp(&b.beta2.re))
            .then(a.alpha.re.total_cmp(&b.alpha.re))
    });
    Ok(found)
}
