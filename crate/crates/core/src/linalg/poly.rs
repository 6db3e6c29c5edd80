use num_complex::Complex64 as C64;

use super::eig::{cmp_re_im, eigenvalues};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Polynomial coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    pub coeffs: Vec<C64>,
}

impl PolyCoeffs {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self { coeffs: coeffs.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut c = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        Self { coeffs: c }
    }

    /// Drops exactly-zero leading coefficients.
    pub fn normalized(&self) -> Self {
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|z| *z == C64::new(0.0, 0.0)) {
            c.pop();
        }
        Self { coeffs: c }
    }

    pub fn degree(&self) -> Option<usize> {
        let n = self.normalized().coeffs.len();
        if n == 0 {
            None
        } else {
            Some(n - 1)
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Sum of |c_k| |z|^k, the scale of rounding noise in `eval(z)`.
    pub fn eval_abs(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self { coeffs: vec![] };
        }
        Self {
            coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect(),
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn roots(&self) -> Result<Vec<C64>> {
        poly_roots(self)
    }
}

/// Roots via companion-matrix eigenvalues, one Newton polish step each, and
/// refinement of numerically multiple roots through the derivative.
///
/// Roots are returned sorted by (real, imaginary) ascending.
pub fn poly_roots(p: &PolyCoeffs) -> Result<Vec<C64>> {
    let p = p.normalized();
    let n = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::DegenerateLeadingCoefficient),
    };
    let lead = p.coeffs[n];
    let monic: Vec<C64> = p.coeffs.iter().map(|c| c / lead).collect();
    // Scale z = s w so that the roots of the companion matrix are O(1).
    let s = (0..n)
        .map(|k| monic[k].norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let comp = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -monic[n - 1 - j] / s.powi(j as i32 + 1)
        } else if j + 1 == i {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut roots: Vec<C64> = eigenvalues(&comp)?.into_iter().map(|w| w * s).collect();

    let dp = p.derivative();
    for r in roots.iter_mut() {
        let f = p.eval(*r);
        let df = dp.eval(*r);
        if df.norm() > 0.0 {
            let cand = *r - f / df;
            if cand.re.is_finite() && cand.im.is_finite() && p.eval(cand).norm() <= f.norm() {
                *r = cand;
            }
        }
    }
    refine_clusters(&p, &mut roots);
    roots.sort_by(cmp_re_im);
    Ok(roots)
}

/// Replaces a cluster of `m` roots that the polynomial cannot resolve by the
/// simple root of the `(m-1)`-th derivative nearby.
fn refine_clusters(p: &PolyCoeffs, roots: &mut [C64]) {
    let n = roots.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        let tol = 1e-5 * (1.0 + roots[i].norm());
        let members: Vec<usize> = (i..n).filter(|&j| !used[j] && (roots[j] - roots[i]).norm() <= tol).collect();
        if members.len() < 2 {
            continue;
        }
        let m = members.len();
        let mean: C64 = members.iter().map(|&j| roots[j]).sum::<C64>() / m as f64;
        let mut d = p.clone();
        for _ in 0..m - 1 {
            d = d.derivative();
        }
        let dd = d.derivative();
        let mut z = mean;
        for _ in 0..50 {
            let f = d.eval(z);
            let df = dd.eval(z);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            z -= step;
            if step.norm() <= 1e-16 * (1.0 + z.norm()) {
                break;
            }
        }
        // Accept only if the polynomial itself is at rounding level there.
        let noise = 64.0 * f64::EPSILON * p.eval_abs(z);
        if z.re.is_finite() && z.im.is_finite() && p.eval(z).norm() <= noise.max(f64::MIN_POSITIVE) && (z - mean).norm() <= tol {
            for &j in &members {
                roots[j] = z;
                used[j] = true;
            }
        }
    }
}
