//! Complex Schur decomposition `A = Q T Q*` for small dense matrices.
//!
//! Householder reduction to Hessenberg form followed by single-shift QR
//! sweeps with Wilkinson shifts and Givens rotations.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Schur {
    /// Unitary factor.
    pub q: ComplexMatrix,
    /// Upper-triangular factor.
    pub t: ComplexMatrix,
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn schur(a: &ComplexMatrix) -> Result<Schur> {
    if !a.is_square() {
        return Err(Error::Shape("Schur form of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    hessenberg(&mut h, &mut q);
    qr_iterate(&mut h, &mut q)?;
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { q, t: h })
}

fn hessenberg(h: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let mut v = x.clone();
        v[0] += phase * xnorm;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H <- (I - beta v v*) H on rows k+1..n
        for j in 0..n {
            let s: C64 = (0..v.len()).map(|r| v[r].conj() * h[(k + 1 + r, j)]).sum();
            let s = s * beta;
            for r in 0..v.len() {
                h[(k + 1 + r, j)] -= v[r] * s;
            }
        }
        // H <- H (I - beta v v*) and Q <- Q (I - beta v v*)
        for m in [&mut *h, &mut *q] {
            for i in 0..n {
                let s: C64 = (0..v.len()).map(|r| m[(i, k + 1 + r)] * v[r]).sum();
                let s = s * beta;
                for r in 0..v.len() {
                    m[(i, k + 1 + r)] -= s * v[r].conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, b.conj() / b.norm());
    }
    let nrm = a.norm().hypot(b.norm());
    let c = a.norm() / nrm;
    let s = (a / a.norm()) * b.conj() / nrm;
    (c, s)
}

fn qr_iterate(h: &mut ComplexMatrix, q: &mut ComplexMatrix) -> Result<()> {
    let n = h.rows();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let max_total = 100 * n.max(1);
    let mut total = 0usize;
    while hi > 0 {
        // locate the start of the unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= eps * diag || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }
        total += 1;
        iter_since_deflation += 1;
        if total > max_total {
            return Err(Error::NonConvergence);
        }

        let mu = if iter_since_deflation % 11 == 10 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let tr2 = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            let l1 = tr2 + disc;
            let l2 = tr2 - disc;
            if (l1 - d).norm() < (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            for i in 0..=hi.min(k + 1) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + s.conj() * y;
                h[(i, k + 1)] = -s * x + y * c;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * c + s.conj() * y;
                q[(i, k + 1)] = -s * x + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(())
}
