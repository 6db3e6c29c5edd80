use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use super::schur::schur;
use crate::error::{Error, Result};

/// Relative residual bound on `aᵀZ + Zb - c`.
pub const SYLVESTER_RESIDUAL: f64 = 1e-9;

/// Solves `aᵀ Z + Z b = c` by Bartels-Stewart on complex Schur forms.
pub fn solve_sylvester(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || !b.is_square() || c.rows() != a.rows() || c.cols() != b.rows() {
        return Err(Error::Shape("sylvester: a (n x n), b (m x m), c (n x m)".into()));
    }
    let at = a.transpose();
    let sa = schur(&at)?;
    let sb = schur(b)?;
    let (r, u) = (&sa.t, &sa.q);
    let (s, v) = (&sb.t, &sb.q);
    let n = r.rows();
    let m = s.rows();

    let scale = (r.norm_fro() + s.norm_fro()).max(f64::MIN_POSITIVE);
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for k in 0..m {
            gap = gap.min((r[(i, i)] + s[(k, k)]).norm());
        }
    }
    if gap <= 1e3 * f64::EPSILON * scale {
        return Err(Error::SingularPencil { gap });
    }

    let chat = u.adjoint().matmul(c).matmul(v);
    let mut zhat = ComplexMatrix::zeros(n, m);
    for k in 0..m {
        let mut rhs: Vec<C64> = (0..n).map(|i| chat[(i, k)]).collect();
        for j in 0..k {
            let sjk = s[(j, k)];
            if sjk != C64::new(0.0, 0.0) {
                for i in 0..n {
                    rhs[i] -= zhat[(i, j)] * sjk;
                }
            }
        }
        let skk = s[(k, k)];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for l in i + 1..n {
                acc -= r[(i, l)] * zhat[(l, k)];
            }
            zhat[(i, k)] = acc / (r[(i, i)] + skk);
        }
    }
    let z = u.matmul(&zhat).matmul(&v.adjoint());

    let resid = (&(&at.matmul(&z) + &z.matmul(b)) - c).norm_fro();
    if !z.is_finite() || resid > SYLVESTER_RESIDUAL * c.norm_fro().max(f64::MIN_POSITIVE) && resid > 0.0 {
        return Err(Error::SingularPencil { gap });
    }
    Ok(z)
}

#[cfg(test)]
pub(crate) fn kronecker_sylvester(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    // Row-major vec: vec(aᵀ Z) = (aᵀ ⊗ I) vec Z, vec(Z b) = (I ⊗ bᵀ) vec Z.
    let n = a.rows();
    let m = b.rows();
    let lhs = &a.transpose().kron(&ComplexMatrix::identity(m)) + &ComplexMatrix::identity(n).kron(&b.transpose());
    let rhs = ComplexMatrix::new(n * m, 1, c.as_slice().to_vec())?;
    let z = lhs.solve(&rhs)?;
    ComplexMatrix::new(n, m, z.as_slice().to_vec())
}
