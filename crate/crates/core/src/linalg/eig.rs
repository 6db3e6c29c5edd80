use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Relative residual accepted for an eigenpair: `|m v - λ v| <= EIG_RESIDUAL * |m|`.
pub const EIG_RESIDUAL: f64 = 1e-10;
/// Eigenvector matrices with a larger condition number are treated as defective.
pub const EIG_MAX_COND: f64 = 1e12;

/// Eigenvalues with unit-norm eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: ComplexMatrix,
    /// 2-norm condition number of `vectors`.
    pub cond: f64,
}

/// Lexicographic order by real part, then imaginary part.
pub fn cmp_re_im(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues only, sorted by (real, imaginary) ascending.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::Shape("eigenvalues of a non-square matrix".into()));
    }
    if m.rows() == 0 {
        return Ok(vec![]);
    }
    let mut ev = m.to_faer().eigenvalues().map_err(|_| Error::NonConvergence)?;
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonConvergence);
    }
    ev.sort_by(cmp_re_im);
    Ok(ev)
}

/// Full eigen-decomposition, sorted by (real, imaginary) ascending.
///
/// Fails with `NonDiagonalizable` when the eigenvector matrix is numerically singular.
pub fn eig_complex(m: &ComplexMatrix) -> Result<Eigen> {
    let e = eig_unchecked(m)?;
    if !(e.cond <= EIG_MAX_COND) {
        return Err(Error::NonDiagonalizable { cond: e.cond });
    }
    Ok(e)
}

/// Like [`eig_complex`] but reports the condition number instead of failing on it.
pub fn eig_unchecked(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Shape("eigen-decomposition of a non-square matrix".into()));
    }
    let n = m.rows();
    let evd = m.to_faer().eigen().map_err(|_| Error::NonConvergence)?;
    let s = evd.S();
    let u = evd.U();
    let mut idx: Vec<usize> = (0..n).collect();
    let vals: Vec<C64> = (0..n).map(|i| s.column_vector()[i]).collect();
    idx.sort_by(|&a, &b| cmp_re_im(&vals[a], &vals[b]));

    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in idx.iter().enumerate() {
        let nrm = (0..n).map(|i| u[(i, old)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            vectors[(i, new)] = if nrm > 0.0 { u[(i, old)] / nrm } else { u[(i, old)] };
        }
    }
    let values: Vec<C64> = idx.iter().map(|&i| vals[i]).collect();
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || !vectors.is_finite() {
        return Err(Error::NonConvergence);
    }

    let scale = m.norm_fro().max(f64::MIN_POSITIVE);
    for (k, &lam) in values.iter().enumerate() {
        let v = vectors.col(k);
        let mv = m.mul_vec(&v);
        let r = mv.iter().zip(&v).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt();
        if r > EIG_RESIDUAL * scale {
            return Err(Error::NonConvergence);
        }
    }

    let sv = vectors.to_faer().singular_values().map_err(|_| Error::NonConvergence)?;
    let cond = match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    };
    Ok(Eigen { values, vectors, cond })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let e = eig_complex(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![c(1.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn diagonal_sorted() {
        let m = ComplexMatrix::from_diag(&[c(3.0, 0.0), c(0.0, -1.0)]);
        let e = eig_complex(&m).unwrap();
        assert!((e.values[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((e.values[1] - c(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_of_z2_minus_1() {
        // z^2 - 1 = (z - 1)(z + 1)
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eig_complex(&m).unwrap();
        assert!((e.values[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((e.values[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_is_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(eig_complex(&m), Err(Error::NonDiagonalizable { .. })));
        assert_eq!(eigenvalues(&m).unwrap().len(), 2);
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), n * n).prop_map(move |v| {
            ComplexMatrix::new(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn hermitian_has_real_spectrum(m in arb_matrix(5)) {
            let h = &m + &m.adjoint();
            let e = eig_complex(&h).unwrap();
            for z in &e.values {
                prop_assert!(z.im.abs() <= 1e-10 * h.norm_fro());
            }
        }

        #[test]
        fn residual_within_contract(m in arb_matrix(6)) {
            if let Ok(e) = eig_complex(&m) {
                for (k, lam) in e.values.iter().enumerate() {
                    let v = e.vectors.col(k);
                    let mv = m.mul_vec(&v);
                    let r: f64 = mv.iter().zip(&v).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt();
                    prop_assert!(r <= EIG_RESIDUAL * m.norm_fro());
                }
                for w in e.values.windows(2) {
                    prop_assert!(cmp_re_im(&w[0], &w[1]) != std::cmp::Ordering::Greater);
                }
            }
        }
    }
}
