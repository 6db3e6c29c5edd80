//! Third quantization of the quadratic Liouvillian.
//!
//! With the 6×6 structure matrix X, the Liouvillian eigenvalues are
//! λ = −2 Σ n_r χ_r over the eigenvalues χ_r of X (rapidities), and the
//! stationary normal-ordered correlations Z solve XᵀZ + ZX = Y.

mod asymptotics;

pub use asymptotics::{gamma_squared, large_kappa_eigenvalue, large_kappa_eigenvalue_with, normal_rapidity_polynomial};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::eig::eig_unchecked;
use crate::linalg::{solve_sylvester, ComplexMatrix};
use crate::model::QuadraticLiouvillian;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrices {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Sorted by descending real part, then ascending imaginary part.
    pub rapidities: Vec<C64>,
    /// Columns are right eigenvectors of X in rapidity order.
    pub mode_matrix: ComplexMatrix,
    /// Solution of XᵀZ + ZX = Y; `None` when the pencil is singular.
    pub covariance: Option<ComplexMatrix>,
    pub diagonalizable: bool,
    /// Condition number of the mode matrix.
    pub cond: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeEntry {
    pub occupations: [u32; 6],
    pub eigenvalue: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueLattice {
    pub entries: Vec<LatticeEntry>,
}

/// Tolerance on ‖X − PΔP⁻¹‖ relative to ‖X‖.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// X = ½[[iH* + M, −2iK], [2iK*, −iH + M*]], Y = ½[[−2iK*, 0], [0, 2iK]].
pub fn assemble_structure(l: &QuadraticLiouvillian) -> StructureMatrices {
    let i = C64::new(0.0, 1.0);
    let z = ComplexMatrix::zeros(3, 3);
    let x = ComplexMatrix::from_blocks(
        &(&l.h.conj().scale(i) + &l.m),
        &l.k.scale(-2.0 * i),
        &l.k.conj().scale(2.0 * i),
        &(&l.h.scale(-i) + &l.m.conj()),
    )
    .scale_re(0.5);
    let y = ComplexMatrix::from_blocks(&l.k.conj().scale(-2.0 * i), &z, &z, &l.k.scale(2.0 * i)).scale_re(0.5);
    StructureMatrices { x, y }
}

fn cmp_rapidity(a: &C64, b: &C64) -> std::cmp::Ordering {
    b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im))
}

/// Diagonalizes X and solves for the stationary correlations.
///
/// Near exceptional points the rapidities are still returned, with
/// `diagonalizable = false`; a singular pencil leaves `covariance` empty.
pub fn rapidities(s: &StructureMatrices) -> Result<SpectralData> {
    let e = eig_unchecked(&s.x)?;
    let n = e.values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| cmp_rapidity(&e.values[a], &e.values[b]));
    let rapidities: Vec<C64> = idx.iter().map(|&k| e.values[k]).collect();
    let mode_matrix = ComplexMatrix::from_fn(n, n, |r, c| e.vectors[(r, idx[c])]);
    let mut diagonalizable = e.cond <= crate::linalg::eig::EIG_MAX_COND;
    if diagonalizable {
        match mode_matrix.inverse() {
            Ok(pinv) => {
                let pd = ComplexMatrix::from_fn(n, n, |r, c| mode_matrix[(r, c)] * rapidities[c]);
                let err = (&pd.matmul(&pinv) - &s.x).norm_fro();
                diagonalizable = err <= RECONSTRUCTION_TOL * s.x.norm_fro().max(f64::MIN_POSITIVE);
            }
            Err(_) => diagonalizable = false,
        }
    }
    let covariance = solve_sylvester(&s.x, &s.x, &s.y).ok();
    Ok(SpectralData { rapidities, mode_matrix, covariance, diagonalizable, cond: e.cond })
}

/// Stationary correlations Z, or the pencil error when none exists.
pub fn stationary_covariance(s: &StructureMatrices) -> Result<ComplexMatrix> {
    solve_sylvester(&s.x, &s.x, &s.y)
}

impl SpectralData {
    /// True when every rapidity has a positive real part, so that all
    /// excitations decay and `covariance` is the attracting state.
    pub fn is_stable(&self) -> bool {
        self.rapidities.iter().all(|c| c.re > 0.0)
    }
}

/// All lattice points with total occupation up to `max_total_occupation`,
/// sorted by descending real part, then ascending imaginary part.
pub fn eigenvalue_lattice(sd: &SpectralData, max_total_occupation: u32) -> Result<EigenvalueLattice> {
    if !sd.diagonalizable {
        return Err(Error::NonDiagonalizable { cond: sd.cond });
    }
    let chi = &sd.rapidities;
    let mut entries = Vec::new();
    let mut occ = [0u32; 6];
    fn walk(pos: usize, left: u32, occ: &mut [u32; 6], chi: &[C64], out: &mut Vec<LatticeEntry>) {
        if pos == 6 {
            let mut lam = C64::new(0.0, 0.0);
            for r in 0..6 {
                lam -= 2.0 * occ[r] as f64 * chi[r];
            }
            out.push(LatticeEntry { occupations: *occ, eigenvalue: lam });
            return;
        }
        for n in 0..=left {
            occ[pos] = n;
            walk(pos + 1, left - n, occ, chi, out);
        }
        occ[pos] = 0;
    }
    walk(0, max_total_occupation, &mut occ, chi, &mut entries);
    entries.sort_by(|a, b| {
        cmp_rapidity(&a.eigenvalue, &b.eigenvalue).then_with(|| a.occupations.cmp(&b.occupations))
    });
    Ok(EigenvalueLattice { entries })
}

/// Rapidities of the generator built for a branch.
pub fn spectral_data(l: &QuadraticLiouvillian) -> Result<SpectralData> {
    rapidities(&assemble_structure(l))
}
