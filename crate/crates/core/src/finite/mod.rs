//! Exact finite-N model: truncated cavity Fock space times two spin-N/2
//! ladders, with dense Liouvillian spectra.
//!
//! Density matrices are vectorized row-major, vec(AρB) = (A ⊗ Bᵀ) vec ρ.
//! The generator commutes with ρ ↦ ΠρΠ for the excitation parity
//! Π = (−1)^{n + k₁ + k₂}, which splits it into two blocks.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::eig::eig_unchecked;
use crate::linalg::{eigenvalues, ComplexMatrix};
use crate::model::ModelParams;

/// Largest superoperator dimension dims² accepted by default.
pub const DEFAULT_SUPEROP_BUDGET: usize = 4096;
/// Step of the central difference in the counting field.
pub const COUNTING_STEP: f64 = 1e-5;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteModel {
    pub params: ModelParams,
    /// Atoms per condensate; each spin has j = N/2.
    pub n_atoms: usize,
    /// Highest cavity Fock state kept.
    pub fock_cutoff: usize,
    pub budget: usize,
}

impl FiniteModel {
    pub fn new(params: ModelParams, n_atoms: usize, fock_cutoff: usize) -> Result<Self> {
        Self::with_budget(params, n_atoms, fock_cutoff, DEFAULT_SUPEROP_BUDGET)
    }

    pub fn with_budget(params: ModelParams, n_atoms: usize, fock_cutoff: usize, budget: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidParams("finite model needs N >= 1".into()));
        }
        let params = ModelParams { n_atoms: n_atoms as f64, ..params };
        params.validate()?;
        let fm = Self { params, n_atoms, fock_cutoff, budget };
        let needed = fm.dims() * fm.dims();
        if needed > budget {
            return Err(Error::DimensionBudgetExceeded { needed, budget });
        }
        Ok(fm)
    }

    pub fn spin_dim(&self) -> usize {
        self.n_atoms + 1
    }

    /// (n_max + 1)(N + 1)².
    pub fn dims(&self) -> usize {
        (self.fock_cutoff + 1) * self.spin_dim() * self.spin_dim()
    }

    /// Basis index of |n⟩ ⊗ |k₁⟩ ⊗ |k₂⟩ with k counted up from m = −j.
    pub fn index(&self, n: usize, k1: usize, k2: usize) -> usize {
        (n * self.spin_dim() + k1) * self.spin_dim() + k2
    }

    fn parity(&self, x: usize) -> usize {
        let s = self.spin_dim();
        (x / (s * s) + (x / s) % s + x % s) % 2
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::with_budget(self.params.with_kappa(kappa), self.n_atoms, self.fock_cutoff, self.budget)
    }
}

fn annihilation(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |r, c| if c == r + 1 { C64::new((c as f64).sqrt(), 0.0) } else { ZERO })
}

/// (J₊, J_z) for spin j = N/2 in the basis m = −j, …, j.
fn spin_ops(n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let j = n as f64 / 2.0;
    let jp = ComplexMatrix::from_fn(n + 1, n + 1, |r, c| {
        let m = -j + c as f64;
        if r == c + 1 {
            C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let jz = ComplexMatrix::from_diag(&(0..=n).map(|k| C64::new(-j + k as f64, 0.0)).collect::<Vec<_>>());
    (jp, jz)
}

/// Operators on the full space: (a, J₊ of condensate 1, J₊ of condensate 2,
/// J_z of 1, J_z of 2).
pub struct FiniteOperators {
    pub a: ComplexMatrix,
    pub jp1: ComplexMatrix,
    pub jp2: ComplexMatrix,
    pub jz1: ComplexMatrix,
    pub jz2: ComplexMatrix,
}

pub fn operators(fm: &FiniteModel) -> FiniteOperators {
    let ic = ComplexMatrix::identity(fm.fock_cutoff + 1);
    let is = ComplexMatrix::identity(fm.spin_dim());
    let (jp, jz) = spin_ops(fm.n_atoms);
    let a = annihilation(fm.fock_cutoff + 1).kron(&is).kron(&is);
    FiniteOperators {
        a,
        jp1: ic.kron(&jp).kron(&is),
        jp2: ic.kron(&is).kron(&jp),
        jz1: ic.kron(&jz).kron(&is),
        jz2: ic.kron(&is).kron(&jz),
    }
}

/// ωa†a + ω₀(J_z,1 + J_z,2) + N^{-1/2}[λ_D(a + a†)(J_x,1 + J_x,2)
/// + iλ_S(a − a†)(J_x,1 − J_x,2)] with J_x = J₊ + J₋.
pub fn hamiltonian(fm: &FiniteModel) -> ComplexMatrix {
    let p = &fm.params;
    let o = operators(fm);
    let ad = o.a.adjoint();
    let jx1 = &o.jp1 + &o.jp1.adjoint();
    let jx2 = &o.jp2 + &o.jp2.adjoint();
    let g = 1.0 / (fm.n_atoms as f64).sqrt();
    let num = ad.matmul(&o.a);
    let mut h = num.scale_re(p.omega);
    h = &h + &(&o.jz1 + &o.jz2).scale_re(p.omega0);
    h = &h + &(&o.a + &ad).matmul(&(&jx1 + &jx2)).scale_re(g * p.lambda_d);
    h = &h + &(&o.a - &ad).matmul(&(&jx1 - &jx2)).scale(C64::new(0.0, g * p.lambda_s));
    h
}

type Sparse = Vec<Vec<(usize, C64)>>;

/// Nonzeros of each row.
fn rows_of(m: &ComplexMatrix) -> Sparse {
    (0..m.rows()).map(|r| (0..m.cols()).filter_map(|c| (m[(r, c)] != ZERO).then(|| (c, m[(r, c)]))).collect()).collect()
}

struct Generator {
    h: Sparse,
    a: Sparse,
    n: Sparse,
    /// transposes, for right multiplication
    ht: Sparse,
    at_conj: Sparse,
    nt: Sparse,
    kappa: f64,
}

impl Generator {
    fn new(h: &ComplexMatrix, a: &ComplexMatrix, kappa: f64) -> Self {
        let n = a.adjoint().matmul(a);
        Self {
            h: rows_of(h),
            a: rows_of(a),
            n: rows_of(&n),
            ht: rows_of(&h.transpose()),
            at_conj: rows_of(&a.conj()),
            nt: rows_of(&n.transpose()),
            kappa,
        }
    }

    /// Row (x, y) of ℒ_χ as a sparse list over columns (x', y').
    fn row(&self, x: usize, y: usize, chi: f64, out: &mut Vec<((usize, usize), C64)>) {
        out.clear();
        let i = C64::new(0.0, 1.0);
        // −i H ρ + i ρ H
        for &(xp, v) in &self.h[x] {
            out.push(((xp, y), -i * v));
        }
        for &(yp, v) in &self.ht[y] {
            out.push(((x, yp), i * v));
        }
        // κ(2 e^{−iχ} a ρ a† − a†a ρ − ρ a†a)
        let jump = C64::from_polar(2.0 * self.kappa, -chi);
        for &(xp, va) in &self.a[x] {
            for &(yp, vb) in &self.at_conj[y] {
                out.push(((xp, yp), jump * va * vb));
            }
        }
        for &(xp, v) in &self.n[x] {
            out.push(((xp, y), -self.kappa * v));
        }
        for &(yp, v) in &self.nt[y] {
            out.push(((x, yp), -self.kappa * v));
        }
    }
}

/// Row-major vectorized superoperator restricted to `pairs` (which must be
/// invariant under the generator).
fn assemble(g: &Generator, d: usize, pairs: &[(usize, usize)], chi: f64) -> ComplexMatrix {
    let mut pos = vec![usize::MAX; d * d];
    for (k, &(x, y)) in pairs.iter().enumerate() {
        pos[x * d + y] = k;
    }
    let m = pairs.len();
    let mut out = ComplexMatrix::zeros(m, m);
    let mut row = Vec::new();
    for (r, &(x, y)) in pairs.iter().enumerate() {
        g.row(x, y, chi, &mut row);
        for &((xp, yp), v) in &row {
            let c = pos[xp * d + yp];
            debug_assert!(c != usize::MAX, "generator leaks out of parity block");
            out[(r, c)] += v;
        }
    }
    out
}

fn generator(fm: &FiniteModel) -> Generator {
    Generator::new(&hamiltonian(fm), &operators(fm).a, fm.params.kappa)
}

fn all_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|x| (0..d).map(move |y| (x, y))).collect()
}

/// Index pairs (x, y) of the even (s = 0) or odd (s = 1) block.
fn parity_pairs(fm: &FiniteModel, s: usize) -> Vec<(usize, usize)> {
    let d = fm.dims();
    all_pairs(d).into_iter().filter(|&(x, y)| (fm.parity(x) + fm.parity(y)) % 2 == s).collect()
}

/// Full dims² × dims² matrix of ℒ.
pub fn build_finite_liouvillian(fm: &FiniteModel) -> Result<ComplexMatrix> {
    deform_with_counting_field(fm, 0.0)
}

/// ℒ with the jump term 2κ aρa† weighted by e^{−iχ}.
pub fn deform_with_counting_field(fm: &FiniteModel, chi: f64) -> Result<ComplexMatrix> {
    check_budget(fm)?;
    let d = fm.dims();
    Ok(assemble(&generator(fm), d, &all_pairs(d), chi))
}

fn check_budget(fm: &FiniteModel) -> Result<()> {
    let needed = fm.dims() * fm.dims();
    if needed > fm.budget {
        return Err(Error::DimensionBudgetExceeded { needed, budget: fm.budget });
    }
    Ok(())
}

/// Even and odd parity blocks of ℒ_χ with their (x, y) labels.
pub fn parity_blocks(fm: &FiniteModel, chi: f64) -> Result<[(Vec<(usize, usize)>, ComplexMatrix); 2]> {
    check_budget(fm)?;
    let g = generator(fm);
    let d = fm.dims();
    let mk = |s| {
        let pairs = parity_pairs(fm, s);
        let m = assemble(&g, d, &pairs, chi);
        (pairs, m)
    };
    Ok([mk(0), mk(1)])
}

/// Whole spectrum, from both parity blocks, sorted by real part descending
/// and then imaginary part ascending.
pub fn finite_spectrum(fm: &FiniteModel) -> Result<Vec<C64>> {
    let mut ev = Vec::with_capacity(fm.dims() * fm.dims());
    for (_, m) in parity_blocks(fm, 0.0)? {
        ev.extend(eigenvalues(&m)?);
    }
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// Trace-one stationary state from the even block with one equation
/// replaced by the trace condition.
pub fn stationary_state(fm: &FiniteModel) -> Result<ComplexMatrix> {
    let [(pairs, m), _] = parity_blocks(fm, 0.0)?;
    let n = pairs.len();
    let mut sys = m.clone();
    let mut rhs = ComplexMatrix::zeros(n, 1);
    // first row belongs to (0, 0); replace it by tr ρ = 1
    let r0 = 0;
    for (c, &(x, y)) in pairs.iter().enumerate() {
        sys[(r0, c)] = if x == y { C64::new(1.0, 0.0) } else { ZERO };
    }
    rhs[(r0, 0)] = C64::new(1.0, 0.0);
    let v = sys.solve(&rhs)?;
    let d = fm.dims();
    let mut rho = ComplexMatrix::zeros(d, d);
    for (k, &(x, y)) in pairs.iter().enumerate() {
        rho[(x, y)] = v[(k, 0)];
    }
    Ok(rho)
}

/// Eigenvalue of the even block of ℒ_χ closest to zero.
pub fn leading_eigenvalue(fm: &FiniteModel, chi: f64) -> Result<C64> {
    let [(_, m), _] = parity_blocks(fm, chi)?;
    let ev = eigenvalues(&m)?;
    ev.into_iter().min_by(|a, b| a.norm().total_cmp(&b.norm())).ok_or(Error::NonConvergence)
}

/// Mean photon emission rate i ∂λ₀/∂χ at χ = 0, by central difference.
pub fn photon_current(fm: &FiniteModel) -> Result<f64> {
    let lp = leading_eigenvalue(fm, COUNTING_STEP)?;
    let lm = leading_eigenvalue(fm, -COUNTING_STEP)?;
    Ok((C64::new(0.0, 1.0) * (lp - lm) / (2.0 * COUNTING_STEP)).re)
}

/// First-order eigenvalue of one mode of the degenerate zero-eigenvalue
/// subspace at strong loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeMode {
    /// (n₊, n₋, m₊, m₋)
    pub occupations: [u32; 4],
    pub lambda1: C64,
}

fn raised_spin_state(fm: &FiniteModel, o: &FiniteOperators, n1: u32, n2: u32) -> Result<Vec<C64>> {
    if n1 as usize > fm.n_atoms || n2 as usize > fm.n_atoms {
        return Err(Error::InvalidParams(format!("occupation exceeds spin ladder of length {}", fm.n_atoms)));
    }
    let mut v = vec![ZERO; fm.dims()];
    v[fm.index(0, 0, 0)] = C64::new(1.0, 0.0);
    for _ in 0..n1 {
        v = o.jp1.mul_vec(&v);
    }
    for _ in 0..n2 {
        v = o.jp2.mul_vec(&v);
    }
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(v.into_iter().map(|z| z / nrm).collect())
}

fn outer(u: &[C64], v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
}

/// M_jk = −i tr(σ_j† [H, ρ_k]) over the given modes, with
/// ρ_k = A^{n}|vac⟩⟨vac|⊗|↓↓⟩⟨↓↓|A^{m}† and σ_j = A^{n}(𝟙_c⊗|↓↓⟩⟨↓↓|)A^{m}†,
/// both built from unit spin vectors so that tr(σ_j† ρ_k) = δ_jk.
pub fn splitting_matrix(fm: &FiniteModel, modes: &[[u32; 4]]) -> Result<ComplexMatrix> {
    let o = operators(fm);
    let h = hamiltonian(fm);
    let d = fm.dims();
    let sc = fm.spin_dim() * fm.spin_dim();
    let cavity_vac: Vec<bool> = (0..d).map(|x| x < sc).collect();
    let mut rhos = Vec::with_capacity(modes.len());
    let mut sigmas = Vec::with_capacity(modes.len());
    for m in modes {
        let ket = raised_spin_state(fm, &o, m[0], m[1])?;
        let bra = raised_spin_state(fm, &o, m[2], m[3])?;
        rhos.push(outer(&ket, &bra));
        // 𝟙_c ⊗ |s⟩⟨s'|: copy the spin block onto every Fock level
        let s = outer(&ket, &bra);
        sigmas.push(ComplexMatrix::from_fn(d, d, |r, c| {
            if r / sc == c / sc {
                s[(r % sc, c % sc)]
            } else {
                ZERO
            }
        }));
    }
    debug_assert!(rhos.iter().all(|r| (0..d).all(|x| cavity_vac[x] || r.row(x).iter().all(|z| *z == ZERO))));
    let i = C64::new(0.0, 1.0);
    let mut out = ComplexMatrix::zeros(modes.len(), modes.len());
    for (k, rho) in rhos.iter().enumerate() {
        let comm = &h.matmul(rho) - &rho.matmul(&h);
        for (j, sigma) in sigmas.iter().enumerate() {
            out[(j, k)] = -i * sigma.adjoint().matmul(&comm).trace();
        }
    }
    Ok(out)
}

pub fn perturbative_splitting(fm: &FiniteModel, modes: &[[u32; 4]]) -> Result<Vec<PerturbativeMode>> {
    let m = splitting_matrix(fm, modes)?;
    Ok(modes.iter().enumerate().map(|(k, &occupations)| PerturbativeMode { occupations, lambda1: m[(k, k)] }).collect())
}

/// Doubles the Fock cutoff from `fm.fock_cutoff` until the `count` slowest
/// eigenvalues move by less than `tol`. Returns the converged model and its
/// spectrum.
pub fn converge_fock_cutoff(fm: &FiniteModel, count: usize, tol: f64) -> Result<(FiniteModel, Vec<C64>)> {
    let mut cur = *fm;
    let mut spec = finite_spectrum(&cur)?;
    loop {
        let next = FiniteModel::with_budget(cur.params, cur.n_atoms, (cur.fock_cutoff.max(1)) * 2, cur.budget)?;
        let nspec = finite_spectrum(&next)?;
        let moved = spec
            .iter()
            .take(count)
            .map(|z| nspec.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        if moved < tol {
            return Ok((next, nspec));
        }
        cur = next;
        spec = nspec;
    }
}

/// Right eigenvectors of the even block reshaped into operators; used by
/// diagnostics that need the slow modes themselves.
pub fn even_block_modes(fm: &FiniteModel) -> Result<Vec<(C64, ComplexMatrix)>> {
    let [(pairs, m), _] = parity_blocks(fm, 0.0)?;
    let e = eig_unchecked(&m)?;
    let d = fm.dims();
    Ok(e.values
        .iter()
        .enumerate()
        .map(|(k, &lam)| {
            let mut rho = ComplexMatrix::zeros(d, d);
            for (r, &(x, y)) in pairs.iter().enumerate() {
                rho[(x, y)] = e.vectors[(r, k)];
            }
            (lam, rho)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn model(n: usize, nmax: usize, ld: f64, ls: f64, kappa: f64) -> FiniteModel {
        FiniteModel::new(ModelParams::new(46.0, 7.4, ld, ls, kappa, n as f64).unwrap(), n, nmax).unwrap()
    }

    /// Dense kron route: −i(H⊗I − I⊗Hᵀ) + κ(2 a⊗a* − a†a⊗I − I⊗(a†a)ᵀ).
    fn dense_oracle(fm: &FiniteModel) -> ComplexMatrix {
        let h = hamiltonian(fm);
        let a = operators(fm).a;
        let n = a.adjoint().matmul(&a);
        let id = ComplexMatrix::identity(fm.dims());
        let k = fm.params.kappa;
        let i = c(0.0, 1.0);
        let unitary = (&h.kron(&id) - &id.kron(&h.transpose())).scale(-i);
        let diss = &(&a.kron(&a.conj()).scale_re(2.0) - &n.kron(&id)) - &id.kron(&n.transpose());
        &unitary + &diss.scale_re(k)
    }

    #[test]
    fn matches_dense_construction() {
        let fm = model(1, 2, 3.0, 2.0, 5.0);
        let l = build_finite_liouvillian(&fm).unwrap();
        assert!((&l - &dense_oracle(&fm)).max_abs() < 1e-13);
    }

    #[test]
    fn trace_preserving_and_unital_adjoint() {
        let fm = model(2, 2, 3.0, 2.0, 5.0);
        let l = build_finite_liouvillian(&fm).unwrap();
        let d = fm.dims();
        // ⟨⟨𝟙| ℒ = 0 ⇔ ℒ†(𝟙) = 0
        let mut worst: f64 = 0.0;
        for col in 0..d * d {
            let s: C64 = (0..d).map(|x| l[(x * d + x, col)]).sum();
            worst = worst.max(s.norm());
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn hermiticity_preserving() {
        let fm = model(1, 2, 3.0, 2.0, 5.0);
        let l = build_finite_liouvillian(&fm).unwrap();
        let d = fm.dims();
        let rho = ComplexMatrix::from_fn(d, d, |r, s| c((r + 2 * s) as f64 * 0.1, 0.0) + c(0.0, (r as f64 - s as f64) * 0.05));
        let rho = (&rho + &rho.adjoint()).scale_re(0.5);
        let out = l.mul_vec(rho.as_slice());
        let out = ComplexMatrix::new(d, d, out).unwrap();
        assert!(out.is_hermitian(1e-12));
    }

    #[test]
    fn smallest_model_has_zero_eigenvalue() {
        let fm = model(1, 1, 3.0, 2.0, 5.0);
        assert_eq!(fm.dims(), 8);
        let ev = finite_spectrum(&fm).unwrap();
        assert_eq!(ev.len(), 64);
        assert!(ev[0].norm() < 1e-10, "{}", ev[0]);
        assert!(ev.iter().all(|z| z.re <= 1e-10));
    }

    #[test]
    fn parity_blocks_reproduce_full_spectrum() {
        let fm = model(1, 2, 3.0, 2.0, 5.0);
        let full = eigenvalues(&build_finite_liouvillian(&fm).unwrap()).unwrap();
        let blocks = finite_spectrum(&fm).unwrap();
        assert_eq!(full.len(), blocks.len());
        for z in &full {
            let d = blocks.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-8, "{z}");
        }
    }

    #[test]
    fn decoupled_lattice() {
        let fm = model(1, 2, 0.0, 0.0, 3.0);
        let ev = finite_spectrum(&fm).unwrap();
        // −κ(n + m) − iω(n − m) − iω₀Δ, with Δ the spin projection difference
        for z in &ev {
            let mut ok = false;
            for n in 0..=2i32 {
                for m in 0..=2i32 {
                    for dl in -2..=2i32 {
                        let want = c(-3.0 * (n + m) as f64, -46.0 * (n - m) as f64 - 7.4 * dl as f64);
                        ok |= (z - want).norm() < 1e-9;
                    }
                }
            }
            assert!(ok, "{z}");
        }
    }

    #[test]
    fn closed_limit_is_imaginary() {
        let fm = model(2, 2, 3.0, 2.0, 0.0);
        let ev = finite_spectrum(&fm).unwrap();
        assert!(ev.iter().all(|z| z.re.abs() < 1e-10), "{}", ev[0]);
    }

    #[test]
    fn spectrum_is_conjugation_symmetric() {
        let fm = model(2, 2, 3.0, 2.0, 5.0);
        let ev = finite_spectrum(&fm).unwrap();
        for z in &ev {
            let d = ev.iter().map(|w| (z.conj() - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let p = ModelParams::new(46.0, 7.4, 1.0, 1.0, 5.0, 1.0).unwrap();
        let e = FiniteModel::new(p, 4, 4).unwrap_err();
        assert_eq!(e, Error::DimensionBudgetExceeded { needed: 125 * 125, budget: DEFAULT_SUPEROP_BUDGET });
        assert!(FiniteModel::with_budget(p, 4, 4, 125 * 125).is_ok());
    }

    #[test]
    fn stationary_state_is_a_density_matrix() {
        let fm = model(1, 3, 3.0, 2.0, 5.0);
        let rho = stationary_state(&fm).unwrap();
        assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-12);
        assert!(rho.is_hermitian(1e-10));
        let l = build_finite_liouvillian(&fm).unwrap();
        let r = l.mul_vec(rho.as_slice());
        assert!(r.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
        let ev = eigenvalues(&rho).unwrap();
        assert!(ev.iter().all(|z| z.re > -1e-10));
    }

    #[test]
    fn counting_field_at_zero_is_undeformed() {
        let fm = model(1, 2, 3.0, 2.0, 5.0);
        assert_eq!(deform_with_counting_field(&fm, 0.0).unwrap(), build_finite_liouvillian(&fm).unwrap());
    }

    /// The emission rate equals 2κ⟨a†a⟩ in the stationary state.
    #[test]
    fn current_matches_stationary_photon_number() {
        let fm = model(1, 4, 8.0, 5.0, 6.0);
        let rho = stationary_state(&fm).unwrap();
        let a = operators(&fm).a;
        let n = a.adjoint().matmul(&a).matmul(&rho).trace().re;
        let j = photon_current(&fm).unwrap();
        assert!(n > 1e-4);
        assert!((j - 2.0 * 6.0 * n).abs() < 1e-6 * (1.0 + j.abs()), "{j} vs {}", 12.0 * n);
    }

    /// Driven damped cavity, H = ωa†a + ε(a + a†): ⟨a†a⟩ = ε²/(κ² + ω²).
    #[test]
    fn driven_cavity_current_closed_form() {
        let (w, eps, k, nmax) = (2.0, 0.3, 1.5, 12usize);
        let a = annihilation(nmax + 1);
        let h = &a.adjoint().matmul(&a).scale_re(w) + &(&a + &a.adjoint()).scale_re(eps);
        let g = Generator::new(&h, &a, k);
        let d = nmax + 1;
        let lam0 = |chi: f64| {
            let m = assemble(&g, d, &all_pairs(d), chi);
            eigenvalues(&m).unwrap().into_iter().min_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap()
        };
        let j = (c(0.0, 1.0) * (lam0(COUNTING_STEP) - lam0(-COUNTING_STEP)) / (2.0 * COUNTING_STEP)).re;
        let want = 2.0 * k * eps * eps / (k * k + w * w);
        assert!((j - want).abs() < 1e-6, "{j} vs {want}");
    }

    #[test]
    fn unsplit_stationary_mode() {
        let fm = model(2, 2, 1.0, 1.0, 740.0);
        let m = perturbative_splitting(&fm, &[[0, 0, 0, 0]]).unwrap();
        assert!(m[0].lambda1.norm() < 1e-12);
    }

    /// ρ⁽⁰⁾ with one raised spin on the ket side precesses at ω₀; two raised
    /// quanta at twice that.
    #[test]
    fn splitting_is_ladder_of_omega0() {
        let fm = model(2, 2, 3.0, 2.0, 740.0);
        let modes = [[1, 0, 0, 0], [2, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 1], [0, 0, 1, 0]];
        let m = perturbative_splitting(&fm, &modes).unwrap();
        let want = [-1.0, -2.0, -1.0, -1.0, 1.0];
        for (pm, w) in m.iter().zip(want) {
            assert!(pm.lambda1.re.abs() < 1e-10);
            assert!((pm.lambda1.im - w * 7.4).abs() < 1e-10, "{:?}", pm);
        }
        let full = splitting_matrix(&fm, &modes).unwrap();
        for j in 0..modes.len() {
            for k in 0..modes.len() {
                if j != k {
                    assert!(full[(j, k)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn occupation_outside_ladder_rejected() {
        let fm = model(1, 1, 1.0, 1.0, 10.0);
        assert!(perturbative_splitting(&fm, &[[2, 0, 0, 0]]).is_err());
    }
}
