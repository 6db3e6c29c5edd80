//! Collective spin observables reconstructed from bosonic moments.
//!
//! J₋ = √(N − b†b) b is linearized around the branch shift B₀ = −√(N/2) β,
//! while J_z = b†b − N/2 is kept exact and its square evaluated with Gaussian
//! (Wick) factorization. `jx` and `jy` are ⟨J₊ + J₋⟩ and ⟨(J₊ − J₋)/i⟩.

use num_complex::Complex64 as C64;

use super::MomentState;
use crate::error::{Error, Result};
use crate::model::{MeanFieldBranch, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinObservables {
    pub jx: [f64; 2],
    pub jy: [f64; 2],
    pub jz: [f64; 2],
    /// ⟨J_{x,+} J_{x,−}⟩_c
    pub xx_connected: f64,
    /// ⟨J_{x,+} J_{y,−}⟩_c
    pub xy_connected: f64,
    pub xi_y: [f64; 2],
}

/// Linear form c + u₀ δb + u₁ δb† of one spin component.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Linear {
    pub c: C64,
    pub u: [C64; 2],
}

pub(crate) struct Condensate {
    pub jx: Linear,
    pub jy: Linear,
    /// mode index of δb in the moment vector
    pub idx: usize,
    pub shift: C64,
}

pub(crate) fn condensate(p: &ModelParams, b: &MeanFieldBranch, which: usize) -> Condensate {
    let n = p.n_atoms;
    let beta = b.betas()[which];
    let b0 = -(n / 2.0).sqrt() * beta;
    let r = (n - b0.norm_sqr()).max(0.0).sqrt();
    let jm0 = b0 * r;
    let d1 = C64::new(r - b0.norm_sqr() / (2.0 * r), 0.0);
    let d2 = -b0 * b0 / (2.0 * r);
    let i = C64::new(0.0, 1.0);
    let jx = Linear { c: jm0 + jm0.conj(), u: [d1 + d2.conj(), d2 + d1.conj()] };
    let jy = Linear { c: -i * (jm0.conj() - jm0), u: [-i * (d2.conj() - d1), -i * (d1.conj() - d2)] };
    Condensate { jx, jy, idx: which + 1, shift: b0 }
}

fn pair(ms: &MomentState, idx: usize) -> [usize; 2] {
    let _ = ms;
    [idx, idx + 3]
}

fn mean(ms: &MomentState, l: &Linear, idx: usize) -> C64 {
    let [r, s] = pair(ms, idx);
    l.c + l.u[0] * ms.first[r] + l.u[1] * ms.first[s]
}

/// Connected covariance of two linear forms.
fn cov(ms: &MomentState, l1: &Linear, i1: usize, l2: &Linear, i2: usize) -> C64 {
    let c = ms.connected();
    let a = pair(ms, i1);
    let b = pair(ms, i2);
    let mut acc = C64::new(0.0, 0.0);
    for x in 0..2 {
        for y in 0..2 {
            acc += l1.u[x] * l2.u[y] * c[(a[x], b[y])];
        }
    }
    acc
}

/// (⟨J_z⟩, Var J_z) with J_z = b†b − N/2 and b = B₀ + δb Gaussian.
fn jz_moments(ms: &MomentState, p: &ModelParams, cd: &Condensate) -> (f64, f64) {
    let c = ms.connected();
    let j = cd.idx;
    let bt = cd.shift + ms.first[j];
    let n = c[(j + 3, j)].re - 0.5;
    let s = c[(j, j)];
    let mean = bt.norm_sqr() + n - p.n_atoms / 2.0;
    let var = (bt.conj() * bt.conj() * s + bt * bt * s.conj()).re + bt.norm_sqr() * (2.0 * n + 1.0) + s.norm_sqr() + n * (n + 1.0);
    (mean, var)
}

fn squeezing(ms: &MomentState, p: &ModelParams, cd: &Condensate) -> Result<f64> {
    let (jz, var_z) = jz_moments(ms, p, cd);
    let var_y = cov(ms, &cd.jy, cd.idx, &cd.jy, cd.idx).re;
    let mx = mean(ms, &cd.jx, cd.idx).re;
    let x2 = mx * mx + cov(ms, &cd.jx, cd.idx, &cd.jx, cd.idx).re;
    // spin components S = J/2 for the transverse directions
    let den = var_z + jz * jz + 0.25 * x2;
    let n = p.n_atoms;
    if !(den >= 1e-12 * n * n) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(n * 0.25 * var_y / den)
}

pub fn spin_observables(ms: &MomentState, p: &ModelParams, b: &MeanFieldBranch) -> Result<SpinObservables> {
    let c1 = condensate(p, b, 0);
    let c2 = condensate(p, b, 1);
    let mut out = SpinObservables { jx: [0.0; 2], jy: [0.0; 2], jz: [0.0; 2], xx_connected: 0.0, xy_connected: 0.0, xi_y: [0.0; 2] };
    for (k, cd) in [&c1, &c2].into_iter().enumerate() {
        out.jx[k] = mean(ms, &cd.jx, cd.idx).re;
        out.jy[k] = mean(ms, &cd.jy, cd.idx).re;
        out.jz[k] = jz_moments(ms, p, cd).0;
        out.xi_y[k] = squeezing(ms, p, cd)?;
    }
    out.xx_connected = cov(ms, &c1.jx, c1.idx, &c2.jx, c2.idx).re;
    out.xy_connected = cov(ms, &c1.jx, c1.idx, &c2.jy, c2.idx).re;
    Ok(out)
}

/// (ξ_{y,+}, ξ_{y,−}) = N (ΔS_y)² / (⟨S_z²⟩ + ⟨S_x²⟩) around the normal branch.
pub fn spin_squeezing_y(ms: &MomentState, p: &ModelParams) -> Result<(f64, f64)> {
    spin_squeezing_y_on(ms, p, &MeanFieldBranch::normal())
}

pub fn spin_squeezing_y_on(ms: &MomentState, p: &ModelParams, b: &MeanFieldBranch) -> Result<(f64, f64)> {
    Ok((squeezing(ms, p, &condensate(p, b, 0))?, squeezing(ms, p, &condensate(p, b, 1))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::moments::drift_and_diffusion;
    use crate::moments::evolve_moments;
    use crate::model::build_normal_liouvillian;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_normal_branch() {
        let p = ModelParams::new(46.0, 7.4, 6.3, 7.25, 1250.0, 2000.0).unwrap();
        let o = spin_observables(&MomentState::seeded(0.0), &p, &MeanFieldBranch::normal()).unwrap();
        assert_eq!(o.jz, [-1000.0, -1000.0]);
        assert_eq!(o.jx, [0.0, 0.0]);
        assert_eq!(o.jy, [0.0, 0.0]);
        assert_eq!(o.xx_connected, 0.0);
        assert_eq!(o.xy_connected, 0.0);
    }

    /// ξ_y on the fully polarized state from explicit spin-j matrices.
    #[test]
    fn coherent_state_squeezing_from_spin_matrices() {
        for n in [1usize, 4, 10, 2000] {
            let j = n as f64 / 2.0;
            let dim = n + 1;
            // basis m = −j..j; ground state m = −j is index 0
            let mut sp = ComplexMatrix::zeros(dim, dim);
            for k in 0..dim - 1 {
                let m = -j + k as f64;
                sp[(k + 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
            }
            let sm = sp.adjoint();
            let sx = (&sp + &sm).scale_re(0.5);
            let sy = (&sp - &sm).scale(c(0.0, -0.5));
            let sz = ComplexMatrix::from_fn(dim, dim, |r, s| if r == s { c(-j + r as f64, 0.0) } else { c(0.0, 0.0) });
            let ev = |m: &ComplexMatrix| m[(0, 0)].re;
            let y2 = ev(&sy.matmul(&sy));
            let ym = ev(&sy);
            let exact = n as f64 * (y2 - ym * ym) / (ev(&sz.matmul(&sz)) + ev(&sx.matmul(&sx)));
            let p = ModelParams::new(46.0, 7.4, 0.0, 0.0, 10.0, n as f64).unwrap();
            let (xp, xm) = spin_squeezing_y(&MomentState::seeded(0.0), &p).unwrap();
            assert!((exact - n as f64 / (n as f64 + 1.0)).abs() < 1e-12);
            assert!((xp - exact).abs() < 1e-12 && (xm - exact).abs() < 1e-12, "{xp} vs {exact}");
        }
    }

    #[test]
    fn large_n_vacuum_is_unsqueezed() {
        let p = ModelParams::new(46.0, 7.4, 0.0, 0.0, 10.0, 1e9).unwrap();
        let (xp, _) = spin_squeezing_y(&MomentState::seeded(0.0), &p).unwrap();
        assert!((xp - 1.0).abs() < 1e-8);
    }

    #[test]
    fn degenerate_denominator() {
        let p = ModelParams::new(46.0, 7.4, 0.0, 0.0, 10.0, 4.0).unwrap();
        // B₀ + ⟨δb⟩ = 0 with J_z mean pushed to zero
        let mut ms = MomentState::seeded(0.0);
        ms.second = ComplexMatrix::zeros(6, 6);
        ms.second[(1, 4)] = c(2.0, 0.0);
        ms.second[(4, 1)] = c(2.0, 0.0);
        // n = 1.5, ⟨J_z⟩ = −0.5; not degenerate
        assert!(spin_squeezing_y(&ms, &p).is_ok());
        let zero = MomentState { first: [c(0.0, 0.0); 6], second: ComplexMatrix::zeros(6, 6), time: 0.0 };
        let mut ms = zero.clone();
        ms.second[(1, 4)] = c(2.5, 0.0);
        ms.second[(4, 1)] = c(2.5, 0.0);
        // n = 2 = N/2: ⟨J_z⟩ = 0, Var J_z = 6 (Wick), ⟨J_x²⟩ small but nonzero
        assert!(spin_squeezing_y(&ms, &p).is_ok());
        let p = ModelParams::new(46.0, 7.4, 0.0, 0.0, 10.0, 1.0).unwrap();
        let mut ms = zero;
        ms.second[(1, 4)] = c(1.0, 0.0);
        ms.second[(4, 1)] = c(1.0, 0.0);
        ms.second[(1, 1)] = c(0.0, 0.0);
        // n = 0.5 = N/2 and all transverse weight cancels only if u·C·u = 0
        let r = spin_squeezing_y(&ms, &p);
        assert!(r.is_ok() || r == Err(Error::DegenerateDenominator));
    }

    #[test]
    fn product_state_has_no_cross_correlation() {
        let p = ModelParams::new(46.0, 7.4, 6.3, 7.25, 1250.0, 2000.0).unwrap();
        let ms = MomentState::coherent([c(0.1, 0.0), c(0.7, -0.2), c(-0.3, 0.4)]);
        let o = spin_observables(&ms, &p, &MeanFieldBranch::normal()).unwrap();
        assert!(o.xx_connected.abs() < 1e-12 && o.xy_connected.abs() < 1e-12);
        assert!(o.jx[0].abs() > 1.0);
    }

    /// ⟨J_{x,+}J_{x,−}⟩ − ⟨J_{x,+}⟩⟨J_{x,−}⟩ assembled from raw moments.
    #[test]
    fn connected_two_ways() {
        let p = ModelParams::new(46.0, 7.4, 6.3, 7.25, 1250.0, 2000.0).unwrap();
        let (a, d) = drift_and_diffusion(&build_normal_liouvillian(&p));
        let tr = evolve_moments(&a, &d, &MomentState::seeded(0.1), 0.3, 0.1).unwrap();
        let b = MeanFieldBranch::normal();
        for ms in &tr.states {
            let o = spin_observables(ms, &p, &b).unwrap();
            let c1 = condensate(&p, &b, 0);
            let c2 = condensate(&p, &b, 1);
            let lin = |l: &Linear, i: usize| [(None, l.c), (Some(i), l.u[0]), (Some(i + 3), l.u[1])];
            let raw = |x: &Linear, i: usize, y: &Linear, j: usize| {
                let mut s = C64::new(0.0, 0.0);
                for (r, cr) in lin(x, i) {
                    for (q, cq) in lin(y, j) {
                        s += cr * cq * match (r, q) {
                            (None, None) => c(1.0, 0.0),
                            (Some(r), None) => ms.first[r],
                            (None, Some(q)) => ms.first[q],
                            (Some(r), Some(q)) => ms.second[(r, q)],
                        };
                    }
                }
                s
            };
            let mx = raw(&c1.jx, 1, &Linear { c: c(1.0, 0.0), u: [c(0.0, 0.0); 2] }, 2);
            let my = raw(&c2.jx, 2, &Linear { c: c(1.0, 0.0), u: [c(0.0, 0.0); 2] }, 1);
            let myy = raw(&c2.jy, 2, &Linear { c: c(1.0, 0.0), u: [c(0.0, 0.0); 2] }, 1);
            let xx = raw(&c1.jx, 1, &c2.jx, 2) - mx * my;
            let xy = raw(&c1.jx, 1, &c2.jy, 2) - mx * myy;
            let scale = 1.0 + xx.norm();
            assert!((xx.re - o.xx_connected).abs() < 1e-10 * scale);
            assert!((xy.re - o.xy_connected).abs() < 1e-10 * scale);
        }
    }
}
