//! Gaussian moment dynamics, spin observables and the semiclassical limit.
//!
//! Moments refer to the fluctuation vector v = (a, b₁, b₂, a†, b₁†, b₂†)
//! around a branch. `second` holds symmetrized raw moments ½⟨{v_r, v_s}⟩.

mod observables;
mod semiclassical;
pub mod signal;

pub use observables::{spin_observables, spin_squeezing_y, spin_squeezing_y_on, SpinObservables};
pub use semiclassical::{integrate_semiclassical, semiclassical_rhs, SemiclassicalState, SemiclassicalTrajectory, SemiclassicalVariant};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{integrate_ode, ComplexMatrix, OdeOptions, OdeStatus};
use crate::model::{build_normal_liouvillian, ModelParams, QuadraticLiouvillian};

/// Default seed ⟨a(0)⟩.
pub const DEFAULT_SEED_AMPLITUDE: f64 = 0.1;
/// Magnitude at which a trajectory is cut and flagged as diverged.
pub const OVERFLOW_GUARD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    pub first: [C64; 6],
    pub second: ComplexMatrix,
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct MomentTrajectory {
    pub states: Vec<MomentState>,
    pub status: OdeStatus,
}

impl MomentTrajectory {
    pub fn diverged(&self) -> bool {
        self.status != OdeStatus::Complete
    }
}

/// Commutator pairing P with P_{r,s} = 1 for (a_i, a_i†) pairs.
pub fn pairing_matrix() -> ComplexMatrix {
    ComplexMatrix::from_fn(6, 6, |r, s| if (r + 3 == s) || (s + 3 == r) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn conj_partner(r: usize) -> usize {
    (r + 3) % 6
}

impl MomentState {
    /// Product of vacua with coherent amplitudes `first` (only the
    /// annihilator entries are read; creators are set to conjugates).
    pub fn coherent(mean: [C64; 3]) -> Self {
        let mut first = [C64::new(0.0, 0.0); 6];
        for i in 0..3 {
            first[i] = mean[i];
            first[i + 3] = mean[i].conj();
        }
        let p = pairing_matrix().scale_re(0.5);
        let second = ComplexMatrix::from_fn(6, 6, |r, s| p[(r, s)] + first[r] * first[s]);
        Self { first, second, time: 0.0 }
    }

    /// Vacuum with ⟨a⟩ = `seed`.
    pub fn seeded(seed: f64) -> Self {
        Self::coherent([C64::new(seed, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)])
    }

    /// Coherent cavity seed plus a minimum-uncertainty squeeze with
    /// connected ⟨δa δa⟩ = `pair`; ⟨δa†δa⟩ = n with n(n+1) = |pair|².
    pub fn squeezed_cavity(seed: f64, pair: C64) -> Self {
        let mut s = Self::seeded(seed);
        let n = 0.5 * ((1.0 + 4.0 * pair.norm_sqr()).sqrt() - 1.0);
        s.second[(0, 0)] += pair;
        s.second[(3, 3)] += pair.conj();
        s.second[(0, 3)] += C64::new(n, 0.0);
        s.second[(3, 0)] += C64::new(n, 0.0);
        s
    }

    /// Connected symmetric covariance ½⟨{v_r, v_s}⟩ − ⟨v_r⟩⟨v_s⟩.
    pub fn connected(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(6, 6, |r, s| self.second[(r, s)] - self.first[r] * self.first[s])
    }

    /// Largest violation of ⟨v†⟩ = ⟨v⟩* and the matching block relation.
    pub fn conjugation_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..6 {
            d = d.max((self.first[conj_partner(r)] - self.first[r].conj()).norm());
            for s in 0..6 {
                d = d.max((self.second[(conj_partner(r), conj_partner(s))] - self.second[(r, s)].conj()).norm());
            }
        }
        d
    }

    /// Smallest eigenvalue of M_rs = ⟨δv_r† δv_s⟩, which is ⪰ 0 for every
    /// physical state (δv = v − ⟨v⟩).
    pub fn uncertainty_min_eigenvalue(&self) -> Result<f64> {
        let c = self.connected();
        let m = ComplexMatrix::from_fn(6, 6, |r, s| {
            let comm = match (r == s, r < 3) {
                (true, true) => -0.5,
                (true, false) => 0.5,
                _ => 0.0,
            };
            c[(conj_partner(r), s)] + C64::new(comm, 0.0)
        });
        let herm = (&m + &m.adjoint()).scale_re(0.5);
        let ev = crate::linalg::eigenvalues(&herm)?;
        Ok(ev.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
    }
}

/// Drift A and symmetric-moment diffusion D, so that d⟨v⟩/dt = A⟨v⟩ and
/// dS/dt = AS + SAᵀ + D.
///
/// A = [[−ih − m, −2ik*], [2ik, ih* − m]] (equal to −2Xᵀ), and
/// D = 2Y − ½(AP + PAᵀ) with the pairing block Y of the structure matrices.
pub fn drift_and_diffusion(l: &QuadraticLiouvillian) -> (ComplexMatrix, ComplexMatrix) {
    let i = C64::new(0.0, 1.0);
    let a = ComplexMatrix::from_blocks(
        &(&l.h.scale(-i) - &l.m),
        &l.k.conj().scale(-2.0 * i),
        &l.k.scale(2.0 * i),
        &(&l.h.conj().scale(i) - &l.m.conj()),
    );
    let z = ComplexMatrix::zeros(3, 3);
    let y2 = ComplexMatrix::from_blocks(&l.k.conj().scale(-2.0 * i), &z, &z, &l.k.scale(2.0 * i));
    let p = pairing_matrix();
    let d = &y2 - &(&a.matmul(&p) + &p.matmul(&a.transpose())).scale_re(0.5);
    (a, d)
}

/// Integrates first and symmetric second moments, sampled every
/// `dt_sample` from `init.time` to `t_end`.
pub fn evolve_moments(
    a_drift: &ComplexMatrix,
    d_diffusion: &ComplexMatrix,
    init: &MomentState,
    t_end: f64,
    dt_sample: f64,
) -> Result<MomentTrajectory> {
    evolve_moments_with(a_drift, d_diffusion, init, t_end, dt_sample, 1e-10)
}

pub fn evolve_moments_with(
    a_drift: &ComplexMatrix,
    d_diffusion: &ComplexMatrix,
    init: &MomentState,
    t_end: f64,
    dt_sample: f64,
    tol: f64,
) -> Result<MomentTrajectory> {
    if a_drift.rows() != 6 || !a_drift.is_square() || d_diffusion.rows() != 6 || !d_diffusion.is_square() {
        return Err(Error::Shape("drift and diffusion must be 6x6".into()));
    }
    if !(dt_sample > 0.0) || !(t_end >= init.time) {
        return Err(Error::InvalidParams("need dt_sample > 0 and t_end >= start".into()));
    }
    let t0 = init.time;
    let n_samples = ((t_end - t0) / dt_sample + 1e-9).floor() as usize + 1;
    let samples: Vec<f64> = (0..n_samples).map(|k| (t0 + k as f64 * dt_sample).min(t_end)).collect();
    let mut y0 = Vec::with_capacity(42);
    y0.extend_from_slice(&init.first);
    y0.extend_from_slice(init.second.as_slice());
    let av = a_drift.as_slice().to_vec();
    let dv = d_diffusion.as_slice().to_vec();
    let rhs = |_t: f64, y: &[C64], dy: &mut [C64]| {
        for r in 0..6 {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..6 {
                acc += av[r * 6 + c] * y[c];
            }
            dy[r] = acc;
        }
        let s = &y[6..];
        for r in 0..6 {
            for c in 0..6 {
                let mut acc = dv[r * 6 + c];
                for k in 0..6 {
                    acc += av[r * 6 + k] * s[k * 6 + c] + s[r * 6 + k] * av[c * 6 + k];
                }
                dy[6 + r * 6 + c] = acc;
            }
        }
    };
    let opts = OdeOptions { tol, overflow_guard: OVERFLOW_GUARD, ..OdeOptions::default() };
    let traj = integrate_ode(rhs, &y0, (t0, t_end), &samples, opts);
    if let OdeStatus::StepUnderflow { t } = traj.status {
        if traj.states.is_empty() {
            return Err(Error::StepUnderflow { t });
        }
    }
    let states = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, y)| {
            let mut first = [C64::new(0.0, 0.0); 6];
            first.copy_from_slice(&y[..6]);
            MomentState { first, second: ComplexMatrix::new(6, 6, y[6..].to_vec()).unwrap_or_else(|_| ComplexMatrix::zeros(6, 6)), time: t }
        })
        .collect();
    Ok(MomentTrajectory { states, status: traj.status })
}

/// Cavity eliminated from the one-point drift: with the (a, a†) rows set
/// to zero, returns the 4×4 drift over (b₁, b₂, b₁†, b₂†).
pub fn adiabatic_eliminate(p: &ModelParams) -> Result<ComplexMatrix> {
    let (a, _) = drift_and_diffusion(&build_normal_liouvillian(p));
    let fast = [0usize, 3];
    let slow = [1usize, 2, 4, 5];
    let aff = ComplexMatrix::from_fn(2, 2, |r, c| a[(fast[r], fast[c])]);
    let afs = ComplexMatrix::from_fn(2, 4, |r, c| a[(fast[r], slow[c])]);
    let asf = ComplexMatrix::from_fn(4, 2, |r, c| a[(slow[r], fast[c])]);
    let ass = ComplexMatrix::from_fn(4, 4, |r, c| a[(slow[r], slow[c])]);
    let x = aff.solve(&afs)?;
    Ok(&ass - &asf.matmul(&x))
}
