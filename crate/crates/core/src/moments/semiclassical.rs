//! Factorized (semiclassical) equations for α = ⟨a⟩/√N, β_i = ⟨J₋⟩/N and
//! w_i = ⟨J_z⟩/N, with J_x = J₊ + J₋.

use num_complex::Complex64 as C64;

use super::OVERFLOW_GUARD;
use crate::error::{Error, Result};
use crate::linalg::{integrate_ode, OdeOptions, OdeStatus};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalState {
    pub alpha: C64,
    pub beta1: C64,
    pub beta2: C64,
    pub w1: f64,
    pub w2: f64,
}

/// Which w multiplies the λ_S term of the β₁ equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SemiclassicalVariant {
    /// w₂, as typeset.
    Printed,
    /// w₁; conserves w_i² + |β_i|² when κ = 0.
    #[default]
    Corrected,
}

impl SemiclassicalState {
    /// Both spins down with cavity amplitude `alpha`.
    pub fn polarized(alpha: C64) -> Self {
        Self { alpha, beta1: C64::new(0.0, 0.0), beta2: C64::new(0.0, 0.0), w1: -0.5, w2: -0.5 }
    }

    /// w_i² + |β_i|² for both condensates (1/4 for a full-length spin).
    pub fn spin_lengths(&self) -> [f64; 2] {
        [self.w1 * self.w1 + self.beta1.norm_sqr(), self.w2 * self.w2 + self.beta2.norm_sqr()]
    }

    /// ⟨J_x⟩/N per condensate.
    pub fn jx(&self) -> [f64; 2] {
        [2.0 * self.beta1.re, 2.0 * self.beta2.re]
    }

    fn pack(&self) -> [C64; 5] {
        [self.alpha, self.beta1, self.beta2, C64::new(self.w1, 0.0), C64::new(self.w2, 0.0)]
    }

    fn unpack(y: &[C64]) -> Self {
        Self { alpha: y[0], beta1: y[1], beta2: y[2], w1: y[3].re, w2: y[4].re }
    }
}

pub fn semiclassical_rhs(s: &SemiclassicalState, p: &ModelParams, variant: SemiclassicalVariant) -> SemiclassicalState {
    let i = C64::new(0.0, 1.0);
    let (ld, ls) = (p.lambda_d, p.lambda_s);
    let (a, b1, b2) = (s.alpha, s.beta1, s.beta2);
    let sum = a.conj() + a;
    let diff = a.conj() - a;
    let alpha = a * C64::new(-p.kappa, -p.omega) - i * ld * (b1.conj() + b2.conj() + b1 + b2) + ls * (b1.conj() - b2.conj() + b1 - b2);
    let w1 = -ls * diff * (b1 - b1.conj()) + i * ld * sum * (b1 - b1.conj());
    let w2 = ls * diff * (b2 - b2.conj()) + i * ld * sum * (b2 - b2.conj());
    let w_in_b1 = match variant {
        SemiclassicalVariant::Printed => s.w2,
        SemiclassicalVariant::Corrected => s.w1,
    };
    let beta1 = 2.0 * i * ld * s.w1 * sum - 2.0 * ls * w_in_b1 * diff - i * p.omega0 * b1;
    let beta2 = 2.0 * i * ld * s.w2 * sum + 2.0 * ls * s.w2 * diff - i * p.omega0 * b2;
    SemiclassicalState { alpha, beta1, beta2, w1: w1.re, w2: w2.re }
}

#[derive(Debug, Clone)]
pub struct SemiclassicalTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<SemiclassicalState>,
    pub status: OdeStatus,
}

/// Integrates from t = 0 to `t_end`, sampling every `dt_sample`.
pub fn integrate_semiclassical(
    init: &SemiclassicalState,
    p: &ModelParams,
    variant: SemiclassicalVariant,
    t_end: f64,
    dt_sample: f64,
    tol: f64,
) -> Result<SemiclassicalTrajectory> {
    if !(dt_sample > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidParams("need dt_sample > 0 and t_end >= 0".into()));
    }
    let n = (t_end / dt_sample + 1e-9).floor() as usize + 1;
    let samples: Vec<f64> = (0..n).map(|k| (k as f64 * dt_sample).min(t_end)).collect();
    let rhs = |_t: f64, y: &[C64], dy: &mut [C64]| {
        let d = semiclassical_rhs(&SemiclassicalState::unpack(y), p, variant);
        dy.copy_from_slice(&d.pack());
    };
    let opts = OdeOptions { tol, overflow_guard: OVERFLOW_GUARD, ..OdeOptions::default() };
    let tr = integrate_ode(rhs, &init.pack(), (0.0, t_end), &samples, opts);
    if let OdeStatus::StepUnderflow { t } = tr.status {
        if tr.states.is_empty() {
            return Err(Error::StepUnderflow { t });
        }
    }
    Ok(SemiclassicalTrajectory {
        times: tr.times,
        states: tr.states.iter().map(|y| SemiclassicalState::unpack(y)).collect(),
        status: tr.status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::signal::dominant_frequency;

    #[test]
    fn normal_fixed_point() {
        let p = ModelParams::new(46.0, 7.4, 6.3, 7.25, 1250.0, 2000.0).unwrap();
        for v in [SemiclassicalVariant::Printed, SemiclassicalVariant::Corrected] {
            let d = semiclassical_rhs(&SemiclassicalState::polarized(C64::new(0.0, 0.0)), &p, v);
            assert_eq!(d.pack(), [C64::new(0.0, 0.0); 5]);
        }
    }

    fn tilted() -> SemiclassicalState {
        let th: f64 = 2.0;
        let (s, c) = th.sin_cos();
        SemiclassicalState {
            alpha: C64::new(0.3, -0.2),
            beta1: C64::from_polar(0.5 * s, 0.4),
            beta2: C64::from_polar(0.5 * (th + 0.5).sin(), -1.1),
            w1: 0.5 * c,
            w2: 0.5 * (th + 0.5).cos(),
        }
    }

    #[test]
    fn corrected_variant_conserves_spin_length() {
        let p = ModelParams::new(3.0, 1.0, 1.2, 0.9, 0.0, 1.0).unwrap();
        let s0 = tilted();
        let tr = integrate_semiclassical(&s0, &p, SemiclassicalVariant::Corrected, 20.0, 0.1, 1e-11).unwrap();
        assert_eq!(tr.status, OdeStatus::Complete);
        for s in &tr.states {
            let l = s.spin_lengths();
            assert!((l[0] - 0.25).abs() < 1e-8 && (l[1] - 0.25).abs() < 1e-8, "{l:?}");
        }
        let tr = integrate_semiclassical(&s0, &p, SemiclassicalVariant::Printed, 20.0, 0.1, 1e-11).unwrap();
        let worst = tr.states.iter().map(|s| (s.spin_lengths()[0] - 0.25).abs()).fold(0.0, f64::max);
        assert!(worst > 1e-3, "{worst}");
    }

    /// λ_S = λ_D = ω₀, κ = 1000, ω = 1000 in units of ω₀.
    #[test]
    fn strong_dissipation_oscillates_near_multiples_of_omega0() {
        let p = ModelParams::new(1000.0, 1.0, 1.0, 1.0, 1000.0, 1.0).unwrap();
        let s0 = SemiclassicalState { beta1: C64::new(0.05, 0.0), w1: -(0.25f64 - 0.0025).sqrt(), ..SemiclassicalState::polarized(C64::new(0.1, 0.0)) };
        let tr = integrate_semiclassical(&s0, &p, SemiclassicalVariant::Corrected, 200.0, 0.05, 1e-10).unwrap();
        let jx: Vec<f64> = tr.states.iter().map(|s| s.jx()[0]).collect();
        let nu = dominant_frequency(&tr.times, &jx, None).unwrap();
        let k = nu.round();
        assert!(k >= 1.0 && (nu - k).abs() < 0.05 * k, "{nu}");
    }
}
