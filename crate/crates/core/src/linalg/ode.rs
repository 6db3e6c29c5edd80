//! Adaptive Dormand-Prince 5(4) integrator for complex-valued systems with
//! dense output at requested sample times.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Mixed absolute/relative local error tolerance.
    pub tol: f64,
    /// Magnitude above which the trajectory is flagged as diverged.
    pub overflow_guard: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { tol: 1e-10, overflow_guard: f64::INFINITY, max_steps: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeStatus {
    Complete,
    /// Step size fell below `1e-14 * span`.
    StepUnderflow { t: f64 },
    /// A component exceeded the overflow guard.
    Overflow { t: f64 },
    MaxSteps { t: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub status: OdeStatus,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl Trajectory {
    pub fn diverged(&self) -> bool {
        self.status != OdeStatus::Complete
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..out.len() {
        let mut s = C64::new(0.0, 0.0);
        for (a, k) in terms {
            s += k[i] * *a;
        }
        out[i] = y[i] + s * h;
    }
}

/// Integrates `y' = rhs(t, y)` from `t_span.0` to `t_span.1` and samples at
/// `sample_times` (which must be nondecreasing and inside the span).
pub fn integrate_ode<F>(mut rhs: F, y0: &[C64], t_span: (f64, f64), sample_times: &[f64], opts: OdeOptions) -> Trajectory
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    assert!(opts.tol > 0.0, "tolerance must be positive");
    let n = y0.len();
    let (t0, t1) = t_span;
    let span = t1 - t0;
    let mut out = Trajectory {
        times: Vec::with_capacity(sample_times.len()),
        states: Vec::with_capacity(sample_times.len()),
        status: OdeStatus::Complete,
        steps_accepted: 0,
        steps_rejected: 0,
    };
    let mut next_sample = 0usize;
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        out.times.push(sample_times[next_sample]);
        out.states.push(y0.to_vec());
        next_sample += 1;
    }
    if span <= 0.0 || n == 0 {
        while next_sample < sample_times.len() {
            out.times.push(sample_times[next_sample]);
            out.states.push(y0.to_vec());
            next_sample += 1;
        }
        return out;
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut ytmp = k1.clone();
    let mut ynew = k1.clone();
    rhs(t, &y, &mut k1);

    let err_norm = |y: &[C64], yn: &[C64], e: &[C64], tol: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..y.len() {
            let sc = tol + tol * y[i].norm().max(yn[i].norm());
            s += (e[i].norm() / sc).powi(2);
        }
        (s / y.len() as f64).sqrt()
    };

    // Initial step from the derivative scale.
    let d0 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let d1 = k1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut h = if d0 > 1e-10 && d1 > 1e-10 { 0.01 * d0 / d1 } else { 1e-6 * span.max(1e-12) };
    h = h.min(span).max(1e-12 * span);
    let h_min = 1e-14 * span;
    let mut err_prev = 1e-4f64;

    while t < t1 {
        if out.steps_accepted + out.steps_rejected >= opts.max_steps {
            out.status = OdeStatus::MaxSteps { t };
            break;
        }
        if h < h_min {
            out.status = OdeStatus::StepUnderflow { t };
            break;
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        axpy(&mut ytmp, &y, h, &[(A21, &k1)]);
        rhs(t + C2 * h, &ytmp, &mut k2);
        axpy(&mut ytmp, &y, h, &[(A31, &k1), (A32, &k2)]);
        rhs(t + C3 * h, &ytmp, &mut k3);
        axpy(&mut ytmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        rhs(t + C4 * h, &ytmp, &mut k4);
        axpy(&mut ytmp, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        rhs(t + C5 * h, &ytmp, &mut k5);
        axpy(&mut ytmp, &y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        rhs(t + h, &ytmp, &mut k6);
        axpy(&mut ynew, &y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        rhs(t + h, &ynew, &mut k7);

        let mut e = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            e[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        }
        let err = err_norm(&y, &ynew, &e, opts.tol);

        if err.is_finite() && err <= 1.0 {
            let t_new = t + h;
            // Dense output on [t, t_new].
            while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                let ts = sample_times[next_sample];
                let th = ((ts - t) / h).clamp(0.0, 1.0);
                let th1 = 1.0 - th;
                let mut ys = vec![C64::new(0.0, 0.0); n];
                for i in 0..n {
                    let ydiff = ynew[i] - y[i];
                    let bspl = k1[i] * h - ydiff;
                    let r5 = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
                    let r4 = ydiff - k7[i] * h - bspl;
                    ys[i] = y[i] + (ydiff + (bspl + (r4 + r5 * th1) * th) * th1) * th;
                }
                out.times.push(ts);
                out.states.push(ys);
                next_sample += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            out.steps_accepted += 1;
            if y.iter().any(|z| !(z.norm() <= opts.overflow_guard)) {
                out.status = OdeStatus::Overflow { t };
                break;
            }
            // PI step control.
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 10.0);
            err_prev = err.max(1e-4);
            if last {
                break;
            }
        } else {
            out.steps_rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 1.0) } else { 0.1 };
            h *= fac;
        }
    }
    out
}
