//! Small time-series diagnostics for sampled trajectories.

use std::f64::consts::PI;

/// Periodogram |Σ (x_k − x̄) e^{−iνt_k}|² at angular frequency ν.
pub fn periodogram(times: &[f64], values: &[f64], nu: f64) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (&t, &x) in times.iter().zip(values) {
        let (s, c) = (nu * t).sin_cos();
        re += (x - mean) * c;
        im -= (x - mean) * s;
    }
    re * re + im * im
}

/// Angular frequency of the largest periodogram peak in (0, ν_max], or the
/// Nyquist limit if `nu_max` is `None`. Grid search followed by golden-section
/// refinement. Returns `None` for series that are too short or constant.
pub fn dominant_frequency(times: &[f64], values: &[f64], nu_max: Option<f64>) -> Option<f64> {
    let n = times.len().min(values.len());
    if n < 4 {
        return None;
    }
    let span = times[n - 1] - times[0];
    if !(span > 0.0) {
        return None;
    }
    let nyquist = PI * (n - 1) as f64 / span;
    let top = nu_max.unwrap_or(nyquist).min(nyquist);
    let step = PI / span / 4.0;
    let (t, v) = (&times[..n], &values[..n]);
    let mut best = (0.0, 0.0);
    let mut nu = step;
    while nu <= top {
        let p = periodogram(t, v, nu);
        if p > best.1 {
            best = (nu, p);
        }
        nu += step;
    }
    if best.1 <= 0.0 {
        return None;
    }
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if periodogram(t, v, m1) > periodogram(t, v, m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Some(0.5 * (lo + hi))
}

/// max − min over the final third of the series.
pub fn final_third_amplitude(values: &[f64]) -> f64 {
    let start = values.len() - values.len() / 3;
    let tail = &values[start.min(values.len().saturating_sub(1))..];
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Exponential growth rate of the envelope: least-squares slope of
/// ln(max |x|) over `windows` equal windows. Remove any offset first.
pub fn envelope_growth_rate(times: &[f64], values: &[f64], windows: usize) -> Option<f64> {
    let n = times.len().min(values.len());
    if windows < 2 || n < 2 * windows {
        return None;
    }
    let w = n / windows;
    let mut pts = Vec::with_capacity(windows);
    for k in 0..windows {
        let seg = k * w..(k + 1) * w;
        let peak = values[seg.clone()].iter().map(|x| x.abs()).fold(0.0, f64::max);
        if peak > 0.0 {
            let tm = 0.5 * (times[seg.start] + times[seg.end - 1]);
            pts.push((tm, peak.ln()));
        }
    }
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let tx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ty = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - tx) * (p.1 - ty)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - tx) * (p.0 - tx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Ratio of the oscillation amplitude (max − min) in the second half to
/// that in the first half.
pub fn half_amplitude_ratio(values: &[f64]) -> f64 {
    let h = values.len() / 2;
    let amp = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max) - s.iter().copied().fold(f64::INFINITY, f64::min);
    amp(&values[h..]) / amp(&values[..h])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, dt: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        let v = t.iter().map(|&t| f(t)).collect();
        (t, v)
    }

    #[test]
    fn finds_sine_frequency() {
        let (t, v) = series(|t| (7.4 * t).sin() + 0.3 * (2.0 * t).cos() + 5.0, 0.01, 2000);
        let nu = dominant_frequency(&t, &v, None).unwrap();
        assert!((nu - 7.4).abs() < 5e-3, "{nu}");
        assert!(dominant_frequency(&t, &vec![1.0; 2000], None).is_none());
    }

    #[test]
    fn amplitude_and_growth() {
        let (t, v) = series(|t| (0.5 * t).exp() * (10.0 * t).sin(), 0.005, 4000);
        let g = envelope_growth_rate(&t, &v, 10).unwrap();
        assert!((g - 0.5).abs() < 0.05, "{g}");
        assert!(half_amplitude_ratio(&v) > 1.0);
        let (_, v) = series(|t| (3.0 * t).cos(), 0.01, 3000);
        assert!((final_third_amplitude(&v) - 2.0).abs() < 1e-3);
        let (_, v) = series(|t| (-t).exp() * (3.0 * t).cos(), 0.01, 3000);
        assert!(half_amplitude_ratio(&v) < 1e-3);
    }
}
