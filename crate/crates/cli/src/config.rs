//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # comment
//! [params]
//! omega_khz = 46
//! v_khz = 121.65
//! phi_deg = 45
//!
//! [phase-diagram]
//! phi_deg = 0:90:181
//! ```
//!
//! Rates and times carry their units in the key name (`_khz`, `_ms`).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bec_cavity::model::ModelParams;
use bec_cavity::stability::Axis;

use crate::error::CliError;

pub const SECTIONS: [&str; 7] = ["params", "spectrum", "evolve", "phase-diagram", "closed", "finite", "semiclassical"];

const PARAM_KEYS: [&str; 8] = ["omega_khz", "omega0_khz", "lambda_d_khz", "lambda_s_khz", "kappa_khz", "n_atoms", "v_khz", "phi_deg"];

fn section_keys(section: &str) -> &'static [&'static str] {
    match section {
        "params" => &PARAM_KEYS,
        "spectrum" => &["branch", "max_occupation"],
        "evolve" => &["branch", "t_end_ms", "dt_ms", "tol", "pair"],
        "phase-diagram" => &["phi_deg", "omega_khz", "v_khz", "classify_closed"],
        "closed" => &[],
        "finite" => &["spin_atoms", "fock_cutoff", "modes", "current"],
        "semiclassical" => &["t_end_ms", "dt_ms", "tol", "alpha_re", "alpha_im", "beta1_re", "beta2_re"],
        _ => &[],
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed file: section → key → raw value with its line number.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut current: Option<String> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| CliError::config(line, body, "unterminated section header"))?.trim();
                if !SECTIONS.contains(&name) {
                    return Err(CliError::config(line, name, "unknown section"));
                }
                if cfg.sections.contains_key(name) {
                    return Err(CliError::config(line, name, "duplicate section"));
                }
                cfg.sections.insert(name.to_string(), BTreeMap::new());
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(CliError::config(line, body, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(sec) = current.as_deref() else {
                return Err(CliError::config(line, key, "key outside of any section"));
            };
            if !section_keys(sec).contains(&key) {
                return Err(CliError::config(line, key, &format!("unknown key in [{sec}]")));
            }
            if value.is_empty() {
                return Err(CliError::config(line, key, "empty value"));
            }
            let map = cfg.sections.get_mut(sec).expect("section inserted above");
            if map.insert(key.to_string(), Entry { value: value.to_string(), line }).is_some() {
                return Err(CliError::config(line, key, "duplicate key"));
            }
        }
        Ok(cfg)
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    pub fn has(&self, section: &str, key: &str) -> bool {
        self.entry(section, key).is_some()
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64, CliError> {
        match self.entry(section, key) {
            None => Ok(default),
            Some(e) => parse_f64(&e.value).ok_or_else(|| CliError::config(e.line, key, "expected a number")),
        }
    }

    pub fn usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize, CliError> {
        match self.entry(section, key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| CliError::config(e.line, key, "expected a non-negative integer")),
        }
    }

    pub fn bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool, CliError> {
        match self.entry(section, key) {
            None => Ok(default),
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(CliError::config(e.line, key, "expected true or false")),
            },
        }
    }

    pub fn choice_or<'a>(&self, section: &str, key: &str, allowed: &[&'a str], default: &'a str) -> Result<&'a str, CliError> {
        match self.entry(section, key) {
            None => Ok(default),
            Some(e) => allowed
                .iter()
                .copied()
                .find(|&a| a == e.value)
                .ok_or_else(|| CliError::config(e.line, key, &format!("expected one of {}", allowed.join(", ")))),
        }
    }

    /// `start:end:points`.
    pub fn axis_or(&self, section: &str, key: &str, default: Axis) -> Result<Axis, CliError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(default);
        };
        let bad = || CliError::config(e.line, key, "expected start:end:points");
        let parts: Vec<&str> = e.value.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parse_f64(parts[0]).ok_or_else(bad)?;
        let end = parse_f64(parts[1]).ok_or_else(bad)?;
        let points: usize = parts[2].parse().map_err(|_| bad())?;
        if points == 0 {
            return Err(CliError::config(e.line, key, "need at least one point"));
        }
        Ok(Axis::new(start, end, points))
    }

    /// Semicolon-separated occupation vectors `n+,n-,m+,m-`.
    pub fn modes_or(&self, section: &str, key: &str, default: &[[u32; 4]]) -> Result<Vec<[u32; 4]>, CliError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(default.to_vec());
        };
        let bad = || CliError::config(e.line, key, "expected `n+,n-,m+,m-` groups separated by `;`");
        e.value
            .split(';')
            .map(|g| {
                let v: Vec<u32> = g.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
                v.try_into().map_err(|_| bad())
            })
            .collect()
    }

    /// Physical parameters from `[params]`, falling back to `defaults` for
    /// keys that are absent. A polar pair replaces the default couplings.
    pub fn params(&self, defaults: &ModelParams) -> Result<ModelParams, CliError> {
        let given = |k: &str| self.has("params", k);
        let line = self.sections.get("params").and_then(|s| s.values().map(|e| e.line).min()).unwrap_or(0);
        let num = |k: &str, d: f64| self.f64_or("params", k, d);
        let mut pairs = vec![
            ("omega", num("omega_khz", defaults.omega)?),
            ("omega0", num("omega0_khz", defaults.omega0)?),
            ("kappa", num("kappa_khz", defaults.kappa)?),
            ("n_atoms", num("n_atoms", defaults.n_atoms)?),
        ];
        if given("v_khz") || given("phi_deg") {
            if given("lambda_d_khz") || given("lambda_s_khz") {
                return Err(CliError::config(line, "v_khz", "(v_khz, phi_deg) and (lambda_d_khz, lambda_s_khz) are mutually exclusive"));
            }
            pairs.push(("v", num("v_khz", defaults.v())?));
            pairs.push(("phi_deg", num("phi_deg", defaults.phi_deg())?));
        } else {
            pairs.push(("lambda_d", num("lambda_d_khz", defaults.lambda_d)?));
            pairs.push(("lambda_s", num("lambda_s_khz", defaults.lambda_s)?));
        }
        ModelParams::from_pairs(pairs).map_err(|e| CliError::config(line, "params", &e.to_string()))
    }

    /// Sorted `[section] key = value` listing used for hashing.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (name, keys) in &self.sections {
            let _ = writeln!(out, "[{name}]");
            for (k, e) in keys {
                let _ = writeln!(out, "{k}={}", e.value);
            }
        }
        out
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams::new(46.0, 7.4, 6.3, 7.25, 1250.0, 2000.0).unwrap()
    }

    #[test]
    fn parses_sections_and_comments() {
        let c = ConfigFile::parse("# top\n[params]\nomega_khz = 246 # detuning\nlambda_d_khz=9.6\nlambda_s_khz = 0.17\n\n[evolve]\nt_end_ms = 2\n").unwrap();
        let p = c.params(&base()).unwrap();
        assert_eq!((p.omega, p.lambda_d, p.lambda_s, p.kappa), (246.0, 9.6, 0.17, 1250.0));
        assert_eq!(c.f64_or("evolve", "t_end_ms", 1.0).unwrap(), 2.0);
        assert_eq!(c.f64_or("evolve", "dt_ms", 0.5).unwrap(), 0.5);
    }

    #[test]
    fn polar_couplings() {
        let c = ConfigFile::parse("[params]\nv_khz = 2\nphi_deg = 90\n").unwrap();
        let p = c.params(&base()).unwrap();
        assert!(p.lambda_d.abs() < 1e-15 && (p.lambda_s - 2.0).abs() < 1e-15);
        let c = ConfigFile::parse("[params]\nv_khz = 2\nlambda_d_khz = 1\n").unwrap();
        assert!(c.params(&base()).is_err());
    }

    #[test]
    fn diagnostics_carry_line_and_key() {
        let cases = [
            ("[params]\nomega_khz = 1\nomega = 2\n", 3, "omega"),
            ("[params]\nkappa_khz = fast\n", 2, "kappa_khz"),
            ("omega_khz = 1\n", 1, "omega_khz"),
            ("[plot]\n", 1, "plot"),
            ("[params]\nomega_khz = 1\nomega_khz = 2\n", 3, "omega_khz"),
            ("[phase-diagram]\nphi_deg = 0:90\n", 2, "phi_deg"),
            ("[finite]\nmodes = 1,0,0\n", 2, "modes"),
        ];
        for (text, line, key) in cases {
            let err = match ConfigFile::parse(text) {
                Err(e) => e,
                Ok(c) => c
                    .params(&base())
                    .and_then(|_| c.axis_or("phase-diagram", "phi_deg", Axis::new(0.0, 1.0, 2)))
                    .and_then(|_| c.modes_or("finite", "modes", &[]).map(|_| Axis::new(0.0, 1.0, 2)))
                    .unwrap_err(),
            };
            match err {
                CliError::Config { line: l, key: k, .. } => assert_eq!((l, k.as_str()), (line, key), "{text}"),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn axis_and_modes() {
        let c = ConfigFile::parse("[phase-diagram]\nphi_deg = 0:90:19\n[finite]\nmodes = 1,0,0,0; 0,1,1,0\n").unwrap();
        assert_eq!(c.axis_or("phase-diagram", "phi_deg", Axis::new(0.0, 1.0, 2)).unwrap(), Axis::new(0.0, 90.0, 19));
        assert_eq!(c.modes_or("finite", "modes", &[]).unwrap(), vec![[1, 0, 0, 0], [0, 1, 1, 0]]);
    }

    #[test]
    fn canonical_is_order_independent() {
        let a = ConfigFile::parse("[evolve]\ndt_ms = 1\nt_end_ms = 2\n[params]\nomega_khz = 3\n").unwrap();
        let b = ConfigFile::parse("[params]\nomega_khz = 3\n[evolve]\nt_end_ms = 2\ndt_ms = 1\n").unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }
}
