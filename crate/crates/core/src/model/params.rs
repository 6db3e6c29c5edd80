use crate::error::{Error, Result};

/// Physical parameters. Rates are angular frequencies in kHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Cavity detuning ω.
    pub omega: f64,
    /// Zeeman splitting ω₀.
    pub omega0: f64,
    /// Density-mode coupling λ_D.
    pub lambda_d: f64,
    /// Spin-mode coupling λ_S.
    pub lambda_s: f64,
    /// Cavity loss rate κ.
    pub kappa: f64,
    /// Atoms per condensate.
    pub n_atoms: f64,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, lambda_d: f64, lambda_s: f64, kappa: f64, n_atoms: f64) -> Result<Self> {
        let p = Self { omega, omega0, lambda_d, lambda_s, kappa, n_atoms };
        p.validate()?;
        Ok(p)
    }

    /// Couplings from the polar form λ_D = V cos φ, λ_S = V sin φ.
    pub fn from_polar(omega: f64, omega0: f64, v: f64, phi_deg: f64, kappa: f64, n_atoms: f64) -> Result<Self> {
        let phi = phi_deg.to_radians();
        Self::new(omega, omega0, v * phi.cos(), v * phi.sin(), kappa, n_atoms)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.omega, self.omega0, self.lambda_d, self.lambda_s, self.kappa, self.n_atoms];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParams("kappa must be >= 0".into()));
        }
        if self.omega0 <= 0.0 {
            return Err(Error::InvalidParams("omega0 must be > 0".into()));
        }
        if self.n_atoms < 1.0 {
            return Err(Error::InvalidParams("n_atoms must be >= 1".into()));
        }
        Ok(())
    }

    /// Coupling magnitude V = sqrt(λ_D² + λ_S²).
    pub fn v(&self) -> f64 {
        self.lambda_d.hypot(self.lambda_s)
    }

    /// Coupling angle φ in degrees.
    pub fn phi_deg(&self) -> f64 {
        self.lambda_s.atan2(self.lambda_d).to_degrees()
    }

    pub fn with_couplings(&self, lambda_d: f64, lambda_s: f64) -> Self {
        Self { lambda_d, lambda_s, ..*self }
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self { kappa, ..*self }
    }

    /// Builds parameters from flat key-value pairs.
    ///
    /// Keys: `omega`, `omega0`, `lambda_d`, `lambda_s`, `kappa`, `n_atoms`,
    /// `v`, `phi_deg`; rate keys may carry a `_khz` suffix. The polar pair
    /// (`v`, `phi_deg`) excludes (`lambda_d`, `lambda_s`).
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let mut f = [None::<f64>; 8];
        const KEYS: [&str; 8] = ["omega", "omega0", "lambda_d", "lambda_s", "kappa", "n_atoms", "v", "phi_deg"];
        for (k, val) in pairs {
            let key = k.trim();
            let key = key.strip_suffix("_khz").unwrap_or(key);
            let idx = KEYS
                .iter()
                .position(|&s| s == key)
                .ok_or_else(|| Error::InvalidParams(format!("unknown key `{k}`")))?;
            if f[idx].replace(val).is_some() {
                return Err(Error::InvalidParams(format!("duplicate key `{k}`")));
            }
        }
        let need = |i: usize| f[i].ok_or_else(|| Error::InvalidParams(format!("missing key `{}`", KEYS[i])));
        let cartesian = f[2].is_some() || f[3].is_some();
        let polar = f[6].is_some() || f[7].is_some();
        let (ld, ls) = match (cartesian, polar) {
            (true, true) => {
                return Err(Error::InvalidParams("(v, phi_deg) and (lambda_d, lambda_s) are mutually exclusive".into()))
            }
            (_, true) => {
                let phi = need(7)?.to_radians();
                let v = need(6)?;
                (v * phi.cos(), v * phi.sin())
            }
            _ => (need(2)?, need(3)?),
        };
        Self::new(need(0)?, need(1)?, ld, ls, need(4)?, f[5].unwrap_or(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_invalid() {
        assert!(ModelParams::new(1.0, 0.0, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, 0.0, -1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, 0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn pairs_polar_and_exclusive() {
        let p = ModelParams::from_pairs([("omega_khz", 46.0), ("omega0", 7.4), ("v", 2.0), ("phi_deg", 90.0), ("kappa", 5.0)]).unwrap();
        assert!(p.lambda_d.abs() < 1e-15 && (p.lambda_s - 2.0).abs() < 1e-15);
        assert!(ModelParams::from_pairs([("omega", 1.0), ("omega0", 1.0), ("v", 1.0), ("phi_deg", 0.0), ("lambda_d", 1.0), ("kappa", 1.0)]).is_err());
        assert!(ModelParams::from_pairs([("omega", 1.0), ("bogus", 1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn polar_roundtrip(v in 1e-3f64..500.0, phi in 0.0f64..=90.0) {
            let p = ModelParams::from_polar(1.0, 1.0, v, phi, 1.0, 1.0).unwrap();
            prop_assert!((p.v() - v).abs() <= 1e-12 * v);
            prop_assert!((p.phi_deg() - phi).abs() <= 1e-10);
        }
    }
}
