//! Run configuration: JSON file, command-line overrides, validation.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use sdtwistor::harmonics::HarmonicCoeffs;
use sdtwistor::monopole::TodMonopole;
use std::collections::BTreeMap;
use std::path::Path;

pub const SCHEMA: &str = "sdtwistor.run/v1";

/// One harmonic mode (l, m, c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub l: usize,
    pub m: i64,
    pub c: f64,
}

/// How `modes` are read: as generator coefficients, or as Tod potential
/// coefficients (V = 1 + Σ c Z_l(tanh t) sech²t Y_lm).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorForm {
    Coefficients,
    Tod,
}

/// Generator h = Σ modes + a·u, where the optional linear term a·u uses
/// the unnormalized coordinate functions u₁, u₂, u₃.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub form: GeneratorForm,
    #[serde(default)]
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub linear: [f64; 3],
}

/// Disk parameters (s, t, λ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskParams {
    pub s: f64,
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

/// Resolved configuration; every field has a default so `{}` plus the
/// schema id is a valid file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub schema: String,
    pub generator: GeneratorSpec,
    /// Band limit L of all spherical expansions.
    pub band_limit: usize,
    /// Time grid [−t_max, t_max] with `slices` nodes for wave checks.
    pub t_max: f64,
    pub slices: usize,
    /// Circle-Fourier truncation K and sample count N; 0 selects 4L+8 and 4K.
    pub fourier_k: usize,
    pub fourier_n: usize,
    /// Step of the finite-difference checks (identities, monopole, curvature).
    pub fd_step: f64,
    /// Random sample points per check.
    pub samples: usize,
    /// Largest degree in the eigenvalue table.
    pub eigen_lmax: usize,
    /// Explicit disks; when empty, `disk_count` random disks are drawn.
    pub disks: Vec<DiskParams>,
    pub disk_count: usize,
    /// Boundary samples per disk.
    pub boundary_samples: usize,
    pub seed: u64,
    pub tolerance_scale: f64,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA.into(),
            generator: GeneratorSpec { form: GeneratorForm::Tod, modes: vec![Mode { l: 1, m: 0, c: 0.3 }], linear: [0.0; 3] },
            band_limit: 4,
            t_max: 4.5,
            slices: 3601,
            fourier_k: 0,
            fourier_n: 0,
            fd_step: 1e-3,
            samples: 20,
            eigen_lmax: 25,
            disks: Vec::new(),
            disk_count: 10,
            boundary_samples: 256,
            seed: 0,
            tolerance_scale: 1.0,
            tolerances: BTreeMap::new(),
        }
    }
}

/// Default tolerances by check name.
pub const DEFAULT_TOLERANCES: [(&str, f64); 16] = [
    ("identity_del_r", 1e-7),
    ("identity_del_q", 1e-7),
    ("box_residual", 1e-6),
    ("l_residual", 1e-6),
    ("conservation_i_spread", 1e-7),
    ("conservation_e_max", 1e-7),
    ("round_trip", 1e-7),
    ("monopole_residual", 1e-6),
    ("gauge_a1", 1e-8),
    ("gauge_codifferential", 1e-8),
    ("lift_identity", 1e-5),
    ("phi_eigen", 1e-5),
    ("frobenius", 1e-5),
    ("asd_relative", 1e-3),
    ("disk_membership", 1e-8),
    ("disk_projection", 1e-10),
];

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub band_limit: Option<usize>,
    pub tolerance_scale: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
        };
        if let Some(s) = o.seed {
            cfg.seed = s;
        }
        if let Some(l) = o.band_limit {
            cfg.band_limit = l;
        }
        if let Some(x) = o.tolerance_scale {
            cfg.tolerance_scale = x;
        }
        cfg.resolve();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fill derived defaults so reports echo the values actually used.
    fn resolve(&mut self) {
        if self.fourier_k == 0 {
            self.fourier_k = 4 * self.band_limit + 8;
        }
        if self.fourier_n == 0 {
            self.fourier_n = 4 * self.fourier_k;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.schema != SCHEMA {
            return bad(format!("schema must be \"{SCHEMA}\", got \"{}\"", self.schema));
        }
        if self.band_limit == 0 || self.band_limit > 64 {
            return bad(format!("band_limit {} outside 1..=64", self.band_limit));
        }
        if self.generator.linear.iter().any(|a| !a.is_finite()) {
            return bad("generator.linear must be finite".into());
        }
        for md in &self.generator.modes {
            if md.l > self.band_limit || md.m.unsigned_abs() as usize > md.l || !md.c.is_finite() {
                return bad(format!("mode (l={}, m={}, c={}) invalid for band limit {}", md.l, md.m, md.c, self.band_limit));
            }
        }
        if self.fourier_k < 4 * self.band_limit + 8 {
            return bad(format!("fourier_k {} < 4L+8 = {}", self.fourier_k, 4 * self.band_limit + 8));
        }
        if self.fourier_n < 4 * self.fourier_k {
            return bad(format!("fourier_n {} < 4K = {}", self.fourier_n, 4 * self.fourier_k));
        }
        if !(self.t_max > 4.0 && self.t_max.is_finite()) {
            return bad(format!("t_max {} must exceed 4 (conservation scan covers [−4, 4])", self.t_max));
        }
        if self.slices < 81 || self.slices.is_multiple_of(2) {
            return bad(format!("slices {} must be odd and ≥ 81", self.slices));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            return bad(format!("fd_step {} outside (0, 0.1)", self.fd_step));
        }
        if self.samples == 0 || self.boundary_samples == 0 {
            return bad("samples and boundary_samples must be positive".into());
        }
        if self.eigen_lmax < 3 {
            return bad(format!("eigen_lmax {} < 3", self.eigen_lmax));
        }
        if !(self.tolerance_scale > 0.0 && self.tolerance_scale.is_finite()) {
            return bad(format!("tolerance_scale {} must be positive", self.tolerance_scale));
        }
        for (k, v) in &self.tolerances {
            if !DEFAULT_TOLERANCES.iter().any(|(n, _)| n == k) {
                return bad(format!("unknown tolerance override \"{k}\""));
            }
            if v.is_nan() || *v <= 0.0 {
                return bad(format!("tolerance \"{k}\" must be positive"));
            }
        }
        Ok(())
    }

    /// Effective tolerance of a check, after overrides and scaling.
    pub fn tolerance(&self, name: &str) -> f64 {
        let base = self
            .tolerances
            .get(name)
            .copied()
            .or_else(|| DEFAULT_TOLERANCES.iter().find(|(n, _)| *n == name).map(|(_, v)| *v))
            .unwrap_or_else(|| panic!("no tolerance named {name}"));
        base * self.tolerance_scale
    }

    /// The generator h as harmonic coefficients of degree ≤ L.
    pub fn generator_coeffs(&self) -> Result<HarmonicCoeffs, CliError> {
        let modes: Vec<(usize, i64, f64)> = self.generator.modes.iter().map(|m| (m.l, m.m, m.c)).collect();
        let h = match self.generator.form {
            GeneratorForm::Coefficients => HarmonicCoeffs::from_modes_with_lmax(self.band_limit, &modes),
            GeneratorForm::Tod => TodMonopole::new(&modes).map(|t| t.generator().with_lmax(self.band_limit)),
        };
        let h = h.map_err(|e| CliError::Config(format!("generator: {e}")))?;
        Ok(h.add(&HarmonicCoeffs::linear(self.generator.linear).with_lmax(self.band_limit)))
    }
}
