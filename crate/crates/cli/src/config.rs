//! Experiment configuration: flat `key = value` files, command-line
//! overrides, and a canonical serialization.
//!
//! Rates accept either absolute values or multiples of the coupling via a
//! `*g` suffix (`gamma_a = 0.75*g`); the suffix form is canonical because
//! everything physical depends only on the ratios. Flags win over file keys;
//! unset keys fall back to defaults. `z_max` defaults to `pi / g`.

use std::fmt::Write as _;
use std::path::PathBuf;

use lossy_coupler::ModelParams;

/// Fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub g: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub n_max: usize,
    pub z_max: f64,
    pub z_points: usize,
    pub seed: u64,
    pub n_traj: usize,
    pub output_path: Option<PathBuf>,
}

/// A rate given either absolutely or as a multiple of `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateValue {
    Absolute(f64),
    TimesG(f64),
}

impl RateValue {
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if let Some(prefix) = text.strip_suffix("*g") {
            let v: f64 = prefix
                .trim()
                .parse()
                .map_err(|_| format!("invalid rate value '{text}'"))?;
            Ok(RateValue::TimesG(v))
        } else {
            let v: f64 = text
                .parse()
                .map_err(|_| format!("invalid rate value '{text}'"))?;
            Ok(RateValue::Absolute(v))
        }
    }

    pub fn resolve(self, g: f64) -> f64 {
        match self {
            RateValue::Absolute(v) => v,
            RateValue::TimesG(v) => v * g,
        }
    }
}

/// Partial configuration collected from one source (file or flags).
#[derive(Debug, Clone, Default)]
pub struct ConfigOverlay {
    pub g: Option<f64>,
    pub gamma_a: Option<RateValue>,
    pub gamma_b: Option<RateValue>,
    pub n_max: Option<usize>,
    pub z_max: Option<f64>,
    pub z_points: Option<usize>,
    pub seed: Option<u64>,
    pub n_traj: Option<usize>,
    pub output_path: Option<PathBuf>,
}

impl ConfigOverlay {
    /// Parse the flat `key = value` format. Blank lines and `#` comments are
    /// allowed; unknown keys are named errors.
    pub fn parse_file(text: &str) -> Result<Self, String> {
        let mut overlay = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            let parse_err = |what: &str| format!("line {}: invalid {what} '{value}'", lineno + 1);
            match key {
                "g" => overlay.g = Some(value.parse().map_err(|_| parse_err("coupling"))?),
                "gamma_a" => overlay.gamma_a = Some(RateValue::parse(value)?),
                "gamma_b" => overlay.gamma_b = Some(RateValue::parse(value)?),
                "n_max" => overlay.n_max = Some(value.parse().map_err(|_| parse_err("n_max"))?),
                "z_max" => overlay.z_max = Some(value.parse().map_err(|_| parse_err("z_max"))?),
                "z_points" => {
                    overlay.z_points = Some(value.parse().map_err(|_| parse_err("z_points"))?)
                }
                "seed" => overlay.seed = Some(value.parse().map_err(|_| parse_err("seed"))?),
                "n_traj" => {
                    overlay.n_traj = Some(value.parse().map_err(|_| parse_err("n_traj"))?)
                }
                "output_path" => overlay.output_path = Some(PathBuf::from(value)),
                other => return Err(format!("line {}: unknown key '{other}'", lineno + 1)),
            }
        }
        Ok(overlay)
    }

    /// Layer `self` (flags) over `base` (file).
    pub fn over(self, base: ConfigOverlay) -> ConfigOverlay {
        ConfigOverlay {
            g: self.g.or(base.g),
            gamma_a: self.gamma_a.or(base.gamma_a),
            gamma_b: self.gamma_b.or(base.gamma_b),
            n_max: self.n_max.or(base.n_max),
            z_max: self.z_max.or(base.z_max),
            z_points: self.z_points.or(base.z_points),
            seed: self.seed.or(base.seed),
            n_traj: self.n_traj.or(base.n_traj),
            output_path: self.output_path.or(base.output_path),
        }
    }

    /// Apply defaults and validate every numeric constraint.
    pub fn resolve(&self) -> Result<ExperimentConfig, String> {
        let g = self.g.unwrap_or(1.0);
        if !(g.is_finite() && g > 0.0) {
            return Err(format!("g must be finite and positive, got {g}"));
        }
        let gamma_a = self.gamma_a.map_or(0.0, |r| r.resolve(g));
        if !(gamma_a.is_finite() && gamma_a >= 0.0) {
            return Err(format!(
                "gamma_a must be finite and non-negative, got {gamma_a}"
            ));
        }
        let gamma_b = self.gamma_b.map_or(0.0, |r| r.resolve(g));
        if !(gamma_b.is_finite() && gamma_b >= 0.0) {
            return Err(format!(
                "gamma_b must be finite and non-negative, got {gamma_b}"
            ));
        }
        let n_max = self.n_max.unwrap_or(6);
        if n_max < 2 {
            return Err(format!("n_max must be at least 2, got {n_max}"));
        }
        let z_max = self.z_max.unwrap_or(std::f64::consts::PI / g);
        if !(z_max.is_finite() && z_max > 0.0) {
            return Err(format!("z_max must be finite and positive, got {z_max}"));
        }
        let z_points = self.z_points.unwrap_or(401);
        if z_points < 2 {
            return Err(format!("z_points must be at least 2, got {z_points}"));
        }
        let n_traj = self.n_traj.unwrap_or(20_000);
        if n_traj == 0 {
            return Err("n_traj must be positive".into());
        }
        Ok(ExperimentConfig {
            g,
            gamma_a,
            gamma_b,
            n_max,
            z_max,
            z_points,
            seed: self.seed.unwrap_or(42),
            n_traj,
            output_path: self.output_path.clone(),
        })
    }
}

impl ExperimentConfig {
    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.g, self.gamma_a, self.gamma_b).expect("validated at resolve time")
    }

    /// Uniform grid of `z_points` distances over `[0, z_max]`.
    pub fn z_grid(&self) -> Vec<f64> {
        let n = self.z_points;
        (0..n)
            .map(|i| i as f64 * self.z_max / (n - 1) as f64)
            .collect()
    }

    /// Canonical `key = value` rendering: fixed key order, rates in `*g`
    /// form, 17 significant digits. Parsing this text reproduces `self`.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "g = {:.16e}", self.g).unwrap();
        writeln!(out, "gamma_a = {:.16e}*g", self.gamma_a / self.g).unwrap();
        writeln!(out, "gamma_b = {:.16e}*g", self.gamma_b / self.g).unwrap();
        writeln!(out, "n_max = {}", self.n_max).unwrap();
        writeln!(out, "z_max = {:.16e}", self.z_max).unwrap();
        writeln!(out, "z_points = {}", self.z_points).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        writeln!(out, "n_traj = {}", self.n_traj).unwrap();
        if let Some(path) = &self.output_path {
            writeln!(out, "output_path = {}", path.display()).unwrap();
        }
        out
    }
}
