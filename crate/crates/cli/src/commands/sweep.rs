//! `sweep-gamma`: closed-form coincidence over a grid of loss rates
//! `gamma_a / g` (with `gamma_b` from the config) and distances, in long CSV
//! format.

use lossy_coupler::analytic::CoincidenceCurve;
use lossy_coupler::ModelParams;

use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, write_output};

/// Default loss grid: gamma_a/g from 0 to 2.5 in steps of 0.05.
pub fn default_gamma_values() -> Vec<f64> {
    (0..=50).map(|i| i as f64 * 0.05).collect()
}

pub fn parse_gamma_values(text: &str) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid gamma_a/g value '{}'", s.trim()))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err("empty gamma_a/g list".into());
    }
    for &v in &values {
        if !(v.is_finite() && v >= 0.0) {
            return Err(format!("gamma_a/g values must be non-negative, got {v}"));
        }
    }
    Ok(values)
}

pub fn run(cfg: &ExperimentConfig, gamma_values: &[f64]) -> Result<(), String> {
    let grid = cfg.z_grid();
    let mut csv = String::from("gamma_a_over_g,z,coincidence\n");
    for &ratio in gamma_values {
        let params = ModelParams::new(cfg.g, ratio * cfg.g, cfg.gamma_b)
            .map_err(|e| e.to_string())?;
        let curve = CoincidenceCurve::sample(params, grid.clone());
        for (&z, &value) in curve.z_grid.iter().zip(curve.values.iter()) {
            csv.push_str(&fmt_f64(ratio));
            csv.push(',');
            csv.push_str(&fmt_f64(z));
            csv.push(',');
            csv.push_str(&fmt_f64(value));
            csv.push('\n');
        }
    }
    write_output(cfg.output_path.as_deref(), &csv)
}
