//! Closed-form coincidence rate and the Hong-Ou-Mandel dip locator.
//!
//! For two photons launched as |1,1> the coincidence probability
//! `<1,1| rho(z) |1,1>` has the closed form
//!
//! ```text
//! e^{-2 gamma z} [ (4g^2 cos(omega_I z) - delta^2) / omega_I^2 ]^2    |delta| < 2g
//! e^{-2 gamma z} [ (delta^2 - 4g^2 cosh(omega_II z)) / omega_II^2 ]^2 |delta| > 2g
//! e^{-2 gamma z} ( 1 - 2 g^2 z^2 )^2                                  |delta| = 2g
//! ```
//!
//! The EP row is the common limit of both branches (substitute
//! `delta^2 = 4g^2 -+ omega^2` and expand). Evaluation switches to it near
//! the EP, where the generic brackets lose all significance to cancellation.

use crate::fock::DensityMatrix;
use crate::superop::ModelParams;
use crate::effective::Regime;
use crate::{Error, Result};

/// Closed-form coincidence rate `<1,1| rho(z) |1,1>` for the input |1,1>.
pub fn coincidence_closed_form(params: &ModelParams, z: f64) -> f64 {
    let g = params.g();
    let gamma = params.gamma();
    let delta = params.delta();
    let envelope = (-2.0 * gamma * z).exp();

    let ep_bracket = 1.0 - 2.0 * g * g * z * z;
    let bracket = match params.regime() {
        Regime::AtEp => ep_bracket,
        // cancellation guard: below omega z ~ 1e-4 the generic brackets are
        // differences of near-equal numbers, while the EP series error is
        // O((omega z)^2)
        Regime::BelowEp { omega } if omega * z.abs() < 1e-4 => ep_bracket,
        Regime::AboveEp { omega } if omega * z.abs() < 1e-4 => ep_bracket,
        Regime::BelowEp { omega } => {
            (4.0 * g * g * (omega * z).cos() - delta * delta) / (omega * omega)
        }
        Regime::AboveEp { omega } => {
            (delta * delta - 4.0 * g * g * (omega * z).cosh()) / (omega * omega)
        }
    };
    envelope * bracket * bracket
}

/// Coincidence rate read from a density matrix: `Re <1,1| rho |1,1>`.
///
/// The diagonal element of a physical state is real; a residual imaginary
/// part above 1e-10 indicates a corrupted input and is rejected by assertion.
pub fn coincidence_from_density(rho: &DensityMatrix) -> f64 {
    let v = rho
        .element((1, 1), (1, 1))
        .expect("space holds at least one photon per mode");
    assert!(
        v.im.abs() <= 1e-10,
        "coincidence element has imaginary part {:.3e}",
        v.im
    );
    v.re
}

/// Closed-form coincidence sampled on a distance grid.
#[derive(Debug, Clone)]
pub struct CoincidenceCurve {
    pub params: ModelParams,
    pub z_grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl CoincidenceCurve {
    pub fn sample(params: ModelParams, z_grid: Vec<f64>) -> Self {
        let values = z_grid
            .iter()
            .map(|&z| coincidence_closed_form(&params, z))
            .collect();
        Self {
            params,
            z_grid,
            values,
        }
    }
}

const GRID_POINTS: usize = 2001;

/// Global minimum of the closed-form coincidence on `[0, z_max]`: dense grid
/// scan followed by golden-section refinement of the bracketing cell down to
/// a width of `1e-8 / g`. Returns `(z_min, value)`.
pub fn hom_minimum(params: &ModelParams, z_max: f64) -> Result<(f64, f64)> {
    if !(z_max > 0.0 && z_max.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "z_max must be positive and finite, got {z_max}"
        )));
    }
    let f = |z: f64| coincidence_closed_form(params, z);

    let step = z_max / (GRID_POINTS - 1) as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..GRID_POINTS {
        let v = f(i as f64 * step);
        if v < best {
            best = v;
            best_i = i;
        }
    }

    let mut lo = (best_i.saturating_sub(1)) as f64 * step;
    let mut hi = ((best_i + 1).min(GRID_POINTS - 1)) as f64 * step;

    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let tol = 1e-8 / params.g().max(1e-30);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let z_min = 0.5 * (lo + hi);
    Ok((z_min, f(z_min)))
}
