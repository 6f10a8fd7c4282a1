//! Independent ground-truth generators for the exact solution.
//!
//! Two unrelated routes to the same physics: a fixed-step RK4 integration of
//! the full master equation, and a Monte-Carlo wave-function unraveling whose
//! trajectory average estimates density-matrix observables. Both are kept
//! deliberately simple (the MC no-jump step is first-order Euler with
//! renormalization, not an exponential) so they share no code path with the
//! diagonalized propagator they validate.

use ndarray::Array1;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::effective::h_eff;
use crate::fock::{trace_distance, DensityMatrix, Operator, StateVector};
use crate::superop::{lindblad_rhs, ModelParams};
use crate::{Error, Result};

/// Name of the counter-based generator backing the trajectory sampler;
/// recorded in [`TrajectoryStats`] so runs are replayable across
/// implementations.
pub const RNG_ALGORITHM: &str = "chacha12";

/// Fixed-step RK4 configuration.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    /// Base step in z units; must satisfy
    /// `step <= 0.01 / max(g, gamma_a, gamma_b)`.
    pub step: f64,
    /// Richardson refinement: halve the step until two successive runs agree
    /// to trace distance 1e-9 everywhere on the requested grid.
    pub refine: bool,
}

impl IntegratorConfig {
    /// Largest admissible configuration for `params`, with refinement on.
    pub fn for_params(params: &ModelParams) -> Self {
        Self {
            step: 0.01 / max_rate(params),
            refine: true,
        }
    }
}

fn max_rate(params: &ModelParams) -> f64 {
    params
        .g()
        .max(params.gamma_a())
        .max(params.gamma_b())
        .max(1e-30)
}

const REFINE_TOL: f64 = 1e-9;

/// RK4 integration of the master equation up to distance `z`.
pub fn integrate_lindblad(
    rho0: &DensityMatrix,
    params: &ModelParams,
    z: f64,
    config: &IntegratorConfig,
) -> Result<DensityMatrix> {
    Ok(integrate_lindblad_grid(rho0, params, &[z], config)?
        .pop()
        .expect("one grid point"))
}

/// RK4 integration recording the state at every point of an ordered,
/// non-negative grid (single pass; no restarts).
pub fn integrate_lindblad_grid(
    rho0: &DensityMatrix,
    params: &ModelParams,
    z_grid: &[f64],
    config: &IntegratorConfig,
) -> Result<Vec<DensityMatrix>> {
    validate_grid(z_grid)?;
    let max_step = 0.01 / max_rate(params);
    if !(config.step > 0.0 && config.step.is_finite()) || config.step > max_step * (1.0 + 1e-12) {
        return Err(Error::InvalidConfig(format!(
            "RK4 step {} exceeds stability bound {max_step:.3e}",
            config.step
        )));
    }
    let trace_dev = (rho0.trace() - Complex64::new(1.0, 0.0)).norm();
    if trace_dev > 1e-6 {
        return Err(Error::UnphysicalState(format!(
            "input trace deviates from 1 by {trace_dev:.3e}"
        )));
    }

    let mut step = config.step;
    let mut current = rk4_pass(rho0, params, z_grid, step);
    if !config.refine {
        return Ok(current);
    }
    let floor = 1e-8 / max_rate(params);
    loop {
        let finer = rk4_pass(rho0, params, z_grid, 0.5 * step);
        let worst = current
            .iter()
            .zip(finer.iter())
            .map(|(a, b)| trace_distance(a, b).expect("same space"))
            .fold(0.0f64, f64::max);
        if worst < REFINE_TOL {
            return Ok(finer);
        }
        step *= 0.5;
        if step < floor {
            return Err(Error::NumericalFailure(format!(
                "RK4 failed to converge to {REFINE_TOL:.0e} above the step floor {floor:.3e}"
            )));
        }
        current = finer;
    }
}

fn validate_grid(z_grid: &[f64]) -> Result<()> {
    if z_grid.is_empty() {
        return Err(Error::InvalidConfig("empty z grid".into()));
    }
    if !(z_grid[0].is_finite() && z_grid[0] >= 0.0) {
        return Err(Error::InvalidConfig(
            "z grid must be finite and non-negative".into(),
        ));
    }
    for pair in z_grid.windows(2) {
        if !(pair[1].is_finite() && pair[1] > pair[0]) {
            return Err(Error::InvalidConfig(
                "z grid must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

fn rk4_pass(
    rho0: &DensityMatrix,
    params: &ModelParams,
    z_grid: &[f64],
    step: f64,
) -> Vec<DensityMatrix> {
    let mut out = Vec::with_capacity(z_grid.len());
    let mut rho = rho0.clone();
    let mut z = 0.0f64;
    for &target in z_grid {
        let span = target - z;
        if span > 0.0 {
            let n = (span / step).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for _ in 0..n {
                rho = rk4_step(&rho, params, h);
            }
        }
        z = target;
        out.push(rho.clone());
    }
    out
}

fn rk4_step(rho: &DensityMatrix, params: &ModelParams, h: f64) -> DensityMatrix {
    let ch = Complex64::new(h, 0.0);
    let half = Complex64::new(0.5 * h, 0.0);
    let k1 = lindblad_rhs(params, rho);
    let k2 = lindblad_rhs(params, &(rho + &k1.scaled(half)));
    let k3 = lindblad_rhs(params, &(rho + &k2.scaled(half)));
    let k4 = lindblad_rhs(params, &(rho + &k3.scaled(ch)));
    let sum = &(&k1 + &k4) + &(&k2 + &k3).scaled(Complex64::new(2.0, 0.0));
    rho + &sum.scaled(Complex64::new(h / 6.0, 0.0))
}

/// Monte-Carlo trajectory estimate of one observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStats {
    pub n_traj: usize,
    pub mean: f64,
    /// Sample standard deviation divided by sqrt(n_traj).
    pub std_error: f64,
    pub seed: u64,
    /// Generator identifier, see [`RNG_ALGORITHM`].
    pub rng_algorithm: &'static str,
}

/// Sparse row representation used by the trajectory stepper.
struct SparseOp {
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOp {
    fn from_operator(op: &Operator) -> Self {
        let mat = op.matrix();
        let rows = (0..mat.nrows())
            .map(|i| {
                (0..mat.ncols())
                    .filter(|&j| mat[[i, j]].norm() > 0.0)
                    .map(|j| (j, mat[[i, j]]))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    fn apply(&self, psi: &Array1<Complex64>, out: &mut Array1<Complex64>) {
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(j, v) in row {
                acc += v * psi[j];
            }
            out[i] = acc;
        }
    }

    fn expectation(&self, psi: &Array1<Complex64>) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, row) in self.rows.iter().enumerate() {
            let mut mv = Complex64::new(0.0, 0.0);
            for &(j, v) in row {
                mv += v * psi[j];
            }
            acc += psi[i].conj() * mv;
        }
        acc.re
    }
}

/// Monte-Carlo wave-function estimate of `tr(rho(z) observable)`.
///
/// First-order unraveling: per step of size `dz`, mode `c` jumps with
/// probability `2 gamma_c |c psi|^2 dz`, otherwise the state advances with
/// `(1 - i H_eff dz)` and is renormalized. Trajectory `t` draws from ChaCha12
/// stream `t` of `seed`, so results are bit-identical for identical inputs
/// regardless of thread count.
pub fn mc_trajectories(
    psi0: &StateVector,
    params: &ModelParams,
    z: f64,
    observable: &Operator,
    n_traj: usize,
    seed: u64,
) -> Result<TrajectoryStats> {
    Ok(
        mc_trajectories_grid(psi0, params, &[z], observable, n_traj, seed)?
            .pop()
            .expect("one grid point"),
    )
}

/// Trajectory estimates on an ordered z grid (each trajectory is walked once,
/// recording the observable at every grid point).
pub fn mc_trajectories_grid(
    psi0: &StateVector,
    params: &ModelParams,
    z_grid: &[f64],
    observable: &Operator,
    n_traj: usize,
    seed: u64,
) -> Result<Vec<TrajectoryStats>> {
    let dz = default_mc_step(psi0.space().n_max(), params);
    mc_trajectories_grid_with_step(psi0, params, z_grid, observable, n_traj, seed, dz)
}

fn default_mc_step(n_max: usize, params: &ModelParams) -> f64 {
    // The Euler stepper carries an O(dz) weak bias, so dz must keep that bias
    // a factor of two or more below the standard error at 2e4 trajectories
    // (the binding case is small z, where trajectory variance is tiny). The
    // rate bound keeps the jump probability per step under 0.05, using
    // 2 (gamma_a + gamma_b) n_max as the total jump-rate bound.
    let rate_bound = 2.0 * params.gamma() * n_max as f64;
    if rate_bound > 0.0 {
        (0.05 / rate_bound).min(2.5e-4)
    } else {
        2.5e-4
    }
}

/// Grid sampler with an explicit step; steps large enough that a jump
/// probability exceeds 0.1 are rejected.
pub fn mc_trajectories_grid_with_step(
    psi0: &StateVector,
    params: &ModelParams,
    z_grid: &[f64],
    observable: &Operator,
    n_traj: usize,
    seed: u64,
    dz: f64,
) -> Result<Vec<TrajectoryStats>> {
    validate_grid(z_grid)?;
    if n_traj == 0 {
        return Err(Error::InvalidConfig("n_traj must be positive".into()));
    }
    if !(dz > 0.0 && dz.is_finite()) {
        return Err(Error::InvalidConfig("step must be positive".into()));
    }
    if (psi0.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::UnphysicalState(
            "trajectory input state must be normalized".into(),
        ));
    }
    let space = psi0.space();
    if observable.space() != space {
        return Err(Error::DimensionMismatch {
            left: observable.space().dim(),
            right: space.dim(),
        });
    }

    let h = SparseOp::from_operator(&h_eff(params, space));
    let obs = SparseOp::from_operator(observable);
    let n1 = space.n_max() + 1;

    let per_traj: Vec<Result<Vec<f64>>> = (0..n_traj)
        .into_par_iter()
        .map(|traj| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(traj as u64);
            walk_trajectory(psi0, params, z_grid, &h, &obs, n1, dz, &mut rng)
        })
        .collect();

    let mut values: Vec<Vec<f64>> = Vec::with_capacity(n_traj);
    for r in per_traj {
        values.push(r?);
    }

    Ok((0..z_grid.len())
        .map(|zi| {
            let mean = kahan_mean(values.iter().map(|v| v[zi]));
            let var_sum = kahan_sum(values.iter().map(|v| (v[zi] - mean) * (v[zi] - mean)));
            let std_error = if n_traj > 1 {
                (var_sum / (n_traj as f64 - 1.0)).sqrt() / (n_traj as f64).sqrt()
            } else {
                0.0
            };
            TrajectoryStats {
                n_traj,
                mean,
                std_error,
                seed,
                rng_algorithm: RNG_ALGORITHM,
            }
        })
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn walk_trajectory(
    psi0: &StateVector,
    params: &ModelParams,
    z_grid: &[f64],
    h: &SparseOp,
    obs: &SparseOp,
    n1: usize,
    dz: f64,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<f64>> {
    let dim = n1 * n1;
    let mut psi = psi0.amplitudes().clone();
    let mut h_psi = Array1::<Complex64>::zeros(dim);
    let mut lowered = Array1::<Complex64>::zeros(dim);
    let mut out = Vec::with_capacity(z_grid.len());
    let mut z = 0.0f64;

    for &target in z_grid {
        let span = target - z;
        if span > 0.0 {
            let n_steps = (span / dz).ceil().max(1.0) as usize;
            let step = span / n_steps as f64;
            for _ in 0..n_steps {
                // lowered amplitudes and jump weights for both modes
                let (wa, wb) = jump_weights(&psi, n1);
                let p_a = 2.0 * params.gamma_a() * wa * step;
                let p_b = 2.0 * params.gamma_b() * wb * step;
                if p_a + p_b > 0.1 {
                    return Err(Error::InvalidConfig(format!(
                        "jump probability {:.3} per step exceeds 0.1; reduce the step",
                        p_a + p_b
                    )));
                }
                let draw: f64 = rng.random();
                if draw < p_a {
                    lower_mode_a(&psi, n1, &mut lowered);
                    normalize_into(&lowered, &mut psi);
                } else if draw < p_a + p_b {
                    lower_mode_b(&psi, n1, &mut lowered);
                    normalize_into(&lowered, &mut psi);
                } else {
                    h.apply(&psi, &mut h_psi);
                    let ih = Complex64::new(0.0, -step);
                    for (p, hp) in psi.iter_mut().zip(h_psi.iter()) {
                        *p += ih * hp;
                    }
                    let inv = 1.0 / norm(&psi);
                    psi.mapv_inplace(|v| v * inv);
                }
            }
        }
        z = target;
        out.push(obs.expectation(&psi));
    }
    Ok(out)
}

fn jump_weights(psi: &Array1<Complex64>, n1: usize) -> (f64, f64) {
    let mut wa = 0.0f64;
    let mut wb = 0.0f64;
    for na in 0..n1 {
        for nb in 0..n1 {
            let p = psi[na * n1 + nb].norm_sqr();
            wa += na as f64 * p;
            wb += nb as f64 * p;
        }
    }
    (wa, wb)
}

fn lower_mode_a(psi: &Array1<Complex64>, n1: usize, out: &mut Array1<Complex64>) {
    out.fill(Complex64::new(0.0, 0.0));
    for na in 1..n1 {
        for nb in 0..n1 {
            out[(na - 1) * n1 + nb] = (na as f64).sqrt() * psi[na * n1 + nb];
        }
    }
}

fn lower_mode_b(psi: &Array1<Complex64>, n1: usize, out: &mut Array1<Complex64>) {
    out.fill(Complex64::new(0.0, 0.0));
    for na in 0..n1 {
        for nb in 1..n1 {
            out[na * n1 + (nb - 1)] = (nb as f64).sqrt() * psi[na * n1 + nb];
        }
    }
}

fn norm(psi: &Array1<Complex64>) -> f64 {
    psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize_into(src: &Array1<Complex64>, dst: &mut Array1<Complex64>) {
    let inv = 1.0 / norm(src);
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        *d = s * inv;
    }
}

/// Compensated sum so the reduction is independent of work distribution.
fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

fn kahan_mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    kahan_sum(values) / n
}
