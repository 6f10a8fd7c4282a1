//! Non-unitary evolution operator and the exact solution of the master
//! equation.
//!
//! The pipeline is transform, evolve, untransform:
//!
//! ```text
//! rho(z) = exp[-(J_a+J_b)/2]  U(z) (exp[+(J_a+J_b)/2] rho(0)) U(z)†
//! U(z)   = exp(eta J_y) exp(-i H_diag z) exp(-eta J_y)
//! ```
//!
//! The right factor is `U†`, not the inverse: integrating
//! `dvarrho/dz = -i (H_eff varrho - varrho H_eff†)` gives
//! `varrho(z) = U varrho(0) U†`, and only this form reproduces the
//! single-mode amplitude-damping solution (with `U^-1` the transformed state
//! would keep unit trace, which is wrong under decay; the two coincide in the
//! lossless limit).
//!
//! At the exceptional point the diagonalization is singular and `U(z)` falls
//! back to a direct matrix exponential of `-i H_eff z`.

use num_complex::Complex64;

use crate::effective::{eigenvalue, eta, h_eff, r_transform};
use crate::fock::{sandwich, DensityMatrix, FockSpace, Operator, StateVector};
use crate::superop::{exp_jump, ModelParams, Sign};
use crate::{Error, Result};

/// A propagation request: parameters, space, and an ordered distance grid.
#[derive(Debug, Clone)]
pub struct PropagationPlan {
    pub params: ModelParams,
    pub space: FockSpace,
    pub z_grid: Vec<f64>,
    /// Whether `u_z` uses the direct exponential instead of the
    /// diagonalized triple product (true exactly at the EP).
    pub ep_fallback: bool,
}

impl PropagationPlan {
    pub fn new(params: ModelParams, space: FockSpace, z_grid: Vec<f64>) -> Result<Self> {
        if z_grid.is_empty() {
            return Err(Error::InvalidConfig("empty z grid".into()));
        }
        for pair in z_grid.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::InvalidConfig(
                    "z grid must be strictly increasing".into(),
                ));
            }
        }
        if !z_grid[0].is_finite() || z_grid[0] < 0.0 || !z_grid[z_grid.len() - 1].is_finite() {
            return Err(Error::InvalidConfig(
                "z grid must be finite and non-negative".into(),
            ));
        }
        let ep_fallback = params.regime().is_at_ep();
        Ok(Self {
            params,
            space,
            z_grid,
            ep_fallback,
        })
    }

    /// Exact evolution of `rho0` at every grid distance.
    pub fn evolve(&self, rho0: &DensityMatrix) -> Result<Vec<DensityMatrix>> {
        self.z_grid
            .iter()
            .map(|&z| evolve_exact(rho0, &self.params, z))
            .collect()
    }
}

/// Non-unitary evolution operator `U(z) = exp(-i H_eff z)`.
///
/// Away from the EP this is the triple product
/// `R exp(-i H_diag z) R^-1` with the middle factor evaluated exactly on the
/// diagonal; at the EP it falls back to a dense matrix exponential. The two
/// routes agree on the sub-cutoff block (truncation corrupts higher sectors).
pub fn u_z(params: &ModelParams, space: FockSpace, z: f64) -> Operator {
    assert!(z.is_finite(), "propagation distance must be finite");
    if params.regime().is_at_ep() {
        return h_eff(params, space)
            .scaled(Complex64::new(0.0, -z))
            .expm()
            .expect("finite Hamiltonian");
    }
    let rapidity = eta(params).expect("away from EP");
    let r = r_transform(rapidity, space);
    let r_inv = r_transform(-rapidity, space);

    let mut phase = Operator::zeros(space);
    for i in 0..space.dim() {
        let (j, k) = space.occupation(i).expect("index in range");
        let lambda = eigenvalue(j, k, params);
        phase.matrix_mut()[[i, i]] = (Complex64::new(0.0, -z) * lambda).exp();
    }
    r.mul(&phase)
        .expect("same space")
        .mul(&r_inv)
        .expect("same space")
}

fn check_supported(rho: &DensityMatrix) -> Result<()> {
    let space = rho.space();
    let n_max = space.n_max();
    for i in 0..space.dim() {
        for j in 0..space.dim() {
            if (space.total_number(i) > n_max || space.total_number(j) > n_max)
                && rho.matrix()[[i, j]].norm() > 1e-12
            {
                return Err(Error::UnphysicalState(format!(
                    "support on total photon number > n_max = {n_max}; enlarge the cutoff"
                )));
            }
        }
    }
    Ok(())
}

/// Exact solution of the master equation at distance `z`.
///
/// Requires a physical input supported on total photon number `<= n_max`;
/// for such states the truncated evolution is exact because the coupling
/// conserves and the dissipators only lower the total number.
pub fn evolve_exact(rho0: &DensityMatrix, params: &ModelParams, z: f64) -> Result<DensityMatrix> {
    let trace_dev = (rho0.trace() - Complex64::new(1.0, 0.0)).norm();
    if trace_dev > 1e-6 {
        return Err(Error::UnphysicalState(format!(
            "input trace deviates from 1 by {trace_dev:.3e}"
        )));
    }
    check_supported(rho0)?;

    let u = u_z(params, rho0.space(), z);
    let transformed = exp_jump(Sign::Plus, rho0);
    let evolved = sandwich(&u, &transformed, &u.adjoint())?;
    Ok(exp_jump(Sign::Minus, &evolved))
}

/// No-jump evolution of a pure state: `U(z) |psi0>`, not normalized (the
/// norm decay is the survival probability of the no-jump record).
pub fn evolve_pure_nonhermitian(
    psi0: &StateVector,
    params: &ModelParams,
    z: f64,
) -> StateVector {
    u_z(params, psi0.space(), z)
        .apply(psi0)
        .expect("same space")
}
