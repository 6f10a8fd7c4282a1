pub mod eigen;
pub mod scan;
pub mod sweep;
pub mod validate;

use lossy_coupler::{DensityMatrix, FockSpace, Operator, StateVector};

pub(crate) fn core_err(e: lossy_coupler::Error) -> String {
    e.to_string()
}

/// |1,1>, its density matrix, and its projector: the input state and
/// observable of every coincidence experiment.
pub(crate) fn two_photon_input(
    space: FockSpace,
) -> Result<(StateVector, DensityMatrix, Operator), String> {
    let psi = StateVector::basis(space, 1, 1).map_err(core_err)?;
    let rho = DensityMatrix::pure(&psi);
    let projector = Operator::basis_projector(space, 1, 1).map_err(core_err)?;
    Ok((psi, rho, projector))
}
