//! `coincidence-scan`: coincidence rate vs propagation distance, computed by
//! every available method (closed form, exact matrix pipeline, RK4
//! integration, optionally Monte-Carlo trajectories).

use rayon::prelude::*;

use lossy_coupler::analytic::{coincidence_closed_form, coincidence_from_density};
use lossy_coupler::effective::{eta, r_transform};
use lossy_coupler::oracle::{integrate_lindblad_grid, mc_trajectories_grid, IntegratorConfig};
use lossy_coupler::propagator::{evolve_exact, u_z};
use lossy_coupler::{effective, FockSpace};

use super::{core_err, two_photon_input};
use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, write_dump, write_output};

pub fn run(cfg: &ExperimentConfig, with_mc: bool, dump: bool) -> Result<(), String> {
    if dump && cfg.output_path.is_none() {
        return Err("--dump requires an output path".into());
    }
    let params = cfg.params();
    let space = FockSpace::new(cfg.n_max);
    let grid = cfg.z_grid();
    let (psi, rho0, projector) = two_photon_input(space)?;

    let closed: Vec<f64> = grid
        .iter()
        .map(|&z| coincidence_closed_form(&params, z))
        .collect();

    let exact: Vec<f64> = grid
        .par_iter()
        .map(|&z| {
            evolve_exact(&rho0, &params, z)
                .map(|rho| coincidence_from_density(&rho))
                .map_err(core_err)
        })
        .collect::<Result<_, _>>()?;

    let oracle_cfg = IntegratorConfig::for_params(&params);
    let rk4: Vec<f64> = integrate_lindblad_grid(&rho0, &params, &grid, &oracle_cfg)
        .map_err(core_err)?
        .iter()
        .map(coincidence_from_density)
        .collect();

    let mc = if with_mc {
        Some(
            mc_trajectories_grid(&psi, &params, &grid, &projector, cfg.n_traj, cfg.seed)
                .map_err(core_err)?,
        )
    } else {
        None
    };

    let mut csv = String::new();
    csv.push_str("z,coincidence_closed_form,coincidence_exact_matrix,coincidence_rk4");
    if mc.is_some() {
        csv.push_str(",coincidence_mc,mc_std_error");
    }
    csv.push('\n');
    for (i, &z) in grid.iter().enumerate() {
        csv.push_str(&fmt_f64(z));
        for v in [closed[i], exact[i], rk4[i]] {
            csv.push(',');
            csv.push_str(&fmt_f64(v));
        }
        if let Some(stats) = &mc {
            csv.push(',');
            csv.push_str(&fmt_f64(stats[i].mean));
            csv.push(',');
            csv.push_str(&fmt_f64(stats[i].std_error));
        }
        csv.push('\n');
    }
    write_output(cfg.output_path.as_deref(), &csv)?;

    if dump {
        let out = cfg.output_path.as_deref().expect("checked above");
        let mut config_dump = out.as_os_str().to_owned();
        config_dump.push(".config.txt");
        std::fs::write(&config_dump, cfg.to_canonical_string())
            .map_err(|e| format!("cannot write dump: {e}"))?;
        write_dump(out, "h_eff", &effective::h_eff(&params, space))?;
        write_dump(out, "u_zmax", &u_z(&params, space, cfg.z_max))?;
        if let Ok(rapidity) = eta(&params) {
            write_dump(out, "r", &r_transform(rapidity, space))?;
            write_dump(out, "r_inv", &r_transform(-rapidity, space))?;
        }
    }
    Ok(())
}
