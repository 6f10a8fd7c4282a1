//! `validate`: run the cross-method consistency checks and emit a report.
//!
//! Covers the operator algebra (su(2) rules, jump-superoperator
//! commutators), the diagonalization (similarity, spectral residuals,
//! bi-orthogonality, EP Jordan structure), exact-vs-RK4 agreement with
//! physicality of the evolved states, EP continuity of the coincidence, and
//! Monte-Carlo consistency with reproducibility. Failures become report rows,
//! not crashes; the process exits 1 when any row fails.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use lossy_coupler::analytic::coincidence_from_density;
use lossy_coupler::effective::{
    eigenvalue, eta, h_diag, h_eff, left_eigenvector, r_transform, right_eigenvector,
    schwinger_ops,
};
use lossy_coupler::fock::trace_distance;
use lossy_coupler::oracle::{integrate_lindblad_grid, mc_trajectories_grid, IntegratorConfig};
use lossy_coupler::propagator::evolve_exact;
use lossy_coupler::superop::{anticomm_super, interaction_super, jump_super};
use lossy_coupler::{DensityMatrix, FockSpace, Mode, ModelParams, Operator, StateVector};

use super::{core_err, two_photon_input};
use crate::config::ExperimentConfig;
use crate::output::write_output;
use crate::report::{ReportBuilder, ValidationReport};

pub fn run(cfg: &ExperimentConfig, corrupt_tolerances: bool) -> Result<ValidationReport, String> {
    let scale = if corrupt_tolerances { 0.0 } else { 1.0 };
    let mut report = ReportBuilder::new(scale);
    let space = FockSpace::new(cfg.n_max);
    let g = cfg.g;

    algebra_checks(&mut report, space, cfg.seed);
    spectral_checks(&mut report, space, g);
    oracle_checks(&mut report, cfg, space).map_err(core_err)?;
    ep_continuity_check(&mut report, cfg, space).map_err(core_err)?;
    mc_checks(&mut report, cfg, space).map_err(core_err)?;

    let report = report.finish(cfg.to_canonical_string());
    print!("{}", report.render_text());
    if cfg.output_path.is_some() {
        write_output(cfg.output_path.as_deref(), &report.to_json())?;
    }
    Ok(report)
}

fn commutator(a: &Operator, b: &Operator) -> Operator {
    &a.mul(b).expect("same space") - &b.mul(a).expect("same space")
}

fn random_supported_density(space: FockSpace, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let dim = space.dim();
    let n1 = space.n_max() + 1;
    let mut gmat = Array2::<Complex64>::zeros((dim, dim));
    for (idx, v) in gmat.iter_mut().enumerate() {
        let i = idx / dim;
        if i / n1 + i % n1 <= space.n_max() {
            *v = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
    }
    let gd = gmat.t().mapv(|v| v.conj());
    let psd = gmat.dot(&gd);
    let tr: Complex64 = psd.diag().sum();
    DensityMatrix::from_matrix(space, psd.mapv(|v| v / tr)).expect("square")
}

fn algebra_checks(report: &mut ReportBuilder, space: FockSpace, seed: u64) {
    let ops = schwinger_ops(space);
    let sub = space.n_max() - 1;

    let su2 = [
        (&ops.jx, &ops.jy, &ops.jz),
        (&ops.jy, &ops.jz, &ops.jx),
        (&ops.jz, &ops.jx, &ops.jy),
    ]
    .into_iter()
    .map(|(a, b, c)| {
        (&commutator(a, b) - &c.scaled(Complex64::new(0.0, 1.0))).max_norm_within(sub)
    })
    .fold(0.0f64, f64::max);
    report.check("su2_commutation_rules", su2, 1e-10);

    let number = [&ops.jx, &ops.jy, &ops.jz]
        .into_iter()
        .map(|j| commutator(&ops.n, j).max_norm_within(sub))
        .fold(0.0f64, f64::max);
    report.check("total_number_commutes", number, 1e-10);

    let mut jump_vs_interaction = 0.0f64;
    let mut jump_vs_anticomm = 0.0f64;
    for i in 0..50 {
        let rho = random_supported_density(space, seed.wrapping_add(i));
        let jsum =
            |r: &DensityMatrix| &jump_super(Mode::A, r) + &jump_super(Mode::B, r);
        let defect = (&interaction_super(&jsum(&rho)) - &jsum(&interaction_super(&rho))).max_norm();
        jump_vs_interaction = jump_vs_interaction.max(defect);

        for mode in [Mode::A, Mode::B] {
            let lhs = &jump_super(mode, &anticomm_super(mode, &rho))
                - &anticomm_super(mode, &jump_super(mode, &rho));
            let rhs = jump_super(mode, &rho).scaled(Complex64::new(2.0, 0.0));
            jump_vs_anticomm = jump_vs_anticomm.max((&lhs - &rhs).max_norm());
        }
    }
    report.check("jump_interaction_commutation", jump_vs_interaction, 1e-10);
    report.check("jump_anticommutator_identity", jump_vs_anticomm, 1e-10);
}

fn spectral_checks(report: &mut ReportBuilder, space: FockSpace, g: f64) {
    let sub = space.n_max() - 1;
    let regimes = [
        ("below_ep", ModelParams::new(g, 0.75 * g, 0.0).expect("valid")),
        ("above_ep", ModelParams::new(g, 2.5 * g, 0.0).expect("valid")),
    ];

    for (tag, params) in &regimes {
        let h = h_eff(params, space);
        let rapidity = eta(params).expect("away from EP");
        let r = r_transform(rapidity, space);
        let r_inv = r_transform(-rapidity, space);
        let sim = r_inv.mul(&h).expect("same space").mul(&r).expect("same space");
        let hd = h_diag(params, space).expect("away from EP");
        let defect = (&sim - &hd).max_norm_within(sub) / h.max_norm();
        report.check(&format!("similarity_{tag}"), defect, 1e-9);

        let h_adj = h.adjoint();
        let scale = h.fro_norm();
        let mut residual = 0.0f64;
        let cap = space.n_max().min(4);
        for j in 0..=cap {
            for k in 0..=(cap - j) {
                let lambda = eigenvalue(j, k, params);
                let vr = right_eigenvector(j, k, params, space).expect("sector in range");
                let res_r = (&h.apply(&vr).expect("same space") - &vr.scaled(lambda)).norm();
                let vl = left_eigenvector(j, k, params, space).expect("sector in range");
                let res_l =
                    (&h_adj.apply(&vl).expect("same space") - &vl.scaled(lambda.conj())).norm();
                residual = residual.max(res_r / scale).max(res_l / scale);
            }
        }
        report.check(&format!("spectral_residuals_{tag}"), residual, 1e-9);
    }

    // bi-orthogonality over the two-photon sector, below the EP
    let params = &regimes[0].1;
    let sector: [(usize, usize); 6] = [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)];
    let mut bio = 0.0f64;
    for &(j, k) in &sector {
        let vl = left_eigenvector(j, k, params, space).expect("sector in range");
        for &(l, m) in &sector {
            let vr = right_eigenvector(l, m, params, space).expect("sector in range");
            let overlap = vl.inner(&vr).expect("same space");
            let expect = if (j, k) == (l, m) { 1.0 } else { 0.0 };
            bio = bio.max((overlap - Complex64::new(expect, 0.0)).norm());
        }
    }
    report.check("biorthogonality_two_photon", bio, 1e-10);

    // Jordan structure of the one-photon sector at the EP
    let at_ep = ModelParams::new(g, 2.0 * g, 0.0).expect("valid");
    let h = h_eff(&at_ep, space);
    let lambda = Complex64::new(0.0, -0.5 * at_ep.gamma());
    let m = [
        h.element((0, 1), (0, 1)).expect("in range") - lambda,
        h.element((0, 1), (1, 0)).expect("in range"),
        h.element((1, 0), (0, 1)).expect("in range"),
        h.element((1, 0), (1, 0)).expect("in range") - lambda,
    ];
    let m_norm = m.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    let sq = [
        m[0] * m[0] + m[1] * m[2],
        m[0] * m[1] + m[1] * m[3],
        m[2] * m[0] + m[3] * m[2],
        m[2] * m[1] + m[3] * m[3],
    ];
    let sq_norm = sq.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    let h_norm = h.max_norm();
    report.check("ep_jordan_nilpotency", sq_norm / (h_norm * h_norm), 1e-12);
    let nonzero = if m_norm > 1e-3 * h_norm { 0.0 } else { 1.0 };
    report.check("ep_jordan_block_nonzero", nonzero, 0.5);
}

fn oracle_checks(
    report: &mut ReportBuilder,
    cfg: &ExperimentConfig,
    space: FockSpace,
) -> lossy_coupler::Result<()> {
    let z_end = 1.5 / cfg.g;
    let grid: Vec<f64> = (0..21).map(|i| i as f64 * z_end / 20.0).collect();

    let superposition = {
        let psi = &StateVector::basis(space, 1, 0)? + &StateVector::basis(space, 0, 1)?;
        DensityMatrix::pure(&psi.normalized()?)
    };
    let (_, two_photons, _) = two_photon_input(space).expect("n_max >= 2");

    let mut worst_dist = 0.0f64;
    let mut worst_trace = 0.0f64;
    let mut worst_herm = 0.0f64;
    let mut worst_neg = 0.0f64;

    for params in [cfg.params(), ModelParams::new(cfg.g, 0.75 * cfg.g, 0.0)?] {
        let oracle_cfg = IntegratorConfig::for_params(&params);
        for rho0 in [&two_photons, &superposition] {
            let oracle = integrate_lindblad_grid(rho0, &params, &grid, &oracle_cfg)?;
            for (i, &z) in grid.iter().enumerate() {
                let exact = evolve_exact(rho0, &params, z)?;
                worst_dist = worst_dist.max(trace_distance(&exact, &oracle[i])?);
                worst_trace =
                    worst_trace.max((exact.trace() - Complex64::new(1.0, 0.0)).norm());
                worst_herm = worst_herm.max(exact.hermiticity_defect());
                worst_neg = worst_neg.max((-exact.min_eigenvalue()).max(0.0));
            }
        }
    }
    report.check("oracle_vs_exact_trace_distance", worst_dist, 1e-6);
    report.check("physical_trace_deviation", worst_trace, 1e-9);
    report.check("physical_hermiticity_defect", worst_herm, 1e-10);
    report.check("physical_negativity", worst_neg, 1e-8);
    Ok(())
}

fn ep_continuity_check(
    report: &mut ReportBuilder,
    cfg: &ExperimentConfig,
    space: FockSpace,
) -> lossy_coupler::Result<()> {
    let g = cfg.g;
    let z = std::f64::consts::FRAC_PI_4 / g;
    let (_, rho0, _) = two_photon_input(space).expect("n_max >= 2");

    let at_ep = ModelParams::new(g, 2.0 * g, 0.0)?;
    let reference = coincidence_from_density(&evolve_exact(&rho0, &at_ep, z)?);

    let mut worst = 0.0f64;
    for eps in [1e-6, -1e-6] {
        let params = ModelParams::new(g, 2.0 * g * (1.0 + eps), 0.0)?;
        let value = coincidence_from_density(&evolve_exact(&rho0, &params, z)?);
        worst = worst.max((value - reference).abs());
    }
    report.check("ep_continuity_coincidence", worst, 1e-4);
    Ok(())
}

fn mc_checks(
    report: &mut ReportBuilder,
    cfg: &ExperimentConfig,
    space: FockSpace,
) -> lossy_coupler::Result<()> {
    let g = cfg.g;
    let params = ModelParams::new(g, 0.75 * g, 0.0)?;
    let z_points: Vec<f64> = [0.15, 0.35, 0.55, std::f64::consts::FRAC_PI_4, 1.0]
        .iter()
        .map(|&z| z / g)
        .collect();
    let (psi, rho0, projector) = two_photon_input(space).expect("n_max >= 2");

    let stats = mc_trajectories_grid(&psi, &params, &z_points, &projector, cfg.n_traj, cfg.seed)?;
    let mut worst_sigma = 0.0f64;
    let mut worst_abs = 0.0f64;
    for (i, &z) in z_points.iter().enumerate() {
        let exact = coincidence_from_density(&evolve_exact(&rho0, &params, z)?);
        let diff = (stats[i].mean - exact).abs();
        worst_abs = worst_abs.max(diff);
        worst_sigma = worst_sigma.max(if diff == 0.0 {
            0.0
        } else {
            diff / stats[i].std_error
        });
    }
    report.check("mc_within_5_std_errors", worst_sigma, 5.0);
    report.check("mc_absolute_deviation", worst_abs, 0.02);

    let replay = mc_trajectories_grid(&psi, &params, &z_points, &projector, cfg.n_traj, cfg.seed)?;
    let repro = stats
        .iter()
        .zip(replay.iter())
        .map(|(a, b)| (a.mean - b.mean).abs().max((a.std_error - b.std_error).abs()))
        .fold(0.0f64, f64::max);
    report.check("mc_reproducibility", repro, 0.0);
    Ok(())
}
