//! Effective non-Hermitian Hamiltonian and its closed-form diagonalization.
//!
//! After jump removal the generator is `H_eff = -i gamma_a a†a - i gamma_b b†b
//! + g (a b† + a† b)`, equivalently `-i gamma/2 N - i delta J_z + 2 g J_x` in
//! Schwinger-boson language. The hyperbolic rotation `R = exp(eta J_y)` with
//! `tanh(eta) = 2g/delta` cancels the `J_x` term and leaves a diagonal
//! operator whose spectrum changes character at the exceptional point
//! `|delta| = 2g`: oscillatory splitting `omega_I = sqrt(4g^2 - delta^2)`
//! below it and purely dissipative splitting `omega_II = sqrt(delta^2 - 4g^2)`
//! above it, with coalescing Jordan blocks at the point itself.
//!
//! The rapidity is fixed to the principal branch
//! `eta = Ln[(delta + 2g) / sqrt(delta^2 - 4g^2)]`, which satisfies
//! `tanh(eta) = 2g/delta` for every delta and makes `R^-1 H_eff R` equal the
//! diagonal form below for either sign of delta. (Below the EP this is
//! `artanh(delta/2g) - i pi/2`; for `delta < -2g` it picks up `+ i pi`.)

use num_complex::Complex64;

use crate::fock::{FockSpace, Mode, Operator, StateVector};
use crate::superop::ModelParams;
use crate::{Error, Result};

/// Relative half-width of the parameter band classified as the exceptional
/// point: `||delta| - 2g| <= EP_REL_TOL * g`.
pub const EP_REL_TOL: f64 = 1e-9;

/// Spectral phase of the model, classified by `|delta|` against `2g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `|delta| < 2g`: eigenvalue splitting is real (oscillatory),
    /// `omega = omega_I = sqrt(4g^2 - delta^2)`.
    BelowEp { omega: f64 },
    /// `|delta| = 2g` within tolerance: eigenvalues and eigenvectors coalesce.
    AtEp,
    /// `|delta| > 2g`: splitting is imaginary (dissipative),
    /// `omega = omega_II = sqrt(delta^2 - 4g^2)`.
    AboveEp { omega: f64 },
}

impl Regime {
    /// Splitting frequency: `omega_I` below, `omega_II` above, 0 at the EP.
    pub fn omega(&self) -> f64 {
        match self {
            Regime::BelowEp { omega } | Regime::AboveEp { omega } => *omega,
            Regime::AtEp => 0.0,
        }
    }

    pub fn is_at_ep(&self) -> bool {
        matches!(self, Regime::AtEp)
    }
}

impl ModelParams {
    /// Classify the spectral phase of these parameters.
    pub fn regime(&self) -> Regime {
        let g = self.g();
        let delta = self.delta().abs();
        if (delta - 2.0 * g).abs() <= EP_REL_TOL * g {
            Regime::AtEp
        } else if delta < 2.0 * g {
            Regime::BelowEp {
                omega: (4.0 * g * g - delta * delta).sqrt(),
            }
        } else {
            Regime::AboveEp {
                omega: (delta * delta - 4.0 * g * g).sqrt(),
            }
        }
    }
}

/// Rapidity of the diagonalizing transformation, `tanh(eta) = 2g/delta`, on
/// the fixed principal branch described in the module docs.
///
/// Satisfies the balance `2g cosh(eta) = delta sinh(eta)` exactly; refuses at
/// the exceptional point where no diagonalizing rapidity exists.
pub fn eta(params: &ModelParams) -> Result<Complex64> {
    if params.regime().is_at_ep() {
        return Err(Error::ExceptionalPoint);
    }
    let g = params.g();
    let delta = params.delta();
    // discriminant in real arithmetic: complex squaring of a negative delta
    // yields -0.0 imaginary part, which would flip the principal sqrt branch
    let disc = delta * delta - 4.0 * g * g;
    let w = Complex64::new(disc, 0.0).sqrt();
    Ok((Complex64::new(delta + 2.0 * g, 0.0) / w).ln())
}

/// Schwinger-boson operators of the two modes.
///
/// `jx`, `jy`, `jz` satisfy the su(2) commutation rules on every sector below
/// the cutoff, and all commute with the total number `n`.
pub struct SchwingerOps {
    pub n: Operator,
    pub jx: Operator,
    pub jy: Operator,
    pub jz: Operator,
}

/// Build `N = a†a + b†b`, `J_x = (a b† + a† b)/2`, `J_y = i(a†b - a b†)/2`,
/// `J_z = (b†b - a†a)/2` on `space`.
pub fn schwinger_ops(space: FockSpace) -> SchwingerOps {
    let a = Operator::annihilation(space, Mode::A);
    let b = Operator::annihilation(space, Mode::B);
    let ab_dag = a.mul(&b.adjoint()).expect("same space");
    let adag_b = a.adjoint().mul(&b).expect("same space");
    let na = Operator::number(space, Mode::A);
    let nb = Operator::number(space, Mode::B);

    let half = Complex64::new(0.5, 0.0);
    let half_i = Complex64::new(0.0, 0.5);
    SchwingerOps {
        n: &na + &nb,
        jx: (&ab_dag + &adag_b).scaled(half),
        jy: (&adag_b - &ab_dag).scaled(half_i),
        jz: (&nb - &na).scaled(half),
    }
}

/// Effective non-Hermitian Hamiltonian
/// `H_eff = -i gamma_a a†a - i gamma_b b†b + g (a b† + a† b)`.
pub fn h_eff(params: &ModelParams, space: FockSpace) -> Operator {
    let n1 = space.n_max() + 1;
    let n_max = space.n_max();
    let g = params.g();
    let mut op = Operator::zeros(space);
    let mat = op.matrix_mut();
    for na in 0..n1 {
        for nb in 0..n1 {
            let i = na * n1 + nb;
            mat[[i, i]] = Complex64::new(
                0.0,
                -(params.gamma_a() * na as f64 + params.gamma_b() * nb as f64),
            );
            // a b† |na, nb> = sqrt(na (nb+1)) |na-1, nb+1>
            if na >= 1 && nb < n_max {
                let w = g * ((na * (nb + 1)) as f64).sqrt();
                mat[[(na - 1) * n1 + (nb + 1), i]] += Complex64::new(w, 0.0);
            }
            // a† b |na, nb> = sqrt((na+1) nb) |na+1, nb-1>
            if na < n_max && nb >= 1 {
                let w = g * (((na + 1) * nb) as f64).sqrt();
                mat[[(na + 1) * n1 + (nb - 1), i]] += Complex64::new(w, 0.0);
            }
        }
    }
    op
}

/// The non-unitary transformation `R = exp(eta J_y)`; its inverse is
/// `r_transform(-eta, space)`.
pub fn r_transform(eta: Complex64, space: FockSpace) -> Operator {
    schwinger_ops(space)
        .jy
        .scaled(eta)
        .expm()
        .expect("finite rapidity")
}

/// Analytic eigenvalue attached to the transformed basis state |j, k>.
pub fn eigenvalue(j: usize, k: usize, params: &ModelParams) -> Complex64 {
    let gamma = params.gamma();
    let sum = (j + k) as f64;
    let diff = (k as f64) - (j as f64);
    let v = match params.regime() {
        Regime::BelowEp { omega } => Complex64::new(0.5 * omega * diff, -0.5 * gamma * sum),
        Regime::AboveEp { omega } => Complex64::new(0.0, -0.5 * (gamma * sum + omega * diff)),
        Regime::AtEp => Complex64::new(0.0, -0.5 * gamma * sum),
    };
    // flush -0.0 components so serialized tables are sign-stable
    Complex64::new(v.re + 0.0, v.im + 0.0)
}

/// Diagonal form of the effective Hamiltonian in the transformed basis:
/// entry |j, k> is [`eigenvalue`]`(j, k)`. Refuses at the exceptional point,
/// where no similarity to a diagonal operator exists.
pub fn h_diag(params: &ModelParams, space: FockSpace) -> Result<Operator> {
    if params.regime().is_at_ep() {
        return Err(Error::ExceptionalPoint);
    }
    let mut op = Operator::zeros(space);
    for i in 0..space.dim() {
        let (j, k) = space.occupation(i)?;
        op.matrix_mut()[[i, i]] = eigenvalue(j, k, params);
    }
    Ok(op)
}

fn check_sector(j: usize, k: usize, space: FockSpace) -> Result<()> {
    if j + k > space.n_max() {
        return Err(Error::SectorBeyondCutoff {
            total: j + k,
            n_max: space.n_max(),
        });
    }
    Ok(())
}

/// Right eigenvector `|eta_R> = R |j, k>` of `H_eff` with eigenvalue
/// [`eigenvalue`]`(j, k)`. Not normalized: right eigenvectors of a
/// non-Hermitian operator are not orthogonal.
pub fn right_eigenvector(
    j: usize,
    k: usize,
    params: &ModelParams,
    space: FockSpace,
) -> Result<StateVector> {
    check_sector(j, k, space)?;
    let r = r_transform(eta(params)?, space);
    let basis = StateVector::basis(space, j, k)?;
    r.apply(&basis)
}

/// Left eigenvector, returned as the ket `|eta_L>` whose bra is
/// `<eta_L| = <j, k| R^-1`; it satisfies `H_eff† |eta_L> = conj(lambda_jk)
/// |eta_L>` and pairs bi-orthogonally with the right eigenvectors under the
/// Hermitian inner product: `<eta_L(j,k) | eta_R(l,m)> = delta_jl delta_km`.
pub fn left_eigenvector(
    j: usize,
    k: usize,
    params: &ModelParams,
    space: FockSpace,
) -> Result<StateVector> {
    check_sector(j, k, space)?;
    let r_inv = r_transform(-eta(params)?, space);
    let basis = StateVector::basis(space, j, k)?;
    // <j,k| R^-1 conjugated into a ket is (R^-1)† |j,k>.
    r_inv.adjoint().apply(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn commutator(a: &Operator, b: &Operator) -> Operator {
        &a.mul(b).unwrap() - &b.mul(a).unwrap()
    }

    #[test]
    fn regime_classification() {
        let below = ModelParams::new(1.0, 0.75, 0.0).unwrap();
        assert!(matches!(below.regime(), Regime::BelowEp { .. }));
        assert!((below.regime().omega() - (4.0f64 - 0.5625).sqrt()).abs() < 1e-15);

        let at = ModelParams::new(1.0, 2.0, 0.0).unwrap();
        assert!(at.regime().is_at_ep());
        assert_eq!(at.regime().omega(), 0.0);

        let above = ModelParams::new(1.0, 2.5, 0.0).unwrap();
        assert!(matches!(above.regime(), Regime::AboveEp { .. }));
        assert!((above.regime().omega() - (6.25f64 - 4.0).sqrt()).abs() < 1e-15);

        // band edges
        let barely = ModelParams::new(1.0, 2.0 * (1.0 + 1e-10), 0.0).unwrap();
        assert!(barely.regime().is_at_ep());
        let outside = ModelParams::new(1.0, 2.0 * (1.0 + 1e-8), 0.0).unwrap();
        assert!(!outside.regime().is_at_ep());
    }

    #[test]
    fn eta_examples() {
        // delta = 4g: real artanh(1/2)
        let p = ModelParams::new(1.0, 0.0, 4.0).unwrap();
        let e = eta(&p).unwrap();
        assert!((e.re - 0.5 * 3.0f64.ln()).abs() < 1e-14);
        assert!(e.im.abs() < 1e-14);

        // delta = 0: cosh(eta) = 0 kills the J_x coefficient
        let p = ModelParams::new(1.0, 0.5, 0.5).unwrap();
        let e = eta(&p).unwrap();
        assert!(e.re.abs() < 1e-14);
        assert!((e.im.abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!(e.cosh().norm() < 1e-14);

        // EP excluded
        let p = ModelParams::new(1.0, 2.0, 0.0).unwrap();
        assert!(matches!(eta(&p), Err(Error::ExceptionalPoint)));
    }

    #[test]
    fn eta_satisfies_balance_equation() {
        for (ga, gb) in [(0.0, 0.0), (0.75, 0.0), (0.0, 0.75), (2.5, 0.0), (0.0, 2.5), (3.0, 0.25)] {
            let p = ModelParams::new(1.0, ga, gb).unwrap();
            let e = eta(&p).unwrap();
            let lhs = c(2.0 * p.g(), 0.0) * e.cosh();
            let rhs = c(p.delta(), 0.0) * e.sinh();
            assert!(
                (lhs - rhs).norm() < 1e-12,
                "balance violated for ga={ga}, gb={gb}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn h_eff_one_photon_elements() {
        let space = FockSpace::new(3);
        let p = ModelParams::new(1.3, 0.4, 0.0).unwrap();
        let h = h_eff(&p, space);
        assert!((h.element((1, 0), (0, 1)).unwrap() - c(1.3, 0.0)).norm() < 1e-15);
        assert!((h.element((1, 0), (1, 0)).unwrap() - c(0.0, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn h_eff_limits() {
        let space = FockSpace::new(3);

        // lossless limit is Hermitian
        let p = ModelParams::new(1.0, 0.0, 0.0).unwrap();
        let h = h_eff(&p, space);
        assert!((&h - &h.adjoint()).max_norm() < 1e-15);

        // decoupled limit is diagonal
        let p = ModelParams::new(0.0, 0.3, 0.9).unwrap();
        let h = h_eff(&p, space);
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                if i != j {
                    assert!(h.matrix()[[i, j]].norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn h_eff_two_constructions_agree() {
        let space = FockSpace::new(4);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = 0.5 + 1.5 * rng.random::<f64>();
            let ga = 3.0 * rng.random::<f64>();
            let gb = 3.0 * rng.random::<f64>();
            let p = ModelParams::new(g, ga, gb).unwrap();

            let direct = h_eff(&p, space);
            let ops = schwinger_ops(space);
            let schwinger_form = &(&ops.n.scaled(c(0.0, -0.5 * p.gamma()))
                + &ops.jz.scaled(c(0.0, -p.delta())))
                + &ops.jx.scaled(c(2.0 * g, 0.0));
            let scale = direct.max_norm();
            assert!((&direct - &schwinger_form).max_norm() < 1e-14 * scale.max(1.0));
        }
    }

    #[test]
    fn schwinger_commutation_rules() {
        let space = FockSpace::new(4);
        let ops = schwinger_ops(space);
        let sub = space.n_max() - 1;

        let pairs = [
            (&ops.jx, &ops.jy, &ops.jz),
            (&ops.jy, &ops.jz, &ops.jx),
            (&ops.jz, &ops.jx, &ops.jy),
        ];
        for (a, b, expect) in pairs {
            let defect = &commutator(a, b) - &expect.scaled(c(0.0, 1.0));
            assert!(defect.max_norm_within(sub) < 1e-12);
        }
        for j in [&ops.jx, &ops.jy, &ops.jz] {
            assert!(commutator(&ops.n, j).max_norm_within(sub) < 1e-12);
        }
    }

    #[test]
    fn jz_eigenvalue_on_one_photon_state() {
        let space = FockSpace::new(3);
        let ops = schwinger_ops(space);
        let psi = StateVector::basis(space, 1, 0).unwrap();
        let out = ops.jz.apply(&psi).unwrap();
        assert!((&out - &psi.scaled(c(-0.5, 0.0))).norm() < 1e-15);
    }

    #[test]
    fn r_transform_identity_at_zero() {
        let space = FockSpace::new(3);
        let r = r_transform(c(0.0, 0.0), space);
        assert!((&r - &Operator::identity(space)).max_norm() < 1e-13);
    }

    #[test]
    fn r_transform_similarity_identities() {
        let space = FockSpace::new(4);
        let ops = schwinger_ops(space);
        let sub = space.n_max() - 1;
        for e in [c(0.7, 0.0), c(-0.394229, -std::f64::consts::FRAC_PI_2)] {
            let r = r_transform(e, space);
            let r_inv = r_transform(-e, space);
            let conj_jz = r_inv.mul(&ops.jz).unwrap().mul(&r).unwrap();
            let expect_jz = &ops.jz.scaled(e.cosh()) - &ops.jx.scaled(c(0.0, 1.0) * e.sinh());
            assert!((&conj_jz - &expect_jz).max_norm_within(sub) < 1e-10);

            let conj_jx = r_inv.mul(&ops.jx).unwrap().mul(&r).unwrap();
            let expect_jx = &ops.jx.scaled(e.cosh()) + &ops.jz.scaled(c(0.0, 1.0) * e.sinh());
            assert!((&conj_jx - &expect_jx).max_norm_within(sub) < 1e-10);
        }
    }

    #[test]
    fn h_diag_is_diagonal_with_analytic_entries() {
        let space = FockSpace::new(4);
        let p = ModelParams::new(1.0, 0.75, 0.0).unwrap();
        let hd = h_diag(&p, space).unwrap();
        for i in 0..space.dim() {
            let (j, k) = space.occupation(i).unwrap();
            assert!((hd.matrix()[[i, i]] - eigenvalue(j, k, &p)).norm() < 1e-15);
            for l in 0..space.dim() {
                if l != i {
                    assert!(hd.matrix()[[i, l]].norm() < 1e-12);
                }
            }
        }
        assert!(matches!(
            h_diag(&ModelParams::new(1.0, 2.0, 0.0).unwrap(), space),
            Err(Error::ExceptionalPoint)
        ));
    }

    #[test]
    fn h_diag_lossless_entry() {
        let space = FockSpace::new(3);
        let p = ModelParams::new(1.0, 0.0, 0.0).unwrap();
        let hd = h_diag(&p, space).unwrap();
        assert!((hd.element((0, 1), (0, 1)).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn similarity_to_diagonal_form_in_both_regimes() {
        let space = FockSpace::new(6);
        let sub = space.n_max() - 1;
        for (ga, gb) in [(0.0, 0.0), (0.75, 0.0), (0.0, 0.75), (2.5, 0.0), (0.0, 2.5), (3.5, 0.25)] {
            let p = ModelParams::new(1.0, ga, gb).unwrap();
            let h = h_eff(&p, space);
            let e = eta(&p).unwrap();
            let r = r_transform(e, space);
            let r_inv = r_transform(-e, space);
            let sim = r_inv.mul(&h).unwrap().mul(&r).unwrap();
            let hd = h_diag(&p, space).unwrap();
            let defect = (&sim - &hd).max_norm_within(sub);
            assert!(
                defect <= 1e-9 * h.max_norm(),
                "similarity defect {defect:.3e} for ga={ga}, gb={gb}"
            );
        }
    }

    #[test]
    fn eigenvalue_examples() {
        for (ga, gb) in [(0.0, 0.0), (0.75, 0.0), (2.5, 0.0)] {
            let p = ModelParams::new(1.0, ga, gb).unwrap();
            assert_eq!(eigenvalue(0, 0, &p), c(0.0, 0.0));
        }

        // lossless: omega_I = 2g
        let p = ModelParams::new(1.0, 0.0, 0.0).unwrap();
        assert!((eigenvalue(1, 0, &p) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((eigenvalue(0, 1, &p) - c(1.0, 0.0)).norm() < 1e-15);

        // EP coalescence
        let p = ModelParams::new(1.0, 2.0, 0.0).unwrap();
        let lam = c(0.0, -0.5 * p.gamma());
        assert!((eigenvalue(1, 0, &p) - lam).norm() < 1e-15);
        assert!((eigenvalue(0, 1, &p) - lam).norm() < 1e-15);
    }

    #[test]
    fn spectral_residuals_both_regimes() {
        let space = FockSpace::new(6);
        for (ga, gb) in [(0.0, 0.0), (0.75, 0.0), (0.0, 0.75), (2.5, 0.0), (3.2, 0.1)] {
            let p = ModelParams::new(1.0, ga, gb).unwrap();
            let h = h_eff(&p, space);
            let h_adj = h.adjoint();
            let scale = h.fro_norm();
            for j in 0..=4usize {
                for k in 0..=(4 - j) {
                    let lam = eigenvalue(j, k, &p);
                    let vr = right_eigenvector(j, k, &p, space).unwrap();
                    let res = (&h.apply(&vr).unwrap() - &vr.scaled(lam)).norm();
                    assert!(
                        res <= 1e-9 * scale,
                        "right residual {res:.3e} at (j,k)=({j},{k}), ga={ga}, gb={gb}"
                    );

                    let vl = left_eigenvector(j, k, &p, space).unwrap();
                    let res_l = (&h_adj.apply(&vl).unwrap() - &vl.scaled(lam.conj())).norm();
                    assert!(
                        res_l <= 1e-9 * scale,
                        "left residual {res_l:.3e} at (j,k)=({j},{k}), ga={ga}, gb={gb}"
                    );
                }
            }
        }
    }

    #[test]
    fn eigenvector_examples() {
        let space = FockSpace::new(4);
        let p = ModelParams::new(1.0, 0.75, 0.0).unwrap();

        // vacuum is invariant under R
        let v = right_eigenvector(0, 0, &p, space).unwrap();
        let vac = StateVector::basis(space, 0, 0).unwrap();
        assert!((&v - &vac).norm() < 1e-13);

        // bi-orthogonality over the two-photon sector
        let sector: Vec<(usize, usize)> =
            vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)];
        for &(j, k) in &sector {
            let l_vec = left_eigenvector(j, k, &p, space).unwrap();
            for &(l, m) in &sector {
                let r_vec = right_eigenvector(l, m, &p, space).unwrap();
                let overlap = l_vec.inner(&r_vec).unwrap();
                let expect = if (j, k) == (l, m) { 1.0 } else { 0.0 };
                assert!(
                    (overlap - c(expect, 0.0)).norm() < 1e-10,
                    "biorthogonality defect at ({j},{k}) vs ({l},{m}): {overlap}"
                );
            }
        }

        // right eigenvectors are not normalized for asymmetric loss
        let v = right_eigenvector(1, 0, &p, space).unwrap();
        assert!((v.norm() - 1.0).abs() > 1e-3);

        // sector beyond the cutoff refuses
        assert!(matches!(
            right_eigenvector(3, 2, &p, space),
            Err(Error::SectorBeyondCutoff { .. })
        ));
    }

    #[test]
    fn one_photon_sector_is_jordan_block_at_ep() {
        let space = FockSpace::new(3);
        for (ga, gb) in [(2.0, 0.0), (0.0, 2.0)] {
            let p = ModelParams::new(1.0, ga, gb).unwrap();
            let h = h_eff(&p, space);
            let lam = c(0.0, -0.5 * p.gamma());

            // 2x2 one-photon block of H_eff - lambda I in basis {|0,1>, |1,0>}
            let m00 = h.element((0, 1), (0, 1)).unwrap() - lam;
            let m01 = h.element((0, 1), (1, 0)).unwrap();
            let m10 = h.element((1, 0), (0, 1)).unwrap();
            let m11 = h.element((1, 0), (1, 0)).unwrap() - lam;

            let norm_m = [m00, m01, m10, m11]
                .iter()
                .fold(0.0f64, |acc, v| acc.max(v.norm()));
            assert!(norm_m > 0.1, "nilpotent part vanished");

            // square must vanish: 2x2 Jordan block
            let sq = [
                m00 * m00 + m01 * m10,
                m00 * m01 + m01 * m11,
                m10 * m00 + m11 * m10,
                m10 * m01 + m11 * m11,
            ];
            let norm_sq = sq.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
            let scale = h.max_norm();
            assert!(
                norm_sq <= 1e-12 * scale * scale,
                "nilpotency defect {norm_sq:.3e}"
            );
        }
    }
}
