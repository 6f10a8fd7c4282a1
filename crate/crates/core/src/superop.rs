//! Superoperators of the master equation and the jump-removing map.
//!
//! The dissipator of each mode splits into a quantum-jump part
//! `J_c rho = 2 c rho c†` and an anticommutator part
//! `L_c rho = c†c rho + rho c†c`; the interaction enters through
//! `S rho = [a b† + a† b, rho]`. Because `[(J_a + J_b), S] = 0` and
//! `[J_c, L_c] = 2 J_c`, conjugating the generator with `exp[(J_a+J_b)/2]`
//! cancels the jump terms exactly, leaving the von Neumann-like equation
//! `dvarrho/dz = -i (H_eff varrho - varrho H_eff†)`.
//!
//! Superoperators are implemented as maps on density matrices (never as
//! dim^2 x dim^2 matrices); each application walks the occupation lattice
//! directly, which reproduces truncated dense matrix algebra entrywise at
//! O(dim^2) cost.

use ndarray::Array2;
use num_complex::Complex64;

use crate::fock::DensityMatrix;
use crate::{Error, Mode, Result};

/// Physical parameters of the two-mode model: coupling `g` and loss rates
/// `gamma_a`, `gamma_b` (all in units of inverse propagation distance).
///
/// `g = 0` is accepted to expose the decoupled single-mode decay limit that
/// anchors the oracle tests; the CLI restricts its configs to `g > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    g: f64,
    gamma_a: f64,
    gamma_b: f64,
}

impl ModelParams {
    pub fn new(g: f64, gamma_a: f64, gamma_b: f64) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "coupling g must be finite and non-negative, got {g}"
            )));
        }
        if !(gamma_a.is_finite() && gamma_a >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "loss rate gamma_a must be finite and non-negative, got {gamma_a}"
            )));
        }
        if !(gamma_b.is_finite() && gamma_b >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "loss rate gamma_b must be finite and non-negative, got {gamma_b}"
            )));
        }
        Ok(Self { g, gamma_a, gamma_b })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    pub fn gamma_b(&self) -> f64 {
        self.gamma_b
    }

    /// Total loss rate `gamma = gamma_a + gamma_b`.
    pub fn gamma(&self) -> f64 {
        self.gamma_a + self.gamma_b
    }

    /// Loss imbalance `delta = gamma_b - gamma_a`.
    pub fn delta(&self) -> f64 {
        self.gamma_b - self.gamma_a
    }
}

/// Sign of the exponent in the jump-removing map `exp[sign (J_a+J_b)/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Quantum-jump superoperator `J_c rho = 2 c rho c†`.
pub fn jump_super(mode: Mode, rho: &DensityMatrix) -> DensityMatrix {
    let space = rho.space();
    let n1 = space.n_max() + 1;
    let src = rho.matrix();
    let mut out = Array2::<Complex64>::zeros(src.raw_dim());
    for la in 0..n1 {
        for lb in 0..n1 {
            let (la_low, lb_low, wl) = match mode {
                Mode::A if la >= 1 => (la - 1, lb, la as f64),
                Mode::B if lb >= 1 => (la, lb - 1, lb as f64),
                _ => continue,
            };
            for ra in 0..n1 {
                for rb in 0..n1 {
                    let (ra_low, rb_low, wr) = match mode {
                        Mode::A if ra >= 1 => (ra - 1, rb, ra as f64),
                        Mode::B if rb >= 1 => (ra, rb - 1, rb as f64),
                        _ => continue,
                    };
                    out[[la_low * n1 + lb_low, ra_low * n1 + rb_low]] +=
                        2.0 * (wl * wr).sqrt() * src[[la * n1 + lb, ra * n1 + rb]];
                }
            }
        }
    }
    DensityMatrix::from_matrix_unchecked(space, out)
}

/// Anticommutator superoperator `L_c rho = c†c rho + rho c†c`.
pub fn anticomm_super(mode: Mode, rho: &DensityMatrix) -> DensityMatrix {
    let space = rho.space();
    let n1 = space.n_max() + 1;
    let src = rho.matrix();
    let mut out = Array2::<Complex64>::zeros(src.raw_dim());
    for i in 0..src.nrows() {
        let (la, lb) = (i / n1, i % n1);
        let nl = match mode {
            Mode::A => la,
            Mode::B => lb,
        } as f64;
        for j in 0..src.ncols() {
            let (ra, rb) = (j / n1, j % n1);
            let nr = match mode {
                Mode::A => ra,
                Mode::B => rb,
            } as f64;
            out[[i, j]] = (nl + nr) * src[[i, j]];
        }
    }
    DensityMatrix::from_matrix_unchecked(space, out)
}

/// Interaction superoperator: the commutator `[a b† + a† b, rho]`.
pub fn interaction_super(rho: &DensityMatrix) -> DensityMatrix {
    let space = rho.space();
    let n1 = space.n_max() + 1;
    let n_max = space.n_max();
    let src = rho.matrix();
    let mut out = Array2::<Complex64>::zeros(src.raw_dim());

    // X rho with X = a b† + a† b:
    // (X rho)[(ma,mb), j] = sqrt((ma+1) mb) rho[(ma+1, mb-1), j]
    //                     + sqrt(ma (mb+1)) rho[(ma-1, mb+1), j]
    for ma in 0..n1 {
        for mb in 0..n1 {
            let i = ma * n1 + mb;
            if ma < n_max && mb >= 1 {
                let w = (((ma + 1) * mb) as f64).sqrt();
                let k = (ma + 1) * n1 + (mb - 1);
                for j in 0..src.ncols() {
                    out[[i, j]] += w * src[[k, j]];
                }
            }
            if ma >= 1 && mb < n_max {
                let w = ((ma * (mb + 1)) as f64).sqrt();
                let k = (ma - 1) * n1 + (mb + 1);
                for j in 0..src.ncols() {
                    out[[i, j]] += w * src[[k, j]];
                }
            }
        }
    }
    // minus rho X:
    // (rho X)[i, (ma,mb)] = sqrt(ma (mb+1)) rho[i, (ma-1, mb+1)]
    //                     + sqrt((ma+1) mb) rho[i, (ma+1, mb-1)]
    for ma in 0..n1 {
        for mb in 0..n1 {
            let j = ma * n1 + mb;
            if ma >= 1 && mb < n_max {
                let w = ((ma * (mb + 1)) as f64).sqrt();
                let k = (ma - 1) * n1 + (mb + 1);
                for i in 0..src.nrows() {
                    out[[i, j]] -= w * src[[i, k]];
                }
            }
            if ma < n_max && mb >= 1 {
                let w = (((ma + 1) * mb) as f64).sqrt();
                let k = (ma + 1) * n1 + (mb - 1);
                for i in 0..src.nrows() {
                    out[[i, j]] -= w * src[[i, k]];
                }
            }
        }
    }
    DensityMatrix::from_matrix_unchecked(space, out)
}

/// Full right-hand side of the master equation:
/// `-i g S rho + gamma_a (J_a - L_a) rho + gamma_b (J_b - L_b) rho`.
pub fn lindblad_rhs(params: &ModelParams, rho: &DensityMatrix) -> DensityMatrix {
    let minus_i_g = Complex64::new(0.0, -params.g());
    let mut out = interaction_super(rho).scaled(minus_i_g);
    for (mode, rate) in [(Mode::A, params.gamma_a()), (Mode::B, params.gamma_b())] {
        if rate == 0.0 {
            continue;
        }
        let diss = &jump_super(mode, rho) - &anticomm_super(mode, rho);
        out = &out + &diss.scaled(Complex64::new(rate, 0.0));
    }
    out
}

/// The jump-removing map `exp[sign (J_a + J_b)/2] rho` as a finite series.
///
/// Each application of `J_a + J_b` lowers the photon content on both sides of
/// the matrix by one, so the Taylor series terminates exactly; termination is
/// detected by a vanishing term rather than a photon-count bound, which keeps
/// it correct for mixed states of ragged support.
pub fn exp_jump(sign: Sign, rho: &DensityMatrix) -> DensityMatrix {
    let half = 0.5 * sign.factor();
    let mut total = rho.clone();
    let mut term = rho.clone();
    let cap = 2 * rho.space().n_max() + 2;
    for k in 1..=cap {
        let jumped = &jump_super(Mode::A, &term) + &jump_super(Mode::B, &term);
        term = jumped.scaled(Complex64::new(half / k as f64, 0.0));
        if term.max_norm() < 1e-300 {
            break;
        }
        total = &total + &term;
    }
    total
}
