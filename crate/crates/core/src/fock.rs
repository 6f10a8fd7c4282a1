//! Truncated two-mode Fock space and the dense complex matrix kernel.
//!
//! Basis states |n_a, n_b> with 0 <= n_a, n_b <= n_max are flattened
//! row-major with mode `a` major: `index = n_a * (n_max + 1) + n_b`. The
//! ordering is fixed so serialized matrices are bit-comparable across runs.
//!
//! Matrices are dense (`dim <= 121` at the default cutoff); the matrix
//! exponential uses Pade-13 scaling and squaring, and Hermitian eigenvalues
//! (positivity checks, trace distance) come from cyclic complex Jacobi
//! rotations.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::{Error, Result};

/// Which of the two bosonic modes an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// Truncation descriptor for the two-mode Hilbert space.
///
/// Owns the bijection between occupation pairs `(n_a, n_b)` and flat indices
/// `0..dim` with `dim = (n_max + 1)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    /// Per-mode photon-number cutoff.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Flat Hilbert-space dimension, `(n_max + 1)^2`.
    pub fn dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1)
    }

    /// Flat index of |n_a, n_b> (row-major, mode `a` major).
    pub fn index_of(&self, n_a: usize, n_b: usize) -> Result<usize> {
        if n_a > self.n_max || n_b > self.n_max {
            return Err(Error::OccupationOutOfRange {
                n_a,
                n_b,
                n_max: self.n_max,
            });
        }
        Ok(n_a * (self.n_max + 1) + n_b)
    }

    /// Occupations `(n_a, n_b)` of a flat index; inverse of [`index_of`].
    ///
    /// [`index_of`]: FockSpace::index_of
    pub fn occupation(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            });
        }
        Ok((index / (self.n_max + 1), index % (self.n_max + 1)))
    }

    /// Total photon number `n_a + n_b` of a flat index.
    pub(crate) fn total_number(&self, index: usize) -> usize {
        index / (self.n_max + 1) + index % (self.n_max + 1)
    }

    fn check_same(&self, other: &FockSpace) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// Dense complex square matrix on a truncated [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: FockSpace,
    mat: Array2<Complex64>,
}

impl Operator {
    pub fn zeros(space: FockSpace) -> Self {
        Self {
            space,
            mat: Array2::zeros((space.dim(), space.dim())),
        }
    }

    pub fn identity(space: FockSpace) -> Self {
        Self {
            space,
            mat: Array2::eye(space.dim()),
        }
    }

    pub fn from_matrix(space: FockSpace, mat: Array2<Complex64>) -> Result<Self> {
        if mat.nrows() != space.dim() || mat.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: mat.nrows().max(mat.ncols()),
                right: space.dim(),
            });
        }
        Ok(Self { space, mat })
    }

    /// Annihilation operator of `mode`: `a |n_a, n_b> = sqrt(n_a) |n_a-1, n_b>`
    /// (and the analogue for `b`).
    pub fn annihilation(space: FockSpace, mode: Mode) -> Self {
        let mut op = Self::zeros(space);
        let n1 = space.n_max + 1;
        for na in 0..n1 {
            for nb in 0..n1 {
                let from = na * n1 + nb;
                match mode {
                    Mode::A if na >= 1 => {
                        op.mat[[(na - 1) * n1 + nb, from]] = Complex64::new((na as f64).sqrt(), 0.0)
                    }
                    Mode::B if nb >= 1 => {
                        op.mat[[na * n1 + (nb - 1), from]] = Complex64::new((nb as f64).sqrt(), 0.0)
                    }
                    _ => {}
                }
            }
        }
        op
    }

    /// Creation operator of `mode` (adjoint of [`annihilation`]); creation out
    /// of the top occupation `n_max` is truncated to zero.
    ///
    /// [`annihilation`]: Operator::annihilation
    pub fn creation(space: FockSpace, mode: Mode) -> Self {
        Self::annihilation(space, mode).adjoint()
    }

    /// Projector |n_a, n_b><n_a, n_b| as an observable.
    pub fn basis_projector(space: FockSpace, n_a: usize, n_b: usize) -> Result<Self> {
        let idx = space.index_of(n_a, n_b)?;
        let mut op = Self::zeros(space);
        op.mat[[idx, idx]] = Complex64::new(1.0, 0.0);
        Ok(op)
    }

    /// Number operator `c†c` of `mode` (diagonal).
    pub fn number(space: FockSpace, mode: Mode) -> Self {
        let mut op = Self::zeros(space);
        for i in 0..space.dim() {
            let (na, nb) = space.occupation(i).expect("index in range");
            let n = match mode {
                Mode::A => na,
                Mode::B => nb,
            };
            op.mat[[i, i]] = Complex64::new(n as f64, 0.0);
        }
        op
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.mat
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            mat: adjoint_matrix(&self.mat),
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.space.check_same(&other.space)?;
        Ok(Self {
            space: self.space,
            mat: self.mat.dot(&other.mat),
        })
    }

    /// Apply to a ket: `self |psi>`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.space.check_same(&psi.space)?;
        Ok(StateVector {
            space: self.space,
            amps: self.mat.dot(&psi.amps),
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            space: self.space,
            mat: self.mat.mapv(|v| v * factor),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.diag().sum()
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        max_norm(&self.mat)
    }

    /// Largest entry magnitude over the block whose row and column basis
    /// states both have total photon number `<= max_total`.
    ///
    /// Operator identities are exact only below the cutoff; truncation
    /// corrupts the top sectors, so comparisons restrict to this block.
    pub fn max_norm_within(&self, max_total: usize) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.mat.nrows() {
            if self.space.total_number(i) > max_total {
                continue;
            }
            for j in 0..self.mat.ncols() {
                if self.space.total_number(j) > max_total {
                    continue;
                }
                worst = worst.max(self.mat[[i, j]].norm());
            }
        }
        worst
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        self.mat.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix element <l_a, l_b| M |r_a, r_b>.
    pub fn element(&self, left: (usize, usize), right: (usize, usize)) -> Result<Complex64> {
        let i = self.space.index_of(left.0, left.1)?;
        let j = self.space.index_of(right.0, right.1)?;
        Ok(self.mat[[i, j]])
    }

    /// Matrix exponential `exp(self)`; relative accuracy ~1e-12 for
    /// `max_norm <= 50`.
    pub fn expm(&self) -> Result<Operator> {
        Ok(Self {
            space: self.space,
            mat: matrix_exp(&self.mat)?,
        })
    }
}

macro_rules! impl_linear_ops {
    ($ty:ident, $field:ident) => {
        impl std::ops::Add for &$ty {
            type Output = $ty;
            fn add(self, rhs: &$ty) -> $ty {
                assert_eq!(self.space, rhs.space, "operands live on different spaces");
                $ty {
                    space: self.space,
                    $field: &self.$field + &rhs.$field,
                }
            }
        }
        impl std::ops::Sub for &$ty {
            type Output = $ty;
            fn sub(self, rhs: &$ty) -> $ty {
                assert_eq!(self.space, rhs.space, "operands live on different spaces");
                $ty {
                    space: self.space,
                    $field: &self.$field - &rhs.$field,
                }
            }
        }
    };
}

impl_linear_ops!(Operator, mat);
impl_linear_ops!(DensityMatrix, mat);
impl_linear_ops!(StateVector, amps);

/// Ket on a truncated [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: FockSpace,
    amps: Array1<Complex64>,
}

impl StateVector {
    pub fn zeros(space: FockSpace) -> Self {
        Self {
            space,
            amps: Array1::zeros(space.dim()),
        }
    }

    /// Basis ket |n_a, n_b>.
    pub fn basis(space: FockSpace, n_a: usize, n_b: usize) -> Result<Self> {
        let mut psi = Self::zeros(space);
        let idx = space.index_of(n_a, n_b)?;
        psi.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(psi)
    }

    pub fn from_amplitudes(space: FockSpace, amps: Array1<Complex64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: space.dim(),
            });
        }
        Ok(Self { space, amps })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::UnphysicalState("cannot normalize zero vector".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            space: self.space,
            amps: self.amps.mapv(|v| v * factor),
        }
    }

    /// Hermitian inner product <self|other> (conjugates `self`).
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.space.check_same(&other.space)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(l, r)| l.conj() * r)
            .sum())
    }

    /// Outer product |self><other|.
    pub fn outer(&self, other: &StateVector) -> Result<DensityMatrix> {
        self.space.check_same(&other.space)?;
        let dim = self.space.dim();
        let mut mat = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                mat[[i, j]] = self.amps[i] * other.amps[j].conj();
            }
        }
        Ok(DensityMatrix {
            space: self.space,
            mat,
        })
    }
}

/// Dense complex square matrix representing a (possibly transformed) state.
///
/// Physicality (unit trace, Hermiticity, positivity) is diagnosed, not
/// enforced: the jump-removing transformation produces well-defined
/// intermediate matrices that are not density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    mat: Array2<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(space: FockSpace) -> Self {
        Self {
            space,
            mat: Array2::zeros((space.dim(), space.dim())),
        }
    }

    pub fn from_matrix(space: FockSpace, mat: Array2<Complex64>) -> Result<Self> {
        if mat.nrows() != space.dim() || mat.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: mat.nrows().max(mat.ncols()),
                right: space.dim(),
            });
        }
        Ok(Self { space, mat })
    }

    pub(crate) fn from_matrix_unchecked(space: FockSpace, mat: Array2<Complex64>) -> Self {
        debug_assert_eq!(mat.nrows(), space.dim());
        Self { space, mat }
    }

    /// Pure state |psi><psi|.
    pub fn pure(psi: &StateVector) -> Self {
        psi.outer(psi).expect("same space")
    }

    /// Projector |n_a, n_b><n_a, n_b|.
    pub fn basis_projector(space: FockSpace, n_a: usize, n_b: usize) -> Result<Self> {
        Ok(Self::pure(&StateVector::basis(space, n_a, n_b)?))
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.diag().sum()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            mat: adjoint_matrix(&self.mat),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            space: self.space,
            mat: self.mat.mapv(|v| v * factor),
        }
    }

    pub fn max_norm(&self) -> f64 {
        max_norm(&self.mat)
    }

    /// Largest entry magnitude of `rho - rho†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.mat.nrows() {
            for j in 0..self.mat.ncols() {
                worst = worst.max((self.mat[[i, j]] - self.mat[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part `(rho + rho†)/2`.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = hermitian_part(&self.mat);
        hermitian_eigenvalues(&herm)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Matrix element <l_a, l_b| rho |r_a, r_b>.
    pub fn element(&self, left: (usize, usize), right: (usize, usize)) -> Result<Complex64> {
        let i = self.space.index_of(left.0, left.1)?;
        let j = self.space.index_of(right.0, right.1)?;
        Ok(self.mat[[i, j]])
    }

    /// Expectation value tr(rho * op).
    pub fn expectation(&self, op: &Operator) -> Result<Complex64> {
        self.space.check_same(&op.space)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..self.mat.nrows() {
            for k in 0..self.mat.ncols() {
                sum += self.mat[[i, k]] * op.mat[[k, i]];
            }
        }
        Ok(sum)
    }
}

/// `A * rho * B`.
pub fn sandwich(a: &Operator, rho: &DensityMatrix, b: &Operator) -> Result<DensityMatrix> {
    a.space.check_same(&rho.space)?;
    b.space.check_same(&rho.space)?;
    Ok(DensityMatrix {
        space: rho.space,
        mat: a.mat.dot(&rho.mat).dot(&b.mat),
    })
}

/// Trace distance `(1/2) sum of singular values of rho1 - rho2`, computed via
/// the eigenvalues of the Hermitian part of the difference (exact for
/// Hermitian inputs).
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    rho1.space.check_same(&rho2.space)?;
    let diff = hermitian_part(&(&rho1.mat - &rho2.mat));
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

pub(crate) fn adjoint_matrix(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|v| v.conj())
}

pub(crate) fn hermitian_part(m: &Array2<Complex64>) -> Array2<Complex64> {
    (m + &adjoint_matrix(m)).mapv(|v| 0.5 * v)
}

pub(crate) fn max_norm(m: &Array2<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.norm()))
}

// ---------------------------------------------------------------------------
// Matrix exponential: Pade-13 with scaling and squaring (Higham 2005).
// ---------------------------------------------------------------------------

const PADE13_THETA: f64 = 5.371920351148152;

const PADE13_COEFFS: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential of a square complex matrix.
///
/// Pade-13 rational approximant after scaling the matrix below the Higham
/// threshold, followed by repeated squaring. Relative accuracy is at machine
/// level for 1-norms up to ~50.
pub fn matrix_exp(m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix_exp requires a square matrix");
    for ((i, j), v) in m.indexed_iter() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteEntry { row: i, col: j });
        }
    }
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }

    let norm = one_norm(m);
    let squarings = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(squarings as i32), 0.0);
    let scaled = m.mapv(|v| v * scale);

    let mut result = pade13(&scaled)?;
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

fn pade13(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    let eye = Array2::<Complex64>::eye(n);
    let b = PADE13_COEFFS.map(|v| Complex64::new(v, 0.0));

    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let w1 = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let w2 = &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &eye * b[1];
    let u = a.dot(&(w1.dot(&a6) + &w2));

    let v1 = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = v1.dot(&a6) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &eye * b[0];

    // exp(A) ~ (V - U)^{-1} (V + U)
    solve_linear(&(&v - &u), &(&v + &u))
}

/// Solve `A X = B` by Gaussian elimination with partial pivoting.
fn solve_linear(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    let m = b.ncols();
    let mut lu = a.clone();
    let mut x = b.clone();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lu[[col, col]].norm();
        for row in (col + 1)..n {
            let mag = lu[[row, col]].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag < 1e-300 {
            return Err(Error::NumericalFailure(
                "singular Pade denominator in matrix exponential".into(),
            ));
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap([col, j], [pivot_row, j]);
            }
            for j in 0..m {
                x.swap([col, j], [pivot_row, j]);
            }
        }
        let pivot = lu[[col, col]];
        for row in (col + 1)..n {
            let factor = lu[[row, col]] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in (col + 1)..n {
                let v = lu[[col, j]];
                lu[[row, j]] -= factor * v;
            }
            for j in 0..m {
                let v = x[[col, j]];
                x[[row, j]] -= factor * v;
            }
        }
    }

    for col in (0..n).rev() {
        let pivot = lu[[col, col]];
        for j in 0..m {
            let mut sum = x[[col, j]];
            for k in (col + 1)..n {
                sum -= lu[[col, k]] * x[[k, j]];
            }
            x[[col, j]] = sum / pivot;
        }
    }
    Ok(x)
}

fn one_norm(m: &Array2<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        let col_sum: f64 = (0..m.nrows()).map(|i| m[[i, j]].norm()).sum();
        worst = worst.max(col_sum);
    }
    worst
}

// ---------------------------------------------------------------------------
// Hermitian eigenvalues: cyclic complex Jacobi rotations.
// ---------------------------------------------------------------------------

/// Eigenvalues of a Hermitian matrix, ascending. Only the Hermitian content of
/// `m` is used (the caller supplies Hermitian input by contract).
pub fn hermitian_eigenvalues(m: &Array2<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigenvalues requires a square matrix");
    let mut a = hermitian_part(m);
    let scale = max_norm(&a);
    if scale == 0.0 || n == 1 {
        return a.diag().iter().map(|v| v.re).collect();
    }
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[[p, q]].norm());
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                let alpha = apq.norm();
                if alpha < tol * 1e-2 {
                    continue;
                }
                let phase = apq / alpha;
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let tau = (aqq - app) / (2.0 * alpha);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Columns: col_p <- c col_p - s conj(phase) col_q,
                //          col_q <- s phase col_p + c col_q.
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * c - akq * s * phase.conj();
                    a[[k, q]] = akp * s * phase + akq * c;
                }
                // Rows with the adjoint rotation.
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * c - aqk * s * phase;
                    a[[q, k]] = apk * s * phase.conj() + aqk * c;
                }
            }
        }
    }

    let mut eigs: Vec<f64> = a.diag().iter().map(|v| v.re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn index_map_examples() {
        let space = FockSpace::new(3);
        assert_eq!(space.index_of(0, 0).unwrap(), 0);
        assert_eq!(space.index_of(1, 1).unwrap(), 5);
        assert_eq!(space.index_of(3, 3).unwrap(), 15);
        assert!(matches!(
            space.index_of(4, 0),
            Err(Error::OccupationOutOfRange { .. })
        ));
    }

    #[test]
    fn index_map_is_a_bijection() {
        let space = FockSpace::new(5);
        for i in 0..space.dim() {
            let (na, nb) = space.occupation(i).unwrap();
            assert_eq!(space.index_of(na, nb).unwrap(), i);
        }
        assert!(space.occupation(space.dim()).is_err());
    }

    #[test]
    fn ladder_operator_examples() {
        let space = FockSpace::new(3);
        let a = Operator::annihilation(space, Mode::A);

        let psi = StateVector::basis(space, 2, 0).unwrap();
        let out = a.apply(&psi).unwrap();
        let expect = StateVector::basis(space, 1, 0)
            .unwrap()
            .scaled(c(2f64.sqrt(), 0.0));
        assert!((&out - &expect).norm() < 1e-15);

        // vacuum annihilates
        for k in 0..=3 {
            let psi = StateVector::basis(space, 0, k).unwrap();
            assert!(a.apply(&psi).unwrap().norm() < 1e-15);
        }

        // number operator eigenstate
        let nb = Operator::number(space, Mode::B);
        let psi = StateVector::basis(space, 1, 3).unwrap();
        let out = nb.apply(&psi).unwrap();
        assert!((&out - &psi.scaled(c(3.0, 0.0))).norm() < 1e-15);
    }

    #[test]
    fn number_equals_creation_times_annihilation() {
        let space = FockSpace::new(4);
        for mode in [Mode::A, Mode::B] {
            let n = Operator::number(space, mode);
            let via_ladder = Operator::creation(space, mode)
                .mul(&Operator::annihilation(space, mode))
                .unwrap();
            assert!((&n - &via_ladder).max_norm() < 1e-14);
        }
    }

    #[test]
    fn commutator_is_identity_below_cutoff() {
        let space = FockSpace::new(4);
        let a = Operator::annihilation(space, Mode::A);
        let ad = Operator::creation(space, Mode::A);
        let comm = &a.mul(&ad).unwrap() - &ad.mul(&a).unwrap();
        for i in 0..space.dim() {
            let (na_i, _) = space.occupation(i).unwrap();
            for j in 0..space.dim() {
                let (na_j, _) = space.occupation(j).unwrap();
                if na_i < space.n_max() && na_j < space.n_max() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((comm.matrix()[[i, j]] - c(expect, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn adjoint_of_annihilation_is_creation() {
        let space = FockSpace::new(3);
        for mode in [Mode::A, Mode::B] {
            let a = Operator::annihilation(space, mode);
            let ad = Operator::creation(space, mode);
            assert!((&a.adjoint() - &ad).max_norm() < 1e-15);
        }
    }

    #[test]
    fn mul_identity_and_mismatch() {
        let space = FockSpace::new(2);
        let a = Operator::annihilation(space, Mode::A);
        let id = Operator::identity(space);
        assert!((&a.mul(&id).unwrap() - &a).max_norm() < 1e-15);

        let other = Operator::identity(FockSpace::new(3));
        assert!(matches!(
            a.mul(&other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sandwich_with_identity_is_identity_map() {
        let space = FockSpace::new(2);
        let rho = DensityMatrix::basis_projector(space, 1, 1).unwrap();
        let id = Operator::identity(space);
        let out = sandwich(&id, &rho, &id).unwrap();
        assert!((&out - &rho).max_norm() < 1e-15);
    }

    #[test]
    fn expm_zero_is_identity() {
        let space = FockSpace::new(2);
        let z = Operator::zeros(space);
        assert!((&z.expm().unwrap() - &Operator::identity(space)).max_norm() < 1e-14);
    }

    #[test]
    fn expm_diagonal() {
        let mut m = Array2::<Complex64>::zeros((3, 3));
        m[[0, 0]] = c(1.0, 0.0);
        m[[1, 1]] = c(-2.0, 0.5);
        m[[2, 2]] = c(0.0, -3.0);
        let e = matrix_exp(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { m[[i, i]].exp() } else { c(0.0, 0.0) };
                assert!((e[[i, j]] - expect).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn expm_rotation_closed_form() {
        // exp([[0, t], [-t, 0]]) = [[cos t, sin t], [-sin t, cos t]]
        for theta in [0.3f64, 2.0, 50.0] {
            let mut m = Array2::<Complex64>::zeros((2, 2));
            m[[0, 1]] = c(theta, 0.0);
            m[[1, 0]] = c(-theta, 0.0);
            let e = matrix_exp(&m).unwrap();
            assert!((e[[0, 0]] - c(theta.cos(), 0.0)).norm() < 1e-12);
            assert!((e[[0, 1]] - c(theta.sin(), 0.0)).norm() < 1e-12);
            assert!((e[[1, 0]] + c(theta.sin(), 0.0)).norm() < 1e-12);
            assert!((e[[1, 1]] - c(theta.cos(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn expm_rejects_non_finite() {
        let mut m = Array2::<Complex64>::zeros((2, 2));
        m[[0, 1]] = c(f64::NAN, 0.0);
        assert!(matches!(matrix_exp(&m), Err(Error::NonFiniteEntry { .. })));
    }

    #[test]
    fn trace_distance_examples() {
        let space = FockSpace::new(2);
        let r0 = DensityMatrix::basis_projector(space, 0, 0).unwrap();
        let r1 = DensityMatrix::basis_projector(space, 1, 0).unwrap();
        assert!(trace_distance(&r0, &r0).unwrap() < 1e-14);
        assert!((trace_distance(&r0, &r1).unwrap() - 1.0).abs() < 1e-13);

        // distance to the midpoint is half the distance
        let mid = (&r0 + &r1).scaled(c(0.5, 0.0));
        let d = trace_distance(&r0, &r1).unwrap();
        assert!((trace_distance(&r0, &mid).unwrap() - 0.5 * d).abs() < 1e-13);
    }

    #[test]
    fn jacobi_eigenvalues_match_trace_moments() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let n = 9;
        let mut g = Array2::<Complex64>::zeros((n, n));
        for v in g.iter_mut() {
            *v = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let h = hermitian_part(&g);
        let eigs = hermitian_eigenvalues(&h);
        assert_eq!(eigs.len(), n);

        let h2 = h.dot(&h);
        let h3 = h2.dot(&h);
        let m1: f64 = eigs.iter().sum();
        let m2: f64 = eigs.iter().map(|v| v * v).sum();
        let m3: f64 = eigs.iter().map(|v| v * v * v).sum();
        assert!((m1 - h.diag().sum().re).abs() < 1e-11);
        assert!((m2 - h2.diag().sum().re).abs() < 1e-11);
        assert!((m3 - h3.diag().sum().re).abs() < 1e-11);
    }

    #[test]
    fn jacobi_two_by_two_analytic() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let mut m = Array2::<Complex64>::zeros((2, 2));
        m[[0, 0]] = c(1.0, 0.0);
        m[[0, 1]] = c(0.0, 1.0);
        m[[1, 0]] = c(0.0, -1.0);
        m[[1, 1]] = c(1.0, 0.0);
        let eigs = hermitian_eigenvalues(&m);
        assert!((eigs[0] - 0.0).abs() < 1e-14);
        assert!((eigs[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn min_eigenvalue_of_projector() {
        let space = FockSpace::new(2);
        let rho = DensityMatrix::basis_projector(space, 1, 0).unwrap();
        assert!(rho.min_eigenvalue().abs() < 1e-14);
        let neg = rho.scaled(c(-1.0, 0.0));
        assert!((neg.min_eigenvalue() + 1.0).abs() < 1e-14);
    }
}
