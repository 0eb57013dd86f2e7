//! Complex Hermitian matrices and their spectral functional calculus.
//!
//! Every operator identity in this crate is evaluated on dense complex
//! matrices. A [`HermitianMatrix`] is stored exactly self-adjoint: ingest
//! replaces `x` by `(x + x*)/2`, so `entries[j][k] == conj(entries[k][j])`
//! holds bit for bit. Functions of a self-adjoint matrix (`|x|`, `x^{1/2}`,
//! spectral projections) all go through one eigendecomposition.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const EIGEN_MAX_ITER: usize = 10_000;

/// Classification thresholds shared by every check in the crate.
///
/// `tol_eig` decides which eigenvalues count as 0 or 1; `tol_res` bounds the
/// operator norm of the defect of an operator identity. Both are absolute:
/// every element of interest has norm at most 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub tol_eig: f64,
    pub tol_res: f64,
}

impl Tolerance {
    pub const DEFAULT_EIG: f64 = 1e-8;
    pub const DEFAULT_RES: f64 = 1e-7;

    pub fn new(tol_eig: f64, tol_res: f64) -> Result<Self> {
        for (name, v) in [("tol_eig", tol_eig), ("tol_res", tol_res)] {
            if !(v.is_finite() && v >= f64::EPSILON) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {v} must be finite and at least machine epsilon"
                )));
            }
        }
        Ok(Self { tol_eig, tol_res })
    }

    /// Same eigenvalue threshold, different residual threshold.
    pub fn with_res(self, tol_res: f64) -> Result<Self> {
        Self::new(self.tol_eig, tol_res)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { tol_eig: Self::DEFAULT_EIG, tol_res: Self::DEFAULT_RES }
    }
}

/// Largest singular value. Empty matrices have norm 0.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// `‖xy − yx‖_op` for square matrices of equal size.
pub fn commutator_norm(x: &CMatrix, y: &CMatrix) -> f64 {
    op_norm(&(x * y - y * x))
}

pub(crate) fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub(crate) fn check_same_dim(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A complex self-adjoint `n × n` matrix.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    data: CMatrix,
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianMatrix{}", self.data)
    }
}

impl HermitianMatrix {
    /// Ingests `m`, rejecting it if `‖(m − m*)/2‖_op > tol_res`.
    pub fn new(m: CMatrix, tol: &Tolerance) -> Result<Self> {
        check_square(&m)?;
        let residual = Self::asymmetry(&m);
        if residual > tol.tol_res {
            return Err(Error::NotHermitian { residual, tol: tol.tol_res });
        }
        Ok(Self::symmetrize(m))
    }

    /// Operator norm of the anti-Hermitian part of `m`.
    pub fn asymmetry(m: &CMatrix) -> f64 {
        op_norm(&((m - m.adjoint()) * c(0.5)))
    }

    /// `(m + m*)/2` without any residual check.
    ///
    /// # Panics
    /// If `m` is not square.
    pub fn symmetrize(m: CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetrize needs a square matrix");
        let n = m.nrows();
        let data = CMatrix::from_fn(n, n, |j, k| (m[(j, k)] + m[(k, j)].conj()) * 0.5);
        Self { data }
    }

    pub fn from_real_rows(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::NotSquare { rows: n, cols: rows.len() / n.max(1) });
        }
        let m = CMatrix::from_fn(n, n, |j, k| c(rows[j * n + k]));
        Self::new(m, &Tolerance::default())
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self { data: CMatrix::from_fn(n, n, |j, k| if j == k { c(values[j]) } else { c(0.0) }) }
    }

    pub fn identity(n: usize) -> Self {
        Self { data: CMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: CMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    /// `1 − x`.
    pub fn complement(&self) -> Self {
        &Self::identity(self.dim()) - self
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { data: &self.data * c(s) }
    }

    /// `w x w*` for any `w` with `w.ncols() == n`.
    pub fn conjugate_by(&self, w: &CMatrix) -> Self {
        Self::symmetrize(w * &self.data * w.adjoint())
    }

    /// `w* x w`, the compression of `x` onto the columns of `w`.
    pub fn compress(&self, w: &CMatrix) -> Self {
        Self::symmetrize(w.adjoint() * &self.data * w)
    }

    /// Symmetrized square `x²`.
    pub fn square(&self) -> Self {
        Self::symmetrize(&self.data * &self.data)
    }

    pub fn op_norm(&self) -> f64 {
        op_norm(&self.data)
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.dim(), other.dim());
        let mut data = CMatrix::zeros(n + m, n + m);
        data.view_mut((0, 0), (n, n)).copy_from(&self.data);
        data.view_mut((n, n), (m, m)).copy_from(&other.data);
        Self { data }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(spectral_decompose(self)?.eigenvalues)
    }
}

impl<'a> Add<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix::symmetrize(&self.data + &rhs.data)
    }
}

impl<'a> Sub<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix::symmetrize(&self.data - &rhs.data)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        HermitianMatrix { data: -&self.data }
    }
}

/// The ordinary (non-Hermitian in general) product.
impl<'a> Mul<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &HermitianMatrix) -> CMatrix {
        &self.data * &rhs.data
    }
}

/// Eigenvalues in ascending order with the matching unitary of eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(λ)) V*`, failing if `f` is not finite at some eigenvalue.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<HermitianMatrix> {
        let mut values = Vec::with_capacity(self.dim());
        for &lambda in &self.eigenvalues {
            let v = f(lambda);
            if !v.is_finite() {
                return Err(Error::Domain { eigenvalue: lambda });
            }
            values.push(v);
        }
        Ok(self.with_values(&values))
    }

    fn with_values(&self, values: &[f64]) -> HermitianMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (mut col, &w) in scaled.column_iter_mut().zip(values) {
            col *= c(w);
        }
        HermitianMatrix::symmetrize(scaled * v.adjoint())
    }

    /// Orthonormal columns spanning the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn eigenbasis<P: Fn(f64) -> bool>(&self, keep: P) -> CMatrix {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| keep(self.eigenvalues[i])).collect();
        let n = self.dim();
        CMatrix::from_fn(n, idx.len(), |r, k| self.eigenvectors[(r, idx[k])])
    }

    /// Sum of `v v*` over eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projection<P: Fn(f64) -> bool>(&self, keep: P) -> HermitianMatrix {
        let basis = self.eigenbasis(keep);
        HermitianMatrix::symmetrize(&basis * basis.adjoint())
    }

    pub fn reconstruction_residual(&self, x: &HermitianMatrix) -> f64 {
        op_norm(&(self.with_values(&self.eigenvalues).data - &x.data))
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NEG_INFINITY)
    }
}

pub fn spectral_decompose(x: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = x.dim();
    if n == 0 {
        return Ok(SpectralDecomposition { eigenvalues: vec![], eigenvectors: CMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::try_new(x.data.clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::EigenFailure { input: Box::new(x.data.clone()) })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

pub fn apply_spectral_function<F: Fn(f64) -> f64>(
    x: &HermitianMatrix,
    f: F,
) -> Result<HermitianMatrix> {
    spectral_decompose(x)?.apply(f)
}

/// `|x| = (x²)^{1/2}`.
pub fn abs_op(x: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_spectral_function(x, f64::abs)
}

/// Positive square root; eigenvalues in `[−tol_eig, 0)` are clamped to 0.
///
/// Eigenvalues below the rounding floor `8 n ε ‖x‖` are also set to 0:
/// they carry no information, and the square root would lift them to the
/// size of `tol_eig`.
pub fn sqrt_op(x: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let sd = spectral_decompose(x)?;
    if sd.min() < -tol.tol_eig {
        return Err(Error::NotPositive { eigenvalue: sd.min(), tol: tol.tol_eig });
    }
    let scale = sd.eigenvalues.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let floor = 8.0 * sd.dim() as f64 * f64::EPSILON * scale;
    sd.apply(|t| if t <= floor { 0.0 } else { t.sqrt() })
}

/// Jordan product `x ∘ y = (xy + yx)/2`.
pub fn jordan(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_same_dim(x.dim(), y.dim())?;
    let xy = &x.data * &y.data;
    let yx = &y.data * &x.data;
    Ok(HermitianMatrix::symmetrize((xy + yx) * c(0.5)))
}

pub fn in_unit_interval(x: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    let sd = spectral_decompose(x)?;
    Ok(sd.min() >= -tol.tol_eig && sd.max() <= 1.0 + tol.tol_eig)
}

/// A Hermitian matrix certified to satisfy `0 ≤ x ≤ 1` up to `tol_eig`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitIntervalElement {
    matrix: HermitianMatrix,
}

impl UnitIntervalElement {
    pub fn new(matrix: HermitianMatrix, tol: &Tolerance) -> Result<Self> {
        let sd = spectral_decompose(&matrix)?;
        if sd.dim() > 0 && (sd.min() < -tol.tol_eig || sd.max() > 1.0 + tol.tol_eig) {
            return Err(Error::NotInUnitInterval { min: sd.min(), max: sd.max() });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn into_inner(self) -> HermitianMatrix {
        self.matrix
    }
}

impl Deref for UnitIntervalElement {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        op_norm(&(a - b)) <= tol
    }

    #[test]
    fn spectral_examples() {
        let sd = spectral_decompose(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(sd.eigenvalues.len(), 2);
        assert!(sd.eigenvalues.iter().all(|l| (l - 1.0).abs() < 1e-14));

        let sd = spectral_decompose(&HermitianMatrix::diag(&[0.7, 0.3])).unwrap();
        assert!((sd.eigenvalues[0] - 0.3).abs() < 1e-14);
        assert!((sd.eigenvalues[1] - 0.7).abs() < 1e-14);

        let swap = HermitianMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let sd = spectral_decompose(&swap).unwrap();
        assert!((sd.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((sd.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(sd.reconstruction_residual(&swap) < 1e-14);
        let v = &sd.eigenvectors;
        assert!(close(&(v.adjoint() * v), &CMatrix::identity(2, 2), 1e-14));
    }

    #[test]
    fn functional_calculus_examples() {
        let swap = HermitianMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let id = apply_spectral_function(&swap, |t| t).unwrap();
        assert!(close(id.as_matrix(), swap.as_matrix(), 1e-14));
        let one = apply_spectral_function(&HermitianMatrix::diag(&[0.2, 0.5]), |_| 1.0).unwrap();
        assert!(close(one.as_matrix(), &CMatrix::identity(2, 2), 1e-14));
        let sq = apply_spectral_function(&swap, |t| t * t).unwrap();
        assert!(close(sq.as_matrix(), &CMatrix::identity(2, 2), 1e-14));
    }

    #[test]
    fn undefined_function_is_domain_error() {
        let x = HermitianMatrix::diag(&[-0.5, 0.5]);
        let err = apply_spectral_function(&x, f64::ln).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }

    #[test]
    fn abs_examples() {
        let a = abs_op(&HermitianMatrix::diag(&[-0.3, 0.3])).unwrap();
        assert!(close(a.as_matrix(), HermitianMatrix::diag(&[0.3, 0.3]).as_matrix(), 1e-15));
        let z = abs_op(&HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(z.op_norm(), 0.0);
        let swap = HermitianMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let a = abs_op(&swap).unwrap();
        assert!(close(a.as_matrix(), &CMatrix::identity(2, 2), 1e-14));
    }

    #[test]
    fn sqrt_examples() {
        let tol = Tolerance::default();
        let r = sqrt_op(&HermitianMatrix::identity(2), &tol).unwrap();
        assert!(close(r.as_matrix(), &CMatrix::identity(2, 2), 1e-15));
        let r = sqrt_op(&HermitianMatrix::diag(&[0.25, 0.81]), &tol).unwrap();
        assert!(close(r.as_matrix(), HermitianMatrix::diag(&[0.5, 0.9]).as_matrix(), 1e-15));
        // rank one: 0.5 * projection onto (1,1)/√2, root is (1/√2) times the projection
        let x = HermitianMatrix::from_real_rows(2, &[0.25, 0.25, 0.25, 0.25]).unwrap();
        let r = sqrt_op(&x, &tol).unwrap();
        let k = 1.0 / (2.0 * 2f64.sqrt());
        let expected = HermitianMatrix::from_real_rows(2, &[k, k, k, k]).unwrap();
        assert!(close(r.as_matrix(), expected.as_matrix(), 1e-14));
        assert!(close(&(r.as_matrix() * r.as_matrix()), x.as_matrix(), 1e-14));
    }

    #[test]
    fn sqrt_rejects_negative_and_clamps_tiny() {
        let tol = Tolerance::default();
        let err = sqrt_op(&HermitianMatrix::diag(&[-1e-3, 0.5]), &tol).unwrap_err();
        assert!(matches!(err, Error::NotPositive { .. }));
        let r = sqrt_op(&HermitianMatrix::diag(&[-1e-10, 0.25]), &tol).unwrap();
        assert!(close(r.as_matrix(), HermitianMatrix::diag(&[0.0, 0.5]).as_matrix(), 1e-15));
    }

    #[test]
    fn jordan_examples() {
        let x = HermitianMatrix::from_real_rows(2, &[0.3, 0.1, 0.1, 0.6]).unwrap();
        let j = jordan(&HermitianMatrix::identity(2), &x).unwrap();
        assert!(close(j.as_matrix(), x.as_matrix(), 1e-15));
        let j = jordan(&HermitianMatrix::diag(&[0.5, 0.0]), &HermitianMatrix::diag(&[0.0, 0.5]))
            .unwrap();
        assert_eq!(j.op_norm(), 0.0);
        let a1 = HermitianMatrix::from_real_rows(2, &[0.25, 0.25, 0.25, 0.75]).unwrap();
        let b1 = HermitianMatrix::from_real_rows(2, &[0.25, -0.25, -0.25, 0.75]).unwrap();
        let j = jordan(&a1, &b1).unwrap();
        let expected = HermitianMatrix::diag(&[0.0, 0.5]);
        assert!(close(j.as_matrix(), expected.as_matrix(), 1e-15));
        assert!(jordan(&a1, &HermitianMatrix::identity(3)).is_err());
    }

    #[test]
    fn unit_interval_examples() {
        let tol = Tolerance::default();
        assert!(in_unit_interval(&HermitianMatrix::diag(&[0.0, 1.0]), &tol).unwrap());
        assert!(!in_unit_interval(&HermitianMatrix::diag(&[0.5, 1.5]), &tol).unwrap());
        let a1 = HermitianMatrix::from_real_rows(2, &[0.25, 0.25, 0.25, 0.75]).unwrap();
        assert!(in_unit_interval(&a1, &tol).unwrap());
        let ev = a1.eigenvalues().unwrap();
        let h = 2f64.sqrt() / 2.0;
        assert!((ev[0] - (1.0 - h) / 2.0).abs() < 1e-14);
        assert!((ev[1] - (1.0 + h) / 2.0).abs() < 1e-14);
        assert!(UnitIntervalElement::new(HermitianMatrix::diag(&[0.5, 1.5]), &tol).is_err());
    }

    #[test]
    fn ingest_symmetrizes_and_rejects_asymmetry() {
        let tol = Tolerance::default();
        let mut m = CMatrix::from_fn(2, 2, |j, k| Complex64::new((j + k) as f64, (j as f64) - (k as f64)));
        let h = HermitianMatrix::new(m.clone(), &tol).unwrap();
        assert_eq!(h.as_matrix()[(0, 1)], h.as_matrix()[(1, 0)].conj());
        m[(0, 1)] += c(1e-3);
        assert!(matches!(HermitianMatrix::new(m, &tol), Err(Error::NotHermitian { .. })));
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(HermitianMatrix::new(rect, &tol), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(1e-20, 1e-7).is_err());
        assert!(Tolerance::new(1e-8, f64::NAN).is_err());
        assert_eq!(Tolerance::new(1e-8, 1e-7).unwrap(), Tolerance::default());
    }
}
