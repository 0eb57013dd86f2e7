//! Projections attached to elements of `[0, 1]`: the range projection `r(x)`,
//! the null projection `n(a) = 1 − r(a)`, the one-projection `s(a)`, and
//! compressions with respect to a resolution of the identity.
//!
//! In a matrix algebra all three are spectral projections, so they are read
//! off an eigendecomposition with `tol_eig`-wide windows around 0 and 1.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::matrixcore::{
    check_same_dim, commutator_norm, jordan, op_norm, spectral_decompose, CMatrix,
    HermitianMatrix, SpectralDecomposition, Tolerance, UnitIntervalElement,
};

/// A self-adjoint idempotent with its rank.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMatrix {
    matrix: HermitianMatrix,
    rank: usize,
    degenerate: bool,
}

impl ProjectionMatrix {
    /// Certifies `p² = p` within `tol_res`.
    pub fn new(matrix: HermitianMatrix, tol: &Tolerance) -> Result<Self> {
        let m = matrix.as_matrix();
        let residual = op_norm(&(m * m - m));
        if residual > tol.tol_res {
            return Err(Error::NotProjection { residual });
        }
        Ok(Self::with_trace_rank(matrix, tol))
    }

    fn with_trace_rank(matrix: HermitianMatrix, tol: &Tolerance) -> Self {
        let trace = matrix.as_matrix().trace().re;
        let rank = trace.round().max(0.0) as usize;
        let degenerate = (trace - rank as f64).abs() > matrix.dim() as f64 * tol.tol_eig;
        Self { matrix, rank, degenerate }
    }

    /// `B B*` for a matrix `B` with orthonormal columns.
    pub fn from_basis(basis: &CMatrix) -> Self {
        let matrix = HermitianMatrix::symmetrize(basis * basis.adjoint());
        Self { matrix, rank: basis.ncols(), degenerate: false }
    }

    fn from_spectral<P: Fn(f64) -> bool>(sd: &SpectralDecomposition, keep: P) -> Self {
        Self::from_basis(&sd.eigenbasis(keep))
    }

    pub fn zero(n: usize) -> Self {
        Self { matrix: HermitianMatrix::zeros(n), rank: 0, degenerate: false }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: HermitianMatrix::identity(n), rank: n, degenerate: false }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `|trace − rank| > n·tol_eig` at construction time.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// `1 − p`.
    pub fn complement(&self) -> Self {
        Self {
            matrix: self.matrix.complement(),
            rank: self.dim() - self.rank,
            degenerate: self.degenerate,
        }
    }

    /// `‖p² − p‖_op`.
    pub fn idempotence_residual(&self) -> f64 {
        let m = self.as_matrix();
        op_norm(&(m * m - m))
    }

    /// Orthonormal basis of the range, one column per unit of rank.
    ///
    /// Each column is scaled so its first largest-modulus entry is real and
    /// positive, which makes the basis reproducible for projections with
    /// one-dimensional eigenspaces.
    pub fn range_basis(&self) -> Result<CMatrix> {
        let sd = spectral_decompose(&self.matrix)?;
        let mut basis = sd.eigenbasis(|t| t > 0.5);
        normalize_phases(&mut basis);
        Ok(basis)
    }
}

impl Deref for ProjectionMatrix {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.matrix
    }
}

pub(crate) fn normalize_phases(basis: &mut CMatrix) {
    for mut col in basis.column_iter_mut() {
        let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        let pivot = col.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied().unwrap();
        let phase = pivot.conj() / pivot.norm();
        col *= phase;
    }
}

/// Support projection `r(x)` of a positive semidefinite `x`: the span of the
/// eigenvectors with eigenvalue above `tol_eig`.
pub fn range_projection(x: &HermitianMatrix, tol: &Tolerance) -> Result<ProjectionMatrix> {
    let sd = spectral_decompose(x)?;
    if sd.dim() > 0 && sd.min() < -tol.tol_eig {
        return Err(Error::NotPositive { eigenvalue: sd.min(), tol: tol.tol_eig });
    }
    Ok(ProjectionMatrix::from_spectral(&sd, |t| t > tol.tol_eig))
}

/// Null projection `n(a) = 1 − r(a)`.
pub fn null_projection(a: &UnitIntervalElement, tol: &Tolerance) -> Result<ProjectionMatrix> {
    Ok(range_projection(a, tol)?.complement())
}

/// One-projection `s(a)`, the largest projection below `a`: eigenvalues above
/// `1 − tol_eig`.
pub fn one_projection(a: &UnitIntervalElement, tol: &Tolerance) -> Result<ProjectionMatrix> {
    let sd = spectral_decompose(a)?;
    Ok(ProjectionMatrix::from_spectral(&sd, |t| t > 1.0 - tol.tol_eig))
}

/// `s(a) = 0` and `n(a) = 0`: the spectrum lies in `(tol_eig, 1 − tol_eig)`.
pub fn is_strict(a: &UnitIntervalElement, tol: &Tolerance) -> Result<bool> {
    spectrum_is_strict(a, tol)
}

pub(crate) fn spectrum_is_strict(x: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    let sd = spectral_decompose(x)?;
    Ok(sd.eigenvalues.iter().all(|&t| t > tol.tol_eig && t < 1.0 - tol.tol_eig))
}

/// `‖xy − yx‖_op ≤ tol_res`.
pub fn commutes(x: &HermitianMatrix, y: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    check_same_dim(x.dim(), y.dim())?;
    Ok(commutator_norm(x.as_matrix(), y.as_matrix()) <= tol.tol_res)
}

/// Meet of two commuting projections, `r(p ∘ q)`.
pub fn meet_commuting(
    p: &ProjectionMatrix,
    q: &ProjectionMatrix,
    tol: &Tolerance,
) -> Result<ProjectionMatrix> {
    check_same_dim(p.dim(), q.dim())?;
    let residual = commutator_norm(p.as_matrix(), q.as_matrix());
    if residual > tol.tol_res {
        return Err(Error::NonCommuting { what: "projections".into(), residual });
    }
    range_projection(&jordan(p, q)?, tol)
}

/// Operator-norm defect of a family being a resolution of the identity:
/// the larger of `‖Σ pᵢ − 1‖` and `max_{i≠j} ‖pᵢ pⱼ‖`.
pub fn resolution_residual(family: &[ProjectionMatrix]) -> f64 {
    let Some(first) = family.first() else { return 0.0 };
    let n = first.dim();
    let sum = family.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p.as_matrix());
    let mut worst = op_norm(&(sum - CMatrix::identity(n, n)));
    for (i, p) in family.iter().enumerate() {
        for q in &family[i + 1..] {
            worst = worst.max(op_norm(&(p.as_matrix() * q.as_matrix())));
        }
    }
    worst
}

/// `x` compressed against a resolution of the identity: `blocks[i][j]` is
/// `pᵢ x pⱼ` written in orthonormal bases of the two ranges.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub family: Vec<ProjectionMatrix>,
    pub bases: Vec<CMatrix>,
    pub blocks: Vec<Vec<CMatrix>>,
}

impl BlockDecomposition {
    pub fn block(&self, i: usize, j: usize) -> &CMatrix {
        &self.blocks[i][j]
    }

    /// Diagonal block `i` as a Hermitian matrix on the range of `pᵢ`.
    pub fn diagonal(&self, i: usize) -> HermitianMatrix {
        HermitianMatrix::symmetrize(self.blocks[i][i].clone())
    }

    /// `Σᵢⱼ Bᵢ blocks[i][j] Bⱼ*`.
    pub fn reassemble(&self) -> CMatrix {
        let n = self.family.first().map_or(0, |p| p.dim());
        let mut out = CMatrix::zeros(n, n);
        for (i, bi) in self.bases.iter().enumerate() {
            for (j, bj) in self.bases.iter().enumerate() {
                out += bi * &self.blocks[i][j] * bj.adjoint();
            }
        }
        out
    }

    /// Largest off-diagonal block norm.
    pub fn off_diagonal_norm(&self) -> f64 {
        let k = self.blocks.len();
        (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| op_norm(&self.blocks[i][j]))
            .fold(0.0, f64::max)
    }
}

pub fn block_decompose(
    x: &HermitianMatrix,
    family: &[ProjectionMatrix],
    tol: &Tolerance,
) -> Result<BlockDecomposition> {
    for p in family {
        check_same_dim(x.dim(), p.dim())?;
    }
    let residual = resolution_residual(family);
    if family.is_empty() || residual > tol.tol_res {
        return Err(Error::NotResolution { residual });
    }
    let bases = family.iter().map(ProjectionMatrix::range_basis).collect::<Result<Vec<_>>>()?;
    Ok(compress_blocks(x.as_matrix(), family.to_vec(), bases))
}

pub(crate) fn compress_blocks(
    x: &CMatrix,
    family: Vec<ProjectionMatrix>,
    bases: Vec<CMatrix>,
) -> BlockDecomposition {
    let blocks = bases
        .iter()
        .map(|bi| bases.iter().map(|bj| bi.adjoint() * x * bj).collect())
        .collect();
    BlockDecomposition { family, bases, blocks }
}
