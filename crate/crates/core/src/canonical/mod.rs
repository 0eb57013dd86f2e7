//! Canonical forms of strict absolutely compatible pairs.
//!
//! A strict compatible pair `(a, b)` on `H` lives on a doubled space: with
//! `p = 1 − r(a ∘ b)` and `K = pH`, there is a unitary `U: H → K ⊕ K` with
//!
//! ```text
//! a = U* [ a1            (a1 b1)^½ ] U      b = U* [  b1           −(a1 b1)^½ ] U
//!        [ (a1 b1)^½     p − a1    ]               [ −(a1 b1)^½     p − b1    ]
//! ```
//!
//! for a commuting strict pair `a1, b1` on `K` with `p − a1 − b1` strict.
//! [`construct_pair`] goes the other way, and [`halmos`] computes the
//! analogous form for a pair of projections in generic position.

pub mod halmos;
pub mod polar;

use serde::Serialize;

pub use halmos::{generic_position_check, halmos_decompose, GenericPairForm};
pub use polar::{polar_decompose, PolarParts, PolarResiduals};

use crate::compatibility::is_abs_compatible;
use crate::error::{Error, Result};
use crate::matrixcore::{
    abs_op, check_same_dim, commutator_norm, jordan, op_norm, spectral_decompose, sqrt_op,
    CMatrix, HermitianMatrix, Tolerance, UnitIntervalElement,
};
use crate::projections::{range_projection, spectrum_is_strict, ProjectionMatrix};

/// Eigenvalues within this many `tol_eig` of 0 or 1 make `canonical_decompose` refuse.
pub const NEAR_DEGENERATE_FACTOR: f64 = 10.0;

/// `[[tl, tr], [bl, br]]` for four `m × m` blocks.
pub(crate) fn block2(tl: &CMatrix, tr: &CMatrix, bl: &CMatrix, br: &CMatrix) -> CMatrix {
    let m = tl.nrows();
    let mut out = CMatrix::zeros(2 * m, 2 * m);
    out.view_mut((0, 0), (m, m)).copy_from(tl);
    out.view_mut((0, m), (m, m)).copy_from(tr);
    out.view_mut((m, 0), (m, m)).copy_from(bl);
    out.view_mut((m, m), (m, m)).copy_from(br);
    out
}

/// Stacks `top` over `bottom`.
pub(crate) fn vstack(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    let (r1, r2, n) = (top.nrows(), bottom.nrows(), top.ncols());
    let mut out = CMatrix::zeros(r1 + r2, n);
    out.view_mut((0, 0), (r1, n)).copy_from(top);
    out.view_mut((r1, 0), (r2, n)).copy_from(bottom);
    out
}

fn identity(m: usize) -> CMatrix {
    CMatrix::identity(m, m)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CanonicalResiduals {
    /// `‖U*U − 1‖` and `‖UU* − 1‖`, the worse of the two
    pub unitary: f64,
    /// `‖u*u − p‖`
    pub initial_projection: f64,
    /// `‖uu* − (1 − p)‖`
    pub final_projection: f64,
    /// `‖a1 b1 − b1 a1‖`
    pub commutator: f64,
    /// `‖U* A U − a‖`, filled in when the source pair is known
    pub reconstruction_a: f64,
    pub reconstruction_b: f64,
    /// `‖u a₂₂ u* − (p₁ − a₁₁)‖`, filled in when the source pair is known
    pub proof_identity_a: f64,
    pub proof_identity_b: f64,
}

impl CanonicalResiduals {
    pub fn max(&self) -> f64 {
        [
            self.unitary,
            self.initial_projection,
            self.final_projection,
            self.commutator,
            self.reconstruction_a,
            self.reconstruction_b,
            self.proof_identity_a,
            self.proof_identity_b,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Canonical form of a strict compatible pair.
///
/// `a1` and `b1` are written in the orthonormal basis `k_basis` of `K = pH`;
/// `u` is the full-space partial isometry from `pH` onto `(1 − p)H`; and
/// `unitary` is the `2m × n` matrix of `U: H → K ⊕ K` in that basis.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalForm {
    pub p: ProjectionMatrix,
    #[serde(serialize_with = "crate::format::serialize_cmatrix")]
    pub k_basis: CMatrix,
    pub a1: UnitIntervalElement,
    pub b1: UnitIntervalElement,
    #[serde(serialize_with = "crate::format::serialize_cmatrix")]
    pub u: CMatrix,
    #[serde(serialize_with = "crate::format::serialize_cmatrix")]
    pub unitary: CMatrix,
    pub rank_p: usize,
    pub residuals: CanonicalResiduals,
    pub tol_used: Tolerance,
}

impl CanonicalForm {
    /// Builds `U = [[B*], [B* u*]]` from the parts and checks every structural
    /// invariant: strictness of `a1`, `b1` and `p − a1 − b1`, commutation,
    /// and `u*u = p`, `uu* = 1 − p`.
    pub fn assemble(
        p: ProjectionMatrix,
        k_basis: CMatrix,
        a1: HermitianMatrix,
        b1: HermitianMatrix,
        u: CMatrix,
        tol: &Tolerance,
    ) -> Result<Self> {
        let n = p.dim();
        let m = p.rank();
        if k_basis.nrows() != n || k_basis.ncols() != m {
            return Err(Error::DimensionMismatch { left: k_basis.ncols(), right: m });
        }
        check_same_dim(a1.dim(), m)?;
        check_same_dim(b1.dim(), m)?;
        check_same_dim(u.nrows(), n)?;
        if 2 * m != n {
            return Err(Error::RankMismatch { what: "p".into(), rank: m, expected: n / 2 });
        }
        let basis_defect = op_norm(&(k_basis.adjoint() * &k_basis - identity(m)))
            .max(op_norm(&(&k_basis * k_basis.adjoint() - p.as_matrix())));
        if basis_defect > tol.tol_res {
            return Err(Error::InputIntegrity(format!(
                "k_basis is not an orthonormal basis of pH (defect {basis_defect:e})"
            )));
        }

        for (name, x) in [("a1", &a1), ("b1", &b1)] {
            if !spectrum_is_strict(x, tol)? {
                return Err(Error::NotStrict { which: name.into() });
            }
        }
        let commutator = commutator_norm(a1.as_matrix(), b1.as_matrix());
        if commutator > tol.tol_res {
            return Err(Error::NonCommuting { what: "a1 and b1".into(), residual: commutator });
        }
        if !spectrum_is_strict(&(&a1.complement() - &b1), tol)? {
            return Err(Error::NotStrict { which: "p - a1 - b1".into() });
        }

        let unitary = vstack(&k_basis.adjoint(), &(k_basis.adjoint() * u.adjoint()));
        let residuals = CanonicalResiduals {
            unitary: op_norm(&(unitary.adjoint() * &unitary - identity(n)))
                .max(op_norm(&(&unitary * unitary.adjoint() - identity(n)))),
            initial_projection: op_norm(&(u.adjoint() * &u - p.as_matrix())),
            final_projection: op_norm(&(&u * u.adjoint() - p.complement().as_matrix())),
            commutator,
            ..Default::default()
        };
        let iso = residuals.initial_projection.max(residuals.final_projection);
        if iso > tol.tol_res {
            return Err(Error::InputIntegrity(format!(
                "u is not a unitary from pH onto (1 - p)H (defect {iso:e})"
            )));
        }
        let a1 = UnitIntervalElement::new(a1, tol)?;
        let b1 = UnitIntervalElement::new(b1, tol)?;
        Ok(Self { p, k_basis, a1, b1, u, unitary, rank_p: m, residuals, tol_used: *tol })
    }

    /// `(a1 b1)^{1/2}` on `K`.
    pub fn cross_term(&self) -> Result<HermitianMatrix> {
        sqrt_op(&jordan(&self.a1, &self.b1)?, &self.tol_used)
    }

    /// The two `2m × 2m` block matrices on `K ⊕ K`.
    pub fn middle_blocks(&self) -> Result<(CMatrix, CMatrix)> {
        let x = self.cross_term()?.into_matrix();
        let m = self.rank_p;
        let (a1, b1) = (self.a1.as_matrix(), self.b1.as_matrix());
        let a = block2(a1, &x, &x, &(identity(m) - a1));
        let b = block2(b1, &(-&x), &(-&x), &(identity(m) - b1));
        Ok((a, b))
    }

    /// `a1`, `b1` embedded back into `H` as operators supported on `pH`.
    pub fn embedded(&self) -> (HermitianMatrix, HermitianMatrix) {
        (self.a1.conjugate_by(&self.k_basis), self.b1.conjugate_by(&self.k_basis))
    }
}

/// Canonical form of a strict absolutely compatible pair.
pub fn canonical_decompose(
    a: &UnitIntervalElement,
    b: &UnitIntervalElement,
    tol: &Tolerance,
) -> Result<CanonicalForm> {
    check_same_dim(a.dim(), b.dim())?;
    let n = a.dim();
    let guard = NEAR_DEGENERATE_FACTOR * tol.tol_eig;
    for (name, x) in [("a", a), ("b", b)] {
        let sd = spectral_decompose(x)?;
        if !spectrum_is_strict(x, tol)? {
            return Err(Error::NotStrict { which: name.into() });
        }
        if let Some(&t) = sd.eigenvalues.iter().find(|&&t| t < guard || t > 1.0 - guard) {
            return Err(Error::NearDegenerate { which: name.into(), eigenvalue: t });
        }
    }
    let compat = is_abs_compatible(a, b, tol)?;
    if !compat.verdict {
        return Err(Error::NotCompatible { residual: compat.residual });
    }
    if n % 2 != 0 {
        return Err(Error::OddDimension { dim: n });
    }

    let p1 = range_projection(&jordan(a, b)?, tol)?;
    let p = p1.complement();
    let m = n / 2;
    if p.rank() != m {
        return Err(Error::RankMismatch { what: "1 - r(a∘b)".into(), rank: p.rank(), expected: m });
    }
    let k_basis = p.range_basis()?;
    let b1_basis = p1.range_basis()?;
    let a11 = a.compress(&b1_basis);
    let b11 = b.compress(&b1_basis);
    let a12 = b1_basis.adjoint() * a.as_matrix() * &k_basis;
    let a22 = a.compress(&k_basis);
    let b22 = b.compress(&k_basis);

    let polar = polar_decompose(&a12, tol)?;
    let w = &polar.u;
    let iso = op_norm(&(w.adjoint() * w - identity(m)));
    if iso > tol.tol_res {
        return Err(Error::InputIntegrity(format!(
            "off-diagonal block a12 is not injective on pH (u*u defect {iso:e})"
        )));
    }
    let u = &b1_basis * w * k_basis.adjoint();

    let mut cf = CanonicalForm::assemble(p, k_basis, a22.clone(), b22.clone(), u, tol)?;

    let (ma, mb) = cf.middle_blocks()?;
    let ut = cf.unitary.adjoint();
    cf.residuals.reconstruction_a = op_norm(&(&ut * ma * &cf.unitary - a.as_matrix()));
    cf.residuals.reconstruction_b = op_norm(&(&ut * mb * &cf.unitary - b.as_matrix()));
    cf.residuals.proof_identity_a = op_norm(&(w * a22.as_matrix() * w.adjoint() - (identity(m) - a11.as_matrix())));
    cf.residuals.proof_identity_b = op_norm(&(w * b22.as_matrix() * w.adjoint() - (identity(m) - b11.as_matrix())));

    let recon = cf.residuals.reconstruction_a.max(cf.residuals.reconstruction_b);
    if recon > tol.tol_res {
        return Err(Error::PostCondition(format!("reconstruction residual {recon:e}")));
    }
    Ok(cf)
}

/// Rebuilds `(a, b)` from a canonical form after re-checking its invariants.
pub fn reconstruct_from_canonical(
    cf: &CanonicalForm,
) -> Result<(UnitIntervalElement, UnitIntervalElement)> {
    let tol = &cf.tol_used;
    let checked = CanonicalForm::assemble(
        cf.p.clone(),
        cf.k_basis.clone(),
        cf.a1.matrix().clone(),
        cf.b1.matrix().clone(),
        cf.u.clone(),
        tol,
    )?;
    if op_norm(&(&checked.unitary - &cf.unitary)) > tol.tol_res {
        return Err(Error::InputIntegrity("stored U does not match its parts".into()));
    }
    let (ma, mb) = checked.middle_blocks()?;
    let ut = checked.unitary.adjoint();
    let a = HermitianMatrix::symmetrize(&ut * ma * &checked.unitary);
    let b = HermitianMatrix::symmetrize(&ut * mb * &checked.unitary);
    Ok((UnitIntervalElement::new(a, tol)?, UnitIntervalElement::new(b, tol)?))
}

/// Builds a strict compatible pair of doubled size from a strict commuting
/// pair with `a² + b² ≤ 1` and `1 − a² − b²` strict:
///
/// ```text
/// a1 = [ a²   ab     ]      b1 = [ b²    −ab    ]
///      [ ab   1 − a² ]           [ −ab   1 − b² ]
/// ```
pub fn construct_pair(
    a: &UnitIntervalElement,
    b: &UnitIntervalElement,
    tol: &Tolerance,
) -> Result<(UnitIntervalElement, UnitIntervalElement)> {
    check_same_dim(a.dim(), b.dim())?;
    for (name, x) in [("a", a), ("b", b)] {
        if !spectrum_is_strict(x, tol)? {
            return Err(Error::NotStrict { which: name.into() });
        }
    }
    let residual = commutator_norm(a.as_matrix(), b.as_matrix());
    if residual > tol.tol_res {
        return Err(Error::NonCommuting { what: "a and b".into(), residual });
    }
    let a2 = a.square();
    let b2 = b.square();
    let sum = spectral_decompose(&(&a2 + &b2))?;
    if sum.max() > 1.0 + tol.tol_eig {
        return Err(Error::SumBound { max_eigenvalue: sum.max() });
    }
    if !spectrum_is_strict(&(&a2.complement() - &b2), tol)? {
        return Err(Error::ComplementNotStrict);
    }

    let ab = jordan(a, b)?.into_matrix();
    let (a2, b2) = (a2.into_matrix(), b2.into_matrix());
    let one = identity(a.dim());
    let a1 = block2(&a2, &ab, &ab, &(&one - &a2));
    let b1 = block2(&b2, &(-&ab), &(-&ab), &(&one - &b2));
    let wrap = |m: CMatrix| {
        UnitIntervalElement::new(HermitianMatrix::symmetrize(m), tol)
            .map_err(|e| Error::PostCondition(format!("constructed element left [0, 1]: {e}")))
    };
    Ok((wrap(a1)?, wrap(b1)?))
}

/// Defects of `|a1 − b1| = (a² + b²) ⊕ (a² + b²)` and
/// `|1 − a1 − b1| = (1 − a² − b²) ⊕ (1 − a² − b²)` for a constructed pair.
pub fn construction_identity_residuals(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    a1: &HermitianMatrix,
    b1: &HermitianMatrix,
) -> Result<(f64, f64)> {
    let sum = &a.square() + &b.square();
    let rest = sum.complement();
    let diff = abs_op(&(a1 - b1))?;
    let gap = abs_op(&(&a1.complement() - b1))?;
    let r1 = op_norm(&(diff.as_matrix() - sum.direct_sum(&sum).as_matrix()));
    let r2 = op_norm(&(gap.as_matrix() - rest.direct_sum(&rest).as_matrix()));
    Ok((r1, r2))
}
