//! Two projections in generic position.
//!
//! For `P`, `Q` in generic position on `H` there are commuting, positive,
//! invertible contractions `C`, `S` on `K` with `C² + S² = 1` and a unitary
//! `U: H → K ⊕ K` such that
//!
//! ```text
//! P = U* [ C²  CS ] U        Q = U* [ C²   −CS ] U
//!        [ CS  S² ]                 [ −CS  S²  ]
//! ```
//!
//! The construction first puts `P` in diagonal form: with `K = PH`,
//! `Γ² = PQP|K` and `w` the unitary part of `PQ(1 − P)`, the frame
//! `V = [[B*], [w B_c*]]` gives `P = V* (1 ⊕ 0) V` and
//! `Q = V* [[Γ², ΓΣ], [ΓΣ, Σ²]] V`. Rotating by half the principal angles,
//! `C = ((1 + Γ)/2)^{1/2}` and `S = ((1 − Γ)/2)^{1/2}`, moves `P` and `Q`
//! symmetrically about the first axis.

use serde::Serialize;

use super::{block2, polar_decompose, vstack};
use crate::error::{Error, Result};
use crate::matrixcore::{
    check_same_dim, commutator_norm, op_norm, spectral_decompose, sqrt_op, CMatrix,
    HermitianMatrix, Tolerance,
};
use crate::projections::{spectrum_is_strict, ProjectionMatrix};

#[derive(Clone, Debug, Default, Serialize)]
pub struct GenericPairResiduals {
    pub reconstruction_p: f64,
    pub reconstruction_q: f64,
    /// `‖C² + S² − 1‖`
    pub pythagoras: f64,
    /// `‖CS − SC‖`
    pub commutator: f64,
    /// `‖U*U − 1‖` and `‖UU* − 1‖`, the worse of the two
    pub unitary: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericPairForm {
    pub c: HermitianMatrix,
    pub s: HermitianMatrix,
    #[serde(serialize_with = "crate::format::serialize_cmatrix")]
    pub unitary: CMatrix,
    pub rank: usize,
    pub residuals: GenericPairResiduals,
    pub tol_used: Tolerance,
}

impl GenericPairForm {
    /// `CS`, the off-diagonal block of both forms up to sign.
    pub fn off_diagonal(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrize(&self.c * &self.s)
    }

    /// `C² − S²`, the cosines of the principal angles between the ranges.
    pub fn principal_cosines(&self) -> HermitianMatrix {
        &self.c.square() - &self.s.square()
    }

    pub fn middle_blocks(&self) -> (CMatrix, CMatrix) {
        let c2 = self.c.square().into_matrix();
        let s2 = self.s.square().into_matrix();
        let cs = self.off_diagonal().into_matrix();
        (block2(&c2, &cs, &cs, &s2), block2(&c2, &(-&cs), &(-&cs), &s2))
    }

    pub fn reconstruct(&self) -> (CMatrix, CMatrix) {
        let (mp, mq) = self.middle_blocks();
        let ut = self.unitary.adjoint();
        (&ut * mp * &self.unitary, &ut * mq * &self.unitary)
    }
}

fn check_projection(p: &ProjectionMatrix, tol: &Tolerance) -> Result<()> {
    let residual = p.idempotence_residual();
    if residual > tol.tol_res {
        return Err(Error::NotProjection { residual });
    }
    Ok(())
}

/// `M ∩ N`, `M ∩ N⊥`, `M⊥ ∩ N` and `M⊥ ∩ N⊥` are all trivial: `P + Q` has no
/// eigenvalue at 0 or 2, and `P − Q` none at ±1.
pub fn generic_position_check(
    p: &ProjectionMatrix,
    q: &ProjectionMatrix,
    tol: &Tolerance,
) -> Result<bool> {
    check_same_dim(p.dim(), q.dim())?;
    check_projection(p, tol)?;
    check_projection(q, tol)?;
    let sum = spectral_decompose(&(p.hermitian() + q.hermitian()))?;
    let diff = spectral_decompose(&(p.hermitian() - q.hermitian()))?;
    let near = |t: f64, target: f64| (t - target).abs() <= tol.tol_eig;
    let sum_ok = sum.eigenvalues.iter().all(|&t| !near(t, 0.0) && !near(t, 2.0));
    let diff_ok = diff.eigenvalues.iter().all(|&t| !near(t, 1.0) && !near(t, -1.0));
    Ok(sum_ok && diff_ok)
}

pub fn halmos_decompose(
    p: &ProjectionMatrix,
    q: &ProjectionMatrix,
    tol: &Tolerance,
) -> Result<GenericPairForm> {
    if !generic_position_check(p, q, tol)? {
        return Err(Error::NotGeneric);
    }
    let n = p.dim();
    if n % 2 != 0 {
        return Err(Error::OddDimension { dim: n });
    }
    let m = n / 2;
    if p.rank() != m {
        return Err(Error::RankMismatch { what: "P".into(), rank: p.rank(), expected: m });
    }
    let basis = p.range_basis()?;
    let co_basis = p.complement().range_basis()?;
    let one = HermitianMatrix::identity(m);

    let cos_sq = q.compress(&basis);
    let cross = basis.adjoint() * q.as_matrix() * &co_basis;
    let w = polar_decompose(&cross, tol)?.u;
    let iso = op_norm(&(w.adjoint() * &w - CMatrix::identity(m, m)));
    if iso > tol.tol_res {
        return Err(Error::InputIntegrity(format!("PQ(1 - P) is not invertible (defect {iso:e})")));
    }
    let cosines = sqrt_op(&cos_sq, tol)?;
    let c = sqrt_op(&(&one + &cosines).scale(0.5), tol)?;
    let s = sqrt_op(&(&one - &cosines).scale(0.5), tol)?;

    let frame = vstack(&basis.adjoint(), &(&w * co_basis.adjoint()));
    let (cm, sm) = (c.as_matrix(), s.as_matrix());
    let rotation = block2(cm, sm, sm, &(-cm));
    let unitary = rotation * frame;

    let mut form = GenericPairForm {
        c,
        s,
        unitary,
        rank: m,
        residuals: GenericPairResiduals::default(),
        tol_used: *tol,
    };
    let (rp, rq) = form.reconstruct();
    let id_n = CMatrix::identity(n, n);
    form.residuals = GenericPairResiduals {
        reconstruction_p: op_norm(&(rp - p.as_matrix())),
        reconstruction_q: op_norm(&(rq - q.as_matrix())),
        pythagoras: op_norm(&((&form.c.square() + &form.s.square()).into_matrix() - one.as_matrix())),
        commutator: commutator_norm(form.c.as_matrix(), form.s.as_matrix()),
        unitary: op_norm(&(form.unitary.adjoint() * &form.unitary - &id_n))
            .max(op_norm(&(&form.unitary * form.unitary.adjoint() - &id_n))),
    };
    for (name, x) in [("C", &form.c), ("S", &form.s)] {
        if !spectrum_is_strict(x, tol)? {
            return Err(Error::PostCondition(format!("{name} is not invertible and contractive")));
        }
    }
    let worst = form.residuals.reconstruction_p.max(form.residuals.reconstruction_q);
    if worst > tol.tol_res {
        return Err(Error::PostCondition(format!("reconstruction residual {worst:e}")));
    }
    Ok(form)
}
