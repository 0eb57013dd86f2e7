//! The absolute-compatibility relation `|a − b| + |1 − a − b| = 1` and its
//! structural consequences: the two-block characterization with witness
//! projection `p₁`, the orthogonality equivalence, and the five-block
//! reduction of a compatible pair to its strict core.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrixcore::{
    abs_op, c, check_same_dim, commutator_norm, op_norm, spectral_decompose, CMatrix,
    HermitianMatrix, Tolerance, UnitIntervalElement,
};
use crate::projections::{
    block_decompose, compress_blocks, meet_commuting, null_projection, one_projection,
    resolution_residual, spectrum_is_strict, ProjectionMatrix,
};

#[derive(Clone, Debug, Serialize)]
pub struct CompatibilityReport {
    /// `‖|a − b| + |1 − a − b| − 1‖_op`.
    pub residual: f64,
    pub verdict: bool,
    pub tol_used: Tolerance,
}

/// `|a − b| + |1 − a − b| − 1`.
pub fn compatibility_defect(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_same_dim(a.dim(), b.dim())?;
    let diff = abs_op(&(a - b))?;
    let rest = abs_op(&(&a.complement() - b))?;
    Ok(&(&diff + &rest) - &HermitianMatrix::identity(a.dim()))
}

pub fn is_abs_compatible(
    a: &UnitIntervalElement,
    b: &UnitIntervalElement,
    tol: &Tolerance,
) -> Result<CompatibilityReport> {
    let residual = compatibility_defect(a, b)?.op_norm();
    Ok(CompatibilityReport { residual, verdict: residual <= tol.tol_res, tol_used: *tol })
}

/// Defects of the four block conditions relative to the witness `p₁`.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterizationReport {
    /// `‖a₁₂ + b₁₂‖`
    pub residual_i: f64,
    /// `‖a₁₂a₁₂* − (p₁ − a₁₁)(p₁ − b₁₁)‖`
    pub residual_ii: f64,
    /// worse of `‖a₁₂*a₁₂ − a₂₂b₂₂‖` and `‖a₁₂*a₁₂ − b₂₂a₂₂‖`
    pub residual_iii: f64,
    /// worse of `‖a₁₂ − a₁₁a₁₂ − a₁₂a₂₂‖` and `‖a₁₂ − b₁₁a₁₂ − a₁₂b₂₂‖`
    pub residual_iv: f64,
    pub p1: ProjectionMatrix,
    pub tol_used: Tolerance,
    pub certified: bool,
}

impl CharacterizationReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_i.max(self.residual_ii).max(self.residual_iii).max(self.residual_iv)
    }
}

pub fn check_characterization(
    a: &UnitIntervalElement,
    b: &UnitIntervalElement,
    p1: &ProjectionMatrix,
    tol: &Tolerance,
) -> Result<CharacterizationReport> {
    check_same_dim(a.dim(), b.dim())?;
    let family = vec![p1.clone(), p1.complement()];
    let ab = block_decompose(a, &family, tol)?;
    let bb = compress_blocks(b.as_matrix(), family, ab.bases.clone());

    let (a11, a12, a22) = (ab.block(0, 0), ab.block(0, 1), ab.block(1, 1));
    let (b11, b12, b22) = (bb.block(0, 0), bb.block(0, 1), bb.block(1, 1));
    let r = p1.rank();
    let id1 = CMatrix::identity(r, r);

    let residual_i = op_norm(&(a12 + b12));
    let residual_ii = op_norm(&(a12 * a12.adjoint() - (&id1 - a11) * (&id1 - b11)));
    let gram = a12.adjoint() * a12;
    let residual_iii = op_norm(&(&gram - a22 * b22)).max(op_norm(&(&gram - b22 * a22)));
    let residual_iv = op_norm(&(a12 - a11 * a12 - a12 * a22))
        .max(op_norm(&(a12 - b11 * a12 - a12 * b22)));

    let mut report = CharacterizationReport {
        residual_i,
        residual_ii,
        residual_iii,
        residual_iv,
        p1: p1.clone(),
        tol_used: *tol,
        certified: false,
    };
    report.certified = report.max_residual() <= tol.tol_res;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    pub product_zero: bool,
    pub sum_below_one: bool,
    pub abs_compat: bool,
}

impl OrthogonalityReport {
    /// `ab = 0` iff `a + b ≤ 1` and `a`, `b` are absolutely compatible.
    pub fn equivalence_holds(&self) -> bool {
        self.product_zero == (self.sum_below_one && self.abs_compat)
    }
}

pub fn orthogonality_equivalence(
    a: &UnitIntervalElement,
    b: &UnitIntervalElement,
    tol: &Tolerance,
) -> Result<OrthogonalityReport> {
    check_same_dim(a.dim(), b.dim())?;
    let product_zero = op_norm(&(a.matrix() * b.matrix())) <= tol.tol_res;
    let sum = spectral_decompose(&(a.matrix() + b.matrix()))?;
    let sum_below_one = sum.max() <= 1.0 + tol.tol_eig;
    let abs_compat = is_abs_compatible(a, b, tol)?.verdict;
    Ok(OrthogonalityReport { product_zero, sum_below_one, abs_compat })
}

/// Blocks of the five-block reduction, in the order `p₁, p₂, s, n₁, n₂`.
pub const FIVE_BLOCK_NAMES: [&str; 5] = ["p1", "p2", "s", "n1", "n2"];

#[derive(Clone, Debug, Default, Serialize)]
pub struct FiveBlockResiduals {
    pub resolution: f64,
    pub off_diagonal_a: f64,
    pub off_diagonal_b: f64,
    pub a_on_p1: f64,
    pub b_on_p2: f64,
    pub a_on_n1: f64,
    pub b_on_n2: f64,
    pub core_compatibility: f64,
}

impl FiveBlockResiduals {
    pub fn max(&self) -> f64 {
        [
            self.resolution,
            self.off_diagonal_a,
            self.off_diagonal_b,
            self.a_on_p1,
            self.b_on_p2,
            self.a_on_n1,
            self.b_on_n2,
            self.core_compatibility,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `a = 1 ⊕ a₁ ⊕ a₂ ⊕ 0 ⊕ a₃` and `b = b₁ ⊕ 1 ⊕ b₂ ⊕ b₃ ⊕ 0` with respect to
/// `{p₁, p₂, s, n₁, n₂}`; `(a₂, b₂)` is the strict compatible core.
#[derive(Clone, Debug, Serialize)]
pub struct FiveBlockDecomposition {
    pub p1: ProjectionMatrix,
    pub p2: ProjectionMatrix,
    pub s: ProjectionMatrix,
    pub n1: ProjectionMatrix,
    pub n2: ProjectionMatrix,
    /// Restrictions of `a` to each range, in block order.
    pub a_blocks: Vec<HermitianMatrix>,
    pub b_blocks: Vec<HermitianMatrix>,
    pub residuals: FiveBlockResiduals,
    pub core_strict: bool,
    pub tol_used: Tolerance,
}

impl FiveBlockDecomposition {
    pub fn family(&self) -> [&ProjectionMatrix; 5] {
        [&self.p1, &self.p2, &self.s, &self.n1, &self.n2]
    }

    /// The strict compatible core `(a₂, b₂)` on the range of `s`.
    pub fn core(&self) -> (&HermitianMatrix, &HermitianMatrix) {
        (&self.a_blocks[2], &self.b_blocks[2])
    }
}

fn sub_projections(
    n: usize,
    parts: &[&ProjectionMatrix],
    tol: &Tolerance,
) -> Result<ProjectionMatrix> {
    let mut rest = CMatrix::identity(n, n);
    for p in parts {
        rest -= p.as_matrix();
    }
    ProjectionMatrix::new(HermitianMatrix::symmetrize(rest), tol)
}

/// Splits a compatible pair along the 0- and 1-eigenspaces of `a` and `b`.
///
/// The family is chosen greedily: `p₁ = s(a)`, then `n₂ = n(b) ∧ (1 − p₁)`,
/// `p₂ = s(b) ∧ (1 − p₁ − n₂)`, `n₁ = n(a) ∧ (1 − p₁ − n₂ − p₂)`, and `s` is
/// what remains. Every invariant of the result is re-verified before return.
pub fn five_block_decompose(
    a: &UnitIntervalElement,
    b: &UnitIntervalElement,
    tol: &Tolerance,
) -> Result<FiveBlockDecomposition> {
    let compat = is_abs_compatible(a, b, tol)?;
    if !compat.verdict {
        return Err(Error::NotCompatible { residual: compat.residual });
    }
    let n = a.dim();
    let e1 = one_projection(a, tol)?;
    let e0 = null_projection(a, tol)?;
    let f1 = one_projection(b, tol)?;
    let f0 = null_projection(b, tol)?;
    for (name, q) in [("s(a)", &e1), ("n(a)", &e0), ("s(b)", &f1), ("n(b)", &f0)] {
        for (other, x) in [("a", a), ("b", b)] {
            let residual = commutator_norm(q.as_matrix(), x.as_matrix());
            if residual > tol.tol_res {
                return Err(Error::NonCommuting { what: format!("{name} and {other}"), residual });
            }
        }
    }

    let p1 = e1;
    let n2 = meet_commuting(&f0, &p1.complement(), tol)?;
    let p2 = meet_commuting(&f1, &sub_projections(n, &[&p1, &n2], tol)?, tol)?;
    let n1 = meet_commuting(&e0, &sub_projections(n, &[&p1, &n2, &p2], tol)?, tol)?;
    let s = sub_projections(n, &[&p1, &n2, &p2, &n1], tol)?;

    let family = vec![p1, p2, s, n1, n2];
    let bases = family.iter().map(ProjectionMatrix::range_basis).collect::<Result<Vec<_>>>()?;
    let ab = compress_blocks(a.as_matrix(), family.clone(), bases.clone());
    let bb = compress_blocks(b.as_matrix(), family.clone(), bases);

    let a_blocks: Vec<HermitianMatrix> = (0..5).map(|i| ab.diagonal(i)).collect();
    let b_blocks: Vec<HermitianMatrix> = (0..5).map(|i| bb.diagonal(i)).collect();
    let dist = |x: &HermitianMatrix, value: f64| {
        op_norm(&(x.as_matrix() - CMatrix::identity(x.dim(), x.dim()) * c(value)))
    };

    let (core_a, core_b) = (&a_blocks[2], &b_blocks[2]);
    let core_compatibility = compatibility_defect(core_a, core_b)?.op_norm();
    let core_strict = spectrum_is_strict(core_a, tol)? && spectrum_is_strict(core_b, tol)?;
    let residuals = FiveBlockResiduals {
        resolution: resolution_residual(&family),
        off_diagonal_a: ab.off_diagonal_norm(),
        off_diagonal_b: bb.off_diagonal_norm(),
        a_on_p1: dist(&a_blocks[0], 1.0),
        b_on_p2: dist(&b_blocks[1], 1.0),
        a_on_n1: dist(&a_blocks[3], 0.0),
        b_on_n2: dist(&b_blocks[4], 0.0),
        core_compatibility,
    };

    let [p1, p2, s, n1, n2]: [ProjectionMatrix; 5] =
        family.try_into().expect("family has five members");
    let out = FiveBlockDecomposition {
        p1,
        p2,
        s,
        n1,
        n2,
        a_blocks,
        b_blocks,
        residuals,
        core_strict,
        tol_used: *tol,
    };
    if out.residuals.max() > tol.tol_res {
        return Err(Error::PostCondition(format!(
            "five-block invariants violated: {:?}",
            out.residuals
        )));
    }
    if !out.core_strict {
        return Err(Error::PostCondition("core restrictions are not strict".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn unit(n: usize, rows: &[f64]) -> UnitIntervalElement {
        UnitIntervalElement::new(HermitianMatrix::from_real_rows(n, rows).unwrap(), &tol()).unwrap()
    }

    fn unit_diag(d: &[f64]) -> UnitIntervalElement {
        UnitIntervalElement::new(HermitianMatrix::diag(d), &tol()).unwrap()
    }

    fn worked_pair() -> (UnitIntervalElement, UnitIntervalElement) {
        (unit(2, &[0.25, 0.25, 0.25, 0.75]), unit(2, &[0.25, -0.25, -0.25, 0.75]))
    }

    #[test]
    fn compatibility_examples() {
        let r = is_abs_compatible(&unit_diag(&[0.3, 0.7]), &unit_diag(&[1.0, 0.0]), &tol()).unwrap();
        assert!(r.residual < 1e-15 && r.verdict);

        let half = unit_diag(&[0.5, 0.5]);
        let r = is_abs_compatible(&half, &half, &tol()).unwrap();
        assert!((r.residual - 1.0).abs() < 1e-15 && !r.verdict);

        let (a1, b1) = worked_pair();
        let r = is_abs_compatible(&a1, &b1, &tol()).unwrap();
        assert!(r.residual < 1e-14 && r.verdict);
        let d = abs_op(&(a1.matrix() - b1.matrix())).unwrap();
        assert!(op_norm(&(d.as_matrix() - HermitianMatrix::diag(&[0.5, 0.5]).as_matrix())) < 1e-14);

        assert!(is_abs_compatible(&a1, &unit_diag(&[0.5]), &tol()).is_err());
    }

    #[test]
    fn characterization_examples() {
        let (a1, b1) = worked_pair();
        let p1 = ProjectionMatrix::new(HermitianMatrix::diag(&[0.0, 1.0]), &tol()).unwrap();
        let r = check_characterization(&a1, &b1, &p1, &tol()).unwrap();
        assert!(r.max_residual() <= 1e-12, "{r:?}");
        assert!(r.certified);

        let p = unit_diag(&[1.0, 0.0, 1.0]);
        let pp = ProjectionMatrix::new(p.matrix().clone(), &tol()).unwrap();
        let r = check_characterization(&p, &p, &pp, &tol()).unwrap();
        assert_eq!(r.max_residual(), 0.0);

        let flipped = unit(2, &[0.25, 0.25, 0.25, 0.75]);
        let r = check_characterization(&a1, &flipped, &p1, &tol()).unwrap();
        assert!((r.residual_i - 0.5).abs() < 1e-14);
        assert!(!r.certified);
    }

    #[test]
    fn orthogonality_examples() {
        let r = orthogonality_equivalence(&unit_diag(&[0.5, 0.0]), &unit_diag(&[0.0, 0.5]), &tol())
            .unwrap();
        assert_eq!(r, OrthogonalityReport { product_zero: true, sum_below_one: true, abs_compat: true });

        let half = unit_diag(&[0.5, 0.5]);
        let r = orthogonality_equivalence(&half, &half, &tol()).unwrap();
        assert_eq!(
            r,
            OrthogonalityReport { product_zero: false, sum_below_one: true, abs_compat: false }
        );
        assert!(r.equivalence_holds());

        let b = unit(2, &[0.3, 0.2, 0.2, 0.6]);
        let r = orthogonality_equivalence(&unit_diag(&[0.0, 0.0]), &b, &tol()).unwrap();
        assert!(r.product_zero && r.sum_below_one && r.abs_compat);
    }

    #[test]
    fn five_block_direct_sum_fixture() {
        let (a1, b1) = worked_pair();
        let a = UnitIntervalElement::new(HermitianMatrix::diag(&[1.0]).direct_sum(&a1), &tol())
            .unwrap();
        let b = UnitIntervalElement::new(HermitianMatrix::diag(&[0.4]).direct_sum(&b1), &tol())
            .unwrap();
        let fb = five_block_decompose(&a, &b, &tol()).unwrap();
        let close = |p: &ProjectionMatrix, d: &[f64]| {
            op_norm(&(p.as_matrix() - HermitianMatrix::diag(d).as_matrix())) < 1e-12
        };
        assert!(close(&fb.p1, &[1.0, 0.0, 0.0]));
        assert!(close(&fb.s, &[0.0, 1.0, 1.0]));
        for p in [&fb.p2, &fb.n1, &fb.n2] {
            assert_eq!(p.rank(), 0);
        }
        let (ca, cb) = fb.core();
        assert!(op_norm(&(ca.as_matrix() - a1.as_matrix())) < 1e-12);
        assert!(op_norm(&(cb.as_matrix() - b1.as_matrix())) < 1e-12);
        assert!(fb.residuals.max() < 1e-12);
    }

    #[test]
    fn five_block_strict_pair_is_all_core() {
        let (a1, b1) = worked_pair();
        let fb = five_block_decompose(&a1, &b1, &tol()).unwrap();
        assert_eq!(fb.s.rank(), 2);
        assert_eq!(fb.p1.rank() + fb.p2.rank() + fb.n1.rank() + fb.n2.rank(), 0);
    }

    #[test]
    fn five_block_projection_pair() {
        let p = unit_diag(&[1.0, 0.0]);
        let fb = five_block_decompose(&p, &p, &tol()).unwrap();
        assert_eq!(fb.p1.rank(), 1);
        assert!((fb.p1.as_matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert_eq!(fb.n2.rank(), 1);
        assert!((fb.n2.as_matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert_eq!(fb.p2.rank() + fb.n1.rank() + fb.s.rank(), 0);
    }

    #[test]
    fn five_block_rejects_incompatible() {
        let half = unit_diag(&[0.5, 0.5]);
        assert!(matches!(
            five_block_decompose(&half, &half, &tol()),
            Err(Error::NotCompatible { .. })
        ));
    }
}
