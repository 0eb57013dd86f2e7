use serde::Serialize;

use super::block2;
use crate::error::{Error, Result};
use crate::matrixcore::{
    c, check_square, op_norm, spectral_decompose, sqrt_op, CMatrix, HermitianMatrix, Tolerance,
};
use crate::projections::range_projection;

/// `x = u |x|` with `u` a partial isometry from `r(|x|)H` onto `r(|x*|)H`.
#[derive(Clone, Debug)]
pub struct PolarParts {
    pub u: CMatrix,
    pub modulus: HermitianMatrix,
}

/// Singular pairs come from the Hermitian eigenproblem of
/// `[[0, x], [x*, 0]]`, whose eigenvector for `σ > 0` is `(w, v)/√2` with
/// `x v = σ w`. Singular values at most `tol_eig` are treated as kernel, so a
/// rank-deficient `x` gets a partial isometry rather than a unitary.
pub fn polar_decompose(x: &CMatrix, tol: &Tolerance) -> Result<PolarParts> {
    let n = check_square(x)?;
    if n == 0 {
        return Ok(PolarParts { u: CMatrix::zeros(0, 0), modulus: HermitianMatrix::zeros(0) });
    }
    let zero = CMatrix::zeros(n, n);
    let dilation = HermitianMatrix::symmetrize(block2(&zero, x, &x.adjoint(), &zero));
    let sd = spectral_decompose(&dilation)?;

    let mut u = CMatrix::zeros(n, n);
    let mut modulus = CMatrix::zeros(n, n);
    for (k, &sigma) in sd.eigenvalues.iter().enumerate() {
        if sigma <= 0.0 {
            continue;
        }
        let z = sd.eigenvectors.column(k);
        let (w, v) = (z.rows(0, n) * c(2f64.sqrt()), z.rows(n, n) * c(2f64.sqrt()));
        modulus += &v * v.adjoint() * c(sigma);
        if sigma > tol.tol_eig {
            u += &w * v.adjoint();
        }
    }
    let modulus = HermitianMatrix::symmetrize(modulus);
    let defect = op_norm(&(x - &u * modulus.as_matrix()));
    if defect > tol.tol_res * op_norm(x).max(1.0) {
        return Err(Error::PostCondition(format!("polar factorization defect {defect:e}")));
    }
    Ok(PolarParts { u, modulus })
}

/// Defects of the standard polar-decomposition identities.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PolarResiduals {
    /// `‖x − u|x|‖`
    pub factorization: f64,
    /// `‖|x| − (x*x)^{1/2}‖`
    pub modulus: f64,
    /// `‖u*u − r(|x|)‖` and `‖uu* − r(|x*|)‖`, the worse of the two
    pub partial_isometry: f64,
    /// `‖|x| − u*x‖`
    pub modulus_from_u: f64,
    /// `‖r(|x|) − u*u‖`
    pub initial_projection: f64,
    /// `max_k ‖|x*|^k − u|x|^k u*‖`
    pub adjoint_powers: f64,
    /// `max_k ‖|x|^k − u*|x*|^k u‖`
    pub modulus_powers: f64,
}

impl PolarResiduals {
    pub fn max(&self) -> f64 {
        [
            self.factorization,
            self.modulus,
            self.partial_isometry,
            self.modulus_from_u,
            self.initial_projection,
            self.adjoint_powers,
            self.modulus_powers,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl PolarParts {
    pub fn initial_projection(&self) -> CMatrix {
        self.u.adjoint() * &self.u
    }

    pub fn final_projection(&self) -> CMatrix {
        &self.u * self.u.adjoint()
    }

    /// Checks the identities against an independent `|x*| = (xx*)^{1/2}`,
    /// for powers `k = 1..=max_power`.
    pub fn residuals(&self, x: &CMatrix, max_power: u32, tol: &Tolerance) -> Result<PolarResiduals> {
        let u = &self.u;
        let ut = u.adjoint();
        let m = self.modulus.as_matrix();
        let gram = HermitianMatrix::symmetrize(x.adjoint() * x);
        let cogram = HermitianMatrix::symmetrize(x * x.adjoint());
        let abs_x = sqrt_op(&gram, tol)?;
        let abs_xt = sqrt_op(&cogram, tol)?;
        let r_init = range_projection(&self.modulus, tol)?;
        let r_final = range_projection(&abs_xt, tol)?;

        let initial = op_norm(&(self.initial_projection() - r_init.as_matrix()));
        let mut out = PolarResiduals {
            factorization: op_norm(&(x - u * m)),
            modulus: op_norm(&(m - abs_x.as_matrix())),
            partial_isometry: initial
                .max(op_norm(&(self.final_projection() - r_final.as_matrix()))),
            modulus_from_u: op_norm(&(m - &ut * x)),
            initial_projection: initial,
            ..Default::default()
        };
        let mut pow_x = CMatrix::identity(x.nrows(), x.nrows());
        let mut pow_xt = pow_x.clone();
        for _ in 0..max_power {
            pow_x = pow_x * m;
            pow_xt = pow_xt * abs_xt.as_matrix();
            out.adjoint_powers = out.adjoint_powers.max(op_norm(&(&pow_xt - u * &pow_x * &ut)));
            out.modulus_powers = out.modulus_powers.max(op_norm(&(&pow_x - &ut * &pow_xt * u)));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn positive_input() {
        let x = HermitianMatrix::from_real_rows(2, &[0.25, 0.25, 0.25, 0.25]).unwrap();
        let pp = polar_decompose(x.as_matrix(), &tol()).unwrap();
        assert!(op_norm(&(pp.modulus.as_matrix() - x.as_matrix())) < 1e-14);
        let r = range_projection(&x, &tol()).unwrap();
        assert!(op_norm(&(&pp.u - r.as_matrix())) < 1e-14);
    }

    #[test]
    fn nilpotent_input() {
        let mut x = CMatrix::zeros(2, 2);
        x[(1, 0)] = c(1.0);
        let pp = polar_decompose(&x, &tol()).unwrap();
        let e1 = HermitianMatrix::diag(&[1.0, 0.0]);
        assert!(op_norm(&(pp.modulus.as_matrix() - e1.as_matrix())) < 1e-14);
        assert!(op_norm(&(&pp.u - &x)) < 1e-14);
        assert!(op_norm(&(pp.initial_projection() - e1.as_matrix())) < 1e-14);
        let r = pp.residuals(&x, 3, &tol()).unwrap();
        assert!(r.max() < 1e-12, "{r:?}");
    }

    #[test]
    fn unitary_input() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut x = CMatrix::zeros(2, 2);
        x[(0, 0)] = c(s);
        x[(0, 1)] = num_complex::Complex64::new(0.0, s);
        x[(1, 0)] = num_complex::Complex64::new(0.0, s);
        x[(1, 1)] = c(s);
        let pp = polar_decompose(&x, &tol()).unwrap();
        assert!(op_norm(&(&pp.u - &x)) < 1e-14);
        assert!(op_norm(&(pp.modulus.as_matrix() - CMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(polar_decompose(&CMatrix::zeros(2, 3), &tol()).is_err());
    }
}
