//! The matrix JSON file format and 17-significant-digit JSON output.
//!
//! A matrix file is `{"n": n, "re": [[..]; n], "im": [[..]; n]}` with rows in
//! order. Projections carry `"projection": true` and their declared `"rank"`.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};

use crate::error::{Error, Result};
use crate::matrixcore::{CMatrix, HermitianMatrix, Tolerance, UnitIntervalElement};
use crate::projections::ProjectionMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

impl MatrixJson {
    /// Any complex matrix; non-square matrices are written with `n` = rows and
    /// are only accepted back by [`MatrixJson::to_rect_matrix`].
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows()).map(|j| (0..m.ncols()).map(|k| f(&m[(j, k)])).collect()).collect()
        };
        Self { n: m.nrows(), re: rows(|z| z.re), im: rows(|z| z.im), projection: None, rank: None }
    }

    pub fn from_projection(p: &ProjectionMatrix) -> Self {
        Self { projection: Some(true), rank: Some(p.rank()), ..Self::from_matrix(p.as_matrix()) }
    }

    /// Square `n × n` matrix; anything else is rejected.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.n;
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !square(&self.re) || !square(&self.im) {
            return Err(Error::Format(format!("re/im must both be {n}x{n}")));
        }
        Ok(CMatrix::from_fn(n, n, |j, k| Complex64::new(self.re[j][k], self.im[j][k])))
    }

    pub fn to_rect_matrix(&self) -> Result<CMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        let shaped = |m: &Vec<Vec<f64>>| m.len() == rows && m.iter().all(|r| r.len() == cols);
        if rows != self.n || !shaped(&self.re) || !shaped(&self.im) {
            return Err(Error::Format("ragged re/im arrays".into()));
        }
        Ok(CMatrix::from_fn(rows, cols, |j, k| Complex64::new(self.re[j][k], self.im[j][k])))
    }

    pub fn to_hermitian(&self, tol: &Tolerance) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_matrix()?, tol)
    }

    pub fn to_unit_interval(&self, tol: &Tolerance) -> Result<UnitIntervalElement> {
        UnitIntervalElement::new(self.to_hermitian(tol)?, tol)
    }

    pub fn to_projection(&self, tol: &Tolerance) -> Result<ProjectionMatrix> {
        let p = ProjectionMatrix::new(self.to_hermitian(tol)?, tol)?;
        if let Some(rank) = self.rank {
            if rank != p.rank() {
                return Err(Error::RankMismatch {
                    what: "declared projection".into(),
                    rank: p.rank(),
                    expected: rank,
                });
            }
        }
        Ok(p)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(self.as_matrix()).serialize(s)
    }
}

impl Serialize for UnitIntervalElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl Serialize for ProjectionMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_projection(self).serialize(s)
    }
}

pub fn serialize_cmatrix<S: serde::Serializer>(
    m: &CMatrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    MatrixJson::from_matrix(m).serialize(s)
}

/// Compact JSON with every float written as `d.dddddddddddddddde±x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        CompactFormatter.write_f64(writer, f64::from(value))
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = to_json_string(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_matrix_file(path: &Path) -> Result<MatrixJson> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_matrix_file(path: &Path, m: &CMatrix) -> Result<()> {
    write_json(path, &MatrixJson::from_matrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::c;

    #[test]
    fn seventeen_digits() {
        let s = to_json_string(&[0.1f64, -2.5, 1.0 / 3.0]).unwrap();
        assert_eq!(
            s,
            "[1.0000000000000001e-1,-2.5000000000000000e0,3.3333333333333331e-1]"
        );
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, -2.5, 1.0 / 3.0]);
    }

    #[test]
    fn rejects_non_square() {
        let j = MatrixJson {
            n: 2,
            re: vec![vec![1.0, 0.0], vec![0.0]],
            im: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            projection: None,
            rank: None,
        };
        assert!(matches!(j.to_matrix(), Err(Error::Format(_))));
        let j = MatrixJson { n: 3, ..MatrixJson::from_matrix(&CMatrix::identity(2, 2)) };
        assert!(j.to_matrix().is_err());
    }

    #[test]
    fn rejects_asymmetric_hermitian() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = c(0.5);
        let j = MatrixJson::from_matrix(&m);
        assert!(matches!(j.to_hermitian(&Tolerance::default()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn projection_annotation() {
        let tol = Tolerance::default();
        let p = ProjectionMatrix::new(HermitianMatrix::diag(&[1.0, 0.0, 1.0]), &tol).unwrap();
        let j = MatrixJson::from_projection(&p);
        let s = to_json_string(&j).unwrap();
        assert!(s.contains("\"projection\":true") && s.contains("\"rank\":2"));
        let back: MatrixJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_projection(&tol).unwrap().rank(), 2);
        let lying = MatrixJson { rank: Some(1), ..back };
        assert!(lying.to_projection(&tol).is_err());
    }
}
