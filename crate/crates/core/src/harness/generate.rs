//! Random instance generators.
//!
//! Each generator is a pure function of its [`GeneratorConfig`]: the same
//! config always yields bit-identical matrices. Every output is checked
//! against the predicate it claims before it is returned.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::random::{haar_unitary, hermitian_with_spectrum, rng_from_seed, uniform_vec, SuiteRng};
use crate::canonical::{construct_pair, generic_position_check};
use crate::compatibility::is_abs_compatible;
use crate::error::{Error, Result};
use crate::matrixcore::{commutator_norm, HermitianMatrix, Tolerance, UnitIntervalElement};
use crate::projections::{is_strict, ProjectionMatrix};

pub const DEFAULT_MARGIN: f64 = 0.05;
/// Largest margin the commuting-pair sampler accepts; beyond about 0.38 its
/// constraints have no solution.
pub const MAX_COMMUTING_MARGIN: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Strict,
    StrictCommuting,
    CompatiblePair,
    GenericProjections,
    ArbitraryUnitInterval,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Strict,
        GeneratorKind::StrictCommuting,
        GeneratorKind::CompatiblePair,
        GeneratorKind::GenericProjections,
        GeneratorKind::ArbitraryUnitInterval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Strict => "strict",
            GeneratorKind::StrictCommuting => "strict-commuting",
            GeneratorKind::CompatiblePair => "compatible-pair",
            GeneratorKind::GenericProjections => "generic-projections",
            GeneratorKind::ArbitraryUnitInterval => "arbitrary-unit-interval",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown generator kind '{s}'")))
    }
}

/// Sizes of the padding blocks appended to a compatible core, named after
/// the five-block family: `a = 1, b` strict on `p1`; `b = 1` on `p2`;
/// `a = 0` on `n1`; `b = 0` on `n2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Padding {
    pub p1: usize,
    pub p2: usize,
    pub n1: usize,
    pub n2: usize,
}

impl Padding {
    pub fn total(&self) -> usize {
        self.p1 + self.p2 + self.n1 + self.n2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    /// Base dimension. For `compatible-pair` the output is `2·dim` plus padding;
    /// for `generic-projections` it is the (even) output dimension itself.
    pub dim: usize,
    pub seed: u64,
    pub margin: f64,
    #[serde(default)]
    pub padding: Padding,
    /// Use this angle for every principal angle (`generic-projections` only).
    #[serde(default)]
    pub fixed_angle: Option<f64>,
}

impl GeneratorConfig {
    pub fn new(kind: GeneratorKind, dim: usize, seed: u64) -> Self {
        Self { kind, dim, seed, margin: DEFAULT_MARGIN, padding: Padding::default(), fixed_angle: None }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn with_padding(mut self, padding: Padding) -> Self {
        self.padding = padding;
        self
    }

    pub fn with_fixed_angle(mut self, theta: f64) -> Self {
        self.fixed_angle = Some(theta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be at least 1".into()));
        }
        if !(self.margin > 0.0 && self.margin < 0.5) {
            return Err(Error::InvalidConfig(format!("margin {} outside (0, 0.5)", self.margin)));
        }
        let commuting = matches!(self.kind, GeneratorKind::StrictCommuting | GeneratorKind::CompatiblePair);
        if commuting && self.margin > MAX_COMMUTING_MARGIN {
            return Err(Error::InvalidConfig(format!(
                "margin {} above {MAX_COMMUTING_MARGIN} for {}",
                self.margin, self.kind
            )));
        }
        if let Some(theta) = self.fixed_angle {
            let d = self.angle_margin();
            if !(theta > d && theta < std::f64::consts::FRAC_PI_2 - d) {
                return Err(Error::InvalidConfig(format!("fixed angle {theta} outside the margin")));
            }
        }
        Ok(())
    }

    fn expect(&self, kind: GeneratorKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidConfig(format!("expected kind {kind}, got {}", self.kind)));
        }
        self.validate()
    }

    /// `δ` with `sin δ = margin`, so angles in `(δ, π/2 − δ)` have sine and
    /// cosine above `margin`.
    pub fn angle_margin(&self) -> f64 {
        self.margin.asin()
    }

    fn rng(&self) -> SuiteRng {
        rng_from_seed(self.seed)
    }
}

/// Output of [`generate`]: a pair of unit-interval elements or projections.
#[derive(Clone, Debug)]
pub enum Generated {
    Single(UnitIntervalElement),
    Pair(UnitIntervalElement, UnitIntervalElement),
    Projections(ProjectionMatrix, ProjectionMatrix),
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn certify(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::PostCondition(format!("generator output is not {what}")))
    }
}

fn strict_element(rng: &mut SuiteRng, n: usize, margin: f64) -> Result<UnitIntervalElement> {
    let spectrum = uniform_vec(rng, n, margin, 1.0 - margin);
    UnitIntervalElement::new(hermitian_with_spectrum(rng, &spectrum), &tol())
}

/// Spectrum uniform in `[margin, 1 − margin]`.
pub fn gen_strict(cfg: &GeneratorConfig) -> Result<UnitIntervalElement> {
    cfg.expect(GeneratorKind::Strict)?;
    let a = strict_element(&mut cfg.rng(), cfg.dim, cfg.margin)?;
    certify(is_strict(&a, &tol())?, "strict")?;
    Ok(a)
}

/// Spectrum uniform in `[0, 1]`.
pub fn gen_arbitrary_unit_interval(cfg: &GeneratorConfig) -> Result<UnitIntervalElement> {
    cfg.expect(GeneratorKind::ArbitraryUnitInterval)?;
    let mut rng = cfg.rng();
    let spectrum = uniform_vec(&mut rng, cfg.dim, 0.0, 1.0);
    UnitIntervalElement::new(hermitian_with_spectrum(&mut rng, &spectrum), &tol())
}

/// One coordinate `(α, β)`: both in `[m, 1 − m]`, and `r² = α² + β²` in
/// `[m, (1 − m)²]`, so `1 − α² − β²` lies in `[1 − (1 − m)², 1 − m]`.
fn commuting_coordinate(rng: &mut SuiteRng, m: f64) -> (f64, f64) {
    loop {
        let alpha = rng.random_range(m..1.0 - m);
        let beta = rng.random_range(m..1.0 - m);
        let r2 = alpha * alpha + beta * beta;
        if r2 >= m && r2 <= (1.0 - m) * (1.0 - m) {
            return (alpha, beta);
        }
    }
}

fn strict_commuting_raw(
    rng: &mut SuiteRng,
    n: usize,
    margin: f64,
) -> Result<(UnitIntervalElement, UnitIntervalElement)> {
    let (alpha, beta): (Vec<f64>, Vec<f64>) =
        (0..n).map(|_| commuting_coordinate(rng, margin)).unzip();
    let v = haar_unitary(rng, n);
    let a = HermitianMatrix::diag(&alpha).conjugate_by(&v);
    let b = HermitianMatrix::diag(&beta).conjugate_by(&v);
    Ok((UnitIntervalElement::new(a, &tol())?, UnitIntervalElement::new(b, &tol())?))
}

/// `a = V diag(α) V*`, `b = V diag(β) V*` satisfying every hypothesis of
/// [`construct_pair`].
pub fn gen_strict_commuting(
    cfg: &GeneratorConfig,
) -> Result<(UnitIntervalElement, UnitIntervalElement)> {
    cfg.expect(GeneratorKind::StrictCommuting)?;
    let (a, b) = strict_commuting_raw(&mut cfg.rng(), cfg.dim, cfg.margin)?;
    let t = tol();
    certify(is_strict(&a, &t)? && is_strict(&b, &t)?, "strict")?;
    certify(commutator_norm(a.as_matrix(), b.as_matrix()) <= t.tol_res, "commuting")?;
    Ok((a, b))
}

fn padding_blocks(
    rng: &mut SuiteRng,
    padding: &Padding,
    margin: f64,
) -> Vec<(HermitianMatrix, HermitianMatrix)> {
    let mut strict = |k: usize| HermitianMatrix::diag(&uniform_vec(rng, k, margin, 1.0 - margin));
    let mut blocks = Vec::new();
    if padding.p1 > 0 {
        blocks.push((HermitianMatrix::identity(padding.p1), strict(padding.p1)));
    }
    if padding.p2 > 0 {
        blocks.push((strict(padding.p2), HermitianMatrix::identity(padding.p2)));
    }
    if padding.n1 > 0 {
        blocks.push((HermitianMatrix::zeros(padding.n1), strict(padding.n1)));
    }
    if padding.n2 > 0 {
        blocks.push((strict(padding.n2), HermitianMatrix::zeros(padding.n2)));
    }
    blocks
}

/// A constructed strict core of size `2·dim`, direct-summed with the padding
/// blocks and conjugated by one Haar unitary.
pub fn gen_compatible_pair(
    cfg: &GeneratorConfig,
) -> Result<(UnitIntervalElement, UnitIntervalElement)> {
    cfg.expect(GeneratorKind::CompatiblePair)?;
    let mut rng = cfg.rng();
    let t = tol();
    let (x, y) = strict_commuting_raw(&mut rng, cfg.dim, cfg.margin)?;
    let (core_a, core_b) = construct_pair(&x, &y, &t)?;
    let (mut a, mut b) = (core_a.into_inner(), core_b.into_inner());
    for (pa, pb) in padding_blocks(&mut rng, &cfg.padding, cfg.margin) {
        a = a.direct_sum(&pa);
        b = b.direct_sum(&pb);
    }
    let w = haar_unitary(&mut rng, a.dim());
    let a = UnitIntervalElement::new(a.conjugate_by(&w), &t)?;
    let b = UnitIntervalElement::new(b.conjugate_by(&w), &t)?;
    certify(is_abs_compatible(&a, &b, &t)?.verdict, "absolutely compatible")?;
    Ok((a, b))
}

/// Principal angles: one per stratum of `(δ, π/2 − δ)`, hence distinct.
fn principal_angles(rng: &mut SuiteRng, cfg: &GeneratorConfig, m: usize) -> Vec<f64> {
    if let Some(theta) = cfg.fixed_angle {
        return vec![theta; m];
    }
    let d = cfg.angle_margin();
    let width = (std::f64::consts::FRAC_PI_2 - 2.0 * d) / m as f64;
    (0..m).map(|i| d + width * (i as f64 + rng.random_range(0.1..0.9))).collect()
}

/// `P = U*(1 ⊕ 0)U`, `Q = U*[[C², CS], [CS, S²]]U` with `C = diag(cos θ)`,
/// `S = diag(sin θ)`.
pub fn gen_generic_projections(
    cfg: &GeneratorConfig,
) -> Result<(ProjectionMatrix, ProjectionMatrix)> {
    cfg.expect(GeneratorKind::GenericProjections)?;
    if cfg.dim % 2 != 0 {
        return Err(Error::OddDimension { dim: cfg.dim });
    }
    let m = cfg.dim / 2;
    let mut rng = cfg.rng();
    let thetas = principal_angles(&mut rng, cfg, m);
    let cos: Vec<f64> = thetas.iter().map(|t| t.cos()).collect();
    let sin: Vec<f64> = thetas.iter().map(|t| t.sin()).collect();
    let sq = |v: &[f64]| HermitianMatrix::diag(&v.iter().map(|x| x * x).collect::<Vec<_>>());
    let cs = HermitianMatrix::diag(&cos.iter().zip(&sin).map(|(c, s)| c * s).collect::<Vec<_>>());
    let p0 = HermitianMatrix::identity(m).direct_sum(&HermitianMatrix::zeros(m));
    let q0 = HermitianMatrix::symmetrize(crate::canonical::block2(
        sq(&cos).as_matrix(),
        cs.as_matrix(),
        cs.as_matrix(),
        sq(&sin).as_matrix(),
    ));
    let u = haar_unitary(&mut rng, cfg.dim);
    let t = tol();
    let p = ProjectionMatrix::new(p0.compress(&u), &t)?;
    let q = ProjectionMatrix::new(q0.compress(&u), &t)?;
    certify(generic_position_check(&p, &q, &t)?, "in generic position")?;
    Ok((p, q))
}

/// Dispatches on `cfg.kind`.
pub fn generate(cfg: &GeneratorConfig) -> Result<Generated> {
    Ok(match cfg.kind {
        GeneratorKind::Strict => Generated::Single(gen_strict(cfg)?),
        GeneratorKind::ArbitraryUnitInterval => Generated::Single(gen_arbitrary_unit_interval(cfg)?),
        GeneratorKind::StrictCommuting => {
            let (a, b) = gen_strict_commuting(cfg)?;
            Generated::Pair(a, b)
        }
        GeneratorKind::CompatiblePair => {
            let (a, b) = gen_compatible_pair(cfg)?;
            Generated::Pair(a, b)
        }
        GeneratorKind::GenericProjections => {
            let (p, q) = gen_generic_projections(cfg)?;
            Generated::Projections(p, q)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip_through_names() {
        for k in GeneratorKind::ALL {
            assert_eq!(k.name().parse::<GeneratorKind>().unwrap(), k);
        }
        assert!("nope".parse::<GeneratorKind>().is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let cfg = GeneratorConfig::new(GeneratorKind::Strict, 0, 1);
        assert!(gen_strict(&cfg).is_err());
        let cfg = GeneratorConfig::new(GeneratorKind::Strict, 2, 1).with_margin(0.5);
        assert!(gen_strict(&cfg).is_err());
        let cfg = GeneratorConfig::new(GeneratorKind::StrictCommuting, 2, 1);
        assert!(gen_strict(&cfg).is_err());
        let cfg = GeneratorConfig::new(GeneratorKind::GenericProjections, 3, 1);
        assert!(matches!(gen_generic_projections(&cfg), Err(Error::OddDimension { dim: 3 })));
    }

    #[test]
    fn scalar_commuting_pair() {
        let (a, b) = gen_strict_commuting(&GeneratorConfig::new(GeneratorKind::StrictCommuting, 1, 9))
            .unwrap();
        let (x, y) = (a.as_matrix()[(0, 0)], b.as_matrix()[(0, 0)]);
        assert!(x.im == 0.0 && y.im == 0.0 || (x.im.abs() < 1e-15 && y.im.abs() < 1e-15));
        assert!(x.re * x.re + y.re * y.re < 1.0);
    }

    #[test]
    fn padded_pair_has_padded_dimension() {
        let cfg = GeneratorConfig::new(GeneratorKind::CompatiblePair, 2, 5)
            .with_padding(Padding { p1: 1, p2: 2, n1: 1, n2: 1 });
        let (a, _) = gen_compatible_pair(&cfg).unwrap();
        assert_eq!(a.dim(), 4 + 5);
    }
}
