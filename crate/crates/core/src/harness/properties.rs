//! The registered properties, plus the instance builders and perturbations
//! they share with the tests.

use rand::Rng;

use super::generate::{
    gen_arbitrary_unit_interval, gen_compatible_pair, gen_generic_projections, gen_strict,
    gen_strict_commuting, generate, Generated, GeneratorConfig, GeneratorKind, Padding,
};
use super::random::{
    gaussian_matrix, haar_unitary, hermitian_with_spectrum, random_projection, uniform_vec,
    SuiteRng,
};
use super::suite::{Bound, Property, TrialCtx};
use crate::canonical::{
    canonical_decompose, construct_pair, construction_identity_residuals, halmos_decompose,
    polar_decompose, reconstruct_from_canonical,
};
use crate::compatibility::{
    check_characterization, compatibility_defect, five_block_decompose, is_abs_compatible,
    orthogonality_equivalence, CharacterizationReport,
};
use crate::error::{Error, Result};
use crate::matrixcore::{
    abs_op, c, commutator_norm, jordan, op_norm, spectral_decompose, sqrt_op, CMatrix,
    HermitianMatrix, Tolerance, UnitIntervalElement,
};
use crate::projections::{
    block_decompose, is_strict, range_projection, spectrum_is_strict, ProjectionMatrix,
};

fn indicator(holds: bool) -> f64 {
    if holds {
        0.0
    } else {
        1.0
    }
}

fn config(ctx: &mut TrialCtx, kind: GeneratorKind, dim: usize) -> GeneratorConfig {
    GeneratorConfig::new(kind, dim, ctx.rng.random())
}

fn unit(h: HermitianMatrix, tol: &Tolerance) -> Result<UnitIntervalElement> {
    UnitIntervalElement::new(h, tol)
}

/// Strict commuting pair `(x, y)` and its constructed compatible pair `(a, b)`
/// of twice the size.
#[derive(Clone, Debug)]
pub struct ConstructedInstance {
    pub x: UnitIntervalElement,
    pub y: UnitIntervalElement,
    pub a: UnitIntervalElement,
    pub b: UnitIntervalElement,
}

pub fn constructed_instance(seed: u64, base_dim: usize, tol: &Tolerance) -> Result<ConstructedInstance> {
    let cfg = GeneratorConfig::new(GeneratorKind::StrictCommuting, base_dim, seed);
    let (x, y) = gen_strict_commuting(&cfg)?;
    let (a, b) = construct_pair(&x, &y, tol)?;
    Ok(ConstructedInstance { x, y, a, b })
}

/// `(w a w*, w b w*)`.
pub fn conjugate_pair(
    a: &UnitIntervalElement,
    b: &UnitIntervalElement,
    w: &CMatrix,
    tol: &Tolerance,
) -> Result<(UnitIntervalElement, UnitIntervalElement)> {
    Ok((unit(a.conjugate_by(w), tol)?, unit(b.conjugate_by(w), tol)?))
}

/// Negates the off-diagonal blocks of `x` relative to `p`: `(2p − 1) x (2p − 1)`.
pub fn sign_flip(x: &UnitIntervalElement, p: &ProjectionMatrix, tol: &Tolerance) -> Result<UnitIntervalElement> {
    let n = p.dim();
    let reflection = p.as_matrix() * c(2.0) - CMatrix::identity(n, n);
    unit(x.conjugate_by(&reflection), tol)
}

/// Random Hermitian matrix of operator norm exactly `norm`.
pub fn hermitian_noise(rng: &mut SuiteRng, n: usize, norm: f64) -> HermitianMatrix {
    let g = gaussian_matrix(rng, n, n);
    let h = HermitianMatrix::symmetrize((&g + g.adjoint()) * c(0.5));
    let scale = h.op_norm();
    if scale == 0.0 {
        return HermitianMatrix::identity(n).scale(norm);
    }
    h.scale(norm / scale)
}

/// Witness projection for a strict compatible pair: `r(a∘b)`, the complement
/// of `p = 1 − r(a∘b)`.
pub fn witness(a: &UnitIntervalElement, b: &UnitIntervalElement, tol: &Tolerance) -> Result<ProjectionMatrix> {
    range_projection(&jordan(a, b)?, tol)
}

pub fn characterize_constructed(
    a: &UnitIntervalElement,
    b: &UnitIntervalElement,
    tol: &Tolerance,
) -> Result<CharacterizationReport> {
    check_characterization(a, b, &witness(a, b, tol)?, tol)
}

/// A commuting `(p, a)` pair in one random eigenbasis.
pub fn commuting_projection_pair(
    rng: &mut SuiteRng,
    n: usize,
    tol: &Tolerance,
) -> Result<(ProjectionMatrix, UnitIntervalElement)> {
    let rank = rng.random_range(0..=n);
    let v = haar_unitary(rng, n);
    let flags: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    let spectrum = uniform_vec(rng, n, 0.0, 1.0);
    let p = ProjectionMatrix::new(HermitianMatrix::diag(&flags).conjugate_by(&v), tol)?;
    let a = unit(HermitianMatrix::diag(&spectrum).conjugate_by(&v), tol)?;
    Ok((p, a))
}

/// A `(p, a)` pair with `‖pa − ap‖ ≥ min_commutator`, on dimension `n ≥ 2`.
pub fn non_commuting_projection_pair(
    rng: &mut SuiteRng,
    n: usize,
    min_commutator: f64,
    tol: &Tolerance,
) -> Result<(ProjectionMatrix, UnitIntervalElement)> {
    if n < 2 {
        return Err(Error::InvalidConfig("non-commuting pairs need dimension at least 2".into()));
    }
    loop {
        let rank = rng.random_range(1..n);
        let p = ProjectionMatrix::new(random_projection(rng, n, rank), tol)?;
        let spectrum = uniform_vec(rng, n, 0.0, 1.0);
        let a = unit(hermitian_with_spectrum(rng, &spectrum), tol)?;
        if commutator_norm(p.as_matrix(), a.as_matrix()) >= min_commutator {
            return Ok((p, a));
        }
    }
}

/// Mixed instances for the orthogonality equivalence, cycling through four
/// shapes by `variant`: orthogonal by construction, an unrelated random pair,
/// a commuting overlapping pair, and `(p, t(1 − p))`.
pub fn orthogonality_instance(
    rng: &mut SuiteRng,
    n: usize,
    variant: usize,
    tol: &Tolerance,
) -> Result<(UnitIntervalElement, UnitIntervalElement)> {
    let v = haar_unitary(rng, n);
    let split = rng.random_range(0..=n);
    let (a, b) = match variant % 4 {
        0 => {
            let s = uniform_vec(rng, n, 0.0, 1.0);
            let da: Vec<f64> = (0..n).map(|i| if i < split { s[i] } else { 0.0 }).collect();
            let db: Vec<f64> = (0..n).map(|i| if i < split { 0.0 } else { s[i] }).collect();
            (HermitianMatrix::diag(&da), HermitianMatrix::diag(&db))
        }
        1 => {
            let sa = uniform_vec(rng, n, 0.0, 1.0);
            let sb = uniform_vec(rng, n, 0.0, 1.0);
            let w = haar_unitary(rng, n);
            (HermitianMatrix::diag(&sa), HermitianMatrix::diag(&sb).conjugate_by(&(v.adjoint() * w)))
        }
        2 => {
            let flags: Vec<f64> = (0..n).map(|i| if i < split { 1.0 } else { 0.0 }).collect();
            (HermitianMatrix::diag(&flags), HermitianMatrix::diag(&uniform_vec(rng, n, 0.0, 1.0)))
        }
        _ => {
            let t = rng.random_range(0.0..1.0);
            let flags: Vec<f64> = (0..n).map(|i| if i < split { 1.0 } else { 0.0 }).collect();
            let rest: Vec<f64> = flags.iter().map(|f| t * (1.0 - f)).collect();
            (HermitianMatrix::diag(&flags), HermitianMatrix::diag(&rest))
        }
    };
    Ok((unit(a.conjugate_by(&v), tol)?, unit(b.conjugate_by(&v), tol)?))
}

/// Random padding with at most two blocks of each kind.
pub fn random_padding(rng: &mut SuiteRng) -> Padding {
    Padding {
        p1: rng.random_range(0..=2),
        p2: rng.random_range(0..=2),
        n1: rng.random_range(0..=2),
        n2: rng.random_range(0..=2),
    }
}

/// Sorted spectra compared entrywise.
pub fn spectrum_distance(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<f64> {
    let ex = x.eigenvalues()?;
    let ey = y.eigenvalues()?;
    if ex.len() != ey.len() {
        return Err(Error::DimensionMismatch { left: ex.len(), right: ey.len() });
    }
    Ok(ex.iter().zip(&ey).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max))
}

/// All round-trip defects of a constructed pair conjugated by a Haar unitary.
#[derive(Clone, Debug, Default)]
pub struct RoundTrip {
    pub reconstruction: f64,
    pub rebuilt: f64,
    pub commutator: f64,
    pub proof_identity: f64,
    pub spectrum_a: f64,
    pub spectrum_b: f64,
    pub rank_p: usize,
    pub dim: usize,
}

pub fn round_trip(inst: &ConstructedInstance, w: &CMatrix, tol: &Tolerance) -> Result<RoundTrip> {
    let (a, b) = conjugate_pair(&inst.a, &inst.b, w, tol)?;
    let cf = canonical_decompose(&a, &b, tol)?;
    let (ra, rb) = reconstruct_from_canonical(&cf)?;
    let r = &cf.residuals;
    Ok(RoundTrip {
        reconstruction: r.reconstruction_a.max(r.reconstruction_b),
        rebuilt: op_norm(&(ra.as_matrix() - a.as_matrix()))
            .max(op_norm(&(rb.as_matrix() - b.as_matrix()))),
        commutator: r.commutator,
        proof_identity: r.proof_identity_a.max(r.proof_identity_b),
        spectrum_a: spectrum_distance(&cf.a1, &inst.x.square())?,
        spectrum_b: spectrum_distance(&cf.b1, &inst.y.square())?,
        rank_p: cf.rank_p,
        dim: a.dim(),
    })
}

// matrixcore

fn functional_calculus(ctx: &mut TrialCtx) -> Result<f64> {
    let spectrum = uniform_vec(&mut ctx.rng, ctx.dim, -1.0, 1.0);
    let x = hermitian_with_spectrum(&mut ctx.rng, &spectrum);
    let k: Vec<f64> = uniform_vec(&mut ctx.rng, 4, -1.0, 1.0);
    let f = |t: f64| k[0] + k[1] * t + t * t;
    let g = |t: f64| k[2] + k[3] * t * t * t;
    let sd = spectral_decompose(&x)?;
    let product = sd.apply(|t| f(t) * g(t))?;
    let separate = sd.apply(f)?.as_matrix() * sd.apply(g)?.as_matrix();
    Ok(op_norm(&(product.as_matrix() - separate)) + sd.reconstruction_residual(&x))
}

fn abs_squares(ctx: &mut TrialCtx) -> Result<f64> {
    let spectrum = uniform_vec(&mut ctx.rng, ctx.dim, -1.0, 1.0);
    let x = hermitian_with_spectrum(&mut ctx.rng, &spectrum);
    let m = abs_op(&x)?;
    Ok(op_norm(&(m.square().as_matrix() - x.square().as_matrix())))
}

fn sqrt_squares(ctx: &mut TrialCtx) -> Result<f64> {
    let spectrum = uniform_vec(&mut ctx.rng, ctx.dim, 0.0, 1.0);
    let x = hermitian_with_spectrum(&mut ctx.rng, &spectrum);
    let r = sqrt_op(&x, &ctx.tol)?;
    Ok(op_norm(&(r.square().as_matrix() - x.as_matrix())))
}

fn jordan_symmetric(ctx: &mut TrialCtx) -> Result<f64> {
    let n = ctx.dim;
    let x = hermitian_noise(&mut ctx.rng, n, 1.0);
    let y = hermitian_noise(&mut ctx.rng, n, 1.0);
    Ok(indicator(jordan(&x, &y)? == jordan(&y, &x)?))
}

// projections

fn range_projection_covariant(ctx: &mut TrialCtx) -> Result<f64> {
    let n = ctx.dim;
    let rank = ctx.rng.random_range(0..=n);
    let mut spectrum = uniform_vec(&mut ctx.rng, n, 0.1, 1.0);
    spectrum.iter_mut().skip(rank).for_each(|t| *t = 0.0);
    let x = hermitian_with_spectrum(&mut ctx.rng, &spectrum);
    let u = haar_unitary(&mut ctx.rng, n);
    let lhs = range_projection(&x.conjugate_by(&u), &ctx.tol)?;
    let rhs = range_projection(&x, &ctx.tol)?.conjugate_by(&u);
    let rank_defect = indicator(lhs.rank() == rank);
    Ok(op_norm(&(lhs.as_matrix() - rhs.as_matrix())) + lhs.idempotence_residual() + rank_defect)
}

fn strict_blocks(ctx: &mut TrialCtx) -> Result<f64> {
    let n = ctx.dim.max(2);
    let a = gen_strict(&config(ctx, GeneratorKind::Strict, n))?;
    let rank = ctx.rng.random_range(1..n);
    let p = ProjectionMatrix::new(random_projection(&mut ctx.rng, n, rank), &ctx.tol)?;
    let blocks = block_decompose(&a, &[p.clone(), p.complement()], &ctx.tol)?;
    let strict = spectrum_is_strict(&blocks.diagonal(0), &ctx.tol)?
        && spectrum_is_strict(&blocks.diagonal(1), &ctx.tol)?;
    Ok(indicator(strict))
}

fn strict_injective(ctx: &mut TrialCtx) -> Result<f64> {
    let n = ctx.dim;
    let a = gen_strict(&config(ctx, GeneratorKind::Strict, n))?;
    let lambda = spectral_decompose(&a)?.min();
    let x = gaussian_matrix(&mut ctx.rng, n, n);
    let bounded = op_norm(&(a.as_matrix() * &x)) >= lambda * op_norm(&x) * (1.0 - 1e-12);
    Ok(indicator(lambda > ctx.tol.tol_eig && bounded))
}

fn sqrt_of_strict(ctx: &mut TrialCtx) -> Result<f64> {
    let a = gen_strict(&config(ctx, GeneratorKind::Strict, ctx.dim))?;
    let r = unit(sqrt_op(&a, &ctx.tol)?, &ctx.tol)?;
    Ok(indicator(is_strict(&r, &ctx.tol)?))
}

fn commuting_product_strict(ctx: &mut TrialCtx) -> Result<f64> {
    let n = ctx.dim;
    let v = haar_unitary(&mut ctx.rng, n);
    let sa = uniform_vec(&mut ctx.rng, n, 0.05, 0.95);
    let sb = uniform_vec(&mut ctx.rng, n, 0.05, 0.95);
    let a = unit(HermitianMatrix::diag(&sa).conjugate_by(&v), &ctx.tol)?;
    let b = unit(HermitianMatrix::diag(&sb).conjugate_by(&v), &ctx.tol)?;
    let ab = unit(jordan(&a, &b)?, &ctx.tol)?;
    Ok(indicator(is_strict(&a, &ctx.tol)? && is_strict(&b, &ctx.tol)? && is_strict(&ab, &ctx.tol)?))
}

/// Even trials use strict elements, odd trials pin one eigenvalue to 0 or 1.
fn strict_iff_square_strict(ctx: &mut TrialCtx) -> Result<f64> {
    let n = ctx.dim;
    let mut spectrum = uniform_vec(&mut ctx.rng, n, 0.05, 0.95);
    let expect_strict = ctx.trial % 2 == 0;
    if !expect_strict {
        let i = ctx.rng.random_range(0..n);
        spectrum[i] = if ctx.rng.random::<bool>() { 1.0 } else { 0.0 };
    }
    let a = unit(hermitian_with_spectrum(&mut ctx.rng, &spectrum), &ctx.tol)?;
    let a2 = unit(a.square(), &ctx.tol)?;
    let (s1, s2) = (is_strict(&a, &ctx.tol)?, is_strict(&a2, &ctx.tol)?);
    Ok(indicator(s1 == s2 && s1 == expect_strict))
}

// compatibility

fn generated_pair_compatible(ctx: &mut TrialCtx) -> Result<f64> {
    let padding = random_padding(&mut ctx.rng);
    let cfg = config(ctx, GeneratorKind::CompatiblePair, ctx.dim).with_padding(padding);
    let (a, b) = gen_compatible_pair(&cfg)?;
    Ok(is_abs_compatible(&a, &b, &ctx.tol)?.residual)
}

/// Compatibility verdicts and residuals survive unitary conjugation, for
/// compatible pairs (even trials) and sign-flipped ones (odd trials).
fn compatibility_unitary_invariance(ctx: &mut TrialCtx) -> Result<f64> {
    let tol = ctx.tol;
    let inst = constructed_instance(ctx.rng.random(), ctx.dim, &tol)?;
    let (a, mut b) = (inst.a, inst.b);
    if ctx.trial % 2 == 1 {
        b = sign_flip(&b, &witness(&a, &b, &tol)?, &tol)?;
    }
    let w = haar_unitary(&mut ctx.rng, a.dim());
    let (wa, wb) = conjugate_pair(&a, &b, &w, &tol)?;
    let before = is_abs_compatible(&a, &b, &tol)?;
    let after = is_abs_compatible(&wa, &wb, &tol)?;
    Ok((before.residual - after.residual).abs() + indicator(before.verdict == after.verdict))
}

/// Even trials: commuting pairs must be compatible. Odd trials: pairs with
/// commutator at least 1e-2 must be incompatible with residual at least 1e-4.
fn projection_commutation(ctx: &mut TrialCtx) -> Result<f64> {
    let tol = ctx.tol;
    if ctx.trial % 2 == 0 {
        let (p, a) = commuting_projection_pair(&mut ctx.rng, ctx.dim, &tol)?;
        let report = is_abs_compatible(&unit(p.hermitian().clone(), &tol)?, &a, &tol)?;
        Ok(report.residual)
    } else {
        let (p, a) = non_commuting_projection_pair(&mut ctx.rng, ctx.dim.max(2), 1e-2, &tol)?;
        let report = is_abs_compatible(&unit(p.hermitian().clone(), &tol)?, &a, &tol)?;
        Ok(indicator(!report.verdict && report.residual >= 1e-4))
    }
}

fn witness_soundness(ctx: &mut TrialCtx) -> Result<f64> {
    let tol = ctx.tol;
    let inst = constructed_instance(ctx.rng.random(), ctx.dim, &tol)?;
    let w = haar_unitary(&mut ctx.rng, inst.a.dim());
    let (a, b) = conjugate_pair(&inst.a, &inst.b, &w, &tol)?;
    let report = characterize_constructed(&a, &b, &tol)?;
    let compat = is_abs_compatible(&a, &b, &tol)?;
    Ok(report.max_residual().max(compat.residual))
}

fn sign_flip_detected(ctx: &mut TrialCtx) -> Result<f64> {
    let tol = ctx.tol;
    let inst = constructed_instance(ctx.rng.random(), ctx.dim, &tol)?;
    let w = haar_unitary(&mut ctx.rng, inst.a.dim());
    let (a, b) = conjugate_pair(&inst.a, &inst.b, &w, &tol)?;
    let p1 = witness(&a, &b, &tol)?;
    let flipped = sign_flip(&b, &p1, &tol)?;
    let report = check_characterization(&a, &flipped, &p1, &tol)?;
    Ok(indicator(report.residual_i >= 1e-2))
}

/// A convex step of size 1e-2 towards a random unit-interval element, so the
/// perturbation has norm about 1e-3 or more and stays inside `[0, 1]`.
fn noise_detected(ctx: &mut TrialCtx) -> Result<f64> {
    let tol = ctx.tol;
    let inst = constructed_instance(ctx.rng.random(), ctx.dim, &tol)?;
    let (a, b) = (inst.a, inst.b);
    let p1 = witness(&a, &b, &tol)?;
    let n = a.dim();
    let target = gen_arbitrary_unit_interval(&config(ctx, GeneratorKind::ArbitraryUnitInterval, n))?;
    let t = 1e-2;
    let moved = HermitianMatrix::symmetrize(b.as_matrix() * c(1.0 - t) + target.as_matrix() * c(t));
    let size = op_norm(&(moved.as_matrix() - b.as_matrix()));
    let report = check_characterization(&a, &unit(moved, &tol)?, &p1, &tol)?;
    Ok(indicator(size < 1e-3 || report.max_residual() > tol.tol_res))
}

fn orthogonality(ctx: &mut TrialCtx) -> Result<f64> {
    let (a, b) = orthogonality_instance(&mut ctx.rng, ctx.dim, ctx.trial, &ctx.tol)?;
    Ok(indicator(orthogonality_equivalence(&a, &b, &ctx.tol)?.equivalence_holds()))
}

fn direct_sum_closure(ctx: &mut TrialCtx) -> Result<f64> {
    let d1 = ctx.rng.random_range(1..=ctx.dim);
    let (a1, b1) = gen_compatible_pair(&config(ctx, GeneratorKind::CompatiblePair, d1))?;
    let d2 = ctx.dim + 1 - d1;
    let (a2, b2) = gen_compatible_pair(&config(ctx, GeneratorKind::CompatiblePair, d2))?;
    Ok(compatibility_defect(&a1.direct_sum(&a2), &b1.direct_sum(&b2))?.op_norm())
}

fn five_block(ctx: &mut TrialCtx) -> Result<f64> {
    let padding = random_padding(&mut ctx.rng);
    let cfg = config(ctx, GeneratorKind::CompatiblePair, ctx.dim).with_padding(padding);
    let (a, b) = gen_compatible_pair(&cfg)?;
    let fb = five_block_decompose(&a, &b, &ctx.tol)?;
    let ranks = [fb.p1.rank(), fb.p2.rank(), fb.s.rank(), fb.n1.rank(), fb.n2.rank()];
    let expected = [padding.p1, padding.p2, 2 * ctx.dim, padding.n1, padding.n2];
    let (ca, cb) = fb.core();
    let core_ok = fb.core_strict && compatibility_defect(ca, cb)?.op_norm() <= ctx.tol.tol_res;
    Ok(fb.residuals.max() + indicator(ranks == expected && core_ok))
}

// canonical

/// Every third trial uses a rank-deficient matrix.
fn polar_identities(ctx: &mut TrialCtx) -> Result<f64> {
    let n = ctx.dim;
    let mut x = gaussian_matrix(&mut ctx.rng, n, n) * c(1.0 / (2.0 * (n as f64).sqrt()));
    if ctx.trial % 3 == 2 && n > 1 {
        let rank = ctx.rng.random_range(1..n);
        let keep = random_projection(&mut ctx.rng, n, rank);
        x = x * keep.as_matrix();
    }
    let polar = polar_decompose(&x, &ctx.tol)?;
    Ok(polar.residuals(&x, 3, &ctx.tol)?.max())
}

/// Defect measured against the fixed 1e-8 bound; strictness of the outputs
/// is checked at 1e-6.
fn construction(ctx: &mut TrialCtx) -> Result<f64> {
    let tol = ctx.tol;
    let inst = constructed_instance(ctx.rng.random(), ctx.dim, &tol)?;
    let compat = is_abs_compatible(&inst.a, &inst.b, &tol)?;
    let (r1, r2) = construction_identity_residuals(&inst.x, &inst.y, &inst.a, &inst.b)?;
    let strict = Tolerance::new(1e-6, tol.tol_res)?;
    let ok = is_strict(&inst.a, &strict)? && is_strict(&inst.b, &strict)?;
    Ok(compat.residual.max(r1).max(r2) + indicator(ok))
}

fn canonical_round_trip(ctx: &mut TrialCtx) -> Result<f64> {
    let tol = ctx.tol;
    let inst = constructed_instance(ctx.rng.random(), ctx.dim, &tol)?;
    let w = haar_unitary(&mut ctx.rng, inst.a.dim());
    let rt = round_trip(&inst, &w, &tol)?;
    let worst = rt.reconstruction.max(rt.rebuilt).max(rt.spectrum_a).max(rt.spectrum_b);
    Ok(worst + indicator(2 * rt.rank_p == rt.dim && rt.commutator <= 1e-8))
}

fn canonical_proof_identity(ctx: &mut TrialCtx) -> Result<f64> {
    let tol = ctx.tol;
    let inst = constructed_instance(ctx.rng.random(), ctx.dim, &tol)?;
    let w = haar_unitary(&mut ctx.rng, inst.a.dim());
    Ok(round_trip(&inst, &w, &tol)?.proof_identity)
}

fn dimension_law(ctx: &mut TrialCtx) -> Result<f64> {
    let (a, b) = gen_compatible_pair(&config(ctx, GeneratorKind::CompatiblePair, ctx.dim))?;
    let p = witness(&a, &b, &ctx.tol)?.complement();
    Ok(indicator(2 * p.rank() == a.dim()))
}

fn generic_pair(ctx: &mut TrialCtx) -> Result<crate::canonical::GenericPairForm> {
    let (p, q) = gen_generic_projections(&config(ctx, GeneratorKind::GenericProjections, 2 * ctx.dim))?;
    halmos_decompose(&p, &q, &ctx.tol)
}

fn halmos_reconstruction(ctx: &mut TrialCtx) -> Result<f64> {
    let r = generic_pair(ctx)?.residuals;
    Ok(r.reconstruction_p.max(r.reconstruction_q).max(r.pythagoras).max(r.unitary))
}

fn halmos_commutation(ctx: &mut TrialCtx) -> Result<f64> {
    Ok(generic_pair(ctx)?.residuals.commutator)
}

/// The off-diagonal block `CS` equals `(C²S²)^{1/2}`.
fn halmos_resemblance(ctx: &mut TrialCtx) -> Result<f64> {
    let form = generic_pair(ctx)?;
    let product = HermitianMatrix::symmetrize(form.c.square().as_matrix() * form.s.square().as_matrix());
    let root = sqrt_op(&product, &ctx.tol)?;
    Ok(op_norm(&(form.off_diagonal().as_matrix() - root.as_matrix())))
}

// harness

fn matrices(g: &Generated) -> Vec<CMatrix> {
    match g {
        Generated::Single(a) => vec![a.as_matrix().clone()],
        Generated::Pair(a, b) => vec![a.as_matrix().clone(), b.as_matrix().clone()],
        Generated::Projections(p, q) => vec![p.as_matrix().clone(), q.as_matrix().clone()],
    }
}

fn generator_determinism(ctx: &mut TrialCtx) -> Result<f64> {
    let kind = GeneratorKind::ALL[ctx.trial % GeneratorKind::ALL.len()];
    let dim = if kind == GeneratorKind::GenericProjections { 2 * ctx.dim } else { ctx.dim };
    let padding = random_padding(&mut ctx.rng);
    let cfg = config(ctx, kind, dim).with_padding(padding);
    let first = matrices(&generate(&cfg)?);
    let second = matrices(&generate(&cfg)?);
    Ok(indicator(first == second))
}

fn generator_certification(ctx: &mut TrialCtx) -> Result<f64> {
    let tol = ctx.tol;
    let kind = GeneratorKind::ALL[ctx.trial % GeneratorKind::ALL.len()];
    let ok = match kind {
        GeneratorKind::Strict => is_strict(&gen_strict(&config(ctx, kind, ctx.dim))?, &tol)?,
        GeneratorKind::ArbitraryUnitInterval => {
            let a = gen_arbitrary_unit_interval(&config(ctx, kind, ctx.dim))?;
            crate::matrixcore::in_unit_interval(&a, &tol)?
        }
        GeneratorKind::StrictCommuting => {
            let (a, b) = gen_strict_commuting(&config(ctx, kind, ctx.dim))?;
            construct_pair(&a, &b, &tol).is_ok()
        }
        GeneratorKind::CompatiblePair => {
            let padding = random_padding(&mut ctx.rng);
            let (a, b) = gen_compatible_pair(&config(ctx, kind, ctx.dim).with_padding(padding))?;
            is_abs_compatible(&a, &b, &tol)?.verdict
        }
        GeneratorKind::GenericProjections => {
            let (p, q) = gen_generic_projections(&config(ctx, kind, 2 * ctx.dim))?;
            crate::canonical::generic_position_check(&p, &q, &tol)?
        }
    };
    Ok(indicator(ok))
}

static REGISTRY: [Property; 30] = [
    Property::new("matrixcore.functional_calculus", Bound::Residual, functional_calculus),
    Property::new("matrixcore.abs_squares_to_square", Bound::Residual, abs_squares),
    Property::new("matrixcore.sqrt_squares_back", Bound::Residual, sqrt_squares),
    Property::new("matrixcore.jordan_symmetric", Bound::Exact, jordan_symmetric),
    Property::new("projections.range_projection_covariant", Bound::Residual, range_projection_covariant),
    Property::new("projections.strict_blocks_strict", Bound::Exact, strict_blocks),
    Property::new("projections.strict_injective", Bound::Exact, strict_injective),
    Property::new("projections.sqrt_of_strict_strict", Bound::Exact, sqrt_of_strict),
    Property::new("projections.commuting_product_strict", Bound::Exact, commuting_product_strict),
    Property::new("projections.strict_iff_square_strict", Bound::Exact, strict_iff_square_strict),
    Property::new("projections.range_dominates", Bound::Residual, range_dominates),
    Property::new("compatibility.generated_pair_compatible", Bound::Residual, generated_pair_compatible),
    Property::new("compatibility.unitary_invariance", Bound::Residual, compatibility_unitary_invariance),
    Property::new("compatibility.projection_commutation", Bound::Residual, projection_commutation),
    Property::new("compatibility.witness_soundness", Bound::Fixed(1e-8), witness_soundness),
    Property::new("compatibility.sign_flip_detected", Bound::Exact, sign_flip_detected),
    Property::new("compatibility.noise_detected", Bound::Exact, noise_detected),
    Property::new("compatibility.orthogonality_equivalence", Bound::Exact, orthogonality),
    Property::new("compatibility.direct_sum_closure", Bound::Residual, direct_sum_closure),
    Property::new("compatibility.five_block", Bound::Residual, five_block),
    Property::new("canonical.polar_identities", Bound::Fixed(1e-8), polar_identities),
    Property::new("canonical.construction", Bound::Fixed(1e-8), construction),
    Property::new("canonical.round_trip", Bound::Residual, canonical_round_trip),
    Property::new("canonical.proof_identity", Bound::Residual, canonical_proof_identity),
    Property::new("canonical.dimension_law", Bound::Exact, dimension_law),
    Property::new("canonical.halmos_reconstruction", Bound::Fixed(1e-8), halmos_reconstruction),
    Property::new("canonical.halmos_commutation", Bound::Fixed(1e-9), halmos_commutation),
    Property::new("canonical.halmos_resemblance", Bound::Residual, halmos_resemblance),
    Property::new("harness.generator_determinism", Bound::Exact, generator_determinism),
    Property::new("harness.generator_certification", Bound::Exact, generator_certification),
];

/// Projections from `range_projection` of a unit-interval element sit between
/// `a` and `1`: `a ≤ r(a)`, checked as `r(a) − a ≥ −tol_eig`.
fn range_dominates(ctx: &mut TrialCtx) -> Result<f64> {
    let a = gen_arbitrary_unit_interval(&config(ctx, GeneratorKind::ArbitraryUnitInterval, ctx.dim))?;
    let r = range_projection(&a, &ctx.tol)?;
    let gap = spectral_decompose(&(r.hermitian() - a.matrix()))?.min();
    Ok((-gap).max(0.0))
}

/// Every registered property, in report order.
pub fn registry() -> &'static [Property] {
    &REGISTRY
}

pub fn find_property(name: &str) -> Option<&'static Property> {
    REGISTRY.iter().find(|p| p.name == name)
}
