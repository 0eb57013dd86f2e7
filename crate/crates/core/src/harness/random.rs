//! Seeded randomness.
//!
//! Every random object is drawn from ChaCha8 (`rand_chacha`), whose output
//! stream is fixed by its seed on every platform. Per-trial streams are
//! derived with [`derive_seed`], so a trial's inputs depend only on
//! `(seed, property name, trial index)` and never on scheduling.

use nalgebra::QR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrixcore::{c, CMatrix, HermitianMatrix};

pub type SuiteRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xCBF2_9CE4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01B3))
}

/// `seed ⊕ hash(name, index)`, with FNV-1a over the name and SplitMix64 mixing.
pub fn derive_seed(seed: u64, name: &str, index: u64) -> u64 {
    seed ^ splitmix64(fnv1a(name.as_bytes()) ^ splitmix64(index))
}

pub fn complex_gaussian(rng: &mut SuiteRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut SuiteRng, rows: usize, cols: usize) -> CMatrix {
    // column-major fill keeps the draw order fixed
    let mut m = CMatrix::zeros(rows, cols);
    for k in 0..cols {
        for j in 0..rows {
            m[(j, k)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`, so `R` has a positive real diagonal.
pub fn haar_unitary(rng: &mut SuiteRng, n: usize) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let qr = QR::new(gaussian_matrix(rng, n, n));
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// `V diag(spectrum) V*` for a Haar `V`.
pub fn hermitian_with_spectrum(rng: &mut SuiteRng, spectrum: &[f64]) -> HermitianMatrix {
    let v = haar_unitary(rng, spectrum.len());
    HermitianMatrix::diag(spectrum).conjugate_by(&v)
}

pub fn uniform_vec(rng: &mut SuiteRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Projection of rank `rank` onto a Haar-random subspace.
pub fn random_projection(rng: &mut SuiteRng, n: usize, rank: usize) -> HermitianMatrix {
    let spectrum: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    hermitian_with_spectrum(rng, &spectrum)
}
