//! Reference measures and seeded random inputs shared by tests, benches and
//! the CLI.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::SpectralVector;
use crate::series::CoefficientSeries;
use crate::spectral::AtomicMeasure;

pub fn two_atom() -> AtomicMeasure {
    AtomicMeasure::new(&[(0.0, 0.5), (0.5, 0.5)]).expect("valid measure")
}

pub fn three_atom() -> AtomicMeasure {
    AtomicMeasure::new(&[(0.0, 0.5), (1.0 / 3.0, 0.25), (2.0 / 3.0, 0.25)]).expect("valid measure")
}

/// Irregularly spaced atoms, one at the golden-ratio point.
pub fn five_atom() -> AtomicMeasure {
    AtomicMeasure::new(&[
        (0.05, 0.3),
        (0.23, 0.25),
        (0.41, 0.2),
        (0.618_033_988_7, 0.15),
        (0.83, 0.1),
    ])
    .expect("valid measure")
}

/// `δ₀`, two-atom, three-atom, fourth roots of unity, five-atom.
pub fn standard_measures() -> Vec<(&'static str, AtomicMeasure)> {
    vec![
        ("dirac", AtomicMeasure::dirac()),
        ("two_atom", two_atom()),
        ("three_atom", three_atom()),
        (
            "roots_of_unity_4",
            AtomicMeasure::roots_of_unity(4).expect("valid measure"),
        ),
        ("five_atom", five_atom()),
    ]
}

/// Standard complex Gaussians `(X + iY)/√2`.
pub fn random_coefficients(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect()
}

/// A Gaussian vector scaled to unit `L²(μ)` norm.
pub fn random_unit_vector(m: &AtomicMeasure, seed: u64) -> SpectralVector {
    let v = SpectralVector::new(random_coefficients(m.dim(), seed));
    let norm = m.norm_unchecked(&v);
    v.scale(Complex64::new(1.0 / norm, 0.0))
}

/// Polynomial with Gaussian coefficients of the given degree.
pub fn random_polynomial(degree: usize, seed: u64) -> CoefficientSeries {
    CoefficientSeries::new(random_coefficients(degree + 1, seed))
}
