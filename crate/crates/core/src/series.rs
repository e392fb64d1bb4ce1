//! Truncated complex power series `Σ a_n zⁿ`.
//!
//! Every symbol the reconstruction works with on the disc (moment series,
//! the `1 - b` coefficients, noise series and their products) is stored as a
//! finite coefficient list. Products are truncated: the first `len`
//! coefficients of a product of two truncated series are exact, so the
//! truncation degree is always an explicit argument.

use std::f64::consts::TAU;
use std::ops::{Index, Neg};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{check_radius, Result};

/// Products smaller than this many multiply-adds use the direct sum.
const DIRECT_CONVOLUTION_LIMIT: usize = 1 << 22;

/// Finite list of power-series coefficients; index `n` is the power of `z`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientSeries {
    coeffs: Vec<Complex64>,
}

impl CoefficientSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); len])
    }

    /// The constant series `1` padded with zeros to `len` coefficients.
    pub fn one(len: usize) -> Self {
        let mut s = Self::zeros(len.max(1));
        s.coeffs[0] = Complex64::new(1.0, 0.0);
        s
    }

    /// `zᵏ` padded to `len` coefficients.
    pub fn monomial(k: usize, len: usize) -> Self {
        let mut s = Self::zeros(len.max(k + 1));
        s.coeffs[k] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient `n`, or zero beyond the stored range.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Keeps (or zero-pads to) exactly `len` coefficients.
    pub fn resized(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, Complex64::new(0.0, 0.0));
        Self::new(coeffs)
    }

    /// Finite sum `Σ a_n zⁿ` (Horner).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `Σ a_n rⁿ e^{2πinx}`: the series on the circle of radius `r`, used to
    /// probe boundary values as `r → 1⁻`.
    pub fn radial_evaluate(&self, r: f64, x: f64) -> Result<Complex64> {
        check_radius(r)?;
        Ok(self.eval(Complex64::from_polar(r, TAU * x)))
    }

    /// First `len` coefficients of the product.
    pub fn mul_truncated(&self, other: &Self, len: usize) -> Self {
        Self::new(convolve(&self.coeffs, &other.coeffs, len))
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.len().max(other.len());
        Self::new((0..len).map(|n| self.coeff(n) + other.coeff(n)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.len().max(other.len());
        Self::new((0..len).map(|n| self.coeff(n) - other.coeff(n)).collect())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// Multiplies by `zᵏ` keeping `len` coefficients.
    pub fn shifted(&self, k: usize, len: usize) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for (n, &c) in self.coeffs.iter().enumerate() {
            if n + k < len {
                out[n + k] = c;
            }
        }
        Self::new(out)
    }

    /// Hardy-space norm of the stored coefficients, `(Σ|a_n|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let len = self.len().max(other.len());
        (0..len)
            .map(|n| (self.coeff(n) - other.coeff(n)).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CoefficientSeries {
    type Output = Complex64;

    fn index(&self, n: usize) -> &Complex64 {
        &self.coeffs[n]
    }
}

impl Neg for &CoefficientSeries {
    type Output = CoefficientSeries;

    fn neg(self) -> CoefficientSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl From<Vec<Complex64>> for CoefficientSeries {
    fn from(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs)
    }
}

/// First `len` coefficients of the Cauchy product of `a` and `b`.
///
/// Small products use the direct sum; large ones go through an FFT of
/// length `≥ 2·len`, which keeps adaptive Abel depths of order 10⁵–10⁶
/// tractable.
pub fn convolve(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    if a.is_empty() || b.is_empty() || len == 0 {
        return out;
    }
    if a.len().saturating_mul(b.len()) <= DIRECT_CONVOLUTION_LIMIT {
        for (i, &ai) in a.iter().enumerate() {
            if ai == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &bj) in b.iter().enumerate().take(len - i) {
                out[i + j] += ai * bj;
            }
        }
        return out;
    }

    let size = (a.len() + b.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut fa = a.to_vec();
    fa.resize(size, Complex64::new(0.0, 0.0));
    let mut fb = b.to_vec();
    fb.resize(size, Complex64::new(0.0, 0.0));
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse.process(&mut fa);
    let scale = 1.0 / size as f64;
    for (o, v) in out.iter_mut().zip(fa) {
        *o = v * scale;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn radial_evaluate_examples() {
        let s = CoefficientSeries::from_real(&[1.0, -1.0]);
        assert!((s.radial_evaluate(0.9, 0.0).unwrap() - c(0.1, 0.0)).norm() < 1e-15);

        let one = CoefficientSeries::from_real(&[1.0]);
        assert_eq!(one.radial_evaluate(0.7, 0.3).unwrap(), c(1.0, 0.0));

        let z = CoefficientSeries::from_real(&[0.0, 1.0]);
        assert!((z.radial_evaluate(0.5, 0.25).unwrap() - c(0.0, 0.5)).norm() < 1e-15);

        assert!(z.radial_evaluate(1.0, 0.0).is_err());
    }

    #[test]
    fn fft_convolution_matches_direct() {
        let n = 3000;
        let a: Vec<Complex64> = (0..n).map(|k| c((k as f64).sin(), 0.5 / (k + 1) as f64)).collect();
        let b: Vec<Complex64> = (0..n)
            .map(|k| c(0.9f64.powi(k as i32), (k as f64 * 0.3).cos()))
            .collect();
        let mut direct = vec![c(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n - i {
                direct[i + j] += a[i] * b[j];
            }
        }
        let fast = convolve(&a, &b, n);
        let err = direct
            .iter()
            .zip(&fast)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "fft error {err}");
    }

    #[test]
    fn product_truncation() {
        // (1 + z)(1 - z) = 1 - z²
        let p = CoefficientSeries::from_real(&[1.0, 1.0]);
        let q = CoefficientSeries::from_real(&[1.0, -1.0]);
        let r = p.mul_truncated(&q, 4);
        assert_eq!(r, CoefficientSeries::from_real(&[1.0, 0.0, -1.0, 0.0]));
        assert_eq!(p.mul_truncated(&q, 2), CoefficientSeries::from_real(&[1.0, 0.0]));
    }

    #[test]
    fn serializes_as_pairs() {
        let s = CoefficientSeries::new(vec![c(1.0, 2.0), c(-0.5, 0.0)]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[[1.0,2.0],[-0.5,0.0]]");
        let back: CoefficientSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
