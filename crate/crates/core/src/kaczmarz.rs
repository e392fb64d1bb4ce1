//! The Kaczmarz iteration on a stationary sequence and its series forms.
//!
//! For any input stream `c` the iterates satisfy
//! `x_N = Σ_{n≤N} d_n φ_n` with `d = α * c` (Cauchy product), so the
//! iteration, the `g_n` frame expansion and the noise error terms all reduce
//! to one convolution followed by a synthesis `Σ d_n φ_n`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{phi_vector, SpectralVector};
use crate::report::ReconstructionReport;
use crate::series::{convolve, CoefficientSeries};
use crate::spectral::AtomicMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// `c_n = ⟨x, φ_n⟩`
    Clean,
    /// `c_n = ⟨x, φ_n⟩ + ε_n`
    Noisy,
    Raw,
}

/// Scalar data `c_0..c_depth` fed to the iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputStream {
    values: Vec<Complex64>,
    provenance: Provenance,
}

impl InputStream {
    pub fn raw(values: Vec<Complex64>) -> Self {
        Self {
            values,
            provenance: Provenance::Raw,
        }
    }

    pub fn clean(m: &AtomicMeasure, x: &SpectralVector, depth: usize) -> Result<Self> {
        x.check_dim(m.dim())?;
        let values = (0..=depth).map(|n| m.inner_unchecked(x, &phi_vector(m, n))).collect();
        Ok(Self {
            values,
            provenance: Provenance::Clean,
        })
    }

    /// Clean data plus `ε_n`; `eps` must cover `0..=depth`.
    pub fn noisy(m: &AtomicMeasure, x: &SpectralVector, eps: &CoefficientSeries, depth: usize) -> Result<Self> {
        if eps.len() <= depth {
            return Err(Error::Depth {
                needed: depth + 1,
                available: eps.len(),
            });
        }
        let mut s = Self::clean(m, x, depth)?;
        for (v, e) in s.values.iter_mut().zip(eps.coeffs()) {
            *v += e;
        }
        s.provenance = Provenance::Noisy;
        Ok(s)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.values[n]
    }

    pub(crate) fn require(&self, n: usize) -> Result<()> {
        if self.values.len() > n {
            Ok(())
        } else {
            Err(Error::Depth {
                needed: n + 1,
                available: self.values.len(),
            })
        }
    }
}

pub(crate) fn require_series(s: &CoefficientSeries, n: usize) -> Result<()> {
    if s.len() > n {
        Ok(())
    } else {
        Err(Error::Depth {
            needed: n + 1,
            available: s.len(),
        })
    }
}

/// `Σ_n d_n φ_n` over the given coefficients.
pub fn synthesize(m: &AtomicMeasure, d: &[Complex64]) -> SpectralVector {
    synthesize_damped(m, d, 1.0)
}

/// `Σ_n rⁿ d_n φ_n`.
pub fn synthesize_damped(m: &AtomicMeasure, d: &[Complex64], r: f64) -> SpectralVector {
    let values = m
        .positions()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut rn = 1.0;
            for (n, &dn) in d.iter().enumerate() {
                acc += dn * Complex64::from_polar(rn, TAU * (n as f64 * x).rem_euclid(1.0));
                rn *= r;
            }
            acc
        })
        .collect();
    SpectralVector::new(values)
}

/// `d_n = Σ_{j≤n} α_{n-j} c_j` for `n ≤ N`.
pub fn kaczmarz_coefficients(alpha: &CoefficientSeries, c: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    require_series(alpha, n)?;
    if c.len() <= n {
        return Err(Error::Depth {
            needed: n + 1,
            available: c.len(),
        });
    }
    Ok(convolve(&alpha.coeffs()[..=n], &c[..=n], n + 1))
}

/// Runs `x_0 = c_0 φ_0`, `x_n = x_{n-1} + (c_n - ⟨x_{n-1}, φ_n⟩) φ_n`.
///
/// The largest interpolation residual `|⟨x_n, φ_n⟩ - c_n|` is recorded as the
/// bound value `interpolation_residual`; `error_norms` is filled when the
/// truth is supplied.
pub fn kaczmarz_run(
    m: &AtomicMeasure,
    c: &InputStream,
    n: usize,
    keep_trajectory: bool,
    truth: Option<&SpectralVector>,
) -> Result<ReconstructionReport> {
    c.require(n)?;
    if let Some(x) = truth {
        x.check_dim(m.dim())?;
    }
    let mut x = SpectralVector::zeros(m.dim());
    let mut trajectory = keep_trajectory.then(|| Vec::with_capacity(n + 1));
    let mut errors = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for k in 0..=n {
        let phi = phi_vector(m, k);
        let step = c.get(k) - m.inner_unchecked(&x, &phi);
        x.axpy(step, &phi);
        worst_residual = worst_residual.max((m.inner_unchecked(&x, &phi) - c.get(k)).norm());
        if let Some(t) = truth {
            errors.push(m.norm_unchecked(&t.sub(&x)));
        }
        if let Some(traj) = trajectory.as_mut() {
            traj.push(x.clone());
        }
    }
    let mut report = ReconstructionReport::new(x)
        .with_bound("interpolation_residual", worst_residual)
        .with_meta("steps", n)
        .with_meta("provenance", c.provenance())
        .with_meta("atoms", m.dim());
    report.iterates = trajectory;
    report.error_norms = errors;
    Ok(report)
}

/// `x_N = Σ_{n≤N} (Σ_{j≤n} α_{n-j} c_j) φ_n`.
pub fn series_reconstruction(
    m: &AtomicMeasure,
    alpha: &CoefficientSeries,
    c: &InputStream,
    n: usize,
) -> Result<SpectralVector> {
    let d = kaczmarz_coefficients(alpha, c.values(), n)?;
    Ok(synthesize(m, &d))
}

/// `g_0 = φ_0`, `g_n = φ_n - Σ_{i<n} ⟨φ_n, φ_i⟩ g_i` for `n ≤ N`.
pub fn auxiliary_sequence(m: &AtomicMeasure, n: usize) -> Vec<SpectralVector> {
    // ⟨φ_n, φ_i⟩ = conj μ̂(n - i)
    let moments: Vec<Complex64> = (0..=n).map(|k| m.moment(k as i64).conj()).collect();
    let mut g: Vec<SpectralVector> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut gk = phi_vector(m, k);
        for (i, gi) in g.iter().enumerate() {
            gk.axpy(-moments[k - i], gi);
        }
        g.push(gk);
    }
    g
}

/// `Σ_{n≤N} (Σ_{j≤n} α_{n-j} c_j) g_n`.
pub fn g_reconstruction(
    m: &AtomicMeasure,
    alpha: &CoefficientSeries,
    c: &InputStream,
    n: usize,
) -> Result<SpectralVector> {
    let d = kaczmarz_coefficients(alpha, c.values(), n)?;
    let g = auxiliary_sequence(m, n);
    let mut out = SpectralVector::zeros(m.dim());
    for (dk, gk) in d.iter().zip(&g) {
        out.axpy(*dk, gk);
    }
    Ok(out)
}

/// Partial sum of `E_{ε,g} = Σ ((1-b)ε)_n g_n`.
pub fn g_error_term(
    m: &AtomicMeasure,
    alpha: &CoefficientSeries,
    eps: &CoefficientSeries,
    n: usize,
) -> Result<SpectralVector> {
    require_series(eps, n)?;
    g_reconstruction(m, alpha, &InputStream::raw(eps.coeffs().to_vec()), n)
}

/// `|Σ_{n≤N} |⟨x, g_n⟩|² - ‖x‖²|` for every `N` up to `n`.
pub fn parseval_defect_curve(m: &AtomicMeasure, x: &SpectralVector, n: usize) -> Result<Vec<f64>> {
    x.check_dim(m.dim())?;
    let norm2 = m.norm_unchecked(x).powi(2);
    let mut partial = 0.0;
    Ok(auxiliary_sequence(m, n)
        .iter()
        .map(|g| {
            partial += m.inner_unchecked(x, g).norm_sqr();
            (partial - norm2).abs()
        })
        .collect())
}

pub fn parseval_defect(m: &AtomicMeasure, x: &SpectralVector, n: usize) -> Result<f64> {
    Ok(*parseval_defect_curve(m, x, n)?.last().expect("curve has n + 1 entries"))
}

/// Partial sum of `E_ε = Σ ((1-b)ε)_n φ_n` through `n = N`.
pub fn error_term(
    m: &AtomicMeasure,
    alpha: &CoefficientSeries,
    eps: &CoefficientSeries,
    n: usize,
) -> Result<SpectralVector> {
    require_series(eps, n)?;
    let d = kaczmarz_coefficients(alpha, eps.coeffs(), n)?;
    Ok(synthesize(m, &d))
}

/// Stabilization evidence for a partial-sum sequence `S_N = Σ_{n≤N} d_n φ_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesDiagnostics {
    /// `‖S_N‖` for every `N`.
    pub partial_norms: Vec<f64>,
    /// `‖d_N φ_N‖ = |d_N|`, the increment norms.
    pub increments: Vec<f64>,
    pub converged: bool,
    /// Least-squares slope of `log ‖S_N‖` against `log N`.
    pub growth_exponent: f64,
}

/// The last `⌈N/10⌉` increments all lie below `tol / N`.
pub fn declare_converged(increments: &[f64], tol: f64) -> bool {
    let n = increments.len();
    if n == 0 {
        return false;
    }
    let window = n.div_ceil(10);
    let threshold = tol / n as f64;
    increments[n - window..].iter().all(|&v| v < threshold)
}

/// Slope of the least-squares line through `(log N, log v_N)`, `N ≥ 1`,
/// skipping zero entries. Returns 0 when fewer than two points remain.
pub fn growth_exponent(values: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &v)| v > 0.0)
        .map(|(k, &v)| ((k as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let count = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Partial sums `Σ_{n≤N} d_n φ_n` tracked step by step.
pub fn series_diagnostics(m: &AtomicMeasure, d: &[Complex64], tol: f64) -> SeriesDiagnostics {
    let mut s = SpectralVector::zeros(m.dim());
    let mut partial_norms = Vec::with_capacity(d.len());
    let mut increments = Vec::with_capacity(d.len());
    for (k, &dk) in d.iter().enumerate() {
        s.axpy(dk, &phi_vector(m, k));
        partial_norms.push(m.norm_unchecked(&s));
        increments.push(dk.norm());
    }
    SeriesDiagnostics {
        converged: declare_converged(&increments, tol),
        growth_exponent: growth_exponent(&partial_norms),
        partial_norms,
        increments,
    }
}

/// Diagnostics for the partial sums of `E_ε`.
pub fn error_term_diagnostics(
    m: &AtomicMeasure,
    alpha: &CoefficientSeries,
    eps: &CoefficientSeries,
    n: usize,
    tol: f64,
) -> Result<SeriesDiagnostics> {
    require_series(eps, n)?;
    let d = kaczmarz_coefficients(alpha, eps.coeffs(), n)?;
    Ok(series_diagnostics(m, &d, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::MomentSource;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_atom() -> AtomicMeasure {
        AtomicMeasure::new(&[(0.0, 0.5), (0.5, 0.5)]).unwrap()
    }

    fn three_atom() -> AtomicMeasure {
        AtomicMeasure::new(&[(0.0, 0.5), (1.0 / 3.0, 0.25), (2.0 / 3.0, 0.25)]).unwrap()
    }

    fn pseudo_random(len: usize, seed: u64) -> Vec<Complex64> {
        // Small LCG so the unit tests stay independent of the RNG crates.
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        (0..len).map(|_| c(next(), next())).collect()
    }

    #[test]
    fn dirac_run_is_exact_after_step_zero() {
        let m = AtomicMeasure::dirac();
        let x = SpectralVector::new(vec![c(0.7, -1.2)]);
        let data = InputStream::clean(&m, &x, 5).unwrap();
        let r = kaczmarz_run(&m, &data, 5, false, Some(&x)).unwrap();
        assert!(r.error_norms.iter().all(|&e| e < 1e-15));
        assert!(r.iterates.is_none());
    }

    #[test]
    fn two_atom_two_steps_suffice() {
        let m = two_atom();
        let x = SpectralVector::from_real(&[2.0, 0.0]);
        let data = InputStream::clean(&m, &x, 2).unwrap();
        let r = kaczmarz_run(&m, &data, 2, true, Some(&x)).unwrap();
        assert!(r.final_error().unwrap() < 1e-12);
        assert_eq!(r.iterates.as_ref().unwrap().len(), 3);
        assert!(r.bound_values["interpolation_residual"] < 1e-12);

        let alpha = MomentSource::Atomic(m.clone()).alpha_coefficients(2).unwrap();
        let s = series_reconstruction(&m, &alpha, &data, 2).unwrap();
        assert!(m.distance(&s, &r.final_vector).unwrap() < 1e-12);
    }

    #[test]
    fn three_atom_converges() {
        let m = three_atom();
        let x = SpectralVector::new(vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.0, -2.0)]);
        let data = InputStream::clean(&m, &x, 500).unwrap();
        let r = kaczmarz_run(&m, &data, 500, false, Some(&x)).unwrap();
        assert!(r.final_error().unwrap() < 1e-6);
    }

    #[test]
    fn series_matches_iteration_on_raw_input() {
        let m = three_atom();
        let alpha = MomentSource::Atomic(m.clone()).alpha_coefficients(50).unwrap();
        let data = InputStream::raw(pseudo_random(51, 7));
        let it = kaczmarz_run(&m, &data, 50, false, None).unwrap();
        let se = series_reconstruction(&m, &alpha, &data, 50).unwrap();
        assert!(m.distance(&it.final_vector, &se).unwrap() < 1e-10);
        assert!(it.bound_values["interpolation_residual"] < 1e-12);
    }

    #[test]
    fn dirac_series_telescopes() {
        let m = AtomicMeasure::dirac();
        let alpha = CoefficientSeries::from_real(&[1.0, -1.0, 0.0, 0.0, 0.0]);
        let data = InputStream::raw(vec![c(1.0, 0.0), c(3.0, 1.0), c(-2.0, 0.5), c(0.25, 0.0)]);
        let s = series_reconstruction(&m, &alpha, &data, 3).unwrap();
        assert!((s.values()[0] - c(0.25, 0.0)).norm() < 1e-15);
        assert!(matches!(
            series_reconstruction(&m, &CoefficientSeries::from_real(&[1.0]), &data, 3),
            Err(Error::Depth { .. })
        ));
    }

    #[test]
    fn auxiliary_sequence_examples() {
        let g = auxiliary_sequence(&AtomicMeasure::dirac(), 4);
        assert_eq!(g[0], SpectralVector::from_real(&[1.0]));
        assert!(g[1..].iter().all(|v| v.values()[0].norm() < 1e-15));

        let m = two_atom();
        let g = auxiliary_sequence(&m, 4);
        assert!(m.distance(&g[0], &phi_vector(&m, 0)).unwrap() < 1e-15);
        assert!(m.distance(&g[1], &phi_vector(&m, 1)).unwrap() < 1e-15);
        assert!(g[2..].iter().all(|v| m.norm(v).unwrap() < 1e-14));

        // Orthonormal φ_0..φ_3 for the fourth roots of unity.
        let roots = AtomicMeasure::roots_of_unity(4).unwrap();
        let g = auxiliary_sequence(&roots, 3);
        for (k, gk) in g.iter().enumerate() {
            assert!(roots.distance(gk, &phi_vector(&roots, k)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn auxiliary_sequence_matches_alpha_form() {
        // g_n = Σ_j conj(α_{n-j}) φ_j
        let m = AtomicMeasure::new(&[
            (0.05, 0.3),
            (0.23, 0.25),
            (0.41, 0.2),
            (0.6180339887, 0.15),
            (0.83, 0.1),
        ])
        .unwrap();
        let alpha = MomentSource::Atomic(m.clone()).alpha_coefficients(60).unwrap();
        let g = auxiliary_sequence(&m, 60);
        for n in [0, 1, 7, 33, 60] {
            let coeffs: Vec<Complex64> = (0..=n).map(|j| alpha[n - j].conj()).collect();
            assert!(m.distance(&g[n], &synthesize(&m, &coeffs)).unwrap() < 1e-11);
        }
    }

    #[test]
    fn g_reconstruction_examples() {
        let m = three_atom();
        let x = SpectralVector::new(vec![c(0.4, 0.1), c(1.0, -1.0), c(-0.5, 0.0)]);
        let alpha = MomentSource::Atomic(m.clone()).alpha_coefficients(500).unwrap();
        let data = InputStream::clean(&m, &x, 500).unwrap();
        let y = g_reconstruction(&m, &alpha, &data, 500).unwrap();
        assert!(m.distance(&y, &x).unwrap() < 1e-8);

        // ε = b·h with h = 1 + z on the two-atom measure: b = z², ε = z² + z³.
        let two = two_atom();
        let alpha2 = MomentSource::Atomic(two.clone()).alpha_coefficients(40).unwrap();
        let mut eps = vec![c(0.0, 0.0); 41];
        eps[2] = c(1.0, 0.0);
        eps[3] = c(1.0, 0.0);
        let e = g_error_term(&two, &alpha2, &CoefficientSeries::new(eps), 40).unwrap();
        assert!(two.norm(&e).unwrap() < 1e-10);

        let d = AtomicMeasure::dirac();
        let alpha_d = CoefficientSeries::from_real(&[1.0, -1.0, 0.0, 0.0]);
        let data = InputStream::raw(vec![c(2.0, 0.0), c(5.0, 0.0), c(-1.0, 0.0), c(7.0, 0.0)]);
        let y = g_reconstruction(&d, &alpha_d, &data, 3).unwrap();
        assert!((y.values()[0] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parseval_defect_examples() {
        let m = two_atom();
        let x = SpectralVector::new(vec![c(0.3, -0.7), c(1.1, 0.2)]);
        assert!(parseval_defect(&m, &x, 1).unwrap() < 1e-12);
        assert_eq!(
            parseval_defect(&AtomicMeasure::dirac(), &SpectralVector::from_real(&[3.0]), 0).unwrap(),
            0.0
        );

        let m3 = three_atom();
        let x3 = SpectralVector::new(vec![c(0.2, 0.9), c(-1.0, 0.3), c(0.5, 0.5)]);
        let curve = parseval_defect_curve(&m3, &x3, 300).unwrap();
        assert!(curve[300] < 1e-6);
        assert!(curve.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn parseval_defect_equals_squared_iteration_error() {
        let m = AtomicMeasure::new(&[(0.1, 0.6), (0.45, 0.4)]).unwrap();
        let x = SpectralVector::new(vec![c(1.0, 2.0), c(-0.5, 0.25)]);
        let data = InputStream::clean(&m, &x, 30).unwrap();
        let run = kaczmarz_run(&m, &data, 30, false, Some(&x)).unwrap();
        let curve = parseval_defect_curve(&m, &x, 30).unwrap();
        for (e, d) in run.error_norms.iter().zip(&curve) {
            assert!((e * e - d).abs() < 1e-12);
        }
    }

    #[test]
    fn error_term_examples() {
        let m = two_atom();
        let alpha = MomentSource::Atomic(m.clone()).alpha_coefficients(21).unwrap();
        let eps = MomentSource::Atomic(m.clone()).moments(22).unwrap();
        for n in [0, 1, 5, 20] {
            let e = error_term(&m, &alpha, &eps, n).unwrap();
            assert!(m.distance(&e, &SpectralVector::ones(2)).unwrap() < 1e-12);
        }

        let poly = CoefficientSeries::from_real(&[1.0, -0.5, 0.25]).resized(301);
        let m3 = three_atom();
        let alpha3 = MomentSource::Atomic(m3.clone()).alpha_coefficients(300).unwrap();
        assert!(m3.norm(&error_term(&m3, &alpha3, &poly, 300).unwrap()).unwrap() < 1e-10);

        let d = AtomicMeasure::dirac();
        let alpha_d = MomentSource::Atomic(d.clone()).alpha_coefficients(1000).unwrap();
        let harmonic = CoefficientSeries::new((0..=1000).map(|n| c(1.0 / (n + 1) as f64, 0.0)).collect());
        let e = error_term(&d, &alpha_d, &harmonic, 1000).unwrap();
        assert!((e.values()[0] - c(1.0 / 1001.0, 0.0)).norm() < 1e-12);
        let raw = synthesize(&d, harmonic.coeffs());
        assert!(raw.values()[0].re > 7.0);
        let diag = error_term_diagnostics(&d, &alpha_d, &harmonic, 1000, 1.0).unwrap();
        assert!(diag.growth_exponent < -0.5);
        let raw_diag = series_diagnostics(&d, harmonic.coeffs(), 1.0);
        assert!(raw_diag.growth_exponent > 0.0 && !raw_diag.converged);
    }

    #[test]
    fn convergence_rule() {
        assert!(declare_converged(
            &[1.0; 9].iter().copied().chain([1e-9]).collect::<Vec<_>>(),
            1e-6
        ));
        assert!(!declare_converged(&[1.0; 10], 1e-6));
        assert!(!declare_converged(&[], 1.0));
        let quadratic: Vec<f64> = (0..50).map(|n| (n * n) as f64).collect();
        assert!((growth_exponent(&quadratic) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clean_and_noisy_streams() {
        let m = two_atom();
        let x = SpectralVector::from_real(&[2.0, 0.0]);
        let clean = InputStream::clean(&m, &x, 3).unwrap();
        assert_eq!(clean.provenance(), Provenance::Clean);
        assert!(clean.values().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
        let eps = CoefficientSeries::from_real(&[0.5, 0.25, 0.125, 0.0625]);
        let noisy = InputStream::noisy(&m, &x, &eps, 3).unwrap();
        assert!((noisy.get(2) - c(1.125, 0.0)).norm() < 1e-15);
        assert!(InputStream::noisy(&m, &x, &eps, 4).is_err());
        assert!(kaczmarz_run(&m, &clean, 4, false, None).is_err());
    }
}
