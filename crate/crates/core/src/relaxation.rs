//! Abel summation, the augmented Kaczmarz algorithm and relaxed Kaczmarz.
//!
//! The augmented iteration carries a second iterate
//! `y_n = y_{n-1} + rⁿ ⟨x_n - x_{n-1}, φ_n⟩ φ_n`, which reproduces the Abel
//! partial sum `Σ_{n≤N} rⁿ d_n φ_n` of the Kaczmarz series. The relaxed
//! iteration instead scales each step by `ω` and, over a periodic system,
//! converges cycle by cycle to a limit `y(ω)` that tends to the least-squares
//! solution as `ω → 0`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{phi_vector, SpectralVector};
use crate::kaczmarz::{kaczmarz_coefficients, synthesize_damped, InputStream};
use crate::report::format_float;
use crate::series::CoefficientSeries;
use crate::spectral::AtomicMeasure;

/// Hard cap on adaptive Abel depths.
pub const MAX_ABEL_DEPTH: usize = 1_000_000;

/// Default relaxation grid for the `ω → 0` extrapolation.
pub const DEFAULT_OMEGA_GRID: [f64; 4] = [0.08, 0.04, 0.02, 0.01];

/// Cycle iterates retained at the end of a relaxed run.
const RELAXED_TAIL: usize = 16;

fn check_open_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("r = {r} must lie in (0, 1)")))
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("ω = {omega} must lie in (0, 2)")))
    }
}

/// `Σ_{n≤N} rⁿ (Σ_{j≤n} α_{n-j} c_j) φ_n`.
pub fn abel_partial(
    m: &AtomicMeasure,
    alpha: &CoefficientSeries,
    c: &InputStream,
    r: f64,
    n: usize,
) -> Result<SpectralVector> {
    check_open_radius(r)?;
    let d = kaczmarz_coefficients(alpha, c.values(), n)?;
    Ok(synthesize_damped(m, &d, r))
}

/// Augmented iteration over an arbitrary vector supply `ψ(n)`.
fn augmented_with<F: Fn(usize) -> SpectralVector>(
    m: &AtomicMeasure,
    psi: F,
    c: impl Fn(usize) -> Complex64,
    r: f64,
    n: usize,
) -> SpectralVector {
    let mut x = SpectralVector::zeros(m.dim());
    let mut y = SpectralVector::zeros(m.dim());
    let mut rn = 1.0;
    for k in 0..=n {
        let p = psi(k);
        let step = c(k) - m.inner_unchecked(&x, &p);
        let before = x.clone();
        x.axpy(step, &p);
        let gain = m.inner_unchecked(&x.sub(&before), &p);
        y.axpy(gain * rn, &p);
        rn *= r;
    }
    y
}

/// Relaxed iteration with per-step parameter `ω(n)`.
fn relaxed_varying<F: Fn(usize) -> SpectralVector>(
    m: &AtomicMeasure,
    psi: F,
    c: impl Fn(usize) -> Complex64,
    omega: impl Fn(usize) -> f64,
    n: usize,
) -> SpectralVector {
    let mut x = SpectralVector::zeros(m.dim());
    for k in 0..=n {
        let p = psi(k);
        let step = c(k) - m.inner_unchecked(&x, &p);
        x.axpy(step * omega(k), &p);
    }
    x
}

/// `y_N` of the augmented Kaczmarz algorithm on `φ_n`.
pub fn augmented_run(m: &AtomicMeasure, c: &InputStream, r: f64, n: usize) -> Result<SpectralVector> {
    check_open_radius(r)?;
    c.require(n)?;
    Ok(augmented_with(m, |k| phi_vector(m, k), |k| c.get(k), r, n))
}

/// Errors of the Abel sums over a grid of radii.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelSweepResult {
    pub r_values: Vec<f64>,
    /// `‖x - Σ rⁿ d_n φ_n‖` per radius; empty without a ground truth.
    pub errors: Vec<f64>,
    /// Adaptive truncation `N(r)`.
    pub depths: Vec<usize>,
    /// The tail criterion was not met before the available depth ran out.
    pub capped: Vec<bool>,
    pub sums: Vec<SpectralVector>,
}

impl AbelSweepResult {
    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    /// Columns `r, depth, capped, error`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "depth", "capped", "error"])?;
        for (i, r) in self.r_values.iter().enumerate() {
            let err = self.errors.get(i).map_or_else(String::new, |&e| format_float(e));
            w.write_record([
                format_float(*r),
                self.depths[i].to_string(),
                self.capped[i].to_string(),
                err,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Tail window `⌈50/(1-r)⌉` of the adaptive depth rule.
pub fn abel_window(r: f64) -> usize {
    (50.0 / (1.0 - r)).ceil() as usize
}

/// Depth that comfortably satisfies the adaptive rule when `|d_n| ≤ e^{10}`:
/// `rⁿ ≤ e^{-n(1-r)}` falls below `tol (1-r) e^{-10}` by the first term, and
/// the window is added on top.
pub fn suggested_abel_depth(r: f64, tol: f64) -> usize {
    let decay = ((1.0 / (tol * (1.0 - r))).ln().max(0.0) + 10.0) / (1.0 - r);
    (decay.ceil() as usize + abel_window(r)).min(MAX_ABEL_DEPTH)
}

/// First `N` after which `|rⁿ d_n| < tol (1-r)` held for a full window, or
/// the cap. Returns `(N, capped)`.
pub fn adaptive_depth(d: &[Complex64], r: f64, tol: f64) -> (usize, bool) {
    let cap = MAX_ABEL_DEPTH.min(d.len().saturating_sub(1));
    let window = abel_window(r);
    let threshold = tol * (1.0 - r);
    let mut run = 0usize;
    let mut rn = 1.0;
    for (n, dn) in d.iter().enumerate().take(cap + 1) {
        if rn * dn.norm() < threshold {
            run += 1;
            if run >= window {
                return (n, false);
            }
        } else {
            run = 0;
        }
        rn *= r;
    }
    (cap, true)
}

/// Abel sums with adaptive depth over an increasing grid of radii.
///
/// `d = α * c` is formed once over the common length of `alpha` and `c`;
/// size both with [`suggested_abel_depth`] for the largest radius.
pub fn abel_sweep(
    m: &AtomicMeasure,
    alpha: &CoefficientSeries,
    c: &InputStream,
    r_grid: &[f64],
    tol: f64,
    truth: Option<&SpectralVector>,
) -> Result<AbelSweepResult> {
    if r_grid.is_empty() {
        return Err(Error::Domain("empty r grid".into()));
    }
    for &r in r_grid {
        check_open_radius(r)?;
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("r grid must be strictly increasing".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    if let Some(x) = truth {
        x.check_dim(m.dim())?;
    }
    let len = alpha.len().min(c.len());
    if len == 0 {
        return Err(Error::Depth {
            needed: 1,
            available: 0,
        });
    }
    let d = kaczmarz_coefficients(alpha, c.values(), len - 1)?;
    let per_r: Vec<(usize, bool, SpectralVector)> = r_grid
        .par_iter()
        .map(|&r| {
            let (depth, capped) = adaptive_depth(&d, r, tol);
            (depth, capped, synthesize_damped(m, &d[..=depth], r))
        })
        .collect();
    let errors = truth.map_or_else(Vec::new, |x| {
        per_r.iter().map(|(_, _, s)| m.norm_unchecked(&x.sub(s))).collect()
    });
    Ok(AbelSweepResult {
        r_values: r_grid.to_vec(),
        errors,
        depths: per_r.iter().map(|p| p.0).collect(),
        capped: per_r.iter().map(|p| p.1).collect(),
        sums: per_r.into_iter().map(|p| p.2).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxedResult {
    pub omega: f64,
    /// The last cycle iterates `y_m` (at most 16), oldest first.
    pub cycle_iterates: Vec<SpectralVector>,
    /// `‖y_m - y_{m-1}‖` for every cycle.
    pub increments: Vec<f64>,
    pub cycles: usize,
    pub converged: bool,
    /// Fitted per-cycle contraction of the increments over the second half
    /// of the run.
    pub ratio: f64,
    pub limit: SpectralVector,
}

impl RelaxedResult {
    pub fn require_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NonConvergence {
                cycles: self.cycles,
                last_increment: self.increments.last().copied().unwrap_or(f64::NAN),
            })
        }
    }
}

/// Geometric ratio from a log-linear fit of the later increments.
fn fitted_ratio(increments: &[f64]) -> f64 {
    let tail: Vec<(f64, f64)> = increments
        .iter()
        .enumerate()
        .skip(increments.len() / 2)
        .filter(|(_, &v)| v > 1e-300)
        .map(|(k, &v)| (k as f64, v.ln()))
        .collect();
    if tail.len() < 2 {
        return 0.0;
    }
    let count = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / count;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxy / sxx).exp()
}

fn check_periodic(m: &AtomicMeasure, vectors: &[SpectralVector], c: &[Complex64]) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::Range {
            what: "period",
            value: 0.0,
            expected: ">= 1",
        });
    }
    if c.len() != vectors.len() {
        return Err(Error::Dimension {
            expected: vectors.len(),
            got: c.len(),
        });
    }
    for v in vectors {
        v.check_dim(m.dim())?;
    }
    Ok(())
}

/// Relaxed Kaczmarz over the periodic system `vectors` with data `c`, from
/// `x_0 = 0`; `y_m` is the iterate after `m` full cycles.
///
/// Stops when `‖y_m - y_{m-1}‖ < tol` or after `max_cycles`; a run that hits
/// the cycle limit is returned with `converged = false`.
pub fn relaxed_run(
    m: &AtomicMeasure,
    vectors: &[SpectralVector],
    c: &[Complex64],
    omega: f64,
    max_cycles: usize,
    tol: f64,
) -> Result<RelaxedResult> {
    check_omega(omega)?;
    check_periodic(m, vectors, c)?;
    let mut y = SpectralVector::zeros(m.dim());
    let mut tail: Vec<SpectralVector> = Vec::with_capacity(RELAXED_TAIL);
    let mut increments = Vec::new();
    let mut converged = false;
    for _ in 0..max_cycles {
        let prev = y.clone();
        for (v, &cv) in vectors.iter().zip(c) {
            let step = cv - m.inner_unchecked(&y, v);
            y.axpy(step * omega, v);
        }
        let inc = m.norm_unchecked(&y.sub(&prev));
        increments.push(inc);
        if tail.len() == RELAXED_TAIL {
            tail.remove(0);
        }
        tail.push(y.clone());
        if inc < tol {
            converged = true;
            break;
        }
    }
    Ok(RelaxedResult {
        omega,
        cycle_iterates: tail,
        cycles: increments.len(),
        ratio: fitted_ratio(&increments),
        increments,
        converged,
        limit: y,
    })
}

/// `y(ω)` over a grid and its extrapolation to `ω = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxedLimit {
    pub omega_grid: Vec<f64>,
    pub values: Vec<SpectralVector>,
    pub cycles: Vec<usize>,
    /// `y(ω)` at the smallest grid point.
    pub at_smallest: SpectralVector,
    /// Two-point linear extrapolation from the two smallest grid points.
    pub linear: SpectralVector,
    /// Interpolating polynomial through every grid point, evaluated at 0.
    pub extrapolated: SpectralVector,
}

/// Value at `t = 0` of the polynomial through `(t_i, v_i)` (Lagrange form).
pub fn extrapolate_to_zero(ts: &[f64], values: &[SpectralVector]) -> SpectralVector {
    let dim = values.first().map_or(0, SpectralVector::dim);
    let mut out = SpectralVector::zeros(dim);
    for (i, (&ti, vi)) in ts.iter().zip(values).enumerate() {
        let weight: f64 = ts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &tj)| tj / (tj - ti))
            .product();
        out.axpy(Complex64::new(weight, 0.0), vi);
    }
    out
}

/// Runs `relaxed_run` for each `ω` (in parallel) and extrapolates to 0.
///
/// The grid must be strictly decreasing; a non-converged grid point is an
/// error.
pub fn relaxed_limit(
    m: &AtomicMeasure,
    vectors: &[SpectralVector],
    c: &[Complex64],
    omega_grid: &[f64],
    tol: f64,
    max_cycles: usize,
) -> Result<RelaxedLimit> {
    if omega_grid.is_empty() {
        return Err(Error::Domain("empty ω grid".into()));
    }
    for &w in omega_grid {
        check_omega(w)?;
    }
    if omega_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("ω grid must be strictly decreasing".into()));
    }
    check_periodic(m, vectors, c)?;
    let runs: Vec<RelaxedResult> = omega_grid
        .par_iter()
        .map(|&w| relaxed_run(m, vectors, c, w, max_cycles, tol))
        .collect::<Result<_>>()?;
    for run in &runs {
        run.require_converged()?;
    }
    let values: Vec<SpectralVector> = runs.iter().map(|r| r.limit.clone()).collect();
    let k = values.len();
    let linear = if k >= 2 {
        extrapolate_to_zero(&omega_grid[k - 2..], &values[k - 2..])
    } else {
        values[0].clone()
    };
    Ok(RelaxedLimit {
        omega_grid: omega_grid.to_vec(),
        cycles: runs.iter().map(|r| r.cycles).collect(),
        at_smallest: values[k - 1].clone(),
        linear,
        extrapolated: extrapolate_to_zero(omega_grid, &values),
        values,
    })
}

/// `‖y_N^{aug} - x_N^{rel}‖` where both recursions run over `ψ_n =
/// vectors[n mod p]` and the relaxed one uses `ω_n = rⁿ`.
///
/// `c` either covers `0..=N` or has exactly one value per vector, in which
/// case it is repeated with the period.
pub fn augmented_vs_relaxed(
    m: &AtomicMeasure,
    vectors: &[SpectralVector],
    c: &[Complex64],
    r: f64,
    n: usize,
) -> Result<f64> {
    check_open_radius(r)?;
    if vectors.is_empty() {
        return Err(Error::Range {
            what: "period",
            value: 0.0,
            expected: ">= 1",
        });
    }
    for v in vectors {
        v.check_dim(m.dim())?;
    }
    let p = vectors.len();
    if c.len() <= n && c.len() != p {
        return Err(Error::Depth {
            needed: n + 1,
            available: c.len(),
        });
    }
    let psi = |k: usize| vectors[k % p].clone();
    let data = |k: usize| if c.len() > n { c[k] } else { c[k % p] };
    let aug = augmented_with(m, psi, data, r, n);
    let rel = relaxed_varying(m, psi, data, |k| r.powi(k as i32), n);
    Ok(m.norm_unchecked(&aug.sub(&rel)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kaczmarz::kaczmarz_run;
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

    fn wobble(len: usize, seed: f64) -> Vec<Complex64> {
        (0..len)
            .map(|k| c((seed * (k as f64 + 1.0)).sin(), (seed * 0.7 * k as f64).cos()))
            .collect()
    }

    fn alpha(m: &AtomicMeasure, n: usize) -> CoefficientSeries {
        MomentSource::Atomic(m.clone()).alpha_coefficients(n).unwrap()
    }

    #[test]
    fn dirac_abel_closed_form() {
        // c_n = x + ρⁿ telescopes to x + (1-r)/(1-rρ).
        let m = AtomicMeasure::dirac();
        let (x, rho, r) = (0.75, 0.6f64, 0.9);
        let n = 600;
        let data = InputStream::raw((0..=n).map(|k| c(x + rho.powi(k as i32), 0.0)).collect());
        let s = abel_partial(&m, &alpha(&m, n), &data, r, n).unwrap();
        let expected = x + (1.0 - r) / (1.0 - r * rho);
        assert!((s.values()[0] - c(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn abel_small_radius_keeps_first_term() {
        let m = three_atom();
        let data = InputStream::raw(wobble(30, 0.3));
        let s = abel_partial(&m, &alpha(&m, 29), &data, 1e-12, 29).unwrap();
        let first = phi_vector(&m, 0).scale(data.get(0));
        assert!(m.distance(&s, &first).unwrap() < 1e-10);
        assert!(abel_partial(&m, &alpha(&m, 29), &data, 1.0, 29).is_err());
        assert!(abel_partial(&m, &alpha(&m, 29), &data, 0.0, 29).is_err());
    }

    #[test]
    fn two_atom_clean_abel_bias_closed_form() {
        // For x = (a, b) the clean Abel sum misses x by ½(1-r)|a-b| at each atom.
        let m = two_atom();
        let x = SpectralVector::new(vec![c(1.0, 0.5), c(-0.5, 0.0)]);
        let r = 0.99;
        let n = suggested_abel_depth(r, 1e-14);
        let data = InputStream::clean(&m, &x, n).unwrap();
        let s = abel_partial(&m, &alpha(&m, n), &data, r, n).unwrap();
        let gap = (x.values()[0] - x.values()[1]).norm();
        let err = m.distance(&s, &x).unwrap();
        assert!((err - 0.5 * (1.0 - r) * gap).abs() < 1e-10);
    }

    #[test]
    fn augmented_matches_abel() {
        for m in [two_atom(), three_atom()] {
            let data = InputStream::raw(wobble(51, 1.3));
            let a = augmented_run(&m, &data, 0.9, 50).unwrap();
            let b = abel_partial(&m, &alpha(&m, 50), &data, 0.9, 50).unwrap();
            assert!(m.distance(&a, &b).unwrap() < 1e-10);
        }
        let m = AtomicMeasure::dirac();
        let data = InputStream::raw(vec![c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0)]);
        let y = augmented_run(&m, &data, 0.5, 2).unwrap();
        assert!((y.values()[0] - c(1.0 + 0.5 * 2.0 - 0.25, 0.0)).norm() < 1e-15);
        let y0 = augmented_run(&m, &data, 0.5, 0).unwrap();
        assert_eq!(y0.values()[0], c(1.0, 0.0));
        assert!(augmented_run(&m, &data, 1.5, 2).is_err());
    }

    #[test]
    fn sweep_geometric_noise_checkpoints() {
        let m = two_atom();
        let x = SpectralVector::zeros(2);
        let n = suggested_abel_depth(0.99, 1e-13);
        let eps = CoefficientSeries::new((0..=n).map(|k| c(0.5f64.powi(k as i32), 0.0)).collect());
        let data = InputStream::noisy(&m, &x, &eps, n).unwrap();
        let res = abel_sweep(&m, &alpha(&m, n), &data, &[0.9, 0.99], 1e-13, Some(&x)).unwrap();
        let closed = |r: f64| {
            let rho = 0.5;
            (1.0 - r * r) * (0.5 / (1.0 - r * rho).powi(2) + 0.5 / (1.0 + r * rho).powi(2)).sqrt()
        };
        for (i, &r) in [0.9, 0.99].iter().enumerate() {
            assert!(
                (res.errors[i] - closed(r)).abs() < 1e-9,
                "r={r}: {} vs {}",
                res.errors[i],
                closed(r)
            );
            assert!(!res.capped[i]);
        }
        assert!((res.errors[0] - 0.261).abs() < 1e-3 && (res.errors[1] - 0.0294).abs() < 1e-3);
        assert!(res.strictly_decreasing());
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("r,depth,capped,error\n9.0000000000000002e-1,"));
    }

    #[test]
    fn sweep_adversary_tends_to_one() {
        let m = two_atom();
        let x = SpectralVector::zeros(2);
        let n = suggested_abel_depth(0.999, 1e-12);
        let eps = MomentSource::Atomic(m.clone()).moments(n + 1).unwrap();
        let data = InputStream::noisy(&m, &x, &eps, n).unwrap();
        let res = abel_sweep(&m, &alpha(&m, n), &data, &[0.9, 0.99, 0.999], 1e-12, Some(&x)).unwrap();
        for e in &res.errors {
            assert!((e - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sweep_validates_grid() {
        let m = two_atom();
        let data = InputStream::raw(wobble(10, 0.1));
        let a = alpha(&m, 9);
        assert!(abel_sweep(&m, &a, &data, &[0.9, 0.5], 1e-10, None).is_err());
        assert!(abel_sweep(&m, &a, &data, &[0.5, 1.0], 1e-10, None).is_err());
        let short = abel_sweep(&m, &a, &data, &[0.99], 1e-10, None).unwrap();
        assert!(short.capped[0] && short.depths[0] == 9 && short.errors.is_empty());
    }

    #[test]
    fn adaptive_depth_rule() {
        let d = vec![c(1.0, 0.0); 100_000];
        let (n, capped) = adaptive_depth(&d, 0.9, 1e-6);
        assert!(!capped);
        let window = abel_window(0.9);
        // The run starts at the first n with 0.9ⁿ < 1e-7.
        let start = (1e-7f64.ln() / 0.9f64.ln()).ceil() as usize;
        assert_eq!(n, start + window - 1);
        assert!(suggested_abel_depth(0.9, 1e-6) > n);
    }

    #[test]
    fn relaxed_orthonormal_one_cycle() {
        let m = two_atom();
        let vectors = vec![phi_vector(&m, 0), phi_vector(&m, 1)];
        let x = SpectralVector::new(vec![c(1.0, 2.0), c(-1.0, 0.5)]);
        let data: Vec<Complex64> = vectors.iter().map(|v| m.inner_unchecked(&x, v)).collect();
        let res = relaxed_run(&m, &vectors, &data, 1.0, 10, 1e-14).unwrap();
        assert!(m.distance(&res.cycle_iterates[0], &x).unwrap() < 1e-14);
        assert!(res.converged && res.cycles == 2);
        assert!(relaxed_run(&m, &vectors, &data, 2.0, 10, 1e-14).is_err());
    }

    #[test]
    fn relaxed_omega_one_matches_classic() {
        let m = three_atom();
        let vectors: Vec<_> = (0..3).map(|k| phi_vector(&m, k)).collect();
        let x = SpectralVector::new(vec![c(0.2, 0.0), c(1.0, -1.0), c(0.0, 0.3)]);
        let data: Vec<Complex64> = vectors.iter().map(|v| m.inner_unchecked(&x, v)).collect();
        let res = relaxed_run(&m, &vectors, &data, 1.0, 10_000, 1e-15).unwrap();
        let classic = kaczmarz_run(&m, &InputStream::clean(&m, &x, 200).unwrap(), 200, false, Some(&x)).unwrap();
        assert!(m.distance(&res.limit, &classic.final_vector).unwrap() < 1e-12);
        assert!(res.ratio < 1.0);
    }

    #[test]
    fn relaxed_single_vector() {
        let m = three_atom();
        let v = vec![phi_vector(&m, 0)];
        let data = vec![c(0.7, -0.1)];
        let lim = relaxed_limit(&m, &v, &data, &DEFAULT_OMEGA_GRID, 1e-14, 1_000_000).unwrap();
        let expected = v[0].scale(data[0]);
        for y in lim.values.iter().chain([&lim.extrapolated, &lim.linear]) {
            assert!(m.distance(y, &expected).unwrap() < 1e-10);
        }
    }

    #[test]
    fn relaxed_limit_consistent_is_exact() {
        let m = three_atom();
        let vectors: Vec<_> = (1..=3).map(|k| phi_vector(&m, k)).collect();
        let x = SpectralVector::new(vec![c(0.5, 0.5), c(-1.0, 0.0), c(0.25, 1.0)]);
        let data: Vec<Complex64> = vectors.iter().map(|v| m.inner_unchecked(&x, v)).collect();
        let lim = relaxed_limit(&m, &vectors, &data, &[0.5, 0.25], 1e-14, 1_000_000).unwrap();
        for y in lim.values.iter().chain([&lim.extrapolated]) {
            assert!(m.distance(y, &x).unwrap() < 1e-9);
        }
        assert!(relaxed_limit(&m, &vectors, &data, &[0.25, 0.5], 1e-14, 10).is_err());
        assert!(matches!(
            relaxed_limit(&m, &vectors, &data, &[0.001], 1e-14, 3),
            Err(Error::NonConvergence { cycles: 3, .. })
        ));
    }

    #[test]
    fn extrapolation_is_exact_for_polynomials() {
        let ts = [0.4, 0.2, 0.1];
        let vals: Vec<SpectralVector> = ts
            .iter()
            .map(|&t| SpectralVector::from_real(&[3.0 - 2.0 * t + 5.0 * t * t]))
            .collect();
        let v = extrapolate_to_zero(&ts, &vals);
        assert!((v.values()[0] - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn augmented_vs_relaxed_cases() {
        let m3 = three_atom();
        let v3: Vec<_> = (0..3).map(|k| phi_vector(&m3, k)).collect();
        let data = wobble(21, 0.9);
        assert!(augmented_vs_relaxed(&m3, &v3, &data, 0.8, 20).unwrap() > 1e-6);
        assert!(augmented_vs_relaxed(&m3, &v3, &data, 0.8, 0).unwrap() < 1e-15);

        // A genuinely orthogonal sequence: φ_0..φ_20 for the 21st roots of unity.
        let roots = AtomicMeasure::roots_of_unity(21).unwrap();
        let ortho: Vec<_> = (0..21).map(|k| phi_vector(&roots, k)).collect();
        assert!(augmented_vs_relaxed(&roots, &ortho, &data, 0.8, 20).unwrap() < 1e-10);
        assert!(augmented_vs_relaxed(&roots, &ortho, &data[..5], 0.8, 20).is_err());
    }
}
