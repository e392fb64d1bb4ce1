//! Finite, periodically repeated vector systems.
//!
//! Labels are 1-based here: a system of period `N` holds `φ₁..φ_N`, and the
//! cycle operator is `T = (I − P_N)⋯(I − P_1)`. `periodize` takes the
//! exponentials `φ₁..φ_N`, i.e. the 0-based exponentials shifted by one.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{frame_bounds, phi_vector, SpectralVector};
use crate::linalg::{column_matrix, from_standard, pinv_solve, span_basis, to_standard, RANK_RTOL};
use crate::report::{format_float, ReconstructionReport};
use crate::spectral::AtomicMeasure;

/// Allowed deviation of `‖φ_n‖` from 1.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Upper limit for `recommended_cycles` when `‖T‖` is close to 1.
pub const MAX_CYCLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSystem {
    measure: AtomicMeasure,
    vectors: Vec<SpectralVector>,
}

impl PeriodicSystem {
    pub fn new(measure: AtomicMeasure, vectors: Vec<SpectralVector>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Range {
                what: "period",
                value: 0.0,
                expected: ">= 1",
            });
        }
        for v in &vectors {
            v.check_dim(measure.dim())?;
            let norm = measure.norm_unchecked(v);
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::Domain(format!("system vector has norm {norm}, expected 1")));
            }
        }
        Ok(Self { measure, vectors })
    }

    pub fn period(&self) -> usize {
        self.vectors.len()
    }

    pub fn measure(&self) -> &AtomicMeasure {
        &self.measure
    }

    pub fn vectors(&self) -> &[SpectralVector] {
        &self.vectors
    }

    /// `φ_n` for any `n ≥ 1`, repeating with period `N`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn vector(&self, n: usize) -> &SpectralVector {
        assert!(n >= 1, "periodic systems are indexed from 1");
        &self.vectors[(n - 1) % self.vectors.len()]
    }

    /// Clean data `⟨x, φ_n⟩` for one period.
    pub fn analysis(&self, x: &SpectralVector) -> Result<Vec<Complex64>> {
        x.check_dim(self.measure.dim())?;
        Ok(self
            .vectors
            .iter()
            .map(|v| self.measure.inner_unchecked(x, v))
            .collect())
    }

    /// Orthogonal projection onto the span of the system.
    pub fn project(&self, x: &SpectralVector) -> Result<SpectralVector> {
        x.check_dim(self.measure.dim())?;
        let q = self.span();
        let xs = to_standard(&self.measure, x);
        Ok(from_standard(&self.measure, &(&q * (q.adjoint() * xs))))
    }

    pub fn rank(&self) -> usize {
        self.span().ncols()
    }

    fn span(&self) -> DMatrix<Complex64> {
        span_basis(&column_matrix(&self.measure, &self.vectors)).0
    }

    fn check_noise(&self, eps: &[Complex64]) -> Result<()> {
        if eps.len() != self.period() {
            return Err(Error::Dimension {
                expected: self.period(),
                got: eps.len(),
            });
        }
        Ok(())
    }
}

/// The exponentials `φ₁..φ_N` of `m` as a system of period `N`.
pub fn periodize(m: &AtomicMeasure, n: usize) -> Result<PeriodicSystem> {
    PeriodicSystem::new(m.clone(), (1..=n).map(|k| phi_vector(m, k)).collect())
}

/// `‖T‖` on the span of the system, `T = (I − P_N)⋯(I − P_1)`.
pub fn cycle_operator_norm(sys: &PeriodicSystem) -> f64 {
    let d = sys.measure.dim();
    let mut t = DMatrix::<Complex64>::identity(d, d);
    for v in &sys.vectors {
        let vs = to_standard(&sys.measure, v);
        let proj = vs.adjoint() * &t;
        t -= &vs * proj;
    }
    let q = sys.span();
    let restricted = q.adjoint() * t * &q;
    restricted.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Cycles after which the limsup is read off: `max(100, ⌈20/(1 − ‖T‖)⌉)`.
pub fn recommended_cycles(t_norm: f64) -> usize {
    if t_norm >= 1.0 {
        return MAX_CYCLES;
    }
    let m = (20.0 / (1.0 - t_norm)).ceil();
    if m >= MAX_CYCLES as f64 {
        MAX_CYCLES
    } else {
        (m as usize).max(100)
    }
}

/// Limit bound for the periodic noisy iteration:
/// `(|ε_N| + Σ_{j<N} ‖(I − P_N)⋯(I − P_{j+1}) φ_j‖ |ε_j|) / (1 − ‖T‖)`.
///
/// Infinite when the system does not contract on its span.
pub fn classical_bound(sys: &PeriodicSystem, eps: &[Complex64]) -> Result<f64> {
    sys.check_noise(eps)?;
    if eps.iter().all(|e| e.norm() == 0.0) {
        return Ok(0.0);
    }
    let t_norm = cycle_operator_norm(sys);
    if t_norm >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let cols: Vec<DVector<Complex64>> = sys.vectors.iter().map(|v| to_standard(&sys.measure, v)).collect();
    let mut sum = 0.0;
    for (j, e) in eps.iter().enumerate() {
        let mut w = cols[j].clone();
        for v in &cols[j + 1..] {
            let c = v.dotc(&w);
            w -= v * c;
        }
        sum += w.norm() * e.norm();
    }
    Ok(sum / (1.0 - t_norm))
}

/// Runs `cycles` periods of the noisy update from `x̃_0 = 0` with data
/// `⟨x, φ_n⟩ + ε_n`.
///
/// `error_norms[m-1]` is `‖𝕡x − x̃_{mN}‖`. Bounds: `classical_bound`,
/// `frame_rhs`, `cycle_norm`, `projection_gap` (`‖x − 𝕡x‖`) and `limsup`,
/// the largest error over the last `⌈m/5⌉` cycles.
pub fn truncated_noisy_run(
    sys: &PeriodicSystem,
    x: &SpectralVector,
    eps: &[Complex64],
    cycles: usize,
) -> Result<ReconstructionReport> {
    sys.check_noise(eps)?;
    if cycles == 0 {
        return Err(Error::Range {
            what: "cycles",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let m = &sys.measure;
    let data: Vec<Complex64> = sys.analysis(x)?.iter().zip(eps).map(|(c, e)| c + e).collect();
    let target = sys.project(x)?;
    let mut xt = SpectralVector::zeros(m.dim());
    let mut errors = Vec::with_capacity(cycles);
    for _ in 0..cycles {
        for (v, &c) in sys.vectors.iter().zip(&data) {
            let step = c - m.inner_unchecked(&xt, v);
            xt.axpy(step, v);
        }
        errors.push(m.norm_unchecked(&target.sub(&xt)));
    }
    let tail = cycles.div_ceil(5);
    let limsup = errors[cycles - tail..].iter().copied().fold(0.0, f64::max);
    let frame_rhs = frame_rhs(sys, eps)?;
    let mut report = ReconstructionReport::new(xt)
        .with_bound("classical_bound", classical_bound(sys, eps)?)
        .with_bound("frame_rhs", frame_rhs)
        .with_bound("cycle_norm", cycle_operator_norm(sys))
        .with_bound("projection_gap", m.norm_unchecked(&x.sub(&target)))
        .with_bound("limsup", limsup)
        .with_meta("period", sys.period())
        .with_meta("cycles", cycles)
        .with_meta("atoms", m.dim());
    report.error_norms = errors;
    Ok(report)
}

/// Per-cycle CSV for a `truncated_noisy_run` report.
pub fn write_cycle_csv<W: Write>(report: &ReconstructionReport, out: W) -> csv::Result<()> {
    let bound = |name: &str| report.bound_values.get(name).copied().unwrap_or(f64::NAN);
    let classical = format_float(bound("classical_bound"));
    let frame = format_float(bound("frame_rhs"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cycle", "error_vs_projection", "classical_bound", "frame_rhs"])?;
    for (i, e) in report.error_norms.iter().enumerate() {
        w.write_record([(i + 1).to_string(), format_float(*e), classical.clone(), frame.clone()])?;
    }
    w.flush()?;
    Ok(())
}

/// Minimum-norm least-squares solution of `⟨z, φ_n⟩ = c_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeastSquares {
    pub solution: SpectralVector,
    /// Singular values of the analysis map, largest first.
    pub singular_values: Vec<f64>,
    /// Set when the smallest singular value is below the relative cutoff;
    /// the minimum-norm solution is still returned.
    pub rank_warning: bool,
}

pub fn moore_penrose_lss(sys: &PeriodicSystem, c: &[Complex64]) -> Result<LeastSquares> {
    sys.check_noise(c)?;
    let analysis = column_matrix(&sys.measure, &sys.vectors).adjoint();
    let rhs = DVector::from_column_slice(c);
    let (z, sigmas) = pinv_solve(&analysis, &rhs);
    let hi = sigmas.first().copied().unwrap_or(0.0);
    let lo = sigmas.last().copied().unwrap_or(0.0);
    Ok(LeastSquares {
        solution: from_standard(&sys.measure, &z),
        rank_warning: lo < RANK_RTOL * hi,
        singular_values: sigmas,
    })
}

fn frame_rhs(sys: &PeriodicSystem, eps: &[Complex64]) -> Result<f64> {
    let energy: f64 = eps.iter().map(|e| e.norm_sqr()).sum();
    if energy == 0.0 {
        return Ok(0.0);
    }
    let a = frame_bounds(&sys.measure, &sys.vectors)?.lower;
    Ok(energy / a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameBoundCheck {
    /// `‖𝕡x − z‖²` for the least-squares solution `z` of the noisy data.
    pub lhs: f64,
    /// `Σ|ε_n|² / A_N`.
    pub rhs: f64,
    pub rank_warning: bool,
}

impl FrameBoundCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

pub fn frame_bound_check(sys: &PeriodicSystem, x: &SpectralVector, eps: &[Complex64]) -> Result<FrameBoundCheck> {
    sys.check_noise(eps)?;
    let data: Vec<Complex64> = sys.analysis(x)?.iter().zip(eps).map(|(c, e)| c + e).collect();
    let lss = moore_penrose_lss(sys, &data)?;
    let diff = sys.project(x)?.sub(&lss.solution);
    let lhs = sys.measure.norm_unchecked(&diff).powi(2);
    Ok(FrameBoundCheck {
        lhs,
        rhs: frame_rhs(sys, eps)?,
        rank_warning: lss.rank_warning,
    })
}

/// Split of the least-squares error at one truncation level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub n: usize,
    /// `‖x − 𝕡_N x‖`.
    pub projection_gap: f64,
    /// `‖𝕡_N x − z^{(N)}‖`.
    pub in_span_error: f64,
    /// `‖x − z^{(N)}‖`.
    pub total_error: f64,
    pub frame_rhs: f64,
}

/// Least-squares reconstruction from `φ₁..φ_N` with noise `eps[..N]` for
/// each `N` in `levels`.
pub fn truncation_tradeoff(
    m: &AtomicMeasure,
    x: &SpectralVector,
    eps: &[Complex64],
    levels: &[usize],
) -> Result<Vec<TradeoffRow>> {
    x.check_dim(m.dim())?;
    levels
        .iter()
        .map(|&n| {
            if n > eps.len() {
                return Err(Error::Depth {
                    needed: n,
                    available: eps.len(),
                });
            }
            let sys = periodize(m, n)?;
            let e = &eps[..n];
            let data: Vec<Complex64> = sys.analysis(x)?.iter().zip(e).map(|(c, e)| c + e).collect();
            let z = moore_penrose_lss(&sys, &data)?.solution;
            let p = sys.project(x)?;
            Ok(TradeoffRow {
                n,
                projection_gap: m.norm_unchecked(&x.sub(&p)),
                in_span_error: m.norm_unchecked(&p.sub(&z)),
                total_error: m.norm_unchecked(&x.sub(&z)),
                frame_rhs: frame_rhs(&sys, e)?,
            })
        })
        .collect()
}
