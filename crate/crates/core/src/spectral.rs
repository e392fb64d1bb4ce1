//! Spectral measures on the circle and their analytic companions.
//!
//! A stationary sequence of unit vectors is realized by the exponentials
//! `e^{2πinx}` in `L²(μ)`. The objects on the disc that govern the Kaczmarz
//! reconstruction are all derived from the Fourier moments `μ̂(n)`:
//!
//! * the Cauchy transform `μ⁺(z) = Σ μ̂(n) zⁿ`,
//! * the inner function `b = 1 - 1/μ⁺`,
//! * the coefficients `α_n` of `1 - b`, i.e. the power-series inverse of `μ⁺`.
//!
//! Atomic measures get closed forms: `μ⁺ = P/Q` is rational with
//! `Q(z) = Π_k (1 - z e^{-2πi x_k})`, so `α` is produced by a linear
//! recurrence of order `d` instead of the quadratic moment recursion.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_disc, Error, Result};
use crate::hilbert::SpectralVector;
use crate::series::CoefficientSeries;

/// Tolerance on `Σ w_k = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Cantor product factors with argument below this are dropped.
const CANTOR_ARG_CUTOFF: f64 = 1e-12;

/// Slack allowed on `|μ̂(n)| ≤ 1` for user-supplied moment lists.
const EXPLICIT_MOMENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

/// Finitely supported probability measure on `[0, 1)`.
///
/// Atoms are stored with strictly increasing positions.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    /// Validates `(position, weight)` pairs. Weights are never renormalized.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Range {
                what: "atom count",
                value: 0.0,
                expected: "at least one atom",
            });
        }
        let mut atoms = Vec::with_capacity(pairs.len());
        for &(position, weight) in pairs {
            if !(0.0..1.0).contains(&position) {
                return Err(Error::Range {
                    what: "atom position",
                    value: position,
                    expected: "[0, 1)",
                });
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::Range {
                    what: "atom weight",
                    value: weight,
                    expected: "> 0",
                });
            }
            atoms.push(Atom { position, weight });
        }
        atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
        if let Some(w) = atoms.windows(2).find(|w| w[0].position == w[1].position) {
            return Err(Error::DuplicateAtom {
                position: w[0].position,
            });
        }
        let sum: f64 = atoms.iter().map(|a| a.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum { sum });
        }
        Ok(Self { atoms })
    }

    /// Dirac mass at `x = 0`.
    pub fn dirac() -> Self {
        Self {
            atoms: vec![Atom {
                position: 0.0,
                weight: 1.0,
            }],
        }
    }

    /// Uniform measure on the `n`-th roots of unity `{k/n}`.
    pub fn roots_of_unity(n: usize) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = (0..n).map(|k| (k as f64 / n as f64, 1.0 / n as f64)).collect();
        Self::new(&pairs)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Number of atoms, which is the dimension of `L²(μ)`.
    pub fn dim(&self) -> usize {
        self.atoms.len()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.position)
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.weight)
    }

    /// `μ̂(n) = Σ_k w_k e^{-2πi n x_k}` for any integer `n`.
    pub fn moment(&self, n: i64) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| {
                // Reduce n·x mod 1 before scaling to keep large n accurate.
                let phase = (n as f64 * a.position).rem_euclid(1.0);
                Complex64::from_polar(a.weight, -TAU * phase)
            })
            .sum()
    }

    /// Closed form `μ⁺(z) = Σ_k w_k / (1 - z e^{-2πi x_k})`.
    pub fn cauchy_closed_form(&self, z: Complex64) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| a.weight / (1.0 - z * Complex64::from_polar(1.0, -TAU * a.position)))
            .sum()
    }

    /// Numerator and denominator of `μ⁺ = P/Q` as polynomial coefficients:
    /// `Q = Π_k (1 - ζ_k z)` (degree `d`), `P = Σ_k w_k Π_{l≠k} (1 - ζ_l z)`
    /// (degree `< d`), with `ζ_k = e^{-2πi x_k}`.
    pub fn rational_cauchy(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let zetas: Vec<Complex64> = self
            .atoms
            .iter()
            .map(|a| Complex64::from_polar(1.0, -TAU * a.position))
            .collect();
        let product = |skip: Option<usize>| {
            let mut poly = vec![Complex64::new(1.0, 0.0)];
            for (l, &zeta) in zetas.iter().enumerate() {
                if Some(l) == skip {
                    continue;
                }
                let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
                for (i, &c) in poly.iter().enumerate() {
                    next[i] += c;
                    next[i + 1] -= c * zeta;
                }
                poly = next;
            }
            poly
        };
        let denominator = product(None);
        let mut numerator = vec![Complex64::new(0.0, 0.0); zetas.len()];
        for (k, atom) in self.atoms.iter().enumerate() {
            for (i, c) in product(Some(k)).into_iter().enumerate() {
                numerator[i] += atom.weight * c;
            }
        }
        (numerator, denominator)
    }

    /// `α_0..α_n` as the series of `Q/P`, by the order-`d` recurrence
    /// `P_0 α_n = Q_n - Σ_{i≥1} P_i α_{n-i}`. `P` has no zeros in the closed
    /// disc (`Re μ⁺ > 1/2` there), so the recurrence is stable.
    pub fn alpha_rational(&self, n: usize) -> CoefficientSeries {
        let (p, q) = self.rational_cauchy();
        let mut alpha = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = q.get(k).copied().unwrap_or_default();
            for i in 1..p.len().min(k + 1) {
                acc -= p[i] * alpha[k - i];
            }
            alpha.push(acc / p[0]);
        }
        CoefficientSeries::new(alpha)
    }
}

/// Supplier of Fourier moments `μ̂(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MomentSourceSpec", into = "MomentSourceSpec")]
pub enum MomentSource {
    Atomic(AtomicMeasure),
    Lebesgue,
    /// Middle-thirds Cantor measure on `[0, 1]`.
    CantorMiddleThirds,
    /// `μ̂(0), μ̂(1), …` as given; validated on construction.
    ExplicitList(Vec<Complex64>),
}

impl MomentSource {
    pub fn explicit(values: Vec<Complex64>) -> Result<Self> {
        let Some(first) = values.first() else {
            return Err(Error::Moments("empty moment list".into()));
        };
        if (first - Complex64::new(1.0, 0.0)).norm() > WEIGHT_SUM_TOL {
            return Err(Error::Moments(format!("μ̂(0) = {first}, expected 1")));
        }
        if let Some((n, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.norm() > 1.0 + EXPLICIT_MOMENT_SLACK)
        {
            return Err(Error::Moments(format!("|μ̂({n})| = {} exceeds 1", v.norm())));
        }
        Ok(Self::ExplicitList(values))
    }

    pub fn as_atomic(&self) -> Option<&AtomicMeasure> {
        match self {
            Self::Atomic(m) => Some(m),
            _ => None,
        }
    }

    /// `μ̂(n)` for `n ≥ 0`.
    pub fn fourier_moment(&self, n: usize) -> Result<Complex64> {
        match self {
            Self::Atomic(m) => Ok(m.moment(n as i64)),
            Self::Lebesgue => Ok(if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }),
            Self::CantorMiddleThirds => Ok(Complex64::new(cantor_moment(n), 0.0)),
            Self::ExplicitList(values) => values.get(n).copied().ok_or(Error::Depth {
                needed: n + 1,
                available: values.len(),
            }),
        }
    }

    /// `μ̂(n)` for any integer, using `μ̂(-n) = conj μ̂(n)`.
    pub fn moment_signed(&self, n: i64) -> Result<Complex64> {
        let m = self.fourier_moment(n.unsigned_abs() as usize)?;
        Ok(if n < 0 { m.conj() } else { m })
    }

    /// `μ̂(0..len)` as the coefficient series of `μ⁺`.
    pub fn moments(&self, len: usize) -> Result<CoefficientSeries> {
        (0..len)
            .map(|n| self.fourier_moment(n))
            .collect::<Result<Vec<_>>>()
            .map(CoefficientSeries::new)
    }

    /// `α_0..α_n`, the coefficients of `1 - b = 1/μ⁺`.
    ///
    /// Atomic measures use the rational recurrence; everything else runs the
    /// moment recursion `α_n = -Σ_{j<n} α_j μ̂(n-j)`.
    pub fn alpha_coefficients(&self, n: usize) -> Result<CoefficientSeries> {
        match self {
            Self::Atomic(m) => Ok(m.alpha_rational(n)),
            Self::Lebesgue => Ok(CoefficientSeries::one(n + 1)),
            _ => Ok(alpha_by_moment_recursion(&self.moments(n + 1)?, n)),
        }
    }

    /// Coefficients `b_0..b_n` of the inner function, `b = -Σ_{n≥1} α_n zⁿ`.
    pub fn inner_coefficients(&self, n: usize) -> Result<CoefficientSeries> {
        let alpha = self.alpha_coefficients(n)?;
        let mut b = -&alpha;
        b = b.resized(n + 1);
        let mut coeffs = b.into_vec();
        coeffs[0] = Complex64::new(0.0, 0.0);
        Ok(CoefficientSeries::new(coeffs))
    }

    /// `μ⁺(z)`; exact for atomic and Lebesgue sources, otherwise the series
    /// truncated after `degree`.
    pub fn cauchy_transform(&self, z: Complex64, degree: usize) -> Result<Complex64> {
        check_disc(z)?;
        match self {
            Self::Atomic(m) => Ok(m.cauchy_closed_form(z)),
            Self::Lebesgue => Ok(Complex64::new(1.0, 0.0)),
            _ => Ok(self.moments(degree + 1)?.eval(z)),
        }
    }

    /// `b(z) = 1 - 1/μ⁺(z)`. `degree` only matters for truncated sources.
    pub fn inner_function(&self, z: Complex64, degree: usize) -> Result<Complex64> {
        let mu_plus = self.cauchy_transform(z, degree)?;
        if mu_plus.norm() < 1e-300 {
            return Err(Error::Numerical(format!("μ⁺({z}) vanishes")));
        }
        Ok(1.0 - 1.0 / mu_plus)
    }
}

/// `(-1)ⁿ Π_{k≥1} cos(2πn 3^{-k})`, truncated once the argument drops
/// below 1e-12.
pub fn cantor_moment(n: usize) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut product = 1.0;
    let mut arg = TAU * n as f64 / 3.0;
    while arg >= CANTOR_ARG_CUTOFF {
        product *= arg.cos();
        arg /= 3.0;
    }
    sign * product
}

/// Power-series inversion of `μ⁺`: `α_0 = 1/μ̂(0)`,
/// `α_n = -Σ_{j<n} α_j μ̂(n-j) / μ̂(0)`.
pub fn alpha_by_moment_recursion(moments: &CoefficientSeries, n: usize) -> CoefficientSeries {
    let m0 = moments.coeff(0);
    let mut alpha: Vec<Complex64> = Vec::with_capacity(n + 1);
    alpha.push(1.0 / m0);
    for k in 1..=n {
        let acc: Complex64 = (0..k).map(|j| alpha[j] * moments.coeff(k - j)).sum();
        alpha.push(-acc / m0);
    }
    CoefficientSeries::new(alpha)
}

/// `|Re((1+b)/(1-b)) - Σ_k w_k (1-|z|²)/|e^{2πix_k} - z|²|`.
pub fn herglotz_residual(m: &AtomicMeasure, z: Complex64) -> Result<f64> {
    check_disc(z)?;
    // (1 + b)/(1 - b) = 2μ⁺ - 1
    let lhs = (2.0 * m.cauchy_closed_form(z) - 1.0).re;
    let poisson: f64 = m
        .atoms()
        .iter()
        .map(|a| a.weight * (1.0 - z.norm_sqr()) / (Complex64::from_polar(1.0, TAU * a.position) - z).norm_sqr())
        .sum();
    Ok((lhs - poisson).abs())
}

/// `V_μ f(z) = (Σ_k w_k f_k / (1 - z e^{-2πi x_k})) / μ⁺(z)`.
pub fn normalized_cauchy_transform(m: &AtomicMeasure, f: &SpectralVector, z: Complex64) -> Result<Complex64> {
    check_disc(z)?;
    f.check_dim(m.dim())?;
    let numerator: Complex64 = m
        .atoms()
        .iter()
        .zip(f.values())
        .map(|(a, &fk)| a.weight * fk / (1.0 - z * Complex64::from_polar(1.0, -TAU * a.position)))
        .sum();
    Ok(numerator / m.cauchy_closed_form(z))
}

/// Wire form of a [`MomentSource`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum MomentSourceSpec {
    Atomic { atoms: Vec<(f64, f64)> },
    Lebesgue {},
    Cantor {},
    Moments { values: Vec<Complex64> },
}

impl TryFrom<MomentSourceSpec> for MomentSource {
    type Error = Error;

    fn try_from(spec: MomentSourceSpec) -> Result<Self> {
        match spec {
            MomentSourceSpec::Atomic { atoms } => Ok(Self::Atomic(AtomicMeasure::new(&atoms)?)),
            MomentSourceSpec::Lebesgue {} => Ok(Self::Lebesgue),
            MomentSourceSpec::Cantor {} => Ok(Self::CantorMiddleThirds),
            MomentSourceSpec::Moments { values } => Self::explicit(values),
        }
    }
}

impl From<MomentSource> for MomentSourceSpec {
    fn from(src: MomentSource) -> Self {
        match src {
            MomentSource::Atomic(m) => MomentSourceSpec::Atomic {
                atoms: m.atoms.iter().map(|a| (a.position, a.weight)).collect(),
            },
            MomentSource::Lebesgue => MomentSourceSpec::Lebesgue {},
            MomentSource::CantorMiddleThirds => MomentSourceSpec::Cantor {},
            MomentSource::ExplicitList(values) => MomentSourceSpec::Moments { values },
        }
    }
}

impl From<AtomicMeasure> for MomentSource {
    fn from(m: AtomicMeasure) -> Self {
        Self::Atomic(m)
    }
}
