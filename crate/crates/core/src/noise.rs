//! Noise sequences `ε_n`, their generating functions `ε(z)`, and the
//! boundary diagnostics used as hypotheses for the stability results.
//!
//! Kinds that involve `b` or `μ⁺` (model-space multiples, Wold synthesis,
//! the moment adversary) are evaluated against a [`MomentSource`] supplied
//! at call time.

use std::f64::consts::TAU;
use std::io::Read;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_disc, Error, Result};
use crate::hilbert::SpectralVector;
use crate::series::{convolve, CoefficientSeries};
use crate::spectral::{AtomicMeasure, MomentSource};

/// Largest radius the UNBOUNDED heuristic expects to see.
pub const R_MAX: f64 = 0.9999;

/// Default radial grid for boundary probes.
pub const DEFAULT_R_GRID: [f64; 8] = [0.0, 0.5, 0.9, 0.95, 0.99, 0.995, 0.999, R_MAX];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NoiseSpec", into = "NoiseSpec")]
pub enum NoiseProfile {
    /// `ε_n = c ρⁿ`
    Geometric {
        c: f64,
        rho: f64,
    },
    /// `ε_n = 1/(n+1)`
    Harmonic,
    /// `ε_n = ξ_n (n+1)^{-s}` with seeded standard complex Gaussians `ξ_n`.
    RandomL2 {
        seed: u64,
        s: f64,
    },
    Polynomial {
        coeffs: CoefficientSeries,
    },
    /// `ε = b h`
    ModelSpaceMultiple {
        h: CoefficientSeries,
    },
    /// `ε = μ⁺ Σ_{j<K} b^j f_j`
    WoldSynth {
        k: usize,
        f: Vec<CoefficientSeries>,
    },
    /// `ε_n = μ̂(n)`, for which `(1 - b) ε = 1`.
    MomentAdversary,
    Explicit {
        coeffs: CoefficientSeries,
    },
}

impl NoiseProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Geometric { c, rho } => {
                if !(*rho > 0.0 && *rho < 1.0) {
                    return Err(Error::Range {
                        what: "rho",
                        value: *rho,
                        expected: "0 < rho < 1",
                    });
                }
                if !c.is_finite() {
                    return Err(Error::Range {
                        what: "c",
                        value: *c,
                        expected: "finite",
                    });
                }
            }
            Self::RandomL2 { s, .. } if s.is_nan() || *s <= 0.5 => {
                return Err(Error::Range {
                    what: "decay exponent s",
                    value: *s,
                    expected: "s > 1/2",
                });
            }
            Self::WoldSynth { k, f } => {
                if *k == 0 {
                    return Err(Error::Range {
                        what: "K",
                        value: 0.0,
                        expected: ">= 1",
                    });
                }
                if f.len() != *k {
                    return Err(Error::Dimension {
                        expected: *k,
                        got: f.len(),
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Geometric { .. } => "geometric",
            Self::Harmonic => "harmonic",
            Self::RandomL2 { .. } => "random_l2",
            Self::Polynomial { .. } => "polynomial",
            Self::ModelSpaceMultiple { .. } => "model_space_multiple",
            Self::WoldSynth { .. } => "wold_synth",
            Self::MomentAdversary => "moment_adversary",
            Self::Explicit { .. } => "explicit",
        }
    }
}

fn standard_complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `Σ_{j<K} b^j f_j` truncated to `len` coefficients (Horner in `b`).
pub fn wold_synthesize(f: &[CoefficientSeries], b: &CoefficientSeries, len: usize) -> CoefficientSeries {
    let mut acc = CoefficientSeries::zeros(len);
    for fj in f.iter().rev() {
        acc = fj.resized(len).add(&b.mul_truncated(&acc, len));
    }
    acc.resized(len)
}

/// `ε_0..ε_depth`.
pub fn noise_coefficients(p: &NoiseProfile, src: &MomentSource, depth: usize) -> Result<CoefficientSeries> {
    p.validate()?;
    let len = depth + 1;
    let series = match p {
        NoiseProfile::Geometric { c, rho } => {
            CoefficientSeries::new((0..len).map(|n| Complex64::new(c * rho.powi(n as i32), 0.0)).collect())
        }
        NoiseProfile::Harmonic => {
            CoefficientSeries::new((0..len).map(|n| Complex64::new(1.0 / (n + 1) as f64, 0.0)).collect())
        }
        NoiseProfile::RandomL2 { seed, s } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            CoefficientSeries::new(
                (0..len)
                    .map(|n| standard_complex_gaussian(&mut rng) * ((n + 1) as f64).powf(-s))
                    .collect(),
            )
        }
        NoiseProfile::Polynomial { coeffs } | NoiseProfile::Explicit { coeffs } => coeffs.resized(len),
        NoiseProfile::ModelSpaceMultiple { h } => src.inner_coefficients(depth)?.mul_truncated(h, len),
        NoiseProfile::WoldSynth { f, .. } => {
            let b = src.inner_coefficients(depth)?;
            let sum = wold_synthesize(f, &b, len);
            src.moments(len)?.mul_truncated(&sum, len)
        }
        NoiseProfile::MomentAdversary => src.moments(len)?,
    };
    Ok(series)
}

/// `ε(z)`. Closed forms are used wherever the kind and source allow; only
/// `RandomL2` and truncated sources depend on `degree`.
pub fn eval_noise(p: &NoiseProfile, src: &MomentSource, z: Complex64, degree: usize) -> Result<Complex64> {
    check_disc(z)?;
    p.validate()?;
    let one = Complex64::new(1.0, 0.0);
    Ok(match p {
        NoiseProfile::Geometric { c, rho } => *c / (one - *rho * z),
        NoiseProfile::Harmonic => {
            if z.norm() < 1e-8 {
                // -ln(1-z)/z = 1 + z/2 + z²/3 + …
                one + z / 2.0 + z * z / 3.0
            } else {
                -(one - z).ln() / z
            }
        }
        NoiseProfile::RandomL2 { .. } => noise_coefficients(p, src, degree)?.eval(z),
        NoiseProfile::Polynomial { coeffs } | NoiseProfile::Explicit { coeffs } => coeffs.eval(z),
        NoiseProfile::ModelSpaceMultiple { h } => src.inner_function(z, degree)? * h.eval(z),
        NoiseProfile::WoldSynth { f, .. } => {
            let b = src.inner_function(z, degree)?;
            let sum = f
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, fj| acc * b + fj.eval(z));
            src.cauchy_transform(z, degree)? * sum
        }
        NoiseProfile::MomentAdversary => src.cauchy_transform(z, degree)?,
    })
}

/// Heuristic blow-up flag: the last three values increase and the last
/// exceeds ten times the third-to-last.
pub fn looks_unbounded(values: &[f64]) -> bool {
    match values {
        [.., a, b, c] => a < b && b < c && *c > 10.0 * a,
        _ => false,
    }
}

fn check_r_grid(r_grid: &[f64]) -> Result<()> {
    if let Some(&r) = r_grid.iter().find(|&&r| !(0.0..1.0).contains(&r)) {
        return Err(Error::Domain(format!("radius {r} must lie in [0, 1)")));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("r grid must be strictly increasing".into()));
    }
    if !matches!(r_grid.last(), Some(&r) if r >= 0.999) {
        return Err(Error::Domain("r grid must reach at least 0.999".into()));
    }
    Ok(())
}

/// `M_ε(x_k) = sup_r |ε(r e^{2πi x_k})|` estimated on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalEstimate {
    pub values: Vec<f64>,
    pub r_grid: Vec<f64>,
    /// Per-atom UNBOUNDED diagnostic (see [`looks_unbounded`]).
    pub unbounded: Vec<bool>,
}

impl MaximalEstimate {
    pub fn any_unbounded(&self) -> bool {
        self.unbounded.iter().any(|&u| u)
    }
}

/// `|ε(r e^{2πi x_k})|` for every grid radius (rows) and atom (columns).
fn radial_profile(p: &NoiseProfile, m: &AtomicMeasure, r_grid: &[f64], degree: usize) -> Result<Vec<Vec<f64>>> {
    let src = MomentSource::Atomic(m.clone());
    r_grid
        .iter()
        .map(|&r| {
            m.positions()
                .map(|x| Ok(eval_noise(p, &src, Complex64::from_polar(r, TAU * x), degree)?.norm()))
                .collect()
        })
        .collect()
}

pub fn maximal_function(p: &NoiseProfile, m: &AtomicMeasure, r_grid: &[f64], degree: usize) -> Result<MaximalEstimate> {
    check_r_grid(r_grid)?;
    let rows = radial_profile(p, m, r_grid, degree)?;
    let at_origin = eval_noise(p, &MomentSource::Atomic(m.clone()), Complex64::new(0.0, 0.0), degree)?.norm();
    let mut values = Vec::with_capacity(m.dim());
    let mut unbounded = Vec::with_capacity(m.dim());
    for k in 0..m.dim() {
        let column: Vec<f64> = rows.iter().map(|row| row[k]).collect();
        values.push(column.iter().copied().fold(at_origin, f64::max));
        unbounded.push(looks_unbounded(&column));
    }
    Ok(MaximalEstimate {
        values,
        r_grid: r_grid.to_vec(),
        unbounded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoelderEstimate {
    /// `max_r Σ_k w_k |ε(r e^{2πi x_k})|^{2q}`
    pub value: f64,
    pub per_r: Vec<f64>,
    pub unbounded: bool,
}

pub fn hoelder_check(
    p: &NoiseProfile,
    m: &AtomicMeasure,
    q: f64,
    r_grid: &[f64],
    degree: usize,
) -> Result<HoelderEstimate> {
    if q.is_nan() || q <= 1.0 {
        return Err(Error::Range {
            what: "q",
            value: q,
            expected: "q > 1",
        });
    }
    check_r_grid(r_grid)?;
    let per_r: Vec<f64> = radial_profile(p, m, r_grid, degree)?
        .iter()
        .map(|row| m.weights().zip(row).map(|(w, v)| w * v.powf(2.0 * q)).sum())
        .collect();
    Ok(HoelderEstimate {
        value: per_r.iter().copied().fold(0.0, f64::max),
        unbounded: looks_unbounded(&per_r),
        per_r,
    })
}

/// `s = Σ_{j<K} b^j f_j + b^K t` with every `f_j ∈ H² ⊖ bH²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WoldDecomposition {
    pub f: Vec<CoefficientSeries>,
    /// Coefficient-space distance from `s` to `Σ_{j<K} b^j f_j`.
    pub residual: f64,
}

/// `(T_b* s)_n = Σ_m conj(b_m) s_{n+m}`: the co-analytic Toeplitz operator,
/// the adjoint of multiplication by `b`.
fn toeplitz_adjoint(b: &[Complex64], s: &[Complex64]) -> Vec<Complex64> {
    (0..s.len())
        .map(|n| b.iter().zip(&s[n..]).map(|(bm, sv)| bm.conj() * sv).sum())
        .collect()
}

/// Wold decomposition relative to the inner function `b`, exact on the
/// first `degree + 1` coefficients when `s` is a polynomial of that degree.
///
/// Since multiplication by an inner `b` is an isometry, `I - T_b T_b*` is
/// the projection onto `H² ⊖ bH²`, so `f_j = (I - T_b T_b*) (T_b*)^j s`.
pub fn wold_decompose(
    s: &CoefficientSeries,
    b: &CoefficientSeries,
    k: usize,
    degree: usize,
) -> Result<WoldDecomposition> {
    if k == 0 {
        return Err(Error::Range {
            what: "K",
            value: 0.0,
            expected: ">= 1",
        });
    }
    if b.coeff(0).norm() > 1e-12 {
        return Err(Error::Domain(format!("b(0) = {} must vanish", b.coeff(0))));
    }
    let len = degree + 1;
    let b = b.resized(len);
    if b.l2_norm() == 0.0 {
        return Err(Error::Degenerate("b vanishes identically".into()));
    }
    let mut cur = s.resized(len);
    let mut f = Vec::with_capacity(k);
    for _ in 0..k {
        let shifted = CoefficientSeries::new(toeplitz_adjoint(b.coeffs(), cur.coeffs()));
        f.push(cur.sub(&b.mul_truncated(&shifted, len)));
        cur = shifted;
    }
    let residual = s.resized(len).sub(&wold_synthesize(&f, &b, len)).l2_norm();
    Ok(WoldDecomposition { f, residual })
}

/// `(Σ_{n≤depth} |ε_n|²)^{1/2}`, with the exact tail added for geometric
/// noise.
pub fn l2_norm(p: &NoiseProfile, src: &MomentSource, depth: usize) -> Result<f64> {
    let head = noise_coefficients(p, src, depth)?.l2_norm();
    Ok(match p {
        NoiseProfile::Geometric { c, rho } => {
            let tail = c * c * rho.powi(2 * (depth as i32 + 1)) / (1.0 - rho * rho);
            (head * head + tail).sqrt()
        }
        _ => head,
    })
}

/// Coefficients of `V_μ f = (Σ_k w_k f_k / (1 - z e^{-2πi x_k})) / μ⁺`,
/// an element of the model space `H² ⊖ bH²` with `‖V_μ f‖ = ‖f‖_{L²(μ)}`.
pub fn model_space_function(m: &AtomicMeasure, f: &SpectralVector, degree: usize) -> Result<CoefficientSeries> {
    f.check_dim(m.dim())?;
    let len = degree + 1;
    let numerator: Vec<Complex64> = (0..len)
        .map(|n| {
            m.atoms()
                .iter()
                .zip(f.values())
                .map(|(a, fk)| fk * Complex64::from_polar(a.weight, -TAU * (n as f64 * a.position).rem_euclid(1.0)))
                .sum()
        })
        .collect();
    let alpha = m.alpha_rational(degree);
    Ok(CoefficientSeries::new(convolve(alpha.coeffs(), &numerator, len)))
}

/// Wold components `f_j = V_μ F_j` for a [`NoiseProfile::WoldSynth`].
///
/// The resulting `ε` lies in `ℓ²` exactly when `Σ_j F_j = 0`: otherwise the
/// poles of `μ⁺` at the atoms are not cancelled.
pub fn wold_components(m: &AtomicMeasure, fs: &[SpectralVector], degree: usize) -> Result<Vec<CoefficientSeries>> {
    fs.iter().map(|f| model_space_function(m, f, degree)).collect()
}

/// Reads `index,re,im` rows (with header) into a coefficient list; missing
/// indices are zero.
pub fn read_coefficients_csv<R: Read>(input: R) -> Result<CoefficientSeries> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["index", "re", "im"] {
        return Err(Error::Parse(format!(
            "expected header index,re,im, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut entries: Vec<(usize, Complex64)> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| record.get(i).map(str::trim).unwrap_or("");
        let bad = |what: &str| Error::Parse(format!("row {}: bad {what}", line + 2));
        let index: usize = field(0).parse().map_err(|_| bad("index"))?;
        let re: f64 = field(1).parse().map_err(|_| bad("re"))?;
        let im: f64 = field(2).parse().map_err(|_| bad("im"))?;
        entries.push((index, Complex64::new(re, im)));
    }
    let len = entries.iter().map(|e| e.0 + 1).max().unwrap_or(0);
    let mut coeffs = vec![None; len];
    for (index, v) in entries {
        if coeffs[index].replace(v).is_some() {
            return Err(Error::Parse(format!("duplicate index {index}")));
        }
    }
    Ok(CoefficientSeries::new(
        coeffs.into_iter().map(Option::unwrap_or_default).collect(),
    ))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum NoiseSpec {
    Geometric {
        c: f64,
        rho: f64,
    },
    Harmonic {},
    #[serde(rename = "random_l2")]
    RandomL2 {
        seed: u64,
        #[serde(default = "default_decay")]
        s: f64,
    },
    Polynomial {
        coeffs: CoefficientSeries,
    },
    ModelSpaceMultiple {
        h: CoefficientSeries,
    },
    WoldSynth {
        k: usize,
        f: Vec<CoefficientSeries>,
    },
    MomentAdversary {},
    Explicit {
        coeffs: CoefficientSeries,
    },
}

fn default_decay() -> f64 {
    1.0
}

impl TryFrom<NoiseSpec> for NoiseProfile {
    type Error = Error;

    fn try_from(spec: NoiseSpec) -> Result<Self> {
        let p = match spec {
            NoiseSpec::Geometric { c, rho } => Self::Geometric { c, rho },
            NoiseSpec::Harmonic {} => Self::Harmonic,
            NoiseSpec::RandomL2 { seed, s } => Self::RandomL2 { seed, s },
            NoiseSpec::Polynomial { coeffs } => Self::Polynomial { coeffs },
            NoiseSpec::ModelSpaceMultiple { h } => Self::ModelSpaceMultiple { h },
            NoiseSpec::WoldSynth { k, f } => Self::WoldSynth { k, f },
            NoiseSpec::MomentAdversary {} => Self::MomentAdversary,
            NoiseSpec::Explicit { coeffs } => Self::Explicit { coeffs },
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<NoiseProfile> for NoiseSpec {
    fn from(p: NoiseProfile) -> Self {
        match p {
            NoiseProfile::Geometric { c, rho } => Self::Geometric { c, rho },
            NoiseProfile::Harmonic => Self::Harmonic {},
            NoiseProfile::RandomL2 { seed, s } => Self::RandomL2 { seed, s },
            NoiseProfile::Polynomial { coeffs } => Self::Polynomial { coeffs },
            NoiseProfile::ModelSpaceMultiple { h } => Self::ModelSpaceMultiple { h },
            NoiseProfile::WoldSynth { k, f } => Self::WoldSynth { k, f },
            NoiseProfile::MomentAdversary => Self::MomentAdversary {},
            NoiseProfile::Explicit { coeffs } => Self::Explicit { coeffs },
        }
    }
}
