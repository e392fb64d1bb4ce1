//! The named experiments. Each turns a validated config into result tables
//! plus a JSON object of headline numbers for the summary file.

use kaczlab_core::noise::DEFAULT_R_GRID;
use kaczlab_core::relaxation::{extrapolate_to_zero, suggested_abel_depth, DEFAULT_OMEGA_GRID};
use kaczlab_core::truncation::recommended_cycles;
use kaczlab_core::{
    abel_sweep, augmented_run, classical_bound, cycle_operator_norm, eval_noise, frame_bound_check, g_reconstruction,
    kaczmarz_run, l2_norm, maximal_function, moore_penrose_lss, noise_coefficients, periodize, relaxed_run,
    series_reconstruction, truncated_noisy_run, truncation_tradeoff, AtomicMeasure, CoefficientSeries, InputStream,
    MomentSource, NoiseProfile, SpectralVector,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Table;

pub struct Outcome {
    pub tables: Vec<Table>,
    pub results: Value,
}

pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    pub run: fn(&ExperimentConfig) -> Result<Outcome, CliError>,
}

/// Alphabetical.
pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "abel-sweep",
        description: "Abel-summed reconstruction error over a grid of radii",
        run: abel_sweep_experiment,
    },
    Experiment {
        name: "alpha",
        description: "coefficients of 1 - b, the inverse of the Cauchy series",
        run: alpha,
    },
    Experiment {
        name: "compare-variants",
        description: "plain, auxiliary-sequence, Abel, relaxed and least-squares reconstructions side by side",
        run: compare_variants,
    },
    Experiment {
        name: "moments",
        description: "Fourier moments of the measure",
        run: moments,
    },
    Experiment {
        name: "noise-demo",
        description: "radial behaviour of a noise profile and of its error term at the atoms",
        run: noise_demo,
    },
    Experiment {
        name: "reconstruct",
        description: "Kaczmarz iteration on clean or noisy data, error per step",
        run: reconstruct,
    },
    Experiment {
        name: "truncate",
        description: "periodic truncated system: per-cycle error, cycle-operator and frame bounds",
        run: truncate,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

const DEFAULT_SERIES_DEPTH: usize = 16;
const DEFAULT_RUN_DEPTH: usize = 1_000;
const DEFAULT_ABEL_GRID: [f64; 6] = [0.5, 0.9, 0.95, 0.99, 0.995, 0.999];
const DEFAULT_TOL: f64 = 1e-12;
const DEFAULT_MAX_CYCLES: usize = 1_000_000;
const DEFAULT_DEGREE: usize = 2_000;

fn complex_rows(name: &str, values: &CoefficientSeries) -> Table {
    let mut t = Table::new(name, &["n", "re", "im"]);
    for (n, v) in values.coeffs().iter().enumerate() {
        t.push(vec![n.into(), v.re.into(), v.im.into()]);
    }
    t
}

fn moments(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let depth = cfg.parameters.depth.unwrap_or(DEFAULT_SERIES_DEPTH);
    let mu = cfg.measure.moments(depth + 1)?;
    Ok(Outcome {
        tables: vec![complex_rows("moments", &mu)],
        results: json!({ "depth": depth }),
    })
}

fn alpha(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let depth = cfg.parameters.depth.unwrap_or(DEFAULT_SERIES_DEPTH);
    let a = cfg.measure.alpha_coefficients(depth)?;
    let mu = cfg.measure.moments(depth + 1)?;
    let residual = (1..=depth)
        .map(|n| (0..=n).map(|j| a.coeff(j) * mu.coeff(n - j)).sum::<Complex64>().norm())
        .fold(0.0, f64::max);
    Ok(Outcome {
        tables: vec![complex_rows("alpha", &a)],
        results: json!({ "depth": depth, "max_convolution_residual": residual }),
    })
}

/// Noise coefficients `ε_0..ε_depth`, zero without a profile.
fn noise_series(
    profile: Option<&NoiseProfile>,
    src: &MomentSource,
    depth: usize,
) -> Result<CoefficientSeries, CliError> {
    match profile {
        Some(p) => Ok(noise_coefficients(p, src, depth)?),
        None => Ok(CoefficientSeries::zeros(depth + 1)),
    }
}

fn data_stream(
    m: &AtomicMeasure,
    x: &SpectralVector,
    profile: Option<&NoiseProfile>,
    depth: usize,
) -> Result<InputStream, CliError> {
    match profile {
        Some(p) => {
            let eps = noise_coefficients(p, &MomentSource::Atomic(m.clone()), depth)?;
            Ok(InputStream::noisy(m, x, &eps, depth)?)
        }
        None => Ok(InputStream::clean(m, x, depth)?),
    }
}

fn vector_json(v: &SpectralVector) -> Value {
    Value::from(v.values().iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>())
}

fn reconstruct(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let m = cfg.atomic()?;
    let x = cfg.truth(m)?;
    let profile = cfg.noise_profile()?;
    let depth = cfg.parameters.depth.unwrap_or(DEFAULT_RUN_DEPTH);
    let data = data_stream(m, &x, profile.as_ref(), depth)?;
    let report = kaczmarz_run(m, &data, depth, false, Some(&x))?;
    let a = cfg.measure.alpha_coefficients(depth)?;
    let series = series_reconstruction(m, &a, &data, depth)?;
    let mut t = Table::new("reconstruct", &["step", "error"]);
    for (n, e) in report.error_norms.iter().enumerate() {
        t.push(vec![n.into(), (*e).into()]);
    }
    Ok(Outcome {
        tables: vec![t],
        results: json!({
            "depth": depth,
            "final_error": report.final_error(),
            "interpolation_residual": report.bound_values["interpolation_residual"],
            "series_deviation": m.distance(&report.final_vector, &series)?,
            "final": vector_json(&report.final_vector),
            "truth": vector_json(&x),
        }),
    })
}

fn positive_radii(grid: &[f64]) -> Result<(), CliError> {
    if grid.iter().any(|&r| r <= 0.0) {
        return Err(CliError::Config("this experiment needs radii in (0, 1)".into()));
    }
    Ok(())
}

fn abel_sweep_experiment(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let m = cfg.atomic()?;
    let x = cfg.truth(m)?;
    let profile = cfg.noise_profile()?;
    let grid = cfg
        .parameters
        .r_grid
        .clone()
        .unwrap_or_else(|| DEFAULT_ABEL_GRID.to_vec());
    positive_radii(&grid)?;
    let tol = cfg.parameters.tol.unwrap_or(DEFAULT_TOL);
    let r_max = grid.last().copied().unwrap_or(0.5);
    let depth = cfg.parameters.depth.unwrap_or_else(|| suggested_abel_depth(r_max, tol));
    let data = data_stream(m, &x, profile.as_ref(), depth)?;
    let a = cfg.measure.alpha_coefficients(depth)?;
    let sweep = abel_sweep(m, &a, &data, &grid, tol, Some(&x))?;
    let mut t = Table::new("abel-sweep", &["r", "depth", "capped", "error"]);
    for (i, &r) in grid.iter().enumerate() {
        t.push(vec![
            r.into(),
            sweep.depths[i].into(),
            sweep.capped[i].into(),
            sweep.errors[i].into(),
        ]);
    }
    Ok(Outcome {
        tables: vec![t],
        results: json!({
            "depth": depth,
            "tol": tol,
            "errors": sweep.errors,
            "strictly_decreasing": sweep.strictly_decreasing(),
            "any_capped": sweep.capped.iter().any(|&c| c),
        }),
    })
}

fn truncate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let m = cfg.atomic()?;
    let x = cfg.truth(m)?;
    let profile = cfg.noise_profile()?;
    let n = cfg.parameters.period.unwrap_or(m.dim());
    let levels = cfg.parameters.levels.clone().unwrap_or_else(|| (1..=n).collect());
    let longest = levels.iter().copied().max().unwrap_or(n).max(n);
    let eps = noise_series(profile.as_ref(), &cfg.measure, longest - 1)?;
    let sys = periodize(m, n)?;
    let t_norm = cycle_operator_norm(&sys);
    let cycles = cfg.parameters.cycles.unwrap_or_else(|| recommended_cycles(t_norm));
    let e = &eps.coeffs()[..n];
    let report = truncated_noisy_run(&sys, &x, e, cycles)?;
    let check = frame_bound_check(&sys, &x, e)?;
    let bound = classical_bound(&sys, e)?;

    let mut per_cycle = Table::new(
        "truncate",
        &["cycle", "error_vs_projection", "classical_bound", "frame_rhs"],
    );
    for (i, err) in report.error_norms.iter().enumerate() {
        per_cycle.push(vec![(i + 1).into(), (*err).into(), bound.into(), check.rhs.into()]);
    }
    let mut tradeoff = Table::new(
        "truncate-tradeoff",
        &["n", "projection_gap", "in_span_error", "total_error", "frame_rhs"],
    );
    for row in truncation_tradeoff(m, &x, eps.coeffs(), &levels)? {
        tradeoff.push(vec![
            row.n.into(),
            row.projection_gap.into(),
            row.in_span_error.into(),
            row.total_error.into(),
            row.frame_rhs.into(),
        ]);
    }
    let limsup = report.bound_values["limsup"];
    Ok(Outcome {
        tables: vec![per_cycle, tradeoff],
        results: json!({
            "period": n,
            "cycles": cycles,
            "cycle_norm": t_norm,
            "limsup": limsup,
            "classical_bound": bound,
            "classical_bound_holds": limsup <= bound + 1e-8,
            "frame_lhs": check.lhs,
            "frame_rhs": check.rhs,
            "frame_bound_holds": check.holds(1e-8),
            "rank_warning": check.rank_warning,
        }),
    })
}

fn compare_variants(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let m = cfg.atomic()?;
    let x = cfg.truth(m)?;
    let profile = cfg.noise_profile()?;
    let p = &cfg.parameters;
    let depth = p.depth.unwrap_or(DEFAULT_RUN_DEPTH);
    let radii = p.r_grid.clone().unwrap_or_else(|| vec![0.9, 0.99]);
    positive_radii(&radii)?;
    let omegas = p.omega_grid.clone().unwrap_or_else(|| DEFAULT_OMEGA_GRID.to_vec());
    let period = p.period.unwrap_or(m.dim());
    let tol = p.tol.unwrap_or(DEFAULT_TOL);
    let max_cycles = p.max_cycles.unwrap_or(DEFAULT_MAX_CYCLES);

    let eps = noise_series(profile.as_ref(), &cfg.measure, depth.max(period))?;
    let data = InputStream::noisy(m, &x, &eps, depth)?;
    let a = cfg.measure.alpha_coefficients(depth)?;
    let err = |v: &SpectralVector| m.distance(&x, v);

    let mut t = Table::new("compare-variants", &["variant", "parameter", "error", "converged"]);
    let plain = kaczmarz_run(m, &data, depth, false, None)?.final_vector;
    t.push(vec![
        "kaczmarz".into(),
        (depth as f64).into(),
        err(&plain)?.into(),
        true.into(),
    ]);
    let g = g_reconstruction(m, &a, &data, depth)?;
    t.push(vec![
        "g_sequence".into(),
        (depth as f64).into(),
        err(&g)?.into(),
        true.into(),
    ]);
    for &r in &radii {
        let y = augmented_run(m, &data, r, depth)?;
        t.push(vec!["abel".into(), r.into(), err(&y)?.into(), true.into()]);
    }

    let sys = periodize(m, period)?;
    let c: Vec<Complex64> = sys.analysis(&x)?.iter().zip(eps.coeffs()).map(|(c, e)| c + e).collect();
    let mut limits = Vec::new();
    let mut all_converged = true;
    for &w in &omegas {
        let run = relaxed_run(m, sys.vectors(), &c, w, max_cycles, tol)?;
        all_converged &= run.converged;
        t.push(vec![
            "relaxed".into(),
            w.into(),
            err(&run.limit)?.into(),
            run.converged.into(),
        ]);
        limits.push(run.limit);
    }
    let lss = moore_penrose_lss(&sys, &c)?;
    let extrapolated = extrapolate_to_zero(&omegas, &limits);
    t.push(vec![
        "relaxed_extrapolated".into(),
        0.0.into(),
        err(&extrapolated)?.into(),
        all_converged.into(),
    ]);
    t.push(vec![
        "least_squares".into(),
        (period as f64).into(),
        err(&lss.solution)?.into(),
        true.into(),
    ]);

    Ok(Outcome {
        tables: vec![t],
        results: json!({
            "depth": depth,
            "period": period,
            "relaxed_converged": all_converged,
            "extrapolated_vs_least_squares": m.distance(&extrapolated, &lss.solution)?,
            "projection_gap": err(&sys.project(&x)?)?,
            "rank_warning": lss.rank_warning,
        }),
    })
}

fn noise_demo(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let m = cfg.atomic()?;
    let profile = cfg
        .noise_profile()?
        .ok_or_else(|| CliError::Config("noise-demo needs a noise profile".into()))?;
    let grid = cfg.parameters.r_grid.clone().unwrap_or_else(|| DEFAULT_R_GRID.to_vec());
    if !matches!(grid.last(), Some(&r) if r >= 0.999) {
        return Err(CliError::Config(
            "noise-demo needs an r_grid reaching at least 0.999".into(),
        ));
    }
    let degree = cfg.parameters.degree.unwrap_or(DEFAULT_DEGREE);
    let src = &cfg.measure;

    let mut t = Table::new("noise-demo", &["r", "noise_max", "error_term"]);
    for &r in &grid {
        let mut noise_max: f64 = 0.0;
        let mut energy = 0.0;
        for a in m.atoms() {
            let z = Complex64::from_polar(r, std::f64::consts::TAU * a.position);
            let e = eval_noise(&profile, src, z, degree)?;
            let b = src.inner_function(z, degree)?;
            noise_max = noise_max.max(e.norm());
            energy += a.weight * ((1.0 - b) * e).norm_sqr();
        }
        t.push(vec![r.into(), noise_max.into(), energy.sqrt().into()]);
    }
    let maximal = maximal_function(&profile, m, &grid, degree)?;
    Ok(Outcome {
        tables: vec![t],
        results: json!({
            "profile": profile.name(),
            "l2_norm": l2_norm(&profile, src, degree)?,
            "maximal": maximal.values,
            "unbounded": maximal.unbounded,
            "any_unbounded": maximal.any_unbounded(),
        }),
    })
}
