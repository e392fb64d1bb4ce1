//! Kaczmarz reconstruction for stationary sequences with singular spectral
//! measures.

/// Library version, echoed in experiment summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod error;
pub mod hilbert;
pub mod kaczmarz;
mod linalg;
pub mod noise;
pub mod relaxation;
pub mod report;
pub mod series;
pub mod spectral;
pub mod testbed;
pub mod truncation;

pub use error::{Error, Result};
pub use hilbert::{
    frame_bounds, gram_frame, gram_inner, inner, phi_vector, project_span, FrameBounds, GramFrame, SpectralVector,
};
pub use kaczmarz::{
    auxiliary_sequence, error_term, g_error_term, g_reconstruction, kaczmarz_run, parseval_defect,
    series_reconstruction, InputStream, Provenance,
};
pub use noise::{
    eval_noise, hoelder_check, l2_norm, maximal_function, noise_coefficients, wold_decompose, MaximalEstimate,
    NoiseProfile, WoldDecomposition,
};
pub use relaxation::{
    abel_partial, abel_sweep, augmented_run, augmented_vs_relaxed, relaxed_limit, relaxed_run, AbelSweepResult,
    RelaxedLimit, RelaxedResult,
};
pub use report::ReconstructionReport;
pub use series::{convolve, CoefficientSeries};
pub use spectral::{AtomicMeasure, MomentSource};
pub use truncation::{
    classical_bound, cycle_operator_norm, frame_bound_check, moore_penrose_lss, periodize, truncated_noisy_run,
    truncation_tradeoff, FrameBoundCheck, LeastSquares, PeriodicSystem, TradeoffRow,
};
