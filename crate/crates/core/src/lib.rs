//! Escape rates of Markov measures on subshifts of finite type through
//! holes made of finitely many cylinders.
//!
//! Three independent routes are provided: the spectral radius of the open
//! system, the smallest pole of the survivor generating function (with a
//! single-polynomial shortcut for one-word holes), and a dynamic-programming
//! oracle over survival probabilities.

pub mod algebra;
pub mod error;
pub mod genfun;
pub mod hole;
pub mod measure;
pub mod oracle;
pub mod scalar;
pub mod sft;
pub mod spectral;

pub use algebra::{Matrix, Polynomial, RationalFunction, RootInterval, SpectralRadius};
pub use error::{Error, Result};
pub use genfun::{
    compare_single_word_rates, correlation, escape_rate_genfun, escape_rate_poly, single_word_poly, survivor_genfun,
    verify_relate_identity, CorrelationData, GenFunSystem, IdentityCheck,
};
pub use hole::{equalize_lengths, HoleSpec, OpenAdjacency};
pub use measure::{parry_measure, ExactMeasure, FloatMeasure, HigherBlockMeasure, MarkovMeasure};
pub use oracle::{
    brute_force_avoidance, estimate_rate_oracle, survival_exact, AvoidanceRow, AvoidanceTable,
    OracleEstimate, SurvivalSeries,
};
pub use scalar::{format_rational, parse_rational, Rational, Scalar};
pub use sft::{HigherBlockShift, SftModel, Word};
pub use spectral::{
    escape_rate_parry, escape_rate_spectral, pressures, sandwich_bounds, theta, theta_upper_bound,
    Diagnostics, EscapeRateResult, Method, Pressures, Sandwich, Theta, ThetaBound, Tolerances,
};
