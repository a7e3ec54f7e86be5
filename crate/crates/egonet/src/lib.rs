//! Analysis of weighted egocentric networks and contact-volume-dependent
//! spreading.
//!
//! The crate has three layers:
//!
//! * [`ego`] — the dyad data model: egos, rank-ordered alters with contact
//!   volumes, optionally-missing alter degrees, CSV ingestion and validation.
//! * [`paradox`], [`testing`], [`hub`] — friendship-paradox prevalence and
//!   per-rank degree statistics, Zipf rank-volume fitting, Wilcoxon/Spearman
//!   tests, and the hub-alter permutation null model.
//! * [`graph`], [`synth`], [`sim`] — configuration-model graphs, synthetic
//!   dyad datasets, and a synchronous SI simulator with rank-dependent
//!   transmission.
//!
//! Real-valued computations are generic over the scalar type via
//! [`num::Real`] (any `num_traits::Float`, in practice `f32` or `f64`).
//! The aliases at the crate root fix `f64`, which is what the CLI and most
//! callers want.
//!
//! Every randomized operation takes an explicit seed and derives independent
//! ChaCha8 streams from it, so results are reproducible bit-for-bit and do
//! not depend on how replicate or permutation work is scheduled.

pub mod ego;
mod error;
pub mod graph;
pub mod hub;
pub mod num;
pub mod paradox;
pub mod sim;
pub mod synth;
pub mod testing;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// f64-typed aliases for the generic result types.
pub type TestResult = testing::TestResult<f64>;
pub type RankSummary = paradox::RankSummary<f64>;
pub type DecileCurve = paradox::DecileCurve<f64>;
pub type ZipfFit = paradox::ZipfFit<f64>;
pub type Rank1Comparison = paradox::Rank1Comparison<f64>;
pub type HubProportionCurve = hub::HubProportionCurve<f64>;
pub type NullBand = hub::NullBand<f64>;
pub type OutbreakConfig = sim::OutbreakConfig<f64>;
pub type EnsembleResult = sim::EnsembleResult<f64>;
