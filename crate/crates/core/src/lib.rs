//! Relative sentiment shift (RSS) toolkit.
//!
//! Two halves live in this crate:
//!
//! * a corpus scanner that counts excitement and anxiety words in a
//!   line-delimited JSON news archive and turns the dated counts into a
//!   normalised index ([`lexicon`], [`corpus`], [`scanner`], [`index`]);
//! * the econometrics used to validate such an index against other series:
//!   unit-root tests, VAR lag selection and residual diagnostics, OLS-CUSUM
//!   stability, Toda-Yamamoto Granger causality and forecast-augmentation
//!   regressions ([`timeseries`], [`stationarity`], [`var`], [`granger`],
//!   [`regress`]).
//!
//! Every capability has a runnable program under `examples/`:
//!
//! ```bash
//! cargo run --release --example build_index
//! cargo run --release --example granger_pipeline
//! ```
//!
//! The `rss` binary wraps the same functionality for batch use.

pub mod config;
pub mod corpus;
pub mod error;
pub mod granger;
pub mod index;
pub mod lexicon;
pub mod linalg;
pub mod montecarlo;
pub mod period;
pub mod regress;
pub mod report;
pub mod scanner;
pub mod stationarity;
pub mod synth;
pub mod timeseries;
pub mod var;

pub(crate) mod dist;

pub use error::{Error, ErrorKind, Result};
