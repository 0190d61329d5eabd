//! Threshold stopping rules for selecting the m-th last success in a
//! sequence of independent Bernoulli trials.
//!
//! The crate computes the optimal (odds) threshold, the mean-rule
//! threshold that stops once the remaining success probabilities sum to
//! `m`, and the Poisson-limit threshold for Karamata-Stirling profiles,
//! together with exact win probabilities, mode certificates, Poisson
//! approximation diagnostics, and seeded Monte Carlo cross-checks.
//!
//! ```
//! use last_success::{profiles::SuccessProfile, rules};
//!
//! let profile = SuccessProfile::karamata_stirling(1.0, 100).unwrap();
//! let odds = rules::odds_threshold(&profile, 1).unwrap();
//! let mean = rules::mean_threshold(&profile, 1).unwrap();
//! assert_eq!((odds.threshold, mean.threshold), (38, 37));
//! assert!((odds.win_probability - 0.371043).abs() < 1e-6);
//! ```

pub mod asymptotics;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod profiles;
pub mod rules;
pub mod simulator;

pub use error::{Error, Result};
