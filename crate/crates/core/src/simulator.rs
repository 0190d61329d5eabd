//! Seeded Monte Carlo estimates of threshold-rule win rates.
//!
//! Replication `r` draws its trials from a ChaCha8 stream selected by
//! `(seed, r)`, so results depend only on the seed and the replication
//! count, never on how replications are split across worker threads.
//! Win counts are aggregated as integers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::SuccessProfile;
use crate::rules::{mean_threshold, odds_threshold, Rule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    /// Rule that produced the threshold, if any.
    pub rule: Option<Rule>,
    pub m: usize,
    pub threshold: usize,
    pub replications: u64,
    pub wins: u64,
    pub empirical_rate: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl SimulationReport {
    fn new(
        rule: Option<Rule>,
        m: usize,
        threshold: usize,
        replications: u64,
        wins: u64,
        seed: u64,
    ) -> Self {
        let rate = wins as f64 / replications as f64;
        Self {
            rule,
            m,
            threshold,
            replications,
            wins,
            empirical_rate: rate,
            std_error: (rate * (1.0 - rate) / replications as f64).sqrt(),
            seed,
        }
    }

    /// `true` if `value` lies within `z` standard errors of the estimate.
    pub fn covers(&self, value: f64, z: f64) -> bool {
        (self.empirical_rate - value).abs() <= z * self.std_error
    }
}

/// Odds and mean rules run on common random numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub odds: SimulationReport,
    pub mean: SimulationReport,
    /// Replications won by the odds rule only.
    pub odds_only_wins: u64,
    /// Replications won by the mean rule only.
    pub mean_only_wins: u64,
    /// Mean of the per-replication win difference (odds minus mean).
    pub difference: f64,
    pub difference_std_error: f64,
}

fn validate(profile: &SuccessProfile, m: usize, threshold: usize, replications: u64) -> Result<()> {
    let n = profile.len();
    if replications == 0 {
        return Err(Error::NoReplications);
    }
    if m == 0 {
        return Err(Error::RankOutOfRange { m, max: n });
    }
    if threshold == 0 || threshold > n {
        return Err(Error::IndexOutOfRange {
            index: threshold,
            max: n,
        });
    }
    Ok(())
}

/// Draw `X_1..X_n` for one replication.
fn draw_trials(rng: &mut ChaCha8Rng, replication: u64, profile: &SuccessProfile, out: &mut [bool]) {
    rng.set_stream(replication);
    rng.set_word_pos(0);
    for (x, &p) in out.iter_mut().zip(profile.probabilities()) {
        *x = rng.random::<f64>() < p;
    }
}

/// Stop at the first success at or after `threshold` (1-based) and win
/// iff exactly `m` successes remain from there on, the stopped one
/// included. Never stopping loses.
fn wins(trials: &[bool], threshold: usize, m: usize) -> bool {
    match trials[threshold - 1..].iter().position(|&x| x) {
        Some(offset) => {
            let tau = threshold - 1 + offset;
            trials[tau..].iter().filter(|&&x| x).count() == m
        }
        None => false,
    }
}

/// Counts `(wins_a, wins_b, a_only, b_only)` over all replications.
fn run(
    profile: &SuccessProfile,
    m: usize,
    thresholds: (usize, usize),
    replications: u64,
    seed: u64,
) -> (u64, u64, u64, u64) {
    let n = profile.len();
    (0..replications)
        .into_par_iter()
        .map_init(
            || (ChaCha8Rng::seed_from_u64(seed), vec![false; n]),
            |(rng, trials), r| {
                draw_trials(rng, r, profile, trials);
                let a = wins(trials, thresholds.0, m);
                let b = if thresholds.1 == thresholds.0 {
                    a
                } else {
                    wins(trials, thresholds.1, m)
                };
                (a as u64, b as u64, (a && !b) as u64, (b && !a) as u64)
            },
        )
        .reduce(
            || (0, 0, 0, 0),
            |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2, x.3 + y.3),
        )
}

/// Estimate the win rate of the rule "stop at the first success at or
/// after `threshold`".
pub fn simulate_rule(
    profile: &SuccessProfile,
    m: usize,
    threshold: usize,
    replications: u64,
    seed: u64,
) -> Result<SimulationReport> {
    validate(profile, m, threshold, replications)?;
    let (w, _, _, _) = run(profile, m, (threshold, threshold), replications, seed);
    Ok(SimulationReport::new(
        None,
        m,
        threshold,
        replications,
        w,
        seed,
    ))
}

/// Simulate the odds and mean rules on identical trial streams.
pub fn simulate_compare(
    profile: &SuccessProfile,
    m: usize,
    replications: u64,
    seed: u64,
) -> Result<PairedComparison> {
    let odds = odds_threshold(profile, m)?.threshold;
    let mean = mean_threshold(profile, m)?.threshold;
    simulate_pair(profile, m, (odds, mean), replications, seed)
}

/// Paired simulation of two arbitrary thresholds, reported as odds/mean.
pub fn simulate_pair(
    profile: &SuccessProfile,
    m: usize,
    thresholds: (usize, usize),
    replications: u64,
    seed: u64,
) -> Result<PairedComparison> {
    validate(profile, m, thresholds.0, replications)?;
    validate(profile, m, thresholds.1, replications)?;
    let (wa, wb, a_only, b_only) = run(profile, m, thresholds, replications, seed);
    let reps = replications as f64;
    let difference = (a_only as f64 - b_only as f64) / reps;
    let second_moment = (a_only + b_only) as f64 / reps;
    let variance = (second_moment - difference * difference).max(0.0);
    Ok(PairedComparison {
        odds: SimulationReport::new(Some(Rule::Odds), m, thresholds.0, replications, wa, seed),
        mean: SimulationReport::new(Some(Rule::Mean), m, thresholds.1, replications, wb, seed),
        odds_only_wins: a_only,
        mean_only_wins: b_only,
        difference,
        difference_std_error: (variance / reps).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::prob_exactly;

    #[test]
    fn win_logic() {
        assert!(wins(&[true, false, true], 1, 2));
        assert!(wins(&[true, false, true], 2, 1));
        assert!(!wins(&[true, false, false], 2, 1));
        assert!(!wins(&[false, false, false], 1, 1));
        assert!(wins(&[false, true, false, true], 1, 2));
    }

    #[test]
    fn fair_coins() {
        let p = SuccessProfile::new(vec![0.5, 0.5]).unwrap();
        let r = simulate_rule(&p, 1, 2, 200_000, 42).unwrap();
        assert_eq!(r.empirical_rate, r.wins as f64 / r.replications as f64);
        assert!(r.covers(0.5, 4.0), "{r:?}");
    }

    #[test]
    fn last_trial_cannot_hold_two_successes() {
        let p = SuccessProfile::new(vec![0.7, 0.6, 0.9]).unwrap();
        let r = simulate_rule(&p, 2, 3, 10_000, 7).unwrap();
        assert_eq!(r.wins, 0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn validation() {
        let p = SuccessProfile::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(simulate_rule(&p, 1, 1, 0, 1), Err(Error::NoReplications));
        assert!(simulate_rule(&p, 1, 0, 10, 1).is_err());
        assert!(simulate_rule(&p, 1, 3, 10, 1).is_err());
        assert!(simulate_rule(&p, 0, 1, 10, 1).is_err());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let p = SuccessProfile::karamata_stirling(1.0, 50).unwrap();
        let run_with = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_rule(&p, 1, 19, 20_000, 99).unwrap())
        };
        let one = run_with(1);
        assert_eq!(one, run_with(3));
        assert_eq!(one, run_with(8));
        assert_ne!(
            one.wins,
            simulate_rule(&p, 1, 19, 20_000, 100).unwrap().wins
        );
    }

    #[test]
    fn equal_thresholds_give_zero_difference() {
        let p = SuccessProfile::new(vec![0.5; 4]).unwrap();
        let c = simulate_pair(&p, 1, (3, 3), 5_000, 3).unwrap();
        assert_eq!(c.odds_only_wins + c.mean_only_wins, 0);
        assert_eq!(c.difference, 0.0);
        assert_eq!(c.odds.wins, c.mean.wins);
    }

    #[test]
    fn coverage_calibration() {
        let p = SuccessProfile::new(vec![0.6, 0.3, 0.45, 0.2, 0.35]).unwrap();
        let exact = prob_exactly(&p, 3, 5, 1).unwrap();
        let covered = (0..100u64)
            .filter(|&seed| {
                simulate_rule(&p, 1, 3, 2_000, seed)
                    .unwrap()
                    .covers(exact, 2.0)
            })
            .count();
        assert!(covered >= 90, "covered {covered}/100");
    }
}
