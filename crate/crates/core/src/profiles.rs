//! Success profiles: the per-trial success probabilities of independent
//! Bernoulli trials, and their odds.
//!
//! Trials are indexed from 1 throughout the public API. A trial may carry
//! probability exactly 1 (the first trial of every Karamata-Stirling
//! profile does); such trials are accepted, and only operations that need
//! the odds at that index fail.

use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered success probabilities `p_1..p_n`, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SuccessProfile {
    probabilities: Vec<f64>,
}

impl SuccessProfile {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for (i, &p) in probabilities.iter().enumerate() {
            // NaN fails both comparisons.
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::ProbabilityOutOfRange {
                    index: i + 1,
                    value: p,
                });
            }
        }
        Ok(Self { probabilities })
    }

    /// The Karamata-Stirling profile `p_k = theta / (theta + k - 1)`.
    ///
    /// `theta = 1` is the classical record model `p_k = 1/k`. The first
    /// trial always has `p_1 = 1`.
    pub fn karamata_stirling(theta: f64, n: usize) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidTheta(theta));
        }
        if n == 0 {
            return Err(Error::EmptyProfile);
        }
        let probabilities = (1..=n).map(|k| theta / (theta + (k - 1) as f64)).collect();
        Self::new(probabilities)
    }

    /// Number of trials `n`.
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Success probability of trial `k` (1-based).
    ///
    /// Panics if `k` is outside `1..=n`.
    #[inline]
    pub fn p(&self, k: usize) -> f64 {
        self.probabilities[k - 1]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Indices of trials with success probability exactly 1.
    pub fn certain_trials(&self) -> Vec<usize> {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == 1.0)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// `true` if `p_1 >= p_2 >= ... >= p_n`.
    pub fn is_non_increasing(&self) -> bool {
        self.probabilities.windows(2).all(|w| w[0] >= w[1])
    }

    /// Odds `r_k = p_k / (1 - p_k)` for every trial.
    pub fn odds(&self) -> Result<OddsSequence> {
        self.odds_from(1)
    }

    /// Odds for trials `start..=n` only, so profiles with a certain first
    /// trial can still be examined on later suffixes.
    pub fn odds_from(&self, start: usize) -> Result<OddsSequence> {
        let n = self.len();
        if start == 0 || start > n {
            return Err(Error::IndexOutOfRange {
                index: start,
                max: n,
            });
        }
        let odds = (start..=n)
            .map(|k| {
                let p = self.p(k);
                if p >= 1.0 {
                    Err(Error::InfiniteOdds { index: k })
                } else {
                    Ok(p / (1.0 - p))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OddsSequence { start, odds })
    }

    /// One probability per line, shortest round-trip decimal form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.probabilities {
            let _ = writeln!(out, "{p}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.probabilities).expect("finite floats serialize")
    }
}

impl TryFrom<Vec<f64>> for SuccessProfile {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<SuccessProfile> for Vec<f64> {
    fn from(profile: SuccessProfile) -> Self {
        profile.probabilities
    }
}

/// Odds ratios `r_start..r_n` of a contiguous suffix of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct OddsSequence {
    start: usize,
    odds: Vec<f64>,
}

impl OddsSequence {
    /// First trial index covered by this sequence.
    pub fn start(&self) -> usize {
        self.start
    }

    /// Last trial index covered by this sequence.
    pub fn end(&self) -> usize {
        self.start + self.odds.len() - 1
    }

    /// Odds of trial `k`; panics outside `start..=end`.
    #[inline]
    pub fn r(&self, k: usize) -> f64 {
        self.odds[k - self.start]
    }

    pub fn values(&self) -> &[f64] {
        &self.odds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileFormat {
    Csv,
    Json,
}

impl FromStr for ProfileFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown profile format `{other}`")),
        }
    }
}

/// Read a profile from CSV (one probability per line, `#` comments and
/// blank lines ignored) or JSON (a flat array of numbers).
pub fn load_profile<R: Read>(mut source: R, format: ProfileFormat) -> Result<SuccessProfile> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    match format {
        ProfileFormat::Csv => parse_csv(&text),
        ProfileFormat::Json => {
            let values: Vec<f64> = serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
            SuccessProfile::new(values)
        }
    }
}

fn parse_csv(text: &str) -> Result<SuccessProfile> {
    let mut values = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value = line.parse::<f64>().map_err(|e| Error::Parse {
            line: lineno + 1,
            message: format!("`{line}`: {e}"),
        })?;
        values.push(value);
    }
    SuccessProfile::new(values)
}
