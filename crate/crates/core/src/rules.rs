//! Threshold rules for stopping on the m-th last success.
//!
//! A threshold rule with threshold `k` stops at the first success at or
//! after trial `k`. It wins exactly when trials `k..=n` hold `m` successes,
//! so its win probability is `s_m(k, n)`.
//!
//! * Odds rule: the last `k` with `s_m(k, n) >= s_{m-1}(k, n)`, which is
//!   the mode of the unimodal map `k -> s_m(k, n)` and hence optimal.
//! * Mean rule: the last `k` whose remaining probability mass
//!   `p_k + ... + p_n` still reaches `m`.
//! * Poisson rule (Karamata-Stirling profiles only): the first `k` with
//!   `k / n >= exp(-m / theta)`.

use serde::{Deserialize, Serialize};

use crate::distribution::{
    elementary_symmetric, suffix_distribution, BackwardSweep, CompensatedSum, Mode, MODE_TIE_RTOL,
};
use crate::error::{Error, Result};
use crate::profiles::SuccessProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Odds,
    Mean,
    Poisson,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Odds => "odds",
            Rule::Mean => "mean",
            Rule::Poisson => "poisson",
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Quantities observed at the chosen threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `p_k + ... + p_n` at the threshold.
    pub lambda: f64,
    /// `s_m(k, n)`.
    pub s_m: f64,
    /// `s_{m-1}(k, n)`.
    pub s_m_minus_1: f64,
    /// The defining set was empty and the rule fell back to trial 1.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub rule: Rule,
    pub m: usize,
    pub threshold: usize,
    pub win_probability: f64,
    pub diagnostics: Option<Diagnostics>,
}

fn check_rank(n: usize, m: usize) -> Result<()> {
    if m == 0 || m + 1 > n {
        return Err(Error::RankOutOfRange {
            m,
            max: n.saturating_sub(1),
        });
    }
    Ok(())
}

fn diagnostics_at(
    profile: &SuccessProfile,
    k: usize,
    m: usize,
    fallback: bool,
) -> Result<Diagnostics> {
    let dist = suffix_distribution(profile, k, m)?;
    Ok(Diagnostics {
        lambda: dist.sums().lambda,
        s_m: dist.mass(m),
        s_m_minus_1: dist.mass(m - 1),
        fallback,
    })
}

fn result_at(
    profile: &SuccessProfile,
    rule: Rule,
    m: usize,
    k: usize,
    fallback: bool,
) -> Result<ThresholdResult> {
    let diagnostics = diagnostics_at(profile, k, m, fallback)?;
    Ok(ThresholdResult {
        rule,
        m,
        threshold: k,
        win_probability: diagnostics.s_m,
        diagnostics: Some(diagnostics),
    })
}

/// Optimal threshold, located during one backward sweep.
///
/// The set `{k : s_m(k, n) >= s_{m-1}(k, n)}` is a down-set of
/// `1..=n-m+1`, so the first hit while sweeping from the end is its
/// maximum. On a width-one plateau this picks the later index.
pub fn odds_threshold(profile: &SuccessProfile, m: usize) -> Result<ThresholdResult> {
    let n = profile.len();
    check_rank(n, m)?;
    let last = n - m + 1;
    let mut sweep = BackwardSweep::new(profile, m);
    while sweep.step() {
        if sweep.k() <= last && sweep.row()[m] >= sweep.row()[m - 1] {
            return result_at(profile, Rule::Odds, m, sweep.k(), false);
        }
    }
    result_at(profile, Rule::Odds, m, 1, true)
}

/// Odds threshold computed from elementary symmetric sums of the odds,
/// independently of [`odds_threshold`].
///
/// Searches only where the odds are finite. Returns `None` if the answer
/// depends on a trial with `p = 1`.
pub fn odds_threshold_from_odds_sums(profile: &SuccessProfile, m: usize) -> Result<Option<usize>> {
    let n = profile.len();
    check_rank(n, m)?;
    let start = profile.certain_trials().last().map_or(1, |&k| k + 1);
    if start > n {
        return Ok(None);
    }
    let odds = profile.odds_from(start)?;
    let last = n - m + 1;
    for i in (start..=last).rev() {
        let rm = elementary_symmetric(&odds, i, n, m)?;
        let rm1 = elementary_symmetric(&odds, i, n, m - 1)?;
        if rm >= rm1 {
            return Ok(Some(i));
        }
    }
    Ok(if start == 1 { Some(1) } else { None })
}

/// Mean-rule threshold `max{i in 1..=n-m : p_i + ... + p_n >= m}`, or 1
/// when no such `i` exists.
pub fn mean_threshold(profile: &SuccessProfile, m: usize) -> Result<ThresholdResult> {
    let n = profile.len();
    check_rank(n, m)?;
    let target = m as f64;
    let mut tail = CompensatedSum::default();
    for i in (1..=n).rev() {
        tail.add(profile.p(i));
        if i <= n - m && tail.value() >= target {
            return result_at(profile, Rule::Mean, m, i, false);
        }
    }
    result_at(profile, Rule::Mean, m, 1, true)
}

/// Smallest `k` in `1..=n` with `k / n >= kappa`.
pub(crate) fn first_index_at_proportion(n: usize, kappa: f64) -> usize {
    let nf = n as f64;
    let mut k = ((nf * kappa).ceil() as usize).clamp(1, n);
    while k > 1 && ((k - 1) as f64) / nf >= kappa {
        k -= 1;
    }
    while k < n && (k as f64) / nf < kappa {
        k += 1;
    }
    k
}

/// Poisson-limit threshold for the Karamata-Stirling profile with
/// parameter `theta`; the win probability is exact for this `n`.
pub fn poisson_threshold(n: usize, theta: f64, m: usize) -> Result<ThresholdResult> {
    let profile = SuccessProfile::karamata_stirling(theta, n)?;
    check_rank(n, m)?;
    let kappa = (-(m as f64) / theta).exp();
    let k = first_index_at_proportion(n, kappa);
    result_at(&profile, Rule::Poisson, m, k, false)
}

/// `s_m(k, n)`: the win probability of the threshold-`k` rule.
pub fn win_probability_of_threshold(profile: &SuccessProfile, m: usize, k: usize) -> Result<f64> {
    let n = profile.len();
    if m == 0 {
        return Err(Error::RankOutOfRange { m, max: n });
    }
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    crate::distribution::prob_exactly(profile, k, n, m)
}

/// Shortfall of the mean rule against the odds rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonGap {
    pub m: usize,
    /// `s_m(k_m, n) - s_m(k', n)`.
    pub epsilon: f64,
    /// `p_{k'} p_{k'+1}`.
    pub bound: f64,
    /// `k_m - k'`.
    pub threshold_lag: i64,
    pub odds_threshold: usize,
    pub mean_threshold: usize,
    pub optimal_value: f64,
    pub mean_value: f64,
    /// `p_{k'} >= p_{k'+1}` and `p_{k'+1}` is the largest of `p_{k'+1..=n}`.
    pub hypotheses_hold: bool,
    /// `p_{k'} > p_{k'+1} - min(p_{k'..=n})`.
    pub strict_hypothesis_holds: bool,
}

pub fn epsilon_gap(profile: &SuccessProfile, m: usize) -> Result<EpsilonGap> {
    let odds = odds_threshold(profile, m)?;
    let mean = mean_threshold(profile, m)?;
    Ok(gap_from(profile, &odds, &mean))
}

pub(crate) fn gap_from(
    profile: &SuccessProfile,
    odds: &ThresholdResult,
    mean: &ThresholdResult,
) -> EpsilonGap {
    let n = profile.len();
    let k = mean.threshold;
    let (pk, pk1) = (profile.p(k), profile.p(k + 1));
    let tail_max = (k + 1..=n).map(|j| profile.p(j)).fold(f64::MIN, f64::max);
    let tail_min = (k..=n).map(|j| profile.p(j)).fold(f64::MAX, f64::min);
    let epsilon = if odds.threshold == mean.threshold {
        0.0
    } else {
        odds.win_probability - mean.win_probability
    };
    EpsilonGap {
        m: odds.m,
        epsilon,
        bound: pk * pk1,
        threshold_lag: odds.threshold as i64 - mean.threshold as i64,
        odds_threshold: odds.threshold,
        mean_threshold: mean.threshold,
        optimal_value: odds.win_probability,
        mean_value: mean.win_probability,
        hypotheses_hold: pk >= pk1 && pk1 == tail_max,
        strict_hypothesis_holds: pk > pk1 - tail_min,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImplicationStatus {
    /// Antecedent false.
    Vacuous,
    Confirmed,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationCheck {
    pub antecedent: bool,
    pub consequent: bool,
    pub status: ImplicationStatus,
}

impl ImplicationCheck {
    fn new(antecedent: bool, consequent: bool) -> Self {
        let status = match (antecedent, consequent) {
            (false, _) => ImplicationStatus::Vacuous,
            (true, true) => ImplicationStatus::Confirmed,
            (true, false) => ImplicationStatus::Violated,
        };
        Self {
            antecedent,
            consequent,
            status,
        }
    }

    pub fn violated(&self) -> bool {
        self.status == ImplicationStatus::Violated
    }
}

/// Mean-based sign conditions on consecutive count probabilities at a
/// suffix start `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamuelsReport {
    pub k: usize,
    pub m: usize,
    /// `min p_{k..=n} + sum p_{k..=n} > m` implies `s_m(k) > s_{m-1}(k)`.
    pub lower: ImplicationCheck,
    /// `max p_{k+1..=n} + sum p_{k+1..=n} < m` implies
    /// `s_m(k+1) < s_{m-1}(k+1)`.
    pub upper: ImplicationCheck,
    /// `m <= sum p_{k..=n} <= m + 1` implies `s_m(k) > s_{m-1}(k)` and
    /// `s_{m+2}(k) < s_{m+1}(k)`.
    pub band: ImplicationCheck,
}

impl SamuelsReport {
    pub fn any_violated(&self) -> bool {
        self.lower.violated() || self.upper.violated() || self.band.violated()
    }
}

pub fn samuels_implications(profile: &SuccessProfile, k: usize, m: usize) -> Result<SamuelsReport> {
    let n = profile.len();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    if m == 0 {
        return Err(Error::RankOutOfRange { m, max: n });
    }
    let mf = m as f64;
    let here = suffix_distribution(profile, k, m + 2)?;
    let sum_here = here.sums().lambda;
    let min_here = (k..=n).map(|j| profile.p(j)).fold(f64::MAX, f64::min);

    let lower = ImplicationCheck::new(min_here + sum_here > mf, here.mass(m) > here.mass(m - 1));

    let upper = if k < n {
        let next = suffix_distribution(profile, k + 1, m)?;
        let max_next = (k + 1..=n).map(|j| profile.p(j)).fold(f64::MIN, f64::max);
        ImplicationCheck::new(
            max_next + next.sums().lambda < mf,
            next.mass(m) < next.mass(m - 1),
        )
    } else {
        ImplicationCheck::new(false, false)
    };

    let band = ImplicationCheck::new(
        mf <= sum_here && sum_here <= mf + 1.0,
        here.mass(m) > here.mass(m - 1) && here.mass(m + 2) < here.mass(m + 1),
    );

    Ok(SamuelsReport {
        k,
        m,
        lower,
        upper,
        band,
    })
}

/// Truth values of the sufficient conditions for a mode at `k*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateConditions {
    /// `p_{k*+1} = max p_{k*+1..=n}`.
    pub next_is_tail_max: bool,
    /// `p_{k*+1} - p_{k*} < min p_{k*..=n}`.
    pub step_below_min: bool,
    /// `m - min p_{k*..=n} < sum p_{k*..=n}`.
    pub sum_above_lower: bool,
    /// `sum p_{k*..=n} < m + p_{k*} - p_{k*+1}`.
    pub sum_below_upper: bool,
    /// `m - p_{k*} <= sum p_{k*+1..=n}`.
    pub tail_sum_above_lower: bool,
    /// `sum p_{k*+1..=n} < m`.
    pub tail_sum_below_m: bool,
}

impl CertificateConditions {
    /// The exact-location conditions.
    pub fn exact(&self) -> bool {
        self.next_is_tail_max && self.step_below_min && self.sum_above_lower && self.sum_below_upper
    }

    /// The two-location conditions.
    pub fn adjacent(&self) -> bool {
        self.step_below_min
            && self.next_is_tail_max
            && self.tail_sum_above_lower
            && self.tail_sum_below_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ModeAtKStar,
    ModeAtKStarOrNext,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCertificate {
    pub candidate: usize,
    pub m: usize,
    pub conditions: CertificateConditions,
    pub implications: SamuelsReport,
    pub verdict: Verdict,
    /// Argmax of `k -> s_m(k, n)` over `1..=n` from a full sweep.
    pub sweep_mode: Mode,
    /// Whether the verdict agrees with `sweep_mode`; `None` if inconclusive.
    pub consistent: Option<bool>,
}

/// Lowest and highest `k` maximizing `s_m(k, n)`.
pub fn win_probability_mode(profile: &SuccessProfile, m: usize) -> Mode {
    let n = profile.len();
    let mut values = vec![0.0; n + 1];
    let mut sweep = BackwardSweep::new(profile, m);
    while sweep.step() {
        values[sweep.k()] = sweep.row()[m];
    }
    let best = values[1..].iter().copied().fold(f64::MIN, f64::max);
    let floor = best * (1.0 - MODE_TIE_RTOL);
    let low = (1..=n).find(|&k| values[k] >= floor).unwrap_or(1);
    let high = (1..=n).rev().find(|&k| values[k] >= floor).unwrap_or(1);
    Mode { low, high }
}

/// Check the sufficient conditions for the mode of `s_m(., n)` to sit at
/// `k_star` (or at `k_star` or `k_star + 1`), and cross-check any
/// conclusive verdict against a full sweep.
///
/// Strict inequalities are evaluated strictly; boundary cases fall through
/// to the weaker verdict.
pub fn certify_mode(profile: &SuccessProfile, k_star: usize, m: usize) -> Result<ModeCertificate> {
    let n = profile.len();
    check_rank(n, m)?;
    if k_star == 0 || k_star > n - m {
        return Err(Error::IndexOutOfRange {
            index: k_star,
            max: n - m,
        });
    }
    let mf = m as f64;
    let pk = profile.p(k_star);
    let pk1 = profile.p(k_star + 1);
    let tail = &profile.probabilities()[k_star..];
    let tail_max = tail.iter().copied().fold(f64::MIN, f64::max);
    let min_here = pk.min(tail.iter().copied().fold(f64::MAX, f64::min));
    let mut tail_sum = CompensatedSum::default();
    tail.iter().for_each(|&p| tail_sum.add(p));
    let tail_sum = tail_sum.value();
    let sum_here = pk + tail_sum;

    let conditions = CertificateConditions {
        next_is_tail_max: pk1 == tail_max,
        step_below_min: pk1 - pk < min_here,
        sum_above_lower: mf - min_here < sum_here,
        sum_below_upper: sum_here < mf + pk - pk1,
        tail_sum_above_lower: mf - pk <= tail_sum,
        tail_sum_below_m: tail_sum < mf,
    };
    let verdict = if conditions.exact() {
        Verdict::ModeAtKStar
    } else if conditions.adjacent() {
        Verdict::ModeAtKStarOrNext
    } else {
        Verdict::Inconclusive
    };

    let sweep_mode = win_probability_mode(profile, m);
    let overlaps = |lo: usize, hi: usize| sweep_mode.low <= hi && lo <= sweep_mode.high;
    let consistent = match verdict {
        Verdict::ModeAtKStar => Some(overlaps(k_star, k_star)),
        Verdict::ModeAtKStarOrNext => Some(overlaps(k_star, k_star + 1)),
        Verdict::Inconclusive => None,
    };

    Ok(ModeCertificate {
        candidate: k_star,
        m,
        conditions,
        implications: samuels_implications(profile, k_star, m)?,
        verdict,
        sweep_mode,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::prob_exactly;

    fn ks(theta: f64, n: usize) -> SuccessProfile {
        SuccessProfile::karamata_stirling(theta, n).unwrap()
    }

    #[test]
    fn odds_threshold_examples() {
        let r = odds_threshold(&ks(1.0, 100), 1).unwrap();
        assert_eq!(r.threshold, 38);
        assert!((r.win_probability - 0.371043).abs() < 5e-7);
        assert_eq!(odds_threshold(&ks(2.0, 10), 1).unwrap().threshold, 7);

        let p = SuccessProfile::new(vec![0.5, 0.5]).unwrap();
        let r = odds_threshold(&p, 1).unwrap();
        assert_eq!(r.threshold, 2);
        assert_eq!(r.win_probability, 0.5);
        assert!(!r.diagnostics.unwrap().fallback);
    }

    #[test]
    fn odds_threshold_fallback() {
        // s_2(1,3) = 0.189 < s_1(1,3) = 0.441: decreasing from the first trial.
        let p = SuccessProfile::new(vec![0.3, 0.3, 0.3]).unwrap();
        let r = odds_threshold(&p, 2).unwrap();
        assert_eq!(r.threshold, 1);
        assert!(r.diagnostics.unwrap().fallback);
    }

    #[test]
    fn rank_validation() {
        let p = ks(1.0, 5);
        assert_eq!(
            odds_threshold(&p, 0),
            Err(Error::RankOutOfRange { m: 0, max: 4 })
        );
        assert!(odds_threshold(&p, 5).is_err());
        assert!(mean_threshold(&p, 5).is_err());
        assert!(poisson_threshold(5, 1.0, 5).is_err());
        assert!(odds_threshold(&ks(1.0, 1), 1).is_err());
    }

    #[test]
    fn mean_threshold_examples() {
        assert_eq!(mean_threshold(&ks(1.0, 100), 1).unwrap().threshold, 37);
        assert_eq!(mean_threshold(&ks(2.0, 10), 2).unwrap().threshold, 3);
        let p = SuccessProfile::new(vec![0.3, 0.3, 0.3]).unwrap();
        let r = mean_threshold(&p, 2).unwrap();
        assert_eq!(r.threshold, 1);
        assert!(r.diagnostics.unwrap().fallback);
    }

    #[test]
    fn mean_threshold_includes_exact_tie() {
        // Suffix sum from trial 2 is exactly 1.
        let p = SuccessProfile::new(vec![0.5, 0.5, 0.25, 0.25]).unwrap();
        assert_eq!(mean_threshold(&p, 1).unwrap().threshold, 2);
    }

    #[test]
    fn poisson_threshold_examples() {
        assert_eq!(poisson_threshold(100, 1.0, 1).unwrap().threshold, 37);
        assert_eq!(poisson_threshold(100, 2.0, 2).unwrap().threshold, 37);
        assert_eq!(poisson_threshold(10, 1.0, 1).unwrap().threshold, 4);
        let r = poisson_threshold(100, 1.0, 1).unwrap();
        let exact = prob_exactly(&ks(1.0, 100), 37, 100, 1).unwrap();
        assert!((r.win_probability - exact).abs() <= 1e-12);
    }

    #[test]
    fn proportion_index_is_tight() {
        for n in [1usize, 2, 7, 10, 100, 12345] {
            for kappa in [0.01, 0.3, 0.5, 1.0 / std::f64::consts::E, 0.999] {
                let k = first_index_at_proportion(n, kappa);
                assert!(k as f64 / n as f64 >= kappa || k == n);
                assert!(k == 1 || ((k - 1) as f64 / n as f64) < kappa);
                assert!((k as f64 / n as f64 - kappa).abs() <= 1.0 / n as f64 || k == 1);
            }
        }
    }

    #[test]
    fn epsilon_examples() {
        let g = epsilon_gap(&ks(1.0, 100), 1).unwrap();
        assert!((g.epsilon - 0.000028).abs() < 5e-7);
        assert_eq!(g.threshold_lag, 1);
        assert!(g.hypotheses_hold && g.strict_hypothesis_holds);
        assert!(g.epsilon <= g.bound);

        let g = epsilon_gap(&ks(1.5, 10), 1).unwrap();
        assert!((g.epsilon - 0.011817).abs() < 5e-7);

        let g = epsilon_gap(&ks(0.5, 10), 1).unwrap();
        assert_eq!(g.epsilon, 0.0);
        assert_eq!(g.threshold_lag, 0);
    }

    #[test]
    fn win_probability_examples() {
        let p = SuccessProfile::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(win_probability_of_threshold(&p, 1, 1).unwrap(), 0.5);
        let v = win_probability_of_threshold(&ks(1.0, 100), 1, 38).unwrap();
        assert!((v - 0.371043).abs() < 5e-7);
        let v = win_probability_of_threshold(&ks(1.0, 1000), 2, 136).unwrap();
        assert!((v - 0.271104).abs() < 5e-7);
        assert!(win_probability_of_threshold(&p, 1, 0).is_err());
        assert!(win_probability_of_threshold(&p, 1, 3).is_err());
        assert!(win_probability_of_threshold(&p, 0, 1).is_err());
    }

    #[test]
    fn odds_sums_route_agrees_on_karamata() {
        for theta in [0.5, 1.0, 1.5, 2.0] {
            for n in [10, 100, 1000] {
                for m in [1, 2, 3] {
                    let p = ks(theta, n);
                    let s_route = odds_threshold(&p, m).unwrap().threshold;
                    if let Some(r_route) = odds_threshold_from_odds_sums(&p, m).unwrap() {
                        assert_eq!(s_route, r_route, "theta={theta} n={n} m={m}");
                    } else {
                        assert!(s_route == 1, "theta={theta} n={n} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn samuels_band_example() {
        // Sum over the suffix is 1.25, inside [1, 2].
        let p = SuccessProfile::new(vec![0.5, 0.25, 0.25, 0.25]).unwrap();
        let r = samuels_implications(&p, 1, 1).unwrap();
        assert_eq!(r.band.status, ImplicationStatus::Confirmed);
        assert!(!r.any_violated());
        assert!(samuels_implications(&p, 0, 1).is_err());
        assert!(samuels_implications(&p, 5, 1).is_err());
        let last = samuels_implications(&p, 4, 2).unwrap();
        assert_eq!(last.upper.status, ImplicationStatus::Vacuous);
    }

    #[test]
    fn certify_record_model() {
        let c = certify_mode(&ks(1.0, 100), 37, 1).unwrap();
        assert_eq!(c.verdict, Verdict::ModeAtKStarOrNext);
        assert_eq!(c.sweep_mode, Mode { low: 38, high: 38 });
        assert_eq!(c.consistent, Some(true));
    }

    #[test]
    fn certify_decreasing_profile_adjacent() {
        // m - p_k* <= tail sum < m while the exact-location upper bound fails.
        let p = SuccessProfile::new(vec![0.9, 0.6, 0.5, 0.3, 0.15]).unwrap();
        let c = certify_mode(&p, 2, 1).unwrap();
        assert!(c.conditions.tail_sum_above_lower && c.conditions.tail_sum_below_m);
        assert!(!c.conditions.sum_below_upper);
        assert_eq!(c.verdict, Verdict::ModeAtKStarOrNext);
        assert_eq!(c.consistent, Some(true));
    }

    #[test]
    fn certify_exact_location() {
        // Sum from trial 3 is 1.01: inside (1 - 0.2, 1 + 0.5 - 0.2).
        let p = SuccessProfile::new(vec![0.9, 0.8, 0.5, 0.2, 0.16, 0.15]).unwrap();
        let c = certify_mode(&p, 3, 1).unwrap();
        assert_eq!(c.verdict, Verdict::ModeAtKStar);
        assert_eq!(c.sweep_mode.low, 3);
        assert_eq!(c.consistent, Some(true));
    }

    #[test]
    fn certify_inconclusive_and_range() {
        // Increasing profile: the next trial is never dominated by k*.
        let p = SuccessProfile::new(vec![0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        let c = certify_mode(&p, 1, 1).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert_eq!(c.consistent, None);
        assert!(certify_mode(&p, 0, 1).is_err());
        assert!(certify_mode(&p, 5, 1).is_err());
    }

    #[test]
    fn certify_equal_profile_plateau() {
        let p = SuccessProfile::new(vec![0.5; 10]).unwrap();
        let c = certify_mode(&p, 1, 5).unwrap();
        assert_eq!(c.verdict, Verdict::ModeAtKStarOrNext);
        assert_eq!(c.sweep_mode, Mode { low: 1, high: 2 });
        assert_eq!(c.consistent, Some(true));
    }
}
