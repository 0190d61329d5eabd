//! Exact Poisson-binomial computations over suffixes of trials.
//!
//! All threshold comparisons are made on probabilities of exact success
//! counts, `s_j(k, n) = P(exactly j successes among trials k..=n)`, which
//! stay inside `[0, 1]`. The elementary symmetric sums of the odds are
//! provided separately as an independent cross-check.
//!
//! Conventions: trials are 1-based, a suffix `k..=n` with `k = n + 1` is
//! empty, `s_0(n + 1, n) = 1` and `s_j(n + 1, n) = 0` for `j >= 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{OddsSequence, SuccessProfile};

/// Overflow mass below which a truncated distribution counts as complete.
pub const COMPLETE_TOL: f64 = 1e-12;

/// Relative tolerance under which two masses are treated as tied modes.
pub const MODE_TIE_RTOL: f64 = 1e-12;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_suffix(profile: &SuccessProfile, k: usize, n: usize) -> Result<()> {
    if n > profile.len() {
        return Err(Error::EndOutOfRange {
            end: n,
            len: profile.len(),
        });
    }
    if k == 0 || k > n + 1 {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: n + 1,
        });
    }
    Ok(())
}

/// Prepend trial probability `p` to a truncated count distribution.
///
/// Returns the mass pushed past the last slot.
#[inline]
fn prepend_trial(mass: &mut [f64], p: f64) -> f64 {
    let q = 1.0 - p;
    let last = mass.len() - 1;
    let spilled = p * mass[last];
    for j in (1..=last).rev() {
        mass[j] = q * mass[j] + p * mass[j - 1];
    }
    mass[0] *= q;
    spilled
}

/// Probability of no successes among trials `k..=n`.
pub fn prob_no_successes(profile: &SuccessProfile, k: usize, n: usize) -> Result<f64> {
    check_suffix(profile, k, n)?;
    Ok((k..=n).map(|j| 1.0 - profile.p(j)).product())
}

/// Probability of exactly `m` successes among trials `k..=n`, by the
/// backward recursion `s_m(k) = p_k s_{m-1}(k+1) + (1 - p_k) s_m(k+1)`.
pub fn prob_exactly(profile: &SuccessProfile, k: usize, n: usize, m: usize) -> Result<f64> {
    check_suffix(profile, k, n)?;
    if m > n + 1 - k {
        return Ok(0.0);
    }
    let mut mass = vec![0.0; m + 1];
    mass[0] = 1.0;
    for j in (k..=n).rev() {
        prepend_trial(&mut mass, profile.p(j));
    }
    Ok(mass[m])
}

/// Mean and sum of squared probabilities over a suffix of trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuffixSums {
    pub lambda: f64,
    pub lambda2: f64,
}

/// Compensated sums of `p_j` and `p_j^2` over trials `k..=n`.
pub fn suffix_sums(profile: &SuccessProfile, k: usize) -> Result<SuffixSums> {
    let n = profile.len();
    check_suffix(profile, k, n)?;
    Ok(sums_over(profile, k, n))
}

fn sums_over(profile: &SuccessProfile, k: usize, n: usize) -> SuffixSums {
    let mut lambda = CompensatedSum::default();
    let mut lambda2 = CompensatedSum::default();
    for j in k..=n {
        let p = profile.p(j);
        lambda.add(p);
        lambda2.add(p * p);
    }
    SuffixSums {
        lambda: lambda.value(),
        lambda2: lambda2.value(),
    }
}

/// Law of the success count over trials `start..=end`, truncated at `cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuffixDistribution {
    start: usize,
    end: usize,
    mass: Vec<f64>,
    overflow: f64,
    sums: SuffixSums,
}

/// Lowest and highest index attaining the maximal mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub low: usize,
    pub high: usize,
}

impl SuffixDistribution {
    /// Build from explicit masses `a_0..a_cap`; the overflow is the
    /// residual `1 - sum(a_j)` clamped at zero.
    pub fn from_masses(start: usize, end: usize, mass: Vec<f64>, sums: SuffixSums) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidMass {
                index: 0,
                value: f64::NAN,
            });
        }
        let mut total = CompensatedSum::default();
        for (index, &value) in mass.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidMass { index, value });
            }
            total.add(value);
        }
        let residual = 1.0 - total.value();
        if residual < -COMPLETE_TOL {
            return Err(Error::InvalidMass {
                index: mass.len(),
                value: residual,
            });
        }
        Ok(Self {
            start,
            end,
            mass,
            overflow: residual.max(0.0),
            sums,
        })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn cap(&self) -> usize {
        self.mass.len() - 1
    }

    /// Number of trials in the suffix.
    pub fn trials(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// `a_j`, zero beyond the cap.
    pub fn mass(&self, j: usize) -> f64 {
        self.mass.get(j).copied().unwrap_or(0.0)
    }

    /// Mass of more than `cap` successes.
    pub fn overflow(&self) -> f64 {
        self.overflow
    }

    pub fn sums(&self) -> SuffixSums {
        self.sums
    }

    pub fn is_complete(&self) -> bool {
        self.overflow <= COMPLETE_TOL
    }

    /// Newton's inequality
    /// `a_j^2 >= (1 + 1/j)(1 + 1/(L - j)) a_{j-1} a_{j+1}` on interior
    /// entries, with relative slack `rtol`.
    pub fn satisfies_newton(&self, rtol: f64) -> bool {
        let l = self.trials();
        let top = self.cap().min(l.saturating_sub(1));
        (1..=top).all(|j| {
            if j + 1 > self.cap() && !self.is_complete() {
                return true;
            }
            let lhs = self.mass(j) * self.mass(j);
            let factor = (1.0 + 1.0 / j as f64) * (1.0 + 1.0 / (l - j) as f64);
            let rhs = factor * self.mass(j - 1) * self.mass(j + 1);
            lhs >= rhs * (1.0 - rtol)
        })
    }

    /// Non-decreasing then non-increasing, up to relative slack `rtol`,
    /// with at most two entries at the maximum.
    pub fn is_unimodal(&self, rtol: f64) -> bool {
        let a = &self.mass;
        let peak = argmax(a);
        let rising = a[..=peak].windows(2).all(|w| w[1] >= w[0] * (1.0 - rtol));
        let falling = a[peak..].windows(2).all(|w| w[1] <= w[0] * (1.0 + rtol));
        let at_max = a
            .iter()
            .filter(|&&x| x >= a[peak] * (1.0 - MODE_TIE_RTOL))
            .count();
        rising && falling && at_max <= 2
    }

    /// Location of the maximal mass.
    ///
    /// Refuses when the truncation could hide a larger mass above the cap,
    /// i.e. when the distribution is incomplete and the last retained entry
    /// is not below its predecessor.
    pub fn mode(&self) -> Result<Mode> {
        let a = &self.mass;
        let cap = self.cap();
        if !self.is_complete() && !(cap >= 1 && a[cap] < a[cap - 1]) {
            return Err(Error::IncompleteDistribution {
                start: self.start,
                end: self.end,
                cap,
                overflow: self.overflow,
            });
        }
        let best = a[argmax(a)];
        let floor = best * (1.0 - MODE_TIE_RTOL);
        let low = a.iter().position(|&x| x >= floor).unwrap_or(0);
        let high = a.iter().rposition(|&x| x >= floor).unwrap_or(0);
        Ok(Mode { low, high })
    }
}

fn argmax(a: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in a.iter().enumerate() {
        if x > a[best] {
            best = i;
        }
    }
    best
}

/// Distribution of the success count over trials `k..=n`, truncated at
/// `cap`, accumulated in one pass over the trials.
pub fn suffix_distribution(
    profile: &SuccessProfile,
    k: usize,
    cap: usize,
) -> Result<SuffixDistribution> {
    let n = profile.len();
    check_suffix(profile, k, n)?;
    let mut mass = vec![0.0; cap + 1];
    mass[0] = 1.0;
    let mut overflow = CompensatedSum::default();
    for j in k..=n {
        overflow.add(prepend_trial(&mut mass, profile.p(j)));
    }
    Ok(SuffixDistribution {
        start: k,
        end: n,
        mass,
        overflow: overflow.value().max(0.0),
        sums: sums_over(profile, k, n),
    })
}

/// Suffix distribution over trials `k..=n` with the cap grown until the
/// overflow mass is below [`COMPLETE_TOL`] (or every count is retained).
pub fn complete_suffix_distribution(
    profile: &SuccessProfile,
    k: usize,
) -> Result<SuffixDistribution> {
    let n = profile.len();
    check_suffix(profile, k, n)?;
    let trials = n + 1 - k;
    let lambda = sums_over(profile, k, n).lambda;
    let mut cap = ((lambda + 10.0 * lambda.sqrt()).ceil() as usize + 32).min(trials);
    loop {
        let dist = suffix_distribution(profile, k, cap)?;
        if dist.is_complete() || cap == trials {
            return Ok(dist);
        }
        cap = (cap * 2).min(trials);
    }
}

/// Mode of a suffix distribution; see [`SuffixDistribution::mode`].
pub fn mode_of(dist: &SuffixDistribution) -> Result<Mode> {
    dist.mode()
}

/// Backward sweep over suffixes: starts at the empty suffix `k = n + 1`
/// and prepends one trial per [`step`](Self::step), keeping
/// `s_0(k, n)..s_{m_max}(k, n)` for the current `k`.
#[derive(Debug, Clone)]
pub struct BackwardSweep<'a> {
    profile: &'a SuccessProfile,
    k: usize,
    row: Vec<f64>,
}

impl<'a> BackwardSweep<'a> {
    pub fn new(profile: &'a SuccessProfile, m_max: usize) -> Self {
        let mut row = vec![0.0; m_max + 1];
        row[0] = 1.0;
        Self {
            profile,
            k: profile.len() + 1,
            row,
        }
    }

    /// Current suffix start.
    pub fn k(&self) -> usize {
        self.k
    }

    /// `s_j(k, n)` for `j = 0..=m_max`.
    pub fn row(&self) -> &[f64] {
        &self.row
    }

    /// Move to suffix `k - 1`; returns `false` once `k = 1` was reached.
    pub fn step(&mut self) -> bool {
        if self.k <= 1 {
            return false;
        }
        self.k -= 1;
        prepend_trial(&mut self.row, self.profile.p(self.k));
        true
    }
}

/// `s_j(k, n)` for every `k = 1..=n+1` and `j = 0..=m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuffixMassTable {
    n: usize,
    width: usize,
    data: Vec<f64>,
}

impl SuffixMassTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_max(&self) -> usize {
        self.width - 1
    }

    /// Row for suffix start `k` (1-based, `k = n + 1` allowed).
    pub fn row(&self, k: usize) -> &[f64] {
        assert!(
            (1..=self.n + 1).contains(&k),
            "suffix start {k} out of range"
        );
        &self.data[(k - 1) * self.width..k * self.width]
    }
}

/// All suffix count masses from a single backward sweep, `O(n * m_max)`.
pub fn all_suffix_masses(profile: &SuccessProfile, m_max: usize) -> SuffixMassTable {
    let n = profile.len();
    let width = m_max + 1;
    let mut data = vec![0.0; (n + 1) * width];
    let mut sweep = BackwardSweep::new(profile, m_max);
    loop {
        let k = sweep.k();
        data[(k - 1) * width..k * width].copy_from_slice(sweep.row());
        if !sweep.step() {
            break;
        }
    }
    SuffixMassTable { n, width, data }
}

/// Elementary symmetric polynomial of order `m` in the odds `r_k..r_n`,
/// by `R_m(k) = R_m(k+1) + r_k R_{m-1}(k+1)` with compensated sums.
pub fn elementary_symmetric(odds: &OddsSequence, k: usize, n: usize, m: usize) -> Result<f64> {
    if n > odds.end() {
        return Err(Error::EndOutOfRange {
            end: n,
            len: odds.end(),
        });
    }
    if k < odds.start() || k > n + 1 {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: n + 1,
        });
    }
    if m == 0 {
        return Ok(1.0);
    }
    if m > n + 1 - k {
        return Ok(0.0);
    }
    let mut e = vec![CompensatedSum::default(); m + 1];
    e[0].add(1.0);
    for i in (k..=n).rev() {
        let r = odds.r(i);
        for j in (1..=m).rev() {
            let term = r * e[j - 1].value();
            e[j].add(term);
            if !e[j].value().is_finite() {
                return Err(Error::Overflow { order: j });
            }
        }
    }
    Ok(e[m].value())
}

/// Mode bracket from the mean of a Poisson-binomial law over `n` trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", content = "m", rename_all = "snake_case")]
pub enum DarrochBracket {
    /// Mode is `m`.
    ExactlyM(usize),
    /// Mode is `m`, `m + 1`, or both.
    MOrMPlusOne(usize),
    /// Mode is `m + 1`.
    ExactlyMPlusOne(usize),
}

impl DarrochBracket {
    /// Inclusive range of admissible mode locations.
    pub fn admissible(&self) -> (usize, usize) {
        match *self {
            Self::ExactlyM(m) => (m, m),
            Self::MOrMPlusOne(m) => (m, m + 1),
            Self::ExactlyMPlusOne(m) => (m + 1, m + 1),
        }
    }

    /// `true` if `mode` lies inside the admissible range.
    pub fn admits(&self, mode: Mode) -> bool {
        let (lo, hi) = self.admissible();
        mode.low >= lo && mode.high <= hi
    }
}

/// Case split on the mean `mu` with `m = floor(mu)`.
pub fn darroch_bracket(mu: f64, n: usize) -> Result<DarrochBracket> {
    if !(mu >= 0.0 && mu <= n as f64) {
        return Err(Error::MeanOutOfRange { mu, n });
    }
    let m = mu.floor() as usize;
    let mf = m as f64;
    // m <= n here, so n - m + 1 >= 1.
    let bracket = if mu < mf + 1.0 / (mf + 2.0) {
        DarrochBracket::ExactlyM(m)
    } else if mu <= mf + 1.0 - 1.0 / (n - m + 1) as f64 {
        DarrochBracket::MOrMPlusOne(m)
    } else {
        DarrochBracket::ExactlyMPlusOne(m)
    };
    Ok(bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile(p: &[f64]) -> SuccessProfile {
        SuccessProfile::new(p.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Exhaustive enumeration over every outcome of trials `k..=n`.
    fn enumerate(p: &SuccessProfile, k: usize, n: usize, m: usize) -> f64 {
        let len = n + 1 - k;
        let mut total = 0.0;
        for mask in 0u32..(1u32 << len) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let mut prod = 1.0;
            for bit in 0..len {
                let pk = p.p(k + bit);
                prod *= if mask >> bit & 1 == 1 { pk } else { 1.0 - pk };
            }
            total += prod;
        }
        total
    }

    #[test]
    fn zero_successes_examples() {
        let p = profile(&[0.5, 0.5, 0.5]);
        assert_eq!(prob_no_successes(&p, 1, 3).unwrap(), 0.125);
        assert_eq!(prob_no_successes(&p, 4, 3).unwrap(), 1.0);
        assert!(prob_no_successes(&p, 5, 3).is_err());
        assert!(prob_no_successes(&p, 0, 3).is_err());
        assert!(prob_no_successes(&p, 1, 4).is_err());

        // Direct product of (1 - 1/j) for j = 4..=10 telescopes to 3/10.
        let ks = SuccessProfile::karamata_stirling(1.0, 10).unwrap();
        let oracle: f64 = (4..=10).map(|j| 1.0 - 1.0 / j as f64).product();
        let got = prob_no_successes(&ks, 4, 10).unwrap();
        assert!(close(got, oracle, 1e-15));
        assert!(close(got, 0.3, 1e-15));
    }

    #[test]
    fn exact_count_examples() {
        let p = profile(&[0.5, 0.5]);
        assert_eq!(prob_exactly(&p, 1, 2, 1).unwrap(), 0.5);
        assert_eq!(prob_exactly(&p, 1, 2, 2).unwrap(), 0.25);
        assert_eq!(prob_exactly(&p, 2, 2, 2).unwrap(), 0.0);
        assert_eq!(prob_exactly(&p, 3, 2, 0).unwrap(), 1.0);
        assert_eq!(prob_exactly(&p, 3, 2, 1).unwrap(), 0.0);

        let ks = SuccessProfile::karamata_stirling(1.0, 10).unwrap();
        let brute = enumerate(&ks, 4, 10, 1);
        let harmonic: f64 = (4..=10).map(|j| 1.0 / (j - 1) as f64).sum();
        let got = prob_exactly(&ks, 4, 10, 1).unwrap();
        assert!(close(got, brute, 1e-15));
        assert!(close(got, 0.3 * harmonic, 1e-15));
    }

    #[test]
    fn suffix_distribution_examples() {
        let d = suffix_distribution(&profile(&[0.5, 0.5, 0.5]), 1, 3).unwrap();
        assert_eq!(d.masses(), &[0.125, 0.375, 0.375, 0.125]);
        assert!(d.is_complete());

        let d = suffix_distribution(&profile(&[0.9, 0.1]), 1, 2).unwrap();
        for (got, want) in d.masses().iter().zip([0.09, 0.82, 0.09]) {
            assert!(close(*got, want, 1e-15));
        }

        let d = suffix_distribution(&profile(&[0.9, 0.1]), 3, 0).unwrap();
        assert_eq!(d.masses(), &[1.0]);
        assert_eq!(d.trials(), 0);
    }

    #[test]
    fn complete_distribution_grows_cap() {
        let p = profile(&[0.5; 2000]);
        let d = complete_suffix_distribution(&p, 1).unwrap();
        assert!(d.is_complete());
        assert!(d.cap() < 2000);
        let ks = SuccessProfile::karamata_stirling(1.0, 100_000).unwrap();
        let d = complete_suffix_distribution(&ks, 36_789).unwrap();
        assert!(d.is_complete() && d.cap() < 100);
        let tiny = complete_suffix_distribution(&profile(&[0.9, 0.1]), 2).unwrap();
        assert_eq!(tiny.cap(), 1);
    }

    #[test]
    fn truncation_tracks_overflow() {
        let d = suffix_distribution(&profile(&[0.5, 0.5, 0.5]), 1, 1).unwrap();
        assert_eq!(d.masses(), &[0.125, 0.375]);
        assert!(close(d.overflow(), 0.5, 1e-15));
        assert!(!d.is_complete());
        // a_1 > a_0 at the cap, so the mode might be hidden.
        assert!(matches!(
            d.mode(),
            Err(Error::IncompleteDistribution { .. })
        ));

        // Binomial(10, 0.1) truncated at 3 is already decreasing there.
        let d = suffix_distribution(&profile(&[0.1; 10]), 1, 3).unwrap();
        assert!(!d.is_complete());
        assert_eq!(d.mode().unwrap(), Mode { low: 1, high: 1 });
    }

    #[test]
    fn sweep_table_examples() {
        let t = all_suffix_masses(&profile(&[0.5, 0.5]), 1);
        assert_eq!(t.row(3), &[1.0, 0.0]);
        assert_eq!(t.row(2), &[0.5, 0.5]);
        assert_eq!(t.row(1), &[0.25, 0.5]);
        assert_eq!(t.n(), 2);
        assert_eq!(t.m_max(), 1);
    }

    #[test]
    fn sweep_matches_table_value() {
        let ks = SuccessProfile::karamata_stirling(1.0, 100).unwrap();
        let t = all_suffix_masses(&ks, 1);
        assert!(close(t.row(38)[1], 0.371043, 1e-6));
    }

    #[test]
    fn sweep_rows_match_pointwise_queries() {
        let p = profile(&[0.3, 0.8, 0.05, 0.5, 0.99, 0.2, 0.6]);
        let t = all_suffix_masses(&p, 4);
        for k in 1..=8 {
            let d = suffix_distribution(&p, k, 4).unwrap();
            for m in 0..=4 {
                let direct = prob_exactly(&p, k, 7, m).unwrap();
                assert!(close(t.row(k)[m], direct, 1e-15));
                assert!(close(d.mass(m), direct, 1e-15));
            }
        }
    }

    #[test]
    fn elementary_symmetric_examples() {
        let ones = profile(&[0.5, 0.5, 0.5]).odds().unwrap();
        assert!(close(
            elementary_symmetric(&ones, 1, 3, 2).unwrap(),
            3.0,
            1e-15
        ));
        assert_eq!(elementary_symmetric(&ones, 2, 3, 0).unwrap(), 1.0);
        assert_eq!(elementary_symmetric(&ones, 3, 3, 2).unwrap(), 0.0);

        let r = profile(&[0.5, 1.0 / 3.0, 0.25]).odds().unwrap();
        assert!(close(
            elementary_symmetric(&r, 1, 3, 3).unwrap(),
            1.0 / 6.0,
            1e-15
        ));
    }

    #[test]
    fn elementary_symmetric_overflow_and_range() {
        let big = profile(&[1.0 - 1e-300_f64.max(f64::EPSILON); 400])
            .odds()
            .unwrap();
        assert!(matches!(
            elementary_symmetric(&big, 1, 400, 200),
            Err(Error::Overflow { .. })
        ));
        let tail = SuccessProfile::karamata_stirling(1.0, 5)
            .unwrap()
            .odds_from(2)
            .unwrap();
        assert!(elementary_symmetric(&tail, 1, 5, 1).is_err());
        assert!(elementary_symmetric(&tail, 2, 6, 1).is_err());
    }

    #[test]
    fn suffix_sums_examples() {
        let s = suffix_sums(&profile(&[0.5; 4]), 1).unwrap();
        assert_eq!((s.lambda, s.lambda2), (2.0, 1.0));

        let ks = SuccessProfile::karamata_stirling(1.0, 10).unwrap();
        let s = suffix_sums(&ks, 4).unwrap();
        let oracle: f64 = (4..=10).map(|j| 1.0 / j as f64).sum();
        assert!(close(s.lambda, oracle, 1e-15));
        assert!(close(s.lambda, 1.09563, 1e-5));

        let s = suffix_sums(&ks, 11).unwrap();
        assert_eq!((s.lambda, s.lambda2), (0.0, 0.0));
    }

    #[test]
    fn mode_examples() {
        let d = suffix_distribution(&profile(&[0.5; 10]), 1, 10).unwrap();
        assert_eq!(mode_of(&d).unwrap(), Mode { low: 5, high: 5 });
        let d = suffix_distribution(&profile(&[0.5; 3]), 1, 3).unwrap();
        assert_eq!(mode_of(&d).unwrap(), Mode { low: 1, high: 2 });
        let d = suffix_distribution(&profile(&[0.9, 0.1]), 1, 2).unwrap();
        assert_eq!(mode_of(&d).unwrap(), Mode { low: 1, high: 1 });
    }

    #[test]
    fn darroch_examples() {
        assert_eq!(
            darroch_bracket(5.0, 10).unwrap(),
            DarrochBracket::ExactlyM(5)
        );
        assert_eq!(
            darroch_bracket(0.99, 3).unwrap(),
            DarrochBracket::ExactlyMPlusOne(0)
        );
        let d = suffix_distribution(&profile(&[0.33; 3]), 1, 3).unwrap();
        assert_eq!(d.mode().unwrap(), Mode { low: 1, high: 1 });

        // 0.4 < 0 + 1/2, so the first case applies; enumeration agrees.
        assert_eq!(
            darroch_bracket(0.4, 4).unwrap(),
            DarrochBracket::ExactlyM(0)
        );
        let d = suffix_distribution(&profile(&[0.1; 4]), 1, 4).unwrap();
        assert_eq!(d.mode().unwrap(), Mode { low: 0, high: 0 });

        assert!(darroch_bracket(-0.1, 3).is_err());
        assert!(darroch_bracket(3.5, 3).is_err());
        assert_eq!(
            darroch_bracket(3.0, 3).unwrap(),
            DarrochBracket::ExactlyM(3)
        );
    }

    #[test]
    fn from_masses_validation() {
        let sums = SuffixSums {
            lambda: 1.0,
            lambda2: 0.0,
        };
        assert!(SuffixDistribution::from_masses(1, 1, vec![0.5, -0.1], sums).is_err());
        assert!(SuffixDistribution::from_masses(1, 1, vec![0.7, 0.7], sums).is_err());
        let d = SuffixDistribution::from_masses(1, 1, vec![0.25, 0.5], sums).unwrap();
        assert!(close(d.overflow(), 0.25, 1e-15));
    }

    fn arb_profile(max_n: usize) -> impl Strategy<Value = SuccessProfile> {
        prop::collection::vec(0.01f64..0.99, 1..=max_n)
            .prop_map(|v| SuccessProfile::new(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn brute_force_oracle(p in arb_profile(12)) {
            let n = p.len();
            for k in 1..=n + 1 {
                for m in 0..=n + 1 - k {
                    let brute = enumerate(&p, k, n, m);
                    let got = prob_exactly(&p, k, n, m).unwrap();
                    prop_assert!((got - brute).abs() <= 1e-12 * brute.max(1e-300));
                }
            }
        }

        #[test]
        fn product_identity_with_odds(p in arb_profile(50)) {
            let n = p.len();
            let odds = p.odds().unwrap();
            for k in 1..=n {
                let s0 = prob_no_successes(&p, k, n).unwrap();
                for m in 0..=(n + 1 - k).min(6) {
                    let sm = prob_exactly(&p, k, n, m).unwrap();
                    let rm = elementary_symmetric(&odds, k, n, m).unwrap();
                    prop_assert!((sm - s0 * rm).abs() <= 1e-10 * sm, "k={} m={}", k, m);
                }
            }
        }

        #[test]
        fn backward_and_forward_recursions(p in arb_profile(20)) {
            let n = p.len();
            for k in 1..=n {
                for m in 1..=n + 1 - k {
                    let lhs = prob_exactly(&p, k, n, m).unwrap();
                    let back = p.p(k) * prob_exactly(&p, k + 1, n, m - 1).unwrap()
                        + (1.0 - p.p(k)) * prob_exactly(&p, k + 1, n, m).unwrap();
                    let fwd = p.p(n) * prob_exactly(&p, k, n - 1, m - 1).unwrap()
                        + (1.0 - p.p(n)) * prob_exactly(&p, k, n - 1, m).unwrap();
                    prop_assert!((lhs - back).abs() <= 1e-12 * lhs.max(1e-300) + 1e-300);
                    prop_assert!((lhs - fwd).abs() <= 1e-12 * lhs.max(1e-300) + 1e-300);
                }
            }
        }

        #[test]
        fn newton_and_unimodal(p in arb_profile(50), start in 0usize..50) {
            let k = 1 + start % p.len();
            let d = suffix_distribution(&p, k, p.len() + 1 - k).unwrap();
            prop_assert!(d.is_complete());
            prop_assert!(d.satisfies_newton(1e-10));
            prop_assert!(d.is_unimodal(1e-12));
            let mode = d.mode().unwrap();
            prop_assert!(mode.high - mode.low <= 1);
            let total: f64 = d.masses().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn darroch_agrees_with_mode(p in arb_profile(30)) {
            let n = p.len();
            let d = suffix_distribution(&p, 1, n).unwrap();
            let bracket = darroch_bracket(d.sums().lambda.min(n as f64), n).unwrap();
            prop_assert!(bracket.admits(d.mode().unwrap()), "{:?} {:?}", bracket, d.mode());
        }
    }
}
