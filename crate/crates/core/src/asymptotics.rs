//! Large-`n` limits for Karamata-Stirling profiles and Poisson
//! approximation of suffix success counts.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::distribution::SuffixDistribution;
use crate::error::{Error, Result};

/// Poisson tail mass left unsummed when computing total variation.
pub const POISSON_TAIL_TOL: f64 = 1e-14;

/// Extra Poisson terms allowed beyond the number of trials.
pub const POISSON_EXTRA_TERMS: usize = 200;

/// Limiting proportion of trials to skip, `exp(-m / theta)`.
pub fn kappa(theta: f64, m: usize) -> f64 {
    (-(m as f64) / theta).exp()
}

/// Limiting optimal win probability `m^m e^{-m} / m!`.
pub fn asymptotic_value(m: usize) -> f64 {
    let mf = m as f64;
    (mf * mf.ln() - mf - ln_gamma(mf + 1.0)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonLaw {
    lambda: f64,
}

impl PoissonLaw {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidPoissonMean(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn pmf(&self, j: usize) -> f64 {
        poisson_pmf(self, j)
    }
}

/// `e^{-lambda} lambda^j / j!`, evaluated in log space.
pub fn poisson_pmf(law: &PoissonLaw, j: usize) -> f64 {
    let jf = j as f64;
    let lambda = law.lambda;
    (jf * lambda.ln() - lambda - ln_gamma(jf + 1.0)).exp()
}

/// Exact total variation distance together with the classical brackets
/// computed from the suffix mean and sum of squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvReport {
    pub tv: f64,
    pub lambda: f64,
    pub lambda2: f64,
    /// `lambda2` (Le Cam).
    pub lecam_upper: f64,
    /// `min(1, 1/lambda) lambda2 / 32` (Barbour-Hall).
    pub bh_lower: f64,
    /// `(1 - e^{-lambda}) lambda2 / lambda` (Barbour-Hall).
    pub bh_upper: f64,
}

impl TvReport {
    /// `bh_lower <= tv <= min(bh_upper, lecam_upper)`.
    pub fn ordered(&self) -> bool {
        self.bh_lower <= self.tv && self.tv <= self.bh_upper.min(self.lecam_upper)
    }
}

/// Total variation distance between a complete suffix count law and a
/// Poisson law. Any unsummed residual of either side is added to the
/// distance.
pub fn tv_distance(dist: &SuffixDistribution, law: &PoissonLaw) -> Result<TvReport> {
    if !dist.is_complete() {
        return Err(Error::IncompleteDistribution {
            start: dist.start(),
            end: dist.end(),
            cap: dist.cap(),
            overflow: dist.overflow(),
        });
    }
    let limit = dist.cap().max(dist.trials() + POISSON_EXTRA_TERMS);
    let mut distance = 0.0;
    let mut poisson_mass = 0.0;
    let mut j = 0;
    while j <= limit && (j <= dist.cap() || poisson_mass < 1.0 - POISSON_TAIL_TOL) {
        let q = law.pmf(j);
        distance += (dist.mass(j) - q).abs();
        poisson_mass += q;
        j += 1;
    }
    let poisson_residual = (1.0 - poisson_mass).max(0.0);
    let tv = (0.5 * (distance + dist.overflow() + poisson_residual)).min(1.0);

    let sums = dist.sums();
    let (lambda, lambda2) = (sums.lambda, sums.lambda2);
    let bh_lower = if lambda > 0.0 {
        (1.0f64).min(1.0 / lambda) * lambda2 / 32.0
    } else {
        0.0
    };
    let bh_upper = if lambda > 0.0 {
        (1.0 - (-lambda).exp()) * lambda2 / lambda
    } else {
        0.0
    };
    Ok(TvReport {
        tv,
        lambda,
        lambda2,
        lecam_upper: lambda2,
        bh_lower,
        bh_upper,
    })
}

/// Strict logarithmic bracket on `lambda_{n,k} = sum_{j=k}^{n} theta / (theta + j - 1)`
/// for the Karamata-Stirling profile, from comparing each term with the
/// integral of `theta / (x + theta)` over the neighbouring unit intervals.
///
/// The upper bound is infinite when `k + theta <= 2`.
pub fn lambda_bounds(theta: f64, k: usize, n: usize) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidTheta(theta));
    }
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    let (kf, nf) = (k as f64, n as f64);
    let lower = theta * ((nf + theta) / (kf + theta - 1.0)).ln();
    let upper = if kf + theta - 2.0 > 0.0 {
        theta * ((nf + theta - 1.0) / (kf + theta - 2.0)).ln()
    } else {
        f64::INFINITY
    };
    Ok((lower, upper))
}

/// Limit of the order-`m` odds sum past a skipped proportion `kappa`:
/// `(theta log(1/kappa))^m / m!`.
pub fn riemann_limit(theta: f64, m: usize, kappa: f64) -> f64 {
    let mf = m as f64;
    let base = theta * (1.0 / kappa).ln();
    if base == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    (mf * base.ln() - ln_gamma(mf + 1.0)).exp()
}
