//! Closed-form outage expressions for the two-stage strategy and companions.
//!
//! The chain mirrors the outage decomposition: user 1's signal fails
//! somewhere iff no relay qualifies, which happens per relay with probability
//! `1 - e^{-3 xi1}`; otherwise the selected relay's user-2 bottleneck rate is
//! governed by the conditional CDF [`bottleneck_rate_cdf`], and summing over
//! the binomial law of the qualified-set size gives the exact outage
//! probability [`outage_probability`]. A first-order expansion of that sum
//! yields the high-SNR approximation, which decays as `rho^{-N}` — full
//! diversity in the relay count.
//!
//! Probabilities are clamped to `[0, 1]` after floating-point evaluation;
//! clamps beyond 1e-9 are logged as warnings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{compute_thresholds, SystemConfig, Thresholds};

/// Which expression produced a curve point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    ExactClosedForm,
    HighSnrApprox,
    SymmetricMaxMin,
    MonteCarlo,
}

/// One point of an outage-vs-SNR curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageCurvePoint {
    /// Linear transmit SNR.
    pub rho: f64,
    /// Outage probability in `[0, 1]`.
    pub value: f64,
    pub kind: CurveKind,
}

impl OutageCurvePoint {
    /// Build a point, clamping the value into `[0, 1]`.
    pub fn new(rho: f64, value: f64, kind: CurveKind) -> Self {
        Self { rho, value: value.clamp(0.0, 1.0), kind }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("thresholds are infeasible; this expression requires alpha1_sq > eps1 * alpha2_sq")]
    InfeasibleThresholds,
    #[error("rate argument {x} is below the domain floor {floor}")]
    BelowDomainFloor { x: f64, floor: f64 },
    #[error("qualified-set size {l} out of range for {n} relays")]
    SizeOutOfRange { l: usize, n: usize },
    #[error("symmetric formula invalid when xi1 != xi2 (xi1 = {xi1}, xi2 = {xi2})")]
    AsymmetricThresholds { xi1: f64, xi2: f64 },
    #[error("diversity fit needs at least 3 points; got {have}")]
    TooFewPoints { have: usize },
    #[error("diversity fit needs strictly increasing SNR values")]
    NonIncreasingSnr,
    #[error("diversity fit undefined for outage value {value}; need values strictly inside (0, 1)")]
    DegenerateValue { value: f64 },
}

fn xi1_of(thresholds: &Thresholds) -> Result<f64, AnalyticsError> {
    thresholds.xi1.ok_or(AnalyticsError::InfeasibleThresholds)
}

/// Clamp a computed probability into `[0, 1]`, warning when the excursion is
/// larger than floating-point noise.
fn clamp_probability(p: f64, context: &str) -> f64 {
    let clamped = p.clamp(0.0, 1.0);
    if (clamped - p).abs() > 1e-9 {
        log::warn!("{context}: value {p} clamped to {clamped}");
    }
    clamped
}

/// `ln C(n, l)` as a sum of ratio logs; exact enough (~1e-14 relative) for
/// any relay count this crate deals with.
fn ln_binomial(n: usize, l: usize) -> f64 {
    let k = l.min(n - l);
    (1..=k)
        .map(|i| (((n - k + i) as f64) / (i as f64)).ln())
        .sum()
}

/// `1 - e^{-3 xi1}` without cancellation for small `xi1`: the probability
/// that a relay fails to qualify (some link at or below `xi1`).
fn fail_prob(xi1: f64) -> f64 {
    -(-3.0 * xi1).exp_m1()
}

/// Lowest rate argument (bits per two slots) with non-zero CDF mass:
/// `log2(1 + rho * xi1 * alpha2_sq)`. A qualified relay's bottleneck rate can
/// never fall below this, because both of its `s2`-relevant gains already
/// exceed `xi1`.
pub fn rate_domain_floor(
    config: &SystemConfig,
    thresholds: &Thresholds,
) -> Result<f64, AnalyticsError> {
    let xi1 = xi1_of(thresholds)?;
    Ok((1.0 + config.rho * xi1 * config.alpha2_sq).log2())
}

/// Map a rate argument `x` to its gain-domain equivalent
/// `y = (2^x - 1) / (rho * alpha2_sq)`.
fn gain_of_rate(x: f64, config: &SystemConfig) -> f64 {
    (x.exp2() - 1.0) / (config.rho * config.alpha2_sq)
}

/// CDF evaluated in the gain domain: `1 - e^{-2 (y - xi1)}` for `y >= xi1`.
fn cdf_at_gain(y: f64, xi1: f64) -> f64 {
    clamp_probability(-(-2.0 * (y - xi1)).exp_m1(), "bottleneck rate CDF")
}

/// Conditional CDF of a qualified relay's user-2 bottleneck rate
/// `min(log2(1 + rho h_sq alpha2_sq), log2(1 + rho g2_sq alpha2_sq))`, the
/// condition being that the relay's three gains all exceed `xi1`.
///
/// `x` is in bits per two slots. Arguments below the domain floor are a
/// domain error here; [`bottleneck_rate_cdf_total`] is the total variant
/// fixing the CDF to zero there. A relative slack of 1e-12 on the floor
/// comparison absorbs round-trip rounding of boundary arguments.
pub fn bottleneck_rate_cdf(
    x: f64,
    config: &SystemConfig,
    thresholds: &Thresholds,
) -> Result<f64, AnalyticsError> {
    let xi1 = xi1_of(thresholds)?;
    let y = gain_of_rate(x, config);
    if y < xi1 * (1.0 - 1e-12) {
        return Err(AnalyticsError::BelowDomainFloor {
            x,
            floor: rate_domain_floor(config, thresholds)?,
        });
    }
    Ok(cdf_at_gain(y.max(xi1), xi1))
}

/// Total variant of [`bottleneck_rate_cdf`]: zero below the domain floor.
/// This is the form the outage sum uses, where `x = 2 r2` may legitimately
/// fall below the floor (then qualification alone implies `s2` decodes).
pub fn bottleneck_rate_cdf_total(
    x: f64,
    config: &SystemConfig,
    thresholds: &Thresholds,
) -> Result<f64, AnalyticsError> {
    let xi1 = xi1_of(thresholds)?;
    let y = gain_of_rate(x, config);
    Ok(if y <= xi1 { 0.0 } else { cdf_at_gain(y, xi1) })
}

/// Probability that no relay qualifies: `(1 - e^{-3 xi1})^N`. This is also
/// the probability that user 1's signal fails somewhere under two-stage
/// selection.
pub fn empty_qualified_set_prob(
    config: &SystemConfig,
    thresholds: &Thresholds,
) -> Result<f64, AnalyticsError> {
    let xi1 = xi1_of(thresholds)?;
    Ok(fail_prob(xi1).powi(config.n_relays as i32))
}

/// Probability mass of the qualified-set size: binomial with per-relay
/// success probability `e^{-3 xi1}`.
pub fn qualified_set_size_pmf(
    l: usize,
    config: &SystemConfig,
    thresholds: &Thresholds,
) -> Result<f64, AnalyticsError> {
    let n = config.n_relays;
    if l > n {
        return Err(AnalyticsError::SizeOutOfRange { l, n });
    }
    let xi1 = xi1_of(thresholds)?;
    let ln_mass = ln_binomial(n, l)
        + l as f64 * (-3.0 * xi1)
        + if n > l { (n - l) as f64 * fail_prob(xi1).ln() } else { 0.0 };
    Ok(clamp_probability(ln_mass.exp(), "qualified-set size pmf"))
}

/// Exact outage probability of two-stage selection:
///
/// `sum_{l=0}^{N} C(N, l) F(2 r2)^l e^{-3 l xi1} (1 - e^{-3 xi1})^{N-l}`
///
/// where `F` is [`bottleneck_rate_cdf_total`]. Returns 1 for an infeasible
/// power split and for `N = 0`. The sum is evaluated in log space so that
/// high-SNR terms of order `rho^{-N}` survive intermediate underflow.
pub fn outage_probability(config: &SystemConfig) -> f64 {
    let n = config.n_relays;
    if n == 0 {
        return 1.0;
    }
    let thresholds = compute_thresholds(config);
    let Some(xi1) = thresholds.xi1 else { return 1.0 };
    let f = bottleneck_rate_cdf_total(2.0 * config.r2, config, &thresholds)
        .expect("feasible by construction");

    let ln_fq = if f > 0.0 { f.ln() - 3.0 * xi1 } else { f64::NEG_INFINITY };
    let one_minus_q = fail_prob(xi1);
    let ln_1mq = if one_minus_q > 0.0 { one_minus_q.ln() } else { f64::NEG_INFINITY };

    let ln_terms: Vec<f64> = (0..=n)
        .map(|l| {
            let mut lt = ln_binomial(n, l);
            if l > 0 {
                lt += l as f64 * ln_fq;
            }
            if n - l > 0 {
                lt += (n - l) as f64 * ln_1mq;
            }
            lt
        })
        .collect();

    let max = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return 0.0;
    }
    let sum: f64 = ln_terms.iter().map(|&lt| (lt - max).exp()).sum();
    clamp_probability((max + sum.ln()).exp(), "two-stage outage probability")
}

/// First-order rate-gap coefficient of the high-SNR expansion:
/// `gamma = 2 (2^(2 r2) - 1) / alpha2_sq - 2 eps1 / (alpha1_sq - eps1 * alpha2_sq)`,
/// equal to `2 rho (xi2 - xi1)`. Negative whenever `xi2 < xi1`, in which case
/// the high-SNR sum has sign-alternating terms (logged by
/// [`outage_high_snr_approx`]).
pub fn high_snr_gamma(config: &SystemConfig) -> Result<f64, AnalyticsError> {
    let thresholds = compute_thresholds(config);
    let xi1 = xi1_of(&thresholds)?;
    Ok(2.0 * config.rho * (thresholds.xi2 - xi1))
}

/// High-SNR approximation of [`outage_probability`]:
///
/// `rho^{-N} sum_{l=0}^{N} C(N, l) gamma^l (3 eps1 / (alpha1_sq - eps1 * alpha2_sq))^{N-l}`.
///
/// The value decays as `rho^{-N}`: doubling `rho` divides it by `2^N`. This
/// is an asymptote, not a probability — it exceeds 1 at low SNR; clamp at the
/// point of use if a probability is required.
pub fn outage_high_snr_approx(config: &SystemConfig) -> Result<f64, AnalyticsError> {
    let thresholds = compute_thresholds(config);
    xi1_of(&thresholds)?;
    let n = config.n_relays;
    let gamma = high_snr_gamma(config)?;
    let denom = config.alpha1_sq - thresholds.eps1 * config.alpha2_sq;
    let coeff = 3.0 * thresholds.eps1 / denom;
    if gamma < 0.0 && n > 0 {
        log::warn!(
            "high-SNR expansion has negative rate-gap coefficient gamma = {gamma}; \
             individual terms alternate in sign"
        );
    }
    let sum: f64 = (0..=n)
        .map(|l| {
            ln_binomial(n, l).exp() * gamma.powi(l as i32) * coeff.powi((n - l) as i32)
        })
        .sum();
    Ok(config.rho.powi(-(n as i32)) * sum)
}

/// Outage probability of max-min selection in the symmetric case
/// `xi1 = xi2`, where the qualified-set filter and the bottleneck condition
/// coincide: `(1 - e^{-3 xi1})^N`. Errors when the thresholds are not
/// symmetric to within 1e-9 relative.
pub fn maxmin_outage_symmetric(config: &SystemConfig) -> Result<f64, AnalyticsError> {
    let thresholds = compute_thresholds(config);
    let xi1 = xi1_of(&thresholds)?;
    let xi2 = thresholds.xi2;
    if (xi1 - xi2).abs() > 1e-9 * xi1.max(xi2) {
        return Err(AnalyticsError::AsymmetricThresholds { xi1, xi2 });
    }
    Ok(fail_prob(xi1).powi(config.n_relays as i32))
}

/// Least-squares diversity order: the negated slope of `ln(value)` against
/// `ln(rho)`. Needs at least three points with strictly increasing SNR and
/// values strictly inside `(0, 1)`.
pub fn estimate_diversity_order(points: &[OutageCurvePoint]) -> Result<f64, AnalyticsError> {
    if points.len() < 3 {
        return Err(AnalyticsError::TooFewPoints { have: points.len() });
    }
    if points.windows(2).any(|w| w[1].rho <= w[0].rho) {
        return Err(AnalyticsError::NonIncreasingSnr);
    }
    if let Some(p) = points.iter().find(|p| !(p.value > 0.0 && p.value < 1.0)) {
        return Err(AnalyticsError::DegenerateValue { value: p.value });
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.rho.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.value.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    Ok(-sxy / sxx)
}
