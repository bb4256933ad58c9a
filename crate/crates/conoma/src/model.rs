//! Domain types, decoding thresholds and the per-realization outage event.
//!
//! Everything downstream (selection, analytics, simulation) is expressed in
//! terms of the two gain thresholds computed here:
//!
//! - `xi1` — the gain a link needs so that the stronger user's signal `s1`
//!   survives SIC decoding at rate `r1` with power split `alpha1_sq`,
//! - `xi2` — the gain a link needs so that `s2` is decodable at rate `r2`
//!   after `s1` has been removed.
//!
//! A node decodes iff its channel power gain strictly exceeds the threshold.
//! When the power split cannot support `r1` at any SNR (`alpha1_sq <=
//! eps1 * alpha2_sq`) the thresholds are infeasible and every transmission is
//! in outage regardless of the channel draw.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scenario parameters: relay count, power split, rate targets and SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Number of candidate relays `N`. Zero is meaningful only for the
    /// closed-form analytics (no relay means certain outage); the samplers
    /// and the campaign engine require at least one.
    pub n_relays: usize,
    /// Power fraction of user 1's signal, `alpha1^2`.
    pub alpha1_sq: f64,
    /// Power fraction of user 2's signal, `alpha2^2`.
    pub alpha2_sq: f64,
    /// Rate target of user 1 in bits per channel use.
    pub r1: f64,
    /// Rate target of user 2 in bits per channel use.
    pub r2: f64,
    /// Transmit SNR `rho`, linear scale.
    pub rho: f64,
}

/// Reasons a [`SystemConfig`] is rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("power split must satisfy alpha1_sq + alpha2_sq = 1 with both in (0, 1); got {alpha1_sq} + {alpha2_sq}")]
    PowerSplit { alpha1_sq: f64, alpha2_sq: f64 },
    #[error("user 1 must get at least half the power (alpha1_sq >= alpha2_sq); got {alpha1_sq} < {alpha2_sq}")]
    PowerOrder { alpha1_sq: f64, alpha2_sq: f64 },
    #[error("rate target {name} must be positive and finite; got {value}")]
    Rate { name: &'static str, value: f64 },
    #[error("transmit SNR must be positive and finite; got {value}")]
    Snr { value: f64 },
}

/// Absolute tolerance on `alpha1_sq + alpha2_sq = 1`.
pub const POWER_SPLIT_TOL: f64 = 1e-12;

impl SystemConfig {
    /// Build a validated configuration. `n_relays = 0` is accepted (see the
    /// field docs).
    pub fn new(
        n_relays: usize,
        alpha1_sq: f64,
        alpha2_sq: f64,
        r1: f64,
        r2: f64,
        rho: f64,
    ) -> Result<Self, ConfigError> {
        let config = Self { n_relays, alpha1_sq, alpha2_sq, r1, r2, rho };
        config.validate()?;
        Ok(config)
    }

    /// Check the construction invariants without consuming the value.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let in_unit = |a: f64| a > 0.0 && a < 1.0;
        if !in_unit(self.alpha1_sq)
            || !in_unit(self.alpha2_sq)
            || (self.alpha1_sq + self.alpha2_sq - 1.0).abs() > POWER_SPLIT_TOL
        {
            return Err(ConfigError::PowerSplit {
                alpha1_sq: self.alpha1_sq,
                alpha2_sq: self.alpha2_sq,
            });
        }
        if self.alpha1_sq < self.alpha2_sq {
            return Err(ConfigError::PowerOrder {
                alpha1_sq: self.alpha1_sq,
                alpha2_sq: self.alpha2_sq,
            });
        }
        for (name, value) in [("r1", self.r1), ("r2", self.r2)] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ConfigError::Rate { name, value });
            }
        }
        if !self.rho.is_finite() || self.rho <= 0.0 {
            return Err(ConfigError::Snr { value: self.rho });
        }
        Ok(())
    }
}

/// Decoding thresholds derived from a [`SystemConfig`].
///
/// `xi1` is `None` when the power split is infeasible for `r1`
/// (`alpha1_sq <= eps1 * alpha2_sq`), in which case the outage probability is
/// one for every channel draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// SINR target for `s1`: `2^(2 r1) - 1`.
    pub eps1: f64,
    /// SNR target for `s2`: `2^(2 r2) - 1`.
    pub eps2: f64,
    /// Gain threshold for decoding `s1`: `(eps1 / rho) / (alpha1_sq - eps1 * alpha2_sq)`.
    pub xi1: Option<f64>,
    /// Gain threshold for decoding `s2`: `eps2 / (rho * alpha2_sq)`.
    pub xi2: f64,
}

impl Thresholds {
    /// Whether the power split can support user 1's rate at all.
    pub fn feasible(&self) -> bool {
        self.xi1.is_some()
    }
}

/// One draw of all `3 N` channel power gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    /// BS -> relay gains `|h_n|^2`.
    pub h_sq: Vec<f64>,
    /// Relay -> user 1 gains `|g_{n,1}|^2`.
    pub g1_sq: Vec<f64>,
    /// Relay -> user 2 gains `|g_{n,2}|^2`.
    pub g2_sq: Vec<f64>,
}

impl ChannelRealization {
    /// Build a realization, checking that the three gain vectors have equal
    /// length and no negative entries.
    pub fn new(h_sq: Vec<f64>, g1_sq: Vec<f64>, g2_sq: Vec<f64>) -> Result<Self, ModelError> {
        if h_sq.len() != g1_sq.len() || h_sq.len() != g2_sq.len() {
            return Err(ModelError::GainLengthMismatch {
                h: h_sq.len(),
                g1: g1_sq.len(),
                g2: g2_sq.len(),
            });
        }
        if [&h_sq, &g1_sq, &g2_sq]
            .iter()
            .any(|v| v.iter().any(|&g| g.is_nan() || g < 0.0))
        {
            return Err(ModelError::NegativeGain);
        }
        Ok(Self { h_sq, g1_sq, g2_sq })
    }

    /// Number of relays covered by this draw.
    pub fn n_relays(&self) -> usize {
        self.h_sq.len()
    }
}

/// Outage event for one realization and one selected relay, split into the
/// two disjoint failure modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutageBreakdown {
    /// `s1` undecodable at the relay or at either user (any of the three
    /// gains at or below `xi1`).
    pub o1: bool,
    /// `s1` fine everywhere but `s2` undecodable at the relay or at user 2.
    /// Mutually exclusive with `o1` by construction.
    pub o2: bool,
}

impl OutageBreakdown {
    /// Overall outage: either failure mode.
    pub fn outage(&self) -> bool {
        self.o1 || self.o2
    }
}

/// Contract violations in the model layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("thresholds are infeasible (alpha1_sq <= eps1 * alpha2_sq); xi1 is undefined")]
    InfeasibleThresholds,
    #[error("relay index {index} out of range for {n_relays} relays")]
    RelayIndex { index: usize, n_relays: usize },
    #[error("gain vectors have mismatched lengths: h={h}, g1={g1}, g2={g2}")]
    GainLengthMismatch { h: usize, g1: usize, g2: usize },
    #[error("channel power gains must be non-negative")]
    NegativeGain,
}

/// Derive the decoding thresholds for a configuration.
///
/// Infeasibility (`alpha1_sq <= eps1 * alpha2_sq`) is reported as
/// `xi1 = None`, not as an error: the outage probability is simply one in
/// that regime.
pub fn compute_thresholds(config: &SystemConfig) -> Thresholds {
    let eps1 = (2.0 * config.r1).exp2() - 1.0;
    let eps2 = (2.0 * config.r2).exp2() - 1.0;
    let denom = config.alpha1_sq - eps1 * config.alpha2_sq;
    let xi1 = (denom > 0.0).then(|| (eps1 / config.rho) / denom);
    let xi2 = eps2 / (config.rho * config.alpha2_sq);
    Thresholds { eps1, eps2, xi1, xi2 }
}

/// Can a relay decode `s1` from the broadcast mixture? Strict comparison
/// `gain > xi1`, equivalent to the SINR `gain * alpha1_sq / (gain * alpha2_sq
/// + 1/rho)` exceeding `eps1`.
pub fn relay_decodes_s1(h_sq_n: f64, thresholds: &Thresholds) -> Result<bool, ModelError> {
    let xi1 = thresholds.xi1.ok_or(ModelError::InfeasibleThresholds)?;
    Ok(h_sq_n > xi1)
}

/// Can a user decode `s1` from the relay's retransmission? Same threshold
/// form as the relay-side check.
pub fn user_decodes_s1(g_sq: f64, thresholds: &Thresholds) -> Result<bool, ModelError> {
    let xi1 = thresholds.xi1.ok_or(ModelError::InfeasibleThresholds)?;
    Ok(g_sq > xi1)
}

/// Can a node decode `s2` once `s1` is removed? Strict comparison
/// `gain > xi2`. Defined regardless of feasibility.
pub fn node_decodes_s2(gain: f64, thresholds: &Thresholds) -> bool {
    gain > thresholds.xi2
}

/// Evaluate the outage event when `relay` forwards the mixture.
///
/// With infeasible thresholds the outcome is unconditional outage, reported
/// as `o1` by convention.
pub fn outage_given_relay(
    realization: &ChannelRealization,
    relay: usize,
    thresholds: &Thresholds,
) -> Result<OutageBreakdown, ModelError> {
    let n_relays = realization.n_relays();
    if relay >= n_relays {
        return Err(ModelError::RelayIndex { index: relay, n_relays });
    }
    let Some(xi1) = thresholds.xi1 else {
        return Ok(OutageBreakdown { o1: true, o2: false });
    };
    let h = realization.h_sq[relay];
    let g1 = realization.g1_sq[relay];
    let g2 = realization.g2_sq[relay];
    let o1 = !(h > xi1 && g1 > xi1 && g2 > xi1);
    let o2 = !o1 && !(h > thresholds.xi2 && g2 > thresholds.xi2);
    Ok(OutageBreakdown { o1, o2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(alpha1_sq: f64, r1: f64, r2: f64, rho: f64) -> SystemConfig {
        SystemConfig::new(3, alpha1_sq, 1.0 - alpha1_sq, r1, r2, rho).unwrap()
    }

    #[test]
    fn thresholds_hand_evaluated() {
        let t = compute_thresholds(&config(0.8, 0.5, 1.0, 10.0));
        assert!((t.eps1 - 1.0).abs() < 1e-12);
        assert!((t.eps2 - 3.0).abs() < 1e-12);
        assert!((t.xi1.unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((t.xi2 - 1.5).abs() < 1e-15);
        assert!(t.feasible());
    }

    #[test]
    fn thresholds_infeasible_power_split() {
        // alpha1_sq = 0.4 <= eps1 * alpha2_sq = 0.6 at r1 = 0.5: always outage.
        let cfg = SystemConfig { n_relays: 1, alpha1_sq: 0.4, alpha2_sq: 0.6, r1: 0.5, r2: 1.0, rho: 10.0 };
        let t = compute_thresholds(&cfg);
        assert!((t.eps1 - 1.0).abs() < 1e-12);
        assert!(!t.feasible());
        assert_eq!(t.xi1, None);
    }

    #[test]
    fn thresholds_vanish_at_high_snr() {
        let t_lo = compute_thresholds(&config(0.8, 0.5, 1.0, 1e2));
        let t_hi = compute_thresholds(&config(0.8, 0.5, 1.0, 1e12));
        assert!(t_hi.xi1.unwrap() < 1e-10);
        assert!(t_hi.xi2 < 1e-9);
        // Both scale as 1/rho.
        assert!((t_hi.xi1.unwrap() * 1e12 - t_lo.xi1.unwrap() * 1e2).abs() < 1e-12);
        assert!((t_hi.xi2 * 1e12 - t_lo.xi2 * 1e2).abs() < 1e-9);
    }

    #[test]
    fn s1_predicates_strict_boundary() {
        let t = compute_thresholds(&config(0.8, 0.5, 1.0, 10.0));
        let xi1 = t.xi1.unwrap();
        assert!(relay_decodes_s1(2.0 * xi1, &t).unwrap());
        assert!(!relay_decodes_s1(xi1, &t).unwrap());
        assert!(!relay_decodes_s1(0.0, &t).unwrap());
        assert!(user_decodes_s1(2.0 * xi1, &t).unwrap());
        assert!(!user_decodes_s1(xi1, &t).unwrap());
    }

    #[test]
    fn s1_predicate_matches_sinr_form() {
        // (g a1) / (g a2 + 1/rho) > eps1  <=>  g > xi1, on a grid of gains.
        let cfg = config(0.7, 0.4, 1.3, 25.0);
        let t = compute_thresholds(&cfg);
        let xi1 = t.xi1.unwrap();
        for k in 0..200 {
            let g = 0.02 * k as f64;
            let sinr = g * cfg.alpha1_sq / (g * cfg.alpha2_sq + 1.0 / cfg.rho);
            assert_eq!(sinr > t.eps1, g > xi1, "gain {g}");
        }
    }

    #[test]
    fn s1_predicates_reject_infeasible() {
        let cfg = SystemConfig { n_relays: 1, alpha1_sq: 0.4, alpha2_sq: 0.6, r1: 0.5, r2: 1.0, rho: 10.0 };
        let t = compute_thresholds(&cfg);
        assert_eq!(relay_decodes_s1(5.0, &t), Err(ModelError::InfeasibleThresholds));
        assert_eq!(user_decodes_s1(5.0, &t), Err(ModelError::InfeasibleThresholds));
    }

    #[test]
    fn s2_predicate_hand_evaluated() {
        // r2 = 1, rho = 10, alpha2_sq = 0.2 gives xi2 = 1.5.
        let t = compute_thresholds(&config(0.8, 0.5, 1.0, 10.0));
        assert!(!node_decodes_s2(t.xi2, &t));
        assert!(node_decodes_s2(10.0 * t.xi2, &t));
        assert!(!node_decodes_s2(1.4, &t));
    }

    fn single_relay(h: f64, g1: f64, g2: f64) -> ChannelRealization {
        ChannelRealization::new(vec![h], vec![g1], vec![g2]).unwrap()
    }

    #[test]
    fn outage_clear_of_both_thresholds() {
        let t = compute_thresholds(&config(0.8, 0.5, 1.0, 10.0));
        let big = 2.0 * t.xi1.unwrap().max(t.xi2);
        let b = outage_given_relay(&single_relay(big, big, big), 0, &t).unwrap();
        assert!(!b.o1 && !b.o2 && !b.outage());
    }

    #[test]
    fn outage_s2_mode_when_xi2_dominates() {
        // xi1 = 1/6, xi2 = 1.5: gains at 2*xi1 pass s1 but h fails s2.
        let t = compute_thresholds(&config(0.8, 0.5, 1.0, 10.0));
        let g = 2.0 * t.xi1.unwrap();
        assert!(g <= t.xi2);
        let b = outage_given_relay(&single_relay(g, g, g), 0, &t).unwrap();
        assert!(!b.o1 && b.o2 && b.outage());
    }

    #[test]
    fn outage_s1_mode_when_user1_fails() {
        let t = compute_thresholds(&config(0.8, 0.5, 1.0, 10.0));
        let xi1 = t.xi1.unwrap();
        let b = outage_given_relay(&single_relay(100.0, xi1, 100.0), 0, &t).unwrap();
        assert!(b.o1 && !b.o2);
    }

    #[test]
    fn outage_index_out_of_range() {
        let t = compute_thresholds(&config(0.8, 0.5, 1.0, 10.0));
        let r = single_relay(1.0, 1.0, 1.0);
        assert_eq!(
            outage_given_relay(&r, 1, &t),
            Err(ModelError::RelayIndex { index: 1, n_relays: 1 })
        );
    }

    #[test]
    fn outage_unconditional_when_infeasible() {
        let cfg = SystemConfig { n_relays: 1, alpha1_sq: 0.4, alpha2_sq: 0.6, r1: 0.5, r2: 1.0, rho: 10.0 };
        let t = compute_thresholds(&cfg);
        let b = outage_given_relay(&single_relay(1e9, 1e9, 1e9), 0, &t).unwrap();
        assert!(b.o1 && !b.o2 && b.outage());
    }

    #[test]
    fn config_validation_errors() {
        assert!(matches!(
            SystemConfig::new(1, 0.8, 0.3, 0.5, 1.0, 10.0),
            Err(ConfigError::PowerSplit { .. })
        ));
        assert!(matches!(
            SystemConfig::new(1, 0.3, 0.7, 0.5, 1.0, 10.0),
            Err(ConfigError::PowerOrder { .. })
        ));
        assert!(matches!(
            SystemConfig::new(1, 0.8, 0.2, -0.5, 1.0, 10.0),
            Err(ConfigError::Rate { name: "r1", .. })
        ));
        assert!(matches!(
            SystemConfig::new(1, 0.8, 0.2, 0.5, 1.0, 0.0),
            Err(ConfigError::Snr { .. })
        ));
        assert!(SystemConfig::new(0, 0.8, 0.2, 0.5, 1.0, 10.0).is_ok());
    }

    #[test]
    fn realization_construction_checks() {
        assert!(matches!(
            ChannelRealization::new(vec![1.0], vec![1.0, 2.0], vec![1.0]),
            Err(ModelError::GainLengthMismatch { .. })
        ));
        assert!(matches!(
            ChannelRealization::new(vec![1.0], vec![-0.1], vec![1.0]),
            Err(ModelError::NegativeGain)
        ));
        assert!(matches!(
            ChannelRealization::new(vec![1.0], vec![f64::NAN], vec![1.0]),
            Err(ModelError::NegativeGain)
        ));
    }
}
