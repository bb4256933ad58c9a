//! Relay selection strategies and the OMA reference model.
//!
//! Four selectors operate on one channel realization:
//!
//! - **two-stage** — keep the relays that guarantee user 1's rate (the
//!   qualified set), then pick the one maximizing user 2's bottleneck gain;
//! - **max-min** — pick the relay with the strongest weakest gain among its
//!   three links, over all relays, with no knowledge of the thresholds;
//! - **oracle** — exhaustive search for any relay that avoids outage (a test
//!   instrument for optimality checks);
//! - **random** — uniform choice, the diversity-one control baseline.
//!
//! All argmax operations break ties toward the lowest relay index, a
//! probability-zero event under continuous fading.

use crate::channels::SeedSpec;
use crate::model::{outage_given_relay, ChannelRealization, SystemConfig, Thresholds};
use rand::Rng;

/// Outcome of a selection strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionResult {
    /// Selected relay, absent when the strategy has no admissible relay.
    pub chosen: Option<usize>,
    /// The qualified set, ascending; empty for strategies that do not build it.
    pub qualified_set: Vec<usize>,
}

/// Argmax with lowest-index tie-break over an ascending index iterator.
fn argmax_by_key(
    indices: impl Iterator<Item = usize>,
    key: impl Fn(usize) -> f64,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for n in indices {
        let k = key(n);
        if best.is_none_or(|(_, bk)| k > bk) {
            best = Some((n, k));
        }
    }
    best.map(|(n, _)| n)
}

/// Relays whose BS link and both relay-user links all clear `xi1`, i.e. can
/// deliver `s1` to everyone. Infeasible thresholds yield the empty set (no
/// relay can ever qualify in that regime).
pub fn qualified_set(realization: &ChannelRealization, thresholds: &Thresholds) -> Vec<usize> {
    let Some(xi1) = thresholds.xi1 else { return Vec::new() };
    (0..realization.n_relays())
        .filter(|&n| {
            realization.h_sq[n] > xi1
                && realization.g1_sq[n] > xi1
                && realization.g2_sq[n] > xi1
        })
        .collect()
}

/// Two-stage selection: within the qualified set, maximize user 2's
/// bottleneck gain `min(h_sq, g2_sq)` (equivalent to maximizing user 2's
/// rate, since the rate is monotone in that gain). No qualified relay means
/// no choice.
pub fn select_two_stage(
    realization: &ChannelRealization,
    thresholds: &Thresholds,
) -> SelectionResult {
    let set = qualified_set(realization, thresholds);
    let chosen = argmax_by_key(set.iter().copied(), |n| {
        realization.h_sq[n].min(realization.g2_sq[n])
    });
    SelectionResult { chosen, qualified_set: set }
}

/// Max-min selection over all relays: maximize
/// `min(h_sq, g1_sq, g2_sq)`. Threshold-unaware by design.
pub fn select_max_min(realization: &ChannelRealization) -> SelectionResult {
    let chosen = argmax_by_key(0..realization.n_relays(), |n| {
        realization.h_sq[n]
            .min(realization.g1_sq[n])
            .min(realization.g2_sq[n])
    });
    SelectionResult { chosen, qualified_set: Vec::new() }
}

/// Exhaustive-search oracle: the lowest-indexed relay that avoids outage, or
/// relay 0 when every choice is in outage (the caller records the outage).
pub fn select_oracle(
    realization: &ChannelRealization,
    thresholds: &Thresholds,
) -> SelectionResult {
    let n_relays = realization.n_relays();
    let chosen = (0..n_relays)
        .find(|&n| {
            !outage_given_relay(realization, n, thresholds)
                .expect("index within range")
                .outage()
        })
        .or(if n_relays > 0 { Some(0) } else { None });
    SelectionResult { chosen, qualified_set: Vec::new() }
}

/// Uniform random selection, deterministic in the seed.
pub fn select_random(realization: &ChannelRealization, seed: SeedSpec) -> SelectionResult {
    let n_relays = realization.n_relays();
    let chosen = (n_relays > 0).then(|| seed.rng().gen_range(0..n_relays));
    SelectionResult { chosen, qualified_set: Vec::new() }
}

/// Outage of the orthogonal baseline: four slots overall (BS->relay and
/// relay->user per user, at full power), hence a quarter pre-log on each
/// two-hop rate. The relay is picked by max-min, and user `i`'s two-hop
/// bottleneck gain must strictly clear `(2^(4 r_i) - 1) / rho`.
pub fn oma_outage(realization: &ChannelRealization, config: &SystemConfig) -> bool {
    let Some(n) = select_max_min(realization).chosen else { return true };
    let xi_u1 = ((4.0 * config.r1).exp2() - 1.0) / config.rho;
    let xi_u2 = ((4.0 * config.r2).exp2() - 1.0) / config.rho;
    let link1 = realization.h_sq[n].min(realization.g1_sq[n]);
    let link2 = realization.h_sq[n].min(realization.g2_sq[n]);
    !(link1 > xi_u1 && link2 > xi_u2)
}
