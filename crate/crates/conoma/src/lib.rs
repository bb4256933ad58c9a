//! Outage analysis and simulation for downlink cooperative NOMA relay selection.
//!
//! The scenario: a base station serves two users through one of `N`
//! decode-and-forward relays, superimposing both users' signals in the power
//! domain (user 1 gets the larger power share and a fixed rate target, user 2
//! is served opportunistically). Transmission takes two slots — BS to relay,
//! relay to users — and every link undergoes i.i.d. Rayleigh fading, so the
//! channel power gains are unit-mean exponentials.
//!
//! The crate provides:
//!
//! - [`model`] — scenario configuration, decoding thresholds, per-link
//!   decoding predicates and the per-realization outage event.
//! - [`channels`] — deterministic, seedable generation of channel power
//!   gains for the Monte Carlo engine.
//! - [`selection`] — relay selection strategies: two-stage, max-min, an
//!   exhaustive oracle, a uniform-random baseline, and the four-slot OMA
//!   reference.
//! - [`analytics`] — closed-form outage probability of the two-stage
//!   strategy, its high-SNR approximation, the symmetric-case max-min
//!   formula, and a diversity-order estimator.
//! - [`sim`] — a seeded Monte Carlo campaign engine with common random
//!   numbers across strategies and SNR points.
//! - [`verify`] (feature `verify`) — self-checks that cross-validate the
//!   closed forms against simulation and numerical quadrature.
//!
//! Simulation is carried out in the SNR domain: only channel power gains are
//! drawn, and a transmission is in outage when a gain falls below the
//! relevant decoding threshold. All probabilities use the half pre-log
//! (two-slot) rate convention, and all decoding comparisons are strict
//! (`gain > threshold`), which under continuous fading leaves the analytics
//! unaffected.

pub mod analytics;
pub mod channels;
pub mod model;
pub mod selection;
pub mod sim;
#[cfg(feature = "verify")]
pub mod verify;

pub use channels::SeedSpec;
pub use model::{ChannelRealization, SystemConfig, Thresholds};
pub use sim::{CampaignSpec, OutageStats, SnrGrid, Strategy};
