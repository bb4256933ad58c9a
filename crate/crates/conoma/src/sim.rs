//! Seeded Monte Carlo campaign engine.
//!
//! A campaign runs `trials` independent channel draws against a grid of SNR
//! points and a set of selection strategies. Trial `t` draws its gains from
//! stream `t` of the master seed and reuses the same draw for every strategy
//! and every SNR point (common random numbers — the SNR enters only through
//! the thresholds). Aggregation is plain integer addition of outage counts,
//! so results are bit-identical for a fixed master seed regardless of how
//! trials are sharded across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{sample_realization, SeedSpec};
use crate::model::{
    compute_thresholds, ChannelRealization, ConfigError, SystemConfig, Thresholds,
};
use crate::selection::{
    oma_outage, select_max_min, select_oracle, select_random, select_two_stage,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Stream-id namespace for the random-selection strategy, kept disjoint from
/// the channel streams by salting the master seed.
const RANDOM_SELECTION_SALT: u64 = 0x52454c5f52414e44; // "REL_RAND"

/// Normal 97.5% quantile, for two-sided 95% confidence intervals.
const Z_95: f64 = 1.959963984540054;

/// A relay selection strategy (or the OMA reference) evaluated by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    TwoStage,
    MaxMin,
    Oracle,
    Random,
    Oma,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::TwoStage,
        Strategy::MaxMin,
        Strategy::Oracle,
        Strategy::Random,
        Strategy::Oma,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::TwoStage => "two_stage",
            Strategy::MaxMin => "max_min",
            Strategy::Oracle => "oracle",
            Strategy::Random => "random",
            Strategy::Oma => "oma",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two_stage" => Ok(Strategy::TwoStage),
            "max_min" => Ok(Strategy::MaxMin),
            "oracle" => Ok(Strategy::Oracle),
            "random" => Ok(Strategy::Random),
            "oma" => Ok(Strategy::Oma),
            other => Err(format!(
                "unknown strategy {other:?}; expected one of two_stage, max_min, oracle, random, oma"
            )),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive SNR grid in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrGrid {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl SnrGrid {
    pub fn new(start_db: f64, stop_db: f64, step_db: f64) -> Self {
        Self { start_db, stop_db, step_db }
    }

    /// Grid points `start, start + step, ...` up to `stop` (inclusive within
    /// a small tolerance for float stepping). A malformed grid (non-positive
    /// or non-finite step, reversed bounds, more than [`Self::MAX_POINTS`])
    /// yields no points; [`CampaignSpec::validate`] reports it as an error.
    pub fn points_db(&self) -> Vec<f64> {
        if !self.step_db.is_finite()
            || self.step_db <= 0.0
            || !self.start_db.is_finite()
            || !self.stop_db.is_finite()
            || self.stop_db < self.start_db
            || (self.stop_db - self.start_db) / self.step_db >= Self::MAX_POINTS as f64
        {
            return Vec::new();
        }
        let mut points = Vec::new();
        let mut k = 0u32;
        loop {
            let p = self.start_db + self.step_db * k as f64;
            if p > self.stop_db + 1e-9 {
                break;
            }
            points.push(p);
            k += 1;
        }
        points
    }

    /// Upper bound on grid resolution; beyond this the grid is rejected.
    pub const MAX_POINTS: usize = 100_000;

    fn validate(&self) -> Result<(), CampaignError> {
        if self.points_db().is_empty() { Err(CampaignError::EmptyGrid) } else { Ok(()) }
    }
}

/// Convert dB to linear SNR.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Full description of a Monte Carlo campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub n_relays: usize,
    pub alpha1_sq: f64,
    pub alpha2_sq: f64,
    /// Rate targets in bits per channel use.
    pub r1: f64,
    pub r2: f64,
    pub snr_grid: SnrGrid,
    pub trials: u64,
    pub master_seed: u64,
    /// Strategies to evaluate (deduplicated, order preserved).
    pub strategies: Vec<Strategy>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CampaignError {
    #[error("campaign needs at least one trial")]
    NoTrials,
    #[error("campaign needs at least one relay")]
    NoRelays,
    #[error("SNR grid is empty or malformed (need finite bounds, step > 0, stop >= start, at most {} points)", SnrGrid::MAX_POINTS)]
    EmptyGrid,
    #[error("campaign needs at least one strategy")]
    NoStrategies,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("statistics contain no cells for strategy {0}")]
    MissingStrategy(Strategy),
}

impl CampaignSpec {
    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.trials == 0 {
            return Err(CampaignError::NoTrials);
        }
        if self.n_relays == 0 {
            return Err(CampaignError::NoRelays);
        }
        self.snr_grid.validate()?;
        if self.strategies.is_empty() {
            return Err(CampaignError::NoStrategies);
        }
        self.config_at(self.snr_grid.start_db).validate()?;
        Ok(())
    }

    /// The scalar configuration at one grid point.
    pub fn config_at(&self, rho_db: f64) -> SystemConfig {
        SystemConfig {
            n_relays: self.n_relays,
            alpha1_sq: self.alpha1_sq,
            alpha2_sq: self.alpha2_sq,
            r1: self.r1,
            r2: self.r2,
            rho: db_to_linear(rho_db),
        }
    }

    fn deduped_strategies(&self) -> Vec<Strategy> {
        let mut seen = Vec::new();
        for &s in &self.strategies {
            if !seen.contains(&s) {
                seen.push(s);
            }
        }
        seen
    }
}

/// Aggregated outcome for one (strategy, SNR point) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub strategy: Strategy,
    pub rho_db: f64,
    pub trials: u64,
    pub outage_count: u64,
}

impl CellStats {
    /// Outage probability estimate `count / trials`.
    pub fn estimate(&self) -> f64 {
        self.outage_count as f64 / self.trials as f64
    }

    /// Binomial standard error `sqrt(p (1 - p) / trials)` at the estimate.
    pub fn std_err(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Normal-approximation 95% confidence interval, clamped to `[0, 1]`.
    /// Unreliable below ~20 outage events; the campaign runner flags such
    /// cells.
    pub fn ci95(&self) -> (f64, f64) {
        let p = self.estimate();
        let half = Z_95 * self.std_err();
        ((p - half).max(0.0), (p + half).min(1.0))
    }
}

/// All cells of a campaign, in (strategy-major, SNR-minor) order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageStats {
    pub cells: Vec<CellStats>,
    /// True when the power split cannot support `r1`: every NOMA cell is
    /// all-outage by construction (the OMA reference is unaffected).
    pub infeasible: bool,
}

impl OutageStats {
    pub fn cell(&self, strategy: Strategy, rho_db: f64) -> Option<&CellStats> {
        self.cells
            .iter()
            .find(|c| c.strategy == strategy && (c.rho_db - rho_db).abs() < 1e-9)
    }

    pub fn cells_for(&self, strategy: Strategy) -> impl Iterator<Item = &CellStats> {
        self.cells.iter().filter(move |c| c.strategy == strategy)
    }

    /// Cells whose event count is too small for the normal-approximation CI.
    pub fn sparse_cells(&self) -> impl Iterator<Item = &CellStats> {
        self.cells.iter().filter(|c| c.outage_count < 20)
    }
}

/// Per-trial outage indicator of one strategy.
///
/// `random_choice` carries the trial's pre-drawn uniform relay index; it is
/// required for [`Strategy::Random`] and ignored otherwise.
pub fn strategy_outage(
    strategy: Strategy,
    realization: &ChannelRealization,
    config: &SystemConfig,
    thresholds: &Thresholds,
    random_choice: Option<usize>,
) -> bool {
    let outage_with = |relay: Option<usize>| -> bool {
        match relay {
            Some(n) => crate::model::outage_given_relay(realization, n, thresholds)
                .expect("selector returns in-range indices")
                .outage(),
            None => true,
        }
    };
    match strategy {
        Strategy::TwoStage => outage_with(select_two_stage(realization, thresholds).chosen),
        Strategy::MaxMin => outage_with(select_max_min(realization).chosen),
        Strategy::Oracle => outage_with(select_oracle(realization, thresholds).chosen),
        Strategy::Random => outage_with(random_choice),
        Strategy::Oma => oma_outage(realization, config),
    }
}

/// The uniform relay index used by [`Strategy::Random`] for one trial, drawn
/// from a stream disjoint from the channel streams.
pub fn random_choice_for_trial(master_seed: u64, trial: u64, n_relays: usize) -> Option<usize> {
    let dummy = ChannelRealization {
        h_sq: vec![0.0; n_relays],
        g1_sq: vec![0.0; n_relays],
        g2_sq: vec![0.0; n_relays],
    };
    select_random(&dummy, SeedSpec::new(master_seed ^ RANDOM_SELECTION_SALT, trial)).chosen
}

struct CampaignLayout {
    points_db: Vec<f64>,
    configs: Vec<SystemConfig>,
    thresholds: Vec<Thresholds>,
    strategies: Vec<Strategy>,
}

impl CampaignLayout {
    fn cell_count(&self) -> usize {
        self.strategies.len() * self.points_db.len()
    }
}

/// Count one trial into `counts` (strategy-major, SNR-minor layout).
fn tally_trial(spec: &CampaignSpec, layout: &CampaignLayout, trial: u64, counts: &mut [u64]) {
    let realization = sample_realization(SeedSpec::new(spec.master_seed, trial), spec.n_relays)
        .expect("n_relays validated > 0");
    let needs_random = layout.strategies.contains(&Strategy::Random);
    let random_choice = needs_random
        .then(|| random_choice_for_trial(spec.master_seed, trial, spec.n_relays))
        .flatten();
    for (si, &strategy) in layout.strategies.iter().enumerate() {
        for pi in 0..layout.points_db.len() {
            let outage = strategy_outage(
                strategy,
                &realization,
                &layout.configs[pi],
                &layout.thresholds[pi],
                random_choice,
            );
            if outage {
                counts[si * layout.points_db.len() + pi] += 1;
            }
        }
    }
}

/// Run a campaign. Deterministic in `master_seed`: trial `t` always draws
/// from stream `t`, and counts are aggregated by commutative integer
/// addition, so the result does not depend on thread count or scheduling.
pub fn run_campaign(spec: &CampaignSpec) -> Result<OutageStats, CampaignError> {
    spec.validate()?;
    let points_db = spec.snr_grid.points_db();
    let configs: Vec<SystemConfig> = points_db.iter().map(|&db| spec.config_at(db)).collect();
    let thresholds: Vec<Thresholds> = configs.iter().map(compute_thresholds).collect();
    let infeasible = !thresholds[0].feasible();
    if infeasible {
        log::warn!(
            "power split alpha1_sq = {} cannot support r1 = {}: every NOMA strategy is in \
             permanent outage",
            spec.alpha1_sq,
            spec.r1
        );
    }
    let layout = CampaignLayout {
        points_db,
        configs,
        thresholds,
        strategies: spec.deduped_strategies(),
    };

    let counts = tally_all_trials(spec, &layout);

    let mut cells = Vec::with_capacity(layout.cell_count());
    for (si, &strategy) in layout.strategies.iter().enumerate() {
        for (pi, &rho_db) in layout.points_db.iter().enumerate() {
            cells.push(CellStats {
                strategy,
                rho_db,
                trials: spec.trials,
                outage_count: counts[si * layout.points_db.len() + pi],
            });
        }
    }
    Ok(OutageStats { cells, infeasible })
}

#[cfg(feature = "parallel")]
fn tally_all_trials(spec: &CampaignSpec, layout: &CampaignLayout) -> Vec<u64> {
    let zero = || vec![0u64; layout.cell_count()];
    (0..spec.trials)
        .into_par_iter()
        .fold(zero, |mut acc, trial| {
            tally_trial(spec, layout, trial, &mut acc);
            acc
        })
        .reduce(zero, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        })
}

#[cfg(not(feature = "parallel"))]
fn tally_all_trials(spec: &CampaignSpec, layout: &CampaignLayout) -> Vec<u64> {
    let mut counts = vec![0u64; layout.cell_count()];
    for trial in 0..spec.trials {
        tally_trial(spec, layout, trial, &mut counts);
    }
    counts
}

/// Signed outage gap between max-min and two-stage at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub rho_db: f64,
    /// `estimate(max_min) - estimate(two_stage)`; positive means two-stage is
    /// ahead.
    pub gap: f64,
    /// Conservative joint standard error `sqrt(se_mm^2 + se_ts^2)` (the
    /// estimates share random numbers, so their positive covariance only
    /// shrinks the true error).
    pub joint_se: f64,
    /// Two-stage statistically worse at 3 joint SE. Must never happen.
    pub two_stage_worse: bool,
}

/// Per-SNR comparison of the two headline strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<GapRow>,
    pub any_two_stage_worse: bool,
}

/// Compare max-min against two-stage across the grid. Requires both
/// strategies in `stats`.
pub fn compare_strategies(stats: &OutageStats) -> Result<ComparisonReport, CampaignError> {
    let two_stage: Vec<&CellStats> = stats.cells_for(Strategy::TwoStage).collect();
    let max_min: Vec<&CellStats> = stats.cells_for(Strategy::MaxMin).collect();
    if two_stage.is_empty() {
        return Err(CampaignError::MissingStrategy(Strategy::TwoStage));
    }
    if max_min.is_empty() {
        return Err(CampaignError::MissingStrategy(Strategy::MaxMin));
    }
    let mut rows = Vec::with_capacity(two_stage.len());
    for ts in &two_stage {
        let mm = max_min
            .iter()
            .find(|c| (c.rho_db - ts.rho_db).abs() < 1e-9)
            .ok_or(CampaignError::MissingStrategy(Strategy::MaxMin))?;
        let gap = mm.estimate() - ts.estimate();
        let joint_se = (mm.std_err().powi(2) + ts.std_err().powi(2)).sqrt();
        rows.push(GapRow {
            rho_db: ts.rho_db,
            gap,
            joint_se,
            two_stage_worse: gap < -3.0 * joint_se && joint_se > 0.0,
        });
    }
    Ok(ComparisonReport { any_two_stage_worse: rows.iter().any(|r| r.two_stage_worse), rows })
}
