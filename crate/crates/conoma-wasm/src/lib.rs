//! Browser bindings: three JSON-in/JSON-out operations behind
//! `wasm-bindgen`, driving the static page in `www/`.
//!
//! - [`outage_curves`] — closed-form outage curves (exact, high-SNR
//!   asymptote, symmetric max-min where applicable) over an SNR grid;
//! - [`simulate_outage`] — a seeded in-browser Monte Carlo campaign;
//! - [`diversity_estimates`] — log-log slope fits of the curves.
//!
//! The JSON layer is plain `serde`, so everything here is unit-testable on
//! the host target; the `wasm_bindgen` wrappers only translate errors.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use conoma::analytics::{
    estimate_diversity_order, high_snr_gamma, maxmin_outage_symmetric, outage_high_snr_approx,
    outage_probability, CurveKind, OutageCurvePoint,
};
use conoma::model::{compute_thresholds, SystemConfig};
use conoma::sim::{db_to_linear, run_campaign, CampaignSpec, SnrGrid, Strategy};

/// Keep a single click responsive even on slow devices.
const MAX_BROWSER_TRIALS: u64 = 500_000;

fn default_n_relays() -> usize {
    3
}
fn default_alpha1_sq() -> f64 {
    0.75
}
fn default_r1() -> f64 {
    0.5
}
fn default_r2() -> f64 {
    2.0
}
fn default_grid() -> GridRequest {
    GridRequest { start_db: 10.0, stop_db: 40.0, step_db: 2.0 }
}
fn default_trials() -> u64 {
    20_000
}
fn default_seed() -> u64 {
    42
}
fn default_strategies() -> Vec<String> {
    vec!["two_stage".into(), "max_min".into()]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRequest {
    start_db: f64,
    stop_db: f64,
    step_db: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Request {
    #[serde(default = "default_n_relays")]
    n_relays: usize,
    #[serde(default = "default_alpha1_sq")]
    alpha1_sq: f64,
    #[serde(default = "default_r1")]
    r1: f64,
    #[serde(default = "default_r2")]
    r2: f64,
    #[serde(default = "default_grid")]
    snr_db: GridRequest,
    #[serde(default = "default_trials")]
    trials: u64,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_strategies")]
    strategies: Vec<String>,
}

impl Request {
    fn parse(json: &str) -> Result<Self, String> {
        serde_json::from_str(json).map_err(|e| format!("invalid request: {e}"))
    }

    fn grid(&self) -> SnrGrid {
        SnrGrid::new(self.snr_db.start_db, self.snr_db.stop_db, self.snr_db.step_db)
    }

    fn config_at(&self, rho_db: f64) -> SystemConfig {
        SystemConfig {
            n_relays: self.n_relays,
            alpha1_sq: self.alpha1_sq,
            alpha2_sq: 1.0 - self.alpha1_sq,
            r1: self.r1,
            r2: self.r2,
            rho: db_to_linear(rho_db),
        }
    }

    fn campaign(&self) -> Result<CampaignSpec, String> {
        let strategies: Result<Vec<Strategy>, String> =
            self.strategies.iter().map(|s| s.parse::<Strategy>()).collect();
        let spec = CampaignSpec {
            n_relays: self.n_relays,
            alpha1_sq: self.alpha1_sq,
            alpha2_sq: 1.0 - self.alpha1_sq,
            r1: self.r1,
            r2: self.r2,
            snr_grid: self.grid(),
            trials: self.trials,
            master_seed: self.seed,
            strategies: strategies?,
        };
        if spec.trials > MAX_BROWSER_TRIALS {
            return Err(format!("trials capped at {MAX_BROWSER_TRIALS} in the browser demo"));
        }
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }

    fn validate_scenario(&self) -> Result<(), String> {
        self.config_at(self.snr_db.start_db).validate().map_err(|e| e.to_string())?;
        if self.grid().points_db().is_empty() {
            return Err("SNR grid is empty (need step > 0 and stop >= start)".into());
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct Curve {
    label: &'static str,
    kind: CurveKind,
    values: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct CurvesResponse {
    points_db: Vec<f64>,
    feasible: bool,
    /// Rate-gap coefficient of the high-SNR expansion (present when feasible).
    gamma: Option<f64>,
    curves: Vec<Curve>,
    notes: Vec<String>,
}

fn outage_curves_impl(params: &str) -> Result<String, String> {
    let request = Request::parse(params)?;
    request.validate_scenario()?;
    let points_db = request.grid().points_db();
    let mut notes = Vec::new();

    let feasible = compute_thresholds(&request.config_at(points_db[0])).feasible();
    if !feasible {
        notes.push(
            "power split cannot support r1 (alpha1_sq <= eps1 * alpha2_sq): outage is 1 \
             everywhere"
                .into(),
        );
    }

    let mut curves = vec![Curve {
        label: "two_stage_exact",
        kind: CurveKind::ExactClosedForm,
        values: points_db
            .iter()
            .map(|&db| outage_probability(&request.config_at(db)))
            .collect(),
    }];

    if feasible {
        let gamma =
            high_snr_gamma(&request.config_at(points_db[0])).map_err(|e| e.to_string())?;
        if gamma < 0.0 {
            notes.push(format!(
                "high-SNR expansion has negative rate-gap coefficient gamma = {gamma:.3}; the \
                 asymptote is unreliable here"
            ));
        }
        curves.push(Curve {
            label: "two_stage_high_snr",
            kind: CurveKind::HighSnrApprox,
            values: points_db
                .iter()
                .map(|&db| {
                    let config = request.config_at(db);
                    OutageCurvePoint::new(
                        config.rho,
                        outage_high_snr_approx(&config).unwrap_or(1.0),
                        CurveKind::HighSnrApprox,
                    )
                    .value
                })
                .collect(),
        });
        if let Ok(first) = maxmin_outage_symmetric(&request.config_at(points_db[0])) {
            let mut values = vec![first];
            for &db in &points_db[1..] {
                values.push(maxmin_outage_symmetric(&request.config_at(db)).map_err(|e| e.to_string())?);
            }
            notes.push("thresholds are symmetric (xi1 = xi2): max-min matches two-stage".into());
            curves.push(Curve {
                label: "max_min_symmetric",
                kind: CurveKind::SymmetricMaxMin,
                values,
            });
        }
        return Ok(to_json(&CurvesResponse {
            points_db,
            feasible,
            gamma: Some(gamma),
            curves,
            notes,
        }));
    }

    Ok(to_json(&CurvesResponse { points_db, feasible, gamma: None, curves, notes }))
}

#[derive(Debug, Serialize)]
struct StrategySeries {
    name: &'static str,
    estimates: Vec<f64>,
    ci_lo: Vec<f64>,
    ci_hi: Vec<f64>,
    outage_counts: Vec<u64>,
}

#[derive(Debug, Serialize)]
struct SimulateResponse {
    points_db: Vec<f64>,
    trials: u64,
    seed: u64,
    feasible: bool,
    strategies: Vec<StrategySeries>,
    /// Exact two-stage curve for visual reference.
    two_stage_exact: Vec<f64>,
}

fn simulate_outage_impl(params: &str) -> Result<String, String> {
    let request = Request::parse(params)?;
    let spec = request.campaign()?;
    let stats = run_campaign(&spec).map_err(|e| e.to_string())?;
    let points_db = spec.snr_grid.points_db();

    let mut series = Vec::new();
    for &strategy in spec.strategies.iter() {
        let cells: Vec<_> = stats.cells_for(strategy).collect();
        if cells.is_empty() {
            continue;
        }
        let mut s = StrategySeries {
            name: strategy.name(),
            estimates: Vec::new(),
            ci_lo: Vec::new(),
            ci_hi: Vec::new(),
            outage_counts: Vec::new(),
        };
        for c in cells {
            let (lo, hi) = c.ci95();
            s.estimates.push(c.estimate());
            s.ci_lo.push(lo);
            s.ci_hi.push(hi);
            s.outage_counts.push(c.outage_count);
        }
        series.push(s);
    }

    Ok(to_json(&SimulateResponse {
        two_stage_exact: points_db
            .iter()
            .map(|&db| outage_probability(&spec.config_at(db)))
            .collect(),
        points_db,
        trials: spec.trials,
        seed: spec.master_seed,
        feasible: !stats.infeasible,
        strategies: series,
    }))
}

#[derive(Debug, Serialize)]
struct OrderRow {
    source: String,
    estimate: Option<f64>,
    expected: Option<f64>,
    note: Option<String>,
}

#[derive(Debug, Serialize)]
struct DiversityResponse {
    n_relays: usize,
    orders: Vec<OrderRow>,
}

fn diversity_estimates_impl(params: &str) -> Result<String, String> {
    let request = Request::parse(params)?;
    let spec = request.campaign()?;
    let points_db = spec.snr_grid.points_db();
    if points_db.last().unwrap_or(&0.0) - points_db.first().unwrap_or(&0.0) < 15.0 - 1e-9 {
        return Err("diversity fits need an SNR grid spanning at least 15 dB".into());
    }

    let mut orders = Vec::new();
    let closed: Vec<OutageCurvePoint> = points_db
        .iter()
        .map(|&db| {
            OutageCurvePoint::new(
                db_to_linear(db),
                outage_probability(&spec.config_at(db)),
                CurveKind::ExactClosedForm,
            )
        })
        .collect();
    orders.push(match estimate_diversity_order(&closed) {
        Ok(d) => OrderRow {
            source: "closed_form".into(),
            estimate: Some(d),
            expected: Some(spec.n_relays as f64),
            note: None,
        },
        Err(e) => OrderRow {
            source: "closed_form".into(),
            estimate: None,
            expected: Some(spec.n_relays as f64),
            note: Some(e.to_string()),
        },
    });

    let stats = run_campaign(&spec).map_err(|e| e.to_string())?;
    for &strategy in &spec.strategies {
        let points: Vec<OutageCurvePoint> = stats
            .cells_for(strategy)
            .map(|c| {
                OutageCurvePoint::new(db_to_linear(c.rho_db), c.estimate(), CurveKind::MonteCarlo)
            })
            .collect();
        let expected = match strategy {
            Strategy::TwoStage | Strategy::Oracle => Some(spec.n_relays as f64),
            Strategy::Random => Some(1.0),
            _ => None,
        };
        orders.push(match estimate_diversity_order(&points) {
            Ok(d) => OrderRow {
                source: strategy.name().into(),
                estimate: Some(d),
                expected,
                note: None,
            },
            Err(e) => OrderRow {
                source: strategy.name().into(),
                estimate: None,
                expected,
                note: Some(format!("{e}; raise trials or adjust the grid")),
            },
        });
    }

    Ok(to_json(&DiversityResponse { n_relays: spec.n_relays, orders }))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable response")
}

/// Closed-form outage curves for the given scenario (JSON in, JSON out).
#[wasm_bindgen]
pub fn outage_curves(params: &str) -> Result<String, JsError> {
    outage_curves_impl(params).map_err(|e| JsError::new(&e))
}

/// Seeded Monte Carlo campaign (JSON in, JSON out).
#[wasm_bindgen]
pub fn simulate_outage(params: &str) -> Result<String, JsError> {
    simulate_outage_impl(params).map_err(|e| JsError::new(&e))
}

/// Diversity-order estimates from the closed-form and simulated curves.
#[wasm_bindgen]
pub fn diversity_estimates(params: &str) -> Result<String, JsError> {
    diversity_estimates_impl(params).map_err(|e| JsError::new(&e))
}
