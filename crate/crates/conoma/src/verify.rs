//! Built-in cross-validation: every closed form is checked against an
//! independent route (seeded simulation, numerical quadrature, or a
//! goodness-of-fit test) so a single command can certify an installation.
//!
//! The checks are intentionally redundant with nothing shared between the
//! two sides of each comparison: the Monte Carlo side never evaluates the
//! closed forms, and the quadrature side integrates the raw conditional
//! density rather than the antiderivative.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::analytics::{
    bottleneck_rate_cdf_total, empty_qualified_set_prob, maxmin_outage_symmetric,
    outage_probability, qualified_set_size_pmf,
};
use crate::channels::{sample_realization, SeedSpec};
use crate::model::{compute_thresholds, SystemConfig, Thresholds};
use crate::selection::qualified_set;
use crate::sim::{
    compare_strategies, db_to_linear, run_campaign, strategy_outage, CampaignSpec, SnrGrid,
    Strategy,
};

/// Options for the verification run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Trials per Monte Carlo comparison point.
    pub trials: u64,
    /// Trials per grid point of the per-trial optimality check.
    pub dominance_trials: u64,
    /// Master seed for all stochastic checks.
    pub seed: u64,
    /// Test hook: scale factor applied to `xi1` on the analytic side of the
    /// closed-form comparison. Anything but 1.0 must make verification fail.
    pub xi1_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { trials: 100_000, dominance_trials: 20_000, seed: 20240, xi1_scale: 1.0 }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// The check's summary statistic (meaning depends on the check).
    pub statistic: f64,
    /// The bound the statistic is held to.
    pub threshold: f64,
    /// Per-point z-scores where the check is a z-test family, else empty.
    pub z_scores: Vec<f64>,
    pub details: String,
}

/// Full verification report.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Composite Simpson quadrature over `[a, b]` with an even interval count.
pub fn integrate_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    assert!(intervals >= 2 && intervals.is_multiple_of(2), "need an even interval count");
    let h = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

/// Default scenario shared by the stochastic checks.
fn scenario(n_relays: usize, rho_db: f64) -> SystemConfig {
    SystemConfig {
        n_relays,
        alpha1_sq: 0.75,
        alpha2_sq: 0.25,
        r1: 0.5,
        r2: 2.0,
        rho: db_to_linear(rho_db),
    }
}

/// Outage value assembled from the component laws (empty-set probability,
/// size pmf, conditional CDF), with an optional scale on `xi1` (the
/// fault-injection hook).
fn outage_from_components(config: &SystemConfig, xi1_scale: f64) -> f64 {
    let mut thresholds = compute_thresholds(config);
    thresholds.xi1 = thresholds.xi1.map(|v| v * xi1_scale);
    let f = bottleneck_rate_cdf_total(2.0 * config.r2, config, &thresholds)
        .expect("feasible scenario");
    let mut p = empty_qualified_set_prob(config, &thresholds).expect("feasible scenario");
    for l in 1..=config.n_relays {
        p += f.powi(l as i32)
            * qualified_set_size_pmf(l, config, &thresholds).expect("l in range");
    }
    p
}

/// Closed form vs seeded simulation, covering both threshold regimes: the
/// default `r2 = 2` scenario where `xi2` dominates, and a low-rate `r2`
/// scenario with `xi2 < xi1` where the bottleneck-rate CDF clamps to zero
/// and the outage reduces to the empty-set probability.
fn check_closed_form_vs_mc(options: &VerifyOptions) -> CheckResult {
    // (relay counts, r2, grid)
    let scenarios: [(&[usize], f64, SnrGrid); 2] = [
        (&[1, 2, 5, 10], 2.0, SnrGrid::new(10.0, 40.0, 5.0)),
        (&[2, 5], 0.25, SnrGrid::new(10.0, 30.0, 10.0)),
    ];
    let mut z_scores = Vec::new();
    let mut worst: f64 = 0.0;
    let mut campaign_index = 0u64;
    for (relay_counts, r2, grid) in scenarios {
        for &n in relay_counts {
            let spec = CampaignSpec {
                n_relays: n,
                alpha1_sq: 0.75,
                alpha2_sq: 0.25,
                r1: 0.5,
                r2,
                snr_grid: grid,
                trials: options.trials,
                master_seed: options.seed.wrapping_add(campaign_index),
                strategies: vec![Strategy::TwoStage],
            };
            campaign_index += 1;
            let stats = run_campaign(&spec).expect("valid spec");
            for cell in stats.cells_for(Strategy::TwoStage) {
                let config = spec.config_at(cell.rho_db);
                let p = if options.xi1_scale == 1.0 {
                    outage_probability(&config)
                } else {
                    outage_from_components(&config, options.xi1_scale)
                };
                // z-test against the hypothesized value; the SE uses the
                // analytic p so deep-tail points with zero observed events
                // stay testable.
                let se = (p * (1.0 - p) / cell.trials as f64).sqrt();
                let z = if se > 0.0 { (cell.estimate() - p) / se } else { f64::INFINITY };
                worst = worst.max(z.abs());
                z_scores.push(z);
            }
        }
    }
    let outliers = z_scores.iter().filter(|z| z.abs() > 3.0).count();
    let share_ok = 1.0 - outliers as f64 / z_scores.len() as f64;
    CheckResult {
        name: "closed_form_vs_mc".into(),
        passed: share_ok >= 0.95,
        statistic: worst,
        threshold: 3.0,
        details: format!(
            "{}/{} grid points within 3 SE of the exact outage probability (max |z| = {worst:.2})",
            z_scores.len() - outliers,
            z_scores.len()
        ),
        z_scores,
    }
}

/// Per-trial agreement of two-stage with the exhaustive oracle.
fn check_two_stage_optimality(options: &VerifyOptions) -> CheckResult {
    let relay_counts = [1usize, 2, 5, 10];
    let grid = SnrGrid::new(10.0, 40.0, 5.0);
    let mut mismatches = 0u64;
    let mut total = 0u64;
    for (i, &n) in relay_counts.iter().enumerate() {
        let points = grid.points_db();
        let configs: Vec<SystemConfig> = points.iter().map(|&db| scenario(n, db)).collect();
        let thresholds: Vec<Thresholds> = configs.iter().map(compute_thresholds).collect();
        let master = options.seed.wrapping_add(0x1000 + i as u64);
        for trial in 0..options.dominance_trials {
            let r = sample_realization(SeedSpec::new(master, trial), n).expect("n > 0");
            for (pi, config) in configs.iter().enumerate() {
                let ts = strategy_outage(Strategy::TwoStage, &r, config, &thresholds[pi], None);
                let oracle = strategy_outage(Strategy::Oracle, &r, config, &thresholds[pi], None);
                total += 1;
                if ts != oracle {
                    mismatches += 1;
                }
            }
        }
    }
    CheckResult {
        name: "two_stage_optimality".into(),
        passed: mismatches == 0,
        statistic: mismatches as f64,
        threshold: 0.0,
        z_scores: Vec::new(),
        details: format!(
            "two-stage outage indicator equals the exhaustive oracle in {}/{total} trials",
            total - mismatches
        ),
    }
}

/// Qualified-set size histogram vs its binomial law (chi-square at 1%), plus
/// the empty-set probability as a z-test.
fn check_qualified_set_law(options: &VerifyOptions) -> CheckResult {
    let n = 10usize;
    let config = scenario(n, 10.0);
    let thresholds = compute_thresholds(&config);
    let trials = options.trials;
    let mut histogram = vec![0u64; n + 1];
    let master = options.seed.wrapping_add(0x2000);
    for trial in 0..trials {
        let r = sample_realization(SeedSpec::new(master, trial), n).expect("n > 0");
        histogram[qualified_set(&r, &thresholds).len()] += 1;
    }

    // z-test on P(|S_r| = 0).
    let p0 = empty_qualified_set_prob(&config, &thresholds).expect("feasible");
    let se0 = (p0 * (1.0 - p0) / trials as f64).sqrt();
    let z0 = (histogram[0] as f64 / trials as f64 - p0) / se0;

    // Chi-square with expected-count pooling below 5.
    let expected: Vec<f64> = (0..=n)
        .map(|l| qualified_set_size_pmf(l, &config, &thresholds).expect("in range") * trials as f64)
        .collect();
    let mut chi2 = 0.0;
    let mut bins = 0usize;
    let mut pool_obs = 0.0;
    let mut pool_exp = 0.0;
    for l in 0..=n {
        pool_obs += histogram[l] as f64;
        pool_exp += expected[l];
        if pool_exp >= 5.0 {
            chi2 += (pool_obs - pool_exp).powi(2) / pool_exp;
            bins += 1;
            pool_obs = 0.0;
            pool_exp = 0.0;
        }
    }
    if pool_exp > 0.0 && bins > 0 {
        // Remaining tail mass folds into the last bin.
        chi2 += (pool_obs - pool_exp).powi(2) / pool_exp;
    }
    let dof = (bins.max(2) - 1) as f64;
    let crit = ChiSquared::new(dof).expect("dof >= 1").inverse_cdf(0.99);
    let passed = chi2 < crit && z0.abs() <= 3.0;
    CheckResult {
        name: "qualified_set_binomial".into(),
        passed,
        statistic: chi2,
        threshold: crit,
        z_scores: vec![z0],
        details: format!(
            "chi-square {chi2:.2} vs 1% critical {crit:.2} ({} bins); empty-set z = {z0:.2}",
            bins
        ),
    }
}

/// The conditional-CDF derivation check: the closed form of the half-split
/// integral must match direct Simpson quadrature of
/// `e^{2 xi1} * integral_{xi1}^{y} e^{-max(xi1, z) - z} dz`.
fn check_cdf_quadrature(options: &VerifyOptions) -> CheckResult {
    let pairs = 20usize;
    let mut rng_seed = options.seed.wrapping_add(0x3000);
    let mut next_unit = move || {
        // splitmix64, plenty for scattering test points
        rng_seed = rng_seed.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = rng_seed;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64
    };
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let xi1 = 0.01 + 2.0 * next_unit();
        let y = xi1 + 0.05 + 3.0 * next_unit();
        let closed = 0.5 * (2.0 * xi1).exp() * ((-2.0 * xi1).exp() - (-2.0 * y).exp());
        let numeric = (2.0 * xi1).exp()
            * integrate_simpson(|z| (-(xi1.max(z)) - z).exp(), xi1, y, 4000);
        let rel = ((numeric - closed) / closed).abs();
        worst = worst.max(rel);
    }
    CheckResult {
        name: "cdf_quadrature".into(),
        passed: worst < 1e-8,
        statistic: worst,
        threshold: 1e-8,
        z_scores: Vec::new(),
        details: format!(
            "max relative error {worst:.3e} over {pairs} random threshold pairs"
        ),
    }
}

/// Symmetric-threshold regime: the max-min closed form must coincide with
/// the two-stage one analytically, and the two simulated strategies must
/// agree within 3 joint SE.
fn check_symmetric_equivalence(options: &VerifyOptions) -> CheckResult {
    // r2 solving xi1 = xi2 for r1 = 0.5, alpha1_sq = 3/4.
    let r2 = 0.5 * (1.5f64).log2();
    let grid = SnrGrid::new(10.0, 40.0, 10.0);
    let mut worst_analytic = 0.0f64;
    for &db in &grid.points_db() {
        let config = SystemConfig {
            n_relays: 5,
            alpha1_sq: 0.75,
            alpha2_sq: 0.25,
            r1: 0.5,
            r2,
            rho: db_to_linear(db),
        };
        let mm = maxmin_outage_symmetric(&config).expect("symmetric by construction");
        let ts = outage_probability(&config);
        worst_analytic = worst_analytic.max((mm - ts).abs());
    }
    let spec = CampaignSpec {
        n_relays: 5,
        alpha1_sq: 0.75,
        alpha2_sq: 0.25,
        r1: 0.5,
        r2,
        snr_grid: grid,
        trials: options.trials,
        master_seed: options.seed.wrapping_add(0x4000),
        strategies: vec![Strategy::TwoStage, Strategy::MaxMin],
    };
    let stats = run_campaign(&spec).expect("valid spec");
    let report = compare_strategies(&stats).expect("both strategies present");
    let z_scores: Vec<f64> = report
        .rows
        .iter()
        .map(|r| if r.joint_se > 0.0 { r.gap / r.joint_se } else { 0.0 })
        .collect();
    let mc_ok = z_scores.iter().all(|z| z.abs() <= 3.0);
    let passed = worst_analytic <= 1e-10 && mc_ok;
    CheckResult {
        name: "symmetric_equivalence".into(),
        passed,
        statistic: worst_analytic,
        threshold: 1e-10,
        z_scores,
        details: format!(
            "max analytic |max_min - two_stage| = {worst_analytic:.3e}; simulated gaps within 3 joint SE: {mc_ok}"
        ),
    }
}

/// Run every check and aggregate.
pub fn run_checks(options: &VerifyOptions) -> VerifyReport {
    let checks = vec![
        check_closed_form_vs_mc(options),
        check_two_stage_optimality(options),
        check_qualified_set_law(options),
        check_cdf_quadrature(options),
        check_symmetric_equivalence(options),
    ];
    let passed = checks.iter().all(|c| c.passed);
    VerifyReport { checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_options() -> VerifyOptions {
        VerifyOptions { trials: 20_000, dominance_trials: 2_000, ..VerifyOptions::default() }
    }

    #[test]
    fn all_checks_pass_at_reduced_size() {
        let report = run_checks(&quick_options());
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.details);
        }
        assert!(report.passed);
    }

    #[test]
    fn xi1_fault_injection_fails_closed_form_check() {
        let options = VerifyOptions { xi1_scale: 1.5, ..quick_options() };
        let report = run_checks(&options);
        let mc = report.checks.iter().find(|c| c.name == "closed_form_vs_mc").unwrap();
        assert!(!mc.passed, "fault injection must break the closed-form check");
        assert!(!report.passed);
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let exact = 1.0 - (-2.0f64).exp();
        let numeric = integrate_simpson(|x| (-x).exp(), 0.0, 2.0, 1000);
        assert!((numeric - exact).abs() < 1e-12);
        let numeric = integrate_simpson(|x| x * x, 0.0, 3.0, 10);
        assert!((numeric - 9.0).abs() < 1e-12);
    }

    #[test]
    fn component_assembly_matches_closed_form_unscaled() {
        for &(n, db) in &[(1usize, 10.0f64), (5, 25.0), (10, 40.0)] {
            let config = scenario(n, db);
            let assembled = outage_from_components(&config, 1.0);
            let direct = outage_probability(&config);
            assert!((assembled - direct).abs() <= 1e-12, "N={n} {db}dB");
        }
    }
}
