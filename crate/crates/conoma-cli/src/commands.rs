//! The three subcommand bodies.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use conoma::analytics::{estimate_diversity_order, AnalyticsError, CurveKind, OutageCurvePoint};
use conoma::sim::{db_to_linear, run_campaign, Strategy};
use conoma::verify::{run_checks, VerifyOptions};

use crate::experiment::{resolve_diversity, resolve_sweep};
use crate::output;
use crate::{
    DiversityArgs, SweepArgs, VerifyArgs, EXIT_INSUFFICIENT_DATA, EXIT_OK, EXIT_USAGE,
    EXIT_VERIFY_FAILED,
};

fn usage_error(message: &str) -> i32 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

pub fn sweep(args: SweepArgs) -> i32 {
    let resolved = match resolve_sweep(&args) {
        Ok(r) => r,
        Err(e) => return usage_error(&e),
    };
    let stats = match run_campaign(&resolved.spec) {
        Ok(stats) => stats,
        Err(e) => return usage_error(&e.to_string()),
    };
    if stats.infeasible {
        eprintln!(
            "WARNING: power split alpha1_sq = {} cannot support r1 = {} \
             (alpha1_sq <= eps1 * alpha2_sq): the NOMA outage probability is 1 at every SNR",
            resolved.spec.alpha1_sq, resolved.spec.r1
        );
    }
    let rows = output::build_rows(&resolved, &stats);

    if let Some(path) = &resolved.out {
        let file = match File::create(path) {
            Ok(f) => f,
            Err(e) => return usage_error(&format!("cannot create {}: {e}", path.display())),
        };
        if let Err(e) = output::write_csv(BufWriter::new(file), &resolved, &stats, &rows) {
            return usage_error(&format!("cannot write {}: {e}", path.display()));
        }
        if args.json {
            println!("{}", output::sweep_json(&resolved, &stats, &rows));
        } else {
            output::print_table(&resolved, &stats);
            println!("wrote {}", path.display());
        }
    } else if args.json {
        println!("{}", output::sweep_json(&resolved, &stats, &rows));
    } else {
        let stdout = io::stdout();
        if let Err(e) = output::write_csv(stdout.lock(), &resolved, &stats, &rows) {
            return usage_error(&format!("cannot write CSV to stdout: {e}"));
        }
    }
    output::warn_sparse_cells(&stats);
    EXIT_OK
}

pub fn verify(args: VerifyArgs) -> i32 {
    if args.trials == 0 {
        return usage_error("--trials must be at least 1");
    }
    let options = VerifyOptions {
        trials: args.trials,
        dominance_trials: (args.trials / 5).max(1),
        seed: args.seed,
        xi1_scale: args.inject_xi1_scale,
    };
    let report = run_checks(&options);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        for check in &report.checks {
            let tag = if check.passed { "PASS" } else { "FAIL" };
            println!("[{tag}] {}: {}", check.name, check.details);
        }
        println!(
            "{}",
            if report.passed { "all checks passed" } else { "verification FAILED" }
        );
    }
    if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED }
}

#[derive(Serialize)]
struct DiversityRow {
    source: String,
    estimate: f64,
    expected: Option<f64>,
}

#[derive(Serialize)]
struct DiversityJson {
    command: String,
    n_relays: usize,
    orders: Vec<DiversityRow>,
}

pub fn diversity(args: DiversityArgs) -> i32 {
    let (spec, canonical) = match resolve_diversity(&args.scenario) {
        Ok(r) => r,
        Err(e) => return usage_error(&e),
    };
    let stats = match run_campaign(&spec) {
        Ok(stats) => stats,
        Err(e) => return usage_error(&e.to_string()),
    };

    let mut orders = Vec::new();

    // Closed-form curve first: exact, no sampling noise.
    let closed_points: Vec<OutageCurvePoint> = spec
        .snr_grid
        .points_db()
        .iter()
        .map(|&db| {
            let config = spec.config_at(db);
            OutageCurvePoint::new(
                db_to_linear(db),
                conoma::analytics::outage_probability(&config),
                CurveKind::ExactClosedForm,
            )
        })
        .collect();
    match estimate_diversity_order(&closed_points) {
        Ok(d) => orders.push(DiversityRow {
            source: "closed_form".into(),
            estimate: d,
            expected: Some(spec.n_relays as f64),
        }),
        Err(AnalyticsError::DegenerateValue { .. }) => {
            eprintln!(
                "error: the closed-form curve is degenerate on this grid (outage pinned at 0 \
                 or 1); check feasibility or lower the SNR ceiling"
            );
            return EXIT_INSUFFICIENT_DATA;
        }
        Err(e) => return usage_error(&e.to_string()),
    }

    for &strategy in &spec.strategies {
        let points: Vec<OutageCurvePoint> = stats
            .cells_for(strategy)
            .map(|c| OutageCurvePoint::new(db_to_linear(c.rho_db), c.estimate(), CurveKind::MonteCarlo))
            .collect();
        if let Some(flat) = points.iter().find(|p| p.value <= 0.0) {
            eprintln!(
                "error: {} hit zero outage events at rho = {:.1} dB; raise --trials or lower \
                 the SNR ceiling",
                strategy.name(),
                10.0 * flat.rho.log10()
            );
            return EXIT_INSUFFICIENT_DATA;
        }
        if let Some(flat) = points.iter().find(|p| p.value >= 1.0) {
            eprintln!(
                "error: {} is in outage on every trial at rho = {:.1} dB; raise the SNR floor \
                 or relax the rate targets",
                strategy.name(),
                10.0 * flat.rho.log10()
            );
            return EXIT_INSUFFICIENT_DATA;
        }
        match estimate_diversity_order(&points) {
            Ok(d) => orders.push(DiversityRow {
                source: strategy.name().into(),
                estimate: d,
                expected: expected_order(strategy, spec.n_relays),
            }),
            Err(e) => return usage_error(&e.to_string()),
        }
    }

    if args.json {
        let doc = DiversityJson { command: canonical, n_relays: spec.n_relays, orders };
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    } else {
        let mut out = io::stdout().lock();
        let _ = writeln!(out, "{:<14} {:>10} {:>10}", "source", "estimate", "expected");
        for row in &orders {
            let expected = row
                .expected
                .map(|e| format!("{e}"))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(out, "{:<14} {:>10.2} {:>10}", row.source, row.estimate, expected);
        }
    }
    EXIT_OK
}

/// The diversity order each strategy should exhibit, where one is known.
fn expected_order(strategy: Strategy, n_relays: usize) -> Option<f64> {
    match strategy {
        Strategy::TwoStage | Strategy::Oracle => Some(n_relays as f64),
        Strategy::Random => Some(1.0),
        Strategy::MaxMin | Strategy::Oma => None,
    }
}
