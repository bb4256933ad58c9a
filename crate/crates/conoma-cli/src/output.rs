//! CSV, table and JSON emission for sweep results.
//!
//! The CSV layout is stable: a `# meta:` comment block with full provenance,
//! one header row, then one row per (strategy, rho_db) cell with `.` decimal
//! separators and `\n` line endings. Two runs with identical flags produce
//! byte-identical files regardless of worker count.

use std::io::{self, Write};

use serde::Serialize;

use conoma::analytics::{maxmin_outage_symmetric, outage_high_snr_approx, outage_probability};
use conoma::sim::{CellStats, OutageStats, Strategy};

use crate::experiment::ResolvedSweep;

pub const CSV_HEADER: &str =
    "strategy,rho_db,trials,outage_count,estimate,std_err,ci_lo,ci_hi,closed_form,high_snr_approx";

/// One fully derived output row.
#[derive(Debug, Clone, Serialize)]
pub struct CellRow {
    pub strategy: &'static str,
    pub rho_db: f64,
    pub trials: u64,
    pub outage_count: u64,
    pub estimate: f64,
    pub std_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Exact outage probability where the strategy has one (two-stage and
    /// oracle always; max-min only in the symmetric regime).
    pub closed_form: Option<f64>,
    /// High-SNR asymptote (two-stage and oracle); can exceed 1 at low SNR.
    pub high_snr_approx: Option<f64>,
}

/// Derive all output rows from campaign statistics.
pub fn build_rows(resolved: &ResolvedSweep, stats: &OutageStats) -> Vec<CellRow> {
    stats
        .cells
        .iter()
        .map(|cell| {
            let config = resolved.spec.config_at(cell.rho_db);
            let closed_form = match cell.strategy {
                // The oracle is outage-optimal and coincides with two-stage,
                // so both carry the exact expression.
                Strategy::TwoStage | Strategy::Oracle => Some(outage_probability(&config)),
                Strategy::MaxMin => maxmin_outage_symmetric(&config).ok(),
                Strategy::Random | Strategy::Oma => None,
            };
            let high_snr_approx = match cell.strategy {
                Strategy::TwoStage | Strategy::Oracle => outage_high_snr_approx(&config).ok(),
                _ => None,
            };
            let (ci_lo, ci_hi) = cell.ci95();
            CellRow {
                strategy: cell.strategy.name(),
                rho_db: cell.rho_db,
                trials: cell.trials,
                outage_count: cell.outage_count,
                estimate: cell.estimate(),
                std_err: cell.std_err(),
                ci_lo,
                ci_hi,
                closed_form,
                high_snr_approx,
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write the stable CSV document.
pub fn write_csv<W: Write>(
    mut w: W,
    resolved: &ResolvedSweep,
    stats: &OutageStats,
    rows: &[CellRow],
) -> io::Result<()> {
    writeln!(w, "# meta: tool = conoma {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# meta: command = {}", resolved.canonical)?;
    writeln!(w, "# meta: seed = {}", resolved.spec.master_seed)?;
    if stats.infeasible {
        writeln!(
            w,
            "# meta: warning = power split infeasible for r1; NOMA outage is 1 at every point"
        )?;
    }
    if let Some(note) = resolved.preset_note {
        writeln!(w, "# meta: note = {note}")?;
    }
    if resolved.spec.strategies.contains(&Strategy::Oma) {
        writeln!(
            w,
            "# meta: oma_model = four slots (BS->relay->user per user at full power), \
             quarter pre-log, max-min selection"
        )?;
    }
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.strategy,
            r.rho_db,
            r.trials,
            r.outage_count,
            r.estimate,
            r.std_err,
            r.ci_lo,
            r.ci_hi,
            opt(r.closed_form),
            opt(r.high_snr_approx),
        )?;
    }
    Ok(())
}

/// Human summary: one row per SNR point, one column per strategy.
pub fn print_table(resolved: &ResolvedSweep, stats: &OutageStats) {
    let strategies: Vec<Strategy> = {
        let mut seen = Vec::new();
        for c in &stats.cells {
            if !seen.contains(&c.strategy) {
                seen.push(c.strategy);
            }
        }
        seen
    };
    print!("{:>8}", "rho_db");
    for s in &strategies {
        print!("  {:>12}", s.name());
    }
    println!();
    for &rho_db in &resolved.spec.snr_grid.points_db() {
        print!("{rho_db:>8}");
        for &s in &strategies {
            match stats.cell(s, rho_db) {
                Some(c) => print!("  {:>12.4e}", c.estimate()),
                None => print!("  {:>12}", "-"),
            }
        }
        println!();
    }
}

/// Warn about cells whose CIs the normal approximation cannot support.
pub fn warn_sparse_cells(stats: &OutageStats) {
    let sparse: Vec<&CellStats> = stats.sparse_cells().collect();
    if !sparse.is_empty() {
        eprintln!(
            "warning: {} cell(s) have fewer than 20 outage events; their normal-approximation \
             confidence intervals are unreliable — raise --trials for deep-tail points",
            sparse.len()
        );
    }
}

/// JSON document for `sweep --json`.
#[derive(Serialize)]
pub struct SweepJson<'a> {
    pub tool: String,
    pub command: &'a str,
    pub seed: u64,
    pub infeasible: bool,
    pub cells: &'a [CellRow],
}

pub fn sweep_json(resolved: &ResolvedSweep, stats: &OutageStats, rows: &[CellRow]) -> String {
    let doc = SweepJson {
        tool: format!("conoma {}", env!("CARGO_PKG_VERSION")),
        command: &resolved.canonical,
        seed: resolved.spec.master_seed,
        infeasible: stats.infeasible,
        cells: rows,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}
