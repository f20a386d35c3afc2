//! Machine-readable run reports: JSON always, CSV alongside for sweeps.
//!
//! Everything that should reproduce byte-for-byte between reruns lives
//! under `payload`; wall clock and thread count sit outside it.

use std::path::Path;

use serde::Serialize;

use apxgrp::cayley::{BfsStats, SpectralReport, SweepRow, SweepSkip};
use apxgrp::setops::GrowthReport;
use apxgrp::structure::{InvolvedToriReport, LPReport};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub payload: Payload,
    pub wall_clock_ms: u64,
    pub threads: usize,
}

#[derive(Debug, Serialize)]
pub struct Payload {
    pub version: &'static str,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub results: Results,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Results {
    Growth {
        growth: GrowthReport,
        witness: WitnessSummary,
    },
    Certify {
        witness: WitnessSummary,
        verified: bool,
    },
    Structure {
        set_size: u64,
        anchor: Vec<Vec<u64>>,
        census: Option<InvolvedToriReport>,
        violations: Option<Vec<ViolationRow>>,
        lp: Vec<LpRow>,
        deficient: Vec<DeficientRow>,
        regular_proportion: Vec<ProportionRow>,
    },
    Involved {
        set_size: u64,
        census: InvolvedToriReport,
        anchors: Vec<Vec<Vec<u64>>>,
    },
    Lp {
        set_size: u64,
        anchor: Vec<Vec<u64>>,
        lp: Vec<LpRow>,
    },
    Diam {
        stats: BfsStats,
    },
    Girth {
        girth: u32,
        generator_count: u64,
    },
    Gap {
        report: SpectralReport,
    },
    Sweep {
        rows: Vec<SweepRow>,
        skipped: Vec<SweepSkip>,
        fit: Option<DiameterFit>,
    },
}

#[derive(Debug, Serialize)]
pub struct WitnessSummary {
    pub k: u64,
    pub size: u64,
    pub elements: Vec<Vec<Vec<u64>>>,
}

#[derive(Debug, Serialize)]
pub struct LpRow {
    #[serde(flatten)]
    pub report: LPReport,
    pub within_tolerance: bool,
}

#[derive(Debug, Serialize)]
pub struct DeficientRow {
    pub m: u32,
    pub count: u64,
}

#[derive(Debug, Serialize)]
pub struct ProportionRow {
    pub k: u32,
    pub fraction: f64,
}

#[derive(Debug, Serialize)]
pub struct ViolationRow {
    pub torus_anchor: Vec<Vec<u64>>,
    pub conjugator: Vec<Vec<u64>>,
}

/// Least-squares fit of diameter(p) = a * (log p)^b over the sweep rows.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiameterFit {
    pub a: f64,
    pub b: f64,
    pub points: usize,
}

pub fn fit_diameter_log_power(rows: &[SweepRow]) -> Option<DiameterFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.p >= 3 && r.diameter >= 1)
        .map(|r| ((r.p as f64).ln().ln(), (r.diameter as f64).ln()))
        .collect();
    match pts.len() {
        0 => None,
        1 => Some(DiameterFit {
            a: pts[0].1.exp(),
            b: 0.0,
            points: 1,
        }),
        n => {
            let nf = n as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
            let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let b = if var == 0.0 { 0.0 } else { cov / var };
            Some(DiameterFit {
                a: (my - b * mx).exp(),
                b,
                points: n,
            })
        }
    }
}

pub const SWEEP_CSV_HEADER: &str = "p,group_order,diameter,girth,lambda2,gap,generated";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.p, r.group_order, r.diameter, r.girth, r.lambda2, r.gap, r.generated
        ));
    }
    out
}

/// Writes the JSON report (and the CSV table for sweeps). Without an
/// output path the JSON goes to stdout.
pub fn emit(report: &RunReport, out: Option<&Path>) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    match out {
        Some(path) => {
            std::fs::write(path, format!("{json}\n"))?;
            if let Results::Sweep { rows, .. } = &report.payload.results {
                std::fs::write(path.with_extension("csv"), sweep_csv(rows))?;
            }
        }
        None => println!("{json}"),
    }
    Ok(())
}

pub fn matrix_rows(m: &apxgrp::MatSL) -> Vec<Vec<u64>> {
    m.to_rows()
}
