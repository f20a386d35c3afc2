//! One entry point per subcommand. Each builds the configured family,
//! runs the relevant measurements and packs a reproducible report.

use std::time::Instant;

use apxgrp::cayley::{diameter, girth, spectral_gap, sweep};
use apxgrp::setops::{certify_approximate, growth_report, ControlWitness, MatSet};
use apxgrp::structure::{
    check_conjugation_invariance, count_involved_vs_bound, deficient_count,
    enumerate_involved_tori, first_regular_semisimple, lp_exponent_conj_class,
    lp_exponent_deficient, lp_exponent_torus, regular_proportion, ConjClassHandle, LPReport,
    TorusHandle,
};
use apxgrp::MatSL;

use crate::config::{Conjugators, ExperimentConfig};
use crate::error::CliError;
use crate::report::{
    fit_diameter_log_power, matrix_rows, DeficientRow, LpRow, Payload, ProportionRow, Results,
    RunReport, ViolationRow, WitnessSummary, VERSION,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Growth,
    Certify,
    Structure,
    Involved,
    Lp,
    Diam,
    Girth,
    Gap,
    Sweep,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Growth => "growth",
            CommandKind::Certify => "certify",
            CommandKind::Structure => "structure",
            CommandKind::Involved => "involved",
            CommandKind::Lp => "lp",
            CommandKind::Diam => "diam",
            CommandKind::Girth => "girth",
            CommandKind::Gap => "gap",
            CommandKind::Sweep => "sweep",
        }
    }
}

pub fn run(kind: CommandKind, config: &ExperimentConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let results = match kind {
        CommandKind::Growth => cmd_growth(config)?,
        CommandKind::Certify => cmd_certify(config)?,
        CommandKind::Structure => cmd_structure(config)?,
        CommandKind::Involved => cmd_involved(config)?,
        CommandKind::Lp => cmd_lp(config)?,
        CommandKind::Diam => cmd_diam(config)?,
        CommandKind::Girth => cmd_girth(config)?,
        CommandKind::Gap => cmd_gap(config)?,
        CommandKind::Sweep => cmd_sweep(config)?,
    };
    Ok(RunReport {
        payload: Payload {
            version: VERSION,
            command: kind.name(),
            config: config.clone(),
            results,
        },
        wall_clock_ms: start.elapsed().as_millis() as u64,
        threads: rayon::current_num_threads(),
    })
}

fn build_family(config: &ExperimentConfig) -> Result<MatSet, CliError> {
    let p = config.require_p()?;
    Ok(config
        .family
        .build_set(config.n, p, config.seed, config.budget())?)
}

fn witness_summary(w: &ControlWitness) -> WitnessSummary {
    WitnessSummary {
        k: w.k,
        size: w.x.len() as u64,
        elements: w.x.iter().map(|m| matrix_rows(&m)).collect(),
    }
}

fn cmd_growth(config: &ExperimentConfig) -> Result<Results, CliError> {
    let a = build_family(config)?;
    let budget = config.budget();
    let mut growth = growth_report(&a, budget)?;
    let witness = certify_approximate(&a, budget)?;
    growth.greedy_k = Some(witness.k);
    Ok(Results::Growth {
        growth,
        witness: witness_summary(&witness),
    })
}

fn cmd_certify(config: &ExperimentConfig) -> Result<Results, CliError> {
    let a = build_family(config)?;
    let witness = certify_approximate(&a, config.budget())?;
    Ok(Results::Certify {
        witness: witness_summary(&witness),
        // certification re-verifies its own cover before returning
        verified: true,
    })
}

/// The configured anchor, or else the lowest-encoding regular semisimple
/// element of the family.
fn resolve_anchor(config: &ExperimentConfig, a: &MatSet) -> Result<MatSL, CliError> {
    if let Some(rows) = &config.knobs.anchor {
        let anchor = MatSL::from_int_rows(config.n, a.modulus(), rows)?;
        if !anchor.is_regular_semisimple()? {
            return Err(CliError::Config(
                "configured anchor is not regular semisimple".into(),
            ));
        }
        return Ok(anchor);
    }
    first_regular_semisimple(a)?.ok_or_else(|| {
        CliError::Config("family contains no regular semisimple element; set `knobs.anchor`".into())
    })
}

fn lp_rows(
    config: &ExperimentConfig,
    a: &MatSet,
    torus: &TorusHandle,
    class: &ConjClassHandle,
) -> Result<Vec<LpRow>, CliError> {
    let budget = config.budget();
    let mut rows = Vec::new();
    for &m in &config.knobs.powers {
        rows.push(to_lp_row(config, lp_exponent_torus(a, m, torus, budget)?));
        rows.push(to_lp_row(
            config,
            lp_exponent_deficient(a, m, torus, budget)?,
        ));
        rows.push(to_lp_row(
            config,
            lp_exponent_conj_class(a, m, class, budget)?,
        ));
    }
    Ok(rows)
}

fn to_lp_row(config: &ExperimentConfig, report: LPReport) -> LpRow {
    let within = (report.measured_exponent - report.predicted_exponent).abs()
        <= config.knobs.exponent_tolerance;
    LpRow {
        report,
        within_tolerance: within,
    }
}

fn conjugator_set(config: &ExperimentConfig, a: &MatSet) -> Result<MatSet, CliError> {
    let p = config.require_p()?;
    match config.knobs.conjugators {
        Conjugators::Family => Ok(a.clone()),
        Conjugators::Generators => Ok(config
            .family
            .generator_set(config.n, p, config.seed)?
            .as_set()
            .clone()),
    }
}

fn cmd_structure(config: &ExperimentConfig) -> Result<Results, CliError> {
    let a = build_family(config)?;
    let budget = config.budget();
    let anchor = resolve_anchor(config, &a)?;
    let torus = TorusHandle::new(anchor)?;
    let class = ConjClassHandle::new(&anchor)?;

    let census = if config.knobs.census {
        Some(count_involved_vs_bound(&a, budget)?)
    } else {
        None
    };
    let violations = if config.knobs.census && config.knobs.invariance {
        let conjugators = conjugator_set(config, &a)?;
        let list = check_conjugation_invariance(&a, &conjugators, budget)?;
        Some(
            list.iter()
                .map(|v| ViolationRow {
                    torus_anchor: matrix_rows(&v.torus_anchor),
                    conjugator: matrix_rows(&v.conjugator),
                })
                .collect(),
        )
    } else {
        None
    };

    let lp = lp_rows(config, &a, &torus, &class)?;
    let mut deficient = Vec::new();
    let mut proportion = Vec::new();
    for &m in &config.knobs.powers {
        deficient.push(DeficientRow {
            m,
            count: deficient_count(&a, m, &torus, budget)?,
        });
        proportion.push(ProportionRow {
            k: m,
            fraction: regular_proportion(&a, m, budget)?,
        });
    }

    Ok(Results::Structure {
        set_size: a.len() as u64,
        anchor: matrix_rows(&anchor),
        census,
        violations,
        lp,
        deficient,
        regular_proportion: proportion,
    })
}

fn cmd_involved(config: &ExperimentConfig) -> Result<Results, CliError> {
    let a = build_family(config)?;
    let budget = config.budget();
    let census = count_involved_vs_bound(&a, budget)?;
    let anchors = enumerate_involved_tori(&a, budget)?
        .iter()
        .map(|t| matrix_rows(t.anchor()))
        .collect();
    Ok(Results::Involved {
        set_size: a.len() as u64,
        census,
        anchors,
    })
}

fn cmd_lp(config: &ExperimentConfig) -> Result<Results, CliError> {
    let a = build_family(config)?;
    let anchor = resolve_anchor(config, &a)?;
    let torus = TorusHandle::new(anchor)?;
    let class = ConjClassHandle::new(&anchor)?;
    Ok(Results::Lp {
        set_size: a.len() as u64,
        anchor: matrix_rows(&anchor),
        lp: lp_rows(config, &a, &torus, &class)?,
    })
}

fn generator_family(config: &ExperimentConfig) -> Result<apxgrp::cayley::GenSet, CliError> {
    let p = config.require_p()?;
    Ok(config.family.generator_set(config.n, p, config.seed)?)
}

fn cmd_diam(config: &ExperimentConfig) -> Result<Results, CliError> {
    let gens = generator_family(config)?;
    Ok(Results::Diam {
        stats: diameter(&gens, config.budget())?,
    })
}

fn cmd_girth(config: &ExperimentConfig) -> Result<Results, CliError> {
    let gens = generator_family(config)?;
    Ok(Results::Girth {
        generator_count: gens.len() as u64,
        girth: girth(&gens, config.budget())?,
    })
}

fn cmd_gap(config: &ExperimentConfig) -> Result<Results, CliError> {
    let gens = generator_family(config)?;
    Ok(Results::Gap {
        report: spectral_gap(&gens, config.spectral_opts(), config.budget())?,
    })
}

fn cmd_sweep(config: &ExperimentConfig) -> Result<Results, CliError> {
    let mats = config.family.int_mats().ok_or_else(|| {
        CliError::Config("sweep needs a family carrying integer matrices (subgroup/ball/mod_p_reduction)".into())
    })?;
    let primes = config.sweep_primes()?;
    let outcome = sweep(
        mats,
        config.n,
        &primes,
        config.spectral_opts(),
        config.budget(),
    )?;
    let fit = fit_diameter_log_power(&outcome.rows);
    Ok(Results::Sweep {
        rows: outcome.rows,
        skipped: outcome.skipped,
        fit,
    })
}
