use oracle_game::analysis::{
    check_builtin_table, manipulation_table, max_bounty, min_accuracy, Expected, ManipulationRow,
};
use oracle_game::config::ConfigFile;
use oracle_game::protocol::{write_ndjson, Money};
use oracle_game::sim::{
    bounty_straddle, equilibrium_check, pool_bias_experiment, run_experiment, verify,
    BountyStraddle, EquilibriumReport, ExperimentSummary, PoolBiasReport, VerifyReport,
};
use serde::Serialize;

use crate::output::{num, Format, Output, Table};
use crate::CliError;

/// Whether every checked row passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

fn verdict(pass: bool) -> String {
    if pass { "PASS" } else { "FAIL" }.into()
}

const MANIPULATION_HEADER: [&str; 6] =
    ["D_v_over_smax", "P", "q", "fraction", "p_specific", "p_any"];

fn manipulation_cells(row: &ManipulationRow) -> Vec<String> {
    vec![
        row.dv_over_smax.to_string(),
        row.list_size.to_string(),
        num(row.q),
        num(row.fraction),
        num(row.p_specific),
        num(row.p_any),
    ]
}

#[derive(Serialize)]
struct BountyCap {
    q: f64,
    decision_stake: Money,
    max_bounty: Money,
    /// Accuracy enforced by the cap; absent when the cap is zero.
    min_accuracy: Option<f64>,
}

#[derive(Serialize)]
struct CheckedRow {
    #[serde(flatten)]
    row: ManipulationRow,
    expected_specific: Expected,
    expected_any: Expected,
    pass: bool,
}

#[derive(Serialize)]
struct AnalyzeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    builtin: Option<Vec<CheckedRow>>,
    rows: Vec<ManipulationRow>,
    bounty_caps: Vec<BountyCap>,
}

pub fn analyze(config: &ConfigFile, builtin: bool, out: &Output) -> Result<Status, CliError> {
    let invalid = |e: oracle_game::analysis::AnalysisError| CliError::Config(e.to_string());
    let checked = if builtin {
        let rows = check_builtin_table().map_err(invalid)?;
        Some(
            rows.into_iter()
                .map(|c| CheckedRow {
                    row: c.row,
                    expected_specific: c.expected_specific,
                    expected_any: c.expected_any,
                    pass: c.pass,
                })
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let rows = manipulation_table(&config.analysis.rows).map_err(invalid)?;
    let bounty_caps = config
        .analysis
        .bounty_caps
        .iter()
        .map(|query| {
            let cap = max_bounty(query.q, query.decision_stake).map_err(invalid)?;
            Ok(BountyCap {
                q: query.q,
                decision_stake: query.decision_stake,
                max_bounty: cap,
                min_accuracy: if cap == 0 {
                    None
                } else {
                    Some(min_accuracy(cap, query.decision_stake).map_err(invalid)?)
                },
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let status = match &checked {
        Some(rows) if rows.iter().any(|r| !r.pass) => Status::Fail,
        _ => Status::Pass,
    };
    let report = AnalyzeReport {
        builtin: checked,
        rows,
        bounty_caps,
    };

    match out.format {
        Format::Json => out.write_json("analyze", config, &report)?,
        Format::Csv => {
            let main = match &report.builtin {
                Some(checked) => {
                    let mut header = MANIPULATION_HEADER.to_vec();
                    header.extend(["expected_specific", "expected_any", "result"]);
                    let mut table = Table::new(&header);
                    for c in checked {
                        let mut cells = manipulation_cells(&c.row);
                        cells.extend([
                            c.expected_specific.label(),
                            c.expected_any.label(),
                            verdict(c.pass),
                        ]);
                        table.push(cells);
                    }
                    for row in &report.rows {
                        let mut cells = manipulation_cells(row);
                        cells.extend([String::new(), String::new(), String::new()]);
                        table.push(cells);
                    }
                    table
                }
                None => {
                    let mut table = Table::new(&MANIPULATION_HEADER);
                    for row in &report.rows {
                        table.push(manipulation_cells(row));
                    }
                    table
                }
            };
            let mut caps = Table::new(&["q", "D_v", "max_bounty", "min_accuracy"]);
            for cap in &report.bounty_caps {
                caps.push(vec![
                    num(cap.q),
                    cap.decision_stake.to_string(),
                    cap.max_bounty.to_string(),
                    cap.min_accuracy.map(num).unwrap_or_default(),
                ]);
            }
            let sides: Vec<(&str, &Table)> = if caps.rows.is_empty() {
                Vec::new()
            } else {
                vec![("bounty", &caps)]
            };
            out.write_tables(&main, &sides)?;
        }
    }
    Ok(status)
}

#[derive(Serialize)]
struct TrialRow {
    trial: u64,
    seed: u64,
    rounds: u64,
    decided: u64,
    manipulated: u64,
    unknown_voting: u64,
    certified_true: u64,
    certified_false: u64,
    drained_true: Money,
    drained_false: Money,
    final_r_true: Money,
    final_r_false: Money,
    errors: std::collections::BTreeMap<String, u64>,
}

#[derive(Serialize)]
struct SimulateReport {
    summary: ExperimentSummary,
    trials: Vec<TrialRow>,
    cohorts: Vec<CohortRow>,
}

#[derive(Serialize)]
struct CohortRow {
    trial: u64,
    cohort: String,
    players: u32,
    net: i64,
}

pub fn simulate(config: &ConfigFile, out: &Output) -> Result<Status, CliError> {
    let scenario = config.scenario();
    let (summary, trials) =
        run_experiment(&scenario).map_err(|e| CliError::Config(e.to_string()))?;

    if scenario.run.record_events {
        if out.path.is_none() {
            eprintln!("warning: event logs need --out; not written");
        }
        for (i, trial) in trials.iter().enumerate() {
            let (Some(events), Some(path)) =
                (&trial.events, out.sibling(&format!("trial{i}"), "ndjson"))
            else {
                continue;
            };
            let mut bytes = Vec::new();
            write_ndjson(&mut bytes, events).map_err(CliError::output)?;
            crate::output::write_file(&path, &bytes)?;
        }
    }

    let rows: Vec<TrialRow> = trials
        .iter()
        .enumerate()
        .map(|(i, t)| TrialRow {
            trial: i as u64,
            seed: t.seed,
            rounds: t.rounds,
            decided: t.decided,
            manipulated: t.manipulated,
            unknown_voting: t.unknown_voting,
            certified_true: t.certified_true,
            certified_false: t.certified_false,
            drained_true: t.drained_true,
            drained_false: t.drained_false,
            final_r_true: t.final_pools.r_true,
            final_r_false: t.final_pools.r_false,
            errors: t.errors.clone(),
        })
        .collect();
    let cohorts: Vec<CohortRow> = trials
        .iter()
        .enumerate()
        .flat_map(|(i, t)| {
            t.cohorts.iter().map(move |c| CohortRow {
                trial: i as u64,
                cohort: c.name.clone(),
                players: c.players,
                net: c.net,
            })
        })
        .collect();
    let report = SimulateReport {
        summary,
        trials: rows,
        cohorts,
    };

    match out.format {
        Format::Json => out.write_json("simulate", config, &report)?,
        Format::Csv => {
            let mut main = Table::new(&[
                "trial",
                "seed",
                "rounds",
                "decided",
                "manipulated",
                "unknown_voting",
                "certified_true",
                "certified_false",
                "drained_true",
                "drained_false",
                "final_r_true",
                "final_r_false",
            ]);
            for r in &report.trials {
                main.push(
                    [
                        r.trial,
                        r.seed,
                        r.rounds,
                        r.decided,
                        r.manipulated,
                        r.unknown_voting,
                        r.certified_true,
                        r.certified_false,
                        r.drained_true,
                        r.drained_false,
                        r.final_r_true,
                        r.final_r_false,
                    ]
                    .iter()
                    .map(u64::to_string)
                    .collect(),
                );
            }
            let mut cohorts = Table::new(&["trial", "cohort", "players", "net"]);
            for c in &report.cohorts {
                cohorts.push(vec![
                    c.trial.to_string(),
                    c.cohort.clone(),
                    c.players.to_string(),
                    c.net.to_string(),
                ]);
            }
            out.write_tables(&main, &[("cohorts", &cohorts)])?;
        }
    }
    Ok(Status::Pass)
}

pub fn verify_cmd(config: &ConfigFile, out: &Output) -> Result<Status, CliError> {
    let reports: Vec<VerifyReport> =
        verify(&config.verify).map_err(|e| CliError::Config(e.to_string()))?;
    let status = if reports.iter().all(|r| r.pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    match out.format {
        Format::Json => out.write_json("verify", config, &reports)?,
        Format::Csv => {
            let mut table = Table::new(&[
                "D_v_over_smax",
                "q",
                "fraction",
                "closed_form",
                "decided",
                "manipulated",
                "rate",
                "wilson_lower",
                "wilson_upper",
                "result",
            ]);
            for r in &reports {
                table.push(vec![
                    r.row.dv_over_smax.to_string(),
                    num(r.row.q),
                    num(r.row.fraction),
                    num(r.closed_form),
                    r.decided.to_string(),
                    r.manipulated.to_string(),
                    num(r.interval.estimate),
                    num(r.interval.lower),
                    num(r.interval.upper),
                    verdict(r.pass),
                ]);
            }
            out.write_tables(&table, &[])?;
        }
    }
    Ok(status)
}

#[derive(Serialize)]
struct EquilibriumOutput {
    #[serde(flatten)]
    check: EquilibriumReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    straddle: Option<BountyStraddle>,
}

pub fn equilibrium(config: &ConfigFile, out: &Output) -> Result<Status, CliError> {
    let settings = &config.equilibrium;
    let invalid = |e: oracle_game::config::ConfigError| CliError::Config(e.to_string());
    let check = equilibrium_check(settings).map_err(invalid)?;
    let straddle = if settings.straddle_bounties.is_empty() {
        None
    } else {
        Some(bounty_straddle(settings, &settings.straddle_bounties).map_err(invalid)?)
    };
    if let Some(warning) = &check.warning {
        eprintln!("warning: {warning}");
    }
    // Outside the model's assumptions the check is reported, not judged.
    let status = if check.applicable && check.violations > 0 {
        Status::Fail
    } else {
        Status::Pass
    };
    let report = EquilibriumOutput { check, straddle };

    match out.format {
        Format::Json => out.write_json("equilibrium", config, &report)?,
        Format::Csv => {
            let mut table = Table::new(&[
                "deviation",
                "trials",
                "mean",
                "stderr",
                "excess",
                "allowance",
                "result",
            ]);
            if let Some(warning) = &report.check.warning {
                table.push(vec![
                    "assumption".into(),
                    String::new(),
                    num(report.check.assumption_value),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("WARN: {warning}"),
                ]);
            }
            for row in &report.check.rows {
                table.push(vec![
                    row.deviation.name().into(),
                    row.payoff.n.to_string(),
                    num(row.payoff.mean),
                    num(row.payoff.stderr),
                    num(row.excess),
                    num(row.allowance),
                    verdict(!row.violation),
                ]);
            }
            let mut straddle = Table::new(&["bounty", "cap", "trials", "mean", "stderr"]);
            if let Some(s) = &report.straddle {
                for p in &s.points {
                    straddle.push(vec![
                        p.bounty.to_string(),
                        s.cap.to_string(),
                        p.payoff.n.to_string(),
                        num(p.payoff.mean),
                        num(p.payoff.stderr),
                    ]);
                }
            }
            let sides: Vec<(&str, &Table)> = if report.straddle.is_some() {
                vec![("straddle", &straddle)]
            } else {
                Vec::new()
            };
            out.write_tables(&table, &sides)?;
        }
    }
    Ok(status)
}

pub fn pools(config: &ConfigFile, out: &Output) -> Result<Status, CliError> {
    let report: PoolBiasReport = pool_bias_experiment(&config.pools_experiment)
        .map_err(|e| CliError::Config(e.to_string()))?;
    match out.format {
        Format::Json => out.write_json("pools", config, &report)?,
        Format::Csv => {
            let mut trajectory = Table::new(&["round", "decided", "r_true", "r_false"]);
            for p in &report.trajectory {
                trajectory.push(vec![
                    p.round.to_string(),
                    p.decided.to_string(),
                    p.r_true.to_string(),
                    p.r_false.to_string(),
                ]);
            }
            let mut summary = Table::new(&["metric", "value"]);
            let mut metric = |name: &str, value: String| summary.push(vec![name.into(), value]);
            metric("decided", report.decided.to_string());
            metric("depletion_true", num(report.depletion_true));
            metric("depletion_false", num(report.depletion_false));
            metric(
                "burn_in_drained_true",
                report.burn_in_drained_true.to_string(),
            );
            metric(
                "burn_in_drained_false",
                report.burn_in_drained_false.to_string(),
            );
            metric("certified_true", report.overall.certified_true.to_string());
            metric(
                "certified_false",
                report.overall.certified_false.to_string(),
            );
            metric(
                "final_third_certified_true",
                report.final_third.certified_true.to_string(),
            );
            metric(
                "final_third_certified_false",
                report.final_third.certified_false.to_string(),
            );
            metric(
                "final_third_relative_difference",
                num(report.final_third.relative_difference),
            );
            metric("honest_payoff_mean", num(report.honest_payoff.mean));
            metric("honest_payoff_stderr", num(report.honest_payoff.stderr));
            if let Some(lazy) = report.lazy_payoff {
                metric("lazy_payoff_mean", num(lazy.mean));
                metric("lazy_payoff_stderr", num(lazy.stderr));
            }
            metric("final_r_true", report.final_pools.r_true.to_string());
            metric("final_r_false", report.final_pools.r_false.to_string());
            out.write_tables(&trajectory, &[("summary", &summary)])?;
        }
    }
    Ok(Status::Pass)
}
