//! Serialization surface for the CLI: flat output records, CSV and JSON
//! rendering, the sweep-grid config file, and trial-injection files.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::agents::{AgentKind, Outcome};
use crate::engine::Trial;
use crate::harness::{CellSummary, SweepGrid, Table};

/// Fixed CSV header for sweep output.
pub const SWEEP_CSV_HEADER: &str = "p,n,m,alpha,prior_a,prior_b,agent,mean_profit_per_allowed_bet,std_error,mean_bets_placed,runs,seed";

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key '{key}' on line {line}")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}, field '{field}': {message}")]
    Field {
        line: usize,
        field: &'static str,
        message: String,
    },
}

/// One flat row of sweep output: one (cell, agent) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub p: f64,
    pub n: u32,
    pub m: u32,
    pub alpha: f64,
    pub prior_a: f64,
    pub prior_b: f64,
    pub agent: &'static str,
    pub mean_profit_per_allowed_bet: f64,
    pub std_error: f64,
    pub mean_bets_placed: f64,
    pub runs: u32,
    pub seed: u64,
}

/// Flatten cell summaries into one record per (cell, agent).
pub fn to_records(cells: &[CellSummary]) -> Vec<OutputRecord> {
    let mut records = Vec::with_capacity(cells.len() * 3);
    for cell in cells {
        for kind in AgentKind::ALL {
            let s = cell.agent(kind);
            records.push(OutputRecord {
                p: cell.config.p,
                n: cell.config.n,
                m: cell.config.m,
                alpha: cell.config.alpha,
                prior_a: cell.config.prior.a,
                prior_b: cell.config.prior.b,
                agent: kind.name(),
                mean_profit_per_allowed_bet: s.mean_profit_per_allowed_bet,
                std_error: s.std_error,
                mean_bets_placed: s.mean_bets_placed,
                runs: cell.runs,
                seed: cell.master_seed,
            });
        }
    }
    records
}

pub fn records_to_csv(records: &[OutputRecord]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.p,
            r.n,
            r.m,
            r.alpha,
            r.prior_a,
            r.prior_b,
            r.agent,
            r.mean_profit_per_allowed_bet,
            r.std_error,
            r.mean_bets_placed,
            r.runs,
            r.seed
        )
        .expect("string write");
    }
    out
}

pub fn records_to_json(records: &[OutputRecord]) -> String {
    serde_json::to_string_pretty(records).expect("serializable records")
}

/// Render a reproduced table as CSV. Overall rows carry p = "overall".
pub fn table_to_csv(table: &Table) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "p,{},n,m,sample_mean,sample_stderr,bayes_mean,bayes_stderr,conf_mean,conf_stderr,conf_mean_bets",
        table.id.varying()
    )
    .expect("string write");
    for row in &table.rows {
        let p_label = row
            .p
            .map(|p| p.to_string())
            .unwrap_or_else(|| "overall".to_string());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            p_label,
            row.param_label,
            row.n,
            row.m,
            row.sample.mean_profit_per_allowed_bet,
            row.sample.std_error,
            row.bayes.mean_profit_per_allowed_bet,
            row.bayes.std_error,
            row.conf.mean_profit_per_allowed_bet,
            row.conf.std_error,
            row.conf.mean_bets_placed
        )
        .expect("string write");
    }
    out
}

pub fn table_to_json(table: &Table) -> String {
    serde_json::to_string_pretty(table).expect("serializable table")
}

fn parse_list<T: std::str::FromStr>(
    value: &str,
    line: usize,
    field: &'static str,
) -> Result<Vec<T>, ParseError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>().map_err(|e| ParseError::Field {
                line,
                field,
                message: format!("cannot parse '{s}': {e}"),
            })
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(
    value: &str,
    line: usize,
    field: &'static str,
) -> Result<T, ParseError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| ParseError::Field {
        line,
        field,
        message: format!("cannot parse '{}': {e}", value.trim()),
    })
}

/// Parse a sweep-grid config file.
///
/// Grammar: one `key = values` entry per line, values comma-separated,
/// `#` starts a comment. Keys: p, n, m_frac, alpha, k_frac, runs, seed,
/// penalty. Missing keys keep their defaults.
pub fn parse_grid(text: &str) -> Result<SweepGrid, ParseError> {
    let mut grid = SweepGrid::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ParseError::Syntax {
            line: line_no,
            message: format!("expected 'key = values', got '{line}'"),
        })?;
        let key = key.trim();
        match key {
            "p" => grid.p_values = parse_list(value, line_no, "p")?,
            "n" => grid.n_values = parse_list(value, line_no, "n")?,
            "m_frac" => grid.m_fractions = parse_list(value, line_no, "m_frac")?,
            "alpha" => grid.alpha_values = parse_list(value, line_no, "alpha")?,
            "k_frac" => grid.k_fractions = parse_list(value, line_no, "k_frac")?,
            "runs" => grid.runs = parse_scalar(value, line_no, "runs")?,
            "seed" => grid.master_seed = parse_scalar(value, line_no, "seed")?,
            "penalty" => grid.abstain_penalty = parse_scalar(value, line_no, "penalty")?,
            _ => {
                return Err(ParseError::UnknownKey {
                    key: key.to_string(),
                    line: line_no,
                })
            }
        }
    }
    Ok(grid)
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Write a grid in the config-file grammar; parses back to an equal grid.
pub fn grid_to_string(grid: &SweepGrid) -> String {
    format!(
        "p = {}\nn = {}\nm_frac = {}\nalpha = {}\nk_frac = {}\nruns = {}\nseed = {}\npenalty = {}\n",
        join(&grid.p_values),
        join(&grid.n_values),
        join(&grid.m_fractions),
        join(&grid.alpha_values),
        join(&grid.k_fractions),
        grid.runs,
        grid.master_seed,
        grid.abstain_penalty
    )
}

/// Parse a trial-injection file: one `price,outcome` pair per line,
/// outcome H or T.
pub fn parse_trials(text: &str) -> Result<Vec<Trial>, ParseError> {
    let mut trials = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (price_s, outcome_s) = line.split_once(',').ok_or_else(|| ParseError::Syntax {
            line: line_no,
            message: format!("expected 'price,outcome', got '{line}'"),
        })?;
        let price: f64 = parse_scalar(price_s, line_no, "price")?;
        if !(price > 0.0 && price < 1.0) {
            return Err(ParseError::Field {
                line: line_no,
                field: "price",
                message: format!("price must be strictly inside (0, 1), got {price}"),
            });
        }
        let outcome = match outcome_s.trim() {
            "H" | "h" => Outcome::Heads,
            "T" | "t" => Outcome::Tails,
            other => {
                return Err(ParseError::Field {
                    line: line_no,
                    field: "outcome",
                    message: format!("expected H or T, got '{other}'"),
                })
            }
        };
        trials.push(Trial {
            index: trials.len() as u32 + 1,
            price,
            outcome,
        });
    }
    Ok(trials)
}
