//! Parameter-grid sweeps and Monte Carlo aggregation over many games.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run_game, EngineError, GameConfig, GameResult};
use crate::stats::BetaParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default master seed when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_0000_0000_0001;

/// The four prior shapes swept over k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PriorShape {
    /// beta(1, 1)
    Flat,
    /// beta(1, k + 1)
    TailsFavoring,
    /// beta(k + 1, 1)
    HeadsFavoring,
    /// beta(k + 1, k + 1)
    Symmetric,
}

impl PriorShape {
    pub fn resolve(&self, k: u32) -> BetaParams {
        let k = f64::from(k);
        let (a, b) = match self {
            PriorShape::Flat => (1.0, 1.0),
            PriorShape::TailsFavoring => (1.0, k + 1.0),
            PriorShape::HeadsFavoring => (k + 1.0, 1.0),
            PriorShape::Symmetric => (k + 1.0, k + 1.0),
        };
        BetaParams { a, b }
    }
}

/// A prior shape together with the k fraction that sizes it.
/// The flat prior ignores the fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub shape: PriorShape,
    pub k_fraction: f64,
}

impl PriorSpec {
    pub fn flat() -> Self {
        Self {
            shape: PriorShape::Flat,
            k_fraction: 0.0,
        }
    }

    pub fn resolve(&self, n: u32) -> BetaParams {
        self.shape.resolve(resolve_k(self.k_fraction, n))
    }
}

/// The full experiment cross-product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub p_values: Vec<f64>,
    pub n_values: Vec<u32>,
    pub m_fractions: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub k_fractions: Vec<f64>,
    pub runs: u32,
    pub master_seed: u64,
    pub abstain_penalty: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            p_values: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            n_values: vec![3, 5, 10, 20, 30, 50],
            m_fractions: vec![0.1, 0.3, 0.5, 0.7, 1.0],
            alpha_values: vec![0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01],
            k_fractions: vec![0.1, 0.3, 0.5, 0.7, 1.0],
            runs: 100,
            master_seed: DEFAULT_SEED,
            abstain_penalty: 0.0,
        }
    }
}

impl SweepGrid {
    /// Prior specs in enumeration order: the flat prior once, then each
    /// non-flat shape crossed with every k fraction.
    pub fn prior_specs(&self) -> Vec<PriorSpec> {
        let mut specs = vec![PriorSpec::flat()];
        for shape in [
            PriorShape::TailsFavoring,
            PriorShape::HeadsFavoring,
            PriorShape::Symmetric,
        ] {
            for &kf in &self.k_fractions {
                specs.push(PriorSpec {
                    shape,
                    k_fraction: kf,
                });
            }
        }
        specs
    }

    /// All cells in lexicographic order over
    /// (p, n, m fraction, alpha, prior spec).
    pub fn cells(&self) -> Vec<GameConfig> {
        let priors = self.prior_specs();
        let mut cells = Vec::new();
        for &p in &self.p_values {
            for &n in &self.n_values {
                for &mf in &self.m_fractions {
                    for &alpha in &self.alpha_values {
                        for spec in &priors {
                            cells.push(GameConfig {
                                p,
                                n,
                                m: resolve_m(mf, n),
                                alpha,
                                prior: spec.resolve(n),
                                abstain_penalty: self.abstain_penalty,
                            });
                        }
                    }
                }
            }
        }
        cells
    }
}

/// Round half up.
fn round_half_up(x: f64) -> u32 {
    (x + 0.5).floor() as u32
}

/// Token budget for a fraction of n, floored at 1.
pub fn resolve_m(fraction: f64, n: u32) -> u32 {
    round_half_up(fraction * f64::from(n)).max(1)
}

/// Prior pseudo-count k for a fraction of n; may round to 0.
pub fn resolve_k(fraction: f64, n: u32) -> u32 {
    round_half_up(fraction * f64::from(n))
}

/// The four prior shapes at k = round(fraction * n).
pub fn resolve_priors(k_fraction: f64, n: u32) -> [BetaParams; 4] {
    let k = resolve_k(k_fraction, n);
    [
        PriorShape::Flat.resolve(k),
        PriorShape::TailsFavoring.resolve(k),
        PriorShape::HeadsFavoring.resolve(k),
        PriorShape::Symmetric.resolve(k),
    ]
}

/// splitmix64 finalizer; full-avalanche 64-bit mix.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-run seed: an avalanche mix of (master seed, cell id, run index).
/// Fixed so that results are reproducible independent of scheduling.
pub fn run_seed(master_seed: u64, cell_id: u64, run_index: u64) -> u64 {
    mix64(
        master_seed
            ^ mix64(cell_id.wrapping_add(0x9e37_79b9_7f4a_7c15) ^ mix64(run_index)),
    )
}

/// Monte Carlo aggregate for one agent in one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentSummary {
    pub mean_profit_per_allowed_bet: f64,
    pub std_error: f64,
    pub mean_bets_placed: f64,
    pub mean_profit_per_actual_bet: f64,
}

/// Monte Carlo aggregate over all runs of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub config: GameConfig,
    pub runs: u32,
    pub master_seed: u64,
    pub cell_id: u64,
    pub sample: AgentSummary,
    pub bayes: AgentSummary,
    pub conf: AgentSummary,
}

impl CellSummary {
    pub fn agent(&self, kind: crate::agents::AgentKind) -> &AgentSummary {
        match kind {
            crate::agents::AgentKind::Sample => &self.sample,
            crate::agents::AgentKind::Bayes => &self.bayes,
            crate::agents::AgentKind::Conf => &self.conf,
        }
    }
}

fn summarize(results: &[GameResult], pick: impl Fn(&GameResult) -> &crate::engine::AgentResult, m: u32) -> AgentSummary {
    let runs = results.len();
    let per_allowed: Vec<f64> = results
        .iter()
        .map(|r| pick(r).profit_per_allowed_bet(m))
        .collect();
    let mean = per_allowed.iter().sum::<f64>() / runs as f64;
    let std_error = if runs < 2 {
        0.0
    } else {
        let var = per_allowed
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>()
            / (runs - 1) as f64;
        (var / runs as f64).sqrt()
    };
    let mean_bets = results
        .iter()
        .map(|r| f64::from(pick(r).bets_placed))
        .sum::<f64>()
        / runs as f64;
    let mean_per_actual = results
        .iter()
        .map(|r| pick(r).profit_per_actual_bet())
        .sum::<f64>()
        / runs as f64;
    AgentSummary {
        mean_profit_per_allowed_bet: mean,
        std_error,
        mean_bets_placed: mean_bets,
        mean_profit_per_actual_bet: mean_per_actual,
    }
}

/// Run `runs` independent games of one cell and aggregate.
pub fn run_cell(
    config: &GameConfig,
    runs: u32,
    master_seed: u64,
    cell_id: u64,
) -> Result<CellSummary, EngineError> {
    config.validate()?;
    let results: Vec<GameResult> = (0..runs)
        .into_par_iter()
        .map(|run_index| {
            let seed = run_seed(master_seed, cell_id, u64::from(run_index));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run_game(config, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    Ok(CellSummary {
        config: *config,
        runs,
        master_seed,
        cell_id,
        sample: summarize(&results, |r| &r.sample, config.m),
        bayes: summarize(&results, |r| &r.bayes, config.m),
        conf: summarize(&results, |r| &r.conf, config.m),
    })
}

/// Run every cell of the grid. Output order and values are deterministic
/// for a fixed master seed, independent of worker count.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<CellSummary>, EngineError> {
    let cells = grid.cells();
    cells
        .par_iter()
        .enumerate()
        .map(|(i, config)| run_cell(config, grid.runs, grid.master_seed, i as u64))
        .collect()
}

/// Which published table layout to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableId {
    /// Varying n; m = 0.5n, alpha = 0.1, flat prior.
    Trials,
    /// Varying m; n = 20, alpha = 0.1, flat prior.
    Tokens,
    /// Varying confidence level; n = 20, m = 10, flat prior.
    Confidence,
    /// Varying the prior; n = 20, m = 10, alpha = 0.1.
    Priors,
}

impl TableId {
    pub fn from_number(id: u8) -> Option<Self> {
        match id {
            2 => Some(TableId::Trials),
            3 => Some(TableId::Tokens),
            4 => Some(TableId::Confidence),
            5 => Some(TableId::Priors),
            _ => None,
        }
    }

    pub fn number(&self) -> u8 {
        match self {
            TableId::Trials => 2,
            TableId::Tokens => 3,
            TableId::Confidence => 4,
            TableId::Priors => 5,
        }
    }

    /// Name of the varying parameter, used as the CSV column header.
    pub fn varying(&self) -> &'static str {
        match self {
            TableId::Trials => "n",
            TableId::Tokens => "m",
            TableId::Confidence => "confidence",
            TableId::Priors => "prior",
        }
    }
}

/// One row of a reproduced table: a (p, varying-parameter) pair, or the
/// per-p average when `p` is None ("Overall").
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub p: Option<f64>,
    pub param_label: String,
    pub n: u32,
    pub m: u32,
    pub sample: AgentSummary,
    pub bayes: AgentSummary,
    pub conf: AgentSummary,
}

/// A reproduced table: per-p blocks followed by the Overall block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub id: TableId,
    pub runs: u32,
    pub master_seed: u64,
    pub rows: Vec<TableRow>,
}

const TABLE_P_VALUES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

fn table_variants(id: TableId) -> Vec<(String, GameConfig)> {
    let base = GameConfig {
        p: 0.5,
        n: 20,
        m: 10,
        alpha: 0.1,
        prior: BetaParams::flat(),
        abstain_penalty: 0.0,
    };
    match id {
        TableId::Trials => [3u32, 5, 10, 20, 30, 50]
            .iter()
            .map(|&n| {
                (
                    n.to_string(),
                    GameConfig {
                        n,
                        m: resolve_m(0.5, n),
                        ..base
                    },
                )
            })
            .collect(),
        TableId::Tokens => [0.1, 0.3, 0.5, 0.7, 1.0]
            .iter()
            .map(|&mf| {
                let m = resolve_m(mf, 20);
                (m.to_string(), GameConfig { m, ..base })
            })
            .collect(),
        TableId::Confidence => [0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01]
            .iter()
            .map(|&alpha| (format!("{}", 1.0 - alpha), GameConfig { alpha, ..base }))
            .collect(),
        TableId::Priors => [(1.0, 1.0), (11.0, 1.0), (1.0, 11.0), (11.0, 11.0)]
            .iter()
            .map(|&(a, b)| {
                (
                    format!("({a:.0},{b:.0})"),
                    GameConfig {
                        prior: BetaParams { a, b },
                        ..base
                    },
                )
            })
            .collect(),
    }
}

fn average_summaries(parts: &[AgentSummary]) -> AgentSummary {
    let k = parts.len() as f64;
    AgentSummary {
        mean_profit_per_allowed_bet: parts
            .iter()
            .map(|s| s.mean_profit_per_allowed_bet)
            .sum::<f64>()
            / k,
        std_error: parts
            .iter()
            .map(|s| s.std_error * s.std_error)
            .sum::<f64>()
            .sqrt()
            / k,
        mean_bets_placed: parts.iter().map(|s| s.mean_bets_placed).sum::<f64>() / k,
        mean_profit_per_actual_bet: parts
            .iter()
            .map(|s| s.mean_profit_per_actual_bet)
            .sum::<f64>()
            / k,
    }
}

/// Reproduce one of the published result tables at the given run count.
///
/// Cell seeds come from `run_seed` with cell ids enumerated over the
/// (p, variant) grid, offset by the table number so tables draw from
/// distinct streams.
pub fn reproduce_table(id: TableId, runs: u32, master_seed: u64) -> Result<Table, EngineError> {
    let variants = table_variants(id);
    let id_offset = u64::from(id.number()) << 32;

    let mut jobs = Vec::new();
    for (pi, &p) in TABLE_P_VALUES.iter().enumerate() {
        for (vi, (label, config)) in variants.iter().enumerate() {
            let cell_id = id_offset + (pi * variants.len() + vi) as u64;
            jobs.push((label.clone(), GameConfig { p, ..*config }, cell_id));
        }
    }
    let summaries: Vec<CellSummary> = jobs
        .par_iter()
        .map(|(_, config, cell_id)| run_cell(config, runs, master_seed, *cell_id))
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    for (pi, &p) in TABLE_P_VALUES.iter().enumerate() {
        for (vi, (label, _)) in variants.iter().enumerate() {
            let s = &summaries[pi * variants.len() + vi];
            rows.push(TableRow {
                p: Some(p),
                param_label: label.clone(),
                n: s.config.n,
                m: s.config.m,
                sample: s.sample,
                bayes: s.bayes,
                conf: s.conf,
            });
        }
    }
    // Overall block: equal-weight average over p.
    for (vi, (label, _)) in variants.iter().enumerate() {
        let per_p: Vec<&CellSummary> = (0..TABLE_P_VALUES.len())
            .map(|pi| &summaries[pi * variants.len() + vi])
            .collect();
        let sample: Vec<AgentSummary> = per_p.iter().map(|s| s.sample).collect();
        let bayes: Vec<AgentSummary> = per_p.iter().map(|s| s.bayes).collect();
        let conf: Vec<AgentSummary> = per_p.iter().map(|s| s.conf).collect();
        rows.push(TableRow {
            p: None,
            param_label: label.clone(),
            n: per_p[0].config.n,
            m: per_p[0].config.m,
            sample: average_summaries(&sample),
            bayes: average_summaries(&bayes),
            conf: average_summaries(&conf),
        });
    }

    Ok(Table {
        id,
        runs,
        master_seed,
        rows,
    })
}
