//! End-to-end acceptance suite. Each test prints one pass/fail line for
//! its criterion; Monte Carlo criteria run at 10,000 runs per cell so the
//! estimate noise sits well inside the stated tolerance bands.

mod common;

use std::process::Command;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use betmarket::agents::{Action, Outcome};
use betmarket::engine::{payoff, run_game_with_trials, sample_trial, GameConfig, Trial};
use betmarket::harness::{reproduce_table, run_cell, Table, TableId, TableRow};
use betmarket::stats::{beta_quantile, confidence_interval, regularized_incomplete_beta, BetaParams, Counts};

const SEED: u64 = 42;
const RUNS: u32 = 10_000;

fn table2() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| reproduce_table(TableId::Trials, RUNS, SEED).unwrap())
}

fn table3() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| reproduce_table(TableId::Tokens, RUNS, SEED).unwrap())
}

fn table5() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| reproduce_table(TableId::Priors, RUNS, SEED).unwrap())
}

fn row<'t>(table: &'t Table, p: Option<f64>, label: &str) -> &'t TableRow {
    table
        .rows
        .iter()
        .find(|r| r.p == p && r.param_label == label)
        .unwrap_or_else(|| panic!("no row p={p:?} label={label}"))
}

fn combined_se(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

#[test]
fn criterion_01_numerics_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst_cdf = 0.0_f64;
    for _ in 0..1000 {
        let a = rng.gen_range(0.1..=50.0);
        let b = rng.gen_range(0.1..=50.0);
        let x = rng.gen_range(1e-6..1.0 - 1e-6);
        let ours = regularized_incomplete_beta(x, a, b).unwrap();
        let oracle = common::beta_cdf_oracle(x, a, b);
        let err = (ours - oracle).abs();
        worst_cdf = worst_cdf.max(err);
        assert!(err <= 1e-10, "CDF mismatch at x={x} a={a} b={b}: ours={ours} oracle={oracle}");
    }

    // Spot-check the quantile path against the oracle-inverted CDF.
    for (q, a, b) in [(0.05, 5.0, 6.0), (0.5, 2.0, 5.0), (0.975, 3.0, 8.0)] {
        let ours = beta_quantile(q, a, b).unwrap();
        let oracle = common::beta_quantile_oracle(q, a, b);
        assert!(
            (ours - oracle).abs() <= 1e-9,
            "quantile mismatch at q={q} a={a} b={b}: ours={ours} oracle={oracle}"
        );
    }

    let mut worst_rt = 0.0_f64;
    for _ in 0..200 {
        let a = rng.gen_range(0.1..=50.0);
        let b = rng.gen_range(0.1..=50.0);
        for q in [0.001, 0.025, 0.05, 0.5, 0.95, 0.975, 0.999] {
            let x = beta_quantile(q, a, b).unwrap();
            let residual = (regularized_incomplete_beta(x, a, b).unwrap() - q).abs();
            // Accept the representable optimum where the quantile sits
            // within a few ulps of 0 or 1 and no f64 can reach the band.
            let up = f64::from_bits(x.to_bits() + 1).min(1.0);
            let down = if x > 0.0 {
                f64::from_bits(x.to_bits() - 1)
            } else {
                0.0
            };
            let resolution = (regularized_incomplete_beta(up, a, b).unwrap()
                - regularized_incomplete_beta(down, a, b).unwrap())
            .abs();
            assert!(
                residual <= 1e-10 || residual <= resolution,
                "quantile residual {residual} at q={q} a={a} b={b} (f64 resolution {resolution})"
            );
            if residual > resolution {
                worst_rt = worst_rt.max(residual);
            }
        }
    }
    println!("criterion 1 (numerics oracle equivalence, worst cdf err {worst_cdf:.2e}, worst roundtrip {worst_rt:.2e}): PASS");
}

#[test]
fn criterion_02_exact_coverage() {
    let p_grid: Vec<f64> = (1..100).map(|i| f64::from(i) / 100.0).collect();
    for alpha in [0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01] {
        for n in 1..=25u32 {
            let intervals: Vec<_> = (0..=n)
                .map(|h| confidence_interval(Counts::new(h, n - h), alpha).unwrap())
                .collect();
            for &p in &p_grid {
                let coverage: f64 = (0..=n)
                    .filter(|&h| intervals[h as usize].contains(p))
                    .map(|h| common::binomial_pmf(n, h, p))
                    .sum();
                assert!(
                    coverage >= 1.0 - alpha - 1e-12,
                    "coverage {coverage} < {} at n={n} p={p} alpha={alpha}",
                    1.0 - alpha
                );
            }
        }
    }
    println!("criterion 2 (exact coverage, all n <= 25): PASS");
}

#[test]
fn criterion_03_hand_trace_ledger() {
    let config = GameConfig {
        p: 0.5,
        n: 2,
        m: 1,
        alpha: 0.1,
        prior: BetaParams::flat(),
        abstain_penalty: 0.0,
    };
    let trials = [
        Trial { index: 1, price: 0.9, outcome: Outcome::Heads },
        Trial { index: 2, price: 0.1, outcome: Outcome::Heads },
    ];
    let result = run_game_with_trials(&config, &trials).unwrap();
    assert!((result.bayes.total_profit - 0.9).abs() < 1e-15);
    assert_eq!(result.conf.total_profit, 0.0);
    assert_eq!(result.conf.bets_placed, 0);
    println!("criterion 3 (hand-trace ledger): PASS");
}

#[test]
fn criterion_04_table2_spot_reproduction() {
    let t = table2();
    let checks = [
        (0.1, "50", "conf", 0.5395),
        (0.1, "50", "bayes", 0.4002),
        (0.9, "50", "conf", 0.5467),
    ];
    for (p, n, agent, published) in checks {
        let r = row(t, Some(p), n);
        let mean = match agent {
            "conf" => r.conf.mean_profit_per_allowed_bet,
            "bayes" => r.bayes.mean_profit_per_allowed_bet,
            _ => unreachable!(),
        };
        assert!(
            (mean - published).abs() <= 0.05,
            "{agent} at p={p}, n={n}: got {mean}, published {published}"
        );
    }
    println!("criterion 4 (table 2 spot reproduction +/-0.05): PASS");
}

#[test]
fn criterion_05_crossover_ordering() {
    let t = table2();
    let short = row(t, None, "3");
    let gap = short.bayes.mean_profit_per_allowed_bet - short.conf.mean_profit_per_allowed_bet;
    assert!(
        gap > 3.0 * combined_se(short.bayes.std_error, short.conf.std_error),
        "n=3: Bayes does not lead Conf by 3 SE (gap {gap})"
    );
    for n in ["30", "50"] {
        let long = row(t, None, n);
        let vs_bayes = long.conf.mean_profit_per_allowed_bet - long.bayes.mean_profit_per_allowed_bet;
        let vs_sample = long.conf.mean_profit_per_allowed_bet - long.sample.mean_profit_per_allowed_bet;
        assert!(
            vs_bayes > 3.0 * combined_se(long.conf.std_error, long.bayes.std_error),
            "n={n}: Conf does not lead Bayes by 3 SE (gap {vs_bayes})"
        );
        assert!(
            vs_sample > 3.0 * combined_se(long.conf.std_error, long.sample.std_error),
            "n={n}: Conf does not lead Sample by 3 SE (gap {vs_sample})"
        );
    }
    println!("criterion 5 (crossover ordering in n): PASS");
}

#[test]
fn criterion_06_token_budget_decay() {
    let t = table3();
    let means: Vec<f64> = ["2", "6", "10", "14", "20"]
        .iter()
        .map(|m| row(t, None, m).conf.mean_profit_per_allowed_bet)
        .collect();
    for pair in means.windows(2) {
        assert!(
            pair[0] > pair[1],
            "Conf mean not strictly decreasing in m: {means:?}"
        );
    }
    println!("criterion 6 (token-budget decay for Conf): PASS");
}

#[test]
fn criterion_07_confidence_level_decay() {
    let base = GameConfig {
        p: 0.5,
        n: 20,
        m: 10,
        alpha: 0.1,
        prior: BetaParams::flat(),
        abstain_penalty: 0.0,
    };
    let overall = |alpha: f64, id_base: u64| -> (f64, f64) {
        let cells: Vec<_> = [0.1, 0.3, 0.5, 0.7, 0.9]
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                run_cell(&GameConfig { p, alpha, ..base }, RUNS, SEED, id_base + i as u64).unwrap()
            })
            .collect();
        let mean = cells.iter().map(|c| c.conf.mean_profit_per_allowed_bet).sum::<f64>() / 5.0;
        let se = cells
            .iter()
            .map(|c| c.conf.std_error.powi(2))
            .sum::<f64>()
            .sqrt()
            / 5.0;
        (mean, se)
    };
    let (mean_70, se_70) = overall(0.3, 700);
    let (mean_99, se_99) = overall(0.01, 990);
    let gap = mean_70 - mean_99;
    assert!(
        gap > 3.0 * combined_se(se_70, se_99),
        "Conf at level 0.7 ({mean_70}) does not beat level 0.99 ({mean_99}) by 3 SE"
    );
    println!("criterion 7 (confidence-level decay): PASS");
}

#[test]
fn criterion_08_prior_matching() {
    let t = table5();
    let tails_01 = row(t, Some(0.1), "(1,11)").bayes.mean_profit_per_allowed_bet;
    let heads_01 = row(t, Some(0.1), "(11,1)").bayes.mean_profit_per_allowed_bet;
    assert!(tails_01 > heads_01, "p=0.1: (1,11) {tails_01} <= (11,1) {heads_01}");
    let tails_09 = row(t, Some(0.9), "(1,11)").bayes.mean_profit_per_allowed_bet;
    let heads_09 = row(t, Some(0.9), "(11,1)").bayes.mean_profit_per_allowed_bet;
    assert!(heads_09 > tails_09, "p=0.9: (11,1) {heads_09} <= (1,11) {tails_09}");

    let flat = row(t, None, "(1,1)").bayes.mean_profit_per_allowed_bet;
    for label in ["(11,1)", "(1,11)", "(11,11)"] {
        let other = row(t, None, label).bayes.mean_profit_per_allowed_bet;
        assert!(flat > other, "flat prior {flat} does not beat {label} {other} overall");
    }
    println!("criterion 8 (prior matching and flat-prior dominance): PASS");
}

#[test]
fn criterion_09_per_actual_bet_metric() {
    let t = table2();
    for r in t.rows.iter().filter(|r| r.p.is_some()) {
        let conf = &r.conf;
        if conf.mean_bets_placed < f64::from(r.m) && conf.mean_profit_per_allowed_bet >= 0.0 {
            assert!(
                conf.mean_profit_per_actual_bet >= conf.mean_profit_per_allowed_bet - 1e-12,
                "p={:?} n={}: per-actual {} < per-allowed {}",
                r.p,
                r.n,
                conf.mean_profit_per_actual_bet,
                conf.mean_profit_per_allowed_bet
            );
        }
    }
    for n in ["20", "30", "50"] {
        let r = row(t, None, n);
        assert!(
            r.conf.mean_profit_per_actual_bet > r.bayes.mean_profit_per_actual_bet,
            "n={n}: Conf per-actual {} <= Bayes per-actual {}",
            r.conf.mean_profit_per_actual_bet,
            r.bayes.mean_profit_per_actual_bet
        );
    }
    println!("criterion 9 (per-actual-bet metric relations): PASS");
}

#[test]
fn criterion_10_determinism_across_worker_counts() {
    let bin = env!("CARGO_BIN_EXE_betmarket");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "2"] {
        let path = dir.path().join(format!("t2_w{workers}.csv"));
        let status = Command::new(bin)
            .args([
                "table", "--id", "2", "--runs", "400", "--seed", "7",
                "--workers", workers, "--out",
            ])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "CSV differs across worker counts");
    println!("criterion 10 (byte-identical output across worker counts): PASS");
}

#[test]
fn criterion_11_market_neutrality() {
    let n = 100_000u32;
    for (seed, p) in [(5u64, 0.3), (6, 0.7)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let payoffs: Vec<f64> = (1..=n)
            .map(|i| {
                let t = sample_trial(&mut rng, i, p);
                payoff(Action::Buy, t.outcome, t.price)
            })
            .collect();
        let mean = payoffs.iter().sum::<f64>() / f64::from(n);
        let var = payoffs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / f64::from(n - 1);
        let se = (var / f64::from(n)).sqrt();
        let expected = p - 0.5;
        assert!(
            (mean - expected).abs() <= 4.0 * se,
            "always-Buy mean {mean} vs expected {expected} (se {se}) at p={p}"
        );
    }
    println!("criterion 11 (market neutrality of always-Buy): PASS");
}
