use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use betmarket::engine::{run_game, run_game_with_trials, GameConfig, GameResult};
use betmarket::harness::{reproduce_table, sweep, SweepGrid, TableId, DEFAULT_SEED};
use betmarket::report;
use betmarket::stats::BetaParams;
use betmarket::AgentKind;

#[derive(Parser)]
#[command(
    name = "betmarket",
    about = "Simulate betting agents in a random-price ticket market over coin tosses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play a single game and print the per-agent ledger and metrics
    Run(RunArgs),
    /// Reproduce one of the published result tables (ids 2-5)
    Table(TableArgs),
    /// Run a parameter-grid sweep and write one row per (cell, agent)
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// True chance of heads
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Number of trials
    #[arg(long, default_value_t = 20)]
    n: u32,
    /// Token budget (max bets per agent)
    #[arg(long, default_value_t = 10)]
    m: u32,
    /// Conf's significance level
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Bayes's prior as "a,b"
    #[arg(long, default_value = "1,1", value_parser = parse_prior)]
    prior: BetaParams,
    /// Penalty charged to Conf per declined bet while tokens remain
    #[arg(long, default_value_t = 0.0)]
    penalty: f64,
    /// Master seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Injected trial file (one "price,outcome" per line, outcome H or T);
    /// replaces the random generator and must contain exactly n trials
    #[arg(long)]
    trials: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Table id: 2 (trials), 3 (tokens), 4 (confidence), 5 (priors)
    #[arg(long)]
    id: u8,
    /// Monte Carlo runs per cell
    #[arg(long, default_value_t = 100)]
    runs: u32,
    /// Master seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid config file; defaults to the full experiment grid
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Override the grid's run count
    #[arg(long)]
    runs: Option<u32>,
    /// Override the grid's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the grid's abstention penalty
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_prior(s: &str) -> Result<BetaParams, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected 'a,b', got '{s}'"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("bad a: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad b: {e}"))?;
    BetaParams::new(a, b).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Table(args) => cmd_table(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn configure_workers(workers: usize) -> Result<(), Box<dyn std::error::Error>> {
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()?;
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Box<dyn std::error::Error>> {
    let config = GameConfig {
        p: args.p,
        n: args.n,
        m: args.m,
        alpha: args.alpha,
        prior: args.prior,
        abstain_penalty: args.penalty,
    };
    config.validate()?;
    let result = match &args.trials {
        Some(path) => {
            let trials = report::parse_trials(&fs::read_to_string(path)?)?;
            run_game_with_trials(&config, &trials)?
        }
        None => run_game(&config, &mut ChaCha8Rng::seed_from_u64(args.seed))?,
    };
    print_game(&result);
    Ok(())
}

fn print_game(result: &GameResult) {
    let config = &result.config;
    println!(
        "game: p={} n={} m={} alpha={} prior=({},{}) penalty={}",
        config.p, config.n, config.m, config.alpha, config.prior.a, config.prior.b,
        config.abstain_penalty
    );
    for kind in AgentKind::ALL {
        let agent = result.agent(kind);
        println!("\n{}:", kind.name());
        for entry in &agent.ledger {
            println!(
                "  trial {:>3}  {:<4}  payoff {:+.4}",
                entry.trial,
                format!("{:?}", entry.action).to_lowercase(),
                entry.payoff
            );
        }
        println!(
            "  total {:+.4}  bets {}  per-allowed {:+.4}  per-actual {:+.4}",
            agent.total_profit,
            agent.bets_placed,
            agent.profit_per_allowed_bet(config.m),
            agent.profit_per_actual_bet()
        );
        if agent.penalties_charged > 0 {
            println!("  penalties charged: {}", agent.penalties_charged);
        }
    }
}

fn cmd_table(args: TableArgs) -> Result<(), Box<dyn std::error::Error>> {
    configure_workers(args.workers)?;
    let id = TableId::from_number(args.id)
        .ok_or_else(|| format!("unknown table id {}; expected 2, 3, 4, or 5", args.id))?;
    let table = reproduce_table(id, args.runs, args.seed)?;
    let rendered = match args.format {
        Format::Csv => report::table_to_csv(&table),
        Format::Json => report::table_to_json(&table),
    };
    emit(&rendered, args.out.as_deref())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Box<dyn std::error::Error>> {
    configure_workers(args.workers)?;
    let mut grid = match &args.grid {
        Some(path) => report::parse_grid(&fs::read_to_string(path)?)?,
        None => SweepGrid::default(),
    };
    if let Some(runs) = args.runs {
        grid.runs = runs;
    }
    if let Some(seed) = args.seed {
        grid.master_seed = seed;
    }
    if let Some(penalty) = args.penalty {
        grid.abstain_penalty = penalty;
    }
    let cells = sweep(&grid)?;
    let records = report::to_records(&cells);
    let rendered = match args.format {
        Format::Csv => report::records_to_csv(&records),
        Format::Json => report::records_to_json(&records),
    };
    emit(&rendered, args.out.as_deref())
}

fn emit(rendered: &str, out: Option<&std::path::Path>) -> Result<(), Box<dyn std::error::Error>> {
    match out {
        Some(path) => fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}
