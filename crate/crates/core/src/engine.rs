//! One complete game: generate trials (random ticket price, coin outcome),
//! query each agent, apply payoffs and the token budget, and produce a
//! per-agent ledger.

use rand::Rng;
use thiserror::Error;

use crate::agents::{
    bayes_action, conf_action, sample_action, wants_token, Action, AgentKind, BayesState,
    ConfState, Outcome, SampleState,
};
use crate::stats::{BetaParams, StatsError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid game config: {0}")]
    Config(String),
    #[error("injected trial sequence has {got} trials, config expects {expected}")]
    TrialCount { got: usize, expected: usize },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Parameters of one experiment cell.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GameConfig {
    /// True chance of heads.
    pub p: f64,
    /// Number of trials.
    pub n: u32,
    /// Token budget: each agent may bet at most m times.
    pub m: u32,
    /// Conf's significance level.
    pub alpha: f64,
    /// Bayes's prior.
    pub prior: BetaParams,
    /// Fee charged to Conf each time it declines while tokens remain.
    pub abstain_penalty: f64,
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(EngineError::Config(format!(
                "p must satisfy 0 < p < 1, got {}",
                self.p
            )));
        }
        if self.n == 0 {
            return Err(EngineError::Config("n must be at least 1".into()));
        }
        if self.m == 0 || self.m > self.n {
            return Err(EngineError::Config(format!(
                "m must satisfy 1 <= m <= n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(EngineError::Config(format!(
                "alpha must satisfy 0 < alpha < 1, got {}",
                self.alpha
            )));
        }
        if !(self.abstain_penalty >= 0.0) {
            return Err(EngineError::Config(format!(
                "abstain_penalty must be nonnegative, got {}",
                self.abstain_penalty
            )));
        }
        Ok(())
    }
}

/// One posted price and the toss that followed it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Trial {
    /// 1-based trial index.
    pub index: u32,
    /// Ticket price, strictly inside (0, 1).
    pub price: f64,
    pub outcome: Outcome,
}

/// One agent's record of a trial.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LedgerEntry {
    pub trial: u32,
    pub action: Action,
    pub payoff: f64,
}

/// One agent's full-game outcome.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AgentResult {
    pub kind: AgentKind,
    pub total_profit: f64,
    pub bets_placed: u32,
    pub penalties_charged: u32,
    pub ledger: Vec<LedgerEntry>,
}

impl AgentResult {
    fn new(kind: AgentKind) -> Self {
        Self {
            kind,
            total_profit: 0.0,
            bets_placed: 0,
            penalties_charged: 0,
            ledger: Vec::new(),
        }
    }

    pub fn profit_per_allowed_bet(&self, m: u32) -> f64 {
        self.total_profit / f64::from(m)
    }

    /// Total profit over bets actually placed; 0 when no bets were placed.
    pub fn profit_per_actual_bet(&self) -> f64 {
        if self.bets_placed == 0 {
            0.0
        } else {
            self.total_profit / f64::from(self.bets_placed)
        }
    }
}

/// Per-agent ledgers for one game.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GameResult {
    pub config: GameConfig,
    pub sample: AgentResult,
    pub bayes: AgentResult,
    pub conf: AgentResult,
}

impl GameResult {
    pub fn agent(&self, kind: AgentKind) -> &AgentResult {
        match kind {
            AgentKind::Sample => &self.sample,
            AgentKind::Bayes => &self.bayes,
            AgentKind::Conf => &self.conf,
        }
    }
}

/// Payoff of one trial: a ticket bought at price t pays 1 on heads; a sold
/// ticket is the opposite position; holding pays nothing.
pub fn payoff(action: Action, outcome: Outcome, price: f64) -> f64 {
    match (action, outcome) {
        (Action::Buy, Outcome::Heads) => 1.0 - price,
        (Action::Buy, Outcome::Tails) => -price,
        (Action::Sell, Outcome::Heads) => -(1.0 - price),
        (Action::Sell, Outcome::Tails) => price,
        (Action::Hold, _) => 0.0,
    }
}

/// Draw one trial: a uniform price on the open interval (0, 1), then the
/// toss with chance of heads p. The generator is consumed in exactly this
/// order (price, then outcome) so that seeded runs are portable.
pub fn sample_trial<R: Rng + ?Sized>(rng: &mut R, index: u32, p: f64) -> Trial {
    let price = loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            break u;
        }
    };
    let outcome = if rng.gen::<f64>() < p {
        Outcome::Heads
    } else {
        Outcome::Tails
    };
    Trial {
        index,
        price,
        outcome,
    }
}

/// Run one game with generated trials.
pub fn run_game<R: Rng + ?Sized>(config: &GameConfig, rng: &mut R) -> Result<GameResult, EngineError> {
    config.validate()?;
    let trials: Vec<Trial> = (1..=config.n)
        .map(|i| sample_trial(rng, i, config.p))
        .collect();
    play(config, &trials)
}

/// Run one game with an injected trial sequence, for hand traces.
pub fn run_game_with_trials(config: &GameConfig, trials: &[Trial]) -> Result<GameResult, EngineError> {
    config.validate()?;
    if trials.len() != config.n as usize {
        return Err(EngineError::TrialCount {
            got: trials.len(),
            expected: config.n as usize,
        });
    }
    play(config, trials)
}

fn play(config: &GameConfig, trials: &[Trial]) -> Result<GameResult, EngineError> {
    let mut sample_state = SampleState::default();
    let mut bayes_state = BayesState::new(config.prior);
    let mut conf_state = ConfState::new(config.alpha);

    let mut results = [
        AgentResult::new(AgentKind::Sample),
        AgentResult::new(AgentKind::Bayes),
        AgentResult::new(AgentKind::Conf),
    ];
    let mut tokens = [config.m; 3];

    for trial in trials {
        let actions = [
            sample_action(&sample_state, trial.price),
            bayes_action(&bayes_state, trial.price),
            conf_action(&conf_state, trial.price)?,
        ];

        for (i, kind) in AgentKind::ALL.iter().enumerate() {
            let decided = actions[i];
            let bets = wants_token(*kind, trial.index, config.n, config.m, tokens[i], decided);
            let effective = if bets { decided } else { Action::Hold };
            let pay = payoff(effective, trial.outcome, trial.price);
            if bets {
                tokens[i] -= 1;
                results[i].bets_placed += 1;
            }
            results[i].total_profit += pay;
            // The decline penalty applies to Conf only, when its rule says
            // Hold while tokens remain.
            if *kind == AgentKind::Conf
                && config.abstain_penalty > 0.0
                && decided == Action::Hold
                && tokens[i] > 0
            {
                results[i].total_profit -= config.abstain_penalty;
                results[i].penalties_charged += 1;
            }
            results[i].ledger.push(LedgerEntry {
                trial: trial.index,
                action: effective,
                payoff: pay,
            });
        }

        sample_state.observe(trial.outcome);
        bayes_state.observe(trial.outcome);
        conf_state.observe(trial.outcome);
    }

    let [sample, bayes, conf] = results;
    Ok(GameResult {
        config: *config,
        sample,
        bayes,
        conf,
    })
}
