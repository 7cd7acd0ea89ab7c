//! The three players: Bayes (posterior mean), Conf (confidence-interval
//! bounds), and Sample (raw proportion), plus the token-scheduling policy
//! each follows.

use crate::stats::{
    beta_mean, beta_posterior, confidence_interval, BetaParams, ConfidenceInterval, Counts,
    StatsError,
};

/// A per-trial decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Action {
    Buy,
    Sell,
    Hold,
}

/// One coin toss result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Outcome {
    Heads,
    Tails,
}

/// Which player an agent is; also selects the token-scheduling policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum AgentKind {
    Bayes,
    Conf,
    Sample,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Sample, AgentKind::Bayes, AgentKind::Conf];

    pub fn name(&self) -> &'static str {
        match self {
            AgentKind::Bayes => "bayes",
            AgentKind::Conf => "conf",
            AgentKind::Sample => "sample",
        }
    }
}

/// Bayes holds a beta prior and the running evidence counts.
#[derive(Debug, Clone, Copy)]
pub struct BayesState {
    pub prior: BetaParams,
    pub evidence: Counts,
}

impl BayesState {
    pub fn new(prior: BetaParams) -> Self {
        Self {
            prior,
            evidence: Counts::default(),
        }
    }

    pub fn posterior(&self) -> BetaParams {
        beta_posterior(self.prior, self.evidence)
    }

    pub fn observe(&mut self, outcome: Outcome) {
        record(&mut self.evidence, outcome);
    }
}

/// Conf holds the evidence counts and its confidence parameter alpha.
#[derive(Debug, Clone, Copy)]
pub struct ConfState {
    pub evidence: Counts,
    pub alpha: f64,
}

impl ConfState {
    pub fn new(alpha: f64) -> Self {
        Self {
            evidence: Counts::default(),
            alpha,
        }
    }

    pub fn interval(&self) -> Result<ConfidenceInterval, StatsError> {
        confidence_interval(self.evidence, self.alpha)
    }

    pub fn observe(&mut self, outcome: Outcome) {
        record(&mut self.evidence, outcome);
    }
}

/// Sample holds only the evidence counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct SampleState {
    pub evidence: Counts,
}

impl SampleState {
    /// Sample proportion h / (h + t); 0.5 with no observations.
    pub fn proportion(&self) -> f64 {
        let total = self.evidence.total();
        if total == 0 {
            0.5
        } else {
            f64::from(self.evidence.heads) / f64::from(total)
        }
    }

    pub fn observe(&mut self, outcome: Outcome) {
        record(&mut self.evidence, outcome);
    }
}

fn record(counts: &mut Counts, outcome: Outcome) {
    match outcome {
        Outcome::Heads => counts.heads += 1,
        Outcome::Tails => counts.tails += 1,
    }
}

/// Bayes buys when the ticket price is at most the posterior mean, and
/// sells otherwise. Never holds.
pub fn bayes_action(state: &BayesState, price: f64) -> Action {
    if price <= beta_mean(state.posterior()) {
        Action::Buy
    } else {
        Action::Sell
    }
}

/// Conf buys when the price is strictly below the interval's lower bound,
/// sells when strictly above the upper bound, and holds in between.
/// Boundary prices hold.
pub fn conf_action(state: &ConfState, price: f64) -> Result<Action, StatsError> {
    let ci = state.interval()?;
    Ok(if price < ci.lower {
        Action::Buy
    } else if price > ci.upper {
        Action::Sell
    } else {
        Action::Hold
    })
}

/// Sample buys when the price is at most the sample proportion, and sells
/// otherwise. Never holds.
pub fn sample_action(state: &SampleState, price: f64) -> Action {
    if price <= state.proportion() {
        Action::Buy
    } else {
        Action::Sell
    }
}

/// Whether the agent spends a token on this trial.
///
/// Bayes and Sample bet exactly on the last m of the n trials. Conf bets
/// whenever its decision rule produces a bet and a token remains. When
/// this returns false the agent's effective action is Hold.
pub fn wants_token(
    kind: AgentKind,
    trial_index: u32,
    n: u32,
    m: u32,
    tokens_left: u32,
    action: Action,
) -> bool {
    if tokens_left == 0 {
        return false;
    }
    match kind {
        AgentKind::Bayes | AgentKind::Sample => trial_index > n - m,
        AgentKind::Conf => action != Action::Hold,
    }
}
