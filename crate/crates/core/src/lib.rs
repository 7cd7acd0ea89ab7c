//! Short-run betting-market simulator.
//!
//! Three agents bet on a sequence of coin tosses against a market maker
//! that posts a random ticket price each trial: Bayes (beta posterior
//! mean), Conf (Clopper-Pearson confidence interval), and Sample (raw
//! sample proportion). The harness sweeps parameter grids and aggregates
//! profit per allowed bet over many seeded Monte Carlo runs.

pub mod agents;
pub mod engine;
pub mod harness;
pub mod report;
pub mod stats;

pub use agents::{Action, AgentKind, Outcome};
pub use engine::{GameConfig, GameResult, Trial};
pub use harness::{CellSummary, SweepGrid, Table, TableId};
pub use stats::{BetaParams, ConfidenceInterval, Counts};
