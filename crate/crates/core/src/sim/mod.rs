//! Round-based Monte Carlo engine.
//!
//! A trial funds a population of agents, fills the proposition list and
//! plays synchronous rounds. Each round certifiers pick and open their
//! certifications one at a time, voters draw assignments and commit, all
//! votes are revealed, decided propositions settle and the list is refilled.
//! All randomness comes from streams derived from the trial seed, so a
//! trial is reproducible bit for bit.

mod engine;
mod equilibrium;
mod experiment;
mod pools;
mod scenario;
mod verify;

pub use engine::{
    run_trial, CohortPayoff, DecidedSummary, PlayerPayoff, PoolPoint, Simulation, TrialStats,
};
pub use equilibrium::{
    bounty_straddle, equilibrium_check, BountyPoint, BountyStraddle, Deviation, DeviationResult,
    EquilibriumReport, EquilibriumSettings,
};
pub use experiment::{
    map_trials, run_experiment, run_trials, summarize, CohortSummary, ExperimentSummary,
};
pub use pools::{pool_bias_experiment, CertificationBalance, PoolBiasReport, PoolBiasSettings};
pub use scenario::{BountyDistribution, Cohort, PropositionStream, RunSettings, ScenarioConfig};
pub use verify::{
    verify, verify_row, verify_scenario, VerifyError, VerifyReport, VerifyRow, VerifySettings,
};
