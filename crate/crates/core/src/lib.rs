//! A blockchain-free model of a decentralized oracle built on staked voting.
//!
//! Voters stake a small amount and are assigned a random proposition;
//! certifiers stake a large amount on propositions of their choice. Once a
//! proposition has collected enough voting stake it is decided, bounties and
//! pool rewards go to the winning side, and losing stakes refill the pools.
//!
//! - [`protocol`]: the game state machine, commit-reveal and the event log.
//! - [`agents`]: player beliefs and strategies.
//! - [`analysis`]: closed-form correctness and manipulation probabilities.
//! - [`sim`]: round-based Monte Carlo engine and experiments.
//! - [`config`]: scenario files.

pub mod agents;
pub mod analysis;
pub mod config;
pub mod protocol;
pub mod seed;
pub mod sim;
pub mod stats;
