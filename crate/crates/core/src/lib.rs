//! Quantum games: density-matrix evolution under classical and quantum
//! strategies, solution concepts over strategy grids, concrete games and
//! protocols, and seeded Monte Carlo simulation.
//!
//! Qubit 0 is the most significant bit of every basis index.

pub mod equilibria;
pub mod error;
pub mod game;
pub mod games;
pub mod linalg;
pub mod market;
pub mod numfmt;
pub mod protocols;
pub mod quantum;
pub mod strategy_spec;

pub use error::{Error, Result};
pub use game::{
    expected_payoff_a, expected_payoff_b, flip_channel, play, u2, u2_angles, PayoffPair,
    PayoffRule, Player, QuantumGame, Strategy, StrategyKind, StrategySpace, TurnSchedule,
};
pub use linalg::{CMatrix, C64};
pub use quantum::{Channel, DensityMatrix, StateVector, Unitary};
