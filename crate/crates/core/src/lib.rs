//! Exact analysis of power allocation games between friendly and
//! adversarial countries.

pub mod cli;
pub mod dot;
pub mod equilibrium;
pub mod io;
pub mod model;
pub mod oracle;
pub mod preference;
pub mod rational;

pub use equilibrium::{
    can_flip_coordinate, construct_equilibrium, enumerate_equilibria, equivalence_classes, is_nash,
    NashCriterion, PairOrdering,
};
pub use model::{Country, Environment, State, StateVector, StrategyMatrix};
pub use rational::Rational;
