//! Bounded symbolic verification of security protocol theories.

pub mod cli;
pub mod corpus;
pub mod deduction;
pub mod execution;
pub mod frontend;
pub mod graph;
pub mod property;
pub mod term;
pub mod theory;
