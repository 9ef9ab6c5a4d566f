//! Unfold/fold transformation of definite logic programs, with abductive
//! goal introduction and bounded semantic checking of every step.

pub mod abduce;
pub mod corpus;
pub mod derivation;
pub mod engine;
pub mod kernel;
pub mod rules;
pub mod service;
pub mod verify;
