//! Relational semantics for non-deterministic programs with failure: demonic and
//! angelic operators, Hoare-style correctness, finite ordered algebras and their
//! relational representations, a law checker and a representation game engine.

pub mod algebra;
pub mod config;
pub mod correctness;
pub mod error;
pub mod game;
pub mod law;
pub mod program;
pub mod relation;
pub mod repr;
pub mod suite;
pub mod space;
pub mod syntax;

pub use error::{RelicError, Result, SyntaxError};
pub use program::ProgramRelation;
pub use relation::Relation;
pub use space::{ElemSet, StateSpace};
