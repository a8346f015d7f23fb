//! Model checking for an epistemic probability logic with player-relative
//! interpretation of atoms, and the correspondence between coordination
//! strategies in such structures and (subjective) correlated equilibria.

pub mod cli;
pub mod construct;
pub mod coordination;
pub mod fixtures;
pub mod formula;
pub mod game;
pub mod par;
pub mod rational;
pub mod semantics;
pub mod simplex;
pub mod stateset;
pub mod structure;
pub mod sweep;

pub use formula::{Atom, Formula};
pub use game::{Distribution, Game, PlayerId};
pub use rational::Rational;
pub use stateset::StateSet;
pub use structure::EpistemicStructure;
