//! Hexagons: a hex-board drawing world for grounded instruction following.
//!
//! - [`hexboard`]: board geometry, tile state and the `paint` primitive.
//! - [`dsl`]: a drawing language whose constructs mirror abstraction kinds
//!   (objects, loops, conditionals, functions, symmetry, recursion).
//! - [`metrics`]: board- and action-based precision/recall/F1 and exact match.
//! - [`naive`]: the rule-based pattern-matching baseline.
//! - [`dataset`]: drawing procedures on disk, validation, splits and stats.

pub mod hexboard;

pub use hexboard::{Action, ActionSet, Board, BoardError, Color, Position, PALETTE};
pub mod dataset;
pub mod dsl;
pub mod metrics;
pub mod naive;
