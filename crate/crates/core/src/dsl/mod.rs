//! A small drawing language over the hex board.
//!
//! ```text
//! define petal(p: pos, c: color) { paint flower(p) c }
//! repeat 3 offset (+3 columns) { call petal((2, 2), red) }
//! reflect all axis vertical-midline
//! ```
//!
//! [`parse_program`] builds a [`Program`], [`print_program`] writes its
//! canonical text and [`eval_program`] turns it into one [`Step`] per
//! top-level statement.

pub mod ast;
mod eval;
mod lexer;
mod parser;
mod printer;
mod transform;

pub use ast::*;
pub use eval::{eval_program, expand_region, EvalError, Step, MAX_ASSIGNMENTS, MAX_NESTING};
pub use parser::{parse_program, ParseError, ParseErrorKind};
pub use printer::{print_program, print_statement};
pub use transform::{reflect_region, rotate_position, rotate_region, AxisSpec, InvalidAxis};
