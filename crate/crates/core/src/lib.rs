//! Gauge functions and null Lagrangians for the linear oscillator.
//!
//! The crate builds standard and null Lagrangians as symbolic expressions,
//! certifies null Lagrangians through the Euler–Lagrange operator, derives
//! energy functions, extracts the driving force and energy shift carried by
//! time-dependent gauge functions, and integrates the resulting driven
//! oscillator with energy-balance tracking.

pub mod calculus;
pub mod cli;
pub mod dynamics;
pub mod expr;
pub mod gauge;
pub mod sampling;

pub use expr::{parse, parse_with, Bindings, Expr, ExprError, Var};
