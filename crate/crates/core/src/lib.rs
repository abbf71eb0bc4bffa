//! Workbench for Ambainis-style quantum adversary lower bounds.
//!
//! The crate evaluates the four adversary bound expressions (`Alb1`..`Alb4`)
//! on explicit relations and weight schemes, computes certificate-based
//! measures of small functions, builds the standard hard instances for graph
//! properties, and checks the certificate ceilings that cap every adversary
//! bound. All verdicts are decided over exact rationals.

pub mod adversary;
pub mod certificates;
mod error;
pub mod function;
pub mod instances;
pub mod optimizer;
pub mod rational;
pub mod verifier;

pub use error::{Error, Result};
pub use function::{FunctionTable, InputWord, Value};
pub use rational::Q;
