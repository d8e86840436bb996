//! Numerical toolkit for weighted composition operators from `F(p, q, s)`
//! spaces into Bloch-type spaces on the unit ball of C^n.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
pub mod app;
pub mod criteria;
pub mod decimal;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod sampling;
pub mod spaces;
pub mod symbols;
pub mod witness;

pub use error::{Error, Result};
pub use geometry::{BallPoint, ComplexVector, MoebiusMap};
pub use symbols::{HoloExpr, SelfMapSymbol, SymbolPair, WeightSymbol};
