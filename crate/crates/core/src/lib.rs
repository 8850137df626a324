//! Computational toolkit for multiplicative relations among singular moduli:
//! binary quadratic forms and class numbers, rigorous evaluation of the
//! j-function, isogeny denominators, relation-lattice bounds, discriminant
//! searches and exact case analysis of the resulting linear systems.

pub mod arith;
pub mod ball;
pub mod casecheck;
pub mod error;
pub mod isogeny;
pub mod jfun;
pub mod quadforms;
pub mod relations;
pub mod searches;

pub use arith::{factor, kronecker, Factored, Rational};
pub use ball::{Ball, ComplexBall, Float};
pub use error::{Error, Result};
pub use quadforms::{ClassGroupSummary, Discriminant, ReducedForm};
