//! Exact arithmetic substrate.
//!
//! Everything here is exact: rationals are arbitrary precision, polynomials
//! keep rational coefficients, and linear systems are solved without any
//! floating point. Values are immutable once built and every operation is a
//! pure function, so instances can be shared freely across threads.

pub mod expr;
pub mod field;
pub mod interp;
pub mod linalg;
pub mod parampoly;
pub mod rational;
pub mod ratfunc;
pub mod upoly;

pub use expr::{Expr, ExprError};
pub use field::{Field, Gaussian};
pub use interp::{interpolate_multi, interpolate_param, interpolate_upoly, InterpError};
pub use linalg::{solve_linear_exact, LinearSolution, Matrix};
pub use parampoly::{bindings, Bindings, ParamPoly, PolyRecord};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
pub use ratfunc::RatFunc;
pub use upoly::UniPoly;
