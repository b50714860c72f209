//! Exact arithmetic in the rational function field ℚ(x₁,…,xₙ).
//!
//! Every value is kept in a canonical form (coprime numerator and
//! denominator, denominator monic under graded-lexicographic order), so
//! equality and zero-testing are structural and exact.

mod chart;
mod gcd;
mod monomial;
mod parse;
mod poly;
mod ratfunc;

pub use chart::{Chart, ChartError};
pub use monomial::Monomial;
pub use parse::{parse_expr, ParseError};
pub use poly::Poly;
pub use ratfunc::RatFunc;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
