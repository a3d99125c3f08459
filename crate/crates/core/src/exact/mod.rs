//! Exact arithmetic: rationals, polynomials, rational functions and truncated series.

pub mod laurent;
pub mod multi;
pub mod pfrac;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod series;

pub use laurent::{local_laurent, local_laurent_log, residue, LogSeries, ZExpr};
pub use multi::MultiSeries;
pub use pfrac::{partial_fractions, PartialFractions, PoleTerm};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use rational::{q, qf, Rational};
pub use series::Series;
