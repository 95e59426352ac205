//! Exact rational arithmetic with prime valuations and ultrametric absolute values.

mod norm;
mod prime;
mod rational;

pub use norm::UltraNorm;
pub use prime::{is_prime, Prime};
pub use rational::{abs, q, valuation, Rational, Valuation};
