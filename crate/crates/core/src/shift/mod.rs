//! Words, cylinders and the algebra of clopen subsets of the one-sided full
//! shift `Σ^ℕ`, plus eventually periodic points and a set-expression parser.

mod clopen;
mod parse;
mod point;
mod word;

pub use clopen::{all_cylinders, ClopenSet, SetOp, MAX_WORDS};
pub use parse::parse_set_expr;
pub use point::PointWord;
pub use word::{Alphabet, Word, MAX_ALPHABET};
