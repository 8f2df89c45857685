//! Exact symbolic engine for non-commutative binomial expansions.
//!
//! * [`scalars`]: rationals and polynomials in central parameters.
//! * [`freealg`]: the free associative algebra, commutators and the
//!   iteration `(A + d_B)^k 1`.
//! * [`rewrite`]: normal-ordering systems for the commutative, `d_B A = hA²`
//!   and Weyl relations.
//! * [`binomial`]: expansion engines for `(A + B)^n` and their closed forms.
//! * [`diffop`]: realization by differential operators on polynomials,
//!   including Hermite polynomials.

pub mod binomial;
pub mod diffop;
pub mod freealg;
pub mod rewrite;
pub mod scalars;

pub use freealg::{Alphabet, Generator, NCPoly, Word};
pub use rewrite::{Family, RelationSystem};
pub use scalars::{ParamPoly, Rational};
