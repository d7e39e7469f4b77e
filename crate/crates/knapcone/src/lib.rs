//! Exact arithmetic for knapsack-cone decomposition and constant-term extraction.
//!
//! The library decomposes denumerant (knapsack) cones into short signed sums of
//! unimodular-cone generating functions, evaluates Sylvester denumerants
//! `d(a0; a1,...,an)` exactly, and eliminates variables from Elliott rational
//! functions (rational functions whose denominator is a product of binomials
//! `1 - monomial`) by iterated constant-term extraction.
//!
//! Module map:
//! - [`matrix`]: arbitrary-precision integer matrices, Smith normal form,
//!   maximal-minor gcd.
//! - [`series`]: truncated univariate power series with exact rational
//!   coefficients; Todd-factor series `Bt/(e^{Bt}-1)`.
//! - [`lattice`]: exact LLL reduction, signed remainders, multiplier search and
//!   the closed small-index selection rules.
//! - [`elliott`]: the Elliott-term data model (monomials, Laurent numerators,
//!   binomial denominators), matrix encodings and their transforms.
//! - [`decdenu`]: the recursive cone decomposition itself, with tree
//!   instrumentation.
//! - [`cteuclid`]: multivariate constant-term elimination built on top of the
//!   decomposition.
//! - [`evaluate`]: numeric specialization at all-variables-one via a generic
//!   direction and Todd series; denumerants and Frobenius verification.
//! - [`oracles`]: independent ground-truth engines (dynamic programming,
//!   truncated iterated-Laurent expansion) used by the test suite.
//! - [`instances`]: the embedded benchmark instances.
//! - [`io`]: JSON/CSV formats shared with the command-line tool.

pub mod cli;
pub mod cteuclid;
pub mod decdenu;
pub mod elliott;
pub mod evaluate;
pub mod instances;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod oracles;
pub mod series;

use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A matrix does not have full row rank where one is required.
    #[error("matrix is rank deficient")]
    RankDeficient,
    /// A Todd factor was requested for the zero direction.
    #[error("todd factor series requires a nonzero direction")]
    ZeroDirection,
    /// LLL reduction was given linearly dependent rows.
    #[error("basis rows are linearly dependent")]
    DependentRows,
    /// LLL reduction parameter outside (1/4, 1).
    #[error("LLL delta must satisfy 1/4 < delta < 1")]
    BadDelta,
    /// A tree label is unusable (index below 2 where a multiplier is needed,
    /// or an empty/zero label).
    #[error("invalid decomposition label: {0}")]
    InvalidLabel(String),
    /// Closed-formula evaluation requested outside its supported range.
    #[error("closed formula only covers indices 2..=13, got {0}")]
    OutOfRange(u64),
    /// A denominator factor degenerated to 1 - 1.
    #[error("degenerate denominator factor (monomial equals 1)")]
    DegenerateFactor,
    /// A matrix action was requested for a singular matrix.
    #[error("matrix action requires a nonsingular matrix")]
    SingularMatrix,
    /// A non-underlined factor carries a fractional exponent of the working
    /// variable, so modular reduction is undefined.
    #[error("non-integer exponent in modular reduction")]
    NonIntegerExponent,
    /// Two denominator factors collided, violating the pairwise-coprimality
    /// assumption behind the partial-fraction recursion.
    #[error("coincident denominator factors")]
    CoincidentFactors,
    /// A leaf term carries a fractional exponent, which the integrality
    /// theorem rules out for well-formed inputs.
    #[error("non-integer exponent at a decomposition leaf")]
    NonIntegerLeaf,
    /// The knapsack vector does not have gcd 1.
    #[error("gcd of the knapsack vector must be 1")]
    GcdNotOne,
    /// Slack variables were attached twice.
    #[error("slack variables already attached")]
    AlreadySlacked,
    /// The elimination type matrix is zero.
    #[error("type matrix is zero")]
    ZeroType,
    /// Substituting z = 1 annihilated a denominator factor.
    #[error("slack substitution degenerates factor {0}")]
    SlackDegenerate(usize),
    /// The supplied direction is orthogonal to a denominator exponent.
    #[error("direction is not generic for the given terms")]
    NonGenericDirection,
    /// An exact evaluation produced a non-integer where an integer is forced.
    #[error("evaluation produced a non-integer result: {0}")]
    NonIntegerResult(String),
    /// A series expansion was asked for a factor that is not small in the
    /// working order.
    #[error("denominator factor is not proper (small) in the working order")]
    NonProperFactor,
    /// The expansion region cannot be bounded for the given factor set.
    #[error("series expansion region is unbounded: {0}")]
    UnboundedExpansion(String),
    /// Malformed instance or problem file.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use elliott::{BinomialFactor, CTTerm, LaurentPoly, Magnitude, Monomial, VarOrder};
pub use lattice::{select_multiplier, MultiplierChoice, Strategy};
pub use matrix::IntMatrix;
