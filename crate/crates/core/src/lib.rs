//! Exact-arithmetic construction of Fujiki-Oka resolutions for abelian
//! quotient singularities.
//!
//! The crate builds continued-fraction fans for cyclic quotient
//! singularities `1/r(1, a_2, ..., a_n)`, decides whether they are crepant
//! from the ages of the associated remainder polynomial, extends the
//! construction to finite abelian groups through staged (iterated)
//! resolutions, and ships brute-force lattice oracles that re-derive every
//! verdict independently.
//!
//! All arithmetic is exact. The numeric kernel is generic over an integer
//! scalar (see [`Scalar`]); the crate-root aliases fix arbitrary precision
//! as the default.

use std::fmt;
use std::hash::Hash;

use num::rational::Ratio;
use num::{Integer, Signed, ToPrimitive};

pub mod abelian;
pub mod cf;
pub mod fan;
pub mod lattice;
mod linalg;
pub mod oracle;

pub use cf::Word;
pub use lattice::{LatticePoint, Overlattice, ProperFraction};

/// Integer scalar the whole crate is generic over.
///
/// Satisfied by `i64`, `i128` and `num::BigInt`. Everything downstream
/// (rationals, lattices, fans) is built on top of it, so swapping the
/// scalar swaps the arithmetic of the entire pipeline.
pub trait Scalar:
    Integer + Signed + Clone + Hash + fmt::Debug + fmt::Display + From<i64> + ToPrimitive + 'static
{
}

impl<T> Scalar for T where
    T: Integer
        + Signed
        + Clone
        + Hash
        + fmt::Debug
        + fmt::Display
        + From<i64>
        + ToPrimitive
        + 'static
{
}

/// Default arbitrary-precision integer.
pub type Int = num::BigInt;
/// Default exact rational.
pub type Rational = Ratio<Int>;
/// Proper fraction over the default scalar.
pub type Fraction = ProperFraction<Int>;
/// Lattice point over the default scalar.
pub type Point = LatticePoint<Int>;
/// Overlattice over the default scalar.
pub type Lattice = Overlattice<Int>;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("denominator must be a positive integer")]
    ZeroDenominator,
    #[error("numerator vector must be non-empty")]
    EmptyVector,
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("{r} and {a} are not coprime")]
    NonCoprime { r: String, a: String },
    #[error("value out of range: {what}")]
    OutOfRange { what: String },
    #[error("fraction is not in semi-unimodular normal position")]
    NotSemiUnimodular,
    #[error("letter {letter} is outside the index alphabet 2..={rank}")]
    InvalidLetter { letter: usize, rank: usize },
    #[error("point does not lie in the lattice")]
    NotInLattice,
    #[error("the zero point has no primitive representative")]
    ZeroPoint,
    #[error("rays are linearly dependent")]
    DependentRays,
    #[error("simplex vertices are affinely dependent")]
    DegenerateSimplex,
    #[error("facet opposite the apex is not smooth")]
    FacetNotSmooth,
    #[error("no Oka center exists: lattice and cone are inconsistent")]
    NoOkaCenter,
    #[error("cone is smooth; it has no Oka center")]
    SmoothCone,
    #[error("fan contains a non-smooth maximal cone")]
    NotAResolution,
    #[error("ray is not primitive in the lattice")]
    NonPrimitiveRay,
    #[error("input is not Gorenstein (some age is not an integer)")]
    NonGorenstein,
    #[error("slice is ill-formed: {what}")]
    GcdViolation { what: String },
    #[error("group admits no age-one basic generating system")]
    NoAgeOneSystem,
    #[error("semi-unimodularity lost at cone {cone}")]
    SemiUnimodularityLost { cone: String },
    #[error("resolution exceeded the cone cap of {limit}")]
    ResourceCap { limit: usize },
    #[error("internal cross-check failed: {what}")]
    CrossCheck { what: String },
}
