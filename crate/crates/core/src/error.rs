use core::fmt;

/// Errors reported by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A sample or grid with no entries.
    Empty,
    /// Two sequences that must have equal length do not.
    LengthMismatch { expected: usize, found: usize },
    /// A weight that is zero, negative or not finite.
    NonPositiveWeight { index: usize },
    /// A value that is NaN or infinite.
    NonFinite { index: usize },
    /// Breakpoints that are not strictly increasing from zero.
    BadBreakpoints,
    /// Plateau values that increase somewhere.
    NotDecreasing { index: usize },
    /// Two objects defined over measure spaces of different total mass.
    MassMismatch { left: f64, right: f64 },
    /// An argument outside the domain of the operation.
    OutOfDomain { what: &'static str, value: f64 },
    /// Potentials or functions that live on different grids.
    GridMismatch,
    /// Grid values that are not convex beyond tolerance.
    NotConvex { max_gap: f64 },
    /// The space-side grid does not cover the slopes of a potential.
    RangeTooSmall { needed: f64, available: f64 },
    /// A parameter outside its admissible set.
    InvalidParameter(&'static str),
    /// An exhaustive check was asked for more atoms than it enumerates.
    TooManyAtoms { atoms: usize, max: usize },
    /// A precondition stated by the operation does not hold.
    Precondition(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Empty => write!(f, "empty input"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::NonPositiveWeight { index } => {
                write!(f, "weight at index {index} is not a positive finite number")
            }
            Error::NonFinite { index } => write!(f, "value at index {index} is not finite"),
            Error::BadBreakpoints => write!(f, "breakpoints must increase strictly from 0"),
            Error::NotDecreasing { index } => {
                write!(f, "plateau values increase at plateau {index}")
            }
            Error::MassMismatch { left, right } => {
                write!(f, "total masses differ: {left} vs {right}")
            }
            Error::OutOfDomain { what, value } => write!(f, "{what} = {value} is out of range"),
            Error::GridMismatch => write!(f, "arguments live on different grids"),
            Error::NotConvex { max_gap } => {
                write!(f, "values exceed their lower convex hull by {max_gap}")
            }
            Error::RangeTooSmall { needed, available } => write!(
                f,
                "space grid half-width {available} does not cover slopes up to {needed}"
            ),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::TooManyAtoms { atoms, max } => {
                write!(f, "{atoms} atoms exceed the exhaustive limit of {max}")
            }
            Error::Precondition(what) => write!(f, "precondition violated: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
