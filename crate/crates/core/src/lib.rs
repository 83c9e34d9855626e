//! Exact rearrangements and function-space norms for non-negative
//! piecewise-power functions on `[0, ∞)`.
//!
//! Scalars are exact rationals ([`Rational`]); values that leave the
//! rationals (irrational powers, logarithms) become [`ExtReal::Approx`]
//! carrying a relative error bound, and divergent quantities are
//! [`ExtReal::Infinity`].

pub mod amalgam;
pub mod duality;
pub mod error;
pub mod ext;
pub mod laws;
pub mod norms;
pub mod stepfn;
pub mod witnesses;

pub use amalgam::SpaceSpec;
pub use error::{Error, Result};
pub use ext::{format_rational, parse_rational, ExtReal, Rational};
pub use norms::{Exponent, NormSpec};
pub use stepfn::{Interval, MonotoneProfile, Piece, Ppf, StepFunction};
