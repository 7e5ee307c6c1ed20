//! Strong-field toolkit for hydrogenic atoms in a monochromatic, linearly
//! polarized laser field.
//!
//! Everything internal is in Hartree atomic units (ħ = mₑ = e = 1). SI, eV,
//! nm and W/cm² only appear in the constructors of [`units::LaserField`] and
//! [`units::HydrogenicAtom`] and in the explicit converters of [`units`].
//!
//! The polarization axis is the Cartesian x axis throughout; bound states are
//! quantized along z.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive
// values. CODATA constants keep their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod birkhoff;
pub mod error;
pub mod exact;
pub mod export;
pub mod kh;
pub mod ode;
pub mod scenario;
pub mod shifts;
pub mod specfun;
pub mod two_level;
pub mod units;
pub mod ww;

pub use error::{Error, ErrorClass, Result};
