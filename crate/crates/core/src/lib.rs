//! Exact fusion rules for twisted tilting modules of quantum `GL_2` at a
//! root of unity, and the polynomial presentation of the ring they span.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: weights, Steinberg digits, twisted-tilting labels and their
//!   canonical form.
//! - [`charring`]: characters in `Z[t1^±, t2^±]`, Weyl/simple/tilting
//!   characters and the greedy tilting decomposition.
//! - [`fusion`]: strike-out rules for products of simples, Donkin
//!   normalization and multiplication in the label basis.
//! - [`presentation`]: the Chebyshev/Dickson calculus, kernel relations and
//!   reducedness probes.
//! - [`exec`]: sequential or rayon-backed evaluation of batch workloads.

pub mod charring;
pub mod error;
pub mod exec;
pub mod fusion;
pub mod lattice;
pub mod presentation;
mod serde_int;

pub use charring::{Character, TiltingDecomposition};
pub use error::{Error, Result};
pub use exec::Exec;

pub use fusion::{ClassVector, StrikeOutTrace};
pub use lattice::{Moduli, Params, Region, TwistLabel, Weight};
