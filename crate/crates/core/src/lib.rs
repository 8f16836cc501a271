//! Lozenge tilings of sawtooth domains and the combinatorics behind their
//! GUE corner limit.
//!
//! The crate is organised bottom-up:
//!
//! * [`combinat`]: partitions, permutations, power sums, noncrossing partitions.
//! * [`hurwitz`]: monotone and classical double Hurwitz numbers by direct walk
//!   enumeration on the Cayley graph of `S(d)`.
//! * [`jets`]: truncated power series over exact rationals or floats.
//! * [`hciz`]: the Harish-Chandra/Itzykson-Zuber integral, its confluent
//!   (character ratio) form, and exact extraction of the coefficients
//!   `C_N(alpha, beta)` of its logarithm.
//! * [`cumulants`]: free cumulants, the Hurwitz combination `K_d`, and the
//!   classical cumulants of the uniform law on `[0, 1]`.
//! * [`tilings`]: Gelfand-Tsetlin patterns, exact uniform sampling, Laplace
//!   transforms of threads, and the rescaling of beads.
//! * [`rmt`]: GUE sampling, Hermitian eigenvalues and two-sample comparison.

pub mod combinat;
pub mod cumulants;
pub mod error;
pub mod hciz;
pub mod hurwitz;
pub mod jets;
pub mod numeric;
pub mod rmt;
pub mod seed;
pub mod tilings;

pub use error::{Error, Result};
