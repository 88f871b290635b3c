//! Explicit ReLU network constructions built from the hierarchical basis
//! view of piecewise-linear interpolation.
//!
//! - [`net`]: plain and skip-connected networks, evaluation, JSON documents.
//! - [`hb1d`] and [`fem2d`]: finite-element oracles with no network code.
//! - [`constructions`]: the network compiler (x², xy, monomials, polynomials,
//!   2D hat functions) and the network algebra it relies on.
//! - [`pwl`]: exact breakpoint extraction for 1D networks and sup-norm
//!   measurements.
//! - [`verify`]: claim-by-claim verification suites producing report rows.
//! - [`report`]: data tables for the error curves and function plots.

pub mod constructions;
pub mod error;
pub mod fem2d;
pub mod hb1d;
pub mod net;
pub mod parallel;
pub mod pwl;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
