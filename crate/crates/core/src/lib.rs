//! Poisson–Hopf deformations of sl(2) Lie–Hamilton systems on the plane.
//!
//! The crate builds the three planar sl(2) Lie–Hamilton classes (P2, I4, I5),
//! deforms them with the non-standard (Jordanian) Poisson–Hopf deformation of
//! sl(2), integrates the resulting nonautonomous systems and checks every
//! algebraic identity involved numerically.

pub mod catalog;
pub mod deformation;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod invariants;
pub mod jet;
pub mod report;
pub mod scan;
pub mod scenario;

pub use error::{Error, Result};
