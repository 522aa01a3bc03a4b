//! Bending-flow integrable systems on moduli spaces of 3D polygons with
//! fixed side lengths.
//!
//! The library covers, at desk scale and with certified tolerances:
//!
//! - the polygon spaces themselves ([`polyspace`]): closing condition,
//!   tangent vectors, symplectic pairing, rotation orbits, and the
//!   stratification into nondegenerate and lined polygons;
//! - the integrable systems defined by maximal families of non-crossing
//!   diagonals ([`bending`]): momentum map, bending fields, exact flows,
//!   Poisson brackets, action-angle coordinates, and fiber sampling;
//! - classification of singular fibers into homogeneous models and numerical
//!   certification that they are isotropic ([`fibers`]);
//! - the companion integrable system on two-frames in ℂⁿ and its
//!   Gel'fand-Cetlin ladder ([`grassmann`]);
//! - reproducible verification suites with machine-readable reports
//!   ([`verify`]) and the JSON wire formats ([`io`]).

pub mod bending;
pub mod fibers;
pub mod geom;
pub mod grassmann;
pub mod io;
pub mod polyspace;
pub mod tol;
pub mod verify;

pub use tol::Tolerances;
