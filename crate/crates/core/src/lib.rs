//! Certifies when a finite group action on a closed hyperbolic surface,
//! presented as a surjection from an extended triangle group, extends to an
//! isometric action on a hyperbolic 3-manifold containing the surface totally
//! geodesically.
//!
//! The pipeline runs in stages:
//!
//! 1. [`surface`] — validate a surjection `[p,q,r] -> G` with torsion-free
//!    kernel (or search for one exhaustively), compute Euler characteristic,
//!    orientability, genus and Hurwitz maximality.
//! 2. [`extend`] — extend the surjection over the Coxeter group of a labeled
//!    hyperbolic polyhedron (a truncated tetrahedron for `(2,3,7)` actions, a
//!    double cone over a triangle in general) and verify the kernel is
//!    torsion-free by checking injectivity on every finite parabolic.
//! 3. [`lorentz`] — realize the polyhedron numerically in the Lorentzian model
//!    of hyperbolic 3-space: Gram matrices, signature tests, hyperideal vertex
//!    classification and orthogonal truncating planes.
//! 4. [`census`] — orientability of the quotient 3-manifold, the boundary
//!    census per truncated vertex class, and the split-and-identify
//!    constructions for orientation-reversing involutions.
//!
//! Everything group-theoretic is exact (permutations and rational arithmetic);
//! only the polyhedron realization is numerical, with pinned tolerances.
//! [`job`] glues the stages into a reproducible, certificate-emitting run.

pub mod catalog;
pub mod census;
pub mod certificate;
pub mod coxeter;
pub mod error;
pub mod extend;
pub mod job;
pub mod lorentz;
pub mod permgroup;
pub mod surface;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Default cap on group-closure enumeration.
pub const DEFAULT_ENUMERATION_BOUND: usize = 1_000_000;
