//! Exact computations for toric varieties and their hypersurfaces.
//!
//! The crate works bottom-up: exact integer/rational linear algebra, rational
//! polyhedral cones and fans, equivariant morphisms to affine toric varieties,
//! positivity of invariant divisors, monomial models of logarithmic
//! differential sheaves with Cech cohomology and residues, and finally
//! Cl-graded Jacobian rings whose graded pieces give Hodge numbers of
//! hypersurfaces (and fiber dimensions for degenerating families).
//!
//! No floating point is used anywhere.

pub mod cli;
pub mod cox;
pub mod document;
pub mod error;
pub mod exterior;
pub mod linalg;
pub mod logforms;
pub mod polyhedra;
pub mod positivity;
pub mod toric;

pub use error::{Error, Result};
