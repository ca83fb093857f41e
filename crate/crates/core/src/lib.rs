//! Binary matroids as point sets of `PG(n-1, 2)`, with induced-restriction
//! detection, extremal search and a claim checker.
//!
//! Points are `n`-bit masks; coordinate `i` lives in bit `i - 1`.

pub mod catalog;
pub mod detect;
pub mod error;
pub mod gf2;
pub mod matroid;
pub mod search;
pub mod verify;

pub use catalog::PatternId;
pub use detect::{canonical_form, find_induced, find_isomorphism, is_affine, is_isomorphic, CanonicalForm, Detector, Witness};
pub use error::Error;
pub use gf2::{Flat, LinearMap, Point, PointSet, MAX_DIM};
pub use matroid::{FileFormat, Matroid};
