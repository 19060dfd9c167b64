//! Exact linear algebra over the rationals.
//!
//! Matrices are dense and row-major with `num::BigRational` entries, which
//! are kept in lowest terms with positive denominator by construction. All
//! basis-producing operations (kernels, images, intersections, pullbacks,
//! invariants) return bases in reduced column echelon form with pivots in
//! ascending coordinate order, so equal subspaces have equal matrices.

mod action;
mod map;
mod mat;
mod rat;
mod space;
mod subspace;

pub use action::{ActionMat, GroupGens, PermAction};
pub use map::LinearMap;
pub use mat::{add_vecs, dot, rat_vec, scale_vec, unit_vec, zero_vec, Mat};
pub use rat::{parse_rat, rat, rat_int, rat_to_string, Rat};
pub use space::{FinVectSpace, Label};
pub use subspace::{image, kernel, pullback, Pullback, Subspace};
