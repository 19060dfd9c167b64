//! Exact-arithmetic workbench for colored symmetric operads over the rationals.
//!
//! Everything is computed with arbitrary-precision rational numbers; nothing
//! is floating point and no result depends on hash iteration order. The crate
//! is organized bottom-up:
//!
//! * [`linalg`] — dense rational matrices, subspaces, group actions,
//!   invariants and coinvariants;
//! * [`seq`] — finite color sequences, their orbits under permutation, and
//!   induced representations over block decompositions;
//! * [`operad`] — colored symmetric operads with a hard arity cap, validation,
//!   and the built-in operad zoo;
//! * [`functors`] — the free-algebra, cowedge, and prop constructions on
//!   graded pieces, together with structural identity checks;
//! * [`cofree`] — truncated elements of the cowedge (jets), finite
//!   presentations (weighted-automaton style), Hankel rank analysis,
//!   realization and comultiplication;
//! * [`tower`] — fully materialized cowedges for nilpotent operads and the
//!   coreflection tower down to the cofree coalgebra;
//! * [`document`] — the strict JSON document format used by the CLI.

pub mod error;
pub mod linalg;
mod util;
pub mod seq;
pub mod operad;
pub mod functors;
pub mod cofree;
pub mod tower;
pub mod document;

pub use error::{Error, Result};
pub use linalg::{rat, FinVectSpace, Label, LinearMap, Mat, PermAction, Rat, Subspace};
pub use seq::{Color, ColorSeq, SeqOrbit};
pub use operad::{OpVector, OperadData};
pub use functors::{ColoredSpace, GradedMap, GradedSpace};
