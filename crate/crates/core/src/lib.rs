//! Exact computations of E_n-homology of commutative algebras, Hochschild
//! (co)homology with its Gerstenhaber structure, Lie algebra homology, Tor over
//! enveloping algebras and Hodge decompositions, over Q and F2.
//!
//! Everything is graded by a homological degree and an auxiliary weight, and
//! every construction preserves the weight, so infinite objects such as
//! `Q[x]` are handled one finite weight column at a time.

pub mod bar;
pub mod cotriple;
pub mod free;
pub mod graded;
pub mod hochschild;
pub mod hodge;
pub mod lie;
pub mod linalg;
pub mod runner;

pub use graded::{BigradedSpace, ChainComplex, HomologyTable};
pub use linalg::{Field, FieldScalar, SparseMatrix, SparseVec};
