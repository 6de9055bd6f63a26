//! Linear relations on `K^n`, the matrix pencils they induce, and the
//! port-Hamiltonian structure checks built on top of them.
//!
//! Everything is generic over [`numfield::Field`], so the same code runs in
//! double precision (`C64`) and in exact Gaussian rationals ([`numfield::GaussQ`]).

pub mod corpus;
pub mod decompose;
pub mod error;
pub mod io;
pub mod numfield;
pub mod pencil;
pub mod phclass;
pub mod relation;

pub use error::{Error, Result};
pub use numfield::{Backend, Ctx, Field, GaussQ, HermClass, Matrix, Poly, TolerancePolicy, C64};
pub use pencil::{KroneckerInvariants, MatrixPencil};
pub use relation::{LinearRelation, RelationStructure};
