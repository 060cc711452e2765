//! Finite-precision kernel for p-adic Fourier theory on Z_p^d.
//!
//! The crate is layered bottom-up:
//!
//! * [`field`], [`roots`], [`analytic`]: local fields, Hensel lifting,
//!   embeddings, logarithm and exponential.
//! * [`amice`]: Mahler expansions and distributions in Amice coordinates.
//! * [`charvar`], [`dw`]: characters of Z_p^d, differential conditions,
//!   membership predicates and truncated D_W tables.
//! * [`sigma`]: Σ-analyticity, idempotents of L ⊗ K and Hodge–Tate pairs.
//! * [`lubin_tate`]: truncated power series, Lubin–Tate formal groups and
//!   Newton polygons.
//! * [`json`], [`selftest`]: serialization and the seeded property suites
//!   driven by the command line tool.

pub mod amice;
pub mod analytic;
pub mod charvar;
pub mod dw;
pub mod error;
pub mod field;
pub mod json;
pub mod linalg;
pub mod lubin_tate;
pub mod residue;
pub mod roots;
pub mod sample;
pub mod selftest;
pub mod sigma;
pub mod valuation;
pub mod zp;

pub use error::{Error, Result};
pub use field::{arith, ArithOp, FieldElement, FieldKind, FieldSpec, LocalField};
pub use valuation::PValuation;
