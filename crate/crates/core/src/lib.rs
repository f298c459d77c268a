//! Computable layer of the classification of linearly reductive subgroup
//! schemes `μ_n ⊂ SL_2` over rings of integers of quadratic fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`qfield`] exact arithmetic in `Q(√d)` and its units,
//! * [`ideal`] fractional ideals in Hermite normal form, prime splitting,
//!   principality and Steinitz classes,
//! * [`classfield`] class group, narrow class group and unramified
//!   quadratic extensions,
//! * [`klein`] classification reports and fiber partitions,
//! * [`embed`] conjugated embeddings `A·diag(u, u^{n-1})·A^{-1}`,
//! * [`invar`] invariant rings and RDP fiber types,
//! * [`density`] prime-splitting census,
//! * [`cli`] JSON request/response surface used by the binary.

pub mod arith;
pub mod classfield;
pub mod cli;
pub mod density;
pub mod embed;
pub mod error;
pub mod forms;
pub mod ideal;
pub mod invar;
pub mod klein;
pub mod lattice;
pub mod qfield;

pub use error::{Error, Result};
pub use qfield::{make_field, FieldElement, QuadraticField};
