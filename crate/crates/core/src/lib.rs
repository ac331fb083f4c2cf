//! Numerics for q-deformed oscillators in a doubled Fock space.
//!
//! * [`deformation`]: deformation functions `D_q(n)`, including a parser for
//!   user expressions, and the q-factorial.
//! * [`fock_matrix`]: truncated ladder/number operator matrices and a checker
//!   for the generalized q-Heisenberg-Weyl relations.
//! * [`paired_state`]: diagonal two-mode states `sum c_n |n, n~>`, their
//!   moments, quadrature variances and entanglement entropy.
//! * [`squeezed`], [`thermal`]: closed forms for the two vacua, each paired
//!   with a truncated-series route through [`paired_state`].
//! * [`sweep`]: grid sweeps with CSV/JSON output, used by the `qfock` binary.

pub mod deformation;
pub mod error;
pub mod fock_matrix;
pub mod paired_state;
pub mod squeezed;
pub mod sweep;
pub mod thermal;

pub use deformation::{DeformationScheme, SchemeKind};
pub use error::{Error, Result};
pub use fock_matrix::TruncatedOperator;
pub use paired_state::{MomentSet, PairedDiagonalState, Quadratures};
