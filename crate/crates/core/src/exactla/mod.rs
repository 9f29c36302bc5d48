//! Exact dense linear algebra over the rationals.
//!
//! Every subspace is stored in reduced row-echelon form, which makes
//! subspace equality a literal comparison and keeps all output
//! deterministic.

mod echelon;
mod mat;
mod scalar;
mod subspace;

pub use echelon::{rref, Echelon};
pub use mat::{kron_vec, unit_vec, vec_add, vec_axpy, vec_is_zero, vec_scale, vec_sub, Mat};
pub use scalar::Scalar;
pub use subspace::{
    factor_through, image, intersect, kernel, preimage, quotient, solve, QuotientData, Solver,
    Subspace,
};
