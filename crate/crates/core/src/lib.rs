pub mod algebra;
pub mod bimodule;
pub mod calculus;
pub mod diffops;
pub mod error;
pub mod exactla;
pub mod fixtures;
pub mod jets;
pub mod vectorfields;

pub use algebra::Algebra;
pub use bimodule::{Bimodule, BimoduleMap, TensorA};
pub use error::{Error, Result};
pub use exactla::{Mat, Scalar, Subspace};
