//! The bigraded Steenrod algebra over F_p[τ]: admissible basis, Adem rewriting,
//! products, the Cartan coproduct and the antipode.

mod algebra;
mod element;
pub mod json;
mod word;

pub use algebra::SteenrodAlgebra;
pub use element::{Element, Tensor};
pub use word::{
    bidegree_of, format_word, from_sq, gen_bidegree, is_admissible, parse_combination, parse_word, strip_units, to_sq,
    Adm, Bidegree, Gen, Word,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SteenrodError {
    #[error("configuration mismatch: {0}")]
    Mismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
    #[error("element is not bidegree-homogeneous")]
    Inhomogeneous,
}
