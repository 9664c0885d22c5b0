#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bvn;
pub mod data;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod inference;
pub mod model;
pub mod optimize;
pub mod quadrature;
pub mod roots;
pub mod sampling;
pub mod specialfn;

pub use error::{BulsError, Result};
