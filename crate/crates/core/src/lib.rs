#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clustering;
pub mod demo;
pub mod error;
pub mod linalg;
pub mod lsi;
pub mod metrics;
pub mod nmf;
pub mod nnls;
pub mod svd;
pub mod textprep;

pub use error::{Error, Result};
pub use linalg::{Matrix, SparseMatrix, Vector};
