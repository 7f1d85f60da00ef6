#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod gprob;
pub mod grassmann;
pub mod kernel_evolution;
pub mod operators;
pub mod pathint;
pub mod schrod;

pub use error::{Error, Result};
