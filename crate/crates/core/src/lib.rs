#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod extensions;
pub mod fields;
pub mod forms;
pub mod greens;
pub mod quad;
pub mod specfun;
pub mod spectral;
pub mod tolerances;
