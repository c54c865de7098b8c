#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersive;
pub mod error;
pub mod hyperbolic;
pub mod krylov;
pub mod linear;
pub mod runner;
pub mod scenario;
pub mod spectral;
pub mod time;
pub mod traveling;
