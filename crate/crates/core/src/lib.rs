//! Space-and-time adaptive phase-field simulation of dynamic brittle
//! fracture on 2D triangle meshes.

// NaN must fail parameter checks, hence `!(x > 0.0)`
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(
    clippy::excessive_precision,
    clippy::too_many_arguments,
    clippy::needless_range_loop,
    clippy::should_implement_trait
)]

pub mod adapt;
pub mod error;
pub mod fem;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod model;
pub mod scenario;
pub mod tintegrate;

pub use error::{Error, Result};
