//! Error-driven control of the time step and the mesh.

mod driver;
mod spatial;
mod temporal;

pub use driver::{run, DriverConfig, IterationBaseline, RunResult, StepRecord, CSV_HEADER};
pub use spatial::{phase_qnorm, spatial_estimate, SpatialEstimate};
pub use temporal::{
    bdf3_third_derivative, local_truncation_error, next_dt, weighted_error, Bdf3Formula, Snapshots, TimeHistory,
};
