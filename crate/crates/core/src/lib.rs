//! Nonseparable space-time covariance functions on graphs with Euclidean
//! edges.
//!
//! * [`network`]: construction, validation, topology, generators, file I/O.
//! * [`metrics`]: geodesic, resistance and planar distances.
//! * [`kernels`]: spatial and temporal families, the space-time composition,
//!   circular-time families and the validity checker.
//! * [`pdcheck`]: empirical positive-definiteness audits.
//! * [`gp`]: simulation, likelihood, fitting and the model-selection study.
//! * [`cli`]: the `netkernel` command-line front end.

pub mod cli;
pub mod fmt;
pub mod gp;
pub mod kernels;
pub mod metrics;
pub mod network;
pub mod pdcheck;
