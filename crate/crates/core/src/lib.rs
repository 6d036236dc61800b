//! Scheduling jobs with release and delivery times on one machine to
//! minimize the maximum full completion time.
//!
//! * [`ldt`]: list scheduling and kernel analysis.
//! * [`decomposition`] and [`partition`]: kernel decomposition and job typing.
//! * [`iea`]: exact enumeration over permutations of a reduced job set.
//! * [`ptas`]: `(1 + 1/k)`-approximation enumerating only long jobs.
//! * [`oracle`]: brute force and the preemptive bound for validation.
//! * [`gen`] and [`bench`]: instance generation and experiments.

pub mod bench;
pub mod decomposition;
pub mod error;
pub mod gen;
pub mod iea;
pub mod ldt;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod perm;
pub mod ptas;

pub use error::{Error, Result};
pub use model::{Entry, Instance, Job, Schedule, Time};
