//! Deterministic laboratory for decentralized ("cell-view") sorting.
//!
//! Every array element is an agent carrying an integer value, a fixed
//! algotype (which local sorting rule drives it), a sort direction and a
//! fault state. The [`engine`] activates cells in seeded random order until
//! the array goes quiet, or runs one of the textbook top-down controllers
//! over the same array for comparison. Every inspection and swap is streamed
//! to a [`probe::Probe`], and the [`metrics`] and [`stats`] modules turn runs
//! into sortedness trajectories, monotonicity error, delayed gratification,
//! algotype aggregation and hypothesis tests.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the battery
//! runner's output directory and the CLI live in the companion `cellsort-lab`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod algorithms;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod model;
pub mod probe;
pub mod seed;
pub mod stats;

pub use engine::{run, Engine, RunOutcome, SchedulerConfig, Sensing, TerminatedBy};
pub use error::ConfigError;
pub use model::{
    make_array, Algorithm, Cell, CellArrayState, CellId, Control, Direction, FrozenKind, Mode,
    PolicySpec,
};
