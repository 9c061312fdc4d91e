//! Planning probe expeditions over a bounded surface.
//!
//! A ship (or any probe carrier) has previously known resource readings at
//! a handful of points and a strict time budget for one trip that starts
//! and ends at a depot. This crate provides the three stages of preparing
//! and scoring such a trip:
//!
//! * **Assessment** — fit a Gaussian process to the known data and use its
//!   posterior standard deviation as the attractiveness of probing each
//!   point of a lattice over the surface ([`planner::assess`]).
//! * **Planning** — greedily grow a depot-anchored tour through the most
//!   attractive points, checking every step against the time budget with a
//!   nearest-neighbor + 2-opt tour (exact Held-Karp fallback on small
//!   problems), and simulating each planned probe with the posterior mean
//!   before the next assessment ([`planner::plan_orienteering`]).
//! * **Estimation** — after the trip, refit on everything observed and
//!   read estimates anywhere off the posterior mean ([`gp`]).
//!
//! A benchmark [`harness`] scores planners against synthetic ground-truth
//! surfaces (sums of Gaussian bumps) by the total absolute estimation error
//! over an evaluation mesh, and compares the greedy planner to a plain
//! grid-search baseline; [`benchmarks`] ships ten standard surfaces.
//!
//! All numeric code is generic over the [`Scalar`] floating-point type;
//! the aliases below fix `f64`, which is what the CLI and the shipped
//! instance files use. Every public type is immutable after construction
//! and every operation is a pure function, so everything is safe to share
//! across threads.
//!
//! # Example
//!
//! Plan and score one benchmark trip end to end:
//!
//! ```
//! use seaprobe::benchmarks::{suite_instance, Layout};
//! use seaprobe::harness::{run_main, PlannerKind, RunConfig};
//! use seaprobe::planner::PlannerConfig;
//!
//! let inst = suite_instance::<f64>(1, Layout::Grid { side: 4 }).unwrap();
//! let config = RunConfig {
//!     planner: PlannerConfig {
//!         grid_k: 8,
//!         grid_l: 8,
//!         ..PlannerConfig::default()
//!     },
//!     tune: false,
//! };
//! let result = run_main(&inst, PlannerKind::Orienteering, &config).unwrap();
//! assert!(result.tour.duration() < inst.budget);
//! assert!(result.final_delta < result.initial_delta);
//! ```

// Negated float comparisons like `!(x > 0)` are deliberate throughout:
// unlike `x <= 0`, they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod geom;
pub mod gp;
pub mod harness;
pub mod instance;
pub mod planner;
pub mod rng;
pub mod scalar;
pub mod tour;

pub use geom::Point;
pub use gp::{GpError, GpModel, KernelParams};
pub use harness::{
    ComparisonRow, ComparisonTable, HarnessError, HeatmapSource, PlannerKind, Residual, RunConfig,
    RunResult,
};
pub use instance::{
    EvalMesh, Instance, InstanceConfig, InstanceError, MixtureComponent, Sample, Surface,
    TrueFunction,
};
pub use planner::{AssessmentGrid, GridEntry, PlanError, PlannerConfig, Task};
pub use rng::SplitMix64;
pub use scalar::Scalar;
pub use tour::{Tour, TourError};

/// Concrete `f64` aliases; the working precision of the CLI and the
/// shipped benchmark files.
pub type Point64 = geom::Point<f64>;
pub type Surface64 = instance::Surface<f64>;
pub type Sample64 = instance::Sample<f64>;
pub type TrueFunction64 = instance::TrueFunction<f64>;
pub type Instance64 = instance::Instance<f64>;
pub type EvalMesh64 = instance::EvalMesh<f64>;
pub type KernelParams64 = gp::KernelParams<f64>;
pub type GpModel64 = gp::GpModel<f64>;
pub type Tour64 = tour::Tour<f64>;
pub type PlannerConfig64 = planner::PlannerConfig<f64>;
pub type Task64 = planner::Task<f64>;
pub type RunConfig64 = harness::RunConfig<f64>;
pub type RunResult64 = harness::RunResult<f64>;

/// Single-precision aliases for the core data types, for callers that
/// trade accuracy for footprint.
pub type Point32 = geom::Point<f32>;
pub type Instance32 = instance::Instance<f32>;
pub type GpModel32 = gp::GpModel<f32>;
pub type Tour32 = tour::Tour<f32>;
