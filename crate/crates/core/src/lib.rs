//! Engine for job-scheduling games with time-dependent processing times.
//!
//! Jobs have linear processing-time functions: either `p(t) = b + a*t`
//! (lengths grow with the start time) or `p(t) = max(tau, b - a*t)`
//! (lengths shrink down to a threshold). Each job is a selfish player that
//! picks a machine to minimize its completion time; machines process their
//! jobs in a fixed priority order with no idle time.
//!
//! The crate provides:
//! - exact-rational (default) and tolerant-float numerics ([`numeric`]),
//! - deterministic schedule construction from strategy profiles ([`schedule`]),
//! - best responses, Nash verification, best-response dynamics with cycle
//!   detection, and brute-force equilibrium/optimum search ([`equilibrium`]),
//! - four constructive equilibrium solvers gated by game class ([`solvers`]),
//! - coordination mechanisms (SDR, dynamic SDR, LBDR, SBPT) and the
//!   analytical quantities behind their bounds ([`mechanisms`]),
//! - named adversarial instances, parametric families, a 3DM-3 reduction
//!   with a brute-force matching oracle, and seeded random sampling
//!   ([`generators`]).

pub mod error;
pub mod numeric;
pub mod job;
pub mod game;
pub mod schedule;
pub mod equilibrium;
pub mod solvers;
pub mod mechanisms;
pub mod generators;

pub use error::GameError;
pub use game::{GameClass, GameInstance, Machine};
pub use job::{ProcessingFunction, Sign};
pub use numeric::{Numeric, NumericMode};
pub use schedule::{Profile, Schedule};

/// Job identifier; dense `0..n`.
pub type JobId = usize;
/// Machine identifier; dense `0..m`.
pub type MachineId = usize;

/// Default cap on the number of profiles brute-force searches may visit.
pub const DEFAULT_PROFILE_BUDGET: u64 = 10_000_000;
