//! Deterministic schedule construction from strategy profiles.
//!
//! A profile assigns each job to a machine; timing then follows from the
//! machines' priority lists with no idle time: the first job on a machine
//! starts at 0 and each subsequent job starts at its predecessor's
//! completion.

use crate::game::GameInstance;
use crate::numeric::Numeric;
use crate::{JobId, MachineId};

/// Strategy profile: entry `i` is the machine chosen by job `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile(pub Vec<MachineId>);

impl Profile {
    pub fn machine_of(&self, job: JobId) -> MachineId {
        self.0[job]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Derived timing for one profile.
///
/// `durations[i]` is the realized processing time `p_i(S_i)` in work units;
/// the time the job occupies its machine is `durations[i] / speed`.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub starts: Vec<Numeric>,
    pub durations: Vec<Numeric>,
    pub completions: Vec<Numeric>,
    /// Per machine, assigned jobs in processing order.
    pub sequences: Vec<Vec<JobId>>,
    /// Per machine, the completion time of its last job (0 if empty).
    pub loads: Vec<Numeric>,
    pub makespan: Numeric,
}

/// Builds the unique schedule induced by `profile`.
pub fn build_schedule(game: &GameInstance, profile: &Profile) -> Schedule {
    assert_eq!(profile.len(), game.n(), "profile must cover every job");
    assert!(
        profile.0.iter().all(|&mj| mj < game.m()),
        "machine id out of range"
    );
    let zero = game.mode().zero();
    let mut starts = vec![zero.clone(); game.n()];
    let mut durations = vec![zero.clone(); game.n()];
    let mut completions = vec![zero.clone(); game.n()];
    let mut sequences = Vec::with_capacity(game.m());
    let mut loads = Vec::with_capacity(game.m());

    for (j, machine) in game.machines().iter().enumerate() {
        let seq: Vec<JobId> = machine
            .priority()
            .iter()
            .copied()
            .filter(|&i| profile.machine_of(i) == j)
            .collect();
        let mut clock = zero.clone();
        for &i in &seq {
            let p = game.job(i).eval_unchecked(&clock);
            let done = &clock + &(&p / machine.speed());
            starts[i] = clock;
            durations[i] = p;
            completions[i] = done.clone();
            clock = done;
        }
        loads.push(clock);
        sequences.push(seq);
    }

    let makespan = completions
        .iter()
        .max_by(|a, b| a.total_cmp(b))
        .expect("n >= 1")
        .clone();
    Schedule { starts, durations, completions, sequences, loads, makespan }
}

/// Sum of realized processing times; equals the speed-weighted sum of
/// machine loads.
pub fn total_processing(sched: &Schedule) -> Numeric {
    let mut acc = match sched.makespan {
        Numeric::Rational(_) => Numeric::int(0),
        Numeric::Float(_) => Numeric::float(0.0),
    };
    for d in &sched.durations {
        acc = &acc + d;
    }
    acc
}
