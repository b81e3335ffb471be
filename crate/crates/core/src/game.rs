//! Game instances: jobs, machines with priority lists, and class detection.

use std::cmp::Ordering;

use crate::error::{GameError, Result};
use crate::job::{ProcessingFunction, Sign};
use crate::numeric::{Numeric, NumericMode};
use crate::{JobId, MachineId};

/// A machine: speed plus a priority list over all jobs.
#[derive(Clone, Debug)]
pub struct Machine {
    speed: Numeric,
    priority: Vec<JobId>,
    /// Inverse of `priority`: `rank[job]` is the job's position in the list.
    rank: Vec<usize>,
}

impl Machine {
    pub fn new(speed: Numeric, priority: Vec<JobId>, n_jobs: usize) -> Result<Self> {
        if speed.is_zero() || speed.is_negative() {
            return Err(GameError::InvalidInstance("machine speed must be > 0".into()));
        }
        if priority.len() != n_jobs {
            return Err(GameError::InvalidInstance(format!(
                "priority list has {} entries, expected {}",
                priority.len(),
                n_jobs
            )));
        }
        let mut rank = vec![usize::MAX; n_jobs];
        for (pos, &job) in priority.iter().enumerate() {
            if job >= n_jobs || rank[job] != usize::MAX {
                return Err(GameError::InvalidInstance(
                    "priority list must be a permutation of the job ids".into(),
                ));
            }
            rank[job] = pos;
        }
        Ok(Machine { speed, priority, rank })
    }

    pub fn speed(&self) -> &Numeric {
        &self.speed
    }

    pub fn priority(&self) -> &[JobId] {
        &self.priority
    }

    pub fn rank_of(&self, job: JobId) -> usize {
        self.rank[job]
    }
}

/// Structural flags of a game; every flag is computed from the instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GameClass {
    /// All jobs share one processing-time function.
    pub symmetric: bool,
    pub two_machines: bool,
    pub identical_speeds: bool,
    /// All machines share one priority list.
    pub global_list: bool,
    pub all_positive: bool,
    pub all_negative: bool,
    /// Every job's completion time is non-decreasing in its start time on
    /// every machine: positive sign, or negative with rate <= max speed.
    pub delay_averse: bool,
}

/// An immutable game: jobs, machines, and the numeric backend.
#[derive(Clone, Debug)]
pub struct GameInstance {
    jobs: Vec<ProcessingFunction>,
    machines: Vec<Machine>,
    mode: NumericMode,
}

impl GameInstance {
    pub fn new(
        jobs: Vec<ProcessingFunction>,
        machines: Vec<Machine>,
        mode: NumericMode,
    ) -> Result<Self> {
        if jobs.is_empty() {
            return Err(GameError::InvalidInstance("need at least one job".into()));
        }
        if machines.is_empty() {
            return Err(GameError::InvalidInstance("need at least one machine".into()));
        }
        for machine in &machines {
            if machine.priority.len() != jobs.len() {
                return Err(GameError::InvalidInstance(
                    "priority list length does not match job count".into(),
                ));
            }
        }
        let game = GameInstance { jobs, machines, mode };
        let variant_ok = |v: &Numeric| match (game.mode, v) {
            (NumericMode::Rational, Numeric::Rational(_)) => true,
            (NumericMode::Float { .. }, Numeric::Float(_)) => true,
            _ => false,
        };
        for pf in &game.jobs {
            if !variant_ok(pf.basic())
                || !variant_ok(pf.rate())
                || pf.tau().map_or(false, |t| !variant_ok(t))
            {
                return Err(GameError::InvalidInstance(
                    "job values do not match the game's numeric mode".into(),
                ));
            }
        }
        for machine in &game.machines {
            if !variant_ok(machine.speed()) {
                return Err(GameError::InvalidInstance(
                    "machine speed does not match the game's numeric mode".into(),
                ));
            }
        }
        Ok(game)
    }

    /// Builds an instance where every machine has the same priority list.
    pub fn with_global_priority(
        jobs: Vec<ProcessingFunction>,
        speeds: Vec<Numeric>,
        priority: &[JobId],
        mode: NumericMode,
    ) -> Result<Self> {
        let n = jobs.len();
        let machines = speeds
            .into_iter()
            .map(|s| Machine::new(s, priority.to_vec(), n))
            .collect::<Result<Vec<_>>>()?;
        GameInstance::new(jobs, machines, mode)
    }

    /// Same jobs and speeds, replacing every priority list with `priority`.
    pub fn replace_priorities(&self, priority: &[JobId]) -> Result<Self> {
        let speeds = self.machines.iter().map(|m| m.speed.clone()).collect();
        GameInstance::with_global_priority(self.jobs.clone(), speeds, priority, self.mode)
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn m(&self) -> usize {
        self.machines.len()
    }

    pub fn job(&self, id: JobId) -> &ProcessingFunction {
        &self.jobs[id]
    }

    pub fn jobs(&self) -> &[ProcessingFunction] {
        &self.jobs
    }

    pub fn machine(&self, id: MachineId) -> &Machine {
        &self.machines[id]
    }

    pub fn machines(&self) -> &[Machine] {
        &self.machines
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    pub fn max_speed(&self) -> &Numeric {
        self.machines
            .iter()
            .map(Machine::speed)
            .max_by(|a, b| a.total_cmp(b))
            .expect("at least one machine")
    }

    /// Converts an exact instance to float mode with the given tolerance.
    pub fn to_float(&self, tol: f64) -> GameInstance {
        let mode = NumericMode::Float { tol };
        let jobs = self.jobs.iter().map(|pf| pf.to_mode(mode)).collect();
        let machines = self
            .machines
            .iter()
            .map(|m| Machine {
                speed: m.speed.to_mode(mode),
                priority: m.priority.clone(),
                rank: m.rank.clone(),
            })
            .collect();
        GameInstance { jobs, machines, mode }
    }

    /// Converts a float instance to exact rationals (binary-exact per value).
    pub fn to_rational(&self) -> GameInstance {
        let mode = NumericMode::Rational;
        let jobs = self.jobs.iter().map(|pf| pf.to_mode(mode)).collect();
        let machines = self
            .machines
            .iter()
            .map(|m| Machine {
                speed: m.speed.to_mode(mode),
                priority: m.priority.clone(),
                rank: m.rank.clone(),
            })
            .collect();
        GameInstance { jobs, machines, mode }
    }

    /// Computes the structural class flags of this game.
    pub fn classify(&self) -> GameClass {
        let first = &self.jobs[0];
        let symmetric = self.jobs.iter().all(|pf| pf == first);
        let two_machines = self.m() == 2;
        let s0 = self.machines[0].speed();
        let identical_speeds = self
            .machines
            .iter()
            .all(|m| m.speed().total_cmp(s0) == Ordering::Equal);
        let global_list = self
            .machines
            .iter()
            .all(|m| m.priority == self.machines[0].priority);
        let all_positive = self.jobs.iter().all(|pf| pf.sign() == Sign::Positive);
        let all_negative = self.jobs.iter().all(|pf| pf.sign() == Sign::Negative);
        let s_max = self.max_speed();
        let delay_averse = self.jobs.iter().all(|pf| pf.is_delay_averse(s_max));
        GameClass {
            symmetric,
            two_machines,
            identical_speeds,
            global_list,
            all_positive,
            all_negative,
            delay_averse,
        }
    }
}
