//! Best responses, Nash verification, best-response dynamics, and
//! brute-force equilibrium and optimum search.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GameError, Result};
use crate::game::GameInstance;
use crate::numeric::Numeric;
use crate::schedule::{build_schedule, Profile, Schedule};
use crate::{JobId, MachineId};

/// A strictly cost-reducing unilateral move.
#[derive(Clone, Debug)]
pub struct Deviation {
    pub job: JobId,
    pub from: MachineId,
    pub to: MachineId,
    pub old_cost: Numeric,
    pub new_cost: Numeric,
}

/// Which job moves at each step of best-response dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActivationPolicy {
    /// Cyclic scan from the job after the previous mover.
    RoundRobin,
    /// Always the lowest-indexed job with an improving move.
    LowestIndexDeviator,
    /// The job with the largest cost reduction; ties by lowest id.
    MaxGain,
    /// Uniform choice among improving jobs, seeded.
    SeededRandom(u64),
}

/// Result of a best-response run.
#[derive(Clone, Debug)]
pub enum BrdOutcome {
    Converged { profile: Profile, steps: usize },
    /// The profiles of the detected loop, starting at its first occurrence.
    Cycle { profiles: Vec<Profile>, entry_step: usize },
}

/// Everything brute force can say about a game's equilibria.
#[derive(Clone, Debug)]
pub struct EquilibriumReport {
    /// All pure Nash equilibria, sorted.
    pub ne_profiles: Vec<Profile>,
    pub opt_makespan: Numeric,
    pub opt_profile: Profile,
    /// Worst and best equilibrium makespans with witnesses; `None` when no
    /// equilibrium exists.
    pub ne_max: Option<(Numeric, Profile)>,
    pub ne_min: Option<(Numeric, Profile)>,
    /// max NE makespan / OPT; `None` when no equilibrium exists.
    pub poa: Option<Numeric>,
    /// min NE makespan / OPT.
    pub pos: Option<Numeric>,
}

/// Completion time (and realized length) job `i` would have on machine `j`,
/// holding everyone else fixed. For the job's current machine this is just
/// its scheduled completion.
pub fn candidate_completion(
    game: &GameInstance,
    sched: &Schedule,
    profile: &Profile,
    job: JobId,
    to: MachineId,
) -> (Numeric, Numeric) {
    if profile.machine_of(job) == to {
        return (sched.completions[job].clone(), sched.durations[job].clone());
    }
    let machine = game.machine(to);
    let my_rank = machine.rank_of(job);
    // jobs already on `to` are in priority order; find the last one ahead of us
    let seq = &sched.sequences[to];
    let mut lo = 0usize;
    let mut hi = seq.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if machine.rank_of(seq[mid]) < my_rank {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let start = if lo == 0 {
        game.mode().zero()
    } else {
        sched.completions[seq[lo - 1]].clone()
    };
    let p = game.job(job).eval_unchecked(&start);
    let completion = &start + &(&p / machine.speed());
    (completion, p)
}

/// The machine minimizing the job's completion time over all unilateral
/// choices, with its cost there. Ties prefer the machine where the job's
/// processing time is longer, then the lowest machine index.
pub fn best_response(
    game: &GameInstance,
    profile: &Profile,
    job: JobId,
) -> (MachineId, Numeric) {
    let sched = build_schedule(game, profile);
    best_response_cached(game, &sched, profile, job)
}

pub(crate) fn best_response_cached(
    game: &GameInstance,
    sched: &Schedule,
    profile: &Profile,
    job: JobId,
) -> (MachineId, Numeric) {
    let mode = game.mode();
    let mut best: Option<(MachineId, Numeric, Numeric)> = None;
    for j in 0..game.m() {
        let (cost, proc) = candidate_completion(game, sched, profile, job, j);
        match &best {
            None => best = Some((j, cost, proc)),
            Some((_, bc, bp)) => {
                if mode.lt(&cost, bc) || (mode.eq(&cost, bc) && mode.gt(&proc, bp)) {
                    best = Some((j, cost, proc));
                }
            }
        }
    }
    let (j, cost, _) = best.expect("m >= 1");
    (j, cost)
}

/// Checks whether `profile` is a pure Nash equilibrium; on failure returns
/// the first strictly improving deviation in (job, machine) scan order.
pub fn is_nash(game: &GameInstance, profile: &Profile) -> (bool, Option<Deviation>) {
    let sched = build_schedule(game, profile);
    is_nash_cached(game, &sched, profile)
}

pub(crate) fn is_nash_cached(
    game: &GameInstance,
    sched: &Schedule,
    profile: &Profile,
) -> (bool, Option<Deviation>) {
    let mode = game.mode();
    for job in 0..game.n() {
        let cur = profile.machine_of(job);
        let cur_cost = &sched.completions[job];
        for j in 0..game.m() {
            if j == cur {
                continue;
            }
            let (cost, _) = candidate_completion(game, sched, profile, job, j);
            if mode.lt(&cost, cur_cost) {
                return (
                    false,
                    Some(Deviation {
                        job,
                        from: cur,
                        to: j,
                        old_cost: cur_cost.clone(),
                        new_cost: cost,
                    }),
                );
            }
        }
    }
    (true, None)
}

fn improving_move(
    game: &GameInstance,
    sched: &Schedule,
    profile: &Profile,
    job: JobId,
) -> Option<(MachineId, Numeric, Numeric)> {
    let mode = game.mode();
    let cur_cost = &sched.completions[job];
    let (to, cost) = best_response_cached(game, sched, profile, job);
    if mode.lt(&cost, cur_cost) {
        Some((to, cur_cost.clone(), cost))
    } else {
        None
    }
}

/// Runs best-response dynamics from `initial`, applying one strict
/// best-response deviation per step.
///
/// Deterministic policies detect state recurrence and report the loop; the
/// seeded-random policy cannot certify a loop and fails with
/// [`GameError::StepBudgetExceeded`] once `max_steps` runs out.
pub fn brd(
    game: &GameInstance,
    initial: &Profile,
    policy: ActivationPolicy,
    max_steps: usize,
) -> Result<BrdOutcome> {
    assert!(max_steps >= 1, "max_steps must be >= 1");
    let n = game.n();
    let mut profile = initial.clone();
    let mut sched = build_schedule(game, &profile);
    let mut rng = match policy {
        ActivationPolicy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut rr_ptr = 0usize;
    // deterministic state -> step index at which it was first seen
    let mut seen: HashMap<(Vec<MachineId>, usize), usize> = HashMap::new();
    let mut trajectory: Vec<Profile> = Vec::new();

    for step in 0..=max_steps {
        if rng.is_none() {
            let key = (profile.0.clone(), rr_ptr);
            if let Some(&first) = seen.get(&key) {
                return Ok(BrdOutcome::Cycle {
                    profiles: trajectory[first..].to_vec(),
                    entry_step: first,
                });
            }
            seen.insert(key, step);
        }
        trajectory.push(profile.clone());

        let mover: Option<(JobId, MachineId)> = match policy {
            ActivationPolicy::RoundRobin => {
                let mut found = None;
                for k in 0..n {
                    let job = (rr_ptr + k) % n;
                    if let Some((to, _, _)) = improving_move(game, &sched, &profile, job) {
                        found = Some((job, to));
                        break;
                    }
                }
                found
            }
            ActivationPolicy::LowestIndexDeviator => (0..n).find_map(|job| {
                improving_move(game, &sched, &profile, job).map(|(to, _, _)| (job, to))
            }),
            ActivationPolicy::MaxGain => {
                let mut best: Option<(JobId, MachineId, Numeric)> = None;
                for job in 0..n {
                    if let Some((to, old, new)) = improving_move(game, &sched, &profile, job)
                    {
                        let gain = &old - &new;
                        let better = match &best {
                            None => true,
                            Some((_, _, bg)) => game.mode().gt(&gain, bg),
                        };
                        if better {
                            best = Some((job, to, gain));
                        }
                    }
                }
                best.map(|(job, to, _)| (job, to))
            }
            ActivationPolicy::SeededRandom(_) => {
                let movers: Vec<(JobId, MachineId)> = (0..n)
                    .filter_map(|job| {
                        improving_move(game, &sched, &profile, job)
                            .map(|(to, _, _)| (job, to))
                    })
                    .collect();
                if movers.is_empty() {
                    None
                } else {
                    let rng = rng.as_mut().expect("seeded policy has an rng");
                    Some(movers[rng.gen_range(0..movers.len())])
                }
            }
        };

        match mover {
            None => return Ok(BrdOutcome::Converged { profile, steps: step }),
            Some((job, to)) => {
                if step == max_steps {
                    break;
                }
                if policy == ActivationPolicy::RoundRobin {
                    rr_ptr = (job + 1) % n;
                }
                profile.0[job] = to;
                sched = build_schedule(game, &profile);
            }
        }
    }
    Err(GameError::StepBudgetExceeded(max_steps))
}

fn profile_space(game: &GameInstance, budget: u64) -> Result<u64> {
    let mut total: u128 = 1;
    for _ in 0..game.n() {
        total = total.saturating_mul(game.m() as u128);
        if total > budget as u128 {
            return Err(GameError::BudgetExceeded { needed: total, budget: budget as u128 });
        }
    }
    Ok(total as u64)
}

fn decode_profile(mut index: u64, n: usize, m: usize) -> Profile {
    let mut assignment = vec![0usize; n];
    for slot in assignment.iter_mut() {
        *slot = (index % m as u64) as usize;
        index /= m as u64;
    }
    Profile(assignment)
}

/// Exhaustively enumerates all pure Nash equilibria.
pub fn enumerate_ne(game: &GameInstance, budget: u64) -> Result<Vec<Profile>> {
    let total = profile_space(game, budget)?;
    let mut nes: Vec<Profile> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let profile = decode_profile(idx, game.n(), game.m());
            let sched = build_schedule(game, &profile);
            is_nash_cached(game, &sched, &profile).0.then_some(profile)
        })
        .collect();
    nes.sort();
    Ok(nes)
}

/// Minimum makespan over all profiles, with a deterministic witness (the
/// minimizer with the lowest profile index).
pub fn optimal_makespan(game: &GameInstance, budget: u64) -> Result<(Numeric, Profile)> {
    let total = profile_space(game, budget)?;
    let best = (0..total)
        .into_par_iter()
        .map(|idx| {
            let profile = decode_profile(idx, game.n(), game.m());
            let sched = build_schedule(game, &profile);
            (sched.makespan, idx)
        })
        .reduce_with(|a, b| {
            match a.0.total_cmp(&b.0) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => {
                    if a.1 <= b.1 {
                        a
                    } else {
                        b
                    }
                }
            }
        })
        .expect("profile space is nonempty");
    Ok((best.0, decode_profile(best.1, game.n(), game.m())))
}

/// Minimum total processing time over all profiles.
pub fn min_total_processing(game: &GameInstance, budget: u64) -> Result<Numeric> {
    let total = profile_space(game, budget)?;
    let best = (0..total)
        .into_par_iter()
        .map(|idx| {
            let profile = decode_profile(idx, game.n(), game.m());
            let sched = build_schedule(game, &profile);
            crate::schedule::total_processing(&sched)
        })
        .reduce_with(|a, b| {
            if a.total_cmp(&b) != std::cmp::Ordering::Greater {
                a
            } else {
                b
            }
        })
        .expect("profile space is nonempty");
    Ok(best)
}

/// Brute-force equilibrium report: NE set, optimum, PoA, and PoS.
pub fn compute_poa_pos(game: &GameInstance, budget: u64) -> Result<EquilibriumReport> {
    let ne_profiles = enumerate_ne(game, budget)?;
    let (opt_makespan, opt_profile) = optimal_makespan(game, budget)?;
    let mut ne_max: Option<(Numeric, Profile)> = None;
    let mut ne_min: Option<(Numeric, Profile)> = None;
    for p in &ne_profiles {
        let ms = build_schedule(game, p).makespan;
        match &ne_max {
            None => ne_max = Some((ms.clone(), p.clone())),
            Some((cur, _)) => {
                if ms.total_cmp(cur) == std::cmp::Ordering::Greater {
                    ne_max = Some((ms.clone(), p.clone()));
                }
            }
        }
        match &ne_min {
            None => ne_min = Some((ms, p.clone())),
            Some((cur, _)) => {
                if ms.total_cmp(cur) == std::cmp::Ordering::Less {
                    ne_min = Some((ms, p.clone()));
                }
            }
        }
    }
    let poa = ne_max.as_ref().map(|(ms, _)| ms / &opt_makespan);
    let pos = ne_min.as_ref().map(|(ms, _)| ms / &opt_makespan);
    Ok(EquilibriumReport {
        ne_profiles,
        opt_makespan,
        opt_profile,
        ne_max,
        ne_min,
        poa,
        pos,
    })
}

/// All outcomes of list scheduling on a global-list game, branching over
/// every completion-time tie. For such games this set equals the set of
/// pure Nash equilibria, which makes it a cheap equilibrium enumerator.
pub fn enumerate_ne_via_ls(game: &GameInstance, budget: u64) -> Result<Vec<Profile>> {
    if !game.classify().global_list {
        return Err(GameError::ClassMismatch(
            "global priority list required".into(),
        ));
    }
    let order = game.machine(0).priority().to_vec();
    let mode = game.mode();
    let mut out: std::collections::HashSet<Vec<MachineId>> =
        std::collections::HashSet::new();
    let zero = mode.zero();
    let mut loads = vec![zero; game.m()];
    let mut assignment = vec![0usize; game.n()];

    fn dfs(
        game: &GameInstance,
        order: &[JobId],
        pos: usize,
        loads: &mut Vec<Numeric>,
        assignment: &mut Vec<MachineId>,
        out: &mut std::collections::HashSet<Vec<MachineId>>,
        budget: u64,
    ) -> Result<()> {
        if pos == order.len() {
            out.insert(assignment.clone());
            if out.len() as u64 > budget {
                return Err(GameError::BudgetExceeded {
                    needed: out.len() as u128,
                    budget: budget as u128,
                });
            }
            return Ok(());
        }
        let mode = game.mode();
        let job = order[pos];
        let completions: Vec<Numeric> = (0..game.m())
            .map(|j| {
                let p = game.job(job).eval_unchecked(&loads[j]);
                &loads[j] + &(&p / game.machine(j).speed())
            })
            .collect();
        let best = completions
            .iter()
            .min_by(|a, b| a.total_cmp(b))
            .expect("m >= 1")
            .clone();
        for j in 0..game.m() {
            if mode.eq(&completions[j], &best) {
                let saved = loads[j].clone();
                loads[j] = completions[j].clone();
                assignment[job] = j;
                dfs(game, order, pos + 1, loads, assignment, out, budget)?;
                loads[j] = saved;
            }
        }
        Ok(())
    }

    dfs(game, &order, 0, &mut loads, &mut assignment, &mut out, budget)?;
    let mut profiles: Vec<Profile> = out.into_iter().map(Profile).collect();
    profiles.sort();
    Ok(profiles)
}
