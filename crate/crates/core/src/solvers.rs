//! Constructive equilibrium solvers, each gated by the game class it is
//! proven for. Misuse outside the class is an error rather than a silent
//! best effort, since the stability guarantee is class-scoped.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{GameError, Result};
use crate::game::GameInstance;
use crate::numeric::Numeric;
use crate::schedule::{build_schedule, Profile};
use crate::{JobId, MachineId};

/// Tie rule for machine argmins inside list scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    LowestIndex,
    /// Prefer the machine with fewer assigned jobs, then the lowest index.
    FewestJobs,
    /// Prefer the machine where the job's processing time is longer, then
    /// the lowest index.
    LongerProcessing,
}

/// Operation counters for the heap-backed greedy solver.
#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyStats {
    /// Heap pops that selected a machine for an assignment; always `n`.
    pub selections: usize,
    pub heap_pops: usize,
    pub heap_pushes: usize,
}

/// Greedily assigns identical jobs: at each step the machine where the next
/// job would finish first receives the first unassigned job of its own
/// priority list. Produces an equilibrium for symmetric jobs on related
/// machines.
pub fn solve_symmetric(game: &GameInstance) -> Result<Profile> {
    if !game.classify().symmetric {
        return Err(GameError::ClassMismatch("symmetric jobs required".into()));
    }
    let mode = game.mode();
    let pf = game.job(0);
    let mut loads = vec![mode.zero(); game.m()];
    let mut assigned = vec![false; game.n()];
    let mut profile = vec![0usize; game.n()];
    for _ in 0..game.n() {
        let mut best: Option<(MachineId, Numeric)> = None;
        for j in 0..game.m() {
            let candidate = {
                let p = pf.eval_unchecked(&loads[j]);
                &loads[j] + &(&p / game.machine(j).speed())
            };
            let better = match &best {
                None => true,
                Some((_, bc)) => mode.lt(&candidate, bc),
            };
            if better {
                best = Some((j, candidate));
            }
        }
        let (j_star, completion) = best.expect("m >= 1");
        let job = game
            .machine(j_star)
            .priority()
            .iter()
            .copied()
            .find(|&i| !assigned[i])
            .expect("an unassigned job exists");
        assigned[job] = true;
        profile[job] = j_star;
        loads[j_star] = completion;
    }
    Ok(Profile(profile))
}

/// Two related machines, delay-averse jobs: start everyone on the fast
/// machine, then offer each job (in the slow machine's priority order) a
/// single migration, applied against the live schedule.
pub fn solve_two_machines(game: &GameInstance) -> Result<Profile> {
    let class = game.classify();
    if !class.two_machines {
        return Err(GameError::ClassMismatch("exactly two machines required".into()));
    }
    let one = game.mode().one();
    if game.machine(0).speed().total_cmp(&one) != Ordering::Equal
        || game.machine(1).speed().total_cmp(&one) == Ordering::Greater
    {
        return Err(GameError::ClassMismatch(
            "machine 0 must have speed 1 and machine 1 speed <= 1".into(),
        ));
    }
    if !class.delay_averse {
        return Err(GameError::ClassMismatch("delay-averse jobs required".into()));
    }
    let mode = game.mode();
    let mut profile = Profile(vec![0usize; game.n()]);
    let mut sched = build_schedule(game, &profile);
    for &job in game.machine(1).priority() {
        let cur_cost = sched.completions[job].clone();
        let (cost, _) =
            crate::equilibrium::candidate_completion(game, &sched, &profile, job, 1);
        if mode.lt(&cost, &cur_cost) {
            profile.0[job] = 1;
            sched = build_schedule(game, &profile);
        }
    }
    Ok(profile)
}

/// List scheduling for games with a global priority list: jobs in list
/// order each take a machine minimizing their completion time.
pub fn list_scheduling(game: &GameInstance, tie_break: TieBreak) -> Result<Profile> {
    if !game.classify().global_list {
        return Err(GameError::ClassMismatch("global priority list required".into()));
    }
    let mode = game.mode();
    let mut loads = vec![mode.zero(); game.m()];
    let mut counts = vec![0usize; game.m()];
    let mut profile = vec![0usize; game.n()];
    for &job in game.machine(0).priority() {
        let mut best: Option<(MachineId, Numeric, Numeric)> = None;
        for j in 0..game.m() {
            let p = game.job(job).eval_unchecked(&loads[j]);
            let completion = &loads[j] + &(&p / game.machine(j).speed());
            let better = match &best {
                None => true,
                Some((bj, bc, bp)) => match mode.cmp(&completion, bc) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => match tie_break {
                        TieBreak::LowestIndex => false,
                        TieBreak::FewestJobs => counts[j] < counts[*bj],
                        TieBreak::LongerProcessing => mode.gt(&p, bp),
                    },
                },
            };
            if better {
                best = Some((j, completion, p));
            }
        }
        let (j_star, completion, _) = best.expect("m >= 1");
        profile[job] = j_star;
        counts[j_star] += 1;
        loads[j_star] = completion;
    }
    Ok(Profile(profile))
}

struct HeapEntry {
    key: Numeric,
    machine: MachineId,
    job: JobId,
    stamp: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // reversed: BinaryHeap is a max-heap, we want the smallest key first,
    // ties to the lowest machine index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.machine.cmp(&self.machine))
            .then_with(|| other.stamp.cmp(&self.stamp))
    }
}

/// General greedy for identical-speed machines and delay-averse jobs: each
/// step compares, per machine, the completion of the next unassigned job on
/// that machine's own priority list, and assigns the overall minimum.
pub fn greedy_general(game: &GameInstance) -> Result<Profile> {
    greedy_general_with_stats(game).map(|(p, _)| p)
}

/// Heap-backed implementation; machine selection is one heap pop per
/// assignment, with entries refreshed eagerly when a machine's head job is
/// taken elsewhere.
pub fn greedy_general_with_stats(game: &GameInstance) -> Result<(Profile, GreedyStats)> {
    let class = game.classify();
    if !class.identical_speeds {
        return Err(GameError::ClassMismatch("identical machine speeds required".into()));
    }
    if !class.delay_averse {
        return Err(GameError::ClassMismatch("delay-averse jobs required".into()));
    }
    let m = game.m();
    let mut stats = GreedyStats::default();
    let mut loads = vec![game.mode().zero(); m];
    let mut cursor = vec![0usize; m]; // position in each machine's priority list
    let mut candidate = vec![usize::MAX; m];
    let mut stamp = vec![0u64; m];
    let mut assigned = vec![false; game.n()];
    let mut profile = vec![0usize; game.n()];
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();

    let key_of = |game: &GameInstance, j: usize, job: JobId, loads: &[Numeric]| {
        let p = game.job(job).eval_unchecked(&loads[j]);
        &loads[j] + &(&p / game.machine(j).speed())
    };

    let refresh = |game: &GameInstance,
                   j: usize,
                   loads: &[Numeric],
                   cursor: &mut [usize],
                   candidate: &mut [usize],
                   stamp: &mut [u64],
                   assigned: &[bool],
                   heap: &mut BinaryHeap<HeapEntry>,
                   stats: &mut GreedyStats| {
        let prio = game.machine(j).priority();
        while cursor[j] < prio.len() && assigned[prio[cursor[j]]] {
            cursor[j] += 1;
        }
        stamp[j] += 1;
        if cursor[j] < prio.len() {
            let job = prio[cursor[j]];
            candidate[j] = job;
            heap.push(HeapEntry {
                key: key_of(game, j, job, loads),
                machine: j,
                job,
                stamp: stamp[j],
            });
            stats.heap_pushes += 1;
        } else {
            candidate[j] = usize::MAX;
        }
    };

    for j in 0..m {
        refresh(
            game, j, &loads, &mut cursor, &mut candidate, &mut stamp, &assigned, &mut heap,
            &mut stats,
        );
    }

    let mut remaining = game.n();
    while remaining > 0 {
        let entry = heap.pop().expect("unassigned jobs imply a live heap entry");
        stats.heap_pops += 1;
        let j = entry.machine;
        if entry.stamp != stamp[j] {
            continue; // superseded by a refresh
        }
        stats.selections += 1;
        let job = entry.job;
        assigned[job] = true;
        profile[job] = j;
        loads[j] = entry.key;
        remaining -= 1;
        for other in 0..m {
            if other != j && candidate[other] == job {
                refresh(
                    game, other, &loads, &mut cursor, &mut candidate, &mut stamp, &assigned,
                    &mut heap, &mut stats,
                );
            }
        }
        refresh(
            game, j, &loads, &mut cursor, &mut candidate, &mut stamp, &assigned, &mut heap,
            &mut stats,
        );
    }
    Ok((Profile(profile), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::is_nash;
    use crate::game::Machine;
    use crate::job::ProcessingFunction;
    use crate::numeric::NumericMode;
    use crate::{generators, schedule};

    fn identical_machines(n: usize, m: usize) -> Vec<Machine> {
        let prio: Vec<usize> = (0..n).collect();
        (0..m)
            .map(|_| Machine::new(Numeric::int(1), prio.clone(), n).unwrap())
            .collect()
    }

    #[test]
    fn symmetric_fixed_jobs_balance() {
        let jobs: Vec<_> = (0..5)
            .map(|_| ProcessingFunction::fixed(Numeric::int(2)).unwrap())
            .collect();
        let game =
            GameInstance::new(jobs, identical_machines(5, 2), NumericMode::Rational).unwrap();
        let profile = solve_symmetric(&game).unwrap();
        let sched = schedule::build_schedule(&game, &profile);
        // ceil(5/2) * 2 = 6
        assert_eq!(sched.makespan, Numeric::int(6));
        assert!(is_nash(&game, &profile).0);
    }

    #[test]
    fn symmetric_negative_closed_form() {
        // b = 4, a = 1/2, tau = 1: two jobs per machine complete at 6
        let jobs: Vec<_> = (0..4)
            .map(|_| {
                ProcessingFunction::negative(
                    Numeric::int(4),
                    Numeric::ratio(1, 2),
                    Numeric::int(1),
                )
                .unwrap()
            })
            .collect();
        let game =
            GameInstance::new(jobs, identical_machines(4, 2), NumericMode::Rational).unwrap();
        let profile = solve_symmetric(&game).unwrap();
        let sched = schedule::build_schedule(&game, &profile);
        for j in 0..2 {
            assert_eq!(sched.sequences[j].len(), 2);
            assert_eq!(sched.loads[j], Numeric::int(6));
        }
        assert!(is_nash(&game, &profile).0);
    }

    #[test]
    fn symmetric_solver_rejects_asymmetric_games() {
        let game = generators::gen_no_ne2();
        assert!(matches!(
            solve_symmetric(&game),
            Err(GameError::ClassMismatch(_))
        ));
    }

    #[test]
    fn two_machine_solver_single_job_stays_on_fast_machine() {
        let jobs = vec![ProcessingFunction::fixed(Numeric::int(3)).unwrap()];
        let machines = vec![
            Machine::new(Numeric::int(1), vec![0], 1).unwrap(),
            Machine::new(Numeric::ratio(1, 2), vec![0], 1).unwrap(),
        ];
        let game = GameInstance::new(jobs, machines, NumericMode::Rational).unwrap();
        let profile = solve_two_machines(&game).unwrap();
        assert_eq!(profile, Profile(vec![0]));
    }

    #[test]
    fn two_machine_solver_migrates_second_job() {
        let jobs = vec![
            ProcessingFunction::fixed(Numeric::int(1)).unwrap(),
            ProcessingFunction::fixed(Numeric::int(1)).unwrap(),
        ];
        let game =
            GameInstance::new(jobs, identical_machines(2, 2), NumericMode::Rational).unwrap();
        let profile = solve_two_machines(&game).unwrap();
        assert_eq!(profile, Profile(vec![0, 1]));
        let sched = schedule::build_schedule(&game, &profile);
        assert_eq!(sched.makespan, Numeric::int(1));
        assert!(is_nash(&game, &profile).0);
    }

    #[test]
    fn two_machine_solver_rejects_non_delay_averse() {
        let game = generators::gen_no_ne2();
        assert!(matches!(
            solve_two_machines(&game),
            Err(GameError::ClassMismatch(_))
        ));
    }

    #[test]
    fn ls_reproduces_exponential_family_makespan() {
        let fam = generators::gen_exponential(2, 2, &Numeric::int(1)).unwrap();
        let profile = list_scheduling(&fam.game, TieBreak::LowestIndex).unwrap();
        let sched = schedule::build_schedule(&fam.game, &profile);
        assert_eq!(sched.makespan, Numeric::int(141));
        assert!(is_nash(&fam.game, &profile).0);
    }

    #[test]
    fn ls_on_single_machine_follows_priority_order() {
        let jobs = vec![
            ProcessingFunction::fixed(Numeric::int(2)).unwrap(),
            ProcessingFunction::fixed(Numeric::int(3)).unwrap(),
        ];
        let machines = vec![Machine::new(Numeric::int(1), vec![1, 0], 2).unwrap()];
        let game = GameInstance::new(jobs, machines, NumericMode::Rational).unwrap();
        let profile = list_scheduling(&game, TieBreak::LowestIndex).unwrap();
        let sched = schedule::build_schedule(&game, &profile);
        assert_eq!(sched.sequences[0], vec![1, 0]);
        assert_eq!(sched.makespan, Numeric::int(5));
    }

    #[test]
    fn greedy_matches_ls_when_lists_are_uniform() {
        let fam = generators::gen_sbpt_tight();
        let by_ls = list_scheduling(&fam.game, TieBreak::LowestIndex).unwrap();
        let by_greedy = greedy_general(&fam.game).unwrap();
        assert_eq!(by_ls, by_greedy);
    }

    #[test]
    fn greedy_rejects_class_mismatch() {
        let game = generators::gen_no_ne2();
        assert!(matches!(greedy_general(&game), Err(GameError::ClassMismatch(_))));
    }

    #[test]
    fn greedy_selection_count_is_n() {
        let fam = generators::gen_arbitrary_lb(3, &Numeric::ratio(1, 10)).unwrap();
        let (profile, stats) = greedy_general_with_stats(&fam.game).unwrap();
        assert_eq!(stats.selections, fam.game.n());
        assert!(stats.heap_pops >= stats.selections);
        assert!(stats.heap_pushes <= (fam.game.m() + 1) * fam.game.n() + fam.game.m());
        assert!(is_nash(&fam.game, &profile).0);
    }
}
