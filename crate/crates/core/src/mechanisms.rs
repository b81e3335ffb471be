//! Coordination mechanisms: priority-list policies that tame the price of
//! anarchy, plus the analytical quantities used to reason about them
//! (work-based deterioration density, round structure, bound formulas).
//!
//! All three static policies emit a single global priority list; running
//! list scheduling over that list yields the mechanism's equilibrium.

use std::cmp::Ordering;

use crate::error::{GameError, Result};
use crate::game::GameInstance;
use crate::job::Sign;
use crate::numeric::{Numeric, NumericMode};
use crate::schedule::{Profile, Schedule};
use crate::JobId;

/// The supported scheduling policies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    /// Smallest deterioration rate first.
    Sdr,
    /// SDR generalized to re-rank jobs by their actual shrinkage between
    /// decision points, so threshold-saturated jobs sort first.
    SdrDynamic,
    /// Largest basic-to-rate ratio `b/a` first.
    Lbdr,
    /// Shortest basic processing time first.
    Sbpt,
}

/// Default substitute rate for fixed jobs in the LBDR ratio. Small enough
/// that any fixed job outranks every genuinely shrinking job.
pub fn default_lbdr_epsilon(mode: NumericMode) -> Numeric {
    match mode {
        NumericMode::Rational => {
            Numeric::Rational(num_rational::BigRational::new(
                num_bigint::BigInt::from(1),
                num_bigint::BigInt::from(1u64 << 40),
            ))
        }
        NumericMode::Float { .. } => Numeric::float(1.0 / (1u64 << 40) as f64),
    }
}

/// Jobs must shrink (or be fixed), be delay-averse, and run on
/// identical-speed machines.
fn check_negative_class(game: &GameInstance) -> Result<()> {
    let class = game.classify();
    if !class.identical_speeds {
        return Err(GameError::ClassMismatch("identical machine speeds required".into()));
    }
    if !class.delay_averse {
        return Err(GameError::ClassMismatch("delay-averse jobs required".into()));
    }
    let ok = game
        .jobs()
        .iter()
        .all(|pf| pf.sign() == Sign::Negative || pf.is_fixed());
    if !ok {
        return Err(GameError::ClassMismatch(
            "non-increasing processing times required".into(),
        ));
    }
    Ok(())
}

/// Uniform positive rate a > 0 across all jobs.
fn check_uniform_positive(game: &GameInstance) -> Result<Numeric> {
    let class = game.classify();
    if !class.all_positive {
        return Err(GameError::ClassMismatch("positive deterioration required".into()));
    }
    let a = game.job(0).rate().clone();
    if a.is_zero() {
        return Err(GameError::ClassMismatch("rate must be positive".into()));
    }
    for pf in game.jobs() {
        if pf.rate().total_cmp(&a) != Ordering::Equal {
            return Err(GameError::ClassMismatch("uniform rate required".into()));
        }
    }
    Ok(a)
}

/// Global list by non-decreasing deterioration rate, ties by job id.
pub fn sdr_priority(game: &GameInstance) -> Result<Vec<JobId>> {
    check_negative_class(game)?;
    let mut order: Vec<JobId> = (0..game.n()).collect();
    order.sort_by(|&a, &b| {
        game.job(a)
            .rate()
            .total_cmp(game.job(b).rate())
            .then_with(|| a.cmp(&b))
    });
    Ok(order)
}

/// Global list by non-increasing `b_i / max(a_i, epsilon)`, ties by job id.
/// Fixed jobs therefore come first, ordered by basic time descending.
pub fn lbdr_priority(game: &GameInstance, epsilon_rate: &Numeric) -> Result<Vec<JobId>> {
    check_negative_class(game)?;
    if epsilon_rate.is_zero() || epsilon_rate.is_negative() {
        return Err(GameError::Domain("epsilon rate must be > 0".into()));
    }
    let ratio = |i: JobId| {
        let pf = game.job(i);
        let a = if pf.rate().total_cmp(epsilon_rate) == Ordering::Less {
            epsilon_rate
        } else {
            pf.rate()
        };
        pf.basic() / a
    };
    let mut order: Vec<JobId> = (0..game.n()).collect();
    order.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)).then_with(|| a.cmp(&b)));
    Ok(order)
}

/// Global list by non-decreasing basic processing time, ties by job id.
pub fn sbpt_priority(game: &GameInstance) -> Result<Vec<JobId>> {
    check_uniform_positive(game)?;
    let mut order: Vec<JobId> = (0..game.n()).collect();
    order.sort_by(|&a, &b| {
        game.job(a)
            .basic()
            .total_cmp(game.job(b).basic())
            .then_with(|| a.cmp(&b))
    });
    Ok(order)
}

/// Proven price-of-anarchy bound of a policy.
///
/// SDR: 2. LBDR: max{e/(e-1), 2 - 1/m}, returned as a float since it is
/// irrational. SBPT: (2m + am - 1)/(m + a), exact in `a`'s backend.
pub fn poa_bound(policy: PolicyKind, m: usize, a: &Numeric) -> Numeric {
    match policy {
        PolicyKind::Sdr | PolicyKind::SdrDynamic => match a {
            Numeric::Rational(_) => Numeric::int(2),
            Numeric::Float(_) => Numeric::float(2.0),
        },
        PolicyKind::Lbdr => {
            let e = std::f64::consts::E;
            Numeric::float((e / (e - 1.0)).max(2.0 - 1.0 / m as f64))
        }
        PolicyKind::Sbpt => {
            let (two, one, m_n) = match a {
                Numeric::Rational(_) => {
                    (Numeric::int(2), Numeric::int(1), Numeric::int(m as i64))
                }
                Numeric::Float(_) => {
                    (Numeric::float(2.0), Numeric::float(1.0), Numeric::float(m as f64))
                }
            };
            let numer = &(&(&two * &m_n) + &(a * &m_n)) - &one;
            let denom = &m_n + a;
            &numer / &denom
        }
    }
}

/// Work done by the fleet before job `i` starts: `m * S_i` on identical
/// unit-speed machines with no idle time.
fn work_at_start(sched: &Schedule, m: usize, i: JobId) -> Numeric {
    let m_n = match &sched.starts[i] {
        Numeric::Rational(_) => Numeric::int(m as i64),
        Numeric::Float(_) => Numeric::float(m as f64),
    };
    &m_n * &sched.starts[i]
}

/// Work-based deterioration density: the sum of rates of jobs that have not
/// yet started once total machine work reaches `w`. A non-increasing step
/// function of `w`.
pub fn deterioration_density(
    game: &GameInstance,
    sched: &Schedule,
    w: &Numeric,
) -> Numeric {
    let mut acc = game.mode().zero();
    for i in 0..game.n() {
        if work_at_start(sched, game.m(), i).total_cmp(w) == Ordering::Greater {
            acc = &acc + game.job(i).rate();
        }
    }
    acc
}

/// `∫_0^w A(u) du`, summed exactly over the step segments: job `i`
/// contributes `a_i * min(w, W_i)`.
pub fn density_integral(game: &GameInstance, sched: &Schedule, w: &Numeric) -> Numeric {
    let mut acc = game.mode().zero();
    for i in 0..game.n() {
        let wi = work_at_start(sched, game.m(), i);
        let upto = if wi.total_cmp(w) == Ordering::Less { wi } else { w.clone() };
        acc = &acc + &(game.job(i).rate() * &upto);
    }
    acc
}

/// Like [`density_integral`] but counting only real shrinkage: a waiting
/// job stops contributing once its length bottoms out at the threshold.
/// Job `i` contributes `a_i * min(w, W_i, m * (b_i - tau_i)/a_i)`.
pub fn actual_density_integral(
    game: &GameInstance,
    sched: &Schedule,
    w: &Numeric,
) -> Numeric {
    let mut acc = game.mode().zero();
    let m_n = game.mode().int(game.m() as i64);
    for i in 0..game.n() {
        let pf = game.job(i);
        if pf.is_fixed() || pf.sign() != Sign::Negative {
            continue;
        }
        let mut upto = work_at_start(sched, game.m(), i);
        let tau = pf.tau().expect("negative sign implies tau");
        let cross = &m_n * &(&(pf.basic() - tau) / pf.rate());
        if cross.total_cmp(&upto) == Ordering::Less {
            upto = cross;
        }
        if w.total_cmp(&upto) == Ordering::Less {
            upto = w.clone();
        }
        acc = &acc + &(pf.rate() * &upto);
    }
    acc
}

/// Event-driven SDR variant. The first `m` jobs (smallest static rate) start
/// together at time 0; afterwards, whenever a machine frees at time `t` with
/// next decision point `t'`, it takes the unassigned job with the smallest
/// actual rate `(p(t) - p(t'))/(t' - t)`, ties by job id. Simultaneous
/// completions are processed in machine-id order, recomputing `t'` after
/// each assignment.
pub fn sdr_dynamic_schedule(game: &GameInstance) -> Result<Schedule> {
    check_negative_class(game)?;
    let mode = game.mode();
    let n = game.n();
    let m = game.m();
    let zero = mode.zero();

    let mut by_rate: Vec<JobId> = (0..n).collect();
    by_rate.sort_by(|&a, &b| {
        game.job(a)
            .rate()
            .total_cmp(game.job(b).rate())
            .then_with(|| a.cmp(&b))
    });

    let mut starts = vec![zero.clone(); n];
    let mut durations = vec![zero.clone(); n];
    let mut completions = vec![zero.clone(); n];
    let mut sequences: Vec<Vec<JobId>> = vec![Vec::new(); m];
    let mut loads = vec![zero.clone(); m];
    let mut unassigned: Vec<JobId> = Vec::new();

    for (k, &job) in by_rate.iter().enumerate() {
        if k < m {
            let machine = k;
            let p = game.job(job).eval_unchecked(&zero);
            let done = &zero + &(&p / game.machine(machine).speed());
            durations[job] = p;
            completions[job] = done.clone();
            loads[machine] = done;
            sequences[machine].push(job);
        } else {
            unassigned.push(job);
        }
    }
    unassigned.sort_unstable();

    while !unassigned.is_empty() {
        // earliest-freeing machine, ties by id
        let j_free = (0..m)
            .min_by(|&a, &b| loads[a].total_cmp(&loads[b]).then_with(|| a.cmp(&b)))
            .expect("m >= 1");
        let t = loads[j_free].clone();
        // next decision point: earliest strictly later completion elsewhere
        let t_next = (0..m)
            .filter(|&j| j != j_free)
            .map(|j| loads[j].clone())
            .filter(|l| l.total_cmp(&t) == Ordering::Greater)
            .min_by(|a, b| a.total_cmp(b));

        let actual_rate = |job: JobId| -> Numeric {
            match &t_next {
                Some(tp) => {
                    let drop = &game.job(job).eval_unchecked(&t)
                        - &game.job(job).eval_unchecked(tp);
                    &drop / &(tp - &t)
                }
                // no future event: the instantaneous rate (0 once saturated)
                None => {
                    let pf = game.job(job);
                    match pf.tau() {
                        Some(tau) if pf.eval_unchecked(&t).total_cmp(tau) != Ordering::Greater => {
                            mode.zero()
                        }
                        _ => pf.rate().clone(),
                    }
                }
            }
        };

        let pick_pos = (0..unassigned.len())
            .min_by(|&a, &b| {
                actual_rate(unassigned[a])
                    .total_cmp(&actual_rate(unassigned[b]))
                    .then_with(|| unassigned[a].cmp(&unassigned[b]))
            })
            .expect("nonempty");
        let job = unassigned.remove(pick_pos);
        let p = game.job(job).eval_unchecked(&t);
        let done = &t + &(&p / game.machine(j_free).speed());
        starts[job] = t;
        durations[job] = p;
        completions[job] = done.clone();
        loads[j_free] = done;
        sequences[j_free].push(job);
    }

    let makespan = completions
        .iter()
        .max_by(|a, b| a.total_cmp(b))
        .expect("n >= 1")
        .clone();
    Ok(Schedule { starts, durations, completions, sequences, loads, makespan })
}

/// Partitions jobs by their position on their machine: round `k` holds every
/// job scheduled `k`-th somewhere. Requires a uniform rate and machine job
/// counts that are exactly balanced.
pub fn rounds_of(game: &GameInstance, profile: &Profile) -> Result<Vec<Vec<JobId>>> {
    check_uniform_positive(game)?;
    let sched = crate::schedule::build_schedule(game, profile);
    let per_machine = game.n() / game.m();
    if per_machine * game.m() != game.n()
        || sched.sequences.iter().any(|s| s.len() != per_machine)
    {
        return Err(GameError::MalformedProfile(
            "machine job counts must be exactly balanced".into(),
        ));
    }
    let mut rounds = vec![Vec::new(); per_machine];
    for seq in &sched.sequences {
        for (k, &job) in seq.iter().enumerate() {
            rounds[k].push(job);
        }
    }
    for round in &mut rounds {
        round.sort_unstable();
    }
    Ok(rounds)
}
