//! Constructors for every named instance and parametric family, the 3DM-3
//! reduction with its matching oracle, and seeded random sampling.

mod random;
mod reduction;

pub use random::{sample_random, SampleParams};
pub use reduction::{
    find_3dm_matching, matching_profile, reduce_3dm, reduced_ne_exists,
    solve_3dm_bruteforce, Reduction, ReductionLayout, ThreeDMInstance,
};

use crate::error::{GameError, Result};
use crate::game::{GameInstance, Machine};
use crate::job::ProcessingFunction;
use crate::numeric::{Numeric, NumericMode};
use crate::schedule::Profile;
use crate::JobId;

/// A generated game together with per-job display names and, where the
/// construction describes them, witness profiles for an equilibrium and an
/// optimum.
#[derive(Clone, Debug)]
pub struct Family {
    pub game: GameInstance,
    pub names: Vec<String>,
    pub ne_witness: Option<Profile>,
    pub opt_witness: Option<Profile>,
}

fn unit_machines(n: usize, priorities: Vec<Vec<JobId>>) -> Vec<Machine> {
    priorities
        .into_iter()
        .map(|p| Machine::new(Numeric::int(1), p, n).expect("valid priority list"))
        .collect()
}

/// Two shrinking jobs on two related machines with crossed priorities;
/// the smallest game with no pure equilibrium.
pub fn gen_no_ne2() -> GameInstance {
    let u = ProcessingFunction::negative(Numeric::int(24), Numeric::ratio(3, 2), Numeric::int(3))
        .unwrap();
    let v = ProcessingFunction::negative(Numeric::int(8), Numeric::ratio(3, 2), Numeric::int(3))
        .unwrap();
    let machines = vec![
        Machine::new(Numeric::int(1), vec![0, 1], 2).unwrap(),
        Machine::new(Numeric::ratio(1, 2), vec![1, 0], 2).unwrap(),
    ];
    GameInstance::new(vec![u, v], machines, NumericMode::Rational).unwrap()
}

/// Three shrinking jobs on two identical machines with no pure equilibrium.
pub fn gen_no_ne3() -> GameInstance {
    let u = ProcessingFunction::negative(
        Numeric::int(5),
        Numeric::ratio(21, 20),
        Numeric::ratio(1, 5),
    )
    .unwrap();
    let v = ProcessingFunction::negative(
        Numeric::int(4),
        Numeric::ratio(11, 10),
        Numeric::ratio(1, 5),
    )
    .unwrap();
    let w = ProcessingFunction::negative(
        Numeric::int(3),
        Numeric::ratio(6, 5),
        Numeric::ratio(1, 5),
    )
    .unwrap();
    let machines = unit_machines(3, vec![vec![1, 0, 2], vec![2, 0, 1]]);
    GameInstance::new(vec![u, v, w], machines, NumericMode::Rational).unwrap()
}

/// `m` unit jobs plus one growing job of basic time 2 and rate `2r - 3` on
/// `m` identical machines with a global list; its price of anarchy is
/// exactly `r`. Requires `r >= 3/2` so the rate stays non-negative.
pub fn gen_poa_r(m: usize, r: &Numeric) -> Result<Family> {
    if m < 2 {
        return Err(GameError::ParameterInfeasible("need m >= 2".into()));
    }
    let three_halves = Numeric::ratio(3, 2);
    if r.total_cmp(&three_halves) == std::cmp::Ordering::Less {
        return Err(GameError::ParameterInfeasible(
            "r must be >= 3/2 so the deterioration rate 2r - 3 is non-negative".into(),
        ));
    }
    let rate = &(&Numeric::int(2) * r) - &Numeric::int(3);
    let mut jobs = Vec::new();
    let mut names = Vec::new();
    for i in 0..m {
        jobs.push(ProcessingFunction::fixed(Numeric::int(1))?);
        names.push(format!("j{}", i + 1));
    }
    jobs.push(ProcessingFunction::positive(Numeric::int(2), rate)?);
    names.push(format!("j{}", m + 1));
    let n = jobs.len();
    let priority: Vec<JobId> = (0..n).collect();
    let speeds = vec![Numeric::int(1); m];
    let game =
        GameInstance::with_global_priority(jobs, speeds, &priority, NumericMode::Rational)?;

    let mut ne = vec![0usize; n];
    for (i, slot) in ne.iter_mut().enumerate().take(m) {
        *slot = i;
    }
    ne[m] = 0;
    let mut opt = vec![0usize; n];
    opt[0] = 0;
    opt[1] = 0;
    for (i, slot) in opt.iter_mut().enumerate().take(m).skip(2) {
        *slot = i;
    }
    opt[m] = 1;
    Ok(Family {
        game,
        names,
        ne_witness: Some(Profile(ne)),
        opt_witness: Some(Profile(opt)),
    })
}

/// The uniform-rate family whose list-scheduling equilibrium is a factor
/// `(1+a)^{n/m}` worse than the optimum: `mk` short growing jobs between
/// `m + 1` long ones, all sharing the global list.
pub fn gen_exponential(m: usize, k: usize, a: &Numeric) -> Result<Family> {
    if m < 2 || k < 1 {
        return Err(GameError::ParameterInfeasible("need m >= 2 and k >= 1".into()));
    }
    if a.is_zero() || a.is_negative() {
        return Err(GameError::ParameterInfeasible("rate a must be > 0".into()));
    }
    let one = Numeric::int(1);
    let w = (&one + a).pow_u((m * k) as u32);
    let y_basic = &(&w - &one) / a;

    let n = m * k + m + 1;
    let mut jobs = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    for i in 0..m {
        jobs.push(ProcessingFunction::positive(y_basic.clone(), a.clone())?);
        names.push(format!("y{i}"));
    }
    for i in 0..m * k {
        jobs.push(ProcessingFunction::positive(one.clone(), a.clone())?);
        names.push(format!("x{i}"));
    }
    jobs.push(ProcessingFunction::positive(y_basic, a.clone())?);
    names.push(format!("y{m}"));

    let priority: Vec<JobId> = (0..n).collect();
    let speeds = vec![Numeric::int(1); m];
    let game =
        GameInstance::with_global_priority(jobs, speeds, &priority, NumericMode::Rational)?;

    // optimal witness: y_0 and y_1 stacked, all short jobs buffering y_m,
    // the remaining long jobs alone
    let mut opt = vec![0usize; n];
    for (j, slot) in opt.iter_mut().enumerate().take(m).skip(2) {
        *slot = j;
    }
    for i in m..m + m * k {
        opt[i] = 1;
    }
    opt[m + m * k] = 1;
    Ok(Family { game, names, ne_witness: None, opt_witness: Some(Profile(opt)) })
}

/// Identical machines, per-machine priority lists, price of anarchy
/// `3 - 1/m - eps`: one long fixed job, `(m-1)m` short fixed jobs, and `m`
/// rate-1 shrinking jobs each favored by a different machine.
pub fn gen_arbitrary_lb(m: usize, eps: &Numeric) -> Result<Family> {
    check_eps(m, eps)?;
    let one = Numeric::int(1);
    // eps' = m/(2m-1) * eps
    let eps_p = &(&Numeric::int(m as i64) * eps) / &Numeric::int(2 * m as i64 - 1);
    let short = &(&one - &eps_p) / &Numeric::int(m as i64);

    // ids: v_1..v_m = 0..m-1, u_1..u_{(m-1)m} = m..m+(m-1)m-1, a = n-1
    let n = m + (m - 1) * m + 1;
    let mut jobs = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    for i in 0..m {
        jobs.push(ProcessingFunction::negative(one.clone(), one.clone(), eps_p.clone())?);
        names.push(format!("v{}", i + 1));
    }
    for i in 0..(m - 1) * m {
        jobs.push(ProcessingFunction::fixed(short.clone())?);
        names.push(format!("u{}", i + 1));
    }
    jobs.push(ProcessingFunction::fixed(&one - &eps_p)?);
    names.push("a".into());

    let u_ids: Vec<JobId> = (m..m + (m - 1) * m).collect();
    let mut priorities = Vec::with_capacity(m);
    for j in 0..m {
        let mut p = vec![j];
        p.extend(&u_ids);
        p.push(n - 1);
        p.extend((0..m).filter(|&v| v != j));
        priorities.push(p);
    }
    let machines = unit_machines(n, priorities);
    let game = GameInstance::new(jobs, machines, NumericMode::Rational)?;

    // described equilibrium: v_j first on machine j with m-1 short jobs;
    // the long fixed job joins machine 0
    let mut ne = vec![0usize; n];
    for (j, slot) in ne.iter_mut().enumerate().take(m) {
        *slot = j;
    }
    for k in 0..m - 1 {
        for j in 0..m {
            ne[m + k * m + j] = j;
        }
    }
    ne[n - 1] = 0;
    // described optimum: machine 0 runs the long job then v_m; machine j >= 1
    // runs m short jobs then v_j
    let mut opt = vec![0usize; n];
    opt[m - 1] = 0;
    for j in 1..m {
        for t in 0..m {
            opt[m + (j - 1) * m + t] = j;
        }
        opt[j - 1] = j;
    }
    opt[n - 1] = 0;
    Ok(Family {
        game,
        names,
        ne_witness: Some(Profile(ne)),
        opt_witness: Some(Profile(opt)),
    })
}

/// The global-list counterpart with price of anarchy `3 - 2/m - eps`.
pub fn gen_global_lb(m: usize, eps: &Numeric) -> Result<Family> {
    check_eps(m, eps)?;
    let one = Numeric::int(1);
    // derived so the witness ratio is exactly 3 - 2/m - eps:
    // eps' = eps / ((m-1)(3 - eps))
    let eps_p = &eps.clone()
        / &(&Numeric::int(m as i64 - 1) * &(&Numeric::int(3) - eps));
    let short = &(&one - &eps_p) / &Numeric::int(m as i64);

    let n = m + (m - 1) * m + 1;
    let mut jobs = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    for i in 0..m {
        jobs.push(ProcessingFunction::negative(one.clone(), one.clone(), eps_p.clone())?);
        names.push(format!("v{}", i + 1));
    }
    for i in 0..(m - 1) * m {
        jobs.push(ProcessingFunction::fixed(short.clone())?);
        names.push(format!("u{}", i + 1));
    }
    jobs.push(ProcessingFunction::fixed(&one - &eps_p)?);
    names.push("a".into());

    // global list: U_1, V, U \ U_1, a
    let mut priority: Vec<JobId> = (m..2 * m).collect();
    priority.extend(0..m);
    priority.extend(2 * m..m + (m - 1) * m);
    priority.push(n - 1);
    let speeds = vec![Numeric::int(1); m];
    let game = GameInstance::with_global_priority(jobs, speeds, &priority, NumericMode::Rational)?;

    // described equilibrium: machine j runs u_{j+1}, v_{j+1}, then one job
    // of each later U-block; machine 0 also takes the long job
    let mut ne = vec![0usize; n];
    for j in 0..m {
        ne[j] = j; // v_{j+1}
        ne[m + j] = j; // u_{j+1} in U_1
        for k in 1..m.saturating_sub(1) {
            ne[m + k * m + j] = j;
        }
    }
    ne[n - 1] = 0;
    // described optimum: long job alone on machine 0; machine 1 takes U_1
    // and every shrinking job; later machines take the remaining U-blocks
    let mut opt = vec![0usize; n];
    opt[n - 1] = 0;
    for j in 0..m {
        opt[j] = 1;
        opt[m + j] = 1;
    }
    for j in 2..m {
        for t in 0..m {
            opt[m + (j - 1) * m + t] = j;
        }
    }
    Ok(Family {
        game,
        names,
        ne_witness: Some(Profile(ne)),
        opt_witness: Some(Profile(opt)),
    })
}

fn check_eps(m: usize, eps: &Numeric) -> Result<()> {
    if m < 2 {
        return Err(GameError::ParameterInfeasible("need m >= 2".into()));
    }
    let zero = Numeric::int(0);
    let one = Numeric::int(1);
    if eps.total_cmp(&zero) != std::cmp::Ordering::Greater
        || eps.total_cmp(&one) != std::cmp::Ordering::Less
    {
        return Err(GameError::ParameterInfeasible("need 0 < eps < 1".into()));
    }
    Ok(())
}

/// The lower-bound family for the smallest-rate policy: `k(m-1)` small
/// shrinking jobs ahead of one big one, all with the same rate. Built in
/// float mode since realistic parameters need thousands of jobs.
#[allow(clippy::too_many_arguments)]
pub fn gen_sdr_lb(
    b: f64,
    a: f64,
    big_b: f64,
    tau: f64,
    k: usize,
    m: usize,
) -> Result<Family> {
    if m < 2 || k < 1 {
        return Err(GameError::ParameterInfeasible("need m >= 2 and k >= 1".into()));
    }
    if !(b > 0.0 && a > 0.0 && big_b > 0.0 && tau > 0.0 && tau <= b && b <= big_b) {
        return Err(GameError::ParameterInfeasible(
            "need 0 < tau <= b <= B and a > 0".into(),
        ));
    }
    if a * big_b >= b {
        return Err(GameError::ParameterInfeasible(
            "need b/a > B, otherwise the admissible k-interval is empty".into(),
        ));
    }
    let k_max = ((1.0 - a * big_b / b).ln() / (1.0 - a).ln()).floor();
    if (k as f64) > k_max {
        return Err(GameError::ParameterInfeasible(format!(
            "k = {k} exceeds the admissible maximum {k_max}"
        )));
    }

    let n = k * (m - 1) + 1;
    let mut jobs = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    for i in 0..n - 1 {
        jobs.push(ProcessingFunction::negative(
            Numeric::float(b),
            Numeric::float(a),
            Numeric::float(tau),
        )?);
        names.push(format!("u{}", i + 1));
    }
    jobs.push(ProcessingFunction::negative(
        Numeric::float(big_b),
        Numeric::float(a),
        Numeric::float(tau),
    )?);
    names.push("v".into());

    let priority: Vec<JobId> = (0..n).collect();
    let speeds = vec![Numeric::float(1.0); m];
    let game = GameInstance::with_global_priority(
        jobs,
        speeds,
        &priority,
        NumericMode::float_default(),
    )?;

    // optimum: the big job alone on machine 0, k small jobs on each other
    let mut opt = vec![0usize; n];
    for i in 0..n - 1 {
        opt[i] = 1 + i / k;
    }
    opt[n - 1] = 0;
    Ok(Family { game, names, ne_witness: None, opt_witness: Some(Profile(opt)) })
}

/// Two identical machines, rate 1, basic times (1, 1, 3): the tight
/// example for the shortest-basic-time policy, with optimum 3 and worst
/// equilibrium 5.
pub fn gen_sbpt_tight() -> Family {
    let one = Numeric::int(1);
    let jobs = vec![
        ProcessingFunction::positive(Numeric::int(1), one.clone()).unwrap(),
        ProcessingFunction::positive(Numeric::int(1), one.clone()).unwrap(),
        ProcessingFunction::positive(Numeric::int(3), one).unwrap(),
    ];
    let priority = vec![0, 1, 2];
    let speeds = vec![Numeric::int(1), Numeric::int(1)];
    let game =
        GameInstance::with_global_priority(jobs, speeds, &priority, NumericMode::Rational)
            .unwrap();
    Family {
        game,
        names: vec!["u".into(), "v".into(), "w".into()],
        ne_witness: Some(Profile(vec![0, 1, 0])),
        opt_witness: Some(Profile(vec![0, 0, 1])),
    }
}

/// Appends zero-length jobs of the game's uniform rate until the job count
/// divides the machine count. Padding ids go to the front of every priority
/// list, so wherever they are assigned they run first and finish at 0.
pub fn pad_with_dummies(game: &GameInstance) -> Result<GameInstance> {
    let class = game.classify();
    if !class.all_positive {
        return Err(GameError::ClassMismatch("positive deterioration required".into()));
    }
    let a = game.job(0).rate().clone();
    if game.jobs().iter().any(|pf| pf.rate().total_cmp(&a) != std::cmp::Ordering::Equal) {
        return Err(GameError::ClassMismatch("uniform rate required".into()));
    }
    let deficit = (game.m() - game.n() % game.m()) % game.m();
    if deficit == 0 {
        return Ok(game.clone());
    }
    let mut jobs = game.jobs().to_vec();
    for _ in 0..deficit {
        jobs.push(ProcessingFunction::positive(game.mode().zero(), a.clone())?);
    }
    let n = jobs.len();
    let machines = game
        .machines()
        .iter()
        .map(|mac| {
            let mut p: Vec<JobId> = (game.n()..n).collect();
            p.extend(mac.priority());
            Machine::new(mac.speed().clone(), p, n)
        })
        .collect::<Result<Vec<_>>>()?;
    GameInstance::new(jobs, machines, game.mode())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{self, is_nash};
    use crate::schedule::{build_schedule, total_processing};
    use crate::solvers::{list_scheduling, TieBreak};
    use crate::DEFAULT_PROFILE_BUDGET;

    #[test]
    fn no_ne2_reproduces_the_cost_table() {
        let game = gen_no_ne2();
        let expected = [
            (vec![0, 0], (Numeric::int(24), Numeric::int(27))),
            (vec![0, 1], (Numeric::int(24), Numeric::int(16))),
            (vec![1, 0], (Numeric::int(48), Numeric::int(8))),
            (vec![1, 1], (Numeric::int(22), Numeric::int(16))),
        ];
        for (assign, (cu, cv)) in expected {
            let sched = build_schedule(&game, &Profile(assign));
            assert_eq!(sched.completions[0], cu);
            assert_eq!(sched.completions[1], cv);
        }
    }

    #[test]
    fn no_ne3_without_u_has_an_equilibrium() {
        // dropping the first job leaves a stable two-player game
        let game = gen_no_ne3();
        let v = game.job(1).clone();
        let w = game.job(2).clone();
        // ids shift: v -> 0, w -> 1; machine lists keep their relative order
        let machines = vec![
            Machine::new(Numeric::int(1), vec![0, 1], 2).unwrap(),
            Machine::new(Numeric::int(1), vec![1, 0], 2).unwrap(),
        ];
        let reduced = GameInstance::new(vec![v, w], machines, NumericMode::Rational).unwrap();
        let nes = equilibrium::enumerate_ne(&reduced, DEFAULT_PROFILE_BUDGET).unwrap();
        assert!(!nes.is_empty());
        // each alone on the machine that prioritizes the other
        assert!(nes.contains(&Profile(vec![1, 0])));
    }

    #[test]
    fn poa_r_rejects_small_r() {
        assert!(matches!(
            gen_poa_r(2, &Numeric::ratio(5, 4)),
            Err(GameError::ParameterInfeasible(_))
        ));
        assert!(gen_poa_r(2, &Numeric::ratio(3, 2)).is_ok());
    }

    #[test]
    fn poa_r_witnesses_are_valid() {
        for (m, r) in [(2, Numeric::int(2)), (3, Numeric::int(5))] {
            let fam = gen_poa_r(m, &r).unwrap();
            let ne = fam.ne_witness.as_ref().unwrap();
            assert!(is_nash(&fam.game, ne).0);
            let ne_ms = build_schedule(&fam.game, ne).makespan;
            assert_eq!(ne_ms, &Numeric::int(2) * &r);
            let opt = fam.opt_witness.as_ref().unwrap();
            let opt_ms = build_schedule(&fam.game, opt).makespan;
            assert_eq!(opt_ms, Numeric::int(2));
            // the optimum is not stable: the paired unit job escapes
            assert!(!is_nash(&fam.game, opt).0);
        }
    }

    #[test]
    fn exponential_family_small_case() {
        let fam = gen_exponential(2, 2, &Numeric::int(1)).unwrap();
        assert_eq!(fam.game.n(), 7);
        // w = 16: long jobs have basic time 15
        assert_eq!(fam.game.job(0).basic(), &Numeric::int(15));
        let opt = fam.opt_witness.as_ref().unwrap();
        let sched = build_schedule(&fam.game, opt);
        assert_eq!(sched.makespan, Numeric::int(45));
        let (brute, _) =
            equilibrium::optimal_makespan(&fam.game, DEFAULT_PROFILE_BUDGET).unwrap();
        assert_eq!(brute, Numeric::int(45));
    }

    #[test]
    fn arbitrary_lb_witnesses() {
        let m = 2;
        let eps = Numeric::ratio(1, 10);
        let fam = gen_arbitrary_lb(m, &eps).unwrap();
        let ne = fam.ne_witness.as_ref().unwrap();
        assert!(is_nash(&fam.game, ne).0);
        let ne_ms = build_schedule(&fam.game, ne).makespan;
        // 3 - 1/2 - 1/10 = 12/5
        assert_eq!(ne_ms, Numeric::ratio(12, 5));
        let opt = fam.opt_witness.as_ref().unwrap();
        assert_eq!(build_schedule(&fam.game, opt).makespan, Numeric::int(1));
        let (brute, _) =
            equilibrium::optimal_makespan(&fam.game, DEFAULT_PROFILE_BUDGET).unwrap();
        assert_eq!(brute, Numeric::int(1));
    }

    #[test]
    fn global_lb_witnesses() {
        let m = 2;
        let eps = Numeric::ratio(1, 10);
        let fam = gen_global_lb(m, &eps).unwrap();
        assert!(fam.game.classify().global_list);
        let ne = fam.ne_witness.as_ref().unwrap();
        assert!(is_nash(&fam.game, ne).0);
        let ne_ms = build_schedule(&fam.game, ne).makespan;
        let opt_ms = build_schedule(&fam.game, fam.opt_witness.as_ref().unwrap()).makespan;
        // ratio is exactly 3 - 2/m - eps
        let ratio = &ne_ms / &opt_ms;
        assert_eq!(ratio, Numeric::ratio(19, 10));
        let (brute, _) =
            equilibrium::optimal_makespan(&fam.game, DEFAULT_PROFILE_BUDGET).unwrap();
        assert_eq!(brute, opt_ms);
    }

    #[test]
    fn sdr_lb_small_case_has_valid_opt_witness() {
        // a small instance of the same shape: 2 jobs per machine pair
        let fam = gen_sdr_lb(10.0, 0.009, 1111.0, 0.001, 2, 3).unwrap();
        assert_eq!(fam.game.n(), 5);
        let opt = fam.opt_witness.as_ref().unwrap();
        let sched = build_schedule(&fam.game, opt);
        // the big job alone defines the makespan
        assert!((sched.makespan.as_f64() - 1111.0).abs() < 1e-9);
    }

    #[test]
    fn sdr_lb_rejects_empty_interval() {
        assert!(gen_sdr_lb(10.0, 0.01, 1111.0, 0.001, 10, 4).is_err());
        assert!(gen_sdr_lb(10.0, 0.009, 1111.0, 0.001, 2000, 4).is_err());
    }

    #[test]
    fn sbpt_tight_numbers() {
        let fam = gen_sbpt_tight();
        let opt = build_schedule(&fam.game, fam.opt_witness.as_ref().unwrap());
        assert_eq!(opt.makespan, Numeric::int(3));
        let ne = build_schedule(&fam.game, fam.ne_witness.as_ref().unwrap());
        assert_eq!(ne.makespan, Numeric::int(5));
        assert!(is_nash(&fam.game, fam.ne_witness.as_ref().unwrap()).0);
    }

    #[test]
    fn padding_reaches_divisibility_and_changes_nothing_else() {
        let fam = gen_sbpt_tight();
        let padded = pad_with_dummies(&fam.game).unwrap();
        assert_eq!(padded.n(), 4);
        assert_eq!(padded.job(3).basic(), &Numeric::int(0));
        // already balanced games come back unchanged
        let again = pad_with_dummies(&padded).unwrap();
        assert_eq!(again.n(), 4);
        // dummies do not move the optimum
        let before = equilibrium::optimal_makespan(&fam.game, DEFAULT_PROFILE_BUDGET)
            .unwrap()
            .0;
        let after = equilibrium::optimal_makespan(&padded, DEFAULT_PROFILE_BUDGET)
            .unwrap()
            .0;
        assert_eq!(before, after);
    }

    #[test]
    fn ls_total_processing_on_global_lb_matches_witness() {
        let fam = gen_global_lb(3, &Numeric::ratio(1, 10)).unwrap();
        let ls = list_scheduling(&fam.game, TieBreak::LowestIndex).unwrap();
        let sched = build_schedule(&fam.game, &ls);
        let ne = build_schedule(&fam.game, fam.ne_witness.as_ref().unwrap());
        assert_eq!(total_processing(&sched), total_processing(&ne));
    }
}
