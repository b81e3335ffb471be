//! Cross-module invariants checked on randomized instances.

use proptest::prelude::*;

use tdsched::equilibrium::{
    best_response, brd, enumerate_ne, enumerate_ne_via_ls, is_nash, optimal_makespan,
    ActivationPolicy, BrdOutcome,
};
use tdsched::generators::{sample_random, SampleParams};
use tdsched::schedule::{build_schedule, total_processing, Profile};
use tdsched::{GameClass, GameInstance, Numeric, NumericMode, ProcessingFunction};

fn class(f: impl Fn(&mut GameClass)) -> GameClass {
    let mut c = GameClass::default();
    f(&mut c);
    c
}

fn all_profiles(game: &GameInstance) -> impl Iterator<Item = Profile> + '_ {
    let (n, m) = (game.n(), game.m());
    (0..(m as u64).pow(n as u32)).map(move |mut idx| {
        let mut assignment = vec![0usize; n];
        for slot in assignment.iter_mut() {
            *slot = (idx % m as u64) as usize;
            idx /= m as u64;
        }
        Profile(assignment)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Rational and float backends agree on evaluation and completion to
    // 1e-6 relative error for moderate magnitudes.
    #[test]
    fn float_mode_tracks_rational_mode(
        b in 1i64..1_000_000,
        a_num in 0i64..200,
        tau_num in 1i64..100,
        t in 0i64..1_000_000,
        s_num in 1i64..8,
        negative in any::<bool>(),
    ) {
        let b_r = Numeric::int(b);
        let a_r = Numeric::ratio(a_num, 100);
        let pf_r = if negative {
            let tau = &b_r * &Numeric::ratio(tau_num, 200);
            ProcessingFunction::negative(b_r.clone(), a_r.clone(), tau).unwrap()
        } else {
            ProcessingFunction::positive(b_r.clone(), a_r.clone()).unwrap()
        };
        let mode_f = NumericMode::float_default();
        let pf_f = pf_r.to_mode(mode_f);
        let t_r = Numeric::int(t);
        let s_r = Numeric::ratio(s_num, 2);
        let exact = pf_r.completion(&t_r, &s_r).unwrap().as_f64();
        let approx = pf_f
            .completion(&t_r.to_mode(mode_f), &s_r.to_mode(mode_f))
            .unwrap()
            .as_f64();
        let denom = exact.abs().max(1.0);
        prop_assert!(((exact - approx) / denom).abs() < 1e-6);
    }

    // Total processing equals the speed-weighted sum of machine loads.
    #[test]
    fn total_processing_is_speed_weighted_load(seed in 0u64..500, n in 2usize..7, m in 2usize..4) {
        let spec = class(|c| c.delay_averse = true);
        let game = sample_random(&spec, n, m, seed, &SampleParams::default()).unwrap();
        let profile = Profile((0..n).map(|i| i % m).collect());
        let sched = build_schedule(&game, &profile);
        let mut weighted = Numeric::int(0);
        for (j, load) in sched.loads.iter().enumerate() {
            weighted = &weighted + &(load * game.machine(j).speed());
        }
        prop_assert_eq!(total_processing(&sched), weighted);
    }

    // A profile is stable exactly when every job's best response already
    // costs what it pays.
    #[test]
    fn stability_is_a_best_response_fixed_point(seed in 0u64..400, n in 2usize..6, m in 2usize..4) {
        let game = sample_random(&GameClass::default(), n, m, seed, &SampleParams::default())
            .unwrap();
        let profile = Profile((0..n).map(|i| (i * 7 + seed as usize) % m).collect());
        let sched = build_schedule(&game, &profile);
        let (stable, witness) = is_nash(&game, &profile);
        let fixed_point = (0..n).all(|job| {
            let (_, cost) = best_response(&game, &profile, job);
            game.mode().cmp(&cost, &sched.completions[job]) == std::cmp::Ordering::Equal
        });
        prop_assert_eq!(stable, fixed_point);
        if let Some(d) = witness {
            prop_assert!(game.mode().lt(&d.new_cost, &d.old_cost));
        }
    }

    // On global-list games the branching list-scheduler enumerates exactly
    // the equilibria that brute force finds.
    #[test]
    fn ls_outcomes_are_exactly_the_equilibria(seed in 0u64..300, n in 2usize..6, m in 2usize..3) {
        let spec = class(|c| c.global_list = true);
        let game = sample_random(&spec, n, m, seed, &SampleParams::default()).unwrap();
        let brute = enumerate_ne(&game, 1_000_000).unwrap();
        let by_ls = enumerate_ne_via_ls(&game, 1_000_000).unwrap();
        prop_assert_eq!(brute, by_ls);
    }

    // Deterministic dynamics end, one way or the other, within the state
    // budget n * m^n.
    #[test]
    fn deterministic_dynamics_always_terminate(seed in 0u64..200, n in 2usize..6, m in 2usize..3) {
        let game = sample_random(&GameClass::default(), n, m, seed, &SampleParams::default())
            .unwrap();
        let initial = Profile(vec![0; n]);
        let bound = n * (m as usize).pow(n as u32) + 1;
        for policy in [
            ActivationPolicy::RoundRobin,
            ActivationPolicy::LowestIndexDeviator,
            ActivationPolicy::MaxGain,
        ] {
            let outcome = brd(&game, &initial, policy, bound).unwrap();
            if let BrdOutcome::Converged { profile, .. } = outcome {
                prop_assert!(is_nash(&game, &profile).0);
            }
        }
    }

    // All equilibria of a symmetric game share one sorted cost vector.
    #[test]
    fn symmetric_equilibria_share_their_cost_vector(seed in 0u64..200, n in 2usize..7, m in 2usize..4) {
        let spec = class(|c| c.symmetric = true);
        let game = sample_random(&spec, n, m, seed, &SampleParams::default()).unwrap();
        let nes = enumerate_ne(&game, 1_000_000).unwrap();
        prop_assert!(!nes.is_empty());
        let costs_of = |p: &Profile| {
            let sched = build_schedule(&game, p);
            let mut c: Vec<Numeric> = sched.completions;
            c.sort_by(|a, b| a.total_cmp(b));
            c
        };
        let first = costs_of(&nes[0]);
        for ne in &nes[1..] {
            prop_assert_eq!(&costs_of(ne), &first);
        }
    }

    // With a global list, identical unit-speed machines, and delay-averse
    // shrinking jobs, no profile's total processing exceeds (2m - 1) * OPT.
    #[test]
    fn global_negative_total_processing_bound(seed in 0u64..120, n in 2usize..6, m in 2usize..3) {
        let spec = class(|c| {
            c.global_list = true;
            c.identical_speeds = true;
            c.all_negative = true;
            c.delay_averse = true;
        });
        let game = sample_random(&spec, n, m, seed, &SampleParams::default()).unwrap();
        let (opt, _) = optimal_makespan(&game, 1_000_000).unwrap();
        let bound = &Numeric::int(2 * m as i64 - 1) * &opt;
        for profile in all_profiles(&game) {
            let sched = build_schedule(&game, &profile);
            let total = total_processing(&sched);
            prop_assert!(
                total.total_cmp(&bound) != std::cmp::Ordering::Greater,
                "total {} exceeds (2m-1) OPT {}",
                total,
                bound
            );
        }
    }
}
