//! Seeded random in-class instance sampling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GameError, Result};
use crate::game::{GameClass, GameInstance, Machine};
use crate::job::ProcessingFunction;
use crate::numeric::{Numeric, NumericMode};
use crate::JobId;

/// Magnitude bounds and sampling knobs.
#[derive(Clone, Copy, Debug)]
pub struct SampleParams {
    /// Basic processing times are drawn from (0, max_b] on a 1/denom grid.
    pub max_b: i64,
    pub denom: i64,
    /// Force one deterioration rate across all jobs.
    pub uniform_rate: bool,
    /// Force one threshold across all shrinking jobs.
    pub uniform_tau: bool,
    /// Cap rates so no shrinking job can ever hit its threshold, in any
    /// schedule of the instance.
    pub no_tau_reach: bool,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            max_b: 12,
            denom: 4,
            uniform_rate: false,
            uniform_tau: false,
            no_tau_reach: false,
        }
    }
}

/// Draws a reproducible instance whose [`GameClass`] flags include every
/// flag set in `spec`. Flags left false are unconstrained.
pub fn sample_random(
    spec: &GameClass,
    n: usize,
    m: usize,
    seed: u64,
    params: &SampleParams,
) -> Result<GameInstance> {
    if n == 0 || m == 0 {
        return Err(GameError::InfeasibleSpec("need n >= 1 and m >= 1".into()));
    }
    if spec.two_machines && m != 2 {
        return Err(GameError::InfeasibleSpec("two_machines requires m = 2".into()));
    }
    if spec.all_positive && spec.all_negative {
        return Err(GameError::InfeasibleSpec(
            "jobs cannot be all positive and all negative".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = params.denom.max(1);

    // machine 0 always has the maximum speed 1, so delay-averse sampling
    // only needs rates <= 1
    let speeds: Vec<Numeric> = if spec.identical_speeds {
        vec![Numeric::int(1); m]
    } else {
        let mut s = vec![Numeric::int(1)];
        for _ in 1..m {
            s.push(Numeric::ratio(rng.gen_range(1..=q), q));
        }
        s
    };

    let draw_b = |rng: &mut ChaCha8Rng| -> Numeric {
        Numeric::ratio(rng.gen_range(q..=params.max_b.max(1) * q), q)
    };
    let uniform_sign: Option<bool> = if spec.all_positive {
        Some(true)
    } else if spec.all_negative {
        Some(false)
    } else {
        None
    };

    // draw the shared pieces first so uniform flags stay uniform
    let shared_rate_pos = Numeric::ratio(rng.gen_range(0..=2 * q), q);
    let shared_rate_neg = Numeric::ratio(rng.gen_range(1..=q), q);
    let shared_tau_scale = rng.gen_range(1..=q);

    let mut proto: Vec<(bool, Numeric)> = Vec::with_capacity(n); // (positive?, b)
    for _ in 0..n {
        let positive = uniform_sign.unwrap_or_else(|| rng.gen_bool(0.5));
        proto.push((positive, draw_b(&mut rng)));
    }
    if spec.symmetric {
        let first = proto[0].clone();
        proto = vec![first; n];
    }

    // total-work horizon used by the no-tau-reach cap; shrinking jobs never
    // run longer than their basic time, so sum(b)/s_min bounds every start
    let mut horizon = Numeric::int(0);
    for (_, b) in &proto {
        horizon = &horizon + b;
    }
    let s_min = speeds
        .iter()
        .min_by(|a, b| a.total_cmp(b))
        .expect("m >= 1")
        .clone();
    horizon = &horizon / &s_min;

    let mut jobs: Vec<ProcessingFunction> = Vec::with_capacity(n);
    let mut sym_pf: Option<ProcessingFunction> = None;
    for (positive, b) in proto {
        if let (true, Some(pf)) = (spec.symmetric, &sym_pf) {
            jobs.push(pf.clone());
            continue;
        }
        let pf = if positive {
            let rate = if params.uniform_rate {
                shared_rate_pos.clone()
            } else {
                Numeric::ratio(rng.gen_range(0..=2 * q), q)
            };
            ProcessingFunction::positive(b, rate)?
        } else {
            let tau_scale = if params.uniform_tau {
                shared_tau_scale
            } else {
                rng.gen_range(1..=q)
            };
            // tau <= b/4 keeps thresholds comfortably below basic times
            let tau = &b * &Numeric::ratio(tau_scale, 4 * q);
            let rate = if params.no_tau_reach {
                // strict a < (b - tau)/horizon keeps p(t) above tau forever
                let cap = &(&b - &tau) / &horizon;
                let k = rng.gen_range(1..=q);
                let mut r = &cap * &Numeric::ratio(k, q + 1);
                let one = Numeric::int(1);
                if r.total_cmp(&one) == std::cmp::Ordering::Greater {
                    r = Numeric::ratio(rng.gen_range(1..=q), q);
                }
                r
            } else if spec.delay_averse {
                Numeric::ratio(rng.gen_range(1..=q), q)
            } else if params.uniform_rate {
                shared_rate_neg.clone()
            } else {
                Numeric::ratio(rng.gen_range(1..=2 * q), q)
            };
            ProcessingFunction::negative(b, rate, tau)?
        };
        if spec.symmetric {
            sym_pf = Some(pf.clone());
        }
        jobs.push(pf);
    }

    let base: Vec<JobId> = (0..n).collect();
    let shared_priority = {
        let mut p = base.clone();
        p.shuffle(&mut rng);
        p
    };
    let machines = (0..m)
        .map(|j| {
            let priority = if spec.global_list {
                shared_priority.clone()
            } else {
                let mut p = base.clone();
                p.shuffle(&mut rng);
                p
            };
            Machine::new(speeds[j].clone(), priority, n)
        })
        .collect::<Result<Vec<_>>>()?;

    let game = GameInstance::new(jobs, machines, NumericMode::Rational)?;
    let got = game.classify();
    let sub = |want: bool, have: bool| !want || have;
    let ok = sub(spec.symmetric, got.symmetric)
        && sub(spec.two_machines, got.two_machines)
        && sub(spec.identical_speeds, got.identical_speeds)
        && sub(spec.global_list, got.global_list)
        && sub(spec.all_positive, got.all_positive)
        && sub(spec.all_negative, got.all_negative)
        && sub(spec.delay_averse, got.delay_averse);
    if !ok {
        return Err(GameError::InfeasibleSpec(format!(
            "sampled instance missed the requested class: want {spec:?}, got {got:?}"
        )));
    }
    Ok(game)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::job::Sign;

    fn class(f: impl Fn(&mut GameClass)) -> GameClass {
        let mut c = GameClass::default();
        f(&mut c);
        c
    }

    #[test]
    fn same_seed_same_instance() {
        let spec = class(|c| {
            c.all_negative = true;
            c.delay_averse = true;
            c.identical_speeds = true;
        });
        let a = sample_random(&spec, 6, 2, 99, &SampleParams::default()).unwrap();
        let b = sample_random(&spec, 6, 2, 99, &SampleParams::default()).unwrap();
        assert_eq!(a.jobs(), b.jobs());
        for j in 0..a.m() {
            assert_eq!(a.machine(j).priority(), b.machine(j).priority());
        }
    }

    #[test]
    fn symmetric_spec_yields_one_function() {
        let spec = class(|c| c.symmetric = true);
        let game = sample_random(&spec, 5, 2, 1, &SampleParams::default()).unwrap();
        assert!(game.classify().symmetric);
        let first = game.job(0).clone();
        assert!(game.jobs().iter().all(|pf| *pf == first));
    }

    #[test]
    fn negative_delay_averse_spec_holds() {
        let spec = class(|c| {
            c.all_negative = true;
            c.delay_averse = true;
            c.identical_speeds = true;
        });
        for seed in 0..20 {
            let game = sample_random(&spec, 7, 3, seed, &SampleParams::default()).unwrap();
            let got = game.classify();
            assert!(got.all_negative && got.delay_averse && got.identical_speeds);
            assert!(game.jobs().iter().all(|pf| pf.sign() == Sign::Negative));
        }
    }

    #[test]
    fn no_tau_reach_cap_holds_at_the_horizon() {
        let spec = class(|c| {
            c.all_negative = true;
            c.delay_averse = true;
            c.identical_speeds = true;
        });
        let params = SampleParams { no_tau_reach: true, ..SampleParams::default() };
        for seed in 0..20 {
            let game = sample_random(&spec, 6, 2, seed, &params).unwrap();
            let mut horizon = Numeric::int(0);
            for pf in game.jobs() {
                horizon = &horizon + pf.basic();
            }
            for pf in game.jobs() {
                let at_horizon = pf.eval(&horizon).unwrap();
                assert!(
                    at_horizon.total_cmp(pf.tau().unwrap()) == std::cmp::Ordering::Greater,
                    "job saturates within the horizon"
                );
            }
        }
    }

    #[test]
    fn infeasible_specs_are_rejected() {
        let both = class(|c| {
            c.all_positive = true;
            c.all_negative = true;
        });
        assert!(sample_random(&both, 3, 2, 0, &SampleParams::default()).is_err());
        let two = class(|c| c.two_machines = true);
        assert!(sample_random(&two, 3, 3, 0, &SampleParams::default()).is_err());
    }
}
