//! Time-dependent processing-time functions.

use std::cmp::Ordering;

use crate::error::{GameError, Result};
use crate::numeric::Numeric;

/// Direction in which a job's length changes with its start time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    /// `p(t) = b + a*t`.
    Positive,
    /// `p(t) = max(tau, b - a*t)`.
    Negative,
}

/// A job's length law `p(t)`: basic processing time `b`, deterioration
/// rate `a`, sign, and (negative sign only) the threshold `tau` below
/// which the length never drops.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessingFunction {
    basic: Numeric,
    rate: Numeric,
    sign: Sign,
    tau: Option<Numeric>,
}

impl ProcessingFunction {
    /// Fixed-length job, `p(t) = b`.
    pub fn fixed(basic: Numeric) -> Result<Self> {
        Self::positive(basic.clone(), match basic {
            Numeric::Rational(_) => Numeric::int(0),
            Numeric::Float(_) => Numeric::float(0.0),
        })
    }

    pub fn positive(basic: Numeric, rate: Numeric) -> Result<Self> {
        if basic.is_negative() {
            return Err(GameError::InvalidInstance(
                "basic processing time must be >= 0".into(),
            ));
        }
        if rate.is_negative() {
            return Err(GameError::InvalidInstance(
                "deterioration rate must be >= 0".into(),
            ));
        }
        Ok(ProcessingFunction { basic, rate, sign: Sign::Positive, tau: None })
    }

    /// A zero-rate "negative" job degenerates to a fixed-length job and is
    /// normalized to positive sign with the threshold dropped.
    pub fn negative(basic: Numeric, rate: Numeric, tau: Numeric) -> Result<Self> {
        if rate.is_negative() {
            return Err(GameError::InvalidInstance(
                "deterioration rate must be >= 0".into(),
            ));
        }
        if rate.is_zero() {
            return Self::positive(basic, rate);
        }
        if tau.is_zero() || tau.is_negative() {
            return Err(GameError::InvalidInstance(
                "threshold processing time must be > 0".into(),
            ));
        }
        if tau.total_cmp(&basic) == Ordering::Greater {
            return Err(GameError::InvalidInstance(
                "threshold must not exceed the basic processing time".into(),
            ));
        }
        Ok(ProcessingFunction { basic, rate, sign: Sign::Negative, tau: Some(tau) })
    }

    pub fn basic(&self) -> &Numeric {
        &self.basic
    }

    pub fn rate(&self) -> &Numeric {
        &self.rate
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn tau(&self) -> Option<&Numeric> {
        self.tau.as_ref()
    }

    pub fn is_fixed(&self) -> bool {
        self.rate.is_zero()
    }

    /// `p(t)`; `t` must be non-negative.
    pub fn eval(&self, t: &Numeric) -> Result<Numeric> {
        if t.is_negative() {
            return Err(GameError::Domain("start time must be >= 0".into()));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: &Numeric) -> Numeric {
        match self.sign {
            Sign::Positive => &self.basic + &(&self.rate * t),
            Sign::Negative => {
                let shrunk = &self.basic - &(&self.rate * t);
                let tau = self.tau.as_ref().expect("negative sign implies tau");
                if shrunk.total_cmp(tau) == Ordering::Less {
                    tau.clone()
                } else {
                    shrunk
                }
            }
        }
    }

    /// Completion time `c(t, s) = t + p(t)/s` on a machine of speed `s`.
    pub fn completion(&self, t: &Numeric, speed: &Numeric) -> Result<Numeric> {
        if speed.is_zero() || speed.is_negative() {
            return Err(GameError::Domain("machine speed must be > 0".into()));
        }
        let p = self.eval(t)?;
        Ok(t + &(&p / speed))
    }

    /// The start time minimizing `c(t, s)`, and whether it is unique.
    ///
    /// Growing jobs, and shrinking jobs slower than the machine, want to
    /// start at 0. A shrinking job faster than the machine wants to start
    /// exactly when its length bottoms out at `tau`. When the rate equals
    /// the speed every start in `[0, (b - tau)/a]` ties; the reported
    /// representative is the late end, where the job's remaining processing
    /// time is `tau`.
    pub fn optimal_start(&self, speed: &Numeric) -> Result<(Numeric, bool)> {
        if speed.is_zero() || speed.is_negative() {
            return Err(GameError::Domain("machine speed must be > 0".into()));
        }
        let zero = match &self.basic {
            Numeric::Rational(_) => Numeric::int(0),
            Numeric::Float(_) => Numeric::float(0.0),
        };
        match self.sign {
            Sign::Positive => Ok((zero, true)),
            Sign::Negative => {
                let tau = self.tau.as_ref().expect("negative sign implies tau");
                match self.rate.total_cmp(speed) {
                    Ordering::Less => Ok((zero, true)),
                    Ordering::Greater => {
                        Ok(((&self.basic - tau) / self.rate.clone(), true))
                    }
                    Ordering::Equal => {
                        Ok(((&self.basic - tau) / self.rate.clone(), false))
                    }
                }
            }
        }
    }

    /// Whether completion time is non-decreasing in the start time on every
    /// machine whose speed is at most... rather, given the fleet's maximum
    /// speed: positive sign always, negative sign iff `a <= s_max`.
    pub fn is_delay_averse(&self, max_speed: &Numeric) -> bool {
        match self.sign {
            Sign::Positive => true,
            Sign::Negative => self.rate.total_cmp(max_speed) != Ordering::Greater,
        }
    }

    pub fn to_mode(&self, mode: crate::numeric::NumericMode) -> ProcessingFunction {
        ProcessingFunction {
            basic: self.basic.to_mode(mode),
            rate: self.rate.to_mode(mode),
            sign: self.sign,
            tau: self.tau.as_ref().map(|t| t.to_mode(mode)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neg(b: i64, a_num: i64, a_den: i64, tau: i64) -> ProcessingFunction {
        ProcessingFunction::negative(
            Numeric::int(b),
            Numeric::ratio(a_num, a_den),
            Numeric::int(tau),
        )
        .unwrap()
    }

    #[test]
    fn eval_matches_known_points() {
        // p(t) = max(24 - 1.5t, 3)
        let pu = neg(24, 3, 2, 3);
        assert_eq!(pu.eval(&Numeric::int(0)).unwrap(), Numeric::int(24));
        // p(t) = max(8 - 1.5t, 3) floors at tau for t = 16
        let pv = neg(8, 3, 2, 3);
        assert_eq!(pv.eval(&Numeric::int(16)).unwrap(), Numeric::int(3));
        // zero rate: constant
        let fixed = ProcessingFunction::fixed(Numeric::int(7)).unwrap();
        assert_eq!(fixed.eval(&Numeric::int(1000)).unwrap(), Numeric::int(7));
    }

    #[test]
    fn eval_rejects_negative_time() {
        let pf = ProcessingFunction::fixed(Numeric::int(1)).unwrap();
        assert!(matches!(pf.eval(&Numeric::int(-1)), Err(GameError::Domain(_))));
    }

    #[test]
    fn completion_matches_known_points() {
        let pv = neg(8, 3, 2, 3);
        let c = pv.completion(&Numeric::int(16), &Numeric::ratio(1, 2)).unwrap();
        assert_eq!(c, Numeric::int(22));

        let pu = neg(24, 3, 2, 3);
        let c = pu.completion(&Numeric::int(0), &Numeric::ratio(1, 2)).unwrap();
        assert_eq!(c, Numeric::int(48));

        let any = ProcessingFunction::positive(Numeric::int(5), Numeric::int(2)).unwrap();
        let c = any.completion(&Numeric::int(0), &Numeric::int(1)).unwrap();
        assert_eq!(c, any.eval(&Numeric::int(0)).unwrap());

        assert!(any.completion(&Numeric::int(0), &Numeric::int(0)).is_err());
    }

    #[test]
    fn optimal_start_cases() {
        // a > s: start where the length bottoms out, (24 - 3) / 1.5 = 14
        let pf = neg(24, 3, 2, 3);
        let (t, unique) = pf.optimal_start(&Numeric::int(1)).unwrap();
        assert_eq!(t, Numeric::int(14));
        assert!(unique);

        // positive rate: t = 0
        let pos = ProcessingFunction::positive(Numeric::int(3), Numeric::int(1)).unwrap();
        let (t, unique) = pos.optimal_start(&Numeric::int(1)).unwrap();
        assert_eq!(t, Numeric::int(0));
        assert!(unique);

        // a < s: t = 0
        let slow = ProcessingFunction::negative(
            Numeric::int(5),
            Numeric::ratio(1, 5),
            Numeric::ratio(1, 5),
        )
        .unwrap();
        let (t, unique) = slow.optimal_start(&Numeric::int(1)).unwrap();
        assert_eq!(t, Numeric::int(0));
        assert!(unique);

        // a = s: any start in [0, (b - tau)/a] ties; not unique
        let edge = neg(4, 1, 1, 1);
        let (t, unique) = edge.optimal_start(&Numeric::int(1)).unwrap();
        assert_eq!(t, Numeric::int(3));
        assert!(!unique);
    }

    #[test]
    fn zero_rate_negative_normalizes_to_fixed() {
        let pf = ProcessingFunction::negative(
            Numeric::int(5),
            Numeric::int(0),
            Numeric::int(1),
        )
        .unwrap();
        assert_eq!(pf.sign(), Sign::Positive);
        assert!(pf.tau().is_none());
        assert!(pf.is_fixed());
    }

    #[test]
    fn invalid_thresholds_rejected() {
        let r = ProcessingFunction::negative(Numeric::int(5), Numeric::int(1), Numeric::int(6));
        assert!(r.is_err());
        let r = ProcessingFunction::negative(Numeric::int(5), Numeric::int(1), Numeric::int(0));
        assert!(r.is_err());
    }

    #[test]
    fn shrinking_job_sits_at_tau_past_the_knee() {
        let pf = neg(24, 3, 2, 3);
        // knee at (b - tau)/a = 14
        for t in [14, 15, 100] {
            assert_eq!(pf.eval(&Numeric::int(t)).unwrap(), Numeric::int(3));
        }
    }

    #[test]
    fn completion_monotonicity_by_class() {
        let one = Numeric::int(1);
        // delay-averse shrinking job (a <= s): non-decreasing completion
        let da = neg(8, 1, 2, 1);
        let mut prev = da.completion(&Numeric::int(0), &one).unwrap();
        for t in 1..20 {
            let c = da.completion(&Numeric::ratio(t, 2), &one).unwrap();
            assert!(c.total_cmp(&prev) != Ordering::Less);
            prev = c;
        }
        // a > s: strictly decreasing before the knee
        let fast = neg(24, 3, 2, 3);
        let mut prev = fast.completion(&Numeric::int(0), &one).unwrap();
        for t in 1..14 {
            let c = fast.completion(&Numeric::int(t), &one).unwrap();
            assert!(c.total_cmp(&prev) == Ordering::Less, "t={t}");
            prev = c;
        }
    }
}
