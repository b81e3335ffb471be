//! On-disk instance format.
//!
//! Instances are JSON documents. In rational mode every number is encoded
//! as a string (`"24"`, `"3/2"`, `"0.009"`) so exact values survive the
//! round trip; in float mode numbers are plain JSON numbers.

use serde::{Deserialize, Serialize};

use tdsched::{
    GameError, GameInstance, Machine, Numeric, NumericMode, ProcessingFunction, Sign,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberRepr {
    Text(String),
    Num(f64),
}

impl NumberRepr {
    fn to_numeric(&self, mode: NumericMode, field: &str) -> Result<Numeric, GameError> {
        match (mode, self) {
            (NumericMode::Rational, NumberRepr::Text(s)) => Numeric::parse_rational(s),
            (NumericMode::Rational, NumberRepr::Num(x)) => {
                if x.fract() == 0.0 {
                    Ok(Numeric::int(*x as i64))
                } else {
                    Err(GameError::Domain(format!(
                        "field {field}: non-integer literal {x} in rational mode; \
                         encode it as a string like \"{x}\""
                    )))
                }
            }
            (NumericMode::Float { .. }, NumberRepr::Num(x)) => Ok(Numeric::float(*x)),
            (NumericMode::Float { .. }, NumberRepr::Text(s)) => s
                .parse::<f64>()
                .map(Numeric::float)
                .or_else(|_| Ok(Numeric::parse_rational(s)?.to_mode(mode)))
                .map_err(|_: GameError| {
                    GameError::Domain(format!("field {field}: cannot parse number {s:?}"))
                }),
        }
    }

    fn from_numeric(v: &Numeric) -> NumberRepr {
        match v {
            Numeric::Rational(_) => NumberRepr::Text(v.to_string()),
            Numeric::Float(x) => NumberRepr::Num(*x),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JobEntry {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub b: NumberRepr,
    pub a: NumberRepr,
    pub sign: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<NumberRepr>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MachineEntry {
    pub id: usize,
    pub speed: NumberRepr,
    pub priority: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub jobs: Vec<JobEntry>,
    pub machines: Vec<MachineEntry>,
    /// `"rational"` or `"float"`.
    pub numeric_mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl InstanceFile {
    pub fn mode(&self, tol: f64) -> Result<NumericMode, GameError> {
        match self.numeric_mode.as_str() {
            "rational" => Ok(NumericMode::Rational),
            "float" => Ok(NumericMode::Float { tol }),
            other => Err(GameError::InvalidInstance(format!(
                "numeric_mode must be \"rational\" or \"float\", got {other:?}"
            ))),
        }
    }

    /// Builds the in-memory game, checking id density and field validity.
    pub fn to_game(&self, tol: f64) -> Result<GameInstance, GameError> {
        let mode = self.mode(tol)?;
        let n = self.jobs.len();
        let mut jobs: Vec<Option<ProcessingFunction>> = vec![None; n];
        for entry in &self.jobs {
            if entry.id >= n || jobs[entry.id].is_some() {
                return Err(GameError::InvalidInstance(format!(
                    "job ids must be unique and dense 0..{n}; offending id {}",
                    entry.id
                )));
            }
            let b = entry.b.to_numeric(mode, "b")?;
            let a = entry.a.to_numeric(mode, "a")?;
            let pf = match entry.sign {
                1 => ProcessingFunction::positive(b, a)?,
                -1 => {
                    let tau = entry
                        .tau
                        .as_ref()
                        .ok_or_else(|| {
                            GameError::InvalidInstance(format!(
                                "job {}: sign -1 requires tau",
                                entry.id
                            ))
                        })?
                        .to_numeric(mode, "tau")?;
                    ProcessingFunction::negative(b, a, tau)?
                }
                s => {
                    return Err(GameError::InvalidInstance(format!(
                        "job {}: sign must be 1 or -1, got {s}",
                        entry.id
                    )))
                }
            };
            jobs[entry.id] = Some(pf);
        }
        let m = self.machines.len();
        let mut machines: Vec<Option<Machine>> = vec![None; m];
        for entry in &self.machines {
            if entry.id >= m || machines[entry.id].is_some() {
                return Err(GameError::InvalidInstance(format!(
                    "machine ids must be unique and dense 0..{m}; offending id {}",
                    entry.id
                )));
            }
            let speed = entry.speed.to_numeric(mode, "speed")?;
            machines[entry.id] = Some(Machine::new(speed, entry.priority.clone(), n)?);
        }
        GameInstance::new(
            jobs.into_iter().map(|j| j.expect("dense ids")).collect(),
            machines.into_iter().map(|mc| mc.expect("dense ids")).collect(),
            mode,
        )
    }

    /// Serializes a game, optionally with display names and metadata.
    pub fn from_game(
        game: &GameInstance,
        names: Option<&[String]>,
        meta: Option<serde_json::Value>,
    ) -> InstanceFile {
        let jobs = game
            .jobs()
            .iter()
            .enumerate()
            .map(|(id, pf)| JobEntry {
                id,
                name: names.map(|ns| ns[id].clone()),
                b: NumberRepr::from_numeric(pf.basic()),
                a: NumberRepr::from_numeric(pf.rate()),
                sign: match pf.sign() {
                    Sign::Positive => 1,
                    Sign::Negative => -1,
                },
                tau: pf.tau().map(NumberRepr::from_numeric),
            })
            .collect();
        let machines = game
            .machines()
            .iter()
            .enumerate()
            .map(|(id, mac)| MachineEntry {
                id,
                speed: NumberRepr::from_numeric(mac.speed()),
                priority: mac.priority().to_vec(),
            })
            .collect();
        InstanceFile {
            jobs,
            machines,
            numeric_mode: match game.mode() {
                NumericMode::Rational => "rational".into(),
                NumericMode::Float { .. } => "float".into(),
            },
            meta,
        }
    }

    pub fn names(&self) -> Option<Vec<String>> {
        if self.jobs.iter().all(|j| j.name.is_some()) {
            Some(self.jobs.iter().map(|j| j.name.clone().unwrap()).collect())
        } else {
            None
        }
    }
}
