//! Machine-readable reports: deterministic JSON with exact values and
//! 12-significant-digit decimal renderings.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use tdsched::schedule::Schedule;
use tdsched::Numeric;

use crate::instance::InstanceFile;

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub instance_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Value,
}

impl Report {
    pub fn new(command: &str, digest: &str, seed: Option<u64>, results: Value) -> Report {
        Report {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            instance_digest: digest.into(),
            seed,
            results,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SHA-256 of the canonical serialized instance.
pub fn instance_digest(file: &InstanceFile) -> String {
    let canonical = serde_json::to_string(file).expect("instance serializes");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    hex::encode(hasher.finalize())
}

/// 12 significant digits, scientific notation; fixed width keeps reports
/// byte-for-byte reproducible.
pub fn decimal12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Exact representation plus a decimal rendering.
pub fn dual(v: &Numeric) -> Value {
    json!({ "exact": v.to_string(), "decimal": decimal12(v.as_f64()) })
}

pub fn schedule_json(sched: &Schedule, names: Option<&[String]>) -> Value {
    let jobs: Vec<Value> = (0..sched.starts.len())
        .map(|i| {
            let mut obj = serde_json::Map::new();
            obj.insert("id".into(), json!(i));
            if let Some(ns) = names {
                obj.insert("name".into(), json!(ns[i]));
            }
            obj.insert("start".into(), json!(sched.starts[i].to_string()));
            obj.insert("duration".into(), json!(sched.durations[i].to_string()));
            obj.insert("completion".into(), json!(sched.completions[i].to_string()));
            Value::Object(obj)
        })
        .collect();
    let machines: Vec<Value> = sched
        .sequences
        .iter()
        .enumerate()
        .map(|(j, seq)| {
            json!({
                "id": j,
                "jobs": seq,
                "load": sched.loads[j].to_string(),
            })
        })
        .collect();
    json!({
        "jobs": jobs,
        "machines": machines,
        "makespan": dual(&sched.makespan),
    })
}
