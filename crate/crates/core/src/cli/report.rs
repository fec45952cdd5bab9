use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witness: Value,
    pub max_residual: Option<f64>,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool) -> Self {
        Check { name: name.into(), status: Status::from_bool(ok), witness: Value::Null, max_residual: None }
    }

    pub fn skipped(name: impl Into<String>, why: &str) -> Self {
        Check { name: name.into(), status: Status::Skipped, witness: json!({ "reason": why }), max_residual: None }
    }

    pub fn failed(name: impl Into<String>, error: impl std::fmt::Display) -> Self {
        Check { name: name.into(), status: Status::Fail, witness: json!({ "error": error.to_string() }), max_residual: None }
    }

    pub fn witness(mut self, w: Value) -> Self {
        self.witness = w;
        self
    }

    /// Non-finite residuals are dropped.
    pub fn residual(mut self, r: f64) -> Self {
        self.max_residual = r.is_finite().then_some(r);
        self
    }
}

#[derive(Clone, Debug)]
pub struct Input {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

impl Input {
    pub fn new(role: &str, path: &str, bytes: &[u8]) -> Self {
        Input { role: role.into(), path: path.into(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

/// Everything a subcommand produced. Timing is kept out of the JSON so that
/// reports are byte-identical across runs.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub args: Map<String, Value>,
    pub inputs: Vec<Input>,
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    pub fn arg(&mut self, k: &str, v: impl Into<Value>) {
        self.args.insert(k.into(), v.into());
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_value(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "status": c.status.as_str(),
                    "witness": c.witness,
                    "max_residual": c.max_residual.map(crate::json::float_value),
                })
            })
            .collect();
        let inputs: Vec<Value> =
            self.inputs.iter().map(|i| json!({ "role": i.role, "path": i.path, "sha256": i.sha256 })).collect();
        json!({
            "command": self.command,
            "args": self.args,
            "inputs": inputs,
            "checks": checks,
            "data": self.data,
            "status": if self.passed() { "pass" } else { "fail" },
        })
    }

    /// Fixed-width summary, one row per check.
    pub fn table(&self, elapsed: std::time::Duration) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<36} {:<8} {:>12}", "check", "status", "max_residual");
        for c in &self.checks {
            let r = c.max_residual.map_or("-".to_string(), |r| format!("{r:.3e}"));
            let _ = writeln!(s, "{:<36} {:<8} {:>12}", c.name, c.status.as_str(), r);
        }
        for c in self.checks.iter().filter(|c| c.status == Status::Fail) {
            if let Some(e) = c.witness.get("error").and_then(Value::as_str) {
                let _ = writeln!(s, "  {}: {e}", c.name);
            }
        }
        let _ = writeln!(
            s,
            "{} {}: {} checks, elapsed {:.3} s",
            self.command,
            if self.passed() { "pass" } else { "fail" },
            self.checks.len(),
            elapsed.as_secs_f64()
        );
        s
    }
}
