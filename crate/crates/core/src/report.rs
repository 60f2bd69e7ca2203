//! Outcome records shared by every verification routine.

use serde::Serialize;
use serde_json::Value;

/// One named check: pass/fail, counters and an optional failure witness.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    /// The geometric statement the check exercises.
    pub claim: String,
    pub passed: bool,
    pub stats: serde_json::Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    pub fn new(name: &str, claim: &str) -> Self {
        Check {
            name: name.to_string(),
            claim: claim.to_string(),
            passed: true,
            stats: serde_json::Map::new(),
            witness: None,
        }
    }

    pub fn stat(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.stats.insert(key.to_string(), v.into());
        self
    }

    pub fn set_stat(&mut self, key: &str, v: impl Into<Value>) {
        self.stats.insert(key.to_string(), v.into());
    }

    /// Record a failure; only the first witness is kept.
    pub fn fail(&mut self, witness: Value) {
        self.passed = false;
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    pub fn require(&mut self, cond: bool, witness: impl FnOnce() -> Value) {
        if !cond {
            self.fail(witness());
        }
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.claim
        )
    }
}
