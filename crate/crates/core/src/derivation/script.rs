use serde::{Deserialize, Serialize};

use crate::rules::{RuleApplication, Step};

/// A replayable derivation. `base` names a corpus program or holds inline
/// program text; `expected_final` names a corpus program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    pub name: String,
    pub base: String,
    pub steps: Vec<Step>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_final: Option<String>,
}

impl Script {
    pub fn from_json(text: &str) -> Result<Script, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Pretty JSON with a trailing newline; `from_json(s.to_json()) == s`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("script serializes");
        s.push('\n');
        s
    }
}

/// Result of replaying a script.
#[derive(Debug, Clone, Serialize)]
pub struct Replay {
    #[serde(serialize_with = "ser_program")]
    pub final_program: crate::kernel::Program,
    pub log: Vec<RuleApplication>,
    pub matches_expected: Option<bool>,
}

fn ser_program<S: serde::Serializer>(p: &crate::kernel::Program, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&crate::kernel::program_to_string(p))
}
