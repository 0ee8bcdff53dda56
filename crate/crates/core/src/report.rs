//! Check records shared by the verification routines and the CLI.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Combine verdicts: any failure fails, otherwise any undecided is undecided.
    pub fn and(self, o: Verdict) -> Verdict {
        match (self, o) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Undecided, _) | (_, Verdict::Undecided) => Verdict::Undecided,
            _ => Verdict::Pass,
        }
    }
}

/// One verified statement. `anchor` names the mathematical claim being
/// checked so a failure can be traced back to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    #[serde(rename = "paper_anchor")]
    pub anchor: String,
    pub verdict: Verdict,
    pub data: Value,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, verdict: Verdict, data: Value) -> Self {
        CheckRecord { id: id.into(), anchor: anchor.into(), verdict, data }
    }

    /// Record for a check that could not run to completion.
    pub fn from_error(id: impl Into<String>, anchor: impl Into<String>, err: &Error) -> Self {
        let verdict = match err {
            Error::Undecided { .. } => Verdict::Undecided,
            _ => Verdict::Fail,
        };
        CheckRecord::new(id, anchor, verdict, serde_json::json!({ "error": err.to_string() }))
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
