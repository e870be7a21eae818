use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of a check. A pass over finitely many probes is only evidence; a
/// failure comes with a witness and is conclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "PASS(probe-limited)")]
    PassProbeLimited,
    #[serde(rename = "FAIL(certified)")]
    FailCertified,
    #[serde(rename = "EXHAUSTED")]
    Exhausted,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::PassProbeLimited)
    }

    pub fn is_fail(self) -> bool {
        self == Verdict::FailCertified
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::PassProbeLimited => "PASS(probe-limited)",
            Verdict::FailCertified => "FAIL(certified)",
            Verdict::Exhausted => "EXHAUSTED",
        };
        f.write_str(s)
    }
}
