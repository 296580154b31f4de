//! Three-valued verdicts for bounded decision procedures.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriBool {
    Yes,
    No,
    Unknown,
}

impl TriBool {
    pub fn from_bool(b: bool) -> TriBool {
        if b {
            TriBool::Yes
        } else {
            TriBool::No
        }
    }

    /// Conjunction: any `No` wins, then any `Unknown`.
    pub fn and(self, other: TriBool) -> TriBool {
        match (self, other) {
            (TriBool::No, _) | (_, TriBool::No) => TriBool::No,
            (TriBool::Unknown, _) | (_, TriBool::Unknown) => TriBool::Unknown,
            _ => TriBool::Yes,
        }
    }

    pub fn all<I: IntoIterator<Item = TriBool>>(it: I) -> TriBool {
        it.into_iter().fold(TriBool::Yes, TriBool::and)
    }

    pub fn is_yes(self) -> bool {
        self == TriBool::Yes
    }

    pub fn is_no(self) -> bool {
        self == TriBool::No
    }

    /// CLI exit code: 0 yes, 1 no, 2 unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            TriBool::Yes => 0,
            TriBool::No => 1,
            TriBool::Unknown => 2,
        }
    }
}

impl fmt::Display for TriBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriBool::Yes => "yes",
            TriBool::No => "no",
            TriBool::Unknown => "unknown",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::TriBool::*;
    use super::*;

    #[test]
    fn conjunction_table() {
        assert_eq!(TriBool::all([]), Yes);
        assert_eq!(Yes.and(Unknown), Unknown);
        assert_eq!(Unknown.and(No), No);
        assert_eq!(TriBool::all([Yes, Yes]), Yes);
    }
}
