use serde::{Deserialize, Serialize};

/// Three-valued truth: decisions that depend on coefficients beyond the
/// known truncation order come back `Indeterminate` instead of guessed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "value", content = "reason", rename_all = "lowercase")]
pub enum Verdict3 {
    True,
    False,
    Indeterminate(String),
}

impl Verdict3 {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict3::True
        } else {
            Verdict3::False
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Verdict3::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Verdict3::False)
    }

    pub fn is_determinate(&self) -> bool {
        !matches!(self, Verdict3::Indeterminate(_))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict3::True => Some(true),
            Verdict3::False => Some(false),
            Verdict3::Indeterminate(_) => None,
        }
    }

    pub fn not(self) -> Self {
        match self {
            Verdict3::True => Verdict3::False,
            Verdict3::False => Verdict3::True,
            other => other,
        }
    }

    /// Kleene conjunction.
    pub fn and(self, other: Verdict3) -> Self {
        match (self, other) {
            (Verdict3::False, _) | (_, Verdict3::False) => Verdict3::False,
            (Verdict3::True, Verdict3::True) => Verdict3::True,
            (Verdict3::Indeterminate(r), _) | (_, Verdict3::Indeterminate(r)) => {
                Verdict3::Indeterminate(r)
            }
        }
    }

    /// Kleene disjunction.
    pub fn or(self, other: Verdict3) -> Self {
        match (self, other) {
            (Verdict3::True, _) | (_, Verdict3::True) => Verdict3::True,
            (Verdict3::False, Verdict3::False) => Verdict3::False,
            (Verdict3::Indeterminate(r), _) | (_, Verdict3::Indeterminate(r)) => {
                Verdict3::Indeterminate(r)
            }
        }
    }
}

impl std::fmt::Display for Verdict3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict3::True => write!(f, "true"),
            Verdict3::False => write!(f, "false"),
            Verdict3::Indeterminate(r) => write!(f, "indeterminate ({r})"),
        }
    }
}
