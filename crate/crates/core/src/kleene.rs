//! Weak Kleene three-valued logic.
//!
//! The third value, [`TruthValue::Wrong`], stands for a run-time type error.
//! Unlike strong Kleene logic it is absorbing: any connective with a `Wrong`
//! operand yields `Wrong`, so `false ∧ wrong` is `wrong`, not `false`.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthValue {
    True,
    False,
    Wrong,
}

impl TruthValue {
    pub const ALL: [TruthValue; 3] = [TruthValue::True, TruthValue::False, TruthValue::Wrong];

    pub fn and(self, other: TruthValue) -> TruthValue {
        use TruthValue::*;
        match (self, other) {
            (Wrong, _) | (_, Wrong) => Wrong,
            (True, True) => True,
            _ => False,
        }
    }

    pub fn or(self, other: TruthValue) -> TruthValue {
        use TruthValue::*;
        match (self, other) {
            (Wrong, _) | (_, Wrong) => Wrong,
            (False, False) => False,
            _ => True,
        }
    }

    pub fn negate(self) -> TruthValue {
        match self {
            TruthValue::True => TruthValue::False,
            TruthValue::False => TruthValue::True,
            TruthValue::Wrong => TruthValue::Wrong,
        }
    }

    /// Material implication, `¬p ∨ q`.
    pub fn implies(self, consequent: TruthValue) -> TruthValue {
        self.negate().or(consequent)
    }

    pub fn is_true(self) -> bool {
        self == TruthValue::True
    }
}

/// Conjunction of a sequence; the empty conjunction is `True`.
pub fn fold_and<I>(values: I) -> TruthValue
where
    I: IntoIterator<Item = TruthValue>,
{
    values.into_iter().fold(TruthValue::True, TruthValue::and)
}

impl From<bool> for TruthValue {
    fn from(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }
}

impl Not for TruthValue {
    type Output = TruthValue;

    fn not(self) -> TruthValue {
        self.negate()
    }
}

impl BitAnd for TruthValue {
    type Output = TruthValue;

    fn bitand(self, rhs: TruthValue) -> TruthValue {
        self.and(rhs)
    }
}

impl BitOr for TruthValue {
    type Output = TruthValue;

    fn bitor(self, rhs: TruthValue) -> TruthValue {
        self.or(rhs)
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue::True => "true",
            TruthValue::False => "false",
            TruthValue::Wrong => "wrong",
        })
    }
}
