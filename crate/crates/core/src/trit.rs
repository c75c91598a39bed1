use serde::{Deserialize, Serialize};

/// A probability from `{0, 1/2, 1}`: the value of `μ(1)` for a BP message or
/// an exact marginal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trit {
    Zero,
    Half,
    One,
}

impl Trit {
    pub fn forced(b: bool) -> Trit {
        if b {
            Trit::One
        } else {
            Trit::Zero
        }
    }

    pub fn is_half(self) -> bool {
        self == Trit::Half
    }

    /// The forced bit, if any.
    pub fn value(self) -> Option<bool> {
        match self {
            Trit::Zero => Some(false),
            Trit::One => Some(true),
            Trit::Half => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Trit::Zero => 0.0,
            Trit::Half => 0.5,
            Trit::One => 1.0,
        }
    }
}
