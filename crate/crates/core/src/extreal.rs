//! Extended real numbers.
//!
//! Class source exponents become `-inf` when a threshold puts every message
//! in the other class, which in turn sends objective cells to `+inf`. The
//! ordering is total: `MinusInf < Finite(_) < PlusInf`, finite values compared
//! with `f64::total_cmp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

#[derive(Debug, Clone, Copy)]
pub enum ExtReal {
    MinusInf,
    Finite(f64),
    PlusInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps IEEE infinities onto the tags. NaN is a logic error.
    pub fn from_f64(v: f64) -> Self {
        assert!(!v.is_nan(), "ExtReal cannot hold NaN");
        if v == f64::INFINITY {
            ExtReal::PlusInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::MinusInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::MinusInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PlusInf => f64::INFINITY,
        }
    }

    /// `None` for the indeterminate form `+inf + -inf`.
    pub fn checked_add(self, rhs: ExtReal) -> Option<ExtReal> {
        use ExtReal::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Some(ExtReal::from_f64(a + b)),
            (PlusInf, MinusInf) | (MinusInf, PlusInf) => None,
            (PlusInf, _) | (_, PlusInf) => Some(PlusInf),
            (MinusInf, _) | (_, MinusInf) => Some(MinusInf),
        }
    }

    pub fn checked_sub(self, rhs: ExtReal) -> Option<ExtReal> {
        self.checked_add(-rhs)
    }

    fn rank(self) -> u8 {
        match self {
            ExtReal::MinusInf => 0,
            ExtReal::Finite(_) => 1,
            ExtReal::PlusInf => 2,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self {
            ExtReal::MinusInf => ExtReal::PlusInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
            ExtReal::PlusInf => ExtReal::MinusInf,
        }
    }
}

/// Panics on `+inf + -inf`; use [`ExtReal::checked_add`] when that can occur.
impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        self.checked_add(rhs)
            .unwrap_or_else(|| panic!("indeterminate extended-real sum {self} + {rhs}"))
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self.checked_sub(rhs)
            .unwrap_or_else(|| panic!("indeterminate extended-real difference {self} - {rhs}"))
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::MinusInf => f.write_str("-inf"),
            ExtReal::PlusInf => f.write_str("inf"),
            ExtReal::Finite(v) => fmt::Display::fmt(v, f),
        }
    }
}
