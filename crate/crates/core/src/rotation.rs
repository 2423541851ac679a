//! Unimodular constants as exact fractions of a full turn.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{c, C64};

/// `e^{2πi p/q}` stored exactly, or an angle declared irrational.
///
/// Rational values are kept reduced with `0 ≤ p < q`. Irrational values carry
/// an approximation in `[0, 1)` turns and a free-form label; they are never
/// treated as equal to a rational value.
#[derive(Clone, Debug, PartialEq)]
pub enum RotationNumber {
    Rational { p: u64, q: u64 },
    Irrational { approx: f64, label: String },
}

impl RotationNumber {
    pub const ONE: RotationNumber = RotationNumber::Rational { p: 0, q: 1 };

    /// `p/q` turns, reduced into `[0, 1)`.
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q <= 0 {
            return Err(LabError::validation(format!("rotation denominator must be positive, got {q}")));
        }
        let p = p.rem_euclid(q);
        let g = p.gcd(&q).max(1);
        Ok(RotationNumber::Rational {
            p: (p / g) as u64,
            q: (q / g) as u64,
        })
    }

    pub fn irrational(approx: f64, label: impl Into<String>) -> Result<Self> {
        if !approx.is_finite() {
            return Err(LabError::validation("irrational rotation needs a finite approximation"));
        }
        Ok(RotationNumber::Irrational {
            approx: approx.rem_euclid(1.0),
            label: label.into(),
        })
    }

    /// Rotation by the angle `theta` (radians); produced by numerical routines.
    pub fn from_angle(theta: f64) -> Self {
        RotationNumber::Irrational {
            approx: (theta / std::f64::consts::TAU).rem_euclid(1.0),
            label: "computed".into(),
        }
    }

    /// Rotation equal to the phase of a nonzero complex number.
    pub fn from_phase(w: C64) -> Self {
        RotationNumber::from_angle(w.arg())
    }

    pub fn turns(&self) -> f64 {
        match self {
            RotationNumber::Rational { p, q } => *p as f64 / *q as f64,
            RotationNumber::Irrational { approx, .. } => *approx,
        }
    }

    pub fn angle(&self) -> f64 {
        let t = self.turns();
        // Use the representative in (-1/2, 1/2] for better trig accuracy.
        let t = if t > 0.5 { t - 1.0 } else { t };
        t * std::f64::consts::TAU
    }

    pub fn to_complex(&self) -> C64 {
        if let RotationNumber::Rational { p, q } = self {
            // Exact values at quarter turns.
            if (4 * p) % q == 0 {
                return [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(4 * p / q) as usize];
            }
        }
        C64::from_polar(1.0, self.angle())
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, RotationNumber::Rational { p: 0, .. })
    }

    /// Smallest positive `k` with `λ^k = 1`; `None` stands for infinite order.
    pub fn order(&self) -> Option<u64> {
        match self {
            RotationNumber::Rational { q, .. } => Some(*q),
            RotationNumber::Irrational { .. } => None,
        }
    }

    /// Product of unimodular numbers (sum of turns).
    pub fn compose(&self, other: &RotationNumber) -> RotationNumber {
        match (self, other) {
            (RotationNumber::Rational { p: p1, q: q1 }, RotationNumber::Rational { p: p2, q: q2 }) => {
                let q = q1.lcm(q2);
                let p = p1 * (q / q1) + p2 * (q / q2);
                RotationNumber::rational(p as i64, q as i64).expect("positive denominator")
            }
            _ => RotationNumber::Irrational {
                approx: (self.turns() + other.turns()).rem_euclid(1.0),
                label: "computed".into(),
            },
        }
    }

    pub fn inverse(&self) -> RotationNumber {
        match self {
            RotationNumber::Rational { p, q } => {
                RotationNumber::rational(-(*p as i64), *q as i64).expect("positive denominator")
            }
            RotationNumber::Irrational { approx, label } => RotationNumber::Irrational {
                approx: (-approx).rem_euclid(1.0),
                label: label.clone(),
            },
        }
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationNumber::Rational { p, q } => write!(f, "{p}/{q}"),
            RotationNumber::Irrational { approx, label } => write!(f, "irrational({approx}, {label})"),
        }
    }
}

impl FromStr for RotationNumber {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || LabError::Parse {
            position: 0,
            message: format!("expected a rotation number \"p/q\", got {s:?}"),
        };
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        RotationNumber::rational(p, q)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RotationRepr {
    Text(String),
    Irrational {
        irrational: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

impl Serialize for RotationNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RotationNumber::Rational { .. } => RotationRepr::Text(self.to_string()),
            RotationNumber::Irrational { approx, label } => RotationRepr::Irrational {
                irrational: *approx,
                label: Some(label.clone()),
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RotationNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RotationRepr::deserialize(d)? {
            RotationRepr::Text(t) => t.parse().map_err(serde::de::Error::custom),
            RotationRepr::Irrational { irrational, label } => {
                let label = label.unwrap_or_else(|| format!("{irrational}"));
                RotationNumber::irrational(irrational, label).map_err(serde::de::Error::custom)
            }
        }
    }
}
