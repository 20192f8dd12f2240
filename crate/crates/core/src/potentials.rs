//! Attractive radial pair potentials `V(r)`.
//!
//! The family is closed: every variant is attractive, and the homogeneous
//! ones report their degree `k` with `V(s r) = s^k V(r)`, which the bound
//! formulas use for scaling arguments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("potential evaluated at negative radius r = {0}")]
    NegativeRadius(f64),
    #[error("potential {0} is singular at r = 0")]
    SingularAtOrigin(String),
    #[error("invalid potential parameter `{token}`: {reason}")]
    InvalidParameter { token: String, reason: String },
    #[error("unknown potential kind `{0}` (expected linear, coulomb, harmonic, coulomb+linear or power)")]
    UnknownKind(String),
    #[error("malformed potential spec `{0}` (expected <kind>:<params>)")]
    Malformed(String),
}

/// Attractive pair interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairPotential {
    /// `V = b r`
    Linear { slope: f64 },
    /// `V = -v / r`
    Coulomb { strength: f64 },
    /// `V = v r^2`
    Harmonic { strength: f64 },
    /// `V = -v / r + b r`, `v >= 0`, `b > 0`
    CoulombPlusLinear { strength: f64, slope: f64 },
    /// `V = c r^k`, `c > 0`, `k > 0`
    PowerLaw { coefficient: f64, exponent: f64 },
}

fn positive(token: &str, value: f64, what: &str) -> Result<f64, PotentialError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(PotentialError::InvalidParameter {
            token: token.to_string(),
            reason: format!("{what} must be a finite positive number"),
        })
    }
}

impl PairPotential {
    pub fn linear(slope: f64) -> Result<Self, PotentialError> {
        positive(&slope.to_string(), slope, "linear slope")?;
        Ok(Self::Linear { slope })
    }

    pub fn coulomb(strength: f64) -> Result<Self, PotentialError> {
        positive(&strength.to_string(), strength, "coulomb strength")?;
        Ok(Self::Coulomb { strength })
    }

    pub fn harmonic(strength: f64) -> Result<Self, PotentialError> {
        positive(&strength.to_string(), strength, "harmonic strength")?;
        Ok(Self::Harmonic { strength })
    }

    pub fn coulomb_plus_linear(strength: f64, slope: f64) -> Result<Self, PotentialError> {
        if !(strength.is_finite() && strength >= 0.0) {
            return Err(PotentialError::InvalidParameter {
                token: strength.to_string(),
                reason: "coulomb strength must be a finite non-negative number".into(),
            });
        }
        positive(&slope.to_string(), slope, "linear slope")?;
        Ok(Self::CoulombPlusLinear { strength, slope })
    }

    pub fn power_law(coefficient: f64, exponent: f64) -> Result<Self, PotentialError> {
        positive(&coefficient.to_string(), coefficient, "power-law coefficient")?;
        positive(&exponent.to_string(), exponent, "power-law exponent")?;
        Ok(Self::PowerLaw {
            coefficient,
            exponent,
        })
    }

    /// Re-checks the parameter invariants, e.g. after deserialization.
    pub fn validate(&self) -> Result<(), PotentialError> {
        match *self {
            Self::Linear { slope } => Self::linear(slope).map(drop),
            Self::Coulomb { strength } => Self::coulomb(strength).map(drop),
            Self::Harmonic { strength } => Self::harmonic(strength).map(drop),
            Self::CoulombPlusLinear { strength, slope } => {
                Self::coulomb_plus_linear(strength, slope).map(drop)
            }
            Self::PowerLaw {
                coefficient,
                exponent,
            } => Self::power_law(coefficient, exponent).map(drop),
        }
    }

    /// Strength of the `-v/r` part, zero when there is none.
    pub fn coulomb_strength(&self) -> f64 {
        match *self {
            Self::Coulomb { strength } | Self::CoulombPlusLinear { strength, .. } => strength,
            _ => 0.0,
        }
    }

    pub fn is_singular_at_origin(&self) -> bool {
        self.coulomb_strength() > 0.0
    }

    pub fn evaluate(&self, r: f64) -> Result<f64, PotentialError> {
        if r < 0.0 || r.is_nan() {
            return Err(PotentialError::NegativeRadius(r));
        }
        if r == 0.0 && self.is_singular_at_origin() {
            return Err(PotentialError::SingularAtOrigin(self.to_string()));
        }
        Ok(self.value_unchecked(r))
    }

    /// `V(r)` without domain checks; callers guarantee `r > 0`.
    #[inline]
    pub(crate) fn value_unchecked(&self, r: f64) -> f64 {
        match *self {
            Self::Linear { slope } => slope * r,
            Self::Coulomb { strength } => -strength / r,
            Self::Harmonic { strength } => strength * r * r,
            Self::CoulombPlusLinear { strength, slope } => {
                if strength == 0.0 {
                    slope * r
                } else {
                    -strength / r + slope * r
                }
            }
            Self::PowerLaw {
                coefficient,
                exponent,
            } => coefficient * r.powf(exponent),
        }
    }

    /// Degree `k` with `V(s r) = s^k V(r)`, or `None` for a genuine
    /// Coulomb-plus-linear mixture.
    pub fn homogeneity_degree(&self) -> Option<f64> {
        match *self {
            Self::Linear { .. } => Some(1.0),
            Self::Coulomb { .. } => Some(-1.0),
            Self::Harmonic { .. } => Some(2.0),
            Self::PowerLaw { exponent, .. } => Some(exponent),
            Self::CoulombPlusLinear { strength, .. } => {
                if strength == 0.0 {
                    Some(1.0)
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for PairPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Linear { slope } => write!(f, "linear:{slope}"),
            Self::Coulomb { strength } => write!(f, "coulomb:{strength}"),
            Self::Harmonic { strength } => write!(f, "harmonic:{strength}"),
            Self::CoulombPlusLinear { strength, slope } => {
                write!(f, "coulomb+linear:{strength},{slope}")
            }
            Self::PowerLaw {
                coefficient,
                exponent,
            } => write!(f, "power:{coefficient},{exponent}"),
        }
    }
}

fn parse_tokens<'a, const K: usize>(kind: &str, params: &'a str) -> Result<[&'a str; K], PotentialError> {
    let tokens: Vec<&str> = params.split(',').map(str::trim).collect();
    tokens
        .try_into()
        .map_err(|_| PotentialError::InvalidParameter {
            token: params.to_string(),
            reason: format!("`{kind}` expects {K} comma-separated parameter(s)"),
        })
}

/// Parses `token` and checks it against `accept`, naming the token on failure.
fn parse_param(token: &str, accept: fn(f64) -> bool, reason: &str) -> Result<f64, PotentialError> {
    match token.parse::<f64>() {
        Ok(x) if x.is_finite() && accept(x) => Ok(x),
        Ok(_) => Err(PotentialError::InvalidParameter {
            token: token.to_string(),
            reason: reason.to_string(),
        }),
        Err(_) => Err(PotentialError::InvalidParameter {
            token: token.to_string(),
            reason: "not a number".into(),
        }),
    }
}

const POSITIVE: fn(f64) -> bool = |x| x > 0.0;
const NON_NEGATIVE: fn(f64) -> bool = |x| x >= 0.0;

impl FromStr for PairPotential {
    type Err = PotentialError;

    /// Parses `linear:<b>`, `coulomb:<v>`, `harmonic:<v>`,
    /// `coulomb+linear:<v>,<b>` and `power:<c>,<k>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, params) = s
            .split_once(':')
            .ok_or_else(|| PotentialError::Malformed(s.to_string()))?;
        let kind = kind.trim();
        let must_be_positive = "must be a finite positive number";
        match kind {
            "linear" => {
                let [b] = parse_tokens::<1>(kind, params)?;
                Ok(Self::Linear {
                    slope: parse_param(b, POSITIVE, must_be_positive)?,
                })
            }
            "coulomb" => {
                let [v] = parse_tokens::<1>(kind, params)?;
                Ok(Self::Coulomb {
                    strength: parse_param(v, POSITIVE, must_be_positive)?,
                })
            }
            "harmonic" => {
                let [v] = parse_tokens::<1>(kind, params)?;
                Ok(Self::Harmonic {
                    strength: parse_param(v, POSITIVE, must_be_positive)?,
                })
            }
            "coulomb+linear" => {
                let [v, b] = parse_tokens::<2>(kind, params)?;
                Ok(Self::CoulombPlusLinear {
                    strength: parse_param(v, NON_NEGATIVE, "must be a finite non-negative number")?,
                    slope: parse_param(b, POSITIVE, must_be_positive)?,
                })
            }
            "power" => {
                let [c, k] = parse_tokens::<2>(kind, params)?;
                Ok(Self::PowerLaw {
                    coefficient: parse_param(c, POSITIVE, must_be_positive)?,
                    exponent: parse_param(k, POSITIVE, must_be_positive)?,
                })
            }
            other => Err(PotentialError::UnknownKind(other.to_string())),
        }
    }
}
