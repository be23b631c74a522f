use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Order `p` of an l_p norm: a real `p >= 1` or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormOrder {
    Finite(f64),
    Infinity,
}

impl NormOrder {
    pub const ONE: NormOrder = NormOrder::Finite(1.0);
    pub const TWO: NormOrder = NormOrder::Finite(2.0);

    pub fn finite(p: f64) -> Result<Self, Error> {
        if p.is_finite() && p >= 1.0 {
            Ok(NormOrder::Finite(p))
        } else if p == f64::INFINITY {
            Ok(NormOrder::Infinity)
        } else {
            Err(Error::InvalidParameter(format!("norm order must be >= 1, got {p}")))
        }
    }

    /// `||y||_p`.
    pub fn norm(self, y: &[f64]) -> f64 {
        match self {
            NormOrder::Infinity => y.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
            NormOrder::Finite(p) if p == 1.0 => y.iter().map(|v| v.abs()).sum(),
            NormOrder::Finite(p) if p == 2.0 => y.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormOrder::Finite(p) => {
                // scale by the max entry so large p does not overflow
                let m = y.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = y.iter().map(|v| (v.abs() / m).powf(p)).sum();
                m * s.powf(1.0 / p)
            }
        }
    }

    /// Sortable label used for JSON keys and headers.
    pub fn label(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOrder::Infinity => f.write_str("inf"),
            NormOrder::Finite(p) if p.fract() == 0.0 && *p < 1e15 => write!(f, "{}", *p as u64),
            NormOrder::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for NormOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(NormOrder::Infinity);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse norm order {s:?}")))?;
        NormOrder::finite(p)
    }
}

impl Serialize for NormOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NormOrder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        assert_eq!(NormOrder::TWO.norm(&[3.0, 4.0]), 5.0);
        assert_eq!(NormOrder::Infinity.norm(&[3.0, 4.0]), 4.0);
        assert_eq!(NormOrder::ONE.norm(&[1.0, 1.0, 1.0]), 3.0);
    }

    #[test]
    fn general_p_matches_direct_formula() {
        let y = [0.5, 1.5, 2.0];
        let p = 3.5;
        let direct = y.iter().map(|v: &f64| v.powf(p)).sum::<f64>().powf(1.0 / p);
        assert!((NormOrder::Finite(p).norm(&y) - direct).abs() < 1e-12);
    }

    #[test]
    fn parse_and_display() {
        for s in ["1", "2", "inf", "1.5"] {
            let p: NormOrder = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("0.5".parse::<NormOrder>().is_err());
        assert!("abc".parse::<NormOrder>().is_err());
    }
}
