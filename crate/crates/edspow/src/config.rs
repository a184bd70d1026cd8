//! Job configuration for the CLI: a single JSON document with all big
//! integers carried as decimal (or `p/q` rational) strings.

use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::curve::{Curve, Point};
use crate::eds::{EdsSequence, PowerSet};
use crate::{Error, Result};

/// An integer or a rational, accepted either as a JSON number or as a
/// string like "-7" or "3/4".
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rational {
    Int(i64),
    Str(String),
}

impl Rational {
    pub fn parse(&self) -> Result<BigRational> {
        match self {
            Rational::Int(v) => Ok(BigRational::from_integer((*v).into())),
            Rational::Str(s) => BigRational::from_str(s.trim())
                .map_err(|e| Error::Config(format!("cannot parse rational {s:?}: {e}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveConfig {
    pub a1: Rational,
    pub a2: Rational,
    pub a3: Rational,
    pub a4: Rational,
    pub a6: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointConfig {
    pub x: Rational,
    pub y: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerSetConfig {
    Explicit {
        indices: Vec<u64>,
        #[serde(default)]
        assume_complete: bool,
    },
    Scan {
        scan_bound: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Jsonl,
}

impl Default for OutputFormat {
    fn default() -> Self {
        OutputFormat::Text
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobConfig {
    pub curve: CurveConfig,
    pub point: PointConfig,
    pub ell: u32,
    pub power_set: Option<PowerSetConfig>,
    pub budget: Option<u64>,
    pub sieve_limit: Option<u64>,
    pub horizon: Option<u64>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: JobConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if config.ell < 2 {
            return Err(Error::Config(format!("ell must be >= 2, got {}", config.ell)));
        }
        Ok(config)
    }

    pub fn build_curve(&self) -> Result<Curve> {
        Curve::new(
            self.curve.a1.parse()?,
            self.curve.a2.parse()?,
            self.curve.a3.parse()?,
            self.curve.a4.parse()?,
            self.curve.a6.parse()?,
        )
    }

    pub fn build_sequence(&self) -> Result<EdsSequence> {
        let curve = self.build_curve()?;
        let point = Point::affine(self.point.x.parse()?, self.point.y.parse()?);
        if !curve.contains(&point) {
            return Err(Error::Config(format!(
                "point ({:?}, {:?}) does not lie on the configured curve",
                self.point.x, self.point.y
            )));
        }
        EdsSequence::new(curve, point)
    }

    /// The power set driving the bounds: explicit indices (optionally
    /// asserted complete) or a scan up to a bound.
    pub fn build_power_set(&self, seq: &EdsSequence, ell: u32) -> Result<PowerSet> {
        match &self.power_set {
            Some(PowerSetConfig::Explicit { indices, assume_complete }) => {
                let set = PowerSet::asserted(seq, ell, indices)?;
                if *assume_complete {
                    Ok(set)
                } else {
                    // indices verified but completeness not asserted
                    let max = set.m_ell();
                    Ok(PowerSet {
                        provenance: crate::eds::Provenance::ScannedUpTo(max),
                        ..set
                    })
                }
            }
            Some(PowerSetConfig::Scan { scan_bound }) => seq.scan_powers(ell, *scan_bound),
            None => Err(Error::Config(
                "no power_set in config: give indices (+ assume_complete) or scan_bound".into(),
            )),
        }
    }

    pub fn sieve_limit(&self) -> u64 {
        self.sieve_limit.unwrap_or(crate::arith::DEFAULT_SIEVE_LIMIT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_example_config() {
        let text = r#"{
            "curve": {"a1": 1, "a2": 1, "a3": 0, "a4": "-7", "a6": "5"},
            "point": {"x": "2", "y": -3},
            "ell": 7,
            "power_set": {"indices": [1, 2, 3, 4, 7, 12], "assume_complete": true}
        }"#;
        let config: JobConfig = serde_json::from_str(text).unwrap();
        let seq = config.build_sequence().unwrap();
        let p = config.build_power_set(&seq, 7).unwrap();
        assert!(p.is_asserted_complete());
        assert_eq!(p.m_ell(), 12);
    }

    #[test]
    fn rejects_point_off_curve() {
        let text = r#"{
            "curve": {"a1": 1, "a2": 1, "a3": 0, "a4": -7, "a6": 5},
            "point": {"x": 0, "y": 0},
            "ell": 2
        }"#;
        let config: JobConfig = serde_json::from_str(text).unwrap();
        assert!(matches!(config.build_sequence(), Err(Error::Config(_))));
    }

    #[test]
    fn rational_coordinates_parse() {
        let r = Rational::Str("-7/3".into()).parse().unwrap();
        assert_eq!(r, BigRational::new((-7).into(), 3.into()));
    }
}
