use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Knn,
    Hbos,
    Iforest,
    Loda,
    Abod,
}

impl Detector {
    pub const ALL: [Detector; 5] = [
        Detector::Knn,
        Detector::Hbos,
        Detector::Iforest,
        Detector::Loda,
        Detector::Abod,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Detector::Knn => "knn",
            Detector::Hbos => "hbos",
            Detector::Iforest => "iforest",
            Detector::Loda => "loda",
            Detector::Abod => "abod",
        }
    }

    /// Hyperparameter grids. Every config the search produces is drawn from
    /// these.
    pub fn space(self) -> Vec<(&'static str, Vec<ParamValue>)> {
        use ParamValue::{Int, Str};
        let ints = |v: &[i64]| v.iter().copied().map(Int).collect::<Vec<_>>();
        match self {
            Detector::Knn => vec![
                ("k", ints(&[1, 3, 5, 10, 20, 50, 100])),
                (
                    "method",
                    ["largest", "mean", "median"]
                        .iter()
                        .map(|s| Str(s.to_string()))
                        .collect(),
                ),
            ],
            Detector::Hbos => vec![("n_bins", ints(&[5, 10, 20, 30, 50, 75, 100]))],
            Detector::Iforest => vec![
                ("n_estimators", ints(&[10, 30, 50, 100, 150, 200])),
                ("max_samples", ints(&[64, 128, 256, 512])),
            ],
            Detector::Loda => vec![
                ("n_projections", ints(&[10, 20, 50, 100])),
                ("n_bins", ints(&[5, 10, 20, 30])),
            ],
            Detector::Abod => vec![("k", ints(&[3, 5, 10, 15, 20, 60]))],
        }
    }

    pub fn default_params(self) -> BTreeMap<String, ParamValue> {
        use ParamValue::{Int, Str};
        let pairs: Vec<(&str, ParamValue)> = match self {
            Detector::Knn => vec![("k", Int(5)), ("method", Str("largest".into()))],
            Detector::Hbos => vec![("n_bins", Int(10))],
            Detector::Iforest => vec![("n_estimators", Int(100)), ("max_samples", Int(256))],
            Detector::Loda => vec![("n_projections", Int(100)), ("n_bins", Int(10))],
            Detector::Abod => vec![("k", Int(5))],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Detector::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::UnknownDetector(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Str(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Str(s) => f.write_str(s),
        }
    }
}

/// A detector with concrete hyperparameters, serialized as
/// `{"detector": .., "params": {..}, "standardize_input": ..}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub detector: Detector,
    pub params: BTreeMap<String, ParamValue>,
    pub standardize_input: bool,
}

impl PipelineConfig {
    pub fn default_for(detector: Detector) -> Self {
        Self {
            detector,
            params: detector.default_params(),
            standardize_input: false,
        }
    }

    /// The five detectors with their default hyperparameters.
    pub fn defaults() -> Vec<Self> {
        Detector::ALL.into_iter().map(Self::default_for).collect()
    }

    /// Checks that every declared parameter is present with a grid value
    /// and that nothing else is.
    pub fn validate(&self) -> Result<()> {
        let space = self.detector.space();
        for (name, value) in &self.params {
            let allowed = space.iter().find(|(n, _)| n == name).map(|(_, v)| v);
            if !allowed.is_some_and(|grid| grid.contains(value)) {
                return Err(self.out_of_space(name, value.to_string()));
            }
        }
        for (name, _) in &space {
            if !self.params.contains_key(*name) {
                return Err(self.out_of_space(name, "<missing>".into()));
            }
        }
        Ok(())
    }

    fn out_of_space(&self, name: &str, value: String) -> Error {
        Error::ParamOutOfSpace {
            detector: self.detector.to_string(),
            name: name.to_string(),
            value,
        }
    }

    pub(crate) fn int(&self, name: &str) -> Result<usize> {
        match self.params.get(name) {
            Some(ParamValue::Int(v)) if *v >= 0 => Ok(*v as usize),
            other => Err(self.out_of_space(name, format!("{other:?}"))),
        }
    }

    pub(crate) fn str(&self, name: &str) -> Result<&str> {
        match self.params.get(name) {
            Some(ParamValue::Str(s)) => Ok(s),
            other => Err(self.out_of_space(name, format!("{other:?}"))),
        }
    }

    /// Canonical JSON (keys sorted); used for tie-breaking and hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.detector)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        if self.standardize_input {
            f.write_str(", standardized")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_lie_in_space() {
        for cfg in PipelineConfig::defaults() {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn json_shape() {
        let cfg = PipelineConfig::default_for(Detector::Knn);
        assert_eq!(
            cfg.canonical_json(),
            r#"{"detector":"knn","params":{"k":5,"method":"largest"},"standardize_input":false}"#
        );
        let back: PipelineConfig = serde_json::from_str(&cfg.canonical_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_off_grid_and_unknown() {
        let mut cfg = PipelineConfig::default_for(Detector::Hbos);
        cfg.params.insert("n_bins".into(), ParamValue::Int(7));
        assert!(matches!(cfg.validate(), Err(Error::ParamOutOfSpace { .. })));
        let mut cfg = PipelineConfig::default_for(Detector::Abod);
        cfg.params.insert("alpha".into(), ParamValue::Int(1));
        assert!(cfg.validate().is_err());
        assert!(matches!(
            "ocsvm".parse::<Detector>(),
            Err(Error::UnknownDetector(_))
        ));
        assert!(serde_json::from_str::<PipelineConfig>(
            r#"{"detector":"ocsvm","params":{},"standardize_input":false}"#
        )
        .is_err());
    }
}
