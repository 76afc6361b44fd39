//! Uniformly sampled series with provenance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorConfig;

/// Where a series came from. A `Generated` record is enough to rebuild the
/// values exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Generated { config: GeneratorConfig, seed: u64 },
    Imported { source: String },
    Prefix { parent: Box<Provenance>, len: usize },
    Derived { parent: Box<Provenance>, op: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    dt: f64,
    meta: Provenance,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, dt: f64, meta: Provenance) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SeriesTooShort { len: 0, min: 1 });
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(crate::error::invalid(
                "dt",
                format!("must be finite and > 0, got {dt}"),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Degenerate(format!(
                "non-finite value {} at index {i}",
                values[i]
            )));
        }
        Ok(Self { values, dt, meta })
    }

    /// Wraps externally supplied samples with unit spacing.
    pub fn imported(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        Self::new(
            values,
            1.0,
            Provenance::Imported {
                source: source.into(),
            },
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn meta(&self) -> &Provenance {
        &self.meta
    }

    /// The first `len` samples, i.e. the observation window `[0, len)`.
    pub fn prefix(&self, len: usize) -> Result<TimeSeries> {
        if len == 0 || len > self.len() {
            return Err(crate::error::invalid(
                "len",
                format!("prefix length {len} outside 1..={}", self.len()),
            ));
        }
        Ok(TimeSeries {
            values: self.values[..len].to_vec(),
            dt: self.dt,
            meta: Provenance::Prefix {
                parent: Box::new(self.meta.clone()),
                len,
            },
        })
    }

    /// Applies `f` to the values, recording `op` in the provenance.
    pub fn map_values(&self, op: &str, f: impl FnOnce(&[f64]) -> Vec<f64>) -> Result<TimeSeries> {
        TimeSeries::new(
            f(&self.values),
            self.dt,
            Provenance::Derived {
                parent: Box::new(self.meta.clone()),
                op: op.to_string(),
            },
        )
    }

    /// Running sum of the values.
    pub fn cumulative(&self) -> TimeSeries {
        let mut acc = 0.0;
        let values = self
            .values
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        TimeSeries {
            values,
            dt: self.dt,
            meta: Provenance::Derived {
                parent: Box::new(self.meta.clone()),
                op: "cumsum".into(),
            },
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(TimeSeries::imported(vec![], "t").is_err());
        assert!(TimeSeries::imported(vec![1.0, f64::NAN], "t").is_err());
        assert!(
            TimeSeries::new(vec![1.0], 0.0, Provenance::Imported { source: "t".into() }).is_err()
        );
    }

    #[test]
    fn prefix_bounds() {
        let s = TimeSeries::imported(vec![1.0, 2.0, 3.0], "t").unwrap();
        assert_eq!(s.prefix(2).unwrap().values(), &[1.0, 2.0]);
        assert!(s.prefix(0).is_err());
        assert!(s.prefix(4).is_err());
        assert_eq!(s.cumulative().values(), &[1.0, 3.0, 6.0]);
    }
}
