//! Short-memory confounders: AR(1) and a decaying trend buried in white noise.

use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{rng_for, GeneratorConfig};
use crate::error::{invalid, Result};
use crate::series::{Provenance, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ar1Config {
    pub phi: f64,
    /// Innovation standard deviation.
    pub sigma: f64,
    pub n: usize,
}

impl Default for Ar1Config {
    fn default() -> Self {
        Self {
            phi: 0.9,
            sigma: 1.0,
            n: 1 << 12,
        }
    }
}

impl Ar1Config {
    pub fn validate(&self) -> Result<()> {
        if self.phi.is_nan() || self.phi.abs() >= 1.0 {
            return Err(invalid(
                "phi",
                format!("must satisfy |phi| < 1, got {}", self.phi),
            ));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be > 0, got {}", self.sigma)));
        }
        if self.n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        Ok(())
    }

    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (1.0 - self.phi * self.phi)
    }
}

/// `x[t+1] = phi * x[t] + e[t]`, started from the stationary law.
pub fn gen_ar1(cfg: &Ar1Config, seed: u64) -> Result<TimeSeries> {
    cfg.validate()?;
    let mut rng = rng_for(seed);
    let innovation = Normal::new(0.0, cfg.sigma).map_err(|e| invalid("sigma", e.to_string()))?;
    let mut values = Vec::with_capacity(cfg.n);
    let z: f64 = StandardNormal.sample(&mut rng);
    let mut x = z * cfg.stationary_variance().sqrt();
    values.push(x);
    for _ in 1..cfg.n {
        x = cfg.phi * x + innovation.sample(&mut rng);
        values.push(x);
    }
    TimeSeries::new(
        values,
        1.0,
        Provenance::Generated {
            config: GeneratorConfig::Ar1(cfg.clone()),
            seed,
        },
    )
}

/// White noise plus the trend `amplitude * (offset + t)^{-exponent}`, `t = 1..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrendNoiseConfig {
    pub amplitude: f64,
    pub offset: f64,
    /// Decay exponent, in (0, 1/2).
    pub exponent: f64,
    pub sigma: f64,
    pub n: usize,
}

impl Default for TrendNoiseConfig {
    fn default() -> Self {
        Self {
            amplitude: 5.0,
            offset: 1.0,
            exponent: 0.3,
            sigma: 1.0,
            n: 1 << 14,
        }
    }
}

impl TrendNoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.exponent > 0.0 && self.exponent < 0.5) {
            return Err(invalid(
                "exponent",
                format!("must lie in (0, 0.5), got {}", self.exponent),
            ));
        }
        if !(self.offset >= 0.0 && self.offset.is_finite()) {
            return Err(invalid(
                "offset",
                format!("must be >= 0, got {}", self.offset),
            ));
        }
        if !self.amplitude.is_finite() {
            return Err(invalid("amplitude", "must be finite"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be > 0, got {}", self.sigma)));
        }
        if self.n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        Ok(())
    }

    /// The deterministic part at sample index `i` (time `t = i + 1`).
    pub fn trend_at(&self, i: usize) -> f64 {
        self.amplitude * (self.offset + (i + 1) as f64).powf(-self.exponent)
    }
}

pub fn gen_trend_noise(cfg: &TrendNoiseConfig, seed: u64) -> Result<TimeSeries> {
    cfg.validate()?;
    let mut rng = rng_for(seed);
    let values = (0..cfg.n)
        .map(|i| {
            let z: f64 = StandardNormal.sample(&mut rng);
            cfg.sigma * z + cfg.trend_at(i)
        })
        .collect();
    TimeSeries::new(
        values,
        1.0,
        Provenance::Generated {
            config: GeneratorConfig::TrendNoise(cfg.clone()),
            seed,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag_corr(x: &[f64], k: usize) -> f64 {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>();
        let c: f64 = (0..x.len() - k).map(|t| (x[t] - m) * (x[t + k] - m)).sum();
        c / v
    }

    #[test]
    fn ar1_rejects_unit_root() {
        for phi in [1.0, -1.0, 1.5] {
            assert!(gen_ar1(
                &Ar1Config {
                    phi,
                    ..Default::default()
                },
                0
            )
            .is_err());
        }
    }

    #[test]
    fn ar1_lag_one() {
        let white = gen_ar1(
            &Ar1Config {
                phi: 0.0,
                sigma: 1.0,
                n: 10_000,
            },
            1,
        )
        .unwrap();
        assert!(lag_corr(white.values(), 1).abs() < 0.02);
        let red = gen_ar1(
            &Ar1Config {
                phi: 0.9,
                sigma: 1.0,
                n: 100_000,
            },
            2,
        )
        .unwrap();
        assert!((lag_corr(red.values(), 1) - 0.9).abs() < 0.03);
    }

    #[test]
    fn ar1_stationary_variance() {
        let cfg = Ar1Config {
            phi: 0.6,
            sigma: 2.0,
            n: 200_000,
        };
        let x = gen_ar1(&cfg, 5).unwrap();
        let m = x.mean();
        let v = x.values().iter().map(|a| (a - m).powi(2)).sum::<f64>() / cfg.n as f64;
        let want = cfg.stationary_variance();
        assert!((v / want - 1.0).abs() < 0.03, "{v} vs {want}");
    }

    #[test]
    fn zero_amplitude_is_plain_noise() {
        let cfg = TrendNoiseConfig {
            amplitude: 0.0,
            ..Default::default()
        };
        let a = gen_trend_noise(&cfg, 9).unwrap();
        let mut b = rng_for(9);
        for v in a.values() {
            let z: f64 = StandardNormal.sample(&mut b);
            assert_eq!(*v, z);
        }
    }

    #[test]
    fn trend_exponent_range() {
        for exponent in [0.0, 0.5, 0.7, -0.1] {
            let cfg = TrendNoiseConfig {
                exponent,
                ..Default::default()
            };
            assert!(gen_trend_noise(&cfg, 0).is_err());
        }
    }
}
