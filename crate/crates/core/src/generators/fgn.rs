//! Fractional Gaussian noise by exact circulant embedding (Davies–Harte).

use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{rng_for, GeneratorConfig};
use crate::error::{invalid, Error, Result};
use crate::series::{Provenance, TimeSeries};

/// Eigenvalues below `-EIGEN_CLAMP * max` are rejected; smaller negatives are
/// rounding noise and are zeroed.
const EIGEN_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FgnConfig {
    pub hurst: f64,
    /// Standard deviation of a single increment.
    pub sigma: f64,
    pub n: usize,
}

impl Default for FgnConfig {
    fn default() -> Self {
        Self {
            hurst: 0.7,
            sigma: 1.0,
            n: 1 << 14,
        }
    }
}

impl FgnConfig {
    pub fn new(hurst: f64, sigma: f64, n: usize) -> Self {
        Self { hurst, sigma, n }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(invalid(
                "hurst",
                format!("must lie in (0, 1), got {}", self.hurst),
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
}

/// Autocovariance of unit-variance fGn at integer lag `k`:
/// `(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2`.
pub fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Square roots of the circulant eigenvalues, scaled by `1/sqrt(m)`.
fn embedding_weights(hurst: f64, n: usize) -> Result<Vec<f64>> {
    let m = 2 * n;
    let mut row: Vec<Complex64> = Vec::with_capacity(m);
    for k in 0..=n {
        row.push(Complex64::new(fgn_autocovariance(hurst, k), 0.0));
    }
    for k in (1..n).rev() {
        row.push(Complex64::new(fgn_autocovariance(hurst, k), 0.0));
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut row);

    let max = row.iter().map(|c| c.re).fold(f64::MIN, f64::max);
    let mut weights = Vec::with_capacity(m);
    for (index, c) in row.iter().enumerate() {
        let mut lambda = c.re;
        if lambda < 0.0 {
            if lambda < -EIGEN_CLAMP * max {
                return Err(Error::NegativeEigenvalue {
                    index,
                    value: lambda,
                    max,
                });
            }
            lambda = 0.0;
        }
        weights.push((lambda / m as f64).sqrt());
    }
    Ok(weights)
}

fn fgn_values(cfg: &FgnConfig, seed: u64) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n = cfg.n;
    let m = 2 * n;
    let weights = embedding_weights(cfg.hurst, n)?;
    let mut rng = rng_for(seed);
    let mut buf: Vec<Complex64> = weights
        .iter()
        .map(|w| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(w * re, w * im)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    Ok(buf[..n].iter().map(|c| cfg.sigma * c.re).collect())
}

/// Stationary fGn with `Var = sigma^2` and the exact fGn autocovariance.
pub fn gen_fgn(cfg: &FgnConfig, seed: u64) -> Result<TimeSeries> {
    let values = fgn_values(cfg, seed)?;
    TimeSeries::new(
        values,
        1.0,
        Provenance::Generated {
            config: GeneratorConfig::Fgn(cfg.clone()),
            seed,
        },
    )
}

/// Fractional Brownian motion sampled at `t = 1..n`, the running sum of
/// [`gen_fgn`] with the same seed.
pub fn gen_fbm(cfg: &FgnConfig, seed: u64) -> Result<TimeSeries> {
    let mut values = fgn_values(cfg, seed)?;
    let mut acc = 0.0;
    for v in values.iter_mut() {
        acc += *v;
        *v = acc;
    }
    TimeSeries::new(
        values,
        1.0,
        Provenance::Generated {
            config: GeneratorConfig::Fbm(cfg.clone()),
            seed,
        },
    )
}
