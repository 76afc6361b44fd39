//! Raw periodogram with a sum-equals-energy normalization.

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::TimeSeries;

pub const MIN_PERIODOGRAM_LEN: usize = 8;

/// One-sided periodogram on the Fourier grid `k / n`, `k = 1..=n/2`.
///
/// `power[k] = 2 |X_k|^2 / n` for interior bins and `|X_k|^2 / n` at the
/// Nyquist bin of an even-length series, so that
/// `dc_power + sum(power) == sum(x_t^2)`. With unit sampling this is also
/// the one-sided spectral density estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    /// `|X_0|^2 / n`, the energy of the sample mean. Not part of `freqs`.
    pub dc_power: f64,
    /// Length of the transformed series.
    pub n: usize,
}

impl Periodogram {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn total_energy(&self) -> f64 {
        self.dc_power + self.power.iter().sum::<f64>()
    }

    pub fn band_count(&self, lo: f64, hi: f64) -> usize {
        self.freqs.iter().filter(|f| **f >= lo && **f <= hi).count()
    }

    /// Mean power over bins with `lo <= f <= hi`.
    pub fn band_mean(&self, lo: f64, hi: f64) -> Option<f64> {
        let (sum, count) = self
            .freqs
            .iter()
            .zip(&self.power)
            .filter(|(f, _)| **f >= lo && **f <= hi)
            .fold((0.0, 0usize), |(s, c), (_, p)| (s + p, c + 1));
        (count > 0).then(|| sum / count as f64)
    }

    /// Bin-wise average of periodograms of equal length.
    pub fn mean_of(items: &[Periodogram]) -> Result<Periodogram> {
        let first = items
            .first()
            .ok_or_else(|| invalid("items", "no periodograms to average"))?;
        let mut power = vec![0.0; first.len()];
        let mut dc = 0.0;
        for p in items {
            if p.n != first.n {
                return Err(invalid(
                    "items",
                    format!("length {} differs from {}", p.n, first.n),
                ));
            }
            for (acc, v) in power.iter_mut().zip(&p.power) {
                *acc += v;
            }
            dc += p.dc_power;
        }
        let k = items.len() as f64;
        power.iter_mut().for_each(|v| *v /= k);
        Ok(Periodogram {
            freqs: first.freqs.clone(),
            power,
            dc_power: dc / k,
            n: first.n,
        })
    }
}

pub fn periodogram_of(values: &[f64]) -> Result<Periodogram> {
    let n = values.len();
    if n < MIN_PERIODOGRAM_LEN {
        return Err(Error::SeriesTooShort {
            len: n,
            min: MIN_PERIODOGRAM_LEN,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite sample".into()));
    }
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    let half = n / 2;
    let mut freqs = Vec::with_capacity(half);
    let mut power = Vec::with_capacity(half);
    for (k, c) in buf.iter().enumerate().take(half + 1).skip(1) {
        let scale = if 2 * k == n { 1.0 } else { 2.0 };
        freqs.push(k as f64 / nf);
        power.push(scale * c.norm_sqr() / nf);
    }
    Ok(Periodogram {
        freqs,
        power,
        dc_power: buf[0].norm_sqr() / nf,
        n,
    })
}

/// Rectangular-window periodogram. The sample mean is not removed.
pub fn periodogram(x: &TimeSeries) -> Result<Periodogram> {
    periodogram_of(x.values())
}

/// Subtracts the straight line through the first and last samples, which
/// removes the end-point jump a random walk presents to the periodic DFT.
pub fn end_match(x: &TimeSeries) -> Result<TimeSeries> {
    x.map_values("end-match", |v| {
        let n = v.len();
        if n < 2 {
            return v.to_vec();
        }
        let slope = (v[n - 1] - v[0]) / (n - 1) as f64;
        v.iter()
            .enumerate()
            .map(|(i, a)| a - v[0] - slope * i as f64)
            .collect()
    })
}
