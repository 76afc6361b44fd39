//! Window-conditioned spectra `S'(f, T)` of the leading segment `x[0..T]`.

use serde::{Deserialize, Serialize};

use super::fit::{fit_loglog_slope, ScalingFit};
use super::periodogram::{periodogram_of, Periodogram};
use crate::error::{invalid, Error, Result};
use crate::series::TimeSeries;

/// Bins the band must contain at the smallest window.
pub const MIN_BAND_BINS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyBand {
    pub lo: f64,
    pub hi: f64,
}

impl FrequencyBand {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi <= 0.5) {
            return Err(invalid(
                "band",
                format!("need 0 < lo < hi <= 0.5, got [{lo}, {hi}]"),
            ));
        }
        Ok(Self { lo, hi })
    }

    /// The decade `[8/T, 80/T]`: low, yet well clear of the window scale `1/T`.
    pub fn lowest_decade(min_window: usize) -> Self {
        let t = min_window as f64;
        Self {
            lo: 8.0 / t,
            hi: 80.0 / t,
        }
    }

    pub fn center(&self) -> f64 {
        (self.lo * self.hi).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgingSpectrum {
    pub windows: Vec<usize>,
    pub spectra: Vec<Periodogram>,
    pub band: FrequencyBand,
}

fn check_windows(windows: &[usize], n: usize, band: &FrequencyBand) -> Result<()> {
    if windows.is_empty() {
        return Err(invalid("windows", "no windows given"));
    }
    if windows.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("windows", "must be strictly increasing"));
    }
    let last = windows[windows.len() - 1];
    if last > n {
        return Err(invalid(
            "windows",
            format!("largest window {last} exceeds series length {n}"),
        ));
    }
    let t = windows[0] as f64;
    let bins = (1..=windows[0] / 2)
        .map(|k| k as f64 / t)
        .filter(|f| *f >= band.lo && *f <= band.hi)
        .count();
    if bins < MIN_BAND_BINS {
        return Err(invalid(
            "band",
            format!(
                "[{}, {}] holds {bins} bins at window {}; need {MIN_BAND_BINS}",
                band.lo, band.hi, windows[0]
            ),
        ));
    }
    Ok(())
}

/// Periodograms of `x[0..T]` for each window `T`.
pub fn conditional_spectrum(
    x: &TimeSeries,
    windows: &[usize],
    band: FrequencyBand,
) -> Result<AgingSpectrum> {
    check_windows(windows, x.len(), &band)?;
    let spectra = windows
        .iter()
        .map(|&t| periodogram_of(&x.values()[..t]))
        .collect::<Result<Vec<_>>>()?;
    Ok(AgingSpectrum {
        windows: windows.to_vec(),
        spectra,
        band,
    })
}

impl AgingSpectrum {
    /// Mean spectral density inside the fixed band, per window.
    pub fn band_powers(&self) -> Vec<f64> {
        self.spectra
            .iter()
            .map(|p| p.band_mean(self.band.lo, self.band.hi).unwrap_or(0.0))
            .collect()
    }

    /// Frequency exponent of each window's spectrum over `[lo, hi]`.
    pub fn frequency_fits(&self, lo: f64, hi: f64) -> Result<Vec<ScalingFit>> {
        self.spectra
            .iter()
            .map(|p| fit_loglog_slope(&p.freqs, &p.power, lo, hi))
            .collect()
    }

    /// Frequency exponents over the fixed band.
    pub fn band_frequency_fits(&self) -> Result<Vec<ScalingFit>> {
        self.frequency_fits(self.band.lo, self.band.hi)
    }

    /// Slope of log band power against log window length.
    pub fn time_fit(&self) -> Result<ScalingFit> {
        let ts: Vec<f64> = self.windows.iter().map(|&t| t as f64).collect();
        let ps = self.band_powers();
        if ts.len() < 3 {
            return Err(Error::InsufficientPoints {
                got: ts.len(),
                needed: 3,
            });
        }
        fit_loglog_slope(&ts, &ps, ts[0], ts[ts.len() - 1])
    }

    /// Bin-wise average over realizations sharing windows and band.
    pub fn average(items: &[AgingSpectrum]) -> Result<AgingSpectrum> {
        let first = items
            .first()
            .ok_or_else(|| invalid("items", "no spectra to average"))?;
        if items
            .iter()
            .any(|s| s.windows != first.windows || s.band != first.band)
        {
            return Err(invalid("items", "spectra disagree on windows or band"));
        }
        let spectra = (0..first.windows.len())
            .map(|j| {
                let column: Vec<Periodogram> = items.iter().map(|s| s.spectra[j].clone()).collect();
                Periodogram::mean_of(&column)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AgingSpectrum {
            windows: first.windows.clone(),
            spectra,
            band: first.band,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_fgn, FgnConfig};

    #[test]
    fn band_checks() {
        assert!(FrequencyBand::new(0.0, 0.1).is_err());
        assert!(FrequencyBand::new(0.2, 0.1).is_err());
        assert!(FrequencyBand::new(0.1, 0.6).is_err());
        let b = FrequencyBand::lowest_decade(4096);
        assert!((b.center() - (8.0f64 * 80.0).sqrt() / 4096.0).abs() < 1e-15);
    }

    #[test]
    fn window_validation() {
        let x = gen_fgn(&FgnConfig::new(0.7, 1.0, 8192), 0).unwrap();
        let band = FrequencyBand::lowest_decade(1024);
        assert!(conditional_spectrum(&x, &[1024, 2048, 4096], band).is_ok());
        assert!(conditional_spectrum(&x, &[2048, 1024], band).is_err());
        assert!(conditional_spectrum(&x, &[1024, 16384], band).is_err());
        let narrow = FrequencyBand::new(1.0 / 1024.0, 1.5 / 1024.0).unwrap();
        assert!(conditional_spectrum(&x, &[1024, 2048], narrow).is_err());
    }

    #[test]
    fn each_window_is_a_prefix_periodogram() {
        let x = gen_fgn(&FgnConfig::new(0.6, 1.0, 4096), 2).unwrap();
        let s = conditional_spectrum(&x, &[1024, 2048, 4096], FrequencyBand::lowest_decade(1024))
            .unwrap();
        for (t, p) in s.windows.iter().zip(&s.spectra) {
            let e: f64 = x.values()[..*t].iter().map(|a| a * a).sum();
            assert!((p.total_energy() - e).abs() / e < 1e-8);
            assert_eq!(p.n, *t);
        }
        assert_eq!(s.band_powers().len(), 3);
    }

    #[test]
    fn stationary_spectrum_does_not_age() {
        let cfg = FgnConfig::new(0.8, 1.0, 1 << 15);
        let windows = [1 << 12, 1 << 13, 1 << 14, 1 << 15];
        let band = FrequencyBand::lowest_decade(windows[0]);
        let runs: Vec<AgingSpectrum> = (0..40)
            .map(|s| conditional_spectrum(&gen_fgn(&cfg, s).unwrap(), &windows, band).unwrap())
            .collect();
        let avg = AgingSpectrum::average(&runs).unwrap();
        let t = avg.time_fit().unwrap();
        assert!(t.exponent.abs() < 0.1, "T-slope {}", t.exponent);
        for f in avg.band_frequency_fits().unwrap() {
            assert!((f.exponent + 0.6).abs() < 0.1, "f-slope {}", f.exponent);
        }
    }
}
