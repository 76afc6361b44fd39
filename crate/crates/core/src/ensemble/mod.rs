//! Multi-realization experiments: ergodicity breaking, prefactor scatter and
//! aging exponents.
//!
//! Realizations run in parallel; every reduction walks the results in seed
//! order so the output does not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::diagnostics::{
    conditional_spectrum, empirical_acf, fit_loglog_slope, periodogram_of, AgingSpectrum,
    FrequencyBand, ScalingFit, MIN_BAND_BINS, MIN_PERIODOGRAM_LEN,
};
use crate::error::{invalid, Error, Result};
use crate::generators::GeneratorConfig;
use crate::series::TimeSeries;

/// Realizations required before a variance-based statistic is reported.
pub const MIN_EB_REALIZATIONS: usize = 30;
/// Largest tolerated fraction of failed realizations.
pub const MAX_DROP_FRACTION: f64 = 0.10;
/// Relative tolerance of the moment-ratio comparison.
pub const MOMENT_RATIO_TOLERANCE: f64 = 0.20;
pub const DEFAULT_BUDGET: u64 = 4_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Observable {
    /// Mean spectral density of `x[0..T]` inside a fixed band.
    BandPower { lo: f64, hi: f64 },
    /// Sample autocorrelation of `x[0..T]` at a fixed lag.
    AcfAtLag { lag: usize },
    /// Time average of `x[0..T]`.
    TimeMean,
}

impl Observable {
    pub fn band_power(band: FrequencyBand) -> Self {
        Observable::BandPower {
            lo: band.lo,
            hi: band.hi,
        }
    }

    pub fn band(&self) -> Option<FrequencyBand> {
        match *self {
            Observable::BandPower { lo, hi } => Some(FrequencyBand { lo, hi }),
            _ => None,
        }
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match *self {
            Observable::BandPower { lo, hi } => {
                periodogram_of(x)?.band_mean(lo, hi).ok_or_else(|| {
                    invalid(
                        "band",
                        format!("no bins in [{lo}, {hi}] at T = {}", x.len()),
                    )
                })
            }
            Observable::AcfAtLag { lag } => {
                let s = TimeSeries::imported(x.to_vec(), "window")?;
                Ok(empirical_acf(&s, lag)?[lag])
            }
            Observable::TimeMean => Ok(x.iter().sum::<f64>() / x.len() as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSchedule {
    /// Realization `i` uses `base_seed + i`.
    #[default]
    Sequential,
    /// Every realization reuses `base_seed`.
    Repeated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub generator: GeneratorConfig,
    pub n_realizations: usize,
    pub base_seed: u64,
    /// Observation windows `T`, strictly increasing, at most the generator length.
    pub windows: Vec<usize>,
    pub observable: Observable,
    pub seed_schedule: SeedSchedule,
    /// Upper bound on generated samples, `n_realizations * len`.
    pub budget: u64,
}

impl EnsembleSpec {
    pub fn new(
        generator: GeneratorConfig,
        n_realizations: usize,
        base_seed: u64,
        windows: Vec<usize>,
        observable: Observable,
    ) -> Self {
        Self {
            generator,
            n_realizations,
            base_seed,
            windows,
            observable,
            seed_schedule: SeedSchedule::Sequential,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn seed(&self, index: usize) -> u64 {
        match self.seed_schedule {
            SeedSchedule::Sequential => self.base_seed.wrapping_add(index as u64),
            SeedSchedule::Repeated => self.base_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if self.n_realizations < 2 {
            return Err(invalid(
                "n_realizations",
                format!("need at least 2, got {}", self.n_realizations),
            ));
        }
        if self.windows.is_empty() || self.windows.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid(
                "windows",
                "must be non-empty and strictly increasing",
            ));
        }
        let len = self.generator.len();
        let last = *self.windows.last().expect("non-empty");
        if last > len {
            return Err(invalid(
                "windows",
                format!("largest window {last} exceeds generated length {len}"),
            ));
        }
        let first = self.windows[0];
        match self.observable {
            Observable::BandPower { lo, hi } => {
                let band = FrequencyBand::new(lo, hi)?;
                if first < MIN_PERIODOGRAM_LEN {
                    return Err(invalid(
                        "windows",
                        format!("window {first} too short for a periodogram"),
                    ));
                }
                let bins = (1..=first / 2)
                    .map(|k| k as f64 / first as f64)
                    .filter(|f| *f >= band.lo && *f <= band.hi)
                    .count();
                if bins < MIN_BAND_BINS {
                    return Err(invalid(
                        "band",
                        format!("only {bins} bins at the smallest window {first}"),
                    ));
                }
            }
            Observable::AcfAtLag { lag } => {
                if lag == 0 || 2 * lag >= first {
                    return Err(invalid(
                        "lag",
                        format!("need 0 < lag < {}/2, got {lag}", first),
                    ));
                }
            }
            Observable::TimeMean => {}
        }
        let required = self.n_realizations as u64 * len as u64;
        if required > self.budget {
            return Err(Error::BudgetExceeded {
                required,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedRealization {
    pub index: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub windows: Vec<usize>,
    pub observable: Observable,
    /// Seeds of the surviving realizations, in schedule order.
    pub seeds: Vec<u64>,
    /// `per_realization[r][w]`: observable of realization `r` at window `w`.
    pub per_realization: Vec<Vec<f64>>,
    pub dropped: Vec<DroppedRealization>,
    pub mean: Vec<f64>,
    /// Population variance (divisor = number of realizations).
    pub variance: Vec<f64>,
    pub second_moment: Vec<f64>,
    /// `variance / mean^2`; `None` where the mean vanishes.
    pub eb: Vec<Option<f64>>,
    /// `<A^2> / <A>^2`; `None` where the mean vanishes.
    pub moment_ratio: Vec<Option<f64>>,
}

impl EnsembleResult {
    pub fn n_realizations(&self) -> usize {
        self.per_realization.len()
    }

    /// Observable values across realizations at window index `w`.
    pub fn column(&self, w: usize) -> Vec<f64> {
        self.per_realization.iter().map(|r| r[w]).collect()
    }
}

fn aggregate(
    spec: &EnsembleSpec,
    seeds: Vec<u64>,
    rows: Vec<Vec<f64>>,
    dropped: Vec<DroppedRealization>,
) -> EnsembleResult {
    let k = rows.len() as f64;
    let nw = spec.windows.len();
    let mut mean = vec![0.0; nw];
    let mut second = vec![0.0; nw];
    let mut variance = vec![0.0; nw];
    for j in 0..nw {
        // deviations from the first row keep identical realizations at exactly zero spread
        let origin = rows[0][j];
        let shift = rows.iter().map(|r| r[j] - origin).sum::<f64>() / k;
        variance[j] = rows
            .iter()
            .map(|r| (r[j] - origin - shift).powi(2))
            .sum::<f64>()
            / k;
        mean[j] = rows.iter().map(|r| r[j]).sum::<f64>() / k;
        second[j] = rows.iter().map(|r| r[j] * r[j]).sum::<f64>() / k;
    }
    let nonzero = |j: usize| second[j] > 0.0 && mean[j].abs() > 1e-12 * second[j].sqrt();
    let eb: Vec<Option<f64>> = (0..nw)
        .map(|j| nonzero(j).then(|| variance[j] / (mean[j] * mean[j])))
        .collect();
    // <A^2>/<A>^2 = 1 + Var/<A>^2 with the population variance
    let moment_ratio = eb.iter().map(|e| e.map(|v| 1.0 + v)).collect();
    EnsembleResult {
        windows: spec.windows.clone(),
        observable: spec.observable,
        seeds,
        per_realization: rows,
        dropped,
        mean,
        variance,
        second_moment: second,
        eb,
        moment_ratio,
    }
}

fn realize(spec: &EnsembleSpec, seed: u64) -> Result<Vec<f64>> {
    let x = spec.generator.generate(seed)?;
    spec.windows
        .iter()
        .map(|&t| spec.observable.evaluate(&x.values()[..t]))
        .collect()
}

/// Generates every realization, evaluates the observable at each window and
/// aggregates across realizations. Failed realizations are dropped; more than
/// 10% failures abort the run.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    spec.validate()?;
    let outcomes: Vec<(usize, u64, Result<Vec<f64>>)> = (0..spec.n_realizations)
        .into_par_iter()
        .map(|i| {
            let seed = spec.seed(i);
            (i, seed, realize(spec, seed))
        })
        .collect();

    let mut seeds = Vec::with_capacity(outcomes.len());
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut dropped = Vec::new();
    for (index, seed, outcome) in outcomes {
        match outcome {
            Ok(row) => {
                seeds.push(seed);
                rows.push(row);
            }
            Err(e) => dropped.push(DroppedRealization {
                index,
                seed,
                error: e.to_string(),
            }),
        }
    }
    let total = spec.n_realizations;
    if dropped.len() as f64 > MAX_DROP_FRACTION * total as f64 || rows.len() < 2 {
        return Err(Error::TooManyDrops {
            dropped: dropped.len(),
            total,
            first: dropped.first().map(|d| d.error.clone()).unwrap_or_default(),
        });
    }
    Ok(aggregate(spec, seeds, rows, dropped))
}

/// Ergodicity-breaking parameter `Var(A) / <A>^2` per window.
pub fn ergodicity_breaking(result: &EnsembleResult) -> Result<Vec<f64>> {
    if result.n_realizations() < MIN_EB_REALIZATIONS {
        return Err(Error::InsufficientPoints {
            got: result.n_realizations(),
            needed: MIN_EB_REALIZATIONS,
        });
    }
    result
        .eb
        .iter()
        .zip(&result.windows)
        .map(|(eb, &window)| eb.ok_or(Error::ZeroMean { window }))
        .collect()
}

/// Second-moment ratio `<M^2>/<M>^2 = 2 Gamma(1+theta)^2 / Gamma(1+2 theta)`
/// of a Mittag-Leffler variable of index `theta`.
pub fn mittag_leffler_moment_ratio(theta: f64) -> f64 {
    2.0 * gamma(1.0 + theta).powi(2) / gamma(1.0 + 2.0 * theta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRatioTest {
    pub window: usize,
    pub measured: f64,
    pub predicted: f64,
    pub pass: bool,
}

/// Compares the measured band-power moment ratio at the largest window with
/// the Mittag-Leffler prediction, passing within 20% relative.
pub fn moment_ratio_test(result: &EnsembleResult, theta: f64) -> Result<MomentRatioTest> {
    if !matches!(result.observable, Observable::BandPower { .. }) {
        return Err(invalid("observable", "moment-ratio test needs band power"));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(invalid("theta", format!("must lie in (0, 1), got {theta}")));
    }
    let eb = ergodicity_breaking(result)?;
    let last = eb.len() - 1;
    let measured = result.moment_ratio[last].expect("checked by ergodicity_breaking");
    let predicted = mittag_leffler_moment_ratio(theta);
    Ok(MomentRatioTest {
        window: result.windows[last],
        measured,
        predicted,
        pass: (measured / predicted - 1.0).abs() <= MOMENT_RATIO_TOLERANCE,
    })
}

/// Slope of log ensemble-mean band power against log window length.
pub fn aging_exponent(spec: &EnsembleSpec) -> Result<ScalingFit> {
    if !matches!(spec.observable, Observable::BandPower { .. }) {
        return Err(invalid("observable", "aging exponent needs band power"));
    }
    let result = run_ensemble(spec)?;
    time_scaling(&result)
}

/// T-scaling fit of the ensemble mean stored in `result`.
pub fn time_scaling(result: &EnsembleResult) -> Result<ScalingFit> {
    let ts: Vec<f64> = result.windows.iter().map(|&t| t as f64).collect();
    if ts.len() < 3 {
        return Err(Error::InsufficientPoints {
            got: ts.len(),
            needed: 3,
        });
    }
    fit_loglog_slope(&ts, &result.mean, ts[0], ts[ts.len() - 1])
}

/// Realization-averaged conditional spectrum over the spec's seeds and windows.
/// The band comes from a band-power observable, or the lowest decade otherwise.
pub fn mean_conditional_spectrum(spec: &EnsembleSpec) -> Result<AgingSpectrum> {
    spec.validate()?;
    let band = spec
        .observable
        .band()
        .unwrap_or_else(|| FrequencyBand::lowest_decade(spec.windows[0]));
    let runs = (0..spec.n_realizations)
        .into_par_iter()
        .map(|i| {
            let x = spec.generator.generate(spec.seed(i))?;
            conditional_spectrum(&x, &spec.windows, band)
        })
        .collect::<Result<Vec<_>>>()?;
    AgingSpectrum::average(&runs)
}
