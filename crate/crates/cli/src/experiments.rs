//! Named experiments: generators, diagnostics and ensembles wired to fixed
//! tolerances, with every result persisted under one output directory.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use onef_core::diagnostics::{
    dfa, fit_loglog_slope, geometric_windows, gph_estimate, periodogram, reject_powerlaw,
    rescaled_range, AgingSpectrum, Periodogram, PowerLawTest, ScalingFit, POWERLAW_R2_MARGIN,
};
use onef_core::ensemble::{
    ergodicity_breaking, mean_conditional_spectrum, moment_ratio_test, run_ensemble,
    EnsembleResult, MomentRatioTest, MOMENT_RATIO_TOLERANCE,
};
use onef_core::generators::{GeneratorConfig, TrendNoiseConfig};
use onef_core::TimeSeries;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{
    DiagnosticsConfig, EnsembleConfig, Estimator, ExperimentConfig, ExperimentName,
};
use crate::output::{write_csv, write_summary, Cell, Table};

/// R/S and DFA windows per decade.
const WINDOWS_PER_DECADE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

impl Check {
    pub fn between(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            lo,
            hi,
            pass: measured >= lo && measured <= hi,
        }
    }

    pub fn near(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        Self::between(name, measured, target - tol, target + tol)
    }

    pub fn above(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        let mut c = Self::between(name, measured, bound, f64::INFINITY);
        c.pass = measured > bound;
        c
    }

    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        let mut c = Self::between(name, measured, f64::NEG_INFINITY, bound);
        c.pass = measured < bound;
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Passed,
    Failed,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRecord {
    pub estimator: String,
    pub realizations: usize,
    /// Mean over realizations, or the fit of an averaged spectrum.
    pub exponent: f64,
    /// Spread of per-realization exponents, when there are several.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sd_exponent: Option<f64>,
    /// Fit of the first realization, or of the averaged spectrum.
    pub fit: ScalingFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub status: RunStatus,
    pub pass: bool,
    pub config_hash: String,
    pub base_seed: u64,
    pub wall_time_s: f64,
    pub samples_generated: u64,
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub powerlaw: Option<PowerLawTest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_ratio: Option<MomentRatioTest>,
    pub checks: Vec<Check>,
    pub fits: Vec<FitRecord>,
}

impl RunSummary {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn fit(&self, estimator: &str) -> Option<&FitRecord> {
        self.fits.iter().find(|f| f.estimator == estimator)
    }
}

/// SHA-256 of the resolved config, ignoring where the output goes.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut c = cfg.clone();
    c.output_dir = None;
    hex::encode(Sha256::digest(c.to_toml().as_bytes()))
}

struct Run<'a> {
    out: &'a Path,
    started: Instant,
    summary: RunSummary,
}

impl<'a> Run<'a> {
    fn new(experiment: &str, hash: String, base_seed: u64, out: &'a Path) -> Self {
        Self {
            out,
            started: Instant::now(),
            summary: RunSummary {
                experiment: experiment.to_string(),
                status: RunStatus::Error,
                pass: false,
                config_hash: hash,
                base_seed,
                wall_time_s: 0.0,
                samples_generated: 0,
                artifacts: Vec::new(),
                error: None,
                powerlaw: None,
                moment_ratio: None,
                checks: Vec::new(),
                fits: Vec::new(),
            },
        }
    }

    fn prepare(&self) -> Result<()> {
        fs::create_dir_all(self.out)
            .with_context(|| format!("cannot create output directory {}", self.out.display()))
    }

    fn csv(&mut self, file: &str, table: &Table) -> Result<()> {
        write_csv(table, &self.out.join(file))?;
        self.summary.artifacts.push(file.to_string());
        Ok(())
    }

    fn text(&mut self, file: &str, text: &str) -> Result<()> {
        let path = self.out.join(file);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.summary.artifacts.push(file.to_string());
        Ok(())
    }

    fn check(&mut self, c: Check) {
        self.summary.checks.push(c);
    }

    fn finish(mut self, outcome: Result<()>) -> RunSummary {
        self.summary.wall_time_s = self.started.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => {
                self.summary.pass = self.summary.checks.iter().all(|c| c.pass);
                self.summary.status = if self.summary.pass {
                    RunStatus::Passed
                } else {
                    RunStatus::Failed
                };
            }
            Err(e) => {
                self.summary.pass = false;
                self.summary.status = RunStatus::Error;
                self.summary.error = Some(format!("{e:#}"));
            }
        }
        if let Err(e) = write_summary(&self.summary, &self.out.join("summary.toml")) {
            self.summary.pass = false;
            self.summary.status = RunStatus::Error;
            let prior = self.summary.error.take();
            self.summary.error = Some(match prior {
                Some(p) => format!("{p}; {e:#}"),
                None => format!("{e:#}"),
            });
        }
        self.summary
    }
}

fn series_table(x: &TimeSeries) -> Table {
    let mut t = Table::new(&["t", "x"]);
    for (i, v) in x.values().iter().enumerate() {
        t.push(vec![Cell::Float(i as f64 * x.dt()), Cell::Float(*v)]);
    }
    t
}

fn spectra_table(spectra: &[(usize, &Periodogram)]) -> Table {
    let mut t = Table::new(&["freq", "power", "window_T"]);
    for (window, p) in spectra {
        for (f, s) in p.freqs.iter().zip(&p.power) {
            t.push(vec![Cell::Float(*f), Cell::Float(*s), Cell::from(*window)]);
        }
    }
    t
}

fn fits_table(fits: &[FitRecord]) -> Table {
    let mut t = Table::new(&[
        "estimator",
        "realizations",
        "exponent",
        "sd_exponent",
        "intercept",
        "stderr",
        "lo",
        "hi",
        "n_points",
        "r_squared",
        "n_excluded",
    ]);
    for r in fits {
        t.push(vec![
            Cell::from(r.estimator.as_str()),
            Cell::from(r.realizations),
            Cell::Float(r.exponent),
            r.sd_exponent.map_or(Cell::Text(String::new()), Cell::Float),
            Cell::Float(r.fit.intercept),
            Cell::Float(r.fit.stderr),
            Cell::Float(r.fit.lo),
            Cell::Float(r.fit.hi),
            Cell::from(r.fit.n_points),
            Cell::Float(r.fit.r_squared),
            Cell::from(r.fit.n_excluded),
        ]);
    }
    t
}

fn ensemble_table(results: &[(&str, &EnsembleResult)]) -> Table {
    let mut t = Table::new(&[
        "process",
        "window_T",
        "mean",
        "variance",
        "eb",
        "moment_ratio",
    ]);
    let opt = |v: Option<f64>| v.map_or(Cell::Text(String::new()), Cell::Float);
    for (label, r) in results {
        for (j, w) in r.windows.iter().enumerate() {
            t.push(vec![
                Cell::from(*label),
                Cell::from(*w),
                Cell::Float(r.mean[j]),
                Cell::Float(r.variance[j]),
                opt(r.eb[j]),
                opt(r.moment_ratio[j]),
            ]);
        }
    }
    t
}

fn mean_sd(v: &[f64]) -> (f64, Option<f64>) {
    let k = v.len() as f64;
    let m = v.iter().sum::<f64>() / k;
    if v.len() < 2 {
        return (m, None);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0);
    (m, Some(var.sqrt()))
}

/// Single-series estimates for one or more seeds.
struct SeriesEstimates {
    fits: Vec<FitRecord>,
    spectrum: Periodogram,
    first: TimeSeries,
}

fn estimate_one(
    x: &TimeSeries,
    diag: &DiagnosticsConfig,
    estimators: &[Estimator],
) -> Result<(Vec<ScalingFit>, Periodogram)> {
    let windows = geometric_windows(diag.scales[0], diag.scales[1], WINDOWS_PER_DECADE);
    let p = periodogram(x).context("periodogram")?;
    let mut fits = Vec::new();
    for e in estimators {
        let fit = match e {
            Estimator::Rs => rescaled_range(x, &windows).context("R/S")?,
            Estimator::Dfa => dfa(x, &windows, diag.dfa_order).context("DFA")?,
            Estimator::Gph => gph_estimate(&p, Some(diag.gph_bandwidth)).context("GPH")?,
            Estimator::Periodogram => {
                let [lo, hi] = diag.spectrum_band;
                fit_loglog_slope(&p.freqs, &p.power, lo, hi).context("periodogram slope")?
            }
        };
        fits.push(fit);
    }
    Ok((fits, p))
}

fn estimate_series(
    cfg: &ExperimentConfig,
    estimators: &[Estimator],
    suffix: &str,
    prep: impl Fn(TimeSeries) -> Result<TimeSeries>,
) -> Result<SeriesEstimates> {
    let diag = &cfg.diagnostics;
    let mut per: Vec<Vec<ScalingFit>> = Vec::new();
    let mut spectra = Vec::new();
    let mut first = None;
    for i in 0..diag.realizations {
        let seed = cfg.base_seed.wrapping_add(i as u64);
        let x = cfg
            .generator
            .generate(seed)
            .with_context(|| format!("generator {} with seed {seed}", cfg.generator.name()))?;
        let x = prep(x)?;
        let (fits, p) =
            estimate_one(&x, diag, estimators).with_context(|| format!("seed {seed}"))?;
        per.push(fits);
        spectra.push(p);
        first.get_or_insert(x);
    }
    let spectrum = Periodogram::mean_of(&spectra)?;
    let mut fits = Vec::new();
    for (k, e) in estimators.iter().enumerate() {
        let exps: Vec<f64> = per.iter().map(|f| f[k].exponent).collect();
        let (mean, sd) = mean_sd(&exps);
        let (exponent, fit) = if *e == Estimator::Periodogram {
            let [lo, hi] = diag.spectrum_band;
            let fit = fit_loglog_slope(&spectrum.freqs, &spectrum.power, lo, hi)?;
            (fit.exponent, fit)
        } else {
            (mean, per[0][k].clone())
        };
        fits.push(FitRecord {
            estimator: format!("{}{suffix}", e.as_str()),
            realizations: per.len(),
            exponent,
            sd_exponent: sd,
            fit,
        });
    }
    Ok(SeriesEstimates {
        fits,
        spectrum,
        first: first.expect("at least one realization"),
    })
}

fn with_required(configured: &[Estimator], required: &[Estimator]) -> Vec<Estimator> {
    let mut out = configured.to_vec();
    for r in required {
        if !out.contains(r) {
            out.push(*r);
        }
    }
    out
}

/// Residual of an OLS fit on `[1, (offset + t)^-exponent]`.
pub fn remove_trend(x: &TimeSeries, trend: &TrendNoiseConfig) -> Result<TimeSeries> {
    let g: Vec<f64> = (0..x.len())
        .map(|i| (trend.offset + i as f64 + 1.0).powf(-trend.exponent))
        .collect();
    let v = x.values();
    let k = v.len() as f64;
    let (mg, mx) = (g.iter().sum::<f64>() / k, v.iter().sum::<f64>() / k);
    let sgg: f64 = g.iter().map(|a| (a - mg).powi(2)).sum();
    let sgx: f64 = g.iter().zip(v).map(|(a, b)| (a - mg) * (b - mx)).sum();
    if sgg <= 0.0 {
        return Err(anyhow!("trend shape is constant; nothing to regress on"));
    }
    let b = sgx / sgg;
    let a = mx - b * mg;
    Ok(x.map_values("detrend", |v| {
        v.iter().zip(&g).map(|(x, g)| x - a - b * g).collect()
    })?)
}

fn record_series(run: &mut Run, cfg: &ExperimentConfig, est: &SeriesEstimates) -> Result<()> {
    run.summary.samples_generated += (cfg.diagnostics.realizations * cfg.generator.len()) as u64;
    run.summary.fits.extend(est.fits.iter().cloned());
    run.csv("series.csv", &series_table(&est.first))?;
    run.csv(
        "spectra.csv",
        &spectra_table(&[(cfg.generator.len(), &est.spectrum)]),
    )?;
    Ok(())
}

fn exponent_of(run: &Run, estimator: &str) -> f64 {
    run.summary.fit(estimator).map_or(f64::NAN, |f| f.exponent)
}

fn fgn_baseline(run: &mut Run, cfg: &ExperimentConfig) -> Result<()> {
    let GeneratorConfig::Fgn(g) = &cfg.generator else {
        return Err(anyhow!("fgn-baseline needs an fgn generator"));
    };
    let h = g.hurst;
    let est = estimate_series(cfg, &cfg.diagnostics.estimators, "", Ok)?;
    record_series(run, cfg, &est)?;
    for e in &cfg.diagnostics.estimators {
        let measured = exponent_of(run, e.as_str());
        let check = match e {
            Estimator::Rs => Check::near("rs_exponent", measured, h, 0.05),
            Estimator::Dfa => Check::near("dfa_exponent", measured, h, 0.05),
            Estimator::Gph => Check::near("gph_d", measured, h - 0.5, 0.1),
            Estimator::Periodogram => {
                Check::near("spectral_exponent", measured, 1.0 - 2.0 * h, 0.1)
            }
        };
        run.check(check);
    }
    Ok(())
}

fn hurst_without_lrd(run: &mut Run, cfg: &ExperimentConfig) -> Result<()> {
    let GeneratorConfig::TrendNoise(trend) = &cfg.generator else {
        return Err(anyhow!("hurst-without-lrd needs a trend-noise generator"));
    };
    let raw_estimators = with_required(&cfg.diagnostics.estimators, &[Estimator::Rs]);
    let raw = estimate_series(cfg, &raw_estimators, "", Ok)?;
    record_series(run, cfg, &raw)?;
    let residual = estimate_series(cfg, &[Estimator::Gph], "_residual", |x| {
        remove_trend(&x, trend)
    })?;
    run.summary.samples_generated += (cfg.diagnostics.realizations * cfg.generator.len()) as u64;
    run.summary.fits.extend(residual.fits.iter().cloned());
    run.csv("residual.csv", &series_table(&residual.first))?;

    run.check(Check::above("rs_exponent", exponent_of(run, "rs"), 0.6));
    run.check(Check::near(
        "gph_d_residual",
        exponent_of(run, "gph_residual"),
        0.0,
        0.1,
    ));
    Ok(())
}

fn hurst_without_1f(run: &mut Run, cfg: &ExperimentConfig) -> Result<()> {
    if !matches!(cfg.generator, GeneratorConfig::Lorenz(_)) {
        return Err(anyhow!("hurst-without-1f needs a lorenz generator"));
    }
    let estimators = with_required(&cfg.diagnostics.estimators, &[Estimator::Rs]);
    let est = estimate_series(cfg, &estimators, "", Ok)?;
    record_series(run, cfg, &est)?;
    let [lo, hi] = cfg.diagnostics.spectrum_band;
    let test = reject_powerlaw(&est.spectrum.freqs, &est.spectrum.power, lo, hi)?;
    run.check(Check::above("rs_exponent", exponent_of(run, "rs"), 0.55));
    // a power law would need r2_power >= r2_exp + margin
    run.check(Check::below(
        "powerlaw_r2_margin",
        test.r2_power - test.r2_exp,
        POWERLAW_R2_MARGIN,
    ));
    run.summary.powerlaw = Some(test);
    Ok(())
}

struct AgingRun {
    spectrum: AgingSpectrum,
    result: EnsembleResult,
}

fn aging(run: &mut Run, cfg: &ExperimentConfig, ens: &EnsembleConfig) -> Result<AgingRun> {
    let spec = ens.spec(&cfg.generator, cfg.base_seed);
    let result = run_ensemble(&spec).context("ensemble")?;
    let spectrum = mean_conditional_spectrum(&spec).context("conditional spectra")?;
    run.summary.samples_generated += 2 * (ens.n_realizations * cfg.generator.len()) as u64;

    let n = result.n_realizations();
    let band = spectrum.band;
    let freq_fits = spectrum.frequency_fits(band.lo, band.hi)?;
    for (t, fit) in spectrum.windows.iter().zip(&freq_fits) {
        run.summary.fits.push(FitRecord {
            estimator: format!("spectrum_T{t}"),
            realizations: n,
            exponent: fit.exponent,
            sd_exponent: None,
            fit: fit.clone(),
        });
    }
    let tfit = spectrum.time_fit()?;
    run.summary.fits.push(FitRecord {
        estimator: "aging_T".into(),
        realizations: n,
        exponent: tfit.exponent,
        sd_exponent: None,
        fit: tfit,
    });

    let first = cfg.generator.generate(cfg.base_seed)?;
    run.csv("series.csv", &series_table(&first))?;
    let rows: Vec<(usize, &Periodogram)> = spectrum
        .windows
        .iter()
        .copied()
        .zip(spectrum.spectra.iter())
        .collect();
    run.csv("spectra.csv", &spectra_table(&rows))?;
    run.csv("ensemble.csv", &ensemble_table(&[("primary", &result)]))?;
    Ok(AgingRun { spectrum, result })
}

/// Expected frequency and T exponents with their tolerances, when known.
fn aging_targets(g: &GeneratorConfig) -> Option<((f64, f64), (f64, f64))> {
    match g {
        GeneratorConfig::Renewal(r) if r.theta < 1.0 => {
            Some(((r.theta - 2.0, 0.15), (r.theta - 1.0, 0.15)))
        }
        GeneratorConfig::Fgn(f) => Some(((1.0 - 2.0 * f.hurst, 0.1), (0.0, 0.1))),
        _ => None,
    }
}

fn aging_checks(run: &mut Run, cfg: &ExperimentConfig, a: &AgingRun) {
    let Some(((fx, ftol), (tx, ttol))) = aging_targets(&cfg.generator) else {
        return;
    };
    for t in &a.spectrum.windows {
        let name = format!("spectrum_T{t}");
        let measured = exponent_of(run, &name);
        run.check(Check::near(
            format!("frequency_exponent_T{t}"),
            measured,
            fx,
            ftol,
        ));
    }
    run.check(Check::near(
        "time_exponent",
        exponent_of(run, "aging_T"),
        tx,
        ttol,
    ));
}

fn aging_spectrum(run: &mut Run, cfg: &ExperimentConfig) -> Result<()> {
    let ens = cfg
        .ensemble
        .as_ref()
        .ok_or_else(|| anyhow!("aging-spectrum needs an ensemble block"))?;
    let a = aging(run, cfg, ens)?;
    aging_checks(run, cfg, &a);
    Ok(())
}

fn one_f_without_lrd(run: &mut Run, cfg: &ExperimentConfig) -> Result<()> {
    let GeneratorConfig::Renewal(r) = &cfg.generator else {
        return Err(anyhow!("1f-without-lrd needs a renewal generator"));
    };
    let ens = cfg
        .ensemble
        .as_ref()
        .ok_or_else(|| anyhow!("1f-without-lrd needs an ensemble block"))?;
    let a = aging(run, cfg, ens)?;
    aging_checks(run, cfg, &a);
    let eb = ergodicity_breaking(&a.result)?;
    run.check(Check::above("eb", *eb.last().expect("windows"), 0.1));
    let mr = moment_ratio_test(&a.result, r.theta)?;
    run.check(Check::between(
        "moment_ratio",
        mr.measured,
        mr.predicted * (1.0 - MOMENT_RATIO_TOLERANCE),
        mr.predicted * (1.0 + MOMENT_RATIO_TOLERANCE),
    ));
    run.summary.moment_ratio = Some(mr);
    Ok(())
}

fn eb_dichotomy(run: &mut Run, cfg: &ExperimentConfig) -> Result<()> {
    let ens = cfg
        .ensemble
        .as_ref()
        .ok_or_else(|| anyhow!("eb-dichotomy needs an ensemble block"))?;
    let control = cfg
        .control
        .as_ref()
        .ok_or_else(|| anyhow!("eb-dichotomy needs a control generator"))?;
    let primary =
        run_ensemble(&ens.spec(&cfg.generator, cfg.base_seed)).context("primary ensemble")?;
    let other = run_ensemble(&ens.spec(control, cfg.base_seed)).context("control ensemble")?;
    run.summary.samples_generated +=
        (ens.n_realizations * (cfg.generator.len() + control.len())) as u64;
    run.csv(
        "ensemble.csv",
        &ensemble_table(&[("primary", &primary), ("control", &other)]),
    )?;
    let eb_p = ergodicity_breaking(&primary).context("primary")?;
    let eb_c = ergodicity_breaking(&other).context("control")?;
    run.check(Check::above(
        "eb_primary",
        *eb_p.last().expect("windows"),
        0.1,
    ));
    run.check(Check::below(
        "eb_control",
        *eb_c.last().expect("windows"),
        0.1,
    ));
    Ok(())
}

fn custom(run: &mut Run, cfg: &ExperimentConfig) -> Result<()> {
    let est = estimate_series(cfg, &cfg.diagnostics.estimators, "", Ok)?;
    record_series(run, cfg, &est)?;
    if let Some(ens) = &cfg.ensemble {
        aging(run, cfg, ens)?;
    }
    Ok(())
}

/// Runs a validated experiment, writing artifacts and `summary.toml` into `out`.
/// Errors are reported in the returned summary, which is still written.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> RunSummary {
    let mut run = Run::new(
        cfg.experiment.as_str(),
        config_hash(cfg),
        cfg.base_seed,
        out,
    );
    let outcome = (|| {
        cfg.validate()?;
        run.prepare()?;
        run.text("config.toml", &cfg.to_toml())?;
        match cfg.experiment {
            ExperimentName::FgnBaseline => fgn_baseline(&mut run, cfg),
            ExperimentName::HurstWithoutLrd => hurst_without_lrd(&mut run, cfg),
            ExperimentName::HurstWithout1f => hurst_without_1f(&mut run, cfg),
            ExperimentName::AgingSpectrum => aging_spectrum(&mut run, cfg),
            ExperimentName::OneFWithoutLrd => one_f_without_lrd(&mut run, cfg),
            ExperimentName::EbDichotomy => eb_dichotomy(&mut run, cfg),
            ExperimentName::Custom => custom(&mut run, cfg),
        }?;
        if !run.summary.fits.is_empty() {
            let fits = fits_table(&run.summary.fits);
            run.csv("fits.csv", &fits)?;
        }
        Ok(())
    })();
    run.finish(outcome)
}

/// Writes one realization of the configured generator.
pub fn generate_series(cfg: &ExperimentConfig, out: &Path) -> RunSummary {
    let mut run = Run::new("generate", config_hash(cfg), cfg.base_seed, out);
    let outcome = (|| {
        cfg.generator.validate()?;
        run.prepare()?;
        run.text("config.toml", &cfg.to_toml())?;
        let x = cfg.generator.generate(cfg.base_seed)?;
        run.summary.samples_generated = x.len() as u64;
        run.csv("series.csv", &series_table(&x))
    })();
    run.finish(outcome)
}

/// Applies the configured estimators to an imported series.
pub fn analyze_series(
    values: Vec<f64>,
    source: &str,
    diag: &DiagnosticsConfig,
    out: &Path,
) -> RunSummary {
    let text = toml::to_string(diag).unwrap_or_default();
    let hash = hex::encode(Sha256::digest(text.as_bytes()));
    let mut run = Run::new("analyze", hash, 0, out);
    let outcome = (|| {
        let x = TimeSeries::imported(values, source)?;
        diag.validate(x.len())?;
        run.prepare()?;
        run.text("diagnostics.toml", &text)?;
        let (fits, p) = estimate_one(&x, diag, &diag.estimators)?;
        for (e, fit) in diag.estimators.iter().zip(fits) {
            run.summary.fits.push(FitRecord {
                estimator: e.as_str().to_string(),
                realizations: 1,
                exponent: fit.exponent,
                sd_exponent: None,
                fit,
            });
        }
        let fits = fits_table(&run.summary.fits);
        run.csv("fits.csv", &fits)?;
        run.csv("spectra.csv", &spectra_table(&[(x.len(), &p)]))
    })();
    run.finish(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_bounds() {
        assert!(Check::near("a", 0.55, 0.5, 0.05).pass);
        assert!(!Check::near("a", 0.56, 0.5, 0.05).pass);
        assert!(!Check::near("a", f64::NAN, 0.5, 0.05).pass);
        assert!(Check::above("a", 0.61, 0.6).pass);
        assert!(!Check::above("a", 0.6, 0.6).pass);
        assert!(Check::below("a", 0.09, 0.1).pass);
        assert!(!Check::below("a", f64::NAN, 0.1).pass);
    }

    #[test]
    fn trend_removal_is_exact_on_pure_trend() {
        let trend = TrendNoiseConfig {
            amplitude: 5.0,
            offset: 1.0,
            exponent: 0.3,
            sigma: 1.0,
            n: 500,
        };
        let values: Vec<f64> = (0..500).map(|i| 2.0 + trend.trend_at(i)).collect();
        let x = TimeSeries::imported(values, "trend").unwrap();
        let r = remove_trend(&x, &trend).unwrap();
        assert!(r.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn mean_sd_of_one_has_no_spread() {
        assert_eq!(mean_sd(&[2.0]), (2.0, None));
        let (m, s) = mean_sd(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s.unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }
}
