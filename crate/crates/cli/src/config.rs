//! Experiment configuration in TOML.
//!
//! Parsing fills every default explicitly, so serializing a parsed config
//! yields a complete document that parses back to the same value.

use std::fmt;
use std::str::FromStr;

use onef_core::diagnostics::{default_bandwidth, FrequencyBand, MIN_RS_WINDOW};
use onef_core::ensemble::{EnsembleSpec, Observable, SeedSchedule, DEFAULT_BUDGET};
use onef_core::generators::{
    FgnConfig, GeneratorConfig, LorenzConfig, RenewalConfig, TrendNoiseConfig,
};
use onef_core::Error as CoreError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn at(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

fn from_core(prefix: &str, e: CoreError) -> ConfigError {
    match e {
        CoreError::InvalidParameter { name, reason } => at(format!("{prefix}.{name}"), reason),
        CoreError::BudgetExceeded { .. } => at(format!("{prefix}.budget"), e.to_string()),
        other => at(prefix, other.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentName {
    #[serde(rename = "hurst-without-lrd")]
    HurstWithoutLrd,
    #[serde(rename = "hurst-without-1f")]
    HurstWithout1f,
    #[serde(rename = "1f-without-lrd")]
    OneFWithoutLrd,
    #[serde(rename = "fgn-baseline")]
    FgnBaseline,
    #[serde(rename = "aging-spectrum")]
    AgingSpectrum,
    #[serde(rename = "eb-dichotomy")]
    EbDichotomy,
    #[serde(rename = "custom")]
    Custom,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 7] = [
        ExperimentName::HurstWithoutLrd,
        ExperimentName::HurstWithout1f,
        ExperimentName::OneFWithoutLrd,
        ExperimentName::FgnBaseline,
        ExperimentName::AgingSpectrum,
        ExperimentName::EbDichotomy,
        ExperimentName::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::HurstWithoutLrd => "hurst-without-lrd",
            ExperimentName::HurstWithout1f => "hurst-without-1f",
            ExperimentName::OneFWithoutLrd => "1f-without-lrd",
            ExperimentName::FgnBaseline => "fgn-baseline",
            ExperimentName::AgingSpectrum => "aging-spectrum",
            ExperimentName::EbDichotomy => "eb-dichotomy",
            ExperimentName::Custom => "custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentName::HurstWithoutLrd => {
                "decaying trend plus white noise: R/S J > 0.6, GPH on detrended residual |d| < 0.1"
            }
            ExperimentName::HurstWithout1f => {
                "Lorenz x-component: R/S J > 0.55 over 10..1000, spectrum not a power law"
            }
            ExperimentName::OneFWithoutLrd => {
                "renewal theta=0.5: f-slope theta-2, T-slope theta-1, EB > 0.1, Mittag-Leffler ratio"
            }
            ExperimentName::FgnBaseline => "fGn: R/S, DFA and GPH recover the Hurst exponent",
            ExperimentName::AgingSpectrum => {
                "window-conditioned spectra across seeds: frequency and T exponents"
            }
            ExperimentName::EbDichotomy => {
                "ergodicity breaking: renewal EB > 0.1 > fGn EB at the largest window"
            }
            ExperimentName::Custom => "any generator and estimators, no tolerances",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|e| e.as_str()).collect();
                format!(
                    "unknown experiment `{s}`; expected one of {}",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Rs,
    Dfa,
    Gph,
    Periodogram,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Rs => "rs",
            Estimator::Dfa => "dfa",
            Estimator::Gph => "gph",
            Estimator::Periodogram => "periodogram",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub estimators: Vec<Estimator>,
    /// Seeds `base_seed..base_seed + realizations` averaged by single-series estimators.
    pub realizations: usize,
    /// Smallest and largest R/S and DFA window.
    pub scales: [usize; 2],
    pub dfa_order: usize,
    pub gph_bandwidth: usize,
    /// Frequency range of the periodogram slope fit.
    pub spectrum_band: [f64; 2],
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagnostics {
    estimators: Option<Vec<Estimator>>,
    realizations: Option<usize>,
    scales: Option<[usize; 2]>,
    dfa_order: Option<usize>,
    gph_bandwidth: Option<usize>,
    spectrum_band: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_realizations: usize,
    pub windows: Vec<usize>,
    pub budget: u64,
    pub observable: Observable,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    n_realizations: Option<usize>,
    windows: Option<Vec<usize>>,
    budget: Option<u64>,
    observable: Option<Observable>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentName,
    base_seed: Option<u64>,
    output_dir: Option<String>,
    generator: Option<GeneratorConfig>,
    control: Option<GeneratorConfig>,
    diagnostics: Option<RawDiagnostics>,
    ensemble: Option<RawEnsemble>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentName,
    pub base_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub generator: GeneratorConfig,
    /// Second process compared against `generator` (eb-dichotomy).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<GeneratorConfig>,
    pub diagnostics: DiagnosticsConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
}

fn default_generator(name: ExperimentName) -> Option<GeneratorConfig> {
    Some(match name {
        ExperimentName::HurstWithoutLrd => GeneratorConfig::TrendNoise(TrendNoiseConfig {
            amplitude: 10.0,
            ..Default::default()
        }),
        ExperimentName::HurstWithout1f => GeneratorConfig::Lorenz(LorenzConfig::default()),
        ExperimentName::OneFWithoutLrd | ExperimentName::EbDichotomy => {
            GeneratorConfig::Renewal(RenewalConfig::default())
        }
        ExperimentName::FgnBaseline => GeneratorConfig::Fgn(FgnConfig::default()),
        ExperimentName::AgingSpectrum => GeneratorConfig::Fgn(FgnConfig::new(0.8, 1.0, 1 << 16)),
        ExperimentName::Custom => return None,
    })
}

fn default_control(name: ExperimentName) -> Option<GeneratorConfig> {
    match name {
        ExperimentName::EbDichotomy => {
            Some(GeneratorConfig::Fgn(FgnConfig::new(0.7, 1.0, 1 << 16)))
        }
        _ => None,
    }
}

fn default_estimators(name: ExperimentName) -> Vec<Estimator> {
    match name {
        ExperimentName::HurstWithoutLrd => vec![Estimator::Rs, Estimator::Gph],
        ExperimentName::HurstWithout1f => vec![Estimator::Rs, Estimator::Periodogram],
        ExperimentName::FgnBaseline => vec![Estimator::Rs, Estimator::Dfa, Estimator::Gph],
        ExperimentName::OneFWithoutLrd
        | ExperimentName::AgingSpectrum
        | ExperimentName::EbDichotomy => vec![],
        ExperimentName::Custom => vec![
            Estimator::Rs,
            Estimator::Dfa,
            Estimator::Gph,
            Estimator::Periodogram,
        ],
    }
}

impl DiagnosticsConfig {
    /// Defaults for a series of length `n`.
    pub fn for_length(n: usize) -> Self {
        let nf = n as f64;
        Self {
            estimators: default_estimators(ExperimentName::Custom),
            realizations: 1,
            scales: [16, (n / 4).max(16)],
            dfa_order: 1,
            gph_bandwidth: default_bandwidth(n),
            spectrum_band: [(10.0 / nf).min(0.05), 0.1],
        }
    }

    fn resolve(raw: RawDiagnostics, name: ExperimentName, n: usize) -> Self {
        let mut d = Self::for_length(n);
        d.estimators = default_estimators(name);
        match name {
            ExperimentName::HurstWithoutLrd | ExperimentName::FgnBaseline => d.realizations = 20,
            ExperimentName::HurstWithout1f => {
                d.scales = [10, 1000];
                d.spectrum_band = [0.12, 0.48];
            }
            _ => {}
        }
        Self {
            estimators: raw.estimators.unwrap_or(d.estimators),
            realizations: raw.realizations.unwrap_or(d.realizations),
            scales: raw.scales.unwrap_or(d.scales),
            dfa_order: raw.dfa_order.unwrap_or(d.dfa_order),
            gph_bandwidth: raw.gph_bandwidth.unwrap_or(d.gph_bandwidth),
            spectrum_band: raw.spectrum_band.unwrap_or(d.spectrum_band),
        }
    }

    /// Checks the block against a series of length `n`.
    pub fn validate(&self, n: usize) -> Result<(), ConfigError> {
        if self.realizations == 0 {
            return Err(at("diagnostics.realizations", "must be at least 1"));
        }
        let [lo, hi] = self.scales;
        if lo < MIN_RS_WINDOW || hi <= lo || hi > n / 4 {
            return Err(at(
                "diagnostics.scales",
                format!(
                    "need {MIN_RS_WINDOW} <= lo < hi <= n/4 = {}, got [{lo}, {hi}]",
                    n / 4
                ),
            ));
        }
        if !(1..=2).contains(&self.dfa_order) {
            return Err(at(
                "diagnostics.dfa_order",
                format!("must be 1 or 2, got {}", self.dfa_order),
            ));
        }
        if self.gph_bandwidth < 3 || self.gph_bandwidth > n / 2 {
            return Err(at(
                "diagnostics.gph_bandwidth",
                format!("need 3 <= m <= n/2 = {}, got {}", n / 2, self.gph_bandwidth),
            ));
        }
        let [flo, fhi] = self.spectrum_band;
        FrequencyBand::new(flo, fhi).map_err(|e| from_core("diagnostics.spectrum_band", e))?;
        Ok(())
    }
}

impl EnsembleConfig {
    fn resolve(raw: RawEnsemble, name: ExperimentName, n: usize) -> Self {
        let n_realizations = raw.n_realizations.unwrap_or(match name {
            ExperimentName::EbDichotomy => 100,
            _ => 200,
        });
        // five doubling windows ending at the series length
        let windows = raw
            .windows
            .unwrap_or_else(|| (0..5).rev().map(|k| n >> k).filter(|&t| t > 0).collect());
        let observable = raw.observable.unwrap_or_else(|| {
            Observable::band_power(FrequencyBand::lowest_decade(
                windows.first().copied().unwrap_or(1),
            ))
        });
        Self {
            n_realizations,
            windows,
            budget: raw.budget.unwrap_or(DEFAULT_BUDGET),
            observable,
        }
    }

    /// Ensemble over `generator` with seeds starting at `base_seed`.
    pub fn spec(&self, generator: &GeneratorConfig, base_seed: u64) -> EnsembleSpec {
        EnsembleSpec {
            generator: generator.clone(),
            n_realizations: self.n_realizations,
            base_seed,
            windows: self.windows.clone(),
            observable: self.observable,
            seed_schedule: SeedSchedule::Sequential,
            budget: self.budget,
        }
    }
}

fn needs_ensemble(name: ExperimentName) -> bool {
    matches!(
        name,
        ExperimentName::OneFWithoutLrd
            | ExperimentName::AgingSpectrum
            | ExperimentName::EbDichotomy
    )
}

impl ExperimentConfig {
    /// The named experiment with every default filled.
    pub fn named(name: ExperimentName) -> Result<Self, ConfigError> {
        parse_config(&format!("experiment = \"{name}\"\n"))
    }

    /// A custom experiment over `generator` with default diagnostics.
    pub fn custom(generator: GeneratorConfig) -> Result<Self, ConfigError> {
        let n = generator.len();
        let name = ExperimentName::Custom;
        let cfg = Self {
            experiment: name,
            base_seed: 0,
            output_dir: None,
            generator,
            control: None,
            diagnostics: DiagnosticsConfig::resolve(RawDiagnostics::default(), name, n),
            ensemble: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    /// Checks parameter ranges and the blocks each experiment relies on.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.generator
            .validate()
            .map_err(|e| from_core("generator", e))?;
        if let Some(c) = &self.control {
            c.validate().map_err(|e| from_core("control", e))?;
        }
        let n = self.generator.len();
        self.diagnostics.validate(n)?;
        if let Some(ens) = &self.ensemble {
            self.check_ensemble(ens)?;
        }

        let process = self.generator.name();
        let require = |ok: bool, wanted: &str| {
            if ok {
                Ok(())
            } else {
                Err(at(
                    "generator.process",
                    format!(
                        "experiment {} needs {wanted}, got {process}",
                        self.experiment
                    ),
                ))
            }
        };
        match self.experiment {
            ExperimentName::HurstWithoutLrd => require(
                matches!(self.generator, GeneratorConfig::TrendNoise(_)),
                "trend-noise",
            )?,
            ExperimentName::HurstWithout1f => require(
                matches!(self.generator, GeneratorConfig::Lorenz(_)),
                "lorenz",
            )?,
            ExperimentName::FgnBaseline => {
                require(matches!(self.generator, GeneratorConfig::Fgn(_)), "fgn")?
            }
            ExperimentName::OneFWithoutLrd => match &self.generator {
                GeneratorConfig::Renewal(r) if r.theta < 1.0 => {}
                GeneratorConfig::Renewal(r) => {
                    return Err(at(
                        "generator.theta",
                        format!(
                            "experiment {} needs theta < 1, got {}",
                            self.experiment, r.theta
                        ),
                    ))
                }
                _ => require(false, "renewal")?,
            },
            _ => {}
        }
        if self.experiment == ExperimentName::EbDichotomy && self.control.is_none() {
            return Err(at("control", "eb-dichotomy needs a control generator"));
        }
        if needs_ensemble(self.experiment) && self.ensemble.is_none() {
            return Err(at(
                "ensemble",
                format!("experiment {} needs an ensemble block", self.experiment),
            ));
        }
        Ok(())
    }

    fn check_ensemble(&self, ens: &EnsembleConfig) -> Result<(), ConfigError> {
        ens.spec(&self.generator, self.base_seed)
            .validate()
            .map_err(|e| from_core("ensemble", e))?;
        if let Some(c) = &self.control {
            ens.spec(c, self.base_seed)
                .validate()
                .map_err(|e| from_core("ensemble", e))?;
        }
        Ok(())
    }
}

/// Parses, fills defaults and validates a TOML experiment config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = toml::de::Deserializer::parse(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        let inner = inner.trim_end().to_string();
        if path == "." {
            ConfigError::Syntax(inner)
        } else {
            at(path, inner)
        }
    })?;

    let name = raw.experiment;
    let generator = match raw.generator.or_else(|| default_generator(name)) {
        Some(g) => g,
        None => {
            return Err(at(
                "generator",
                format!("experiment {name} needs a generator block"),
            ))
        }
    };
    let n = generator.len();
    let control = raw.control.or_else(|| default_control(name));
    let diagnostics = DiagnosticsConfig::resolve(raw.diagnostics.unwrap_or_default(), name, n);
    let ensemble = match raw.ensemble {
        Some(e) => Some(EnsembleConfig::resolve(e, name, n)),
        None if needs_ensemble(name) => {
            Some(EnsembleConfig::resolve(RawEnsemble::default(), name, n))
        }
        None => None,
    };
    let cfg = ExperimentConfig {
        experiment: name,
        base_seed: raw.base_seed.unwrap_or(0),
        output_dir: raw.output_dir,
        generator,
        control,
        diagnostics,
        ensemble,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_baseline_fills_defaults() {
        let cfg = parse_config("experiment = \"fgn-baseline\"").unwrap();
        match &cfg.generator {
            GeneratorConfig::Fgn(f) => {
                assert_eq!(f.n, 1 << 14);
                assert_eq!(f.hurst, 0.7);
            }
            other => panic!("wrong generator {other:?}"),
        }
        let echoed = cfg.to_toml();
        assert!(echoed.contains("hurst = 0.7"));
        assert!(echoed.contains("n = 16384"));
        assert!(echoed.contains("realizations = 20"));
    }

    #[test]
    fn every_named_default_round_trips() {
        for name in ExperimentName::ALL {
            if name == ExperimentName::Custom {
                continue;
            }
            let cfg = ExperimentConfig::named(name).unwrap();
            let again = parse_config(&cfg.to_toml()).unwrap();
            assert_eq!(cfg, again, "{name}");
            assert_eq!(cfg.to_toml(), again.to_toml());
        }
    }

    #[test]
    fn theta_out_of_range_names_key_and_interval() {
        let text =
            "experiment = \"aging-spectrum\"\n[generator]\nprocess = \"renewal\"\ntheta = 2.5\n";
        let err = parse_config(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("generator.theta"), "{msg}");
        assert!(msg.contains("(0, 2)"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let err =
            parse_config("experiment = \"fgn-baseline\"\n[diagnostics]\nwindow = 3\n").unwrap_err();
        assert!(err.to_string().starts_with("diagnostics"), "{err}");
        assert!(err.to_string().contains("window"), "{err}");

        let err = parse_config("experiment = \"fgn-baseline\"\ncolour = 1\n").unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");

        let err = parse_config(
            "experiment = \"fgn-baseline\"\n[generator]\nprocess = \"fgn\"\nhurts = 0.7\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("hurts"), "{err}");
    }

    #[test]
    fn missing_blocks_are_reported() {
        let err = parse_config("experiment = \"custom\"").unwrap_err();
        assert!(err.to_string().starts_with("generator:"), "{err}");
        let err = parse_config("base_seed = 3").unwrap_err();
        assert!(err.to_string().contains("experiment"), "{err}");
    }

    #[test]
    fn experiment_requirements() {
        let text = "experiment = \"hurst-without-1f\"\n[generator]\nprocess = \"fgn\"\n";
        assert!(parse_config(text)
            .unwrap_err()
            .to_string()
            .starts_with("generator.process"));
        let text =
            "experiment = \"1f-without-lrd\"\n[generator]\nprocess = \"renewal\"\ntheta = 1.5\n";
        assert!(parse_config(text)
            .unwrap_err()
            .to_string()
            .starts_with("generator.theta"));
    }

    #[test]
    fn ensemble_errors_carry_the_block() {
        let text = "experiment = \"aging-spectrum\"\n[ensemble]\nn_realizations = 1\n";
        let msg = parse_config(text).unwrap_err().to_string();
        assert!(msg.starts_with("ensemble.n_realizations"), "{msg}");
        let text = "experiment = \"aging-spectrum\"\n[ensemble]\nbudget = 10\n";
        let msg = parse_config(text).unwrap_err().to_string();
        assert!(msg.starts_with("ensemble.budget"), "{msg}");
    }

    #[test]
    fn scales_are_bounded_by_length() {
        let text = "experiment = \"fgn-baseline\"\n[generator]\nprocess = \"fgn\"\nn = 1024\n[diagnostics]\nscales = [16, 512]\n";
        let msg = parse_config(text).unwrap_err().to_string();
        assert!(msg.starts_with("diagnostics.scales"), "{msg}");
    }

    #[test]
    fn names_parse_both_ways() {
        for name in ExperimentName::ALL {
            assert_eq!(name.as_str().parse::<ExperimentName>().unwrap(), name);
        }
        assert!("hurst".parse::<ExperimentName>().is_err());
    }
}
