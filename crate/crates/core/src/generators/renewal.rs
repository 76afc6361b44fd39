//! Piecewise-constant switching processes: the fractional renewal model with
//! Pareto waiting times and the exponential random telegraph.

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::{rng_for, GeneratorConfig};
use crate::error::{invalid, Result};
use crate::series::{Provenance, TimeSeries};

/// Inverse-CDF draw from the Pareto law `P(t > x) = (x / t_min)^{-theta}`.
pub fn sample_pareto(theta: f64, t_min: f64, u: f64) -> Result<f64> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(invalid("theta", format!("must be > 0, got {theta}")));
    }
    if !(t_min > 0.0 && t_min.is_finite()) {
        return Err(invalid("t_min", format!("must be > 0, got {t_min}")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(invalid("u", format!("must lie in (0, 1), got {u}")));
    }
    Ok(t_min * u.powf(-1.0 / theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelRule {
    /// Two states, flipped at every renewal.
    Alternating,
    /// Each renewal draws a fresh level uniformly from the full level set.
    IidUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenewalConfig {
    /// Tail exponent of the waiting-time law, in (0, 2).
    pub theta: f64,
    pub t_min: f64,
    pub levels: Vec<f64>,
    pub level_rule: LevelRule,
    pub n: usize,
}

impl Default for RenewalConfig {
    fn default() -> Self {
        Self {
            theta: 0.5,
            t_min: 1.0,
            levels: vec![-1.0, 1.0],
            level_rule: LevelRule::Alternating,
            n: 1 << 16,
        }
    }
}

impl RenewalConfig {
    pub fn alternating(theta: f64, levels: [f64; 2], n: usize) -> Self {
        Self {
            theta,
            levels: levels.to_vec(),
            n,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 2.0) {
            return Err(invalid(
                "theta",
                format!("must lie in (0, 2), got {}", self.theta),
            ));
        }
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return Err(invalid("t_min", format!("must be > 0, got {}", self.t_min)));
        }
        if self.levels.len() < 2 {
            return Err(invalid(
                "levels",
                format!("need at least 2 levels, got {}", self.levels.len()),
            ));
        }
        if self.level_rule == LevelRule::Alternating && self.levels.len() != 2 {
            return Err(invalid(
                "levels",
                format!(
                    "alternating rule needs exactly 2 levels, got {}",
                    self.levels.len()
                ),
            ));
        }
        if self.levels.iter().any(|l| !l.is_finite()) {
            return Err(invalid("levels", "levels must be finite"));
        }
        if self.n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TelegraphConfig {
    /// Switching rate; dwell times are exponential with mean `1 / rate`.
    pub rate: f64,
    pub levels: [f64; 2],
    pub n: usize,
}

impl Default for TelegraphConfig {
    fn default() -> Self {
        Self {
            rate: 0.05,
            levels: [-1.0, 1.0],
            n: 1 << 16,
        }
    }
}

impl TelegraphConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(invalid("rate", format!("must be > 0, got {}", self.rate)));
        }
        if self.levels.iter().any(|l| !l.is_finite()) {
            return Err(invalid("levels", "levels must be finite"));
        }
        if self.n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        Ok(())
    }
}

/// A realized switching path on `[0, horizon)`.
///
/// Segment `i` holds `levels[i]` on `[starts[i], starts[i+1])`; the last
/// segment is censored at `horizon`. `starts[0] == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalPath {
    pub starts: Vec<f64>,
    pub levels: Vec<f64>,
    pub horizon: f64,
}

impl RenewalPath {
    /// Dwell durations observed inside `[0, window)`, the last one censored.
    pub fn observed_dwells(&self, window: f64) -> Vec<f64> {
        let window = window.min(self.horizon);
        let mut out = Vec::new();
        for (i, &s) in self.starts.iter().enumerate() {
            if s >= window {
                break;
            }
            let end = self
                .starts
                .get(i + 1)
                .copied()
                .unwrap_or(self.horizon)
                .min(window);
            out.push(end - s);
        }
        out
    }

    /// Number of switching epochs strictly inside `(0, window)`.
    pub fn renewals_before(&self, window: f64) -> usize {
        self.starts
            .iter()
            .skip(1)
            .take_while(|&&s| s < window)
            .count()
    }

    /// Point samples of the path at `t = 0, 1, ..., n - 1`.
    pub fn sample_grid(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        for i in 0..n {
            let t = i as f64;
            while seg + 1 < self.starts.len() && self.starts[seg + 1] <= t {
                seg += 1;
            }
            out.push(self.levels[seg]);
        }
        out
    }
}

fn build_path<R: Rng>(
    rng: &mut R,
    horizon: f64,
    mut wait: impl FnMut(&mut R) -> Result<f64>,
    mut next_level: impl FnMut(&mut R, usize) -> usize,
    levels: &[f64],
) -> Result<RenewalPath> {
    let mut state = rng.random_range(0..levels.len());
    let mut starts = vec![0.0];
    let mut path_levels = vec![levels[state]];
    let mut t = 0.0;
    loop {
        t += wait(rng)?;
        if t >= horizon {
            break;
        }
        state = next_level(rng, state);
        starts.push(t);
        path_levels.push(levels[state]);
    }
    Ok(RenewalPath {
        starts,
        levels: path_levels,
        horizon,
    })
}

/// Switching epochs of the fractional renewal process, fresh renewal at `t = 0`.
pub fn renewal_path(cfg: &RenewalConfig, seed: u64) -> Result<RenewalPath> {
    cfg.validate()?;
    let mut rng = rng_for(seed);
    let n_levels = cfg.levels.len();
    let rule = cfg.level_rule;
    build_path(
        &mut rng,
        cfg.n as f64,
        |r| sample_pareto(cfg.theta, cfg.t_min, r.sample(Open01)),
        |r, s| match rule {
            LevelRule::Alternating => 1 - s,
            LevelRule::IidUniform => r.random_range(0..n_levels),
        },
        &cfg.levels,
    )
}

pub fn gen_renewal(cfg: &RenewalConfig, seed: u64) -> Result<TimeSeries> {
    let path = renewal_path(cfg, seed)?;
    TimeSeries::new(
        path.sample_grid(cfg.n),
        1.0,
        Provenance::Generated {
            config: GeneratorConfig::Renewal(cfg.clone()),
            seed,
        },
    )
}

pub fn telegraph_path(cfg: &TelegraphConfig, seed: u64) -> Result<RenewalPath> {
    cfg.validate()?;
    let exp = Exp::new(cfg.rate).map_err(|e| invalid("rate", e.to_string()))?;
    let mut rng = rng_for(seed);
    build_path(
        &mut rng,
        cfg.n as f64,
        |r| Ok(exp.sample(r)),
        |_, s| 1 - s,
        &cfg.levels,
    )
}

/// Symmetric two-state telegraph noise with exponential dwell times.
pub fn gen_telegraph(cfg: &TelegraphConfig, seed: u64) -> Result<TimeSeries> {
    let path = telegraph_path(cfg, seed)?;
    TimeSeries::new(
        path.sample_grid(cfg.n),
        1.0,
        Provenance::Generated {
            config: GeneratorConfig::Telegraph(cfg.clone()),
            seed,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pareto_inverse_cdf_points() {
        assert_abs_diff_eq!(sample_pareto(1.0, 1.0, 0.25).unwrap(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sample_pareto(1.0, 1.0, 0.5).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sample_pareto(2.0, 3.0, 0.25).unwrap(), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn pareto_rejects_bad_arguments() {
        for u in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(sample_pareto(1.0, 1.0, u).is_err(), "u={u}");
        }
        assert!(sample_pareto(0.0, 1.0, 0.5).is_err());
        assert!(sample_pareto(1.0, -1.0, 0.5).is_err());
    }

    #[test]
    fn pareto_survival_at_four() {
        let mut rng = rng_for(11);
        let draws = 100_000;
        let above = (0..draws)
            .filter(|_| sample_pareto(0.5, 1.0, rng.sample(Open01)).unwrap() > 4.0)
            .count();
        let frac = above as f64 / draws as f64;
        assert!((frac - 0.5).abs() < 0.01, "survival {frac}");
    }

    #[test]
    fn config_validation() {
        let mut c = RenewalConfig {
            levels: vec![1.0],
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c.levels = vec![1.0, 2.0, 3.0];
        assert!(c.validate().is_err(), "alternating with 3 levels");
        c.level_rule = LevelRule::IidUniform;
        assert!(c.validate().is_ok());
        c.theta = 2.0;
        assert!(c.validate().is_err());
        assert!(TelegraphConfig {
            rate: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(TelegraphConfig {
            rate: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn degenerate_levels_are_constant() {
        let cfg = RenewalConfig::alternating(0.7, [5.0, 5.0], 2000);
        let x = gen_renewal(&cfg, 3).unwrap();
        assert!(x.values().iter().all(|&v| v == 5.0));
        let tel = TelegraphConfig {
            rate: 0.3,
            levels: [0.0, 0.0],
            n: 500,
        };
        assert!(gen_telegraph(&tel, 3)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn grid_matches_path() {
        let cfg = RenewalConfig {
            theta: 1.2,
            n: 5000,
            ..Default::default()
        };
        let path = renewal_path(&cfg, 8).unwrap();
        let x = gen_renewal(&cfg, 8).unwrap();
        assert_eq!(path.starts[0], 0.0);
        // every switch lands between grid points i-1 and i; check the state on each side
        for w in path.starts.windows(2) {
            assert!(w[1] - w[0] >= cfg.t_min - 1e-9);
        }
        for i in 0..cfg.n {
            let seg = path.starts.partition_point(|&s| s <= i as f64) - 1;
            assert_eq!(x.values()[i], path.levels[seg]);
        }
        let dwell: f64 = path.observed_dwells(cfg.n as f64).iter().sum();
        assert_abs_diff_eq!(dwell, cfg.n as f64, epsilon = 1e-6);
    }

    #[test]
    fn iid_rule_uses_all_levels() {
        let cfg = RenewalConfig {
            theta: 1.5,
            levels: vec![0.0, 1.0, 2.0],
            level_rule: LevelRule::IidUniform,
            n: 20_000,
            ..Default::default()
        };
        let x = gen_renewal(&cfg, 4).unwrap();
        for l in &cfg.levels {
            assert!(x.values().contains(l));
        }
    }

    #[test]
    fn symmetric_levels_have_vanishing_mean() {
        let cfg = RenewalConfig::alternating(1.5, [-1.0, 1.0], 1 << 16);
        for seed in 0..10 {
            let m = gen_renewal(&cfg, seed).unwrap().mean();
            assert!(m.abs() < 0.2, "seed {seed}: mean {m}");
        }
    }

    #[test]
    fn observed_maximum_dwell_grows_with_window() {
        let cfg = RenewalConfig::alternating(0.5, [-1.0, 1.0], 1 << 16);
        let windows = [1usize << 12, 1 << 14, 1 << 16];
        let mut maxima: Vec<Vec<f64>> = vec![Vec::new(); windows.len()];
        for seed in 0..100 {
            let path = renewal_path(&cfg, seed).unwrap();
            for (j, &w) in windows.iter().enumerate() {
                let m = path
                    .observed_dwells(w as f64)
                    .into_iter()
                    .fold(0.0, f64::max);
                maxima[j].push(m);
            }
        }
        let medians: Vec<f64> = maxima
            .into_iter()
            .map(|mut v| {
                v.sort_by(f64::total_cmp);
                0.5 * (v[49] + v[50])
            })
            .collect();
        assert!(medians.windows(2).all(|w| w[1] > w[0]), "{medians:?}");
    }

    #[test]
    fn telegraph_dwell_and_occupation() {
        let rate = 0.02;
        // about 10^4 renewals
        let cfg = TelegraphConfig {
            rate,
            levels: [-1.0, 1.0],
            n: 500_000,
        };
        let path = telegraph_path(&cfg, 21).unwrap();
        let dwells = path.observed_dwells(cfg.n as f64);
        assert!(dwells.len() > 9_000);
        // drop the censored final dwell
        let full = &dwells[..dwells.len() - 1];
        let mean = full.iter().sum::<f64>() / full.len() as f64;
        assert!((mean * rate - 1.0).abs() < 0.02, "mean dwell {mean}");

        let x = gen_telegraph(&cfg, 21).unwrap();
        let up = x.values().iter().filter(|&&v| v > 0.0).count() as f64 / cfg.n as f64;
        assert!((up - 0.5).abs() < 0.02, "occupation {up}");
    }
}
