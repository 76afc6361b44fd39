//! Log-log regression kernel shared by every exponent estimate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Geometric bins per decade applied before slope fits.
pub const BINS_PER_DECADE: f64 = 8.0;

/// Margin by which the power-law r² must beat the exponential r².
pub const POWERLAW_R2_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// Smallest abscissa actually used.
    pub lo: f64,
    /// Largest abscissa actually used.
    pub hi: f64,
    pub n_points: usize,
    pub r_squared: f64,
    /// Input points dropped before fitting (zero power bins, degenerate scales).
    pub n_excluded: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = a + b x`. Needs at least three points.
pub(crate) fn ols(x: &[f64], y: &[f64]) -> Result<Line> {
    let k = x.len();
    if k < 3 {
        return Err(Error::InsufficientPoints { got: k, needed: 3 });
    }
    let kf = k as f64;
    let mx = x.iter().sum::<f64>() / kf;
    let my = y.iter().sum::<f64>() / kf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - intercept - slope * a;
            r * r
        })
        .sum();
    let stderr = (ssr / (kf - 2.0) / sxx).sqrt();
    let r_squared = if syy > 0.0 {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(Line {
        slope,
        intercept,
        stderr,
        r_squared,
    })
}

fn check_inputs(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(invalid(
            "ys",
            format!("length {} differs from xs length {}", ys.len(), xs.len()),
        ));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(invalid("lo", format!("fit range [{lo}, {hi}] is empty")));
    }
    for (index, &value) in xs.iter().chain(ys).enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositive {
                index: index % xs.len().max(1),
                value,
            });
        }
    }
    Ok(())
}

/// Groups points inside `[lo, hi]` into geometric bins and averages each bin
/// in log coordinates. Returns `(ln x, ln y)` pairs in ascending order.
pub fn log_bin(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
    check_inputs(xs, ys, lo, hi)?;
    let mut keyed: Vec<(i64, f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, _)| **x >= lo && **x <= hi)
        .map(|(&x, &y)| {
            let key = (x.log10() * BINS_PER_DECADE + 1e-9).floor() as i64;
            (key, x.ln(), y.ln())
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < keyed.len() {
        let key = keyed[i].0;
        let (mut sx, mut sy, mut c) = (0.0, 0.0, 0.0);
        while i < keyed.len() && keyed[i].0 == key {
            sx += keyed[i].1;
            sy += keyed[i].2;
            c += 1.0;
            i += 1;
        }
        out.push((sx / c, sy / c));
    }
    Ok(out)
}

/// Slope of `ln y` against `ln x` over the log-binned points in `[lo, hi]`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> Result<ScalingFit> {
    let binned = log_bin(xs, ys, lo, hi)?;
    let lx: Vec<f64> = binned.iter().map(|p| p.0).collect();
    let ly: Vec<f64> = binned.iter().map(|p| p.1).collect();
    let line = ols(&lx, &ly)?;
    Ok(ScalingFit {
        exponent: line.slope,
        intercept: line.intercept,
        stderr: line.stderr,
        lo: lx[0].exp(),
        hi: lx[lx.len() - 1].exp(),
        n_points: binned.len(),
        r_squared: line.r_squared,
        n_excluded: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawTest {
    pub is_powerlaw: bool,
    pub r2_power: f64,
    pub r2_exp: f64,
}

/// Compares a log-log (power-law) fit with a log-linear (exponential) fit on
/// the same binned points.
pub fn reject_powerlaw(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> Result<PowerLawTest> {
    let binned = log_bin(xs, ys, lo, hi)?;
    let lx: Vec<f64> = binned.iter().map(|p| p.0).collect();
    let ex: Vec<f64> = lx.iter().map(|v| v.exp()).collect();
    let ly: Vec<f64> = binned.iter().map(|p| p.1).collect();
    let r2_power = ols(&lx, &ly)?.r_squared;
    let r2_exp = ols(&ex, &ly)?.r_squared;
    Ok(PowerLawTest {
        is_powerlaw: r2_power >= r2_exp + POWERLAW_R2_MARGIN,
        r2_power,
        r2_exp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Vec<f64> {
        (1..=400).map(|i| i as f64 * 0.25).collect()
    }

    #[test]
    fn exact_power_law() {
        let xs = grid();
        let ys: Vec<f64> = xs.iter().map(|x| x.powf(-1.5)).collect();
        let fit = fit_loglog_slope(&xs, &ys, 0.0, f64::INFINITY).unwrap();
        assert!((fit.exponent + 1.5).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prefactor_goes_to_intercept() {
        let xs = grid();
        for c in [1e-3, 1.0, 7.5, 1e6] {
            let ys: Vec<f64> = xs.iter().map(|x| c * x * x).collect();
            let fit = fit_loglog_slope(&xs, &ys, 1.0, 50.0).unwrap();
            assert!((fit.exponent - 2.0).abs() < 1e-12, "c={c}");
            assert!((fit.intercept - c.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn binning_is_eight_per_decade() {
        // dense geometric grid over three decades
        let xs: Vec<f64> = (0..24_000).map(|i| 10f64.powf(i as f64 / 8000.0)).collect();
        let ys = vec![1.0; xs.len()];
        let bins = log_bin(&xs, &ys, 1.0, 1000.0).unwrap();
        assert_eq!(bins.len(), 24);
    }

    #[test]
    fn errors() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!(matches!(
            fit_loglog_slope(&xs, &[1.0, 1.0, 0.0, 1.0], 0.0, 10.0),
            Err(Error::NonPositive { index: 2, .. })
        ));
        assert!(matches!(
            fit_loglog_slope(&xs, &[1.0, 2.0, 3.0, 4.0], 1.0, 1.5),
            Err(Error::InsufficientPoints { .. })
        ));
        assert!(fit_loglog_slope(&xs, &[1.0, 2.0], 0.0, 10.0).is_err());
        assert!(fit_loglog_slope(&xs, &xs, 5.0, 1.0).is_err());
    }

    #[test]
    fn exponential_is_not_a_power_law() {
        let xs: Vec<f64> = (0..=90).map(|i| 1.0 + i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-x).exp()).collect();
        let power = fit_loglog_slope(&xs, &ys, 1.0, 10.0).unwrap();
        let test = reject_powerlaw(&xs, &ys, 1.0, 10.0).unwrap();
        assert!(!test.is_powerlaw);
        assert!(test.r2_exp > 0.9999, "{}", test.r2_exp);
        assert!((power.r_squared - test.r2_power).abs() < 1e-15);
        // binned log-log r² of exp(-x) on this grid is 0.9252
        assert!((test.r2_power - 0.9252).abs() < 1e-3, "{}", test.r2_power);

        let ys: Vec<f64> = xs.iter().map(|x| x.powf(-2.0)).collect();
        assert!(reject_powerlaw(&xs, &ys, 1.0, 10.0).unwrap().is_powerlaw);
    }

    proptest! {
        #[test]
        fn recovers_any_exponent(b in -4.0f64..4.0, c in 1e-3f64..1e3) {
            let xs = grid();
            let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(b)).collect();
            let fit = fit_loglog_slope(&xs, &ys, 0.0, f64::INFINITY).unwrap();
            prop_assert!((fit.exponent - b).abs() < 1e-10);
        }
    }
}
