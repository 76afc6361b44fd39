//! Time-domain scaling estimators: rescaled range and DFA.

use serde::{Deserialize, Serialize};

use super::fit::{fit_loglog_slope, ScalingFit};
use crate::error::{invalid, Error, Result};
use crate::series::TimeSeries;

pub const MIN_RS_WINDOW: usize = 8;
pub const MIN_SCALES: usize = 4;

/// One point of a fluctuation curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalePoint {
    pub scale: usize,
    pub value: f64,
    /// Blocks that contributed.
    pub blocks: usize,
}

/// Roughly `per_decade` geometrically spaced integers in `[lo, hi]`.
pub fn geometric_windows(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    if lo == 0 || hi < lo {
        return Vec::new();
    }
    let decades = (hi as f64 / lo as f64).log10();
    let steps = (decades * per_decade as f64).ceil().max(1.0) as usize;
    let mut out: Vec<usize> = (0..=steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            (lo as f64 * (hi as f64 / lo as f64).powf(t)).round() as usize
        })
        .collect();
    out.dedup();
    out
}

/// Default window set for R/S and DFA: 16 to n/4, eight per decade.
pub fn default_windows(n: usize) -> Vec<usize> {
    geometric_windows(16, n / 4, 8)
}

fn prepare_windows(n: usize, windows: &[usize], min: usize) -> Result<Vec<usize>> {
    let mut w = windows.to_vec();
    w.sort_unstable();
    w.dedup();
    if let Some(&bad) = w.iter().find(|&&t| t < min || t > n / 4) {
        return Err(invalid(
            "window_sizes",
            format!("window {bad} outside [{min}, n/4 = {}]", n / 4),
        ));
    }
    if w.len() < MIN_SCALES {
        return Err(Error::InsufficientPoints {
            got: w.len(),
            needed: MIN_SCALES,
        });
    }
    Ok(w)
}

fn fit_curve(curve: &[ScalePoint], excluded: usize) -> Result<ScalingFit> {
    if curve.len() < MIN_SCALES {
        return Err(Error::InsufficientPoints {
            got: curve.len(),
            needed: MIN_SCALES,
        });
    }
    let xs: Vec<f64> = curve.iter().map(|p| p.scale as f64).collect();
    let ys: Vec<f64> = curve.iter().map(|p| p.value).collect();
    let mut fit = fit_loglog_slope(&xs, &ys, xs[0], xs[xs.len() - 1])?;
    fit.n_excluded = excluded;
    Ok(fit)
}

/// Range over standard deviation of one block, `None` when the block is flat.
fn block_rs(block: &[f64]) -> Option<f64> {
    let len = block.len() as f64;
    let mean = block.iter().sum::<f64>() / len;
    let mut acc = 0.0;
    let (mut max, mut min) = (0.0f64, 0.0f64);
    let mut ss = 0.0;
    for v in block {
        let d = v - mean;
        acc += d;
        max = max.max(acc);
        min = min.min(acc);
        ss += d * d;
    }
    let s = (ss / len).sqrt();
    (s > 0.0).then(|| (max - min) / s)
}

/// Block-averaged `<R/S>(tau)` over disjoint blocks. Flat blocks are skipped
/// and scales without any usable block are dropped.
pub fn rs_curve(x: &TimeSeries, window_sizes: &[usize]) -> Result<Vec<ScalePoint>> {
    let v = x.values();
    let windows = prepare_windows(v.len(), window_sizes, MIN_RS_WINDOW)?;
    let mut curve = Vec::with_capacity(windows.len());
    for tau in windows {
        let (sum, blocks) = v
            .chunks_exact(tau)
            .filter_map(block_rs)
            .fold((0.0, 0usize), |(s, c), r| (s + r, c + 1));
        if blocks > 0 {
            curve.push(ScalePoint {
                scale: tau,
                value: sum / blocks as f64,
                blocks,
            });
        }
    }
    if curve.len() < MIN_SCALES {
        return Err(Error::InsufficientPoints {
            got: curve.len(),
            needed: MIN_SCALES,
        });
    }
    Ok(curve)
}

/// Joseph/Hurst exponent `J` from `<R/S> ~ tau^J`.
pub fn rescaled_range(x: &TimeSeries, window_sizes: &[usize]) -> Result<ScalingFit> {
    let curve = rs_curve(x, window_sizes)?;
    let dropped = window_sizes.len().saturating_sub(curve.len());
    fit_curve(&curve, dropped)
}

/// Orthonormal polynomial basis of degree `order` on `0..len`.
fn orthonormal_basis(len: usize, order: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    let centre = (len as f64 - 1.0) / 2.0;
    for p in 0..=order {
        let mut q: Vec<f64> = (0..len)
            .map(|i| (i as f64 - centre).powi(p as i32))
            .collect();
        for b in &basis {
            let dot: f64 = q.iter().zip(b).map(|(a, c)| a * c).sum();
            q.iter_mut().zip(b).for_each(|(a, c)| *a -= dot * c);
        }
        let norm = q.iter().map(|a| a * a).sum::<f64>().sqrt();
        q.iter_mut().for_each(|a| *a /= norm);
        basis.push(q);
    }
    basis
}

/// DFA fluctuation function `F(tau)`.
pub fn dfa_curve(
    x: &TimeSeries,
    window_sizes: &[usize],
    detrend_order: usize,
) -> Result<Vec<ScalePoint>> {
    if !(1..=2).contains(&detrend_order) {
        return Err(invalid(
            "detrend_order",
            format!("must be 1 or 2, got {detrend_order}"),
        ));
    }
    let v = x.values();
    let windows = prepare_windows(v.len(), window_sizes, detrend_order + 2)?;
    let mean = x.mean();
    let mut acc = 0.0;
    let profile: Vec<f64> = v
        .iter()
        .map(|a| {
            acc += a - mean;
            acc
        })
        .collect();

    let mut curve = Vec::with_capacity(windows.len());
    for tau in windows {
        let basis = orthonormal_basis(tau, detrend_order);
        let mut ss = 0.0;
        let mut blocks = 0;
        for block in profile.chunks_exact(tau) {
            let mut resid = block.to_vec();
            for b in &basis {
                let dot: f64 = block.iter().zip(b).map(|(a, c)| a * c).sum();
                resid.iter_mut().zip(b).for_each(|(r, c)| *r -= dot * c);
            }
            ss += resid.iter().map(|r| r * r).sum::<f64>();
            blocks += 1;
        }
        let f = (ss / (blocks * tau) as f64).sqrt();
        if f > 0.0 && f.is_finite() {
            curve.push(ScalePoint {
                scale: tau,
                value: f,
                blocks,
            });
        }
    }
    if curve.len() < MIN_SCALES {
        return Err(Error::InsufficientPoints {
            got: curve.len(),
            needed: MIN_SCALES,
        });
    }
    Ok(curve)
}

/// DFA exponent `alpha` from `F(tau) ~ tau^alpha`.
pub fn dfa(x: &TimeSeries, window_sizes: &[usize], detrend_order: usize) -> Result<ScalingFit> {
    let curve = dfa_curve(x, window_sizes, detrend_order)?;
    let dropped = window_sizes.len().saturating_sub(curve.len());
    fit_curve(&curve, dropped)
}
