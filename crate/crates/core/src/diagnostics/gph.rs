//! Geweke–Porter-Hudak log-periodogram regression.

use std::f64::consts::PI;

use super::fit::{ols, ScalingFit};
use super::periodogram::Periodogram;
use crate::error::{invalid, Error, Result};

/// `floor(sqrt(n / 2))` for a series of length `n`.
pub fn default_bandwidth(n: usize) -> usize {
    ((n as f64) / 2.0).sqrt().floor() as usize
}

/// Memory parameter `d` from regressing `ln I(f_k)` on `-ln(4 sin^2(pi f_k))`
/// over the lowest `m` Fourier frequencies. Zero-power bins are excluded and
/// counted in `n_excluded`.
pub fn gph_estimate(p: &Periodogram, bandwidth: Option<usize>) -> Result<ScalingFit> {
    let m = bandwidth.unwrap_or_else(|| default_bandwidth(p.n));
    if m < 3 || m > p.len() {
        return Err(invalid(
            "bandwidth",
            format!("must lie in [3, {}], got {m}", p.len()),
        ));
    }
    let mut xs = Vec::with_capacity(m);
    let mut ys = Vec::with_capacity(m);
    let mut excluded = 0;
    for (f, pow) in p.freqs.iter().zip(&p.power).take(m) {
        if *pow > 0.0 && pow.is_finite() {
            let s = (PI * f).sin();
            xs.push(-(4.0 * s * s).ln());
            ys.push(pow.ln());
        } else {
            excluded += 1;
        }
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientPoints {
            got: xs.len(),
            needed: 3,
        });
    }
    let line = ols(&xs, &ys)?;
    Ok(ScalingFit {
        exponent: line.slope,
        intercept: line.intercept,
        stderr: line.stderr,
        lo: p.freqs[0],
        hi: p.freqs[m - 1],
        n_points: xs.len(),
        r_squared: line.r_squared,
        n_excluded: excluded,
    })
}
