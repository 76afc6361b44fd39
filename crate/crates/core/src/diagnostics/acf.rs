use crate::error::{invalid, Error, Result};
use crate::series::TimeSeries;

/// Biased sample autocorrelation `rho(0..=max_lag)` after removing the mean.
pub fn empirical_acf(x: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    let v = x.values();
    let n = v.len();
    if 2 * max_lag >= n {
        return Err(invalid(
            "max_lag",
            format!("must be below n/2 = {}, got {max_lag}", n / 2),
        ));
    }
    let mean = x.mean();
    let d: Vec<f64> = v.iter().map(|a| a - mean).collect();
    let c0: f64 = d.iter().map(|a| a * a).sum();
    if c0 <= 0.0 {
        return Err(Error::Degenerate("zero sample variance".into()));
    }
    Ok((0..=max_lag)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                d[..n - k]
                    .iter()
                    .zip(&d[k..])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / c0
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_ar1, Ar1Config};

    #[test]
    fn lag_zero_is_one() {
        let x = TimeSeries::imported(vec![1.0, 3.0, 2.0, 5.0, 4.0, 0.5], "t").unwrap();
        let r = empirical_acf(&x, 2).unwrap();
        assert_eq!(r[0], 1.0);
        assert!(r.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn constant_is_degenerate() {
        let x = TimeSeries::imported(vec![2.0; 50], "t").unwrap();
        assert!(matches!(empirical_acf(&x, 3), Err(Error::Degenerate(_))));
    }

    #[test]
    fn lag_limit() {
        let x = TimeSeries::imported((0..10).map(f64::from).collect(), "t").unwrap();
        assert!(empirical_acf(&x, 4).is_ok());
        assert!(empirical_acf(&x, 5).is_err());
    }

    #[test]
    fn ar1_lag_one() {
        let x = gen_ar1(
            &Ar1Config {
                phi: 0.9,
                sigma: 1.0,
                n: 100_000,
            },
            13,
        )
        .unwrap();
        let r = empirical_acf(&x, 1).unwrap();
        assert!((r[1] - 0.9).abs() < 0.03, "{}", r[1]);
    }
}
