use onef_core::diagnostics::{
    default_windows, dfa, end_match, fit_loglog_slope, gph_estimate, periodogram, rescaled_range,
    Periodogram,
};
use onef_core::ensemble::mittag_leffler_moment_ratio;
use onef_core::generators::{
    gen_ar1, gen_fbm, gen_fgn, gen_telegraph, renewal_path, sample_pareto, Ar1Config, FgnConfig,
    RenewalConfig, TelegraphConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn moment_ratio(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64 / (m * m)
}

// Renewal counts built from scratch: N(T) of a Pareto renewal process with
// index theta < 1 is Mittag-Leffler distributed in the long-time limit.
fn brute_force_counts(theta: f64, horizon: f64, seeds: u64) -> Vec<f64> {
    (0..seeds)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(1_000_000 + s);
            let (mut t, mut count) = (0.0, 0.0);
            loop {
                let u: f64 = 1.0 - rng.random::<f64>();
                t += u.powf(-1.0 / theta);
                if t > horizon {
                    break count;
                }
                count += 1.0;
            }
        })
        .collect()
}

#[test]
fn mittag_leffler_constant_matches_brute_force_counts() {
    let predicted = mittag_leffler_moment_ratio(0.5);
    assert!((predicted - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

    let oracle = moment_ratio(&brute_force_counts(0.5, 1e6, 1000));
    assert!((oracle / predicted - 1.0).abs() < 0.05, "oracle {oracle}");

    let cfg = RenewalConfig {
        n: 1_000_000,
        ..Default::default()
    };
    let counts: Vec<f64> = (0..1000)
        .map(|s| renewal_path(&cfg, s).unwrap())
        .map(|p| p.renewals_before(1e6) as f64)
        .collect();
    let measured = moment_ratio(&counts);
    assert!(
        (measured / predicted - 1.0).abs() < 0.05,
        "generator {measured}"
    );
}

#[test]
fn pareto_matches_its_cdf() {
    for theta in [0.5, 1.0, 1.5] {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut xs: Vec<f64> = (0..100_000)
            .map(|_| sample_pareto(theta, 1.0, 1.0 - rng.random::<f64>()).unwrap())
            .collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = 1.0 - x.powf(-theta);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "theta {theta}: KS {ks}");
    }
}

#[test]
fn fgn_estimators_agree() {
    for hurst in [0.6, 0.7, 0.8] {
        let cfg = FgnConfig::new(hurst, 1.0, 1 << 14);
        let w = default_windows(cfg.n);
        let mut rs = Vec::new();
        let mut alpha = Vec::new();
        let mut d = Vec::new();
        for seed in 0..100 {
            let x = gen_fgn(&cfg, seed).unwrap();
            rs.push(rescaled_range(&x, &w).unwrap().exponent);
            alpha.push(dfa(&x, &w, 1).unwrap().exponent);
            d.push(
                gph_estimate(&periodogram(&x).unwrap(), None)
                    .unwrap()
                    .exponent,
            );
        }
        let (rs, alpha, d) = (mean(&rs), mean(&alpha), mean(&d));
        assert!((rs - hurst).abs() < 0.05, "H {hurst}: R/S {rs}");
        assert!((alpha - hurst).abs() < 0.05, "H {hurst}: DFA {alpha}");
        assert!((d - (hurst - 0.5)).abs() < 0.1, "H {hurst}: GPH {d}");
    }
}

#[test]
fn fbm_spectrum_is_steeper_than_two() {
    let cfg = FgnConfig::new(0.7, 1.0, 1 << 14);
    let spectra: Vec<Periodogram> = (0..20)
        .map(|s| periodogram(&end_match(&gen_fbm(&cfg, s).unwrap()).unwrap()).unwrap())
        .collect();
    let p = Periodogram::mean_of(&spectra).unwrap();
    let fit = fit_loglog_slope(&p.freqs, &p.power, 1e-3, 0.05).unwrap();
    assert!((fit.exponent + 2.4).abs() < 0.25, "slope {}", fit.exponent);
}

#[test]
fn telegraph_is_flat_below_its_corner() {
    let cfg = TelegraphConfig {
        rate: 0.05,
        n: 1 << 16,
        ..Default::default()
    };
    let spectra: Vec<Periodogram> = (0..32)
        .map(|s| periodogram(&gen_telegraph(&cfg, s).unwrap()).unwrap())
        .collect();
    let p = Periodogram::mean_of(&spectra).unwrap();
    let low = fit_loglog_slope(&p.freqs, &p.power, 1e-4, 2e-3).unwrap();
    assert!(low.exponent.abs() < 0.2, "low slope {}", low.exponent);
    let high = fit_loglog_slope(&p.freqs, &p.power, 0.05, 0.15).unwrap();
    assert!(high.exponent < -1.0, "high slope {}", high.exponent);
}

#[test]
fn short_memory_ar1_looks_persistent_to_rs() {
    let cfg = Ar1Config {
        phi: 0.99,
        n: 1 << 12,
        ..Default::default()
    };
    let w = default_windows(cfg.n);
    let js: Vec<f64> = (0..20)
        .map(|s| {
            rescaled_range(&gen_ar1(&cfg, s).unwrap(), &w)
                .unwrap()
                .exponent
        })
        .collect();
    assert!(mean(&js) > 0.6, "J {}", mean(&js));
}
