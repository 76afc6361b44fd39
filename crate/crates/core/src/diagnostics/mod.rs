//! Single-series estimators.

mod acf;
mod aging;
mod fit;
mod gph;
mod hurst;
mod periodogram;

pub use acf::empirical_acf;
pub use aging::{conditional_spectrum, AgingSpectrum, FrequencyBand, MIN_BAND_BINS};
pub use fit::{
    fit_loglog_slope, log_bin, reject_powerlaw, PowerLawTest, ScalingFit, BINS_PER_DECADE,
    POWERLAW_R2_MARGIN,
};
pub use gph::{default_bandwidth, gph_estimate};
pub use hurst::{
    default_windows, dfa, dfa_curve, geometric_windows, rescaled_range, rs_curve, ScalePoint,
    MIN_RS_WINDOW, MIN_SCALES,
};
pub use periodogram::{end_match, periodogram, periodogram_of, Periodogram, MIN_PERIODOGRAM_LEN};
