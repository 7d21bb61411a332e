//! Noise, counting statistics, CHSH estimation and the classical/quantum bounds.

mod chsh;
mod counts;
mod fit;
mod noise;
mod sim;

pub use chsh::{
    chsh, chsh_signed_sum, critical_visibility, ideal_chsh, lhv_max_chsh, lhv_strategies, mean_total_for_sigma,
    noisy_chsh, tsirelson_scan, ChshResult, ChshSettings, LhvStrategy,
};
pub use counts::{correlation_from_counts, correlation_from_rates, CorrelationEstimate, SettingCounts};
pub use fit::{fit_visibility, FringeFit};
pub use noise::{apply_noise, BasisFamily, NoiseModel};
pub use sim::{derive_seed, expected_counts, fringe_scan, noisy_probabilities, simulate_counts, FringePoint};
