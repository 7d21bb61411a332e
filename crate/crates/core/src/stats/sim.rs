//! Seeded Poisson sampling of coincidence counts.
//!
//! Generator: `rand_chacha::ChaCha8Rng` (rand_chacha 0.9), seeded with
//! `seed_from_u64`. Per-setting seeds come from [`derive_seed`], which reads
//! the first word of ChaCha8 stream `index` under the base seed. Counts are
//! drawn in the order `++, +−, −+, −−` from `rand_distr::Poisson` (0.5).

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::counts::SettingCounts;
use super::noise::{apply_noise, BasisFamily, NoiseModel};
use crate::error::Result;
use crate::experiment::{outcome_probabilities, PreparedState};

/// Independent seed for stream `index` under `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng.next_u64()
}

pub fn noisy_probabilities(prepared: &PreparedState, theta1: f64, theta2: f64, noise: &NoiseModel) -> Result<[f64; 4]> {
    apply_noise(
        outcome_probabilities(prepared, theta1, theta2),
        noise,
        BasisFamily::of_theta2(theta2),
    )
}

/// Mean counts `mean_total · p` per outcome, no sampling.
pub fn expected_counts(
    prepared: &PreparedState,
    setting_pair: (f64, f64),
    noise: &NoiseModel,
    mean_total: f64,
) -> Result<[f64; 4]> {
    let p = noisy_probabilities(prepared, setting_pair.0, setting_pair.1, noise)?;
    Ok(p.map(|x| mean_total * x))
}

fn draw(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    match Poisson::new(mean) {
        Ok(d) => d.sample(rng) as u64,
        // zero (or negligible) mean
        Err(_) => 0,
    }
}

/// Draws the four counts as independent Poisson variables with means
/// `mean_total · p_noisy`. Identical inputs give identical counts.
pub fn simulate_counts(
    prepared: &PreparedState,
    setting_pair: (f64, f64),
    noise: &NoiseModel,
    mean_total: f64,
    seed: u64,
) -> Result<SettingCounts> {
    let means = expected_counts(prepared, setting_pair, noise, mean_total)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [pp, pm, mp, mm] = means.map(|m| draw(&mut rng, m));
    Ok(SettingCounts::new(pp, pm, mp, mm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringePoint {
    pub theta1: f64,
    pub counts: f64,
}

/// `N⁺⁺(θ₁, θ₂)` for each Alice angle at fixed `θ₂`. Point `k` uses seed
/// `derive_seed(seed, k)`; with `seed = None` the expected counts are returned.
pub fn fringe_scan(
    prepared: &PreparedState,
    theta2: f64,
    theta1_list: &[f64],
    noise: &NoiseModel,
    mean_total: f64,
    seed: Option<u64>,
) -> Result<Vec<FringePoint>> {
    theta1_list
        .iter()
        .enumerate()
        .map(|(k, &theta1)| {
            let counts = match seed {
                Some(s) => {
                    simulate_counts(prepared, (theta1, theta2), noise, mean_total, derive_seed(s, k as u64))?.n_pp
                        as f64
                }
                None => expected_counts(prepared, (theta1, theta2), noise, mean_total)?[0],
            };
            Ok(FringePoint { theta1, counts })
        })
        .collect()
}
