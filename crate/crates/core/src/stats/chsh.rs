use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use serde::{Deserialize, Serialize};

use super::counts::CorrelationEstimate;
use super::noise::{apply_noise, BasisFamily, NoiseModel};
use crate::error::Result;
use crate::experiment::{correlation_exact, correlation_from_probabilities, outcome_probabilities, PreparedState};

/// The four analyzer angles of a CHSH test (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub theta1: f64,
    pub theta1_tilde: f64,
    pub theta2: f64,
    pub theta2_tilde: f64,
}

impl ChshSettings {
    /// `{θ₁, θ̃₁, θ₂, θ̃₂} = {0°, 45°, 22.5°, 67.5°}`, where `S` reaches `2√2`.
    pub const OPTIMAL: ChshSettings = ChshSettings {
        theta1: 0.0,
        theta1_tilde: FRAC_PI_4,
        theta2: FRAC_PI_8,
        theta2_tilde: 3.0 * FRAC_PI_8,
    };

    /// Setting pairs for `E₁..E₄`: `(θ₁,θ₂), (θ̃₁,θ₂), (θ₁,θ̃₂), (θ̃₁,θ̃₂)`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.theta1, self.theta2),
            (self.theta1_tilde, self.theta2),
            (self.theta1, self.theta2_tilde),
            (self.theta1_tilde, self.theta2_tilde),
        ]
    }
}

impl Default for ChshSettings {
    fn default() -> Self {
        ChshSettings::OPTIMAL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub e: [CorrelationEstimate; 4],
    pub s_value: f64,
    pub s_sigma: f64,
    /// `(S − 2)/σ_S`.
    pub sigmas_of_violation: f64,
}

impl ChshResult {
    pub fn recomputed_s(&self) -> f64 {
        chsh_signed_sum(self.e.map(|e| e.e_value)).abs()
    }

    pub fn violates_local_bound(&self) -> bool {
        self.s_value > 2.0
    }
}

/// `−E₁ + E₂ + E₃ + E₄`.
pub fn chsh_signed_sum(e: [f64; 4]) -> f64 {
    -e[0] + e[1] + e[2] + e[3]
}

pub fn chsh(
    e1: CorrelationEstimate,
    e2: CorrelationEstimate,
    e3: CorrelationEstimate,
    e4: CorrelationEstimate,
) -> ChshResult {
    let e = [e1, e2, e3, e4];
    let s_value = chsh_signed_sum(e.map(|x| x.e_value)).abs();
    let s_sigma = e.iter().map(|x| x.sigma * x.sigma).sum::<f64>().sqrt();
    let excess = s_value - 2.0;
    let sigmas_of_violation = if s_sigma > 0.0 {
        excess / s_sigma
    } else if excess == 0.0 {
        0.0
    } else {
        excess.signum() * f64::INFINITY
    };
    ChshResult {
        e,
        s_value,
        s_sigma,
        sigmas_of_violation,
    }
}

/// A deterministic local strategy: fixed ±1 answers for each party's two settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LhvStrategy {
    pub alice: [i8; 2],
    pub bob: [i8; 2],
}

impl LhvStrategy {
    pub fn signed_sum(&self) -> i32 {
        let [a, at] = self.alice.map(i32::from);
        let [b, bt] = self.bob.map(i32::from);
        -a * b + at * b + a * bt + at * bt
    }
}

/// All 16 deterministic local strategies.
pub fn lhv_strategies() -> Vec<LhvStrategy> {
    let pm = [1i8, -1];
    let mut out = Vec::with_capacity(16);
    for a in pm {
        for at in pm {
            for b in pm {
                for bt in pm {
                    out.push(LhvStrategy {
                        alice: [a, at],
                        bob: [b, bt],
                    });
                }
            }
        }
    }
    out
}

/// Largest `|S|` over the deterministic local strategies. Mixtures of
/// strategies cannot exceed it since `S` is linear in the mixture weights.
pub fn lhv_max_chsh() -> f64 {
    lhv_strategies().iter().map(|s| s.signed_sum().abs()).max().unwrap_or(0) as f64
}

pub fn ideal_chsh(prepared: &PreparedState, settings: &ChshSettings) -> f64 {
    chsh_signed_sum(settings.pairs().map(|(t1, t2)| correlation_exact(prepared, t1, t2))).abs()
}

pub fn noisy_chsh(prepared: &PreparedState, settings: &ChshSettings, noise: &NoiseModel) -> Result<f64> {
    let mut e = [0.0; 4];
    for (slot, (t1, t2)) in e.iter_mut().zip(settings.pairs()) {
        let p = apply_noise(
            outcome_probabilities(prepared, t1, t2),
            noise,
            BasisFamily::of_theta2(t2),
        )?;
        *slot = correlation_from_probabilities(&p);
    }
    Ok(chsh_signed_sum(e).abs())
}

/// Per-setting mean total count for which the propagated `σ_E = √((1 − E²)/N)`,
/// root-mean-squared over the four settings, equals `target_sigma_e`.
pub fn mean_total_for_sigma(
    prepared: &PreparedState,
    settings: &ChshSettings,
    noise: &NoiseModel,
    target_sigma_e: f64,
) -> Result<f64> {
    let mut mean_var_numerator = 0.0;
    for (t1, t2) in settings.pairs() {
        let p = apply_noise(
            outcome_probabilities(prepared, t1, t2),
            noise,
            BasisFamily::of_theta2(t2),
        )?;
        mean_var_numerator += (1.0 - correlation_from_probabilities(&p).powi(2)) / 4.0;
    }
    Ok(mean_var_numerator / (target_sigma_e * target_sigma_e))
}

/// White-noise visibility at which the optimal-setting `S` drops to 2, by bisection.
pub fn critical_visibility(prepared: &PreparedState) -> Result<f64> {
    let s_at = |v: f64| noisy_chsh(prepared, &ChshSettings::OPTIMAL, &NoiseModel::uniform(v));
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if s_at(mid)? < 2.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest `S` over all quadruples drawn from an `n`-point grid on `[0, π)`.
pub fn tsirelson_scan(prepared: &PreparedState, n: usize) -> f64 {
    let grid: Vec<f64> = (0..n).map(|k| k as f64 * PI / n as f64).collect();
    let table: Vec<Vec<f64>> = grid
        .iter()
        .map(|&t1| grid.iter().map(|&t2| correlation_exact(prepared, t1, t2)).collect())
        .collect();
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        for it in 0..n {
            for j in 0..n {
                for jt in 0..n {
                    let s = chsh_signed_sum([table[i][j], table[it][j], table[i][jt], table[it][jt]]).abs();
                    best = best.max(s);
                }
            }
        }
    }
    best
}
