//! Source, fusion, and measurement pipeline for the three-photon state
//! `(|H⟩_a|φ⁻⟩ − |V⟩_a|ψ⁺⟩)/√2`, where Alice holds `a` and Bob holds `b1, b2`.
//!
//! Preparation: two `φ⁺` pairs on `(a1, b1)` and `(a2, b2)`, a PBS parity
//! check fusing `a1, a2` into `T, a`, one QWP per mode, projection of the
//! trigger `T` onto `|H⟩`, and a fixed local phase on `a`.
//!
//! Alice measures linear polarization along `θ₁` (+1) or `θ₁ + π/2` (−1).
//! Bob projects onto `cos θ₂|φ⁻⟩ + sin θ₂|ψ⁺⟩`; his −1 outcome is the same
//! analyzer with its half-wave plate re-set to `(θ₂ + π/2)/2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{hwp, pbs_parity_check, polarizer_projector, qwp, PbsPorts};
use crate::qstate::{
    bell_state, fidelity, tensor, BasisLetter, BellKind, Operator, SingleQubitOp, StateVector, C64, PIPELINE_TOL,
};

pub const SOURCE_MODES: [&str; 4] = ["a1", "b1", "a2", "b2"];
pub const FUSED_MODES: [&str; 4] = ["T", "a", "b1", "b2"];
pub const PREPARED_MODES: [&str; 3] = ["a", "b1", "b2"];
pub const BOB_MODES: [&str; 2] = ["b1", "b2"];

/// Outcome label of a dichotomic measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i32) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// Offset added to the analyzer angle to realize this outcome.
    pub fn angle_offset(self) -> f64 {
        match self {
            Sign::Plus => 0.0,
            Sign::Minus => FRAC_PI_2,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Outcome pairs in the fixed order `++, +−, −+, −−` (Alice first).
pub const OUTCOME_PAIRS: [(Sign, Sign); 4] = [
    (Sign::Plus, Sign::Plus),
    (Sign::Plus, Sign::Minus),
    (Sign::Minus, Sign::Plus),
    (Sign::Minus, Sign::Minus),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    /// Alice's polarizer orientation (radians).
    pub theta1: f64,
    /// Bob's mixing angle; his half-wave plate sits at `theta2 / 2`.
    pub theta2: f64,
    pub sign_a: Sign,
    pub sign_b: Sign,
}

impl MeasurementSetting {
    pub fn new(theta1: f64, theta2: f64, sign_a: Sign, sign_b: Sign) -> Self {
        MeasurementSetting {
            theta1,
            theta2,
            sign_a,
            sign_b,
        }
    }

    /// Polarizer angle Alice physically uses.
    pub fn alice_polarizer_angle(&self) -> f64 {
        self.theta1 + self.sign_a.angle_offset()
    }

    /// Half-wave plate angle Bob physically uses.
    pub fn bob_hwp_angle(&self) -> f64 {
        (self.theta2 + self.sign_b.angle_offset()) / 2.0
    }
}

/// QWP mount angles on `(T, a, b1, b2)` plus the phase applied to `a`
/// after the trigger projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreparationConfig {
    pub qwp_angles: [f64; 4],
    pub calibration_phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    pub state: StateVector,
    pub preparation_probability: f64,
    pub calibration_phase: f64,
    pub qwp_angles: [f64; 4],
}

impl PreparedState {
    pub fn fidelity_to_target(&self) -> f64 {
        fidelity(&self.state, &target_state()).expect("same modes")
    }

    pub fn config(&self) -> PreparationConfig {
        PreparationConfig {
            qwp_angles: self.qwp_angles,
            calibration_phase: self.calibration_phase,
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `(|H⟩_a|φ⁻⟩ − |V⟩_a|ψ⁺⟩)/√2` on `(a, b1, b2)`.
pub fn target_state() -> StateVector {
    let h = BasisLetter::H.ket();
    let v = BasisLetter::V.ket();
    let phi_m = BellKind::PhiMinus.amplitudes();
    let psi_p = BellKind::PsiPlus.amplitudes();
    let amps = (0..8)
        .map(|i| {
            let (ai, bi) = (i >> 2, i & 3);
            (h[ai] * phi_m[bi] - v[ai] * psi_p[bi]) * FRAC_1_SQRT_2
        })
        .collect();
    StateVector::from_amplitudes(&PREPARED_MODES, amps).expect("8 amplitudes")
}

/// `(|RRR⟩ + |LLL⟩)/√2` on `(a, b1, b2)`.
pub fn ghz_circular_state() -> StateVector {
    let r = BasisLetter::R.ket();
    let l = BasisLetter::L.ket();
    let amps = (0..8)
        .map(|i: usize| {
            let bits = [(i >> 2) & 1, (i >> 1) & 1, i & 1];
            let pr: C64 = bits.iter().map(|&b| r[b]).product();
            let pl: C64 = bits.iter().map(|&b| l[b]).product();
            (pr + pl) * FRAC_1_SQRT_2
        })
        .collect();
    StateVector::from_amplitudes(&PREPARED_MODES, amps).expect("8 amplitudes")
}

/// `(|HHHH⟩ + |VVVV⟩)/√2` on `(T, a, b1, b2)`.
pub fn ghz4_state() -> StateVector {
    let mut amps = vec![c(0.0, 0.0); 16];
    amps[0] = c(FRAC_1_SQRT_2, 0.0);
    amps[15] = c(FRAC_1_SQRT_2, 0.0);
    StateVector::from_amplitudes(&FUSED_MODES, amps).expect("16 amplitudes")
}

/// `φ⁺_{a1,b1} ⊗ φ⁺_{a2,b2}`.
pub fn build_source() -> StateVector {
    let p1 = bell_state(BellKind::PhiPlus, &["a1", "b1"]).expect("two modes");
    let p2 = bell_state(BellKind::PhiPlus, &["a2", "b2"]).expect("two modes");
    tensor(&p1, &p2).expect("disjoint modes")
}

/// Source through PBS1, reordered to `(T, a, b1, b2)`, with the PBS success probability.
pub fn fuse_source() -> Result<(StateVector, f64)> {
    let ports = PbsPorts::new(["a1", "a2"], ["T", "a"]);
    let (fused, p) = pbs_parity_check(&build_source(), &ports)?;
    Ok((fused.permuted(&FUSED_MODES)?, p))
}

fn phase_gate(phase: f64) -> SingleQubitOp {
    SingleQubitOp::new(Matrix2::new(
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        C64::from_polar(1.0, phase),
    ))
}

fn finish_preparation(fused: &StateVector, config: PreparationConfig) -> Result<PreparedState> {
    let mut s = fused.clone();
    for (mode, angle) in FUSED_MODES.iter().zip(config.qwp_angles) {
        s = s.apply(&Operator::single(mode, &qwp(angle)))?;
    }
    let (s, _) = s.measure_out("T", BasisLetter::H.ket())?;
    if s.is_empty() {
        return Err(Error::EmptyPostSelection(0.0));
    }
    let s = s.apply(&Operator::single("a", &phase_gate(config.calibration_phase)))?;
    Ok(PreparedState {
        preparation_probability: s.norm_weight(),
        state: s,
        calibration_phase: config.calibration_phase,
        qwp_angles: config.qwp_angles,
    })
}

/// Runs the full preparation pipeline for the given QWP angles and phase.
pub fn prepare_state(qwp_angles: [f64; 4], calibration_phase: f64) -> Result<PreparedState> {
    let (fused, _) = fuse_source()?;
    finish_preparation(
        &fused,
        PreparationConfig {
            qwp_angles,
            calibration_phase,
        },
    )
}

pub fn prepare_from(config: &PreparationConfig) -> Result<PreparedState> {
    prepare_state(config.qwp_angles, config.calibration_phase)
}

/// Grid search over QWP angles `k·π/4` (k = 0..3, per mode, `T` outermost)
/// and phases `m·π/2` (innermost). Returns the first configuration whose
/// output matches the target state.
pub fn calibrate_preparation() -> Result<PreparationConfig> {
    let (fused, _) = fuse_source()?;
    let steps = |k: usize| k as f64 * FRAC_PI_4;
    for t in 0..4 {
        for a in 0..4 {
            for b1 in 0..4 {
                for b2 in 0..4 {
                    for m in 0..4 {
                        let config = PreparationConfig {
                            qwp_angles: [steps(t), steps(a), steps(b1), steps(b2)],
                            calibration_phase: m as f64 * FRAC_PI_2,
                        };
                        let Ok(prepared) = finish_preparation(&fused, config) else {
                            continue;
                        };
                        if prepared.fidelity_to_target() >= 1.0 - PIPELINE_TOL {
                            return Ok(config);
                        }
                    }
                }
            }
        }
    }
    Err(Error::CalibrationFailed)
}

/// Calibrated preparation.
pub fn prepare_calibrated() -> Result<PreparedState> {
    prepare_from(&calibrate_preparation()?)
}

pub fn alice_projector(theta1: f64, sign: Sign) -> SingleQubitOp {
    polarizer_projector(theta1 + sign.angle_offset())
}

/// `cos θ₂|φ⁻⟩ + sin θ₂|ψ⁺⟩` for +1, `−sin θ₂|φ⁻⟩ + cos θ₂|ψ⁺⟩` for −1.
pub fn bob_target(theta2: f64, sign: Sign) -> StateVector {
    let (s, co) = (theta2 + sign.angle_offset()).sin_cos();
    let phi_m = BellKind::PhiMinus.amplitudes();
    let psi_p = BellKind::PsiPlus.amplitudes();
    let amps = (0..4).map(|i| phi_m[i] * co + psi_p[i] * s).collect();
    StateVector::from_amplitudes(&BOB_MODES, amps).expect("4 amplitudes")
}

pub fn bob_projector(theta2: f64, sign: Sign) -> Operator {
    Operator::rank_one(&bob_target(theta2, sign))
}

/// `⟨Ψ| A ⊗ B |Ψ⟩` for one outcome pair.
pub fn outcome_probability(prepared: &PreparedState, setting: &MeasurementSetting) -> f64 {
    let a = Operator::single("a", &alice_projector(setting.theta1, setting.sign_a));
    let joint = a
        .kron(&bob_projector(setting.theta2, setting.sign_b))
        .expect("disjoint modes");
    prepared.state.expectation(&joint).expect("prepared modes")
}

/// Probabilities in [`OUTCOME_PAIRS`] order.
pub fn outcome_probabilities(prepared: &PreparedState, theta1: f64, theta2: f64) -> [f64; 4] {
    OUTCOME_PAIRS.map(|(sa, sb)| outcome_probability(prepared, &MeasurementSetting::new(theta1, theta2, sa, sb)))
}

pub fn correlation_from_probabilities(p: &[f64; 4]) -> f64 {
    p[0] + p[3] - p[1] - p[2]
}

/// `E = p(++) + p(−−) − p(+−) − p(−+)`.
pub fn correlation_exact(prepared: &PreparedState, theta1: f64, theta2: f64) -> f64 {
    correlation_from_probabilities(&outcome_probabilities(prepared, theta1, theta2))
}

/// Which pair of ±-basis polarizer outcomes behind PBS2 counts as a detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalyzerPairing {
    /// `(+, +)` or `(−, −)` behind the PBS.
    Parallel,
    /// `(+, −)` or `(−, +)` behind the PBS.
    Crossed,
}

impl AnalyzerPairing {
    pub fn name(self) -> &'static str {
        match self {
            AnalyzerPairing::Parallel => "parallel",
            AnalyzerPairing::Crossed => "crossed",
        }
    }

    fn polarizer_pairs(self) -> [(f64, f64); 2] {
        let (p, m) = (FRAC_PI_4, 3.0 * FRAC_PI_4);
        match self {
            AnalyzerPairing::Parallel => [(p, p), (m, m)],
            AnalyzerPairing::Crossed => [(p, m), (m, p)],
        }
    }
}

/// Raw click probability of Bob's analyzer: HWP at `hwp_angle` on `b2`,
/// PBS2 parity check on `(b1, b2)`, then a polarizer in each output.
pub fn bob_circuit_click_probability(state: &StateVector, hwp_angle: f64, pairing: AnalyzerPairing) -> Result<f64> {
    let rotated = state.apply(&Operator::single("b2", &hwp(hwp_angle)))?;
    let ports = PbsPorts::new(BOB_MODES, BOB_MODES);
    let (filtered, p_pbs) = match pbs_parity_check(&rotated, &ports) {
        Ok(r) => r,
        Err(Error::EmptyPostSelection(_)) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let mut p_pol = 0.0;
    for (t1, t2) in pairing.polarizer_pairs() {
        let pols =
            Operator::single("b1", &polarizer_projector(t1)).kron(&Operator::single("b2", &polarizer_projector(t2)))?;
        p_pol += filtered.expectation(&pols)?;
    }
    Ok(p_pbs * p_pol)
}

/// Outcome probabilities from the physical analyzer circuits, renormalized
/// over the accepted four-fold coincidences. Order as [`OUTCOME_PAIRS`].
pub fn circuit_outcome_probabilities(
    prepared: &PreparedState,
    theta1: f64,
    theta2: f64,
    pairing: AnalyzerPairing,
) -> Result<[f64; 4]> {
    let mut raw = [0.0; 4];
    for (slot, (sa, sb)) in raw.iter_mut().zip(OUTCOME_PAIRS) {
        let setting = MeasurementSetting::new(theta1, theta2, sa, sb);
        let a = Operator::single("a", &polarizer_projector(setting.alice_polarizer_angle()));
        let p_a = prepared.state.expectation(&a)?;
        if p_a < crate::qstate::EMPTY_THRESHOLD {
            continue;
        }
        let after_alice = prepared.state.apply(&a)?.normalized();
        *slot = p_a * bob_circuit_click_probability(&after_alice, setting.bob_hwp_angle(), pairing)?;
    }
    let total: f64 = raw.iter().sum();
    if total < crate::qstate::EMPTY_THRESHOLD {
        return Err(Error::EmptyPostSelection(total));
    }
    Ok(raw.map(|r| r / total))
}

/// Whether the circuit with `pairing` reproduces Bob's rank-1 projector
/// statistics to within `PIPELINE_TOL` on a fixed set of probe settings.
pub fn analyzer_pairing_matches(prepared: &PreparedState, pairing: AnalyzerPairing) -> bool {
    let probes = [(0.0, 0.0), (0.3, 0.0), (0.1, 0.45), (1.1, 2.3)];
    probes.iter().all(|&(t1, t2)| {
        let Ok(circ) = circuit_outcome_probabilities(prepared, t1, t2, pairing) else {
            return false;
        };
        let exact = outcome_probabilities(prepared, t1, t2);
        circ.iter().zip(&exact).all(|(a, b)| (a - b).abs() <= PIPELINE_TOL)
    })
}

/// Finds the polarizer pairing whose circuit statistics reproduce Bob's
/// rank-1 projectors. The crossed pairing is tried first.
pub fn calibrate_analyzer(prepared: &PreparedState) -> Result<AnalyzerPairing> {
    [AnalyzerPairing::Crossed, AnalyzerPairing::Parallel]
        .into_iter()
        .find(|&p| analyzer_pairing_matches(prepared, p))
        .ok_or(Error::CalibrationFailed)
}

/// The two branches of the target state written in the rotated bases.
///
/// Alice's rotated basis is the image of `{|H⟩, |V⟩}` under a half-wave
/// plate at `θ₁/2`; Bob's is the image of `{|φ⁺⟩, |ψ⁻⟩}` under his analyzer
/// plate at `θ₂/2` on `b2`. Returns the normalized correlated branch
/// `(|H'⟩|φ⁻'⟩ − |V'⟩|ψ⁺'⟩)/√2` and anti-correlated branch
/// `(|V'⟩|φ⁻'⟩ + |H'⟩|ψ⁺'⟩)/√2`.
pub fn rotated_branches(theta1: f64, theta2: f64) -> (StateVector, StateVector) {
    let alice = hwp(theta1 / 2.0);
    let h1 = alice.apply_to(BasisLetter::H.ket());
    let v1 = alice.apply_to(BasisLetter::V.ket());
    let bob_plate = Operator::single("b2", &hwp(theta2 / 2.0));
    let rot = |k: BellKind| {
        bell_state(k, &BOB_MODES)
            .and_then(|s| s.apply(&bob_plate))
            .expect("bob modes")
            .amplitudes()
            .to_vec()
    };
    let phi_m = rot(BellKind::PhiPlus);
    let psi_p = rot(BellKind::PsiMinus);
    let build = |terms: [([C64; 2], &[C64], f64); 2]| {
        let amps = (0..8)
            .map(|i| {
                let (ai, bi) = (i >> 2, i & 3);
                terms.iter().map(|(ak, bk, sign)| ak[ai] * bk[bi] * *sign).sum::<C64>() * FRAC_1_SQRT_2
            })
            .collect();
        StateVector::from_amplitudes(&PREPARED_MODES, amps).expect("8 amplitudes")
    };
    let correlated = build([(h1, &phi_m, 1.0), (v1, &psi_p, -1.0)]);
    let anti = build([(v1, &phi_m, 1.0), (h1, &psi_p, 1.0)]);
    (correlated, anti)
}

/// Fidelity between the target state and its rotated-basis expansion
/// `cos(θ₁+θ₂)·correlated + sin(θ₁+θ₂)·anti`.
pub fn verify_rotated_expansion(theta1: f64, theta2: f64) -> f64 {
    let (corr, anti) = rotated_branches(theta1, theta2);
    let (s, co) = (theta1 + theta2).sin_cos();
    let amps = corr
        .amplitudes()
        .iter()
        .zip(anti.amplitudes())
        .map(|(x, y)| x * co + y * s)
        .collect();
    let expansion = StateVector::from_amplitudes(&PREPARED_MODES, amps).expect("8 amplitudes");
    fidelity(&target_state(), &expansion).expect("same modes")
}
