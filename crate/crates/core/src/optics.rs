//! Jones-matrix optical elements and the polarizing beamsplitter parity check.
//!
//! Angles are physical mount angles in radians, measured in real space from
//! the horizontal. A plate rotated by `φ` rotates linear polarization by `2φ`.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::qstate::{project, Operator, SingleQubitOp, StateVector, C64};

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Mount angle of a wave plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePlateSetting {
    pub physical_angle: f64,
}

impl WavePlateSetting {
    pub fn new(physical_angle: f64) -> Self {
        WavePlateSetting { physical_angle }
    }

    /// Plate angle that rotates a linear polarization by `rotation` in real space.
    pub fn for_rotation(rotation: f64) -> Self {
        WavePlateSetting {
            physical_angle: rotation / 2.0,
        }
    }

    pub fn half_wave(&self) -> SingleQubitOp {
        hwp(self.physical_angle)
    }

    pub fn quarter_wave(&self) -> SingleQubitOp {
        qwp(self.physical_angle)
    }
}

/// Half-wave plate: `[[cos 2φ, sin 2φ], [sin 2φ, −cos 2φ]]` (det −1).
pub fn hwp(physical_angle: f64) -> SingleQubitOp {
    let (s, co) = (2.0 * physical_angle).sin_cos();
    SingleQubitOp::new(Matrix2::new(c(co, 0.0), c(s, 0.0), c(s, 0.0), c(-co, 0.0)))
}

/// Quarter-wave plate with eigenvalue `i` on the axis at `physical_angle`
/// and `1` on the perpendicular axis. At 45° it takes `|H⟩` to `|R⟩`.
pub fn qwp(physical_angle: f64) -> SingleQubitOp {
    let (s, co) = physical_angle.sin_cos();
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    let cs = co * s;
    SingleQubitOp::new(Matrix2::new(
        i * co * co + one * s * s,
        (i - one) * cs,
        (i - one) * cs,
        i * s * s + one * co * co,
    ))
}

/// Projector onto the linear polarization `cos θ|H⟩ + sin θ|V⟩`.
pub fn polarizer_projector(angle: f64) -> SingleQubitOp {
    let (s, co) = angle.sin_cos();
    SingleQubitOp::projector_onto([c(co, 0.0), c(s, 0.0)])
}

/// Input and output mode names of a polarizing beamsplitter.
///
/// Output `k` is the port a horizontally polarized photon from input `k`
/// is transmitted into; vertical photons are reflected to the other port.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbsPorts {
    pub inputs: [String; 2],
    pub outputs: [String; 2],
}

impl PbsPorts {
    pub fn new(inputs: [&str; 2], outputs: [&str; 2]) -> Self {
        PbsPorts {
            inputs: inputs.map(str::to_string),
            outputs: outputs.map(str::to_string),
        }
    }

    /// Projector onto `span{|HH⟩, |VV⟩}` of the two input modes.
    pub fn even_parity_projector(&self) -> Operator {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.0, 0.0);
        m[(3, 3)] = c(1.0, 0.0);
        Operator::new(&self.inputs, m).expect("two distinct input modes")
    }
}

/// Keeps only the terms where one photon leaves each output port.
///
/// That is the even-parity (`HH`/`VV`) part of the two input qubits. The
/// state is renormalized and the input modes are renamed to the outputs.
pub fn pbs_parity_check(s: &StateVector, ports: &PbsPorts) -> Result<(StateVector, f64)> {
    for m in &ports.inputs {
        s.position(m)?;
    }
    let (kept, p) = project(s, &ports.even_parity_projector())?;
    if kept.is_empty() {
        return Err(Error::EmptyPostSelection(p));
    }
    // HH: a1→out0, a2→out1. VV: the photons swap ports but both are V, so
    // the post-selected state is unchanged by the swap.
    let renamed = kept.relabeled(&[
        (ports.inputs[0].as_str(), ports.outputs[0].as_str()),
        (ports.inputs[1].as_str(), ports.outputs[1].as_str()),
    ])?;
    Ok((renamed, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{bell_state, fidelity, make_ket, parse_ket, tensor, BasisLetter, BellKind, ALGEBRA_TOL};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

    fn on(op: &SingleQubitOp, l: BasisLetter) -> [C64; 2] {
        op.apply_to(l.ket())
    }

    fn same_ray(a: [C64; 2], b: [C64; 2]) -> bool {
        let ov = a[0].conj() * b[0] + a[1].conj() * b[1];
        (ov.norm_sqr() - 1.0).abs() < ALGEBRA_TOL
    }

    #[test]
    fn hwp_examples() {
        let h0 = hwp(0.0);
        assert!((on(&h0, BasisLetter::H)[0] - c(1.0, 0.0)).norm() < ALGEBRA_TOL);
        assert!((on(&h0, BasisLetter::V)[1] - c(-1.0, 0.0)).norm() < ALGEBRA_TOL);
        let h45 = on(&hwp(FRAC_PI_4), BasisLetter::H);
        assert!(h45[0].norm() < ALGEBRA_TOL && (h45[1] - c(1.0, 0.0)).norm() < ALGEBRA_TOL);
        // 2φ = 45°: (cos 45°, sin 45°) = |+⟩
        let h22 = on(&hwp(FRAC_PI_8), BasisLetter::H);
        let plus = BasisLetter::Plus.ket();
        assert!((h22[0] - plus[0]).norm() < ALGEBRA_TOL);
        assert!((h22[1] - plus[1]).norm() < ALGEBRA_TOL);
    }

    #[test]
    fn plate_setting_rotation_convention() {
        // a plate at θ/2 rotates H to the linear polarization at θ
        let theta = 0.7;
        let out = on(&WavePlateSetting::for_rotation(theta).half_wave(), BasisLetter::H);
        assert_abs_diff_eq!(out[0].re, theta.cos(), epsilon = ALGEBRA_TOL);
        assert_abs_diff_eq!(out[1].re, theta.sin(), epsilon = ALGEBRA_TOL);
    }

    #[test]
    fn qwp_examples() {
        assert!(same_ray(on(&qwp(0.0), BasisLetter::H), BasisLetter::H.ket()));
        assert!(same_ray(on(&qwp(FRAC_PI_4), BasisLetter::H), BasisLetter::R.ket()));
        assert!(same_ray(on(&qwp(FRAC_PI_4), BasisLetter::V), BasisLetter::L.ket()));
        for k in 0..50 {
            let phi = k as f64 * PI / 50.0;
            let q = qwp(phi);
            assert!((q * q).phase_insensitive_diff(&hwp(phi)) < ALGEBRA_TOL);
        }
    }

    #[test]
    fn polarizer_examples() {
        let p0 = polarizer_projector(0.0);
        assert!(p0.max_abs_diff(&SingleQubitOp::projector_onto(BasisLetter::H.ket())) < ALGEBRA_TOL);
        let p45 = polarizer_projector(FRAC_PI_4);
        let plus = BasisLetter::Plus.ket();
        let back = p45.apply_to(plus);
        assert_abs_diff_eq!(
            (plus[0].conj() * back[0] + plus[1].conj() * back[1]).re,
            1.0,
            epsilon = ALGEBRA_TOL
        );
    }

    #[test]
    fn wave_plates_unitary_and_hwp_involution() {
        for k in 0..100 {
            let phi = k as f64 * 2.0 * PI / 100.0;
            assert!(hwp(phi).unitarity_deviation() < ALGEBRA_TOL);
            assert!(qwp(phi).unitarity_deviation() < ALGEBRA_TOL);
            assert!((hwp(phi) * hwp(phi)).max_abs_diff(&SingleQubitOp::identity()) < ALGEBRA_TOL);
            let p = polarizer_projector(phi);
            assert!(p.projector_deviation() < ALGEBRA_TOL);
            let sum = p + polarizer_projector(phi + PI / 2.0);
            assert!(sum.max_abs_diff(&SingleQubitOp::identity()) < ALGEBRA_TOL);
        }
    }

    #[test]
    fn pbs_rejects_odd_parity() {
        let s = parse_ket(&["a1", "a2"], "HV").unwrap();
        let ports = PbsPorts::new(["a1", "a2"], ["T", "a"]);
        assert!(matches!(
            pbs_parity_check(&s, &ports),
            Err(Error::EmptyPostSelection(p)) if p == 0.0
        ));
    }

    #[test]
    fn pbs_diagonal_inputs() {
        // |++⟩ = (HH+HV+VH+VV)/2 → even part (HH+VV)/2, p = 1/2
        let s = parse_ket(&["a1", "a2"], "++").unwrap();
        let ports = PbsPorts::new(["a1", "a2"], ["T", "a"]);
        let (out, p) = pbs_parity_check(&s, &ports).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = ALGEBRA_TOL);
        assert_eq!(out.labels(), &["T", "a"]);
        let target = bell_state(BellKind::PhiPlus, &["T", "a"]).unwrap();
        assert_abs_diff_eq!(fidelity(&out, &target).unwrap(), 1.0, epsilon = ALGEBRA_TOL);
        assert_abs_diff_eq!(out.norm_weight(), 0.5, epsilon = ALGEBRA_TOL);
    }

    #[test]
    fn pbs_fuses_two_bell_pairs_into_ghz() {
        let src = tensor(
            &bell_state(BellKind::PhiPlus, &["a1", "b1"]).unwrap(),
            &bell_state(BellKind::PhiPlus, &["a2", "b2"]).unwrap(),
        )
        .unwrap();
        let (out, p) = pbs_parity_check(&src, &PbsPorts::new(["a1", "a2"], ["T", "a"])).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = ALGEBRA_TOL);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 16];
        amps[0] = c(s, 0.0);
        amps[15] = c(s, 0.0);
        let ghz = StateVector::from_amplitudes(&["T", "a", "b1", "b2"], amps).unwrap();
        assert_abs_diff_eq!(fidelity(&out, &ghz).unwrap(), 1.0, epsilon = ALGEBRA_TOL);
    }

    #[test]
    fn pbs_unknown_input_mode() {
        let s = make_ket(&["x", "y"], &[BasisLetter::H, BasisLetter::H]).unwrap();
        assert!(matches!(
            pbs_parity_check(&s, &PbsPorts::new(["a1", "y"], ["T", "a"])),
            Err(Error::UnknownMode(_))
        ));
    }

    fn random_state4() -> impl Strategy<Value = StateVector> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16).prop_filter_map("nonzero", |v| {
            let s =
                StateVector::from_amplitudes(&["a1", "b1", "a2", "b2"], v.into_iter().map(|(r, i)| c(r, i)).collect())
                    .ok()?;
            (s.norm() > 1e-3).then(|| s.normalized())
        })
    }

    proptest! {
        #[test]
        fn pbs_output_has_no_odd_terms(s in random_state4()) {
            let ports = PbsPorts::new(["a1", "a2"], ["T", "a"]);
            // even-parity weight computed independently from amplitude bits
            let expected: f64 = s.amplitudes().iter().enumerate()
                .filter(|(i, _)| ((i >> 3) & 1) == ((i >> 1) & 1))
                .map(|(_, a)| a.norm_sqr())
                .sum();
            let (out, p) = pbs_parity_check(&s, &ports).unwrap();
            prop_assert!((p - expected).abs() < ALGEBRA_TOL);
            let out = out.permuted(&["T", "a", "b1", "b2"]).unwrap();
            for (i, a) in out.amplitudes().iter().enumerate() {
                if ((i >> 3) & 1) != ((i >> 2) & 1) {
                    prop_assert!(a.norm() < ALGEBRA_TOL);
                }
            }
        }

        #[test]
        fn polarizer_outcomes_complete(s in random_state4(), theta in 0.0f64..PI) {
            let p_par = s.expectation(&Operator::single("b1", &polarizer_projector(theta))).unwrap();
            let p_perp = s.expectation(&Operator::single("b1", &polarizer_projector(theta + PI / 2.0))).unwrap();
            prop_assert!((p_par + p_perp - 1.0).abs() < ALGEBRA_TOL);
        }
    }
}
