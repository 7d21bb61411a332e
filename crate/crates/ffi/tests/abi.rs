use std::ffi::CStr;
use std::ptr;

use entbell_ffi::*;

fn calibrated() -> *mut EbPrepared {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { eb_prepared_new_calibrated(&mut p) }, EbStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(eb_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn prepared_handle_lifecycle() {
    let p = calibrated();
    let (mut f, mut prob) = (0.0, 0.0);
    unsafe {
        assert_eq!(eb_prepared_fidelity(p, &mut f), EbStatus::Ok);
        assert_eq!(eb_prepared_probability(p, &mut prob), EbStatus::Ok);
        eb_prepared_free(p);
        eb_prepared_free(ptr::null_mut());
    }
    assert!((f - 1.0).abs() < 1e-9);
    assert!((prob - 0.25).abs() < 1e-12);

    let angles = [0.0f64; 4];
    let mut q = ptr::null_mut();
    unsafe {
        assert_eq!(eb_prepared_new(angles.as_ptr(), 0.0, &mut q), EbStatus::Ok);
        eb_prepared_fidelity(q, &mut f);
        eb_prepared_free(q);
    }
    assert!(f < 0.99);
}

#[test]
fn probabilities_and_correlations() {
    let p = calibrated();
    let mut probs = [0.0f64; 4];
    let mut e = 0.0;
    let (t1, t2) = (0.3, 0.25);
    unsafe {
        assert_eq!(eb_outcome_probabilities(p, t1, t2, probs.as_mut_ptr()), EbStatus::Ok);
        assert_eq!(eb_correlation_exact(p, t1, t2, &mut e), EbStatus::Ok);
    }
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((e - (2.0f64 * (t1 + t2)).cos()).abs() < 1e-9);
    assert!((probs[0] + probs[3] - probs[1] - probs[2] - e).abs() < 1e-12);

    let mut vc = 0.0;
    unsafe {
        assert_eq!(eb_critical_visibility(p, &mut vc), EbStatus::Ok);
        eb_prepared_free(p);
    }
    assert!((vc - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    assert_eq!(eb_lhv_max_chsh(), 2.0);
}

#[test]
fn counts_estimates_and_chsh() {
    let p = calibrated();
    let noise = EbNoise {
        kind: EbNoiseKind::Uniform as i32,
        visibility_hv: 0.9,
        visibility_pm: 0.0,
    };
    let (mut a, mut b) = (EbCounts::default(), EbCounts::default());
    unsafe {
        assert_eq!(
            eb_simulate_counts(p, 0.0, 0.39, &noise, 1000.0, 3, &mut a),
            EbStatus::Ok
        );
        assert_eq!(
            eb_simulate_counts(p, 0.0, 0.39, &noise, 1000.0, 3, &mut b),
            EbStatus::Ok
        );
    }
    assert_eq!(a, b);
    assert!(a.n_pp + a.n_pm + a.n_mp + a.n_mm > 0);

    let mut est = EbEstimate::default();
    let c = EbCounts {
        n_pp: 25,
        n_pm: 25,
        n_mp: 25,
        n_mm: 25,
    };
    unsafe { assert_eq!(eb_correlation_from_counts(&c, &mut est), EbStatus::Ok) };
    assert_eq!(est.e_value, 0.0);
    assert!((est.sigma - 0.1).abs() < 1e-15);

    let es = [
        EbEstimate {
            e_value: 0.69,
            sigma: 0.05,
        },
        EbEstimate {
            e_value: -0.61,
            sigma: 0.04,
        },
        EbEstimate {
            e_value: -0.58,
            sigma: 0.04,
        },
        EbEstimate {
            e_value: -0.60,
            sigma: 0.04,
        },
    ];
    let mut r = EbChshResult::default();
    unsafe { assert_eq!(eb_chsh(es.as_ptr(), &mut r), EbStatus::Ok) };
    assert!((r.s_value - 2.48).abs() < 1e-12);
    assert!(r.violates_local_bound);
    unsafe { eb_prepared_free(p) };
}

#[test]
fn fringe_fit() {
    let angles: Vec<f64> = (0..12).map(|k| (k as f64 * 30.0).to_radians()).collect();
    let v = 0.78;
    let counts: Vec<f64> = angles.iter().map(|t| 1000.0 * (1.0 + v * (2.0 * t).cos())).collect();
    let mut fit = EbFringeFit::default();
    unsafe {
        assert_eq!(
            eb_fit_visibility(angles.as_ptr(), counts.as_ptr(), angles.len(), &mut fit),
            EbStatus::Ok
        );
    }
    assert!((fit.visibility - v).abs() < 1e-9);
    unsafe {
        assert_eq!(
            eb_fit_visibility(angles.as_ptr(), counts.as_ptr(), 2, &mut fit),
            EbStatus::FitFailed
        );
    }
    assert!(last_error().contains('2'));
}

#[test]
fn errors_are_reported() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(eb_prepared_fidelity(ptr::null(), &mut out), EbStatus::NullPointer);
    }
    assert!(last_error().contains("null"));

    let zero = EbCounts::default();
    let mut est = EbEstimate::default();
    unsafe { assert_eq!(eb_correlation_from_counts(&zero, &mut est), EbStatus::ZeroCounts) };

    let p = calibrated();
    let mut c = EbCounts::default();
    let bad_kind = EbNoise {
        kind: 7,
        visibility_hv: 1.0,
        visibility_pm: 1.0,
    };
    let bad_v = EbNoise {
        kind: EbNoiseKind::PerBasis as i32,
        visibility_hv: 1.0,
        visibility_pm: 1.5,
    };
    unsafe {
        assert_eq!(
            eb_simulate_counts(p, 0.0, 0.0, &bad_kind, 10.0, 1, &mut c),
            EbStatus::InvalidArgument
        );
        assert_eq!(
            eb_simulate_counts(p, 0.0, 0.5, &bad_v, 10.0, 1, &mut c),
            EbStatus::InvalidArgument
        );
        assert_eq!(
            eb_simulate_counts(p, 0.0, 0.5, &bad_kind, -1.0, 1, &mut c),
            EbStatus::InvalidArgument
        );
        let nan = [f64::NAN, 0.0, 0.0, 0.0];
        let mut q = ptr::null_mut();
        assert_eq!(eb_prepared_new(nan.as_ptr(), 0.0, &mut q), EbStatus::InvalidArgument);
        assert!(q.is_null());
        eb_prepared_free(p);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(eb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/entbell.h")).unwrap();
    for name in [
        "eb_last_error_message",
        "eb_version",
        "eb_prepared_new_calibrated",
        "eb_prepared_new",
        "eb_prepared_free",
        "eb_prepared_fidelity",
        "eb_prepared_probability",
        "eb_outcome_probabilities",
        "eb_correlation_exact",
        "eb_simulate_counts",
        "eb_correlation_from_counts",
        "eb_chsh",
        "eb_fit_visibility",
        "eb_lhv_max_chsh",
        "eb_critical_visibility",
        "typedef struct EbPrepared EbPrepared",
        "EB_STATUS_ZERO_COUNTS = 5",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
