//! Exercises the C ABI exactly as a foreign caller would: raw pointers,
//! status codes, and manual free calls.

use std::ffi::CStr;
use std::ptr;

use corrkit_ffi::*;

fn matrix(data: &[f64], n: usize) -> *mut CorrkitMatrix {
    let mut out = ptr::null_mut();
    let status = unsafe { corrkit_matrix_new(n, data.as_ptr(), &mut out) };
    assert_eq!(status, CorrkitStatus::Ok);
    assert!(!out.is_null());
    out
}

#[test]
fn cpd_exact_roundtrip() {
    let m = matrix(&[1.0, -2.0, -2.0, 1.0], 2);
    let mut verdict = ptr::null_mut();
    unsafe {
        assert_eq!(corrkit_cpd_exact(m, &mut verdict), CorrkitStatus::Ok);
        assert_eq!(
            corrkit_definiteness_verdict(verdict),
            CorrkitVerdict::NotPositive
        );

        let mut margin = f64::NAN;
        assert_eq!(
            corrkit_definiteness_margin(verdict, &mut margin),
            CorrkitStatus::Ok
        );
        assert_eq!(margin, -2.0);

        let len = corrkit_definiteness_witness_len(verdict);
        assert_eq!(len, 2);
        let mut witness = vec![0i32; len];
        assert_eq!(
            corrkit_definiteness_witness(verdict, witness.as_mut_ptr(), len),
            CorrkitStatus::Ok
        );
        assert_eq!(witness, vec![1, 1]);

        let mut json = ptr::null_mut();
        assert_eq!(
            corrkit_definiteness_to_json(verdict, &mut json),
            CorrkitStatus::Ok
        );
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        assert!(text.contains("NOT_POSITIVE"));
        corrkit_string_free(json);

        corrkit_definiteness_free(verdict);
        corrkit_matrix_free(m);
    }
}

#[test]
fn cpd_positive_and_anti_stable_agree() {
    let m = matrix(&[2.0, 0.0, 0.0, -0.5], 2);
    unsafe {
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(corrkit_cpd_exact(m, &mut a), CorrkitStatus::Ok);
        assert_eq!(corrkit_cpd_anti_stable(m, &mut b), CorrkitStatus::Ok);
        assert_eq!(corrkit_definiteness_verdict(a), CorrkitVerdict::Positive);
        assert_eq!(corrkit_definiteness_verdict(b), CorrkitVerdict::Positive);
        let (mut ma, mut mb) = (0.0, 0.0);
        assert_eq!(corrkit_definiteness_margin(a, &mut ma), CorrkitStatus::Ok);
        assert_eq!(corrkit_definiteness_margin(b, &mut mb), CorrkitStatus::Ok);
        assert!((ma - 1.5).abs() < 1e-12 && (mb - 1.5).abs() < 1e-12);
        corrkit_definiteness_free(a);
        corrkit_definiteness_free(b);
        corrkit_matrix_free(m);
    }
}

#[test]
fn refute_finds_witness_on_negative_trace() {
    let m = matrix(&[-1.0, 0.25, 0.25, -1.0], 2);
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(corrkit_cpd_refute(m, 8, 42, &mut v), CorrkitStatus::Ok);
        assert_eq!(corrkit_definiteness_verdict(v), CorrkitVerdict::NotPositive);
        corrkit_definiteness_free(v);
        corrkit_matrix_free(m);
    }
}

#[test]
fn lattice_positive_flips_with_bound() {
    let m = matrix(&[1.0, 0.0, 0.0, -0.3], 2);
    unsafe {
        let mut v1 = ptr::null_mut();
        let mut v2 = ptr::null_mut();
        assert_eq!(
            corrkit_lattice_positive_exact(m, 1, &mut v1),
            CorrkitStatus::Ok
        );
        assert_eq!(
            corrkit_lattice_positive_exact(m, 2, &mut v2),
            CorrkitStatus::Ok
        );
        assert_eq!(corrkit_definiteness_verdict(v1), CorrkitVerdict::Positive);
        assert_eq!(
            corrkit_definiteness_verdict(v2),
            CorrkitVerdict::NotPositive
        );
        corrkit_definiteness_free(v1);
        corrkit_definiteness_free(v2);
        corrkit_matrix_free(m);
    }
}

#[test]
fn membership_verdicts_and_json() {
    unsafe {
        // Non-member with separating witness.
        let rho = [1.0, -0.6, 0.0];
        let mut h = ptr::null_mut();
        assert_eq!(
            corrkit_acf_unit_test(rho.as_ptr(), rho.len(), 7, &mut h),
            CorrkitStatus::Ok
        );
        assert_eq!(corrkit_membership_is_member(h), 0);
        let mut trace = f64::NAN;
        assert_eq!(
            corrkit_membership_certificate_value(h, &mut trace),
            CorrkitStatus::Ok
        );
        assert!(trace <= -1e-8);
        let mut json = ptr::null_mut();
        assert_eq!(corrkit_membership_to_json(h, &mut json), CorrkitStatus::Ok);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("NON_MEMBER"));
        corrkit_string_free(json);
        corrkit_membership_free(h);

        // Member with decomposition.
        let rho = [1.0, 0.5, 0.25];
        let mut h = ptr::null_mut();
        assert_eq!(
            corrkit_acf_unit_test(rho.as_ptr(), rho.len(), 7, &mut h),
            CorrkitStatus::Ok
        );
        assert_eq!(corrkit_membership_is_member(h), 1);
        let mut residual = f64::NAN;
        assert_eq!(
            corrkit_membership_certificate_value(h, &mut residual),
            CorrkitStatus::Ok
        );
        assert!(residual <= 1e-8);
        corrkit_membership_free(h);

        // Lattice class, M = 2.
        let rho = [2.5, 2.5];
        let mut h = ptr::null_mut();
        assert_eq!(
            corrkit_acf_lattice_test(rho.as_ptr(), rho.len(), 2, 7, &mut h),
            CorrkitStatus::Ok
        );
        assert_eq!(corrkit_membership_is_member(h), 1);
        corrkit_membership_free(h);
    }
}

#[test]
fn status_codes_and_last_error() {
    unsafe {
        // Invalid lag sequence: rho[0] != 1.
        let rho = [0.9, 0.0];
        let mut h = ptr::null_mut();
        assert_eq!(
            corrkit_acf_unit_test(rho.as_ptr(), rho.len(), 7, &mut h),
            CorrkitStatus::InvalidArgument
        );
        let msg = CStr::from_ptr(corrkit_last_error()).to_str().unwrap();
        assert!(msg.contains("rho[0]"), "message was {msg:?}");

        // Null pointers.
        assert_eq!(
            corrkit_matrix_new(2, ptr::null(), &mut ptr::null_mut()),
            CorrkitStatus::NullPointer
        );

        // Capacity overflow.
        let n = 32usize;
        let eye: Vec<f64> = (0..n * n)
            .map(|k| if k % (n + 1) == 0 { 1.0 } else { 0.0 })
            .collect();
        let m = matrix(&eye, n);
        let mut v = ptr::null_mut();
        assert_eq!(corrkit_cpd_exact(m, &mut v), CorrkitStatus::CapacityExceeded);
        corrkit_matrix_free(m);
    }
}

#[test]
fn flat_buffer_helpers() {
    unsafe {
        // Telegraph chain into a caller buffer.
        let mut xs = vec![0i32; 10_000];
        assert_eq!(
            corrkit_telegraph_simulate(0.25, xs.len(), 5, xs.as_mut_ptr()),
            CorrkitStatus::Ok
        );
        assert!(xs.iter().all(|v| v.abs() == 1));

        // Estimate its lags back.
        let xf: Vec<f64> = xs.iter().map(|v| f64::from(*v)).collect();
        let mut rho = vec![0.0f64; 4];
        assert_eq!(
            corrkit_acf_estimate(xf.as_ptr(), xf.len(), 3, rho.as_mut_ptr()),
            CorrkitStatus::Ok
        );
        assert_eq!(rho[0], 1.0);
        assert!((rho[1] - 0.5).abs() < 0.05);

        // Uniformize and transient on the symmetric two-state generator.
        let q = [-1.0, 1.0, 1.0, -1.0];
        let mut p = vec![0.0f64; 4];
        let mut lambda = 0.0f64;
        assert_eq!(
            corrkit_uniformize(q.as_ptr(), 2, 2.0, p.as_mut_ptr(), &mut lambda),
            CorrkitStatus::Ok
        );
        assert_eq!(lambda, 2.0);
        assert_eq!(p, vec![0.5, 0.5, 0.5, 0.5]);

        let mut dist = vec![0.0f64; 2];
        assert_eq!(
            corrkit_transient_distribution(q.as_ptr(), 2, 0, 1.0, 1e-10, dist.as_mut_ptr()),
            CorrkitStatus::Ok
        );
        assert!((dist[0] - (0.5 + 0.5 * (-2.0f64).exp())).abs() < 1e-6);

        // Version string is a readable C string.
        let v = CStr::from_ptr(corrkit_version()).to_str().unwrap();
        assert!(!v.is_empty());
    }
}

#[test]
fn generated_header_exists_with_opaque_types() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("corrkit.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for needle in [
        "CORRKIT_H",
        "CorrkitStatus",
        "CorrkitMatrix",
        "corrkit_cpd_exact",
        "corrkit_acf_unit_test",
        "corrkit_last_error",
        "corrkit_string_free",
    ] {
        assert!(text.contains(needle), "header missing {needle}");
    }
}
