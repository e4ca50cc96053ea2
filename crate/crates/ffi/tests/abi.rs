use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use cesaro_ffi::*;

fn measure(json: &str) -> *mut CesaroMeasure {
    let text = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { cesaro_measure_from_json(text.as_ptr(), &mut m) },
        CesaroStatus::Ok
    );
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cesaro_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

const LEBESGUE: &str = r#"{"components":[{"kind":"power_log","c":1.0,"gamma":1.0,"beta":0.0}]}"#;

#[test]
fn moments_and_tails() {
    let m = measure(LEBESGUE);
    let mut v = 0.0;
    unsafe {
        assert_eq!(cesaro_measure_total_mass(m, &mut v), CesaroStatus::Ok);
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(cesaro_measure_tail(m, 0.75, &mut v), CesaroStatus::Ok);
        assert!((v - 0.25).abs() < 1e-15);
        let mut buf = [0.0; 9];
        assert_eq!(
            cesaro_measure_moments(m, 8, buf.as_mut_ptr(), buf.len()),
            CesaroStatus::Ok
        );
        for (n, b) in buf.iter().enumerate() {
            assert!((b - 1.0 / (n as f64 + 1.0)).abs() < 1e-13);
        }
        assert_eq!(
            cesaro_measure_moments(m, 9, buf.as_mut_ptr(), buf.len()),
            CesaroStatus::InvalidInput
        );
        assert_eq!(cesaro_measure_tail(m, 1.0, &mut v), CesaroStatus::InvalidInput);
        assert!(last_error().contains("[0,1)"));
        cesaro_measure_free(m);
    }
}

#[test]
fn null_pointers_are_reported() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(cesaro_measure_moment(ptr::null(), 1, &mut v), CesaroStatus::NullPointer);
        assert_eq!(
            cesaro_measure_from_json(ptr::null(), &mut ptr::null_mut()),
            CesaroStatus::NullPointer
        );
        cesaro_measure_free(ptr::null_mut());
        cesaro_series_free(ptr::null_mut());
        cesaro_string_free(ptr::null_mut());
    }
}

#[test]
fn series_operator_and_norms() {
    let m = measure(LEBESGUE);
    let re = [1.0, 1.0, 1.0, 1.0];
    let mut f = ptr::null_mut();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(
            cesaro_series_from_coeffs(re.as_ptr(), ptr::null(), re.len(), &mut f),
            CesaroStatus::Ok
        );
        assert_eq!(cesaro_apply(m, f, &mut g), CesaroStatus::Ok);
        let (mut cr, mut ci) = ([0.0; 4], [0.0; 4]);
        assert_eq!(
            cesaro_series_coeffs(g, cr.as_mut_ptr(), ci.as_mut_ptr(), 4),
            CesaroStatus::Ok
        );
        // all-ones input: s_n = n + 1, so b_n = 1
        for c in cr {
            assert!((c - 1.0).abs() < 1e-13);
        }
        let (mut zr, mut zi) = (0.0, 0.0);
        assert_eq!(cesaro_series_eval(g, 0.5, 0.0, &mut zr, &mut zi), CesaroStatus::Ok);
        assert!((zr - 1.875).abs() < 1e-13 && zi == 0.0);
        assert_eq!(
            cesaro_series_eval(g, 1.0, 0.0, &mut zr, &mut zi),
            CesaroStatus::InvalidInput
        );

        let z = [0.0, 1.0];
        let mut id = ptr::null_mut();
        assert_eq!(
            cesaro_series_from_coeffs(z.as_ptr(), ptr::null(), 2, &mut id),
            CesaroStatus::Ok
        );
        let mut v = 0.0;
        assert_eq!(cesaro_bloch_norm(id, &mut v), CesaroStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(cesaro_besov_norm(id, 2.0, &mut v), CesaroStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(cesaro_mean_lipschitz_norm(id, 2.0, 0.5, &mut v), CesaroStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(cesaro_besov_norm(id, 1.0, &mut v), CesaroStatus::InvalidInput);
        cesaro_series_free(id);
        cesaro_series_free(g);
        cesaro_series_free(f);
        cesaro_measure_free(m);
    }
}

#[test]
fn series_from_builtin_json() {
    let spec = CString::new(r#"{"builtin":"log_one_over_one_minus_z"}"#).unwrap();
    let mut f = ptr::null_mut();
    let mut deg = 0usize;
    unsafe {
        assert_eq!(cesaro_series_from_json(spec.as_ptr(), 128, &mut f), CesaroStatus::Ok);
        assert_eq!(cesaro_series_degree(f, &mut deg), CesaroStatus::Ok);
        assert_eq!(deg, 128);
        cesaro_series_free(f);
    }
}

#[test]
fn classify_json_round_trip() {
    let m = measure(r#"{"components":[{"kind":"point","w":1.0,"t0":0.9}]}"#);
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(cesaro_classify_json(m, 1.0, 0.5, &mut out), CesaroStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        cesaro_string_free(out);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["label"], "vanishing");
        let bad = CString::new("sideways").unwrap();
        assert_eq!(
            cesaro_verify_json(m, bad.as_ptr(), 2.0, 2.0, 4, &mut out),
            CesaroStatus::InvalidInput
        );
        cesaro_measure_free(m);
    }
}

#[test]
fn c_program_links_against_the_header() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/abi-*  ->  target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libcesaro_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = std::env::temp_dir().join(format!("cesaro_smoke_{}", std::process::id()));
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(
        run.status.success(),
        "smoke program failed: {:?} {}",
        run.status,
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
