use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use framekit_ffi::*;

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn last_error() -> String {
    let p = fk_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn generate(spec: &str) -> *mut FkSystem {
    let spec = CString::new(spec).unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(
        unsafe { fk_system_generate(spec.as_ptr(), &mut sys) },
        FkStatus::Ok
    );
    sys
}

fn take_string(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { fk_string_free(p) };
    s
}

#[test]
fn round_trip_through_handles() {
    let re = [1.0, 0.0, 0.5, 0.5, 0.0, 1.0];
    let im = [0.0, 0.0, 0.0, -0.5, 0.0, 0.0];
    let mut sys = ptr::null_mut();
    assert_eq!(
        unsafe { fk_system_new(2, 3, re.as_ptr(), im.as_ptr(), &mut sys) },
        FkStatus::Ok
    );
    unsafe {
        assert_eq!(fk_system_dim(sys), 2);
        assert_eq!(fk_system_count(sys), 3);
    }

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { fk_system_to_json(sys, &mut json) }, FkStatus::Ok);
    let json = CString::new(take_string(json)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(
        unsafe { fk_system_from_json(json.as_ptr(), &mut back) },
        FkStatus::Ok
    );

    let (mut re2, mut im2) = ([0.0; 6], [0.0; 6]);
    assert_eq!(
        unsafe { fk_system_columns(back, re2.as_mut_ptr(), im2.as_mut_ptr(), 6) },
        FkStatus::Ok
    );
    assert_eq!(re2, re);
    assert_eq!(im2, im);
    assert_eq!(
        unsafe { fk_system_columns(back, re2.as_mut_ptr(), ptr::null_mut(), 5) },
        FkStatus::DimensionMismatch
    );
    unsafe {
        fk_system_free(sys);
        fk_system_free(back);
    }
}

#[test]
fn frame_quantities() {
    let sys = generate(r#"{"kind":"lemma51","n":8}"#);
    let mut report = FkFrameReport::default();
    assert_eq!(
        unsafe { fk_frame_report(sys, 1e-10, &mut report) },
        FkStatus::Ok
    );
    assert!((report.lower_bound - 1.0).abs() < 1e-12 && report.is_tight && report.is_spanning);

    let mut squared = ptr::null_mut();
    assert_eq!(
        unsafe { fk_power_transform(sys, 2.0, 1e-10, &mut squared) },
        FkStatus::Ok
    );
    assert_eq!(
        unsafe { fk_frame_report(squared, 1e-10, &mut report) },
        FkStatus::Ok
    );
    assert!((report.upper_bound - 1.0).abs() < 1e-12);

    let mut riesz = 0.0;
    assert_eq!(unsafe { fk_riesz_constant(sys, &mut riesz) }, FkStatus::Ok);
    assert!(riesz.is_infinite());
    let mut metrics = FkBasisMetrics::default();
    assert_eq!(unsafe { fk_basis_metrics(sys, &mut metrics) }, FkStatus::Ok);
    assert_eq!(metrics.separation, 0.0);
    unsafe {
        fk_system_free(squared);
        fk_system_free(sys);
    }
}

#[test]
fn selection_and_extraction() {
    let sys = generate(r#"{"kind":"perturbedPairs","n":3}"#);
    let mut indices = [usize::MAX; 3];
    let mut bound = 0.0;
    let status = unsafe {
        fk_select(
            sys,
            3,
            FkSelectionMethod::Exhaustive,
            indices.as_mut_ptr(),
            &mut bound,
        )
    };
    assert_eq!(status, FkStatus::Ok);
    assert_eq!(indices, [1, 3, 5]);
    assert!((bound - (1.0f64 + 1.0 / 9.0).sqrt()).abs() < 1e-12);

    let mut trace = ptr::null_mut();
    let status = unsafe {
        fk_extract(
            sys,
            FkExtractionMode::Biorthogonal,
            0.4,
            0.1,
            f64::NAN,
            &mut trace,
        )
    };
    assert_eq!(status, FkStatus::Ok);
    let trace: serde_json::Value = serde_json::from_str(&take_string(trace)).unwrap();
    assert!(trace["finalSubset"].as_array().unwrap().len() >= 4);

    let mut out = ptr::null_mut();
    let status = unsafe { fk_extract(sys, FkExtractionMode::Frame, 0.25, 0.1, 10.0, &mut out) };
    assert_eq!(status, FkStatus::InfeasibleDelta);
    assert!(last_error().contains("delta"));
    unsafe { fk_system_free(sys) };

    let mut b = 0.0;
    assert_eq!(
        unsafe { fk_theoretical_bound(0.5, 1.0, 1.0, 0.5, &mut b) },
        FkStatus::Ok
    );
    assert_eq!(b, 2160.0);
}

#[test]
fn errors_set_status_and_message() {
    let mut sys = ptr::null_mut();
    assert_eq!(
        unsafe { fk_system_new(2, 2, ptr::null(), ptr::null(), &mut sys) },
        FkStatus::NullPointer
    );
    assert!(last_error().contains("re"));

    let bad = CString::new(r#"{"kind":"lemma51","n":0}"#).unwrap();
    assert_eq!(
        unsafe { fk_system_generate(bad.as_ptr(), &mut sys) },
        FkStatus::BadParameter
    );
    assert!(sys.is_null());

    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { fk_system_from_json(invalid.as_ptr().cast(), &mut sys) },
        FkStatus::InvalidUtf8
    );
    let mut riesz = 0.0;
    assert_eq!(
        unsafe { fk_riesz_constant(ptr::null(), &mut riesz) },
        FkStatus::NullPointer
    );
    assert_eq!(unsafe { fk_system_dim(ptr::null()) }, 0);
    unsafe {
        fk_system_free(ptr::null_mut());
        fk_string_free(ptr::null_mut());
    }
    let version = unsafe { CStr::from_ptr(fk_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(header_dir().join("framekit.h"))
            .status()
            .unwrap_or_else(|e| panic!("{compiler} unavailable: {e}"));
        assert!(status.success(), "{compiler} rejected the header");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let deps = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let archive = [
        deps.join("libframekit_ffi.a"),
        deps.parent().unwrap().join("libframekit_ffi.a"),
    ]
    .into_iter()
    .find(|p| p.exists())
    .expect("static library built alongside the tests");
    let out = tempfile::TempDir::new().unwrap();
    let exe = out.path().join("smoke");
    let source = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let status = Command::new("cc")
        .arg("-I")
        .arg(header_dir())
        .arg(&source)
        .arg(&archive)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "link failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8(run.stdout).unwrap().starts_with("ok "));
}
