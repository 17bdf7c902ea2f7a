use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use rcalg_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rcalg_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn run_spec_and_read_the_report() {
    let spec = CString::new(
        r#"{"kind": "tight-coding", "budget": 6, "tight-coding": {"k_max": 2, "s": ["ω"]}}"#,
    )
    .unwrap();
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(
            rcalg_run_spec(spec.as_ptr(), false, &mut r),
            RcalgStatus::Ok
        );
        assert!(!r.is_null());
        assert!(rcalg_report_ok(r));
        assert!(rcalg_report_section_count(r) >= 3);
        let json = CStr::from_ptr(rcalg_report_json(r)).to_str().unwrap();
        let back = rcalg::report::from_json(json).unwrap();
        assert_eq!(back.sections.len(), rcalg_report_section_count(r));
        let text = CStr::from_ptr(rcalg_report_text(r)).to_str().unwrap();
        assert!(text.contains("fingerprint"));
        rcalg_report_free(r);
    }
    assert_eq!(last_error(), "");
}

#[test]
fn errors_map_to_codes() {
    let mut r = ptr::null_mut();
    let bad = CString::new(r#"{"kind": "selftest", "foo": 1}"#).unwrap();
    unsafe {
        assert_eq!(
            rcalg_run_spec(bad.as_ptr(), false, &mut r),
            RcalgStatus::Parse
        );
        assert!(r.is_null());
        assert!(last_error().contains("foo"));
        assert_eq!(
            rcalg_run_spec(ptr::null(), false, &mut r),
            RcalgStatus::NullArgument
        );
        assert_eq!(
            rcalg_run_spec(bad.as_ptr(), false, ptr::null_mut()),
            RcalgStatus::NullArgument
        );
        let big = CString::new(r#"{"kind": "cp-plus", "cp-plus": {"n": 9, "l_max": 9}}"#).unwrap();
        assert_eq!(
            rcalg_run_spec(big.as_ptr(), false, &mut r),
            RcalgStatus::Capacity
        );
        let bytes = [0xffu8, 0];
        assert_eq!(
            rcalg_run_spec(bytes.as_ptr() as *const _, false, &mut r),
            RcalgStatus::InvalidUtf8
        );
        rcalg_report_free(ptr::null_mut());
        assert!(!rcalg_report_ok(ptr::null()));
        assert!(rcalg_report_json(ptr::null()).is_null());
    }
}

#[test]
fn algebra_handles() {
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(rcalg_algebra_new(0, &mut a), RcalgStatus::Capacity);
        assert_eq!(rcalg_algebra_new(65, &mut a), RcalgStatus::Capacity);
        assert_eq!(rcalg_algebra_new(4, &mut a), RcalgStatus::Ok);
        assert_eq!(rcalg_algebra_atom_count(a), 4);
        let gens = [0b0011u64];
        let mut out = 0u64;
        assert_eq!(
            rcalg_lpr(a, gens.as_ptr(), 1, 0b0111, &mut out),
            RcalgStatus::Ok
        );
        assert_eq!(out, 0b0011);
        assert_eq!(
            rcalg_lpr(a, ptr::null(), 0, 0b0111, &mut out),
            RcalgStatus::Ok
        );
        assert_eq!(out, 0);
        assert_eq!(
            rcalg_lpr(a, gens.as_ptr(), 1, 0b10000, &mut out),
            RcalgStatus::Usage
        );
        assert_eq!(
            rcalg_lpr(ptr::null(), gens.as_ptr(), 1, 0, &mut out),
            RcalgStatus::NullArgument
        );
        let mut free = false;
        assert_eq!(
            rcalg_is_free_over(a, gens.as_ptr(), 1, &mut free),
            RcalgStatus::Ok
        );
        assert!(free);
        let odd = [0b0001u64];
        assert_eq!(
            rcalg_is_free_over(a, odd.as_ptr(), 1, &mut free),
            RcalgStatus::Ok
        );
        assert!(!free);
        rcalg_algebra_free(a);
    }
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(rcalg_algebra_new(64, &mut a), RcalgStatus::Ok);
        let mut out = 0u64;
        assert_eq!(
            rcalg_lpr(a, ptr::null(), 0, u64::MAX, &mut out),
            RcalgStatus::Ok
        );
        assert_eq!(out, u64::MAX);
        rcalg_algebra_free(a);
    }
}

#[test]
fn header_declares_every_export() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let src = std::fs::read_to_string(format!("{dir}/src/lib.rs")).unwrap();
    let header = std::fs::read_to_string(format!("{dir}/include/rcalg.h")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 10);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from the header"
        );
    }
    assert!(header.contains("RCALG_STATUS_PANIC = 12"));
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let Ok(o) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(format!("{dir}/include/rcalg.h"))
        .output()
    else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
