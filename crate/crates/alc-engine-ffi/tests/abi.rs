use std::ffi::{CStr, CString};
use std::ptr;

use alc_engine_ffi::*;

fn diagram(spec: &str) -> *mut AlcDiagram {
    let s = CString::new(spec).unwrap();
    let mut d = ptr::null_mut();
    let st = unsafe { alc_diagram_new(s.as_ptr(), &mut d) };
    assert_eq!(st, AlcStatus::Ok);
    assert!(!d.is_null());
    d
}

#[test]
fn growth_and_rank() {
    let d = diagram("B3:x@3");
    let mut rank = 0;
    assert_eq!(unsafe { alc_diagram_rank(d, &mut rank) }, AlcStatus::Ok);
    assert_eq!(rank, 3);
    let mut buf = [0usize; 4];
    let mut len = 0;
    assert_eq!(unsafe { alc_diagram_growth(d, buf.as_mut_ptr(), buf.len(), &mut len) }, AlcStatus::Ok);
    assert_eq!(&buf[..len], &[3, 6]);
    assert_eq!(unsafe { alc_diagram_growth(d, buf.as_mut_ptr(), 1, &mut len) }, AlcStatus::BufferTooSmall);
    assert_eq!(len, 2);
    unsafe { alc_diagram_free(d) };
}

#[test]
fn check_json_round_trip() {
    let d = diagram("A3:x@1");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { alc_diagram_check_json(d, 0, 0, &mut out) }, AlcStatus::Ok);
    let json = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
    unsafe { alc_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["dynkin"], "A3");
    let mut n = 0;
    assert_eq!(unsafe { alc_diagram_passing_count(d, &mut n) }, AlcStatus::Ok);
    let passing = v["candidates"].as_array().unwrap().iter().filter(|c| c["pass"] == true).count();
    assert_eq!(n, passing);
    assert_eq!(n, 1);
    unsafe { alc_diagram_free(d) };
}

#[test]
fn errors_are_reported() {
    let mut d = ptr::null_mut();
    let bad = CString::new("Q3:x@1").unwrap();
    assert_eq!(unsafe { alc_diagram_new(bad.as_ptr(), &mut d) }, AlcStatus::InvalidType);
    let msg = unsafe { CStr::from_ptr(alc_last_error()) }.to_str().unwrap();
    assert!(msg.contains("Q3"), "{msg}");
    let bad = CString::new("A3:x@9").unwrap();
    assert_eq!(unsafe { alc_diagram_new(bad.as_ptr(), &mut d) }, AlcStatus::InvalidNodes);
    assert_eq!(unsafe { alc_diagram_new(ptr::null(), &mut d) }, AlcStatus::NullPointer);
    let mut r = 0;
    assert_eq!(unsafe { alc_diagram_rank(ptr::null(), &mut r) }, AlcStatus::NullPointer);
    unsafe {
        alc_diagram_free(ptr::null_mut());
        alc_string_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/alc_engine.h")).unwrap();
    for f in ["alc_diagram_new", "alc_diagram_growth", "alc_diagram_check_json", "alc_string_free", "ALC_STATUS_OK"] {
        assert!(h.contains(f), "{f}");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let src = std::env::temp_dir().join("alc_engine_header_check.c");
    std::fs::write(&src, "#include \"alc_engine.h\"\nint main(void) { AlcDiagram *d = 0; return (int)alc_diagram_new(\"A2:x@1\", &d); }\n").unwrap();
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-I", dir]).arg(&src).output() else {
        eprintln!("no C compiler, skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
