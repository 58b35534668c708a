use std::ffi::{c_char, CStr, CString};
use std::ptr;

use serde_json::Value;
use symmus::bench::gen_php;
use symmus::formula::write_spec;
use symmus_ffi::*;

fn php(p: usize, h: usize) -> *mut SymmusSpec {
    let text = CString::new(write_spec(&gen_php(p, h).unwrap().spec)).unwrap();
    let spec = unsafe { symmus_spec_parse(text.as_ptr()) };
    assert!(!spec.is_null());
    spec
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    symmus_string_free(s);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(symmus_last_error()) }.to_str().unwrap().to_owned()
}

type Entry = unsafe extern "C" fn(*const SymmusSpec, *const SymmusGroup, *const c_char, *mut *mut c_char) -> SymmusStatus;

fn call(f: Entry, spec: *const SymmusSpec, group: *const SymmusGroup, options: &str) -> (SymmusStatus, Value) {
    let opts = CString::new(options).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { f(spec, group, opts.as_ptr(), &mut out) };
    (status, serde_json::from_str(&unsafe { take(out) }).unwrap())
}

#[test]
fn detect_write_parse_and_solve() {
    let spec = php(4, 2);
    unsafe {
        assert_eq!(symmus_spec_num_constraints(spec), 6);
        let g = symmus_detect(spec, 0);
        assert!(!g.is_null());
        assert!(symmus_group_num_generators(g) > 0);
        let text = take(symmus_group_write(g, spec));
        assert_eq!(text.lines().filter(|l| l.starts_with("rows{")).count(), 2);
        let c = CString::new(text).unwrap();
        let g2 = symmus_group_parse(spec, c.as_ptr());
        assert!(!g2.is_null());

        let (st, r) = call(symmus_ocus, spec, g2, r#"{"lex": true}"#);
        assert_eq!(st, SymmusStatus::Ok);
        assert_eq!(r["result"]["mus"], serde_json::json!(["P1", "P2", "P3", "H1", "H2"]));

        let (st, r) = call(symmus_mus, spec, ptr::null(), r#"{"algo": "symm"}"#);
        assert_eq!(st, SymmusStatus::Ok);
        assert_eq!(r["result"]["mus"].as_array().unwrap().len(), 5);

        let (st, r) = call(symmus_marco, spec, g, r#"{"lex": true, "unroll": true}"#);
        assert_eq!(st, SymmusStatus::Ok);
        assert_eq!(r["result"]["complete"], true);

        symmus_group_free(g);
        symmus_group_free(g2);
        symmus_spec_free(spec);
    }
}

#[test]
fn status_codes() {
    let sat = CString::new("+1 x1 >= 1 ;\n").unwrap();
    let spec = unsafe { symmus_spec_parse(sat.as_ptr()) };
    let (st, r) = call(symmus_mus, spec, ptr::null(), "{}");
    assert_eq!(st, SymmusStatus::Sat);
    assert_eq!(r["status"], "sat");
    unsafe { symmus_spec_free(spec) };

    let spec = php(4, 2);
    let (st, _) = call(symmus_mus, spec, ptr::null(), r#"{"time_limit": 0}"#);
    assert_eq!(st, SymmusStatus::Budget);

    let opts = CString::new(r#"{"algo": "fast"}"#).unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { symmus_mus(spec, ptr::null(), opts.as_ptr(), &mut out) };
    assert_eq!(st, SymmusStatus::InvalidArgument);
    assert!(out.is_null());
    assert!(last_error().contains("fast"));

    let st = unsafe { symmus_ocus(spec, ptr::null(), ptr::null(), ptr::null_mut()) };
    assert_eq!(st, SymmusStatus::InvalidArgument);

    let other = php(3, 2);
    let g = unsafe { symmus_detect(other, 0) };
    let st = unsafe { symmus_ocus(spec, g, ptr::null(), &mut out) };
    assert_eq!(st, SymmusStatus::InvalidArgument);
    unsafe {
        symmus_group_free(g);
        symmus_spec_free(other);
        symmus_spec_free(spec);
    }
}

#[test]
fn bad_input_is_reported() {
    let bad = CString::new("+1 x1 >=\n").unwrap();
    assert!(unsafe { symmus_spec_parse(bad.as_ptr()) }.is_null());
    assert!(!last_error().is_empty());
    assert!(unsafe { symmus_spec_parse(ptr::null()) }.is_null());
    assert_eq!(unsafe { symmus_spec_num_constraints(ptr::null()) }, 0);
    unsafe {
        symmus_spec_free(ptr::null_mut());
        symmus_group_free(ptr::null_mut());
        symmus_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_interface() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/symmus.h")).unwrap();
    for name in [
        "symmus_spec_parse",
        "symmus_spec_free",
        "symmus_detect",
        "symmus_group_parse",
        "symmus_group_write",
        "symmus_mus",
        "symmus_ocus",
        "symmus_marco",
        "symmus_string_free",
        "symmus_last_error",
        "SYMMUS_STATUS_BUDGET",
    ] {
        assert!(h.contains(name), "{name}");
    }
}
