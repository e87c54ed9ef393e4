use std::ffi::{CStr, CString};
use std::ptr;

use torichodge_ffi::*;

fn corpus(name: &str) -> CString {
    let path = format!("{}/../../corpus/{name}.json", env!("CARGO_MANIFEST_DIR"));
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

fn open(name: &str) -> *mut TchDocument {
    let mut doc = ptr::null_mut();
    let st = unsafe { tch_document_parse(corpus(name).as_ptr(), &mut doc) };
    assert_eq!(st, TchStatus::Ok);
    assert!(!doc.is_null());
    doc
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    unsafe {
        tch_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn fan_info_of_hirzebruch_surface() {
    let doc = open("f1");
    let mut info = TchFanInfo::default();
    assert_eq!(unsafe { tch_fan_info(doc, &mut info) }, TchStatus::Ok);
    assert_eq!((info.rank, info.num_rays, info.num_max_cones), (2, 4, 4));
    assert!(info.nonsingular && info.proper && info.log_smooth);
    assert_eq!(info.class_group_rank, 2);
    unsafe { tch_document_free(doc) };
}

#[test]
fn positivity_on_projective_plane() {
    let doc = open("p2");
    let (mut nef, mut ample) = (false, false);
    let h = CString::new("H").unwrap();
    assert_eq!(unsafe { tch_divisor_positivity(doc, h.as_ptr(), &mut nef, &mut ample) }, TchStatus::Ok);
    assert!(nef && ample);
    let z = CString::new("zero").unwrap();
    assert_eq!(unsafe { tch_divisor_positivity(doc, z.as_ptr(), &mut nef, &mut ample) }, TchStatus::Ok);
    assert!(nef && !ample);
    let missing = CString::new("nope").unwrap();
    let st = unsafe { tch_divisor_positivity(doc, missing.as_ptr(), &mut nef, &mut ample) };
    assert_eq!(st, TchStatus::InvalidInput);
    assert!(last_error().contains("nope"));
    unsafe { tch_document_free(doc) };
}

#[test]
fn cohomology_buffer_protocol() {
    let doc = open("p1");
    let model = CString::new("tilde").unwrap();
    let div = CString::new("minus_two").unwrap();
    let mut len = 0usize;
    let st = unsafe { tch_cohomology(doc, 0, model.as_ptr(), div.as_ptr(), ptr::null_mut(), 0, &mut len) };
    assert_eq!(st, TchStatus::BufferTooSmall);
    assert_eq!(len, 2);
    let mut h = vec![0usize; len];
    let st = unsafe { tch_cohomology(doc, 0, model.as_ptr(), div.as_ptr(), h.as_mut_ptr(), h.len(), &mut len) };
    assert_eq!(st, TchStatus::Ok);
    assert_eq!(h, vec![0, 1]);
    let st = unsafe { tch_cohomology(doc, 1, model.as_ptr(), ptr::null(), h.as_mut_ptr(), h.len(), &mut len) };
    assert_eq!(st, TchStatus::Ok);
    assert_eq!(h, vec![0, 1]);
    unsafe { tch_document_free(doc) };
}

#[test]
fn hodge_numbers_and_oracle() {
    let doc = open("p3");
    let f = CString::new("fermat_cubic").unwrap();
    let mut x = 0usize;
    assert_eq!(unsafe { tch_hodge_dimension(doc, f.as_ptr(), 1, &mut x) }, TchStatus::Ok);
    assert_eq!(x, 6);
    let mut y = 0usize;
    assert_eq!(unsafe { tch_hodge_oracle(doc, f.as_ptr(), 1, &mut y) }, TchStatus::Ok);
    assert_eq!(y, 6);
    assert_eq!(unsafe { tch_hodge_dimension(doc, f.as_ptr(), 3, &mut x) }, TchStatus::Hypotheses);
    unsafe { tch_document_free(doc) };
}

#[test]
fn family_is_reported_unsupported() {
    let doc = open("blowup_a1p1");
    let f = CString::new("degree2").unwrap();
    let mut x = 0usize;
    assert_eq!(unsafe { tch_hodge_dimension(doc, f.as_ptr(), 0, &mut x) }, TchStatus::Unsupported);
    unsafe { tch_document_free(doc) };
}

#[test]
fn bad_input_and_null_arguments() {
    let mut doc = ptr::null_mut();
    let bad = CString::new(r#"{"version": 1, "rank": 1, "rays": [[1]], "cones": [[3]]}"#).unwrap();
    assert_eq!(unsafe { tch_document_parse(bad.as_ptr(), &mut doc) }, TchStatus::InvalidInput);
    assert!(doc.is_null());
    assert!(last_error().contains("ray 3"));
    assert_eq!(unsafe { tch_document_parse(ptr::null(), &mut doc) }, TchStatus::NullArgument);
    let mut info = TchFanInfo::default();
    assert_eq!(unsafe { tch_fan_info(ptr::null(), &mut info) }, TchStatus::NullArgument);
    unsafe { tch_document_free(ptr::null_mut()) };
    let name = unsafe { CStr::from_ptr(tch_status_name(TchStatus::UnstableBox)) };
    assert_eq!(name.to_str().unwrap(), "weight box did not stabilize");
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(format!("{}/include/torichodge.h", env!("CARGO_MANIFEST_DIR"))).unwrap();
    for sym in [
        "tch_document_parse",
        "tch_document_free",
        "tch_fan_info",
        "tch_divisor_positivity",
        "tch_cohomology",
        "tch_hodge_dimension",
        "tch_hodge_oracle",
        "tch_last_error",
        "tch_status_name",
        "TCH_STATUS_UNSTABLE_BOX",
        "typedef struct TchDocument TchDocument",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}
