use std::ffi::{CStr, CString};
use std::ptr;

use metarepo_ffi::*;

const IRIS: &str = include_str!("../../core/data/iris.arff");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = mr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn parse(text: &str) -> *mut MrDataset {
    let mut d = ptr::null_mut();
    let t = c(text);
    assert_eq!(unsafe { mr_dataset_parse(t.as_ptr(), ptr::null(), &mut d) }, MrStatus::Ok);
    d
}

#[test]
fn metafeatures_through_c_abi() {
    let d = parse(IRIS);
    let mut n = 0usize;
    assert_eq!(unsafe { mr_dataset_num_instances(d, &mut n) }, MrStatus::Ok);
    assert_eq!(n, 150);

    let count = mr_metafeature_count();
    let mut buf = vec![0.0; count];
    let st = unsafe { mr_dataset_metafeatures(d, 0, 10, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(st, MrStatus::Ok);
    let name = |i| unsafe { CStr::from_ptr(mr_metafeature_name(i)) }.to_str().unwrap();
    assert_eq!(name(0), "numInst");
    assert_eq!(buf[0], 150.0);
    let t2 = (0..count).find(|&i| name(i) == "T2").unwrap();
    assert_eq!(buf[t2], 37.5);
    assert!(mr_metafeature_name(count).is_null());

    let short = unsafe { mr_dataset_metafeatures(d, 0, 10, buf.as_mut_ptr(), 3) };
    assert_eq!(short, MrStatus::InvalidArgument);
    assert!(last_error().contains("output buffer"));

    let m = mr_hardness_count();
    let mut h = vec![0.0; n * m];
    assert_eq!(unsafe { mr_dataset_hardness(d, 5, h.as_mut_ptr(), h.len()) }, MrStatus::Ok);
    assert!(h.iter().all(|v| v.is_finite()));
    assert_eq!(unsafe { CStr::from_ptr(mr_hardness_name(0)) }.to_str().unwrap(), "kDN");
    unsafe { mr_dataset_free(d) };
}

#[test]
fn parse_errors_report_data_status() {
    let mut d = ptr::null_mut();
    let t = c("@relation r\n@attribute a numeric\n@data\nnot-a-number\n");
    let st = unsafe { mr_dataset_parse(t.as_ptr(), ptr::null(), &mut d) };
    assert_eq!(st, MrStatus::DataError);
    assert!(d.is_null());
    assert!(!last_error().is_empty());

    let st = unsafe { mr_dataset_parse(ptr::null(), ptr::null(), &mut d) };
    assert_eq!(st, MrStatus::InvalidArgument);
}

#[test]
fn store_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let root = c(dir.path().to_str().unwrap());
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { mr_store_open(root.as_ptr(), &mut s) }, MrStatus::Ok);

    let d = parse(IRIS);
    assert_eq!(unsafe { mr_store_register(s, d, false) }, MrStatus::Ok);
    unsafe { mr_dataset_free(d) };

    let iris = c("iris");
    let mut out = ptr::null_mut();
    let st = unsafe { mr_store_export(s, c("datasets").as_ptr(), ptr::null(), &mut out) };
    assert_eq!(st, MrStatus::DataError);
    assert!(last_error().contains("no meta-features stored"));

    let st = unsafe { mr_store_run_builtin(s, iris.as_ptr(), c("stump").as_ptr(), 1, 5, false) };
    assert_eq!(st, MrStatus::Ok);
    let st = unsafe { mr_store_run_builtin(s, iris.as_ptr(), c("svm").as_ptr(), 1, 5, false) };
    assert_eq!(st, MrStatus::InvalidArgument);
    assert_eq!(unsafe { mr_store_compute(s, iris.as_ptr(), 0, 5, 10, false) }, MrStatus::Ok);

    let mut rev = 0u64;
    assert_eq!(unsafe { mr_store_snapshot(s, &mut rev) }, MrStatus::Ok);
    assert_eq!(rev, 1);

    let st = unsafe { mr_store_export(s, c("datasets").as_ptr(), ptr::null(), &mut out) };
    assert_eq!(st, MrStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
    unsafe { mr_string_free(out) };
    assert!(text.starts_with("@relation datasets"));
    assert!(text.contains("@attribute Stump_-1 numeric"));

    let st = unsafe { mr_store_export(s, c("folds").as_ptr(), ptr::null(), &mut out) };
    assert_eq!(st, MrStatus::InvalidArgument);
    let st = unsafe { mr_store_export(s, c("folds").as_ptr(), iris.as_ptr(), &mut out) };
    assert_eq!(st, MrStatus::Ok);
    unsafe { mr_string_free(out) };

    let mut loaded = ptr::null_mut();
    let st = unsafe { mr_dataset_load(s, c("nope").as_ptr(), &mut loaded) };
    assert_eq!(st, MrStatus::NotFound);
    unsafe { mr_store_close(s) };
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/metarepo.h");
    let src = include_str!("../src/lib.rs");
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exported.len() > 15);
    for f in exported {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
}

#[test]
fn c_program_links_against_header() {
    if std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    if !lib_dir.join("libmetarepo_ffi.so").exists() {
        eprintln!("shared library not built; skipping");
        return;
    }
    let crate_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = std::process::Command::new("cc")
        .arg(crate_dir.join("examples/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg("-L")
        .arg(lib_dir)
        .arg("-lmetarepo_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = std::process::Command::new(&bin)
        .arg(crate_dir.join("../core/data/iris.arff"))
        .env("LD_LIBRARY_PATH", lib_dir)
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("numInst=150.000000"));
    assert!(stdout.contains("T2=37.500000"));
}
