use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use conjrep_ffi::*;

fn last_error() -> String {
    let p = conjrep_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn group_handle_roundtrip() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(conjrep_group_new(5, 1, 0, &mut g), ConjrepStatus::Ok);
        let mut order = 0;
        assert_eq!(conjrep_group_order(g, &mut order), ConjrepStatus::Ok);
        assert_eq!(order, 120);
        let mut k = 0;
        assert_eq!(conjrep_group_class_count(g, &mut k), ConjrepStatus::Ok);
        assert_eq!(k, 9);

        let mut len = 0;
        assert_eq!(
            conjrep_group_degrees(g, ptr::null_mut(), 0, &mut len),
            ConjrepStatus::BufferTooSmall
        );
        assert_eq!(len, 9);
        let mut degrees = vec![0u64; len];
        assert_eq!(
            conjrep_group_degrees(g, degrees.as_mut_ptr(), len, &mut len),
            ConjrepStatus::Ok
        );
        assert_eq!(degrees.iter().map(|d| d * d).sum::<u64>(), 120);
        assert_eq!(degrees[0], 1);

        let mut m = vec![0u64; 9];
        assert_eq!(
            conjrep_group_multiplicities(g, m.as_mut_ptr(), 9, &mut len),
            ConjrepStatus::Ok
        );
        assert_eq!(m[0], 9);
        assert_eq!(m.iter().zip(&degrees).map(|(a, b)| a * b).sum::<u64>(), 120);

        let mut sizes = vec![0u64; 9];
        assert_eq!(
            conjrep_group_class_sizes(g, sizes.as_mut_ptr(), 9, &mut len),
            ConjrepStatus::Ok
        );
        assert_eq!(sizes.iter().sum::<u64>(), 120);

        let mut csv = ptr::null_mut();
        assert_eq!(conjrep_group_table_csv(g, &mut csv), ConjrepStatus::Ok);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        conjrep_string_free(csv);
        assert!(text.starts_with("degree\\class_size,1,"));
        assert_eq!(text.lines().count(), 10);
        conjrep_group_free(g);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(conjrep_group_new(4, 1, 0, &mut g), ConjrepStatus::InvalidArgument);
        assert!(g.is_null());
        assert!(last_error().contains("not prime"));
        assert_eq!(conjrep_group_new(5, 4, 0, &mut g), ConjrepStatus::BudgetExceeded);
        assert!(last_error().contains("234375000"));
        assert_eq!(conjrep_group_new(5, 1, 0, ptr::null_mut()), ConjrepStatus::NullPointer);
        assert_eq!(
            conjrep_group_order(ptr::null(), ptr::null_mut()),
            ConjrepStatus::NullPointer
        );
        let mut pass = false;
        assert_eq!(
            conjrep_f3(9, ConjrepForm::Split as u32, &mut pass),
            ConjrepStatus::InvalidArgument
        );
        assert_eq!(conjrep_f3(5, 7, &mut pass), ConjrepStatus::InvalidArgument);
        conjrep_group_free(ptr::null_mut());
        conjrep_string_free(ptr::null_mut());
    }
}

#[test]
fn verify_report_over_the_abi() {
    unsafe {
        let checks = CString::new("theorem,quotient").unwrap();
        let mut out = ptr::null_mut();
        let mut pass = false;
        assert_eq!(
            conjrep_verify_json(5, 2, 0, checks.as_ptr(), &mut out, &mut pass),
            ConjrepStatus::Ok
        );
        assert!(pass);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        conjrep_string_free(out);
        assert_eq!(json["order"], 15_000);
        assert_eq!(json["theorem"]["pass"], true);
        assert_eq!(json["lemmas"][0]["id"], "quotient");

        let bad = CString::new("theorem,nope").unwrap();
        assert_eq!(
            conjrep_verify_json(5, 2, 0, bad.as_ptr(), &mut out, &mut pass),
            ConjrepStatus::InvalidArgument
        );
        assert!(out.is_null());

        for form in [ConjrepForm::Split, ConjrepForm::Trace] {
            assert_eq!(conjrep_f3(7, form as u32, &mut pass), ConjrepStatus::Ok);
            assert!(pass);
        }
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("conjrep.h")
}

#[test]
fn header_declares_the_abi() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct ConjrepGroup ConjrepGroup;",
        "CONJREP_STATUS_BUDGET_EXCEEDED = 3",
        "conjrep_group_new(",
        "conjrep_group_free(",
        "conjrep_group_degrees(",
        "conjrep_group_multiplicities(",
        "conjrep_verify_json(",
        "conjrep_f3(",
        "conjrep_last_error(",
        "conjrep_string_free(",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "conjrep.h"
int main(void) {
    ConjrepGroup *g = NULL;
    if (conjrep_group_new(2, 1, 0, &g) != CONJREP_STATUS_OK) return 1;
    uint64_t d[8];
    size_t len = 0;
    if (conjrep_group_degrees(g, d, 8, &len) != CONJREP_STATUS_OK) return 2;
    for (size_t i = 0; i < len; i++) printf("%llu ", (unsigned long long)d[i]);
    conjrep_group_free(g);
    if (conjrep_group_new(6, 1, 0, &g) != CONJREP_STATUS_INVALID_ARGUMENT) return 3;
    printf("| %s\n", conjrep_last_error());
    return 0;
}
"#;

fn cc_available() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_compiles_as_c() {
    if !cc_available() {
        eprintln!("cc not found, skipping");
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("syntax.c");
    std::fs::write(&src, "#include \"conjrep.h\"\nint main(void) { return 0; }\n").unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn c_program_links_against_the_static_library() {
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().parent().unwrap().join("libconjrep_ffi.a");
    if !cc_available() || !lib.exists() {
        eprintln!("cc or {} not available, skipping", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("main.c");
    let bin = dir.join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1 1 2 | 6 is not prime\n");
}

fn tempfile_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
