use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use apboost_ffi::*;

const DATA: &str = "+1 1:1 2:3\n-1 1:2 2:1\n+1 1:1 2:2\n-1 1:3 2:1\n-1 1:2 2:3\n+1 1:1 2:1\n";

fn last_error() -> String {
    unsafe { CStr::from_ptr(apb_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn parse(text: &str) -> *mut ApbDataset {
    let c = CString::new(text).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { apb_dataset_parse(c.as_ptr(), &mut d) },
        ApbStatus::Ok
    );
    d
}

#[test]
fn train_predict_save_load() {
    let d = parse(DATA);
    unsafe {
        assert_eq!(apb_dataset_num_examples(d), 6);
        assert_eq!(apb_dataset_num_features(d), 2);
        let mut opts = apb_train_options_default();
        opts.rounds = 3;
        let mut m = ptr::null_mut();
        let mut assessments = 0u64;
        assert_eq!(apb_train(d, &opts, &mut m, &mut assessments), ApbStatus::Ok);
        assert!(assessments > 0 && assessments <= 3 * 12);
        assert_eq!(apb_model_num_rounds(m), 3);
        let mut err = -1.0;
        assert_eq!(apb_model_error_rate(m, d, &mut err), ApbStatus::Ok);
        assert_eq!(err, 0.0);
        let mut label = 0;
        assert_eq!(apb_model_predict(m, d, 1, &mut label), ApbStatus::Ok);
        assert_eq!(label, -1);
        assert_eq!(
            apb_model_predict(m, d, 6, &mut label),
            ApbStatus::InvalidArgument
        );
        assert!(last_error().contains("out of range"));

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("m.txt").to_str().unwrap()).unwrap();
        assert_eq!(apb_model_save(m, path.as_ptr()), ApbStatus::Ok);
        assert_eq!(last_error(), "");
        let mut back = ptr::null_mut();
        assert_eq!(apb_model_load(path.as_ptr(), &mut back), ApbStatus::Ok);
        assert_eq!(apb_model_num_rounds(back), 3);
        apb_model_free(back);
        apb_model_free(m);
        apb_dataset_free(d);
    }
}

#[test]
fn find_stump_agrees_across_strategies() {
    let d = parse(DATA);
    let weights = [0.3, 0.1, 0.2, 0.1, 0.2, 0.1];
    let mut first = ApbStump::default();
    unsafe {
        assert_eq!(
            apb_find_stump(d, ptr::null(), 0, APB_STRATEGY_EXHAUSTIVE, &mut first),
            ApbStatus::Ok
        );
        assert_eq!(
            (first.feature, first.threshold, first.polarity),
            (1, 1.5, -1)
        );
        assert_eq!(first.error, 0.0);
        let mut base = ApbStump::default();
        assert_eq!(
            apb_find_stump(d, weights.as_ptr(), 6, APB_STRATEGY_EXHAUSTIVE, &mut base),
            ApbStatus::Ok
        );
        for s in [APB_STRATEGY_ADAPTIVE, APB_STRATEGY_QUICK_BOOST] {
            let mut got = ApbStump::default();
            assert_eq!(
                apb_find_stump(d, weights.as_ptr(), 6, s, &mut got),
                ApbStatus::Ok
            );
            assert_eq!(
                (got.feature, got.threshold, got.polarity),
                (base.feature, base.threshold, base.polarity)
            );
            assert!(got.assessments <= base.assessments);
        }
        let mut s = ApbStump::default();
        assert_eq!(
            apb_find_stump(d, weights.as_ptr(), 5, 0, &mut s),
            ApbStatus::InvalidArgument
        );
        assert_eq!(
            apb_find_stump(d, ptr::null(), 0, 9, &mut s),
            ApbStatus::InvalidArgument
        );
        apb_dataset_free(d);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let bad = CString::new("1 1:1\n-1 1:oops\n").unwrap();
        let mut d = ptr::null_mut();
        assert_eq!(apb_dataset_parse(bad.as_ptr(), &mut d), ApbStatus::Parse);
        assert!(d.is_null());
        assert!(last_error().contains("line 2"), "{}", last_error());

        let missing = CString::new("/nonexistent/apboost/data.svm").unwrap();
        assert_eq!(apb_dataset_load(missing.as_ptr(), &mut d), ApbStatus::Io);
        assert_eq!(
            apb_dataset_load(ptr::null(), &mut d),
            ApbStatus::InvalidArgument
        );
        assert_eq!(
            apb_dataset_parse(bad.as_ptr(), ptr::null_mut()),
            ApbStatus::InvalidArgument
        );

        let d = parse(DATA);
        let mut m = ptr::null_mut();
        let mut opts = apb_train_options_default();
        opts.variant = APB_VARIANT_LAZY;
        opts.fraction = 0.0;
        assert_eq!(
            apb_train(d, &opts, &mut m, ptr::null_mut()),
            ApbStatus::InvalidArgument
        );
        assert!(m.is_null());
        opts = apb_train_options_default();
        opts.strategy = 7;
        assert_eq!(
            apb_train(d, &opts, &mut m, ptr::null_mut()),
            ApbStatus::InvalidArgument
        );
        assert_eq!(
            apb_train(ptr::null(), &opts, &mut m, ptr::null_mut()),
            ApbStatus::InvalidArgument
        );

        assert_eq!(apb_dataset_num_examples(ptr::null()), 0);
        apb_dataset_free(ptr::null_mut());
        apb_model_free(ptr::null_mut());
        apb_dataset_free(d);
    }
}

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/apboost.h"))
        .unwrap()
}

#[test]
fn header_declares_the_interface() {
    let h = header();
    for name in [
        "apb_last_error",
        "apb_dataset_load",
        "apb_dataset_parse",
        "apb_dataset_num_examples",
        "apb_dataset_num_features",
        "apb_dataset_free",
        "apb_train_options_default",
        "apb_train",
        "apb_model_predict",
        "apb_model_error_rate",
        "apb_model_num_rounds",
        "apb_model_save",
        "apb_model_load",
        "apb_model_free",
        "apb_find_stump",
        "typedef struct ApbDataset ApbDataset;",
        "typedef struct ApbModel ApbModel;",
        "APB_STATUS_BOUND_TIMEOUT = 4",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

/// Directory holding the shared library built alongside this test.
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_library() {
    let dir = lib_dir();
    if !dir.join("libapboost_ffi.so").exists()
        || Command::new("cc").arg("--version").output().is_err()
    {
        eprintln!(
            "skipping: no C compiler or shared library in {}",
            dir.display()
        );
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "apboost.h"
int main(void) {
    ApbDataset *d = NULL;
    ApbModel *m = NULL;
    if (apb_dataset_parse("+1 1:1\n-1 1:2\n+1 1:1\n-1 1:3\n", &d) != APB_STATUS_OK) return 1;
    ApbTrainOptions o = apb_train_options_default();
    o.rounds = 2;
    uint64_t cost = 0;
    if (apb_train(d, &o, &m, &cost) != APB_STATUS_OK) return 2;
    double err = 1.0;
    if (apb_model_error_rate(m, d, &err) != APB_STATUS_OK || err != 0.0) return 3;
    apb_dataset_free(d);
    if (apb_dataset_parse("1 x\n", &d) != APB_STATUS_PARSE || d != NULL) return 4;
    printf("%zu %llu %s\n", apb_model_num_rounds(m), (unsigned long long)cost, apb_last_error());
    apb_model_free(m);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = tmp.path().join("smoke");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let cc = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg("-L")
        .arg(&dir)
        .arg(format!("-Wl,-rpath,{}", dir.display()))
        .arg("-lapboost_ffi")
        .arg("-o")
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        cc.status.success(),
        "{}",
        String::from_utf8_lossy(&cc.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let out = String::from_utf8(run.stdout).unwrap();
    assert!(out.starts_with("2 8 parse error at line 1"), "{out}");
}
