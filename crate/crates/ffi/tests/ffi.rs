use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use clinshift_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cs_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn small_config() -> CString {
    CString::new(r#"{"n_records": 600, "seed": 5}"#).unwrap()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { cs_string_free(p) };
    s
}

#[test]
fn synth_landscape_scenario_evaluate_round() {
    unsafe {
        let mut ds: *mut CsDataset = ptr::null_mut();
        let mut manifest: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            cs_synth_generate(small_config().as_ptr(), &mut ds, &mut manifest),
            CsStatus::Ok
        );
        let manifest = take_string(manifest);
        assert!(manifest.contains("planted_clusters"));

        let (mut n, mut c, mut v, mut d) = (0usize, 0usize, 0usize, 0usize);
        assert_eq!(cs_dataset_counts(ds, &mut n, &mut c, &mut v, &mut d), CsStatus::Ok);
        assert_eq!((n, c, v, d), (600, 20, 20, 12));

        let mut land: *mut CsLandscape = ptr::null_mut();
        assert_eq!(cs_landscape_fit(ds, 3, 2, 0, 4, &mut land), CsStatus::Ok);
        let mut k0 = usize::MAX;
        let mut k1 = usize::MAX;
        let a = CString::new("coronary_atherosclerosis").unwrap();
        let b = CString::new("congestive_heart_failure").unwrap();
        assert_eq!(cs_landscape_cluster(land, a.as_ptr(), &mut k0), CsStatus::Ok);
        assert_eq!(cs_landscape_cluster(land, b.as_ptr(), &mut k1), CsStatus::Ok);
        assert_eq!(k0, k1);
        let mut json = ptr::null_mut();
        assert_eq!(cs_landscape_to_json(land, &mut json), CsStatus::Ok);
        assert!(take_string(json).contains("\"clusters\""));
        let mut dot = ptr::null_mut();
        assert_eq!(cs_landscape_to_dot(land, &mut dot), CsStatus::Ok);
        assert!(take_string(dot).starts_with("graph landscape"));
        cs_landscape_free(land);

        let spec = CString::new(
            r#"{"kind":"novel_disease","params":{"source_cluster":{"containing":"stroke"},"novel_cluster":{"containing":"stroke"}},"seed":2}"#,
        )
        .unwrap();
        let mut pair: *mut CsPair = ptr::null_mut();
        assert_eq!(
            cs_scenario_build(ds, spec.as_ptr(), 0, &mut pair),
            CsStatus::Ok,
            "{}",
            last_error()
        );
        let (mut ns, mut nt, mut ps, mut pt) = (0usize, 0usize, 0usize, 0usize);
        assert_eq!(cs_pair_counts(pair, &mut ns, &mut nt, &mut ps, &mut pt), CsStatus::Ok);
        assert!((ps as f64 / ns as f64 - 0.6).abs() <= 0.02);
        assert!((pt as f64 / nt as f64 - 0.6).abs() <= 0.02);

        let flip = CString::new(r#"{"kind":"label_flip","params":{"p":0.1}}"#).unwrap();
        assert_eq!(cs_pair_apply_transform(pair, flip.as_ptr()), CsStatus::Ok);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("pair").to_str().unwrap()).unwrap();
        assert_eq!(cs_pair_save(pair, path.as_ptr()), CsStatus::Ok);
        let mut loaded: *mut CsPair = ptr::null_mut();
        assert_eq!(cs_pair_load(path.as_ptr(), &mut loaded), CsStatus::Ok);

        let mut auprc = 0.0;
        let mut report = ptr::null_mut();
        assert_eq!(
            cs_evaluate_baseline(loaded, 200, 0.1, &mut auprc, &mut report),
            CsStatus::Ok
        );
        assert!(take_string(report).contains("weighted_auprc"));
        assert!(auprc > 0.6 && auprc <= 1.0, "{auprc}");

        cs_pair_free(pair);
        cs_pair_free(loaded);
        cs_dataset_free(ds);
    }
}

#[test]
fn status_codes_and_messages() {
    unsafe {
        let mut ds: *mut CsDataset = ptr::null_mut();
        let missing = CString::new("/nonexistent/clinshift/dataset").unwrap();
        assert_eq!(cs_dataset_load(missing.as_ptr(), &mut ds), CsStatus::Io);
        assert!(last_error().contains("nonexistent"));
        assert!(ds.is_null());

        assert_eq!(cs_dataset_load(ptr::null(), &mut ds), CsStatus::NullPointer);
        assert_eq!(last_error(), "path is null");

        let bad = CString::new(r#"{"baseline_rate": 1.5}"#).unwrap();
        assert_eq!(
            cs_synth_generate(bad.as_ptr(), &mut ds, ptr::null_mut()),
            CsStatus::Config
        );
        assert!(last_error().contains("baseline_rate"));

        let garbage = [0xffu8, 0xfe, 0];
        assert_eq!(cs_dataset_load(garbage.as_ptr().cast(), &mut ds), CsStatus::InvalidUtf8);

        assert_eq!(
            cs_synth_generate(small_config().as_ptr(), &mut ds, ptr::null_mut()),
            CsStatus::Ok
        );
        assert_eq!(last_error(), "");
        let spec = CString::new(r#"{"kind":"unknown","params":{}}"#).unwrap();
        let mut pair: *mut CsPair = ptr::null_mut();
        assert_eq!(cs_scenario_build(ds, spec.as_ptr(), 0, &mut pair), CsStatus::Config);
        let spec =
            CString::new(r#"{"kind":"gender_split","params":{"direction":"male_to_female","source_cluster":0}}"#)
                .unwrap();
        let cfg = CString::new(r#"{"n_records": 50, "demographics": {"male_fraction": 1.0}}"#).unwrap();
        let mut males: *mut CsDataset = ptr::null_mut();
        assert_eq!(
            cs_synth_generate(cfg.as_ptr(), &mut males, ptr::null_mut()),
            CsStatus::Ok
        );
        assert_eq!(
            cs_scenario_build(males, spec.as_ptr(), 0, &mut pair),
            CsStatus::EmptyCohort
        );
        assert!(pair.is_null());
        cs_dataset_free(males);
        cs_dataset_free(ds);

        cs_dataset_free(ptr::null_mut());
        cs_string_free(ptr::null_mut());
    }
}

#[test]
fn numeric_entry_points() {
    unsafe {
        let scores = [0.9, 0.8, 0.7];
        let labels = [1u8, 0, 1];
        let mut ap = 0.0;
        assert_eq!(
            cs_average_precision(scores.as_ptr(), labels.as_ptr(), 3, &mut ap),
            CsStatus::Ok
        );
        assert!((ap - (0.5 + 0.5 * 2.0 / 3.0)).abs() < 1e-12);
        let zeros = [0u8; 3];
        assert_eq!(
            cs_average_precision(scores.as_ptr(), zeros.as_ptr(), 3, &mut ap),
            CsStatus::Degenerate
        );

        let aps = [1.0, 0.0];
        let sup = [10.0, 30.0];
        let mut w = 0.0;
        assert_eq!(cs_weighted_auprc(aps.as_ptr(), sup.as_ptr(), 2, &mut w), CsStatus::Ok);
        assert_eq!(w, 0.25);

        let col = [0u32, 0, 0, 1];
        let mut h = 0.0;
        assert_eq!(cs_entropy(col.as_ptr(), 4, &mut h), CsStatus::Ok);
        assert!((h - 0.811278).abs() < 1e-6);

        // Two identical binary columns: TC = H(X) = 1 bit.
        let m = [0u32, 0, 1, 1, 0, 0, 1, 1];
        let mut tc = 0.0;
        assert_eq!(cs_total_correlation(m.as_ptr(), 4, 2, &mut tc), CsStatus::Ok);
        assert!((tc - 1.0).abs() < 1e-12);

        let v = CStr::from_ptr(cs_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

fn find_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| {
        Command::new(c)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

#[test]
fn header_compiles_as_c() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include").join("clinshift.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for name in [
        "typedef struct CsDataset CsDataset",
        "typedef struct CsPair CsPair",
        "CS_STATUS_COVERAGE = 6",
        "CsStatus cs_scenario_build(",
        "const char *cs_last_error_message(void);",
    ] {
        assert!(text.contains(name), "header lacks `{name}`");
    }
    let Some(cc) = find_cc() else {
        eprintln!("no C compiler found; header syntax check skipped");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include "clinshift.h"
#include <stdio.h>
int main(void) {
    double ap = 0.0;
    double s[3] = {0.9, 0.8, 0.7};
    unsigned char y[3] = {1, 0, 1};
    CsStatus st = cs_average_precision(s, y, 3, &ap);
    if (st != CS_STATUS_OK) return 1;
    CsDataset *ds = NULL;
    if (cs_dataset_load("/nonexistent", &ds) != CS_STATUS_IO) return 2;
    printf("%.6f %s\n", ap, cs_last_error_message());
    return 0;
}
"#,
    )
    .unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(crate_dir.join("include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success(), "header failed a C99 syntax check");

    // Link against the static library when cargo has produced it alongside this test.
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.parent().unwrap().join("libclinshift_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; link check skipped", lib.display());
        return;
    }
    let exe = dir.path().join("smoke");
    let status = Command::new(cc)
        .args(["-std=c99", "-I"])
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "linking the static library failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke binary exited with {:?}", out.status);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("0.833333"), "{stdout}");
}
