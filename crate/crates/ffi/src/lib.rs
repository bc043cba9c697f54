//! C ABI over the clinshift toolkit.
//!
//! Objects cross the boundary as opaque handles (`CsDataset`, `CsLandscape`,
//! `CsPair`) created by `*_load` / `*_build` / `*_fit` functions and released
//! with the matching `*_free`. Every fallible call returns a [`CsStatus`]; on
//! failure [`cs_last_error_message`] describes the cause for the calling thread.
//! Strings returned through out-parameters are owned by the caller and must be
//! released with [`cs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clinshift::data::{load_dataset, save_dataset, Dataset};
use clinshift::error::Error;
use clinshift::eval::{average_precision, evaluate_baseline, weighted_auprc, BaselineConfig};
use clinshift::infotheory::{self, DiscreteColumn, DiscreteMatrix};
use clinshift::scenarios::{build_control, build_scenario, load_pair, save_pair, ScenarioSpec, SourceTargetPair};
use clinshift::sieve::{fit_landscape, landscape_to_dot, DiseaseLandscape, SieveConfig};
use clinshift::synth::{generate, SynthConfig};
use clinshift::transforms::{apply_transforms, TransformSpec};

/// Status codes. Values 2 to 6 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    Config = 2,
    Io = 3,
    Degenerate = 4,
    EmptyCohort = 5,
    Coverage = 6,
    NullPointer = 10,
    InvalidUtf8 = 11,
    InvalidArgument = 12,
    Internal = 13,
}

impl CsStatus {
    fn from_exit(code: i32) -> Self {
        match code {
            0 => CsStatus::Ok,
            2 => CsStatus::Config,
            3 => CsStatus::Io,
            4 => CsStatus::Degenerate,
            5 => CsStatus::EmptyCohort,
            6 => CsStatus::Coverage,
            _ => CsStatus::Internal,
        }
    }
}

/// A loaded or generated dataset.
pub struct CsDataset {
    inner: Dataset,
}

/// A fitted disease landscape.
pub struct CsLandscape {
    inner: DiseaseLandscape,
}

/// A source/target pair.
pub struct CsPair {
    inner: SourceTargetPair,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

struct Failure(CsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(CsStatus::from_exit(e.exit_code()), e.to_string())
    }
}

macro_rules! impl_failure_from {
    ($($t:ty),*) => {
        $(impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::from(Error::from(e))
            }
        })*
    };
}

impl_failure_from!(
    clinshift::data::DataError,
    clinshift::infotheory::InfoError,
    clinshift::sieve::SieveError,
    clinshift::scenarios::ScenarioError,
    clinshift::transforms::TransformError,
    clinshift::eval::EvalError,
    clinshift::synth::SynthError
);

fn null(what: &str) -> Failure {
    Failure(CsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(CsStatus::InvalidArgument, message.into())
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CsStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CsStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn json_config<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure(CsStatus::Config, format!("{what}: {e}")))
}

/// Message of the calling thread's most recent failure, or an empty string.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a dataset directory (or its manifest path).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_dataset_load(path: *const c_char, out: *mut *mut CsDataset) -> CsStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let ds = load_dataset(path)?;
        write_out(out, Box::into_raw(Box::new(CsDataset { inner: ds })), "out")
    })
}

/// Writes a dataset directory in canonical form.
///
/// # Safety
/// `dataset` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cs_dataset_save(dataset: *const CsDataset, path: *const c_char) -> CsStatus {
    guard(|| {
        let ds = handle(dataset, "dataset")?;
        save_dataset(&ds.inner, str_arg(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_dataset_free(dataset: *mut CsDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Record, channel, valid (unmasked) channel and disease counts. Null outputs are skipped.
///
/// # Safety
/// `dataset` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_dataset_counts(
    dataset: *const CsDataset,
    n_records: *mut usize,
    n_channels: *mut usize,
    n_valid_channels: *mut usize,
    n_diseases: *mut usize,
) -> CsStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.inner;
        for (out, v) in [
            (n_records, ds.len()),
            (n_channels, ds.n_channels()),
            (n_valid_channels, ds.valid_channel_count()),
            (n_diseases, ds.n_diseases()),
        ] {
            if !out.is_null() {
                out.write(v);
            }
        }
        Ok(())
    })
}

/// Generates a synthetic dataset. `config_json` may be null for defaults.
/// When `manifest_json` is non-null it receives the ground-truth manifest.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_synth_generate(
    config_json: *const c_char,
    out: *mut *mut CsDataset,
    manifest_json: *mut *mut c_char,
) -> CsStatus {
    guard(|| {
        let config: SynthConfig = match opt_str_arg(config_json, "config_json")? {
            Some(text) => json_config(text, "synth config")?,
            None => SynthConfig::default(),
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let (ds, manifest) = generate(&config)?;
        if !manifest_json.is_null() {
            let text = serde_json::to_string(&manifest).map_err(|e| Failure(CsStatus::Internal, e.to_string()))?;
            manifest_json.write(to_c_string(text));
        }
        out.write(Box::into_raw(Box::new(CsDataset { inner: ds })));
        Ok(())
    })
}

/// Fits a `k`-factor landscape on the dataset's labels.
///
/// # Safety
/// `dataset` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_landscape_fit(
    dataset: *const CsDataset,
    k: usize,
    cardinality: u32,
    seed: u64,
    restarts: usize,
    out: *mut *mut CsLandscape,
) -> CsStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let config = SieveConfig {
            cardinality,
            restarts,
            seed,
            ..SieveConfig::default()
        };
        let (_, landscape) = fit_landscape(&ds.label_matrix(), k, &config)?;
        out.write(Box::into_raw(Box::new(CsLandscape { inner: landscape })));
        Ok(())
    })
}

/// # Safety
/// `landscape` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_landscape_free(landscape: *mut CsLandscape) {
    if !landscape.is_null() {
        drop(Box::from_raw(landscape));
    }
}

/// The landscape as JSON.
///
/// # Safety
/// `landscape` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_landscape_to_json(landscape: *const CsLandscape, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let l = &handle(landscape, "landscape")?.inner;
        let text = serde_json::to_string_pretty(l).map_err(|e| Failure(CsStatus::Internal, e.to_string()))?;
        write_out(out, to_c_string(text), "out")
    })
}

/// The landscape as a Graphviz graph.
///
/// # Safety
/// `landscape` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_landscape_to_dot(landscape: *const CsLandscape, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let l = &handle(landscape, "landscape")?.inner;
        write_out(out, to_c_string(landscape_to_dot(l)), "out")
    })
}

/// Cluster (factor id) of a disease.
///
/// # Safety
/// `landscape` must be a live handle; `disease` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_landscape_cluster(
    landscape: *const CsLandscape,
    disease: *const c_char,
    out: *mut usize,
) -> CsStatus {
    guard(|| {
        let l = &handle(landscape, "landscape")?.inner;
        let name = str_arg(disease, "disease")?;
        let k = *l
            .clusters
            .get(name)
            .ok_or_else(|| invalid(format!("unknown disease `{name}`")))?;
        write_out(out, k, "out")
    })
}

/// Builds a pair from a JSON scenario spec and applies the spec's transforms.
/// With `control` non-zero, builds the in-distribution control instead.
///
/// # Safety
/// `dataset` must be a live handle; `spec_json` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_build(
    dataset: *const CsDataset,
    spec_json: *const c_char,
    control: i32,
    out: *mut *mut CsPair,
) -> CsStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.inner;
        let spec = ScenarioSpec::from_json(str_arg(spec_json, "spec_json")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut pair = if control != 0 {
            build_control(ds, &spec)?
        } else {
            build_scenario(ds, &spec)?
        };
        apply_transforms(&mut pair, &spec.transforms)?;
        out.write(Box::into_raw(Box::new(CsPair { inner: pair })));
        Ok(())
    })
}

/// Applies one transform (JSON object) or a list of them (JSON array).
///
/// # Safety
/// `pair` must be a live handle; `transform_json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cs_pair_apply_transform(pair: *mut CsPair, transform_json: *const c_char) -> CsStatus {
    guard(|| {
        let pair = handle_mut(pair, "pair")?;
        let value: serde_json::Value = json_config(str_arg(transform_json, "transform_json")?, "transform")?;
        let specs: Vec<TransformSpec> = if value.is_array() {
            serde_json::from_value(value)
        } else {
            serde_json::from_value(value).map(|s| vec![s])
        }
        .map_err(|e| Failure(CsStatus::Config, format!("transform: {e}")))?;
        apply_transforms(&mut pair.inner, &specs)?;
        Ok(())
    })
}

/// # Safety
/// `pair` must be a live handle; `dir` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cs_pair_save(pair: *const CsPair, dir: *const c_char) -> CsStatus {
    guard(|| {
        let p = &handle(pair, "pair")?.inner;
        save_pair(p, &PathBuf::from(str_arg(dir, "dir")?))?;
        Ok(())
    })
}

/// # Safety
/// `dir` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_pair_load(dir: *const c_char, out: *mut *mut CsPair) -> CsStatus {
    guard(|| {
        let p = load_pair(&PathBuf::from(str_arg(dir, "dir")?))?;
        write_out(out, Box::into_raw(Box::new(CsPair { inner: p })), "out")
    })
}

/// # Safety
/// `pair` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_pair_free(pair: *mut CsPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Sizes and positive counts of both sides. Null outputs are skipped.
///
/// # Safety
/// `pair` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_pair_counts(
    pair: *const CsPair,
    n_source: *mut usize,
    n_target: *mut usize,
    positives_source: *mut usize,
    positives_target: *mut usize,
) -> CsStatus {
    guard(|| {
        let p = &handle(pair, "pair")?.inner;
        for (out, v) in [
            (n_source, p.source.len()),
            (n_target, p.target.len()),
            (positives_source, p.source.positives()),
            (positives_target, p.target.positives()),
        ] {
            if !out.is_null() {
                out.write(v);
            }
        }
        Ok(())
    })
}

/// Trains the logistic baseline on the source and reports target weighted AUPRC.
/// `report_json` may be null; otherwise it receives the full report.
///
/// # Safety
/// `pair` must be a live handle; `auprc` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_evaluate_baseline(
    pair: *const CsPair,
    epochs: usize,
    learning_rate: f64,
    auprc: *mut f64,
    report_json: *mut *mut c_char,
) -> CsStatus {
    guard(|| {
        let p = &handle(pair, "pair")?.inner;
        if auprc.is_null() {
            return Err(null("auprc"));
        }
        let config = BaselineConfig {
            epochs,
            learning_rate,
            seed: p.provenance.seed,
            ..BaselineConfig::default()
        };
        let report = evaluate_baseline(p, &config)?;
        auprc.write(report.weighted_auprc);
        if !report_json.is_null() {
            let text = serde_json::to_string_pretty(&report).map_err(|e| Failure(CsStatus::Internal, e.to_string()))?;
            report_json.write(to_c_string(text));
        }
        Ok(())
    })
}

unsafe fn slice_arg<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// Step-interpolated average precision over tie groups.
///
/// # Safety
/// `scores` and `labels` must point to `n` elements; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_average_precision(
    scores: *const f64,
    labels: *const u8,
    n: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let s = slice_arg(scores, n, "scores")?;
        let y = slice_arg(labels, n, "labels")?;
        if y.iter().any(|&v| v > 1) {
            return Err(invalid("labels must be 0 or 1"));
        }
        write_out(out, average_precision(s, y)?, "out")
    })
}

/// Support-weighted mean of per-task APs.
///
/// # Safety
/// `aps` and `supports` must point to `n` elements; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_weighted_auprc(aps: *const f64, supports: *const f64, n: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        let a = slice_arg(aps, n, "aps")?;
        let s = slice_arg(supports, n, "supports")?;
        let tasks: Vec<(f64, f64)> = a.iter().copied().zip(s.iter().copied()).collect();
        write_out(out, weighted_auprc(&tasks)?, "out")
    })
}

/// Plug-in entropy in bits of one discrete column.
///
/// # Safety
/// `values` must point to `n` elements; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_entropy(values: *const u32, n: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        let v = slice_arg(values, n, "values")?;
        let col = DiscreteColumn::from_values(v.to_vec());
        write_out(out, infotheory::entropy(&col)?, "out")
    })
}

/// Total correlation in bits of a row-major `n_rows × n_cols` discrete matrix.
///
/// # Safety
/// `values` must point to `n_rows * n_cols` elements; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_total_correlation(
    values: *const u32,
    n_rows: usize,
    n_cols: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let len = n_rows
            .checked_mul(n_cols)
            .ok_or_else(|| invalid("matrix size overflows"))?;
        let v = slice_arg(values, len, "values")?;
        let rows: Vec<Vec<u32>> = (0..n_rows).map(|r| v[r * n_cols..(r + 1) * n_cols].to_vec()).collect();
        let m = DiscreteMatrix::from_rows(&rows)?;
        write_out(out, infotheory::total_correlation(&m)?, "out")
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
