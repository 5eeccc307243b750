//! C ABI over the metarepo engine.
//!
//! Every function returns an [`MrStatus`]; on failure the message is available
//! from [`mr_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their matching `_close`/`_free` function. Strings
//! returned through `char **` are owned by the caller and freed with
//! [`mr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use metarepo::arff::parse_arff_with_class;
use metarepo::export::{
    export_algorithm_table, export_dataset_level, export_fold_table, export_hyperparameter_mapping,
    export_instance_level, export_per_algorithm,
};
use metarepo::hardness::{compute_hardness, to_instance_metafeatures, MEASURE_NAMES};
use metarepo::ingest::ingest_run_file;
use metarepo::metafeatures::{compute_all_with, FEATURE_NAMES};
use metarepo::model::Dataset;
use metarepo::runner::{run_builtin, BuiltinLearner};
use metarepo::store::{put_dataset, put_dataset_metafeatures, put_instance_metafeatures, load_dataset, Store};
use metarepo::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MrStatus {
    Ok = 0,
    /// Null pointer, invalid UTF-8, short output buffer or unknown name.
    InvalidArgument = 1,
    /// Malformed input or a violated measure precondition.
    DataError = 2,
    /// A stored document differs from the one being written.
    Conflict = 3,
    NotFound = 4,
    /// Another process holds the store's write lock.
    Locked = 5,
    IoError = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Open store handle.
pub struct MrStore {
    inner: Store,
}

/// Parsed dataset handle.
pub struct MrDataset {
    inner: Dataset,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MrStatus {
    match e {
        Error::Conflict(_) => MrStatus::Conflict,
        Error::NotFound(_) => MrStatus::NotFound,
        Error::Locked(_) => MrStatus::Locked,
        Error::Io(_) => MrStatus::IoError,
        _ => MrStatus::DataError,
    }
}

struct Fail(MrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(MrStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MrStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MrStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| invalid(format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| invalid(format!("{what} is null")))
}

fn names(cache: &'static OnceLock<Vec<CString>>, src: &[&str]) -> &'static [CString] {
    cache.get_or_init(|| src.iter().map(|n| CString::new(*n).unwrap()).collect())
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opens (creating if needed) the store rooted at `root`.
///
/// # Safety
/// `root` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mr_store_open(root: *const c_char, out: *mut *mut MrStore) -> MrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let root = str_arg(root, "root")?;
        let store = Store::open(root)?;
        *out = Box::into_raw(Box::new(MrStore { inner: store }));
        Ok(())
    })
}

/// Releases a store handle. NULL is ignored.
///
/// # Safety
/// `store` must come from [`mr_store_open`] and not have been closed.
#[no_mangle]
pub unsafe extern "C" fn mr_store_close(store: *mut MrStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Parses ARFF text. `class_name` may be NULL to use the last attribute.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_parse(
    text: *const c_char,
    class_name: *const c_char,
    out: *mut *mut MrDataset,
) -> MrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let class = opt_str_arg(class_name, "class_name")?;
        let d = parse_arff_with_class(text, class).map_err(Error::from)?;
        *out = Box::into_raw(Box::new(MrDataset { inner: d }));
        Ok(())
    })
}

/// Loads a registered dataset from the store.
///
/// # Safety
/// `store` must be a live handle, `name` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_load(
    store: *const MrStore,
    name: *const c_char,
    out: *mut *mut MrDataset,
) -> MrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let store = handle(store, "store")?;
        let d = load_dataset(&store.inner, str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(MrDataset { inner: d }));
        Ok(())
    })
}

/// Releases a dataset handle. NULL is ignored.
///
/// # Safety
/// `dataset` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_free(dataset: *mut MrDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Number of instances in the dataset.
///
/// # Safety
/// `dataset` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_num_instances(dataset: *const MrDataset, out: *mut usize) -> MrStatus {
    guard(|| {
        let d = handle(dataset, "dataset")?;
        *out_ptr(out, "out")? = d.inner.n_instances();
        Ok(())
    })
}

/// Number of dataset-level meta-features written by [`mr_dataset_metafeatures`].
#[no_mangle]
pub extern "C" fn mr_metafeature_count() -> usize {
    FEATURE_NAMES.len()
}

/// Name of meta-feature `index`, or NULL when out of range. Static storage.
#[no_mangle]
pub extern "C" fn mr_metafeature_name(index: usize) -> *const c_char {
    static CACHE: OnceLock<Vec<CString>> = OnceLock::new();
    names(&CACHE, &FEATURE_NAMES).get(index).map_or(ptr::null(), |c| c.as_ptr())
}

/// Computes all dataset-level meta-features into `out[0..mr_metafeature_count()]`.
/// Undefined values are written as NaN.
///
/// # Safety
/// `dataset` must be a live handle and `out` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_metafeatures(
    dataset: *const MrDataset,
    seed: u64,
    folds: usize,
    out: *mut f64,
    len: usize,
) -> MrStatus {
    guard(|| {
        let d = handle(dataset, "dataset")?;
        if out.is_null() || len < FEATURE_NAMES.len() {
            return Err(invalid(format!("output buffer needs {} doubles", FEATURE_NAMES.len())));
        }
        let mf = compute_all_with(&d.inner, seed, folds)?;
        let buf = std::slice::from_raw_parts_mut(out, len);
        for (slot, (_, v)) in buf.iter_mut().zip(mf.values()) {
            *slot = v.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Number of instance hardness measures per instance.
#[no_mangle]
pub extern "C" fn mr_hardness_count() -> usize {
    MEASURE_NAMES.len()
}

/// Name of hardness measure `index`, or NULL when out of range. Static storage.
#[no_mangle]
pub extern "C" fn mr_hardness_name(index: usize) -> *const c_char {
    static CACHE: OnceLock<Vec<CString>> = OnceLock::new();
    names(&CACHE, &MEASURE_NAMES).get(index).map_or(ptr::null(), |c| c.as_ptr())
}

/// Computes the hardness measures of every instance, row-major into an
/// `n_instances × mr_hardness_count()` buffer.
///
/// # Safety
/// `dataset` must be a live handle and `out` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mr_dataset_hardness(
    dataset: *const MrDataset,
    k: usize,
    out: *mut f64,
    len: usize,
) -> MrStatus {
    guard(|| {
        let d = handle(dataset, "dataset")?;
        let need = d.inner.n_instances() * MEASURE_NAMES.len();
        if out.is_null() || len < need {
            return Err(invalid(format!("output buffer needs {need} doubles")));
        }
        let h = compute_hardness(&d.inner, k)?;
        let buf = std::slice::from_raw_parts_mut(out, need);
        for (row, inst) in buf.chunks_mut(MEASURE_NAMES.len()).zip(&h) {
            row.copy_from_slice(&inst.to_array());
        }
        Ok(())
    })
}

/// Stores the dataset under its relation name.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn mr_store_register(store: *const MrStore, dataset: *const MrDataset, force: bool) -> MrStatus {
    guard(|| {
        let s = handle(store, "store")?;
        let d = handle(dataset, "dataset")?;
        put_dataset(&s.inner, &d.inner, force)?;
        Ok(())
    })
}

/// Validates and stores a run file for a registered dataset.
///
/// # Safety
/// `store` must be live; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mr_store_ingest(
    store: *const MrStore,
    dataset: *const c_char,
    run_text: *const c_char,
    force: bool,
) -> MrStatus {
    guard(|| {
        let s = handle(store, "store")?;
        ingest_run_file(&s.inner, str_arg(dataset, "dataset")?, str_arg(run_text, "run_text")?, force)?;
        Ok(())
    })
}

/// Cross-validates a built-in learner (`stump`, `1nn`, `lda`, `tree`) with one
/// partition seed and stores the predictions.
///
/// # Safety
/// `store` must be live; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mr_store_run_builtin(
    store: *const MrStore,
    dataset: *const c_char,
    learner: *const c_char,
    seed: u64,
    folds: usize,
    force: bool,
) -> MrStatus {
    guard(|| {
        let s = handle(store, "store")?;
        let learner: BuiltinLearner = str_arg(learner, "learner")?
            .parse()
            .map_err(|e: Error| invalid(e.to_string()))?;
        run_builtin(&s.inner, str_arg(dataset, "dataset")?, learner, &[seed], folds, force)?;
        Ok(())
    })
}

/// Computes and stores both meta-feature levels for a registered dataset.
///
/// # Safety
/// `store` must be live; `dataset` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mr_store_compute(
    store: *const MrStore,
    dataset: *const c_char,
    seed: u64,
    k: usize,
    folds: usize,
    force: bool,
) -> MrStatus {
    guard(|| {
        let s = handle(store, "store")?;
        let name = str_arg(dataset, "dataset")?;
        let d = load_dataset(&s.inner, name)?;
        let mf = compute_all_with(&d, seed, folds)?;
        let h = compute_hardness(&d, k)?;
        put_dataset_metafeatures(&s.inner, name, &mf, force)?;
        put_instance_metafeatures(&s.inner, name, &to_instance_metafeatures(&h), force)?;
        Ok(())
    })
}

/// Freezes the current state; writes the new revision number to `out`.
///
/// # Safety
/// `store` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mr_store_snapshot(store: *const MrStore, out: *mut u64) -> MrStatus {
    guard(|| {
        let s = handle(store, "store")?;
        let out = out_ptr(out, "out")?;
        *out = s.inner.snapshot()?;
        Ok(())
    })
}

/// Renders an export table as ARFF text.
///
/// `table` is one of `algorithms`, `parameters`, `folds`, `instances`,
/// `datasets`, `algorithm`. `arg` names the dataset (`folds`, `instances`) or
/// the algorithm (`parameters`, `algorithm`) and is ignored otherwise.
/// The result is freed with [`mr_string_free`].
///
/// # Safety
/// `store` must be live, strings NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mr_store_export(
    store: *const MrStore,
    table: *const c_char,
    arg: *const c_char,
    out: *mut *mut c_char,
) -> MrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let s = &handle(store, "store")?.inner;
        let table = str_arg(table, "table")?;
        let arg = opt_str_arg(arg, "arg")?;
        let need = |what: &str| arg.ok_or_else(|| invalid(format!("table '{table}' needs a {what} argument")));
        let text = match table {
            "algorithms" => export_algorithm_table(s)?,
            "parameters" => export_hyperparameter_mapping(s, need("algorithm")?)?,
            "folds" => export_fold_table(s, need("dataset")?)?,
            "instances" => export_instance_level(s, need("dataset")?)?,
            "datasets" => export_dataset_level(s)?,
            "algorithm" => export_per_algorithm(s, need("algorithm")?)?,
            other => return Err(invalid(format!("unknown table '{other}'"))),
        };
        *out = CString::new(text)
            .map_err(|_| invalid("export contains a NUL byte"))?
            .into_raw();
        Ok(())
    })
}
