//! C interface to the apboost library.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `_free` function. Every fallible call returns an `ApbStatus`
//! and leaves a message for `apb_last_error` on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use apboost::{
    adaboost, find_stump, load_ensemble, parse_svmlight, save_ensemble, BoostConfig, Dataset,
    Ensemble, Error, ExampleView, QuickBoostParams, Strategy, Variant, WeightVector,
};

pub const APB_STRATEGY_ADAPTIVE: u32 = 0;
pub const APB_STRATEGY_QUICK_BOOST: u32 = 1;
pub const APB_STRATEGY_EXHAUSTIVE: u32 = 2;

pub const APB_VARIANT_NONE: u32 = 0;
pub const APB_VARIANT_LAZY: u32 = 1;
pub const APB_VARIANT_TRIM: u32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApbStatus {
    Ok = 0,
    InvalidArgument = 1,
    Parse = 2,
    Io = 3,
    BoundTimeout = 4,
    Internal = 5,
}

pub struct ApbDataset {
    inner: Dataset,
}

pub struct ApbModel {
    inner: Ensemble,
}

/// Training options. Start from `apb_train_options_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ApbTrainOptions {
    pub rounds: usize,
    pub depth: usize,
    /// One of the `APB_STRATEGY_*` constants.
    pub strategy: u32,
    /// One of the `APB_VARIANT_*` constants.
    pub variant: u32,
    /// Fraction for the lazy and trim variants, in (0, 1].
    pub fraction: f64,
    pub seed: u64,
    pub qb_batches: usize,
    pub qb_init_mass: f64,
}

/// A decision stump `polarity * sign(x[feature] - threshold)`, with a
/// 1-based feature index.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ApbStump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: i32,
    pub error: f64,
    pub assessments: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ApbStatus {
    match e {
        Error::Argument(_) | Error::Contract(_) | Error::DegenerateWeights => {
            ApbStatus::InvalidArgument
        }
        Error::Parse { .. } => ApbStatus::Parse,
        Error::Io(_) | Error::Csv(_) => ApbStatus::Io,
        Error::BoundTimeout { .. } => ApbStatus::BoundTimeout,
        _ => ApbStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> apboost::Result<()>) -> ApbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ApbStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            ApbStatus::Internal
        }
    }
}

fn invalid(msg: &str) -> Error {
    Error::Argument(msg.to_string())
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> apboost::Result<&'a str> {
    if s.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(out: *mut T) -> apboost::Result<&'a mut T> {
    out.as_mut()
        .ok_or_else(|| invalid("output pointer is null"))
}

unsafe fn dataset<'a>(d: *const ApbDataset) -> apboost::Result<&'a Dataset> {
    d.as_ref()
        .map(|d| &d.inner)
        .ok_or_else(|| invalid("dataset is null"))
}

unsafe fn model<'a>(m: *const ApbModel) -> apboost::Result<&'a Ensemble> {
    m.as_ref()
        .map(|m| &m.inner)
        .ok_or_else(|| invalid("model is null"))
}

fn strategy(code: u32, batches: usize, init_mass: f64) -> apboost::Result<Strategy> {
    match code {
        APB_STRATEGY_ADAPTIVE => Ok(Strategy::Adaptive),
        APB_STRATEGY_QUICK_BOOST => Ok(Strategy::QuickBoost(QuickBoostParams {
            batches,
            init_mass,
        })),
        APB_STRATEGY_EXHAUSTIVE => Ok(Strategy::Exhaustive),
        _ => Err(invalid(&format!("unknown strategy {code}"))),
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn apb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads an svmlight file (gzip when the name ends in `.gz`).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn apb_dataset_load(
    path: *const c_char,
    out: *mut *mut ApbDataset,
) -> ApbStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let d = Dataset::load(str_arg(path, "path")?, None)?;
        *out = Box::into_raw(Box::new(ApbDataset { inner: d }));
        Ok(())
    })
}

/// Parses svmlight text held in memory.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn apb_dataset_parse(
    text: *const c_char,
    out: *mut *mut ApbDataset,
) -> ApbStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let d = parse_svmlight(str_arg(text, "text")?.as_bytes(), None)?;
        *out = Box::into_raw(Box::new(ApbDataset { inner: d }));
        Ok(())
    })
}

/// Number of examples; 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn apb_dataset_num_examples(d: *const ApbDataset) -> usize {
    d.as_ref().map_or(0, |d| d.inner.len())
}

/// Number of features; 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn apb_dataset_num_features(d: *const ApbDataset) -> usize {
    d.as_ref().map_or(0, |d| d.inner.n_features())
}

/// # Safety
/// `d` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn apb_dataset_free(d: *mut ApbDataset) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// 100 rounds of depth-1 adaptive boosting with Quick Boost defaults.
#[no_mangle]
pub extern "C" fn apb_train_options_default() -> ApbTrainOptions {
    let qb = QuickBoostParams::default();
    ApbTrainOptions {
        rounds: 100,
        depth: 1,
        strategy: APB_STRATEGY_ADAPTIVE,
        variant: APB_VARIANT_NONE,
        fraction: 1.0,
        seed: 0,
        qb_batches: qb.batches,
        qb_init_mass: qb.init_mass,
    }
}

fn boost_config(o: &ApbTrainOptions) -> apboost::Result<BoostConfig> {
    let variant = match o.variant {
        APB_VARIANT_NONE => Variant::None,
        APB_VARIANT_LAZY => Variant::Lazy(o.fraction),
        APB_VARIANT_TRIM => Variant::Trim(o.fraction),
        v => return Err(invalid(&format!("unknown variant {v}"))),
    };
    Ok(BoostConfig {
        rounds: o.rounds,
        depth: o.depth,
        strategy: strategy(o.strategy, o.qb_batches, o.qb_init_mass)?,
        variant,
        seed: o.seed,
    })
}

/// Trains an ensemble. `assessments` may be null; otherwise it receives the
/// total number of example assessments spent on split search.
///
/// # Safety
/// `train` must be a live dataset, `options` readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apb_train(
    train: *const ApbDataset,
    options: *const ApbTrainOptions,
    out: *mut *mut ApbModel,
    assessments: *mut u64,
) -> ApbStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let opts = options
            .as_ref()
            .ok_or_else(|| invalid("options are null"))?;
        let (e, metrics) = adaboost(dataset(train)?, None, boost_config(opts)?)?;
        if let Some(a) = assessments.as_mut() {
            *a = metrics.last().map_or(0, |m| m.cumulative);
        }
        *out = Box::into_raw(Box::new(ApbModel { inner: e }));
        Ok(())
    })
}

/// Predicted label (+1 or -1) of example `index`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apb_model_predict(
    m: *const ApbModel,
    d: *const ApbDataset,
    index: usize,
    out: *mut i32,
) -> ApbStatus {
    guard(|| {
        let (m, d, out) = (model(m)?, dataset(d)?, out_arg(out)?);
        if index >= d.len() {
            return Err(invalid(&format!(
                "index {index} out of range for {} examples",
                d.len()
            )));
        }
        *out = m.predict(d, index) as i32;
        Ok(())
    })
}

/// Fraction of misclassified examples of `d`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apb_model_error_rate(
    m: *const ApbModel,
    d: *const ApbDataset,
    out: *mut f64,
) -> ApbStatus {
    guard(|| {
        *out_arg(out)? = model(m)?.error_rate(dataset(d)?);
        Ok(())
    })
}

/// Number of boosting rounds; 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn apb_model_num_rounds(m: *const ApbModel) -> usize {
    m.as_ref().map_or(0, |m| m.inner.len())
}

/// Writes the model as an ensemble text file, atomically.
///
/// # Safety
/// `m` must be live and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn apb_model_save(m: *const ApbModel, path: *const c_char) -> ApbStatus {
    guard(|| save_ensemble(model(m)?, str_arg(path, "path")?))
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apb_model_load(path: *const c_char, out: *mut *mut ApbModel) -> ApbStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let e = load_ensemble(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(ApbModel { inner: e }));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn apb_model_free(m: *mut ApbModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Best stump over all examples of `d`. `weights` holds one positive weight
/// per example, or is null for uniform weights. `strategy` is one of the
/// `APB_STRATEGY_*` constants; Quick Boost uses its defaults.
///
/// # Safety
/// `d` must be live, `weights` null or readable for `n_weights` values,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apb_find_stump(
    d: *const ApbDataset,
    weights: *const f64,
    n_weights: usize,
    strategy_code: u32,
    out: *mut ApbStump,
) -> ApbStatus {
    guard(|| {
        let (d, out) = (dataset(d)?, out_arg(out)?);
        let wv = if weights.is_null() {
            WeightVector::uniform(d.len())?
        } else {
            if n_weights != d.len() {
                return Err(invalid(&format!(
                    "{n_weights} weights for {} examples",
                    d.len()
                )));
            }
            WeightVector::from_weights(std::slice::from_raw_parts(weights, n_weights).to_vec())?
        };
        let qb = QuickBoostParams::default();
        let s = strategy(strategy_code, qb.batches, qb.init_mass)?;
        let res = find_stump(&ExampleView::full(d), &wv, s, None)?;
        *out = ApbStump {
            feature: res.stump.feature + 1,
            threshold: res.stump.threshold,
            polarity: res.stump.polarity as i32,
            error: res.error,
            assessments: res.assessments,
        };
        Ok(())
    })
}
