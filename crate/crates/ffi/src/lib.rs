//! C ABI over `qlearn`.
//!
//! Objects are opaque handles created by `ql_*_new`/`ql_*_load`/`*_train`
//! and released with the matching `ql_*_free`. Every function returns a
//! [`QlStatus`]; on failure `ql_last_error_message` describes the error for
//! the calling thread. Panics never cross the boundary.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qlearn::lattices::{build_logarithmic, build_regular, LookupLattice, SchemeSpec};
use qlearn::learners::{
    full_precision_frank_wolfe, full_precision_perceptron, quantized_frank_wolfe, quantized_perceptron,
    FrankWolfeConfig, Initialization, PerceptronConfig, TrainedModel,
};
use qlearn::{Error, Example, Label, LabeledDataset, QuantizationScheme, Vector};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidScheme = 4,
    NoZeroAtom = 5,
    DegenerateWeights = 6,
    Parse = 7,
    Io = 8,
    Panic = 9,
    Other = 10,
}

/// A quantization scheme.
pub struct QlScheme(Box<dyn QuantizationScheme>);

/// A labeled dataset.
pub struct QlDataset(LabeledDataset);

/// The result of a training run.
pub struct QlModel(TrainedModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> QlStatus {
    match e {
        Error::DimensionMismatch { .. } => QlStatus::DimensionMismatch,
        Error::NonFinite { .. } | Error::InvalidInput(_) | Error::AtomOutOfRange(_) | Error::Generation(_) => {
            QlStatus::InvalidArgument
        }
        Error::InvalidScheme(_) => QlStatus::InvalidScheme,
        Error::NoZeroAtom => QlStatus::NoZeroAtom,
        Error::DegenerateWeights { .. } => QlStatus::DegenerateWeights,
        Error::Parse { .. } | Error::Config(_) => QlStatus::Parse,
        Error::Io(_) | Error::Csv(_) => QlStatus::Io,
        Error::Inapplicable(_) => QlStatus::Other,
    }
}

enum Fail {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QlStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            QlStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            QlStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            QlStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = value;
    Ok(())
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Arg(format!("{what} is not UTF-8")))
}

/// The calling thread's most recent error message, or null if there is none.
/// Free the result with `ql_string_free`.
#[no_mangle]
pub extern "C" fn ql_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_deref() {
        Some(m) => CString::new(m.replace('\0', " "))
            .map(CString::into_raw)
            .unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    })
}

#[no_mangle]
pub unsafe extern "C" fn ql_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_scheme_regular_new(
    dim: usize,
    points: usize,
    lo: f64,
    hi: f64,
    out: *mut *mut QlScheme,
) -> QlStatus {
    guard(|| put(out, QlScheme(Box::new(build_regular(dim, points, lo, hi)?))))
}

#[no_mangle]
pub unsafe extern "C" fn ql_scheme_logarithmic_new(
    dim: usize,
    exponent_bits: u32,
    mantissa_bits: u32,
    out: *mut *mut QlScheme,
) -> QlStatus {
    guard(|| put(out, QlScheme(Box::new(build_logarithmic(dim, exponent_bits, mantissa_bits)?))))
}

/// `rows` holds `count * dim` values, one atom per row.
#[no_mangle]
pub unsafe extern "C" fn ql_scheme_lookup_new(
    rows: *const f64,
    count: usize,
    dim: usize,
    halo: f64,
    out: *mut *mut QlScheme,
) -> QlStatus {
    guard(|| {
        if count == 0 || dim == 0 {
            return Err(Fail::Arg("lookup table needs at least one row and one column".into()));
        }
        let total = count.checked_mul(dim).ok_or_else(|| Fail::Arg("table too large".into()))?;
        let values = slice(rows, total, "rows")?;
        let table = values
            .chunks(dim)
            .map(|r| Vector::new(r.to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        put(out, QlScheme(Box::new(LookupLattice::new(table, halo)?)))
    })
}

/// Build a scheme from its flat text form, e.g. `kind=regular dim=2 points=4 lo=-1 hi=1`.
#[no_mangle]
pub unsafe extern "C" fn ql_scheme_parse(text: *const c_char, out: *mut *mut QlScheme) -> QlStatus {
    guard(|| {
        let spec = SchemeSpec::parse_flat(string(text, "text")?)?;
        put(out, QlScheme(spec.build()?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ql_scheme_free(scheme: *mut QlScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_scheme_dim(scheme: *const QlScheme, out: *mut usize) -> QlStatus {
    guard(|| write(out, get(scheme, "scheme")?.0.dim()))
}

/// The error parameter; `exact` (if non-null) receives 0 for Monte Carlo estimates.
#[no_mangle]
pub unsafe extern "C" fn ql_scheme_delta(scheme: *const QlScheme, out: *mut f64, exact: *mut bool) -> QlStatus {
    guard(|| {
        let d = get(scheme, "scheme")?.0.delta();
        if !exact.is_null() {
            *exact = d.is_exact();
        }
        write(out, d.value())
    })
}

/// Write `r(q(x))` into `restored` (both of length `dim`).
#[no_mangle]
pub unsafe extern "C" fn ql_scheme_quantize(
    scheme: *const QlScheme,
    x: *const f64,
    dim: usize,
    restored: *mut f64,
) -> QlStatus {
    guard(|| {
        let s = &get(scheme, "scheme")?.0;
        let a = s.quantize(slice(x, dim, "x")?)?;
        if restored.is_null() {
            return Err(Fail::Null("restored"));
        }
        std::slice::from_raw_parts_mut(restored, dim).copy_from_slice(a.restoration());
        Ok(())
    })
}

/// `features` holds `count * dim` values row by row; `labels` holds `count`
/// values, each +1 or -1.
#[no_mangle]
pub unsafe extern "C" fn ql_dataset_new(
    features: *const f64,
    labels: *const i8,
    count: usize,
    dim: usize,
    out: *mut *mut QlDataset,
) -> QlStatus {
    guard(|| {
        if count == 0 || dim == 0 {
            return Err(Fail::Arg("dataset needs at least one example and one feature".into()));
        }
        let total = count.checked_mul(dim).ok_or_else(|| Fail::Arg("dataset too large".into()))?;
        let xs = slice(features, total, "features")?;
        let ys = slice(labels, count, "labels")?;
        let examples = xs
            .chunks(dim)
            .zip(ys)
            .map(|(x, &y)| {
                let y = match y {
                    1 => Label::Positive,
                    -1 => Label::Negative,
                    other => return Err(Fail::Arg(format!("label {other} is not +1 or -1"))),
                };
                Ok(Example::new(Vector::new(x.to_vec())?, y))
            })
            .collect::<Result<Vec<_>, Fail>>()?;
        put(out, QlDataset(LabeledDataset::new("ffi", examples)?))
    })
}

/// Load a sparse (`label index:value ...`) or dense CSV dataset.
#[no_mangle]
pub unsafe extern "C" fn ql_dataset_load(path: *const c_char, out: *mut *mut QlDataset) -> QlStatus {
    guard(|| put(out, QlDataset(qlearn::data::load_dataset(Path::new(string(path, "path")?))?)))
}

/// A new dataset with every example replaced by `r(q(x))`.
#[no_mangle]
pub unsafe extern "C" fn ql_dataset_quantize(
    data: *const QlDataset,
    scheme: *const QlScheme,
    out: *mut *mut QlDataset,
) -> QlStatus {
    guard(|| {
        let q = get(data, "data")?.0.quantized(get(scheme, "scheme")?.0.as_ref())?;
        put(out, QlDataset(q))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ql_dataset_free(data: *mut QlDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ql_dataset_len(data: *const QlDataset, out: *mut usize) -> QlStatus {
    guard(|| write(out, get(data, "data")?.0.len()))
}

#[no_mangle]
pub unsafe extern "C" fn ql_dataset_dim(data: *const QlDataset, out: *mut usize) -> QlStatus {
    guard(|| write(out, get(data, "data")?.0.dim()))
}

/// Perceptron with learning rate 1 and the lenient mistake rule, starting at
/// `q(0)`. A null `scheme` trains at full precision.
#[no_mangle]
pub unsafe extern "C" fn ql_perceptron_train(
    scheme: *const QlScheme,
    data: *const QlDataset,
    epochs: usize,
    seed: u64,
    out: *mut *mut QlModel,
) -> QlStatus {
    guard(|| {
        let data = &get(data, "data")?.0;
        let config = PerceptronConfig {
            epochs,
            shuffle_seed: seed,
            init: Initialization::NearestToZero,
            ..PerceptronConfig::default()
        };
        let model = match scheme.as_ref() {
            Some(s) => quantized_perceptron(s.0.as_ref(), data, &config)?,
            None => full_precision_perceptron(data, &config)?,
        };
        put(out, QlModel(model))
    })
}

/// Frank-Wolfe for `max_steps` steps. A null `scheme` trains at full precision.
#[no_mangle]
pub unsafe extern "C" fn ql_frank_wolfe_train(
    scheme: *const QlScheme,
    data: *const QlDataset,
    max_steps: usize,
    epsilon: f64,
    out: *mut *mut QlModel,
) -> QlStatus {
    guard(|| {
        let data = &get(data, "data")?.0;
        let config = FrankWolfeConfig::new(max_steps, epsilon);
        let model = match scheme.as_ref() {
            Some(s) => quantized_frank_wolfe(s.0.as_ref(), data, &config)?,
            None => full_precision_frank_wolfe(data, &config)?,
        };
        put(out, QlModel(model))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ql_model_free(model: *mut QlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Copy the weights into `weights`, which has room for `dim` values.
#[no_mangle]
pub unsafe extern "C" fn ql_model_weights(model: *const QlModel, weights: *mut f64, dim: usize) -> QlStatus {
    guard(|| {
        let w = &get(model, "model")?.0.weights;
        if dim != w.dim() {
            return Err(Error::DimensionMismatch {
                expected: w.dim(),
                actual: dim,
            }
            .into());
        }
        if weights.is_null() {
            return Err(Fail::Null("weights"));
        }
        std::slice::from_raw_parts_mut(weights, dim).copy_from_slice(w);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ql_model_mistakes(model: *const QlModel, out: *mut usize) -> QlStatus {
    guard(|| write(out, get(model, "model")?.0.mistakes))
}

#[no_mangle]
pub unsafe extern "C" fn ql_model_converged(model: *const QlModel, out: *mut bool) -> QlStatus {
    guard(|| write(out, get(model, "model")?.0.converged))
}

/// Percentage of `data` classified correctly.
#[no_mangle]
pub unsafe extern "C" fn ql_model_accuracy(model: *const QlModel, data: *const QlDataset, out: *mut f64) -> QlStatus {
    guard(|| {
        let m = &get(model, "model")?.0;
        let d = &get(data, "data")?.0;
        if d.dim() != m.weights.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.weights.dim(),
                actual: d.dim(),
            }
            .into());
        }
        write(out, m.accuracy(d))
    })
}
