//! C ABI over the mint toolkit.
//!
//! Objects cross the boundary as opaque handles created by `mint_*_new` or
//! `mint_*_load` and released by the matching `mint_*_free`. Every fallible
//! call returns a [`MintStatus`]; on failure a description is available from
//! [`mint_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use mint::gmi::{conditional_gmi, gmi, BlockSpec, GmiError, SampleMatrix};
use mint::io::{read_activations_file, read_model_file, write_model_file, IoError};
use mint::nn::{apply_mask, predict_proba, ActivationDump, MlpModel, NnError};
use mint::prune::{read_mask_file, PruneError};
use ndarray::Array2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MintStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsufficientSamples = 3,
    Shape = 4,
    Format = 5,
    Corruption = 6,
    Io = 7,
    Domain = 8,
    Internal = 9,
}

/// Sample table handle.
pub struct MintSamples(SampleMatrix);

/// Model handle.
pub struct MintModel(MlpModel);

/// Activation dump handle.
pub struct MintActivations(ActivationDump);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MintScore {
    pub value: f64,
    pub fr_count: u64,
    pub subset_size: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(MintStatus, String);

impl From<GmiError> for Failure {
    fn from(e: GmiError) -> Self {
        let status = match e {
            GmiError::InsufficientSamples { .. } => MintStatus::InsufficientSamples,
            GmiError::Shape(_) | GmiError::InvalidBlocks(_) | GmiError::Contract(_) => MintStatus::Shape,
            GmiError::Domain(_) | GmiError::NonFinite { .. } | GmiError::DegenerateLabels => MintStatus::Domain,
        };
        Failure(status, e.to_string())
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let status = match e {
            IoError::Io(_) => MintStatus::Io,
            IoError::Format(_) | IoError::Config { .. } => MintStatus::Format,
            IoError::Corruption(_) => MintStatus::Corruption,
        };
        Failure(status, e.to_string())
    }
}

impl From<NnError> for Failure {
    fn from(e: NnError) -> Self {
        let status = match e {
            NnError::Shape(_) => MintStatus::Shape,
            _ => MintStatus::Domain,
        };
        Failure(status, e.to_string())
    }
}

impl From<PruneError> for Failure {
    fn from(e: PruneError) -> Self {
        let status = match e {
            PruneError::Io(_) => MintStatus::Io,
            PruneError::MaskFormat { .. } => MintStatus::Format,
            PruneError::Shape(_) => MintStatus::Shape,
            _ => MintStatus::Domain,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MintStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            MintStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            MintStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(MintStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MintStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null("output pointer"))
}

/// Message describing the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mint_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mint_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy a row-major `rows x dims` table into a new handle.
///
/// # Safety
/// `data` must point to `rows * dims` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mint_samples_new(
    data: *const f64,
    rows: usize,
    dims: usize,
    out: *mut *mut MintSamples,
) -> MintStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        if data.is_null() {
            return Err(null("data"));
        }
        let len = rows
            .checked_mul(dims)
            .ok_or_else(|| Failure(MintStatus::InvalidArgument, "size overflow".into()))?;
        let values = std::slice::from_raw_parts(data, len).to_vec();
        let m = SampleMatrix::new(rows, dims, values)?;
        *out = Box::into_raw(Box::new(MintSamples(m)));
        Ok(())
    })
}

/// # Safety
/// `samples` must be null or a handle from [`mint_samples_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mint_samples_free(samples: *mut MintSamples) {
    if !samples.is_null() {
        drop(Box::from_raw(samples));
    }
}

/// # Safety
/// `samples` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mint_samples_rows(samples: *const MintSamples) -> usize {
    samples.as_ref().map_or(0, |s| s.0.rows())
}

/// # Safety
/// `samples` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mint_samples_dims(samples: *const MintSamples) -> usize {
    samples.as_ref().map_or(0, |s| s.0.dims())
}

/// GMI between the first `x_dims` columns and the next `y_dims` columns.
///
/// # Safety
/// `samples` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mint_gmi(
    samples: *const MintSamples,
    x_dims: usize,
    y_dims: usize,
    seed: u64,
    out: *mut MintScore,
) -> MintStatus {
    guard(|| {
        let s = handle(samples, "samples")?;
        let out = out_arg(out)?;
        let score = gmi(&s.0, &BlockSpec::contiguous(x_dims, y_dims, 0), seed)?;
        *out = MintScore { value: score.value, fr_count: score.raw_fr_count as u64, subset_size: score.subset_size as u64 };
        Ok(())
    })
}

/// Conditional GMI of X (first `x_dims` columns) and Y (next `y_dims`)
/// given Z (next `z_dims`, at least one).
///
/// # Safety
/// `samples` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mint_conditional_gmi(
    samples: *const MintSamples,
    x_dims: usize,
    y_dims: usize,
    z_dims: usize,
    seed: u64,
    out: *mut MintScore,
) -> MintStatus {
    guard(|| {
        let s = handle(samples, "samples")?;
        let out = out_arg(out)?;
        let score = conditional_gmi(&s.0, &BlockSpec::contiguous(x_dims, y_dims, z_dims), seed)?;
        *out = MintScore { value: score.value, fr_count: score.raw_fr_count as u64, subset_size: score.subset_size as u64 };
        Ok(())
    })
}

/// Load a model file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mint_model_load(path: *const c_char, out: *mut *mut MintModel) -> MintStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let model = read_model_file(&path_arg(path)?)?;
        *out = Box::into_raw(Box::new(MintModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mint_model_save(model: *const MintModel, path: *const c_char) -> MintStatus {
    guard(|| {
        let m = handle(model, "model")?;
        write_model_file(&m.0, &path_arg(path)?)?;
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mint_model_free(model: *mut MintModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Input width of the model, 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mint_model_inputs(model: *const MintModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.inputs())
}

/// Output width of the model, 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mint_model_classes(model: *const MintModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.classes())
}

/// Class probabilities for `rows` inputs, written row-major to `probs`
/// (`rows * classes` floats).
///
/// # Safety
/// `inputs` must hold `rows * inputs(model)` floats and `probs` must have room
/// for `probs_len >= rows * classes(model)` floats.
#[no_mangle]
pub unsafe extern "C" fn mint_model_predict(
    model: *const MintModel,
    inputs: *const f32,
    rows: usize,
    probs: *mut f32,
    probs_len: usize,
) -> MintStatus {
    guard(|| {
        let m = &handle(model, "model")?.0;
        if inputs.is_null() || probs.is_null() {
            return Err(null("buffer"));
        }
        if rows == 0 {
            return Err(Failure(MintStatus::InvalidArgument, "no rows".into()));
        }
        if probs_len < rows * m.classes() {
            return Err(Failure(MintStatus::InvalidArgument, "output buffer too small".into()));
        }
        let x = Array2::from_shape_vec((rows, m.inputs()), std::slice::from_raw_parts(inputs, rows * m.inputs()).to_vec())
            .map_err(|e| Failure(MintStatus::Shape, e.to_string()))?;
        let p = predict_proba(m, &x)?;
        std::slice::from_raw_parts_mut(probs, rows * m.classes()).copy_from_slice(p.as_slice().unwrap());
        Ok(())
    })
}

/// New model with the connections zeroed by a mask file.
///
/// # Safety
/// `model` must be a live handle, `mask_path` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mint_model_apply_mask(
    model: *const MintModel,
    mask_path: *const c_char,
    out: *mut *mut MintModel,
) -> MintStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let mask = read_mask_file(&path_arg(mask_path)?)?;
        let masked = apply_mask(&m.0, &mask)?;
        *out = Box::into_raw(Box::new(MintModel(masked)));
        Ok(())
    })
}

/// Load an activation dump.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mint_activations_load(path: *const c_char, out: *mut *mut MintActivations) -> MintStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let dump = read_activations_file(&path_arg(path)?)?;
        *out = Box::into_raw(Box::new(MintActivations(dump)));
        Ok(())
    })
}

/// # Safety
/// `dump` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mint_activations_free(dump: *mut MintActivations) {
    if !dump.is_null() {
        drop(Box::from_raw(dump));
    }
}

/// # Safety
/// `dump` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mint_activations_layer_count(dump: *const MintActivations) -> usize {
    dump.as_ref().map_or(0, |d| d.0.layers.len())
}

/// # Safety
/// `dump` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mint_activations_rows(dump: *const MintActivations) -> usize {
    dump.as_ref().map_or(0, |d| d.0.rows())
}

/// Filter count of layer `layer`, 0 when out of range.
///
/// # Safety
/// `dump` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mint_activations_filters(dump: *const MintActivations, layer: usize) -> usize {
    dump.as_ref().and_then(|d| d.0.layers.get(layer)).map_or(0, |l| l.filters)
}

/// Copy the name of layer `layer` (NUL-terminated, truncated to fit) into
/// `buf`. `needed` receives the full name length without the terminator.
///
/// # Safety
/// `dump` must be a live handle, `buf` must have `buf_len` writable bytes and
/// `needed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mint_activations_layer_name(
    dump: *const MintActivations,
    layer: usize,
    buf: *mut c_char,
    buf_len: usize,
    needed: *mut usize,
) -> MintStatus {
    guard(|| {
        let d = handle(dump, "dump")?;
        let needed = out_arg(needed)?;
        let l = d.0.layers.get(layer).ok_or_else(|| Failure(MintStatus::InvalidArgument, format!("no layer {layer}")))?;
        let bytes = l.name.as_bytes();
        *needed = bytes.len();
        if !buf.is_null() && buf_len > 0 {
            let n = bytes.len().min(buf_len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        Ok(())
    })
}

/// Copy the `rows x filters` activations of layer `layer` into `values` and
/// the row labels into `labels` (either may be null to skip it).
///
/// # Safety
/// `values` must have room for `values_len >= rows * filters` floats and
/// `labels` for `labels_len >= rows` entries when non-null.
#[no_mangle]
pub unsafe extern "C" fn mint_activations_copy(
    dump: *const MintActivations,
    layer: usize,
    values: *mut f32,
    values_len: usize,
    labels: *mut u16,
    labels_len: usize,
) -> MintStatus {
    guard(|| {
        let d = &handle(dump, "dump")?.0;
        let l = d.layers.get(layer).ok_or_else(|| Failure(MintStatus::InvalidArgument, format!("no layer {layer}")))?;
        if !values.is_null() {
            if values_len < l.values.len() {
                return Err(Failure(MintStatus::InvalidArgument, "value buffer too small".into()));
            }
            std::slice::from_raw_parts_mut(values, l.values.len()).copy_from_slice(&l.values);
        }
        if !labels.is_null() {
            if labels_len < d.labels.len() {
                return Err(Failure(MintStatus::InvalidArgument, "label buffer too small".into()));
            }
            std::slice::from_raw_parts_mut(labels, d.labels.len()).copy_from_slice(&d.labels);
        }
        Ok(())
    })
}
