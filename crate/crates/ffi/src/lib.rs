//! C ABI for the desalination co-scheduling engine.
//!
//! Conventions: every fallible call returns a [`DesalStatus`] code and writes
//! its result through an out-pointer; `DESAL_STATUS_OK` (0) means success.
//! Handles are opaque, allocated by this library, and must be released with
//! their matching `_free` function. Strings returned through out-pointers are
//! NUL-terminated, owned by the caller, and released with
//! [`desal_string_free`]. On failure a human-readable message is available
//! from [`desal_last_error`] until the next call on the same thread.
//!
//! The C header `include/desal.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use desal_core::model::{profit, ConfigFile, PlantConfig, Tariff};
use desal_core::oracle::certify_policy;
use desal_core::policy::{compute_thresholds, optimal_dispatch, zone_of, ThresholdSet, Zone};

/// Result codes for every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesalStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The JSON document could not be parsed.
    ParseError = 3,
    /// The configuration violates a model invariant.
    InvalidConfig = 4,
    /// A numeric argument was out of range.
    InvalidArgument = 5,
    /// Internal failure (should not happen on validated inputs).
    Internal = 6,
}

/// Operating zone of a dispatched point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesalZone {
    Import = 0,
    NzLower = 1,
    NzInterior = 2,
    NzUpper = 3,
    Export = 4,
}

impl From<Zone> for DesalZone {
    fn from(zone: Zone) -> Self {
        match zone {
            Zone::Import => DesalZone::Import,
            Zone::NzLower => DesalZone::NzLower,
            Zone::NzInterior => DesalZone::NzInterior,
            Zone::NzUpper => DesalZone::NzUpper,
            Zone::Export => DesalZone::Export,
        }
    }
}

/// A dispatched operating point plus its profit and zone.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DesalDispatch {
    /// TDP water output (m³/h).
    pub w_h: f64,
    /// RODP water output (m³/h).
    pub w_r: f64,
    /// TDP electricity output (kWh).
    pub q_h: f64,
    /// RODP electricity consumption (kWh).
    pub q_r: f64,
    /// TDP fuel input (BTU).
    pub p_h: f64,
    /// Renewable generation (kWh).
    pub g: f64,
    /// Net grid consumption (kWh); positive imports, negative exports.
    pub z: f64,
    /// Plant profit at the point ($).
    pub profit: f64,
    pub zone: DesalZone,
}

/// Opaque: a validated plant configuration plus tariff.
pub struct DesalCase {
    plant: PlantConfig,
    tariff: Tariff,
}

/// Opaque: a precomputed policy threshold set.
pub struct DesalThresholds {
    inner: ThresholdSet,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: String) {
    let sanitized = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn fail(status: DesalStatus, message: impl Into<String>) -> DesalStatus {
    set_last_error(message.into());
    status
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next library call on the same thread; never free it.
#[no_mangle]
pub extern "C" fn desal_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string; never free it.
#[no_mangle]
pub extern "C" fn desal_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Parse and validate a configuration document (`{"plant": ..., "tariff": ...}`).
/// On success writes a new handle to `out_case`.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out_case` to writable
/// memory; both must stay valid for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn desal_case_from_json(
    json: *const c_char,
    out_case: *mut *mut DesalCase,
) -> DesalStatus {
    if json.is_null() || out_case.is_null() {
        return fail(DesalStatus::NullPointer, "json and out_case must be non-NULL");
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(text) => text,
        Err(e) => return fail(DesalStatus::InvalidUtf8, format!("config is not UTF-8: {e}")),
    };
    match ConfigFile::from_json(text) {
        Ok(file) => {
            *out_case = Box::into_raw(Box::new(DesalCase {
                plant: file.plant,
                tariff: file.tariff,
            }));
            DesalStatus::Ok
        }
        Err(desal_core::ModelError::InvalidConfig(report)) => fail(
            DesalStatus::InvalidConfig,
            format!("invalid configuration:\n{report}"),
        ),
        Err(e) => fail(DesalStatus::ParseError, e.to_string()),
    }
}

/// Release a case handle. NULL is a no-op.
///
/// # Safety
/// `case` must be a pointer previously returned by [`desal_case_from_json`]
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn desal_case_free(case: *mut DesalCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

/// Override the water selling price on an existing case; the combined
/// configuration is revalidated.
///
/// # Safety
/// `case` must be a live handle from [`desal_case_from_json`].
#[no_mangle]
pub unsafe extern "C" fn desal_case_set_water_price(
    case: *mut DesalCase,
    pi_water: f64,
) -> DesalStatus {
    let Some(case) = case.as_mut() else {
        return fail(DesalStatus::NullPointer, "case must be non-NULL");
    };
    let tariff = Tariff {
        pi_water,
        ..case.tariff
    };
    if let Err(report) = desal_core::validate_config(&case.plant, &tariff) {
        return fail(
            DesalStatus::InvalidConfig,
            format!("invalid configuration:\n{report}"),
        );
    }
    case.tariff = tariff;
    DesalStatus::Ok
}

/// Compute the policy threshold set for a case.
///
/// # Safety
/// `case` must be a live handle and `out_thresholds` writable.
#[no_mangle]
pub unsafe extern "C" fn desal_thresholds_compute(
    case: *const DesalCase,
    out_thresholds: *mut *mut DesalThresholds,
) -> DesalStatus {
    let Some(case) = case.as_ref() else {
        return fail(DesalStatus::NullPointer, "case must be non-NULL");
    };
    if out_thresholds.is_null() {
        return fail(DesalStatus::NullPointer, "out_thresholds must be non-NULL");
    }
    match compute_thresholds(&case.plant, &case.tariff) {
        Ok(inner) => {
            *out_thresholds = Box::into_raw(Box::new(DesalThresholds { inner }));
            DesalStatus::Ok
        }
        Err(e) => fail(DesalStatus::InvalidConfig, e.to_string()),
    }
}

/// Release a thresholds handle. NULL is a no-op.
///
/// # Safety
/// `thresholds` must be a pointer previously returned by
/// [`desal_thresholds_compute`] and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn desal_thresholds_free(thresholds: *mut DesalThresholds) {
    if !thresholds.is_null() {
        drop(Box::from_raw(thresholds));
    }
}

/// Serialize a threshold set to a JSON string owned by the caller; release
/// it with [`desal_string_free`].
///
/// # Safety
/// `thresholds` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn desal_thresholds_to_json(
    thresholds: *const DesalThresholds,
    out_json: *mut *mut c_char,
) -> DesalStatus {
    let Some(thresholds) = thresholds.as_ref() else {
        return fail(DesalStatus::NullPointer, "thresholds must be non-NULL");
    };
    if out_json.is_null() {
        return fail(DesalStatus::NullPointer, "out_json must be non-NULL");
    }
    match CString::new(thresholds.inner.to_json()) {
        Ok(s) => {
            *out_json = s.into_raw();
            DesalStatus::Ok
        }
        Err(_) => fail(DesalStatus::Internal, "JSON contained a NUL byte"),
    }
}

/// Release a string allocated by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-string parameter
/// of this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn desal_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Dispatch a renewable generation level against precomputed thresholds,
/// filling `out` with the operating point, its profit, and its zone.
///
/// # Safety
/// `case` and `thresholds` must be live handles built from the same
/// configuration; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn desal_optimal_dispatch(
    case: *const DesalCase,
    thresholds: *const DesalThresholds,
    g: f64,
    out: *mut DesalDispatch,
) -> DesalStatus {
    let (Some(case), Some(thresholds)) = (case.as_ref(), thresholds.as_ref()) else {
        return fail(DesalStatus::NullPointer, "case and thresholds must be non-NULL");
    };
    if out.is_null() {
        return fail(DesalStatus::NullPointer, "out must be non-NULL");
    }
    if !g.is_finite() || g < 0.0 {
        return fail(
            DesalStatus::InvalidArgument,
            format!("generation must be finite and nonnegative, got {g}"),
        );
    }
    match optimal_dispatch(g, &thresholds.inner, &case.plant) {
        Ok(point) => {
            *out = DesalDispatch {
                w_h: point.w_h,
                w_r: point.w_r,
                q_h: point.q_h,
                q_r: point.q_r,
                p_h: point.p_h,
                g: point.g,
                z: point.z,
                profit: profit(&point, &case.plant, &case.tariff),
                zone: zone_of(g, &thresholds.inner).into(),
            };
            DesalStatus::Ok
        }
        Err(e) => fail(DesalStatus::Internal, e.to_string()),
    }
}

/// Certify the closed-form policy against both oracle solvers on generation
/// samples `0, g_step, ..., ≤ g_max`. Writes 1 to `out_pass` on PASS, 0 on
/// FAIL. `grid_steps` is the lattice resolution per axis (≥ 2).
///
/// # Safety
/// `case` must be a live handle and `out_pass` writable.
#[no_mangle]
pub unsafe extern "C" fn desal_certify(
    case: *const DesalCase,
    g_max: f64,
    g_step: f64,
    tolerance: f64,
    grid_steps: u32,
    out_pass: *mut i32,
) -> DesalStatus {
    let Some(case) = case.as_ref() else {
        return fail(DesalStatus::NullPointer, "case must be non-NULL");
    };
    if out_pass.is_null() {
        return fail(DesalStatus::NullPointer, "out_pass must be non-NULL");
    }
    if g_step <= 0.0 || g_step.is_nan() || g_max < 0.0 || g_max.is_nan() || grid_steps < 2 {
        return fail(
            DesalStatus::InvalidArgument,
            "need g_step > 0, g_max >= 0, grid_steps >= 2",
        );
    }
    let mut g_samples = Vec::new();
    let mut g = 0.0;
    while g <= g_max {
        g_samples.push(g);
        g += g_step;
    }
    let report = certify_policy(
        &case.plant,
        &case.tariff,
        &g_samples,
        tolerance,
        grid_steps as usize,
    );
    if report.status.starts_with("invalid configuration") {
        return fail(DesalStatus::InvalidConfig, report.status);
    }
    *out_pass = i32::from(report.pass);
    DesalStatus::Ok
}
