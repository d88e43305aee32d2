//! C ABI for `macvlc`.
//!
//! Channels are opaque handles owned by the caller and released with
//! `macvlc_channel_free`. Every call returns a `MacvlcStatus`; on failure
//! `macvlc_last_error_message` describes the most recent error on the
//! calling thread. Strings handed out by the library must be released with
//! `macvlc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use macvlc::decoders::DecoderConfig;
use macvlc::infomeasures::{channel_summary, chernoff_root, info_triple, InfoError, ProductInput, WalkKind};
use macvlc::regions::{
    block_capacity_region, feedback_outer_region, outer_region, rectangle_region, InputGrid, RegionError, RegionQuery,
};
use macvlc::schemes::SchemeSpec;
use macvlc::sim::{run_experiment, summary_json, ExperimentConfig};
use macvlc::{Builtin, McChannel};
use serde::Deserialize;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacvlcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    Channel = 5,
    Computation = 6,
    Simulation = 7,
    Panic = 8,
}

/// Opaque channel handle.
pub struct MacvlcChannel {
    inner: McChannel,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MacvlcCapacities {
    pub c1_nats: f64,
    pub c2_nats: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MacvlcInfoTriple {
    /// I(X1;Y|X2), nats
    pub i1: f64,
    /// I(X2;Y|X1), nats
    pub i2: f64,
    /// I(X1,X2;Y), nats
    pub i12: f64,
}

/// Wrong-hypothesis walk kinds with a Chernoff root.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacvlcWalkKind {
    JointBothWrong = 0,
    JointW1Wrong = 1,
    JointW2Wrong = 2,
    CondWrongGivenX2 = 3,
    CondWrongGivenX1 = 4,
    SingleWrongUser1 = 5,
    SingleWrongUser2 = 6,
}

impl From<MacvlcWalkKind> for WalkKind {
    fn from(k: MacvlcWalkKind) -> Self {
        match k {
            MacvlcWalkKind::JointBothWrong => WalkKind::JointBothWrong,
            MacvlcWalkKind::JointW1Wrong => WalkKind::JointW1Wrong,
            MacvlcWalkKind::JointW2Wrong => WalkKind::JointW2Wrong,
            MacvlcWalkKind::CondWrongGivenX2 => WalkKind::CondWrongGivenX2,
            MacvlcWalkKind::CondWrongGivenX1 => WalkKind::CondWrongGivenX1,
            MacvlcWalkKind::SingleWrongUser1 => WalkKind::SingleWrongUser1,
            MacvlcWalkKind::SingleWrongUser2 => WalkKind::SingleWrongUser2,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacvlcRegionKind {
    Rmac = 0,
    Outer = 1,
    Feedback = 2,
    Rect = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Failure(MacvlcStatus, String);

impl Failure {
    fn new(status: MacvlcStatus, e: impl std::fmt::Display) -> Self {
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MacvlcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MacvlcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MacvlcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(MacvlcStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(MacvlcStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn channel_arg<'a>(ch: *const MacvlcChannel) -> Result<&'a McChannel, Failure> {
    ch.as_ref()
        .map(|c| &c.inner)
        .ok_or_else(|| Failure::new(MacvlcStatus::NullPointer, "channel is null"))
}

fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| Failure::new(MacvlcStatus::NullPointer, format!("{name} is null")))
}

fn put_handle(out: *mut *mut MacvlcChannel, inner: McChannel) -> Result<(), Failure> {
    *out_arg(out, "out")? = Box::into_raw(Box::new(MacvlcChannel { inner }));
    Ok(())
}

fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure::new(MacvlcStatus::Computation, e))?;
    *out_arg(out, "out")? = c.into_raw();
    Ok(())
}

unsafe fn pmf_arg(p: *const f64, n: usize) -> Option<Vec<f64>> {
    (!p.is_null()).then(|| std::slice::from_raw_parts(p, n).to_vec())
}

/// Null pmfs mean uniform.
unsafe fn input_arg(
    ch: &McChannel,
    p1: *const f64,
    n1: usize,
    p2: *const f64,
    n2: usize,
) -> Result<ProductInput, Failure> {
    let uni = ProductInput::uniform(ch);
    let p1 = pmf_arg(p1, n1).unwrap_or(uni.p1);
    let p2 = pmf_arg(p2, n2).unwrap_or(uni.p2);
    let input = ProductInput::new(&p1, &p2).map_err(|e| Failure::new(MacvlcStatus::InvalidArgument, e))?;
    input
        .check_against(ch)
        .map_err(|e| Failure::new(MacvlcStatus::InvalidArgument, e))?;
    Ok(input)
}

fn info_failure(e: InfoError) -> Failure {
    let status = match e {
        InfoError::BadPmf(_) | InfoError::SizeMismatch { .. } => MacvlcStatus::InvalidArgument,
        _ => MacvlcStatus::Computation,
    };
    Failure::new(status, e)
}

fn region_failure(e: RegionError) -> Failure {
    let status = match e {
        RegionError::InvalidQuery(_)
        | RegionError::DegenerateQuery { .. }
        | RegionError::InvalidGrid(_)
        | RegionError::GridTooLarge { .. } => MacvlcStatus::InvalidArgument,
        _ => MacvlcStatus::Computation,
    };
    Failure::new(status, e)
}

/// Loads a channel from its JSON description.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macvlc_channel_from_json(json: *const c_char, out: *mut *mut MacvlcChannel) -> MacvlcStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let ch = McChannel::from_json(text).map_err(|e| Failure::new(MacvlcStatus::Parse, e))?;
        put_handle(out, ch)
    })
}

/// Built-in channel by name, e.g. `"adder"` or `"noisy_adder(0.1)"`.
///
/// # Safety
/// `name` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macvlc_channel_builtin(name: *const c_char, out: *mut *mut MacvlcChannel) -> MacvlcStatus {
    guard(|| {
        let b: Builtin = str_arg(name, "name")?
            .parse()
            .map_err(|e| Failure::new(MacvlcStatus::InvalidArgument, e))?;
        let ch = McChannel::builtin(b).map_err(|e| Failure::new(MacvlcStatus::Channel, e))?;
        put_handle(out, ch)
    })
}

/// Releases a channel; null is ignored.
///
/// # Safety
/// `ch` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn macvlc_channel_free(ch: *mut MacvlcChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// # Safety
/// `ch` must be a live handle; the outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn macvlc_channel_dims(
    ch: *const MacvlcChannel,
    x1_size: *mut usize,
    x2_size: *mut usize,
    y_size: *mut usize,
) -> MacvlcStatus {
    guard(|| {
        let ch = channel_arg(ch)?;
        *out_arg(x1_size, "x1_size")? = ch.x1_size();
        *out_arg(x2_size, "x2_size")? = ch.x2_size();
        *out_arg(y_size, "y_size")? = ch.y_size();
        Ok(())
    })
}

/// Single-user capacities `C1`, `C2` in nats per use.
///
/// # Safety
/// `ch` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macvlc_channel_capacities(
    ch: *const MacvlcChannel,
    out: *mut MacvlcCapacities,
) -> MacvlcStatus {
    guard(|| {
        let s = channel_summary(channel_arg(ch)?).map_err(info_failure)?;
        *out_arg(out, "out")? = MacvlcCapacities {
            c1_nats: s.c1,
            c2_nats: s.c2,
        };
        Ok(())
    })
}

/// Information triple at the product input `(p1, p2)`; a null pmf means uniform.
///
/// # Safety
/// `ch` must be a live handle; non-null pmfs must point to `n1`/`n2`
/// doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macvlc_info_triple(
    ch: *const MacvlcChannel,
    p1: *const f64,
    n1: usize,
    p2: *const f64,
    n2: usize,
    out: *mut MacvlcInfoTriple,
) -> MacvlcStatus {
    guard(|| {
        let ch = channel_arg(ch)?;
        let input = input_arg(ch, p1, n1, p2, n2)?;
        let t = info_triple(ch, &input).map_err(info_failure)?;
        *out_arg(out, "out")? = MacvlcInfoTriple {
            i1: t.i1,
            i2: t.i2,
            i12: t.i12,
        };
        Ok(())
    })
}

/// Positive root of the log-MGF of a wrong-hypothesis increment.
///
/// # Safety
/// As for `macvlc_info_triple`.
#[no_mangle]
pub unsafe extern "C" fn macvlc_chernoff_root(
    ch: *const MacvlcChannel,
    p1: *const f64,
    n1: usize,
    p2: *const f64,
    n2: usize,
    kind: MacvlcWalkKind,
    out: *mut f64,
) -> MacvlcStatus {
    guard(|| {
        let ch = channel_arg(ch)?;
        let input = input_arg(ch, p1, n1, p2, n2)?;
        *out_arg(out, "out")? = chernoff_root(ch, &input, kind.into()).map_err(info_failure)?;
        Ok(())
    })
}

/// Region vertices as CSV in bits. `r1`, `r2`, `s` are read for the outer
/// and feedback kinds only; `grid` 0 picks the default.
///
/// # Safety
/// `ch` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macvlc_region_csv(
    ch: *const MacvlcChannel,
    kind: MacvlcRegionKind,
    r1: f64,
    r2: f64,
    s: f64,
    grid: usize,
    out: *mut *mut c_char,
) -> MacvlcStatus {
    guard(|| {
        let ch = channel_arg(ch)?;
        let grid = if grid == 0 && kind == MacvlcRegionKind::Feedback {
            InputGrid::default_joint_for(ch)
        } else if grid == 0 {
            InputGrid::default_for(ch)
        } else {
            InputGrid::new(grid).map_err(region_failure)?
        };
        let query = || RegionQuery::new(r1, r2, s).map_err(region_failure);
        let region = match kind {
            MacvlcRegionKind::Rmac => block_capacity_region(ch, grid),
            MacvlcRegionKind::Outer => outer_region(ch, query()?, grid),
            MacvlcRegionKind::Feedback => feedback_outer_region(ch, query()?, grid),
            MacvlcRegionKind::Rect => channel_summary(ch).map(|s| rectangle_region(&s)).map_err(Into::into),
        }
        .map_err(region_failure)?;
        put_string(out, region.to_csv())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimRequest {
    scheme: SchemeSpec,
    decoder: DecoderConfig,
    trials: u64,
    master_seed: u64,
    #[serde(default = "one")]
    workers: usize,
}

fn one() -> usize {
    1
}

/// Runs an experiment and returns the summary JSON.
///
/// `config_json` holds `scheme`, `decoder`, `trials`, `master_seed` and an
/// optional `workers` (default 1).
///
/// # Safety
/// `ch` must be a live handle, `config_json` a valid C string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn macvlc_simulate_json(
    ch: *const MacvlcChannel,
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> MacvlcStatus {
    guard(|| {
        let ch = channel_arg(ch)?;
        let req: SimRequest = serde_json::from_str(str_arg(config_json, "config_json")?)
            .map_err(|e| Failure::new(MacvlcStatus::Parse, e))?;
        let cfg = ExperimentConfig {
            channel: ch.clone(),
            scheme: req.scheme,
            decoder: req.decoder,
            trials: req.trials,
            master_seed: req.master_seed,
            workers: req.workers,
        };
        cfg.validate()
            .map_err(|e| Failure::new(MacvlcStatus::InvalidArgument, e))?;
        let summary = run_experiment(&cfg).map_err(|e| Failure::new(MacvlcStatus::Simulation, e))?;
        put_string(out, summary_json(&cfg, &summary))
    })
}

/// Message of the last failed call on this thread (empty after a success).
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn macvlc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn macvlc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Null-terminated version string.
#[no_mangle]
pub extern "C" fn macvlc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_arguments_are_reported() {
        let mut out = ptr::null_mut();
        let st = unsafe { macvlc_channel_builtin(ptr::null(), &mut out) };
        assert_eq!(st, MacvlcStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(macvlc_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "name is null");
        assert!(out.is_null());
    }
}
