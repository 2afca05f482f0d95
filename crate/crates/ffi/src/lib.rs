//! C ABI over `sensorimotor`.
//!
//! An experiment is an opaque `SmExperiment` handle: create it from a preset
//! or a config text, optionally adjust it, run it, then copy results out
//! into caller-owned buffers. Every fallible call returns an `SmStatus`;
//! on failure the message is kept per thread and read back with
//! `sm_last_error_message`.
//!
//! Buffer-copying calls take the buffer length in elements and fail with
//! `SM_STATUS_BUFFER_TOO_SMALL` (writing nothing) when it is short.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use sensorimotor::runner::{self, RunArtifacts};
use sensorimotor::{Error, ExperimentConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    Parse = 4,
    Io = 5,
    Experiment = 6,
    Replay = 7,
    BufferTooSmall = 8,
    NotRun = 9,
    Panic = 10,
}

/// Opaque experiment handle.
pub struct SmExperiment {
    config: ExperimentConfig,
    artifacts: Option<RunArtifacts>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: SmStatus, msg: impl Into<String>) -> SmStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> SmStatus {
    match e {
        Error::InvalidWorld(_) | Error::InvalidSensor(_) => SmStatus::InvalidConfig,
        Error::Parse { .. } => SmStatus::Parse,
        Error::Io { .. } => SmStatus::Io,
        Error::ReplayMismatch { .. } => SmStatus::Replay,
        _ => SmStatus::Experiment,
    }
}

fn from_error(e: Error) -> SmStatus {
    fail(status_of(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> SmStatus) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(SmStatus::Panic, msg)
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, SmStatus> {
    if p.is_null() {
        return Err(fail(SmStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SmStatus::InvalidArgument, "string argument is not UTF-8"))
}

unsafe fn handle<'a>(h: *const SmExperiment) -> Result<&'a SmExperiment, SmStatus> {
    h.as_ref().ok_or_else(|| fail(SmStatus::NullPointer, "experiment handle is null"))
}

unsafe fn handle_mut<'a>(h: *mut SmExperiment) -> Result<&'a mut SmExperiment, SmStatus> {
    h.as_mut().ok_or_else(|| fail(SmStatus::NullPointer, "experiment handle is null"))
}

unsafe fn artifacts<'a>(h: *const SmExperiment) -> Result<&'a RunArtifacts, SmStatus> {
    handle(h)?
        .artifacts
        .as_ref()
        .ok_or_else(|| fail(SmStatus::NotRun, "experiment has not been run"))
}

unsafe fn out_slice<'a, T>(buf: *mut T, len: usize, needed: usize) -> Result<&'a mut [T], SmStatus> {
    if len < needed {
        return Err(fail(
            SmStatus::BufferTooSmall,
            format!("buffer holds {len} elements, {needed} needed"),
        ));
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    if buf.is_null() {
        return Err(fail(SmStatus::NullPointer, "output buffer is null"));
    }
    Ok(std::slice::from_raw_parts_mut(buf, needed))
}

fn into_status(r: Result<(), SmStatus>) -> SmStatus {
    match r {
        Ok(()) => SmStatus::Ok,
        Err(s) => s,
    }
}

unsafe fn publish(out: *mut *mut SmExperiment, config: ExperimentConfig) -> SmStatus {
    if out.is_null() {
        return fail(SmStatus::NullPointer, "output handle pointer is null");
    }
    if let Err(e) = config.validate() {
        return from_error(e);
    }
    *out = Box::into_raw(Box::new(SmExperiment {
        config,
        artifacts: None,
    }));
    SmStatus::Ok
}

/// Static name of a status code, e.g. `"SM_STATUS_PARSE"`.
#[no_mangle]
pub extern "C" fn sm_status_name(status: SmStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SmStatus::Ok => c"SM_STATUS_OK",
        SmStatus::NullPointer => c"SM_STATUS_NULL_POINTER",
        SmStatus::InvalidArgument => c"SM_STATUS_INVALID_ARGUMENT",
        SmStatus::InvalidConfig => c"SM_STATUS_INVALID_CONFIG",
        SmStatus::Parse => c"SM_STATUS_PARSE",
        SmStatus::Io => c"SM_STATUS_IO",
        SmStatus::Experiment => c"SM_STATUS_EXPERIMENT",
        SmStatus::Replay => c"SM_STATUS_REPLAY",
        SmStatus::BufferTooSmall => c"SM_STATUS_BUFFER_TOO_SMALL",
        SmStatus::NotRun => c"SM_STATUS_NOT_RUN",
        SmStatus::Panic => c"SM_STATUS_PANIC",
    };
    s.as_ptr()
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len - 1` bytes). Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// One-object line world preset; `changing_env` redraws the environment
/// with probability 0.05 per scene.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_new_sim1(seed: u64, changing_env: bool, out: *mut *mut SmExperiment) -> SmStatus {
    guard(|| {
        let cfg = if changing_env {
            ExperimentConfig::sim1_changing_env(seed)
        } else {
            ExperimentConfig::sim1(seed)
        };
        publish(out, cfg)
    })
}

/// Three-object square world preset.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_new_sim2(seed: u64, out: *mut *mut SmExperiment) -> SmStatus {
    guard(|| publish(out, ExperimentConfig::sim2(seed)))
}

/// Parses a `key = value` config text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writing
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_from_config(text: *const c_char, out: *mut *mut SmExperiment) -> SmStatus {
    guard(|| {
        let text = match c_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ExperimentConfig::parse(text) {
            Ok(cfg) => publish(out, cfg),
            Err(e) => from_error(e),
        }
    })
}

/// Sets the number of scene changes. Discards earlier results.
///
/// # Safety
/// `exp` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_set_changes(exp: *mut SmExperiment, changes: usize) -> SmStatus {
    guard(|| {
        into_status(handle_mut(exp).map(|h| {
            h.config.n_changes = changes;
            h.artifacts = None;
        }))
    })
}

/// Sets the run directory; null means results stay in memory only.
/// Discards earlier results.
///
/// # Safety
/// `exp` must be a live handle or null; `dir` must be null or a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_set_output_dir(exp: *mut SmExperiment, dir: *const c_char) -> SmStatus {
    guard(|| {
        into_status((|| {
            let h = handle_mut(exp)?;
            h.config.output_dir = if dir.is_null() { None } else { Some(PathBuf::from(c_str(dir)?)) };
            h.artifacts = None;
            Ok(())
        })())
    })
}

/// Runs exploration, clustering and evaluation, writing the run directory
/// when one is set.
///
/// # Safety
/// `exp` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_run(exp: *mut SmExperiment) -> SmStatus {
    guard(|| {
        let h = match handle_mut(exp) {
            Ok(h) => h,
            Err(s) => return s,
        };
        match runner::execute(&h.config) {
            Ok(a) => {
                h.artifacts = Some(a);
                SmStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of catalog states `n`; C is `n x n`.
///
/// # Safety
/// `exp` must be a live handle or null; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_state_count(exp: *const SmExperiment, out: *mut usize) -> SmStatus {
    guard(|| {
        into_status((|| {
            let a = artifacts(exp)?;
            let out = out.as_mut().ok_or_else(|| fail(SmStatus::NullPointer, "out is null"))?;
            *out = a.c.rows();
            Ok(())
        })())
    })
}

/// Copies C row-major into `buf` (`n * n` doubles).
///
/// # Safety
/// `exp` must be a live handle or null; `buf` must be valid for `len`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_copy_probabilities(exp: *const SmExperiment, buf: *mut f64, len: usize) -> SmStatus {
    guard(|| {
        into_status((|| {
            let c = &artifacts(exp)?.c;
            out_slice(buf, len, c.as_slice().len())?.copy_from_slice(c.as_slice());
            Ok(())
        })())
    })
}

/// Copies T row-major as `(row, col)` pairs into `buf` (`2 * n * n`
/// ints). Line worlds report row 0.
///
/// # Safety
/// `exp` must be a live handle or null; `buf` must be valid for `len`
/// ints.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_copy_motor_deltas(exp: *const SmExperiment, buf: *mut i32, len: usize) -> SmStatus {
    guard(|| {
        into_status((|| {
            let t = &artifacts(exp)?.t;
            let n = t.size();
            let dst = out_slice(buf, len, 2 * n * n)?;
            for i in 0..n {
                for j in 0..n {
                    let d = t.get(i, j);
                    dst[2 * (i * n + j)] = d.row;
                    dst[2 * (i * n + j) + 1] = d.col;
                }
            }
            Ok(())
        })())
    })
}

/// Copies one cluster id per state into `buf` (`n` entries); -1 marks
/// states left out of clustering.
///
/// # Safety
/// `exp` must be a live handle or null; `buf` must be valid for `len`
/// entries.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_copy_clusters(exp: *const SmExperiment, buf: *mut i64, len: usize) -> SmStatus {
    guard(|| {
        into_status((|| {
            let labels = &artifacts(exp)?.clustering.assignment.labels;
            let dst = out_slice(buf, len, labels.len())?;
            for (d, l) in dst.iter_mut().zip(labels) {
                *d = l.map_or(-1, |c| c as i64);
            }
            Ok(())
        })())
    })
}

/// Cluster count actually used and the eigengap estimate.
///
/// # Safety
/// `exp` must be a live handle or null; outputs must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_cluster_count(exp: *const SmExperiment, k: *mut usize, eigengap_k: *mut usize) -> SmStatus {
    guard(|| {
        into_status((|| {
            let a = artifacts(exp)?;
            if k.is_null() || eigengap_k.is_null() {
                return Err(fail(SmStatus::NullPointer, "output pointer is null"));
            }
            *k = a.clustering.k;
            *eigengap_k = a.clustering.eigengap_k;
            Ok(())
        })())
    })
}

/// Overall purity over unmixed states; NaN when there are none.
///
/// # Safety
/// `exp` must be a live handle or null; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_purity(exp: *const SmExperiment, out: *mut f64) -> SmStatus {
    guard(|| {
        into_status((|| {
            let a = artifacts(exp)?;
            let out = out.as_mut().ok_or_else(|| fail(SmStatus::NullPointer, "out is null"))?;
            *out = a.purity.overall.unwrap_or(f64::NAN);
            Ok(())
        })())
    })
}

/// # Safety
/// `exp` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_experiment_free(exp: *mut SmExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// Replays `dir/events.log` against `dir/records.txt`; on success writes
/// the number of replayed scenes.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `scenes` must be null or valid
/// for writing.
#[no_mangle]
pub unsafe extern "C" fn sm_replay_dir(dir: *const c_char, scenes: *mut usize) -> SmStatus {
    guard(|| {
        into_status((|| {
            let dir = c_str(dir)?;
            let rep = runner::replay_dir(dir.as_ref()).map_err(from_error)?;
            if let Some(s) = scenes.as_mut() {
                *s = rep.scenes;
            }
            Ok(())
        })())
    })
}
