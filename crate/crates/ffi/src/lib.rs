//! C ABI over the `qmkdv` core.
//!
//! Fields and trajectories cross the boundary as opaque heap handles owned by
//! the caller and released with the matching `*_free`. Every fallible call
//! returns a [`QmkdvStatus`]; on failure `qmkdv_last_error_message` describes
//! the most recent error on the calling thread. Panics are caught and reported
//! as [`QmkdvStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qmkdv::dynamics::{gauge_forward, EquationCoefficients};
use qmkdv::integrator::{evolve, EvolveConfig, Trajectory};
use qmkdv::io::save_trajectory;
use qmkdv::resonance::{resonance_cubic, verify_factorization};
use qmkdv::xsb::{ratio, Variant};
use qmkdv::{Error, FrequencyGrid, SpectralField};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmkdvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    NotReal = 4,
    Overflow = 5,
    OutOfRange = 6,
    SizeCap = 7,
    NonFinite = 8,
    BlowUp = 9,
    Io = 10,
    Panic = 11,
}

/// Opaque spectral field.
pub struct QmkdvField(SpectralField);

/// Opaque trajectory.
pub struct QmkdvTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> QmkdvStatus {
    match e {
        Error::NotReal => QmkdvStatus::NotReal,
        Error::Overflow(_) => QmkdvStatus::Overflow,
        Error::OutOfRange { .. } | Error::SumMismatch { .. } => QmkdvStatus::OutOfRange,
        Error::SizeCap { .. } => QmkdvStatus::SizeCap,
        Error::NonFinite { .. } => QmkdvStatus::NonFinite,
        Error::BlowUp { .. } => QmkdvStatus::BlowUp,
        Error::Io(_) | Error::Format(_) => QmkdvStatus::Io,
        _ => QmkdvStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), QmkdvStatus>) -> QmkdvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmkdvStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            QmkdvStatus::Panic
        }
    }
}

fn fail(e: Error) -> QmkdvStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> QmkdvStatus {
    set_error(format!("null pointer: {what}"));
    QmkdvStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, QmkdvStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, QmkdvStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last error on this thread; valid until the next failing
/// call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn qmkdv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Analyzes `len` real samples on the `2 pi lambda` torus into a new field.
///
/// # Safety
/// `samples` must point to `len` readable doubles and `out` to a writable
/// handle slot.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_field_from_samples(
    samples: *const f64,
    len: usize,
    lambda: f64,
    out: *mut *mut QmkdvField,
) -> QmkdvStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        *out = ptr::null_mut();
        if samples.is_null() {
            return Err(null("samples"));
        }
        let data = std::slice::from_raw_parts(samples, len);
        let grid = FrequencyGrid::new(len, lambda).map_err(fail)?;
        let f = SpectralField::analyze(data, grid).map_err(fail)?;
        *out = Box::into_raw(Box::new(QmkdvField(f)));
        Ok(())
    })
}

/// Releases a field; null is ignored.
///
/// # Safety
/// `field` must be null or a handle from this library not freed before.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_field_free(field: *mut QmkdvField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// `||u||_{H^s}`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_field_sobolev_norm(
    field: *const QmkdvField,
    s: f64,
    out: *mut f64,
) -> QmkdvStatus {
    guard(|| {
        let f = deref(field, "field")?;
        *out_mut(out, "out")? = f.0.sobolev_norm(s);
        Ok(())
    })
}

/// Number of stored coefficients, `M - 1`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_field_num_coeffs(
    field: *const QmkdvField,
    out: *mut usize,
) -> QmkdvStatus {
    guard(|| {
        *out_mut(out, "out")? = deref(field, "field")?.0.coeffs().len();
        Ok(())
    })
}

/// Copies the coefficients, from the most negative frequency up, as
/// interleaved `(re, im)` pairs into `buf` of `len` doubles.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_field_coeffs(
    field: *const QmkdvField,
    buf: *mut f64,
    len: usize,
) -> QmkdvStatus {
    guard(|| {
        let f = deref(field, "field")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let c = f.0.coeffs();
        if len < 2 * c.len() {
            set_error(format!("buffer holds {len} doubles, need {}", 2 * c.len()));
            return Err(QmkdvStatus::BufferTooSmall);
        }
        let dst = std::slice::from_raw_parts_mut(buf, 2 * c.len());
        for (pair, z) in dst.chunks_exact_mut(2).zip(c) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Samples the field on the `factor * M` point grid into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_field_synthesize(
    field: *const QmkdvField,
    factor: usize,
    buf: *mut f64,
    len: usize,
) -> QmkdvStatus {
    guard(|| {
        let f = deref(field, "field")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if factor == 0 {
            set_error("factor must be positive");
            return Err(QmkdvStatus::InvalidArgument);
        }
        let need = factor * f.0.grid().num_modes();
        if len < need {
            set_error(format!("buffer holds {len} doubles, need {need}"));
            return Err(QmkdvStatus::BufferTooSmall);
        }
        let samples = f.0.synthesize(factor).map_err(fail)?;
        std::slice::from_raw_parts_mut(buf, need).copy_from_slice(&samples);
        Ok(())
    })
}

/// `H(n1, n2, n3) = n^5 - n1^5 - n2^5 - n3^5` with `n = n1 + n2 + n3`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_resonance_cubic(
    n1: i64,
    n2: i64,
    n3: i64,
    out: *mut i64,
) -> QmkdvStatus {
    guard(|| {
        let o = out_mut(out, "out")?;
        *o = resonance_cubic(n1, n2, n3).map_err(fail)?;
        Ok(())
    })
}

/// Writes 1 to `out` when the factored form of `H` matches, else 0.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_verify_factorization(
    n1: i64,
    n2: i64,
    n3: i64,
    out: *mut i32,
) -> QmkdvStatus {
    guard(|| {
        let o = out_mut(out, "out")?;
        *o = i32::from(verify_factorization(n1, n2, n3).map_err(fail)?);
        Ok(())
    })
}

/// Evolves `u0` under the physical flow with coefficients `coeffs[0..4]`.
/// On blow-up the partial trajectory is still returned through `out`
/// together with [`QmkdvStatus::BlowUp`].
///
/// # Safety
/// `coeffs` must point to 4 doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_simulate(
    u0: *const QmkdvField,
    coeffs: *const f64,
    dt: f64,
    t_end: f64,
    epsilon: f64,
    record_stride: usize,
    out: *mut *mut QmkdvTrajectory,
) -> QmkdvStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        *out = ptr::null_mut();
        let u0 = deref(u0, "u0")?;
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let a = std::slice::from_raw_parts(coeffs, 4);
        if record_stride == 0 {
            set_error("record_stride must be positive");
            return Err(QmkdvStatus::InvalidArgument);
        }
        let config = EvolveConfig::physical(EquationCoefficients::new(a[0], a[1], a[2], a[3]), dt)
            .with_epsilon(epsilon)
            .with_stride(record_stride);
        match evolve(&u0.0, t_end, &config) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(QmkdvTrajectory(t)));
                Ok(())
            }
            Err(Error::BlowUp {
                time,
                norm,
                threshold,
                partial,
            }) => {
                set_error(format!(
                    "blow-up at t = {time}: H^2 norm {norm:.3e} exceeds {threshold:.3e}"
                ));
                *out = Box::into_raw(Box::new(QmkdvTrajectory(*partial)));
                Err(QmkdvStatus::BlowUp)
            }
            Err(e) => Err(fail(e)),
        }
    })
}

/// Number of snapshots.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_trajectory_len(
    traj: *const QmkdvTrajectory,
    out: *mut usize,
) -> QmkdvStatus {
    guard(|| {
        *out_mut(out, "out")? = deref(traj, "traj")?.0.len();
        Ok(())
    })
}

fn snapshot(t: &Trajectory, index: usize) -> Result<&qmkdv::integrator::Snapshot, QmkdvStatus> {
    t.snapshots().get(index).ok_or_else(|| {
        set_error(format!("snapshot {index} out of range (len {})", t.len()));
        QmkdvStatus::OutOfRange
    })
}

/// Time of snapshot `index`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_trajectory_time(
    traj: *const QmkdvTrajectory,
    index: usize,
    out: *mut f64,
) -> QmkdvStatus {
    guard(|| {
        let t = deref(traj, "traj")?;
        *out_mut(out, "out")? = snapshot(&t.0, index)?.time;
        Ok(())
    })
}

/// Phase integral of snapshot `index`, NaN if unknown.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_trajectory_phase(
    traj: *const QmkdvTrajectory,
    index: usize,
    out: *mut f64,
) -> QmkdvStatus {
    guard(|| {
        let t = deref(traj, "traj")?;
        *out_mut(out, "out")? = snapshot(&t.0, index)?.phase.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Copy of the field of snapshot `index` as a new handle.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_trajectory_field(
    traj: *const QmkdvTrajectory,
    index: usize,
    out: *mut *mut QmkdvField,
) -> QmkdvStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        *out = ptr::null_mut();
        let t = deref(traj, "traj")?;
        let f = snapshot(&t.0, index)?.field.clone();
        *out = Box::into_raw(Box::new(QmkdvField(f)));
        Ok(())
    })
}

/// Writes the trajectory to `path` (binary, or text for `.txt`/`.csv`).
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_trajectory_write(
    traj: *const QmkdvTrajectory,
    path: *const c_char,
) -> QmkdvStatus {
    guard(|| {
        let t = deref(traj, "traj")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let p = CStr::from_ptr(path).to_str().map_err(|_| {
            set_error("path is not UTF-8");
            QmkdvStatus::InvalidArgument
        })?;
        save_trajectory(Path::new(p), &t.0).map_err(fail)
    })
}

/// Releases a trajectory; null is ignored.
///
/// # Safety
/// `traj` must be null or a handle from this library not freed before.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_trajectory_free(traj: *mut QmkdvTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Applies the gauge rotation to every snapshot, returning a new handle.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_gauge_forward(
    traj: *const QmkdvTrajectory,
    out: *mut *mut QmkdvTrajectory,
) -> QmkdvStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        *out = ptr::null_mut();
        let t = deref(traj, "traj")?;
        let g = gauge_forward(&t.0).map_err(fail)?;
        *out = Box::into_raw(Box::new(QmkdvTrajectory(g)));
        Ok(())
    })
}

/// Trilinear counterexample ratio at high frequency `n`; `variant` is 1 or 2.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmkdv_xsb_ratio(
    n: i64,
    s: f64,
    b: f64,
    variant: i32,
    out: *mut f64,
) -> QmkdvStatus {
    guard(|| {
        let o = out_mut(out, "out")?;
        let v = match variant {
            1 => Variant::Primary,
            2 => Variant::Dual,
            other => {
                set_error(format!("unknown variant {other}"));
                return Err(QmkdvStatus::InvalidArgument);
            }
        };
        *o = ratio(n, s, b, v).map_err(fail)?;
        Ok(())
    })
}
