//! C interface to the cavity model.
//!
//! Every function returns a [`CavityStatus`]; results are written through
//! out-pointers. On failure a message for the calling thread can be read
//! with [`cavity_last_error_message`]. Handles are opaque and must be
//! released with their `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cavity::analytic;
use cavity::channels::{IdealShift, OpenChannel};
use cavity::model::{initial_state, CavityParams, DensityMatrix, InitialStateSpec};
use cavity::{CavityError, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavityStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    /// The quantity needs `sigma_minus > sigma_plus`.
    StrictDamping = 3,
    /// The truncation guard tripped; raise the cutoff.
    Truncation = 4,
    /// A numerical routine failed (non-finite values, invalid state, ...).
    Numeric = 5,
    /// Output buffer too small.
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavityInitKind {
    Vacuum = 0,
    /// `a` is the inverse temperature.
    Gibbs = 1,
    /// `a` is the modulus and `b` the phase (radians) of `⟨b⟩`.
    Coherent = 2,
}

/// Opaque parameter set.
pub struct CavityParamsHandle {
    inner: CavityParams,
}

enum Channel {
    Ideal(IdealShift),
    Open(OpenChannel),
}

/// Opaque running simulation.
pub struct CavitySimulation {
    channel: Channel,
    state: DensityMatrix,
    steps: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &CavityError) -> CavityStatus {
    match e {
        CavityError::InvalidParameter(_) | CavityError::Dimension(_) => CavityStatus::InvalidParameter,
        CavityError::NeedsStrictDamping(_) => CavityStatus::StrictDamping,
        CavityError::Truncation { .. } => CavityStatus::Truncation,
        _ => CavityStatus::Numeric,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), CavityStatus>) -> CavityStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            CavityStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            CavityStatus::Panic
        }
    }
}

fn fail(e: CavityError) -> CavityStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> CavityStatus {
    set_error(format!("null pointer: {what}"));
    CavityStatus::NullPointer
}

/// # Safety
/// `p` must be null or point to memory valid for a write of `T`.
unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), CavityStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

/// # Safety
/// `h` must be null or a live handle from `cavity_params_new`.
unsafe fn params<'a>(h: *const CavityParamsHandle) -> Result<&'a CavityParams, CavityStatus> {
    h.as_ref().map(|h| &h.inner).ok_or_else(|| null("params"))
}

/// Creates a parameter set (atom energy 1).
///
/// # Safety
/// `out` must be valid for writing one pointer. On success `*out` owns a
/// handle that must be released with [`cavity_params_free`].
#[no_mangle]
pub unsafe extern "C" fn cavity_params_new(
    eps: f64,
    lambda: f64,
    tau: f64,
    p: f64,
    sigma_minus: f64,
    sigma_plus: f64,
    out: *mut *mut CavityParamsHandle,
) -> CavityStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = CavityParams::new(eps, lambda, tau, p, sigma_minus, sigma_plus).map_err(fail)?;
        out.write(Box::into_raw(Box::new(CavityParamsHandle { inner })));
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle from [`cavity_params_new`].
#[no_mangle]
pub unsafe extern "C" fn cavity_params_set_atom_energy(h: *mut CavityParamsHandle, energy: f64) -> CavityStatus {
    guard(|| {
        let h = h.as_mut().ok_or_else(|| null("params"))?;
        h.inner = h.inner.with_atom_energy(energy).map_err(fail)?;
        Ok(())
    })
}

/// Releases a parameter handle; null is ignored.
///
/// # Safety
/// `h` must be null or a handle from [`cavity_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cavity_params_free(h: *mut CavityParamsHandle) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Mean photon number of the ideal cavity after `n` atoms, gauge-invariant start with `n0` photons.
///
/// # Safety
/// `h` must be a live parameter handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cavity_mean_photons_ideal(
    h: *const CavityParamsHandle,
    n0: f64,
    n: u64,
    out: *mut f64,
) -> CavityStatus {
    guard(|| {
        let v = analytic::mean_photons_ideal(params(h)?, n0, n).map_err(fail)?;
        write(out, v, "out")
    })
}

/// Mean photon number of the open cavity at time `t`, gauge-invariant start.
///
/// # Safety
/// `h` must be a live parameter handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cavity_mean_photons_open(
    h: *const CavityParamsHandle,
    n0: f64,
    t: f64,
    out: *mut f64,
) -> CavityStatus {
    guard(|| {
        let v = analytic::mean_photons_open(params(h)?, n0, t).map_err(fail)?;
        write(out, v, "out")
    })
}

/// Long-time open photon number; needs `sigma_minus > sigma_plus`.
///
/// # Safety
/// `h` must be a live parameter handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cavity_mean_photons_open_limit(h: *const CavityParamsHandle, out: *mut f64) -> CavityStatus {
    guard(|| {
        let v = analytic::mean_photons_open_limit(params(h)?).map_err(fail)?;
        write(out, v, "out")
    })
}

/// Lower and upper estimates of the long-time photon number.
///
/// # Safety
/// `h` must be a live parameter handle; `lower` and `upper` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn cavity_limit_bounds(
    h: *const CavityParamsHandle,
    lower: *mut f64,
    upper: *mut f64,
) -> CavityStatus {
    guard(|| {
        let (lo, hi) = analytic::limit_bounds(params(h)?).map_err(fail)?;
        write(lower, lo, "lower")?;
        write(upper, hi, "upper")
    })
}

/// Per-atom energy transfer of the ideal cavity.
///
/// # Safety
/// `h` must be a live parameter handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cavity_energy_step_ideal(h: *const CavityParamsHandle, out: *mut f64) -> CavityStatus {
    guard(|| write(out, analytic::energy_step_ideal(params(h)?), "out"))
}

/// `⟨b⟩` after `n` atoms from a gauge-invariant start (ideal or open).
///
/// # Safety
/// `h` must be a live parameter handle; `re` and `im` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn cavity_first_moment(
    h: *const CavityParamsHandle,
    n: u64,
    re: *mut f64,
    im: *mut f64,
) -> CavityStatus {
    guard(|| {
        let p = params(h)?;
        let b = if p.is_ideal() {
            analytic::first_moment_ideal(p, n)
        } else {
            analytic::first_moment_open(p, n)
        };
        write(re, b.re, "re")?;
        write(im, b.im, "im")
    })
}

/// Long-time Weyl functional at `zeta = zeta_re + i zeta_im` to relative accuracy `tol`.
///
/// # Safety
/// `h` must be a live parameter handle; `re` and `im` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn cavity_weyl_char_limit(
    h: *const CavityParamsHandle,
    zeta_re: f64,
    zeta_im: f64,
    tol: f64,
    re: *mut f64,
    im: *mut f64,
) -> CavityStatus {
    guard(|| {
        let v = analytic::weyl_char_limit(C64::new(zeta_re, zeta_im), params(h)?, tol).map_err(fail)?;
        write(re, v.re, "re")?;
        write(im, v.im, "im")
    })
}

/// Starts a simulation at Fock cutoff `cutoff` from the given initial state.
///
/// # Safety
/// `h` must be a live parameter handle (it is copied, not retained) and
/// `out` valid for writing one pointer. On success `*out` must be released
/// with [`cavity_simulation_free`].
#[no_mangle]
pub unsafe extern "C" fn cavity_simulation_new(
    h: *const CavityParamsHandle,
    kind: CavityInitKind,
    a: f64,
    b: f64,
    cutoff: usize,
    out: *mut *mut CavitySimulation,
) -> CavityStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = params(h)?;
        let spec = match kind {
            CavityInitKind::Vacuum => InitialStateSpec::Vacuum,
            CavityInitKind::Gibbs => InitialStateSpec::Gibbs { beta: a },
            CavityInitKind::Coherent => InitialStateSpec::Coherent { r: a, phi: b },
        };
        let state = initial_state(&spec, p, cutoff).map_err(fail)?;
        let channel = if p.is_ideal() {
            Channel::Ideal(IdealShift::new(p, cutoff).map_err(fail)?)
        } else {
            Channel::Open(OpenChannel::new(p, cutoff).map_err(fail)?)
        };
        out.write(Box::into_raw(Box::new(CavitySimulation {
            channel,
            state,
            steps: 0,
        })));
        Ok(())
    })
}

/// Advances by `n` atoms. On a truncation error the state of the last valid step is kept.
///
/// # Safety
/// `sim` must be a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn cavity_simulation_step(sim: *mut CavitySimulation, n: u64) -> CavityStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| null("simulation"))?;
        for _ in 0..n {
            let next = match &sim.channel {
                Channel::Ideal(c) => c.step(&sim.state),
                Channel::Open(c) => c.step(&sim.state),
            }
            .map_err(fail)?;
            sim.state = next;
            sim.steps += 1;
        }
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live simulation handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cavity_simulation_steps_done(sim: *const CavitySimulation, out: *mut u64) -> CavityStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("simulation"))?;
        write(out, sim.steps, "out")
    })
}

/// # Safety
/// `sim` must be a live simulation handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cavity_simulation_mean_photons(sim: *const CavitySimulation, out: *mut f64) -> CavityStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("simulation"))?;
        write(out, sim.state.mean_photons(), "out")
    })
}

/// # Safety
/// `sim` must be a live simulation handle; `re` and `im` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn cavity_simulation_first_moment(
    sim: *const CavitySimulation,
    re: *mut f64,
    im: *mut f64,
) -> CavityStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("simulation"))?;
        let b = sim.state.first_moment();
        write(re, b.re, "re")?;
        write(im, b.im, "im")
    })
}

/// Probability mass in the top levels of the truncated state.
///
/// # Safety
/// `sim` must be a live simulation handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cavity_simulation_tail_mass(sim: *const CavitySimulation, out: *mut f64) -> CavityStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("simulation"))?;
        write(out, sim.state.tail_mass, "out")
    })
}

/// Copies the photon-number distribution (`cutoff + 1` values) into `buf`.
/// `*written` receives the required length even when the buffer is too small.
///
/// # Safety
/// `sim` must be a live simulation handle, `buf` valid for `len` writes of
/// `f64` (may be null when `len` is 0) and `written` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cavity_simulation_populations(
    sim: *const CavitySimulation,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> CavityStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("simulation"))?;
        let pops = sim.state.populations();
        write(written, pops.len(), "written")?;
        if len < pops.len() {
            set_error(format!("buffer holds {len} values, {} needed", pops.len()));
            return Err(CavityStatus::BufferTooSmall);
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(pops.as_ptr(), buf, pops.len());
        Ok(())
    })
}

/// Releases a simulation; null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from [`cavity_simulation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cavity_simulation_free(sim: *mut CavitySimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to fit, into `buf`. Returns the full message length without the
/// terminator (0 when the last call succeeded).
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn cavity_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        msg.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn cavity_status_string(status: CavityStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CavityStatus::Ok => c"ok",
        CavityStatus::NullPointer => c"null pointer argument",
        CavityStatus::InvalidParameter => c"invalid parameter",
        CavityStatus::StrictDamping => c"requires sigma_minus > sigma_plus",
        CavityStatus::Truncation => c"truncation guard tripped",
        CavityStatus::Numeric => c"numerical failure",
        CavityStatus::BufferTooSmall => c"buffer too small",
        CavityStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
