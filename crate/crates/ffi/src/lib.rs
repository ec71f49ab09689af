//! C interface to the microtorsion library.
//!
//! Every function returns an [`MtStatus`]; results go through out
//! pointers. Models and linear systems are opaque handles created by
//! `*_new` and released by the matching `*_free`. After a failure,
//! [`mt_last_error_message`] returns a description (per thread).
//!
//! Field vectors hold 39 doubles in the order M (or v), A, P, B, D, each
//! 3×3 block row-major with the frame index first.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use microtorsion::dispersion::{cutoffs, dispersion_at_k};
use microtorsion::equilibrium::{hessian_check, BaselineMode};
use microtorsion::linearize::LinearSystem;
use microtorsion::model::{ForceMode, Model, PointState, NFIELDS};
use microtorsion::tensor::write_row_major;
use microtorsion::{Error, MaterialParams, Relaxation};

/// Number of doubles in a field vector.
pub const MT_NFIELDS: usize = 39;
const _: () = assert!(MT_NFIELDS == NFIELDS);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    Config = 3,
    Domain = 4,
    EigenNoConvergence = 5,
    SolverAbort = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtBaseline {
    Raw = 0,
    StressFree = 1,
}

/// Material constants. `alpha` or `beta` set to +infinity removes the
/// corresponding relaxation terms.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtParams {
    pub rho0: f64,
    pub c0_macro: f64,
    pub cs_macro: f64,
    pub c0_micro: f64,
    pub cs_micro: f64,
    pub gamma_macro: f64,
    pub gamma_micro: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub ell: f64,
}

/// Closed-form frequencies (rad/s) and speeds (m/s). NaN marks a
/// quantity that does not exist for the parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtCutoffs {
    pub omega_inf: f64,
    pub omega0: f64,
    pub omega_s: f64,
    pub omega_l: f64,
    pub v_l: f64,
    pub v_s: f64,
    pub c_l: f64,
    pub c_s: f64,
    pub c_inf: f64,
    pub beta_crit: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtHessianSummary {
    pub min_eigenvalue: f64,
    pub trivial_zeros: u32,
    pub positive_definite: bool,
    pub closed_form_satisfied: bool,
}

/// Opaque model handle.
pub struct MtModel(Model);

/// Opaque handle to the linear system about the state at rest.
pub struct MtLinearSystem(LinearSystem);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> MtStatus {
    match e {
        Error::InvalidParams { .. } => MtStatus::InvalidParams,
        Error::Config(_) => MtStatus::Config,
        Error::Domain(_) => MtStatus::Domain,
        Error::EigenNoConvergence { .. } => MtStatus::EigenNoConvergence,
        Error::SolverAbort { .. } => MtStatus::SolverAbort,
        Error::Io(_) => MtStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MtStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            MtStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            MtStatus::Panic
        }
    }
}

fn nonnull<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: caller promises `p` is null or valid for reads.
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

fn nonnull_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    // SAFETY: caller promises `p` is null or valid for writes.
    unsafe { p.as_mut() }.ok_or(Fail::Null(what))
}

fn fields_in<'a>(p: *const f64) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(Fail::Null("fields"));
    }
    // SAFETY: caller provides MT_NFIELDS readable doubles.
    Ok(unsafe { std::slice::from_raw_parts(p, NFIELDS) })
}

fn fields_out<'a>(p: *mut f64, what: &'static str) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    // SAFETY: caller provides MT_NFIELDS writable doubles.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, NFIELDS) })
}

fn relaxation(x: f64) -> Relaxation {
    if x == f64::INFINITY {
        Relaxation::Infinite
    } else {
        Relaxation::Finite(x)
    }
}

fn unrelax(r: Relaxation) -> f64 {
    r.finite().unwrap_or(f64::INFINITY)
}

impl From<&MtParams> for MaterialParams {
    fn from(p: &MtParams) -> Self {
        MaterialParams {
            rho0: p.rho0,
            c0_macro: p.c0_macro,
            cs_macro: p.cs_macro,
            c0_micro: p.c0_micro,
            cs_micro: p.cs_micro,
            gamma_macro: p.gamma_macro,
            gamma_micro: p.gamma_micro,
            epsilon: p.epsilon,
            mu: p.mu,
            alpha: relaxation(p.alpha),
            beta: relaxation(p.beta),
            ell: p.ell,
        }
    }
}

impl From<&MaterialParams> for MtParams {
    fn from(p: &MaterialParams) -> Self {
        MtParams {
            rho0: p.rho0,
            c0_macro: p.c0_macro,
            cs_macro: p.cs_macro,
            c0_micro: p.c0_micro,
            cs_micro: p.cs_micro,
            gamma_macro: p.gamma_macro,
            gamma_micro: p.gamma_micro,
            epsilon: p.epsilon,
            mu: p.mu,
            alpha: unrelax(p.alpha),
            beta: unrelax(p.beta),
            ell: p.ell,
        }
    }
}

/// `mode` is an [`MtBaseline`] value.
fn baseline(mode: u32) -> Result<BaselineMode, Fail> {
    match mode {
        m if m == MtBaseline::Raw as u32 => Ok(BaselineMode::Raw),
        m if m == MtBaseline::StressFree as u32 => Ok(BaselineMode::StressFree),
        m => Err(Fail::Lib(Error::Config(format!("unknown baseline mode {m}")))),
    }
}

fn checked_params(p: *const MtParams) -> Result<MaterialParams, Fail> {
    let params = MaterialParams::from(nonnull(p, "params")?);
    params.validate()?;
    Ok(params)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mt_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => c"unknown",
    };
    V.as_ptr()
}

/// Copies the last error of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mt_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: buf holds at least len bytes.
            unsafe {
                std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Writes the reference parameter set.
///
/// # Safety
/// `out` must be null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mt_params_reference(out: *mut MtParams) -> MtStatus {
    guard(|| {
        *nonnull_mut(out, "out")? = MtParams::from(&MaterialParams::reference());
        Ok(())
    })
}

/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mt_cutoffs(params: *const MtParams, out: *mut MtCutoffs) -> MtStatus {
    guard(|| {
        let p = checked_params(params)?;
        let c = cutoffs(&p);
        let o = |x: Option<f64>| x.unwrap_or(f64::NAN);
        *nonnull_mut(out, "out")? = MtCutoffs {
            omega_inf: o(c.omega_inf),
            omega0: o(c.omega0),
            omega_s: o(c.omega_s),
            omega_l: o(c.omega_l),
            v_l: o(c.v_l),
            v_s: o(c.v_s),
            c_l: c.c_l,
            c_s: c.c_s,
            c_inf: c.c_inf,
            beta_crit: o(c.beta_crit),
        };
        Ok(())
    })
}

/// Creates a model; `mode` is an [`MtBaseline`] value. Release it with
/// [`mt_model_free`].
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mt_model_new(
    params: *const MtParams,
    mode: u32,
    out: *mut *mut MtModel,
) -> MtStatus {
    guard(|| {
        let slot = nonnull_mut(out, "out")?;
        *slot = std::ptr::null_mut();
        let p = checked_params(params)?;
        let m = Model::new(p, baseline(mode)?)?;
        *slot = Box::into_raw(Box::new(MtModel(m)));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from [`mt_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mt_model_free(model: *mut MtModel) {
    if !model.is_null() {
        // SAFETY: created by Box::into_raw in mt_model_new.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Energy density of the conservative state `fields`.
///
/// # Safety
/// `model` must be a live handle, `fields` must hold MT_NFIELDS doubles,
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mt_model_energy(
    model: *const MtModel,
    fields: *const f64,
    out: *mut f64,
) -> MtStatus {
    guard(|| {
        let m = &nonnull(model, "model")?.0;
        let s = PointState::from_fields(fields_in(fields)?);
        *nonnull_mut(out, "out")? = m.potential(&s)?;
        Ok(())
    })
}

/// Energy derivatives (v, Π, π, H, E) in field-vector order.
///
/// # Safety
/// As for [`mt_model_energy`]; `out` must hold MT_NFIELDS doubles.
#[no_mangle]
pub unsafe extern "C" fn mt_model_forces(
    model: *const MtModel,
    fields: *const f64,
    out: *mut f64,
) -> MtStatus {
    guard(|| {
        let m = &nonnull(model, "model")?.0;
        let s = PointState::from_fields(fields_in(fields)?);
        let f = m.thermo_forces(&s, ForceMode::ClosedForm)?;
        let g = fields_out(out, "out")?;
        g[..3].copy_from_slice(f.velocity.as_slice());
        write_row_major(&f.macro_stress, &mut g[3..12]);
        write_row_major(&f.micro_stress, &mut g[12..21]);
        write_row_major(&f.torsion_h, &mut g[21..30]);
        write_row_major(&f.torsion_e, &mut g[30..39]);
        Ok(())
    })
}

/// Relaxation source terms in field-vector order.
///
/// # Safety
/// As for [`mt_model_forces`].
#[no_mangle]
pub unsafe extern "C" fn mt_model_sources(
    model: *const MtModel,
    fields: *const f64,
    out: *mut f64,
) -> MtStatus {
    guard(|| {
        let m = &nonnull(model, "model")?.0;
        let s = PointState::from_fields(fields_in(fields)?);
        fields_out(out, "out")?.copy_from_slice(&m.sources(&s)?);
        Ok(())
    })
}

/// Linearizes about the state at rest; `mode` is an [`MtBaseline`]
/// value. Release with [`mt_linear_system_free`].
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mt_linear_system_new(
    params: *const MtParams,
    mode: u32,
    out: *mut *mut MtLinearSystem,
) -> MtStatus {
    guard(|| {
        let slot = nonnull_mut(out, "out")?;
        *slot = std::ptr::null_mut();
        let p = checked_params(params)?;
        let sys = LinearSystem::new(&p, baseline(mode)?)?;
        *slot = Box::into_raw(Box::new(MtLinearSystem(sys)));
        Ok(())
    })
}

/// # Safety
/// `sys` must be null or a handle from [`mt_linear_system_new`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn mt_linear_system_free(sys: *mut MtLinearSystem) {
    if !sys.is_null() {
        // SAFETY: created by Box::into_raw in mt_linear_system_new.
        drop(unsafe { Box::from_raw(sys) });
    }
}

/// The 39 phase velocities λ = ω/k at wave number `k` (1/m), sorted by
/// real part; real and imaginary parts go to separate arrays.
///
/// # Safety
/// `sys` must be a live handle; `re` and `im` must hold MT_NFIELDS
/// doubles each.
#[no_mangle]
pub unsafe extern "C" fn mt_dispersion_at_k(
    sys: *const MtLinearSystem,
    k: f64,
    re: *mut f64,
    im: *mut f64,
) -> MtStatus {
    guard(|| {
        let s = &nonnull(sys, "sys")?.0;
        let r = dispersion_at_k(s, k)?;
        let re = fields_out(re, "re")?;
        let im = fields_out(im, "im")?;
        for (j, z) in r.lambdas.iter().enumerate().take(NFIELDS) {
            re[j] = z.re;
            im[j] = z.im;
        }
        Ok(())
    })
}

/// Convexity of the energy at rest, numerically and in closed form;
/// `mode` is an [`MtBaseline`] value.
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mt_hessian_check(
    params: *const MtParams,
    mode: u32,
    out: *mut MtHessianSummary,
) -> MtStatus {
    guard(|| {
        let p = checked_params(params)?;
        let r = hessian_check(&p, baseline(mode)?)?;
        *nonnull_mut(out, "out")? = MtHessianSummary {
            min_eigenvalue: r.min_eigenvalue,
            trivial_zeros: r.trivial_zeros as u32,
            positive_definite: r.positive_definite,
            closed_form_satisfied: r.closed_form_satisfied,
        };
        Ok(())
    })
}
