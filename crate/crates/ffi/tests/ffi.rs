use std::ffi::{c_char, CStr};
use std::ptr;

use microtorsion_ffi::*;

fn reference() -> MtParams {
    let mut p = std::mem::MaybeUninit::<MtParams>::uninit();
    assert_eq!(unsafe { mt_params_reference(p.as_mut_ptr()) }, MtStatus::Ok);
    unsafe { p.assume_init() }
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe { mt_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn rest_fields() -> [f64; MT_NFIELDS] {
    let mut q = [0.0; MT_NFIELDS];
    for blk in [3, 12] {
        for d in 0..3 {
            q[blk + 4 * d] = 1.0;
        }
    }
    q
}

#[test]
fn cutoffs_of_reference_set() {
    let p = reference();
    let mut c = std::mem::MaybeUninit::<MtCutoffs>::uninit();
    assert_eq!(unsafe { mt_cutoffs(&p, c.as_mut_ptr()) }, MtStatus::Ok);
    let c = unsafe { c.assume_init() };
    // With α = β: ω0² = ρ0 (c0² + C0²) / (2 α² ε).
    let (r, eps, a) = (p.rho0, p.epsilon, p.alpha);
    let omega0 = (r * (p.c0_micro.powi(2) + p.c0_macro.powi(2)) / (2.0 * a * a * eps)).sqrt();
    assert!((c.omega0 - omega0).abs() < 1e-9 * omega0, "{} {}", c.omega0, omega0);
    assert!((c.c_inf - 316.227_766_016_837_9).abs() < 1e-9);
    assert!(c.omega_inf > 0.0 && c.omega_inf < c.omega0);
}

#[test]
fn infinite_relaxation_reports_nan() {
    let mut p = reference();
    p.alpha = f64::INFINITY;
    p.beta = f64::INFINITY;
    let mut c = std::mem::MaybeUninit::<MtCutoffs>::uninit();
    assert_eq!(unsafe { mt_cutoffs(&p, c.as_mut_ptr()) }, MtStatus::Ok);
    let c = unsafe { c.assume_init() };
    assert!(c.omega0.is_nan() && c.beta_crit.is_nan());
    assert!((c.c_l - 916.515_138_991_168).abs() < 1e-9);
}

#[test]
fn model_round_trip() {
    let p = reference();
    let mut m: *mut MtModel = ptr::null_mut();
    assert_eq!(unsafe { mt_model_new(&p, MtBaseline::StressFree as u32, &mut m) }, MtStatus::Ok);
    assert!(!m.is_null());
    let q = rest_fields();
    let mut e = f64::NAN;
    assert_eq!(unsafe { mt_model_energy(m, q.as_ptr(), &mut e) }, MtStatus::Ok);
    assert!(e.abs() < 1e-6, "{e}");
    let mut f = [f64::NAN; MT_NFIELDS];
    assert_eq!(unsafe { mt_model_forces(m, q.as_ptr(), f.as_mut_ptr()) }, MtStatus::Ok);
    assert!(f.iter().all(|x| x.abs() < 1e-6), "{f:?}");
    let mut s = [f64::NAN; MT_NFIELDS];
    assert_eq!(unsafe { mt_model_sources(m, q.as_ptr(), s.as_mut_ptr()) }, MtStatus::Ok);
    assert!(s.iter().all(|x| x.is_finite()));
    unsafe { mt_model_free(m) };
    unsafe { mt_model_free(ptr::null_mut()) };
}

#[test]
fn inadmissible_state_is_a_domain_error() {
    let p = reference();
    let mut m: *mut MtModel = ptr::null_mut();
    assert_eq!(unsafe { mt_model_new(&p, MtBaseline::Raw as u32, &mut m) }, MtStatus::Ok);
    let mut q = rest_fields();
    q[3] = -1.0;
    let mut e = 0.0;
    assert_eq!(unsafe { mt_model_energy(m, q.as_ptr(), &mut e) }, MtStatus::Domain);
    assert!(last_error().contains("det(A)"), "{}", last_error());
    unsafe { mt_model_free(m) };
}

#[test]
fn bad_inputs_map_to_codes() {
    let mut p = reference();
    let mut m: *mut MtModel = ptr::null_mut();
    assert_eq!(unsafe { mt_model_new(ptr::null(), 0, &mut m) }, MtStatus::NullPointer);
    assert!(m.is_null());
    assert_eq!(unsafe { mt_model_new(&p, 7, &mut m) }, MtStatus::Config);
    p.rho0 = -1.0;
    assert_eq!(unsafe { mt_model_new(&p, 0, &mut m) }, MtStatus::InvalidParams);
    assert!(last_error().contains("rho0"));
    assert!(m.is_null());
    let mut c = std::mem::MaybeUninit::<MtCutoffs>::uninit();
    assert_eq!(unsafe { mt_cutoffs(&reference(), ptr::null_mut()) }, MtStatus::NullPointer);
    let _ = &mut c;
}

#[test]
fn dispersion_has_fifteen_zeros_and_symmetry() {
    let p = reference();
    let mut sys: *mut MtLinearSystem = ptr::null_mut();
    assert_eq!(unsafe { mt_linear_system_new(&p, 0, &mut sys) }, MtStatus::Ok);
    let (mut re, mut im) = ([0.0; MT_NFIELDS], [0.0; MT_NFIELDS]);
    assert_eq!(unsafe { mt_dispersion_at_k(sys, 10.0, re.as_mut_ptr(), im.as_mut_ptr()) }, MtStatus::Ok);
    let big = re.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    assert_eq!(re.iter().filter(|x| x.abs() < 1e-7 * big).count(), 15);
    for j in 0..MT_NFIELDS {
        assert!((re[j] + re[MT_NFIELDS - 1 - j]).abs() < 1e-6 * big);
        assert!(im[j].abs() < 1e-6 * big);
    }
    assert_eq!(unsafe { mt_dispersion_at_k(sys, -1.0, re.as_mut_ptr(), im.as_mut_ptr()) }, MtStatus::Domain);
    unsafe { mt_linear_system_free(sys) };
}

#[test]
fn hessian_summary() {
    let mut p = reference();
    let mut h = std::mem::MaybeUninit::<MtHessianSummary>::uninit();
    assert_eq!(unsafe { mt_hessian_check(&p, 0, h.as_mut_ptr()) }, MtStatus::Ok);
    let h1 = unsafe { h.assume_init() };
    assert!(h1.positive_definite && h1.closed_form_satisfied);
    p.cs_macro = 150.0;
    assert_eq!(unsafe { mt_hessian_check(&p, 0, h.as_mut_ptr()) }, MtStatus::Ok);
    let h2 = unsafe { h.assume_init() };
    assert!(!h2.positive_definite && !h2.closed_form_satisfied);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(mt_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
