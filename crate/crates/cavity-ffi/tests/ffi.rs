use std::ffi::CStr;
use std::ptr;

use cavity_ffi::*;

fn params(eps: f64, lambda: f64, tau: f64, p: f64, sm: f64, sp: f64) -> *mut CavityParamsHandle {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { cavity_params_new(eps, lambda, tau, p, sm, sp, &mut h) }, CavityStatus::Ok);
    h
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe { cavity_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn closed_forms_through_the_c_abi() {
    let h = params(1.0, 1.0, std::f64::consts::PI, 0.5, 0.0, 0.0);
    let mut v = 0.0;
    assert_eq!(unsafe { cavity_mean_photons_ideal(h, 0.0, 4, &mut v) }, CavityStatus::Ok);
    assert!((v - 4.0).abs() < 1e-12);
    assert_eq!(unsafe { cavity_energy_step_ideal(h, &mut v) }, CavityStatus::Ok);
    assert!((v - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { cavity_mean_photons_open_limit(h, &mut v) }, CavityStatus::StrictDamping);
    assert!(last_error().contains("requires sigma_minus > sigma_plus"));
    unsafe { cavity_params_free(h) };
}

#[test]
fn invalid_arguments_are_reported() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { cavity_params_new(1.0, 1.0, 1.0, 2.0, 0.0, 0.0, &mut h) }, CavityStatus::InvalidParameter);
    assert!(h.is_null());
    assert!(last_error().contains("p must lie in [0, 1]"));
    assert_eq!(
        unsafe { cavity_params_new(1.0, 1.0, 1.0, 0.5, 0.0, 0.0, ptr::null_mut()) },
        CavityStatus::NullPointer
    );
    let mut v = 0.0;
    assert_eq!(unsafe { cavity_mean_photons_ideal(ptr::null(), 0.0, 1, &mut v) }, CavityStatus::NullPointer);
    let s = unsafe { CStr::from_ptr(cavity_status_string(CavityStatus::Truncation)) };
    assert_eq!(s.to_str().unwrap(), "truncation guard tripped");
    unsafe {
        cavity_params_free(ptr::null_mut());
        cavity_simulation_free(ptr::null_mut());
    }
}

#[test]
fn simulation_matches_the_closed_form() {
    let h = params(0.5, 0.5, 0.5, 0.5, 0.003, 0.0);
    let mut sim = ptr::null_mut();
    assert_eq!(
        unsafe { cavity_simulation_new(h, CavityInitKind::Vacuum, 0.0, 0.0, 48, &mut sim) },
        CavityStatus::Ok
    );
    assert_eq!(unsafe { cavity_simulation_step(sim, 10) }, CavityStatus::Ok);
    let (mut n, mut want, mut steps) = (0.0, 0.0, 0);
    unsafe {
        cavity_simulation_mean_photons(sim, &mut n);
        cavity_mean_photons_open(h, 0.0, 5.0, &mut want);
        cavity_simulation_steps_done(sim, &mut steps);
    }
    assert_eq!(steps, 10);
    assert!((n - want).abs() / want < 1e-8);

    let (mut re, mut im, mut re2, mut im2) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        cavity_simulation_first_moment(sim, &mut re, &mut im);
        cavity_first_moment(h, 10, &mut re2, &mut im2);
    }
    assert!((re - re2).abs() < 1e-8 && (im - im2).abs() < 1e-8);

    let mut written = 0;
    assert_eq!(
        unsafe { cavity_simulation_populations(sim, ptr::null_mut(), 0, &mut written) },
        CavityStatus::BufferTooSmall
    );
    assert_eq!(written, 49);
    let mut pops = vec![0.0; written];
    assert_eq!(
        unsafe { cavity_simulation_populations(sim, pops.as_mut_ptr(), pops.len(), &mut written) },
        CavityStatus::Ok
    );
    assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    unsafe {
        cavity_simulation_free(sim);
        cavity_params_free(h);
    }
}

#[test]
fn truncation_keeps_the_last_valid_state() {
    let h = params(1.0, 2.0, 1.0, 0.5, 0.0, 0.0);
    let mut sim = ptr::null_mut();
    unsafe { cavity_simulation_new(h, CavityInitKind::Coherent, 1.0, 0.0, 20, &mut sim) };
    assert!(!sim.is_null());
    assert_eq!(unsafe { cavity_simulation_step(sim, 20) }, CavityStatus::Truncation);
    let (mut steps, mut tail) = (0, 0.0);
    unsafe {
        cavity_simulation_steps_done(sim, &mut steps);
        cavity_simulation_tail_mass(sim, &mut tail);
    }
    assert!(steps < 20);
    assert!(tail <= 1e-8);
    unsafe {
        cavity_simulation_free(sim);
        cavity_params_free(h);
    }
}

#[test]
fn weyl_limit_is_a_characteristic_value() {
    let h = params(0.5, 0.5, 0.5, 0.5, 0.003, 0.0);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { cavity_weyl_char_limit(h, 0.5, 0.0, 1e-10, &mut re, &mut im) }, CavityStatus::Ok);
    assert!(re.hypot(im) <= 1.0);
    unsafe { cavity_params_free(h) };
}
