use std::ffi::CStr;
use std::ptr;

use conical_harvest_ffi::*;

fn last_error() -> String {
    let p = ch_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(ch_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn faddeeva_matches_library() {
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { ch_faddeeva(1.0, 0.5, &mut re, &mut im) }, ChStatus::Ok);
    let w = conical_harvest::special::faddeeva_w(conical_harvest::special::Complex::new(1.0, 0.5));
    assert_eq!((re, im), (w.re, w.im));
    assert_eq!(unsafe { ch_faddeeva(f64::NAN, 0.0, &mut re, &mut im) }, ChStatus::InvalidParameter);
    assert_eq!(unsafe { ch_faddeeva(1.0, 0.0, ptr::null_mut(), &mut im) }, ChStatus::NullPointer);
    assert!(last_error().contains("out_re"));
}

#[test]
fn responses() {
    assert!((ch_p_flat(0.1) - 0.06626718302937379).abs() < 1e-15);
    assert!(ch_p_flat(-1.0).is_nan());
    let mut p = 0.0;
    assert_eq!(unsafe { ch_p_string(0.0, 2.5, 0.1, &mut p) }, ChStatus::Ok);
    assert!((p / (2.5 * ch_p_flat(0.1)) - 1.0).abs() < 1e-6);
    assert_eq!(unsafe { ch_p_string(1.0, 0.5, 0.1, &mut p) }, ChStatus::InvalidParameter);
    assert!(last_error().starts_with("invalid_parameter"));
}

#[test]
fn pair_lifecycle_and_errors() {
    unsafe {
        let mut pair = ptr::null_mut();
        assert_eq!(ch_pair_new(ChAlignment::Parallel as u32, 3.0, 0.0, 0.5, 0.1, &mut pair), ChStatus::Ok);
        let mut c = ChConcurrence::default();
        assert_eq!(ch_pair_concurrence(pair, &mut c), ChStatus::Ok);
        let flat = conical_harvest::entanglement::concurrence_flat(0.5, 0.1).unwrap();
        assert!((c.concurrence - 3.0 * flat).abs() < 1e-10);
        assert!(ch_last_error().is_null());
        ch_pair_free(pair);

        let mut pair = ptr::null_mut();
        assert_eq!(ch_pair_new(ChAlignment::Opposite as u32, 4.0, 1.0, 2.0, 0.1, &mut pair), ChStatus::Ok);
        assert_eq!(ch_pair_concurrence(pair, &mut c), ChStatus::DivergentOverlap);
        assert!(last_error().starts_with("divergent_overlap"));
        ch_pair_free(pair);

        let mut pair = ptr::null_mut();
        assert_eq!(ch_pair_new(9, 3.0, 1.0, 2.0, 0.1, &mut pair), ChStatus::InvalidParameter);
        assert!(pair.is_null());
        assert_eq!(ch_pair_concurrence(ptr::null(), &mut c), ChStatus::NullPointer);
        ch_pair_free(ptr::null_mut());
    }
}

#[test]
fn pair_d_max() {
    unsafe {
        let mut pair = ptr::null_mut();
        assert_eq!(ch_pair_new(ChAlignment::Flat as u32, 1.0, 0.0, 1.0, 0.1, &mut pair), ChStatus::Ok);
        let (mut d, mut found) = (0.0, 0u8);
        assert_eq!(ch_pair_d_max(pair, 10.0, 512, &mut d, &mut found), ChStatus::Ok);
        assert_eq!(found, 1);
        assert!((d - 1.65758).abs() < 1e-4, "{d}");
        assert_eq!(ch_pair_d_max(pair, -1.0, 512, &mut d, &mut found), ChStatus::InvalidParameter);
        ch_pair_free(pair);
    }
}

#[test]
fn sweep_handle() {
    unsafe {
        let mut sweep = ptr::null_mut();
        let status = ch_sweep_new(
            ChAlignment::Opposite as u32,
            ChAxis::Nu as u32,
            1.0,
            5.0,
            9,
            1.0,
            0.5,
            1.0,
            0.1,
            &mut sweep,
        );
        assert_eq!(status, ChStatus::Ok);
        assert_eq!(ch_sweep_len(sweep), 9);
        let mut row = ChSweepRow::default();
        assert_eq!(ch_sweep_row(sweep, 2, &mut row), ChStatus::Ok);
        assert_eq!((row.param, row.computed, row.diverged), (2.0, 0, 1));
        assert!(row.concurrence.is_nan());
        assert_eq!(ch_sweep_row(sweep, 4, &mut row), ChStatus::Ok);
        assert_eq!((row.computed, row.diverged), (1, 0));
        assert_eq!(ch_sweep_row(sweep, 9, &mut row), ChStatus::OutOfRange);
        let mut buf = [0 as std::ffi::c_char; 8];
        let n = ch_last_error_copy(buf.as_mut_ptr(), buf.len());
        assert!(n > 7);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_bytes().len(), 7);
        ch_sweep_free(sweep);
        assert_eq!(ch_sweep_len(ptr::null()), 0);
    }
}
