use std::ffi::{c_char, CString};
use std::ptr;

use hutchinf_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { hutchinf_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n >= 1);
    let bytes: Vec<u8> = buf.iter().take_while(|c| **c != 0).map(|c| *c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn builtin(name: &str) -> (HutchinfStatus, *mut HutchinfSystem) {
    let name = CString::new(name).unwrap();
    let mut sys = ptr::null_mut();
    let st = unsafe { hutchinf_system_builtin(name.as_ptr(), &mut sys) };
    (st, sys)
}

#[test]
fn version_matches_header() {
    assert_eq!(hutchinf_abi_version(), HUTCHINF_ABI_VERSION);
    let header = include_str!("../include/hutchinf.h");
    assert!(header.contains(&format!("#define HUTCHINF_ABI_VERSION {HUTCHINF_ABI_VERSION}")));
    for f in [
        "hutchinf_system_builtin",
        "hutchinf_system_from_json",
        "hutchinf_system_free",
        "hutchinf_system_lipschitz",
        "hutchinf_attractor_compute",
        "hutchinf_attractor_points",
        "hutchinf_attractor_free",
        "hutchinf_hausdorff",
        "hutchinf_last_error",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
}

#[test]
fn planar_attractor_round_trip() {
    let (st, sys) = builtin("planar");
    assert_eq!(st, HutchinfStatus::Ok);
    unsafe {
        assert_eq!(hutchinf_system_dim(sys), 2);
        let mut l = 0.0;
        assert_eq!(hutchinf_system_lipschitz(sys, &mut l), HutchinfStatus::Ok);
        assert!((l - 0.2).abs() < 1e-12);

        let mut a = ptr::null_mut();
        assert_eq!(hutchinf_attractor_compute(sys, 0.05, &mut a), HutchinfStatus::Ok);
        let mut err = f64::NAN;
        assert_eq!(hutchinf_attractor_error(a, &mut err), HutchinfStatus::Ok);
        assert!(err <= 0.05);
        let (n, d) = (hutchinf_attractor_len(a), hutchinf_attractor_dim(a));
        assert!(n > 1);
        assert_eq!(d, 2);

        let mut small = vec![0.0; 1];
        assert_eq!(hutchinf_attractor_points(a, small.as_mut_ptr(), 1), HutchinfStatus::BufferTooSmall);
        assert!(last_error().contains("buffer too small"));
        let mut buf = vec![f64::NAN; n * d];
        assert_eq!(hutchinf_attractor_points(a, buf.as_mut_ptr(), buf.len()), HutchinfStatus::Ok);
        assert!(buf.iter().all(|v| (0.0..=1.0).contains(v)));

        let mut h = f64::NAN;
        let st = hutchinf_hausdorff(buf.as_ptr(), n, buf.as_ptr(), n, 2, HutchinfMetric::Euclidean, &mut h);
        assert_eq!(st, HutchinfStatus::Ok);
        assert_eq!(h, 0.0);

        hutchinf_attractor_free(a);
        hutchinf_system_free(sys);
    }
}

#[test]
fn weak_system_is_rejected() {
    let (st, sys) = builtin("sup-pair");
    assert_eq!(st, HutchinfStatus::Ok);
    let mut a = ptr::null_mut();
    let st = unsafe { hutchinf_attractor_compute(sys, 0.01, &mut a) };
    assert_eq!(st, HutchinfStatus::NotContractive);
    assert!(a.is_null());
    assert!(!last_error().is_empty());
    unsafe { hutchinf_system_free(sys) };
}

#[test]
fn bad_inputs() {
    let (st, sys) = builtin("no-such-system");
    assert_eq!(st, HutchinfStatus::InvalidArgument);
    assert!(sys.is_null());
    assert!(last_error().contains("no-such-system"));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hutchinf_system_builtin(ptr::null(), &mut out) }, HutchinfStatus::NullPointer);
    let mut l = 0.0;
    assert_eq!(unsafe { hutchinf_system_lipschitz(ptr::null(), &mut l) }, HutchinfStatus::NullPointer);
    assert_eq!(unsafe { hutchinf_system_dim(ptr::null()) }, 0);
    unsafe {
        hutchinf_system_free(ptr::null_mut());
        hutchinf_attractor_free(ptr::null_mut());
    }

    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { hutchinf_system_from_json(bad.as_ptr(), &mut out) }, HutchinfStatus::InvalidArgument);

    let pts = [0.0, f64::NAN];
    let mut h = 0.0;
    let st = unsafe { hutchinf_hausdorff(pts.as_ptr(), 2, pts.as_ptr(), 1, 1, HutchinfMetric::Absolute, &mut h) };
    assert_eq!(st, HutchinfStatus::InvalidArgument);
}

#[test]
fn hausdorff_on_the_line() {
    let a = [0.0, 1.0];
    let b = [0.0, 0.25];
    let mut h = 0.0;
    let st = unsafe { hutchinf_hausdorff(a.as_ptr(), 2, b.as_ptr(), 2, 1, HutchinfMetric::Absolute, &mut h) };
    assert_eq!(st, HutchinfStatus::Ok);
    assert_eq!(h, 0.75);
}

#[test]
fn system_from_config() {
    let json = CString::new(r#"{"schema":1,"system":{"builtin":"planar"},"run":{},"output":{}}"#).unwrap();
    let mut sys = ptr::null_mut();
    let st = unsafe { hutchinf_system_from_json(json.as_ptr(), &mut sys) };
    assert_eq!(st, HutchinfStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { hutchinf_system_dim(sys) }, 2);
    unsafe { hutchinf_system_free(sys) };
}
