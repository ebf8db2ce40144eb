mod common;

use mirrornoise::kernels::{delta_tilde, f_i, f_r, KernelConfig};
use std::f64::consts::PI;

#[test]
fn delta_tilde_matches_quadrature() {
    let s = common::delta_tilde_oracle(1, 100);
    assert!(s.worst < 1.0, "{}", s.worst);
}

#[test]
fn f_r_matches_dense_trapezoid() {
    let s = common::f_r_oracle(2, 20);
    assert!(s.worst < 1.0, "{}", s.worst);
}

#[test]
fn f_i_matches_finite_difference() {
    let s = common::f_i_oracle(3, 100);
    assert!(s.worst < 1.0, "{}", s.worst);
}

#[test]
fn cold_kernel_closed_form() {
    let omega = 2.0e9;
    let cfg = KernelConfig::finite(omega).unwrap();
    assert!((f_r(0.0, 0.0, &cfg).unwrap() / (omega * omega / 2.0) - 1.0).abs() < 1e-14);
    for x in [0.05, 0.3, 3.0, 40.0] {
        let tau = x / omega;
        let closed = omega * x.sin() / tau + (x.cos() - 1.0) / (tau * tau);
        let v = f_r(tau, 0.0, &cfg).unwrap();
        assert!((v - closed).abs() <= 1e-8 * closed.abs().max(omega / tau), "{x}");
    }
}

#[test]
fn kernel_special_points() {
    let omega = 5.0e4;
    let cfg = KernelConfig::finite(omega).unwrap();
    assert_eq!(delta_tilde(0.0, &cfg).unwrap(), omega / PI);
    assert_eq!(f_i(0.0, &cfg).unwrap(), 0.0);
    assert!(delta_tilde(PI / omega, &cfg).unwrap().abs() < 1e-10 * omega);
}
