// Harmonic selection seen in the FFT of directly integrated ⟨σ₁⟩ at
// Ω/ω = 20, Δ/ω = 0.05. Residual bins of the suppressed parity are second
// order in Δ/ω.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use strongfield::two_level::{
    direct_harmonic_bins, even_to_odd_ratio, odd_to_even_ratio, periodic_grid, sigma1_spectrum,
    validate_against_direct, TwoLevelParams,
};

fn params(delta_over_omega: f64, a1: Complex64, a2: Complex64) -> TwoLevelParams {
    TwoLevelParams::new(delta_over_omega * 0.05, 1.0, 0.05, a1, a2).unwrap()
}

#[test]
fn ground_state_start_has_no_even_harmonics() {
    let p = params(0.05, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let b = direct_harmonic_bins(&p, 16, 256, 30).unwrap();
    let r = even_to_odd_ratio(&b);
    assert!(r < 1e-3, "even/odd {r}");
    assert!(b[1].amplitude > 1e-3);
}

#[test]
fn equal_populations_suppress_odd_harmonics() {
    let p = params(0.05, Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2));
    let b = direct_harmonic_bins(&p, 16, 256, 30).unwrap();
    let r = odd_to_even_ratio(&b);
    assert!(r < 1e-3, "odd/even {r}");
    assert!(b[4].amplitude > 1e-5);
}

#[test]
fn suppressed_parity_is_second_order() {
    let g = |d| {
        let p = params(d, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        even_to_odd_ratio(&direct_harmonic_bins(&p, 16, 256, 30).unwrap())
    };
    let (a, b) = (g(0.1), g(0.05));
    assert!((a / b - 4.0).abs() < 0.5, "{a} {b}");
}

#[test]
fn formula_error_shrinks_with_splitting() {
    let mk = |d| TwoLevelParams::new(d, 1.0, 0.05, Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)).unwrap();
    let times = periodic_grid(&mk(0.02), 4, 200);
    let errs: Vec<f64> =
        [0.02, 0.01, 0.005].iter().map(|&d| validate_against_direct(&mk(d), &times).unwrap().l2_relative).collect();
    assert!(errs[1] < errs[0] / 3.0 && errs[2] < errs[1] / 3.0 && errs[2] < 0.01, "{errs:?}");
    let (series, v) = sigma1_spectrum(&mk(0.02), &times, None);
    assert!(series.tail_bound < 1e-10);
    assert!(v.iter().all(|x| x.is_finite()));
}
