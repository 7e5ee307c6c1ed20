//! Special functions and hydrogenic matrix-element primitives.
//!
//! Everything here is implemented with recurrences and series:
//!
//! * Chebyshev T_k: three-term recurrence, exact to roundoff on [-1, 1].
//! * Bessel J_n: Miller backward recurrence normalized with
//!   J_0 + 2ΣJ_2k = 1. Relative error below 1e-12 away from zeros for
//!   |x| ≤ 50, n ≤ 60.
//! * Legendre P_n and associated P_l^m (Condon-Shortley phase).

pub mod hydrogen;
pub mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use hydrogen::{
    angular_bracket, hydrogen_radial, hydrogen_radial_moment, planewave_dipole_sq,
    radial_moment_quadrature, BoundState,
};
pub use quadrature::{QuadratureKind, QuadratureRule};

/// T_k(x) by T_{k+1} = 2x T_k - T_{k-1}.
#[must_use]
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut a, mut b) = (1.0, x);
            for _ in 1..k {
                let c = 2.0 * x * b - a;
                a = b;
                b = c;
            }
            b
        }
    }
}

/// T_k(x) together with a flag telling whether x was inside [-1, 1].
#[must_use]
pub fn chebyshev_t_checked(k: usize, x: f64) -> (f64, bool) {
    (chebyshev_t(k, x), x.abs() <= 1.0)
}

/// J_0(x) .. J_{n_max}(x).
#[must_use]
pub fn bessel_j_all(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = (n_max as f64).max(ax.ceil());
    let mut m = (top + 30.0 + 10.0 * ax.cbrt()).ceil() as usize;
    m += m % 2;
    let mut f = vec![0.0; m + 2];
    f[m] = 1e-300;
    for k in (1..=m).rev() {
        f[k - 1] = 2.0 * k as f64 / ax * f[k] - f[k + 1];
        if f[k - 1].abs() > 1e250 {
            for v in &mut f[k - 1..] {
                *v *= 1e-250;
            }
        }
    }
    let norm = f[0] + 2.0 * f.iter().skip(2).step_by(2).sum::<f64>();
    for (n, o) in out.iter_mut().enumerate() {
        let v = f[n] / norm;
        *o = if x < 0.0 && n % 2 == 1 { -v } else { v };
    }
    out
}

/// Bessel function of the first kind J_n(x).
#[must_use]
pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_all(n, x)[n]
}

/// Legendre P_n(u) by Bonnet's recurrence.
#[must_use]
pub fn legendre_p(n: usize, u: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => u,
        _ => {
            let (mut a, mut b) = (1.0, u);
            for k in 1..n {
                let c = ((2 * k + 1) as f64 * u * b - k as f64 * a) / (k + 1) as f64;
                a = b;
                b = c;
            }
            b
        }
    }
}

/// Associated Legendre P_l^m(u), 0 ≤ m ≤ l, with the Condon-Shortley phase.
#[must_use]
pub fn assoc_legendre(l: usize, m: usize, u: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    let s = (1.0 - u * u).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= -((2 * i + 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut p1 = u * (2 * m + 1) as f64 * pmm;
    let mut p0 = pmm;
    for ll in (m + 2)..=l {
        let p2 = ((2 * ll - 1) as f64 * u * p1 - (ll + m - 1) as f64 * p0) / (ll - m) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn factorial_ratio(l: usize, m: usize) -> f64 {
    // (l-m)!/(l+m)!
    ((l - m + 1)..=(l + m)).fold(1.0, |acc, k| acc / k as f64)
}

/// Y_lm(θ, φ) in the Condon-Shortley convention.
#[must_use]
pub fn spherical_harmonic(l: usize, m: i32, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Complex64::new(0.0, 0.0);
    }
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial_ratio(l, am)).sqrt();
    let y = Complex64::from_polar(norm * assoc_legendre(l, am, theta.cos()), am as f64 * phi);
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

/// |Y_{l,l_z}(θ, φ)|², which does not depend on φ.
#[must_use]
pub fn spherical_harmonic_sq(l: usize, lz: i32, theta: f64, _phi: f64) -> f64 {
    let am = lz.unsigned_abs() as usize;
    if am > l {
        return 0.0;
    }
    let p = assoc_legendre(l, am, theta.cos());
    (2 * l + 1) as f64 / (4.0 * PI) * factorial_ratio(l, am) * p * p
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chebyshev_base_and_trig() {
        assert_eq!(chebyshev_t(0, 3.3), 1.0);
        assert_eq!(chebyshev_t(1, -0.3), -0.3);
        assert!((chebyshev_t(5, 0.7f64.cos()) - 3.5f64.cos()).abs() < 1e-13);
        assert!(!chebyshev_t_checked(3, 1.5).1);
        assert!((chebyshev_t(3, 1.5) - (4.0 * 3.375 - 4.5)).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_of_sine() {
        for i in 0..200 {
            let wt = i as f64 * 0.0371;
            for k in 0..12usize {
                let t = chebyshev_t(k, wt.sin());
                let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                let expect =
                    if k % 2 == 1 { sign * (k as f64 * wt).sin() } else { sign * (k as f64 * wt).cos() };
                assert!((t - expect).abs() < 1e-12, "k={k} wt={wt}");
            }
        }
    }

    // power series for the oracle; fine for |x| ≲ 20
    fn j_series(n: usize, x: f64) -> f64 {
        let mut term = (0..n).fold(1.0, |acc, k| acc * x / 2.0 / (k + 1) as f64);
        let mut s = term;
        for k in 1..200 {
            term *= -(x * x / 4.0) / (k as f64 * (k + n) as f64);
            s += term;
            if term.abs() < 1e-18 * s.abs() {
                break;
            }
        }
        s
    }

    #[test]
    fn bessel_trivial_values() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        for n in 1..10 {
            assert_eq!(bessel_j(n, 0.0), 0.0);
        }
    }

    #[test]
    fn bessel_first_zero_by_bisection() {
        let (mut a, mut b) = (2.0, 3.0);
        for _ in 0..60 {
            let c = 0.5 * (a + b);
            if j_series(0, a) * j_series(0, c) <= 0.0 {
                b = c;
            } else {
                a = c;
            }
        }
        assert!((a - 2.404826).abs() < 1e-6);
        assert!(bessel_j(0, 2.404826).abs() < 1e-6);
        assert!(bessel_j(0, a).abs() < 1e-13);
    }

    #[test]
    fn bessel_against_series() {
        for &x in &[0.1, 0.9, 2.5, 3.7, 7.3, 12.0] {
            for n in 0..25 {
                let a = bessel_j(n, x);
                let b = j_series(n, x);
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "n={n} x={x}: {a} vs {b}");
            }
        }
        assert!((bessel_j(3, -2.0) + bessel_j(3, 2.0)).abs() < 1e-16);
    }

    #[test]
    fn bessel_reference_values() {
        // reference values from an independent arbitrary-precision evaluation
        let table = [
            (0usize, 50.0, 0.055_812_327_669_251_815),
            (1, 50.0, -0.097_511_828_125_175_138),
            (10, 50.0, -0.113_847_849_149_469_39),
            (40, 50.0, -0.138_176_281_201_161_43),
            (59, 50.0, 0.001_975_298_303_805_207_7),
            (60, 50.0, 0.001_048_519_599_531_418_1),
            (60, 20.0, 2.280_926_388_733_559_6e-23),
            (5, 1.0, 2.497_577_302_112_344_3e-4),
            (20, 30.0, 0.004_831_019_993_404_064_5),
            (30, 12.5, 7.836_631_126_330_117_1e-10),
        ];
        for (n, x, v) in table {
            let got = bessel_j(n, x);
            assert!(((got - v) / v).abs() < 1e-10, "J_{n}({x}) = {got}, expected {v}");
        }
    }

    #[test]
    fn bessel_sum_rule() {
        let j = bessel_j_all(60, 3.7);
        let s = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_p(0, 0.4), 1.0);
        assert_eq!(legendre_p(1, 0.4), 0.4);
        assert!((legendre_p(2, 0.4) + 0.26).abs() < 1e-15);
        let v = quadrature::adaptive(|u| legendre_p(2, u).powi(2), -1.0, 1.0, 1e-14).unwrap();
        assert!((v - 0.4).abs() < 1e-12);
        assert!((assoc_legendre(2, 1, 0.3) + 3.0 * 0.3 * (1.0f64 - 0.09).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn harmonics_normalized() {
        let v = quadrature::sphere_integrate(|t, p| spherical_harmonic_sq(1, 0, t, p), 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        for l in 0..5usize {
            for m in -(l as i32)..=(l as i32) {
                let v = quadrature::sphere_integrate(
                    |t, p| spherical_harmonic(l, m, t, p).norm_sqr(),
                    1e-12,
                )
                .unwrap();
                assert!((v - 1.0).abs() < 1e-10, "l={l} m={m}");
            }
        }
        // Y_{1,1} = -sqrt(3/8π) sinθ e^{iφ}
        let y = spherical_harmonic(1, 1, 0.7, 0.3);
        let e = Complex64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * 0.7f64.sin(), 0.3);
        assert!((y - e).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn chebyshev_recurrence_matches_trig(k in 0usize..=64, th in 0.0f64..PI) {
            prop_assert!((chebyshev_t(k, th.cos()) - (k as f64 * th).cos()).abs() <= 1e-12);
        }

        #[test]
        fn jacobi_anger_normalization(x in -50.0f64..50.0) {
            let j = bessel_j_all(140, x);
            // tail beyond n = 140 is below 1e-40 for |x| ≤ 50
            let s = j[0] * j[0] + 2.0 * j.iter().skip(1).map(|v| v * v).sum::<f64>();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
