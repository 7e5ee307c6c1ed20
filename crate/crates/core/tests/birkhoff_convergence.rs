use num_complex::Complex64;
use strongfield::birkhoff::{convergence_sweep, fitted_order, BirkhoffOptions, RandomHermitianFamily};

#[test]
fn leading_order_error_is_linear_in_epsilon() {
    let fam = RandomHermitianFamily::new(4, 1, 0.3);
    let a0 = [Complex64::new(0.5, 0.0); 4];
    let times: Vec<f64> = (0..=120).map(|i| 3.0 * f64::from(i) / 120.0).collect();
    let eps: Vec<f64> = (0..5).map(|k| 0.04 / 2f64.powi(k)).collect();
    let pts = convergence_sweep(|t| fam.eval(t), &eps, &a0, &times, &BirkhoffOptions::default()).unwrap();
    for w in pts.windows(2) {
        let r = w[0].error / w[1].error;
        assert!((1.6..=2.4).contains(&r), "ratio {r} at eps {}", w[0].epsilon);
    }
    let p = fitted_order(&pts);
    assert!((p - 1.0).abs() <= 0.3, "order {p}");
}
