//! Quadrature rules: Gauss-Legendre, Gauss-Chebyshev, adaptive Gauss-Kronrod
//! and the tensor rule on the unit sphere.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureKind {
    GaussChebyshev,
    GaussLegendre,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub nodes: usize,
    pub tolerance: f64,
}

impl QuadratureRule {
    pub fn new(kind: QuadratureKind, nodes: usize, tolerance: f64) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::invalid("quadrature needs at least 2 nodes"));
        }
        if !(tolerance > 0.0) {
            return Err(Error::invalid("quadrature tolerance must be > 0"));
        }
        Ok(Self { kind, nodes, tolerance })
    }

    /// ∫_a^b f. For `GaussChebyshev` the integrand is understood to carry
    /// the weight 1/sqrt(1-x²) on [a, b] mapped to [-1, 1].
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        match self.kind {
            QuadratureKind::GaussLegendre => {
                let (x, w) = gauss_legendre(self.nodes);
                Ok(half * x.iter().zip(&w).map(|(&xi, &wi)| wi * f(mid + half * xi)).sum::<f64>())
            }
            QuadratureKind::GaussChebyshev => {
                let n = self.nodes;
                let s: f64 = (1..=n)
                    .map(|i| f(mid + half * ((2 * i - 1) as f64 * PI / (2 * n) as f64).cos()))
                    .sum();
                Ok(s * PI / n as f64)
            }
            QuadratureKind::Adaptive => adaptive(f, a, b, self.tolerance),
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
#[must_use]
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Chebyshev nodes cos((2i-1)π/2N), i = 1..N; every weight is π/N.
#[must_use]
pub fn gauss_chebyshev_nodes(n: usize) -> Vec<f64> {
    (1..=n).map(|i| ((2 * i - 1) as f64 * PI / (2 * n) as f64).cos()).collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod estimate and |K15 - G7| on [a, b].
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let s = f(c - h * XGK[j]) + f(c + h * XGK[j]);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

const MAX_INTERVALS: usize = 20_000;

/// Globally adaptive Gauss-Kronrod 15 on a finite interval; stops when the
/// summed error estimate is below `tol`·|I| (or an absolute floor of 1e-300).
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    adaptive_abs(f, a, b, tol, 0.0)
}

/// As [`adaptive`] with an extra absolute tolerance.
pub fn adaptive_abs<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64, atol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut parts = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature { tol: rtol, estimate: total });
        }
        if err <= (rtol * total.abs()).max(atol).max(1e-300) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { tol: rtol, estimate: total });
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval cannot be split further; accept what we have
            let total: f64 = parts.iter().map(|p| p.2).sum::<f64>() + gk15(&f, lo, hi).0;
            return Ok(total);
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// ∫_a^∞ f via x = a + s/(1-s).
pub fn adaptive_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<f64> {
    adaptive(
        |s| {
            let d = 1.0 - s;
            f(a + s / d) / (d * d)
        },
        0.0,
        1.0,
        tol,
    )
}

fn cached_gl(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (0..9).map(|k| gauss_legendre(8 << k)).collect());
    let k = (n / 8).max(1).trailing_zeros() as usize;
    &rules[k.min(rules.len() - 1)]
}

/// ∫ f(θ, φ) dΩ with Gauss-Legendre in cos θ and the trapezoid rule in φ,
/// doubling both until two successive results agree to `tol`.
pub fn sphere_integrate<F: Fn(f64, f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    let eval = |n: usize| {
        let (x, w) = cached_gl(n);
        let nphi = 2 * x.len();
        let dphi = 2.0 * PI / nphi as f64;
        let mut s = 0.0;
        for (&u, &wu) in x.iter().zip(w) {
            let th = u.acos();
            let mut row = 0.0;
            for j in 0..nphi {
                row += f(th, j as f64 * dphi);
            }
            s += wu * row * dphi;
        }
        s
    };
    let mut n = 8;
    let mut prev = eval(n);
    while n < 2048 {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).abs() <= tol * cur.abs().max(1e-300) || (cur - prev).abs() < 1e-15 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature { tol, estimate: prev })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        for p in 0..20 {
            let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "p={p}");
        }
        let (x, w) = gauss_legendre(7);
        assert_eq!(x[3], 0.0);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_weights_consistent() {
        // weights sum to 2 on [-1, 1] and integrate x^22 exactly
        let (v, _) = gk15(&|_x| 1.0, -1.0, 1.0);
        assert!((v - 2.0).abs() < 1e-15);
        let (v, _) = gk15(&|x: f64| x.powi(22), -1.0, 1.0);
        assert!((v - 2.0 / 23.0).abs() < 1e-15);
        let (v, _) = gk15(&|x: f64| x.powi(12), -1.0, 1.0);
        assert!((v - 2.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaks_and_tails() {
        let v = adaptive(|x: f64| 1.0 / (x * x + 1e-6), -1.0, 1.0, 1e-12).unwrap();
        let exact = 2.0 * 1e3 * (1e3f64).atan();
        assert!((v - exact).abs() / exact < 1e-11);
        let v = adaptive_semi_infinite(|x: f64| (-x).exp() * x * x, 0.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn chebyshev_rule_integrates_weighted_moments() {
        let rule = QuadratureRule::new(QuadratureKind::GaussChebyshev, 8, 1e-12).unwrap();
        // (1/π)∫ x²/sqrt(1-x²) = 1/2
        let v = rule.integrate(|x| x * x, -1.0, 1.0).unwrap() / PI;
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sphere_area() {
        let v = sphere_integrate(|_, _| 1.0, 1e-12).unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-12);
    }
}
