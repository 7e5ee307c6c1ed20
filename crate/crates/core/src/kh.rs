//! The atomic potential seen from the quiver frame, V(r - λ_L ê sin ωt),
//! decomposed into Chebyshev components
//!
//! ```text
//! V(x - λ_L sin ωt) = v_0(x) + 2 Σ_{k≥1} v_k(x) T_k(sin ωt)
//! v_k(x) = (1/π) ∫ V(x - ê λ_L x') T_k(x') / sqrt(1 - x'²) dx'
//! ```
//!
//! plus the regularized dipolar kicks of the Coulomb case, the odd-harmonic
//! kick comb, and the multipole form of the dressed (k = 0) potential
//!
//! ```text
//! δV(r) = -(Z/r) Σ_{n≥1} A_n (λ_L/r)^{2n} P_{2n}(x/r),   A_n = (2n-1)!!/(2n)!!
//! ```

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::multipole_a;
use crate::specfun::quadrature::{adaptive, gauss_legendre};
use crate::specfun::{chebyshev_t, legendre_p};
use crate::units::{derive_regime, HydrogenicAtom, LaserField};

/// A scalar potential in a.u. Singular potentials report their singular
/// point so the decomposition can refuse to sample across it.
pub trait Potential: Sync {
    fn value(&self, r: [f64; 3]) -> f64;

    fn singular_point(&self) -> Option<[f64; 3]> {
        None
    }
}

impl<F: Fn([f64; 3]) -> f64 + Sync> Potential for F {
    fn value(&self, r: [f64; 3]) -> f64 {
        self(r)
    }
}

/// Bare Coulomb potential -Z/r.
#[derive(Debug, Clone, Copy)]
pub struct Coulomb {
    pub z: f64,
}

impl Potential for Coulomb {
    fn value(&self, r: [f64; 3]) -> f64 {
        -self.z / norm(r)
    }

    fn singular_point(&self) -> Option<[f64; 3]> {
        Some([0.0; 3])
    }
}

/// Soft-core Coulomb -Z/sqrt(r² + a²).
#[derive(Debug, Clone, Copy)]
pub struct SoftCore {
    pub z: f64,
    pub a: f64,
}

impl Potential for SoftCore {
    fn value(&self, r: [f64; 3]) -> f64 {
        -self.z / (norm(r).powi(2) + self.a * self.a).sqrt()
    }
}

fn norm(r: [f64; 3]) -> f64 {
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
}

fn check_segment(v: &dyn Potential, lambda: f64, x: [f64; 3]) -> Result<()> {
    if let Some(p) = v.singular_point() {
        let d = [x[0] - p[0], x[1] - p[1], x[2] - p[2]];
        let transverse = (d[1] * d[1] + d[2] * d[2]).sqrt();
        let scale = 1.0 + lambda.abs() + d[0].abs();
        if transverse <= 1e-12 * scale && d[0].abs() <= lambda.abs() * (1.0 + 1e-12) {
            return Err(Error::SingularPotential { point: p });
        }
    }
    Ok(())
}

/// v_0(x) .. v_{k_max}(x) from one N-node Gauss-Chebyshev pass.
pub fn fourier_components(
    v: &dyn Potential,
    lambda: f64,
    k_max: usize,
    x: [f64; 3],
    nodes: usize,
) -> Result<Vec<f64>> {
    if nodes < 1 {
        return Err(Error::invalid("Gauss-Chebyshev needs at least one node"));
    }
    check_segment(v, lambda, x)?;
    let mut out = vec![0.0; k_max + 1];
    for i in 1..=nodes {
        let th = (2 * i - 1) as f64 * PI / (2 * nodes) as f64;
        let val = v.value([x[0] - lambda * th.cos(), x[1], x[2]]);
        if !val.is_finite() {
            return Err(Error::SingularPotential { point: [x[0] - lambda * th.cos(), x[1], x[2]] });
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o += val * (k as f64 * th).cos();
        }
    }
    for o in &mut out {
        *o /= nodes as f64;
    }
    Ok(out)
}

/// Single component v_k(x).
pub fn fourier_component(
    v: &dyn Potential,
    lambda: f64,
    k: usize,
    x: [f64; 3],
    nodes: usize,
) -> Result<f64> {
    Ok(fourier_components(v, lambda, k, x, nodes)?[k])
}

/// v_0 + 2 Σ_{k≥1} v_k T_k(s), with s = sin ωt.
#[must_use]
pub fn reconstruct(components: &[f64], s: f64) -> f64 {
    components
        .iter()
        .enumerate()
        .map(|(k, v)| if k == 0 { *v } else { 2.0 * v * chebyshev_t(k, s) })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierComponentTable {
    /// Positions along the polarization axis.
    pub positions: Vec<f64>,
    /// Fixed transverse offset (y, z) of every sample.
    pub transverse: [f64; 2],
    pub lambda: f64,
    pub nodes: usize,
    /// `values[i][k]` = v_k(positions[i]).
    pub values: Vec<Vec<f64>>,
}

impl FourierComponentTable {
    pub fn build(
        v: &dyn Potential,
        lambda: f64,
        positions: &[f64],
        transverse: [f64; 2],
        k_max: usize,
        nodes: usize,
    ) -> Result<Self> {
        let values = positions
            .par_iter()
            .map(|&x| fourier_components(v, lambda, k_max, [x, transverse[0], transverse[1]], nodes))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { positions: positions.to_vec(), transverse, lambda, nodes, values })
    }

    /// Rows (x, k, v_k).
    pub fn rows(&self) -> impl Iterator<Item = (f64, usize, f64)> + '_ {
        self.positions
            .iter()
            .zip(&self.values)
            .flat_map(|(x, vs)| vs.iter().enumerate().map(move |(k, v)| (*x, k, *v)))
    }
}

/// I_k(η) = (1/π) ∫ T_k(x) x / ((x² + 2η²)^{3/2} sqrt(1-x²)) dx.
///
/// Written as (2/π)∫_0^{π/2} cos kθ cos θ / (cos²θ + 2η²)^{3/2} dθ for odd
/// k, split where cos θ = 10η so the peak of width η gets its own panel.
pub fn dipole_kick_integral(k: usize, eta: f64) -> Result<f64> {
    if !(eta > 0.0) || eta > 0.1 {
        return Err(Error::regime(format!("cutoff eta must lie in (0, 0.1], got {eta}")));
    }
    if k.is_multiple_of(2) {
        return Ok(0.0);
    }
    let e2 = 2.0 * eta * eta;
    let f = |th: f64| {
        let c = th.cos();
        (k as f64 * th).cos() * c / (c * c + e2).powf(1.5)
    };
    let split = (10.0 * eta).acos();
    let outer = adaptive(f, 0.0, split, 1e-11)?;
    let inner = adaptive(f, split, PI / 2.0, 1e-11)?;
    Ok(2.0 / PI * (outer + inner))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KickSlope {
    pub order: usize,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KickCoefficients {
    pub epsilon: f64,
    pub eta: f64,
    pub slopes: Vec<KickSlope>,
    pub half_period: f64,
    pub kick_regime: bool,
}

/// Linear coefficient of v^dip_k(x) for odd k = 2n+1:
/// -ε (Z/λ_L) (-1)^n (2n+1) / a_B.
pub fn renormalized_kick(atom: &HydrogenicAtom, laser: &LaserField, k: usize) -> Result<f64> {
    if k.is_multiple_of(2) {
        return Err(Error::invalid(format!("kick coefficients exist for odd k only, got {k}")));
    }
    let regime = derive_regime(laser, atom)?;
    let eps = regime
        .epsilon
        .ok_or_else(|| Error::regime("zero field: quiver amplitude vanishes"))?;
    let n = (k - 1) / 2;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(-eps * atom.z_eff / regime.quiver_amplitude * sign * k as f64 / atom.bohr_radius)
}

/// Slopes for k = 1, 3, .., k_max with η = a_B/λ_L.
pub fn kick_coefficients(atom: &HydrogenicAtom, laser: &LaserField, k_max: usize) -> Result<KickCoefficients> {
    let regime = derive_regime(laser, atom)?;
    let eps = regime
        .epsilon
        .ok_or_else(|| Error::regime("zero field: quiver amplitude vanishes"))?;
    let slopes = (1..=k_max)
        .step_by(2)
        .map(|k| Ok(KickSlope { order: k, slope: renormalized_kick(atom, laser, k)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(KickCoefficients {
        epsilon: eps,
        eta: atom.bohr_radius / regime.quiver_amplitude,
        slopes,
        half_period: PI / laser.omega,
        kick_regime: regime.kick_regime,
    })
}

/// S_K(t) = 2 Σ_{k=0..K} (2k+1) sin((2k+1)ωt).
#[must_use]
pub fn kick_series_partial_sum(t: f64, truncation: usize, omega: f64) -> f64 {
    let x = omega * t;
    let c2 = 2.0 * (2.0 * x).cos();
    // sin((m+2)x) = 2cos(2x) sin(mx) - sin((m-2)x)
    let (mut prev, mut cur) = (-x.sin(), x.sin());
    let mut s = 0.0;
    for k in 0..=truncation {
        s += (2 * k + 1) as f64 * cur;
        let next = c2 * cur - prev;
        prev = cur;
        cur = next;
    }
    2.0 * s
}

/// ∫_a^b f(t) S_K(t) dt, Gauss-Legendre panels one oscillation of the top
/// harmonic wide.
#[must_use]
pub fn weak_action<F: Fn(f64) -> f64>(f: F, truncation: usize, omega: f64, a: f64, b: f64) -> f64 {
    let top = (2 * truncation + 1) as f64 * omega;
    let panels = ((b - a) * top / (2.0 * PI)).ceil().max(1.0) as usize + 1;
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let t = mid + 0.5 * h * xi;
            s += wi * f(t) * kick_series_partial_sum(t, truncation, omega);
        }
    }
    0.5 * h * s
}

/// (π/ω²) Σ_j (-1)^j f'(jT/2) over comb teeth inside [a, b]: the action of
/// -(π/ω²) d/dt of the alternating comb with spacing T/2 = π/ω.
#[must_use]
pub fn comb_action<F: Fn(f64) -> f64>(fprime: F, omega: f64, a: f64, b: f64) -> f64 {
    let step = PI / omega;
    let lo = (a / step).ceil() as i64;
    let hi = (b / step).floor() as i64;
    let s: f64 = (lo..=hi)
        .map(|j| if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 } * fprime(j as f64 * step))
        .sum();
    PI / (omega * omega) * s
}

/// Weak-limit check of the odd-harmonic series against a Gaussian
/// f(t) = exp(−(t − center)²/(2 width²)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombTest {
    pub truncation: usize,
    pub omega: f64,
    pub center: f64,
    pub width: f64,
    /// ∫ f S_K
    pub series: f64,
    /// (π/ω²) Σ_j (−1)^j f'(jT/2)
    pub comb: f64,
    pub relative_error: f64,
}

pub fn comb_test(omega: f64, truncation: usize, center: f64, width: f64) -> Result<CombTest> {
    if !(omega > 0.0 && width > 0.0 && center.is_finite()) {
        return Err(Error::invalid("comb test needs omega > 0, width > 0 and a finite center"));
    }
    let f = |t: f64| (-(t - center).powi(2) / (2.0 * width * width)).exp();
    let fp = |t: f64| -(t - center) / (width * width) * f(t);
    let (a, b) = (center - 12.0 * width, center + 12.0 * width);
    let series = weak_action(f, truncation, omega, a, b);
    let comb = comb_action(fp, omega, a, b);
    Ok(CombTest { truncation, omega, center, width, series, comb, relative_error: ((series - comb) / comb).abs() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleExpansion {
    pub order: u32,
    pub coefficients: Vec<BigRational>,
    pub lambda: f64,
    pub z_eff: f64,
}

impl MultipoleExpansion {
    pub fn new(order: u32, lambda: f64, z_eff: f64) -> Result<Self> {
        if order < 1 {
            return Err(Error::invalid("multipole truncation must be >= 1"));
        }
        Ok(Self { order, coefficients: (0..=order).map(multipole_a).collect(), lambda, z_eff })
    }

    /// δV at distance r with direction cosine x/r.
    pub fn eval(&self, r: f64, cos_x: f64) -> Result<f64> {
        dressed_potential(r, cos_x, self.lambda, self.z_eff, self.order)
    }
}

/// -(Z/r) Σ_{n=1..N} A_n (λ/r)^{2n} P_{2n}(x/r).
pub fn dressed_potential(r: f64, cos_x: f64, lambda: f64, z: f64, order: u32) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::invalid("dressed potential is singular at r = 0"));
    }
    let q = (lambda / r).powi(2);
    let mut qn = 1.0;
    let mut s = 0.0;
    for n in 1..=order {
        qn *= q;
        s += multipole_a(n).to_f64().unwrap_or(f64::NAN) * qn * legendre_p(2 * n as usize, cos_x);
    }
    Ok(-z / r * s)
}
