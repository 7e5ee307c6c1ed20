//! Driven two-level system H = −(Δ/2)σ₃ + Ω cos(ωt) σ₁ in the basis
//! (lower, upper).
//!
//! Interaction picture: a = e^{iH₀t}ψ with H₀ = −(Δ/2)σ₃, so
//! i da/dt = Ω M(t) a, M₁₂ = e^{−iΔt} cos ωt. With ε = 1/Ω this is the
//! singularly perturbed form handled by [`crate::birkhoff`]; the
//! eigenvalues of M are ±cos ωt and cross at ωt = π/2 (mod π).
//!
//! The harmonic content of ⟨σ₁⟩ is to first order in Δ/ω:
//!
//! ⟨σ₁⟩ ≈ 2Re(a₂a₁* e^{−iΔ_R t})
//!      + (|a₁|² − |a₂|²) Δ Σ_n J_{2n+1}(z) [cos((2n+1)ωt) − 1] / ((n+½)ω)
//!      − 2Im(a₂*a₁ e^{iΔ_R t}) Δ Σ_{n≥1} J_{2n}(z) sin(2nωt) / (nω)
//!
//! with z = 2Ω/ω and Δ_R = Δ J₀(z).

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::birkhoff::{direct_integrate, CMatrix};
use crate::error::{Error, Result};
use crate::export::{num, Table};
use crate::specfun::bessel_j_all;

/// Bessel orders beyond the truncation satisfy |J_k(z)| below this.
pub const BESSEL_CUTOFF: f64 = 1e-12;

/// Ratio above which the Δ ≪ Ω and ω ≪ Ω, Δ advisories fire.
pub const ADVISORY_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelParams {
    /// level splitting Δ
    pub delta: f64,
    /// drive strength Ω
    pub rabi: f64,
    /// drive frequency ω
    pub omega: f64,
    /// initial amplitude of the lower level
    pub a1: Complex64,
    /// initial amplitude of the upper level
    pub a2: Complex64,
}

impl TwoLevelParams {
    /// Validates and normalizes the initial amplitudes.
    pub fn new(delta: f64, rabi: f64, omega: f64, a1: Complex64, a2: Complex64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::invalid(format!("splitting must be finite and non-negative, got {delta}")));
        }
        if !(rabi.is_finite() && rabi >= 0.0) {
            return Err(Error::invalid(format!("drive strength must be finite and non-negative, got {rabi}")));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!("drive frequency must be positive, got {omega}")));
        }
        let norm = (a1.norm_sqr() + a2.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("initial amplitudes must not both vanish"));
        }
        Ok(Self { delta, rabi, omega, a1: a1 / norm, a2: a2 / norm })
    }

    /// z = 2Ω/ω
    #[must_use]
    pub fn bessel_argument(&self) -> f64 {
        2.0 * self.rabi / self.omega
    }

    /// Δ_R = Δ J₀(2Ω/ω)
    #[must_use]
    pub fn renormalized_splitting(&self) -> f64 {
        self.delta * bessel_j_all(0, self.bessel_argument())[0]
    }

    /// Warnings for parameters outside Δ ≪ Ω, ω ≪ Ω and ω ≪ Δ.
    #[must_use]
    pub fn advisories(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.delta > ADVISORY_RATIO * self.rabi {
            w.push(format!("Δ/Ω = {} is not small", self.delta / self.rabi));
        }
        if self.omega > ADVISORY_RATIO * self.rabi {
            w.push(format!("ω/Ω = {} is not small", self.omega / self.rabi));
        }
        if self.omega > ADVISORY_RATIO * self.delta {
            w.push(format!("ω/Δ = {} is not small", self.omega / self.delta));
        }
        w
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

/// Smallest K such that |J_k(z)| < [`BESSEL_CUTOFF`] for every k ≥ K
/// (checked out to well past the turning point k ≈ z).
#[must_use]
pub fn bessel_truncation(z: f64) -> usize {
    let top = (1.5 * z.abs()).ceil() as usize + 60;
    let j = bessel_j_all(top, z);
    j.iter().rposition(|v| v.abs() >= BESSEL_CUTOFF).map_or(0, |k| k + 1)
}

/// Upper bound on Σ_{k≥K} |J_k(z)| from |J_k(z)| ≤ (|z|/2)^k / k!; infinite
/// while the ratio (|z|/2)/(K+1) is not below one.
#[must_use]
pub fn bessel_tail(z: f64, k: usize) -> f64 {
    let h = z.abs() / 2.0;
    if h == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ratio = h / (k as f64 + 1.0);
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let ln_first = k as f64 * h.ln() - (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    ln_first.exp() / (1.0 - ratio)
}

/// Coefficients of the transformed Hamiltonian, obtained by removing the
/// drive with U = exp(−i(Ω/ω) sin(ωt) σ₁):
///
/// H' = s σ₃ + Σ_{n≥1} c_n cos(2nωt) σ₃ + Σ_{n≥0} d_n sin((2n+1)ωt) σ₂
///
/// with s = −ΔJ₀/2, c_n = −ΔJ_{2n}, d_n = −ΔJ_{2n+1} at z = 2Ω/ω.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformedHamiltonian {
    pub static_sigma3: f64,
    /// (2n, c_n), n = 1..=n_max
    pub cos_sigma3: Vec<(usize, f64)>,
    /// (2n+1, d_n), n = 0..=n_max
    pub sin_sigma2: Vec<(usize, f64)>,
    /// bound on |Δ| Σ |J_k| over the dropped orders
    pub tail_bound: f64,
}

impl TransformedHamiltonian {
    /// (σ₃, σ₂) weights of H'(t).
    #[must_use]
    pub fn eval(&self, t: f64, omega: f64) -> (f64, f64) {
        let s3 = self.static_sigma3 + self.cos_sigma3.iter().map(|&(k, c)| c * (k as f64 * omega * t).cos()).sum::<f64>();
        let s2 = self.sin_sigma2.iter().map(|&(k, d)| d * (k as f64 * omega * t).sin()).sum();
        (s3, s2)
    }

    #[must_use]
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["operator", "harmonic", "coefficient"]);
        t.push(vec!["sigma3".into(), "0".into(), num(self.static_sigma3)]);
        for &(k, c) in &self.cos_sigma3 {
            t.push(vec!["sigma3_cos".into(), k.to_string(), num(c)]);
        }
        for &(k, d) in &self.sin_sigma2 {
            t.push(vec!["sigma2_sin".into(), k.to_string(), num(d)]);
        }
        t
    }
}

pub fn transformed_hamiltonian_coeffs(p: &TwoLevelParams, n_max: usize) -> Result<TransformedHamiltonian> {
    if n_max < 1 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let z = p.bessel_argument();
    let j = bessel_j_all(2 * n_max + 1, z);
    Ok(TransformedHamiltonian {
        static_sigma3: -p.delta * j[0] / 2.0,
        cos_sigma3: (1..=n_max).map(|n| (2 * n, -p.delta * j[2 * n])).collect(),
        sin_sigma2: (0..=n_max).map(|n| (2 * n + 1, -p.delta * j[2 * n + 1])).collect(),
        tail_bound: p.delta * bessel_tail(z, 2 * n_max + 2),
    })
}

/// M(t) with i(1/Ω) da/dt = M(t) a in the interaction picture.
#[must_use]
pub fn interaction_matrix(p: &TwoLevelParams, t: f64) -> CMatrix {
    let c = (p.omega * t).cos();
    let e = Complex64::from_polar(c, -p.delta * t);
    CMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), e, e.conj(), Complex64::new(0.0, 0.0)])
}

/// Closed-form leading-order basis at ε = 1/Ω:
/// b₁ = e^{−iΔt/2} e^{i(Ω/ω) sin ωt} (1, −e^{iΔt})/√2 (eigenvalue −cos ωt),
/// b₂ = e^{iΔt/2} e^{−i(Ω/ω) sin ωt} (e^{−iΔt}, 1)/√2 (eigenvalue +cos ωt).
#[must_use]
pub fn birkhoff_basis_2lvl(p: &TwoLevelParams, t: f64) -> [[Complex64; 2]; 2] {
    let dt = p.delta * t;
    let s = p.rabi / p.omega * (p.omega * t).sin();
    let f1 = Complex64::from_polar(FRAC_1_SQRT_2, s - dt / 2.0);
    let f2 = Complex64::from_polar(FRAC_1_SQRT_2, dt / 2.0 - s);
    [[f1, -f1 * Complex64::from_polar(1.0, dt)], [f2 * Complex64::from_polar(1.0, -dt), f2]]
}

/// Leading-order interaction-picture amplitudes from the closed-form basis.
#[must_use]
pub fn closed_form_amplitudes(p: &TwoLevelParams, times: &[f64]) -> Vec<[Complex64; 2]> {
    let b0 = birkhoff_basis_2lvl(p, 0.0);
    let alpha: Vec<Complex64> = b0.iter().map(|b| b[0].conj() * p.a1 + b[1].conj() * p.a2).collect();
    times
        .iter()
        .map(|&t| {
            let b = birkhoff_basis_2lvl(p, t);
            [alpha[0] * b[0][0] + alpha[1] * b[1][0], alpha[0] * b[0][1] + alpha[1] * b[1][1]]
        })
        .collect()
}

/// ⟨σ₁⟩ from interaction-picture amplitudes at time t.
#[must_use]
pub fn sigma1_from_amplitudes(p: &TwoLevelParams, t: f64, a1: Complex64, a2: Complex64) -> f64 {
    let psi1 = a1 * Complex64::from_polar(1.0, p.delta * t / 2.0);
    let psi2 = a2 * Complex64::from_polar(1.0, -p.delta * t / 2.0);
    2.0 * (psi1.conj() * psi2).re
}

/// The three coefficient blocks of the ⟨σ₁⟩ expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSeries {
    pub delta_r: f64,
    pub omega: f64,
    /// a₂a₁*: the Δ_R line is 2Re(beat e^{−iΔ_R t})
    pub beat: Complex64,
    /// (2n+1, o_n), o_n = (|a₁|² − |a₂|²) Δ J_{2n+1} / ((n+½)ω)
    pub odd: Vec<(usize, f64)>,
    /// (2n, e_n), e_n = a₂*a₁ Δ J_{2n} / (nω); term −2Im(e_n e^{iΔ_R t}) sin(2nωt)
    pub even: Vec<(usize, Complex64)>,
    pub n_max: usize,
    /// bound on the dropped part of the series
    pub tail_bound: f64,
}

impl SpectrumSeries {
    #[must_use]
    pub fn eval(&self, t: f64) -> f64 {
        let w = self.omega;
        let beat = 2.0 * (self.beat * Complex64::from_polar(1.0, -self.delta_r * t)).re;
        let odd: f64 = self.odd.iter().map(|&(k, o)| o * ((k as f64 * w * t).cos() - 1.0)).sum();
        let rot = Complex64::from_polar(1.0, self.delta_r * t);
        let even: f64 = self.even.iter().map(|&(k, e)| -2.0 * (e * rot).im * (k as f64 * w * t).sin()).sum();
        beat + odd + even
    }

    #[must_use]
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["block", "harmonic", "re", "im"]);
        t.push(vec!["delta_r".into(), "0".into(), num(self.delta_r), num(0.0)]);
        t.push(vec!["beat".into(), "0".into(), num(self.beat.re), num(self.beat.im)]);
        for &(k, o) in &self.odd {
            t.push(vec!["odd".into(), k.to_string(), num(o), num(0.0)]);
        }
        for &(k, e) in &self.even {
            t.push(vec!["even".into(), k.to_string(), num(e.re), num(e.im)]);
        }
        t
    }
}

/// Series coefficients and ⟨σ₁⟩ on `times`. `n_max = None` picks the
/// truncation from [`bessel_truncation`].
#[must_use]
pub fn sigma1_spectrum(p: &TwoLevelParams, times: &[f64], n_max: Option<usize>) -> (SpectrumSeries, Vec<f64>) {
    let z = p.bessel_argument();
    let n_max = n_max.unwrap_or_else(|| bessel_truncation(z).div_ceil(2)).max(1);
    let j = bessel_j_all(2 * n_max + 1, z);
    let w = p.omega;
    let pop = p.a1.norm_sqr() - p.a2.norm_sqr();
    let mix = p.a2.conj() * p.a1;
    let series = SpectrumSeries {
        delta_r: p.delta * j[0],
        omega: w,
        beat: p.a2 * p.a1.conj(),
        odd: (0..=n_max).map(|n| (2 * n + 1, pop * p.delta * j[2 * n + 1] / ((n as f64 + 0.5) * w))).collect(),
        even: (1..=n_max).map(|n| (2 * n, mix * (p.delta * j[2 * n] / (n as f64 * w)))).collect(),
        n_max,
        // each dropped order k contributes at most 4|Δ||J_k|/(kω)
        tail_bound: 4.0 * p.delta / (w * (2 * n_max + 2) as f64) * bessel_tail(z, 2 * n_max + 2),
    };
    let values = times.iter().map(|&t| series.eval(t)).collect();
    (series, values)
}

/// ⟨σ₁⟩ by direct integration of the interaction-picture equation, and the
/// largest norm drift seen.
pub fn direct_sigma1(p: &TwoLevelParams, times: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
    let pc = *p;
    let amps = direct_integrate(
        move |t| interaction_matrix(&pc, t) * Complex64::new(pc.rabi, 0.0),
        1.0,
        &[p.a1, p.a2],
        times,
        tol,
    )?;
    let drift = amps.iter().map(|a| (a[0].norm_sqr() + a[1].norm_sqr() - 1.0).abs()).fold(0.0, f64::max);
    let values = times.iter().zip(&amps).map(|(&t, a)| sigma1_from_amplitudes(p, t, a[0], a[1])).collect();
    Ok((values, drift))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// ‖analytic − direct‖₂ / ‖direct‖₂ on the grid
    pub l2_relative: f64,
    pub max_abs: f64,
    pub norm_drift: f64,
    pub analytic: Vec<f64>,
    pub direct: Vec<f64>,
}

pub fn validate_against_direct(p: &TwoLevelParams, times: &[f64]) -> Result<ValidationReport> {
    let (_, analytic) = sigma1_spectrum(p, times, None);
    let (direct, norm_drift) = direct_sigma1(p, times, 1e-12)?;
    let diff: f64 = analytic.iter().zip(&direct).map(|(a, d)| (a - d).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = direct.iter().map(|d| d * d).sum::<f64>().sqrt();
    let max_abs = analytic.iter().zip(&direct).map(|(a, d)| (a - d).abs()).fold(0.0, f64::max);
    Ok(ValidationReport { l2_relative: diff / scale, max_abs, norm_drift, analytic, direct })
}

/// `periods` drive periods sampled `per_period` times each, endpoint excluded.
#[must_use]
pub fn periodic_grid(p: &TwoLevelParams, periods: usize, per_period: usize) -> Vec<f64> {
    let n = periods * per_period;
    let span = periods as f64 * p.period();
    (0..n).map(|i| span * i as f64 / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicBin {
    pub order: usize,
    pub amplitude: f64,
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft: Arc<dyn rustfft::Fft<f64>> =
        if inverse { planner.plan_fft_inverse(buf.len()) } else { planner.plan_fft_forward(buf.len()) };
    fft.process(buf);
}

/// Projection of a series onto the harmonics of ω (bins at multiples of the
/// period count).
fn harmonic_part(x: &[f64], periods: usize) -> Vec<f64> {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    for (i, b) in buf.iter_mut().enumerate() {
        if i % periods != 0 {
            *b = Complex64::new(0.0, 0.0);
        }
    }
    fft_in_place(&mut buf, true);
    buf.iter().map(|b| b.re / n as f64).collect()
}

fn check_periodic(values: &[f64], periods: usize) -> Result<()> {
    if periods == 0 || values.is_empty() || !values.len().is_multiple_of(periods) {
        return Err(Error::invalid("series length must be a positive multiple of the period count"));
    }
    Ok(())
}

/// Removes the incommensurate line at frequency `beat` from a series on
/// [`periodic_grid`]. Its cos/sin amplitudes are fitted jointly with all
/// harmonics of ω (least squares), so the harmonic bins left behind carry
/// no leakage from that line.
pub fn remove_beat_line(values: &[f64], times: &[f64], periods: usize, beat: f64) -> Result<Vec<f64>> {
    check_periodic(values, periods)?;
    if times.len() != values.len() {
        return Err(Error::invalid("times and values differ in length"));
    }
    let regs: Vec<Vec<f64>> = vec![
        times.iter().map(|t| (beat * t).cos()).collect(),
        times.iter().map(|t| (beat * t).sin()).collect(),
    ];
    let perp: Vec<Vec<f64>> = regs
        .iter()
        .map(|r| r.iter().zip(harmonic_part(r, periods)).map(|(a, b)| a - b).collect())
        .collect();
    let hy = harmonic_part(values, periods);
    let y: Vec<f64> = values.iter().zip(&hy).map(|(a, b)| a - b).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (g00, g01, g11) = (dot(&perp[0], &perp[0]), dot(&perp[0], &perp[1]), dot(&perp[1], &perp[1]));
    let (r0, r1) = (dot(&perp[0], &y), dot(&perp[1], &y));
    let det = g00 * g11 - g01 * g01;
    if !(det.abs() > 1e-300) {
        // the line is itself (numerically) a harmonic; nothing to separate
        return Ok(values.to_vec());
    }
    let c0 = (g11 * r0 - g01 * r1) / det;
    let c1 = (g00 * r1 - g01 * r0) / det;
    Ok(values.iter().enumerate().map(|(i, v)| v - c0 * regs[0][i] - c1 * regs[1][i]).collect())
}

/// Amplitudes |F_k|/N at multiples of ω for a series sampled on
/// [`periodic_grid`] (rectangular window, k = 0..=max_order).
pub fn fft_harmonic_bins(values: &[f64], periods: usize, max_order: usize) -> Result<Vec<HarmonicBin>> {
    check_periodic(values, periods)?;
    let n = values.len();
    if max_order * periods >= n / 2 {
        return Err(Error::invalid(format!("order {max_order} is above the Nyquist limit of this sampling")));
    }
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    let scale = 1.0 / n as f64;
    Ok((0..=max_order).map(|k| HarmonicBin { order: k, amplitude: buf[k * periods].norm() * scale }).collect())
}

/// Harmonic bins of the direct ⟨σ₁⟩ over `periods` drive periods, with the
/// Δ_R line separated first.
pub fn direct_harmonic_bins(p: &TwoLevelParams, periods: usize, per_period: usize, max_order: usize) -> Result<Vec<HarmonicBin>> {
    let times = periodic_grid(p, periods, per_period);
    let (v, _) = direct_sigma1(p, &times, 1e-12)?;
    let v = remove_beat_line(&v, &times, periods, p.renormalized_splitting())?;
    fft_harmonic_bins(&v, periods, max_order)
}

/// Largest ratio of an even bin 2n (n ≥ 1) to the larger of its odd
/// neighbours, over orders up to `max_order`.
#[must_use]
pub fn even_to_odd_ratio(bins: &[HarmonicBin]) -> f64 {
    bins.iter()
        .filter(|b| b.order >= 2 && b.order % 2 == 0 && b.order + 1 < bins.len())
        .map(|b| b.amplitude / bins[b.order - 1].amplitude.max(bins[b.order + 1].amplitude))
        .fold(0.0, f64::max)
}

/// Largest ratio of an odd bin to the larger of its even neighbours (order
/// 1 is compared with order 2 only).
#[must_use]
pub fn odd_to_even_ratio(bins: &[HarmonicBin]) -> f64 {
    bins.iter()
        .filter(|b| b.order % 2 == 1 && b.order + 1 < bins.len())
        .map(|b| {
            let below = if b.order > 1 { bins[b.order - 1].amplitude } else { 0.0 };
            b.amplitude / below.max(bins[b.order + 1].amplitude)
        })
        .fold(0.0, f64::max)
}

/// First positive zero of J₀, i.e. the 2Ω/ω at which Δ_R changes sign, by
/// bisection.
#[must_use]
pub fn delta_r_node() -> f64 {
    let j0 = |z: f64| bessel_j_all(0, z)[0];
    let (mut lo, mut hi) = (2.0, 3.0);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if j0(lo) * j0(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
