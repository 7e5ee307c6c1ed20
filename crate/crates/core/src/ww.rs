//! Ionization width, a.c. Stark shift and the resonant odd-harmonic
//! spectrum of a hydrogenic ground state coupled to plane-wave continuum
//! states through the kick drive.
//!
//! Rates are golden-rule sums over channels 2k+1 with
//! |⟨0|x/a_B|p⟩|² from [`planewave_dipole_sq`]; Σ_p → ∫d³p/(2π)³.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, Surd};
use crate::export::{num, Table};
use crate::specfun::quadrature::{adaptive, adaptive_semi_infinite, sphere_integrate};
use crate::specfun::{planewave_dipole_sq, BoundState};
use crate::units::{au_to_ev, cutoff_index, lifetime_fs, HydrogenicAtom, LaserField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Channel {
    pub n: u32,
    /// harmonic order 2n+1
    pub order: u32,
    /// contribution to Γ, a.u.
    pub rate: f64,
    /// contribution to δω/2, a.u. (0 for the closed form)
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayResult {
    /// Γ, a.u. of energy
    pub gamma: f64,
    pub gamma_ev: f64,
    /// δω/2 over the same channels; `None` from the closed form
    pub stark_half: Option<f64>,
    /// ħ/Γ in fs
    pub lifetime_fs: f64,
    pub n0: u32,
    pub n_max: u32,
    /// upper bound on the Γ channels past n_max
    pub tail_bound: f64,
    /// change of δω/2 when the excision radius is halved
    pub pv_stability: Option<f64>,
    pub channels: Vec<Channel>,
}

struct Drive {
    omega: f64,
    ib: f64,
    up: f64,
    gamma: f64,
    eps: f64,
    bohr: f64,
    n0: u32,
}

fn drive(atom: &HydrogenicAtom, laser: &LaserField) -> Drive {
    let up = laser.ponderomotive();
    Drive {
        omega: laser.omega,
        ib: atom.ionization_energy,
        up,
        gamma: (atom.ionization_energy / (2.0 * up)).sqrt(),
        eps: 2.0 / PI * atom.bohr_radius / laser.quiver_amplitude(),
        bohr: atom.bohr_radius,
        n0: cutoff_index(laser.omega, atom.ionization_energy),
    }
}

fn finish(d: &Drive, n_max: u32, channels: Vec<Channel>, tail: f64, stark: Option<(f64, f64)>) -> DecayResult {
    let gamma: f64 = channels.iter().map(|c| c.rate).sum();
    let gamma_ev = au_to_ev(gamma);
    DecayResult {
        gamma,
        gamma_ev,
        stark_half: stark.map(|s| s.0),
        lifetime_fs: if gamma > 0.0 { lifetime_fs(gamma_ev) } else { f64::INFINITY },
        n0: d.n0,
        n_max,
        tail_bound: tail,
        pv_stability: stark.map(|s| s.1),
        channels,
    }
}

fn check_channels(d: &Drive, n_max: u32) -> Result<()> {
    if n_max < d.n0 {
        return Err(Error::EmptyChannels { n_max, n0: d.n0 });
    }
    Ok(())
}

/// Closed-form Γ = (256/3π²)(ω²/U_p)γ² Σ_{n0..=n_max} s^{5/2}(1−s)^{3/2},
/// s = I_B/((2n+1)ω). The tail bound uses s^{5/2} ≤ (I_B/ω)^{5/2}(2n+1)^{−5/2}.
pub fn gamma_closed(atom: &HydrogenicAtom, laser: &LaserField, n_max: u32) -> Result<DecayResult> {
    let d = drive(atom, laser);
    check_channels(&d, n_max)?;
    let pre = 256.0 / (3.0 * PI * PI) * d.omega * d.omega / d.up * d.gamma * d.gamma;
    let channels = (d.n0..=n_max)
        .map(|n| {
            let order = 2 * n + 1;
            let s = d.ib / (f64::from(order) * d.omega);
            let rate = if s >= 1.0 { 0.0 } else { pre * s.powf(2.5) * (1.0 - s).powf(1.5) };
            Channel { n, order, rate, shift: 0.0 }
        })
        .collect();
    let tail = pre * (d.ib / d.omega).powf(2.5) * f64::from(2 * n_max + 1).powf(-1.5) / 3.0;
    Ok(finish(&d, n_max, channels, tail, None))
}

/// ∫dΩ Ω_x², by the sphere rule.
fn angular_factor() -> f64 {
    static F: OnceLock<f64> = OnceLock::new();
    *F.get_or_init(|| {
        sphere_integrate(
            |th, ph| {
                let x = th.sin() * ph.cos();
                x * x
            },
            1e-14,
        )
        .expect("polynomial integrand converges")
    })
}

/// p ∫dΩ |⟨0|x|p⟩|² / (2π)³ at energy E = p²/2: the continuum density the
/// channel sums integrate against dE.
fn continuum_density(e: f64, atom: &HydrogenicAtom) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    let p = (2.0 * e).sqrt();
    // |⟨0|x|p⟩|² depends on direction only through p_x²
    p * planewave_dipole_sq([p, 0.0, 0.0], atom) * angular_factor() / (8.0 * PI * PI * PI)
}

/// PV ∫_0^∞ h(E)/(Δ − E) dE by symmetric excision of radius δ around Δ.
fn excised<F: Fn(f64) -> f64 + Copy>(h: F, delta: f64, r: f64) -> Result<f64> {
    let f = move |e: f64| h(e) / (delta - e);
    let tol = 1e-11;
    let left = adaptive(f, 0.0, delta - r, tol)?;
    let mid = adaptive(f, delta + r, 2.0 * delta, tol)?;
    let right = adaptive_semi_infinite(f, 2.0 * delta, tol)?;
    Ok(left + mid + right)
}

/// Principal value with Richardson extrapolation in the excision radius:
/// I(r) = PV + c₁r + c₃r³ + O(r⁵), two levels from r, r/2, r/4. Returns
/// (value, change against the one-level estimate).
fn principal_value<F: Fn(f64) -> f64 + Copy>(h: F, delta: f64, scale: f64) -> Result<(f64, f64)> {
    if delta <= 0.0 {
        let v = adaptive_semi_infinite(move |e| h(e) / (delta - e), 0.0, 1e-11)?;
        return Ok((v, 0.0));
    }
    let r = 0.02 * delta.min(scale);
    let i1 = excised(h, delta, r)?;
    let i2 = excised(h, delta, r / 2.0)?;
    let i4 = excised(h, delta, r / 4.0)?;
    let a = 2.0 * i2 - i1;
    let b = 2.0 * i4 - i2;
    let c = (8.0 * b - a) / 7.0;
    Ok((c, (c - b).abs()))
}

/// Γ and δω/2 from the channel sums with the momentum integral done by
/// quadrature: on-shell for Γ, principal value for δω/2. Channels
/// k = 0..=n_max enter δω/2; that sum grows with n_max, so the value is
/// only meaningful together with its cutoff.
pub fn gamma_numeric(atom: &HydrogenicAtom, laser: &LaserField, n_max: u32) -> Result<DecayResult> {
    let d = drive(atom, laser);
    check_channels(&d, n_max)?;
    let coupling = d.eps * d.eps * d.gamma * d.gamma * d.omega * d.omega / (d.bohr * d.bohr);
    let kappa2 = 1.0 / (d.bohr * d.bohr);
    let atom = *atom;
    let h = move |e: f64| continuum_density(e, &atom);
    let all = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let order = 2 * n + 1;
            let k2 = f64::from(order).powi(2);
            let delta = f64::from(order) * d.omega - d.ib;
            // δ(E − Δ) picks the shell E = Δ
            let rate = if delta > 0.0 { 2.0 * PI * coupling * k2 * h(delta) } else { 0.0 };
            let (pv, stab) = principal_value(h, delta, kappa2)?;
            Ok((Channel { n, order, rate, shift: coupling * k2 * pv }, coupling * k2 * stab))
        })
        .collect::<Result<Vec<_>>>()?;
    let stark: f64 = all.iter().map(|c| c.0.shift).sum();
    let stab: f64 = all.iter().map(|c| c.1).sum();
    let channels: Vec<Channel> = all.into_iter().map(|c| c.0).collect();
    // the closed channels below n0 carry shift only; keep them listed
    let closed = gamma_closed(&atom, laser, n_max)?;
    Ok(finish(&d, n_max, channels, closed.tail_bound, Some((stark, stab))))
}

/// x^{3/2}/(x + 2γ²/3)⁵, zero for x ≤ 0.
#[must_use]
pub fn envelope_shape(x: f64, gamma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    x.powf(1.5) / (x + 2.0 * gamma * gamma / 3.0).powi(5)
}

/// Maximum of [`envelope_shape`] over x > 0.
#[must_use]
pub fn envelope_peak(gamma: f64) -> f64 {
    2.0 * gamma * gamma / 7.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicLine {
    pub n: u32,
    pub order: u32,
    /// x_n = ((2n+1)ω − I_B)/(3U_p)
    pub x: f64,
    /// dipole amplitude, a.u.
    pub amplitude: f64,
    /// (2n+1)ω + δω/2
    pub center: f64,
    /// half width at half maximum of the line, = Γ
    pub hwhm: f64,
}

impl HarmonicLine {
    /// Moves the line by δω/2 and gives it width Γ.
    #[must_use]
    pub fn with_decay(mut self, decay: &DecayResult) -> Self {
        self.center += decay.stark_half.unwrap_or(0.0);
        self.hwhm = decay.gamma;
        self
    }
}

/// Line n of the closed-form resonant spectrum, unshifted and unbroadened.
pub fn harmonic_envelope(atom: &HydrogenicAtom, laser: &LaserField, n: u32) -> Result<HarmonicLine> {
    let d = drive(atom, laser);
    if n < d.n0 {
        return Err(Error::BelowThreshold { n, n0: d.n0 });
    }
    let order = 2 * n + 1;
    let x = ((f64::from(order) * d.omega - d.ib) / (3.0 * d.up)).max(0.0);
    let pre = 2.0 / PI * 2f64.powf(8.5) / 3f64.powf(4.5) * atom.z_eff * d.omega / (d.up * d.up);
    let amplitude = pre * d.gamma.powi(5) * envelope_shape(x, d.gamma);
    Ok(HarmonicLine { n, order, x, amplitude, center: f64::from(order) * d.omega, hwhm: 0.0 })
}

/// Lines n0..=n_max carrying the decay's shift and width.
pub fn harmonic_lines(
    atom: &HydrogenicAtom,
    laser: &LaserField,
    decay: &DecayResult,
    n_max: u32,
) -> Result<Vec<HarmonicLine>> {
    let n0 = cutoff_index(laser.omega, atom.ionization_energy);
    if n_max < n0 {
        return Err(Error::EmptyChannels { n_max, n0 });
    }
    (n0..=n_max).map(|n| harmonic_envelope(atom, laser, n).map(|l| l.with_decay(decay))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipoleTimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// the common e^{−Γ|t|} envelope rate
    pub gamma: f64,
    pub stark_half: f64,
    pub lines: Vec<HarmonicLine>,
}

/// Symmetric grid over ±`efolds`/Γ with at least `per_period` samples per
/// laser period.
pub fn time_grid(laser: &LaserField, gamma: f64, efolds: f64, per_period: usize) -> Result<Vec<f64>> {
    if !(gamma > 0.0) || !(efolds > 0.0) || per_period < 2 {
        return Err(Error::invalid("time grid needs Γ > 0, e-folds > 0 and ≥ 2 samples per period"));
    }
    let t_max = efolds / gamma;
    let dt = laser.period() / per_period as f64;
    let half = (t_max / dt).ceil();
    if half > 5e6 {
        return Err(Error::regime(format!(
            "time grid would need {} samples; Γ is too small relative to ω",
            2.0 * half + 1.0
        )));
    }
    let half = half as i64;
    Ok((-half..=half).map(|i| i as f64 * dt).collect())
}

/// ⟨x⟩(t) = Σ A_n cos(((2n+1)ω + δω/2)t) e^{−Γ|t|} over the given lines.
pub fn dipole_time_series(lines: &[HarmonicLine], gamma: f64, stark_half: f64, times: &[f64]) -> DipoleTimeSeries {
    let values = times
        .par_iter()
        .map(|&t| {
            let env = (-gamma * t.abs()).exp();
            lines.iter().map(|l| l.amplitude * (l.center * t).cos()).sum::<f64>() * env
        })
        .collect();
    DipoleTimeSeries { times: times.to_vec(), values, gamma, stark_half, lines: lines.to_vec() }
}

impl DipoleTimeSeries {
    /// ∫⟨x⟩(t) e^{iνt} dt by the trapezoid rule (real, the series is even).
    #[must_use]
    pub fn spectrum(&self, freqs: &[f64]) -> Vec<f64> {
        let t = &self.times;
        freqs
            .par_iter()
            .map(|&nu| {
                let mut s = 0.0;
                for i in 1..t.len() {
                    let a = self.values[i - 1] * (nu * t[i - 1]).cos();
                    let b = self.values[i] * (nu * t[i]).cos();
                    s += 0.5 * (a + b) * (t[i] - t[i - 1]);
                }
                s
            })
            .collect()
    }

    /// ∫⟨x⟩² dt on the grid.
    #[must_use]
    pub fn energy(&self) -> f64 {
        let t = &self.times;
        (1..t.len())
            .map(|i| 0.5 * (self.values[i - 1].powi(2) + self.values[i].powi(2)) * (t[i] - t[i - 1]))
            .sum()
    }

    /// Σ over lines of the Lorentzian areas (1/2π)∫|S|²dν = A²/(2Γ).
    #[must_use]
    pub fn lorentzian_energy(&self) -> f64 {
        self.lines.iter().map(|l| l.amplitude * l.amplitude / (2.0 * self.gamma)).sum()
    }

    #[must_use]
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["t", "x"]);
        for (a, b) in self.times.iter().zip(&self.values) {
            t.push(vec![num(*a), num(*b)]);
        }
        t
    }
}

/// Lorentzian line sum Σ A_n Γ/(Γ² + (ν − ν_n)²), positive frequencies.
#[must_use]
pub fn analytic_spectrum(lines: &[HarmonicLine], freqs: &[f64]) -> Vec<f64> {
    freqs
        .iter()
        .map(|&nu| {
            lines
                .iter()
                .map(|l| {
                    let g = l.hwhm;
                    l.amplitude * (g / (g * g + (nu - l.center).powi(2)) + g / (g * g + (nu + l.center).powi(2)))
                })
                .sum()
        })
        .collect()
}

#[must_use]
pub fn line_table(lines: &[HarmonicLine]) -> Table {
    let mut t = Table::new(&["n", "order", "x_n", "amplitude", "center", "hwhm"]);
    for l in lines {
        t.push(vec![
            l.n.to_string(),
            l.order.to_string(),
            num(l.x),
            num(l.amplitude),
            num(l.center),
            num(l.hwhm),
        ]);
    }
    t
}

#[must_use]
pub fn channel_table(d: &DecayResult) -> Table {
    let mut t = Table::new(&["n", "order", "rate", "shift"]);
    for c in &d.channels {
        t.push(vec![c.n.to_string(), c.order.to_string(), num(c.rate), num(c.shift)]);
    }
    t
}

/// ⟨m|x/a_B|n⟩ with x the field axis, exact.
pub fn dipole_element(m: BoundState, n: BoundState) -> Result<Surd> {
    let ang = exact::angular_element(m.l, m.lz, 1, n.l, n.lz);
    if ang.is_zero() {
        return Ok(Surd::zero());
    }
    Ok(&exact::radial_integral(m.n, m.l, n.n, n.l, 1)? * &ang)
}

/// Ω_R = 2εγ(2k+1)ω|⟨m|x/a_B|n⟩| for resonance with harmonic 2k+1.
pub fn rabi_frequency(
    m: BoundState,
    n: BoundState,
    k: u32,
    atom: &HydrogenicAtom,
    laser: &LaserField,
) -> Result<f64> {
    let d = drive(atom, laser);
    let x = dipole_element(m, n)?.to_f64().abs();
    Ok(2.0 * d.eps * d.gamma * f64::from(2 * k + 1) * d.omega * x)
}
