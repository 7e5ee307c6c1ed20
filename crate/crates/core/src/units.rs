//! Atomic units, SI/eV converters and the regime quantities derived from a
//! laser field and a hydrogenic atom.
//!
//! Conversions go through a self-consistent set derived from the exact SI
//! constants (h, e, c) plus the electron mass and the fine-structure constant,
//! so algebraically equal expressions agree to roundoff. The [`codata`]
//! literals are kept for cross-checking.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 recommended values, as published.
pub mod codata {
    /// Planck constant, J s (exact).
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Elementary charge, C (exact).
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Speed of light, m/s (exact).
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    /// Electron mass, kg.
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    /// Fine-structure constant.
    pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

    /// Bohr radius, m.
    pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
    /// Hartree energy, J.
    pub const HARTREE_ENERGY: f64 = 4.359_744_722_207_1e-18;
    /// Hartree energy, eV.
    pub const HARTREE_ENERGY_EV: f64 = 27.211_386_245_988;
    /// Atomic unit of time, s.
    pub const ATOMIC_TIME: f64 = 2.418_884_326_585_7e-17;
    /// Atomic unit of electric field, V/m.
    pub const ATOMIC_FIELD: f64 = 5.142_206_747_63e11;
    /// Reduced Planck constant, eV s.
    pub const HBAR_EV_S: f64 = 6.582_119_569e-16;
    /// Vacuum permittivity, F/m.
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
}

/// ħ in J s.
pub const HBAR: f64 = codata::PLANCK / (2.0 * PI);
/// Bohr radius in m, ħ/(mₑ c α).
pub const BOHR_RADIUS_M: f64 =
    HBAR / (codata::ELECTRON_MASS * codata::SPEED_OF_LIGHT * codata::FINE_STRUCTURE);
/// Hartree energy in J, mₑc²α².
pub const HARTREE_J: f64 = codata::ELECTRON_MASS
    * codata::SPEED_OF_LIGHT
    * codata::SPEED_OF_LIGHT
    * codata::FINE_STRUCTURE
    * codata::FINE_STRUCTURE;
/// Hartree energy in eV.
pub const HARTREE_EV: f64 = HARTREE_J / codata::ELEMENTARY_CHARGE;
/// ħ in eV s.
pub const HBAR_EV_S: f64 = HBAR / codata::ELEMENTARY_CHARGE;
/// Atomic unit of time in s.
pub const AU_TIME_S: f64 = HBAR / HARTREE_J;
/// Atomic unit of electric field in V/m.
pub const AU_FIELD_V_PER_M: f64 = HARTREE_J / (codata::ELEMENTARY_CHARGE * BOHR_RADIUS_M);
/// ε₀ in F/m, e²/(2αhc).
pub const EPSILON0: f64 = codata::ELEMENTARY_CHARGE * codata::ELEMENTARY_CHARGE
    / (2.0 * codata::FINE_STRUCTURE * codata::PLANCK * codata::SPEED_OF_LIGHT);
/// Cycle-averaged intensity of a linearly polarized wave of unit atomic field
/// amplitude, ½cε₀E², in W/cm².
pub const AU_INTENSITY_W_PER_CM2: f64 =
    0.5 * codata::SPEED_OF_LIGHT * EPSILON0 * AU_FIELD_V_PER_M * AU_FIELD_V_PER_M * 1e-4;

#[must_use]
pub fn ev_to_au(ev: f64) -> f64 {
    ev / HARTREE_EV
}

#[must_use]
pub fn au_to_ev(au: f64) -> f64 {
    au * HARTREE_EV
}

/// Angular frequency (a.u.) of light with vacuum wavelength `nm`.
#[must_use]
pub fn wavelength_nm_to_omega(nm: f64) -> f64 {
    2.0 * PI * codata::SPEED_OF_LIGHT / (nm * 1e-9) * AU_TIME_S
}

/// Angular frequency (a.u.) for an ordinary frequency in Hz.
#[must_use]
pub fn hz_to_omega(hz: f64) -> f64 {
    2.0 * PI * hz * AU_TIME_S
}

#[must_use]
pub fn field_si_to_au(v_per_m: f64) -> f64 {
    v_per_m / AU_FIELD_V_PER_M
}

/// Peak field (a.u.) for a cycle-averaged intensity, linear polarization.
#[must_use]
pub fn intensity_to_field(w_per_cm2: f64) -> f64 {
    (w_per_cm2 / AU_INTENSITY_W_PER_CM2).sqrt()
}

/// Lifetime ħ/Γ in femtoseconds for a width given in eV.
#[must_use]
pub fn lifetime_fs(gamma_ev: f64) -> f64 {
    HBAR_EV_S / gamma_ev * 1e15
}

/// Inverse of [`lifetime_fs`].
#[must_use]
pub fn width_ev_from_lifetime_fs(fs: f64) -> f64 {
    HBAR_EV_S / (fs * 1e-15)
}

/// Monochromatic field E cos(ωt + φ) polarized along x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserField {
    pub field: f64,
    pub omega: f64,
    pub phase: f64,
}

impl LaserField {
    pub fn new(field: f64, omega: f64, phase: f64) -> Result<Self> {
        if !(field >= 0.0) || !field.is_finite() {
            return Err(Error::invalid(format!("field strength must be >= 0, got {field}")));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid(format!("angular frequency must be > 0, got {omega}")));
        }
        if !(0.0..2.0 * PI).contains(&phase) {
            return Err(Error::invalid(format!("phase must lie in [0, 2pi), got {phase}")));
        }
        Ok(Self { field, omega, phase })
    }

    /// Field from a cycle-averaged intensity and a vacuum wavelength.
    pub fn from_intensity_wavelength(w_per_cm2: f64, nm: f64) -> Result<Self> {
        if !(w_per_cm2 >= 0.0) || !(nm > 0.0) {
            return Err(Error::invalid("intensity must be >= 0 and wavelength > 0"));
        }
        Self::new(intensity_to_field(w_per_cm2), wavelength_nm_to_omega(nm), 0.0)
    }

    /// Ponderomotive energy E²/(4ω²).
    #[must_use]
    pub fn ponderomotive(&self) -> f64 {
        self.field * self.field / (4.0 * self.omega * self.omega)
    }

    /// Quiver amplitude E/ω².
    #[must_use]
    pub fn quiver_amplitude(&self) -> f64 {
        self.field / (self.omega * self.omega)
    }

    #[must_use]
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

/// Single active electron in a Coulomb potential of charge `z_eff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydrogenicAtom {
    pub z_eff: f64,
    pub ionization_energy: f64,
    pub bohr_radius: f64,
}

impl HydrogenicAtom {
    /// Hydrogenic defaults I_B = Z²/2, a_B = 1/Z.
    pub fn new(z_eff: f64) -> Result<Self> {
        Self::with_ionization(z_eff, z_eff * z_eff / 2.0)
    }

    pub fn with_ionization(z_eff: f64, ionization_energy: f64) -> Result<Self> {
        if !(z_eff > 0.0) || !z_eff.is_finite() {
            return Err(Error::invalid(format!("Z_eff must be > 0, got {z_eff}")));
        }
        if !(ionization_energy > 0.0) || !ionization_energy.is_finite() {
            return Err(Error::invalid(format!(
                "ionization energy must be > 0, got {ionization_energy}"
            )));
        }
        Ok(Self { z_eff, ionization_energy, bohr_radius: 1.0 / z_eff })
    }

    /// Hydrogen.
    #[must_use]
    pub fn hydrogen() -> Self {
        Self { z_eff: 1.0, ionization_energy: 0.5, bohr_radius: 1.0 }
    }
}

pub const DEFAULT_KICK_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub ponderomotive: f64,
    pub quiver_amplitude: f64,
    /// `None` at zero field, where γ is infinite.
    pub keldysh: Option<f64>,
    /// `None` at zero field, where λ_L = 0.
    pub epsilon: Option<f64>,
    pub excursion_ratio: f64,
    pub cutoff_index: u32,
    pub tunnelling: bool,
    pub kick_regime: bool,
    pub kick_threshold: f64,
}

/// Smallest n with (2n+1)ω ≥ I_B.
#[must_use]
pub fn cutoff_index(omega: f64, ionization_energy: f64) -> u32 {
    let x = (ionization_energy / omega - 1.0) / 2.0;
    if x <= 0.0 {
        return 0;
    }
    let mut n = x.ceil() as u32;
    // guard the rounding at exact thresholds
    while n > 0 && f64::from(2 * n - 1) * omega >= ionization_energy {
        n -= 1;
    }
    while f64::from(2 * n + 1) * omega < ionization_energy {
        n += 1;
    }
    n
}

pub fn derive_regime(laser: &LaserField, atom: &HydrogenicAtom) -> Result<RegimeReport> {
    derive_regime_with(laser, atom, DEFAULT_KICK_THRESHOLD)
}

pub fn derive_regime_with(
    laser: &LaserField,
    atom: &HydrogenicAtom,
    kick_threshold: f64,
) -> Result<RegimeReport> {
    if !(laser.omega > 0.0) {
        return Err(Error::invalid("angular frequency must be > 0"));
    }
    let up = laser.ponderomotive();
    let lambda = laser.quiver_amplitude();
    let (keldysh, epsilon) = if laser.field > 0.0 {
        (
            Some((atom.ionization_energy / (2.0 * up)).sqrt()),
            Some(2.0 / PI * atom.bohr_radius / lambda),
        )
    } else {
        (None, None)
    };
    Ok(RegimeReport {
        ponderomotive: up,
        quiver_amplitude: lambda,
        keldysh,
        epsilon,
        excursion_ratio: lambda / atom.bohr_radius,
        cutoff_index: cutoff_index(laser.omega, atom.ionization_energy),
        tunnelling: keldysh.is_some_and(|g| g < 1.0),
        kick_regime: epsilon.is_some_and(|e| e < kick_threshold),
        kick_threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Squeezing {
    pub omega: f64,
    pub shifted: f64,
    pub relative_shift: f64,
}

/// Ω = sqrt(ω² + 4πN/V) for N electrons in mode volume V (a.u.).
pub fn squeezing_shift(omega: f64, volume: f64, electrons: f64) -> Result<Squeezing> {
    if !(volume > 0.0) {
        return Err(Error::invalid(format!("mode volume must be > 0, got {volume}")));
    }
    if !(electrons >= 0.0) {
        return Err(Error::invalid("density scaling must be >= 0"));
    }
    let shifted = (omega * omega + 4.0 * PI * electrons / volume).sqrt();
    Ok(Squeezing { omega, shifted, relative_shift: (shifted - omega) / omega })
}

/// Ratio of Rydberg orbit size to quiver amplitude in the two equivalent SI
/// forms n₀²a_B/λ_L and n₀²ħω/sqrt(8 I_B U_p), with I_B the hydrogen ground
/// state binding energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RydbergRatio {
    pub n0: u32,
    pub field_v_per_m: f64,
    pub frequency_hz: f64,
    pub quiver_amplitude_m: f64,
    pub excursion_form: f64,
    pub energy_form: f64,
}

pub fn rydberg_kick_ratio(n0: u32, field_v_per_m: f64, frequency_hz: f64) -> Result<RydbergRatio> {
    if n0 == 0 {
        return Err(Error::invalid("n0 must be >= 1"));
    }
    if !(field_v_per_m > 0.0) || !(frequency_hz > 0.0) {
        return Err(Error::invalid("field and frequency must be > 0"));
    }
    let e = codata::ELEMENTARY_CHARGE;
    let m = codata::ELECTRON_MASS;
    let w = 2.0 * PI * frequency_hz;
    let n2 = f64::from(n0) * f64::from(n0);
    let lambda = e * field_v_per_m / (m * w * w);
    let up = e * e * field_v_per_m * field_v_per_m / (4.0 * m * w * w);
    let ib = HARTREE_J / 2.0;
    Ok(RydbergRatio {
        n0,
        field_v_per_m,
        frequency_hz,
        quiver_amplitude_m: lambda,
        excursion_form: n2 * BOHR_RADIUS_M / lambda,
        energy_form: n2 * HBAR * w / (8.0 * ib * up).sqrt(),
    })
}

/// Two microwave ionization scenarios (field V/m, frequency Hz, n₀) with the
/// ratio values quoted for them in the literature.
pub const LITERATURE_RYDBERG: [(f64, f64, u32, f64); 2] =
    [(250.0, 12.4e9, 98, 0.0027), (2100.0, 18.0e9, 64, 0.00029)];

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn derived_constants_match_codata_literals() {
        assert!(rel(BOHR_RADIUS_M, codata::BOHR_RADIUS) < 1e-9);
        assert!(rel(HARTREE_J, codata::HARTREE_ENERGY) < 1e-9);
        assert!(rel(HARTREE_EV, codata::HARTREE_ENERGY_EV) < 1e-9);
        assert!(rel(AU_TIME_S, codata::ATOMIC_TIME) < 1e-9);
        assert!(rel(AU_FIELD_V_PER_M, codata::ATOMIC_FIELD) < 1e-9);
        assert!(rel(HBAR_EV_S, codata::HBAR_EV_S) < 1e-9);
        assert!(rel(EPSILON0, codata::VACUUM_PERMITTIVITY) < 1e-9);
    }

    #[test]
    fn intensity_unit_two_ways() {
        // E_h/(e a0) route vs. 1/(4 pi eps0) e/a0^2 route for the field unit
        let coulomb = codata::ELEMENTARY_CHARGE
            / (4.0 * PI * codata::VACUUM_PERMITTIVITY * codata::BOHR_RADIUS * codata::BOHR_RADIUS);
        assert!(rel(AU_FIELD_V_PER_M, coulomb) < 1e-9);
        assert!(rel(AU_INTENSITY_W_PER_CM2, 3.509_445e16) < 1e-6);
    }

    #[test]
    fn wavelength_800nm() {
        let w = wavelength_nm_to_omega(800.0);
        assert!(rel(au_to_ev(w), 1.239_841_98e3 / 800.0) < 1e-8);
        assert!((w - 0.056_954).abs() < 1e-5);
    }

    #[test]
    fn regime_example_values() {
        let laser = LaserField::new(0.1, 0.057, 0.0).unwrap();
        let r = derive_regime(&laser, &HydrogenicAtom::hydrogen()).unwrap();
        assert!((r.quiver_amplitude - 0.1 / (0.057 * 0.057)).abs() < 1e-12);
        assert!((r.quiver_amplitude - 30.78).abs() < 0.01);
        assert!((r.ponderomotive - 0.7695).abs() < 1e-4);
    }

    #[test]
    fn keldysh_identity() {
        for &(z, e, w) in &[(1.0, 0.1, 0.057), (2.3, 0.5, 0.2), (0.7, 0.01, 0.003)] {
            let atom = HydrogenicAtom::new(z).unwrap();
            let laser = LaserField::new(e, w, 0.0).unwrap();
            let r = derive_regime(&laser, &atom).unwrap();
            let g = r.keldysh.unwrap();
            assert!(rel(g, z * w / e) < 1e-12);
            assert!(rel(r.epsilon.unwrap() * r.quiver_amplitude, 2.0 / PI / z) < 1e-14);
        }
    }

    #[test]
    fn keldysh_unity_at_two_up() {
        let laser = LaserField::new(0.2, 0.1, 0.0).unwrap();
        let up = laser.ponderomotive();
        let atom = HydrogenicAtom::with_ionization(1.0, 2.0 * up).unwrap();
        let r = derive_regime(&laser, &atom).unwrap();
        assert!((r.keldysh.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_field_is_out_of_regime() {
        let laser = LaserField::new(0.0, 0.057, 0.0).unwrap();
        let r = derive_regime(&laser, &HydrogenicAtom::hydrogen()).unwrap();
        assert_eq!(r.ponderomotive, 0.0);
        assert_eq!(r.quiver_amplitude, 0.0);
        assert!(r.keldysh.is_none());
        assert!(!r.tunnelling);
    }

    #[test]
    fn zero_frequency_rejected() {
        assert!(LaserField::new(0.1, 0.0, 0.0).is_err());
        let bad = LaserField { field: 0.1, omega: 0.0, phase: 0.0 };
        assert!(derive_regime(&bad, &HydrogenicAtom::hydrogen()).is_err());
    }

    #[test]
    fn cutoff_at_exact_threshold() {
        // I_B = 5ω exactly: (2n0+1)ω >= I_B > (2n0-1)ω gives n0 = 2
        assert_eq!(cutoff_index(0.1, 0.5), 2);
        assert_eq!(cutoff_index(1.0, 0.5), 0);
        assert_eq!(cutoff_index(0.057, 0.5), 4);
    }

    #[test]
    fn squeezing_examples() {
        let s = squeezing_shift(1.3, 4.0 * PI / (3.0 * 1.69), 1.0).unwrap();
        assert!(rel(s.shifted, 2.6) < 1e-14);
        let far = squeezing_shift(0.057, 1e300, 1.0).unwrap();
        assert_eq!(far.shifted, 0.057);
        let s = squeezing_shift(0.057, 1e9, 1.0).unwrap();
        let direct = (0.057f64.powi(2) + 4.0 * PI * 1e-9).sqrt();
        assert!(rel(s.shifted, direct) < 1e-15);
        assert!(squeezing_shift(0.057, 0.0, 1.0).is_err());
    }

    #[test]
    fn rydberg_forms_agree() {
        for &(e, f, n0, _) in &LITERATURE_RYDBERG {
            let r = rydberg_kick_ratio(n0, e, f).unwrap();
            assert!(rel(r.excursion_form, r.energy_form) < 1e-12);
        }
        let a = rydberg_kick_ratio(10, 250.0, 12.4e9).unwrap();
        let b = rydberg_kick_ratio(20, 250.0, 12.4e9).unwrap();
        assert!(rel(b.excursion_form, 4.0 * a.excursion_form) < 1e-14);
    }

    #[test]
    fn lifetime_round_trip() {
        assert!((lifetime_fs(0.012) - 54.85).abs() < 0.01);
        assert!((lifetime_fs(0.01) - 65.82).abs() < 0.01);
        assert!(rel(width_ev_from_lifetime_fs(lifetime_fs(0.0123)), 0.0123) < 1e-15);
    }
}
