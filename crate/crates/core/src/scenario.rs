//! Scenario files: a versioned JSON description of the atom, the laser and
//! per-command options.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "atom": { "Z_eff": 1.0, "I_B_eV": 13.6 },
//!   "laser": { "wavelength_nm": 800.0, "intensity_Wcm2": 1e14, "phase_rad": 0.0 },
//!   "options": { "max_n": 4 }
//! }
//! ```
//!
//! The laser block takes exactly one of `wavelength_nm`, `photon_eV`,
//! `frequency_Hz` and exactly one of `intensity_Wcm2`, `field_Vm`. Unknown
//! keys anywhere are rejected, all of them named in one error.
//! [`Scenario::resolved`] fills every default so that a resolved scenario
//! written back out describes the run completely and parses again.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::units::{
    au_to_ev, ev_to_au, field_si_to_au, hz_to_omega, intensity_to_field, wavelength_nm_to_omega, HydrogenicAtom,
    LaserField,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    #[serde(rename = "Z_eff")]
    pub z_eff: f64,
    /// defaults to the hydrogenic Z²/2 Hartree
    #[serde(rename = "I_B_eV", default, skip_serializing_if = "Option::is_none")]
    pub ionization_ev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_nm: Option<f64>,
    #[serde(rename = "photon_eV", default, skip_serializing_if = "Option::is_none")]
    pub photon_ev: Option<f64>,
    #[serde(rename = "frequency_Hz", default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    #[serde(rename = "intensity_Wcm2", default, skip_serializing_if = "Option::is_none")]
    pub intensity_w_cm2: Option<f64>,
    #[serde(rename = "field_Vm", default, skip_serializing_if = "Option::is_none")]
    pub field_v_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_rad: Option<f64>,
}

/// Two-level model parameters in units of the laser frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLevelSpec {
    pub delta_over_omega: f64,
    pub rabi_over_omega: f64,
    /// (re, im) of the lower-level amplitude
    pub a1: [f64; 2],
    pub a2: [f64; 2],
    pub periods: usize,
    pub per_period: usize,
}

impl Default for TwoLevelSpec {
    fn default() -> Self {
        Self { delta_over_omega: 0.05, rabi_over_omega: 20.0, a1: [1.0, 0.0], a2: [0.0, 0.0], periods: 16, per_period: 256 }
    }
}

/// Random Hermitian family and ε sweep for the convergence demo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BirkhoffSpec {
    pub dim: usize,
    pub seed: u64,
    pub coupling: f64,
    pub epsilon: f64,
    pub halvings: u32,
    pub t_end: f64,
}

impl Default for BirkhoffSpec {
    fn default() -> Self {
        Self { dim: 4, seed: 1, coupling: 0.3, epsilon: 0.04, halvings: 4, t_end: 3.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// principal-quantum-number bound (shifts, rigidity), channel cutoff
    /// (rate) or number of harmonic lines (spectrum)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<u32>,
    /// series truncation: Fourier order (kh), comb terms (kick), Bessel
    /// blocks (twolevel)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// number of grid points
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// ρ values for the rigidity scan
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_level: Option<TwoLevelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birkhoff: Option<BirkhoffSpec>,
}

pub const DEFAULT_MAX_N: u32 = 4;
pub const DEFAULT_TRUNCATION: usize = 32;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_GRID: usize = 201;
pub const DEFAULT_RHO: [f64; 4] = [10.0, 30.0, 100.0, 300.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub atom: AtomSpec,
    pub laser: LaserSpec,
    #[serde(default)]
    pub options: Options,
}

const TOP_KEYS: &[&str] = &["schema_version", "atom", "laser", "options"];
const ATOM_KEYS: &[&str] = &["Z_eff", "I_B_eV"];
const LASER_KEYS: &[&str] =
    &["wavelength_nm", "photon_eV", "frequency_Hz", "intensity_Wcm2", "field_Vm", "phase_rad"];
const OPTION_KEYS: &[&str] = &["max_n", "truncation", "tolerance", "grid", "rho", "two_level", "birkhoff"];
const TWO_LEVEL_KEYS: &[&str] = &["delta_over_omega", "rabi_over_omega", "a1", "a2", "periods", "per_period"];
const BIRKHOFF_KEYS: &[&str] = &["dim", "seed", "coupling", "epsilon", "halvings", "t_end"];

fn unknown_keys(v: &Value, known: &[&str], prefix: &str, out: &mut Vec<String>) {
    if let Value::Object(m) = v {
        out.extend(m.keys().filter(|k| !known.contains(&k.as_str())).map(|k| format!("{prefix}{k}")));
    }
}

fn collect_unknown(v: &Value) -> Vec<String> {
    let mut out = Vec::new();
    unknown_keys(v, TOP_KEYS, "", &mut out);
    unknown_keys(&v["atom"], ATOM_KEYS, "atom.", &mut out);
    unknown_keys(&v["laser"], LASER_KEYS, "laser.", &mut out);
    let o = &v["options"];
    unknown_keys(o, OPTION_KEYS, "options.", &mut out);
    unknown_keys(&o["two_level"], TWO_LEVEL_KEYS, "options.two_level.", &mut out);
    unknown_keys(&o["birkhoff"], BIRKHOFF_KEYS, "options.birkhoff.", &mut out);
    out
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::invalid(format!("scenario is not valid JSON: {e}")))?;
        Self::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<Self> {
        if !v.is_object() {
            return Err(Error::invalid("scenario must be a JSON object"));
        }
        let unknown = collect_unknown(&v);
        if !unknown.is_empty() {
            return Err(Error::invalid(format!("unknown scenario keys: {}", unknown.join(", "))));
        }
        let s: Scenario = serde_json::from_value(v).map_err(|e| Error::invalid(format!("malformed scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        positive("atom.Z_eff", self.atom.z_eff)?;
        if let Some(ib) = self.atom.ionization_ev {
            positive("atom.I_B_eV", ib)?;
        }
        let l = &self.laser;
        let freq: Vec<(&str, f64)> = [("wavelength_nm", l.wavelength_nm), ("photon_eV", l.photon_ev), ("frequency_Hz", l.frequency_hz)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|x| (k, x)))
            .collect();
        if freq.len() != 1 {
            return Err(Error::invalid(format!(
                "laser needs exactly one of wavelength_nm, photon_eV, frequency_Hz (got {})",
                freq.len()
            )));
        }
        let inten: Vec<(&str, f64)> = [("intensity_Wcm2", l.intensity_w_cm2), ("field_Vm", l.field_v_m)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|x| (k, x)))
            .collect();
        if inten.len() != 1 {
            return Err(Error::invalid(format!(
                "laser needs exactly one of intensity_Wcm2, field_Vm (got {})",
                inten.len()
            )));
        }
        for (k, x) in freq.iter().chain(&inten) {
            positive(&format!("laser.{k}"), *x)?;
        }
        if let Some(ph) = l.phase_rad {
            if !(0.0..2.0 * PI).contains(&ph) {
                return Err(Error::invalid(format!("laser.phase_rad must lie in [0, 2pi), got {ph}")));
            }
        }
        let o = &self.options;
        if o.max_n == Some(0) {
            return Err(Error::invalid("options.max_n must be at least 1"));
        }
        if o.truncation == Some(0) {
            return Err(Error::invalid("options.truncation must be at least 1"));
        }
        if let Some(t) = o.tolerance {
            positive("options.tolerance", t)?;
        }
        if o.grid.is_some_and(|g| g < 2) {
            return Err(Error::invalid("options.grid must be at least 2"));
        }
        if let Some(r) = &o.rho {
            if r.is_empty() {
                return Err(Error::invalid("options.rho must not be empty"));
            }
            for &x in r {
                positive("options.rho entries", x)?;
            }
        }
        if let Some(t) = &o.two_level {
            if !(t.delta_over_omega.is_finite() && t.delta_over_omega >= 0.0) {
                return Err(Error::invalid("options.two_level.delta_over_omega must be finite and >= 0"));
            }
            if !(t.rabi_over_omega.is_finite() && t.rabi_over_omega >= 0.0) {
                return Err(Error::invalid("options.two_level.rabi_over_omega must be finite and >= 0"));
            }
            if t.a1.iter().chain(&t.a2).any(|x| !x.is_finite()) || t.a1.iter().chain(&t.a2).all(|&x| x == 0.0) {
                return Err(Error::invalid("options.two_level amplitudes must be finite and not all zero"));
            }
            if t.periods == 0 || t.per_period < 4 {
                return Err(Error::invalid("options.two_level needs periods >= 1 and per_period >= 4"));
            }
        }
        if let Some(b) = &o.birkhoff {
            if !(2..=crate::birkhoff::MAX_DIM).contains(&b.dim) {
                return Err(Error::invalid(format!("options.birkhoff.dim must lie in 2..={}", crate::birkhoff::MAX_DIM)));
            }
            positive("options.birkhoff.coupling", b.coupling)?;
            positive("options.birkhoff.epsilon", b.epsilon)?;
            positive("options.birkhoff.t_end", b.t_end)?;
            if b.halvings == 0 {
                return Err(Error::invalid("options.birkhoff.halvings must be at least 1"));
            }
        }
        Ok(())
    }

    /// Angular frequency in atomic units.
    #[must_use]
    pub fn omega(&self) -> f64 {
        let l = &self.laser;
        match (l.wavelength_nm, l.photon_ev, l.frequency_hz) {
            (Some(nm), _, _) => wavelength_nm_to_omega(nm),
            (_, Some(ev), _) => ev_to_au(ev),
            (_, _, Some(hz)) => hz_to_omega(hz),
            _ => f64::NAN,
        }
    }

    /// Peak field in atomic units.
    #[must_use]
    pub fn field(&self) -> f64 {
        match (self.laser.intensity_w_cm2, self.laser.field_v_m) {
            (Some(i), _) => intensity_to_field(i),
            (_, Some(f)) => field_si_to_au(f),
            _ => f64::NAN,
        }
    }

    pub fn atom(&self) -> Result<HydrogenicAtom> {
        let z = self.atom.z_eff;
        match self.atom.ionization_ev {
            Some(ev) => HydrogenicAtom::with_ionization(z, ev_to_au(ev)),
            None => HydrogenicAtom::new(z),
        }
    }

    pub fn laser(&self) -> Result<LaserField> {
        LaserField::new(self.field(), self.omega(), self.laser.phase_rad.unwrap_or(0.0))
    }

    /// Copy with every default written out.
    #[must_use]
    pub fn resolved(&self) -> Scenario {
        let mut s = self.clone();
        let z = s.atom.z_eff;
        s.atom.ionization_ev.get_or_insert_with(|| au_to_ev(z * z / 2.0));
        s.laser.phase_rad.get_or_insert(0.0);
        let o = &mut s.options;
        o.max_n.get_or_insert(DEFAULT_MAX_N);
        o.truncation.get_or_insert(DEFAULT_TRUNCATION);
        o.tolerance.get_or_insert(DEFAULT_TOLERANCE);
        o.grid.get_or_insert(DEFAULT_GRID);
        o.rho.get_or_insert_with(|| DEFAULT_RHO.to_vec());
        o.two_level.get_or_insert_with(TwoLevelSpec::default);
        o.birkhoff.get_or_insert_with(BirkhoffSpec::default);
        s
    }

    /// Compact single-line JSON with a fixed key order.
    #[must_use]
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BASIC: &str = r#"{
        "schema_version": 1,
        "atom": {"Z_eff": 1.0, "I_B_eV": 13.6},
        "laser": {"wavelength_nm": 800.0, "intensity_Wcm2": 1e14}
    }"#;

    fn err(text: &str) -> String {
        match Scenario::from_json_str(text) {
            Err(Error::InvalidInput(m)) => m,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn basic_scenario_resolves() {
        let s = Scenario::from_json_str(BASIC).unwrap();
        let laser = s.laser().unwrap();
        assert!((laser.omega - 0.056_954).abs() < 1e-5);
        assert!((laser.field - 0.053_38).abs() < 1e-4);
        let atom = s.atom().unwrap();
        assert!((atom.ionization_energy - 13.6 / 27.211_386_245_988).abs() < 1e-9);
        let r = s.resolved();
        assert_eq!(r.options.max_n, Some(DEFAULT_MAX_N));
        assert_eq!(r.laser.phase_rad, Some(0.0));
        assert_eq!(Scenario::from_json_str(&r.to_json_line()).unwrap(), r);
    }

    #[test]
    fn hydrogenic_default_ionization() {
        let s = Scenario::from_json_str(
            r#"{"schema_version":1,"atom":{"Z_eff":2.0},"laser":{"photon_eV":1.5,"field_Vm":1e10}}"#,
        )
        .unwrap();
        assert_eq!(s.atom().unwrap().ionization_energy, 2.0);
        let r = s.resolved();
        assert!((ev_to_au(r.atom.ionization_ev.unwrap()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_keys_are_all_listed() {
        let m = err(r#"{"schema_version":1,"colour":"red","atom":{"Z_eff":1,"Zeff":1},
            "laser":{"wavelength_nm":800,"intensity_Wcm2":1e14,"wavelenght_nm":1},
            "options":{"two_level":{"delta_over_omega":0.1,"rabi_over_omega":20,"a1":[1,0],"a2":[0,0],"periods":4,"per_period":64,"spam":1}}}"#);
        for k in ["colour", "atom.Zeff", "laser.wavelenght_nm", "options.two_level.spam"] {
            assert!(m.contains(k), "{k} missing from {m}");
        }
    }

    #[test]
    fn exactly_one_frequency_and_intensity() {
        assert!(err(r#"{"schema_version":1,"atom":{"Z_eff":1},"laser":{"intensity_Wcm2":1e14}}"#).contains("exactly one of wavelength"));
        assert!(err(r#"{"schema_version":1,"atom":{"Z_eff":1},"laser":{"wavelength_nm":800,"photon_eV":1.5,"intensity_Wcm2":1e14}}"#)
            .contains("got 2"));
        assert!(err(r#"{"schema_version":1,"atom":{"Z_eff":1},"laser":{"wavelength_nm":800,"intensity_Wcm2":1e14,"field_Vm":1e9}}"#)
            .contains("intensity_Wcm2, field_Vm"));
    }

    #[test]
    fn rejects_nonpositive_and_malformed() {
        assert!(err(r#"{"schema_version":1,"atom":{"Z_eff":1},"laser":{"wavelength_nm":800,"intensity_Wcm2":-1e14}}"#)
            .contains("intensity_Wcm2"));
        assert!(err(r#"{"schema_version":1,"atom":{"Z_eff":0},"laser":{"wavelength_nm":800,"intensity_Wcm2":1e14}}"#).contains("Z_eff"));
        assert!(err(r#"{"schema_version":2,"atom":{"Z_eff":1},"laser":{"wavelength_nm":800,"intensity_Wcm2":1e14}}"#)
            .contains("schema_version"));
        assert!(err(r#"{"schema_version":1,"atom":{"Z_eff":"one"},"laser":{"wavelength_nm":800,"intensity_Wcm2":1e14}}"#)
            .contains("malformed"));
        assert!(err("[1, 2]").contains("object"));
        assert!(err("{").contains("JSON"));
        assert!(err(r#"{"schema_version":1,"atom":{"Z_eff":1},"laser":{"wavelength_nm":800,"intensity_Wcm2":1e14,"phase_rad":7}}"#)
            .contains("phase"));
        assert!(err(r#"{"schema_version":1,"atom":{"Z_eff":1},"laser":{"wavelength_nm":800,"intensity_Wcm2":1e14},"options":{"rho":[]}}"#)
            .contains("rho"));
    }

    proptest! {
        #[test]
        fn resolved_round_trips(z in 0.5..3.0f64, nm in 100.0..3000.0f64, i in 1e10..1e16f64, n in 1u32..6, g in 2usize..500) {
            let text = format!(
                r#"{{"schema_version":1,"atom":{{"Z_eff":{z}}},"laser":{{"wavelength_nm":{nm},"intensity_Wcm2":{i}}},"options":{{"max_n":{n},"grid":{g}}}}}"#
            );
            let r = Scenario::from_json_str(&text).unwrap().resolved();
            let back = Scenario::from_json_str(&r.to_json_line()).unwrap();
            prop_assert_eq!(&back, &r);
            prop_assert_eq!(back.resolved(), r);
        }
    }
}
