//! Hydrogenic bound states: radial functions, radial moments, multipole
//! angular brackets and the 1s → plane-wave dipole element.

use std::f64::consts::PI;
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::quadrature::{adaptive, sphere_integrate};
use super::{legendre_p, spherical_harmonic_sq};
use crate::error::{Error, Result};
use crate::exact;
use crate::units::HydrogenicAtom;

/// Bound-state label |n, l, l_z⟩ (quantization axis z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundState {
    pub n: u32,
    pub l: u32,
    pub lz: i32,
}

impl BoundState {
    pub fn new(n: u32, l: u32, lz: i32) -> Result<Self> {
        if n == 0 || l >= n || lz.unsigned_abs() > l {
            return Err(Error::invalid(format!("invalid bound state n={n}, l={l}, l_z={lz}")));
        }
        Ok(Self { n, l, lz })
    }

    #[must_use]
    pub const fn ground() -> Self {
        Self { n: 1, l: 0, lz: 0 }
    }

    /// All states with principal quantum number 1..=n_max, ordered by
    /// (n, l, l_z).
    #[must_use]
    pub fn manifold(n_max: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for n in 1..=n_max {
            for l in 0..n {
                for lz in -(l as i32)..=(l as i32) {
                    out.push(Self { n, l, lz });
                }
            }
        }
        out
    }
}

impl fmt::Display for BoundState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|n={},l={},lz={}>", self.n, self.l, self.lz)
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Generalized Laguerre L_k^{(α)}(x) by upward recurrence.
#[must_use]
pub fn laguerre(k: u32, alpha: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (mut a, mut b) = (1.0, 1.0 + alpha - x);
    for j in 1..k {
        let j = f64::from(j);
        let c = ((2.0 * j + 1.0 + alpha - x) * b - (j + alpha) * a) / (j + 1.0);
        a = b;
        b = c;
    }
    b
}

/// Radial function R_nl(r) for nuclear charge `z`, normalized so that
/// ∫R²r²dr = 1 and positive at small r.
#[must_use]
pub fn hydrogen_radial(n: u32, l: u32, z: f64, r: f64) -> f64 {
    let nf = f64::from(n);
    let rho = 2.0 * z * r / nf;
    let norm = ((2.0 * z / nf).powi(3) * factorial(n - l - 1) / (2.0 * nf * factorial(n + l))).sqrt();
    norm * rho.powi(l as i32) * laguerre(n - l - 1, f64::from(2 * l + 1), rho) * (-rho / 2.0).exp()
}

/// ⟨r^k⟩ in a.u., from the exact Kramers-Pasternak recursion (scaled by
/// Z^-k). Converges for k ≥ -(2l+2).
pub fn hydrogen_radial_moment(state: BoundState, z: f64, k: i32) -> Result<f64> {
    let m = exact::radial_moment(state.n, state.l, k)?;
    Ok(m.to_f64().unwrap_or(f64::NAN) * z.powi(-k))
}

/// ⟨r^k⟩ by adaptive quadrature of R_nl² r^{k+2}.
pub fn radial_moment_quadrature(state: BoundState, z: f64, k: i32, tol: f64) -> Result<f64> {
    let bound = -(2 * state.l as i32 + 2);
    if k < bound {
        return Err(Error::DivergentMoment { n: state.n, l: state.l, k, bound });
    }
    let f = |r: f64| {
        let rr = hydrogen_radial(state.n, state.l, z, r);
        rr * rr * r.powi(k + 2)
    };
    // the orbital lives within a few n²/Z; split there for the tail map
    let knee = f64::from(state.n * state.n) / z;
    let inner = adaptive(f, 0.0, knee, tol * 0.1)?;
    let outer = super::quadrature::adaptive_semi_infinite(f, knee, tol * 0.1)?;
    Ok(inner + outer)
}

/// ⟨Y_{l,l_z}| P_K(x/r) |Y_{l,l_z}⟩ by 2D quadrature; exactly zero when K is
/// odd or K > 2l.
pub fn angular_bracket(l: u32, lz: i32, order: u32) -> Result<f64> {
    if lz.unsigned_abs() > l {
        return Err(Error::invalid(format!("|l_z| > l for l={l}, l_z={lz}")));
    }
    if order % 2 == 1 || order > 2 * l {
        return Ok(0.0);
    }
    sphere_integrate(
        |th, ph| {
            spherical_harmonic_sq(l as usize, lz, th, ph)
                * legendre_p(order as usize, th.sin() * ph.cos())
        },
        1e-12,
    )
}

/// |⟨1s| x |p⟩|² with box-normalized plane waves in unit volume, for the 1s
/// orbital e^{-r/a_B}/sqrt(π a_B³):
/// 1024 π κ⁵ p_x² / (κ² + p²)⁶ with κ = 1/a_B. Sums over states map to
/// ∫d³p/(2π)³ with the volume cancelling.
#[must_use]
pub fn planewave_dipole_sq(p: [f64; 3], atom: &HydrogenicAtom) -> f64 {
    let kappa = 1.0 / atom.bohr_radius;
    let p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    1024.0 * PI * kappa.powi(5) * p[0] * p[0] / (kappa * kappa + p2).powi(6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn states_validate() {
        assert!(BoundState::new(2, 2, 0).is_err());
        assert!(BoundState::new(3, 1, -2).is_err());
        assert_eq!(BoundState::manifold(4).len(), 30);
    }

    #[test]
    fn radial_functions_normalized() {
        for n in 1..=6 {
            for l in 0..n {
                let v = radial_moment_quadrature(BoundState { n, l, lz: 0 }, 1.3, 0, 1e-12).unwrap();
                assert!((v - 1.0).abs() < 1e-10, "n={n} l={l}: {v}");
            }
        }
        // R_10 = 2 Z^{3/2} e^{-Zr}
        assert!((hydrogen_radial(1, 0, 2.0, 0.3) - 2.0 * 2f64.powf(1.5) * (-0.6f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn moment_examples() {
        let s20 = BoundState { n: 2, l: 0, lz: 0 };
        assert!((hydrogen_radial_moment(s20, 1.0, -1).unwrap() - 0.25).abs() < 1e-15);
        let s21 = BoundState { n: 2, l: 1, lz: 0 };
        let v = hydrogen_radial_moment(s21, 2.0, -3).unwrap();
        assert!((v - 8.0 / 24.0).abs() < 1e-15);
        let q = radial_moment_quadrature(s21, 1.0, -3, 1e-12).unwrap();
        assert!((q - 1.0 / 24.0).abs() < 1e-12);
        assert!(matches!(
            hydrogen_radial_moment(s21, 1.0, -5),
            Err(Error::DivergentMoment { bound: -4, .. })
        ));
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for n in 1..=6u32 {
            for l in 0..n {
                let s = BoundState { n, l, lz: 0 };
                for k in -(2 * l as i32 + 2)..=4 {
                    let a = hydrogen_radial_moment(s, 1.0, k).unwrap();
                    let b = radial_moment_quadrature(s, 1.0, k, 1e-12).unwrap();
                    assert!(((a - b) / a).abs() < 1e-9, "n={n} l={l} k={k}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(angular_bracket(0, 0, 2).unwrap(), 0.0);
        assert_eq!(angular_bracket(0, 0, 6).unwrap(), 0.0);
        assert!((angular_bracket(1, 0, 2).unwrap() + 0.2).abs() < 1e-12);
        assert!((angular_bracket(1, 1, 2).unwrap() - 0.1).abs() < 1e-12);
        assert!((angular_bracket(1, -1, 2).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(angular_bracket(2, 1, 6).unwrap(), 0.0);
        assert!((angular_bracket(3, 2, 0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn planewave_parity() {
        let a = HydrogenicAtom::hydrogen();
        assert_eq!(planewave_dipole_sq([0.0, 0.4, 0.2], &a), 0.0);
        assert_eq!(planewave_dipole_sq([0.3, 0.4, 0.2], &a), planewave_dipole_sq([-0.3, 0.4, 0.2], &a));
    }

    proptest! {
        #[test]
        fn bracket_matches_exact(l in 0u32..5, m in 0i32..5, k in 0u32..5) {
            prop_assume!(m as u32 <= l);
            let q = angular_bracket(l, m, 2 * k).unwrap();
            let e = exact::angular_element(l, m, 2 * k, l, m).to_f64();
            prop_assert!((q - e).abs() < 1e-11);
        }
    }
}
