//! Level shifts and couplings of hydrogenic states in the dressed potential
//! δV = −(Z/r) Σ_{K≥1} A_K (λ/r)^{2K} P_{2K}(x/r), kept exact.
//!
//! Matrix elements are polynomials in ρ = (λ_L/a_B)² in the unit Ze²/a_B
//! (= Z² a.u. for a_B = 1/Z). Each ρ^K coefficient is
//! −A_K ⟨R|r^{−(2K+1)}|R'⟩ ⟨Y|P_{2K}|Y'⟩ with both factors exact.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, RhoPolynomial, Surd};
use crate::export::{num, Table};
use crate::specfun::BoundState;
use crate::units::{HydrogenicAtom, LaserField};

/// Degeneracy tolerance on shifted-level gaps, a.u.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

/// Below this λ_L/a_B the diagonal approximation is flagged.
pub const EXCURSION_ADVISORY: f64 = 10.0;

/// ⟨bra|δV|ket⟩ as a polynomial in ρ, unit Ze²/a_B.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftPolynomial {
    pub bra: BoundState,
    pub ket: BoundState,
    pub poly: RhoPolynomial,
}

impl ShiftPolynomial {
    #[must_use]
    pub fn eval(&self, rho: f64) -> f64 {
        self.poly.eval(rho)
    }

    #[must_use]
    pub fn is_diagonal(&self) -> bool {
        self.bra == self.ket
    }
}

/// ⟨bra|δV|ket⟩ keeping multipoles K = 1..=order.
pub fn matrix_element(bra: BoundState, ket: BoundState, order: u32) -> Result<ShiftPolynomial> {
    let mut poly = RhoPolynomial::zero();
    for k in 1..=order {
        let ang = exact::angular_element(bra.l, bra.lz, 2 * k, ket.l, ket.lz);
        if ang.is_zero() {
            continue;
        }
        // a nonzero bracket needs 2K ≤ l + l', which keeps the radial
        // integral convergent
        debug_assert!(2 * k <= bra.l + ket.l);
        let q = -(2 * k as i32 + 1);
        let radial = exact::radial_integral(bra.n, bra.l, ket.n, ket.l, q)?;
        let a = -exact::multipole_a(k);
        poly.add_term(k, &(&radial * &ang).scale(&a));
    }
    Ok(ShiftPolynomial { bra, ket, poly })
}

/// Multipole order past which ⟨bra|δV|ket⟩ has no further terms.
#[must_use]
pub fn complete_order(bra: BoundState, ket: BoundState) -> u32 {
    (bra.l + ket.l) / 2
}

/// δE = ⟨state|δV|state⟩ truncated at `order`; `order ≥ l` gives the
/// complete polynomial.
pub fn diagonal_shift(state: BoundState, order: u32) -> Result<ShiftPolynomial> {
    if order < state.l {
        return Err(Error::invalid(format!(
            "multipole order {order} < l = {} leaves the shift of {state} incomplete",
            state.l
        )));
    }
    matrix_element(state, state, order)
}

/// ⟨state|δV|1s⟩, complete.
pub fn ground_coupling(state: BoundState) -> Result<ShiftPolynomial> {
    let g = BoundState::ground();
    if state == g {
        return Err(Error::invalid("ground coupling needs a state other than 1s"));
    }
    matrix_element(state, g, complete_order(state, g))
}

/// States with n ≤ n_max and l_z ≥ 0 (the −l_z rows repeat), ordered by n,
/// then l and l_z descending.
#[must_use]
pub fn table_states(n_max: u32) -> Vec<BoundState> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for l in (0..n).rev() {
            for lz in (0..=l as i32).rev() {
                out.push(BoundState { n, l, lz });
            }
        }
    }
    out
}

/// Complete diagonal shifts for [`table_states`].
pub fn diagonal_table(n_max: u32) -> Result<Vec<ShiftPolynomial>> {
    table_states(n_max).into_par_iter().map(|s| diagonal_shift(s, s.l)).collect()
}

/// Ground couplings for [`table_states`] with n ≥ 2.
pub fn coupling_table(n_max: u32) -> Result<Vec<ShiftPolynomial>> {
    table_states(n_max).into_par_iter().filter(|s| s.n >= 2).map(ground_coupling).collect()
}

fn label(s: BoundState) -> String {
    if s.lz == 0 {
        format!("n={},l={},lz=0", s.n, s.l)
    } else {
        format!("n={},l={},lz=±{}", s.n, s.l, s.lz)
    }
}

/// Human-readable shift and coupling tables grouped by n.
pub fn shift_report(n_max: u32) -> Result<String> {
    let diag = diagonal_table(n_max)?;
    let cpl = coupling_table(n_max)?;
    let mut out = String::from("level shifts <m|dV|m>, unit Ze^2/a_B, rho = (lambda_L/a_B)^2\n");
    for n in 1..=n_max {
        out.push_str(&format!("\nn = {n}\n"));
        for d in diag.iter().filter(|d| d.bra.n == n) {
            out.push_str(&format!("  dE({}) = {}\n", label(d.bra), d.poly));
        }
    }
    out.push_str("\ncouplings to the ground state <m|dV|1s>\n");
    for n in 2..=n_max {
        out.push_str(&format!("\nn = {n}\n"));
        for c in cpl.iter().filter(|c| c.bra.n == n) {
            out.push_str(&format!("  <{}|dV|1s> = {}\n", label(c.bra), c.poly));
        }
    }
    Ok(out)
}

/// One row per (element, power of ρ) with the exact coefficient and its
/// value; zero elements get a single row with power 0.
#[must_use]
pub fn polynomial_table(rows: &[ShiftPolynomial]) -> Table {
    let mut t = Table::new(&[
        "bra_n", "bra_l", "bra_lz", "ket_n", "ket_l", "ket_lz", "rho_power", "coefficient", "value",
    ]);
    for r in rows {
        let head = |p: u32, c: &Surd| {
            vec![
                r.bra.n.to_string(),
                r.bra.l.to_string(),
                r.bra.lz.to_string(),
                r.ket.n.to_string(),
                r.ket.l.to_string(),
                r.ket.lz.to_string(),
                p.to_string(),
                c.to_string(),
                num(c.to_f64()),
            ]
        };
        if r.poly.is_zero() {
            t.push(head(0, &Surd::zero()));
        }
        for (p, c) in r.poly.terms() {
            t.push(head(p, c));
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub rho: f64,
    /// max |⟨m|δV|k⟩ / (Ẽ_k − Ẽ_m)| over source states k
    pub metric: f64,
    /// (m, k) attaining the maximum; `None` when every coupling vanishes
    pub pair: Option<(BoundState, BoundState)>,
    /// coupling and gap of the maximizing pair, unit Ze²/a_B
    pub coupling: f64,
    pub gap: f64,
}

/// Precomputed shifts and couplings of a manifold, for scanning ρ.
#[derive(Debug, Clone)]
pub struct RigidityModel {
    states: Vec<BoundState>,
    shifts: Vec<ShiftPolynomial>,
    couplings: Vec<(usize, usize, ShiftPolynomial)>,
}

impl RigidityModel {
    /// Couplings from each source into every other state. Sources must be
    /// members of `states`.
    pub fn new(states: &[BoundState], sources: &[BoundState]) -> Result<Self> {
        let mut uniq = states.to_vec();
        uniq.sort_unstable();
        uniq.dedup();
        if uniq.len() != states.len() {
            return Err(Error::invalid("states must be distinct"));
        }
        if sources.is_empty() {
            return Err(Error::invalid("need at least one source state"));
        }
        let mut src_idx = Vec::new();
        for s in sources {
            let i = states
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::invalid(format!("source {s} not in the state set")))?;
            src_idx.push(i);
        }
        let shifts = states.par_iter().map(|&s| diagonal_shift(s, s.l)).collect::<Result<Vec<_>>>()?;
        let pairs: Vec<(usize, usize)> = src_idx
            .iter()
            .flat_map(|&k| (0..states.len()).filter(move |&m| m != k).map(move |m| (m, k)))
            .collect();
        let couplings = pairs
            .into_par_iter()
            .map(|(m, k)| {
                let (bm, bk) = (states[m], states[k]);
                matrix_element(bm, bk, complete_order(bm, bk)).map(|p| (m, k, p))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|c| !c.2.poly.is_zero())
            .collect();
        Ok(Self { states: states.to_vec(), shifts, couplings })
    }

    #[must_use]
    pub fn states(&self) -> &[BoundState] {
        &self.states
    }

    /// Ẽ = −1/(2n²) + δE(ρ), unit Ze²/a_B.
    #[must_use]
    pub fn shifted_energy(&self, i: usize, rho: f64) -> f64 {
        let n = f64::from(self.states[i].n);
        -0.5 / (n * n) + self.shifts[i].eval(rho)
    }

    /// Metric at ρ. `tol` is the smallest admissible gap (unit Ze²/a_B)
    /// between coupled levels.
    pub fn metric(&self, rho: f64, tol: f64) -> Result<RigidityReport> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::invalid(format!("rho must be finite and >= 0, got {rho}")));
        }
        let mut best = RigidityReport { rho, metric: 0.0, pair: None, coupling: 0.0, gap: 0.0 };
        for (m, k, p) in &self.couplings {
            let c = p.eval(rho);
            if c == 0.0 {
                continue;
            }
            let gap = self.shifted_energy(*k, rho) - self.shifted_energy(*m, rho);
            if gap.abs() < tol {
                return Err(Error::Degenerate {
                    a: self.states[*m].to_string(),
                    b: self.states[*k].to_string(),
                    gap,
                    tol,
                });
            }
            let v = (c / gap).abs();
            if v > best.metric {
                best = RigidityReport {
                    rho,
                    metric: v,
                    pair: Some((self.states[*m], self.states[*k])),
                    coupling: c,
                    gap,
                };
            }
        }
        Ok(best)
    }
}

/// Rigidity of `states` with the ground state as the populated level
/// (Z = 1 for the gap tolerance).
pub fn rigidity_metric(states: &[BoundState], rho: f64) -> Result<RigidityReport> {
    RigidityModel::new(states, &[BoundState::ground()])?.metric(rho, DEFAULT_DEGENERACY_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftedLevel {
    pub state: BoundState,
    /// −Z²/(2n²), a.u.
    pub unshifted: f64,
    /// δE, a.u.
    pub shift: f64,
    /// Ẽ, a.u.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveHamiltonian {
    pub rho: f64,
    pub z_eff: f64,
    pub levels: Vec<ShiftedLevel>,
    /// size of the dropped off-diagonal block, relative to level gaps
    pub rigidity: RigidityReport,
    pub warnings: Vec<String>,
}

/// Diagonal Hamiltonian Ẽ_n = −Z²/(2n²) + δE(ρ). The populated level for
/// the rigidity check is 1s when present, otherwise the first state.
pub fn effective_hamiltonian(
    states: &[BoundState],
    atom: &HydrogenicAtom,
    laser: &LaserField,
) -> Result<EffectiveHamiltonian> {
    if states.is_empty() {
        return Err(Error::invalid("empty state set"));
    }
    let ratio = laser.quiver_amplitude() / atom.bohr_radius;
    let rho = ratio * ratio;
    let mut warnings = Vec::new();
    if ratio < EXCURSION_ADVISORY {
        warnings.push(format!(
            "lambda_L/a_B = {ratio:.4} is not large; the diagonal approximation is questionable"
        ));
    }
    let source = if states.contains(&BoundState::ground()) { BoundState::ground() } else { states[0] };
    let model = RigidityModel::new(states, &[source])?;
    let unit = atom.z_eff * atom.z_eff;
    let rigidity = model.metric(rho, DEFAULT_DEGENERACY_TOL / unit)?;
    let levels = states
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let n = f64::from(s.n);
            let unshifted = -unit / (2.0 * n * n);
            let shift = unit * model.shifts[i].eval(rho);
            ShiftedLevel { state: s, unshifted, shift, energy: unshifted + shift }
        })
        .collect::<Vec<_>>();
    if levels.iter().any(|l| !l.energy.is_finite()) {
        return Err(Error::regime("shifted energies overflow at this rho"));
    }
    Ok(EffectiveHamiltonian { rho, z_eff: atom.z_eff, levels, rigidity, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn st(n: u32, l: u32, lz: i32) -> BoundState {
        BoundState::new(n, l, lz).unwrap()
    }

    fn q(n: i64, d: i64) -> Surd {
        Surd::from_ratio(n, d)
    }

    #[test]
    fn s_states_never_shift() {
        for n in 1..=6 {
            let d = diagonal_shift(st(n, 0, 0), 4).unwrap();
            assert!(d.poly.is_zero(), "n={n}");
        }
    }

    #[test]
    fn n2_shifts() {
        let p0 = diagonal_shift(st(2, 1, 0), 1).unwrap();
        assert_eq!(p0.poly, RhoPolynomial::from_terms([(1, q(1, 240))]));
        for lz in [-1, 1] {
            let p = diagonal_shift(st(2, 1, lz), 1).unwrap();
            assert_eq!(p.poly, RhoPolynomial::from_terms([(1, q(-1, 480))]));
        }
    }

    #[test]
    fn n3_d_shift() {
        let p = diagonal_shift(st(3, 2, 2), 2).unwrap();
        assert_eq!(p.poly, RhoPolynomial::from_terms([(1, q(-1, 5670)), (2, q(-1, 816_480))]));
    }

    #[test]
    fn truncation_below_l_is_rejected() {
        assert!(matches!(diagonal_shift(st(4, 3, 1), 2), Err(Error::InvalidInput(_))));
        // higher orders add nothing
        assert_eq!(diagonal_shift(st(4, 3, 1), 3).unwrap(), diagonal_shift(st(4, 3, 1), 9).unwrap());
    }

    #[test]
    fn ground_couplings() {
        for lz in -1..=1 {
            assert!(ground_coupling(st(2, 1, lz)).unwrap().poly.is_zero());
        }
        let c = ground_coupling(st(3, 2, 0)).unwrap();
        let expect = Surd::sqrt_int(150).scale(&BigRational::new(BigInt::from(1), BigInt::from(10800)));
        assert_eq!(c.poly, RhoPolynomial::from_terms([(1, expect)]));
        let c = ground_coupling(st(3, 2, 2)).unwrap();
        assert_eq!(c.poly, RhoPolynomial::from_terms([(1, q(-1, 720))]));
        assert!(ground_coupling(st(3, 2, 1)).unwrap().poly.is_zero());
        assert!(ground_coupling(BoundState::ground()).is_err());
    }

    #[test]
    fn tables_have_reference_shape() {
        let d = diagonal_table(4).unwrap();
        assert_eq!(d.len(), 20);
        assert_eq!(d[1].bra, st(2, 1, 1));
        let c = coupling_table(4).unwrap();
        assert_eq!(c.len(), 19);
        let report = shift_report(3).unwrap();
        assert!(report.contains("dE(n=2,l=1,lz=±1) = (-1/480)*rho"));
        assert!(report.contains("<n=3,l=2,lz=0|dV|1s> = (1/2160*sqrt(6))*rho"));
        let t = polynomial_table(&d);
        assert_eq!(t.rows.len(), 1 + 3 + 9 + 20);
    }

    #[test]
    fn effective_levels_at_rho_10() {
        let atom = HydrogenicAtom::hydrogen();
        // λ_L = sqrt(10) with E = ω² sqrt(10)
        let w = 0.05;
        let laser = LaserField::new(w * w * 10f64.sqrt(), w, 0.0).unwrap();
        let states = BoundState::manifold(2);
        let h = effective_hamiltonian(&states, &atom, &laser).unwrap();
        assert!((h.rho - 10.0).abs() < 1e-12);
        let e = |s: BoundState| h.levels.iter().find(|l| l.state == s).unwrap().energy;
        assert!((e(st(2, 1, 0)) - e(st(2, 1, 1)) - 1.0 / 16.0).abs() < 1e-14);
        assert_eq!(e(st(2, 0, 0)), -0.125);
        assert_eq!(e(st(1, 0, 0)), -0.5);
        assert_eq!(h.warnings.len(), 1);
        assert_eq!(h.rigidity.metric, 0.0);
    }

    #[test]
    fn unperturbed_limit() {
        let atom = HydrogenicAtom::new(2.0).unwrap();
        let laser = LaserField::new(1e-12, 0.3, 0.0).unwrap();
        let h = effective_hamiltonian(&BoundState::manifold(3), &atom, &laser).unwrap();
        for l in &h.levels {
            let n = f64::from(l.state.n);
            assert!((l.energy + 2.0 / (n * n)).abs() < 1e-15);
        }
        let r = rigidity_metric(&BoundState::manifold(4), 0.0).unwrap();
        assert_eq!((r.metric, r.pair), (0.0, None));
    }

    #[test]
    fn rigidity_decays_asymptotically() {
        let model = RigidityModel::new(&BoundState::manifold(4), &[BoundState::ground()]).unwrap();
        let a = model.metric(1e5, DEFAULT_DEGENERACY_TOL).unwrap();
        let b = model.metric(1e6, DEFAULT_DEGENERACY_TOL).unwrap();
        let c = model.metric(1e7, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!(a.metric > b.metric && b.metric > c.metric);
        // linear coupling over a quadratic gap: ρ·metric levels off
        let (x, y) = (b.metric * 1e6, c.metric * 1e7);
        assert!(((x - y) / y).abs() < 0.02, "{x} {y}");
    }

    #[test]
    fn exact_degeneracy_is_reported() {
        // 2p_{±1} mix with each other and are exactly degenerate
        let s = [st(2, 1, 1), st(2, 1, -1)];
        let err = RigidityModel::new(&s, &[s[0]]).unwrap().metric(3.0, DEFAULT_DEGENERACY_TOL);
        assert!(matches!(err, Err(Error::Degenerate { .. })), "{err:?}");
    }

    proptest! {
        #[test]
        fn reflection_symmetry(n in 1u32..6, l in 0u32..5, lz in 0i32..5) {
            prop_assume!(l < n && lz as u32 <= l);
            let a = diagonal_shift(st(n, l, lz), l).unwrap();
            let b = diagonal_shift(st(n, l, -lz), l).unwrap();
            prop_assert_eq!(a.poly, b.poly);
        }

        #[test]
        fn degree_is_l_and_trace_vanishes(n in 2u32..6, l in 1u32..5, lz in 0i32..5) {
            prop_assume!(l < n && lz as u32 <= l);
            let d = diagonal_shift(st(n, l, lz), l).unwrap();
            prop_assert_eq!(d.poly.degree(), Some(l));
            let mut tr = RhoPolynomial::zero();
            for m in -(l as i32)..=(l as i32) {
                for (p, c) in diagonal_shift(st(n, l, m), l).unwrap().poly.terms() {
                    tr.add_term(p, c);
                }
            }
            // the m-sum of P_2K brackets vanishes for K ≥ 1
            prop_assert!(tr.is_zero());
        }

        #[test]
        fn hermitian(i in 0usize..30, j in 0usize..30) {
            let all = BoundState::manifold(4);
            let (a, b) = (all[i], all[j]);
            let o = complete_order(a, b);
            prop_assert_eq!(matrix_element(a, b, o).unwrap().poly, matrix_element(b, a, o).unwrap().poly);
        }
    }
}
