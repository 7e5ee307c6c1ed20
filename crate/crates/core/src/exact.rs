//! Exact arithmetic for multipole matrix elements between hydrogenic states.
//!
//! Values are Q-linear combinations of square roots of square-free integers
//! ([`Surd`]); matrix elements of the dressed potential are polynomials in
//! ρ = (λ_L/a_B)² with such coefficients ([`RhoPolynomial`]). All radial
//! integrals are for Z = 1; the physical unit is Ze²/a_B.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Split a positive integer into s²·f with f square-free.
fn square_free_split(n: &BigUint) -> (BigUint, BigUint) {
    let mut rest = n.clone();
    let mut outside = BigUint::one();
    let mut inside = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rest {
        let mut count = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            count += 1;
        }
        outside *= p.pow(count / 2);
        if count % 2 == 1 {
            inside *= &p;
        }
        p += 1u32;
    }
    inside *= rest;
    (outside, inside)
}

/// Σ c_r sqrt(r) over square-free radicands r, exact.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Surd {
    terms: BTreeMap<BigUint, BigRational>,
}

impl Surd {
    #[must_use]
    pub fn zero() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn rational(q: BigRational) -> Self {
        let mut s = Self::zero();
        s.push(BigUint::one(), q);
        s
    }

    #[must_use]
    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::rational(rat(n, d))
    }

    /// sqrt(q) for q ≥ 0.
    ///
    /// # Panics
    /// If q is negative.
    #[must_use]
    pub fn sqrt(q: &BigRational) -> Self {
        assert!(!q.is_negative(), "sqrt of a negative rational");
        if q.is_zero() {
            return Self::zero();
        }
        // sqrt(p/d) = sqrt(p d)/d
        let num = q.numer().magnitude() * q.denom().magnitude();
        let (out, inside) = square_free_split(&num);
        let coeff = BigRational::new(BigInt::from(out), q.denom().clone());
        let mut s = Self::zero();
        s.push(inside, coeff);
        s
    }

    /// sqrt(n) for a non-negative integer.
    #[must_use]
    pub fn sqrt_int(n: u64) -> Self {
        Self::sqrt(&BigRational::from_integer(BigInt::from(n)))
    }

    fn push(&mut self, radicand: BigUint, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(radicand).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Rational value when the surd has no irrational part.
    #[must_use]
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    /// (radicand, coefficient) pairs in increasing radicand order.
    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &BigRational)> {
        self.terms.iter()
    }

    #[must_use]
    pub fn scale(&self, q: &BigRational) -> Self {
        let mut s = Self::zero();
        for (r, c) in &self.terms {
            s.push(r.clone(), c * q);
        }
        s
    }

    #[must_use]
    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| c.to_f64().unwrap_or(f64::NAN) * r.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut s = self.clone();
        for (r, c) in &rhs.terms {
            s.push(r.clone(), c.clone());
        }
        s
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut s = Surd::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &rhs.terms {
                let (out, inside) = square_free_split(&(r1 * r2));
                let c = c1 * c2 * BigRational::from_integer(BigInt::from(out));
                s.push(inside, c);
            }
        }
        s
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Surd {
    /// `p/q`, `p/q*sqrt(r)`, terms joined by ` + ` / ` - `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            let mag = fmt_rational(&c.abs());
            let body = if r.is_one() { mag } else { format!("{mag}*sqrt({r})") };
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Polynomial Σ c_k ρ^k with exact surd coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RhoPolynomial {
    coeffs: BTreeMap<u32, Surd>,
}

impl RhoPolynomial {
    #[must_use]
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, power: u32, c: &Surd) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(power).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.coeffs.remove(&power);
        }
    }

    /// Builder from (power, coefficient) pairs.
    #[must_use]
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, Surd)>) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, &c);
        }
        p
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[must_use]
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    #[must_use]
    pub fn coefficient(&self, power: u32) -> Surd {
        self.coeffs.get(&power).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Surd)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    #[must_use]
    pub fn eval(&self, rho: f64) -> f64 {
        self.coeffs.iter().map(|(k, c)| c.to_f64() * rho.powi(*k as i32)).sum()
    }
}

impl fmt::Display for RhoPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mono = if *k == 1 { "rho".to_string() } else { format!("rho^{k}") };
            if *k == 0 {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for RhoPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A_n = (2n-1)!!/(2n)!!, the weights (1/π)∫x^{2n}/sqrt(1-x²)dx.
#[must_use]
pub fn multipole_a(n: u32) -> BigRational {
    let n = i64::from(n);
    BigRational::new(double_factorial(2 * n - 1), double_factorial(2 * n))
}

/// Wigner 3j symbol for integer angular momenta (Racah's formula).
#[must_use]
pub fn wigner_3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> Surd {
    if m1 + m2 + m3 != 0
        || m1.abs() > j1
        || m2.abs() > j2
        || m3.abs() > j3
        || j3 < (j1 - j2).abs()
        || j3 > j1 + j2
    {
        return Surd::zero();
    }
    let f = |n: i64| factorial(n as u32);
    let delta = BigRational::new(
        f(j1 + j2 - j3) * f(j1 - j2 + j3) * f(-j1 + j2 + j3),
        f(j1 + j2 + j3 + 1),
    );
    let fm = f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j3 + m3) * f(j3 - m3);
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = f(k)
            * f(j3 - j2 + k + m1)
            * f(j3 - j1 + k - m2)
            * f(j1 + j2 - j3 - k)
            * f(j1 - k - m1)
            * f(j2 - k + m2);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let sign = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1 } else { -1 };
    let root = Surd::sqrt(&(delta * BigRational::from_integer(fm)));
    root.scale(&(sum * BigRational::from_integer(BigInt::from(sign))))
}

/// P_l^m(0) with the Condon-Shortley phase, 0 ≤ m ≤ l.
fn assoc_legendre_at_zero(l: i64, m: i64) -> BigRational {
    if (l + m) % 2 == 1 {
        return BigRational::zero();
    }
    let v = BigRational::new(double_factorial(l + m - 1), double_factorial(l - m));
    if ((l + m) / 2) % 2 == 0 {
        v
    } else {
        -v
    }
}

/// sqrt(4π/(2K+1))·Y_Kq evaluated on the +x axis (θ = π/2, φ = 0); real.
fn harmonic_on_x_axis(k: i64, q: i64) -> Surd {
    let aq = q.abs();
    if aq > k {
        return Surd::zero();
    }
    let ratio = BigRational::new(factorial((k - aq) as u32), factorial((k + aq) as u32));
    let v = Surd::sqrt(&ratio).scale(&assoc_legendre_at_zero(k, aq));
    if q < 0 && aq % 2 == 1 {
        -&v
    } else {
        v
    }
}

/// ⟨l1, m1| P_K(x̂·r̂) |l2, m2⟩ over the unit sphere, exact.
///
/// Uses the addition theorem and Gaunt coefficients; only q = m1 - m2
/// contributes.
#[must_use]
pub fn angular_element(l1: u32, m1: i32, k: u32, l2: u32, m2: i32) -> Surd {
    let (l1, m1, k, l2, m2) = (i64::from(l1), i64::from(m1), i64::from(k), i64::from(l2), i64::from(m2));
    if (l1 + k + l2) % 2 == 1 || k < (l1 - l2).abs() || k > l1 + l2 {
        return Surd::zero();
    }
    let q = m1 - m2;
    let y = harmonic_on_x_axis(k, q);
    if y.is_zero() {
        return y;
    }
    let g0 = wigner_3j(l1, k, l2, 0, 0, 0);
    let gm = wigner_3j(l1, k, l2, -m1, q, m2);
    let norm = Surd::sqrt(&BigRational::from_integer(BigInt::from((2 * l1 + 1) * (2 * l2 + 1))));
    let sign = if m1.rem_euclid(2) == 0 { 1 } else { -1 };
    let v = &(&(&y * &g0) * &gm) * &norm;
    v.scale(&rat(sign, 1))
}

/// ⟨r^k⟩ for Z = 1 by the Kramers-Pasternak recursion.
pub fn radial_moment(n: u32, l: u32, k: i32) -> Result<BigRational> {
    if n == 0 || l >= n {
        return Err(Error::invalid(format!("invalid state n={n}, l={l}")));
    }
    let bound = -(2 * l as i32 + 2);
    if k < bound {
        return Err(Error::DivergentMoment { n, l, k, bound });
    }
    let n2 = BigRational::from_integer(BigInt::from(n * n));
    let ll = i64::from(2 * l + 1) * i64::from(2 * l + 1);
    if k >= -1 {
        // upward from ⟨r^-1⟩ = 1/n², ⟨r^0⟩ = 1
        let mut prev = n2.recip();
        let mut cur = BigRational::one();
        for s in 1..=i64::from(k) {
            let next = (&cur * rat(2 * s + 1, 1) - &prev * rat(s * (ll - s * s), 4)) * &n2
                / rat(s + 1, 1);
            prev = cur;
            cur = next;
        }
        return Ok(if k == -1 { prev } else { cur });
    }
    // downward from ⟨r^-1⟩ and ⟨r^-2⟩ = 2/(n³(2l+1))
    let mut upper = n2.recip();
    let mut cur = rat(2, i64::from(n * n * n) * i64::from(2 * l + 1));
    let mut s = -1i64;
    while s - 1 > i64::from(k) {
        // relation at index s links ⟨r^s⟩, ⟨r^{s-1}⟩, ⟨r^{s-2}⟩
        let num = &cur * rat(2 * s + 1, 1) - &upper * rat(s + 1, 1) / &n2;
        let next = num / rat(s * (ll - s * s), 4);
        upper = cur;
        cur = next;
        s -= 1;
    }
    Ok(cur)
}

/// Coefficients c_j of R_nl(r) = N e^{-r/n} Σ c_j r^j (Z = 1) and N².
fn radial_polynomial(n: u32, l: u32) -> (BTreeMap<u32, BigRational>, BigRational) {
    let mut c = BTreeMap::new();
    let two_over_n = rat(2, i64::from(n));
    for i in 0..n - l {
        let mut v = BigRational::from_integer(binomial(n + l, n - l - 1 - i))
            / BigRational::from_integer(factorial(i));
        v *= num_traits::pow(two_over_n.clone(), (i + l) as usize);
        if i % 2 == 1 {
            v = -v;
        }
        c.insert(i + l, v);
    }
    let norm_sq = num_traits::pow(two_over_n, 3) * BigRational::from_integer(factorial(n - l - 1))
        / BigRational::from_integer(BigInt::from(2 * n) * factorial(n + l));
    (c, norm_sq)
}

/// ∫_0^∞ R_{n1 l1} R_{n2 l2} r^{q+2} dr for Z = 1, exact.
pub fn radial_integral(n1: u32, l1: u32, n2: u32, l2: u32, q: i32) -> Result<Surd> {
    if n1 == 0 || n2 == 0 || l1 >= n1 || l2 >= n2 {
        return Err(Error::invalid("invalid radial quantum numbers"));
    }
    let lowest = (l1 + l2) as i32 + q + 2;
    if lowest < 0 {
        return Err(Error::DivergentMoment { n: n1.max(n2), l: l1.min(l2), k: q, bound: -((l1 + l2) as i32) - 2 });
    }
    let (c1, nn1) = radial_polynomial(n1, l1);
    let (c2, nn2) = radial_polynomial(n2, l2);
    let beta = rat(1, i64::from(n1)) + rat(1, i64::from(n2));
    let mut s = BigRational::zero();
    for (i, a) in &c1 {
        for (j, b) in &c2 {
            let p = (*i + *j) as i32 + q + 2;
            let m = factorial(p as u32);
            s += a * b * BigRational::from_integer(m) / num_traits::pow(beta.clone(), p as usize + 1);
        }
    }
    Ok(Surd::sqrt(&(nn1 * nn2)).scale(&s))
}
