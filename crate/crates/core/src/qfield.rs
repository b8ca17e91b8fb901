//! Exact arithmetic in K = Q(zeta)(a), where zeta is a primitive cube root of
//! unity and a is the real cube root of a rational `tau`.
//!
//! Elements are stored over the Q-basis `(1, a, a^2, zeta, zeta*a, zeta*a^2)`.
//! Writing an element as `P(a) + zeta*Q(a)`, multiplication reduces with
//! `zeta^2 = -1 - zeta` and `a^3 = tau`.
//!
//! `tau` travels with the elements that need it. Elements whose a-part is
//! zero (rationals, zeta, anything in Q(zeta)) carry no configuration and
//! combine freely with any `tau`; combining two elements bound to different
//! `tau` values is a usage error and panics.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use malachite_base::num::arithmetic::traits::CheckedRoot;
use malachite_base::num::basic::traits::{One, Zero};
use malachite_base::num::conversion::traits::RoundingFrom;
use malachite_base::rounding_modes::RoundingMode;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms, positive denominator.
pub type Rational = malachite_q::Rational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::from_signeds(n, d)
}

fn is_zero(r: &Rational) -> bool {
    *r == 0
}

pub fn to_f64(r: &Rational) -> f64 {
    f64::rounding_from(r, RoundingMode::Nearest).0
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| Error::Parse(format!("{s:?} is not a rational p/q")))
}

/// Always `"p/q"`, even for integers.
pub fn format_rational(r: &Rational) -> String {
    let sign = if *r < 0 { "-" } else { "" };
    format!("{sign}{}/{}", r.numerator_ref(), r.denominator_ref())
}

/// The value of `a^3`. Rational cubes are rejected since they make
/// `1, a, a^2` linearly dependent.
#[derive(Clone, Debug)]
pub struct Tau(Arc<Rational>);

impl Tau {
    pub fn new(value: Rational) -> Result<Self> {
        if is_rational_cube(&value) {
            return Err(Error::TauIsCube(format_rational(&value)));
        }
        Ok(Tau(Arc::new(value)))
    }

    /// `a = -2^(-1/3)`, the nominal value; the 18-term identity fails under it.
    pub fn nominal() -> Self {
        Tau::new(rat(-1, 2)).unwrap()
    }

    /// The value under which the 18-term identity holds exactly, `a = -2^(1/3)`.
    pub fn exact() -> Self {
        Tau::new(rat(-2, 1)).unwrap()
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// Real cube root of `tau`.
    pub fn real_root(&self) -> f64 {
        to_f64(&self.0).cbrt()
    }
}

impl PartialEq for Tau {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Tau {}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_rational_cube(r: &Rational) -> bool {
    r.checked_root(3u64).is_some()
}

fn join_tau(x: &Option<Tau>, y: &Option<Tau>) -> Option<Tau> {
    match (x, y) {
        (Some(s), Some(t)) => {
            assert!(s == t, "mixing elements from tau = {s} and tau = {t}");
            Some(s.clone())
        }
        (Some(s), None) | (None, Some(s)) => Some(s.clone()),
        (None, None) => None,
    }
}

#[derive(Clone, Debug)]
pub struct FieldElem {
    coeffs: [Rational; 6],
    tau: Option<Tau>,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for FieldElem {}

impl std::hash::Hash for FieldElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl FieldElem {
    /// Builds an element from its six coordinates. An element with a nonzero
    /// a-part must be given a `tau`.
    pub fn new(coeffs: [Rational; 6], tau: Option<Tau>) -> Result<Self> {
        let e = FieldElem { coeffs, tau };
        if e.tau.is_none() && e.has_a_part() {
            return Err(Error::MissingTau);
        }
        Ok(e)
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::ZERO)
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::ONE)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut coeffs: [Rational; 6] = Default::default();
        coeffs[0] = r;
        FieldElem { coeffs, tau: None }
    }

    /// `p + q*zeta` with rational `p`, `q`.
    pub fn cyclotomic(p: Rational, q: Rational) -> Self {
        let mut coeffs: [Rational; 6] = Default::default();
        coeffs[0] = p;
        coeffs[3] = q;
        FieldElem { coeffs, tau: None }
    }

    pub fn zeta() -> Self {
        Self::cyclotomic(Rational::ZERO, Rational::ONE)
    }

    /// `zeta^k` for any integer `k`.
    pub fn zeta_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Self::one(),
            1 => Self::zeta(),
            _ => Self::cyclotomic(rat(-1, 1), rat(-1, 1)),
        }
    }

    pub fn a(tau: &Tau) -> Self {
        let mut coeffs: [Rational; 6] = Default::default();
        coeffs[1] = Rational::ONE;
        FieldElem { coeffs, tau: Some(tau.clone()) }
    }

    pub fn coeffs(&self) -> &[Rational; 6] {
        &self.coeffs
    }

    pub fn tau(&self) -> Option<&Tau> {
        self.tau.as_ref()
    }

    /// Binds an element to a configuration. Fails on a conflicting binding.
    pub fn with_tau(mut self, tau: &Tau) -> Self {
        self.tau = join_tau(&self.tau, &Some(tau.clone()));
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(is_zero)
    }

    fn has_a_part(&self) -> bool {
        [1, 2, 4, 5].iter().any(|&i| !is_zero(&self.coeffs[i]))
    }

    /// True when the element lies in Q(zeta).
    pub fn is_cyclotomic(&self) -> bool {
        !self.has_a_part()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        FieldElem {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] * r),
            tau: self.tau.clone(),
        }
    }

    /// Complex conjugation: fixes `a`, sends `zeta` to `zeta^2 = -1 - zeta`.
    pub fn conjugate(&self) -> Self {
        let c = &self.coeffs;
        FieldElem {
            coeffs: [
                &c[0] - &c[3],
                &c[1] - &c[4],
                &c[2] - &c[5],
                -&c[3],
                -&c[4],
                -&c[5],
            ],
            tau: self.tau.clone(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, found by solving the 6x6 rational system
    /// `M_x y = 1` where `M_x` is the matrix of multiplication by `x`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // An a-free element never wraps past a^2, so any admissible tau
        // produces the same multiplication matrix.
        let tau = self.tau.clone().unwrap_or_else(Tau::exact);
        let basis: Vec<FieldElem> = (0..6)
            .map(|j| {
                let mut coeffs: [Rational; 6] = Default::default();
                coeffs[j] = Rational::ONE;
                FieldElem { coeffs, tau: Some(tau.clone()) }
            })
            .collect();
        let columns: Vec<FieldElem> = basis.iter().map(|b| self * b).collect();
        let matrix: Vec<Vec<Rational>> = (0..6)
            .map(|i| (0..6).map(|j| columns[j].coeffs[i].clone()).collect())
            .collect();
        let mut rhs = vec![Rational::ZERO; 6];
        rhs[0] = Rational::ONE;
        let y = solve_rational(matrix, rhs).ok_or(Error::DivisionByZero)?;
        let coeffs: [Rational; 6] = std::array::from_fn(|i| y[i].clone());
        let tau = self.tau.clone();
        let out = FieldElem { coeffs, tau };
        debug_assert!(out.tau.is_some() || !out.has_a_part());
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Numeric image under `zeta -> e^(2 pi i/3)` and `a -> real cube root of tau`.
    pub fn embed_complex(&self) -> Complex64 {
        let a = self.tau.as_ref().map(Tau::real_root).unwrap_or(0.0);
        let zeta = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        let c: Vec<f64> = self.coeffs.iter().map(to_f64).collect();
        let p = c[0] + c[1] * a + c[2] * a * a;
        let q = c[3] + c[4] * a + c[5] * a * a;
        Complex64::new(p, 0.0) + zeta * q
    }

    pub fn to_strings(&self) -> [String; 6] {
        std::array::from_fn(|i| format_rational(&self.coeffs[i]))
    }

    pub fn from_strings<S: AsRef<str>>(parts: &[S], tau: Option<&Tau>) -> Result<Self> {
        if parts.len() != 6 {
            return Err(Error::Parse(format!(
                "field element needs 6 coefficients, got {}",
                parts.len()
            )));
        }
        let mut coeffs: [Rational; 6] = Default::default();
        for (slot, s) in coeffs.iter_mut().zip(parts) {
            *slot = parse_rational(s.as_ref())?;
        }
        let e = FieldElem { coeffs, tau: None };
        let e = if e.has_a_part() {
            e.with_tau(tau.ok_or(Error::MissingTau)?)
        } else {
            e
        };
        Ok(e)
    }
}

fn mul_mod_cubic(x: &[Rational], y: &[Rational], tau: Option<&Tau>) -> [Rational; 3] {
    let mut raw: [Rational; 5] = Default::default();
    for (i, xi) in x.iter().enumerate() {
        if is_zero(xi) {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if is_zero(yj) {
                continue;
            }
            raw[i + j] += xi * yj;
        }
    }
    let [r0, r1, r2, r3, r4] = raw;
    if is_zero(&r3) && is_zero(&r4) {
        return [r0, r1, r2];
    }
    let t = tau.expect("a-part present without tau").value();
    [r0 + r3 * t, r1 + r4 * t, r2]
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;

    fn mul(self, rhs: &'a FieldElem) -> FieldElem {
        let tau = join_tau(&self.tau, &rhs.tau);
        let (p1, q1) = self.coeffs.split_at(3);
        let (p2, q2) = rhs.coeffs.split_at(3);
        let q1_zero = q1.iter().all(is_zero);
        let q2_zero = q2.iter().all(is_zero);
        let pp = mul_mod_cubic(p1, p2, tau.as_ref());
        let zero3: [Rational; 3] = Default::default();
        let qq = if q1_zero || q2_zero { zero3.clone() } else { mul_mod_cubic(q1, q2, tau.as_ref()) };
        let pq = if q2_zero { zero3.clone() } else { mul_mod_cubic(p1, q2, tau.as_ref()) };
        let qp = if q1_zero { zero3 } else { mul_mod_cubic(q1, p2, tau.as_ref()) };
        // (P1 + zQ1)(P2 + zQ2) = (P1P2 - Q1Q2) + z(P1Q2 + Q1P2 - Q1Q2)
        let coeffs = [
            &pp[0] - &qq[0],
            &pp[1] - &qq[1],
            &pp[2] - &qq[2],
            &pq[0] + &qp[0] - &qq[0],
            &pq[1] + &qp[1] - &qq[1],
            &pq[2] + &qp[2] - &qq[2],
        ];
        FieldElem { coeffs, tau }
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;

    fn add(self, rhs: &'a FieldElem) -> FieldElem {
        FieldElem {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] + &rhs.coeffs[i]),
            tau: join_tau(&self.tau, &rhs.tau),
        }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;

    fn sub(self, rhs: &'a FieldElem) -> FieldElem {
        FieldElem {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] - &rhs.coeffs[i]),
            tau: join_tau(&self.tau, &rhs.tau),
        }
    }
}

impl AddAssign<&FieldElem> for FieldElem {
    fn add_assign(&mut self, rhs: &FieldElem) {
        self.tau = join_tau(&self.tau, &rhs.tau);
        for (c, r) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !is_zero(r) {
                *c += r;
            }
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;

    fn neg(self) -> FieldElem {
        FieldElem {
            coeffs: std::array::from_fn(|i| -&self.coeffs[i]),
            tau: self.tau.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &'a FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

impl std::iter::Sum for FieldElem {
    fn sum<I: Iterator<Item = FieldElem>>(iter: I) -> Self {
        iter.fold(FieldElem::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const BASIS: [&str; 6] = ["", "a", "a^2", "z", "z*a", "z*a^2"];
        let mut first = true;
        for (c, b) in self.coeffs.iter().zip(BASIS) {
            if is_zero(c) {
                continue;
            }
            let neg = *c < 0;
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (mag == 1, b.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (true, false) => write!(f, "{b}")?,
                (false, false) => write!(f, "{mag}*{b}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Solves a square rational system by Gauss-Jordan elimination. Returns
/// `None` for a singular matrix.
pub fn solve_rational(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !is_zero(&m[r][col]))?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = m[col][col].clone();
        for j in col..n {
            m[col][j] = &m[col][j] / &p;
        }
        rhs[col] = &rhs[col] / &p;
        for r in 0..n {
            if r == col || is_zero(&m[r][col]) {
                continue;
            }
            let factor = m[r][col].clone();
            for j in col..n {
                let delta = &factor * &m[col][j];
                m[r][j] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Some(rhs)
}
