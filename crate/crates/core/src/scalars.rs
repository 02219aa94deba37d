//! Exact rationals, certified real approximations, and the symbolic reals
//! `q · π^a · 7^(b/2)` that volume and L-value computations live in.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rat_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// π to 120 decimal places, truncated. Used whenever the requested working
/// precision fits inside it; Machin's formula takes over beyond that.
pub const PI_DIGITS: &str =
    "3.141592653589793238462643383279502884197169399375105820974944592307816406286208998628034825342117067982148086513282306647093844";

const PI_CONST_BITS: u32 = 390;

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// A rational midpoint with a rational radius: the real being approximated
/// lies in `[mid - rad, mid + rad]`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub mid: Rat,
    pub rad: Rat,
}

impl Ball {
    pub fn exact(mid: Rat) -> Self {
        Ball { mid, rad: Rat::zero() }
    }

    pub fn lo(&self) -> Rat {
        &self.mid - &self.rad
    }

    pub fn hi(&self) -> Rat {
        &self.mid + &self.rad
    }

    pub fn abs_max(&self) -> Rat {
        self.mid.abs() + &self.rad
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    /// Truncate the midpoint to a dyadic with `bits` fractional bits, widening
    /// the radius by the truncation error.
    pub fn round(self, bits: u32) -> Self {
        let scale = pow2(bits);
        let scaled = &self.mid * Rat::from_integer(scale.clone());
        let floored = scaled.floor();
        let rad = if floored == scaled { self.rad } else { self.rad + Rat::new(BigInt::one(), scale) };
        Ball { mid: floored / Rat::from_integer(pow2(bits)), rad: round_up(&rad, bits) }
    }

    pub fn add(&self, o: &Ball) -> Ball {
        Ball { mid: &self.mid + &o.mid, rad: &self.rad + &o.rad }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        Ball { mid: &self.mid - &o.mid, rad: &self.rad + &o.rad }
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let rad = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        Ball { mid: &self.mid * &o.mid, rad }
    }

    pub fn scale(&self, r: &Rat) -> Ball {
        Ball { mid: &self.mid * r, rad: &self.rad * r.abs() }
    }

    pub fn recip(&self) -> Option<Ball> {
        if self.contains_zero() {
            return None;
        }
        let m = self.mid.abs();
        let rad = &self.rad / (&m * (&m - &self.rad));
        Some(Ball { mid: self.mid.recip(), rad })
    }

    pub fn pow(&self, e: u32, bits: u32) -> Ball {
        let mut acc = Ball::exact(Rat::one());
        for _ in 0..e {
            acc = acc.mul(self).round(bits);
        }
        acc
    }
}

fn pi_from_digits() -> Ball {
    let digits: String = PI_DIGITS.chars().filter(|c| *c != '.').collect();
    let places = (PI_DIGITS.len() - 2) as u32;
    let den = BigInt::from(10u32).pow(places);
    Ball { mid: Rat::new(digits.parse().expect("pi digits"), den.clone()), rad: Rat::new(BigInt::one(), den) }
}

fn atan_inv(x: u64, bits: u32) -> Ball {
    // atan(1/x) = Σ (-1)^k / ((2k+1) x^(2k+1)); alternating with decreasing terms.
    let target = Rat::new(BigInt::one(), pow2(bits + 4));
    let x = BigInt::from(x);
    let mut acc = Ball::exact(Rat::zero());
    let mut xpow = x.clone();
    let mut k: u64 = 0;
    loop {
        let term = Rat::new(BigInt::one(), BigInt::from(2 * k + 1) * &xpow);
        if term < target {
            acc.rad += term;
            break;
        }
        let signed = if k.is_multiple_of(2) { term } else { -term };
        acc = Ball { mid: acc.mid + signed, rad: acc.rad }.round(bits + 8);
        xpow = &xpow * &x * &x;
        k += 1;
    }
    acc
}

fn pi_machin(bits: u32) -> Ball {
    let a = atan_inv(5, bits + 4).scale(&int(16));
    let b = atan_inv(239, bits + 4).scale(&int(4));
    a.sub(&b).round(bits)
}

/// A certified enclosure of π with radius at most about `2^-bits`.
pub fn pi_ball(bits: u32) -> Ball {
    if bits <= PI_CONST_BITS {
        pi_from_digits().round(bits + 2)
    } else {
        pi_machin(bits)
    }
}

pub fn sqrt7_ball(bits: u32) -> Ball {
    let s = (BigInt::from(7) << (2 * bits as usize)).sqrt();
    let den = pow2(bits);
    Ball { mid: Rat::new(2 * s + 1, 2 * &den), rad: Rat::new(BigInt::one(), 2 * den) }
}

/// Smallest dyadic with `bits` fractional bits that is `>= r`.
fn round_up(r: &Rat, bits: u32) -> Rat {
    let scale = Rat::from_integer(pow2(bits));
    (r * &scale).ceil() / scale
}

/// Enclosures of `cos(2πj/n)` and `sin(2πj/n)`.
pub fn cos_sin_ball(j: i64, n: u32, bits: u32) -> (Ball, Ball) {
    let n_i = n as i64;
    let mut j = j.rem_euclid(n_i);
    // Map into [-π, π] so the Taylor series stays short.
    if 2 * j > n_i {
        j -= n_i;
    }
    let work = bits + 16;
    let theta = pi_ball(work).scale(&rat(2 * j, n_i)).round(work);
    let theta_max = round_up(&theta.abs_max(), work);
    let target = Rat::new(BigInt::one(), pow2(bits + 4));
    let mut cos = Ball::exact(Rat::zero());
    let mut sin = Ball::exact(Rat::zero());
    let mut term = Ball::exact(Rat::one());
    let mut bound = Rat::one();
    let mut m: u32 = 0;
    loop {
        match m % 4 {
            0 => cos = cos.add(&term),
            1 => sin = sin.add(&term),
            2 => cos = cos.sub(&term),
            _ => sin = sin.sub(&term),
        }
        m += 1;
        term = term.mul(&theta).scale(&rat(1, m as i64)).round(work);
        bound = round_up(&(bound * &theta_max / int(m as i64)), work);
        if bound < target && Rat::from_integer(BigInt::from(m)) > theta_max {
            break;
        }
    }
    // Lagrange remainder for whichever series was cut short.
    cos.rad += &bound;
    sin.rad += &bound;
    (cos.round(bits + 2), sin.round(bits + 2))
}

/// A rational approximation together with an absolute error bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    #[serde(with = "rat_string")]
    pub value: Rat,
    #[serde(with = "rat_string")]
    pub error_bound: Rat,
}

impl Approximation {
    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.value)
    }

    pub fn error_f64(&self) -> f64 {
        rat_to_f64(&self.error_bound)
    }

    /// Decimal rendering truncated to `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        decimal_string(&self.value, digits)
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // BigRational::to_f64 handles large numerators/denominators by scaling.
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn decimal_string(r: &Rat, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let scaled = (a * Rat::from_integer(BigInt::from(10u32).pow(digits as u32))).floor();
    let s = scaled.numer().to_string();
    let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
    let (ip, fp) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{fp}")
    }
}

/// Key of a symbolic term: (power of π, power of √7). After normalisation the
/// √7 exponent is always 0 or 1.
pub type TermKey = (i32, i32);

/// Finite sums `Σ q · π^a · 7^(b/2)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolicReal {
    terms: BTreeMap<TermKey, Rat>,
}

fn seven_pow(e: i32) -> Rat {
    let p = BigInt::from(7).pow(e.unsigned_abs());
    if e >= 0 {
        Rat::from_integer(p)
    } else {
        Rat::new(BigInt::one(), p)
    }
}

impl SymbolicReal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rat(q: Rat) -> Self {
        Self::term(q, 0, 0)
    }

    /// `q · π^pi · 7^(seven_half/2)`, normalised.
    pub fn term(q: Rat, pi: i32, seven_half: i32) -> Self {
        let mut out = Self::zero();
        out.push(q, pi, seven_half);
        out
    }

    pub fn pi_pow(a: i32) -> Self {
        Self::term(Rat::one(), a, 0)
    }

    pub fn seven_half_pow(b: i32) -> Self {
        Self::term(Rat::one(), 0, b)
    }

    fn push(&mut self, q: Rat, pi: i32, seven_half: i32) {
        if q.is_zero() {
            return;
        }
        let parity = seven_half.rem_euclid(2);
        let q = q * seven_pow((seven_half - parity) / 2);
        let key = (pi, parity);
        let entry = self.terms.entry(key).or_insert_with(Rat::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Rat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, pi: i32, seven_half: i32) -> Rat {
        self.terms.get(&(pi, seven_half)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn as_rational(&self) -> Result<Rat> {
        let mut out = Rat::zero();
        for (&(pi, s), q) in &self.terms {
            if pi != 0 || s != 0 {
                return Err(Error::NotRational(self.to_string()));
            }
            out += q;
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::from_rat(Rat::one()), |acc, _| &acc * self)
    }

    fn ball(&self, bits: u32) -> Ball {
        let work = bits + 8;
        let pi = pi_ball(work);
        let sqrt7 = sqrt7_ball(work);
        let mut acc = Ball::exact(Rat::zero());
        for (&(a, b), q) in &self.terms {
            let mut t = pi.pow(a.unsigned_abs(), work);
            if a < 0 {
                t = t.recip().expect("pi is nonzero").round(work);
            }
            if b == 1 {
                t = t.mul(&sqrt7).round(work);
            }
            acc = acc.add(&t.scale(q)).round(work);
        }
        acc
    }

    /// Approximation with relative error at most `2^-precision_bits`.
    pub fn to_approximation(&self, precision_bits: u32) -> Approximation {
        let precision_bits = precision_bits.max(32);
        if self.is_zero() {
            return Approximation { value: Rat::zero(), error_bound: Rat::zero() };
        }
        if let Ok(q) = self.as_rational() {
            return Approximation { value: q, error_bound: Rat::zero() };
        }
        let target = Rat::new(BigInt::one(), pow2(precision_bits));
        let mut bits = precision_bits + 16;
        loop {
            let b = self.ball(bits);
            if !b.contains_zero() && b.rad <= &target * (b.mid.abs() - &b.rad) {
                return Approximation { value: b.mid, error_bound: b.rad };
            }
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_approximation(64).to_f64()
    }
}

impl From<Rat> for SymbolicReal {
    fn from(q: Rat) -> Self {
        Self::from_rat(q)
    }
}

impl Add for &SymbolicReal {
    type Output = SymbolicReal;
    fn add(self, rhs: &SymbolicReal) -> SymbolicReal {
        let mut out = self.clone();
        for (&(a, b), q) in &rhs.terms {
            out.push(q.clone(), a, b);
        }
        out
    }
}

impl Add for SymbolicReal {
    type Output = SymbolicReal;
    fn add(self, rhs: SymbolicReal) -> SymbolicReal {
        &self + &rhs
    }
}

impl Neg for &SymbolicReal {
    type Output = SymbolicReal;
    fn neg(self) -> SymbolicReal {
        SymbolicReal { terms: self.terms.iter().map(|(k, q)| (*k, -q)).collect() }
    }
}

impl Sub for &SymbolicReal {
    type Output = SymbolicReal;
    fn sub(self, rhs: &SymbolicReal) -> SymbolicReal {
        self + &(-rhs)
    }
}

impl Mul for &SymbolicReal {
    type Output = SymbolicReal;
    fn mul(self, rhs: &SymbolicReal) -> SymbolicReal {
        let mut out = SymbolicReal::zero();
        for (&(a1, b1), q1) in &self.terms {
            for (&(a2, b2), q2) in &rhs.terms {
                out.push(q1 * q2, a1 + a2, b1 + b2);
            }
        }
        out
    }
}

impl Mul for SymbolicReal {
    type Output = SymbolicReal;
    fn mul(self, rhs: SymbolicReal) -> SymbolicReal {
        &self * &rhs
    }
}

impl fmt::Display for SymbolicReal {
    /// Term syntax: `32/2401*7^(1/2)*pi^3 + ...`, `0` for the empty sum.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), q) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", fmt_rat(q))?;
            if b == 1 {
                write!(f, "*7^(1/2)")?;
            }
            match a {
                0 => {}
                1 => write!(f, "*pi")?,
                _ => write!(f, "*pi^{a}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    pi: i32,
    seven_half: i32,
    num: String,
    den: String,
}

impl Serialize for SymbolicReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(&(pi, seven_half), q)| TermJson { pi, seven_half, num: q.numer().to_string(), den: q.denom().to_string() })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymbolicReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<TermJson>::deserialize(d)?;
        let mut out = SymbolicReal::zero();
        for t in terms {
            let n: BigInt = t.num.parse().map_err(serde::de::Error::custom)?;
            let den: BigInt = t.den.parse().map_err(serde::de::Error::custom)?;
            if den.is_zero() {
                return Err(serde::de::Error::custom("zero denominator"));
            }
            out.push(Rat::new(n, den), t.pi, t.seven_half);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sr(q: Rat, pi: i32, s: i32) -> SymbolicReal {
        SymbolicReal::term(q, pi, s)
    }

    #[test]
    fn add_examples() {
        let a = sr(rat(1, 6), 2, 0);
        assert_eq!(&a + &SymbolicReal::zero(), a);
        assert!((&sr(rat(3, 7), 0, 0) + &sr(rat(-3, 7), 0, 0)).is_zero());
        assert_eq!(&sr(int(1), 0, 1) + &sr(int(1), 0, 1), sr(int(2), 0, 1));
    }

    #[test]
    fn mul_examples() {
        let r7 = SymbolicReal::seven_half_pow(1);
        assert_eq!((&r7 * &r7).as_rational().unwrap(), int(7));
        let p = &sr(rat(1, 6), 2, 0) * &SymbolicReal::pi_pow(3);
        assert_eq!(p, sr(rat(1, 6), 5, 0));
        let q = &SymbolicReal::seven_half_pow(5) * &SymbolicReal::seven_half_pow(-7);
        assert_eq!(q.as_rational().unwrap(), rat(1, 7));
        // float oracle for the exponent arithmetic
        assert!((7f64.powf(2.5) * 7f64.powf(-3.5) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn as_rational_examples() {
        assert_eq!(sr(rat(3, 7), 0, 0).as_rational().unwrap(), rat(3, 7));
        assert!(matches!(sr(rat(1, 6), 2, 0).as_rational(), Err(Error::NotRational(_))));
        let x = &(&SymbolicReal::seven_half_pow(-7) * &SymbolicReal::seven_half_pow(7)) * &SymbolicReal::from_rat(rat(5, 3));
        assert_eq!(x.as_rational().unwrap(), rat(5, 3));
        assert!(matches!(SymbolicReal::seven_half_pow(1).as_rational(), Err(Error::NotRational(_))));
    }

    #[test]
    fn float_examples() {
        let basel = sr(rat(1, 6), 2, 0).to_approximation(64);
        let series: f64 = (1..200_000u64).rev().map(|n| 1.0 / (n as f64 * n as f64)).sum::<f64>() + 1.0 / 200_000.0;
        assert!((basel.to_f64() - series).abs() < 1e-9);
        assert!((basel.to_f64() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
        let exact = sr(rat(3, 7), 0, 0).to_approximation(64);
        assert_eq!(exact.value, rat(3, 7));
        assert!(exact.error_bound.is_zero());
        let l = sr(int(32), 3, -7).to_approximation(80);
        assert!(l.to_decimal(10).starts_with("1.0933430694"));
    }

    #[test]
    fn relative_error_bound_holds() {
        for bits in [32u32, 64, 128, 200, 500] {
            let x = sr(int(32), 3, -7);
            let a = x.to_approximation(bits);
            let bound = Rat::new(BigInt::one(), pow2(bits)) * a.value.abs();
            assert!(a.error_bound <= bound, "bits {bits}");
        }
    }

    #[test]
    fn pi_sources_agree() {
        let c = pi_from_digits();
        let m = pi_machin(400);
        assert!((c.mid - m.mid).abs() <= c.rad + m.rad);
    }

    #[test]
    fn cos_sin_enclosures() {
        for n in [3u32, 7, 21] {
            for j in 0..n as i64 {
                let (c, s) = cos_sin_ball(j, n, 60);
                let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                assert!((rat_to_f64(&c.mid) - t.cos()).abs() < 1e-12);
                assert!((rat_to_f64(&s.mid) - t.sin()).abs() < 1e-12);
                assert!(rat_to_f64(&c.rad) < 1e-17);
            }
        }
    }

    #[test]
    fn json_shape() {
        let x = sr(int(32), 3, -7);
        let j = serde_json::to_value(&x).unwrap();
        assert_eq!(j, serde_json::json!([{"pi": 3, "seven_half": 1, "num": "32", "den": "2401"}]));
        let back: SymbolicReal = serde_json::from_value(j).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(fmt_rat(&rat(-6, 4)), "-3/2");
        assert_eq!(parse_rat(" 3/7 ").unwrap(), rat(3, 7));
        assert_eq!(parse_rat("5").unwrap(), int(5));
        assert!(parse_rat("1/0").is_err());
        assert_eq!(sr(int(32), 3, -7).to_string(), "32/2401*7^(1/2)*pi^3");
        assert_eq!(decimal_string(&rat(-3, 7), 4), "-0.4285");
    }
}
