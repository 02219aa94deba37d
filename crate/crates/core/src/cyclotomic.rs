//! Exact arithmetic in cyclotomic fields `Q(ζ_N)` in the power basis
//! `1, ζ, …, ζ^(φ(N)-1)`.
//!
//! The core field is `L = Q(ζ_7)`; `Q(ζ_21)` carries the mixed order-3 /
//! order-7 rotation data. `K = Q(λ) = Q(√-7)` with `λ = ζ + ζ² + ζ⁴` sits
//! inside `L` as the fixed field of `σ: ζ ↦ ζ²`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{cos_sin_ball, fmt_rat, int, parse_rat, rat_to_f64, Ball, Rat};

pub fn euler_phi(n: u32) -> u32 {
    let mut n0 = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= n0 {
        if n0.is_multiple_of(p) {
            while n0.is_multiple_of(p) {
                n0 /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n0 > 1 {
        out -= out / n0;
    }
    out
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
fn compute_cyclotomic(n: u32) -> Vec<BigInt> {
    // x^n - 1 divided by Φ_d for every proper divisor d of n.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = poly_exact_div(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    q
}

fn cache() -> &'static RwLock<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The `n`-th cyclotomic polynomial, computed once per modulus.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<BigInt>> {
    if let Some(p) = cache().read().expect("cyclotomic cache").get(&n) {
        return p.clone();
    }
    let p = Arc::new(compute_cyclotomic(n));
    cache().write().expect("cyclotomic cache").entry(n).or_insert(p).clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_rat(r: &Rat) -> Sign {
        if r.is_zero() {
            Sign::Zero
        } else if r.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// An element of `Q(ζ_N)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycElt {
    modulus: u32,
    coeffs: Vec<Rat>,
}

impl CycElt {
    /// Reduce an arbitrary polynomial in `ζ_N` to canonical form.
    pub fn from_poly(modulus: u32, poly: Vec<Rat>) -> Self {
        assert!(modulus >= 1, "cyclotomic modulus must be positive");
        let n = modulus as usize;
        // First fold exponents modulo N (ζ^N = 1), then divide by Φ_N.
        let mut folded = vec![Rat::zero(); n.max(1)];
        for (i, c) in poly.into_iter().enumerate() {
            if !c.is_zero() {
                folded[i % n] += c;
            }
        }
        let phi = cyclotomic_poly(modulus);
        let deg = phi.len() - 1;
        for i in (deg..folded.len()).rev() {
            let c = std::mem::take(&mut folded[i]);
            if c.is_zero() {
                continue;
            }
            for (j, pj) in phi.iter().enumerate().take(deg) {
                folded[i - deg + j] -= &c * Rat::from_integer(pj.clone());
            }
        }
        folded.truncate(deg);
        folded.resize(deg, Rat::zero());
        CycElt { modulus, coeffs: folded }
    }

    pub fn zero(modulus: u32) -> Self {
        Self::from_rat(modulus, Rat::zero())
    }

    pub fn one(modulus: u32) -> Self {
        Self::from_rat(modulus, Rat::one())
    }

    pub fn from_rat(modulus: u32, q: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); euler_phi(modulus) as usize];
        coeffs[0] = q;
        CycElt { modulus, coeffs }
    }

    pub fn from_int(modulus: u32, n: i64) -> Self {
        Self::from_rat(modulus, int(n))
    }

    /// `ζ_N^k` for any integer `k`.
    pub fn zeta_pow(modulus: u32, k: i64) -> Self {
        let e = k.rem_euclid(modulus as i64) as usize;
        let mut poly = vec![Rat::zero(); e + 1];
        poly[e] = Rat::one();
        Self::from_poly(modulus, poly)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Membership in `Z[ζ_N]`, the full ring of integers.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.modulus, other.modulus, "cyclotomic modulus mismatch; embed() into a common field first");
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self * other)
    }

    pub fn scale(&self, q: &Rat) -> Self {
        CycElt { modulus: self.modulus, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.modulus);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Powers with negative exponents go through the inverse.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs() as u32))
        }
    }

    fn units(&self) -> impl Iterator<Item = i64> {
        let n = self.modulus as i64;
        (1..=n.max(1)).filter(move |k| k.gcd(&n) == 1)
    }

    /// `ζ ↦ ζ^k` applied coefficient-wise.
    pub fn galois(&self, k: i64) -> Self {
        let n = self.modulus as i64;
        let mut poly = vec![Rat::zero(); self.modulus as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let e = (i as i64 * k).rem_euclid(n) as usize;
                poly[e] += c;
            }
        }
        Self::from_poly(self.modulus, poly)
    }

    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// `Π_{k ∈ (Z/N)^*} a^{σ_k}`, the absolute norm to `Q`.
    pub fn rational_norm(&self) -> Rat {
        let prod = self.units().fold(Self::one(self.modulus), |acc, k| &acc * &self.galois(k));
        prod.as_rational().expect("absolute norm is rational")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // a^{-1} = (product of the other conjugates) / N(a)
        let others = self.units().filter(|&k| k != 1).fold(Self::one(self.modulus), |acc, k| &acc * &self.galois(k));
        let n = (&others * self).as_rational().expect("absolute norm is rational");
        Ok(others.scale(&n.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Image in `Q(ζ_M)` for a multiple `M` of the modulus.
    pub fn embed(&self, target: u32) -> Result<Self> {
        if !target.is_multiple_of(self.modulus) {
            return Err(Error::InvalidArgument(format!("Q(zeta_{}) does not embed in Q(zeta_{})", self.modulus, target)));
        }
        let step = (target / self.modulus) as usize;
        let mut poly = vec![Rat::zero(); self.coeffs.len() * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Ok(Self::from_poly(target, poly))
    }

    /// Complex value under `ζ_N ↦ exp(2πi/N)`, in double precision.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.modulus as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (j, c)| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n;
            let c = rat_to_f64(c);
            (re + c * t.cos(), im + c * t.sin())
        })
    }

    fn real_part_ball(&self, bits: u32) -> Ball {
        let mut acc = Ball::exact(Rat::zero());
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cos = cached_cos(j as u32, self.modulus, bits);
            acc = acc.add(&cos.scale(c));
        }
        acc
    }

    /// Exact sign of a real element, decided by certified enclosures of
    /// `cos(2πj/N)` at doubling precision. Zero is recognised structurally.
    pub fn exact_sign(&self) -> Result<Sign> {
        if !self.is_real() {
            return Err(Error::InvalidArgument(format!("{self} is not real")));
        }
        if self.is_zero() {
            return Ok(Sign::Zero);
        }
        let mut bits = 64;
        loop {
            let b = self.real_part_ball(bits);
            if !b.contains_zero() {
                return Ok(Sign::of_rat(&b.mid));
            }
            bits *= 2;
        }
    }
}

fn cached_cos(j: u32, n: u32, bits: u32) -> Arc<Ball> {
    type Key = (u32, u32, u32);
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<Ball>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (j, n, bits);
    if let Some(b) = cache.read().expect("cos cache").get(&key) {
        return b.clone();
    }
    let b = Arc::new(cos_sin_ball(j as i64, n, bits).0);
    cache.write().expect("cos cache").insert(key, b.clone());
    b
}

impl fmt::Debug for CycElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElt[{}]({})", self.modulus, self)
    }
}

impl fmt::Display for CycElt {
    /// `3/2 + z - 1/2*z^4`, with `z = ζ_N`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if wrote {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            wrote = true;
            let mono = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            match (i, a.is_one()) {
                (0, _) => write!(f, "{}", fmt_rat(&a))?,
                (_, true) => write!(f, "{mono}")?,
                _ => write!(f, "{}*{mono}", fmt_rat(&a))?,
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &CycElt {
    type Output = CycElt;
    fn add(self, rhs: &CycElt) -> CycElt {
        self.check(rhs);
        CycElt { modulus: self.modulus, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CycElt {
    type Output = CycElt;
    fn sub(self, rhs: &CycElt) -> CycElt {
        self.check(rhs);
        CycElt { modulus: self.modulus, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &CycElt {
    type Output = CycElt;
    fn neg(self) -> CycElt {
        CycElt { modulus: self.modulus, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &CycElt {
    type Output = CycElt;
    fn mul(self, rhs: &CycElt) -> CycElt {
        self.check(rhs);
        let mut poly = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    poly[i + j] += a * b;
                }
            }
        }
        CycElt::from_poly(self.modulus, poly)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycElt {
            type Output = CycElt;
            fn $m(self, rhs: CycElt) -> CycElt {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycElt {
    type Output = CycElt;
    fn neg(self) -> CycElt {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct CycJson {
    modulus: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycJson { modulus: self.modulus, coeffs: self.coeffs.iter().map(fmt_rat).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycElt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CycJson::deserialize(d)?;
        if j.modulus == 0 {
            return Err(serde::de::Error::custom("modulus must be positive"));
        }
        let coeffs = j.coeffs.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>().map_err(serde::de::Error::custom)?;
        Ok(CycElt::from_poly(j.modulus, coeffs))
    }
}

/// `ζ_N ↦ ζ_N^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaloisAuto {
    modulus: u32,
    exponent: i64,
}

impl GaloisAuto {
    pub fn new(modulus: u32, exponent: i64) -> Result<Self> {
        if exponent.gcd(&(modulus as i64)) != 1 {
            return Err(Error::NotInvertibleExponent { modulus, exponent });
        }
        Ok(GaloisAuto { modulus, exponent: exponent.rem_euclid(modulus as i64) })
    }

    /// The generator `σ: ζ_7 ↦ ζ_7²` of `Gal(L/K)`.
    pub fn sigma() -> Self {
        GaloisAuto { modulus: 7, exponent: 2 }
    }

    pub fn conjugation(modulus: u32) -> Self {
        GaloisAuto { modulus, exponent: (modulus as i64 - 1).max(1) }
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Self::new(self.modulus, self.exponent * other.exponent)
    }

    pub fn apply(&self, a: &CycElt) -> Result<CycElt> {
        if a.modulus != self.modulus {
            return Err(Error::ModulusMismatch(self.modulus, a.modulus));
        }
        Ok(a.galois(self.exponent))
    }
}

// ---------------------------------------------------------------------------
// L = Q(ζ_7) and its quadratic subfield K.

pub const L_MODULUS: u32 = 7;

pub fn zeta() -> CycElt {
    CycElt::zeta_pow(L_MODULUS, 1)
}

/// `λ = ζ + ζ² + ζ⁴ = (-1 + √-7)/2`.
pub fn lambda() -> CycElt {
    &(&zeta() + &CycElt::zeta_pow(7, 2)) + &CycElt::zeta_pow(7, 4)
}

pub fn lambda_bar() -> CycElt {
    lambda().conj()
}

/// `σ(a) = a(ζ²)` on `L`.
pub fn sigma(a: &CycElt) -> CycElt {
    debug_assert_eq!(a.modulus, L_MODULUS);
    a.galois(2)
}

/// `σ^k(a)` for any integer `k` (σ has order 3).
pub fn sigma_pow(a: &CycElt, k: i64) -> CycElt {
    a.galois([1, 2, 4][k.rem_euclid(3) as usize])
}

/// Which extension a norm is taken in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    LOverK,
    LOverQ,
    KOverQ,
}

/// Trace and norm from `L` down to `K`: `a + a^σ + a^σσ` and `a·a^σ·a^σσ`.
pub fn trace_norm_to_k(a: &CycElt) -> Result<(CycElt, CycElt)> {
    if a.modulus != L_MODULUS {
        return Err(Error::ModulusMismatch(L_MODULUS, a.modulus));
    }
    let (s1, s2) = (sigma(a), sigma_pow(a, 2));
    let trace = &(a + &s1) + &s2;
    let norm = &(a * &s1) * &s2;
    debug_assert!(sigma(&trace) == trace && sigma(&norm) == norm);
    Ok((trace, norm))
}

/// Norm with an explicit field tag; `KOverQ` requires `a ∈ K`.
pub fn norm(a: &CycElt, ext: Extension) -> Result<CycElt> {
    match ext {
        Extension::LOverK => Ok(trace_norm_to_k(a)?.1),
        Extension::LOverQ => Ok(CycElt::from_rat(a.modulus, a.rational_norm())),
        Extension::KOverQ => {
            if k_coords(a).is_none() {
                return Err(Error::InvalidArgument(format!("{a} is not in K")));
            }
            Ok(a * &a.conj())
        }
    }
}

/// Coordinates `(x, y)` with `a = x + y·λ`, when `a ∈ K`.
pub fn k_coords(a: &CycElt) -> Option<(Rat, Rat)> {
    if a.modulus != L_MODULUS {
        return None;
    }
    let (x, y) = (a.coeffs[0].clone(), a.coeffs[1].clone());
    (from_k_coords(&x, &y) == *a).then_some((x, y))
}

pub fn from_k_coords(x: &Rat, y: &Rat) -> CycElt {
    &CycElt::from_rat(L_MODULUS, x.clone()) + &lambda().scale(y)
}

/// Membership in `o_K = Z[λ]`.
pub fn is_ok_integral(a: &CycElt) -> bool {
    k_coords(a).is_some_and(|(x, y)| x.is_integer() && y.is_integer())
}

/// `N_{K/Q}(x + yλ) = x² - xy + 2y²`.
pub fn k_norm(x: &BigInt, y: &BigInt) -> BigInt {
    x * x - x * y + BigInt::from(2) * y * y
}

pub fn to_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}
