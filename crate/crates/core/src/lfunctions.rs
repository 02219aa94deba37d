//! Bernoulli numbers, special values of real Dirichlet L-functions, and the
//! covolume of the arithmetic lattice assembled from them.

use std::collections::BTreeMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{int, rat, Approximation, Rat, SymbolicReal};

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `B_n` with `B_1 = -1/2`, cached; readers never block each other once the
/// table covers their index.
pub fn bernoulli_number(n: u32) -> Rat {
    static TABLE: OnceLock<RwLock<Vec<Rat>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| RwLock::new(vec![Rat::one()]));
    if let Some(b) = table.read().expect("bernoulli table").get(n as usize) {
        return b.clone();
    }
    let mut t = table.write().expect("bernoulli table");
    // Σ_{k=0}^{m} C(m+1, k) B_k = 0
    while t.len() <= n as usize {
        let m = t.len() as u32;
        let s: Rat = (0..m).map(|k| Rat::from_integer(binomial(m + 1, k)) * &t[k as usize]).sum();
        t.push(-s / Rat::from_integer(BigInt::from(m + 1)));
    }
    t[n as usize].clone()
}

/// Coefficients of `B_n(x)`, index = power of `x`.
pub fn bernoulli_polynomial(n: u32) -> Vec<Rat> {
    let mut c = vec![Rat::zero(); n as usize + 1];
    for k in 0..=n {
        c[(n - k) as usize] = Rat::from_integer(binomial(n, k)) * bernoulli_number(k);
    }
    c
}

pub fn eval_poly(c: &[Rat], x: &Rat) -> Rat {
    c.iter().rev().fold(Rat::zero(), |acc, a| acc * x + a)
}

fn is_squarefree(n: u64) -> bool {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Kronecker symbol `(d/m)` for `m ≥ 1`.
pub fn kronecker(d: i64, m: u64) -> i32 {
    let mut m = m;
    let mut result = 1;
    while m.is_multiple_of(2) {
        m /= 2;
        let r = d.rem_euclid(8);
        result *= match r {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0,
        };
    }
    result * jacobi(d, m)
}

/// Jacobi symbol `(a/n)` for odd `n ≥ 1`.
fn jacobi(a: i64, n: u64) -> i32 {
    let n_i = n as i64;
    let mut a = a.rem_euclid(n_i) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// A real primitive character `a ↦ (D/a)` of conductor `|D|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    pub discriminant: i64,
    pub modulus: u64,
    /// `values[a]` for `0 ≤ a < modulus`.
    pub values: Vec<i8>,
}

impl DirichletCharacter {
    pub fn from_discriminant(d: i64) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("{d} is not a fundamental discriminant"));
        let a = d.unsigned_abs();
        let fundamental = d == 1
            || (d.rem_euclid(4) == 1 && is_squarefree(a))
            || (d.rem_euclid(4) == 0 && matches!((d / 4).rem_euclid(4), 2 | 3) && is_squarefree(a / 4));
        if !fundamental || d == 0 {
            return Err(bad());
        }
        let values = if a == 1 { vec![1] } else { (0..a).map(|m| if m == 0 { 0 } else { kronecker(d, m) as i8 }).collect() };
        Ok(DirichletCharacter { discriminant: d, modulus: a, values })
    }

    pub fn trivial() -> Self {
        Self::from_discriminant(1).expect("1 is fundamental")
    }

    pub fn value(&self, a: i64) -> i32 {
        self.values[a.rem_euclid(self.modulus as i64) as usize] as i32
    }

    pub fn is_trivial(&self) -> bool {
        self.modulus == 1
    }

    /// `0` for even, `1` for odd characters.
    pub fn parity(&self) -> u32 {
        if self.value(-1) == -1 {
            1
        } else {
            0
        }
    }
}

/// `B_{n,χ} = f^{n-1} Σ_{a=1}^{f} χ(a) B_n(a/f)`. For the trivial character
/// this returns `B_n` itself, so `B_{1,1} = -1/2`.
pub fn generalized_bernoulli(n: u32, chi: &DirichletCharacter) -> Rat {
    if chi.is_trivial() {
        return bernoulli_number(n);
    }
    let f = chi.modulus as i64;
    let poly = bernoulli_polynomial(n);
    let s: Rat = (1..=f).filter(|&a| chi.value(a) != 0).map(|a| eval_poly(&poly, &rat(a, f)) * int(chi.value(a) as i64)).sum();
    s * num_traits::pow(int(f), n as usize) / int(f)
}

/// `√n` as a symbolic real; only `n = s²` or `n = 7 s²` are representable.
pub fn symbolic_sqrt(n: u64) -> Result<SymbolicReal> {
    let (seven, rest) = if n.is_multiple_of(7) && is_square(n / 7) { (1, n / 7) } else { (0, n) };
    if !is_square(rest) {
        return Err(Error::Unsupported(format!("sqrt({n}) is outside Q(sqrt 7)")));
    }
    let s = (rest as f64).sqrt().round() as i64;
    Ok(SymbolicReal::term(int(s), 0, seven))
}

fn is_square(n: u64) -> bool {
    let s = (n as f64).sqrt().round() as u64;
    (s.saturating_sub(1)..=s + 1).any(|t| t * t == n)
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `L(n, χ)` for `χ(-1) = (-1)^n`:
/// `(-1)^{1+(n-a)/2} · (√f/2) · (2π/f)^n · B_{n,χ}/n!`, `a` the parity of `χ`.
pub fn dirichlet_l_value(n: u32, chi: &DirichletCharacter) -> Result<SymbolicReal> {
    if n == 0 || chi.parity() != n % 2 {
        return Err(Error::ParityMismatch { n });
    }
    if chi.is_trivial() && n == 1 {
        return Err(Error::InvalidArgument("zeta has a pole at 1".into()));
    }
    let f = chi.modulus;
    let a = chi.parity();
    let sign = if ((n - a) / 2).is_multiple_of(2) { -1 } else { 1 };
    let coeff = generalized_bernoulli(n, chi) * int(sign) * Rat::new(BigInt::from(2).pow(n), BigInt::from(f).pow(n))
        / Rat::from_integer(2 * factorial(n));
    Ok(&SymbolicReal::term(coeff, n as i32, 0) * &symbolic_sqrt(f)?)
}

/// `ζ(2) = π²/6`.
pub fn riemann_zeta_2() -> SymbolicReal {
    dirichlet_l_value(2, &DirichletCharacter::trivial()).expect("zeta(2)")
}

/// Partial sum `Σ_{m ≤ N} χ(m)/m^n` in 2^-100 fixed point, with a bound
/// covering both truncation of each term and the tail.
pub fn l_series_oracle(n: u32, chi: &DirichletCharacter, terms: u64) -> Result<Approximation> {
    if terms < 10 {
        return Err(Error::InvalidArgument("need at least 10 terms".into()));
    }
    if n == 0 || (n == 1 && chi.is_trivial()) {
        return Err(Error::InvalidArgument(format!("series for n = {n} does not converge")));
    }
    const SHIFT: u32 = 100;
    let one: u128 = 1 << SHIFT;
    let mut acc: i128 = 0;
    for m in 1..=terms {
        let c = chi.value(m as i64);
        if c == 0 {
            continue;
        }
        let denom = (m as u128).checked_pow(n).ok_or_else(|| Error::Unsupported("m^n overflows u128".into()))?;
        let t = (one / denom) as i128;
        acc += if c > 0 { t } else { -t };
    }
    let scale = Rat::from_integer(BigInt::one() << SHIFT as usize);
    let rounding = Rat::from_integer(BigInt::from(terms)) / &scale;
    let tail = if n == 1 {
        // Abel summation with partial character sums bounded by M.
        let mut s = 0i64;
        let mut max = 0i64;
        for a in 1..=chi.modulus as i64 {
            s += chi.value(a) as i64;
            max = max.max(s.abs());
        }
        Rat::new(BigInt::from(2 * max), BigInt::from(terms + 1))
    } else {
        Rat::new(BigInt::one(), BigInt::from(terms).pow(n - 1) * BigInt::from(n - 1))
    };
    Ok(Approximation { value: Rat::new(BigInt::from(acc), scale.to_integer()), error_bound: rounding + tail })
}

/// Serde adapter for place → rational maps written as `{"2": "3"}`.
pub mod rat_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<u64, Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let out: BTreeMap<String, String> = m.iter().map(|(k, v)| (k.to_string(), crate::scalars::fmt_rat(v))).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<u64, Rat>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let k = k.parse::<u64>().map_err(serde::de::Error::custom)?;
                let v = crate::scalars::parse_rat(&v).map_err(serde::de::Error::custom)?;
                Ok((k, v))
            })
            .collect()
    }
}

/// Inputs to `3 D_K^{5/2} / D_F · (16π⁵)^{-[F:Q]} · ζ_F(2) · L(3, χ) · Π e(v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeInput {
    pub d_k: u64,
    pub d_f: u64,
    pub field_degree: u32,
    pub zeta_value: SymbolicReal,
    pub l_value: SymbolicReal,
    #[serde(with = "rat_map")]
    pub local_factors: BTreeMap<u64, Rat>,
}

impl VolumeInput {
    pub fn standard() -> Self {
        VolumeInput {
            d_k: 7,
            d_f: 1,
            field_degree: 1,
            zeta_value: riemann_zeta_2(),
            l_value: dirichlet_l_value(3, &DirichletCharacter::from_discriminant(-7).expect("-7")).expect("L(3)"),
            local_factors: BTreeMap::from([(2, int(3)), (7, int(1))]),
        }
    }

    pub fn local_product(&self) -> Rat {
        self.local_factors.values().fold(Rat::one(), |acc, e| acc * e)
    }
}

/// The L-value `-(7/8) π³ 7^{-5/2}` as it appears in print; only used to show
/// that it does not produce a consistent covolume.
pub fn printed_l_value() -> SymbolicReal {
    SymbolicReal::term(rat(-7, 8), 3, -5)
}

/// The product as a symbolic real, before the rationality check.
pub fn covolume_symbolic(v: &VolumeInput) -> Result<SymbolicReal> {
    if v.d_f == 0 {
        return Err(Error::DivisionByZero);
    }
    let dk = symbolic_sqrt(v.d_k)?.pow(5);
    let deg = v.field_degree;
    let pi_part = SymbolicReal::term(Rat::new(BigInt::one(), BigInt::from(16u32).pow(deg)), -5 * deg as i32, 0);
    let head = SymbolicReal::from_rat(int(3) / int(v.d_f as i64) * v.local_product());
    Ok(&(&(&(&head * &dk) * &pi_part) * &v.zeta_value) * &v.l_value)
}

/// Exact covolume; `NotRational` if π or √7 fail to cancel.
pub fn covolume(v: &VolumeInput) -> Result<Rat> {
    covolume_symbolic(v)?.as_rational()
}

/// `c₂` of the smooth quotient by a torsion-free subgroup of the given index.
pub fn euler_number_of_cover(covolume: &Rat, index: u64) -> Result<Rat> {
    if index == 0 {
        return Err(Error::InvalidArgument("index must be >= 1".into()));
    }
    Ok(covolume * int(index as i64))
}

/// `|closed form - oracle| ≤ oracle bound`, checked with exact rationals
/// against a certified enclosure of the closed form.
pub fn agrees_with_oracle(closed: &SymbolicReal, oracle: &Approximation) -> bool {
    let c = closed.to_approximation(120);
    (&c.value - &oracle.value).abs() <= &oracle.error_bound + &c.error_bound
}

pub fn to_u64(r: &Rat) -> Option<u64> {
    r.is_integer().then(|| r.to_integer().to_u64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chi(d: i64) -> DirichletCharacter {
        DirichletCharacter::from_discriminant(d).unwrap()
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli_number(0), int(1));
        assert_eq!(bernoulli_number(1), rat(-1, 2));
        assert_eq!(bernoulli_number(2), rat(1, 6));
        assert_eq!(bernoulli_number(12), rat(-691, 2730));
        assert!(bernoulli_number(7).is_zero());
        assert_eq!(bernoulli_polynomial(3), vec![int(0), rat(1, 2), rat(-3, 2), int(1)]);
        let b3 = bernoulli_polynomial(3);
        let vals: Vec<Rat> = (1..7).map(|a| eval_poly(&b3, &rat(a, 7)) * int(343)).collect();
        assert_eq!(vals, [15, 15, 6, -6, -15, -15].map(int).to_vec());
    }

    #[test]
    fn characters() {
        let c7 = chi(-7);
        assert_eq!(c7.values, vec![0, 1, 1, -1, 1, -1, -1]);
        assert_eq!(c7.parity(), 1);
        assert_eq!(chi(-4).values, vec![0, 1, 0, -1]);
        assert_eq!(chi(-3).values, vec![0, 1, -1]);
        assert_eq!(chi(8).values, vec![0, 1, 0, -1, 0, -1, 0, 1]);
        assert_eq!(chi(8).parity(), 0);
        assert!(DirichletCharacter::from_discriminant(-8).is_ok());
        assert!(DirichletCharacter::from_discriminant(20).is_err());
        assert!(DirichletCharacter::from_discriminant(-28).is_err());
        for a in 1..50i64 {
            for b in 1..50i64 {
                assert_eq!(c7.value(a * b), c7.value(a) * c7.value(b));
            }
        }
    }

    #[test]
    fn generalized_bernoulli_examples() {
        assert_eq!(generalized_bernoulli(3, &chi(-7)), rat(48, 7));
        assert_eq!(generalized_bernoulli(1, &DirichletCharacter::trivial()), rat(-1, 2));
        assert!(generalized_bernoulli(2, &chi(-7)).is_zero());
        assert_eq!(generalized_bernoulli(1, &chi(-4)), rat(-1, 2));
        assert_eq!(generalized_bernoulli(1, &chi(-7)), int(-1));
    }

    #[test]
    fn parity_vanishing() {
        for d in [-7, -4, -3] {
            let c = chi(d);
            for n in 1..=6u32 {
                if c.parity() != n % 2 {
                    assert!(generalized_bernoulli(n, &c).is_zero(), "d={d} n={n}");
                }
            }
        }
    }

    #[test]
    fn closed_forms() {
        let l3 = dirichlet_l_value(3, &chi(-7)).unwrap();
        assert_eq!(l3, SymbolicReal::term(int(32), 3, -7));
        assert!(l3.to_approximation(64).to_decimal(12).starts_with("1.093343069"));
        assert_eq!(riemann_zeta_2(), SymbolicReal::term(rat(1, 6), 2, 0));
        assert_eq!(dirichlet_l_value(1, &chi(-4)).unwrap(), SymbolicReal::term(rat(1, 4), 1, 0));
        assert_eq!(dirichlet_l_value(2, &chi(-7)), Err(Error::ParityMismatch { n: 2 }));
        assert!(matches!(dirichlet_l_value(1, &chi(-3)), Err(Error::Unsupported(_))));
        // L(2, χ_8) = π²/(8√2)… is outside Q(√7).
        assert!(matches!(dirichlet_l_value(2, &chi(8)), Err(Error::Unsupported(_))));
        // L(3, χ_4) = π³/32
        assert_eq!(dirichlet_l_value(3, &chi(-4)).unwrap(), SymbolicReal::term(rat(1, 32), 3, 0));
    }

    #[test]
    fn series_oracle_agrees() {
        let o = l_series_oracle(3, &chi(-7), 10_000).unwrap();
        assert!(o.error_f64() <= 5.000_001e-9);
        assert!(agrees_with_oracle(&dirichlet_l_value(3, &chi(-7)).unwrap(), &o));
        let z = l_series_oracle(2, &DirichletCharacter::trivial(), 10_000).unwrap();
        assert!(z.error_f64() <= 1.0001e-4);
        assert!(z.to_decimal(5).starts_with("1.6448"));
        assert!(agrees_with_oracle(&riemann_zeta_2(), &z));
        let l1 = l_series_oracle(1, &chi(-4), 100_000).unwrap();
        assert!(agrees_with_oracle(&dirichlet_l_value(1, &chi(-4)).unwrap(), &l1));
        let coarse = l_series_oracle(3, &chi(-7), 10).unwrap();
        let fine = l_series_oracle(3, &chi(-7), 1_000_000).unwrap();
        assert!((&coarse.value - &fine.value).abs() <= coarse.error_bound.clone() + &fine.error_bound);
        assert!(fine.error_f64() < 1e-12);
        assert!(agrees_with_oracle(&dirichlet_l_value(3, &chi(-7)).unwrap(), &fine));
        // the printed constant is far outside the bound
        assert!(!agrees_with_oracle(&printed_l_value(), &fine));
    }

    #[test]
    fn covolume_examples() {
        let v = VolumeInput::standard();
        assert_eq!(covolume(&v).unwrap(), rat(3, 7));
        let mut v1 = v.clone();
        v1.local_factors.insert(2, int(1));
        assert_eq!(covolume(&v1).unwrap(), rat(1, 7));
        let mut bad = v.clone();
        bad.l_value = printed_l_value();
        assert_eq!(covolume(&bad).unwrap(), rat(-21, 256));
        bad.l_value = SymbolicReal::term(int(1), 3, 0);
        assert!(matches!(covolume(&bad), Err(Error::NotRational(_))));
        assert_eq!(euler_number_of_cover(&rat(3, 7), 7).unwrap(), int(3));
        assert_eq!(euler_number_of_cover(&rat(5, 11), 1).unwrap(), rat(5, 11));
        assert_eq!(euler_number_of_cover(&rat(3, 7), 21).unwrap(), int(9));
    }

    #[test]
    fn volume_input_json() {
        let v = VolumeInput::standard();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["local_factors"], serde_json::json!({"2": "3", "7": "1"}));
        let back: VolumeInput = serde_json::from_value(j).unwrap();
        assert_eq!(back, v);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn pi_cancellation(e2 in 1i64..20, e7 in 1i64..20, d in 1i64..9) {
            let mut v = VolumeInput::standard();
            v.local_factors = BTreeMap::from([(2, rat(e2, d)), (7, int(e7))]);
            let vol = covolume(&v).unwrap();
            prop_assert_eq!(vol, rat(e2 * e7, 7 * d));
        }

        #[test]
        fn bernoulli_translation(n in 0u32..12, x in -20i64..20, d in 1i64..10) {
            // B_n(x+1) - B_n(x) = n x^{n-1}
            let p = bernoulli_polynomial(n);
            let x = rat(x, d);
            let diff = eval_poly(&p, &(&x + int(1))) - eval_poly(&p, &x);
            let expect = if n == 0 { Rat::zero() } else { int(n as i64) * num_traits::pow(x, n as usize - 1) };
            prop_assert_eq!(diff, expect);
        }
    }
}
