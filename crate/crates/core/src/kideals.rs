//! Prime ideals of `o_K = Z[λ]`, `λ² + λ + 2 = 0`, and valuations of elements
//! of `K = Q(√-7)`. Class number one, so every ideal here is principal and
//! factorisations are reported prime by prime.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::cyclotomic::{k_coords, k_norm, CycElt};
use crate::error::{Error, Result};
use crate::scalars::Rat;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum KPrime {
    /// `(p, λ - r)` with `r² + r + 2 ≡ 0 (mod p)`; `r` is the residue of `λ`.
    Split {
        p: u64,
        root: u64,
    },
    Inert {
        p: u64,
    },
    /// `(√-7) = (2λ + 1)`.
    Ramified,
}

impl KPrime {
    pub fn rational_prime(&self) -> u64 {
        match self {
            KPrime::Split { p, .. } | KPrime::Inert { p } => *p,
            KPrime::Ramified => 7,
        }
    }

    /// Absolute residue degree over `Q`.
    pub fn degree(&self) -> u32 {
        match self {
            KPrime::Inert { .. } => 2,
            _ => 1,
        }
    }

    /// Residue degree of this prime in `L = Q(ζ_7)` over `K`: the order of `p`
    /// modulo 7 divided by the degree of the prime over `Q`. The ramified prime is
    /// totally ramified in `L/K`.
    pub fn residue_degree_in_l(&self) -> u32 {
        match self {
            KPrime::Ramified => 1,
            _ => multiplicative_order(self.rational_prime(), 7) / self.degree(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            KPrime::Split { p: 2, root: 0 } => "lambda".into(),
            KPrime::Split { p: 2, root: 1 } => "lambda_bar".into(),
            KPrime::Split { p, root } => format!("({p}, lambda - {root})"),
            KPrime::Inert { p } => format!("({p})"),
            KPrime::Ramified => "sqrt(-7)".into(),
        }
    }

    /// Valuation of `x + yλ ∈ o_K`, `x + yλ ≠ 0`.
    pub fn valuation_integral(&self, x: &BigInt, y: &BigInt) -> u32 {
        match self {
            KPrime::Inert { p } => {
                let g = x.gcd(y);
                valuation_int(&g, *p)
            }
            KPrime::Ramified => valuation_int(&k_norm(x, y), 7),
            KPrime::Split { p, root } => {
                let bound = valuation_int(&k_norm(x, y), *p);
                let pb = BigInt::from(*p);
                let mut modulus = pb.clone();
                let mut r = BigInt::from(*root);
                let mut v = 0;
                while v < bound {
                    if !(x + y * &r).mod_floor(&modulus).is_zero() {
                        break;
                    }
                    v += 1;
                    // Hensel: lift r to a root modulo p^(v+1).
                    modulus = &modulus * &pb;
                    r = hensel_step(&r, &modulus);
                }
                v
            }
        }
    }

    /// Valuation of a nonzero element of `K`.
    pub fn valuation(&self, a: &CycElt) -> Result<i64> {
        let (num_x, num_y, den) = integral_parts(a)?;
        let e = if *self == KPrime::Ramified { 2 } else { 1 };
        let vd = valuation_int(&den, self.rational_prime()) as i64 * e;
        Ok(self.valuation_integral(&num_x, &num_y) as i64 - vd)
    }
}

impl fmt::Display for KPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for KPrime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

fn hensel_step(r: &BigInt, modulus: &BigInt) -> BigInt {
    // Newton step for f(t) = t² + t + 2 with exact inverse of f'(r) mod modulus.
    let f = r * r + r + BigInt::from(2);
    let fp = BigInt::from(2) * r + BigInt::one();
    let inv = mod_inverse(&fp, modulus).expect("simple root");
    (r - f * inv).mod_floor(modulus)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

pub fn valuation_int(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

pub fn multiplicative_order(a: u64, n: u64) -> u32 {
    let a = a % n;
    let mut x = a;
    let mut k = 1;
    while x != 1 {
        x = x * a % n;
        k += 1;
        assert!(k <= n as u32, "{a} is not a unit mod {n}");
    }
    k
}

pub fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs().to_u64().expect("factorisation input fits in u64");
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primes of `K` lying over the rational prime `p`.
pub fn primes_over(p: u64) -> Vec<KPrime> {
    if p == 7 {
        return vec![KPrime::Ramified];
    }
    let roots: Vec<u64> = (0..p).filter(|r| (r * r + r + 2) % p == 0).collect();
    if roots.is_empty() {
        vec![KPrime::Inert { p }]
    } else {
        roots.into_iter().map(|root| KPrime::Split { p, root }).collect()
    }
}

/// `a = (x + yλ)/d` with `x, y ∈ Z` and `d > 0` minimal.
fn integral_parts(a: &CycElt) -> Result<(BigInt, BigInt, BigInt)> {
    let (x, y) = k_coords(a).ok_or_else(|| Error::InvalidArgument(format!("{a} is not in K")))?;
    if x.is_zero() && y.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let d = x.denom().lcm(y.denom());
    let dq = Rat::from_integer(d.clone());
    Ok(((x * &dq).to_integer(), (y * &dq).to_integer(), d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimePower {
    pub prime: KPrime,
    pub exponent: i64,
}

/// Factorisation of the principal fractional ideal `(a)`, `a ∈ K^*`.
pub fn factor(a: &CycElt) -> Result<Vec<PrimePower>> {
    let (x, y, d) = integral_parts(a)?;
    let mut ps = prime_factors(&k_norm(&x, &y));
    ps.extend(prime_factors(&d));
    ps.sort_unstable();
    ps.dedup();
    let mut out = Vec::new();
    for p in ps {
        for prime in primes_over(p) {
            let exponent = prime.valuation(a)?;
            if exponent != 0 {
                out.push(PrimePower { prime, exponent });
            }
        }
    }
    Ok(out)
}

pub fn format_factorization(f: &[PrimePower]) -> String {
    if f.is_empty() {
        return "(1)".into();
    }
    f.iter().map(|pp| format!("{}^{}", pp.prime.label(), pp.exponent)).collect::<Vec<_>>().join(" * ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{from_k_coords, lambda, lambda_bar};
    use crate::scalars::int;

    #[test]
    fn primes_over_small() {
        assert_eq!(primes_over(2), vec![KPrime::Split { p: 2, root: 0 }, KPrime::Split { p: 2, root: 1 }]);
        assert_eq!(primes_over(3), vec![KPrime::Inert { p: 3 }]);
        assert_eq!(primes_over(7), vec![KPrime::Ramified]);
        assert_eq!(primes_over(11).len(), 2);
    }

    #[test]
    fn residue_degrees_in_l() {
        // 2 has order 3 mod 7 and splits in K: each prime over 2 is inert in L/K.
        assert_eq!(KPrime::Split { p: 2, root: 0 }.residue_degree_in_l(), 3);
        // 3 has order 6 and is inert in K.
        assert_eq!(KPrime::Inert { p: 3 }.residue_degree_in_l(), 3);
        // 13 has order 2 and is inert in K: splits completely in L/K.
        assert_eq!(KPrime::Inert { p: 13 }.residue_degree_in_l(), 1);
        assert_eq!(KPrime::Ramified.residue_degree_in_l(), 1);
    }

    #[test]
    fn lambda_valuations() {
        let pl = KPrime::Split { p: 2, root: 0 };
        let pb = KPrime::Split { p: 2, root: 1 };
        assert_eq!(pl.valuation(&lambda()).unwrap(), 1);
        assert_eq!(pb.valuation(&lambda()).unwrap(), 0);
        assert_eq!(pb.valuation(&lambda_bar()).unwrap(), 1);
        let alpha = lambda().div(&lambda_bar()).unwrap();
        assert_eq!(pl.valuation(&alpha).unwrap(), 1);
        assert_eq!(pb.valuation(&alpha).unwrap(), -1);
        let sixty_four = CycElt::from_int(7, 64);
        assert_eq!(
            factor(&sixty_four).unwrap(),
            vec![PrimePower { prime: pl.clone(), exponent: 6 }, PrimePower { prime: pb, exponent: 6 }]
        );
        assert_eq!(pl.valuation(&lambda().pow(5)).unwrap(), 5);
    }

    #[test]
    fn ramified_and_inert() {
        let sqrt_m7 = from_k_coords(&int(1), &int(2));
        assert_eq!(factor(&sqrt_m7).unwrap(), vec![PrimePower { prime: KPrime::Ramified, exponent: 1 }]);
        assert_eq!(factor(&CycElt::from_int(7, 9)).unwrap(), vec![PrimePower { prime: KPrime::Inert { p: 3 }, exponent: 2 }]);
        assert_eq!(factor(&CycElt::from_int(7, -1)).unwrap(), vec![]);
        assert_eq!(format_factorization(&[]), "(1)");
    }
}
