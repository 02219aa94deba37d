//! Cyclic quotient singularities: Hirzebruch–Jung strings, Dedekind sums,
//! orbifold heights, and the search for branch data matching given heights.

#![allow(clippy::needless_range_loop)]

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{int, rat, rat_string, Rat};

/// `ζ_n^k`, kept symbolically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(u32, i64)", into = "(u32, i64)")]
pub struct RootOfUnity {
    pub modulus: u32,
    pub exponent: i64,
}

impl From<(u32, i64)> for RootOfUnity {
    fn from((modulus, exponent): (u32, i64)) -> Self {
        RootOfUnity::new(modulus, exponent)
    }
}

impl From<RootOfUnity> for (u32, i64) {
    fn from(r: RootOfUnity) -> Self {
        (r.modulus, r.exponent)
    }
}

impl RootOfUnity {
    pub fn new(modulus: u32, exponent: i64) -> Self {
        assert!(modulus >= 1, "root of unity needs a positive modulus");
        RootOfUnity { modulus, exponent: exponent.rem_euclid(modulus as i64) }
    }

    /// Multiplicative order.
    pub fn order(&self) -> u32 {
        self.modulus / (self.exponent as u32).gcd(&self.modulus)
    }

    /// The same root written over `ζ_m` for a multiple `m` of the modulus.
    pub fn lift(&self, m: u32) -> RootOfUnity {
        assert_eq!(m % self.modulus, 0, "{m} is not a multiple of {}", self.modulus);
        RootOfUnity::new(m, self.exponent * (m / self.modulus) as i64)
    }

    pub fn mul(&self, o: &RootOfUnity) -> RootOfUnity {
        let m = self.modulus.lcm(&o.modulus);
        RootOfUnity::new(m, self.lift(m).exponent + o.lift(m).exponent)
    }

    pub fn inv(&self) -> RootOfUnity {
        RootOfUnity::new(self.modulus, -self.exponent)
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }

    /// Reduced form `ζ_{order}^k`.
    pub fn reduced(&self) -> RootOfUnity {
        let g = (self.exponent as u32).gcd(&self.modulus).max(1);
        RootOfUnity::new(self.modulus / g, self.exponent / g as i64)
    }
}

/// `C²/⟨diag(ζ_n, ζ_n^q)⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicSingularity {
    pub n: u32,
    pub q: u32,
}

impl CyclicSingularity {
    pub fn new(n: u32, q: u32) -> Result<Self> {
        if n < 2 || q == 0 || q >= n || q.gcd(&n) != 1 {
            return Err(Error::InvalidArgument(format!("({n},{q}) is not a cyclic quotient type")));
        }
        Ok(CyclicSingularity { n, q })
    }

    /// `(n, q')` with `q' = q^{-1} mod n`, the same germ with the axes swapped.
    pub fn swapped(&self) -> Self {
        CyclicSingularity { n: self.n, q: inverse_mod(self.q as i64, self.n as i64) as u32 }
    }

    /// Representative with `q ≤ q^{-1} mod n`.
    pub fn canonical(&self) -> Self {
        let s = self.swapped();
        if s.q < self.q {
            s
        } else {
            *self
        }
    }
}

fn inverse_mod(a: i64, n: i64) -> i64 {
    let e = a.rem_euclid(n).extended_gcd(&n);
    assert_eq!(e.gcd, 1, "{a} is not a unit mod {n}");
    e.x.rem_euclid(n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HjChain {
    pub self_intersections: Vec<i64>,
    pub intersection_matrix: Vec<Vec<i64>>,
}

impl HjChain {
    pub fn from_self_intersections(b: Vec<i64>) -> Self {
        let r = b.len();
        let m = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        if i == j {
                            b[i]
                        } else if i.abs_diff(j) == 1 {
                            1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        HjChain { self_intersections: b, intersection_matrix: m }
    }

    pub fn len(&self) -> usize {
        self.self_intersections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.self_intersections.is_empty()
    }

    /// `b₁ - 1/(b₂ - 1/(…))` with `b_i = -E_i²`.
    pub fn continued_fraction(&self) -> Rat {
        let mut it = self.self_intersections.iter().rev();
        let last = it.next().map_or_else(Rat::zero, |b| int(-b));
        it.fold(last, |acc, b| int(-b) - acc.recip())
    }

    pub fn determinant(&self) -> Rat {
        rat_det(self.intersection_matrix.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    /// `K·E_i = -2 - E_i²` by adjunction for smooth rational curves.
    pub fn canonical_degrees(&self) -> Vec<i64> {
        self.self_intersections.iter().map(|e| -2 - e).collect()
    }
}

/// Hirzebruch–Jung continued fraction of `n/q`.
pub fn hj_expand(s: &CyclicSingularity) -> HjChain {
    let (mut num, mut den) = (s.n as i64, s.q as i64);
    let mut b = Vec::new();
    while den != 0 {
        let bi = (num + den - 1) / den;
        b.push(-bi);
        let r = bi * den - num;
        num = den;
        den = r;
    }
    HjChain::from_self_intersections(b)
}

/// Type of the fixed point of `diag(ε₁, ε₂)`: `(n, q)` with `ε₁ = ζ_n^a`,
/// `ε₂ = ζ_n^b`, `q = b a^{-1} mod n`.
pub fn singularity_type_from_rotation(eigs: (RootOfUnity, RootOfUnity)) -> Result<CyclicSingularity> {
    let n = eigs.0.modulus.lcm(&eigs.1.modulus);
    let (a, b) = (eigs.0.lift(n).exponent, eigs.1.lift(n).exponent);
    let g = (a as u32).gcd(&(b as u32)).gcd(&n);
    let (n, a, b) = (n / g, a / g as i64, b / g as i64);
    if n < 2 || a.gcd(&(n as i64)) != 1 {
        return Err(Error::NotPrimitive(format!("first eigenvalue zeta_{n}^{a} is not a generator")));
    }
    let q = (b * inverse_mod(a, n as i64)).rem_euclid(n as i64) as u32;
    if q == 0 || q.gcd(&n) != 1 {
        return Err(Error::NotPrimitive(format!("type ({n},{q}) is not isolated")));
    }
    CyclicSingularity::new(n, q)
}

/// Eigenvalues of `diag(d)` on the tangent plane at the `i`-th coordinate
/// point of `P²`: the ratios `d_j / d_i` for `j ≠ i`, in index order.
pub fn tangent_eigenvalues(d: [RootOfUnity; 3], i: usize) -> (RootOfUnity, RootOfUnity) {
    let others: Vec<RootOfUnity> = (0..3).filter(|&j| j != i).map(|j| d[j].mul(&d[i].inv())).collect();
    (others[0], others[1])
}

fn sawtooth(x: &Rat) -> Rat {
    if x.is_integer() {
        Rat::zero()
    } else {
        x - x.floor() - rat(1, 2)
    }
}

/// `s(q, n) = Σ_{k=1}^{n-1} ((k/n)) ((kq/n))`.
pub fn dedekind_sum(q: i64, n: i64) -> Result<Rat> {
    if n < 1 || q.gcd(&n) != 1 {
        return Err(Error::InvalidArgument(format!("dedekind_sum needs gcd({q},{n}) = 1 and n >= 1")));
    }
    Ok((1..n).map(|k| sawtooth(&rat(k, n)) * sawtooth(&rat(k * q, n))).sum())
}

/// `δ(n,q) = -4 s(q,n)`.
pub fn signature_defect(s: &CyclicSingularity) -> Rat {
    dedekind_sum(s.q as i64, s.n as i64).expect("valid type") * int(-4)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbifoldSurface {
    #[serde(with = "rat_string")]
    pub euler: Rat,
    #[serde(with = "rat_string")]
    pub signature: Rat,
    pub points: Vec<CyclicSingularity>,
}

impl OrbifoldSurface {
    pub fn smooth(euler: Rat, signature: Rat) -> Self {
        OrbifoldSurface { euler, signature, points: Vec::new() }
    }

    /// The ball quotient by the full group: three points of type `(7,3)`.
    pub fn gamma_quotient() -> Self {
        let p = CyclicSingularity { n: 7, q: 3 };
        OrbifoldSurface { euler: int(3), signature: int(1), points: vec![p; 3] }
    }

    /// One `(7,3)` point and three `(3,2)` points.
    pub fn gamma_tilde_quotient() -> Self {
        let mut points = vec![CyclicSingularity { n: 7, q: 3 }];
        points.extend([CyclicSingularity { n: 3, q: 2 }; 3]);
        OrbifoldSurface { euler: int(3), signature: int(1), points }
    }
}

pub fn euler_height(x: &OrbifoldSurface) -> Rat {
    x.points.iter().fold(x.euler.clone(), |acc, p| acc - (Rat::one() - rat(1, p.n as i64)))
}

pub fn signature_height(x: &OrbifoldSurface) -> Rat {
    x.points.iter().fold(x.signature.clone(), |acc, p| acc - signature_defect(p))
}

/// `c₂(Y) = deg·e(X)` and `sign(Y) = deg·sign(X)`.
pub fn check_cover_multiplicativity(y_euler: &Rat, y_sign: &Rat, x: &OrbifoldSurface, degree: u64) -> bool {
    let d = int(degree as i64);
    *y_euler == euler_height(x) * &d && *y_sign == signature_height(x) * d
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution {
    #[serde(with = "rat_string")]
    pub euler: Rat,
    #[serde(with = "rat_string")]
    pub signature: Rat,
    pub blowups: u32,
}

/// Each exceptional curve adds one to `e` and subtracts one from the
/// signature (the exceptional lattice is negative definite).
pub fn resolve_invariants(x: &OrbifoldSurface) -> Resolution {
    let blowups: u32 = x.points.iter().map(|p| hj_expand(p).len() as u32).sum();
    let b = int(blowups as i64);
    Resolution { euler: &x.euler + &b, signature: &x.signature - &b, blowups }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchSolution {
    pub points: Vec<CyclicSingularity>,
}

impl BranchSolution {
    pub fn r(&self) -> usize {
        self.points.len()
    }
}

/// Canonical types `(d, e)` with `2 ≤ d ≤ d_max`, in increasing order.
fn candidate_types(d_max: u32) -> Vec<CyclicSingularity> {
    let mut out = Vec::new();
    for d in 2..=d_max {
        for e in 1..d {
            if e.gcd(&d) == 1 {
                let s = CyclicSingularity { n: d, q: e };
                if s.canonical() == s {
                    out.push(s);
                }
            }
        }
    }
    out
}

/// Multisets of extra points with `Σ(1 - 1/d) = euler_sum` and, when given,
/// `Σ δ(d,e) = sign_sum`.
pub fn enumerate_branch_points(euler_sum: &Rat, sign_sum: Option<&Rat>, d_max: u32) -> Vec<BranchSolution> {
    let types = candidate_types(d_max);
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(
        types: &[CyclicSingularity],
        start: usize,
        euler_left: Rat,
        sign_left: Rat,
        check_sign: bool,
        cur: &mut Vec<CyclicSingularity>,
        out: &mut Vec<BranchSolution>,
    ) {
        if euler_left.is_zero() {
            if !check_sign || sign_left.is_zero() {
                out.push(BranchSolution { points: cur.clone() });
            }
            return;
        }
        // every point contributes at least 1/2
        if euler_left < rat(1, 2) {
            return;
        }
        for (i, t) in types.iter().enumerate().skip(start) {
            let c = Rat::one() - rat(1, t.n as i64);
            if c > euler_left {
                continue;
            }
            cur.push(*t);
            go(types, i, &euler_left - c, &sign_left - signature_defect(t), check_sign, cur, out);
            cur.pop();
        }
    }
    if euler_sum.is_negative() {
        return out;
    }
    go(&types, 0, euler_sum.clone(), sign_sum.cloned().unwrap_or_else(Rat::zero), sign_sum.is_some(), &mut cur, &mut out);
    out
}

/// Extra branch points turning the known heights into the targets; types are
/// reported up to swapping the axes.
pub fn solve_branch_data(
    total_euler: &Rat,
    total_sign: &Rat,
    known_points: &[CyclicSingularity],
    target_euler_height: &Rat,
    target_sign_height: &Rat,
    d_max: u32,
) -> Result<Vec<BranchSolution>> {
    if d_max < 2 {
        return Err(Error::InvalidArgument("d_max must be at least 2".into()));
    }
    let known = OrbifoldSurface { euler: total_euler.clone(), signature: total_sign.clone(), points: known_points.to_vec() };
    let euler_sum = euler_height(&known) - target_euler_height;
    let sign_sum = signature_height(&known) - target_sign_height;
    Ok(enumerate_branch_points(&euler_sum, Some(&sign_sum), d_max))
}

fn rat_det(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut acc = Rat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            m.swap(piv, col);
            acc = -acc;
        }
        acc *= &m[col][col];
        for r in col + 1..n {
            let f = &m[r][col] / &m[col][col];
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    acc
}

/// Solves `M a = (k (K·E_i) - d_i)_i` for the coefficients `a` of the chain
/// curves; the residual is re-checked exactly.
pub fn chain_divisor_system(chain: &HjChain, k: i64, d: &[Rat]) -> Result<Vec<Rat>> {
    let r = chain.len();
    if d.len() != r {
        return Err(Error::InvalidArgument(format!("expected {r} multiplicities, got {}", d.len())));
    }
    let kdeg = chain.canonical_degrees();
    let rhs: Vec<Rat> = (0..r).map(|i| int(k * kdeg[i]) - &d[i]).collect();
    let m: Vec<Vec<Rat>> = chain.intersection_matrix.iter().map(|row| row.iter().map(|&x| int(x)).collect()).collect();
    let mut aug: Vec<Vec<Rat>> = m.iter().zip(&rhs).map(|(row, b)| row.iter().cloned().chain([b.clone()]).collect()).collect();
    for col in 0..r {
        let piv = (col..r).find(|&i| !aug[i][col].is_zero()).ok_or(Error::SingularMatrix)?;
        aug.swap(piv, col);
        let p = aug[col][col].clone();
        for c in col..=r {
            aug[col][c] = &aug[col][c] / &p;
        }
        for i in 0..r {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for c in col..=r {
                    let t = &f * &aug[col][c];
                    aug[i][c] -= t;
                }
            }
        }
    }
    let a: Vec<Rat> = aug.into_iter().map(|row| row[r].clone()).collect();
    for i in 0..r {
        let lhs: Rat = (0..r).map(|j| &m[i][j] * &a[j]).sum();
        if lhs != rhs[i] {
            return Err(Error::SingularMatrix);
        }
    }
    Ok(a)
}
