//! Orders in the cyclic algebra: discriminants, stability under `ι_b`, the
//! possible torsion orders, and congruence-subgroup indices.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgElt, CyclicAlgebra};
use crate::cyclotomic::{cyclotomic_poly, euler_phi, is_ok_integral, k_coords, lambda, lambda_bar, CycElt, L_MODULUS};
use crate::error::{Error, Result};
use crate::kideals::{factor, KPrime, PrimePower};
use crate::matrix::{det, Mat3};
use crate::scalars::Rat;

/// An `o_K`-basis of a lattice in the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderBasis {
    pub elements: Vec<AlgElt>,
}

impl OrderBasis {
    /// `{1, ζ, ζ²}` times `s_k u^k` for each block `k`.
    pub fn with_block_scales(scales: &[CycElt; 3]) -> Self {
        let mut elements = Vec::with_capacity(9);
        for (k, s) in scales.iter().enumerate() {
            for j in 0..3 {
                elements.push(AlgElt::monomial(&CycElt::zeta_pow(L_MODULUS, j) * s, k));
            }
        }
        OrderBasis { elements }
    }

    /// `o_L ⊕ o_L λ̄u ⊕ o_L λ̄u²`.
    pub fn standard() -> Self {
        Self::with_block_scales(&[CycElt::one(L_MODULUS), lambda_bar(), lambda_bar()])
    }

    /// `o_L ⊕ o_L u ⊕ o_L u²`, which is not closed under multiplication.
    pub fn unscaled() -> Self {
        Self::with_block_scales(&[CycElt::one(L_MODULUS), CycElt::one(L_MODULUS), CycElt::one(L_MODULUS)])
    }

    pub fn to_matrices(&self, alg: &CyclicAlgebra) -> Vec<Mat3> {
        self.elements.iter().map(|x| alg.to_matrix(x)).collect()
    }

    /// The `o_K`-basis `P · basis`.
    pub fn transform(&self, p: &[Vec<CycElt>]) -> Self {
        let elements =
            p.iter().map(|row| row.iter().zip(&self.elements).fold(AlgElt::zero(), |acc, (c, x)| acc.add(&x.scale(c)))).collect();
        OrderBasis { elements }
    }
}

/// `M_3(o_K)` with its elementary-matrix basis.
pub fn matrix_order_basis() -> Vec<Mat3> {
    let mut out = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let mut m = Mat3::zero(L_MODULUS);
            m.rows[i][j] = CycElt::one(L_MODULUS);
            out.push(m);
        }
    }
    out
}

/// `G_ij = tr(x_i x_j)`.
pub fn gram_matrix(basis: &[Mat3]) -> Vec<Vec<CycElt>> {
    basis.iter().map(|x| basis.iter().map(|y| (x * y).trace()).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantReport {
    /// `det G` as an element of `K`.
    pub determinant: CycElt,
    pub factorization: Vec<PrimePower>,
    /// Rational-prime grouping, e.g. `2^6 * 7^3`, when every rational prime
    /// appears to equal powers at all primes above it.
    pub ideal: String,
    /// `2^e` with `e` the common exponent at `λ` and `λ̄`, when they agree.
    pub two_part_exponent: Option<i64>,
}

/// Determinant of the reduced-trace Gram matrix and its ideal factorisation.
pub fn discriminant_of(basis: &[Mat3]) -> Result<DiscriminantReport> {
    let g = gram_matrix(basis);
    for (i, row) in g.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !is_ok_integral(x) {
                return Err(Error::BasisNotIntegral(format!("G[{i}][{j}] = {x}")));
            }
        }
    }
    let d = det(g);
    if d.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let factorization = factor(&d)?;
    Ok(DiscriminantReport {
        ideal: rational_ideal_string(&factorization),
        two_part_exponent: two_part(&factorization),
        determinant: d,
        factorization,
    })
}

/// Gram determinant without the integrality check.
pub fn gram_determinant(basis: &[Mat3]) -> CycElt {
    det(gram_matrix(basis))
}

pub fn discriminant(alg: &CyclicAlgebra, basis: &OrderBasis) -> Result<DiscriminantReport> {
    discriminant_of(&basis.to_matrices(alg))
}

fn exponent_at(f: &[PrimePower], p: &KPrime) -> i64 {
    f.iter().find(|pp| pp.prime == *p).map_or(0, |pp| pp.exponent)
}

fn two_part(f: &[PrimePower]) -> Option<i64> {
    let a = exponent_at(f, &KPrime::Split { p: 2, root: 0 });
    let b = exponent_at(f, &KPrime::Split { p: 2, root: 1 });
    (a == b).then_some(a)
}

fn rational_ideal_string(f: &[PrimePower]) -> String {
    let mut by_p: BTreeMap<u64, Vec<&PrimePower>> = BTreeMap::new();
    for pp in f {
        by_p.entry(pp.prime.rational_prime()).or_default().push(pp);
    }
    let mut parts = Vec::new();
    for (p, pps) in by_p {
        let e = pps[0].exponent;
        let uniform = pps.iter().all(|pp| pp.exponent == e);
        match pps[0].prime {
            KPrime::Ramified if e % 2 == 0 => parts.push(format!("{p}^{}", e / 2)),
            KPrime::Split { .. } if uniform && pps.len() == 2 => parts.push(format!("{p}^{e}")),
            KPrime::Inert { .. } => parts.push(format!("{p}^{e}")),
            _ => parts.extend(pps.iter().map(|pp| format!("{}^{}", pp.prime.label(), pp.exponent))),
        }
    }
    if parts.is_empty() {
        "(1)".into()
    } else {
        parts.join(" * ")
    }
}

/// Rational coordinates of `a ∈ L` in the basis `ζ^j λ^e`, `j < 3`, `e < 2`.
fn l_coords(a: &CycElt) -> Vec<Rat> {
    let basis: Vec<CycElt> = (0..2u32).flat_map(|e| (0..3).map(move |j| &CycElt::zeta_pow(L_MODULUS, j) * &lambda().pow(e))).collect();
    let cols: Vec<Vec<Rat>> = basis.iter().map(|b| b.coeffs().to_vec()).collect();
    solve_rational(&cols, a.coeffs()).expect("zeta^j lambda^e is a Q-basis of L")
}

fn alg_coords(x: &AlgElt) -> Vec<Rat> {
    x.parts().iter().flat_map(|c| l_coords(c)).collect()
}

/// Solve `Σ c_k cols[k] = rhs` over `Q` for a square system.
fn solve_rational(cols: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = cols.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(piv, col);
        let p = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Membership test for the `Z`-lattice spanned by `x_i, λ x_i`.
pub struct LatticeTest {
    cols: Vec<Vec<Rat>>,
}

impl LatticeTest {
    pub fn new(basis: &OrderBasis) -> Result<Self> {
        if basis.elements.len() != 9 {
            return Err(Error::InvalidArgument(format!("expected 9 basis elements, got {}", basis.elements.len())));
        }
        let l = lambda();
        let cols: Vec<Vec<Rat>> = basis.elements.iter().flat_map(|x| [alg_coords(x), alg_coords(&x.scale(&l))]).collect();
        if solve_rational(&cols, &vec![Rat::zero(); 18]).is_none() {
            return Err(Error::SingularMatrix);
        }
        Ok(LatticeTest { cols })
    }

    /// `o_K`-coordinates `(x + yλ)` of `v` in the basis, as 9 pairs.
    pub fn coordinates(&self, v: &AlgElt) -> Vec<(Rat, Rat)> {
        let c = solve_rational(&self.cols, &alg_coords(v)).expect("nonsingular");
        c.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect()
    }

    pub fn contains(&self, v: &AlgElt) -> bool {
        self.coordinates(v).iter().all(|(x, y)| x.is_integer() && y.is_integer())
    }
}

/// Every basis product lies back in the lattice.
pub fn is_closed_under_multiplication(alg: &CyclicAlgebra, basis: &OrderBasis) -> Result<bool> {
    let t = LatticeTest::new(basis)?;
    Ok(basis.elements.iter().all(|x| basis.elements.iter().all(|y| t.contains(&alg.mul(x, y)))))
}

pub fn is_iota_b_invariant(alg: &CyclicAlgebra, basis: &OrderBasis, b: &AlgElt) -> Result<bool> {
    let t = LatticeTest::new(basis)?;
    for x in &basis.elements {
        if !t.contains(&alg.twisted_involution(x, b)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rational primes dividing a denominator of some `ι_b(x_i)` in the basis.
/// Empty exactly when the lattice is `ι_b`-stable.
pub fn iota_b_defect(alg: &CyclicAlgebra, basis: &OrderBasis, b: &AlgElt) -> Result<BTreeSet<u64>> {
    let t = LatticeTest::new(basis)?;
    let mut den = BigInt::one();
    for x in &basis.elements {
        for (p, q) in t.coordinates(&alg.twisted_involution(x, b)?) {
            den = den.lcm(p.denom()).lcm(q.denom());
        }
    }
    Ok(crate::kideals::prime_factors(&den).into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionReport {
    pub allowed_orders: BTreeSet<u64>,
    /// Orders compatible with the field-degree constraint but removed later.
    pub excluded: BTreeMap<u64, String>,
}

/// Degree of `F(ζ_m)` over a quadratic imaginary field `F` of conductor `f`.
fn degree_over_center(m: u64, conductor: u64) -> u64 {
    let phi = euler_phi(m as u32) as u64;
    if m.is_multiple_of(conductor) {
        phi / 2
    } else {
        phi
    }
}

/// Possible orders of torsion elements of reduced norm one in a division
/// algebra of degree `d` over a quadratic imaginary field of conductor `f`.
/// `F(γ)` is a subfield of degree dividing `d`; a central `γ` has
/// `nrd(γ) = γ^d`; and every power of `γ` must be admissible too.
pub fn torsion_orders(center_conductor: u64, degree: u64) -> TorsionReport {
    let bound = 8 * degree * degree + 2;
    let mut field_ok = BTreeSet::new();
    for m in 1..=bound {
        let deg = degree_over_center(m, center_conductor);
        if degree.is_multiple_of(deg) {
            field_ok.insert(m);
        }
    }
    let mut allowed = BTreeSet::new();
    let mut excluded = BTreeMap::new();
    for &m in &field_ok {
        let central = degree_over_center(m, center_conductor) == 1;
        if central && !degree.is_multiple_of(m) {
            let why = if m == 2 {
                format!("nrd(-1) = (-1)^{degree} = -1")
            } else {
                format!("central root of unity of order {m} has nrd of order {}", m / m.gcd(&degree))
            };
            excluded.insert(m, why);
            continue;
        }
        if let Some(bad) = excluded.keys().copied().find(|&k| m % k == 0) {
            excluded.insert(m, format!("the {}-th power has order {bad}, which is excluded", m / bad));
            continue;
        }
        allowed.insert(m);
    }
    TorsionReport { allowed_orders: allowed, excluded }
}

/// `[F_{q^d}^* : F_q^*] = (q^d - 1)/(q - 1)`.
pub fn congruence_index(residue_field_size: u64, algebra_degree: u32) -> Result<BigInt> {
    if residue_field_size < 2 || algebra_degree == 0 {
        return Err(Error::InvalidArgument("need q >= 2 and d >= 1".into()));
    }
    let q = BigInt::from(residue_field_size);
    Ok((q.pow(algebra_degree) - 1u32) / (q - 1u32))
}

/// For `η` of order `k`, `N(η - 1) = Φ_k(1)`. A congruence subgroup of level
/// norm `N` can contain such `η` only if `N | Φ_k(1)`.
pub fn torsion_free_check(ideal_norm: u64, torsion_order: u32) -> Result<bool> {
    if ideal_norm < 2 || torsion_order < 2 {
        return Err(Error::InvalidArgument("need ideal norm >= 2 and torsion order >= 2".into()));
    }
    let at_one: BigInt = cyclotomic_poly(torsion_order).iter().sum();
    Ok(!(at_one.abs() % BigInt::from(ideal_norm)).is_zero())
}

/// `det G` up to sign, as an integer, when it lies in `Z`.
pub fn rational_determinant(r: &DiscriminantReport) -> Option<BigInt> {
    let (x, y) = k_coords(&r.determinant)?;
    (y.is_zero() && x.is_integer()).then(|| x.to_integer().abs())
}

pub fn is_unit_ideal(r: &DiscriminantReport) -> bool {
    r.factorization.is_empty() && rational_determinant(r).is_some_and(|d| d.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::standard_b;
    use crate::scalars::{int, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn alg() -> CyclicAlgebra {
        CyclicAlgebra::standard()
    }

    #[test]
    fn standard_order_discriminant() {
        let r = discriminant(&alg(), &OrderBasis::standard()).unwrap();
        assert_eq!(rational_determinant(&r), Some(BigInt::from(21952)));
        assert_eq!(r.two_part_exponent, Some(6));
        assert_eq!(r.ideal, "2^6 * 7^3");
    }

    #[test]
    fn matrix_order_is_unimodular() {
        let r = discriminant_of(&matrix_order_basis()).unwrap();
        assert!(is_unit_ideal(&r));
        assert_eq!(r.ideal, "(1)");
    }

    #[test]
    fn unscaled_blocks_are_not_integral() {
        let a = alg();
        let b = OrderBasis::unscaled();
        assert!(matches!(discriminant(&a, &b), Err(Error::BasisNotIntegral(_))));
        // det = 2^6 7^3 / λ̄^12
        let d = gram_determinant(&b.to_matrices(&a));
        let expect = CycElt::from_int(7, 21952).div(&lambda_bar().pow(12)).unwrap();
        assert_eq!(d, expect);
        assert!(!is_closed_under_multiplication(&a, &b).unwrap());
    }

    #[test]
    fn standard_order_is_an_order_moved_by_iota_b_at_three() {
        let a = alg();
        let o = OrderBasis::standard();
        assert!(is_closed_under_multiplication(&a, &o).unwrap());
        let b = standard_b();
        assert!(o.elements.iter().all(|x| LatticeTest::new(&o).unwrap().contains(&a.canonical_involution(x).unwrap())));
        // nrd(b) = 3 and O is maximal at 3, so ι_b moves O there and only there.
        assert!(!is_iota_b_invariant(&a, &o, &b).unwrap());
        assert_eq!(iota_b_defect(&a, &o, &b).unwrap(), BTreeSet::from([3]));
        assert_eq!(a.reduced_trace_norm(&b).1, CycElt::from_int(7, 3));
        assert!(is_iota_b_invariant(&a, &o, &AlgElt::one()).unwrap());
        assert_eq!(is_iota_b_invariant(&a, &o, &AlgElt::u()), Err(Error::NotIotaInvariant));
        let half = CycElt::from_rat(7, rat(1, 2));
        let skewed = OrderBasis::with_block_scales(&[CycElt::one(7), lambda_bar(), &lambda_bar() * &half]);
        assert!(!is_iota_b_invariant(&a, &skewed, &standard_b()).unwrap());
    }

    #[test]
    fn gram_is_symmetric_with_real_determinant() {
        let g = gram_matrix(&OrderBasis::standard().to_matrices(&alg()));
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(g[i][j], g[j][i]);
            }
        }
        assert!(det(g).is_real());
    }

    fn random_unimodular(rng: &mut ChaCha8Rng) -> Vec<Vec<CycElt>> {
        let mut p: Vec<Vec<CycElt>> = (0..9).map(|i| (0..9).map(|j| CycElt::from_int(7, (i == j) as i64)).collect()).collect();
        for _ in 0..12 {
            let (i, j) = (rng.gen_range(0..9), rng.gen_range(0..9));
            if i == j {
                continue;
            }
            let c = crate::cyclotomic::from_k_coords(&int(rng.gen_range(-2..=2)), &int(rng.gen_range(-2..=2)));
            // row_i += c * row_j
            let rj = p[j].clone();
            for (x, y) in p[i].iter_mut().zip(&rj) {
                *x = &*x + &(&c * y);
            }
        }
        p
    }

    #[test]
    fn discriminant_invariant_under_unimodular_change() {
        let a = alg();
        let o = OrderBasis::standard();
        let base = discriminant(&a, &o).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let p = random_unimodular(&mut rng);
            let r = discriminant(&a, &o.transform(&p)).unwrap();
            assert_eq!(r.determinant, base.determinant);
            assert_eq!(r.factorization, base.factorization);
        }
    }

    #[test]
    fn torsion_classification() {
        let r = torsion_orders(7, 3);
        assert_eq!(r.allowed_orders, BTreeSet::from([1, 7]));
        assert_eq!(r.excluded.keys().copied().collect::<Vec<_>>(), vec![2, 14]);
        assert!(r.excluded[&2].contains("nrd(-1)"));
        let gi = torsion_orders(4, 3);
        assert!(!gi.allowed_orders.contains(&7));
        assert_eq!(degree_over_center(7, 7), 3);
    }

    #[test]
    fn congruence_indices() {
        assert_eq!(congruence_index(2, 3).unwrap(), BigInt::from(7));
        assert_eq!(congruence_index(2, 1).unwrap(), BigInt::from(1));
        assert_eq!(congruence_index(3, 2).unwrap(), BigInt::from(4));
        for q in 2..10u64 {
            assert!(congruence_index(q, 1).unwrap().is_one());
            for d in 1..8 {
                let next = congruence_index(q, d + 1).unwrap();
                assert_eq!(next, BigInt::from(q) * congruence_index(q, d).unwrap() + 1);
            }
        }
    }

    #[test]
    fn torsion_free_examples() {
        assert!(torsion_free_check(2, 7).unwrap());
        assert!(!torsion_free_check(7, 7).unwrap());
        assert!(torsion_free_check(2, 3).unwrap());
        // Φ_6(1) = 1
        assert!(torsion_free_check(3, 6).unwrap());
    }
}
