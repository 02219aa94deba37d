//! The cyclic algebra `D = L ⊕ Lu ⊕ Lu²` over `K`, with `u³ = α` and
//! `a·u = u·a^σ`, its embedding in `M_3(L)`, and its involutions.

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{from_k_coords, k_coords, lambda, lambda_bar, sigma_pow, CycElt, L_MODULUS};
use crate::error::{Error, Result};
use crate::kideals::{factor, KPrime};
use crate::matrix::Mat3;
use crate::scalars::int;

/// `x0 + x1·u + x2·u²` with `x_i ∈ L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgElt {
    pub x0: CycElt,
    pub x1: CycElt,
    pub x2: CycElt,
}

impl AlgElt {
    pub fn new(x0: CycElt, x1: CycElt, x2: CycElt) -> Self {
        for x in [&x0, &x1, &x2] {
            assert_eq!(x.modulus(), L_MODULUS, "algebra coefficients live in Q(zeta_7)");
        }
        AlgElt { x0, x1, x2 }
    }

    pub fn from_parts(p: [CycElt; 3]) -> Self {
        let [x0, x1, x2] = p;
        Self::new(x0, x1, x2)
    }

    pub fn parts(&self) -> [&CycElt; 3] {
        [&self.x0, &self.x1, &self.x2]
    }

    pub fn scalar(a: CycElt) -> Self {
        Self::new(a, CycElt::zero(L_MODULUS), CycElt::zero(L_MODULUS))
    }

    pub fn zero() -> Self {
        Self::scalar(CycElt::zero(L_MODULUS))
    }

    pub fn one() -> Self {
        Self::scalar(CycElt::one(L_MODULUS))
    }

    /// `c·u^k` for `k ∈ {0,1,2}`.
    pub fn monomial(c: CycElt, k: usize) -> Self {
        let mut p: [CycElt; 3] = std::array::from_fn(|_| CycElt::zero(L_MODULUS));
        p[k] = c;
        Self::from_parts(p)
    }

    pub fn u() -> Self {
        Self::monomial(CycElt::one(L_MODULUS), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.parts().iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &AlgElt) -> AlgElt {
        AlgElt::new(&self.x0 + &o.x0, &self.x1 + &o.x1, &self.x2 + &o.x2)
    }

    pub fn sub(&self, o: &AlgElt) -> AlgElt {
        AlgElt::new(&self.x0 - &o.x0, &self.x1 - &o.x1, &self.x2 - &o.x2)
    }

    /// Left multiplication by an element of `L`.
    pub fn scale(&self, c: &CycElt) -> AlgElt {
        AlgElt::new(c * &self.x0, c * &self.x1, c * &self.x2)
    }

    /// `σ` applied to every coefficient, `u` fixed.
    pub fn sigma_coeffs(&self, k: i64) -> AlgElt {
        AlgElt::new(sigma_pow(&self.x0, k), sigma_pow(&self.x1, k), sigma_pow(&self.x2, k))
    }
}

/// `D(L, σ, α)` for `α ∈ K^*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicAlgebra {
    alpha: CycElt,
}

/// `α = λ/λ̄`, a unit-modulus element of `K` that is not a norm from `L`.
pub fn standard_alpha() -> CycElt {
    lambda().div(&lambda_bar()).expect("lambda_bar is nonzero")
}

/// `b = tr_{K/Q}(λ) + λ̄u + λ̄u²`.
pub fn standard_b() -> AlgElt {
    AlgElt::new(CycElt::from_int(L_MODULUS, -1), lambda_bar(), lambda_bar())
}

/// One local condition in the division test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalCheck {
    pub prime: KPrime,
    pub valuation: i64,
    pub residue_degree: u32,
    pub local_non_norm: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisionWitness {
    pub is_division: bool,
    pub checks: Vec<LocalCheck>,
    pub steps: Vec<String>,
}

impl DivisionWitness {
    /// The first prime at which `α` fails to be a local norm.
    pub fn obstruction(&self) -> Option<&LocalCheck> {
        self.checks.iter().find(|c| c.local_non_norm)
    }
}

impl CyclicAlgebra {
    pub fn new(alpha: CycElt) -> Result<Self> {
        if k_coords(&alpha).is_none() {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} is not in K")));
        }
        if alpha.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(CyclicAlgebra { alpha })
    }

    pub fn standard() -> Self {
        Self::new(standard_alpha()).expect("lambda/lambda_bar lies in K")
    }

    pub fn alpha(&self) -> &CycElt {
        &self.alpha
    }

    /// `(Σ a_i u^i)(Σ b_j u^j) = Σ a_i σ^{-i}(b_j) u^{i+j}`, reduced by `u³ = α`.
    pub fn mul(&self, a: &AlgElt, b: &AlgElt) -> AlgElt {
        let mut out: [CycElt; 3] = std::array::from_fn(|_| CycElt::zero(L_MODULUS));
        for (i, ai) in a.parts().into_iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.parts().into_iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let mut t = ai * &sigma_pow(bj, -(i as i64));
                if i + j >= 3 {
                    t = &t * &self.alpha;
                }
                out[(i + j) % 3] = &out[(i + j) % 3] + &t;
            }
        }
        AlgElt::from_parts(out)
    }

    pub fn pow(&self, a: &AlgElt, e: u32) -> AlgElt {
        (0..e).fold(AlgElt::one(), |acc, _| self.mul(&acc, a))
    }

    /// The matrix of `u`: `[[0,0,α],[1,0,0],[0,1,0]]`.
    pub fn u_matrix(&self) -> Mat3 {
        let (z, o) = (CycElt::zero(L_MODULUS), CycElt::one(L_MODULUS));
        Mat3 { rows: [[z.clone(), z.clone(), self.alpha.clone()], [o.clone(), z.clone(), z.clone()], [z.clone(), o, z]] }
    }

    /// `a ↦ diag(a, a^σ, a^σσ)`, `u ↦ u_matrix()`, extended linearly.
    pub fn to_matrix(&self, a: &AlgElt) -> Mat3 {
        let u = self.u_matrix();
        let u2 = &u * &u;
        let d = |x: &CycElt| Mat3::diag([x.clone(), sigma_pow(x, 1), sigma_pow(x, 2)]);
        let m0 = d(&a.x0);
        let m1 = &d(&a.x1) * &u;
        let m2 = &d(&a.x2) * &u2;
        &(&m0 + &m1) + &m2
    }

    /// Inverse of `to_matrix` on its image. Column 0 of `rep(x)` is
    /// `(x0, σ(x1), σ²(x2))`.
    pub fn from_matrix(&self, m: &Mat3) -> Result<AlgElt> {
        let x = AlgElt::new(m.get(0, 0).clone(), sigma_pow(m.get(1, 0), -1), sigma_pow(m.get(2, 0), -2));
        if self.to_matrix(&x) != *m {
            return Err(Error::InvalidArgument("matrix is not in the image of the algebra".into()));
        }
        Ok(x)
    }

    /// `(trd, nrd)` as trace and determinant of the matrix; both lie in `K`.
    pub fn reduced_trace_norm(&self, a: &AlgElt) -> (CycElt, CycElt) {
        let m = self.to_matrix(a);
        let (t, n) = (m.trace(), m.det());
        debug_assert!(k_coords(&t).is_some() && k_coords(&n).is_some());
        (t, n)
    }

    pub fn inverse(&self, a: &AlgElt) -> Result<AlgElt> {
        let inv = self.to_matrix(a).inverse()?;
        self.from_matrix(&inv)
    }

    /// `ι(u) = ᾱ u²`; defined only when `α ᾱ = 1`.
    pub fn iota_u(&self) -> Result<AlgElt> {
        if !(&self.alpha * &self.alpha.conj()).is_one() {
            return Err(Error::Unsupported(format!(
                "alpha = {} has alpha*conj(alpha) != 1; u -> conj(alpha) u^2 is not an involution",
                self.alpha
            )));
        }
        Ok(AlgElt::monomial(self.alpha.conj(), 2))
    }

    /// `ι(a) = ā` on `L`, `ι(u) = ᾱu²`, anti-multiplicative.
    pub fn canonical_involution(&self, a: &AlgElt) -> Result<AlgElt> {
        let iu = self.iota_u()?;
        let iu2 = self.mul(&iu, &iu);
        let t0 = AlgElt::scalar(a.x0.conj());
        let t1 = self.mul(&iu, &AlgElt::scalar(a.x1.conj()));
        let t2 = self.mul(&iu2, &AlgElt::scalar(a.x2.conj()));
        Ok(t0.add(&t1).add(&t2))
    }

    /// `ι_b(x) = b ι(x) b^{-1}` for `b` invertible and `ι`-invariant.
    pub fn twisted_involution(&self, x: &AlgElt, b: &AlgElt) -> Result<AlgElt> {
        if self.canonical_involution(b)? != *b {
            return Err(Error::NotIotaInvariant);
        }
        let b_inv = self.inverse(b)?;
        let ix = self.canonical_involution(x)?;
        Ok(self.mul(&self.mul(b, &ix), &b_inv))
    }

    /// Decides whether `α ∉ N_{L/K}(L^*)`. At a prime of `K` unramified in `L`
    /// with residue degree `f`, `α` is a local norm iff `f | v(α)`. The
    /// ramified prime is the only remaining finite place and both infinite
    /// places are complex, so its invariant is fixed by the others.
    pub fn is_division_algebra(&self) -> Result<DivisionWitness> {
        let mut checks = Vec::new();
        let mut steps = Vec::new();
        for pp in factor(&self.alpha)? {
            if pp.prime == KPrime::Ramified {
                steps
                    .push(format!("v_{}(alpha) = {}: ramified in L/K, invariant determined by the product formula", pp.prime, pp.exponent));
                continue;
            }
            let f = pp.prime.residue_degree_in_l();
            let non_norm = pp.exponent.rem_euclid(f as i64) != 0;
            steps.push(format!(
                "v_{}(alpha) = {}; residue degree in L/K = ord_7({})/{} = {}; {} mod {} = {} -> {}",
                pp.prime,
                pp.exponent,
                pp.prime.rational_prime(),
                pp.prime.degree(),
                f,
                pp.exponent,
                f,
                pp.exponent.rem_euclid(f as i64),
                if non_norm { "local non-norm" } else { "local norm" }
            ));
            checks.push(LocalCheck { prime: pp.prime, valuation: pp.exponent, residue_degree: f, local_non_norm: non_norm });
        }
        let is_division = checks.iter().any(|c| c.local_non_norm);
        steps.push(if is_division {
            "alpha is not a global norm, so D is a division algebra".into()
        } else {
            "alpha is a local norm everywhere, so D splits".into()
        });
        Ok(DivisionWitness { is_division, checks, steps })
    }
}

/// `2 = λλ̄` as an element of `K`.
pub fn two() -> CycElt {
    from_k_coords(&int(2), &int(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{sigma, zeta};
    use crate::scalars::Rat;
    use proptest::prelude::*;

    fn l_elt() -> impl Strategy<Value = CycElt> {
        proptest::collection::vec(-4i64..=4, 6).prop_map(|v| CycElt::from_poly(7, v.into_iter().map(int).collect::<Vec<Rat>>()))
    }

    fn alg_elt() -> impl Strategy<Value = AlgElt> {
        (l_elt(), l_elt(), l_elt()).prop_map(|(a, b, c)| AlgElt::new(a, b, c))
    }

    fn d() -> CyclicAlgebra {
        CyclicAlgebra::standard()
    }

    #[test]
    fn u_cubed_is_alpha() {
        let d = d();
        assert_eq!(d.mul(&AlgElt::u(), &AlgElt::monomial(CycElt::one(7), 2)), AlgElt::scalar(standard_alpha()));
        assert_eq!(d.pow(&AlgElt::u(), 3), AlgElt::scalar(standard_alpha()));
        // α = λ²/2
        assert_eq!(standard_alpha(), lambda().pow(2).scale(&crate::scalars::rat(1, 2)));
    }

    #[test]
    fn zeta_u_commutation() {
        let d = d();
        let z = AlgElt::scalar(zeta());
        let lhs = d.mul(&z, &AlgElt::u());
        let rhs = d.mul(&AlgElt::u(), &AlgElt::scalar(CycElt::zeta_pow(7, 2)));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, AlgElt::monomial(zeta(), 1));
    }

    #[test]
    fn matrix_examples() {
        let d = d();
        assert_eq!(d.to_matrix(&AlgElt::scalar(zeta())), Mat3::diag([zeta(), CycElt::zeta_pow(7, 2), CycElt::zeta_pow(7, 4)]));
        assert_eq!(d.to_matrix(&AlgElt::u()), d.u_matrix());
        assert_eq!(d.to_matrix(&AlgElt::one()), Mat3::identity(7));
        let u3 = &(&d.u_matrix() * &d.u_matrix()) * &d.u_matrix();
        assert_eq!(u3, Mat3::identity(7).scale(&standard_alpha()));
    }

    #[test]
    fn reduced_norm_examples() {
        let d = d();
        let (t, n) = d.reduced_trace_norm(&AlgElt::u());
        assert!(t.is_zero());
        assert_eq!(n, standard_alpha());
        let (t, n) = d.reduced_trace_norm(&AlgElt::one());
        assert_eq!(t, CycElt::from_int(7, 3));
        assert!(n.is_one());
        assert!(d.reduced_trace_norm(&AlgElt::scalar(zeta())).1.is_one());
    }

    #[test]
    fn involution_examples() {
        let d = d();
        assert_eq!(d.canonical_involution(&AlgElt::u()).unwrap(), AlgElt::monomial(standard_alpha().conj(), 2));
        let b = standard_b();
        assert_eq!(d.canonical_involution(&b).unwrap(), b);
        // ι_1 = ι
        let x = AlgElt::new(zeta(), lambda(), CycElt::from_int(7, 3));
        assert_eq!(d.twisted_involution(&x, &AlgElt::one()).unwrap(), d.canonical_involution(&x).unwrap());
        assert_eq!(d.twisted_involution(&x, &AlgElt::u()), Err(Error::NotIotaInvariant));
        assert_eq!(d.twisted_involution(&x, &AlgElt::zero()), Err(Error::NotInvertible));
        // Without α ᾱ = 1 there is no such involution.
        let d2 = CyclicAlgebra::new(two()).unwrap();
        assert!(matches!(d2.canonical_involution(&x), Err(Error::Unsupported(_))));
    }

    #[test]
    fn iota_matches_conjugate_transpose_on_generators() {
        let d = d();
        for g in [AlgElt::u(), AlgElt::scalar(zeta()), AlgElt::monomial(CycElt::one(7), 2), standard_b()] {
            let lhs = d.to_matrix(&d.canonical_involution(&g).unwrap());
            assert_eq!(lhs, d.to_matrix(&g).conj_transpose());
        }
    }

    #[test]
    fn tau_relation() {
        // τ·rep(a) = rep(a^{σ²})·τ; equivalently rep(a)·τ = τ·rep(a^σ).
        let d = d();
        let tau = d.u_matrix();
        let a = AlgElt::scalar(&zeta() + &lambda().pow(2));
        let ga = d.to_matrix(&a);
        assert_eq!(&ga * &tau, &tau * &d.to_matrix(&a.sigma_coeffs(1)));
        assert_eq!(&tau * &ga, &d.to_matrix(&a.sigma_coeffs(2)) * &tau);
        assert_ne!(&tau * &ga, &d.to_matrix(&a.sigma_coeffs(1)) * &tau);
        // entry-wise σ on the matrix equals σ on coefficients
        assert_eq!(ga.map(sigma), d.to_matrix(&a.sigma_coeffs(1)));
    }

    #[test]
    fn division_witnesses() {
        let w = d().is_division_algebra().unwrap();
        assert!(w.is_division);
        let ob = w.obstruction().unwrap();
        assert_eq!(ob.prime, KPrime::Split { p: 2, root: 0 });
        assert_eq!((ob.valuation, ob.residue_degree), (1, 3));

        let one = CyclicAlgebra::new(CycElt::one(7)).unwrap().is_division_algebra().unwrap();
        assert!(!one.is_division);

        let two = CyclicAlgebra::new(two()).unwrap().is_division_algebra().unwrap();
        assert!(two.is_division);
        assert_eq!(two.obstruction().unwrap().valuation, 1);

        // 8 = λ³λ̄³ has valuation 3 at both primes over 2.
        let eight = CyclicAlgebra::new(CycElt::from_int(7, 8)).unwrap().is_division_algebra().unwrap();
        assert!(!eight.is_division);
        assert!(CyclicAlgebra::new(zeta()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rep_is_ring_homomorphism(a in alg_elt(), b in alg_elt()) {
            let d = d();
            prop_assert_eq!(d.to_matrix(&d.mul(&a, &b)), &d.to_matrix(&a) * &d.to_matrix(&b));
            prop_assert_eq!(d.to_matrix(&a.add(&b)), &d.to_matrix(&a) + &d.to_matrix(&b));
            prop_assert_eq!(d.from_matrix(&d.to_matrix(&a)).unwrap(), a);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn involution_laws(x in alg_elt(), y in alg_elt()) {
            let d = d();
            let ix = d.canonical_involution(&x).unwrap();
            prop_assert_eq!(d.canonical_involution(&ix).unwrap(), x.clone());
            prop_assert_eq!(d.to_matrix(&ix), d.to_matrix(&x).conj_transpose());
            let ixy = d.canonical_involution(&d.mul(&x, &y)).unwrap();
            prop_assert_eq!(ixy, d.mul(&d.canonical_involution(&y).unwrap(), &ix));
        }

        #[test]
        fn twisted_involution_laws(x in alg_elt(), y in alg_elt()) {
            let d = d();
            let b = standard_b();
            let tx = d.twisted_involution(&x, &b).unwrap();
            prop_assert_eq!(d.twisted_involution(&tx, &b).unwrap(), x.clone());
            let h = d.to_matrix(&b);
            let expect = &(&h * &d.to_matrix(&x).conj_transpose()) * &h.inverse().unwrap();
            prop_assert_eq!(d.to_matrix(&tx), expect);
            let txy = d.twisted_involution(&d.mul(&x, &y), &b).unwrap();
            prop_assert_eq!(txy, d.mul(&d.twisted_involution(&y, &b).unwrap(), &tx));
        }

        #[test]
        fn reduced_norm_laws(x in alg_elt(), y in alg_elt()) {
            let d = d();
            let (tx, nx) = d.reduced_trace_norm(&x);
            let (ty, ny) = d.reduced_trace_norm(&y);
            prop_assert!(k_coords(&nx).is_some() && k_coords(&tx).is_some());
            prop_assert_eq!(d.reduced_trace_norm(&d.mul(&x, &y)).1, &nx * &ny);
            prop_assert_eq!(d.reduced_trace_norm(&x.add(&y)).0, &tx + &ty);
            let ix = d.canonical_involution(&x).unwrap();
            prop_assert_eq!(d.reduced_trace_norm(&ix).1, nx.conj());
        }

        #[test]
        fn scalar_commutes_past_u(a in l_elt()) {
            let d = d();
            let lhs = d.mul(&AlgElt::scalar(a.clone()), &AlgElt::u());
            let rhs = d.mul(&AlgElt::u(), &AlgElt::scalar(sigma(&a)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
