//! Hermitian 3×3 forms over cyclotomic fields: exact signature and the
//! positive-line test defining the complex ball.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgElt, CyclicAlgebra};
use crate::cyclotomic::{CycElt, Sign};
use crate::error::{Error, Result};
use crate::matrix::Mat3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Mat3", into = "Mat3")]
pub struct HermMatrix(Mat3);

impl TryFrom<Mat3> for HermMatrix {
    type Error = Error;
    fn try_from(m: Mat3) -> Result<Self> {
        HermMatrix::new(m)
    }
}

impl From<HermMatrix> for Mat3 {
    fn from(h: HermMatrix) -> Mat3 {
        h.0
    }
}

impl HermMatrix {
    pub fn new(m: Mat3) -> Result<Self> {
        if !m.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        Ok(HermMatrix(m))
    }

    pub fn identity(modulus: u32) -> Self {
        HermMatrix(Mat3::identity(modulus))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn neg(&self) -> Self {
        HermMatrix(self.0.map(|x| -x))
    }

    /// `G^* H G`, again hermitian.
    pub fn congruence(&self, g: &Mat3) -> Self {
        HermMatrix(&(&g.conj_transpose() * &self.0) * g)
    }

    /// `l^* H l`, a real element of the field.
    pub fn value(&self, l: &[CycElt; 3]) -> Result<CycElt> {
        let m = self.0.modulus();
        if let Some(bad) = l.iter().find(|x| x.modulus() != m) {
            return Err(Error::ModulusMismatch(m, bad.modulus()));
        }
        let hl = self.0.apply(l);
        let mut acc = CycElt::zero(m);
        for (li, hi) in l.iter().zip(&hl) {
            acc = &acc + &(&li.conj() * hi);
        }
        Ok(acc)
    }
}

/// Inertia of a hermitian form. `positives + negatives + zeros = 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positives: u32,
    pub negatives: u32,
    pub zeros: u32,
}

impl Signature {
    /// `(positives, negatives)`.
    pub fn standard(&self) -> (u32, u32) {
        (self.positives, self.negatives)
    }

    /// `(negatives, positives)`: a form with one positive and two negative
    /// eigenvalues is written `(2,1)`.
    pub fn negatives_first(&self) -> (u32, u32) {
        (self.negatives, self.positives)
    }

    pub fn is_ball_type(&self) -> bool {
        self.standard() == (1, 2) && self.zeros == 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} positive, {} negative, {} zero [(p,n) = ({},{}); (n,p) = ({},{})]",
            self.positives, self.negatives, self.zeros, self.positives, self.negatives, self.negatives, self.positives
        )
    }
}

/// The hermitian matrix of an `ι`-invariant element under the embedding.
pub fn build_hermitian(alg: &CyclicAlgebra, b: &AlgElt) -> Result<HermMatrix> {
    if alg.canonical_involution(b)? != *b {
        return Err(Error::NotHermitian);
    }
    HermMatrix::new(alg.to_matrix(b))
}

fn sign_changes(signs: impl IntoIterator<Item = Sign>) -> u32 {
    let mut last = None;
    let mut n = 0;
    for s in signs {
        if s == Sign::Zero {
            continue;
        }
        if last.is_some_and(|l| l != s) {
            n += 1;
        }
        last = Some(s);
    }
    n
}

fn flip(s: Sign) -> Sign {
    match s {
        Sign::Positive => Sign::Negative,
        Sign::Negative => Sign::Positive,
        Sign::Zero => Sign::Zero,
    }
}

/// Exact signature from the leading principal minors when none vanish,
/// otherwise from the characteristic polynomial (all roots real, so
/// Descartes' rule is exact).
pub fn signature(h: &HermMatrix) -> Result<Signature> {
    let m = h.matrix();
    let minors = m.leading_minors().iter().map(CycElt::exact_sign).collect::<Result<Vec<_>>>()?;
    if minors.iter().all(|s| *s != Sign::Zero) {
        let negatives = sign_changes(std::iter::once(Sign::Positive).chain(minors));
        return Ok(Signature { positives: 3 - negatives, negatives, zeros: 0 });
    }
    signature_from_charpoly(m)
}

/// `det(tI - H) = t³ - c1 t² + c2 t - c3`.
pub fn signature_from_charpoly(m: &Mat3) -> Result<Signature> {
    let c1 = m.trace().exact_sign()?;
    let c2 = m.principal_minor_sum().exact_sign()?;
    let c3 = m.det().exact_sign()?;
    // coefficients of t^0..t^3
    let p = [flip(c3), c2, flip(c1), Sign::Positive];
    let zeros = p.iter().position(|s| *s != Sign::Zero).expect("leading coefficient is 1") as u32;
    let positives = sign_changes(p.iter().rev().copied());
    let p_neg: Vec<Sign> = p.iter().enumerate().map(|(i, s)| if i % 2 == 1 { flip(*s) } else { *s }).collect();
    let negatives = sign_changes(p_neg.into_iter().rev());
    debug_assert_eq!(positives + negatives + zeros, 3);
    Ok(Signature { positives, negatives, zeros })
}

/// `[l]` lies in the ball of `H` iff `H(l,l) > 0`.
pub fn in_ball(h: &HermMatrix, l: &[CycElt; 3]) -> Result<bool> {
    if l.iter().all(CycElt::is_zero) {
        return Err(Error::ZeroVector);
    }
    Ok(h.value(l)?.exact_sign()? == Sign::Positive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::standard_b;
    use crate::cyclotomic::{lambda, lambda_bar, zeta};
    use crate::scalars::{int, Rat};
    use proptest::prelude::*;

    fn e(i: usize) -> [CycElt; 3] {
        std::array::from_fn(|j| CycElt::from_int(7, (i == j) as i64))
    }

    fn h_c() -> HermMatrix {
        let c = &zeta() + &CycElt::zeta_pow(7, -1);
        build_hermitian(&CyclicAlgebra::standard(), &AlgElt::scalar(c)).unwrap()
    }

    #[test]
    fn h_b_entries_and_signature() {
        let h = build_hermitian(&CyclicAlgebra::standard(), &standard_b()).unwrap();
        let m1 = CycElt::from_int(7, -1);
        let (l, lb) = (lambda(), lambda_bar());
        let expect = Mat3 { rows: [[m1.clone(), l.clone(), l.clone()], [lb.clone(), m1.clone(), l], [lb.clone(), lb, m1]] };
        assert_eq!(*h.matrix(), expect);
        let minors: Vec<Option<Rat>> = h.matrix().leading_minors().iter().map(CycElt::as_rational).collect();
        assert_eq!(minors, vec![Some(int(-1)), Some(int(-1)), Some(int(3))]);
        let s = signature(&h).unwrap();
        assert_eq!(s.standard(), (1, 2));
        assert_eq!(s.negatives_first(), (2, 1));
        assert!(s.is_ball_type());
        assert_eq!(signature_from_charpoly(h.matrix()).unwrap(), s);
    }

    #[test]
    fn identity_and_h_c() {
        assert_eq!(build_hermitian(&CyclicAlgebra::standard(), &AlgElt::one()).unwrap(), HermMatrix::identity(7));
        assert_eq!(signature(&HermMatrix::identity(7)).unwrap().standard(), (3, 0));
        let h = h_c();
        let d = |k: i64| &CycElt::zeta_pow(7, k) + &CycElt::zeta_pow(7, -k);
        assert_eq!(*h.matrix(), Mat3::diag([d(1), d(2), d(4)]));
        assert_eq!(signature(&h).unwrap().standard(), (1, 2));
    }

    #[test]
    fn ball_membership() {
        let h = h_c();
        assert!(in_ball(&h, &e(0)).unwrap());
        assert!(!in_ball(&h, &e(1)).unwrap());
        assert_eq!((0..3).filter(|&i| in_ball(&h, &e(i)).unwrap()).count(), 1);
        let l = [lambda(), zeta(), CycElt::from_int(7, -3)];
        assert!(in_ball(&HermMatrix::identity(7), &l).unwrap());
        let zero: [CycElt; 3] = std::array::from_fn(|_| CycElt::zero(7));
        assert_eq!(in_ball(&h, &zero), Err(Error::ZeroVector));
    }

    #[test]
    fn non_invariant_is_rejected() {
        let alg = CyclicAlgebra::standard();
        assert_eq!(build_hermitian(&alg, &AlgElt::u()), Err(Error::NotHermitian));
        assert_eq!(HermMatrix::new(Mat3::diag([zeta(), zeta(), zeta()])), Err(Error::NotHermitian));
    }

    #[test]
    fn degenerate_minors_use_fallback() {
        // Leading 1×1 minor vanishes: [[0,1,0],[1,0,0],[0,0,-1]] has eigenvalues 1,-1,-1.
        let (z, o) = (CycElt::zero(7), CycElt::one(7));
        let m = Mat3 { rows: [[z.clone(), o.clone(), z.clone()], [o, z.clone(), z.clone()], [z.clone(), z, CycElt::from_int(7, -1)]] };
        let s = signature(&HermMatrix::new(m).unwrap()).unwrap();
        assert_eq!((s.positives, s.negatives, s.zeros), (1, 2, 0));
        let s0 = signature(&HermMatrix::new(Mat3::diag([CycElt::one(7), CycElt::zero(7), CycElt::from_int(7, -2)])).unwrap()).unwrap();
        assert_eq!((s0.positives, s0.negatives, s0.zeros), (1, 1, 1));
    }

    fn l_elt() -> impl Strategy<Value = CycElt> {
        proptest::collection::vec(-3i64..=3, 6).prop_map(|v| CycElt::from_poly(7, v.into_iter().map(int).collect()))
    }

    fn herm() -> impl Strategy<Value = HermMatrix> {
        (proptest::collection::vec(-4i64..=4, 3), l_elt(), l_elt(), l_elt(), l_elt()).prop_map(|(d, a, b, c, r)| {
            let r = &r + &r.conj();
            let diag = [&CycElt::from_int(7, d[0]) + &r, CycElt::from_int(7, d[1]), CycElt::from_int(7, d[2])];
            let mut m = Mat3::diag(diag);
            m.rows[0][1] = a.clone();
            m.rows[1][0] = a.conj();
            m.rows[0][2] = b.clone();
            m.rows[2][0] = b.conj();
            m.rows[1][2] = c.clone();
            m.rows[2][1] = c.conj();
            HermMatrix::new(m).unwrap()
        })
    }

    fn mat() -> impl Strategy<Value = Mat3> {
        proptest::collection::vec(l_elt(), 9).prop_map(|v| Mat3::from_fn(|i, j| v[3 * i + j].clone()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn sylvester_congruence(h in herm(), g in mat()) {
            prop_assume!(!g.det().is_zero());
            let s = signature(&h).unwrap();
            prop_assert_eq!(signature(&h.congruence(&g)).unwrap(), s);
            prop_assert_eq!(signature_from_charpoly(h.matrix()).unwrap(), s);
            let n = signature(&h.neg()).unwrap();
            prop_assert_eq!((n.positives, n.negatives, n.zeros), (s.negatives, s.positives, s.zeros));
        }
    }
}
