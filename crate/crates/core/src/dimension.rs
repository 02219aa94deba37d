//! Dimensions of spaces of automorphic forms on the complex 2-ball for a
//! cocompact lattice, summed exactly over conjugacy classes with fixed points.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycElt;
use crate::error::{Error, Result};
use crate::scalars::{fmt_rat, int, rat, rat_string, Rat};
use crate::singularities::RootOfUnity;

/// `r = 2`: the identity (fixed set is the whole ball). `r = 0`: an isolated
/// fixed point with two normal eigenvalues, both `≠ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointClass {
    pub r: u32,
    #[serde(with = "rat_string")]
    pub virtual_euler: Rat,
    pub j: RootOfUnity,
    pub m: u32,
    pub normal_eigenvalues: Vec<RootOfUnity>,
}

impl FixedPointClass {
    pub fn identity(virtual_euler: Rat) -> Self {
        FixedPointClass { r: 2, virtual_euler, j: RootOfUnity::new(1, 0), m: 1, normal_eigenvalues: vec![] }
    }

    pub fn validate(&self) -> Result<()> {
        match self.r {
            2 if self.normal_eigenvalues.is_empty() && self.j.is_one() => Ok(()),
            0 if self.normal_eigenvalues.len() == 2 => {
                if self.normal_eigenvalues.iter().any(RootOfUnity::is_one) {
                    Err(Error::EigenvalueOne)
                } else {
                    Ok(())
                }
            }
            _ => Err(Error::InvalidArgument(format!("malformed fixed-point class {self:?}"))),
        }
    }

    fn galois(&self, s: i64) -> Self {
        let g = |x: &RootOfUnity| RootOfUnity::new(x.modulus, x.exponent * s);
        FixedPointClass { j: g(&self.j), normal_eigenvalues: self.normal_eigenvalues.iter().map(g).collect(), ..self.clone() }
    }
}

/// How `j` is read off an elliptic element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianRule {
    /// Product of the tangent eigenvalues.
    TangentDeterminant,
    InverseDeterminant,
    Trivial,
}

/// Whether the normal eigenvalues are those of the element or of its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenOrientation {
    Direct,
    Inverted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Normalization {
    pub j: JacobianRule,
    pub eigenvalues: EigenOrientation,
}

impl Normalization {
    pub const PINNED: Normalization = Normalization { j: JacobianRule::TangentDeterminant, eigenvalues: EigenOrientation::Direct };

    pub fn all() -> Vec<Normalization> {
        let mut v = Vec::new();
        for j in [JacobianRule::TangentDeterminant, JacobianRule::InverseDeterminant, JacobianRule::Trivial] {
            for eigenvalues in [EigenOrientation::Direct, EigenOrientation::Inverted] {
                v.push(Normalization { j, eigenvalues });
            }
        }
        v
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = match self.j {
            JacobianRule::TangentDeterminant => "j=det",
            JacobianRule::InverseDeterminant => "j=det^-1",
            JacobianRule::Trivial => "j=1",
        };
        let e = match self.eigenvalues {
            EigenOrientation::Direct => "direct",
            EigenOrientation::Inverted => "inverted",
        };
        write!(f, "{j}, {e} eigenvalues")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDataset {
    pub label: String,
    pub cyclotomic_modulus: u32,
    pub normalization: Normalization,
    pub classes: Vec<FixedPointClass>,
}

impl ClassDataset {
    pub fn validate(&self) -> Result<()> {
        for c in &self.classes {
            c.validate()?;
            for x in c.normal_eigenvalues.iter().chain([&c.j]) {
                if !self.cyclotomic_modulus.is_multiple_of(x.modulus) {
                    return Err(Error::ModulusMismatch(self.cyclotomic_modulus, x.modulus));
                }
            }
        }
        Ok(())
    }

    /// Applies `ζ_N ↦ ζ_N^s` to every root of unity.
    pub fn galois(&self, s: i64) -> Result<Self> {
        if s.gcd(&(self.cyclotomic_modulus as i64)) != 1 {
            return Err(Error::InvalidArgument(format!("{s} is not a unit mod {}", self.cyclotomic_modulus)));
        }
        Ok(ClassDataset { classes: self.classes.iter().map(|c| c.galois(s)).collect(), ..self.clone() })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let ds: ClassDataset = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        ds.validate()?;
        Ok(ds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }
}

fn root(x: &RootOfUnity, n: u32) -> CycElt {
    CycElt::zeta_pow(n, x.lift(n).exponent)
}

/// `1/(1-ν)` in `Q(ζ_n)`, memoized.
fn one_minus_inv(nu: &RootOfUnity, n: u32) -> Result<CycElt> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, i64), CycElt>>> = OnceLock::new();
    let key = (n, nu.lift(n).exponent);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("cache lock").get(&key) {
        return Ok(v.clone());
    }
    let v = (&CycElt::one(n) - &root(nu, n)).inv()?;
    cache.lock().expect("cache lock").insert(key, v.clone());
    Ok(v)
}

/// Coefficient of `z^r` in `(1-z)^{3k-1} ∏ 1/(1 - ν_i + ν_i z)`, in `Q(ζ_n)`.
pub fn r_coefficient(r: u32, k: u32, normal_eigenvalues: &[RootOfUnity], n: u32) -> Result<CycElt> {
    if r + normal_eigenvalues.len() as u32 != 2 {
        return Err(Error::InvalidArgument(format!("r={r} with {} normal eigenvalues", normal_eigenvalues.len())));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("weight must be positive".into()));
    }
    let deg = r as usize;
    let e = 3 * k as i64 - 1;
    // coefficients of (1-z)^e up to z^deg
    let mut c = int(1);
    let mut series = vec![CycElt::one(n)];
    for t in 1..=deg as i64 {
        c = -c * int(e - t + 1) / int(t);
        series.push(CycElt::from_rat(n, c.clone()));
    }
    for nu in normal_eigenvalues {
        if nu.is_one() {
            return Err(Error::EigenvalueOne);
        }
        let v = root(nu, n);
        let inv = one_minus_inv(nu, n)?;
        // 1/(1-ν+νz) = inv · Σ (-ν·inv)^t z^t
        let ratio = -(&v * &inv);
        let factor: Vec<CycElt> = (0..=deg).map(|t| &inv * &ratio.pow(t as u32)).collect();
        series = (0..=deg).map(|i| (0..=i).fold(CycElt::zero(n), |acc, t| &acc + &(&series[t] * &factor[i - t]))).collect();
    }
    Ok(series.swap_remove(deg))
}

/// `Σ e_δ j_δ^k R(r_δ, k) / (m_δ (r_δ + 1))`, exact.
pub fn dimension_sum(ds: &ClassDataset, k: u32) -> Result<CycElt> {
    ds.validate()?;
    let n = ds.cyclotomic_modulus;
    let mut acc = CycElt::zero(n);
    for c in &ds.classes {
        let rc = r_coefficient(c.r, k, &c.normal_eigenvalues, n)?;
        let w = &c.virtual_euler / int(c.m as i64 * (c.r as i64 + 1));
        acc = &acc + &(&root(&c.j, n).pow(k) * &rc).scale(&w);
    }
    Ok(acc)
}

pub fn dimension(ds: &ClassDataset, k: u32) -> Result<i64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("weight {k} < 2")));
    }
    let s = dimension_sum(ds, k)?;
    if !s.is_real() {
        return Err(Error::NotAnInteger(format!("sum is not real: {:?}", s.to_complex())));
    }
    let q = s.as_rational().ok_or_else(|| Error::NotAnInteger("sum is irrational".into()))?;
    if !q.is_integer() || q.is_negative() {
        return Err(Error::NotAnInteger(fmt_rat(&q)));
    }
    i64::try_from(q.to_integer()).map_err(|_| Error::NotAnInteger(fmt_rat(&q)))
}

fn elliptic(nus: (RootOfUnity, RootOfUnity), m: u32, norm: Normalization) -> FixedPointClass {
    let (a, b) = match norm.eigenvalues {
        EigenOrientation::Direct => nus,
        EigenOrientation::Inverted => (nus.0.inv(), nus.1.inv()),
    };
    let det = a.mul(&b);
    let j = match norm.j {
        JacobianRule::TangentDeterminant => det,
        JacobianRule::InverseDeterminant => det.inv(),
        JacobianRule::Trivial => RootOfUnity::new(1, 0),
    };
    FixedPointClass { r: 0, virtual_euler: Rat::one(), j, m, normal_eigenvalues: vec![a, b] }
}

/// Powers `Z^i`, `i = 1..6`, of `diag(ζ, ζ³)` at a fixed point where the
/// Galois twist is `ζ ↦ ζ^a`.
fn order_seven_classes(twists: &[i64], norm: Normalization) -> Vec<FixedPointClass> {
    let mut v = Vec::new();
    for &a in twists {
        for i in 1..7 {
            v.push(elliptic((RootOfUnity::new(7, a * i), RootOfUnity::new(7, 3 * a * i)), 7, norm));
        }
    }
    v
}

pub fn build_gamma_dataset_with(norm: Normalization) -> ClassDataset {
    let mut classes = vec![FixedPointClass::identity(rat(3, 7))];
    classes.extend(order_seven_classes(&[1, 2, 4], norm));
    ClassDataset { label: "gamma".into(), cyclotomic_modulus: 21, normalization: norm, classes }
}

pub fn build_gamma_tilde_dataset_with(norm: Normalization) -> ClassDataset {
    let mut classes = vec![FixedPointClass::identity(rat(1, 7))];
    classes.extend(order_seven_classes(&[1], norm));
    // three points of type (3,2), each with rotations ω^{±1}
    for _ in 0..3 {
        for i in 1..3 {
            classes.push(elliptic((RootOfUnity::new(3, i), RootOfUnity::new(3, 2 * i)), 3, norm));
        }
    }
    ClassDataset { label: "gamma-tilde".into(), cyclotomic_modulus: 21, normalization: norm, classes }
}

const GAMMA_JSON: &str = include_str!("../data/gamma.json");
const GAMMA_TILDE_JSON: &str = include_str!("../data/gamma_tilde.json");

/// The shipped fixture for the full lattice.
pub fn build_gamma_dataset() -> ClassDataset {
    ClassDataset::from_json(GAMMA_JSON).expect("bundled fixture is valid")
}

/// The shipped fixture for the index-3 supergroup.
pub fn build_gamma_tilde_dataset() -> ClassDataset {
    ClassDataset::from_json(GAMMA_TILDE_JSON).expect("bundled fixture is valid")
}

/// Weight-2 and weight-3 targets for both lattices.
pub const TARGETS: [(&str, u32, i64); 4] = [("gamma", 2, 1), ("gamma", 3, 4), ("gamma-tilde", 2, 1), ("gamma-tilde", 3, 1)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PinCandidate {
    pub normalization: Normalization,
    /// `None` where the sum is not a nonnegative integer.
    pub values: Vec<Option<i64>>,
    pub matches: usize,
}

impl PinCandidate {
    pub fn all_integral(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PinOutcome {
    pub candidates: Vec<PinCandidate>,
    /// Candidates matching every target; empty when none does.
    pub exact: Vec<Normalization>,
    /// Integral candidates with the most matches.
    pub nearest: Vec<Normalization>,
}

/// Tries every normalization against the four targets.
pub fn pin_normalization() -> PinOutcome {
    let candidates: Vec<PinCandidate> = Normalization::all()
        .into_iter()
        .map(|norm| {
            let g = build_gamma_dataset_with(norm);
            let t = build_gamma_tilde_dataset_with(norm);
            let values: Vec<Option<i64>> =
                TARGETS.iter().map(|(label, k, _)| dimension(if *label == "gamma" { &g } else { &t }, *k).ok()).collect();
            let matches = values.iter().zip(TARGETS).filter(|(v, t)| **v == Some(t.2)).count();
            PinCandidate { normalization: norm, values, matches }
        })
        .collect();
    let exact = candidates.iter().filter(|c| c.matches == TARGETS.len()).map(|c| c.normalization).collect();
    let best = candidates.iter().filter(|c| c.all_integral()).map(|c| c.matches).max().unwrap_or(0);
    let nearest = candidates.iter().filter(|c| c.all_integral() && c.matches == best).map(|c| c.normalization).collect();
    PinOutcome { candidates, exact, nearest }
}
