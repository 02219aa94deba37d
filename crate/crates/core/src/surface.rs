//! Chern and Hodge bookkeeping for compact complex surfaces, a rule-based
//! Kodaira-dimension decision for the ranges that occur here, and elliptic
//! fiber accounting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{fmt_rat, int, rat_string, Rat};
use crate::singularities::Resolution;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceInvariants {
    #[serde(with = "rat_string")]
    pub c2: Rat,
    #[serde(with = "rat_string")]
    pub c1_sq: Rat,
    #[serde(with = "rat_string")]
    pub q_irr: Rat,
    #[serde(with = "rat_string")]
    pub p_g: Rat,
    #[serde(with = "rat_string")]
    pub chi: Rat,
    #[serde(with = "rat_string")]
    pub signature: Rat,
    #[serde(default)]
    pub plurigenera: BTreeMap<u32, i64>,
    #[serde(default)]
    pub minimal: bool,
}

impl SurfaceInvariants {
    /// From `c₂`, `c₁²` and `q`; `χ`, `p_g` and the signature follow.
    pub fn from_chern(c2: Rat, c1_sq: Rat, q_irr: Rat) -> Self {
        let chi = (&c1_sq + &c2) / int(12);
        let signature = (&c1_sq - &c2 * int(2)) / int(3);
        let p_g = &chi - int(1) + &q_irr;
        SurfaceInvariants { c2, c1_sq, q_irr, p_g, chi, signature, plurigenera: BTreeMap::new(), minimal: false }
    }

    /// From Euler number and signature, via `c₁² = 3 sign + 2 c₂`.
    pub fn from_resolution(r: &Resolution, q_irr: Rat) -> Self {
        let c1_sq = &r.signature * int(3) + &r.euler * int(2);
        SurfaceInvariants::from_chern(r.euler.clone(), c1_sq, q_irr)
    }

    pub fn with_plurigenera(mut self, p: impl IntoIterator<Item = (u32, i64)>) -> Self {
        self.plurigenera.extend(p);
        self
    }

    /// Noether, the signature theorem and `χ = 1 - q + p_g`.
    pub fn check(&self) -> Result<()> {
        let noether = self.chi == (&self.c1_sq + &self.c2) / int(12);
        let sign = self.signature == (&self.c1_sq - &self.c2 * int(2)) / int(3);
        let hodge = self.chi == int(1) - &self.q_irr + &self.p_g;
        if noether && sign && hodge {
            Ok(())
        } else {
            Err(Error::Inconsistent)
        }
    }

    pub fn plurigenus(&self, k: u32) -> Option<i64> {
        self.plurigenera.get(&k).copied()
    }
}

/// Smooth compact ball quotient: `c₁² = 3c₂`, `χ = sign = c₂/3`. Ampleness
/// of `K` makes it minimal, and `P_k = χ + k(k-1)K²/2` for `k ≥ 2`.
pub fn ball_quotient_invariants(c2: Rat, q_irr: Rat) -> Result<SurfaceInvariants> {
    if !c2.is_positive() {
        return Err(Error::InvalidArgument(format!("c2 = {} must be positive", fmt_rat(&c2))));
    }
    let c1_sq = &c2 * int(3);
    let mut s = SurfaceInvariants::from_chern(c2, c1_sq, q_irr);
    s.minimal = true;
    for k in [2u32, 3] {
        let p = &s.chi + &s.c1_sq * int((k * (k - 1) / 2) as i64);
        if p.is_integer() {
            s.plurigenera.insert(k, i64::try_from(p.to_integer()).map_err(|_| Error::Inconsistent)?);
        }
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kodaira {
    #[serde(rename = "-inf")]
    NegInfinity,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Kodaira {
    pub const ALL: [Kodaira; 4] = [Kodaira::NegInfinity, Kodaira::Zero, Kodaira::One, Kodaira::Two];
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kodaira::NegInfinity => "-inf",
            Kodaira::Zero => "0",
            Kodaira::One => "1",
            Kodaira::Two => "2",
        })
    }
}

/// `c₂ = 3`, `c₁² = 9`, `q = p_g = 0`, general type.
pub fn is_fake_projective_plane(s: &SurfaceInvariants, kodaira: Kodaira) -> bool {
    s.c2 == int(3) && s.c1_sq == int(9) && s.q_irr.is_zero() && s.p_g.is_zero() && kodaira == Kodaira::Two
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleFiring {
    pub rule: &'static str,
    pub excluded: Vec<Kodaira>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kodaira: Kodaira,
    pub trace: Vec<RuleFiring>,
    /// Set when the invariants force minimality.
    pub minimal: bool,
}

/// Eliminates Kodaira dimensions rule by rule; exactly one must survive.
pub fn kodaira_classify(s: &SurfaceInvariants) -> Result<Classification> {
    let p2 = s.plurigenus(2).ok_or_else(|| Error::InvalidArgument("P2 is required".into()))?;
    let p3 = s.plurigenus(3).ok_or_else(|| Error::InvalidArgument("P3 is required".into()))?;
    let q_zero = s.q_irr.is_zero();
    let mut alive: BTreeSet<Kodaira> = Kodaira::ALL.into_iter().collect();
    let mut trace = Vec::new();
    let mut fire = |rule: &'static str, excluded: Vec<Kodaira>, reason: String, alive: &mut BTreeSet<Kodaira>| {
        for k in &excluded {
            alive.remove(k);
        }
        trace.push(RuleFiring { rule, excluded, reason });
    };

    if q_zero && p2 == 0 {
        fire("castelnuovo", vec![Kodaira::Zero, Kodaira::One, Kodaira::Two], "q = P2 = 0, so the surface is rational".into(), &mut alive);
    } else if let Some((k, p)) = s.plurigenera.iter().find(|(_, p)| **p > 0) {
        fire("enriques", vec![Kodaira::NegInfinity], format!("P{k} = {p} > 0, so the surface is neither rational nor ruled"), &mut alive);
    }
    if let Some((k, p)) = s.plurigenera.iter().find(|(_, p)| **p > 1) {
        fire("kappa-zero-bound", vec![Kodaira::Zero], format!("P{k} = {p} > 1, impossible in Kodaira dimension 0"), &mut alive);
    } else if q_zero && s.p_g.is_zero() && p3 >= 1 {
        fire(
            "kappa-zero-classification",
            vec![Kodaira::Zero],
            "p_g = q = 0 in Kodaira dimension 0 forces an Enriques surface, where P3 = 0".into(),
            &mut alive,
        );
    }
    if p2 < 2 {
        fire(
            "riemann-roch-general-type",
            vec![Kodaira::Two],
            format!("general type would give P2 = chi + K^2 >= 2, but P2 = {p2}"),
            &mut alive,
        );
    }
    if s.minimal && s.c1_sq.is_positive() {
        fire(
            "minimal-positive-c1sq",
            vec![Kodaira::Zero, Kodaira::One],
            format!("minimal with c1^2 = {} > 0; minimal surfaces of Kodaira dimension 0 or 1 have c1^2 = 0", fmt_rat(&s.c1_sq)),
            &mut alive,
        );
    }

    match alive.len() {
        0 => Err(Error::Inconsistent),
        1 => {
            let kodaira = *alive.iter().next().expect("one survivor");
            // blowing down raises K² by one, and minimal κ = 1 surfaces have K² = 0
            let minimal = s.minimal || (kodaira == Kodaira::One && s.c1_sq.is_zero());
            Ok(Classification { kodaira, trace, minimal })
        }
        _ => Err(Error::Ambiguous(alive.iter().map(ToString::to_string).collect())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type", content = "n")]
pub enum FiberKind {
    /// Cycle of `n` rational curves (a nodal rational curve for `n = 1`).
    I(u32),
    Smooth,
}

impl FiberKind {
    pub fn euler(&self) -> u32 {
        match self {
            FiberKind::I(n) => *n,
            FiberKind::Smooth => 0,
        }
    }

    pub fn components(&self) -> u32 {
        match self {
            FiberKind::I(n) => *n,
            FiberKind::Smooth => 1,
        }
    }
}

impl fmt::Display for FiberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberKind::I(n) => write!(f, "I{n}"),
            FiberKind::Smooth => f.write_str("smooth"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KodairaFiber {
    pub kind: FiberKind,
    pub multiplicity: u32,
}

impl KodairaFiber {
    pub fn new(kind: FiberKind, multiplicity: u32) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::InvalidArgument("fiber multiplicity must be at least 1".into()));
        }
        Ok(KodairaFiber { kind, multiplicity })
    }

    pub fn euler(&self) -> u32 {
        self.kind.euler()
    }
}

pub fn fibration_euler_check(fibers: &[KodairaFiber], expected_c2: &Rat) -> bool {
    int(fibers.iter().map(|f| f.euler() as i64).sum::<i64>()) == *expected_c2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedFiber {
    pub label: String,
    pub kind: FiberKind,
    #[serde(default = "one")]
    pub multiplicity: u32,
    pub components: Vec<String>,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalCurve {
    pub label: String,
    pub self_intersection: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationFixture {
    pub label: String,
    #[serde(with = "rat_string")]
    pub c2: Rat,
    pub fibers: Vec<NamedFiber>,
    pub exceptional_curves: Vec<ExceptionalCurve>,
}

impl FibrationFixture {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn kodaira_fibers(&self) -> Vec<KodairaFiber> {
        self.fibers.iter().map(|f| KodairaFiber { kind: f.kind, multiplicity: f.multiplicity }).collect()
    }
}

/// Every `(-2)`-curve lies in exactly one fiber, no `(-3)`-curve lies in a
/// fiber, and each `I_n` fiber lists `n` components.
pub fn fiber_component_accounting(fibers: &[NamedFiber], exceptional: &[ExceptionalCurve]) -> bool {
    let sizes_ok =
        fibers.iter().all(|f| f.components.len() as u32 == f.kind.components() || (f.kind == FiberKind::Smooth && f.components.is_empty()));
    let count = |label: &str| fibers.iter().flat_map(|f| &f.components).filter(|c| c.as_str() == label).count();
    let curves_ok = exceptional.iter().all(|e| match e.self_intersection {
        -2 => count(&e.label) == 1,
        -3 => count(&e.label) == 0,
        _ => true,
    });
    sizes_ok && curves_ok
}

const GAMMA_FIBERS: &str = include_str!("../data/fibration_gamma.json");
const GAMMA_TILDE_FIBERS: &str = include_str!("../data/fibration_gamma_tilde.json");

pub fn gamma_fibration() -> FibrationFixture {
    FibrationFixture::from_json(GAMMA_FIBERS).expect("bundled fixture is valid")
}

pub fn gamma_tilde_fibration() -> FibrationFixture {
    FibrationFixture::from_json(GAMMA_TILDE_FIBERS).expect("bundled fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::int;
    use crate::singularities::{resolve_invariants, OrbifoldSurface};
    use proptest::prelude::*;

    fn resolved_gamma() -> SurfaceInvariants {
        SurfaceInvariants::from_resolution(&resolve_invariants(&OrbifoldSurface::gamma_quotient()), int(0))
    }

    #[test]
    fn ball_quotients() {
        let s = ball_quotient_invariants(int(3), int(0)).unwrap();
        assert_eq!((s.c1_sq.clone(), s.chi.clone(), s.signature.clone(), s.p_g.clone()), (int(9), int(1), int(1), int(0)));
        s.check().unwrap();
        let s = ball_quotient_invariants(int(12), int(0)).unwrap();
        assert_eq!((s.chi.clone(), s.c1_sq.clone()), (int(4), int(36)));
        assert_eq!(ball_quotient_invariants(int(3), int(1)).unwrap().p_g, int(1));
        assert!(ball_quotient_invariants(int(0), int(0)).is_err());
    }

    #[test]
    fn resolution_invariants() {
        let s = resolved_gamma();
        assert_eq!((s.c1_sq.clone(), s.chi.clone(), s.p_g.clone()), (int(0), int(1), int(0)));
        s.check().unwrap();
        let mut bad = s.clone();
        bad.chi = int(2);
        assert_eq!(bad.check(), Err(Error::Inconsistent));
    }

    #[test]
    fn fake_plane_predicate() {
        let s = ball_quotient_invariants(int(3), int(0)).unwrap();
        let c = kodaira_classify(&s).unwrap();
        assert_eq!(c.kodaira, Kodaira::Two);
        assert!(is_fake_projective_plane(&s, c.kodaira));
        let p2 = SurfaceInvariants::from_chern(int(3), int(9), int(0)).with_plurigenera([(2, 0), (3, 0)]);
        let c = kodaira_classify(&p2).unwrap();
        assert_eq!(c.kodaira, Kodaira::NegInfinity);
        assert!(!is_fake_projective_plane(&p2, c.kodaira));
        let big = ball_quotient_invariants(int(12), int(0)).unwrap();
        assert!(!is_fake_projective_plane(&big, Kodaira::One));
    }

    #[test]
    fn kodaira_of_resolutions() {
        let g = resolved_gamma().with_plurigenera([(2, 1), (3, 4)]);
        let c = kodaira_classify(&g).unwrap();
        assert_eq!(c.kodaira, Kodaira::One);
        assert!(c.minimal);
        let rules: Vec<&str> = c.trace.iter().map(|r| r.rule).collect();
        assert_eq!(rules, vec!["enriques", "kappa-zero-bound", "riemann-roch-general-type"]);
        let t = resolved_gamma().with_plurigenera([(2, 1), (3, 1)]);
        let c = kodaira_classify(&t).unwrap();
        assert_eq!(c.kodaira, Kodaira::One);
        assert!(c.trace.iter().any(|r| r.rule == "kappa-zero-classification"));
        // the class-sum value P3 = 2 leads to the same answer
        assert_eq!(kodaira_classify(&resolved_gamma().with_plurigenera([(2, 1), (3, 2)])).unwrap().kodaira, Kodaira::One);
    }

    #[test]
    fn kodaira_errors() {
        assert!(matches!(kodaira_classify(&resolved_gamma()), Err(Error::InvalidArgument(_))));
        // q = 1, P2 = P3 = 1, p_g = 0: κ ∈ {0, 1} both survive
        let s = SurfaceInvariants::from_chern(int(0), int(0), int(1)).with_plurigenera([(2, 1), (3, 1)]);
        assert!(matches!(kodaira_classify(&s), Err(Error::Ambiguous(v)) if v == vec!["0", "1"]));
    }

    #[test]
    fn fibrations() {
        let t = gamma_tilde_fibration();
        assert_eq!(t.fibers.iter().filter(|f| f.kind == FiberKind::I(3)).count(), 4);
        assert!(fibration_euler_check(&t.kodaira_fibers(), &int(12)));
        let g = gamma_fibration();
        assert!(fibration_euler_check(&g.kodaira_fibers(), &int(12)));
        assert!(!fibration_euler_check(&[KodairaFiber::new(FiberKind::I(3), 1).unwrap()], &int(12)));
        for f in [&t, &g] {
            let multiple: Vec<u32> = f.fibers.iter().filter(|x| x.multiplicity > 1).map(|x| x.multiplicity).collect();
            assert_eq!(multiple, vec![2, 3]);
            assert!(fiber_component_accounting(&f.fibers, &f.exceptional_curves));
        }
        assert_eq!(g.fibers.iter().find(|f| f.kind == FiberKind::I(9)).unwrap().components.len(), 9);
    }

    #[test]
    fn minus_three_curve_in_fiber_fails() {
        let mut g = gamma_fibration();
        let c0 = g.fibers.iter_mut().find(|f| f.kind == FiberKind::I(9)).unwrap();
        c0.components[8] = "E1,1".into();
        assert!(!fiber_component_accounting(&g.fibers, &g.exceptional_curves));
        let mut t = gamma_tilde_fibration();
        t.fibers[0].components.retain(|c| c != "A3");
        assert!(!fiber_component_accounting(&t.fibers, &t.exceptional_curves));
    }

    #[test]
    fn single_fiber_mutations_break_euler_sum() {
        for fx in [gamma_fibration(), gamma_tilde_fibration()] {
            let base = fx.kodaira_fibers();
            for i in 0..base.len() {
                let mut m = base.clone();
                m[i].kind = match m[i].kind {
                    FiberKind::I(n) => FiberKind::I(n + 1),
                    FiberKind::Smooth => FiberKind::I(1),
                };
                assert!(!fibration_euler_check(&m, &fx.c2));
                let mut dropped = base.clone();
                dropped.remove(i);
                assert_eq!(fibration_euler_check(&dropped, &fx.c2), base[i].euler() == 0);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn identities_hold(c2 in 1i64..200, q in 0i64..5) {
            ball_quotient_invariants(int(c2), int(q)).unwrap().check().unwrap();
        }

        #[test]
        fn resolution_identities_hold(e in -50i64..50, s in -50i64..50, q in 0i64..3) {
            let r = Resolution { euler: int(e), signature: int(s), blowups: 0 };
            SurfaceInvariants::from_resolution(&r, int(q)).check().unwrap();
        }
    }
}
