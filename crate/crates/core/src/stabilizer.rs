//! Decision procedures for stabilizers and construction of witnessing
//! representations.

use serde::Serialize;

use crate::algebra::{
    chi, is_l_ideal, is_l_unitary, is_meet_stable, is_quasi_stable, is_stable_subset, is_v_unitary, zeta,
    BinaryRelation, Context, MengerAlgebra,
};
use crate::assignment::{Assignment, PropFlag};
use crate::equivalence::{intersect_equivalences, EquivalenceRelation};
use crate::error::{input, Error, Result};
use crate::function::{Carrier, FunctionSystem};
use crate::representation::{
    representation_stabilizer, simplest_representation, sum_representations, verify_representation, Representation,
};
use crate::set::ElementSet;
use crate::transforms::{is_normal_v_complex, meet_equivalence, subset_equivalence, StageEngine, TransformSet};

/// Largest algebra for which [`search_theorem1_u`] enumerates supersets.
pub const U_SEARCH_MAX_SIZE: usize = 14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CheckMode {
    /// Stop at the first failed condition.
    #[default]
    FirstFailure,
    /// Evaluate every condition and list all failures.
    Audit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub condition: String,
    pub witness: Assignment,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Artifacts {
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    pub u: Option<ElementSet>,
    #[serde(rename = "U0", skip_serializing_if = "Option::is_none")]
    pub u0: Option<ElementSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<ElementSet>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
}

/// Outcome of a checker: the first failed condition with its witness, and
/// whatever sets were computed on the way.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub failed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Assignment>,
    pub artifacts: Artifacts,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Failure>,
}

struct Sweep {
    mode: CheckMode,
    failures: Vec<Failure>,
    artifacts: Artifacts,
}

impl Sweep {
    fn new(mode: CheckMode) -> Self {
        Sweep { mode, failures: Vec::new(), artifacts: Artifacts::default() }
    }

    /// Records `flag`; true when the sweep should stop.
    fn check(&mut self, condition: &str, flag: PropFlag) -> bool {
        if let Some(w) = flag.counterexample {
            self.failures.push(Failure { condition: condition.to_string(), witness: w });
            return self.mode == CheckMode::FirstFailure;
        }
        false
    }

    fn finish(self) -> Verdict {
        let first = self.failures.first().cloned();
        Verdict {
            pass: first.is_none(),
            failed: first.as_ref().map(|f| f.condition.clone()),
            witness: first.map(|f| f.witness),
            artifacts: self.artifacts,
            failures: if self.mode == CheckMode::Audit { self.failures } else { Vec::new() },
        }
    }
}

fn nonempty(alg: &MengerAlgebra, h: &ElementSet) -> Result<()> {
    h.check_universe(alg.size(), "H")?;
    if h.is_empty() {
        return input("H must be nonempty");
    }
    Ok(())
}

fn within(alg: &MengerAlgebra, h: &ElementSet, u: &ElementSet) -> Result<()> {
    u.check_universe(alg.size(), "U")?;
    if !h.is_subset(u) {
        return input(format!("H = {h} is not contained in U = {u}"));
    }
    Ok(())
}

/// `R_i x ∈ target` for every `x ∈ source`.
fn projections_into(alg: &MengerAlgebra, source: &ElementSet, target: &ElementSet) -> PropFlag {
    for x in source.iter() {
        for i in 1..=alg.arity() {
            if !target.contains(alg.proj(i, x)) {
                return PropFlag::fails(Assignment::new().with("x", x).with("i", i));
            }
        }
    }
    PropFlag::holds()
}

/// `x ≤ y ∧ x ∈ gate ∧ ctx(y) ∈ target → ctx(x) ∈ target` over every
/// context, the empty one first.
fn context_transfer(alg: &MengerAlgebra, le: &BinaryRelation, gate: &ElementSet, target: &ElementSet) -> PropFlag {
    let mut contexts = vec![Context::Empty];
    contexts.extend(alg.contexts());
    for x in gate.iter() {
        for y in 0..alg.size() {
            if !le.contains(x, y) {
                continue;
            }
            for ctx in &contexts {
                if target.contains(ctx.apply(alg, y)) && !target.contains(ctx.apply(alg, x)) {
                    return PropFlag::fails(ctx.describe(Assignment::new().with("x", x).with("y", y)));
                }
            }
        }
    }
    PropFlag::holds()
}

/// Conditions shared by the second and third characterizations.
fn base_conditions(sweep: &mut Sweep, alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet) -> Result<bool> {
    if sweep.check("quasi-stable", is_quasi_stable(alg, h)) || sweep.check("l-unitary", is_l_unitary(alg, h)) {
        return Ok(true);
    }
    if sweep.check("normal-v-complex", is_normal_v_complex(alg, tn, h)?) {
        return Ok(true);
    }
    Ok(sweep.check("RiH-in-H", projections_into(alg, h, h)))
}

/// Quasi-stable l-unitary normal v-complex inside `U` with the projection
/// and transfer conditions for the given `U`.
pub fn check_theorem1(alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet, u: &ElementSet) -> Result<Verdict> {
    check_theorem1_with(alg, tn, h, u, CheckMode::FirstFailure)
}

pub fn check_theorem1_with(
    alg: &MengerAlgebra,
    tn: &TransformSet,
    h: &ElementSet,
    u: &ElementSet,
    mode: CheckMode,
) -> Result<Verdict> {
    nonempty(alg, h)?;
    within(alg, h, u)?;
    let mut s = Sweep::new(mode);
    s.artifacts.u = Some(u.clone());
    let outside = u.complement();
    let le = zeta(alg);
    let _ = s.check("quasi-stable", is_quasi_stable(alg, h))
        || s.check("l-unitary", is_l_unitary(alg, h))
        || s.check("normal-v-complex", is_normal_v_complex(alg, tn, h)?)
        || s.check("RiU-in-H", projections_into(alg, u, h))
        || s.check("Ri(G-U)-in-(G-U)", projections_into(alg, &outside, &outside))
        || s.check("f-1", transform_transfer(tn, h, u))
        || s.check("f-2", context_transfer(alg, &le, u, h))
        || s.check("f-3", context_transfer(alg, &le, u, u));
    Ok(s.finish())
}

/// `x, y ∈ H ∧ t(x) ∈ U → t(y) ∈ U`.
fn transform_transfer(tn: &TransformSet, h: &ElementSet, u: &ElementSet) -> PropFlag {
    for x in h.iter() {
        for y in h.iter() {
            for t in 0..tn.len() {
                if u.contains(tn.apply(t, x)) && !u.contains(tn.apply(t, y)) {
                    return PropFlag::fails(Assignment::new().with("x", x).with("y", y).with("t", t));
                }
            }
        }
    }
    PropFlag::holds()
}

/// Characterization through the closure `U = C_H[H]`.
pub fn check_theorem2(alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet) -> Result<Verdict> {
    check_theorem2_with(alg, tn, h, CheckMode::FirstFailure)
}

pub fn check_theorem2_with(alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet, mode: CheckMode) -> Result<Verdict> {
    nonempty(alg, h)?;
    let mut s = Sweep::new(mode);
    if base_conditions(&mut s, alg, tn, h)? {
        return Ok(s.finish());
    }
    let staged = StageEngine::new(alg, tn, h)?.closure(h)?;
    let le = zeta(alg);
    s.check("f-22", context_transfer(alg, &le, &staged.closure, h));
    s.artifacts.u = Some(staged.closure);
    s.artifacts.stages = Some(staged.stages);
    Ok(s.finish())
}

/// Characterization through the unfolded stage conditions `A_1 .. A_m`.
///
/// `artifacts.stages[m - 1]` holds the elements satisfying the stage-`m`
/// condition system.
pub fn check_theorem3(alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet, m_max: usize) -> Result<Verdict> {
    check_theorem3_with(alg, tn, h, m_max, CheckMode::FirstFailure)
}

pub fn check_theorem3_with(
    alg: &MengerAlgebra,
    tn: &TransformSet,
    h: &ElementSet,
    m_max: usize,
    mode: CheckMode,
) -> Result<Verdict> {
    nonempty(alg, h)?;
    if m_max < 1 {
        return input("the stage bound must be at least 1");
    }
    let mut s = Sweep::new(mode);
    if base_conditions(&mut s, alg, tn, h)? {
        return Ok(s.finish());
    }
    let engine = StageEngine::new(alg, tn, h)?;
    let le = zeta(alg);
    let mut stages = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let mut stage = ElementSet::empty(alg.size());
        for x in 0..alg.size() {
            if engine.stage_condition(h, m, x, m_max)? {
                stage.insert(x);
            }
        }
        let stop = s.check(&format!("A_{m}"), context_transfer(alg, &le, &stage, h));
        stages.push(stage);
        if stop {
            break;
        }
    }
    s.artifacts.stages = Some(stages);
    Ok(s.finish())
}

fn require_meet(alg: &MengerAlgebra) -> Result<()> {
    if !alg.has_meet() {
        return input("this characterization needs a meet table");
    }
    Ok(())
}

/// Characterization of stabilizers of meet algebras for a given `U`.
pub fn check_theorem4(alg: &MengerAlgebra, h: &ElementSet, u: &ElementSet) -> Result<Verdict> {
    check_theorem4_with(alg, h, u, CheckMode::FirstFailure)
}

pub fn check_theorem4_with(alg: &MengerAlgebra, h: &ElementSet, u: &ElementSet, mode: CheckMode) -> Result<Verdict> {
    require_meet(alg)?;
    nonempty(alg, h)?;
    within(alg, h, u)?;
    let mut s = Sweep::new(mode);
    s.artifacts.u = Some(u.clone());
    let outside = u.complement();
    let _ = s.check("quasi-stable", is_quasi_stable(alg, h))
        || s.check("meet-stable", is_meet_stable(alg, h).unwrap())
        || s.check("v-unitary", is_v_unitary(alg, h))
        || s.check("RiU-in-H", projections_into(alg, u, h))
        || s.check("Ri(G-U)-in-(G-U)", projections_into(alg, &outside, &outside))
        || s.check("T4-1", restriction_transfer(alg, u, h, h))
        || s.check("T4-1a", restriction_transfer(alg, u, u, u));
    Ok(s.finish())
}

/// `x ∈ gate ∧ y ∈ source → y[R̄x] ∈ target`.
fn restriction_transfer(alg: &MengerAlgebra, gate: &ElementSet, source: &ElementSet, target: &ElementSet) -> PropFlag {
    for x in gate.iter() {
        for y in source.iter() {
            if !target.contains(alg.restrict(y, x)) {
                return PropFlag::fails(Assignment::new().with("x", x).with("y", y));
            }
        }
    }
    PropFlag::holds()
}

/// Stable, meet-stable, v-unitary and closed under projections; a pass is
/// re-verified against the meet characterization with `U₀ = χ(H)`.
pub fn check_theorem5(alg: &MengerAlgebra, h: &ElementSet) -> Result<Verdict> {
    check_theorem5_with(alg, h, CheckMode::FirstFailure)
}

pub fn check_theorem5_with(alg: &MengerAlgebra, h: &ElementSet, mode: CheckMode) -> Result<Verdict> {
    require_meet(alg)?;
    nonempty(alg, h)?;
    let mut s = Sweep::new(mode);
    let _ = s.check("stable", is_stable_subset(alg, h))
        || s.check("meet-stable", is_meet_stable(alg, h).unwrap())
        || s.check("v-unitary", is_v_unitary(alg, h))
        || s.check("RiH-in-H", projections_into(alg, h, h));
    if !s.failures.is_empty() {
        return Ok(s.finish());
    }
    let u0 = chi(alg).image(h);
    let again = check_theorem4_with(alg, h, &u0, mode)?;
    let failures: Vec<Failure> = if mode == CheckMode::Audit {
        again.failures.clone()
    } else {
        again.failed.iter().map(|c| Failure { condition: c.clone(), witness: again.witness.clone().unwrap() }).collect()
    };
    for f in failures {
        s.failures.push(Failure { condition: format!("theorem4-reverification:{}", f.condition), witness: f.witness });
    }
    s.artifacts.u0 = Some(u0);
    Ok(s.finish())
}

/// Tries every `U ⊇ H` in increasing bitmask order and returns the first
/// one passing the first characterization.
pub fn search_theorem1_u(alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet) -> Result<Option<ElementSet>> {
    nonempty(alg, h)?;
    let g = alg.size();
    if g > U_SEARCH_MAX_SIZE {
        return input(format!("U search is limited to algebras of at most {U_SEARCH_MAX_SIZE} elements"));
    }
    let base: u64 = h.iter().map(|x| 1u64 << x).sum();
    for mask in 0..(1u64 << g) {
        if mask & base != base {
            continue;
        }
        let u = ElementSet::from_mask(g, mask);
        if check_theorem1(alg, tn, h, &u)?.pass {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessMode {
    /// Classes of `E_H ∩ E_U` for `U = C_H[H]`, with `W = G ∖ U`.
    Theorem2,
    /// Classes of `E[U]` with `W = G ∖ U`; `None` takes `U = χ(H)`.
    Theorem4(Option<ElementSet>),
}

/// A representation with `H` as the stabilizer of `point`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub representation: Representation,
    pub point: usize,
    pub u: ElementSet,
    pub equivalence: EquivalenceRelation,
}

pub fn build_witness(alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet, mode: &WitnessMode) -> Result<Witness> {
    let (u, e) = match mode {
        WitnessMode::Theorem2 => {
            let verdict = check_theorem2(alg, tn, h)?;
            if !verdict.pass {
                return Err(refused(&verdict));
            }
            let u = verdict.artifacts.u.clone().unwrap();
            let e = intersect_equivalences(&subset_equivalence(alg, tn, h)?, &subset_equivalence(alg, tn, &u)?)?;
            (u, e)
        }
        WitnessMode::Theorem4(given) => {
            let verdict = match given {
                Some(u) => check_theorem4(alg, h, u)?,
                None => check_theorem5(alg, h)?,
            };
            if !verdict.pass {
                return Err(refused(&verdict));
            }
            let u = given.clone().or_else(|| verdict.artifacts.u0.clone()).unwrap();
            let e = meet_equivalence(alg, &u)
                .map_err(|err| Error::Integrity(format!("E[U] is not an equivalence: {err}")))?;
            (u, e)
        }
    };
    let w = u.complement();
    let rep = simplest_representation(alg, &e, &w)
        .map_err(|err| Error::Integrity(format!("simplest representation: {err}")))?;
    let members = h.to_vec();
    let point = rep
        .classes()
        .and_then(|cs| cs.iter().position(|c| *c == members))
        .ok_or_else(|| Error::Integrity(format!("H = {h} is not a class of the constructed equivalence")))?;
    let stab = representation_stabilizer(&rep, point)?;
    if stab != *h {
        return Err(Error::Integrity(format!("stabilizer of the point is {stab}, expected {h}")));
    }
    let report = verify_representation(alg, &rep)?;
    let mut checks = vec![("srep", &report.srep), ("projections", &report.projections)];
    if matches!(mode, WitnessMode::Theorem4(_)) {
        if let Some(m) = &report.meet {
            checks.push(("meet", m));
        }
    }
    for (name, flag) in checks {
        if let Some(cx) = &flag.counterexample {
            return Err(Error::Integrity(format!("constructed representation violates {name} ({cx})")));
        }
    }
    Ok(Witness { representation: rep, point, u, equivalence: e })
}

/// Sum of the witness representations of every nonempty `H` passing the
/// second characterization (the fifth when there is a meet). Parts whose
/// images repeat an earlier part are dropped, then parts not needed to
/// separate two elements. Fails unless the sum is injective.
pub fn faithful_representation(alg: &MengerAlgebra, tn: &TransformSet) -> Result<Representation> {
    let g = alg.size();
    if g > U_SEARCH_MAX_SIZE {
        return input(format!(
            "faithful representations are searched for algebras of at most {U_SEARCH_MAX_SIZE} elements"
        ));
    }
    let mode = if alg.has_meet() { WitnessMode::Theorem4(None) } else { WitnessMode::Theorem2 };
    let mut parts: Vec<Representation> = Vec::new();
    for mask in 1..(1u64 << g) {
        let h = ElementSet::from_mask(g, mask);
        let pass = if alg.has_meet() { check_theorem5(alg, &h)?.pass } else { check_theorem2(alg, tn, &h)?.pass };
        if !pass {
            continue;
        }
        let rep = build_witness(alg, tn, &h, &mode)?.representation;
        if !parts.iter().any(|p| p.images() == rep.images()) {
            parts.push(rep);
        }
    }
    if parts.is_empty() {
        return Err(Error::Precondition("no subset is a stabilizer candidate".into()));
    }
    let separates = |kept: &[&Representation]| -> Option<(usize, usize)> {
        (0..g)
            .flat_map(|x| (x + 1..g).map(move |y| (x, y)))
            .find(|&(x, y)| kept.iter().all(|p| p.image(x) == p.image(y)))
    };
    let mut kept: Vec<&Representation> = parts.iter().collect();
    if let Some((x, y)) = separates(&kept) {
        return Err(Error::Precondition(format!(
            "{} and {} have the same image in every witness representation",
            alg.label(x),
            alg.label(y)
        )));
    }
    let mut j = 0;
    while j < kept.len() {
        let without: Vec<&Representation> = kept.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, p)| *p).collect();
        if !without.is_empty() && separates(&without).is_none() {
            kept = without;
        } else {
            j += 1;
        }
    }
    let kept: Vec<Representation> = kept.into_iter().cloned().collect();
    sum_representations(&kept)
}

/// A function system isomorphic to `alg`, element `x` named by its label.
pub fn concretize(alg: &MengerAlgebra, tn: &TransformSet) -> Result<FunctionSystem> {
    let rep = faithful_representation(alg, tn)?;
    let named = (0..alg.size()).map(|x| (alg.label(x), rep.image(x).clone())).collect();
    FunctionSystem::from_functions(Carrier::new(rep.carrier())?, alg.arity(), named, alg.has_meet())
}

fn refused(verdict: &Verdict) -> Error {
    Error::Precondition(format!(
        "checker failed at {} ({})",
        verdict.failed.as_deref().unwrap_or("?"),
        verdict.witness.as_ref().map(|w| w.to_string()).unwrap_or_default()
    ))
}

/// Consequences of a passing characterization with sets `H ⊆ U` and the
/// equivalence `E` of the witness construction.
pub fn derived_lemmas(
    alg: &MengerAlgebra,
    h: &ElementSet,
    u: &ElementSet,
    e: &EquivalenceRelation,
) -> Vec<(&'static str, PropFlag)> {
    let le = zeta(alg);
    let sq = chi(alg);
    let upward = |rel: &BinaryRelation, set: &ElementSet| {
        let hit = rel.pairs().into_iter().find(|&(x, y)| set.contains(x) && !set.contains(y));
        PropFlag::from_search(hit.map(|(x, y)| Assignment::new().with("x", x).with("y", y)))
    };
    let outside = u.complement();
    let f6 = projections_into(alg, &outside, &outside);
    let class = if e.class_id_of_set(h).is_some() {
        PropFlag::holds()
    } else {
        let x = h.iter().next().unwrap();
        let y = (0..alg.size()).find(|&y| e.related(x, y) != h.contains(y)).unwrap_or(x);
        PropFlag::fails(Assignment::new().with("x", x).with("y", y))
    };
    vec![
        ("f-4", upward(&le, h)),
        ("f-5", upward(&sq, u)),
        ("f-6", f6),
        ("complement-l-ideal", is_l_ideal(alg, &outside)),
        ("H-is-class", class),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;
    use crate::transforms::{tn_closure, DEFAULT_TRANSFORM_CAP};

    fn set(g: usize, xs: &[usize]) -> ElementSet {
        ElementSet::from_indices(g, xs.iter().copied()).unwrap()
    }

    fn tn(alg: &MengerAlgebra) -> TransformSet {
        tn_closure(alg, DEFAULT_TRANSFORM_CAP).unwrap()
    }

    #[test]
    fn theorem1_on_abs1() {
        let alg = abs1();
        let t = tn(&alg);
        assert!(check_theorem1(&alg, &t, &set(3, &[0, 1]), &ElementSet::full(3)).unwrap().pass);
        let v = check_theorem1(&alg, &t, &set(3, &[1, 2]), &ElementSet::full(3)).unwrap();
        assert_eq!(v.failed.as_deref(), Some("l-unitary"));
        assert_eq!(v.witness, Some(Assignment::new().with("x", 0).with("y", 1)));
        assert!(check_theorem1(&alg, &t, &ElementSet::full(3), &ElementSet::full(3)).unwrap().pass);
        assert!(check_theorem1(&alg, &t, &set(3, &[0, 1]), &set(3, &[0])).is_err());
    }

    #[test]
    fn theorem2_on_abs1() {
        let alg = abs1();
        let t = tn(&alg);
        let v = check_theorem2(&alg, &t, &set(3, &[0, 1])).unwrap();
        assert!(v.pass);
        assert_eq!(v.artifacts.u, Some(ElementSet::full(3)));
        assert_eq!(v.artifacts.stages.as_ref().unwrap().len(), 2);
        let v = check_theorem2(&alg, &t, &set(3, &[1])).unwrap();
        assert_eq!(v.failed.as_deref(), Some("l-unitary"));
        assert!(check_theorem2(&alg, &t, &set(3, &[0])).unwrap().pass);
        let v = check_theorem2(&alg, &t, &set(3, &[1, 2])).unwrap();
        assert_eq!(v.failed.as_deref(), Some("l-unitary"));
        assert_eq!(v.witness, Some(Assignment::new().with("x", 0).with("y", 1)));
    }

    #[test]
    fn audit_mode_lists_every_failure() {
        let alg = abs1();
        let t = tn(&alg);
        let v = check_theorem1_with(&alg, &t, &set(3, &[1, 2]), &set(3, &[1, 2]), CheckMode::Audit).unwrap();
        assert!(!v.pass);
        assert!(v.failures.len() >= 2);
        assert_eq!(v.failed.as_deref(), Some(v.failures[0].condition.as_str()));
    }

    #[test]
    fn theorem3_agrees_with_theorem2_on_abs1() {
        let alg = abs1();
        let t = tn(&alg);
        for mask in 1..8u64 {
            let h = ElementSet::from_mask(3, mask);
            let two = check_theorem2(&alg, &t, &h).unwrap();
            let fixpoint = two.artifacts.stages.as_ref().map_or(0, |s| s.len() - 1);
            let m = fixpoint.max(1);
            let three = check_theorem3(&alg, &t, &h, m).unwrap();
            assert_eq!(two.pass, three.pass, "H = {h}");
        }
        assert!(check_theorem3(&alg, &t, &set(3, &[0, 1]), 1).unwrap().pass);
        assert!(check_theorem3(&alg, &t, &set(3, &[0, 1]), 0).is_err());
    }

    #[test]
    fn theorem4_and_5_on_abs1_meet() {
        let alg = abs1_meet();
        let h = set(8, &[0, 1, 3]);
        let u0 = chi(&alg).image(&h);
        assert_eq!(u0.to_vec(), vec![0, 1, 2, 3, 5]);
        assert!(check_theorem4(&alg, &h, &u0).unwrap().pass);
        let v = check_theorem5(&alg, &h).unwrap();
        assert!(v.pass);
        assert_eq!(v.artifacts.u0, Some(u0));
        let v = check_theorem5(&alg, &set(8, &[0, 1])).unwrap();
        assert_eq!(v.failed.as_deref(), Some("meet-stable"));
        let v = check_theorem4(&alg, &set(8, &[1]), &ElementSet::full(8)).unwrap();
        assert_eq!(v.failed.as_deref(), Some("v-unitary"));
        assert!(check_theorem4(&alg, &ElementSet::full(8), &ElementSet::full(8)).unwrap().pass);
        let v = check_theorem5(&alg, &ElementSet::full(8)).unwrap();
        assert!(v.pass && v.artifacts.u0 == Some(ElementSet::full(8)));
        assert!(check_theorem4(&abs1(), &set(3, &[0]), &ElementSet::full(3)).is_err());
    }

    #[test]
    fn witness_theorem2_on_abs1() {
        let alg = abs1();
        let t = tn(&alg);
        let h = set(3, &[0, 1]);
        let w = build_witness(&alg, &t, &h, &WitnessMode::Theorem2).unwrap();
        let rep = &w.representation;
        assert_eq!(rep.image(0), &unary(&[(0, 0), (1, 1)]));
        assert_eq!(rep.image(1), &unary(&[(0, 0), (1, 0)]));
        assert_eq!(rep.image(2), &unary(&[(0, 1), (1, 1)]));
        assert_eq!(w.point, 0);
        assert_eq!(representation_stabilizer(rep, w.point).unwrap(), h);
        assert!(build_witness(&alg, &t, &set(3, &[1, 2]), &WitnessMode::Theorem2).is_err());
    }

    #[test]
    fn witness_theorem4_on_abs1_meet() {
        let alg = abs1_meet();
        let t = tn(&alg);
        let h = set(8, &[0, 1, 3]);
        let w = build_witness(&alg, &t, &h, &WitnessMode::Theorem4(None)).unwrap();
        assert_eq!(representation_stabilizer(&w.representation, w.point).unwrap(), h);
        assert_eq!(w.equivalence.classes(), &[vec![0, 1, 3], vec![2, 5], vec![4, 6, 7]]);
        let u = chi(&alg).image(&h);
        let again = build_witness(&alg, &t, &h, &WitnessMode::Theorem4(Some(u))).unwrap();
        assert_eq!(again.representation, w.representation);
    }

    #[test]
    fn theorem1_u_search() {
        let alg = abs1();
        let t = tn(&alg);
        let u = search_theorem1_u(&alg, &t, &set(3, &[0, 1])).unwrap().unwrap();
        assert!(check_theorem1(&alg, &t, &set(3, &[0, 1]), &u).unwrap().pass);
        assert_eq!(search_theorem1_u(&alg, &t, &set(3, &[1, 2])).unwrap(), None);
    }

    #[test]
    fn lemmas_hold_for_abs1_witnesses() {
        let alg = abs1_meet();
        let t = tn(&alg);
        let h = set(8, &[0, 1, 3]);
        let w = build_witness(&alg, &t, &h, &WitnessMode::Theorem4(None)).unwrap();
        for (name, flag) in derived_lemmas(&alg, &h, &w.u, &w.equivalence) {
            assert!(flag.holds, "{name}");
        }
    }

    #[test]
    fn concretize_round_trips_fixtures() {
        for alg in [abs1(), abs1_meet()] {
            let t = tn(&alg);
            let rep = faithful_representation(&alg, &t).unwrap();
            assert!(verify_representation(&alg, &rep).unwrap().all_hold());
            let sys = concretize(&alg, &t).unwrap();
            let back = crate::algebra::abstractify(&sys).unwrap();
            assert_eq!(back, alg);
        }
    }
}
