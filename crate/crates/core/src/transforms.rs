//! The transformation set `T_n(G)`, the closure operator `C_H` and the
//! equivalences built from them.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use serde::Serialize;

use crate::algebra::{chi, zeta, BinaryRelation, MengerAlgebra};
use crate::assignment::{Assignment, PropFlag};
use crate::equivalence::EquivalenceRelation;
use crate::error::{input, Error, Result};
use crate::set::ElementSet;

pub const DEFAULT_TRANSFORM_CAP: usize = 100_000;
pub const DEFAULT_MAX_STAGE: usize = 3;

/// Unary self-maps of `G` given extensionally. Index 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformSet {
    size: usize,
    maps: Vec<Vec<usize>>,
}

impl TransformSet {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    #[inline]
    pub fn apply(&self, t: usize, x: usize) -> usize {
        self.maps[t][x]
    }

    pub fn contains_map(&self, map: &[usize]) -> bool {
        self.maps.iter().any(|m| m == map)
    }
}

/// Generators of `T_n(G)` as maps on `G`: contexts `z ↦ u[w̄|_i z]` in
/// `(u, w̄, i)` order, then `R_1 .. R_n`.
fn generator_maps(alg: &MengerAlgebra) -> Vec<Vec<usize>> {
    let mut out = alg.context_maps();
    let mut seen: HashSet<Vec<usize>> = out.iter().cloned().collect();
    for i in 1..=alg.arity() {
        let r: Vec<usize> = (0..alg.size()).map(|x| alg.proj(i, x)).collect();
        if seen.insert(r.clone()) {
            out.push(r);
        }
    }
    out
}

/// Least set of maps containing the identity and closed under composition
/// with the generators.
///
/// Generators are taken in order; one already in the set is skipped, and
/// an accepted one is applied to every earlier map before the new maps
/// are closed breadth first under all accepted generators.
pub fn tn_closure(alg: &MengerAlgebra, cap: usize) -> Result<TransformSet> {
    let g = alg.size();
    let identity: Vec<usize> = (0..g).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::default();
    let mut maps = vec![identity.clone()];
    seen.insert(identity);
    let mut accepted: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for c in generator_maps(alg) {
        if seen.contains(&c) {
            continue;
        }
        for t in 0..maps.len() {
            let next: Vec<usize> = maps[t].iter().map(|&v| c[v]).collect();
            admit(next, &mut seen, &mut maps, &mut queue, cap)?;
        }
        accepted.push(c);
        while let Some(t) = queue.pop_front() {
            for c in &accepted {
                let next: Vec<usize> = maps[t].iter().map(|&v| c[v]).collect();
                admit(next, &mut seen, &mut maps, &mut queue, cap)?;
            }
        }
    }
    Ok(TransformSet { size: g, maps })
}

fn admit(
    next: Vec<usize>,
    seen: &mut HashSet<Vec<usize>>,
    maps: &mut Vec<Vec<usize>>,
    queue: &mut VecDeque<usize>,
    cap: usize,
) -> Result<()> {
    if seen.contains(&next) {
        return Ok(());
    }
    if maps.len() >= cap {
        return Err(Error::TransformCap { cap });
    }
    seen.insert(next.clone());
    queue.push_back(maps.len());
    maps.push(next);
    Ok(())
}

fn check_transforms(alg: &MengerAlgebra, tn: &TransformSet) -> Result<()> {
    if tn.size() != alg.size() {
        return input("transform set belongs to a different algebra");
    }
    Ok(())
}

fn nonempty(alg: &MengerAlgebra, h: &ElementSet, what: &str) -> Result<()> {
    h.check_universe(alg.size(), what)?;
    if h.is_empty() {
        return input(format!("{what} must be nonempty"));
    }
    Ok(())
}

/// `x, y ∈ H ∧ t(x) ∈ H → t(y) ∈ H`. The witness binds `t` to the index
/// of the map in `tn`.
pub fn is_normal_v_complex(alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet) -> Result<PropFlag> {
    nonempty(alg, h, "subset")?;
    check_transforms(alg, tn)?;
    let members = h.to_vec();
    for &x in &members {
        for &y in &members {
            for t in 0..tn.len() {
                if h.contains(tn.apply(t, x)) && !h.contains(tn.apply(t, y)) {
                    return Ok(PropFlag::fails(Assignment::new().with("x", x).with("y", y).with("t", t)));
                }
            }
        }
    }
    Ok(PropFlag::holds())
}

/// `x ≡ y` iff `t(x) ∈ S ↔ t(y) ∈ S` for every `t`.
pub fn subset_equivalence(alg: &MengerAlgebra, tn: &TransformSet, s: &ElementSet) -> Result<EquivalenceRelation> {
    s.check_universe(alg.size(), "subset")?;
    check_transforms(alg, tn)?;
    Ok(EquivalenceRelation::from_signature(
        (0..alg.size()).map(|x| tn.maps().iter().map(|m| s.contains(m[x])).collect::<Vec<bool>>()),
    ))
}

/// Premise `a ≤ b ∨ a, b ∈ H` as a dense matrix.
fn premise(h: &ElementSet, le: &BinaryRelation) -> BinaryRelation {
    BinaryRelation::from_fn(le.size(), |a, b| le.contains(a, b) || (h.contains(a) && h.contains(b)))
}

/// Precomputed ζ, χ and premise for repeated `C_H` steps.
pub struct StageEngine<'a> {
    alg: &'a MengerAlgebra,
    tn: &'a TransformSet,
    premise: BinaryRelation,
    chi: BinaryRelation,
}

/// The stages `X = C⁰ ⊆ C¹ ⊆ ..` up to the first repeat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StagedClosure {
    pub closure: ElementSet,
    pub stages: Vec<ElementSet>,
}

impl StagedClosure {
    /// Index of the first stage equal to the closure.
    pub fn fixpoint_stage(&self) -> usize {
        self.stages.iter().position(|s| *s == self.closure).unwrap_or(0)
    }

    /// Stage `m`, which equals the closure past the fixpoint.
    pub fn stage(&self, m: usize) -> &ElementSet {
        self.stages.get(m).unwrap_or(&self.closure)
    }
}

impl<'a> StageEngine<'a> {
    pub fn new(alg: &'a MengerAlgebra, tn: &'a TransformSet, h: &ElementSet) -> Result<Self> {
        nonempty(alg, h, "H")?;
        check_transforms(alg, tn)?;
        let le = zeta(alg);
        Ok(StageEngine { alg, tn, premise: premise(h, &le), chi: chi(alg) })
    }

    pub fn chi(&self) -> &BinaryRelation {
        &self.chi
    }

    #[inline]
    fn premise(&self, a: usize, b: usize) -> bool {
        self.premise.contains(a, b)
    }

    /// `{ c | a ≤ b ∨ a, b ∈ H, t(a) ⊏ c, a ∈ X, t(b) ∈ X }`.
    pub fn step(&self, x: &ElementSet) -> Result<ElementSet> {
        nonempty(self.alg, x, "X")?;
        let g = self.alg.size();
        let mut sources = ElementSet::empty(g);
        for t in 0..self.tn.len() {
            for a in x.iter() {
                let ta = self.tn.apply(t, a);
                if sources.contains(ta) {
                    continue;
                }
                if (0..g).any(|b| self.premise(a, b) && x.contains(self.tn.apply(t, b))) {
                    sources.insert(ta);
                }
            }
        }
        Ok(self.chi.image(&sources))
    }

    pub fn closure(&self, x: &ElementSet) -> Result<StagedClosure> {
        let mut stages = vec![x.clone()];
        loop {
            let next = self.step(stages.last().unwrap())?;
            if next == *stages.last().unwrap() {
                return Ok(StagedClosure { closure: next, stages });
            }
            stages.push(next);
        }
    }

    /// Decides the unfolded condition system for `g ∈ C^m(X)` by top-down
    /// search over the binary condition tree.
    ///
    /// Node `k` asks for `a_k, b_k, t_k` with the premise on `(a_k, b_k)`
    /// and `t_k(a_k) ⊏ target`. The root's target is `g`; node `2k` has
    /// target `a_k` and node `2k + 1` target `t_k(b_k)`. Nodes at depth
    /// `m` require `a_k, t_k(b_k) ∈ X` instead of children.
    pub fn stage_condition(&self, x: &ElementSet, m: usize, g: usize, max_stage: usize) -> Result<bool> {
        nonempty(self.alg, x, "X")?;
        if m < 1 {
            return input("stage must be at least 1");
        }
        if m > max_stage {
            return input(format!("stage {m} exceeds the configured bound {max_stage}"));
        }
        if g >= self.alg.size() {
            return input(format!("element {g} out of range"));
        }
        let mut memo = HashMap::default();
        Ok(self.node(x, 1, m, g, &mut memo))
    }

    fn node(
        &self,
        x: &ElementSet,
        k: usize,
        m: usize,
        target: usize,
        memo: &mut HashMap<(usize, usize), bool>,
    ) -> bool {
        if let Some(&v) = memo.get(&(k, target)) {
            return v;
        }
        let leaf = k >= 1 << (m - 1);
        let size = self.alg.size();
        let mut found = false;
        'search: for t in 0..self.tn.len() {
            for a in 0..size {
                if !self.chi.contains(self.tn.apply(t, a), target) {
                    continue;
                }
                if leaf && !x.contains(a) {
                    continue;
                }
                for b in 0..size {
                    if !self.premise(a, b) {
                        continue;
                    }
                    let tb = self.tn.apply(t, b);
                    let ok = if leaf {
                        x.contains(tb)
                    } else {
                        self.node(x, 2 * k, m, a, memo) && self.node(x, 2 * k + 1, m, tb, memo)
                    };
                    if ok {
                        found = true;
                        break 'search;
                    }
                }
            }
        }
        memo.insert((k, target), found);
        found
    }
}

pub fn ch_step(alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet, x: &ElementSet) -> Result<ElementSet> {
    StageEngine::new(alg, tn, h)?.step(x)
}

pub fn ch_closure(alg: &MengerAlgebra, tn: &TransformSet, h: &ElementSet, x: &ElementSet) -> Result<StagedClosure> {
    StageEngine::new(alg, tn, h)?.closure(x)
}

pub fn stage_condition(
    alg: &MengerAlgebra,
    tn: &TransformSet,
    h: &ElementSet,
    x: &ElementSet,
    m: usize,
    g: usize,
) -> Result<bool> {
    StageEngine::new(alg, tn, h)?.stage_condition(x, m, g, DEFAULT_MAX_STAGE)
}

/// `g₁ ~ g₂` iff `g₁ ∧ g₂ ∈ U` or both lie outside `U`.
pub fn meet_equivalence(alg: &MengerAlgebra, u: &ElementSet) -> Result<EquivalenceRelation> {
    u.check_universe(alg.size(), "U")?;
    if !alg.has_meet() {
        return Err(Error::Precondition("the algebra has no meet".into()));
    }
    let rel = BinaryRelation::from_fn(alg.size(), |x, y| {
        u.contains(alg.meet(x, y).unwrap()) || (!u.contains(x) && !u.contains(y))
    });
    match EquivalenceRelation::from_relation(&rel) {
        Err(Error::Input(msg)) => Err(Error::Precondition(msg)),
        other => other,
    }
}
