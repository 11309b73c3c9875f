//! Closure-type properties of subsets of an algebra.

use serde::Serialize;

use super::MengerAlgebra;
use crate::assignment::{Assignment, PropFlag};
use crate::error::{input, Result};
use crate::set::ElementSet;
use crate::tuples::first_violation;

/// `x ∈ H → x[x .. x] ∈ H`.
pub fn is_quasi_stable(alg: &MengerAlgebra, h: &ElementSet) -> PropFlag {
    let hit = h.iter().find(|&x| !h.contains(alg.compose(x, &vec![x; alg.arity()])));
    PropFlag::from_search(hit.map(|x| Assignment::new().with("x", x)))
}

/// `x ∈ H → x[x .. x] ∧ x ∈ H`; `None` without a meet.
pub fn is_meet_quasi_stable(alg: &MengerAlgebra, h: &ElementSet) -> Option<PropFlag> {
    alg.meet_table()?;
    let hit = h.iter().find(|&x| {
        let d = alg.compose(x, &vec![x; alg.arity()]);
        !h.contains(alg.meet(d, x).unwrap())
    });
    Some(PropFlag::from_search(hit.map(|x| Assignment::new().with("x", x))))
}

/// `x, y_1 .. y_n ∈ H → x[ȳ] ∈ H`.
pub fn is_stable_subset(alg: &MengerAlgebra, h: &ElementSet) -> PropFlag {
    let members = h.to_vec();
    let hit = first_violation(&vec![members.len(); alg.arity() + 1], |t| {
        let ys: Vec<usize> = t[1..].iter().map(|&j| members[j]).collect();
        h.contains(alg.compose(members[t[0]], &ys))
    });
    PropFlag::from_search(hit.map(|t| {
        let ys: Vec<usize> = t[1..].iter().map(|&j| members[j]).collect();
        Assignment::new().with("x", members[t[0]]).with_tuple("y", &ys)
    }))
}

/// `x, y ∈ H → x ∧ y ∈ H`; `None` without a meet.
pub fn is_meet_stable(alg: &MengerAlgebra, h: &ElementSet) -> Option<PropFlag> {
    alg.meet_table()?;
    let members = h.to_vec();
    let hit = first_violation(&[members.len(), members.len()], |t| {
        h.contains(alg.meet(members[t[0]], members[t[1]]).unwrap())
    });
    Some(PropFlag::from_search(hit.map(|t| Assignment::new().with("x", members[t[0]]).with("y", members[t[1]]))))
}

/// `x[y .. y] ∈ H ∧ y ∈ H → x ∈ H`.
pub fn is_l_unitary(alg: &MengerAlgebra, h: &ElementSet) -> PropFlag {
    let g = alg.size();
    let n = alg.arity();
    let hit = first_violation(&[g, g], |t| {
        let (x, y) = (t[0], t[1]);
        !(h.contains(y) && h.contains(alg.compose(x, &vec![y; n]))) || h.contains(x)
    });
    PropFlag::from_search(hit.map(|t| Assignment::new().with("x", t[0]).with("y", t[1])))
}

/// `x[ȳ] ∈ H ∧ y_1 .. y_n ∈ H → x ∈ H`.
pub fn is_v_unitary(alg: &MengerAlgebra, h: &ElementSet) -> PropFlag {
    let members = h.to_vec();
    let mut bases = vec![members.len(); alg.arity() + 1];
    bases[0] = alg.size();
    let mut ys = vec![0usize; alg.arity()];
    let hit = first_violation(&bases, |t| {
        for (j, &k) in t[1..].iter().enumerate() {
            ys[j] = members[k];
        }
        h.contains(t[0]) || !h.contains(alg.compose(t[0], &ys))
    });
    PropFlag::from_search(hit.map(|t| {
        let ys: Vec<usize> = t[1..].iter().map(|&j| members[j]).collect();
        Assignment::new().with("x", t[0]).with_tuple("y", &ys)
    }))
}

/// Some `y_i ∈ H → x[ȳ] ∈ H`.
pub fn is_l_ideal(alg: &MengerAlgebra, h: &ElementSet) -> PropFlag {
    let g = alg.size();
    let hit = first_violation(&vec![g; alg.arity() + 1], |t| {
        !t[1..].iter().any(|&y| h.contains(y)) || h.contains(alg.compose(t[0], &t[1..]))
    });
    PropFlag::from_search(hit.map(|t| Assignment::new().with("x", t[0]).with_tuple("y", &t[1..])))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetReport {
    pub quasi_stable: PropFlag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meet_quasi_stable: Option<PropFlag>,
    pub stable: PropFlag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meet_stable: Option<PropFlag>,
    pub l_unitary: PropFlag,
    pub v_unitary: PropFlag,
    pub l_ideal: PropFlag,
}

pub fn subset_props(alg: &MengerAlgebra, h: &ElementSet) -> Result<SubsetReport> {
    h.check_universe(alg.size(), "subset")?;
    if h.is_empty() {
        return input("subset must be nonempty");
    }
    Ok(SubsetReport {
        quasi_stable: is_quasi_stable(alg, h),
        meet_quasi_stable: is_meet_quasi_stable(alg, h),
        stable: is_stable_subset(alg, h),
        meet_stable: is_meet_stable(alg, h),
        l_unitary: is_l_unitary(alg, h),
        v_unitary: is_v_unitary(alg, h),
        l_ideal: is_l_ideal(alg, h),
    })
}
