//! Exhaustive verification of the functional Menger system axioms.

use rustc_hash::FxHashMap as HashMap;

use serde::Serialize;

use super::{ColumnClasses, MengerAlgebra};
use crate::assignment::Assignment;
use crate::tuples::{decode, first_violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    /// Idempotence, commutativity and associativity of the meet.
    #[serde(rename = "SL")]
    Semilattice,
}

impl Axiom {
    pub const ALL: [Axiom; 11] = [
        Axiom::A1,
        Axiom::A2,
        Axiom::A3,
        Axiom::A4,
        Axiom::A5,
        Axiom::A6,
        Axiom::A7,
        Axiom::A8,
        Axiom::A9,
        Axiom::A10,
        Axiom::Semilattice,
    ];

    pub fn needs_meet(self) -> bool {
        matches!(self, Axiom::A8 | Axiom::A9 | Axiom::A10 | Axiom::Semilattice)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub status: AxiomStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Assignment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn get(&self, axiom: Axiom) -> &AxiomResult {
        self.results.iter().find(|r| r.axiom == axiom).expect("every axiom is reported")
    }

    pub fn passes(&self, axiom: Axiom) -> bool {
        self.get(axiom).status == AxiomStatus::Pass
    }

    /// A1–A7 hold.
    pub fn menger_system(&self) -> bool {
        Axiom::ALL.iter().filter(|a| !a.needs_meet()).all(|&a| self.passes(a))
    }

    /// No applicable axiom failed.
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.status != AxiomStatus::Fail)
    }

    pub fn first_failure(&self) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.status == AxiomStatus::Fail)
    }
}

/// Checks A1–A10 (and the semilattice laws when a meet is present) by
/// exhaustive quantification. Counterexamples are lexicographically least
/// in the variable order of the reported assignment.
pub fn check_axioms(alg: &MengerAlgebra) -> AxiomReport {
    let results = Axiom::ALL
        .iter()
        .map(|&axiom| {
            if axiom.needs_meet() && !alg.has_meet() {
                return AxiomResult { axiom, status: AxiomStatus::NotApplicable, counterexample: None };
            }
            match find_violation(alg, axiom) {
                None => AxiomResult { axiom, status: AxiomStatus::Pass, counterexample: None },
                Some(c) => AxiomResult { axiom, status: AxiomStatus::Fail, counterexample: Some(c) },
            }
        })
        .collect();
    AxiomReport { results }
}

fn rvec(alg: &MengerAlgebra, y: usize) -> Vec<usize> {
    (1..=alg.arity()).map(|i| alg.proj(i, y)).collect()
}

fn find_violation(alg: &MengerAlgebra, axiom: Axiom) -> Option<Assignment> {
    let g = alg.size();
    let n = alg.arity();
    let meet = |x: usize, y: usize| alg.meet(x, y).expect("meet axioms only run with a meet table");
    match axiom {
        Axiom::A1 => {
            if superassociative_fast(alg) {
                return None;
            }
            first_violation(&vec![g; 2 * n + 1], |t| {
                let (x, rest) = (t[0], &t[1..]);
                let (ys, zs) = rest.split_at(n);
                let inner: Vec<usize> = ys.iter().map(|&y| alg.compose(y, zs)).collect();
                alg.compose(alg.compose(x, ys), zs) == alg.compose(x, &inner)
            })
            .map(|t| Assignment::new().with("x", t[0]).with_tuple("y", &t[1..=n]).with_tuple("z", &t[n + 1..]))
        }
        Axiom::A2 => {
            first_violation(&[g], |t| alg.restrict(t[0], t[0]) == t[0]).map(|t| Assignment::new().with("x", t[0]))
        }
        Axiom::A3 => {
            if restriction_transfer_fast(alg) {
                return None;
            }
            let mut bases = vec![g; n + 2];
            bases.push(n);
            first_violation(&bases, |t| {
                let x = t[0];
                let free = &t[1..n];
                let (z, y, i) = (t[n], t[n + 1], t[n + 2] + 1);
                alg.restrict(alg.plug(x, free, i, z), y) == alg.plug(x, free, i, alg.restrict(z, y))
            })
            .map(|t| {
                Assignment::new()
                    .with("x", t[0])
                    .with_tuple("u", &t[1..n])
                    .with("z", t[n])
                    .with("y", t[n + 1])
                    .with("i", t[n + 2] + 1)
            })
        }
        Axiom::A4 => first_violation(&[g, g, n], |t| {
            let (x, y, i) = (t[0], t[1], t[2] + 1);
            alg.proj(i, alg.restrict(x, y)) == alg.restrict(alg.proj(i, x), y)
        })
        .map(|t| Assignment::new().with("x", t[0]).with("y", t[1]).with("i", t[2] + 1)),
        Axiom::A5 => first_violation(&[g, g, g], |t| {
            let (x, y, z) = (t[0], t[1], t[2]);
            alg.restrict(alg.restrict(x, y), z) == alg.restrict(alg.restrict(x, z), y)
        })
        .map(|t| Assignment::new().with("x", t[0]).with("y", t[1]).with("z", t[2])),
        Axiom::A6 => {
            let mut bases = vec![g; n + 1];
            bases.extend([n, n]);
            first_violation(&bases, |t| {
                let (x, ys) = (t[0], &t[1..=n]);
                let (i, k) = (t[n + 1] + 1, t[n + 2] + 1);
                alg.proj(i, alg.compose(x, ys)) == alg.proj(i, alg.compose(alg.proj(k, x), ys))
            })
            .map(|t| {
                Assignment::new()
                    .with("x", t[0])
                    .with_tuple("y", &t[1..=n])
                    .with("i", t[n + 1] + 1)
                    .with("k", t[n + 2] + 1)
            })
        }
        Axiom::A7 => {
            let mut bases = vec![g; n + 1];
            bases.push(n);
            first_violation(&bases, |t| {
                let (x, ys, i) = (t[0], &t[1..=n], t[n + 1] + 1);
                let xy = alg.compose(x, ys);
                alg.compose(alg.proj(i, x), ys) == alg.compose(ys[i - 1], &rvec(alg, xy))
            })
            .map(|t| Assignment::new().with("x", t[0]).with_tuple("y", &t[1..=n]).with("i", t[n + 1] + 1))
        }
        Axiom::A8 => first_violation(&[g, g, g], |t| {
            let (x, y, z) = (t[0], t[1], t[2]);
            meet(x, alg.restrict(y, z)) == alg.restrict(meet(x, y), z)
        })
        .map(|t| Assignment::new().with("x", t[0]).with("y", t[1]).with("z", t[2])),
        Axiom::A9 => first_violation(&[g, g], |t| {
            let (x, y) = (t[0], t[1]);
            meet(x, y) == alg.restrict(x, meet(x, y))
        })
        .map(|t| Assignment::new().with("x", t[0]).with("y", t[1])),
        Axiom::A10 if meet_distributes_fast(alg) => None,
        Axiom::A10 => first_violation(&vec![g; n + 2], |t| {
            let (x, y, zs) = (t[0], t[1], &t[2..]);
            alg.compose(meet(x, y), zs) == meet(alg.compose(x, zs), alg.compose(y, zs))
        })
        .map(|t| Assignment::new().with("x", t[0]).with("y", t[1]).with_tuple("z", &t[2..])),
        Axiom::Semilattice => first_violation(&[g, g, g], |t| {
            let (x, y, z) = (t[0], t[1], t[2]);
            meet(x, x) == x && meet(x, y) == meet(y, x) && meet(meet(x, y), z) == meet(x, meet(y, z))
        })
        .map(|t| Assignment::new().with("x", t[0]).with("y", t[1]).with("z", t[2])),
    }
}

/// Column maps `x ↦ x[ȳ]` with memoized composition of their classes.
struct Composer {
    classes: ColumnClasses,
    dense: Option<Vec<u32>>,
    sparse: HashMap<(u32, u32), u32>,
}

const NO_CLASS: u32 = u32::MAX;

impl Composer {
    fn new(alg: &MengerAlgebra) -> Self {
        let classes = ColumnClasses::new(alg);
        let k = classes.maps.len();
        let dense = (k * k <= 1 << 22).then(|| vec![NO_CLASS - 1; k * k]);
        Composer { classes, dense, sparse: HashMap::default() }
    }

    /// Class of `M_outer ∘ M_inner`, or `NO_CLASS` when that map is no column.
    fn compose(&mut self, outer: u32, inner: u32) -> u32 {
        let k = self.classes.maps.len();
        let maps = &self.classes.maps;
        let ids = &self.classes.ids;
        let compute = || {
            let col: Vec<usize> = maps[inner as usize].iter().map(|&v| maps[outer as usize][v]).collect();
            ids.get(&col).copied().unwrap_or(NO_CLASS)
        };
        match &mut self.dense {
            Some(table) => {
                let slot = &mut table[outer as usize * k + inner as usize];
                if *slot == NO_CLASS - 1 {
                    *slot = compute();
                }
                *slot
            }
            None => *self.sparse.entry((outer, inner)).or_insert_with(compute),
        }
    }
}

/// Decides A1 without enumerating `x`.
///
/// For a fixed tuple `ȳ` let `M_ȳ` be the column map `x ↦ x[ȳ]`. A1 says
/// `M_z̄ ∘ M_ȳ = M_{ȳ[z̄]}` for all `ȳ, z̄`.
fn superassociative_fast(alg: &MengerAlgebra) -> bool {
    let g = alg.size();
    let n = alg.arity();
    let m = alg.columns();
    let mut comp = Composer::new(alg);
    let mut ys = vec![0usize; n];
    for ty in 0..m {
        decode(g, ty, &mut ys);
        let cy = comp.classes.class_of[ty];
        for tz in 0..m {
            let w = ys.iter().fold(0, |acc, &y| acc * g + alg.compose_coded(y, tz));
            let cz = comp.classes.class_of[tz];
            if comp.compose(cz, cy) != comp.classes.class_of[w] {
                return false;
            }
        }
    }
    true
}

/// Decides A3 without enumerating `x`: with `c = (w̄|_i z)` it says
/// `M_{R̄y} ∘ M_c = M_{(w̄|_i z[R̄y])}`.
fn restriction_transfer_fast(alg: &MengerAlgebra) -> bool {
    let g = alg.size();
    let n = alg.arity();
    let mut comp = Composer::new(alg);
    let restrictor: Vec<usize> = (0..g).map(|y| (1..=n).fold(0, |acc, i| acc * g + alg.proj(i, y))).collect();
    let mut free = vec![0usize; n - 1];
    for code in 0..g.pow((n - 1) as u32) {
        decode(g, code, &mut free);
        for i in 1..=n {
            let (before, after) = free.split_at(i - 1);
            let plug = |z: usize| before.iter().chain(std::iter::once(&z)).chain(after).fold(0, |acc, &v| acc * g + v);
            for z in 0..g {
                let inner = comp.classes.class_of[plug(z)];
                for (y, &r) in restrictor.iter().enumerate() {
                    let outer = comp.classes.class_of[r];
                    if comp.compose(outer, inner) != comp.classes.class_of[plug(alg.restrict(z, y))] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Decides A10 once per distinct column map.
fn meet_distributes_fast(alg: &MengerAlgebra) -> bool {
    let g = alg.size();
    let meet = |x: usize, y: usize| alg.meet(x, y).expect("A10 runs with a meet table");
    ColumnClasses::new(alg)
        .maps
        .iter()
        .all(|col| (0..g).all(|x| (0..g).all(|y| col[meet(x, y)] == meet(col[x], col[y]))))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn abs1_satisfies_a1_to_a7() {
        let report = check_axioms(&abs1());
        assert!(report.menger_system());
        assert_eq!(report.get(Axiom::A8).status, AxiomStatus::NotApplicable);
        assert!(report.all_pass());
    }

    #[test]
    fn abs1_meet_satisfies_everything() {
        let report = check_axioms(&abs1_meet());
        for r in &report.results {
            assert_eq!(r.status, AxiomStatus::Pass, "{:?}", r.axiom);
        }
    }

    #[test]
    fn corrupted_entry_is_caught() {
        // rebind id[c0] to c1
        let bad = abs1().with_op_entry(0, &[1], 2).unwrap();
        let report = check_axioms(&bad);
        assert!(!report.menger_system());
        // A1-A6 survive this mutation; the first failure is A7 at x=id, y=c0:
        // (R_1 id)[c0] = id[c0] = c1 while c0[R_1(id[c0])] = c0[id] = c0
        let first = report.first_failure().unwrap();
        assert_eq!(first.axiom, Axiom::A7);
        let expected = Assignment::new().with("x", 0).with("y1", 1).with("i", 1);
        assert_eq!(first.counterexample.as_ref(), Some(&expected));
    }

    #[test]
    fn fast_paths_agree_with_naive_on_mutants() {
        let base = abs1_meet();
        for x in 0..base.size() {
            for y in 0..base.size() {
                for v in [0, 3, 7] {
                    let alg = base.with_op_entry(x, &[y], v).unwrap();
                    let naive = first_violation(&[8, 8, 8], |t| {
                        alg.compose(alg.compose(t[0], &[t[1]]), &[t[2]])
                            == alg.compose(t[0], &[alg.compose(t[1], &[t[2]])])
                    });
                    assert_eq!(superassociative_fast(&alg), naive.is_none());
                    let naive_a3 = first_violation(&[8, 8, 8], |t| {
                        let (x, z, y) = (t[0], t[1], t[2]);
                        alg.restrict(alg.compose(x, &[z]), y) == alg.compose(x, &[alg.restrict(z, y)])
                    });
                    assert_eq!(restriction_transfer_fast(&alg), naive_a3.is_none());
                    let naive_a10 = first_violation(&[8, 8, 8], |t| {
                        let m = |a, b| alg.meet(a, b).unwrap();
                        alg.compose(m(t[0], t[1]), &[t[2]]) == m(alg.compose(t[0], &[t[2]]), alg.compose(t[1], &[t[2]]))
                    });
                    assert_eq!(meet_distributes_fast(&alg), naive_a10.is_none());
                }
            }
        }
    }
}
