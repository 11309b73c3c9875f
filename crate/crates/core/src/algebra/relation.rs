//! Binary relations on an algebra: the relations ζ and χ and the
//! compatibility properties of a relation with composition.

use fixedbitset::FixedBitSet;
use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use serde::Serialize;

use super::{ColumnClasses, MengerAlgebra};
use crate::assignment::{Assignment, PropFlag};
use crate::set::ElementSet;
use crate::tuples::{decode, encode, first_violation};

/// A relation on `0..size` stored as a dense boolean matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryRelation {
    size: usize,
    bits: Vec<bool>,
}

impl BinaryRelation {
    pub fn empty(size: usize) -> Self {
        BinaryRelation { size, bits: vec![false; size * size] }
    }

    pub fn full(size: usize) -> Self {
        BinaryRelation { size, bits: vec![true; size * size] }
    }

    pub fn identity(size: usize) -> Self {
        Self::from_fn(size, |x, y| x == y)
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(size * size);
        for x in 0..size {
            for y in 0..size {
                bits.push(f(x, y));
            }
        }
        BinaryRelation { size, bits }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.size + y]
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.bits[x * self.size + y] = true;
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.size {
            for y in 0..self.size {
                if self.contains(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn is_subset(&self, other: &BinaryRelation) -> bool {
        self.size == other.size && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// `ρ(X) = { y | (x, y) ∈ ρ for some x ∈ X }`.
    pub fn image(&self, set: &ElementSet) -> ElementSet {
        let mut out = ElementSet::empty(self.size);
        for x in set.iter() {
            for y in 0..self.size {
                if self.contains(x, y) {
                    out.insert(y);
                }
            }
        }
        out
    }

    pub fn intersection(&self, other: &BinaryRelation) -> BinaryRelation {
        BinaryRelation { size: self.size, bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a && b).collect() }
    }
}

/// `x ≤ y` iff `x = y[R_1 x .. R_n x]`.
pub fn zeta(alg: &MengerAlgebra) -> BinaryRelation {
    BinaryRelation::from_fn(alg.size(), |x, y| alg.restrict(y, x) == x)
}

/// `x ⊏ y` iff `R_1 x ≤ R_1 y`.
pub fn chi(alg: &MengerAlgebra) -> BinaryRelation {
    let z = zeta(alg);
    BinaryRelation::from_fn(alg.size(), |x, y| z.contains(alg.proj(1, x), alg.proj(1, y)))
}

pub fn is_reflexive(rel: &BinaryRelation) -> PropFlag {
    PropFlag::from_search((0..rel.size()).find(|&x| !rel.contains(x, x)).map(|x| Assignment::new().with("x", x)))
}

pub fn is_antisymmetric(rel: &BinaryRelation) -> PropFlag {
    let hit = rel.pairs().into_iter().find(|&(x, y)| x != y && rel.contains(y, x));
    PropFlag::from_search(hit.map(|(x, y)| Assignment::new().with("x", x).with("y", y)))
}

pub fn is_transitive(rel: &BinaryRelation) -> PropFlag {
    let g = rel.size();
    let hit = first_violation(&[g, g, g], |t| {
        !(rel.contains(t[0], t[1]) && rel.contains(t[1], t[2])) || rel.contains(t[0], t[2])
    });
    PropFlag::from_search(hit.map(|t| Assignment::new().with("x", t[0]).with("y", t[1]).with("z", t[2])))
}

/// Distinct `(class(x̄), class(ȳ))` over all `(x_j, y_j) ∈ ρ`.
fn column_pairs(alg: &MengerAlgebra, classes: &ColumnClasses, pairs: &[(usize, usize)]) -> HashSet<(u32, u32)> {
    let n = alg.arity();
    let g = alg.size();
    let mut out = HashSet::default();
    let mut xs = vec![0usize; n];
    let mut ys = vec![0usize; n];
    crate::tuples::for_each_tuple::<()>(pairs.len(), n, |idx| {
        for (j, &p) in idx.iter().enumerate() {
            xs[j] = pairs[p].0;
            ys[j] = pairs[p].1;
        }
        out.insert((classes.class_of[encode(g, &xs)], classes.class_of[encode(g, &ys)]));
        std::ops::ControlFlow::Continue(())
    });
    out
}

/// Chosen pairs and extra indices of a violation.
type PairHit = (Vec<(usize, usize)>, Vec<usize>);

/// Witness search over `n` pairs of `ρ` (lexicographic in pair order),
/// followed by `extra` free elements.
fn pair_search(
    rel: &BinaryRelation,
    lead: usize,
    n: usize,
    extra: usize,
    mut ok: impl FnMut(&[(usize, usize)], &[usize]) -> bool,
) -> Option<PairHit> {
    let pairs = rel.pairs();
    let mut bases = vec![pairs.len(); lead + n];
    bases.extend(vec![rel.size(); extra]);
    let mut chosen = Vec::with_capacity(lead + n);
    first_violation(&bases, |t| {
        chosen.clear();
        chosen.extend(t[..lead + n].iter().map(|&p| pairs[p]));
        ok(&chosen, &t[lead + n..])
    })
    .map(|t| (t[..lead + n].iter().map(|&p| pairs[p]).collect(), t[lead + n..].to_vec()))
}

fn pair_assignment(a: Assignment, lead: &[(usize, usize)], rest: &[(usize, usize)]) -> Assignment {
    let mut a = a;
    for &(x, y) in lead {
        a = a.with("x", x).with("y", y);
    }
    for (j, &(x, y)) in rest.iter().enumerate() {
        a = a.with(format!("x{}", j + 1), x).with(format!("y{}", j + 1), y);
    }
    a
}

/// `(x, y), (x_j, y_j) ∈ ρ → (x[x̄], y[ȳ]) ∈ ρ`.
pub fn is_stable(alg: &MengerAlgebra, rel: &BinaryRelation) -> PropFlag {
    if rel.is_full() {
        return PropFlag::holds();
    }
    // for a quasi-order, x[x̄] ρ y[x̄] ρ y[ȳ]
    if is_reflexive(rel).holds
        && is_transitive(rel).holds
        && is_l_regular(alg, rel).holds
        && is_v_regular(alg, rel).holds
    {
        return PropFlag::holds();
    }
    let n = alg.arity();
    let g = alg.size();
    let pairs = rel.pairs();
    let classes = ColumnClasses::new(alg);
    let cols = column_pairs(alg, &classes, &pairs);
    // reach[cx][y]: values y[ȳ] over tuples ȳ paired with a tuple of class cx
    let mut reach: HashMap<u32, Vec<FixedBitSet>> = HashMap::default();
    for &(cx, cy) in &cols {
        let rows = reach.entry(cx).or_insert_with(|| vec![FixedBitSet::with_capacity(g); g]);
        for (y, row) in rows.iter_mut().enumerate() {
            row.insert(classes.maps[cy as usize][y]);
        }
    }
    let mut reach: Vec<(u32, Vec<FixedBitSet>)> = reach.into_iter().collect();
    reach.sort_by_key(|r| r.0);
    let image: Vec<FixedBitSet> = (0..g)
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(g);
            row.extend((0..g).filter(|&b| rel.contains(a, b)));
            row
        })
        .collect();
    let lead = pairs
        .iter()
        .copied()
        .find(|&(x, y)| reach.iter().any(|(cx, rows)| !rows[y].is_subset(&image[classes.maps[*cx as usize][x]])));
    let Some((x, y)) = lead else {
        return PropFlag::holds();
    };
    let hit = first_violation(&vec![pairs.len(); n], |t| {
        let xs: Vec<usize> = t.iter().map(|&p| pairs[p].0).collect();
        let ys: Vec<usize> = t.iter().map(|&p| pairs[p].1).collect();
        rel.contains(alg.compose(x, &xs), alg.compose(y, &ys))
    })
    .expect("the lead pair has a violation");
    let rest: Vec<(usize, usize)> = hit.iter().map(|&p| pairs[p]).collect();
    PropFlag::fails(pair_assignment(Assignment::new(), &[(x, y)], &rest))
}

/// `(x, y) ∈ ρ → (x[z̄], y[z̄]) ∈ ρ`.
pub fn is_l_regular(alg: &MengerAlgebra, rel: &BinaryRelation) -> PropFlag {
    let n = alg.arity();
    let pairs = rel.pairs();
    let mut zs = vec![0usize; n];
    for &(x, y) in &pairs {
        for code in 0..alg.columns() {
            if !rel.contains(alg.compose_coded(x, code), alg.compose_coded(y, code)) {
                decode(alg.size(), code, &mut zs);
                return PropFlag::fails(Assignment::new().with("x", x).with("y", y).with_tuple("z", &zs));
            }
        }
    }
    PropFlag::holds()
}

/// `(x_j, y_j) ∈ ρ for all j → (z[x̄], z[ȳ]) ∈ ρ`.
pub fn is_v_regular(alg: &MengerAlgebra, rel: &BinaryRelation) -> PropFlag {
    let n = alg.arity();
    let pairs = rel.pairs();
    let classes = ColumnClasses::new(alg);
    let cols = column_pairs(alg, &classes, &pairs);
    let fine = (0..alg.size())
        .all(|z| cols.iter().all(|&(cx, cy)| rel.contains(classes.maps[cx as usize][z], classes.maps[cy as usize][z])));
    if fine {
        return PropFlag::holds();
    }
    let hit = pair_search(rel, 0, n, 1, |p, z| {
        let xs: Vec<usize> = p.iter().map(|q| q.0).collect();
        let ys: Vec<usize> = p.iter().map(|q| q.1).collect();
        rel.contains(alg.compose(z[0], &xs), alg.compose(z[0], &ys))
    });
    PropFlag::from_search(hit.map(|(p, z)| pair_assignment(Assignment::new(), &[], &p).with("z", z[0])))
}

/// `(x, y) ∈ ρ → (u[w̄|_i x], u[w̄|_i y]) ∈ ρ` for one coordinate `i`.
pub fn is_i_regular(alg: &MengerAlgebra, rel: &BinaryRelation, i: usize) -> PropFlag {
    let n = alg.arity();
    let g = alg.size();
    let pairs = rel.pairs();
    let mut free = vec![0usize; n - 1];
    let mut args = vec![0usize; n];
    for &(x, y) in &pairs {
        for u in 0..g {
            for code in 0..g.pow((n - 1) as u32) {
                decode(g, code, &mut free);
                args[..i - 1].copy_from_slice(&free[..i - 1]);
                args[i..].copy_from_slice(&free[i - 1..]);
                args[i - 1] = x;
                let left = alg.compose(u, &args);
                args[i - 1] = y;
                let right = alg.compose(u, &args);
                if !rel.contains(left, right) {
                    return PropFlag::fails(
                        Assignment::new().with("x", x).with("y", y).with("u", u).with_tuple("w", &free).with("i", i),
                    );
                }
            }
        }
    }
    PropFlag::holds()
}

/// `(x[ȳ], y_i) ∈ ρ`.
pub fn is_v_negative(alg: &MengerAlgebra, rel: &BinaryRelation) -> PropFlag {
    let n = alg.arity();
    let g = alg.size();
    let mut bases = vec![g; n + 1];
    bases.push(n);
    let hit = first_violation(&bases, |t| rel.contains(alg.compose(t[0], &t[1..=n]), t[1 + t[n + 1]]));
    PropFlag::from_search(
        hit.map(|t| Assignment::new().with("x", t[0]).with_tuple("y", &t[1..=n]).with("i", t[n + 1] + 1)),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationProps {
    pub stable: PropFlag,
    pub l_regular: PropFlag,
    pub v_regular: PropFlag,
    /// One flag per coordinate `1..=n`.
    pub i_regular: Vec<PropFlag>,
    pub v_negative: PropFlag,
    pub reflexive: PropFlag,
    pub antisymmetric: PropFlag,
    pub transitive: PropFlag,
}

impl RelationProps {
    pub fn is_quasi_order(&self) -> bool {
        self.reflexive.holds && self.transitive.holds
    }

    pub fn is_order(&self) -> bool {
        self.is_quasi_order() && self.antisymmetric.holds
    }
}

pub fn relation_props(alg: &MengerAlgebra, rel: &BinaryRelation) -> RelationProps {
    RelationProps {
        stable: is_stable(alg, rel),
        l_regular: is_l_regular(alg, rel),
        v_regular: is_v_regular(alg, rel),
        i_regular: (1..=alg.arity()).map(|i| is_i_regular(alg, rel, i)).collect(),
        v_negative: is_v_negative(alg, rel),
        reflexive: is_reflexive(rel),
        antisymmetric: is_antisymmetric(rel),
        transitive: is_transitive(rel),
    }
}

/// The six laws linking ζ, χ and the projections, each decided exhaustively.
pub fn check_relation_laws(alg: &MengerAlgebra) -> Vec<(&'static str, PropFlag)> {
    let g = alg.size();
    let n = alg.arity();
    let le = zeta(alg);
    let sq = chi(alg);
    let mut out = Vec::with_capacity(6);

    let hit = first_violation(&[g, g, n], |t| {
        !le.contains(t[0], t[1]) || le.contains(alg.proj(t[2] + 1, t[0]), alg.proj(t[2] + 1, t[1]))
    });
    out.push((
        "x<=y -> R_i x <= R_i y",
        PropFlag::from_search(hit.map(|t| Assignment::new().with("x", t[0]).with("y", t[1]).with("i", t[2] + 1))),
    ));

    let hit = first_violation(&[g, g], |t| {
        sq.contains(t[0], t[1]) == (1..=n).all(|i| le.contains(alg.proj(i, t[0]), alg.proj(i, t[1])))
    });
    out.push((
        "x [ y <-> R_i x <= R_i y",
        PropFlag::from_search(hit.map(|t| Assignment::new().with("x", t[0]).with("y", t[1]))),
    ));

    let hit = first_violation(&[g, g], |t| sq.contains(t[0], t[1]) == (alg.restrict(t[0], t[1]) == t[0]));
    out.push((
        "x [ y <-> x[R y] = x",
        PropFlag::from_search(hit.map(|t| Assignment::new().with("x", t[0]).with("y", t[1]))),
    ));

    let mut bases = vec![g; n + 1];
    bases.push(n);
    let hit = first_violation(&bases, |t| {
        let i = t[n + 1] + 1;
        le.contains(alg.compose(alg.proj(i, t[0]), &t[1..=n]), t[i])
    });
    out.push((
        "(R_i x)[y] <= y_i",
        PropFlag::from_search(
            hit.map(|t| Assignment::new().with("x", t[0]).with_tuple("y", &t[1..=n]).with("i", t[n + 1] + 1)),
        ),
    ));

    let hit = first_violation(&vec![g; n + 1], |t| {
        let rs: Vec<usize> = (1..=n).map(|i| alg.proj(i, t[i])).collect();
        le.contains(alg.compose(t[0], &rs), t[0])
    });
    out.push((
        "x[R_1 y1 .. R_n yn] <= x",
        PropFlag::from_search(hit.map(|t| Assignment::new().with("x", t[0]).with_tuple("y", &t[1..]))),
    ));

    let hit = first_violation(&[g, n, n], |t| alg.proj(t[1] + 1, t[0]) == alg.proj(t[1] + 1, alg.proj(t[2] + 1, t[0])));
    out.push((
        "R_i x = R_i R_k x",
        PropFlag::from_search(hit.map(|t| Assignment::new().with("x", t[0]).with("i", t[1] + 1).with("k", t[2] + 1))),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn zeta_and_chi_on_abs1() {
        let alg = abs1();
        assert_eq!(zeta(&alg), BinaryRelation::identity(3));
        assert_eq!(chi(&alg), BinaryRelation::full(3));
    }

    #[test]
    fn zeta_is_a_stable_order() {
        for alg in [abs1(), abs1_meet()] {
            let p = relation_props(&alg, &zeta(&alg));
            assert!(p.stable.holds && p.is_order());
        }
    }

    #[test]
    fn chi_is_l_regular_v_negative_quasi_order() {
        for alg in [abs1(), abs1_meet()] {
            let c = chi(&alg);
            let p = relation_props(&alg, &c);
            assert!(p.l_regular.holds && p.v_negative.holds && p.is_quasi_order());
            assert!(zeta(&alg).is_subset(&c));
        }
    }

    #[test]
    fn chi_on_meet_algebra_is_domain_inclusion() {
        let alg = abs1_meet();
        let c = chi(&alg);
        // e0 = {0->0} has domain {0}, id has domain {0,1}
        assert!(c.contains(3, 0));
        assert!(!c.contains(0, 3));
        assert!(c.contains(7, 3));
        assert!(!c.contains(3, 4));
    }

    #[test]
    fn full_relation_has_every_compatibility() {
        let alg = abs1_meet();
        let p = relation_props(&alg, &BinaryRelation::full(8));
        assert!(p.stable.holds && p.l_regular.holds && p.v_regular.holds && p.v_negative.holds);
        assert!(p.i_regular.iter().all(|f| f.holds));
        assert!(!p.antisymmetric.holds);
    }

    #[test]
    fn six_laws_hold() {
        for alg in [abs1(), abs1_meet()] {
            for (name, flag) in check_relation_laws(&alg) {
                assert!(flag.holds, "{name}: {:?}", flag.counterexample);
            }
        }
    }

    #[test]
    fn fast_paths_agree_with_brute_force() {
        let alg = abs1_meet();
        let g = alg.size();
        // a handful of relations, some compatible and some not
        let rels = [
            zeta(&alg),
            chi(&alg),
            BinaryRelation::from_fn(g, |x, y| x == y || (x < 3 && y < 3)),
            BinaryRelation::from_fn(g, |x, y| x == y || x + y == 7),
            BinaryRelation::from_fn(g, |x, y| alg.proj(1, x) == alg.proj(1, y)),
        ];
        for rel in &rels {
            let stable = first_violation(&[g; 4], |t| {
                !(rel.contains(t[0], t[1]) && rel.contains(t[2], t[3]))
                    || rel.contains(alg.compose(t[0], &[t[2]]), alg.compose(t[1], &[t[3]]))
            })
            .is_none();
            assert_eq!(is_stable(&alg, rel).holds, stable);
            let v_reg = first_violation(&[g; 3], |t| {
                !rel.contains(t[0], t[1]) || rel.contains(alg.compose(t[2], &[t[0]]), alg.compose(t[2], &[t[1]]))
            })
            .is_none();
            assert_eq!(is_v_regular(&alg, rel).holds, v_reg);
        }
    }

    #[test]
    fn stability_counterexample_is_reported() {
        let alg = abs1();
        let rel = BinaryRelation::from_fn(3, |x, y| x == y || (x, y) == (0, 1));
        let flag = is_stable(&alg, &rel);
        assert!(!flag.holds);
        let w = flag.counterexample.unwrap();
        let (x, y, x1, y1) = (w.get("x").unwrap(), w.get("y").unwrap(), w.get("x1").unwrap(), w.get("y1").unwrap());
        assert!(rel.contains(x, y) && rel.contains(x1, y1));
        assert!(!rel.contains(alg.compose(x, &[x1]), alg.compose(y, &[y1])));
    }
}
