//! Representations of an algebra by n-place functions.

use serde::Serialize;

use crate::algebra::{abstractify, is_i_regular, is_l_ideal, MengerAlgebra};
use crate::assignment::{Assignment, PropFlag};
use crate::equivalence::EquivalenceRelation;
use crate::error::{input, Error, Result};
use crate::function::{Carrier, FunctionSystem, NPlaceFunction};
use crate::set::ElementSet;
use crate::tuples::{decode, encode};

/// Above this size the simplest representation skips the exhaustive
/// class-containment check unless asked for it.
pub const VERIFY_MODE_MAX_SIZE: usize = 12;

/// An assignment `g ↦ P(g)` of n-place functions on `0..carrier` to the
/// elements of an algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    source: u64,
    arity: usize,
    carrier: usize,
    images: Vec<NPlaceFunction>,
    /// Carrier point to `(part, point within that part)`.
    origins: Vec<(usize, usize)>,
    point_labels: Vec<String>,
    /// Members of the class behind each point, for simplest representations.
    classes: Option<Vec<Vec<usize>>>,
}

impl Representation {
    pub fn source(&self) -> u64 {
        self.source
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn images(&self) -> &[NPlaceFunction] {
        &self.images
    }

    pub fn image(&self, g: usize) -> &NPlaceFunction {
        &self.images[g]
    }

    pub fn origins(&self) -> &[(usize, usize)] {
        &self.origins
    }

    pub fn point_labels(&self) -> &[String] {
        &self.point_labels
    }

    pub fn classes(&self) -> Option<&[Vec<usize>]> {
        self.classes.as_deref()
    }

    /// Point of a summand, addressed by part and local index.
    pub fn tagged_point(&self, part: usize, local: usize) -> Option<usize> {
        self.origins.iter().position(|&o| o == (part, local))
    }

    /// Returns a copy with `P(g)` replaced.
    pub fn with_image(&self, g: usize, image: NPlaceFunction) -> Result<Self> {
        if g >= self.images.len() {
            return input(format!("element {g} out of range"));
        }
        if image.carrier().size() != self.carrier || image.arity() != self.arity {
            return input("replacement image has the wrong shape");
        }
        let mut out = self.clone();
        out.images[g] = image;
        Ok(out)
    }

    fn tables(&self) -> Vec<Vec<Option<usize>>> {
        let cols = self.carrier.pow(self.arity as u32);
        let mut args = vec![0usize; self.arity];
        self.images
            .iter()
            .map(|f| {
                (0..cols)
                    .map(|c| {
                        decode(self.carrier, c, &mut args);
                        f.eval(&args)
                    })
                    .collect()
            })
            .collect()
    }
}

fn check_partition(alg: &MengerAlgebra, e: &EquivalenceRelation) -> Result<()> {
    if e.size() != alg.size() {
        return input(format!("equivalence has {} elements, the algebra {}", e.size(), alg.size()));
    }
    Ok(())
}

/// Decides v-regularity of an equivalence coordinate by coordinate; for
/// equivalences the two notions coincide.
fn equivalence_v_regular(alg: &MengerAlgebra, e: &EquivalenceRelation) -> PropFlag {
    let rel = e.to_relation();
    for i in 1..=alg.arity() {
        let flag = is_i_regular(alg, &rel, i);
        if !flag.holds {
            return flag;
        }
    }
    PropFlag::holds()
}

/// `P_(E,W)` with the exhaustive containment check on when `|G|` is at most
/// [`VERIFY_MODE_MAX_SIZE`].
pub fn simplest_representation(alg: &MengerAlgebra, e: &EquivalenceRelation, w: &ElementSet) -> Result<Representation> {
    simplest_representation_with(alg, e, w, alg.size() <= VERIFY_MODE_MAX_SIZE)
}

/// The simplest representation on the classes of `e` other than `w`.
///
/// `P(g)(a_1 .. a_n)` is the class of `g[x_1 .. x_n]` for class
/// representatives `x_j`, undefined when that class is `w`.
pub fn simplest_representation_with(
    alg: &MengerAlgebra,
    e: &EquivalenceRelation,
    w: &ElementSet,
    verify: bool,
) -> Result<Representation> {
    check_partition(alg, e)?;
    w.check_universe(alg.size(), "W")?;
    let w_class = if w.is_empty() {
        None
    } else {
        let id = e
            .class_id_of_set(w)
            .ok_or_else(|| Error::Precondition(format!("W = {w} is not a class of the equivalence")))?;
        let ideal = is_l_ideal(alg, w);
        if let Some(cx) = ideal.counterexample {
            return Err(Error::Precondition(format!("W = {w} is not an l-ideal ({cx})")));
        }
        Some(id)
    };
    let regular = equivalence_v_regular(alg, e);
    if let Some(cx) = regular.counterexample {
        return Err(Error::Precondition(format!("equivalence is not v-regular ({cx})")));
    }

    let point_classes: Vec<usize> = (0..e.class_count()).filter(|&c| Some(c) != w_class).collect();
    let k = point_classes.len();
    if k == 0 {
        return Err(Error::Precondition("every class is W; the carrier would be empty".into()));
    }
    let mut point_of = vec![usize::MAX; e.class_count()];
    for (p, &c) in point_classes.iter().enumerate() {
        point_of[c] = p;
    }
    let reps: Vec<usize> = point_classes.iter().map(|&c| e.class(c)[0]).collect();
    let n = alg.arity();
    let carrier = Carrier::new(k)?;
    let mut points = vec![0usize; n];
    let mut xs = vec![0usize; n];
    let mut images = Vec::with_capacity(alg.size());
    for g in 0..alg.size() {
        let mut graph = Vec::new();
        for code in 0..k.pow(n as u32) {
            decode(k, code, &mut points);
            for (x, &p) in xs.iter_mut().zip(&points) {
                *x = reps[p];
            }
            let c = e.class_of(alg.compose(g, &xs));
            if Some(c) != w_class {
                graph.push((points.clone(), point_of[c]));
            }
        }
        images.push(NPlaceFunction::new(carrier, n, graph)?);
    }

    if verify {
        for g in 0..alg.size() {
            for code in 0..k.pow(n as u32) {
                decode(k, code, &mut points);
                let members: Vec<&[usize]> = points.iter().map(|&p| e.class(point_classes[p])).collect();
                for (x, &p) in xs.iter_mut().zip(&points) {
                    *x = reps[p];
                }
                let expected = e.class_of(alg.compose(g, &xs));
                let sizes: Vec<usize> = members.iter().map(|m| m.len()).collect();
                let bad = crate::tuples::first_violation(&sizes, |t| {
                    let hs: Vec<usize> = t.iter().zip(&members).map(|(&j, m)| m[j]).collect();
                    e.class_of(alg.compose(g, &hs)) == expected
                });
                if let Some(t) = bad {
                    let hs: Vec<usize> = t.iter().zip(&members).map(|(&j, m)| m[j]).collect();
                    return Err(Error::Integrity(format!(
                        "g[h..] leaves the class of g[representatives] ({})",
                        Assignment::new().with("g", g).with_tuple("h", &hs)
                    )));
                }
            }
        }
    }

    Ok(Representation {
        source: alg.fingerprint(),
        arity: n,
        carrier: k,
        images,
        origins: (0..k).map(|p| (0, p)).collect(),
        point_labels: reps.iter().map(|&r| format!("[{}]", alg.label(r))).collect(),
        classes: Some(point_classes.iter().map(|&c| e.class(c).to_vec()).collect()),
    })
}

/// Status of the identities a representation must satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    /// `P(g[g_1 .. g_n]) = P(g)[P(g_1) .. P(g_n)]`.
    pub srep: PropFlag,
    /// `P(R_i g) = R_i P(g)`, domains included.
    pub projections: PropFlag,
    /// `P(g_1 ∧ g_2) = P(g_1) ∩ P(g_2)`, when the algebra has a meet.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meet: Option<PropFlag>,
}

impl VerifyReport {
    pub fn all_hold(&self) -> bool {
        self.srep.holds && self.projections.holds && !matches!(&self.meet, Some(m) if !m.holds)
    }
}

pub fn verify_representation(alg: &MengerAlgebra, rep: &Representation) -> Result<VerifyReport> {
    if rep.source != alg.fingerprint() || rep.images.len() != alg.size() || rep.arity != alg.arity() {
        return input("representation does not belong to this algebra");
    }
    let n = alg.arity();
    let k = rep.carrier;
    let cols = k.pow(n as u32);
    let tables = rep.tables();
    let g = alg.size();

    let mut vals = vec![0usize; n];
    let composed = |f: usize, gs: &[usize], c: usize, vals: &mut [usize]| -> Option<usize> {
        for (v, &h) in vals.iter_mut().zip(gs) {
            *v = tables[h][c]?;
        }
        tables[f][encode(k, vals)]
    };
    let hit = crate::tuples::first_violation(&vec![g; n + 1], |t| {
        let lhs = &tables[alg.compose(t[0], &t[1..])];
        (0..cols).all(|c| lhs[c] == composed(t[0], &t[1..], c, &mut vals))
    });
    let srep = PropFlag::from_search(hit.map(|t| Assignment::new().with("g", t[0]).with_tuple("g", &t[1..])));

    let mut args = vec![0usize; n];
    let hit = crate::tuples::first_violation(&[g, n], |t| {
        let (x, i) = (t[0], t[1] + 1);
        let lhs = &tables[alg.proj(i, x)];
        (0..cols).all(|c| {
            decode(k, c, &mut args);
            lhs[c] == tables[x][c].map(|_| args[i - 1])
        })
    });
    let projections = PropFlag::from_search(hit.map(|t| Assignment::new().with("g", t[0]).with("i", t[1] + 1)));

    let meet = alg.has_meet().then(|| {
        let hit = crate::tuples::first_violation(&[g, g], |t| {
            let lhs = &tables[alg.meet(t[0], t[1]).unwrap()];
            (0..cols).all(|c| {
                let both = match (tables[t[0]][c], tables[t[1]][c]) {
                    (Some(a), Some(b)) if a == b => Some(a),
                    _ => None,
                };
                lhs[c] == both
            })
        });
        PropFlag::from_search(hit.map(|t| Assignment::new().with("g1", t[0]).with("g2", t[1])))
    });

    Ok(VerifyReport { srep, projections, meet })
}

/// `{ g | P(g)(a, .., a) = a }`.
pub fn representation_stabilizer(rep: &Representation, a: usize) -> Result<ElementSet> {
    if a >= rep.carrier {
        return input(format!("point {a} outside a carrier of size {}", rep.carrier));
    }
    Ok(ElementSet::from_predicate(rep.images.len(), |g| rep.images[g].eval_diagonal(a) == Some(a)))
}

/// Disjoint sum: the carrier is the union of the parts' carriers, each
/// point tagged with its part.
pub fn sum_representations(parts: &[Representation]) -> Result<Representation> {
    let first = parts.first().ok_or_else(|| Error::Input("a sum needs at least one part".into()))?;
    if let Some(bad) = parts
        .iter()
        .position(|p| p.source != first.source || p.images.len() != first.images.len() || p.arity != first.arity)
    {
        return input(format!("part {bad} represents a different algebra"));
    }
    let carrier_size: usize = parts.iter().map(|p| p.carrier).sum();
    let carrier = Carrier::new(carrier_size)?;
    let mut offsets = Vec::with_capacity(parts.len());
    let mut origins = Vec::with_capacity(carrier_size);
    let mut labels = Vec::with_capacity(carrier_size);
    let mut offset = 0;
    for (j, p) in parts.iter().enumerate() {
        offsets.push(offset);
        for a in 0..p.carrier {
            origins.push((j, a));
            labels.push(format!("{j}:{}", p.point_labels[a]));
        }
        offset += p.carrier;
    }
    let mut images = Vec::with_capacity(first.images.len());
    for g in 0..first.images.len() {
        let mut graph = Vec::new();
        for (p, &off) in parts.iter().zip(&offsets) {
            for (args, &v) in p.images[g].graph() {
                graph.push((args.iter().map(|&a| a + off).collect::<Vec<_>>(), v + off));
            }
        }
        images.push(NPlaceFunction::new(carrier, first.arity, graph)?);
    }
    Ok(Representation {
        source: first.source,
        arity: first.arity,
        carrier: carrier_size,
        images,
        origins,
        point_labels: labels,
        classes: None,
    })
}

/// Each member of a concrete system represented by itself.
pub fn identity_representation(system: &FunctionSystem) -> Result<Representation> {
    let alg = abstractify(system)?;
    let k = system.carrier().size();
    Ok(Representation {
        source: alg.fingerprint(),
        arity: system.arity(),
        carrier: k,
        images: system.functions().to_vec(),
        origins: (0..k).map(|a| (0, a)).collect(),
        point_labels: (0..k).map(|a| a.to_string()).collect(),
        classes: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;
    use crate::algebra::is_v_regular;
    use crate::function::semantic_stabilizer;

    fn abs1_rep() -> Representation {
        let e = EquivalenceRelation::from_signature([0, 0, 1]);
        simplest_representation(&abs1(), &e, &ElementSet::empty(3)).unwrap()
    }

    #[test]
    fn simplest_representation_of_abs1() {
        let rep = abs1_rep();
        assert_eq!(rep.carrier(), 2);
        assert_eq!(rep.image(0), &unary(&[(0, 0), (1, 1)]));
        assert_eq!(rep.image(1), &unary(&[(0, 0), (1, 0)]));
        assert_eq!(rep.image(2), &unary(&[(0, 1), (1, 1)]));
        assert!(verify_representation(&abs1(), &rep).unwrap().all_hold());
        assert_eq!(representation_stabilizer(&rep, 0).unwrap().to_vec(), vec![0, 1]);
        assert_eq!(representation_stabilizer(&rep, 1).unwrap().to_vec(), vec![0, 2]);
        assert!(representation_stabilizer(&rep, 2).is_err());
    }

    #[test]
    fn one_class_gives_one_point() {
        let alg = abs1();
        let rep = simplest_representation(&alg, &EquivalenceRelation::total(3), &ElementSet::empty(3)).unwrap();
        assert_eq!(rep.carrier(), 1);
        assert!(rep.images().iter().all(|f| f.eval(&[0]) == Some(0)));
        assert!(representation_stabilizer(&rep, 0).unwrap().is_full());
    }

    #[test]
    fn preconditions_are_checked() {
        // id ~ c0 but e0[id] = e0 and e0[c0] = c0
        let bad = EquivalenceRelation::from_signature([0, 0, 1, 2, 3, 4, 5, 6]);
        let meet_alg = abs1_meet();
        assert!(matches!(simplest_representation(&meet_alg, &bad, &ElementSet::empty(8)), Err(Error::Precondition(_))));
        let alg = abs1();
        let e = EquivalenceRelation::from_signature([0, 0, 1]);
        let not_class = ElementSet::from_indices(3, [0]).unwrap();
        assert!(matches!(simplest_representation(&alg, &e, &not_class), Err(Error::Precondition(_))));
        let not_ideal = ElementSet::from_indices(3, [2]).unwrap();
        assert!(matches!(simplest_representation(&alg, &e, &not_ideal), Err(Error::Precondition(_))));
    }

    #[test]
    fn coordinatewise_regularity_matches_simultaneous() {
        let alg = abs1_meet();
        for e in [
            EquivalenceRelation::from_signature([0, 0, 1, 0, 2, 1, 2, 2]),
            EquivalenceRelation::from_signature([0, 1, 1, 0, 2, 1, 2, 2]),
            EquivalenceRelation::from_signature([0, 0, 0, 1, 1, 1, 1, 1]),
            EquivalenceRelation::identity(8),
        ] {
            assert_eq!(equivalence_v_regular(&alg, &e).holds, is_v_regular(&alg, &e.to_relation()).holds);
        }
    }

    #[test]
    fn corrupted_image_breaks_srep() {
        let alg = abs1();
        let rep = abs1_rep().with_image(1, unary(&[(0, 1), (1, 0)])).unwrap();
        let report = verify_representation(&alg, &rep).unwrap();
        assert!(!report.srep.holds);
        assert!(report.srep.counterexample.is_some());
    }

    #[test]
    fn identity_representation_matches_semantics() {
        let sys = sys1_meet();
        let alg = abstractify(&sys).unwrap();
        let rep = identity_representation(&sys).unwrap();
        let report = verify_representation(&alg, &rep).unwrap();
        assert!(report.all_hold() && report.meet.is_some());
        for a in 0..2 {
            assert_eq!(representation_stabilizer(&rep, a).unwrap(), semantic_stabilizer(&sys, a).unwrap());
        }
    }

    #[test]
    fn sums_glue_and_preserve_stabilizers() {
        let alg = abs1();
        let ident = identity_representation(&sys1()).unwrap();
        let simple = abs1_rep();
        let sum = sum_representations(&[ident.clone(), simple.clone()]).unwrap();
        assert_eq!(sum.carrier(), 4);
        assert!(verify_representation(&alg, &sum).unwrap().all_hold());
        for (j, part) in [&ident, &simple].into_iter().enumerate() {
            for a in 0..part.carrier() {
                let p = sum.tagged_point(j, a).unwrap();
                assert_eq!(representation_stabilizer(&sum, p).unwrap(), representation_stabilizer(part, a).unwrap());
            }
        }
        let single = sum_representations(std::slice::from_ref(&simple)).unwrap();
        assert_eq!(single.images(), simple.images());
        let other = identity_representation(&sys1_meet()).unwrap();
        assert!(sum_representations(&[simple, other]).is_err());
        assert!(sum_representations(&[]).is_err());
    }
}
