//! Concrete n-place partial functions over a finite carrier.
//!
//! A function is stored as its graph: a sparse map from argument tuples to
//! values. A missing tuple means "undefined there". Everything the abstract
//! side of the workbench decides is cross-checked against these objects.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{input, Error, Result};
use crate::set::ElementSet;
use crate::tuples::{encode, for_each_tuple};

/// Default bound on the size of a closed function system.
pub const DEFAULT_CLOSURE_CAP: usize = 20_000;

/// A finite carrier `{0, .., size-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Carrier(usize);

impl Carrier {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return input("carrier size must be at least 1");
        }
        Ok(Carrier(size))
    }

    pub fn size(self) -> usize {
        self.0
    }
}

/// A partial map from n-tuples over the carrier to the carrier.
///
/// The derived ordering compares graphs lexicographically, which is the
/// canonical order used for generators and reports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NPlaceFunction {
    carrier: Carrier,
    arity: usize,
    graph: BTreeMap<Vec<usize>, usize>,
}

impl NPlaceFunction {
    pub fn new<I>(carrier: Carrier, arity: usize, graph: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, usize)>,
    {
        if arity == 0 {
            return input("arity must be at least 1");
        }
        let k = carrier.size();
        let mut map = BTreeMap::new();
        for (args, value) in graph {
            if args.len() != arity {
                return input(format!("tuple {args:?} does not have arity {arity}"));
            }
            if args.iter().any(|&a| a >= k) || value >= k {
                return input(format!("entry {args:?} -> {value} out of range for carrier {k}"));
            }
            if map.insert(args.clone(), value).is_some() {
                return input(format!("tuple {args:?} given twice"));
            }
        }
        Ok(NPlaceFunction { carrier, arity, graph: map })
    }

    /// The nowhere-defined function.
    pub fn empty(carrier: Carrier, arity: usize) -> Self {
        NPlaceFunction { carrier, arity, graph: BTreeMap::new() }
    }

    /// Tabulates `f` over every argument tuple; `None` leaves the tuple undefined.
    pub fn from_fn(carrier: Carrier, arity: usize, mut f: impl FnMut(&[usize]) -> Option<usize>) -> Result<Self> {
        let mut graph = Vec::new();
        for_each_tuple::<()>(carrier.size(), arity, |t| {
            if let Some(v) = f(t) {
                graph.push((t.to_vec(), v));
            }
            std::ops::ControlFlow::Continue(())
        });
        Self::new(carrier, arity, graph)
    }

    /// The total function returning a fixed value.
    pub fn constant(carrier: Carrier, arity: usize, value: usize) -> Result<Self> {
        Self::from_fn(carrier, arity, |_| Some(value))
    }

    /// The total function returning its `i`-th argument (1-based).
    pub fn selector(carrier: Carrier, arity: usize, i: usize) -> Result<Self> {
        if i == 0 || i > arity {
            return input(format!("selector index {i} outside 1..={arity}"));
        }
        Self::from_fn(carrier, arity, |t| Some(t[i - 1]))
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn graph(&self) -> &BTreeMap<Vec<usize>, usize> {
        &self.graph
    }

    #[inline]
    pub fn eval(&self, args: &[usize]) -> Option<usize> {
        self.graph.get(args).copied()
    }

    /// Value on the diagonal point `(a, .., a)`.
    pub fn eval_diagonal(&self, a: usize) -> Option<usize> {
        self.eval(&vec![a; self.arity])
    }

    pub fn is_total(&self) -> bool {
        self.graph.len() == self.carrier.size().pow(self.arity as u32)
    }

    /// Graph inclusion: `self` is a restriction of `other`.
    pub fn is_restriction_of(&self, other: &NPlaceFunction) -> bool {
        self.graph.iter().all(|(t, v)| other.graph.get(t) == Some(v))
    }

    /// Domain inclusion: `pr1 self ⊆ pr1 other`.
    pub fn domain_within(&self, other: &NPlaceFunction) -> bool {
        self.graph.keys().all(|t| other.graph.contains_key(t))
    }

    fn same_space(&self, other: &NPlaceFunction, what: &str) -> Result<()> {
        if self.carrier != other.carrier || self.arity != other.arity {
            return input(format!(
                "{what}: functions over carrier {} / arity {} and carrier {} / arity {} do not mix",
                self.carrier.size(),
                self.arity,
                other.carrier.size(),
                other.arity
            ));
        }
        Ok(())
    }
}

impl fmt::Display for NPlaceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (args, v)) in self.graph.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
            write!(f, "{}->{}", args.join(","), v)?;
        }
        write!(f, "}}")
    }
}

/// Menger composition `f[g1 .. gn]`.
///
/// Defined at `a` exactly when every `gi(a)` is defined and the tuple of
/// their values lies in the domain of `f`.
pub fn compose_menger(f: &NPlaceFunction, gs: &[NPlaceFunction]) -> Result<NPlaceFunction> {
    if gs.len() != f.arity {
        return input(format!("composition needs {} inner functions, got {}", f.arity, gs.len()));
    }
    for g in gs {
        f.same_space(g, "composition")?;
    }
    let refs: Vec<&NPlaceFunction> = gs.iter().collect();
    Ok(compose_unchecked(f, &refs))
}

fn compose_unchecked(f: &NPlaceFunction, gs: &[&NPlaceFunction]) -> NPlaceFunction {
    let mut graph = BTreeMap::new();
    let mut inner = vec![0usize; f.arity];
    'points: for (args, &v0) in gs[0].graph.iter() {
        inner[0] = v0;
        for (j, g) in gs.iter().enumerate().skip(1) {
            match g.eval(args) {
                Some(v) => inner[j] = v,
                None => continue 'points,
            }
        }
        if let Some(v) = f.eval(&inner) {
            graph.insert(args.clone(), v);
        }
    }
    NPlaceFunction { carrier: f.carrier, arity: f.arity, graph }
}

/// The restricted projection `R_i f`: same domain as `f`, returns the
/// `i`-th argument (1-based).
pub fn project(f: &NPlaceFunction, i: usize) -> Result<NPlaceFunction> {
    if i == 0 || i > f.arity {
        return input(format!("projection index {i} outside 1..={}", f.arity));
    }
    Ok(project_unchecked(f, i))
}

fn project_unchecked(f: &NPlaceFunction, i: usize) -> NPlaceFunction {
    let graph = f.graph.keys().map(|t| (t.clone(), t[i - 1])).collect();
    NPlaceFunction { carrier: f.carrier, arity: f.arity, graph }
}

/// Set-theoretic intersection of graphs.
pub fn meet(f: &NPlaceFunction, g: &NPlaceFunction) -> Result<NPlaceFunction> {
    f.same_space(g, "meet")?;
    Ok(meet_unchecked(f, g))
}

fn meet_unchecked(f: &NPlaceFunction, g: &NPlaceFunction) -> NPlaceFunction {
    let graph = f.graph.iter().filter(|(t, v)| g.graph.get(*t) == Some(v)).map(|(t, v)| (t.clone(), *v)).collect();
    NPlaceFunction { carrier: f.carrier, arity: f.arity, graph }
}

/// A finite set of n-place functions closed under Menger composition, all
/// projections and, when `with_meet` is set, pairwise intersection.
#[derive(Clone, Debug)]
pub struct FunctionSystem {
    carrier: Carrier,
    arity: usize,
    with_meet: bool,
    functions: Vec<NPlaceFunction>,
    names: Vec<String>,
    index: HashMap<NPlaceFunction, usize>,
}

impl PartialEq for FunctionSystem {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier
            && self.arity == other.arity
            && self.with_meet == other.with_meet
            && self.functions == other.functions
            && self.names == other.names
    }
}

impl FunctionSystem {
    /// Wraps an already closed list of named functions, keeping its order.
    pub fn from_functions(
        carrier: Carrier,
        arity: usize,
        named: Vec<(String, NPlaceFunction)>,
        with_meet: bool,
    ) -> Result<Self> {
        let system = Self::assemble(carrier, arity, named, with_meet)?;
        system.verify_closed()?;
        Ok(system)
    }

    /// Closes a seed list, keeping the seeds first and in the given order.
    /// Functions added by the closure are named `f<index>`.
    pub fn complete(
        carrier: Carrier,
        arity: usize,
        named: Vec<(String, NPlaceFunction)>,
        with_meet: bool,
        cap: usize,
    ) -> Result<Self> {
        if named.is_empty() {
            return input("a function system needs at least one generator");
        }
        let mut system = Self::assemble(carrier, arity, named, with_meet)?;
        system.close_in_place(cap)?;
        Ok(system)
    }

    fn assemble(carrier: Carrier, arity: usize, named: Vec<(String, NPlaceFunction)>, with_meet: bool) -> Result<Self> {
        if arity == 0 {
            return input("arity must be at least 1");
        }
        let mut system = FunctionSystem {
            carrier,
            arity,
            with_meet,
            functions: Vec::new(),
            names: Vec::new(),
            index: HashMap::new(),
        };
        for (name, f) in named {
            if f.carrier != carrier || f.arity != arity {
                return input(format!("function {name} does not live on carrier {} / arity {arity}", carrier.size()));
            }
            if system.names.contains(&name) {
                return input(format!("duplicate function name {name}"));
            }
            if let Some(&k) = system.index.get(&f) {
                return input(format!("functions {} and {name} have identical graphs", system.names[k]));
            }
            system.index.insert(f.clone(), system.functions.len());
            system.functions.push(f);
            system.names.push(name);
        }
        Ok(system)
    }

    fn push_generated(&mut self, f: NPlaceFunction, cap: usize) -> Result<()> {
        if self.index.contains_key(&f) {
            return Ok(());
        }
        if self.functions.len() >= cap {
            return Err(Error::ClosureCap { cap });
        }
        let k = self.functions.len();
        let mut name = format!("f{k}");
        while self.names.contains(&name) {
            name.push('\'');
        }
        self.index.insert(f.clone(), k);
        self.functions.push(f);
        self.names.push(name);
        Ok(())
    }

    /// Worklist closure. Element `k` is processed once, together with every
    /// operand tuple whose largest index is `k`, so each composite is formed
    /// exactly once.
    fn close_in_place(&mut self, cap: usize) -> Result<()> {
        let n = self.arity;
        let mut processed = 0;
        while processed < self.functions.len() {
            let k = processed;
            for i in 1..=n {
                let p = project_unchecked(&self.functions[k], i);
                self.push_generated(p, cap)?;
            }
            let mut operands = vec![0usize; n + 1];
            for first in 0..=n {
                // positions before `first` range over 0..k, `first` holds k,
                // later positions range over 0..=k
                let bases: Vec<usize> = (0..=n)
                    .map(|p| {
                        if p < first {
                            k
                        } else if p == first {
                            1
                        } else {
                            k + 1
                        }
                    })
                    .collect();
                let mut found: Vec<NPlaceFunction> = Vec::new();
                crate::tuples::for_each_mixed::<()>(&bases, |t| {
                    for (p, slot) in operands.iter_mut().enumerate() {
                        *slot = if p == first { k } else { t[p] };
                    }
                    let inner: Vec<&NPlaceFunction> = operands[1..].iter().map(|&j| &self.functions[j]).collect();
                    let c = compose_unchecked(&self.functions[operands[0]], &inner);
                    if !self.index.contains_key(&c) {
                        found.push(c);
                    }
                    std::ops::ControlFlow::Continue(())
                });
                for c in found {
                    self.push_generated(c, cap)?;
                }
            }
            if self.with_meet {
                for j in 0..=k {
                    let m = meet_unchecked(&self.functions[j], &self.functions[k]);
                    self.push_generated(m, cap)?;
                }
            }
            processed += 1;
        }
        Ok(())
    }

    fn verify_closed(&self) -> Result<()> {
        let n = self.arity;
        let size = self.functions.len();
        for (k, f) in self.functions.iter().enumerate() {
            for i in 1..=n {
                if !self.index.contains_key(&project_unchecked(f, i)) {
                    return Err(Error::NotClosed(format!("R_{i}({}) is missing", self.names[k])));
                }
            }
        }
        let missing = crate::tuples::for_each_tuple(size, n + 1, |t| {
            let inner: Vec<&NPlaceFunction> = t[1..].iter().map(|&j| &self.functions[j]).collect();
            let c = compose_unchecked(&self.functions[t[0]], &inner);
            if self.index.contains_key(&c) {
                std::ops::ControlFlow::Continue(())
            } else {
                std::ops::ControlFlow::Break(t.to_vec())
            }
        });
        if let Some(t) = missing {
            let inner: Vec<&str> = t[1..].iter().map(|&j| self.names[j].as_str()).collect();
            return Err(Error::NotClosed(format!("composite {}[{}] is missing", self.names[t[0]], inner.join(" "))));
        }
        if self.with_meet {
            for x in 0..size {
                for y in x..size {
                    let m = meet_unchecked(&self.functions[x], &self.functions[y]);
                    if !self.index.contains_key(&m) {
                        return Err(Error::NotClosed(format!("meet {} ∧ {} is missing", self.names[x], self.names[y])));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn with_meet(&self) -> bool {
        self.with_meet
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[NPlaceFunction] {
        &self.functions
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn function(&self, k: usize) -> &NPlaceFunction {
        &self.functions[k]
    }

    pub fn index_of(&self, f: &NPlaceFunction) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The member functions as a set of graphs, ignoring order and names.
    pub fn graph_set(&self) -> std::collections::BTreeSet<NPlaceFunction> {
        self.functions.iter().cloned().collect()
    }

    fn check_point(&self, a: usize) -> Result<()> {
        if a >= self.carrier.size() {
            return input(format!("point {a} outside carrier of size {}", self.carrier.size()));
        }
        Ok(())
    }
}

/// Least function system containing `generators`.
///
/// Generators are sorted canonically and deduplicated first, so the result
/// does not depend on the order they were supplied in.
pub fn close_system(
    carrier: Carrier,
    arity: usize,
    generators: &[NPlaceFunction],
    with_meet: bool,
    cap: usize,
) -> Result<FunctionSystem> {
    let mut sorted = generators.to_vec();
    sorted.sort();
    sorted.dedup();
    let named = sorted.into_iter().enumerate().map(|(k, f)| (format!("f{k}"), f)).collect();
    FunctionSystem::complete(carrier, arity, named, with_meet, cap)
}

/// Members fixing the diagonal point: `f(a, .., a) = a`.
pub fn semantic_stabilizer(system: &FunctionSystem, a: usize) -> Result<ElementSet> {
    system.check_point(a)?;
    Ok(ElementSet::from_predicate(system.len(), |k| system.functions[k].eval_diagonal(a) == Some(a)))
}

/// Members whose domain contains the diagonal point `(a, .., a)`.
pub fn semantic_domain_class(system: &FunctionSystem, a: usize) -> Result<ElementSet> {
    system.check_point(a)?;
    Ok(ElementSet::from_predicate(system.len(), |k| system.functions[k].eval_diagonal(a).is_some()))
}

/// Position of an argument tuple in the lexicographic tuple order.
pub fn tuple_index(carrier: Carrier, args: &[usize]) -> usize {
    encode(carrier.size(), args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Carrier {
        Carrier::new(2).unwrap()
    }

    fn unary(pairs: &[(usize, usize)]) -> NPlaceFunction {
        NPlaceFunction::new(c2(), 1, pairs.iter().map(|&(a, v)| (vec![a], v))).unwrap()
    }

    fn sys1_gens() -> Vec<NPlaceFunction> {
        vec![unary(&[(0, 0), (1, 1)]), unary(&[(0, 0), (1, 0)]), unary(&[(0, 1), (1, 1)])]
    }

    #[test]
    fn constant_absorbs_identity() {
        let [id, c0, _] = <[NPlaceFunction; 3]>::try_from(sys1_gens()).unwrap();
        assert_eq!(compose_menger(&id, std::slice::from_ref(&c0)).unwrap(), c0);
        assert_eq!(compose_menger(&c0, &[id]).unwrap(), c0);
    }

    #[test]
    fn composition_respects_partiality() {
        let f = NPlaceFunction::new(c2(), 2, [(vec![0, 0], 0)]).unwrap();
        let g1 = NPlaceFunction::constant(c2(), 2, 0).unwrap();
        let g2 = NPlaceFunction::new(c2(), 2, [(vec![1, 1], 0)]).unwrap();
        let h = compose_menger(&f, &[g1, g2]).unwrap();
        // pointwise oracle over all four argument tuples
        let expected = NPlaceFunction::new(c2(), 2, [(vec![1, 1], 0)]).unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn composition_arity_mismatch() {
        let f = NPlaceFunction::constant(c2(), 2, 0).unwrap();
        let g = NPlaceFunction::constant(c2(), 1, 0).unwrap();
        assert!(compose_menger(&f, &[g.clone(), g.clone()]).is_err());
        assert!(compose_menger(&f, std::slice::from_ref(&f)).is_err());
    }

    #[test]
    fn projections() {
        let f = NPlaceFunction::constant(c2(), 2, 1).unwrap();
        assert_eq!(project(&f, 1).unwrap(), NPlaceFunction::selector(c2(), 2, 1).unwrap());
        let g = NPlaceFunction::new(c2(), 2, [(vec![0, 1], 0)]).unwrap();
        assert_eq!(project(&g, 2).unwrap(), NPlaceFunction::new(c2(), 2, [(vec![0, 1], 1)]).unwrap());
        assert!(project(&g, 3).is_err());
        assert!(project(&g, 0).is_err());
    }

    #[test]
    fn meets() {
        let [id, c0, c1] = <[NPlaceFunction; 3]>::try_from(sys1_gens()).unwrap();
        assert_eq!(meet(&c0, &c0).unwrap(), c0);
        assert_eq!(meet(&c0, &c1).unwrap(), NPlaceFunction::empty(c2(), 1));
        assert_eq!(meet(&id, &c0).unwrap(), unary(&[(0, 0)]));
    }

    #[test]
    fn sys1_closure() {
        let sys = close_system(c2(), 1, &sys1_gens(), false, DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(sys.len(), 3);
        let sys_m = close_system(c2(), 1, &sys1_gens(), true, DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(sys_m.len(), 8);
        let expected: std::collections::BTreeSet<_> = [
            unary(&[(0, 0), (1, 1)]),
            unary(&[(0, 0), (1, 0)]),
            unary(&[(0, 1), (1, 1)]),
            unary(&[(0, 0)]),
            unary(&[(1, 1)]),
            unary(&[(0, 1)]),
            unary(&[(1, 0)]),
            NPlaceFunction::empty(c2(), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(sys_m.graph_set(), expected);
    }

    #[test]
    fn empty_generators_rejected() {
        assert!(close_system(c2(), 1, &[], false, DEFAULT_CLOSURE_CAP).is_err());
    }

    #[test]
    fn cap_enforced() {
        let r = close_system(c2(), 1, &sys1_gens(), true, 5);
        assert!(matches!(r, Err(Error::ClosureCap { cap: 5 })));
    }

    #[test]
    fn from_functions_detects_missing_composite() {
        let [id, c0, _] = <[NPlaceFunction; 3]>::try_from(sys1_gens()).unwrap();
        // {c0} alone lacks R_1 c0 = id
        let r = FunctionSystem::from_functions(c2(), 1, vec![("c0".into(), c0.clone())], false);
        assert!(matches!(r, Err(Error::NotClosed(_))));
        let ok = FunctionSystem::from_functions(c2(), 1, vec![("id".into(), id), ("c0".into(), c0)], false);
        assert!(ok.is_ok());
    }

    #[test]
    fn stabilizers_of_sys1() {
        let named = vec![
            ("id".to_string(), unary(&[(0, 0), (1, 1)])),
            ("c0".to_string(), unary(&[(0, 0), (1, 0)])),
            ("c1".to_string(), unary(&[(0, 1), (1, 1)])),
        ];
        let sys = FunctionSystem::from_functions(c2(), 1, named, false).unwrap();
        assert_eq!(semantic_stabilizer(&sys, 0).unwrap().to_vec(), vec![0, 1]);
        assert_eq!(semantic_stabilizer(&sys, 1).unwrap().to_vec(), vec![0, 2]);
        assert_eq!(semantic_domain_class(&sys, 0).unwrap().len(), 3);
        assert!(semantic_stabilizer(&sys, 2).is_err());
    }

    #[test]
    fn domain_class_with_meet() {
        let sys = close_system(c2(), 1, &sys1_gens(), true, DEFAULT_CLOSURE_CAP).unwrap();
        let dom1 = semantic_domain_class(&sys, 1).unwrap();
        let members: std::collections::BTreeSet<_> = dom1.iter().map(|k| sys.function(k).clone()).collect();
        let expected: std::collections::BTreeSet<_> = [
            unary(&[(0, 0), (1, 1)]),
            unary(&[(0, 0), (1, 0)]),
            unary(&[(0, 1), (1, 1)]),
            unary(&[(1, 1)]),
            unary(&[(1, 0)]),
        ]
        .into_iter()
        .collect();
        assert_eq!(members, expected);
        let stab0 = semantic_stabilizer(&sys, 0).unwrap();
        assert_eq!(stab0.len(), 3);
        assert!(stab0.is_subset(&semantic_domain_class(&sys, 0).unwrap()));
    }

    #[test]
    fn closing_a_closed_system_is_identity() {
        let sys = close_system(c2(), 1, &sys1_gens(), true, DEFAULT_CLOSURE_CAP).unwrap();
        let named: Vec<_> = sys.names().iter().cloned().zip(sys.functions().iter().cloned()).collect();
        let again = FunctionSystem::complete(c2(), 1, named, true, DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(again, sys);
    }
}
