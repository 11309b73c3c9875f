//! Finite abstract Menger algebras given by operation tables.

mod axioms;
mod relation;
mod subset;

use rustc_hash::FxHashMap as HashMap;
use std::hash::{Hash, Hasher};

pub use axioms::{check_axioms, Axiom, AxiomReport, AxiomResult, AxiomStatus};
pub use relation::{
    check_relation_laws, chi, is_antisymmetric, is_i_regular, is_l_regular, is_reflexive, is_stable, is_transitive,
    is_v_negative, is_v_regular, relation_props, zeta, BinaryRelation, RelationProps,
};
pub use subset::{
    is_l_ideal, is_l_unitary, is_meet_quasi_stable, is_meet_stable, is_quasi_stable, is_stable_subset, is_v_unitary,
    subset_props, SubsetReport,
};

use crate::error::{input, Error, Result};
use crate::function::{meet, project, FunctionSystem};
use crate::tuples::{decode, encode};

/// Upper bound on `size^(arity+1)`, the number of entries in the operation table.
pub const MAX_TABLE_ENTRIES: usize = 1 << 24;

/// A finite algebra `(G, o, R_1, .., R_n)` with an optional meet.
///
/// Elements are `0..size`. `op` is indexed by `x * size^n + code(y1..yn)`.
#[derive(Clone, Debug)]
pub struct MengerAlgebra {
    size: usize,
    arity: usize,
    op: Vec<usize>,
    proj: Vec<Vec<usize>>,
    meet: Option<Vec<usize>>,
    labels: Option<Vec<String>>,
    column: usize,
}

impl PartialEq for MengerAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.arity == other.arity
            && self.op == other.op
            && self.proj == other.proj
            && self.meet == other.meet
            && self.labels == other.labels
    }
}

impl MengerAlgebra {
    pub fn new(
        size: usize,
        arity: usize,
        op: Vec<usize>,
        proj: Vec<Vec<usize>>,
        meet: Option<Vec<usize>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if size == 0 {
            return input("algebra must have at least one element");
        }
        if arity == 0 {
            return input("arity must be at least 1");
        }
        let column = table_len(size, arity)?;
        if op.len() != size * column {
            return input(format!("operation table has {} entries, expected {}", op.len(), size * column));
        }
        if let Some(bad) = op.iter().position(|&v| v >= size) {
            return input(format!("operation table entry {bad} is out of range"));
        }
        if proj.len() != arity {
            return input(format!("expected {arity} projection tables, got {}", proj.len()));
        }
        for (i, p) in proj.iter().enumerate() {
            if p.len() != size || p.iter().any(|&v| v >= size) {
                return input(format!("projection table R_{} is malformed", i + 1));
            }
        }
        if let Some(m) = &meet {
            if m.len() != size * size || m.iter().any(|&v| v >= size) {
                return input("meet table is malformed");
            }
        }
        if let Some(l) = &labels {
            if l.len() != size {
                return input(format!("expected {size} labels, got {}", l.len()));
            }
        }
        Ok(MengerAlgebra { size, arity, op, proj, meet, labels, column })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn has_meet(&self) -> bool {
        self.meet.is_some()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of an element: its label, or its index.
    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    /// Resolves an element by label or decimal index.
    pub fn element_by_label(&self, name: &str) -> Option<usize> {
        self.labels.as_ref().and_then(|l| l.iter().position(|s| s == name))
    }

    /// `x[y1 .. yn]`.
    #[inline]
    pub fn compose(&self, x: usize, ys: &[usize]) -> usize {
        self.op[x * self.column + encode(self.size, ys)]
    }

    /// `x[ys]` with `ys` already encoded as a column index.
    #[inline]
    pub(crate) fn compose_coded(&self, x: usize, column: usize) -> usize {
        self.op[x * self.column + column]
    }

    /// Number of argument tuples, `size^n`.
    pub(crate) fn columns(&self) -> usize {
        self.column
    }

    /// `R_i x` for `i` in `1..=n`.
    #[inline]
    pub fn proj(&self, i: usize, x: usize) -> usize {
        self.proj[i - 1][x]
    }

    /// `x[R_1 y .. R_n y]`, the restriction of `x` to the domain of `y`.
    #[inline]
    pub fn restrict(&self, x: usize, y: usize) -> usize {
        let code = self.proj.iter().fold(0, |acc, p| acc * self.size + p[y]);
        self.compose_coded(x, code)
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> Option<usize> {
        self.meet.as_ref().map(|m| m[x * self.size + y])
    }

    pub(crate) fn meet_table(&self) -> Option<&[usize]> {
        self.meet.as_deref()
    }

    pub(crate) fn op_table(&self) -> &[usize] {
        &self.op
    }

    pub(crate) fn proj_tables(&self) -> &[Vec<usize>] {
        &self.proj
    }

    /// `u[w1 .. w(i-1) z w(i+1) .. wn]` where `free` lists the `n-1`
    /// coordinates other than `i` (1-based).
    pub fn substitute_at(&self, u: usize, free: &[usize], i: usize, z: usize) -> Result<usize> {
        if i == 0 || i > self.arity {
            return input(format!("substitution index {i} outside 1..={}", self.arity));
        }
        if free.len() + 1 != self.arity {
            return input(format!("substitution context needs {} elements, got {}", self.arity - 1, free.len()));
        }
        if u >= self.size || z >= self.size || free.iter().any(|&w| w >= self.size) {
            return input("substitution element out of range");
        }
        Ok(Context::At { u, free: free.to_vec(), i }.apply(self, z))
    }

    /// `u[w̄|_i z]` without bounds checks.
    #[inline]
    pub(crate) fn plug(&self, u: usize, free: &[usize], i: usize, z: usize) -> usize {
        let (before, after) = free.split_at(i - 1);
        let code = before.iter().chain(std::iter::once(&z)).chain(after).fold(0, |acc, &v| acc * self.size + v);
        self.compose_coded(u, code)
    }

    /// Every one-hole context `u[w̄|_i ·]`, in `(u, w̄, i)` lexicographic order.
    pub fn contexts(&self) -> Vec<Context> {
        let n = self.arity;
        let mut out = Vec::with_capacity(self.size * self.column);
        let mut free = vec![0usize; n - 1];
        for u in 0..self.size {
            for code in 0..self.size.pow((n - 1) as u32) {
                decode(self.size, code, &mut free);
                for i in 1..=n {
                    out.push(Context::At { u, free: free.clone(), i });
                }
            }
        }
        out
    }

    /// Distinct unary maps `z ↦ u[w̄|_i z]` in first-occurrence order.
    pub(crate) fn context_maps(&self) -> Vec<Vec<usize>> {
        let mut seen: HashMap<Vec<usize>, ()> = HashMap::default();
        let mut out = Vec::new();
        for ctx in self.contexts() {
            let map: Vec<usize> = (0..self.size).map(|z| ctx.apply(self, z)).collect();
            if seen.insert(map.clone(), ()).is_none() {
                out.push(map);
            }
        }
        out
    }

    /// Stable fingerprint of the tables, used to tie representations to
    /// their source algebra.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.size.hash(&mut h);
        self.arity.hash(&mut h);
        self.op.hash(&mut h);
        self.proj.hash(&mut h);
        self.meet.hash(&mut h);
        h.finish()
    }

    /// Returns a copy with one operation-table entry overwritten.
    pub fn with_op_entry(&self, x: usize, ys: &[usize], value: usize) -> Result<Self> {
        if value >= self.size {
            return input("replacement value out of range");
        }
        let mut op = self.op.clone();
        op[x * self.column + encode(self.size, ys)] = value;
        Self::new(self.size, self.arity, op, self.proj.clone(), self.meet.clone(), self.labels.clone())
    }
}

/// Interned column maps `x ↦ x[ȳ]`, one class per distinct map.
pub(crate) struct ColumnClasses {
    pub class_of: Vec<u32>,
    pub maps: Vec<Vec<usize>>,
    pub ids: HashMap<Vec<usize>, u32>,
}

impl ColumnClasses {
    pub fn new(alg: &MengerAlgebra) -> Self {
        let mut ids: HashMap<Vec<usize>, u32> = HashMap::default();
        let mut maps: Vec<Vec<usize>> = Vec::new();
        let mut class_of = Vec::with_capacity(alg.columns());
        for t in 0..alg.columns() {
            let col: Vec<usize> = (0..alg.size()).map(|x| alg.compose_coded(x, t)).collect();
            let next = maps.len() as u32;
            let id = *ids.entry(col.clone()).or_insert_with(|| {
                maps.push(col);
                next
            });
            class_of.push(id);
        }
        ColumnClasses { class_of, maps, ids }
    }
}

fn table_len(size: usize, arity: usize) -> Result<usize> {
    let mut column: usize = 1;
    for _ in 0..arity {
        column = column.checked_mul(size).ok_or_else(|| Error::Input("table too large".into()))?;
    }
    match column.checked_mul(size) {
        Some(total) if total <= MAX_TABLE_ENTRIES => Ok(column),
        _ => input(format!("operation table for size {size} and arity {arity} exceeds {MAX_TABLE_ENTRIES} entries")),
    }
}

/// A one-hole context `u[w̄|_i ·]`, or the empty context whose
/// application to `z` is `z` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Context {
    Empty,
    At { u: usize, free: Vec<usize>, i: usize },
}

impl Context {
    pub fn apply(&self, alg: &MengerAlgebra, z: usize) -> usize {
        match self {
            Context::Empty => z,
            Context::At { u, free, i } => alg.plug(*u, free, *i, z),
        }
    }

    /// Appends this context's variables to a counterexample.
    pub fn describe(&self, a: crate::assignment::Assignment) -> crate::assignment::Assignment {
        match self {
            Context::Empty => a,
            Context::At { u, free, i } => a.with("u", *u).with_tuple("w", free).with("i", *i),
        }
    }
}

/// Tabulates a closed function system as an abstract algebra. Element `k`
/// is the system's `k`-th function and keeps its name as label.
pub fn abstractify(system: &FunctionSystem) -> Result<MengerAlgebra> {
    let size = system.len();
    let n = system.arity();
    let column = table_len(size, n)?;
    let funcs = system.functions();
    let names = system.names();
    let lookup = |f: &crate::function::NPlaceFunction, what: &dyn Fn() -> String| {
        system.index_of(f).ok_or_else(|| Error::NotClosed(format!("{} is missing", what())))
    };

    // dense value tables over argument tuples, u32::MAX where undefined
    let k = system.carrier().size();
    let points = k.pow(n as u32);
    let dense: Vec<Vec<u32>> = funcs
        .iter()
        .map(|f| {
            let mut row = vec![u32::MAX; points];
            for (args, &v) in f.graph() {
                row[encode(k, args)] = v as u32;
            }
            row
        })
        .collect();
    let index: HashMap<&[u32], usize> = dense.iter().enumerate().map(|(j, row)| (row.as_slice(), j)).collect();
    let mut op = Vec::with_capacity(size * column);
    let mut ys = vec![0usize; n];
    let mut composite = vec![0u32; points];
    for x in 0..size {
        for code in 0..column {
            decode(size, code, &mut ys);
            for (a, slot) in composite.iter_mut().enumerate() {
                let inner = ys.iter().try_fold(0usize, |acc, &y| match dense[y][a] {
                    u32::MAX => None,
                    v => Some(acc * k + v as usize),
                });
                *slot = inner.map_or(u32::MAX, |i| dense[x][i]);
            }
            match index.get(composite.as_slice()) {
                Some(&j) => op.push(j),
                None => {
                    let inner: Vec<&str> = ys.iter().map(|&y| names[y].as_str()).collect();
                    return Err(Error::NotClosed(format!("composite {}[{}] is missing", names[x], inner.join(" "))));
                }
            }
        }
    }
    let mut proj = Vec::with_capacity(n);
    for i in 1..=n {
        let mut row = Vec::with_capacity(size);
        for (x, f) in funcs.iter().enumerate() {
            row.push(lookup(&project(f, i)?, &|| format!("R_{i}({})", names[x]))?);
        }
        proj.push(row);
    }
    let meet_table = if system.with_meet() {
        let mut m = Vec::with_capacity(size * size);
        for x in 0..size {
            for y in 0..size {
                m.push(lookup(&meet(&funcs[x], &funcs[y])?, &|| format!("meet {} ∧ {}", names[x], names[y]))?);
            }
        }
        Some(m)
    } else {
        None
    };
    MengerAlgebra::new(size, n, op, proj, meet_table, Some(names.to_vec()))
}
