//! Instance generation and end-to-end cross-checks of the abstract
//! characterizations against the concrete functions they came from.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    abstractify, check_axioms, check_relation_laws, chi, is_l_unitary, is_quasi_stable, is_stable_subset, is_v_unitary,
    relation_props, zeta, MengerAlgebra,
};
use crate::error::{input, Error, Result};
use crate::format::system_to_json;
use crate::function::{
    close_system, semantic_stabilizer, Carrier, FunctionSystem, NPlaceFunction, DEFAULT_CLOSURE_CAP,
};
use crate::set::ElementSet;
use crate::stabilizer::{
    build_witness, check_theorem1, check_theorem2, check_theorem3, check_theorem4, check_theorem5, derived_lemmas,
    WitnessMode,
};
use crate::transforms::{is_normal_v_complex, tn_closure, StageEngine, TransformSet, DEFAULT_TRANSFORM_CAP};
use crate::tuples::decode;

pub const DEFAULT_INSTANCE_CAP: usize = 100_000;
pub const DEFAULT_SWEEP_MAX_SIZE: usize = 10;
pub const DEFAULT_STAGE_MAX_SIZE: usize = 6;
pub const DEFAULT_STAGE_DEPTH: usize = 2;
const RESAMPLE_LIMIT: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GenMode {
    Exhaustive,
    Random,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenParams {
    pub carrier_size: usize,
    pub arity: usize,
    pub max_generators: usize,
    pub with_meet: bool,
    pub seed: u64,
    pub mode: GenMode,
    /// Random mode: number of consecutive seeds starting at `seed`.
    pub samples: usize,
    /// Exhaustive mode: largest number of generator sets to close.
    pub instance_cap: usize,
    pub closure_cap: usize,
}

impl GenParams {
    pub fn exhaustive(carrier_size: usize, arity: usize, max_generators: usize, with_meet: bool) -> Self {
        GenParams {
            carrier_size,
            arity,
            max_generators,
            with_meet,
            seed: 0,
            mode: GenMode::Exhaustive,
            samples: 0,
            instance_cap: DEFAULT_INSTANCE_CAP,
            closure_cap: DEFAULT_CLOSURE_CAP,
        }
    }

    pub fn random(
        carrier_size: usize,
        arity: usize,
        max_generators: usize,
        with_meet: bool,
        seed: u64,
        samples: usize,
    ) -> Self {
        GenParams {
            seed,
            mode: GenMode::Random,
            samples,
            ..Self::exhaustive(carrier_size, arity, max_generators, with_meet)
        }
    }

    fn validate(&self) -> Result<Carrier> {
        if self.arity == 0 || self.max_generators == 0 {
            return input("arity and max_generators must be at least 1");
        }
        Carrier::new(self.carrier_size)
    }
}

/// A closed system with the generators it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedSystem {
    pub generators: Vec<NPlaceFunction>,
    pub system: FunctionSystem,
    /// Samples rejected for exceeding the closure cap before this one.
    pub resamples: usize,
}

/// Number of partial functions of the given shape, if it fits in `usize`.
pub fn partial_function_count(carrier_size: usize, arity: usize) -> Option<usize> {
    let tuples = carrier_size.checked_pow(u32::try_from(arity).ok()?)?;
    (carrier_size + 1).checked_pow(u32::try_from(tuples).ok()?)
}

/// The partial function with base-`(k+1)` code `index`; digit `k` is undefined.
fn partial_function(carrier: Carrier, arity: usize, index: usize) -> NPlaceFunction {
    let k = carrier.size();
    let tuples = k.pow(arity as u32);
    let mut digits = vec![0usize; tuples];
    decode(k + 1, index, &mut digits);
    NPlaceFunction::from_fn(carrier, arity, |t| {
        let v = digits[crate::tuples::encode(k, t)];
        (v < k).then_some(v)
    })
    .expect("digits are in range")
}

fn binomial(n: usize, r: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for j in 0..r {
        acc = acc.checked_mul(n - j)? / (j + 1);
    }
    Some(acc)
}

/// Every system generated by at most `max_generators` partial functions,
/// in order of first appearance, one per distinct closure.
pub fn enumerate_systems(params: &GenParams) -> Result<Vec<GeneratedSystem>> {
    let carrier = params.validate()?;
    let too_many = || Error::EnumerationCap(format!("more than {} generator sets", params.instance_cap));
    let p = partial_function_count(params.carrier_size, params.arity).ok_or_else(too_many)?;
    let r = params.max_generators.min(p);
    let mut total = 0usize;
    for j in 1..=r {
        total = binomial(p, j).and_then(|c| total.checked_add(c)).ok_or_else(too_many)?;
    }
    if total > params.instance_cap {
        return Err(too_many());
    }
    let pool: Vec<NPlaceFunction> = (0..p).map(|i| partial_function(carrier, params.arity, i)).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for j in 1..=r {
        let mut combo: Vec<usize> = (0..j).collect();
        loop {
            let generators: Vec<NPlaceFunction> = combo.iter().map(|&i| pool[i].clone()).collect();
            let system = close_system(carrier, params.arity, &generators, params.with_meet, params.closure_cap)?;
            if seen.insert(system.graph_set()) {
                out.push(GeneratedSystem { generators, system, resamples: 0 });
            }
            if !next_combination(&mut combo, p) {
                break;
            }
        }
    }
    Ok(out)
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let r = combo.len();
    let Some(i) = (0..r).rev().find(|&i| combo[i] < n - r + i) else {
        return false;
    };
    combo[i] += 1;
    for j in i + 1..r {
        combo[j] = combo[j - 1] + 1;
    }
    true
}

/// A system closed from `max_generators` uniformly random partial
/// functions drawn from a ChaCha8 stream seeded with `seed`.
pub fn random_system(params: &GenParams, seed: u64) -> Result<GeneratedSystem> {
    let carrier = params.validate()?;
    let k = params.carrier_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for resamples in 0..RESAMPLE_LIMIT {
        let generators: Vec<NPlaceFunction> = (0..params.max_generators)
            .map(|_| {
                NPlaceFunction::from_fn(carrier, params.arity, |_| {
                    let v = rng.gen_range(0..=k);
                    (v < k).then_some(v)
                })
                .expect("values are in range")
            })
            .collect();
        match close_system(carrier, params.arity, &generators, params.with_meet, params.closure_cap) {
            Ok(system) => return Ok(GeneratedSystem { generators, system, resamples }),
            Err(Error::ClosureCap { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ClosureCap { cap: params.closure_cap })
}

/// The instances described by `params`.
pub fn generate(params: &GenParams) -> Result<Vec<GeneratedSystem>> {
    match params.mode {
        GenMode::Exhaustive => enumerate_systems(params),
        GenMode::Random => {
            (0..params.samples as u64).map(|j| random_system(params, params.seed.wrapping_add(j))).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrosscheckOptions {
    /// Largest algebra whose nonempty subsets are all swept.
    pub sweep_max_size: usize,
    /// Largest algebra on which theorem 3 and the stage conditions are compared.
    pub stage_max_size: usize,
    /// Deepest stage compared against the closure.
    pub stage_depth: usize,
    pub transform_cap: usize,
}

impl Default for CrosscheckOptions {
    fn default() -> Self {
        CrosscheckOptions {
            sweep_max_size: DEFAULT_SWEEP_MAX_SIZE,
            stage_max_size: DEFAULT_STAGE_MAX_SIZE,
            stage_depth: DEFAULT_STAGE_DEPTH,
            transform_cap: DEFAULT_TRANSFORM_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Point,
    Sweep,
}

/// One `(instance, H)` verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub instance: usize,
    #[serde(rename = "H")]
    pub h: Vec<usize>,
    pub source: Source,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    pub theorem2: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem5: Option<bool>,
    /// A witness was built and verified for every passing characterization.
    pub witness: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub instance: usize,
    pub check: String,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<usize>>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub points: usize,
    pub swept: usize,
    pub pruned: usize,
    pub theorem2_pass: usize,
    pub theorem5_pass: usize,
    pub witnesses: usize,
    pub chains: usize,
    pub theorem3_compared: usize,
    pub stage_compared: usize,
}

impl Counts {
    fn add(&mut self, other: &Counts) {
        self.points += other.points;
        self.swept += other.swept;
        self.pruned += other.pruned;
        self.theorem2_pass += other.theorem2_pass;
        self.theorem5_pass += other.theorem5_pass;
        self.witnesses += other.witnesses;
        self.chains += other.chains;
        self.theorem3_compared += other.theorem3_compared;
        self.stage_compared += other.stage_compared;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub instance: usize,
    pub size: usize,
    pub with_meet: bool,
    pub sweep_skipped: bool,
    pub counts: Counts,
    pub records: Vec<Record>,
    pub discrepancies: Vec<Discrepancy>,
}

impl InstanceReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

struct Checker<'a> {
    report: InstanceReport,
    alg: &'a MengerAlgebra,
}

impl Checker<'_> {
    fn flag(&mut self, check: &str, h: Option<&ElementSet>, ok: bool, detail: impl FnOnce() -> String) -> bool {
        if !ok {
            self.report.discrepancies.push(Discrepancy {
                instance: self.report.instance,
                check: check.to_string(),
                h: h.map(ElementSet::to_vec),
                detail: detail(),
            });
        }
        ok
    }

    fn error(&mut self, check: &str, h: Option<&ElementSet>, err: &Error) {
        self.flag(check, h, false, || err.to_string());
    }
}

fn projections_within(alg: &MengerAlgebra, h: &ElementSet) -> bool {
    h.iter().all(|x| (1..=alg.arity()).all(|i| h.contains(alg.proj(i, x))))
}

/// Runs every cross-check on one closed system.
pub fn crosscheck_instance(instance: usize, system: &FunctionSystem, opts: &CrosscheckOptions) -> InstanceReport {
    let report = InstanceReport {
        instance,
        size: system.len(),
        with_meet: system.with_meet(),
        sweep_skipped: system.len() > opts.sweep_max_size,
        counts: Counts::default(),
        records: Vec::new(),
        discrepancies: Vec::new(),
    };
    let mut report = report;
    let alg = match abstractify(system) {
        Ok(alg) => alg,
        Err(e) => {
            report.discrepancies.push(Discrepancy {
                instance,
                check: "abstractify".into(),
                h: None,
                detail: e.to_string(),
            });
            return report;
        }
    };
    let mut c = Checker { report, alg: &alg };
    check_structure(&mut c, system);
    let tn = match tn_closure(&alg, opts.transform_cap) {
        Ok(tn) => tn,
        Err(e) => {
            c.error("transforms", None, &e);
            return c.report;
        }
    };
    check_points(&mut c, system, &tn);
    if !c.report.sweep_skipped {
        sweep(&mut c, &tn, opts);
    }
    if alg.size() <= opts.stage_max_size {
        compare_stages(&mut c, &tn, opts);
    }
    c.report
}

fn check_structure(c: &mut Checker, system: &FunctionSystem) {
    let alg = c.alg;
    let axioms = check_axioms(alg);
    if let Some(f) = axioms.first_failure() {
        let detail =
            format!("{:?} fails at {}", f.axiom, f.counterexample.as_ref().map(|w| w.to_string()).unwrap_or_default());
        c.flag("axioms", None, false, || detail);
    }
    if system.with_meet() && !alg.has_meet() {
        c.flag("axioms", None, false, || "meet-closed system abstractified without a meet".into());
    }
    let le = zeta(alg);
    let sq = chi(alg);
    let f = system.functions();
    for x in 0..alg.size() {
        for y in 0..alg.size() {
            let graph = f[x].is_restriction_of(&f[y]);
            c.flag("zeta-is-graph-inclusion", None, le.contains(x, y) == graph, || format!("x={x} y={y}"));
            let domain = f[x].domain_within(&f[y]);
            c.flag("chi-is-domain-inclusion", None, sq.contains(x, y) == domain, || format!("x={x} y={y}"));
        }
    }
    let zp = relation_props(alg, &le);
    c.flag("zeta-order", None, zp.is_order(), || "zeta is not an order".into());
    c.flag("zeta-stable", None, zp.stable.holds, || format!("{:?}", zp.stable.counterexample));
    let cp = relation_props(alg, &sq);
    c.flag("chi-quasi-order", None, cp.is_quasi_order(), || "chi is not a quasi-order".into());
    c.flag("chi-l-regular", None, cp.l_regular.holds, || format!("{:?}", cp.l_regular.counterexample));
    c.flag("chi-v-negative", None, cp.v_negative.holds, || format!("{:?}", cp.v_negative.counterexample));
    c.flag("chi-contains-zeta", None, le.is_subset(&sq), || "zeta is not inside chi".into());
    for (law, flag) in check_relation_laws(alg) {
        c.flag(&format!("law:{law}"), None, flag.holds, || format!("{:?}", flag.counterexample));
    }
}

fn check_points(c: &mut Checker, system: &FunctionSystem, tn: &TransformSet) {
    let alg = c.alg;
    for a in 0..system.carrier().size() {
        let h = semantic_stabilizer(system, a).expect("point in range");
        if h.is_empty() {
            continue;
        }
        c.report.counts.points += 1;
        let mut ok = true;
        let t2 = match check_theorem2(alg, tn, &h) {
            Ok(v) => {
                let detail =
                    || format!("point {a}: {} ({})", v.failed.clone().unwrap_or_default(), witness_text(&v.witness));
                ok &= c.flag("necessity:theorem2", Some(&h), v.pass, detail);
                v.pass
            }
            Err(e) => {
                c.error("necessity:theorem2", Some(&h), &e);
                ok = false;
                false
            }
        };
        let t5 = system.with_meet().then(|| match check_theorem5(alg, &h) {
            Ok(v) => {
                let detail =
                    || format!("point {a}: {} ({})", v.failed.clone().unwrap_or_default(), witness_text(&v.witness));
                ok &= c.flag("necessity:theorem5", Some(&h), v.pass, detail);
                v.pass
            }
            Err(e) => {
                c.error("necessity:theorem5", Some(&h), &e);
                ok = false;
                false
            }
        });
        c.report.records.push(Record {
            instance: c.report.instance,
            h: h.to_vec(),
            source: Source::Point,
            point: Some(a),
            theorem2: t2,
            theorem5: t5,
            witness: false,
            ok,
        });
    }
}

fn witness_text(w: &Option<crate::assignment::Assignment>) -> String {
    w.as_ref().map(|w| w.to_string()).unwrap_or_default()
}

fn sweep(c: &mut Checker, tn: &TransformSet, opts: &CrosscheckOptions) {
    let alg = c.alg;
    let g = alg.size();
    let compare_theorem3 = g <= opts.stage_max_size;
    for mask in 1u64..(1u64 << g) {
        let h = ElementSet::from_mask(g, mask);
        let closed = projections_within(alg, &h);
        let quasi = is_quasi_stable(alg, &h).holds;
        if is_stable_subset(alg, &h).holds {
            c.flag("lemma:stable-implies-quasi-stable", Some(&h), quasi, String::new);
        }
        if closed && is_l_unitary(alg, &h).holds {
            match is_normal_v_complex(alg, tn, &h) {
                Ok(f) if f.holds => {
                    let v = is_v_unitary(alg, &h);
                    c.flag("lemma:l-unitary-implies-v-unitary", Some(&h), v.holds, || witness_text(&v.counterexample));
                }
                Ok(_) => {}
                Err(e) => c.error("lemma:l-unitary-implies-v-unitary", Some(&h), &e),
            }
        }
        if compare_theorem3 {
            compare_theorem3_on(c, tn, &h);
        }
        if !(closed && quasi) {
            c.report.counts.pruned += 1;
            continue;
        }
        c.report.counts.swept += 1;
        let before = c.report.discrepancies.len();
        let mut witnessed = true;
        let t2 = match sufficiency_theorem2(c, tn, &h) {
            Ok(pass) => pass,
            Err(e) => {
                c.error("sufficiency:theorem2", Some(&h), &e);
                false
            }
        };
        witnessed &= !t2 || c.report.discrepancies.len() == before;
        let t5 = alg.has_meet().then(|| match sufficiency_theorem5(c, tn, &h) {
            Ok(pass) => pass,
            Err(e) => {
                c.error("sufficiency:theorem5", Some(&h), &e);
                false
            }
        });
        let ok = c.report.discrepancies.len() == before;
        witnessed &= ok;
        c.report.records.push(Record {
            instance: c.report.instance,
            h: h.to_vec(),
            source: Source::Sweep,
            point: None,
            theorem2: t2,
            theorem5: t5,
            witness: (t2 || t5 == Some(true)) && witnessed,
            ok,
        });
    }
}

fn sufficiency_theorem2(c: &mut Checker, tn: &TransformSet, h: &ElementSet) -> Result<bool> {
    let alg = c.alg;
    let verdict = check_theorem2(alg, tn, h)?;
    if !verdict.pass {
        return Ok(false);
    }
    c.report.counts.theorem2_pass += 1;
    let u = verdict.artifacts.u.clone().expect("a passing verdict carries U");
    let chain = check_theorem1(alg, tn, h, &u)?;
    c.report.counts.chains += 1;
    c.flag("chain:theorem2-implies-theorem1", Some(h), chain.pass, || {
        format!("{} ({})", chain.failed.clone().unwrap_or_default(), witness_text(&chain.witness))
    });
    let w = build_witness(alg, tn, h, &WitnessMode::Theorem2)?;
    c.report.counts.witnesses += 1;
    for (name, flag) in derived_lemmas(alg, h, &w.u, &w.equivalence) {
        c.flag(&format!("lemma:{name}"), Some(h), flag.holds, || witness_text(&flag.counterexample));
    }
    Ok(true)
}

fn sufficiency_theorem5(c: &mut Checker, tn: &TransformSet, h: &ElementSet) -> Result<bool> {
    let alg = c.alg;
    let verdict = check_theorem5(alg, h)?;
    if !verdict.pass {
        return Ok(false);
    }
    c.report.counts.theorem5_pass += 1;
    let u0 = verdict.artifacts.u0.clone().expect("a passing verdict carries U0");
    let chain = check_theorem4(alg, h, &u0)?;
    c.report.counts.chains += 1;
    c.flag("chain:theorem5-implies-theorem4", Some(h), chain.pass, || {
        format!("{} ({})", chain.failed.clone().unwrap_or_default(), witness_text(&chain.witness))
    });
    let w = build_witness(alg, tn, h, &WitnessMode::Theorem4(None))?;
    c.report.counts.witnesses += 1;
    for (name, flag) in derived_lemmas(alg, h, &w.u, &w.equivalence) {
        c.flag(&format!("lemma:{name}"), Some(h), flag.holds, || witness_text(&flag.counterexample));
    }
    Ok(true)
}

fn compare_theorem3_on(c: &mut Checker, tn: &TransformSet, h: &ElementSet) {
    let alg = c.alg;
    let outcome = (|| -> Result<(bool, bool)> {
        let engine = StageEngine::new(alg, tn, h)?;
        let m_max = engine.closure(h)?.fixpoint_stage().max(1);
        Ok((check_theorem2(alg, tn, h)?.pass, check_theorem3(alg, tn, h, m_max)?.pass))
    })();
    match outcome {
        Ok((t2, t3)) => {
            c.report.counts.theorem3_compared += 1;
            c.flag("theorem3-agreement", Some(h), t2 == t3, || format!("theorem2={t2} theorem3={t3}"));
        }
        Err(e) => c.error("theorem3-agreement", Some(h), &e),
    }
}

fn compare_stages(c: &mut Checker, tn: &TransformSet, opts: &CrosscheckOptions) {
    let alg = c.alg;
    let g = alg.size();
    for mask in 1u64..(1u64 << g) {
        let h = ElementSet::from_mask(g, mask);
        let outcome = (|| -> Result<Vec<(usize, usize, bool, bool)>> {
            let engine = StageEngine::new(alg, tn, &h)?;
            let staged = engine.closure(&h)?;
            let mut out = Vec::new();
            for m in 1..=opts.stage_depth {
                for x in 0..g {
                    out.push((m, x, engine.stage_condition(&h, m, x, opts.stage_depth)?, staged.stage(m).contains(x)));
                }
            }
            Ok(out)
        })();
        match outcome {
            Ok(rows) => {
                for (m, x, cond, member) in rows {
                    c.report.counts.stage_compared += 1;
                    c.flag("stage-agreement", Some(&h), cond == member, || {
                        format!("m={m} g={x}: condition={cond} closure={member}")
                    });
                }
            }
            Err(e) => c.error("stage-agreement", Some(&h), &e),
        }
    }
}

/// A discrepancy with a self-contained reproduction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bundle {
    pub check: String,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<usize>>,
    pub detail: String,
    pub generators: usize,
    pub system: serde_json::Value,
}

/// Drops generators one at a time while the closure still shows a
/// discrepancy of the same kind.
pub fn minimize(generated: &GeneratedSystem, check: &str, opts: &CrosscheckOptions) -> Result<Bundle> {
    let system = &generated.system;
    let (carrier, arity, with_meet) = (system.carrier(), system.arity(), system.with_meet());
    let mut generators = generated.generators.clone();
    let mut current = system.clone();
    let mut finding = first_of_kind(&crosscheck_instance(0, &current, opts), check)
        .ok_or_else(|| Error::Input(format!("no {check} discrepancy to minimize")))?;
    let mut progress = true;
    while progress && generators.len() > 1 {
        progress = false;
        for j in 0..generators.len() {
            let mut fewer = generators.clone();
            fewer.remove(j);
            let Ok(candidate) = close_system(carrier, arity, &fewer, with_meet, DEFAULT_CLOSURE_CAP) else {
                continue;
            };
            if let Some(d) = first_of_kind(&crosscheck_instance(0, &candidate, opts), check) {
                generators = fewer;
                current = candidate;
                finding = d;
                progress = true;
                break;
            }
        }
    }
    let system = serde_json::from_str(&system_to_json(&current))?;
    Ok(Bundle { check: finding.check, h: finding.h, detail: finding.detail, generators: generators.len(), system })
}

fn first_of_kind(report: &InstanceReport, check: &str) -> Option<Discrepancy> {
    report.discrepancies.iter().find(|d| d.check == check).cloned()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub largest: usize,
    pub sweeps_skipped: usize,
    pub counts: Counts,
    pub records: usize,
    pub discrepancies: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessReport {
    pub params: GenParams,
    pub instances: Vec<InstanceReport>,
    pub bundles: Vec<Bundle>,
    pub summary: Summary,
}

impl HarnessReport {
    pub fn is_clean(&self) -> bool {
        self.summary.discrepancies == 0
    }

    /// One record per `(instance, H)` verdict, then each discrepancy
    /// bundle, then the summary.
    pub fn write_jsonl(&self, out: &mut impl Write) -> std::io::Result<()> {
        for report in &self.instances {
            for record in &report.records {
                writeln!(out, "{}", serde_json::to_string(record)?)?;
            }
        }
        for bundle in &self.bundles {
            writeln!(out, "{}", serde_json::json!({ "discrepancy": bundle }))?;
        }
        writeln!(out, "{}", serde_json::json!({ "summary": self.summary }))
    }
}

/// Cross-checks every instance on all available cores. Reports come back
/// in instance order.
pub fn crosscheck_all(systems: &[GeneratedSystem], opts: &CrosscheckOptions) -> Vec<InstanceReport> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(systems.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut reports: Vec<InstanceReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut mine = Vec::new();
                    loop {
                        let j = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if j >= systems.len() {
                            return mine;
                        }
                        mine.push(crosscheck_instance(j, &systems[j].system, opts));
                    }
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    reports.sort_by_key(|r| r.instance);
    reports
}

pub fn run_harness(params: &GenParams, opts: &CrosscheckOptions) -> Result<HarnessReport> {
    let systems = generate(params)?;
    let instances = crosscheck_all(&systems, opts);
    let mut summary = Summary { instances: instances.len(), ..Summary::default() };
    let mut bundles = Vec::new();
    for report in &instances {
        summary.largest = summary.largest.max(report.size);
        summary.sweeps_skipped += usize::from(report.sweep_skipped);
        summary.counts.add(&report.counts);
        summary.records += report.records.len();
        summary.discrepancies += report.discrepancies.len();
        let mut kinds: Vec<&str> = report.discrepancies.iter().map(|d| d.check.as_str()).collect();
        kinds.dedup();
        for kind in kinds {
            bundles.push(minimize(&systems[report.instance], kind, opts)?);
        }
    }
    Ok(HarnessReport { params: params.clone(), instances, bundles, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;

    #[test]
    fn partial_function_codes() {
        let c = Carrier::new(2).unwrap();
        assert_eq!(partial_function_count(2, 1), Some(9));
        assert_eq!(partial_function_count(2, 2), Some(81));
        assert_eq!(partial_function(c, 1, 0), unary(&[(0, 0), (1, 0)]));
        assert_eq!(partial_function(c, 1, 8), NPlaceFunction::empty(c, 1));
        assert_eq!(partial_function(c, 1, 1), unary(&[(0, 0), (1, 1)]));
        assert_eq!(partial_function(c, 1, 2), unary(&[(0, 0)]));
    }

    #[test]
    fn single_point_systems() {
        let systems = enumerate_systems(&GenParams::exhaustive(1, 1, 2, false)).unwrap();
        let sizes: Vec<usize> = systems.iter().map(|s| s.system.len()).collect();
        assert_eq!(sizes, vec![1, 1, 2]);
    }

    #[test]
    fn enumeration_contains_the_fixture_and_dedupes() {
        let systems = enumerate_systems(&GenParams::exhaustive(2, 1, 2, false)).unwrap();
        let sets: Vec<_> = systems.iter().map(|s| s.system.graph_set()).collect();
        assert!(sets.contains(&sys1().graph_set()));
        let distinct: BTreeSet<_> = sets.iter().cloned().collect();
        assert_eq!(distinct.len(), sets.len());
    }

    #[test]
    fn enumeration_cap() {
        let mut params = GenParams::exhaustive(2, 2, 2, false);
        params.instance_cap = 100;
        assert!(matches!(enumerate_systems(&params), Err(Error::EnumerationCap(_))));
        assert!(matches!(enumerate_systems(&GenParams::exhaustive(4, 3, 1, false)), Err(Error::EnumerationCap(_))));
    }

    #[test]
    fn random_systems_are_reproducible() {
        let params = GenParams::random(2, 2, 2, true, 7, 1);
        let a = random_system(&params, 7).unwrap();
        let b = random_system(&params, 7).unwrap();
        assert_eq!(system_to_json(&a.system), system_to_json(&b.system));
        assert!(abstractify(&a.system).unwrap().has_meet());
    }

    #[test]
    fn fixtures_cross_check_clean() {
        let opts = CrosscheckOptions::default();
        let report = crosscheck_instance(0, &sys1(), &opts);
        assert!(report.is_clean(), "{:?}", report.discrepancies);
        let passing: Vec<Vec<usize>> =
            report.records.iter().filter(|r| r.source == Source::Sweep && r.theorem2).map(|r| r.h.clone()).collect();
        assert!(passing.contains(&vec![0, 1]));
        assert!(passing.contains(&vec![0, 2]));
        assert!(passing.contains(&vec![0, 1, 2]));
        let report = crosscheck_instance(0, &sys1_meet(), &opts);
        assert!(report.is_clean(), "{:?}", report.discrepancies);
        assert!(report.records.iter().any(|r| r.h == vec![0, 1, 3] && r.theorem5 == Some(true)));
    }

    #[test]
    fn constant_system() {
        let c = Carrier::new(1).unwrap();
        let sys = close_system(c, 1, &[NPlaceFunction::constant(c, 1, 0).unwrap()], false, 100).unwrap();
        assert_eq!(sys.len(), 1);
        let report = crosscheck_instance(0, &sys, &CrosscheckOptions::default());
        assert!(report.is_clean());
        assert!(report.records.iter().any(|r| r.point == Some(0) && r.h == vec![0] && r.theorem2));
        // over two points the closure adds the restricted identity
        let c = Carrier::new(2).unwrap();
        let sys = close_system(c, 1, &[NPlaceFunction::constant(c, 1, 0).unwrap()], false, 100).unwrap();
        assert_eq!(sys.len(), 2);
        assert!(crosscheck_instance(0, &sys, &CrosscheckOptions::default()).is_clean());
    }

    #[test]
    fn harness_summary_is_last() {
        let report = run_harness(&GenParams::exhaustive(1, 1, 2, true), &CrosscheckOptions::default()).unwrap();
        assert!(report.is_clean());
        let mut out = Vec::new();
        report.write_jsonl(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().last().unwrap().starts_with("{\"summary\""));
    }
}
