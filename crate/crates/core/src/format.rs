//! JSON instance files and report serialization.
//!
//! Two instance kinds are read: `function_system` (graphs of n-place
//! functions, closed on load) and `abstract` (total operation tables).
//! Tuple keys are comma-separated decimal indices.

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::{Map, Value};

use crate::algebra::MengerAlgebra;
use crate::error::{input, Error, Result};
use crate::function::{Carrier, FunctionSystem, NPlaceFunction};
use crate::representation::Representation;
use crate::tuples::decode;

/// A parsed instance file.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Concrete(FunctionSystem),
    Abstract(MengerAlgebra),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Concrete(_) => "function_system",
            Instance::Abstract(_) => "abstract",
        }
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Input(format!("missing key \"{key}\"")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Input(format!("\"{what}\" must be a non-negative integer")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Input(format!("\"{what}\" must be an object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Input(format!("\"{what}\" must be an array")))
}

/// Parses `"a1,..,ak"` into `k` indices below `bound`.
fn parse_key(key: &str, len: usize, bound: usize, what: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != len {
        return input(format!("{what}: key \"{key}\" must have {len} components"));
    }
    parts
        .iter()
        .map(|p| match p.trim().parse::<usize>() {
            Ok(v) if v < bound => Ok(v),
            Ok(_) => input(format!("{what}: key \"{key}\" has a component out of range")),
            Err(_) => input(format!("{what}: key \"{key}\" is not a tuple of indices")),
        })
        .collect()
}

fn value_in_range(v: &Value, bound: usize, what: &str, key: &str) -> Result<usize> {
    match v.as_u64() {
        Some(x) if (x as usize) < bound => Ok(x as usize),
        _ => input(format!("{what}: value at \"{key}\" must be an index below {bound}")),
    }
}

pub fn parse_instance(text: &str, cap: usize) -> Result<Instance> {
    let root: Value = serde_json::from_str(text)?;
    let obj = as_object(&root, "instance")?;
    match field(obj, "kind")?.as_str() {
        Some("function_system") => parse_system(obj, cap).map(Instance::Concrete),
        Some("abstract") => parse_abstract(obj).map(Instance::Abstract),
        Some(other) => input(format!("unknown kind \"{other}\"")),
        None => input("\"kind\" must be a string"),
    }
}

fn parse_system(obj: &Map<String, Value>, cap: usize) -> Result<FunctionSystem> {
    let k = as_usize(field(obj, "carrier")?, "carrier")?;
    let n = as_usize(field(obj, "arity")?, "arity")?;
    let with_meet = match obj.get("with_meet") {
        None => false,
        Some(v) => v.as_bool().ok_or_else(|| Error::Input("\"with_meet\" must be a boolean".into()))?,
    };
    let carrier = Carrier::new(k)?;
    if n == 0 {
        return input("\"arity\" must be at least 1");
    }
    let mut named = Vec::new();
    for (j, entry) in as_array(field(obj, "functions")?, "functions")?.iter().enumerate() {
        let what = format!("functions[{j}]");
        let f = as_object(entry, &what)?;
        let name = field(f, "name")?
            .as_str()
            .ok_or_else(|| Error::Input(format!("{what}.name must be a string")))?
            .to_string();
        let graph_what = format!("graph of {name}");
        let mut graph = Vec::new();
        for (key, v) in as_object(field(f, "graph")?, &graph_what)? {
            graph.push((parse_key(key, n, k, &graph_what)?, value_in_range(v, k, &graph_what, key)?));
        }
        named.push((name, NPlaceFunction::new(carrier, n, graph)?));
    }
    FunctionSystem::complete(carrier, n, named, with_meet, cap)
}

/// Reads a total table whose keys are `len`-tuples over `0..size`.
fn parse_table(obj: &Map<String, Value>, len: usize, size: usize, what: &str) -> Result<Vec<usize>> {
    let total = (0..len).try_fold(1usize, |acc, _| acc.checked_mul(size));
    let total = match total {
        Some(t) if t <= crate::algebra::MAX_TABLE_ENTRIES => t,
        _ => return input(format!("{what} table is too large")),
    };
    let mut table = vec![usize::MAX; total];
    for (key, v) in obj {
        let digits = parse_key(key, len, size, what)?;
        table[crate::tuples::encode(size, &digits)] = value_in_range(v, size, what, key)?;
    }
    if let Some(missing) = table.iter().position(|&v| v == usize::MAX) {
        let mut digits = vec![0usize; len];
        decode(size, missing, &mut digits);
        return input(format!("{what}: missing entry \"{}\"", join(&digits)));
    }
    Ok(table)
}

fn parse_abstract(obj: &Map<String, Value>) -> Result<MengerAlgebra> {
    let size = as_usize(field(obj, "size")?, "size")?;
    let n = as_usize(field(obj, "arity")?, "arity")?;
    if size == 0 || n == 0 {
        return input("\"size\" and \"arity\" must be at least 1");
    }
    let op = parse_table(as_object(field(obj, "op")?, "op")?, n + 1, size, "op")?;
    let rows = as_array(field(obj, "proj")?, "proj")?;
    if rows.len() != n {
        return input(format!("\"proj\" must hold {n} tables"));
    }
    let mut proj = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let what = format!("proj[{i}]");
        let row = as_array(row, &what)?;
        if row.len() != size {
            return input(format!("{what} must have {size} entries"));
        }
        let parsed: Result<Vec<usize>> =
            row.iter().enumerate().map(|(x, v)| value_in_range(v, size, &what, &x.to_string())).collect();
        proj.push(parsed?);
    }
    let meet = match obj.get("meet") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_table(as_object(v, "meet")?, 2, size, "meet")?),
    };
    let labels = match obj.get("labels") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let items = as_array(v, "labels")?;
            let labels: Result<Vec<String>> = items
                .iter()
                .map(|l| l.as_str().map(str::to_string).ok_or_else(|| Error::Input("labels must be strings".into())))
                .collect();
            let labels = labels?;
            if let Some(dup) = labels.iter().enumerate().find(|(j, l)| labels[..*j].contains(l)) {
                return input(format!("duplicate label \"{}\"", dup.1));
            }
            Some(labels)
        }
    };
    MengerAlgebra::new(size, n, op, proj, meet, labels)
}

fn join(digits: &[usize]) -> String {
    digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
}

/// Graph of a function as a JSON object in tuple order.
struct GraphJson<'a>(&'a NPlaceFunction);

impl Serialize for GraphJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let graph = self.0.graph();
        let mut map = serializer.serialize_map(Some(graph.len()))?;
        for (args, v) in graph {
            map.serialize_entry(&join(args), v)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct FunctionJson<'a> {
    name: &'a str,
    graph: GraphJson<'a>,
}

#[derive(Serialize)]
struct SystemJson<'a> {
    kind: &'static str,
    carrier: usize,
    arity: usize,
    with_meet: bool,
    functions: Vec<FunctionJson<'a>>,
}

fn system_json<'a>(
    carrier: usize,
    arity: usize,
    with_meet: bool,
    named: Vec<(&'a str, &'a NPlaceFunction)>,
) -> SystemJson<'a> {
    SystemJson {
        kind: "function_system",
        carrier,
        arity,
        with_meet,
        functions: named.into_iter().map(|(name, f)| FunctionJson { name, graph: GraphJson(f) }).collect(),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializing in-memory values cannot fail")
}

pub fn system_to_json(system: &FunctionSystem) -> String {
    let named = system.names().iter().map(String::as_str).zip(system.functions()).collect();
    pretty(&system_json(system.carrier().size(), system.arity(), system.with_meet(), named))
}

/// A flat table as a JSON object keyed by `len`-tuples.
struct TableJson<'a> {
    table: &'a [usize],
    size: usize,
    len: usize,
}

impl Serialize for TableJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.table.len()))?;
        let mut digits = vec![0usize; self.len];
        for (idx, v) in self.table.iter().enumerate() {
            decode(self.size, idx, &mut digits);
            map.serialize_entry(&join(&digits), v)?;
        }
        map.end()
    }
}

struct Rows<'a>(&'a [Vec<usize>]);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for row in self.0 {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

#[derive(Serialize)]
struct AbstractJson<'a> {
    kind: &'static str,
    size: usize,
    arity: usize,
    op: TableJson<'a>,
    proj: Rows<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meet: Option<TableJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<&'a [String]>,
}

pub fn algebra_to_json(alg: &MengerAlgebra) -> String {
    let size = alg.size();
    pretty(&AbstractJson {
        kind: "abstract",
        size,
        arity: alg.arity(),
        op: TableJson { table: alg.op_table(), size, len: alg.arity() + 1 },
        proj: Rows(alg.proj_tables()),
        meet: alg.meet_table().map(|table| TableJson { table, size, len: 2 }),
        labels: alg.labels(),
    })
}

pub fn instance_to_json(instance: &Instance) -> String {
    match instance {
        Instance::Concrete(s) => system_to_json(s),
        Instance::Abstract(a) => algebra_to_json(a),
    }
}

#[derive(Serialize)]
struct RepresentationJson<'a> {
    #[serde(flatten)]
    system: SystemJson<'a>,
    points: &'a [String],
    elements: ElementsJson<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classes: Option<Vec<Vec<String>>>,
}

struct ElementsJson<'a>(Vec<(String, &'a str)>);

impl Serialize for ElementsJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// The distinct images of a representation as a function system named
/// `P(<first element with that image>)`, plus the element-to-image map.
pub fn representation_to_json(
    alg: &MengerAlgebra,
    rep: &Representation,
    point: Option<usize>,
    with_meet: bool,
) -> String {
    let mut image_of = Vec::with_capacity(rep.images().len());
    let mut distinct: Vec<(String, &NPlaceFunction)> = Vec::new();
    for (g, f) in rep.images().iter().enumerate() {
        let j = match distinct.iter().position(|(_, h)| *h == f) {
            Some(j) => j,
            None => {
                distinct.push((format!("P({})", alg.label(g)), f));
                distinct.len() - 1
            }
        };
        image_of.push(j);
    }
    let named: Vec<(&str, &NPlaceFunction)> = distinct.iter().map(|(n, f)| (n.as_str(), *f)).collect();
    let elements = ElementsJson((0..alg.size()).map(|g| (alg.label(g), distinct[image_of[g]].0.as_str())).collect());
    let classes = rep.classes().map(|cs| cs.iter().map(|c| c.iter().map(|&x| alg.label(x)).collect()).collect());
    pretty(&RepresentationJson {
        system: system_json(rep.carrier(), rep.arity(), with_meet, named),
        points: rep.point_labels(),
        elements,
        point,
        classes,
    })
}

/// Any serializable report, pretty-printed.
pub fn to_json<T: Serialize>(value: &T) -> String {
    pretty(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::abstractify;
    use crate::algebra::fixtures::*;
    use crate::function::DEFAULT_CLOSURE_CAP;

    fn concrete(text: &str) -> FunctionSystem {
        match parse_instance(text, DEFAULT_CLOSURE_CAP).unwrap() {
            Instance::Concrete(s) => s,
            other => panic!("expected a function system, got {}", other.kind()),
        }
    }

    #[test]
    fn system_round_trip_is_exact() {
        for sys in [sys1(), sys1_meet()] {
            let text = system_to_json(&sys);
            let back = concrete(&text);
            assert_eq!(back, sys);
            assert_eq!(system_to_json(&back), text);
        }
    }

    #[test]
    fn algebra_round_trip_is_exact() {
        for alg in [abs1(), abs1_meet()] {
            let text = algebra_to_json(&alg);
            let back = match parse_instance(&text, 10).unwrap() {
                Instance::Abstract(a) => a,
                _ => unreachable!(),
            };
            assert_eq!(back, alg);
            assert_eq!(algebra_to_json(&back), text);
        }
    }

    #[test]
    fn loading_closes_and_keeps_file_order() {
        let text = r#"{"kind":"function_system","carrier":2,"arity":1,"with_meet":false,
            "functions":[{"name":"c1","graph":{"0":1,"1":1}},{"name":"id","graph":{"0":0,"1":1}},{"name":"c0","graph":{"0":0,"1":0}}]}"#;
        let sys = concrete(text);
        assert_eq!(sys.names(), &["c1", "id", "c0"]);
        let open =
            r#"{"kind":"function_system","carrier":2,"arity":1,"functions":[{"name":"c0","graph":{"0":0,"1":0}}]}"#;
        let sys = concrete(open);
        assert_eq!(sys.names()[0], "c0");
        assert_eq!(sys.len(), 2);
    }

    #[test]
    fn abstract_tables_must_be_total() {
        let good = algebra_to_json(&abs1());
        let missing = good.replace("\"2,2\": 2", "\"2,2\": 2, \"ignored\": 0").replacen("\"0,0\": 0,", "", 1);
        let err = parse_instance(&missing, 10).unwrap_err().to_string();
        assert!(err.contains("ignored") || err.contains("0,0"), "{err}");
        let without = good.replacen("\"0,0\": 0,", "", 1);
        let err = parse_instance(&without, 10).unwrap_err().to_string();
        assert!(err.contains("missing entry \"0,0\""), "{err}");
        let wide = good.replacen("\"0,0\": 0", "\"0,0\": 7", 1);
        assert!(parse_instance(&wide, 10).unwrap_err().to_string().contains("\"0,0\""));
        let extra = good.replacen("\"0,0\": 0", "\"0,0\": 0, \"0,3\": 1", 1);
        assert!(parse_instance(&extra, 10).unwrap_err().to_string().contains("\"0,3\""));
    }

    #[test]
    fn malformed_input_is_rejected() {
        for text in [
            "not json",
            r#"{"kind":"other"}"#,
            r#"{"kind":"function_system","carrier":0,"arity":1,"functions":[]}"#,
            r#"{"kind":"function_system","carrier":2,"arity":1,"functions":[]}"#,
            r#"{"kind":"function_system","carrier":2,"arity":1,"functions":[{"name":"f","graph":{"0,1":0}}]}"#,
            r#"{"kind":"function_system","carrier":2,"arity":1,"functions":[{"name":"f","graph":{"0":2}}]}"#,
        ] {
            assert!(parse_instance(text, 10).is_err(), "{text}");
        }
    }

    #[test]
    fn representation_json_lists_distinct_images() {
        let alg = abstractify(&sys1()).unwrap();
        let e = crate::equivalence::EquivalenceRelation::total(3);
        let rep = crate::representation::simplest_representation(&alg, &e, &crate::set::ElementSet::empty(3)).unwrap();
        let text = representation_to_json(&alg, &rep, Some(0), false);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["functions"].as_array().unwrap().len(), 1);
        assert_eq!(v["elements"]["c1"], "P(id)");
        assert_eq!(v["point"], 0);
        assert!(matches!(parse_instance(&text, 10).unwrap(), Instance::Concrete(_)));
    }
}
