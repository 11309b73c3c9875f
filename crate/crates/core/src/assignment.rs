//! Variable assignments reported as counterexamples and witnesses.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// An ordered list of `variable = value` bindings.
///
/// Element variables carry element indices; coordinate variables (`i`, `k`)
/// are 1-based as in the axioms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(Vec<(String, usize)>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(Vec::new())
    }

    pub fn with(mut self, name: impl Into<String>, value: usize) -> Self {
        self.0.push((name.into(), value));
        self
    }

    /// Binds `prefix1..prefixN` to the given values.
    pub fn with_tuple(mut self, prefix: &str, values: &[usize]) -> Self {
        for (j, v) in values.iter().enumerate() {
            self.0.push((format!("{prefix}{}", j + 1), *v));
        }
        self
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl std::fmt::Display for Assignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, (n, v)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

/// Outcome of one universally quantified property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropFlag {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Assignment>,
}

impl PropFlag {
    pub fn holds() -> Self {
        PropFlag { holds: true, counterexample: None }
    }

    pub fn fails(counterexample: Assignment) -> Self {
        PropFlag { holds: false, counterexample: Some(counterexample) }
    }

    pub fn from_search(found: Option<Assignment>) -> Self {
        match found {
            None => Self::holds(),
            Some(a) => Self::fails(a),
        }
    }
}
