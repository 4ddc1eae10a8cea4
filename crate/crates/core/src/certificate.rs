use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::io::num17;

pub const TOLERANCE: f64 = 1e-9;

/// SHA-256 over the little-endian bit patterns of a vector of floats.
pub fn digest_values(xs: &[f64]) -> String {
    let mut h = Sha256::new();
    for x in xs {
        h.update(x.to_bits().to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub label: String,
    pub values: Vec<f64>,
}

impl Witness {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Witness {
            label: label.into(),
            values,
        }
    }

    pub fn set(label: impl Into<String>, members: &[usize]) -> Self {
        Self::new(label, members.iter().map(|&v| v as f64).collect())
    }

    pub fn digest(&self) -> String {
        digest_values(&self.values)
    }
}

/// A checked instance of an inequality lhs ≤ rhs.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constants: BTreeMap<String, f64>,
    pub witnesses: Vec<Witness>,
    holds: bool,
    /// The inequality is vacuous here (for example λ_k = 0).
    pub degenerate: bool,
    /// False when the statement's hypothesis fails; `holds` is then informational.
    pub applicable: bool,
    pub note: Option<String>,
    pub auxiliary: Vec<Certificate>,
}

impl Certificate {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Certificate {
            name: name.into(),
            lhs,
            rhs,
            constants: BTreeMap::new(),
            witnesses: Vec::new(),
            holds: lhs <= rhs + TOLERANCE,
            degenerate: false,
            applicable: true,
            note: None,
            auxiliary: Vec::new(),
        }
    }

    /// A vacuous bound: rhs = +∞.
    pub fn degenerate(name: impl Into<String>, lhs: f64, note: impl Into<String>) -> Self {
        let mut c = Self::new(name, lhs, f64::INFINITY);
        c.degenerate = true;
        c.note = Some(note.into());
        c
    }

    pub fn holds(&self) -> bool {
        self.holds
    }

    /// This certificate holds (or does not apply) and so do all auxiliary ones.
    pub fn all_hold(&self) -> bool {
        (self.holds || !self.applicable) && self.auxiliary.iter().all(Certificate::all_hold)
    }

    pub fn with_constant(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_string(), value);
        self
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_auxiliary(mut self, c: Certificate) -> Self {
        self.auxiliary.push(c);
        self
    }

    pub fn not_applicable(mut self, note: impl Into<String>) -> Self {
        self.applicable = false;
        self.note = Some(note.into());
        self
    }

    pub fn to_json(&self) -> Value {
        let constants: Map<String, Value> = self
            .constants
            .iter()
            .map(|(k, v)| (k.clone(), num17(*v)))
            .collect();
        let witnesses: Vec<Value> = self
            .witnesses
            .iter()
            .map(|w| json!({"label": w.label, "len": w.values.len(), "sha256": w.digest()}))
            .collect();
        let mut obj = json!({
            "name": self.name,
            "lhs": num17(self.lhs),
            "rhs": num17(self.rhs),
            "holds": self.holds,
            "degenerate": self.degenerate,
            "applicable": self.applicable,
            "constants": constants,
            "witnesses": witnesses,
        });
        if let Some(note) = &self.note {
            obj["note"] = Value::String(note.clone());
        }
        if !self.auxiliary.is_empty() {
            obj["auxiliary"] = Value::Array(self.auxiliary.iter().map(Certificate::to_json).collect());
        }
        obj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holds_iff_within_tolerance() {
        assert!(Certificate::new("a", 1.0, 1.0).holds());
        assert!(Certificate::new("a", 1.0 + 5e-10, 1.0).holds());
        assert!(!Certificate::new("a", 1.0 + 2e-9, 1.0).holds());
        assert!(Certificate::degenerate("a", 5.0, "vacuous").holds());
    }

    #[test]
    fn json_is_stable() {
        let c = Certificate::new("x", 0.25, 1.0)
            .with_constant("k", 2.0)
            .with_witness(Witness::new("f", vec![1.0, 0.0]));
        let a = serde_json::to_string(&c.to_json()).unwrap();
        let b = serde_json::to_string(&c.clone().to_json()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"lhs\":2.5000000000000000e-1"));
    }

    #[test]
    fn not_applicable_does_not_fail_aggregate() {
        let c = Certificate::new("x", 3.0, 1.0).not_applicable("hypothesis fails");
        assert!(!c.holds());
        assert!(c.all_hold());
    }
}
