use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::{ConceptType, Slot, K_ARG, K_L0};
use crate::error::{Error, Result};
use crate::induction::canonical::canonicalize;
use crate::sketch::corpus::SCHEMA_VERSION;
use crate::sketch::{ConstraintKind, PrimitiveKind};

#[derive(Debug, Clone, PartialEq)]
pub struct LibraryEntry {
    pub concept: ConceptType,
    pub count: usize,
    pub key: Vec<u8>,
}

impl LibraryEntry {
    pub fn elements(&self) -> usize {
        self.concept.element_count()
    }

    /// Coverage gain discounted by references that leave the concept.
    pub fn gain(&self, lambda_bias: f64) -> f64 {
        concept_gain(self.count, self.elements(), self.concept.boundary_refs(), lambda_bias)
    }
}

/// `count·(elements − 1) − λ·count·boundary_refs`; an infinite λ only penalizes
/// concepts that actually have boundary references.
pub fn concept_gain(count: usize, elements: usize, boundary_refs: usize, lambda_bias: f64) -> f64 {
    let n = count as f64;
    let penalty = if boundary_refs == 0 { 0.0 } else { lambda_bias * n * boundary_refs as f64 };
    n * (elements as f64 - 1.0) - penalty
}

/// Ordered set of canonical concepts. Entry 0 is the all-Null concept, followed by
/// one trivial concept per primitive kind and per constraint kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptLibrary {
    pub k_l0: usize,
    pub k_arg: usize,
    pub lambda_bias: f64,
    /// Seed recorded by induction.
    pub seed: u64,
    entries: Vec<LibraryEntry>,
    index: HashMap<Vec<u8>, usize>,
    trivial_primitive: [usize; 4],
    trivial_constraint: [Option<usize>; 14],
    builtin_count: usize,
}

impl Default for ConceptLibrary {
    fn default() -> Self {
        Self::builtin(K_L0, K_ARG, 0.5)
    }
}

impl ConceptLibrary {
    pub const NULL: usize = 0;

    pub fn builtin(k_l0: usize, k_arg: usize, lambda_bias: f64) -> Self {
        let mut lib = Self {
            k_l0,
            k_arg,
            lambda_bias,
            seed: 0,
            entries: Vec::new(),
            index: HashMap::new(),
            trivial_primitive: [0; 4],
            trivial_constraint: [None; 14],
            builtin_count: 0,
        };
        lib.insert(ConceptType::null(k_l0, k_arg), 0);
        for p in PrimitiveKind::ALL {
            lib.trivial_primitive[p.index()] = lib.insert(ConceptType::trivial_primitive(p, k_l0, k_arg), 0).0;
        }
        for c in ConstraintKind::ALL {
            lib.trivial_constraint[c.index()] =
                ConceptType::trivial_constraint(c, k_l0, k_arg).map(|t| lib.insert(t, 0).0);
        }
        lib.builtin_count = lib.entries.len();
        lib
    }

    /// Adds a concept in canonical form, or bumps the count of an existing one.
    /// Returns the entry index and whether it was new.
    pub fn insert(&mut self, concept: ConceptType, count: usize) -> (usize, bool) {
        let (key, canonical) = canonicalize(&concept);
        if let Some(&i) = self.index.get(&key) {
            self.entries[i].count += count;
            return (i, false);
        }
        let i = self.entries.len();
        self.index.insert(key.clone(), i);
        self.entries.push(LibraryEntry { concept: canonical, count, key });
        (i, true)
    }

    pub fn get(&self, i: usize) -> Option<&ConceptType> {
        self.entries.get(i).map(|e| &e.concept)
    }

    pub fn entry(&self, i: usize) -> Option<&LibraryEntry> {
        self.entries.get(i)
    }

    pub fn entries(&self) -> &[LibraryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn find(&self, key: &[u8]) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn find_concept(&self, t: &ConceptType) -> Option<usize> {
        self.find(&crate::induction::canonical::canonical_key(t))
    }

    pub fn trivial_primitive(&self, kind: PrimitiveKind) -> usize {
        self.trivial_primitive[kind.index()]
    }

    pub fn trivial_constraint(&self, kind: ConstraintKind) -> Option<usize> {
        self.trivial_constraint[kind.index()]
    }

    pub fn is_builtin(&self, i: usize) -> bool {
        i < self.builtin_count
    }

    pub fn builtin_count(&self) -> usize {
        self.builtin_count
    }

    /// Induced (non-builtin) entry indices.
    pub fn induced(&self) -> impl Iterator<Item = usize> + '_ {
        self.builtin_count..self.entries.len()
    }

    pub fn set_count(&mut self, i: usize, count: usize) {
        self.entries[i].count = count;
    }

    pub fn gain(&self, i: usize) -> f64 {
        self.entries[i].gain(self.lambda_bias)
    }

    pub fn to_json(&self) -> String {
        let j = LibraryJson {
            schema_version: SCHEMA_VERSION,
            k_l0: self.k_l0,
            k_arg: self.k_arg,
            lambda_bias: self.lambda_bias,
            seed: self.seed,
            concepts: self
                .entries
                .iter()
                .map(|e| EntryJson { concept: e.concept.clone(), count: e.count })
                .collect(),
        };
        serde_json::to_string(&j).expect("library serializes")
    }

    /// Parses and validates a library; builtin entries missing from the file are appended.
    pub fn from_json(text: &str) -> Result<Self> {
        let j: LibraryJson = serde_json::from_str(text)?;
        let mut lib = Self {
            k_l0: j.k_l0,
            k_arg: j.k_arg,
            lambda_bias: j.lambda_bias,
            seed: j.seed,
            entries: Vec::new(),
            index: HashMap::new(),
            trivial_primitive: [0; 4],
            trivial_constraint: [None; 14],
            builtin_count: 0,
        };
        for (i, e) in j.concepts.into_iter().enumerate() {
            if e.concept.k_l0() != j.k_l0 || e.concept.k_arg != j.k_arg {
                return Err(Error::InvalidLibrary(format!(
                    "concept {i} has k_l0={} k_arg={}, library declares {} and {}",
                    e.concept.k_l0(),
                    e.concept.k_arg,
                    j.k_l0,
                    j.k_arg
                )));
            }
            let v = e.concept.validate();
            if !v.is_empty() {
                let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
                return Err(Error::InvalidLibrary(format!("concept {i}: {}", msgs.join("; "))));
            }
            if !e.concept.matrix.is_hard() {
                return Err(Error::InvalidLibrary(format!("concept {i} is not hard")));
            }
            let (_, new) = lib.insert(e.concept, e.count);
            if !new {
                return Err(Error::InvalidLibrary(format!("concept {i} duplicates an earlier entry")));
            }
        }
        let reference = Self::builtin(j.k_l0, j.k_arg, j.lambda_bias);
        let mut builtin_max = 0;
        for e in reference.entries() {
            let (i, _) = lib.insert(e.concept.clone(), 0);
            builtin_max = builtin_max.max(i + 1);
        }
        for p in PrimitiveKind::ALL {
            lib.trivial_primitive[p.index()] = lib.find(&reference.entries[reference.trivial_primitive(p)].key).unwrap();
        }
        for c in ConstraintKind::ALL {
            lib.trivial_constraint[c.index()] =
                reference.trivial_constraint(c).and_then(|r| lib.find(&reference.entries[r].key));
        }
        if lib.find(&reference.entries[Self::NULL].key) != Some(Self::NULL) {
            return Err(Error::InvalidLibrary("entry 0 must be the all-Null concept".into()));
        }
        lib.builtin_count = if builtin_max == reference.len() { builtin_max } else { 0 };
        Ok(lib)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// FNV-1a of the serialized library, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_json().bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// Non-Null slot count of each entry.
    pub fn complexity(&self, i: usize) -> usize {
        self.entries[i].concept.slots.iter().filter(|s| **s != Slot::Null).count()
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    #[serde(flatten)]
    concept: ConceptType,
    #[serde(default)]
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct LibraryJson {
    #[serde(default = "default_version")]
    schema_version: u32,
    k_l0: usize,
    k_arg: usize,
    #[serde(default = "default_lambda", with = "lambda_json")]
    lambda_bias: f64,
    #[serde(default)]
    seed: u64,
    concepts: Vec<EntryJson>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

fn default_lambda() -> f64 {
    0.5
}

/// JSON has no infinity; an unbounded bias is written as `null`.
mod lambda_json {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_present_and_distinct() {
        let lib = ConceptLibrary::default();
        assert_eq!(lib.len(), 19);
        assert!(lib.get(ConceptLibrary::NULL).unwrap().is_null());
        assert_eq!(lib.trivial_primitive(PrimitiveKind::Arc), 4);
        assert_eq!(lib.trivial_constraint(ConstraintKind::Coincident), Some(5));
        assert!(lib.entries().iter().all(|e| e.concept.is_valid()));
    }

    #[test]
    fn json_roundtrip_is_byte_identical() {
        let lib = ConceptLibrary::default();
        let text = lib.to_json();
        let back = ConceptLibrary::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.builtin_count(), lib.builtin_count());
    }
}
