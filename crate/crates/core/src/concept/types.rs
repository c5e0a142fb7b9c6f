use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::AssignmentMatrix;
use crate::sketch::{ConstraintKind, ElementKind, PrimitiveKind};

pub const K_L0: usize = 12;
pub const K_ARG: usize = 2;
pub const K_QRY: usize = 5;
const ROW_TOL: f64 = 1e-9;

/// One slot of a concept: an L0 kind or the null type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Null,
    Primitive(PrimitiveKind),
    Constraint(ConstraintKind),
}

impl Slot {
    pub fn name(self) -> &'static str {
        match self {
            Self::Null => "null",
            Self::Primitive(p) => p.name(),
            Self::Constraint(c) => c.name(),
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        if s == "null" {
            return Some(Self::Null);
        }
        ElementKind::from_name(s).map(Self::from)
    }

    /// Index over L0 kinds with the null type last.
    pub fn type_index(self) -> usize {
        match self {
            Self::Null => ElementKind::NULL_INDEX,
            Self::Primitive(p) => ElementKind::Primitive(p).index(),
            Self::Constraint(c) => ElementKind::Constraint(c).index(),
        }
    }

    pub fn is_null(self) -> bool {
        self == Self::Null
    }

    pub fn arity(self) -> usize {
        match self {
            Self::Constraint(c) => c.arity(),
            _ => 0,
        }
    }
}

impl From<ElementKind> for Slot {
    fn from(k: ElementKind) -> Self {
        match k {
            ElementKind::Primitive(p) => Self::Primitive(p),
            ElementKind::Constraint(c) => Self::Constraint(c),
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Slot {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Slot {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Slot::from_name(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown slot type {s:?}")))
    }
}

/// Where a constraint reference of a concept points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Slot(usize),
    Outward(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConceptViolation {
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },
    SlotCount { expected: usize, found: usize },
    SelfReference { row: usize, col: usize },
    MaskedNonzero { row: usize, col: usize },
    ReferenceToNull { row: usize, col: usize },
    ReferenceToConstraint { row: usize, col: usize },
    NotStochastic { row: usize, sum: f64 },
    MeaninglessRow { row: usize },
}

impl fmt::Display for ConceptViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected:?}, found {found:?}")
            }
            Self::SlotCount { expected, found } => write!(f, "slot count: expected {expected}, found {found}"),
            Self::SelfReference { row, col } => write!(f, "self-reference masked: row {row} col {col}"),
            Self::MaskedNonzero { row, col } => write!(f, "masked entry nonzero: row {row} col {col}"),
            Self::ReferenceToNull { row, col } => write!(f, "reference to Null slot: row {row} col {col}"),
            Self::ReferenceToConstraint { row, col } => {
                write!(f, "reference to constraint slot: row {row} col {col}")
            }
            Self::NotStochastic { row, sum } => write!(f, "row not stochastic: row {row} sums to {sum}"),
            Self::MeaninglessRow { row } => write!(f, "meaningless row has mass: row {row}"),
        }
    }
}

/// Reusable L1 structure: typed slots plus the composition matrix over
/// constraint references and inward arguments.
///
/// Rows `2i, 2i+1` are the references of slot `i`; rows `2k..2k+k_arg` are
/// inward arguments. Columns `0..k` are slots, `k..k+k_arg` outward arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptType {
    pub slots: Vec<Slot>,
    pub k_arg: usize,
    pub matrix: AssignmentMatrix,
}

pub fn structure_mask(k: usize, ka: usize) -> AssignmentMatrix {
    let mut m = AssignmentMatrix::zeros(2 * k + ka, k + ka);
    for i in 0..k {
        m.set_masked(2 * i, i);
        m.set_masked(2 * i + 1, i);
    }
    for r in 2 * k..2 * k + ka {
        for c in k..k + ka {
            m.set_masked(r, c);
        }
    }
    m
}

impl ConceptType {
    pub fn null(k: usize, ka: usize) -> Self {
        Self { slots: vec![Slot::Null; k], k_arg: ka, matrix: structure_mask(k, ka) }
    }

    /// Builds a hard concept. `slots` is padded with `Null` up to `k`.
    pub fn hard(k: usize, ka: usize, slots: &[Slot], refs: &[(usize, Vec<Target>)], inward: &[usize]) -> Self {
        assert!(slots.len() <= k && inward.len() <= ka);
        let mut t = Self::null(k, ka);
        t.slots[..slots.len()].copy_from_slice(slots);
        for (slot, targets) in refs {
            for (r, &tg) in targets.iter().enumerate() {
                t.bind_ref(*slot, r, tg);
            }
        }
        for (a, &s) in inward.iter().enumerate() {
            t.bind_inward(a, s);
        }
        t
    }

    pub fn trivial_primitive(kind: PrimitiveKind, k: usize, ka: usize) -> Self {
        let inward: &[usize] = if ka > 0 { &[0] } else { &[] };
        Self::hard(k, ka, &[Slot::Primitive(kind)], &[], inward)
    }

    /// Single constraint whose references all leave through outward arguments.
    pub fn trivial_constraint(kind: ConstraintKind, k: usize, ka: usize) -> Option<Self> {
        (kind.arity() <= ka).then(|| {
            let targets = (0..kind.arity()).map(Target::Outward).collect();
            Self::hard(k, ka, &[Slot::Constraint(kind)], &[(0, targets)], &[])
        })
    }

    pub fn k_l0(&self) -> usize {
        self.slots.len()
    }

    pub fn ref_row(&self, slot: usize, r: usize) -> usize {
        2 * slot + r
    }

    pub fn inward_row(&self, a: usize) -> usize {
        2 * self.k_l0() + a
    }

    pub fn outward_col(&self, a: usize) -> usize {
        self.k_l0() + a
    }

    pub fn bind_ref(&mut self, slot: usize, r: usize, target: Target) {
        let row = self.ref_row(slot, r);
        self.matrix.row_mut(row).fill(0.0);
        let col = match target {
            Target::Slot(s) => s,
            Target::Outward(a) => self.outward_col(a),
        };
        self.matrix.set(row, col, 1.0);
    }

    pub fn bind_inward(&mut self, a: usize, slot: usize) {
        let row = self.inward_row(a);
        self.matrix.row_mut(row).fill(0.0);
        self.matrix.set(row, slot, 1.0);
    }

    fn col_target(&self, col: usize) -> Target {
        if col < self.k_l0() {
            Target::Slot(col)
        } else {
            Target::Outward(col - self.k_l0())
        }
    }

    /// Hardened target of reference `r` of constraint slot `slot`.
    pub fn ref_target(&self, slot: usize, r: usize) -> Option<Target> {
        self.matrix.argmax_row(self.ref_row(slot, r)).map(|c| self.col_target(c))
    }

    pub fn ref_targets(&self, slot: usize) -> Vec<Option<Target>> {
        (0..self.slots[slot].arity()).map(|r| self.ref_target(slot, r)).collect()
    }

    /// Primitive slot bound to inward argument `a`.
    pub fn inward_target(&self, a: usize) -> Option<usize> {
        self.matrix.argmax_row(self.inward_row(a)).filter(|&c| c < self.k_l0())
    }

    pub fn is_null(&self) -> bool {
        self.slots.iter().all(|s| s.is_null())
    }

    pub fn element_count(&self) -> usize {
        self.slots.iter().filter(|s| !s.is_null()).count()
    }

    pub fn primitive_slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().enumerate().filter(|(_, s)| matches!(s, Slot::Primitive(_))).map(|(i, _)| i)
    }

    pub fn constraint_slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().enumerate().filter(|(_, s)| matches!(s, Slot::Constraint(_))).map(|(i, _)| i)
    }

    /// Constraint references routed to outward arguments.
    pub fn boundary_refs(&self) -> usize {
        self.constraint_slots()
            .flat_map(|s| self.ref_targets(s))
            .filter(|t| matches!(t, Some(Target::Outward(_))))
            .count()
    }

    pub fn inward_used(&self) -> usize {
        (0..self.k_arg).filter(|&a| self.inward_target(a).is_some()).count()
    }

    pub fn outward_used(&self) -> usize {
        let mut used = vec![false; self.k_arg];
        for s in self.constraint_slots() {
            for t in self.ref_targets(s).into_iter().flatten() {
                if let Target::Outward(a) = t {
                    used[a] = true;
                }
            }
        }
        used.into_iter().filter(|&u| u).count()
    }

    /// Inward arguments bound to each slot.
    pub fn inward_exposure(&self) -> Vec<usize> {
        let mut e = vec![0; self.k_l0()];
        for a in 0..self.k_arg {
            if let Some(s) = self.inward_target(a) {
                e[s] += 1;
            }
        }
        e
    }

    fn row_meaningful(&self, row: usize) -> bool {
        let k = self.k_l0();
        row < 2 * k && row % 2 < self.slots[row / 2].arity()
    }

    pub fn validate(&self) -> Vec<ConceptViolation> {
        let k = self.k_l0();
        let ka = self.k_arg;
        let expected = (2 * k + ka, k + ka);
        if self.matrix.shape() != expected {
            return vec![ConceptViolation::ShapeMismatch { expected, found: self.matrix.shape() }];
        }
        let mask = structure_mask(k, ka);
        let mut out = Vec::new();
        for row in 0..expected.0 {
            let mut row_issues: Vec<ConceptViolation> = Vec::new();
            let mut push = |v: ConceptViolation| {
                if !row_issues.iter().any(|x| std::mem::discriminant(x) == std::mem::discriminant(&v)) {
                    row_issues.push(v);
                }
            };
            for col in 0..expected.1 {
                let v = self.matrix.get(row, col);
                if v == 0.0 {
                    continue;
                }
                if v < 0.0 || !v.is_finite() {
                    push(ConceptViolation::NotStochastic { row, sum: self.matrix.row_sum(row) });
                }
                if mask.is_masked(row, col) {
                    if row < 2 * k && col == row / 2 {
                        push(ConceptViolation::SelfReference { row, col });
                    } else {
                        push(ConceptViolation::MaskedNonzero { row, col });
                    }
                } else if col < k {
                    match self.slots[col] {
                        Slot::Null => push(ConceptViolation::ReferenceToNull { row, col }),
                        Slot::Constraint(_) => push(ConceptViolation::ReferenceToConstraint { row, col }),
                        Slot::Primitive(_) => {}
                    }
                }
            }
            let sum = self.matrix.row_sum(row);
            if self.row_meaningful(row) {
                if (sum - 1.0).abs() > ROW_TOL {
                    push(ConceptViolation::NotStochastic { row, sum });
                }
            } else if row >= 2 * k {
                if sum != 0.0 && (sum - 1.0).abs() > ROW_TOL {
                    push(ConceptViolation::NotStochastic { row, sum });
                }
            } else if sum != 0.0 {
                push(ConceptViolation::MeaninglessRow { row });
            }
            out.extend(row_issues);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Flattened slot one-hots followed by the structure matrix.
    pub fn feature_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.k_l0() * (ElementKind::COUNT + 1) + self.matrix.data().len());
        for s in &self.slots {
            let mut one_hot = [0.0; ElementKind::COUNT + 1];
            one_hot[s.type_index()] = 1.0;
            v.extend_from_slice(&one_hot);
        }
        v.extend_from_slice(self.matrix.data());
        v
    }

    /// Short human-readable form, e.g. `line×4 coincident×4 perpendicular parallel`.
    pub fn summary(&self) -> String {
        let mut counts: Vec<(Slot, usize)> = Vec::new();
        for &s in self.slots.iter().filter(|s| !s.is_null()) {
            match counts.iter_mut().find(|(k, _)| *k == s) {
                Some((_, n)) => *n += 1,
                None => counts.push((s, 1)),
            }
        }
        if counts.is_empty() {
            return "null".into();
        }
        counts
            .iter()
            .map(|(s, n)| if *n == 1 { s.name().to_string() } else { format!("{}×{n}", s.name()) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Serialize, Deserialize)]
struct ConceptTypeJson {
    slots: Vec<Slot>,
    matrix: Vec<Vec<f64>>,
    #[serde(default)]
    hard: bool,
}

impl Serialize for ConceptType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ConceptTypeJson { slots: self.slots.clone(), matrix: self.matrix.to_rows(), hard: self.matrix.is_hard() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConceptType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ConceptTypeJson::deserialize(d)?;
        let k = j.slots.len();
        let cols = j.matrix.first().map_or(0, Vec::len);
        if cols < k || j.matrix.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom(format!("matrix must have {k}+k_arg equal-length columns")));
        }
        let ka = cols - k;
        if j.matrix.len() != 2 * k + ka {
            return Err(serde::de::Error::custom(format!(
                "matrix has {} rows, expected {}",
                j.matrix.len(),
                2 * k + ka
            )));
        }
        let mut matrix = structure_mask(k, ka);
        for (r, row) in j.matrix.iter().enumerate() {
            matrix.row_mut(r).copy_from_slice(row);
        }
        Ok(Self { slots: j.slots, k_arg: ka, matrix })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_concept_is_valid_and_masked() {
        let t = ConceptType::null(K_L0, K_ARG);
        assert_eq!(t.matrix.shape(), (26, 14));
        assert!(t.is_valid());
        assert!(t.matrix.is_masked(2 * 3 + 1, 3));
        assert!(t.matrix.is_masked(25, 13));
        assert!(!t.matrix.is_masked(25, 11));
    }

    #[test]
    fn self_reference_is_flagged() {
        let mut t = ConceptType::hard(
            K_L0,
            K_ARG,
            &[Slot::Primitive(PrimitiveKind::Line), Slot::Constraint(ConstraintKind::Horizontal)],
            &[(1, vec![Target::Slot(0)])],
            &[],
        );
        assert!(t.is_valid());
        t.matrix.set(2, 1, 0.5);
        t.matrix.set(2, 0, 0.5);
        let msgs: Vec<String> = t.validate().iter().map(ToString::to_string).collect();
        assert!(msgs.iter().any(|m| m.starts_with("self-reference masked")), "{msgs:?}");
    }

    #[test]
    fn uniform_rows_over_null_slots() {
        let mut t = ConceptType::null(K_L0, K_ARG);
        for row in 0..2 * K_L0 {
            for col in 0..K_L0 {
                t.matrix.set(row, col, 1.0 / K_L0 as f64);
            }
        }
        let msgs: Vec<String> = t.validate().iter().map(ToString::to_string).collect();
        assert!(msgs.iter().any(|m| m.starts_with("reference to Null slot")));
    }
}
