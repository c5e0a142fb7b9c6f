//! L0 element kinds: primitives and constraints with their parameter schemas.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Scalar data type of a primitive or constraint parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Coord,
    Length,
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveKind {
    Line,
    Circle,
    Point,
    Arc,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 4] = [Self::Line, Self::Circle, Self::Point, Self::Arc];

    /// Scalar parameter schema, excluding the leading construction flag.
    pub fn schema(self) -> &'static [ParamKind] {
        use ParamKind::*;
        match self {
            Self::Line => &[Coord, Coord, Coord, Coord],
            Self::Circle => &[Coord, Coord, Length],
            Self::Point => &[Coord, Coord],
            Self::Arc => &[Coord, Coord, Length, Angle, Angle],
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Self::Line => &["start_x", "start_y", "end_x", "end_y"],
            Self::Circle => &["center_x", "center_y", "radius"],
            Self::Point => &["x", "y"],
            Self::Arc => &["center_x", "center_y", "radius", "start_angle", "end_angle"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Line => "line",
            Self::Circle => "circle",
            Self::Point => "point",
            Self::Arc => "arc",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Coincident,
    Distance,
    Horizontal,
    Parallel,
    Vertical,
    Tangent,
    Length,
    Perpendicular,
    Equal,
    Diameter,
    Radius,
    Angle,
    Concentric,
    Normal,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 14] = [
        Self::Coincident,
        Self::Distance,
        Self::Horizontal,
        Self::Parallel,
        Self::Vertical,
        Self::Tangent,
        Self::Length,
        Self::Perpendicular,
        Self::Equal,
        Self::Diameter,
        Self::Radius,
        Self::Angle,
        Self::Concentric,
        Self::Normal,
    ];

    pub fn arity(self) -> usize {
        match self {
            Self::Horizontal | Self::Vertical | Self::Length | Self::Diameter | Self::Radius => 1,
            _ => 2,
        }
    }

    /// Type of the scalar parameter carried by dimensional constraints.
    pub fn param_kind(self) -> Option<ParamKind> {
        match self {
            Self::Distance | Self::Length | Self::Diameter | Self::Radius => Some(ParamKind::Length),
            Self::Angle => Some(ParamKind::Angle),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Coincident => "coincident",
            Self::Distance => "distance",
            Self::Horizontal => "horizontal",
            Self::Parallel => "parallel",
            Self::Vertical => "vertical",
            Self::Tangent => "tangent",
            Self::Length => "length",
            Self::Perpendicular => "perpendicular",
            Self::Equal => "equal",
            Self::Diameter => "diameter",
            Self::Radius => "radius",
            Self::Angle => "angle",
            Self::Concentric => "concentric",
            Self::Normal => "normal",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Any L0 kind. Indices 0..4 are primitives, 4..18 constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Primitive(PrimitiveKind),
    Constraint(ConstraintKind),
}

impl ElementKind {
    /// Number of L0 kinds; the null type takes index `COUNT`.
    pub const COUNT: usize = 18;
    pub const NULL_INDEX: usize = Self::COUNT;

    pub fn index(self) -> usize {
        match self {
            Self::Primitive(p) => p.index(),
            Self::Constraint(c) => 4 + c.index(),
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            0..=3 => Some(Self::Primitive(PrimitiveKind::ALL[index])),
            4..=17 => Some(Self::Constraint(ConstraintKind::ALL[index - 4])),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Primitive(p) => p.name(),
            Self::Constraint(c) => c.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        PrimitiveKind::ALL
            .iter()
            .map(|&p| Self::Primitive(p))
            .chain(ConstraintKind::ALL.iter().map(|&c| Self::Constraint(c)))
            .find(|k| k.name() == name)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arities_follow_the_type_list() {
        let unary: Vec<_> = ConstraintKind::ALL.iter().filter(|c| c.arity() == 1).collect();
        assert_eq!(
            unary,
            [
                &ConstraintKind::Horizontal,
                &ConstraintKind::Vertical,
                &ConstraintKind::Length,
                &ConstraintKind::Diameter,
                &ConstraintKind::Radius
            ]
        );
        assert_eq!(ConstraintKind::Angle.param_kind(), Some(ParamKind::Angle));
        assert_eq!(ConstraintKind::Parallel.param_kind(), None);
    }

    #[test]
    fn element_index_roundtrip() {
        for i in 0..ElementKind::COUNT {
            let k = ElementKind::from_index(i).unwrap();
            assert_eq!(k.index(), i);
            assert_eq!(ElementKind::from_name(k.name()), Some(k));
        }
        assert!(ElementKind::from_index(ElementKind::NULL_INDEX).is_none());
    }
}
