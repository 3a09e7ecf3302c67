use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of a tower space `⋃_i (s(i)Z)^i`, optionally crossed with a `Z^k` factor.
///
/// `coords` has exactly `level` entries; `extra` holds the `Z^k` block and is
/// empty for plain towers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TowerPoint {
    pub level: u32,
    pub coords: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<i64>,
}

impl TowerPoint {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        Self::with_extra(coords, Vec::new())
    }

    pub fn with_extra(coords: Vec<i64>, extra: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Membership("tower points have level >= 1".into()));
        }
        let level = u32::try_from(coords.len())
            .map_err(|_| Error::InvalidParameter("level does not fit in u32".into()))?;
        Ok(TowerPoint {
            level,
            coords,
            extra,
        })
    }

    /// Structural check: `coords.len() == level` and `level >= 1`.
    pub fn check_shape(&self) -> Result<()> {
        if self.level == 0 {
            return Err(Error::Membership("tower points have level >= 1".into()));
        }
        if self.coords.len() != self.level as usize {
            return Err(Error::Membership(format!(
                "level {} point carries {} coordinates",
                self.level,
                self.coords.len()
            )));
        }
        Ok(())
    }
}

/// A finitely supported point `((x_i)_{i∈Z}, a)` of the direct sum `(⊕_{i∈Z} Z) × Z`.
///
/// Only nonzero coordinates are stored. The shift-union membership rule for
/// level `a` (zero below `a`, `x_i ∈ (i−a+1)Z` from `a` on) is checked by the
/// owning space, not here.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShiftPoint {
    pub level: i64,
    #[serde(default)]
    pub support: BTreeMap<i64, i64>,
}

impl ShiftPoint {
    pub fn new(level: i64, entries: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let support = entries.into_iter().filter(|&(_, v)| v != 0).collect();
        ShiftPoint { level, support }
    }

    pub fn get(&self, index: i64) -> i64 {
        self.support.get(&index).copied().unwrap_or(0)
    }

    /// Drops explicit zeros so that equality is value equality.
    pub fn normalized(mut self) -> Self {
        self.support.retain(|_, v| *v != 0);
        self
    }

    pub fn max_index(&self) -> Option<i64> {
        self.support.keys().next_back().copied()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.support.keys().next().copied()
    }
}

/// Any point handled by the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Point {
    /// A point of an integer lattice with the maximum metric.
    Lattice(Vec<i64>),
    Tower(TowerPoint),
    /// A point of a product of two tower spaces (maximum of the factor metrics).
    Pair(TowerPoint, TowerPoint),
    Shift(ShiftPoint),
}

impl Point {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Point::Lattice(_) => "lattice",
            Point::Tower(_) => "tower",
            Point::Pair(..) => "pair",
            Point::Shift(_) => "shift",
        }
    }

    pub fn as_lattice(&self) -> Result<&[i64]> {
        match self {
            Point::Lattice(c) => Ok(c),
            other => Err(wrong("lattice", other)),
        }
    }

    pub fn as_tower(&self) -> Result<&TowerPoint> {
        match self {
            Point::Tower(t) => Ok(t),
            other => Err(wrong("tower", other)),
        }
    }

    pub fn as_pair(&self) -> Result<(&TowerPoint, &TowerPoint)> {
        match self {
            Point::Pair(a, b) => Ok((a, b)),
            other => Err(wrong("pair", other)),
        }
    }

    pub fn as_shift(&self) -> Result<&ShiftPoint> {
        match self {
            Point::Shift(s) => Ok(s),
            other => Err(wrong("shift", other)),
        }
    }

    /// Flattens the point into integers; used as a value digest inside cell keys.
    pub fn digest(&self) -> Vec<i64> {
        let mut out = Vec::new();
        match self {
            Point::Lattice(c) => out.extend_from_slice(c),
            Point::Tower(t) => push_tower(&mut out, t),
            Point::Pair(a, b) => {
                push_tower(&mut out, a);
                push_tower(&mut out, b);
            }
            Point::Shift(s) => {
                out.push(s.level);
                out.push(s.support.len() as i64);
                for (&i, &v) in &s.support {
                    out.push(i);
                    out.push(v);
                }
            }
        }
        out
    }
}

fn push_tower(out: &mut Vec<i64>, t: &TowerPoint) {
    out.push(i64::from(t.level));
    out.extend_from_slice(&t.coords);
    out.push(t.extra.len() as i64);
    out.extend_from_slice(&t.extra);
}

fn wrong(expected: &str, got: &Point) -> Error {
    Error::WrongSpace {
        expected: expected.to_string(),
        got: got.kind_name().to_string(),
    }
}

impl From<TowerPoint> for Point {
    fn from(t: TowerPoint) -> Self {
        Point::Tower(t)
    }
}

impl From<ShiftPoint> for Point {
    fn from(s: ShiftPoint) -> Self {
        Point::Shift(s)
    }
}

impl fmt::Display for TowerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}{:?}", self.level, self.coords)?;
        if !self.extra.is_empty() {
            write!(f, "x{:?}", self.extra)?;
        }
        Ok(())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Lattice(c) => write!(f, "{c:?}"),
            Point::Tower(t) => write!(f, "{t}"),
            Point::Pair(a, b) => write!(f, "({a}, {b})"),
            Point::Shift(s) => {
                write!(f, "a={} {{", s.level)?;
                for (n, (i, v)) in s.support.iter().enumerate() {
                    if n > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{i}:{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}
