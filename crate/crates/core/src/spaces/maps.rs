use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{pad_point, Point, TowerPoint};
use crate::error::{Error, Result};

/// Symbolic monotone control function `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Control {
    /// `ρ(t) = t`.
    Identity,
    /// `ρ(t) = t + c`.
    Plus(i64),
    /// `ρ(t) = c·t`.
    Scaled(i64),
}

impl Control {
    pub fn apply(self, t: i64) -> i64 {
        match self {
            Control::Identity => t,
            Control::Plus(c) => t + c,
            Control::Scaled(c) => c * t,
        }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            Control::Scaled(c) if c < 0 => Err(Error::InvalidParameter(format!(
                "control scale {c} is decreasing"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// Levels `min_level..=n` of a tower (with factor) into `Z^n × Z^k × Z`:
    /// zero pad to `n`, keep the factor block, append `i(i−1)/2`.
    PhiTower,
    /// Levels `n+1..=r` into `Z^r × Z^k × [n(n+1)/2, r(r−1)/2]`, same formula.
    PsiStaircase,
    /// `((x_i), (y_i)) ↦ (x_1, y_1, x_2, y_2, ...)`.
    ThetaInterleave,
    /// Graded or shift point `↦` its level, as a 1-D lattice point.
    FLevelProjection,
    /// Finite lookup table built from fiber witnesses.
    DeltaWitness,
    /// Zero pad a tower point to level `target`.
    Pad,
    Identity,
}

/// A named map with its parameters and the controls it claims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub name: MapKind,
    #[serde(default)]
    pub params: BTreeMap<String, i64>,
    #[serde(default = "identity_control")]
    pub lower: Control,
    #[serde(default = "identity_control")]
    pub upper: Control,
    /// Sorted `(source, image)` pairs; only used by `delta-witness`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<(Point, Point)>,
}

fn identity_control() -> Control {
    Control::Identity
}

impl MapSpec {
    pub fn new(name: MapKind) -> Self {
        MapSpec {
            name,
            params: BTreeMap::new(),
            lower: Control::Identity,
            upper: Control::Identity,
            table: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, v: i64) -> Self {
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn controls(mut self, lower: Control, upper: Control) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn phi(n: u32) -> Self {
        MapSpec::new(MapKind::PhiTower).param("n", i64::from(n))
    }

    pub fn psi(n: u32, r: u32) -> Self {
        MapSpec::new(MapKind::PsiStaircase)
            .param("n", i64::from(n))
            .param("r", i64::from(r))
    }

    pub fn theta() -> Self {
        MapSpec::new(MapKind::ThetaInterleave)
    }

    /// Level projection: 1-Lipschitz, so the lower control is the trivial `0`.
    pub fn level_projection() -> Self {
        MapSpec::new(MapKind::FLevelProjection).controls(Control::Scaled(0), Control::Identity)
    }

    pub fn pad(target: u32) -> Self {
        MapSpec::new(MapKind::Pad).param("target", i64::from(target))
    }

    pub fn identity() -> Self {
        MapSpec::new(MapKind::Identity)
    }

    pub fn delta(mut table: Vec<(Point, Point)>) -> Self {
        table.sort();
        table.dedup_by(|a, b| a.0 == b.0);
        MapSpec {
            table,
            ..MapSpec::new(MapKind::DeltaWitness)
        }
    }

    fn get(&self, key: &str) -> Result<i64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("map parameter `{key}` is missing")))
    }

    fn get_level(&self, key: &str) -> Result<u32> {
        let v = self.get(key)?;
        u32::try_from(v)
            .map_err(|_| Error::InvalidParameter(format!("map parameter `{key}` = {v}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.lower.validate()?;
        self.upper.validate()?;
        match self.name {
            MapKind::PhiTower => {
                let n = self.get_level("n")?;
                let lo = self.params.get("min_level").copied().unwrap_or(1);
                if n < 1 || lo < 1 {
                    return Err(Error::InvalidParameter("phi needs n >= 1".into()));
                }
            }
            MapKind::PsiStaircase => {
                let (n, r) = (self.get_level("n")?, self.get_level("r")?);
                if r <= n {
                    return Err(Error::InvalidParameter("psi requires r > n".into()));
                }
            }
            MapKind::Pad => {
                self.get_level("target")?;
            }
            _ => {}
        }
        Ok(())
    }
}

/// Applies `m` to `p`.
pub fn evaluate_map(m: &MapSpec, p: &Point) -> Result<Point> {
    match m.name {
        MapKind::Identity => Ok(p.clone()),
        MapKind::PhiTower => {
            let n = m.get_level("n")?;
            let lo = m.params.get("min_level").copied().unwrap_or(1);
            let t = p.as_tower()?;
            if i64::from(t.level) < lo || t.level > n {
                return Err(Error::OutsideDomain(format!(
                    "phi is defined on levels {lo}..={n}, got level {}",
                    t.level
                )));
            }
            stack(t, n)
        }
        MapKind::PsiStaircase => {
            let (n, r) = (m.get_level("n")?, m.get_level("r")?);
            let t = p.as_tower()?;
            if t.level <= n || t.level > r {
                return Err(Error::OutsideDomain(format!(
                    "psi is defined on levels {}..={r}, got level {}",
                    n + 1,
                    t.level
                )));
            }
            stack(t, r)
        }
        MapKind::ThetaInterleave => match p {
            Point::Pair(a, b) => {
                if !a.extra.is_empty() || !b.extra.is_empty() {
                    return Err(Error::OutsideDomain(
                        "theta takes pairs of plain sequences".into(),
                    ));
                }
                let len = a.level.max(b.level);
                Ok(Point::Lattice(interleave(
                    &pad_point(a, len)?,
                    &pad_point(b, len)?,
                )))
            }
            Point::Lattice(v) if v.len() % 2 == 0 => {
                let (x, y) = v.split_at(v.len() / 2);
                Ok(Point::Lattice(interleave(x, y)))
            }
            other => Err(Error::OutsideDomain(format!(
                "theta takes a pair or an even-length lattice point, got {other}"
            ))),
        },
        MapKind::FLevelProjection => Ok(Point::Lattice(vec![p.as_shift()?.level])),
        MapKind::Pad => {
            let target = m.get_level("target")?;
            Ok(Point::Lattice(pad_point(p.as_tower()?, target)?))
        }
        MapKind::DeltaWitness => m
            .table
            .binary_search_by(|(k, _)| k.cmp(p))
            .map(|i| m.table[i].1.clone())
            .map_err(|_| Error::OutsideDomain(format!("no table entry for {p}"))),
    }
}

fn stack(t: &TowerPoint, target: u32) -> Result<Point> {
    let mut v = pad_point(t, target)?;
    let l = i64::from(t.level);
    v.push(l * (l - 1) / 2);
    Ok(Point::Lattice(v))
}

fn interleave(x: &[i64], y: &[i64]) -> Vec<i64> {
    x.iter().zip(y).flat_map(|(&a, &b)| [a, b]).collect()
}
