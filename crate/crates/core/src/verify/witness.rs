use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covers::{classify_point, CoverScheme};
use crate::error::{Error, Result};
use crate::spaces::{enumerate_window, Control, MapSpec, Point, SpaceSpec, TowerPoint, Window};

/// One color of one scheme, playing the role of a family `𝒱_i`.
#[derive(Debug, Clone)]
pub struct WitnessFamily {
    pub scheme: CoverScheme,
    pub color: u32,
}

impl WitnessFamily {
    pub fn new(scheme: CoverScheme, color: u32) -> Self {
        WitnessFamily { scheme, color }
    }

    fn covers(&self, p: &Point) -> Result<bool> {
        Ok(matches!(classify_point(&self.scheme, p)?, Some((c, _)) if c == self.color))
    }
}

/// How a fiber point `x` and a box point `y` form a point of the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compose {
    /// Tower point `x` with `y` as its `Z^k` block.
    Extra,
    /// Lattice concatenation `(x, y)`.
    Concat,
    /// Pair `(x, y)` with `y` read as a tower point of level `len(y)`.
    PairSecond,
}

impl Compose {
    pub fn apply(self, x: &Point, y: &[i64]) -> Result<Point> {
        match self {
            Compose::Extra => {
                let t = x.as_tower()?;
                Ok(Point::Tower(TowerPoint {
                    extra: y.to_vec(),
                    ..t.clone()
                }))
            }
            Compose::Concat => {
                let mut v = x.as_lattice()?.to_vec();
                v.extend_from_slice(y);
                Ok(Point::Lattice(v))
            }
            Compose::PairSecond => Ok(Point::Pair(
                x.as_tower()?.clone(),
                TowerPoint::new(y.to_vec())?,
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberRecord {
    pub fiber: Point,
    /// Box point `Δ(x)` missed by every family, if any.
    pub witness: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub compose: Compose,
    pub box_points: u64,
    pub fibers: Vec<FiberRecord>,
    pub witnessed: u64,
    pub all_fibers_witnessed: bool,
}

/// For each fiber `x`, the lexicographically first box point `y` such that
/// no family covers `compose(x, y)`.
pub fn find_fiber_witnesses(
    families: &[WitnessFamily],
    fibers: &[Point],
    box_space: &SpaceSpec,
    box_window: &Window,
    compose: Compose,
) -> Result<WitnessResult> {
    let box_points = enumerate_window(box_space, box_window)?;
    let ys: Vec<&[i64]> = box_points
        .iter()
        .map(Point::as_lattice)
        .collect::<Result<_>>()?;
    let covered = |x: &Point, y: &[i64]| -> Result<bool> {
        let p = compose.apply(x, y)?;
        for f in families {
            if f.covers(&p)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let records: Vec<Result<FiberRecord>> = fibers
        .par_iter()
        .map(|x| {
            let mut witness = None;
            for y in &ys {
                if !covered(x, y)? {
                    witness = Some(*y);
                    break;
                }
            }
            if let Some(y) = witness {
                // independent re-check before reporting
                let p = compose.apply(x, y)?;
                for f in families {
                    if f.covers(&p)? {
                        return Err(Error::InvalidParameter(format!(
                            "witness {p} is covered by {}",
                            f.scheme.name()
                        )));
                    }
                }
            }
            Ok(FiberRecord {
                fiber: x.clone(),
                witness: witness.map(|y| Point::Lattice(y.to_vec())),
            })
        })
        .collect();
    let fibers = records.into_iter().collect::<Result<Vec<_>>>()?;
    let witnessed = fibers.iter().filter(|r| r.witness.is_some()).count() as u64;
    Ok(WitnessResult {
        compose,
        box_points: box_points.len() as u64,
        all_fibers_witnessed: witnessed == fibers.len() as u64,
        witnessed,
        fibers,
    })
}

/// The map `δ(x) = compose(x, Δ(x))` as a table, with the given controls.
pub fn witness_map(result: &WitnessResult, lower: Control, upper: Control) -> Result<MapSpec> {
    let table = result
        .fibers
        .iter()
        .map(|r| {
            let y = r
                .witness
                .as_ref()
                .ok_or_else(|| Error::OutsideDomain(format!("fiber {} has no witness", r.fiber)))?;
            Ok((r.fiber.clone(), result.compose.apply(&r.fiber, y.as_lattice()?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MapSpec::delta(table).controls(lower, upper))
}
