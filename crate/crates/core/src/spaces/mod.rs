//! Exact-integer models of the metric spaces under study.
//!
//! Every point is stored with integer coordinates and every distance is an
//! exact `i64`. The spaces are:
//!
//! * towers `⋃_i (s(i)Z)^i`, optionally crossed with `Z^k`, under the maximum
//!   metric on zero-padded coordinates plus a level penalty;
//! * products of two towers under the maximum of the factor metrics;
//! * the shift union `⋃_j X_j` and the graded sum `⋃_k X_k × {k}`, both inside
//!   `(⊕_{i∈Z} Z) × Z` with the ℓ1-plus-level metric;
//! * plain lattices `∏ s_i Z` under the maximum metric.

mod maps;
mod point;
mod window;

pub use maps::{evaluate_map, Control, MapKind, MapSpec};
pub use point::{Point, ShiftPoint, TowerPoint};
pub use window::{enumerate_window, enumerate_windows, Interval, Window};
pub(crate) use window::{for_each_product, lattice_axis_counts, product_len};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Divisibility rule for tower coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    /// Every coordinate is free (`Z^i` at level `i`).
    Unit,
    /// Level `i` lives in `(iZ)^i`.
    Identity,
    /// Level `i` lives in `(2^i Z)^i`.
    PowerOfTwo,
    /// Coordinate `j` (1-based) lives in `jZ`, independent of the level;
    /// truncations of `∏_j jZ`.
    ByCoordinate,
}

impl Step {
    /// Modulus that coordinate `j` (0-based) of a level-`level` point must divide.
    pub fn modulus(self, level: u32, j: usize) -> Result<i64> {
        match self {
            Step::Unit => Ok(1),
            Step::Identity => Ok(i64::from(level)),
            Step::PowerOfTwo => pow2(level),
            Step::ByCoordinate => Ok(j as i64 + 1),
        }
    }
}

pub(crate) fn pow2(e: u32) -> Result<i64> {
    if e >= 62 {
        return Err(Error::Overflow("a power of two"));
    }
    Ok(1i64 << e)
}

/// Which metric a space carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricFlavor {
    MaxBased,
    ShiftL1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    Tower,
    TowerWithFactor,
    ShiftUnion,
    GradedSum,
    ProductOfTowers,
    PlainLattice,
}

/// Which of the spaces is in play.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceSpec {
    /// `⋃_{i≥1} (s(i)Z)^i × Z^k`; `factor_dim = 0` is the plain tower.
    Tower {
        step: Step,
        #[serde(default)]
        factor_dim: usize,
    },
    /// `X × X` for the tower `X` with the given step.
    ProductOfTowers { step: Step },
    /// `⋃_{j∈Z} X_j` with `X_j = {x_i = 0 for i < j, x_i ∈ (i−j+1)Z for i ≥ j}`.
    ShiftUnion,
    /// `⋃_{k≥1} X_k × {k}` with `X_k` the points supported on indices `1..=k`.
    GradedSum,
    /// `∏_i s_i Z`; one step per axis.
    PlainLattice { steps: Vec<i64> },
}

impl SpaceSpec {
    pub fn tower(step: Step) -> Self {
        SpaceSpec::Tower {
            step,
            factor_dim: 0,
        }
    }

    pub fn tower_with_factor(step: Step, factor_dim: usize) -> Self {
        SpaceSpec::Tower { step, factor_dim }
    }

    /// `Z^dim` with unit steps.
    pub fn lattice(dim: usize) -> Self {
        SpaceSpec::PlainLattice {
            steps: vec![1; dim],
        }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            SpaceSpec::Tower { factor_dim: 0, .. } => SpaceKind::Tower,
            SpaceSpec::Tower { .. } => SpaceKind::TowerWithFactor,
            SpaceSpec::ProductOfTowers { .. } => SpaceKind::ProductOfTowers,
            SpaceSpec::ShiftUnion => SpaceKind::ShiftUnion,
            SpaceSpec::GradedSum => SpaceKind::GradedSum,
            SpaceSpec::PlainLattice { .. } => SpaceKind::PlainLattice,
        }
    }

    pub fn metric_flavor(&self) -> MetricFlavor {
        match self {
            SpaceSpec::ShiftUnion | SpaceSpec::GradedSum => MetricFlavor::ShiftL1,
            _ => MetricFlavor::MaxBased,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SpaceSpec::PlainLattice { steps } = self {
            if let Some(s) = steps.iter().find(|&&s| s <= 0) {
                return Err(Error::InvalidParameter(format!(
                    "lattice steps must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }

    /// Checks every membership invariant of `p` for this space.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match self {
            SpaceSpec::Tower { step, factor_dim } => {
                check_tower(p.as_tower()?, *step, *factor_dim)
            }
            SpaceSpec::ProductOfTowers { step } => {
                let (a, b) = p.as_pair()?;
                check_tower(a, *step, 0)?;
                check_tower(b, *step, 0)
            }
            SpaceSpec::ShiftUnion => check_shift_union(p.as_shift()?),
            SpaceSpec::GradedSum => check_graded(p.as_shift()?),
            SpaceSpec::PlainLattice { steps } => {
                let c = p.as_lattice()?;
                if c.len() != steps.len() {
                    return Err(Error::Membership(format!(
                        "expected {} lattice coordinates, got {}",
                        steps.len(),
                        c.len()
                    )));
                }
                for (axis, (&v, &s)) in c.iter().zip(steps).enumerate() {
                    if v.rem_euclid(s) != 0 {
                        return Err(Error::Membership(format!(
                            "axis {axis}: {v} is not a multiple of {s}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Exact distance between two points of this space.
    ///
    /// Only the point kinds and dimensions are checked; divisibility is not.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<i64> {
        match self {
            SpaceSpec::Tower { .. } => tower_distance(a.as_tower()?, b.as_tower()?),
            SpaceSpec::ProductOfTowers { .. } => {
                let (a1, a2) = a.as_pair()?;
                let (b1, b2) = b.as_pair()?;
                Ok(tower_distance(a1, b1)?.max(tower_distance(a2, b2)?))
            }
            SpaceSpec::ShiftUnion | SpaceSpec::GradedSum => {
                Ok(shift_distance(a.as_shift()?, b.as_shift()?))
            }
            SpaceSpec::PlainLattice { .. } => max_distance(a.as_lattice()?, b.as_lattice()?),
        }
    }
}

fn check_tower(t: &TowerPoint, step: Step, factor_dim: usize) -> Result<()> {
    t.check_shape()?;
    if t.extra.len() != factor_dim {
        return Err(Error::FactorMismatch(t.extra.len(), factor_dim));
    }
    for (j, &v) in t.coords.iter().enumerate() {
        let m = step.modulus(t.level, j)?;
        if v.rem_euclid(m) != 0 {
            return Err(Error::Membership(format!(
                "coordinate {} = {v} of a level-{} point is not a multiple of {m}",
                j + 1,
                t.level
            )));
        }
    }
    Ok(())
}

fn check_shift_union(s: &ShiftPoint) -> Result<()> {
    for (&i, &v) in &s.support {
        if i < s.level {
            return Err(Error::Membership(format!(
                "x_{i} = {v} is nonzero below the level {}",
                s.level
            )));
        }
        let m = i - s.level + 1;
        if v.rem_euclid(m) != 0 {
            return Err(Error::Membership(format!(
                "x_{i} = {v} is not a multiple of {m} at level {}",
                s.level
            )));
        }
    }
    Ok(())
}

fn check_graded(s: &ShiftPoint) -> Result<()> {
    if s.level < 1 {
        return Err(Error::Membership(format!(
            "graded-sum levels are positive, got {}",
            s.level
        )));
    }
    if let Some((&i, _)) = s.support.iter().find(|(&i, _)| i < 1 || i > s.level) {
        return Err(Error::Membership(format!(
            "x_{i} is nonzero outside 1..={}",
            s.level
        )));
    }
    Ok(())
}

/// Sum of the levels `min, min+1, ..., max−1`; zero for equal levels.
pub fn level_penalty(l1: u32, l2: u32) -> i64 {
    let (lo, hi) = (i64::from(l1.min(l2)), i64::from(l1.max(l2)));
    (hi * (hi - 1) - lo * (lo - 1)) / 2
}

/// Maximum metric on equal-length integer vectors.
pub fn max_distance(a: &[i64], b: &[i64]) -> Result<i64> {
    if a.len() != b.len() {
        return Err(Error::FactorMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or(0))
}

/// The lower point's coordinates zero-padded to `target` entries, followed by its extra block.
pub fn pad_point(p: &TowerPoint, target: u32) -> Result<Vec<i64>> {
    if target < p.level {
        return Err(Error::CannotTruncate {
            level: p.level,
            target,
        });
    }
    let mut out = Vec::with_capacity(target as usize + p.extra.len());
    out.extend_from_slice(&p.coords);
    out.resize(target as usize, 0);
    out.extend_from_slice(&p.extra);
    Ok(out)
}

/// Tower metric: maximum metric after zero padding the lower point, or the
/// level penalty if that is larger.
pub fn tower_distance(a: &TowerPoint, b: &TowerPoint) -> Result<i64> {
    if a.extra.len() != b.extra.len() {
        return Err(Error::FactorMismatch(a.extra.len(), b.extra.len()));
    }
    let (lo, hi) = if a.level <= b.level { (a, b) } else { (b, a) };
    let mut d = level_penalty(lo.level, hi.level);
    for (j, &h) in hi.coords.iter().enumerate() {
        let l = lo.coords.get(j).copied().unwrap_or(0);
        d = d.max((h - l).abs());
    }
    for (x, y) in lo.extra.iter().zip(&hi.extra) {
        d = d.max((x - y).abs());
    }
    Ok(d)
}

/// `Σ_i |x_i − y_i| + |a − b|`.
pub fn shift_distance(x: &ShiftPoint, y: &ShiftPoint) -> i64 {
    let mut d = (x.level - y.level).abs();
    let mut xi = x.support.iter().peekable();
    let mut yi = y.support.iter().peekable();
    loop {
        match (xi.peek(), yi.peek()) {
            (Some(&(&i, &u)), Some(&(&j, &v))) => {
                if i == j {
                    d += (u - v).abs();
                    xi.next();
                    yi.next();
                } else if i < j {
                    d += u.abs();
                    xi.next();
                } else {
                    d += v.abs();
                    yi.next();
                }
            }
            (Some(&(_, &u)), None) => {
                d += u.abs();
                xi.next();
            }
            (None, Some(&(_, &v))) => {
                d += v.abs();
                yi.next();
            }
            (None, None) => return d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(coords: &[i64]) -> TowerPoint {
        TowerPoint::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn pad_examples() {
        assert_eq!(pad_point(&tp(&[2]), 3).unwrap(), vec![2, 0, 0]);
        assert_eq!(pad_point(&tp(&[6, 3, 0]), 3).unwrap(), vec![6, 3, 0]);
        let p = TowerPoint::with_extra(vec![4, 8], vec![5]).unwrap();
        assert_eq!(pad_point(&p, 4).unwrap(), vec![4, 8, 0, 0, 5]);
        assert_eq!(
            pad_point(&tp(&[1, 2, 3]), 2),
            Err(Error::CannotTruncate {
                level: 3,
                target: 2
            })
        );
    }

    #[test]
    fn tower_distance_examples() {
        let a = tp(&[2]);
        let b = tp(&[6, 3, 0]);
        assert_eq!(tower_distance(&a, &a).unwrap(), 0);
        // max(|2-6|, 3, 0) = 4 against the penalty 1 + 2 = 3
        assert_eq!(tower_distance(&a, &b).unwrap(), 4);
        assert_eq!(tower_distance(&b, &a).unwrap(), 4);
        assert_eq!(tower_distance(&tp(&[0]), &tp(&[0, 0, 0])).unwrap(), 3);
        let e = TowerPoint::with_extra(vec![0], vec![1]).unwrap();
        assert_eq!(tower_distance(&a, &e), Err(Error::FactorMismatch(0, 1)));
    }

    #[test]
    fn level_penalty_closed_form() {
        for l in 1..20u32 {
            for k in l..25u32 {
                let sum: i64 = (l..k).map(i64::from).sum();
                assert_eq!(level_penalty(l, k), sum);
                assert_eq!(level_penalty(k, l), sum);
            }
        }
    }

    #[test]
    fn shift_distance_examples() {
        let x = ShiftPoint::new(0, [(0, 2)]);
        let y = ShiftPoint::new(1, []);
        assert_eq!(shift_distance(&x, &x), 0);
        assert_eq!(shift_distance(&x, &y), 3);
        let x = ShiftPoint::new(1, [(1, 2), (3, -4)]);
        let y = ShiftPoint::new(1, [(1, 2)]);
        assert_eq!(shift_distance(&x, &y), 4);
    }

    #[test]
    fn membership_checks() {
        let spec = SpaceSpec::tower(Step::PowerOfTwo);
        assert!(spec.check_point(&Point::Tower(tp(&[4, 8]))).is_ok());
        assert!(spec.check_point(&Point::Tower(tp(&[2, 8]))).is_err());
        assert!(spec.check_point(&Point::Lattice(vec![1])).is_err());

        let su = SpaceSpec::ShiftUnion;
        assert!(su.check_point(&ShiftPoint::new(0, [(0, 5), (1, 4)]).into()).is_ok());
        assert!(su.check_point(&ShiftPoint::new(0, [(1, 3)]).into()).is_err());
        assert!(su.check_point(&ShiftPoint::new(2, [(1, 3)]).into()).is_err());

        let gs = SpaceSpec::GradedSum;
        assert!(gs.check_point(&ShiftPoint::new(2, [(1, 3), (2, -1)]).into()).is_ok());
        assert!(gs.check_point(&ShiftPoint::new(2, [(3, 1)]).into()).is_err());

        let by = SpaceSpec::tower(Step::ByCoordinate);
        assert!(by.check_point(&Point::Tower(tp(&[5, 4, 9]))).is_ok());
        assert!(by.check_point(&Point::Tower(tp(&[5, 3, 9]))).is_err());
    }

    #[test]
    fn equal_level_distance_is_plain_max_metric() {
        let a = TowerPoint::with_extra(vec![3, -6, 9], vec![1, 2]).unwrap();
        let b = TowerPoint::with_extra(vec![0, 6, 9], vec![-4, 2]).unwrap();
        let plain = max_distance(&pad_point(&a, 3).unwrap(), &pad_point(&b, 3).unwrap()).unwrap();
        assert_eq!(tower_distance(&a, &b).unwrap(), plain);
    }
}
