use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};

use super::{Point, ShiftPoint, SpaceSpec, TowerPoint};
use crate::error::{Error, Result};

/// Largest number of points a single window may materialize.
pub const MAX_WINDOW_POINTS: u64 = 40_000_000;

/// Inclusive integer interval `[lo, hi]`, written `[lo, hi]` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub const fn new(lo: i64, hi: i64) -> Self {
        Interval { lo, hi }
    }

    /// `[-r, r]`.
    pub const fn symmetric(r: i64) -> Self {
        Interval { lo: -r, hi: r }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// All multiples of `m` inside the interval, ascending.
    /// First and last multiple of `m` inside, if any.
    pub fn multiple_bounds(&self, m: i64) -> Option<(i64, i64)> {
        debug_assert!(m > 0);
        let first = self.lo.div_euclid(m) * m + if self.lo.rem_euclid(m) == 0 { 0 } else { m };
        let last = self.hi.div_euclid(m) * m;
        (!self.is_empty() && first <= last).then_some((first, last))
    }

    pub fn multiple_count(&self, m: i64) -> u64 {
        self.multiple_bounds(m)
            .map_or(0, |(a, b)| ((b - a) / m) as u64 + 1)
    }

    pub fn multiples(&self, m: i64) -> Vec<i64> {
        debug_assert!(m > 0);
        if self.is_empty() {
            return Vec::new();
        }
        let first = self.lo.div_euclid(m) * m + if self.lo.rem_euclid(m) == 0 { 0 } else { m };
        let mut out = Vec::new();
        let mut v = first;
        while v <= self.hi {
            out.push(v);
            v += m;
        }
        out
    }
}

impl From<(i64, i64)> for Interval {
    fn from((lo, hi): (i64, i64)) -> Self {
        Interval { lo, hi }
    }
}

impl From<Interval> for (i64, i64) {
    fn from(i: Interval) -> Self {
        (i.lo, i.hi)
    }
}

/// A finite region (level range × coordinate box) over which infinite
/// constructions are materialized.
///
/// `boxes` holds one interval per coordinate, or a single interval that is
/// broadcast to every coordinate. For shift-type spaces `index_boxes`
/// overrides the box of individual absolute indices and `max_support` caps
/// the largest index that may be nonzero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Interval>,
    #[serde(default, rename = "box", deserialize_with = "one_or_many")]
    pub boxes: Vec<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_box: Option<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_support: Option<i64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub index_boxes: BTreeMap<i64, Interval>,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Interval>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Boxes {
        One(Interval),
        Many(Vec<Interval>),
    }
    Ok(match Boxes::deserialize(d)? {
        Boxes::One(i) => vec![i],
        Boxes::Many(v) => v,
    })
}

impl Window {
    /// A lattice box given per axis.
    pub fn lattice(boxes: Vec<Interval>) -> Self {
        Window {
            boxes,
            ..Window::default()
        }
    }

    /// The same interval on every coordinate.
    pub fn cube(b: Interval) -> Self {
        Window {
            boxes: vec![b],
            ..Window::default()
        }
    }

    pub fn with_levels(mut self, lo: i64, hi: i64) -> Self {
        self.levels = Some(Interval::new(lo, hi));
        self
    }

    pub fn with_extra_box(mut self, b: Interval) -> Self {
        self.extra_box = Some(b);
        self
    }

    pub fn with_max_support(mut self, m: i64) -> Self {
        self.max_support = Some(m);
        self
    }

    pub fn with_index_box(mut self, index: i64, b: Interval) -> Self {
        self.index_boxes.insert(index, b);
        self
    }

    pub(crate) fn box_for(&self, j: usize) -> Result<Interval> {
        match self.boxes.len() {
            0 => Err(Error::InfiniteWindow("no coordinate box".into())),
            1 => Ok(self.boxes[0]),
            _ => self.boxes.get(j).copied().ok_or_else(|| {
                Error::MalformedWindow(format!("no box for coordinate {}", j + 1))
            }),
        }
    }

    fn broadcast_box(&self) -> Result<Interval> {
        match self.boxes.as_slice() {
            [b] => Ok(*b),
            [] => Err(Error::InfiniteWindow("no coordinate box".into())),
            _ => Err(Error::MalformedWindow(
                "this space takes a single broadcast box".into(),
            )),
        }
    }

    fn index_box(&self, index: i64) -> Result<Interval> {
        match self.index_boxes.get(&index) {
            Some(b) => Ok(*b),
            None => self.broadcast_box(),
        }
    }

    fn level_range(&self) -> Result<Interval> {
        let l = self
            .levels
            .ok_or_else(|| Error::InfiniteWindow("no level range".into()))?;
        if l.is_empty() {
            return Err(Error::MalformedWindow(format!(
                "empty level range [{}, {}]",
                l.lo, l.hi
            )));
        }
        Ok(l)
    }

    fn check_boxes(&self) -> Result<()> {
        let all = self
            .boxes
            .iter()
            .chain(self.extra_box.iter())
            .chain(self.index_boxes.values());
        for b in all {
            if b.is_empty() {
                return Err(Error::MalformedWindow(format!(
                    "empty interval [{}, {}]",
                    b.lo, b.hi
                )));
            }
        }
        Ok(())
    }
}

/// Calls `f` on every element of the cartesian product of `lists`, in
/// lexicographic order.
pub(crate) fn for_each_product(lists: &[Vec<i64>], mut f: impl FnMut(&[i64])) {
    if lists.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut cur: Vec<i64> = lists.iter().map(|l| l[0]).collect();
    loop {
        f(&cur);
        let mut axis = lists.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < lists[axis].len() {
                cur[axis] = lists[axis][idx[axis]];
                break;
            }
            idx[axis] = 0;
            cur[axis] = lists[axis][0];
        }
    }
}

/// Per-axis values of a lattice window, before taking the product.
pub(crate) fn lattice_axis_values(steps: &[i64], w: &Window) -> Result<Vec<Vec<i64>>> {
    w.check_boxes()?;
    steps
        .iter()
        .enumerate()
        .map(|(j, &s)| Ok(w.box_for(j)?.multiples(s)))
        .collect()
}

/// Per-axis value counts of a lattice window, without listing them.
pub(crate) fn lattice_axis_counts(steps: &[i64], w: &Window) -> Result<Vec<u64>> {
    w.check_boxes()?;
    steps
        .iter()
        .enumerate()
        .map(|(j, &s)| Ok(w.box_for(j)?.multiple_count(s)))
        .collect()
}

pub(crate) fn product_len(lists: &[Vec<i64>]) -> u64 {
    lists
        .iter()
        .fold(1u64, |acc, l| acc.saturating_mul(l.len() as u64))
}

fn guard(total: u64) -> Result<()> {
    if total > MAX_WINDOW_POINTS {
        return Err(Error::InvalidParameter(format!(
            "window holds {total} points, above the materialization limit {MAX_WINDOW_POINTS}"
        )));
    }
    Ok(())
}

/// All valid points of `spec` inside `w`, duplicate-free, ordered
/// lexicographically by (level, coords, extra).
pub fn enumerate_window(spec: &SpaceSpec, w: &Window) -> Result<Vec<Point>> {
    spec.validate()?;
    w.check_boxes()?;
    match spec {
        SpaceSpec::PlainLattice { steps } => {
            let lists = lattice_axis_values(steps, w)?;
            if steps.is_empty() {
                return Ok(vec![Point::Lattice(Vec::new())]);
            }
            guard(product_len(&lists))?;
            let mut out = Vec::with_capacity(product_len(&lists) as usize);
            for_each_product(&lists, |c| out.push(Point::Lattice(c.to_vec())));
            Ok(out)
        }
        SpaceSpec::Tower { step, factor_dim } => Ok(tower_points(*step, *factor_dim, w)?
            .into_iter()
            .map(Point::Tower)
            .collect()),
        SpaceSpec::ProductOfTowers { step } => {
            let factor = tower_points(*step, 0, w)?;
            guard((factor.len() as u64).saturating_mul(factor.len() as u64))?;
            let mut out = Vec::with_capacity(factor.len() * factor.len());
            for a in &factor {
                for b in &factor {
                    out.push(Point::Pair(a.clone(), b.clone()));
                }
            }
            Ok(out)
        }
        SpaceSpec::ShiftUnion => {
            let levels = w.level_range()?;
            let max_support = w
                .max_support
                .ok_or_else(|| Error::InfiniteWindow("no max-support".into()))?;
            let mut out = Vec::new();
            for a in levels.lo..=levels.hi {
                let indices: Vec<i64> = (a..=max_support).collect();
                let lists = indices
                    .iter()
                    .map(|&i| Ok(w.index_box(i)?.multiples(i - a + 1)))
                    .collect::<Result<Vec<_>>>()?;
                push_shift_points(&mut out, a, &indices, &lists)?;
            }
            Ok(out)
        }
        SpaceSpec::GradedSum => {
            let levels = w.level_range()?;
            if levels.lo < 1 {
                return Err(Error::MalformedWindow(
                    "graded-sum levels start at 1".into(),
                ));
            }
            let mut out = Vec::new();
            for k in levels.lo..=levels.hi {
                let top = w.max_support.map_or(k, |m| m.min(k));
                let indices: Vec<i64> = (1..=top).collect();
                let lists = indices
                    .iter()
                    .map(|&i| Ok(w.index_box(i)?.multiples(1)))
                    .collect::<Result<Vec<_>>>()?;
                push_shift_points(&mut out, k, &indices, &lists)?;
            }
            Ok(out)
        }
    }
}

fn push_shift_points(
    out: &mut Vec<Point>,
    level: i64,
    indices: &[i64],
    lists: &[Vec<i64>],
) -> Result<()> {
    guard(product_len(lists).saturating_add(out.len() as u64))?;
    if indices.is_empty() {
        out.push(Point::Shift(ShiftPoint::new(level, [])));
        return Ok(());
    }
    for_each_product(lists, |vals| {
        let p = ShiftPoint::new(level, indices.iter().copied().zip(vals.iter().copied()));
        out.push(Point::Shift(p));
    });
    Ok(())
}

fn tower_points(step: super::Step, factor_dim: usize, w: &Window) -> Result<Vec<TowerPoint>> {
    let levels = w.level_range()?;
    if levels.lo < 1 {
        return Err(Error::MalformedWindow("tower levels start at 1".into()));
    }
    let extra_box = match w.extra_box {
        Some(b) => Some(b),
        None if factor_dim > 0 => Some(w.broadcast_box()?),
        None => None,
    };
    let mut out = Vec::new();
    for level in levels.lo..=levels.hi {
        let level = u32::try_from(level)
            .map_err(|_| Error::MalformedWindow(format!("level {level} out of range")))?;
        let mut lists = Vec::with_capacity(level as usize + factor_dim);
        for j in 0..level as usize {
            lists.push(w.box_for(j)?.multiples(step.modulus(level, j)?));
        }
        if let Some(b) = extra_box {
            for _ in 0..factor_dim {
                lists.push(b.multiples(1));
            }
        }
        guard(product_len(&lists).saturating_add(out.len() as u64))?;
        let split = level as usize;
        for_each_product(&lists, |vals| {
            out.push(TowerPoint {
                level,
                coords: vals[..split].to_vec(),
                extra: vals[split..].to_vec(),
            });
        });
    }
    Ok(out)
}

/// Union of several windows, sorted and deduplicated.
pub fn enumerate_windows(spec: &SpaceSpec, ws: &[Window]) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for w in ws {
        out.extend(enumerate_window(spec, w)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Step;

    #[test]
    fn multiples_handles_negative_bounds() {
        assert_eq!(Interval::new(-4, 4).multiples(4), vec![-4, 0, 4]);
        assert_eq!(Interval::new(-5, 5).multiples(4), vec![-4, 0, 4]);
        assert_eq!(Interval::new(-3, -1).multiples(4), Vec::<i64>::new());
        assert_eq!(Interval::new(1, 9).multiples(3), vec![3, 6, 9]);
        for (lo, hi, m) in [(-4, 4, 4), (-5, 5, 4), (-3, -1, 4), (1, 9, 3), (7, 7, 7), (3, 2, 1)] {
            let v = Interval { lo, hi }.multiples(m);
            assert_eq!(Interval { lo, hi }.multiple_count(m), v.len() as u64);
            assert_eq!(
                Interval { lo, hi }.multiple_bounds(m),
                v.first().map(|&a| (a, *v.last().unwrap()))
            );
        }
    }

    #[test]
    fn tower_level_one_window() {
        let pts = enumerate_window(
            &SpaceSpec::tower(Step::Identity),
            &Window::cube(Interval::new(-2, 2)).with_levels(1, 1),
        )
        .unwrap();
        let coords: Vec<_> = pts
            .iter()
            .map(|p| p.as_tower().unwrap().coords[0])
            .collect();
        assert_eq!(coords, vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn power_of_two_level_two_has_nine_points() {
        let pts = enumerate_window(
            &SpaceSpec::tower(Step::PowerOfTwo),
            &Window::cube(Interval::new(-4, 4)).with_levels(2, 2),
        )
        .unwrap();
        assert_eq!(pts.len(), 9);
    }

    #[test]
    fn shift_union_window_respects_divisibility() {
        let pts = enumerate_window(
            &SpaceSpec::ShiftUnion,
            &Window::cube(Interval::new(-2, 2))
                .with_levels(0, 0)
                .with_max_support(1),
        )
        .unwrap();
        assert_eq!(pts.len(), 15);
        for p in &pts {
            SpaceSpec::ShiftUnion.check_point(p).unwrap();
        }
    }

    #[test]
    fn missing_bounds_are_infinite() {
        let spec = SpaceSpec::tower(Step::Identity);
        assert!(matches!(
            enumerate_window(&spec, &Window::cube(Interval::new(0, 1))),
            Err(Error::InfiniteWindow(_))
        ));
        assert!(matches!(
            enumerate_window(
                &SpaceSpec::ShiftUnion,
                &Window::cube(Interval::new(0, 1)).with_levels(0, 1)
            ),
            Err(Error::InfiniteWindow(_))
        ));
        assert!(matches!(
            enumerate_window(&SpaceSpec::lattice(2), &Window::default()),
            Err(Error::InfiniteWindow(_))
        ));
    }

    #[test]
    fn window_json_accepts_broadcast_and_per_axis_boxes() {
        let w: Window = serde_json::from_str(r#"{"levels":[1,2],"box":[-3,3]}"#).unwrap();
        assert_eq!(w.boxes, vec![Interval::new(-3, 3)]);
        let w: Window = serde_json::from_str(r#"{"box":[[-1,1],[0,4]]}"#).unwrap();
        assert_eq!(w.boxes, vec![Interval::new(-1, 1), Interval::new(0, 4)]);
    }

    #[test]
    fn enumeration_is_sorted_and_unique() {
        let spec = SpaceSpec::tower_with_factor(Step::Identity, 1);
        let w = Window::cube(Interval::new(-3, 3)).with_levels(1, 3);
        let pts = enumerate_window(&spec, &w).unwrap();
        let mut sorted = pts.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(pts, sorted);
    }
}
