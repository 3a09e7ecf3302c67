//! Flat integer rows for fast exact distance computations.
//!
//! Every metric handled here dominates the maximum metric on the encoded
//! row (level penalties dominate level differences, ℓ1 dominates ℓ∞), which
//! is what makes bucket-grid neighbor search exact.

use crate::error::{Error, Result};
use crate::spaces::{level_penalty, Point, SpaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Shape {
    /// Maximum metric on the whole row.
    Linf,
    /// `[padded coords and extra (coords entries), level]`.
    Tower { coords: usize },
    /// `[a padded (a entries), b padded (b entries), level a, level b]`.
    Pair { a: usize, b: usize },
    /// ℓ1 on the whole row (coordinates over an index range, then the level).
    L1,
}

#[derive(Debug, Clone)]
pub(crate) struct Encoded {
    pub dim: usize,
    pub shape: Shape,
    pub rows: Vec<i64>,
}

fn penalty(a: i64, b: i64) -> i64 {
    level_penalty(a as u32, b as u32)
}

impl Encoded {
    pub fn new(spec: &SpaceSpec, points: &[Point]) -> Result<Self> {
        match spec {
            SpaceSpec::PlainLattice { steps } => {
                let dim = steps.len();
                let mut rows = Vec::with_capacity(points.len() * dim);
                for p in points {
                    let c = p.as_lattice()?;
                    if c.len() != dim {
                        return Err(Error::FactorMismatch(c.len(), dim));
                    }
                    rows.extend_from_slice(c);
                }
                Ok(Encoded {
                    dim,
                    shape: Shape::Linf,
                    rows,
                })
            }
            SpaceSpec::Tower { factor_dim, .. } => {
                let top = points
                    .iter()
                    .map(|p| p.as_tower().map(|t| t.level as usize))
                    .try_fold(0, |m, l| l.map(|l| m.max(l)))?;
                let coords = top + factor_dim;
                let dim = coords + 1;
                let mut rows = Vec::with_capacity(points.len() * dim);
                for p in points {
                    let t = p.as_tower()?;
                    if t.extra.len() != *factor_dim {
                        return Err(Error::FactorMismatch(t.extra.len(), *factor_dim));
                    }
                    rows.extend_from_slice(&t.coords);
                    rows.resize(rows.len() + top - t.coords.len(), 0);
                    rows.extend_from_slice(&t.extra);
                    rows.push(i64::from(t.level));
                }
                Ok(Encoded {
                    dim,
                    shape: Shape::Tower { coords },
                    rows,
                })
            }
            SpaceSpec::ProductOfTowers { .. } => {
                let (mut la, mut lb) = (0usize, 0usize);
                for p in points {
                    let (a, b) = p.as_pair()?;
                    la = la.max(a.level as usize);
                    lb = lb.max(b.level as usize);
                }
                let dim = la + lb + 2;
                let mut rows = Vec::with_capacity(points.len() * dim);
                for p in points {
                    let (a, b) = p.as_pair()?;
                    rows.extend_from_slice(&a.coords);
                    rows.resize(rows.len() + la - a.coords.len(), 0);
                    rows.extend_from_slice(&b.coords);
                    rows.resize(rows.len() + lb - b.coords.len(), 0);
                    rows.push(i64::from(a.level));
                    rows.push(i64::from(b.level));
                }
                Ok(Encoded {
                    dim,
                    shape: Shape::Pair { a: la, b: lb },
                    rows,
                })
            }
            SpaceSpec::ShiftUnion | SpaceSpec::GradedSum => {
                let mut lo = i64::MAX;
                let mut hi = i64::MIN;
                for p in points {
                    let s = p.as_shift()?;
                    if let (Some(a), Some(b)) = (s.min_index(), s.max_index()) {
                        lo = lo.min(a);
                        hi = hi.max(b);
                    }
                }
                let width = if lo <= hi { (hi - lo + 1) as usize } else { 0 };
                if width > 4096 {
                    return Err(Error::InvalidParameter(format!(
                        "support spans {width} indices"
                    )));
                }
                let dim = width + 1;
                let mut rows = vec![0i64; points.len() * dim];
                for (n, p) in points.iter().enumerate() {
                    let s = p.as_shift()?;
                    let row = &mut rows[n * dim..(n + 1) * dim];
                    for (&i, &v) in &s.support {
                        row[(i - lo) as usize] = v;
                    }
                    row[width] = s.level;
                }
                Ok(Encoded {
                    dim,
                    shape: Shape::L1,
                    rows,
                })
            }
        }
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.rows.len().checked_div(self.dim).unwrap_or(0)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> i64 {
        row_distance(self.shape, self.row(i), self.row(j))
    }

    /// Exact diameter of the points `members`.
    pub fn diameter(&self, members: &[u32]) -> i64 {
        if members.len() < 2 {
            return 0;
        }
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for &m in members {
            for (a, &v) in self.row(m as usize).iter().enumerate() {
                lo[a] = lo[a].min(v);
                hi[a] = hi[a].max(v);
            }
        }
        let ext = |a: usize| hi[a] - lo[a];
        let max_ext = |r: std::ops::Range<usize>| r.map(ext).max().unwrap_or(0);
        match self.shape {
            Shape::Linf => max_ext(0..self.dim),
            Shape::Tower { coords } => {
                max_ext(0..coords).max(penalty(lo[coords], hi[coords]))
            }
            Shape::Pair { a, b } => {
                let la = a + b;
                max_ext(0..a)
                    .max(penalty(lo[la], hi[la]))
                    .max(max_ext(a..a + b))
                    .max(penalty(lo[la + 1], hi[la + 1]))
            }
            Shape::L1 => {
                let varying: Vec<usize> = (0..self.dim).filter(|&a| ext(a) > 0).collect();
                self.l1_diameter(members, &varying)
            }
        }
    }

    fn l1_diameter(&self, members: &[u32], axes: &[usize]) -> i64 {
        if axes.is_empty() {
            return 0;
        }
        let n = members.len() as u128;
        let pairwise = n * n / 2;
        let signed = if axes.len() <= 24 {
            n << (axes.len() - 1)
        } else {
            u128::MAX
        };
        if pairwise <= signed {
            let mut best = 0;
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    best = best.max(self.dist(i as usize, j as usize));
                }
            }
            return best;
        }
        // max over sign vectors s of (max s·p − min s·p); the first sign is fixed
        let mut best = 0;
        for mask in 0u64..(1u64 << (axes.len() - 1)) {
            let mut lo = i64::MAX;
            let mut hi = i64::MIN;
            for &m in members {
                let row = self.row(m as usize);
                let mut v = row[axes[0]];
                for (b, &a) in axes[1..].iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        v -= row[a];
                    } else {
                        v += row[a];
                    }
                }
                lo = lo.min(v);
                hi = hi.max(v);
            }
            best = best.max(hi - lo);
        }
        best
    }
}

#[inline]
pub(crate) fn row_distance(shape: Shape, x: &[i64], y: &[i64]) -> i64 {
    let linf = |r: std::ops::Range<usize>| {
        r.map(|a| (x[a] - y[a]).abs()).max().unwrap_or(0)
    };
    match shape {
        Shape::Linf => linf(0..x.len()),
        Shape::Tower { coords } => linf(0..coords).max(penalty(x[coords], y[coords])),
        Shape::Pair { a, b } => {
            let l = a + b;
            linf(0..a)
                .max(penalty(x[l], y[l]))
                .max(linf(a..l))
                .max(penalty(x[l + 1], y[l + 1]))
        }
        Shape::L1 => x.iter().zip(y).map(|(u, v)| (u - v).abs()).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{enumerate_window, Interval, Step, Window};

    fn agrees(spec: &SpaceSpec, w: &Window) {
        let pts = enumerate_window(spec, w).unwrap();
        let enc = Encoded::new(spec, &pts).unwrap();
        assert_eq!(enc.len(), pts.len());
        let stride = (pts.len() / 60).max(1);
        for i in (0..pts.len()).step_by(stride) {
            for j in (0..pts.len()).step_by(stride) {
                let d = spec.distance(&pts[i], &pts[j]).unwrap();
                assert_eq!(enc.dist(i, j), d, "{} vs {}", pts[i], pts[j]);
                let linf = enc
                    .row(i)
                    .iter()
                    .zip(enc.row(j))
                    .map(|(a, b)| (a - b).abs())
                    .max()
                    .unwrap_or(0);
                assert!(linf <= d);
            }
        }
        let all: Vec<u32> = (0..pts.len() as u32).collect();
        let mut brute = 0;
        for i in 0..pts.len().min(300) {
            for j in 0..pts.len().min(300) {
                brute = brute.max(spec.distance(&pts[i], &pts[j]).unwrap());
            }
        }
        let first: Vec<u32> = all.iter().copied().take(300).collect();
        assert_eq!(enc.diameter(&first), brute);
    }

    #[test]
    fn encodings_reproduce_distances() {
        agrees(
            &SpaceSpec::tower_with_factor(Step::Identity, 1),
            &Window::cube(Interval::new(-3, 3)).with_levels(1, 3),
        );
        agrees(
            &SpaceSpec::ProductOfTowers {
                step: Step::PowerOfTwo,
            },
            &Window::cube(Interval::new(-4, 4)).with_levels(1, 2),
        );
        agrees(
            &SpaceSpec::ShiftUnion,
            &Window::cube(Interval::new(-3, 3))
                .with_levels(-1, 1)
                .with_max_support(2),
        );
        agrees(
            &SpaceSpec::lattice(3),
            &Window::cube(Interval::new(-2, 2)),
        );
    }

    #[test]
    fn l1_sign_and_pairwise_diameters_agree() {
        let spec = SpaceSpec::GradedSum;
        let pts = enumerate_window(
            &spec,
            &Window::cube(Interval::new(-2, 2)).with_levels(1, 3),
        )
        .unwrap();
        let enc = Encoded::new(&spec, &pts).unwrap();
        let members: Vec<u32> = (0..pts.len() as u32).collect();
        let axes: Vec<usize> = (0..enc.dim).collect();
        let mut brute = 0;
        for &i in &members {
            for &j in &members {
                brute = brute.max(enc.dist(i as usize, j as usize));
            }
        }
        assert_eq!(enc.l1_diameter(&members, &axes), brute);
        assert_eq!(enc.diameter(&members), brute);
    }
}
