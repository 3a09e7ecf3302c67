use super::{check_positive, CoverScheme};
use crate::error::{Error, Result};
use crate::spaces::{Point, SpaceSpec, Step};

/// Two-coloring of `Z` by half-open intervals of width `r`.
///
/// Returns `(1, j)` for `t ∈ [2jr, (2j+1)r)` and `(0, j)` for
/// `t ∈ [(2j−1)r, 2jr)`.
pub fn two_color(t: i64, r: i64) -> (u32, i64) {
    let q = t.div_euclid(r);
    if q.rem_euclid(2) == 0 {
        (1, q.div_euclid(2))
    } else {
        (0, (q + 1).div_euclid(2))
    }
}

/// Color and cell of a lattice point under the product of 1-D two-colorings.
/// Axis `a` contributes bit `a` of the color.
pub(crate) fn grid_cell(coords: &[i64], r: i64, key: &mut Vec<i64>) -> u32 {
    let mut color = 0u32;
    for (a, &t) in coords.iter().enumerate() {
        let (bit, j) = two_color(t, r);
        color |= bit << a;
        key.push(j);
    }
    color
}

/// Product grid on `Z^dim`: `2^dim` colors, each `r`-disjoint with cells of
/// side `r`.
pub fn grid_cover(dim: usize, r: i64) -> Result<CoverScheme> {
    grid_cover_on(vec![1; dim], r)
}

/// The same grid on the sublattice `∏ steps_a Z`.
pub fn grid_cover_on(steps: Vec<i64>, r: i64) -> Result<CoverScheme> {
    check_positive("grid gap", r)?;
    let dim = steps.len();
    if dim > 20 {
        return Err(Error::InvalidParameter(format!(
            "grid of dimension {dim} has too many colors"
        )));
    }
    let colors = 1usize << dim;
    Ok(CoverScheme::new(
        format!("grid(dim={dim}, r={r})"),
        SpaceSpec::PlainLattice { steps },
        vec![r; colors],
        vec![r - 1; colors],
        format!("all of Z^{dim}"),
        move |p| {
            let c = p.as_lattice()?;
            let mut key = Vec::with_capacity(c.len());
            let color = grid_cell(c, r, &mut key);
            Ok(Some((color, key)))
        },
    ))
}

/// Singletons of every tower point of level above `n`.
pub fn singleton_cover(spec: &SpaceSpec, n: u32) -> Result<CoverScheme> {
    if !matches!(spec, SpaceSpec::Tower { .. }) {
        return Err(Error::WrongSpace {
            expected: "tower".into(),
            got: format!("{:?}", spec.kind()),
        });
    }
    let sep = i64::from(n.max(1));
    Ok(CoverScheme::new(
        format!("singletons(n={n})"),
        spec.clone(),
        vec![sep],
        vec![0],
        format!("tower points of level > {n}"),
        move |p| {
            let t = p.as_tower()?;
            Ok((t.level > n).then(|| (0, p.digest())))
        },
    ))
}

/// `{x} × U` for tower points `x` of level above `n` and cells `U` of a
/// lattice scheme on the `Z^k` factor.
pub fn fiber_product_cover(base: &CoverScheme, step: Step, n: u32) -> Result<CoverScheme> {
    let k = match base.space() {
        SpaceSpec::PlainLattice { steps } => steps.len(),
        other => {
            return Err(Error::WrongSpace {
                expected: "plain-lattice".into(),
                got: format!("{:?}", other.kind()),
            })
        }
    };
    let n64 = i64::from(n.max(1));
    let sep = base.separations().iter().map(|&s| s.min(n64)).collect();
    let inner = base.clone();
    Ok(CoverScheme::new(
        format!("fiber-product({}, n={n})", base.name()),
        SpaceSpec::tower_with_factor(step, k),
        sep,
        base.bounds().to_vec(),
        format!("tower points of level > {n}, any factor value"),
        move |p| {
            let t = p.as_tower()?;
            if t.level <= n {
                return Ok(None);
            }
            let Some((c, cell)) = inner.classify_unchecked(&Point::Lattice(t.extra.clone()))?
            else {
                return Ok(None);
            };
            let mut key = Vec::with_capacity(1 + t.coords.len() + cell.len());
            key.push(i64::from(t.level));
            key.extend_from_slice(&t.coords);
            key.extend_from_slice(&cell);
            Ok(Some((c, key)))
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::classify_point;
    use crate::spaces::TowerPoint;

    fn lat(v: &[i64]) -> Point {
        Point::Lattice(v.to_vec())
    }

    #[test]
    fn one_dimensional_grid_examples() {
        let g = grid_cover(1, 5).unwrap();
        assert_eq!(classify_point(&g, &lat(&[7])).unwrap(), Some((0, vec![1])));
        assert_eq!(classify_point(&g, &lat(&[0])).unwrap(), Some((1, vec![0])));
        assert_eq!(classify_point(&g, &lat(&[-1])).unwrap(), Some((0, vec![0])));
        assert_eq!(classify_point(&g, &lat(&[-5])).unwrap(), Some((0, vec![0])));
        assert_eq!(classify_point(&g, &lat(&[-6])).unwrap(), Some((1, vec![-1])));
        assert_eq!(grid_cover(2, 3).unwrap().colors(), 4);
    }

    #[test]
    fn two_color_matches_interval_definitions() {
        for r in 1..6 {
            for t in -40..40 {
                let (bit, j) = two_color(t, r);
                let (lo, hi) = if bit == 1 {
                    (2 * j * r, (2 * j + 1) * r)
                } else {
                    ((2 * j - 1) * r, 2 * j * r)
                };
                assert!(lo <= t && t < hi, "t={t} r={r}");
            }
        }
    }

    #[test]
    fn zero_dimensional_grid_is_one_cell() {
        let g = grid_cover(0, 4).unwrap();
        assert_eq!(g.colors(), 1);
        assert_eq!(classify_point(&g, &lat(&[])).unwrap(), Some((0, vec![])));
    }

    #[test]
    fn singleton_threshold() {
        let spec = SpaceSpec::tower(Step::Identity);
        let s = singleton_cover(&spec, 3).unwrap();
        let p5: Point = TowerPoint::new(vec![0, 5, 10, 0, 5]).unwrap().into();
        assert_eq!(classify_point(&s, &p5).unwrap(), Some((0, p5.digest())));
        let p2: Point = TowerPoint::new(vec![2, 4]).unwrap().into();
        assert_eq!(classify_point(&s, &p2).unwrap(), None);
        let p3: Point = TowerPoint::new(vec![3, 3, 3]).unwrap().into();
        assert_eq!(classify_point(&s, &p3).unwrap(), None);
    }

    #[test]
    fn fiber_product_composes_classifications() {
        let base = grid_cover(1, 5).unwrap();
        let s = fiber_product_cover(&base, Step::Identity, 3).unwrap();
        let x = TowerPoint::with_extra(vec![4, 0, 8, -4], vec![7]).unwrap();
        let (c, key) = classify_point(&s, &x.clone().into()).unwrap().unwrap();
        assert_eq!(c, 0);
        assert_eq!(key, vec![4, 4, 0, 8, -4, 1]);
        let low = TowerPoint::with_extra(vec![2, 2], vec![7]).unwrap();
        assert_eq!(classify_point(&s, &low.into()).unwrap(), None);
    }

    #[test]
    fn wrong_point_kind_is_an_error() {
        let g = grid_cover(1, 5).unwrap();
        let t: Point = TowerPoint::new(vec![1]).unwrap().into();
        assert!(matches!(
            classify_point(&g, &t),
            Err(Error::WrongSpace { .. })
        ));
    }
}
