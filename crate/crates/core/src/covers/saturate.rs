use super::{CellKey, FiniteFamily};
use crate::error::{Error, Result};
use crate::spaces::{Point, SpaceSpec};

fn set_distance(spec: &SpaceSpec, a: &[Point], b: &[Point]) -> Result<Option<i64>> {
    let mut best: Option<i64> = None;
    for p in a {
        for q in b {
            let d = spec.distance(p, q)?;
            best = Some(best.map_or(d, |x| x.min(d)));
        }
    }
    Ok(best)
}

/// `𝒱 ∪_r 𝒰`: every `U` within distance `r` of some `V` is absorbed into the
/// nearest such `V` (smallest key on ties); the others survive unchanged.
///
/// Output keys are `[0, V key..]` for saturated `V` cells and `[1, U key..]`
/// for surviving `U` cells.
pub fn saturated_union(
    v: &FiniteFamily,
    u: &FiniteFamily,
    r: i64,
    spec: &SpaceSpec,
) -> Result<FiniteFamily> {
    if r <= 0 {
        return Err(Error::InvalidParameter(format!(
            "saturation radius must be positive, got {r}"
        )));
    }
    let tag = |t: i64, key: &CellKey| {
        let mut k = Vec::with_capacity(key.len() + 1);
        k.push(t);
        k.extend_from_slice(key);
        k
    };
    let mut out = FiniteFamily::new();
    for (key, pts) in &v.cells {
        out.insert(tag(0, key), pts.clone());
    }
    for (ukey, upts) in &u.cells {
        let mut target: Option<(i64, &CellKey)> = None;
        for (vkey, vpts) in &v.cells {
            if let Some(d) = set_distance(spec, upts, vpts)? {
                if d <= r && target.map_or(true, |(best, _)| d < best) {
                    target = Some((d, vkey));
                }
            }
        }
        match target {
            Some((_, vkey)) => out.insert(tag(0, vkey), upts.clone()),
            None => out.insert(tag(1, ukey), upts.clone()),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(lo: i64, hi: i64) -> Vec<Point> {
        (lo..=hi).map(|t| Point::Lattice(vec![t])).collect()
    }

    fn family(cells: &[(i64, i64)]) -> FiniteFamily {
        let mut f = FiniteFamily::new();
        for (i, &(lo, hi)) in cells.iter().enumerate() {
            f.insert(vec![i as i64], interval(lo, hi));
        }
        f
    }

    #[test]
    fn one_dimensional_example() {
        let spec = SpaceSpec::lattice(1);
        let out = saturated_union(&family(&[(0, 10)]), &family(&[(12, 14), (30, 32)]), 3, &spec)
            .unwrap();
        assert_eq!(out.len(), 2);
        let mut first = interval(0, 10);
        first.extend(interval(12, 14));
        assert_eq!(out.cells[&vec![0, 0]], first);
        assert_eq!(out.cells[&vec![1, 1]], interval(30, 32));
    }

    #[test]
    fn far_families_stay_apart() {
        let spec = SpaceSpec::lattice(1);
        let out =
            saturated_union(&family(&[(0, 3)]), &family(&[(10, 12), (-20, -18)]), 5, &spec).unwrap();
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn ties_go_to_the_smallest_key() {
        let spec = SpaceSpec::lattice(1);
        let out = saturated_union(&family(&[(0, 3), (9, 12)]), &family(&[(6, 6)]), 3, &spec)
            .unwrap();
        assert_eq!(out.cells[&vec![0, 0]].len(), 5);
        assert_eq!(out.cells[&vec![0, 1]].len(), 4);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let spec = SpaceSpec::lattice(1);
        assert!(saturated_union(&family(&[]), &family(&[]), 0, &spec).is_err());
    }
}
