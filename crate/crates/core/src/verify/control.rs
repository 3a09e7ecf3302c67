use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spaces::{enumerate_window, evaluate_map, MapSpec, Point, SpaceSpec, Window};

/// A pair breaking `ρ₁(d(x,y)) ≤ d(f(x),f(y)) ≤ ρ₂(d(x,y))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlViolation {
    pub x: Point,
    pub y: Point,
    pub domain_distance: i64,
    pub codomain_distance: i64,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlReport {
    pub map: String,
    pub points: u64,
    pub pairs: u64,
    pub violations_total: u64,
    pub violations: Vec<ControlViolation>,
    /// Points where `f` failed or left the codomain.
    pub evaluation_errors: Vec<String>,
    /// Extremes of `d(f(x),f(y)) − d(x,y)` over all pairs.
    pub max_observed_stretch: Option<i64>,
    pub min_observed_stretch: Option<i64>,
    pub passed: bool,
}

type RowTally = (u64, Vec<ControlViolation>, Option<(i64, i64)>);

/// Checks the controls of `f` on every pair of window points.
pub fn check_coarse_control(
    f: &MapSpec,
    domain: &SpaceSpec,
    codomain: &SpaceSpec,
    w: &Window,
) -> Result<ControlReport> {
    let points = enumerate_window(domain, w)?;
    check_coarse_control_points(f, domain, codomain, &points, 50)
}

/// Checks the controls of `f` on every pair of `points`, listing at most
/// `max_listed` violations.
pub fn check_coarse_control_points(
    f: &MapSpec,
    domain: &SpaceSpec,
    codomain: &SpaceSpec,
    points: &[Point],
    max_listed: usize,
) -> Result<ControlReport> {
    f.validate()?;
    let mut errors = Vec::new();
    let mut kept: Vec<(&Point, Point)> = Vec::with_capacity(points.len());
    for p in points {
        let image = domain
            .check_point(p)
            .and_then(|_| evaluate_map(f, p))
            .and_then(|q| codomain.check_point(&q).map(|_| q));
        match image {
            Ok(q) => kept.push((p, q)),
            Err(e) => errors.push(format!("{p}: {e}")),
        }
    }
    let n = kept.len();
    let per_row: Vec<Result<RowTally>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut count = 0u64;
            let mut listed = Vec::new();
            let mut range: Option<(i64, i64)> = None;
            let (x, fx) = &kept[i];
            for (y, fy) in &kept[i + 1..] {
                let d = domain.distance(x, y)?;
                let e = codomain.distance(fx, fy)?;
                let (lo, hi) = (f.lower.apply(d), f.upper.apply(d));
                let s = e - d;
                range = Some(range.map_or((s, s), |(a, b)| (a.min(s), b.max(s))));
                if e < lo || e > hi {
                    count += 1;
                    if listed.len() < max_listed {
                        listed.push(ControlViolation {
                            x: (*x).clone(),
                            y: (*y).clone(),
                            domain_distance: d,
                            codomain_distance: e,
                            lower: lo,
                            upper: hi,
                        });
                    }
                }
            }
            Ok((count, listed, range))
        })
        .collect();
    let mut violations_total = 0;
    let mut violations = Vec::new();
    let mut range: Option<(i64, i64)> = None;
    for row in per_row {
        let (c, l, r) = row?;
        violations_total += c;
        for v in l {
            if violations.len() < max_listed {
                violations.push(v);
            }
        }
        if let Some((a, b)) = r {
            range = Some(range.map_or((a, b), |(x, y)| (x.min(a), y.max(b))));
        }
    }
    let passed = violations_total == 0 && errors.is_empty();
    Ok(ControlReport {
        map: format!("{:?}", f.name),
        points: points.len() as u64,
        pairs: (n as u64) * (n as u64).saturating_sub(1) / 2,
        violations_total,
        violations,
        evaluation_errors: errors,
        max_observed_stretch: range.map(|r| r.1),
        min_observed_stretch: range.map(|r| r.0),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Control, Interval, Step};

    #[test]
    fn identity_has_no_violations() {
        let spec = SpaceSpec::lattice(2);
        let r = check_coarse_control(
            &MapSpec::identity(),
            &spec,
            &spec,
            &Window::cube(Interval::new(-3, 3)),
        )
        .unwrap();
        assert!(r.passed);
        assert_eq!(r.pairs, 49 * 48 / 2);
        assert_eq!(r.max_observed_stretch, Some(0));
    }

    #[test]
    fn phi_is_an_isometry() {
        let dom = SpaceSpec::tower_with_factor(Step::Identity, 1);
        let cod = SpaceSpec::lattice(5);
        let w = Window::cube(Interval::new(-4, 4)).with_levels(1, 3);
        let r = check_coarse_control(&MapSpec::phi(3), &dom, &cod, &w).unwrap();
        assert!(r.passed, "{:?}", r.violations.first());
        assert_eq!((r.min_observed_stretch, r.max_observed_stretch), (Some(0), Some(0)));
    }

    #[test]
    fn stretched_pairs_are_reported() {
        let spec = SpaceSpec::lattice(1);
        let pt = |t: i64| Point::Lattice(vec![t]);
        let f = MapSpec::delta(vec![(pt(0), pt(0)), (pt(1), pt(5)), (pt(2), pt(6))])
            .controls(Control::Identity, Control::Plus(3));
        let r = check_coarse_control_points(&f, &spec, &spec, &[pt(0), pt(1), pt(2)], 10).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violations_total, 2);
        assert_eq!(r.max_observed_stretch, Some(4));
        assert_eq!(r.min_observed_stretch, Some(0));
    }
}
