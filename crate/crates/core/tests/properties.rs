use std::collections::BTreeMap;

use coasdim_core::covers::{
    classify_point, grid_cover, mixed_grid_cover, shift_union_cover, CellKey, CoverScheme,
};
use coasdim_core::spaces::{
    enumerate_window, evaluate_map, level_penalty, shift_distance, tower_distance, Interval,
    MapSpec, Point, ShiftPoint, SpaceSpec, Step, TowerPoint, Window,
};
use coasdim_core::verify::{verify_cover, Verdict};
use proptest::prelude::*;

fn tower_point(max_level: usize) -> impl Strategy<Value = TowerPoint> {
    prop::collection::vec(-20i64..=20, 1..=max_level).prop_map(|c| TowerPoint::new(c).unwrap())
}

fn shift_point() -> impl Strategy<Value = ShiftPoint> {
    (-4i64..=4, prop::collection::btree_map(-6i64..=6, -9i64..=9, 0..5))
        .prop_map(|(a, s)| ShiftPoint::new(a, s))
}

// straight from the definition: pad, take the max, compare to the summed levels
fn tower_oracle(a: &TowerPoint, b: &TowerPoint) -> i64 {
    let n = a.coords.len().max(b.coords.len());
    let at = |p: &TowerPoint, i: usize| p.coords.get(i).copied().unwrap_or(0);
    let coord = (0..n).map(|i| (at(a, i) - at(b, i)).abs()).max().unwrap();
    let (lo, hi) = (a.level.min(b.level), a.level.max(b.level));
    let penalty: i64 = (lo..hi).map(i64::from).sum();
    coord.max(penalty)
}

fn shift_oracle(x: &ShiftPoint, y: &ShiftPoint) -> i64 {
    (-6..=6).map(|i| (x.get(i) - y.get(i)).abs()).sum::<i64>() + (x.level - y.level).abs()
}

fn lattice(p: &Point) -> &[i64] {
    p.as_lattice().unwrap()
}

fn linf(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or(0)
}

struct Brute {
    uncovered: usize,
    max_diameter: Vec<i64>,
    min_separation: Vec<Option<i64>>,
}

// all pairs, no bucketing
fn brute_force(s: &CoverScheme, spec: &SpaceSpec, w: &Window) -> Brute {
    let mut cells: BTreeMap<(u32, CellKey), Vec<Point>> = BTreeMap::new();
    let mut uncovered = 0;
    for p in enumerate_window(spec, w).unwrap() {
        match classify_point(s, &p).unwrap() {
            Some(k) => cells.entry(k).or_default().push(p),
            None => uncovered += 1,
        }
    }
    let colors = s.colors() as usize;
    let mut max_diameter = vec![0; colors];
    let mut min_separation: Vec<Option<i64>> = vec![None; colors];
    let cells: Vec<_> = cells.into_iter().collect();
    for (i, ((c, _), pts)) in cells.iter().enumerate() {
        let c = *c as usize;
        for a in pts {
            for b in pts {
                max_diameter[c] = max_diameter[c].max(spec.distance(a, b).unwrap());
            }
        }
        for ((c2, _), other) in &cells[i + 1..] {
            if *c2 as usize != c {
                continue;
            }
            for a in pts {
                for b in other {
                    let d = spec.distance(a, b).unwrap();
                    min_separation[c] = Some(min_separation[c].map_or(d, |m| m.min(d)));
                }
            }
        }
    }
    Brute {
        uncovered,
        max_diameter,
        min_separation,
    }
}

fn assert_matches_brute_force(s: &CoverScheme, spec: &SpaceSpec, w: &Window) {
    let report = verify_cover(s, spec, w).unwrap();
    let brute = brute_force(s, spec, w);
    assert_eq!(report.uncovered_total as usize, brute.uncovered);
    for rec in &report.colors {
        let c = rec.color as usize;
        assert_eq!(rec.max_diameter, brute.max_diameter[c], "color {c} diameter");
        if rec.separation_exact {
            assert_eq!(rec.min_separation, brute.min_separation[c], "color {c} separation");
        } else if let (Some(lb), Some(m)) = (rec.min_separation, brute.min_separation[c]) {
            assert!(lb <= m);
        }
        let sep_ok = brute.min_separation[c].map_or(true, |m| m >= s.separation(rec.color));
        assert_eq!(rec.separation_pass, sep_ok, "color {c}");
        assert_eq!(rec.bound_pass, brute.max_diameter[c] <= s.bound(rec.color));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tower_metric_axioms(a in tower_point(6), b in tower_point(6), c in tower_point(6)) {
        let d = |x: &TowerPoint, y: &TowerPoint| tower_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &b), tower_oracle(&a, &b));
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert_eq!(d(&a, &b) == 0, a == b);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn shift_metric_axioms(x in shift_point(), y in shift_point(), z in shift_point()) {
        prop_assert_eq!(shift_distance(&x, &y), shift_oracle(&x, &y));
        prop_assert_eq!(shift_distance(&x, &y), shift_distance(&y, &x));
        prop_assert_eq!(shift_distance(&x, &y) == 0, x == y);
        prop_assert!(shift_distance(&x, &z) <= shift_distance(&x, &y) + shift_distance(&y, &z));
    }

    #[test]
    fn level_penalty_is_additive(a in 1u32..40, b in 1u32..40, c in 1u32..40) {
        let mut v = [a, b, c];
        v.sort();
        prop_assert_eq!(level_penalty(v[0], v[2]), level_penalty(v[0], v[1]) + level_penalty(v[1], v[2]));
    }

    #[test]
    fn phi_is_an_isometry(a in tower_point(5), b in tower_point(5)) {
        let phi = MapSpec::phi(5);
        let (pa, pb) = (evaluate_map(&phi, &a.clone().into()).unwrap(), evaluate_map(&phi, &b.clone().into()).unwrap());
        prop_assert_eq!(linf(lattice(&pa), lattice(&pb)), tower_distance(&a, &b).unwrap());
    }

    #[test]
    fn theta_is_an_isometry_on_a_level(
        level in 1usize..5,
        raw in prop::collection::vec(-30i64..=30, 16),
    ) {
        let t = |off: usize| TowerPoint::new(raw[off..off + level].to_vec()).unwrap();
        let (p, q) = (Point::Pair(t(0), t(4)), Point::Pair(t(8), t(12)));
        let spec = SpaceSpec::ProductOfTowers { step: Step::Unit };
        let theta = MapSpec::theta();
        let (tp, tq) = (evaluate_map(&theta, &p).unwrap(), evaluate_map(&theta, &q).unwrap());
        prop_assert_eq!(linf(lattice(&tp), lattice(&tq)), spec.distance(&p, &q).unwrap());
    }

    #[test]
    fn level_projection_is_one_lipschitz(x in shift_point(), y in shift_point()) {
        let f = MapSpec::level_projection();
        let (fx, fy) = (evaluate_map(&f, &x.clone().into()).unwrap(), evaluate_map(&f, &y.clone().into()).unwrap());
        prop_assert!(linf(lattice(&fx), lattice(&fy)) <= shift_distance(&x, &y));
    }

    #[test]
    fn grid_cells_respect_claims(
        dim in 1usize..4,
        r in 1i64..6,
        pts in prop::collection::vec(prop::collection::vec(-40i64..=40, 3), 2..8),
    ) {
        let s = grid_cover(dim, r).unwrap();
        let classes: Vec<_> = pts.iter().map(|p| {
            let p = Point::Lattice(p[..dim].to_vec());
            let k = classify_point(&s, &p).unwrap().unwrap();
            (p, k)
        }).collect();
        for (p, (c, kp)) in &classes {
            for (q, (c2, kq)) in &classes {
                let d = linf(lattice(p), lattice(q));
                if c == c2 && kp == kq {
                    prop_assert!(d <= s.bound(*c));
                } else if c == c2 {
                    prop_assert!(d >= s.separation(*c));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verifier_matches_brute_force_on_grids(dim in 1usize..3, r in 1i64..5, half in 1i64..7) {
        let w = Window::cube(Interval::symmetric(half));
        assert_matches_brute_force(&grid_cover(dim, r).unwrap(), &SpaceSpec::lattice(dim), &w);
    }

    #[test]
    fn verifier_matches_brute_force_on_mixed_grids(k in 1i64..4, extra in 1i64..4, half in 2i64..9) {
        let s = mixed_grid_cover(1, 1, k, k + extra).unwrap();
        let w = Window::cube(Interval::symmetric(half * k));
        assert_matches_brute_force(&s, s.space(), &w);
    }

    #[test]
    fn inflated_claims_fail(r in 2i64..5, half in 4i64..9) {
        let g = grid_cover(1, r).unwrap();
        let inner = g.clone();
        let liar = CoverScheme::new("liar", g.space().clone(), vec![r + 2; 2], vec![r - 2; 2], "Z", move |p| {
            inner.classify_unchecked(p)
        });
        let rep = verify_cover(&liar, &SpaceSpec::lattice(1), &Window::cube(Interval::symmetric(half * r))).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::Fail);
        prop_assert!(rep.colors.iter().all(|c| !c.separation_pass && !c.bound_pass));
    }

    #[test]
    fn enumeration_is_deterministic_and_in_the_space(
        step in prop::sample::select(vec![Step::Unit, Step::Identity, Step::PowerOfTwo, Step::ByCoordinate]),
        top in 1i64..4,
        half in 0i64..9,
    ) {
        let spec = SpaceSpec::tower(step);
        let w = Window::cube(Interval::symmetric(half)).with_levels(1, top);
        let a = enumerate_window(&spec, &w).unwrap();
        prop_assert_eq!(&a, &enumerate_window(&spec, &w).unwrap());
        prop_assert!(a.windows(2).all(|p| p[0] < p[1]));
        for p in &a {
            spec.check_point(p).unwrap();
        }
        // count per level: multiples of each coordinate's modulus in the box
        let expected: u64 = (1..=top as u32).map(|l| {
            (0..l as usize).map(|j| Interval::symmetric(half).multiple_count(step.modulus(l, j).unwrap())).product::<u64>()
        }).sum();
        prop_assert_eq!(a.len() as u64, expected);
    }
}

#[test]
fn verifier_matches_brute_force_on_shift_union() {
    let s = shift_union_cover(1, 2).unwrap();
    let w = Window::cube(Interval::symmetric(2))
        .with_levels(0, 3)
        .with_max_support(5);
    assert_matches_brute_force(&s, &SpaceSpec::ShiftUnion, &w);
}
