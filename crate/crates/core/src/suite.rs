//! The acceptance battery: one function per criterion, each returning a
//! pass/fail record with timings against a fixed limit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::covers::{
    mixed_grid_cover, product_square_cover, saturated_union, shift_union_cover, staircase_cover,
    CoverScheme, FiniteFamily, ShiftUnionCover, Staircase, STAIRCASE_I, STAIRCASE_J,
};
use crate::error::Result;
use crate::ordinal::{derived_family, ord_rank, random_family, FinFamily, FinSet};
use crate::spaces::{
    enumerate_window, Control, Interval, MapSpec, Point, SpaceSpec, Step, Window,
};
use crate::verify::{
    check_coarse_control, check_coarse_control_points, find_fiber_witnesses, measure_family,
    oracle_1d_nocover, verify_cover, verify_cover_with, witness_map, Compose, OracleOutcome,
    VerificationReport, VerifyOptions, WitnessFamily,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub label: String,
    pub passed: bool,
    pub seconds: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    /// Per-case limit in seconds.
    pub limit_seconds: f64,
    pub passed: bool,
    pub cases: Vec<CaseResult>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let slowest = self.cases.iter().map(|c| c.seconds).fold(0.0, f64::max);
        write!(
            f,
            "criterion {} [{}]: {} ({} case(s), slowest {:.2} s, limit {} s)",
            self.id,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.cases.len(),
            slowest,
            self.limit_seconds
        )
    }
}

pub const CRITERIA: [u32; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub verify: VerifyOptions,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0x5eed,
            verify: VerifyOptions::default(),
        }
    }
}

/// Runs one case, turning errors into failures and enforcing the limit.
fn case(label: impl Into<String>, limit: f64, f: impl FnOnce() -> Result<(bool, String)>) -> CaseResult {
    let start = Instant::now();
    let out = f();
    let seconds = start.elapsed().as_secs_f64();
    let (ok, mut detail) = match out {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if seconds > limit {
        detail.push_str(&format!("; over the {limit} s limit"));
    }
    CaseResult {
        label: label.into(),
        passed: ok && seconds <= limit,
        seconds,
        detail,
    }
}

fn finish(id: u32, title: &str, limit: f64, cases: Vec<CaseResult>) -> CriterionResult {
    CriterionResult {
        id,
        title: title.into(),
        limit_seconds: limit,
        passed: !cases.is_empty() && cases.iter().all(|c| c.passed),
        cases,
    }
}

pub fn run_criterion(id: u32, opts: &SuiteOptions) -> Option<CriterionResult> {
    Some(match id {
        1 => staircase(opts),
        2 => mixed_grid(opts),
        3 => shift_union(opts),
        4 => product_square(opts),
        5 => witnesses(),
        6 => oracle(),
        7 => saturation(opts.seed),
        8 => ordinal(opts.seed),
        9 => isometries(),
        _ => return None,
    })
}

fn summary(r: &VerificationReport) -> String {
    let seps: Vec<String> = r
        .colors
        .iter()
        .map(|c| {
            format!(
                "{}:{}{}/{}",
                c.color,
                c.min_separation.map_or("-".into(), |v| v.to_string()),
                if c.separation_exact { "" } else { "+" },
                c.declared_separation
            )
        })
        .take(8)
        .collect();
    format!(
        "{} points via {}, uncovered {}, separations [{}{}], verdict {:?}",
        r.points,
        r.method,
        r.uncovered_total,
        seps.join(" "),
        if r.colors.len() > 8 { " …" } else { "" },
        r.verdict
    )
}

/// The `(2^n Z)^r × Z` slice at height 0: coordinate box `[−4·2^r, 4·2^r]`,
/// moving axis over three staircase periods.
pub fn staircase_window(n: i64, r: i64) -> Result<(CoverScheme, Window)> {
    let height = Interval::new(0, 0);
    let st = Staircase::new(n, r, r as usize, height)?;
    let s = staircase_cover(n, r, r as usize, height)?;
    let side = 4 << r;
    let mut boxes = vec![Interval::symmetric(side); r as usize];
    boxes.push(Interval::new(0, 3 * st.period));
    boxes.push(height);
    Ok((s, Window::lattice(boxes)))
}

fn staircase(opts: &SuiteOptions) -> CriterionResult {
    let limit = 60.0;
    let cases = [(1, 2), (2, 3), (3, 5)]
        .into_iter()
        .map(|(n, r)| {
            case(format!("n={n}, r={r}"), limit, || {
                let (s, w) = staircase_window(n, r)?;
                let rep = verify_cover_with(&s, s.space(), &[w], &opts.verify)?;
                let j = rep.color(STAIRCASE_J);
                let i = rep.color(STAIRCASE_I);
                let ok = j.min_separation.is_some_and(|v| v >= n)
                    && i.min_separation.is_some_and(|v| v >= r)
                    && rep.uncovered_total == 0
                    && rep.errors_total == 0
                    && rep.colors.iter().all(|c| c.bound_pass)
                    && rep.passed();
                Ok((ok, summary(&rep)))
            })
        })
        .collect();
    finish(1, "staircase cover", limit, cases)
}

/// `Z^m × (kZ)^n` box of side three C/D periods.
pub fn mixed_grid_window(m: usize, n: usize, k: i64, r: i64) -> Result<(CoverScheme, Window)> {
    let s = mixed_grid_cover(m, n, k, r)?;
    let period = (1i64 << n) * n as i64 * (r + k);
    let half = (3 * period + 1) / 2;
    Ok((s, Window::cube(Interval::symmetric(half))))
}

fn mixed_grid(opts: &SuiteOptions) -> CriterionResult {
    let limit = 120.0;
    let cases = [(1, 1, 3, 5), (2, 1, 4, 6), (1, 2, 3, 7)]
        .into_iter()
        .map(|(m, n, k, r)| {
            case(format!("m={m}, n={n}, k={k}, R={r}"), limit, || {
                let (s, w) = mixed_grid_window(m, n, k, r)?;
                let rep = verify_cover_with(&s, s.space(), &[w], &opts.verify)?;
                let expected = (m as u32) * (1 << m) + 1;
                let ok = s.colors() == expected
                    && rep.colors.len() as u32 == expected
                    && rep.color(0).min_separation.map_or(true, |v| v >= k)
                    && rep.colors[1..]
                        .iter()
                        .all(|c| c.min_separation.map_or(true, |v| v >= r))
                    && rep.uncovered_total == 0
                    && rep.passed();
                Ok((ok, format!("{} colors; {}", s.colors(), summary(&rep))))
            })
        })
        .collect();
    finish(2, "mixed grid cover", limit, cases)
}

/// Windows over the shift union spanning level blocks 0 and 1.
///
/// Each window opens two head indices to a box of two periods and keeps the
/// remaining indices small; together they pair every two heads of a block.
pub fn shift_union_windows(k: i64, m: i64) -> Result<(CoverScheme, Vec<Window>)> {
    let c = ShiftUnionCover::new(k, m)?;
    let s = shift_union_cover(k, m)?;
    let levels = (0, 4 * k - 1);
    let max_support = 5 * k + m;
    let big = Interval::symmetric(c.period);
    let small = Interval::symmetric(3);
    let w_box = Interval::symmetric(2 * m);
    let mut windows = Vec::new();
    for b in 0..2 {
        let heads: Vec<i64> = (2 * b * k..2 * b * k + 3 * k).collect();
        let w_idx: Vec<i64> = (2 * b * k + 3 * k..2 * b * k + 3 * k + m).collect();
        for (x, &h1) in heads.iter().enumerate() {
            for &h2 in &heads[x + 1..] {
                let mut w = Window::cube(small)
                    .with_levels(levels.0, levels.1)
                    .with_max_support(max_support);
                for &i in &w_idx {
                    w = w.with_index_box(i, w_box);
                }
                w = w.with_index_box(h1, big).with_index_box(h2, big);
                windows.push(w);
            }
        }
    }
    Ok((s, windows))
}

fn shift_union(opts: &SuiteOptions) -> CriterionResult {
    let limit = 300.0;
    let cases = [(1, 2), (2, 2)]
        .into_iter()
        .map(|(k, m)| {
            case(format!("k={k}, m={m}"), limit, || {
                let (s, ws) = shift_union_windows(k, m)?;
                let rep = verify_cover_with(&s, s.space(), &ws, &opts.verify)?;
                let seps = s.separations();
                let m_colors = seps.len() - 2;
                let expected_m = (6 * k as usize) << (3 * k);
                let ok = seps[..2] == [k, k]
                    && seps[2..].iter().all(|&v| v == m)
                    && m_colors == expected_m
                    && rep.colors[..2]
                        .iter()
                        .all(|c| c.min_separation.map_or(true, |v| v >= k))
                    && rep.colors[2..]
                        .iter()
                        .all(|c| c.min_separation.map_or(true, |v| v >= m))
                    && rep.uncovered_total == 0
                    && rep.passed();
                Ok((
                    ok,
                    format!(
                        "2 + {m_colors} colors, {} present over {} windows; {}",
                        rep.colors.iter().filter(|c| c.points > 0).count(),
                        ws.len(),
                        summary(&rep)
                    ),
                ))
            })
        })
        .collect();
    finish(3, "shift-union cover", limit, cases)
}

/// Per-factor levels `1..=n+1` and coordinate box `[−16, 16]`.
pub fn product_square_window(n: u32) -> Window {
    Window::cube(Interval::symmetric(16)).with_levels(1, i64::from(n) + 1)
}

fn product_square(opts: &SuiteOptions) -> CriterionResult {
    let limit = 300.0;
    let k = 1u32;
    let mut counts = BTreeMap::new();
    let mut cases: Vec<CaseResult> = [2u32, 4]
        .into_iter()
        .map(|n| {
            case(format!("k={k}, n={n}"), limit, || {
                let s = product_square_cover(k, n)?;
                counts.insert(n, s.colors());
                let rep = verify_cover_with(&s, s.space(), &[product_square_window(n)], &opts.verify)?;
                let ok = rep.color(0).min_separation.map_or(true, |v| v >= i64::from(k))
                    && rep.colors[1..]
                        .iter()
                        .all(|c| c.min_separation.map_or(true, |v| v >= i64::from(n)))
                    && rep.passed();
                let present = rep.colors.iter().filter(|c| c.points > 0).count();
                Ok((ok, format!("{} colors, {present} present; {}", s.colors(), summary(&rep))))
            })
        })
        .collect();
    let same = counts.values().collect::<BTreeSet<_>>().len() == 1;
    cases.push(CaseResult {
        label: "color count independent of n".into(),
        passed: same && counts.len() == 2,
        seconds: 0.0,
        detail: format!("{counts:?}"),
    });
    finish(4, "product-square cover", limit, cases)
}

/// 3-disjoint, 5-bounded intervals on the `Z` factor over level-`level`
/// fibers of `⋃_i (iZ)^i × Z`: runs of 6 integers, gaps of 3, with an offset
/// depending on the fiber.
pub fn shifted_intervals(level: u32) -> CoverScheme {
    let fiber_offset = move |x: &[i64]| -> i64 {
        x.iter()
            .enumerate()
            .map(|(i, v)| v.div_euclid(i64::from(level.max(1))) * (2 * i as i64 + 1))
            .sum::<i64>()
            .rem_euclid(9)
    };
    CoverScheme::new(
        format!("shifted-intervals(level={level})"),
        SpaceSpec::tower_with_factor(Step::Identity, 1),
        vec![3],
        vec![5],
        format!("fibers of level {level}"),
        move |p| {
            let t = p.as_tower()?;
            if t.level != level {
                return Ok(None);
            }
            let u = t.extra[0] - fiber_offset(&t.coords);
            if u.rem_euclid(9) >= 6 {
                return Ok(None);
            }
            let mut key = t.coords.clone();
            key.push(u.div_euclid(9));
            Ok(Some((0, key)))
        },
    )
}

fn witnesses() -> CriterionResult {
    let limit = 30.0;
    let r = 5;
    let level = 10u32;
    let c = case("k=1 intervals, box [-5, 5]", limit, || {
        let family = shifted_intervals(level);
        let fiber_space = SpaceSpec::tower(Step::Identity);
        let fiber_window = Window::cube(Interval::new(0, 10)).with_levels(10, 10);
        let fibers = enumerate_window(&fiber_space, &fiber_window)?;
        // the family itself must be what it claims on the fibers × box
        let check = verify_cover(
            &family,
            family.space(),
            &fiber_window.clone().with_extra_box(Interval::symmetric(r)),
        )?;
        let family_ok = check.color(0).separation_pass && check.color(0).bound_pass;
        let res = find_fiber_witnesses(
            &[WitnessFamily::new(family.clone(), 0)],
            &fibers,
            &SpaceSpec::lattice(1),
            &Window::cube(Interval::symmetric(r)),
            Compose::Extra,
        )?;
        let delta = witness_map(&res, Control::Identity, Control::Plus(2 * r))?;
        let ctl = check_coarse_control_points(
            &delta,
            &fiber_space,
            family.space(),
            &fibers,
            10,
        )?;
        let ok = family_ok && fibers.len() >= 100 && res.all_fibers_witnessed && ctl.passed;
        Ok((
            ok,
            format!(
                "family sep {:?} diam {}; {}/{} fibers witnessed; δ: {} pairs, {} violations, stretch ≤ {:?}",
                check.color(0).min_separation,
                check.color(0).max_diameter,
                res.witnessed,
                fibers.len(),
                ctl.pairs,
                ctl.violations_total,
                ctl.max_observed_stretch
            ),
        ))
    });
    finish(5, "fiber witnesses", limit, vec![c])
}

fn oracle() -> CriterionResult {
    let limit = 10.0;
    let budget = 50_000_000;
    let run = |lo: i64, hi: i64, want_feasible: bool| {
        case(format!("n=3, R=5, k=1, [{lo}, {hi}]"), limit, move || {
            let out = oracle_1d_nocover(3, 5, 1, Interval::new(lo, hi), budget)?;
            let ok = match &out {
                OracleOutcome::Feasible { reverified, .. } => want_feasible && *reverified,
                OracleOutcome::Infeasible { .. } => !want_feasible,
                OracleOutcome::Inconclusive { .. } => false,
            };
            let tag = match out {
                OracleOutcome::Feasible { nodes, .. } => format!("feasible after {nodes} nodes"),
                OracleOutcome::Infeasible { nodes, .. } => format!("infeasible after {nodes} nodes"),
                OracleOutcome::Inconclusive { nodes, .. } => format!("inconclusive at {nodes} nodes"),
            };
            Ok((ok, tag))
        })
    };
    finish(6, "1-D non-cover oracle", limit, vec![run(-5, 5, false), run(-2, 2, true)])
}

/// Random cells inside boxes of side `side` placed on a grid of pitch
/// `pitch` in `[0, extent)^2`; each box keeps a random nonempty subset.
fn random_cells(rng: &mut ChaCha8Rng, side: i64, pitch: i64, extent: i64, keep: f64) -> FiniteFamily {
    let mut f = FiniteFamily::new();
    let offset = (rng.random_range(0..pitch), rng.random_range(0..pitch));
    let mut id = 0;
    let mut gx = offset.0;
    while gx < extent {
        let mut gy = offset.1;
        while gy < extent {
            if rng.random_bool(keep) {
                let (a, b) = (rng.random_range(0..=side), rng.random_range(0..=side));
                let mut pts: Vec<Point> = Vec::new();
                for x in gx..=gx + a {
                    for y in gy..=gy + b {
                        if rng.random_bool(0.7) {
                            pts.push(Point::Lattice(vec![x, y]));
                        }
                    }
                }
                if pts.is_empty() {
                    pts.push(Point::Lattice(vec![gx, gy]));
                }
                f.insert(vec![id], pts);
                id += 1;
            }
            gy += pitch;
        }
        gx += pitch;
    }
    f
}

/// A random instance on `Z^2`: `U` is `r`-disjoint and `R`-bounded, `V` is
/// `5R`-disjoint and `D`-bounded.
#[derive(Debug, Clone)]
pub struct SaturationInstance {
    pub u: FiniteFamily,
    pub v: FiniteFamily,
    pub r: i64,
    pub big_r: i64,
    pub d: i64,
}

pub fn random_saturation_instance(rng: &mut ChaCha8Rng) -> SaturationInstance {
    let big_r = rng.random_range(1..=5);
    let r = rng.random_range(1..=big_r);
    let d = rng.random_range(big_r..=3 * big_r);
    let (pu, pv) = (rng.random_range(0..3), rng.random_range(0..3));
    let u = random_cells(rng, big_r, big_r + r + pu, 60, 0.8);
    let v = random_cells(rng, d, d + 5 * big_r + pv, 60, 0.6);
    SaturationInstance { u, v, r, big_r, d }
}

/// `count` instances drawn from one seeded stream.
pub fn saturation_instances(seed: u64, count: usize) -> impl Iterator<Item = SaturationInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(move |_| random_saturation_instance(&mut rng))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationCheck {
    /// The inputs meet their disjointness and boundedness hypotheses.
    pub hypotheses_hold: bool,
    pub output_cells: u64,
    pub output_separation: Option<i64>,
    pub output_diameter: i64,
    pub diameter_bound: i64,
    pub contains_inputs: bool,
    pub passed: bool,
}

/// Saturates `v ∪_r u` and measures the output against `r`-disjointness and
/// the `D + 2R + 2r` bound.
pub fn check_saturation(inst: &SaturationInstance, spec: &SpaceSpec) -> Result<SaturationCheck> {
    let SaturationInstance { u, v, r, big_r, d } = inst;
    let (mu, mv) = (measure_family(u, spec)?, measure_family(v, spec)?);
    let hypotheses_hold = mu.max_diameter <= *big_r
        && mu.min_separation.map_or(true, |s| s >= *r)
        && mv.max_diameter <= *d
        && mv.min_separation.map_or(true, |s| s >= 5 * big_r)
        && r <= big_r;
    let out = saturated_union(v, u, *r, spec)?;
    let m = measure_family(&out, spec)?;
    let inputs: BTreeSet<&Point> = u.points().chain(v.points()).collect();
    let outputs: BTreeSet<&Point> = out.points().collect();
    let diameter_bound = d + 2 * big_r + 2 * r;
    let contains_inputs = inputs.is_subset(&outputs);
    let passed = m.min_separation.map_or(true, |s| s >= *r)
        && m.max_diameter <= diameter_bound
        && contains_inputs;
    Ok(SaturationCheck {
        hypotheses_hold,
        output_cells: m.cells,
        output_separation: m.min_separation,
        output_diameter: m.max_diameter,
        diameter_bound,
        contains_inputs,
        passed,
    })
}

fn saturation(seed: u64) -> CriterionResult {
    let limit = 60.0;
    let c = case("1000 random instances on Z^2", limit, || {
        let spec = SpaceSpec::lattice(2);
        let mut failures = 0;
        for inst in saturation_instances(seed, 1000) {
            let c = check_saturation(&inst, &spec)?;
            if !c.hypotheses_hold {
                return Ok((false, "generator produced an invalid instance".into()));
            }
            if !c.passed {
                failures += 1;
            }
        }
        Ok((failures == 0, format!("1000 instances, {failures} failures")))
    });
    finish(7, "saturated union", limit, vec![c])
}

fn ordinal(seed: u64) -> CriterionResult {
    let limit = 10.0;
    let c = case("10000 random families", limit, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = Vec::new();
        for i in 0..10_000 {
            let count = rng.random_range(0..=12);
            let m = random_family(&mut rng, 6, 4, count);
            let rank = ord_rank(&m);
            let sub = FinFamily::new(m.members().iter().filter(|_| rng.random_bool(0.5)).cloned())?;
            let descent = m
                .support()
                .into_iter()
                .all(|a| ord_rank(&derived_family(&m, &FinSet::from([a]))) < rank);
            if rank as usize != m.max_member_size() || ord_rank(&sub) > rank || !descent {
                bad.push(i);
            }
        }
        Ok((bad.is_empty(), format!("{} failures {:?}", bad.len(), &bad[..bad.len().min(5)])))
    });
    finish(8, "ordinal rank", limit, vec![c])
}

fn isometries() -> CriterionResult {
    let limit = 60.0;
    let iso = |label: &str, f: MapSpec, dom: SpaceSpec, cod: SpaceSpec, w: Window, lipschitz: bool| {
        case(label, limit, move || {
            let rep = check_coarse_control(&f, &dom, &cod, &w)?;
            let ok = rep.passed
                && rep.pairs >= 10_000
                && (lipschitz || rep.min_observed_stretch == Some(0));
            Ok((
                ok,
                format!(
                    "{} pairs, {} violations, stretch in [{:?}, {:?}]",
                    rep.pairs, rep.violations_total, rep.min_observed_stretch, rep.max_observed_stretch
                ),
            ))
        })
    };
    let tower1 = SpaceSpec::tower_with_factor(Step::PowerOfTwo, 1);
    let cases = vec![
        iso(
            "phi-tower n=3",
            MapSpec::phi(3),
            tower1.clone(),
            SpaceSpec::lattice(5),
            Window::cube(Interval::symmetric(8))
                .with_levels(1, 3)
                .with_extra_box(Interval::symmetric(3)),
            false,
        ),
        iso(
            "psi-staircase n=2, r=4",
            MapSpec::psi(2, 4),
            tower1,
            SpaceSpec::lattice(6),
            Window::cube(Interval::symmetric(32))
                .with_levels(3, 4)
                .with_extra_box(Interval::symmetric(1)),
            false,
        ),
        iso(
            "theta-interleave",
            MapSpec::theta(),
            SpaceSpec::PlainLattice {
                steps: vec![1, 2, 1, 2],
            },
            SpaceSpec::PlainLattice {
                steps: vec![1, 1, 2, 2],
            },
            Window::cube(Interval::symmetric(4)),
            false,
        ),
        iso(
            "f-level-projection",
            MapSpec::level_projection(),
            SpaceSpec::ShiftUnion,
            SpaceSpec::lattice(1),
            Window::cube(Interval::symmetric(3))
                .with_levels(-2, 2)
                .with_max_support(2),
            true,
        ),
    ];
    finish(9, "isometries and level projection", limit, cases)
}
