//! Empirical checking of schemes, maps and non-cover claims on finite windows.

mod control;
mod encode;
mod fibered;
mod oracle;
mod separation;
mod witness;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use control::{check_coarse_control, check_coarse_control_points, ControlReport, ControlViolation};
pub use oracle::{assignment_scheme, oracle_1d_nocover, Assignment, OracleOutcome};
pub use witness::{find_fiber_witnesses, witness_map, Compose, FiberRecord, WitnessFamily, WitnessResult};

use crate::covers::{classify_point, CellKey, CoverScheme, FiniteFamily};
use crate::error::{Error, Result};
use crate::spaces::{enumerate_windows, Point, SpaceSpec, Window};
use encode::Encoded;

/// Measured behavior of one color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorRecord {
    pub color: u32,
    pub declared_separation: i64,
    pub declared_bound: i64,
    pub points: u64,
    pub cells_seen: u64,
    pub max_diameter: i64,
    /// `None` when fewer than two cells of this color meet the window.
    pub min_separation: Option<i64>,
    /// False when `min_separation` is only a lower bound.
    pub separation_exact: bool,
    pub separation_pass: bool,
    pub bound_pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    PassWithEmptyColor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scheme: String,
    pub window: Vec<Window>,
    pub method: String,
    pub points: u64,
    pub colors: Vec<ColorRecord>,
    pub uncovered_total: u64,
    pub uncovered: Vec<Point>,
    pub errors_total: u64,
    pub errors: Vec<String>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn color(&self, c: u32) -> &ColorRecord {
        &self.colors[c as usize]
    }

    fn finish(&mut self) {
        let ok = self.uncovered_total == 0
            && self.errors_total == 0
            && self
                .colors
                .iter()
                .all(|c| c.separation_pass && c.bound_pass);
        self.verdict = if !ok {
            Verdict::Fail
        } else if self.colors.iter().any(|c| c.cells_seen == 0) {
            Verdict::PassWithEmptyColor
        } else {
            Verdict::Pass
        };
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Fibered when the scheme has a layout and the window is large.
    #[default]
    Auto,
    Materialize,
    Fibered,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub strategy: Strategy,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub max_listed: usize,
    /// Cap on candidate pairs per separation scan.
    pub pair_budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            strategy: Strategy::Auto,
            workers: None,
            max_listed: 20,
            pair_budget: 20_000_000_000,
        }
    }
}

/// Runs `f` on a pool of `workers` threads, or the global pool for `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    in_pool(workers, f)
}

/// Above this many points `Auto` prefers the fibered path.
const FIBERED_THRESHOLD: u64 = 2_000_000;

pub(crate) fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn check_space(s: &CoverScheme, spec: &SpaceSpec) -> Result<()> {
    if s.space() != spec {
        return Err(Error::WrongSpace {
            expected: format!("{:?}", s.space()),
            got: format!("{spec:?}"),
        });
    }
    Ok(())
}

/// Verifies `s` on the window `w` with default options.
pub fn verify_cover(s: &CoverScheme, spec: &SpaceSpec, w: &Window) -> Result<VerificationReport> {
    verify_cover_with(s, spec, std::slice::from_ref(w), &VerifyOptions::default())
}

/// Verifies `s` on the union of `windows`.
pub fn verify_cover_with(
    s: &CoverScheme,
    spec: &SpaceSpec,
    windows: &[Window],
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_space(s, spec)?;
    in_pool(opts.workers, || {
        let fibered_ok = s.layout().is_some() && windows.len() == 1;
        let use_fibered = match opts.strategy {
            Strategy::Materialize => false,
            Strategy::Fibered => true,
            Strategy::Auto => {
                fibered_ok
                    && fibered::window_size(spec, &windows[0])
                        .is_some_and(|n| n > FIBERED_THRESHOLD)
            }
        };
        if use_fibered {
            match fibered::verify_fibered(s, spec, &windows[0], opts) {
                Err(e) if opts.strategy == Strategy::Auto && matches!(e, Error::InvalidParameter(_)) => {}
                other => return other,
            }
        }
        let points = enumerate_windows(spec, windows)?;
        let mut report = verify_points(s, spec, &points, opts)?;
        report.window = windows.to_vec();
        Ok(report)
    })?
}

/// Verifies `s` on an explicit point set (duplicates are ignored).
pub fn verify_points(
    s: &CoverScheme,
    spec: &SpaceSpec,
    points: &[Point],
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_space(s, spec)?;
    let mut sorted;
    let points = if points.windows(2).all(|w| w[0] < w[1]) {
        points
    } else {
        sorted = points.to_vec();
        sorted.sort();
        sorted.dedup();
        &sorted[..]
    };
    let classes: Vec<Result<Option<(u32, CellKey)>>> =
        points.par_iter().map(|p| classify_point(s, p)).collect();

    let colors = s.colors() as usize;
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); colors];
    let mut cell_of: Vec<Vec<u32>> = vec![Vec::new(); colors];
    let mut interned: Vec<HashMap<CellKey, u32>> = vec![HashMap::new(); colors];
    let mut keep: Vec<u32> = Vec::new();
    let mut uncovered = Vec::new();
    let mut uncovered_total = 0u64;
    let mut errors = Vec::new();
    let mut errors_total = 0u64;
    for (i, c) in classes.into_iter().enumerate() {
        match c {
            Ok(Some((color, key))) => {
                let table = &mut interned[color as usize];
                let next = table.len() as u32;
                let id = *table.entry(key).or_insert(next);
                members[color as usize].push(keep.len() as u32);
                cell_of[color as usize].push(id);
                keep.push(i as u32);
            }
            Ok(None) => {
                uncovered_total += 1;
                if uncovered.len() < opts.max_listed {
                    uncovered.push(points[i].clone());
                }
            }
            Err(e) => {
                errors_total += 1;
                if errors.len() < opts.max_listed {
                    errors.push(format!("{}: {e}", points[i]));
                }
            }
        }
    }
    let covered: Vec<Point> = keep.iter().map(|&i| points[i as usize].clone()).collect();
    let enc = Encoded::new(spec, &covered)?;

    let mut records = Vec::with_capacity(colors);
    for c in 0..colors {
        let sep = s.separation(c as u32);
        let bound = s.bound(c as u32);
        let (mem, cells) = (&members[c], &cell_of[c]);
        let ncells = interned[c].len();
        let mut by_cell: Vec<Vec<u32>> = vec![Vec::new(); ncells];
        for (&m, &id) in mem.iter().zip(cells) {
            by_cell[id as usize].push(m);
        }
        let max_diameter = by_cell
            .par_iter()
            .map(|m| enc.diameter(m))
            .max()
            .unwrap_or(0);
        let found = separation::min_cross_distance(&enc, mem, cells, sep + 1, opts.pair_budget);
        records.push(ColorRecord {
            color: c as u32,
            declared_separation: sep,
            declared_bound: bound,
            points: mem.len() as u64,
            cells_seen: ncells as u64,
            max_diameter,
            min_separation: found.map(|f| f.value),
            separation_exact: found.map_or(true, |f| f.exact),
            separation_pass: found.map_or(true, |f| f.value >= sep),
            bound_pass: max_diameter <= bound,
        });
    }
    let mut report = VerificationReport {
        scheme: s.name().to_string(),
        window: Vec::new(),
        method: "materialized".into(),
        points: points.len() as u64,
        colors: records,
        uncovered_total,
        uncovered,
        errors_total,
        errors,
        verdict: Verdict::Pass,
    };
    report.finish();
    Ok(report)
}

/// Exact measurements of an explicit family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMeasure {
    pub cells: u64,
    pub points: u64,
    pub max_diameter: i64,
    pub min_separation: Option<i64>,
}

/// Max cell diameter and min distance between distinct cells of `f`.
pub fn measure_family(f: &FiniteFamily, spec: &SpaceSpec) -> Result<FamilyMeasure> {
    let mut points = Vec::new();
    let mut cells = Vec::new();
    for (id, pts) in f.cells.values().enumerate() {
        for p in pts {
            spec.check_point(p)?;
            points.push(p.clone());
            cells.push(id as u32);
        }
    }
    let enc = Encoded::new(spec, &points)?;
    let mut by_cell: Vec<Vec<u32>> = vec![Vec::new(); f.len()];
    for (i, &c) in cells.iter().enumerate() {
        by_cell[c as usize].push(i as u32);
    }
    let max_diameter = by_cell.iter().map(|m| enc.diameter(m)).max().unwrap_or(0);
    let members: Vec<u32> = (0..points.len() as u32).collect();
    let sep = separation::min_cross_distance(&enc, &members, &cells, 1, u64::MAX);
    Ok(FamilyMeasure {
        cells: f.len() as u64,
        points: points.len() as u64,
        max_diameter,
        min_separation: sep.map(|s| s.value),
    })
}

/// Groups the window points by `(color, cell)`; one family per color.
/// Uncovered points are dropped; classification errors are returned.
pub fn materialize(s: &CoverScheme, spec: &SpaceSpec, w: &Window) -> Result<Vec<FiniteFamily>> {
    check_space(s, spec)?;
    let points = enumerate_windows(spec, std::slice::from_ref(w))?;
    let mut out = vec![FiniteFamily::new(); s.colors() as usize];
    for p in points {
        if let Some((c, key)) = classify_point(s, &p)? {
            out[c as usize].insert(key, vec![p]);
        }
    }
    Ok(out)
}
