use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use coasdim_core::covers::FiniteFamily;
use coasdim_core::ordinal::{inclusive_closure, is_inclusive, ord_rank};
use coasdim_core::spaces::{enumerate_window, Control, Interval, Point, SpaceSpec};
use coasdim_core::suite::{
    check_saturation, run_criterion, saturation_instances, CriterionResult, SaturationInstance,
    SuiteOptions,
};
use coasdim_core::verify::{
    check_coarse_control, check_coarse_control_points, find_fiber_witnesses, oracle_1d_nocover,
    verify_cover_with, witness_map, with_workers, Compose, OracleOutcome, VerificationReport,
    VerifyOptions, WitnessFamily,
};
use coasdim_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Kind};
use crate::registry::build_scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Feasible,
    Infeasible,
    WitnessMissing,
    Inconclusive,
    ConfigError,
    Error,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass | Status::Feasible => 0,
            Status::Fail | Status::Infeasible | Status::WitnessMissing => 1,
            Status::Inconclusive | Status::ConfigError | Status::Error => 2,
        }
    }
}

/// The report file: status, resolved config, kind-specific body, version.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub status: Status,
    pub config: Value,
    pub report: Value,
    pub version: String,
}

impl ReportFile {
    pub fn new(status: Status, config: Value, report: Value) -> Self {
        ReportFile {
            status,
            config,
            report,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

/// A finished experiment, before it is written anywhere.
pub struct Outcome {
    pub status: Status,
    pub report: Value,
    /// Per-row table for CSV export, when the kind has one.
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Errors caused by the config rather than the computation.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Config error or runtime error, for the status field.
pub fn classify_error(e: &anyhow::Error) -> Status {
    if e.downcast_ref::<ConfigError>().is_some() || e.downcast_ref::<serde_json::Error>().is_some() {
        return Status::ConfigError;
    }
    match e.downcast_ref::<CoreError>() {
        Some(
            CoreError::InvalidParameter(_)
            | CoreError::MalformedWindow(_)
            | CoreError::InfiniteWindow(_)
            | CoreError::WrongSpace { .. }
            | CoreError::FactorMismatch(..),
        ) => Status::ConfigError,
        _ => Status::Error,
    }
}

fn need<'a, T>(v: &'a Option<T>, field: &str, kind: Kind) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| config_err(format!("`{}` needs the `{field}` field", kind.name())))
}

/// Fills defaults that depend on the kind, so reports show what ran.
pub fn resolve(mut c: ExperimentConfig) -> Result<ExperimentConfig> {
    let kind = c.kind.ok_or_else(|| config_err("the config has no `kind`"))?;
    match kind {
        Kind::VerifyCover => {
            let con = need(&c.construction, "construction", kind)?;
            let s = build_scheme(con, c.space.as_ref()).map_err(|e| config_err(format!("{e:#}")))?;
            c.space.get_or_insert_with(|| s.space().clone());
            need(&c.window, "window", kind)?;
        }
        Kind::FiberWitness => {
            let fams = need(&c.families, "families", kind)?;
            need(&c.fibers, "fibers", kind)?;
            need(&c.fiber_box, "fiber-box", kind)?;
            c.compose.get_or_insert(Compose::Extra);
            c.lower.get_or_insert(Control::Identity);
            c.upper.get_or_insert(Control::Identity);
            if c.codomain.is_none() {
                let first = fams.first().ok_or_else(|| config_err("`families` is empty"))?;
                let s = build_scheme(&first.construction, None).map_err(|e| config_err(format!("{e:#}")))?;
                c.codomain = Some(s.space().clone());
            }
        }
        Kind::CoarseControl => {
            need(&c.map, "map", kind)?;
            need(&c.domain, "domain", kind)?;
            need(&c.codomain, "codomain", kind)?;
            need(&c.window, "window", kind)?;
        }
        Kind::Oracle1d => {
            need(&c.oracle, "oracle", kind)?;
            need(&c.window, "window", kind)?;
        }
        Kind::OrdRank => {
            need(&c.input, "input", kind)?;
        }
        Kind::SaturatedUnion => {
            let p = need(&c.saturation, "saturation", kind)?;
            if p.instances.is_some() {
                c.seed.get_or_insert(0);
                c.space.get_or_insert(SpaceSpec::lattice(2));
            } else {
                need(&c.space, "space", kind)?;
            }
        }
    }
    Ok(c)
}

/// Runs a resolved config.
pub fn run_experiment(c: &ExperimentConfig) -> Result<Outcome> {
    let kind = c.kind.ok_or_else(|| config_err("the config has no `kind`"))?;
    let workers = c.limits.worker_count;
    with_workers(workers, || match kind {
        Kind::VerifyCover => verify(c),
        Kind::FiberWitness => witness(c),
        Kind::CoarseControl => control(c),
        Kind::Oracle1d => oracle(c),
        Kind::OrdRank => ord(c),
        Kind::SaturatedUnion => satunion(c),
    })?
}

pub fn verify_status(r: &VerificationReport) -> Status {
    if r.passed() {
        return Status::Pass;
    }
    // a separation that is only bounded below cannot fail by itself
    let others_fine = r.uncovered_total == 0
        && r.errors_total == 0
        && r.colors.iter().all(|c| c.bound_pass);
    let undecided = r
        .colors
        .iter()
        .all(|c| c.separation_pass || !c.separation_exact);
    if others_fine && undecided {
        Status::Inconclusive
    } else {
        Status::Fail
    }
}

fn color_table(r: &VerificationReport) -> Table {
    Table {
        header: vec![
            "color",
            "declared_separation",
            "min_separation",
            "separation_exact",
            "separation_pass",
            "declared_bound",
            "max_diameter",
            "bound_pass",
            "points",
            "cells_seen",
        ],
        rows: r
            .colors
            .iter()
            .map(|c| {
                vec![
                    c.color.to_string(),
                    c.declared_separation.to_string(),
                    c.min_separation.map_or(String::new(), |v| v.to_string()),
                    c.separation_exact.to_string(),
                    c.separation_pass.to_string(),
                    c.declared_bound.to_string(),
                    c.max_diameter.to_string(),
                    c.bound_pass.to_string(),
                    c.points.to_string(),
                    c.cells_seen.to_string(),
                ]
            })
            .collect(),
    }
}

fn verify(c: &ExperimentConfig) -> Result<Outcome> {
    let kind = Kind::VerifyCover;
    let s = build_scheme(need(&c.construction, "construction", kind)?, c.space.as_ref())
        .map_err(|e| config_err(format!("{e:#}")))?;
    let space = c.space.clone().unwrap_or_else(|| s.space().clone());
    let windows = need(&c.window, "window", kind)?.to_vec();
    let opts = VerifyOptions {
        strategy: c.limits.strategy,
        workers: None,
        max_listed: c.limits.max_uncovered_listed,
        ..VerifyOptions::default()
    };
    let r = verify_cover_with(&s, &space, &windows, &opts)?;
    Ok(Outcome {
        status: verify_status(&r),
        table: Some(color_table(&r)),
        report: json!({
            "colors_declared": s.colors(),
            "domain": s.domain_note(),
            "verification": r,
        }),
    })
}

fn witness(c: &ExperimentConfig) -> Result<Outcome> {
    let kind = Kind::FiberWitness;
    let families = need(&c.families, "families", kind)?
        .iter()
        .map(|f| {
            let s = build_scheme(&f.construction, None).map_err(|e| config_err(format!("{e:#}")))?;
            if f.color >= s.colors() {
                return Err(config_err(format!("{} has no color {}", s.name(), f.color)));
            }
            Ok(WitnessFamily::new(s, f.color))
        })
        .collect::<Result<Vec<_>>>()?;
    let fibers_region = need(&c.fibers, "fibers", kind)?;
    let fiber_box = need(&c.fiber_box, "fiber-box", kind)?;
    let fibers = enumerate_window(&fibers_region.space, &fibers_region.window)?;
    let compose = c.compose.unwrap_or(Compose::Extra);
    let res = find_fiber_witnesses(&families, &fibers, &fiber_box.space, &fiber_box.window, compose)?;
    let mut report = json!({
        "fibers": fibers.len(),
        "witnessed": res.witnessed,
        "all_fibers_witnessed": res.all_fibers_witnessed,
        "witnesses": res,
    });
    if !res.all_fibers_witnessed {
        return Ok(Outcome {
            status: Status::WitnessMissing,
            report,
            table: None,
        });
    }
    let delta = witness_map(
        &res,
        c.lower.unwrap_or(Control::Identity),
        c.upper.unwrap_or(Control::Identity),
    )?;
    let codomain = need(&c.codomain, "codomain", kind)?;
    let ctl = check_coarse_control_points(
        &delta,
        &fibers_region.space,
        codomain,
        &fibers,
        c.limits.max_uncovered_listed,
    )?;
    let status = if ctl.passed { Status::Pass } else { Status::Fail };
    report["delta_control"] = serde_json::to_value(ctl)?;
    Ok(Outcome {
        status,
        report,
        table: None,
    })
}

fn control(c: &ExperimentConfig) -> Result<Outcome> {
    let kind = Kind::CoarseControl;
    let windows = need(&c.window, "window", kind)?.to_vec();
    let [w] = windows.as_slice() else {
        return Err(config_err("`coarse-control` takes a single window"));
    };
    let r = check_coarse_control(
        need(&c.map, "map", kind)?,
        need(&c.domain, "domain", kind)?,
        need(&c.codomain, "codomain", kind)?,
        w,
    )?;
    Ok(Outcome {
        status: if r.passed { Status::Pass } else { Status::Fail },
        report: serde_json::to_value(r)?,
        table: None,
    })
}

fn oracle_interval(c: &ExperimentConfig) -> Result<Interval> {
    let windows = need(&c.window, "window", Kind::Oracle1d)?.to_vec();
    match windows.as_slice() {
        [w] if w.boxes.len() == 1 && w.levels.is_none() => Ok(w.boxes[0]),
        _ => Err(config_err("`oracle-1d` takes one window with a single box interval")),
    }
}

fn oracle(c: &ExperimentConfig) -> Result<Outcome> {
    let p = need(&c.oracle, "oracle", Kind::Oracle1d)?;
    let window = oracle_interval(c)?;
    let out = oracle_1d_nocover(p.n, p.r, p.k, window, c.limits.node_budget)?;
    let status = match &out {
        OracleOutcome::Feasible { reverified: true, .. } => Status::Feasible,
        OracleOutcome::Feasible { .. } => Status::Error,
        OracleOutcome::Infeasible { .. } => Status::Infeasible,
        OracleOutcome::Inconclusive { .. } => Status::Inconclusive,
    };
    Ok(Outcome {
        status,
        report: serde_json::to_value(out)?,
        table: None,
    })
}

fn ord(c: &ExperimentConfig) -> Result<Outcome> {
    let m = need(&c.input, "input", Kind::OrdRank)?;
    let closure = inclusive_closure(m);
    Ok(Outcome {
        status: Status::Pass,
        report: json!({
            "rank": ord_rank(m),
            "members": m.len(),
            "max_member_size": m.max_member_size(),
            "support": m.support(),
            "inclusive": is_inclusive(m),
            "closure_rank": ord_rank(&closure),
        }),
        table: None,
    })
}

fn family(cells: &[Vec<Point>]) -> FiniteFamily {
    let mut f = FiniteFamily::new();
    for (i, pts) in cells.iter().enumerate() {
        f.insert(vec![i as i64], pts.clone());
    }
    f
}

fn satunion(c: &ExperimentConfig) -> Result<Outcome> {
    let kind = Kind::SaturatedUnion;
    let p = need(&c.saturation, "saturation", kind)?;
    let space = c.space.clone().unwrap_or_else(|| SpaceSpec::lattice(2));
    if let Some(count) = p.instances {
        if p.u.is_some() || p.v.is_some() {
            return Err(config_err("give either `instances` or explicit `u` and `v`"));
        }
        if space != SpaceSpec::lattice(2) {
            return Err(config_err("random instances live on Z^2"));
        }
        let mut failures = Vec::new();
        let mut invalid = 0u64;
        for (i, inst) in saturation_instances(c.seed.unwrap_or(0), count).enumerate() {
            let chk = check_saturation(&inst, &space)?;
            if !chk.hypotheses_hold {
                invalid += 1;
            }
            if !chk.passed && failures.len() < c.limits.max_uncovered_listed {
                failures.push(json!({"instance": i, "check": chk}));
            }
        }
        let status = if failures.is_empty() && invalid == 0 {
            Status::Pass
        } else {
            Status::Fail
        };
        return Ok(Outcome {
            status,
            report: json!({"instances": count, "invalid_instances": invalid, "failures": failures}),
            table: None,
        });
    }
    let (u, v) = (
        p.u.as_ref().ok_or_else(|| config_err("`saturation` needs `u`"))?,
        p.v.as_ref().ok_or_else(|| config_err("`saturation` needs `v`"))?,
    );
    let get = |x: Option<i64>, name: &str| x.ok_or_else(|| config_err(format!("`saturation` needs `{name}`")));
    let inst = SaturationInstance {
        u: family(u),
        v: family(v),
        r: get(p.r, "r")?,
        big_r: get(p.big_r, "R")?,
        d: get(p.d, "D")?,
    };
    let chk = check_saturation(&inst, &space)?;
    let status = if !chk.hypotheses_hold {
        Status::ConfigError
    } else if chk.passed {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(Outcome {
        status,
        report: serde_json::to_value(chk)?,
        table: None,
    })
}

/// Runs the acceptance battery, or the criteria in `only`.
pub fn run_suite(only: &[u32], seed: Option<u64>, workers: Option<usize>) -> Result<(Vec<CriterionResult>, Status)> {
    let mut opts = SuiteOptions::default();
    if let Some(s) = seed {
        opts.seed = s;
    }
    let ids: Vec<u32> = if only.is_empty() {
        coasdim_core::suite::CRITERIA.to_vec()
    } else {
        only.to_vec()
    };
    let results = with_workers(workers, || {
        ids.iter()
            .map(|&id| run_criterion(id, &opts).ok_or_else(|| anyhow!("no criterion {id}")))
            .collect::<Result<Vec<_>>>()
    })??;
    let status = if results.iter().all(|r| r.passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok((results, status))
}

pub fn suite_table(results: &[CriterionResult]) -> Table {
    let mut rows = Vec::new();
    for r in results {
        for c in &r.cases {
            rows.push(vec![
                r.id.to_string(),
                r.title.clone(),
                c.label.clone(),
                c.passed.to_string(),
                format!("{:.3}", c.seconds),
                r.limit_seconds.to_string(),
                c.detail.clone(),
            ]);
        }
    }
    Table {
        header: vec!["criterion", "title", "case", "passed", "seconds", "limit_seconds", "detail"],
        rows,
    }
}

/// Parses a config file and applies it to `kind`, which the file may omit.
pub fn load_config(path: &Path, kind: Kind) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("reading {}: {e}", path.display())))?;
    let mut c: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| config_err(format!("parsing {}: {e}", path.display())))?;
    match c.kind {
        None => c.kind = Some(kind),
        Some(k) if k != kind => bail!(ConfigError(format!(
            "the config is a `{}` experiment, not `{}`",
            k.name(),
            kind.name()
        ))),
        _ => {}
    }
    Ok(c)
}
