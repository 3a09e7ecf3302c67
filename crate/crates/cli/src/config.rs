use std::collections::BTreeMap;
use std::path::PathBuf;

use coasdim_core::ordinal::FinFamily;
use coasdim_core::spaces::{Control, MapSpec, Point, SpaceSpec, Window};
use coasdim_core::verify::{Compose, Strategy};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    VerifyCover,
    FiberWitness,
    CoarseControl,
    #[serde(rename = "oracle-1d")]
    Oracle1d,
    OrdRank,
    SaturatedUnion,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::VerifyCover => "verify-cover",
            Kind::FiberWitness => "fiber-witness",
            Kind::CoarseControl => "coarse-control",
            Kind::Oracle1d => "oracle-1d",
            Kind::OrdRank => "ord-rank",
            Kind::SaturatedUnion => "saturated-union",
        }
    }
}

/// A named construction and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Construction {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

/// One window or a union of windows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Windows {
    One(Window),
    Many(Vec<Window>),
}

impl Windows {
    pub fn to_vec(&self) -> Vec<Window> {
        match self {
            Windows::One(w) => vec![w.clone()],
            Windows::Many(v) => v.clone(),
        }
    }
}

/// A space and a window over it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub space: SpaceSpec,
    pub window: Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRef {
    pub construction: Construction,
    pub color: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleParams {
    pub n: i64,
    #[serde(rename = "R")]
    pub r: i64,
    pub k: u32,
}

/// Either `instances` random instances, or one explicit instance.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Vec<Point>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<Point>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<i64>,
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub big_r: Option<i64>,
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Limits {
    #[serde(default = "default_budget")]
    pub node_budget: u64,
    #[serde(default = "default_listed")]
    pub max_uncovered_listed: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worker_count: Option<usize>,
    #[serde(default)]
    pub strategy: Strategy,
}

fn default_budget() -> u64 {
    10_000_000
}

fn default_listed() -> usize {
    20
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            node_budget: default_budget(),
            max_uncovered_listed: default_listed(),
            worker_count: None,
            strategy: Strategy::Auto,
        }
    }
}

/// One experiment. Only the fields its kind reads may be set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Windows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    // coarse-control
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<SpaceSpec>,

    // fiber-witness
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<FamilyRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers: Option<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_box: Option<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compose: Option<Compose>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Control>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Control>,

    // oracle-1d
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleParams>,

    // ord-rank
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<FinFamily>,

    // saturated-union
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation: Option<SaturationParams>,
}
