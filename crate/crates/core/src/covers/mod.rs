//! Cover constructions as classification functions.
//!
//! A scheme sends each point of its space to `(color, cell key)` or to
//! `None`. The cells of one color form one family; each color carries the
//! separation and diameter bound it claims. Nothing is assumed: the
//! `verify` module measures both on windows.

mod grid;
mod mixed;
mod saturate;
mod shift;
mod staircase;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use grid::{fiber_product_cover, grid_cover, grid_cover_on, singleton_cover, two_color};
pub use mixed::{mixed_grid_cover, product_square_cover, MixedGrid, SquareRegion};
pub use saturate::saturated_union;
pub use shift::{shift_union_cover, ShiftUnionCover};
pub use staircase::{
    omega_cover, staircase_cover, Staircase, OMEGA_GRID_BASE, STAIRCASE_I, STAIRCASE_J,
};

use crate::error::{Error, Result};
use crate::spaces::{evaluate_map, Interval, MapSpec, Point, SpaceSpec};

/// Value-compared identifier of a cell within its color.
pub type CellKey = Vec<i64>;

/// Result of classifying one point.
pub type Classification = Option<(u32, CellKey)>;

type ClassifyFn = dyn Fn(&Point) -> Result<Classification> + Send + Sync;

/// A maximal run `[lo, hi]` along the moving axis inside one fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub lo: i64,
    pub hi: i64,
    pub color: u32,
    /// Distinguishes cells within the fiber; cells never leave their fiber.
    pub local: i64,
}

type RunFn = dyn Fn(&[i64], i64, i64, &mut Vec<Run>) -> Result<()> + Send + Sync;

/// Optional run structure of a lattice scheme, used to verify windows far
/// too large to materialize.
///
/// The lattice axes split into base axes, one moving axis and free axes.
/// Classification ignores the free axes, and every cell lies in a single
/// fiber `{base} × Z × free`. `runs(base, lo, hi, out)` lists the runs of
/// the fiber over `[lo, hi]` in increasing order; `base` holds the base-axis
/// values only. The runs hold for free values inside `free_range`; points
/// with a free value outside it are uncovered.
#[derive(Clone)]
pub struct FiberLayout {
    pub moving_axis: usize,
    pub free_axes: Vec<usize>,
    pub free_range: Vec<Interval>,
    runs: Arc<RunFn>,
}

impl FiberLayout {
    pub fn new(
        moving_axis: usize,
        free_axes: Vec<usize>,
        free_range: Vec<Interval>,
        runs: impl Fn(&[i64], i64, i64, &mut Vec<Run>) -> Result<()> + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(free_axes.len(), free_range.len());
        FiberLayout {
            moving_axis,
            free_axes,
            free_range,
            runs: Arc::new(runs),
        }
    }

    pub fn runs(&self, base: &[i64], lo: i64, hi: i64, out: &mut Vec<Run>) -> Result<()> {
        (self.runs)(base, lo, hi, out)
    }
}

/// An executable family system: classification plus declared parameters.
#[derive(Clone)]
pub struct CoverScheme {
    name: String,
    space: SpaceSpec,
    separation: Vec<i64>,
    bound: Vec<i64>,
    domain_note: String,
    classify: Arc<ClassifyFn>,
    layout: Option<FiberLayout>,
}

impl fmt::Debug for CoverScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoverScheme")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("colors", &self.colors())
            .field("separation", &self.separation)
            .field("bound", &self.bound)
            .finish_non_exhaustive()
    }
}

impl CoverScheme {
    /// `separation[c]` and `bound[c]` are the claims for color `c`; their
    /// common length is the color count.
    pub fn new(
        name: impl Into<String>,
        space: SpaceSpec,
        separation: Vec<i64>,
        bound: Vec<i64>,
        domain_note: impl Into<String>,
        classify: impl Fn(&Point) -> Result<Classification> + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(
            separation.len(),
            bound.len(),
            "one separation and one bound per color"
        );
        CoverScheme {
            name: name.into(),
            space,
            separation,
            bound,
            domain_note: domain_note.into(),
            classify: Arc::new(classify),
            layout: None,
        }
    }

    pub fn with_layout(mut self, layout: FiberLayout) -> Self {
        self.layout = Some(layout);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn colors(&self) -> u32 {
        self.separation.len() as u32
    }

    pub fn separation(&self, color: u32) -> i64 {
        self.separation[color as usize]
    }

    pub fn bound(&self, color: u32) -> i64 {
        self.bound[color as usize]
    }

    pub fn separations(&self) -> &[i64] {
        &self.separation
    }

    pub fn bounds(&self) -> &[i64] {
        &self.bound
    }

    pub fn domain_note(&self) -> &str {
        &self.domain_note
    }

    pub fn layout(&self) -> Option<&FiberLayout> {
        self.layout.as_ref()
    }

    /// Runs the classification without a membership check.
    pub fn classify_unchecked(&self, p: &Point) -> Result<Classification> {
        let out = (self.classify)(p)?;
        if let Some((c, _)) = &out {
            if *c >= self.colors() {
                return Err(Error::InvalidParameter(format!(
                    "{} produced color {c} of {}",
                    self.name,
                    self.colors()
                )));
            }
        }
        Ok(out)
    }
}

/// Classifies `p` after checking that it belongs to the scheme's space.
pub fn classify_point(s: &CoverScheme, p: &Point) -> Result<Classification> {
    s.space.check_point(p)?;
    s.classify_unchecked(p)
}

/// Keeps the classification inside `region` and drops it outside.
pub fn restrict_scheme(
    s: &CoverScheme,
    region: impl Fn(&Point) -> bool + Send + Sync + 'static,
) -> CoverScheme {
    let inner = s.clone();
    CoverScheme {
        name: format!("{}|restricted", s.name),
        domain_note: format!("{} (restricted)", s.domain_note),
        classify: Arc::new(move |p| {
            if region(p) {
                inner.classify_unchecked(p)
            } else {
                Ok(None)
            }
        }),
        layout: None,
        ..s.clone()
    }
}

/// Preimage scheme: a point of `domain` gets the class of its image under `f`.
pub fn pullback_scheme(s: &CoverScheme, f: &MapSpec, domain: SpaceSpec) -> Result<CoverScheme> {
    f.validate()?;
    let inner = s.clone();
    let map = f.clone();
    Ok(CoverScheme {
        name: format!("{}∘{:?}", s.name, f.name),
        space: domain,
        domain_note: format!("preimage of: {}", s.domain_note),
        classify: Arc::new(move |p| inner.classify_unchecked(&evaluate_map(&map, p)?)),
        layout: None,
        ..s.clone()
    })
}

/// An explicitly materialized family: cell key to its points.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiniteFamily {
    pub cells: BTreeMap<CellKey, Vec<Point>>,
}

impl FiniteFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: CellKey, points: Vec<Point>) {
        self.cells.entry(key).or_default().extend(points);
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.cells.values().flatten()
    }
}

pub(crate) fn check_positive(name: &str, v: i64) -> Result<()> {
    if v < 1 {
        return Err(Error::InvalidParameter(format!("{name} must be >= 1, got {v}")));
    }
    Ok(())
}

pub(crate) fn checked_mul(a: i64, b: i64, what: &'static str) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow(what))
}

pub(crate) fn checked_add(a: i64, b: i64, what: &'static str) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow(what))
}
