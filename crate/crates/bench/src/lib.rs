//! Workloads shared by the benchmarks, sized to run in well under a second.

use coasdim_core::covers::{grid_cover, CoverScheme};
use coasdim_core::spaces::{Interval, MapSpec, SpaceSpec, Step, Window};
use coasdim_core::suite::{mixed_grid_window, shift_union_windows, staircase_window};
use coasdim_core::Result;

/// A cover and the windows it is verified on.
pub struct VerifyCase {
    pub label: &'static str,
    pub scheme: CoverScheme,
    pub windows: Vec<Window>,
}

pub fn verify_cases() -> Result<Vec<VerifyCase>> {
    let (stair, w1) = staircase_window(1, 2)?;
    let (big_stair, w2) = staircase_window(2, 3)?;
    let (mixed, w3) = mixed_grid_window(1, 1, 3, 5)?;
    let (shift, w4) = shift_union_windows(1, 2)?;
    Ok(vec![
        VerifyCase {
            label: "grid-3d",
            scheme: grid_cover(3, 4)?,
            windows: vec![Window::cube(Interval::symmetric(20))],
        },
        VerifyCase {
            label: "staircase-1-2",
            scheme: stair,
            windows: vec![w1],
        },
        VerifyCase {
            label: "staircase-2-3-fibered",
            scheme: big_stair,
            windows: vec![w2],
        },
        VerifyCase {
            label: "mixed-grid-1-1-3-5",
            scheme: mixed,
            windows: vec![w3],
        },
        VerifyCase {
            label: "shift-union-1-2",
            scheme: shift,
            windows: w4,
        },
    ])
}

/// The φ(3) isometry check from the acceptance battery.
pub fn phi_case() -> (MapSpec, SpaceSpec, SpaceSpec, Window) {
    (
        MapSpec::phi(3),
        SpaceSpec::tower_with_factor(Step::PowerOfTwo, 1),
        SpaceSpec::lattice(5),
        Window::cube(Interval::symmetric(8))
            .with_levels(1, 3)
            .with_extra_box(Interval::symmetric(3)),
    )
}
