//! Exhaustive search for covers of an integer interval by `k` families that
//! are `n`-disjoint and `R`-bounded.
//!
//! Positions are assigned left to right as `(color, cluster)`. A point of
//! color `c` must share its cluster with every earlier color-`c` point
//! closer than `n`, and a cluster accepts points up to `R` after its first
//! one. Future feasibility depends only on the last `max(n, R) + 1`
//! positions, so failed suffix states are memoized.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{verify_points, VerifyOptions};
use crate::covers::{check_positive, CoverScheme};
use crate::error::{Error, Result};
use crate::spaces::{Interval, Point, SpaceSpec};

/// One covered position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub position: i64,
    pub color: u32,
    pub cluster: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum OracleOutcome {
    Feasible {
        assignment: Vec<Assignment>,
        nodes: u64,
        /// The assignment passed `verify_points` as a cover scheme.
        reverified: bool,
    },
    /// The pruned search space was exhausted.
    Infeasible { nodes: u64, memo_states: u64 },
    /// The node budget ran out first.
    Inconclusive { nodes: u64, budget: u64 },
}

struct Search {
    n: usize,
    r: usize,
    k: u32,
    len: usize,
    memo_window: usize,
    color: Vec<u32>,
    cluster: Vec<u32>,
    start: Vec<usize>,
    failed: HashSet<(usize, Vec<u32>)>,
    nodes: u64,
    budget: u64,
}

enum Step {
    Found,
    Dead,
    OutOfBudget,
}

impl Search {
    /// Canonical description of the suffix ending before position `t`.
    fn state(&self, t: usize) -> Vec<u32> {
        let from = t.saturating_sub(self.memo_window);
        let mut labels: HashMap<u32, u32> = HashMap::new();
        let mut out = Vec::with_capacity(3 * (t - from));
        for s in from..t {
            let next = labels.len() as u32;
            let fresh = !labels.contains_key(&self.cluster[s]);
            let label = *labels.entry(self.cluster[s]).or_insert(next);
            out.push(self.color[s]);
            out.push(label);
            if fresh {
                let age = t - self.start[self.cluster[s] as usize];
                out.push(age.min(self.r + 1) as u32);
            }
        }
        out
    }

    fn options(&self, t: usize, c: u32) -> Vec<Option<u32>> {
        let near_from = t.saturating_sub(self.n - 1);
        let mut forced: Option<u32> = None;
        for s in near_from..t {
            if self.color[s] == c {
                match forced {
                    None => forced = Some(self.cluster[s]),
                    Some(f) if f != self.cluster[s] => return Vec::new(),
                    _ => {}
                }
            }
        }
        let open = |id: u32| t - self.start[id as usize] <= self.r;
        match forced {
            Some(f) => {
                if open(f) {
                    vec![Some(f)]
                } else {
                    Vec::new()
                }
            }
            None => {
                let mut out: Vec<Option<u32>> = Vec::new();
                let from = t.saturating_sub(self.r);
                for s in from..t {
                    let id = self.cluster[s];
                    if self.color[s] == c && open(id) && !out.contains(&Some(id)) {
                        out.push(Some(id));
                    }
                }
                out.push(None);
                out
            }
        }
    }
}

/// Decides whether `k ∈ {1, 2}` families, each `n`-disjoint and `R`-bounded,
/// can cover the integer interval `window`.
pub fn oracle_1d_nocover(
    n: i64,
    r: i64,
    k: u32,
    window: Interval,
    budget: u64,
) -> Result<OracleOutcome> {
    check_positive("n", n)?;
    check_positive("R", r)?;
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidParameter(format!("k must be 1 or 2, got {k}")));
    }
    let len = if window.is_empty() {
        0
    } else {
        usize::try_from(window.hi - window.lo + 1)
            .map_err(|_| Error::InvalidParameter("window too long".into()))?
    };
    let mut s = Search {
        n: n as usize,
        r: r as usize,
        k,
        len,
        memo_window: n.max(r) as usize + 1,
        color: Vec::with_capacity(len),
        cluster: Vec::with_capacity(len),
        start: Vec::new(),
        failed: HashSet::new(),
        nodes: 0,
        budget,
    };
    match s.go_collect() {
        Collected::Found(assignment) => {
            let assignment: Vec<Assignment> = assignment
                .into_iter()
                .enumerate()
                .map(|(i, (color, cluster))| Assignment {
                    position: window.lo + i as i64,
                    color,
                    cluster,
                })
                .collect();
            let scheme = assignment_scheme(n, r, k, &assignment);
            let points: Vec<Point> = assignment
                .iter()
                .map(|a| Point::Lattice(vec![a.position]))
                .collect();
            let report = verify_points(&scheme, scheme.space(), &points, &VerifyOptions::default())?;
            Ok(OracleOutcome::Feasible {
                assignment,
                nodes: s.nodes,
                reverified: report.passed(),
            })
        }
        Collected::Dead => Ok(OracleOutcome::Infeasible {
            nodes: s.nodes,
            memo_states: s.failed.len() as u64,
        }),
        Collected::OutOfBudget => Ok(OracleOutcome::Inconclusive {
            nodes: s.nodes,
            budget,
        }),
    }
}

enum Collected {
    Found(Vec<(u32, u32)>),
    Dead,
    OutOfBudget,
}

impl Search {
    fn go_collect(&mut self) -> Collected {
        let mut found = None;
        let step = self.go(0, &mut found);
        match step {
            Step::Found => Collected::Found(found.unwrap_or_default()),
            Step::Dead => Collected::Dead,
            Step::OutOfBudget => Collected::OutOfBudget,
        }
    }

    /// Depth-first step at position `t`; on success `found` holds the labels.
    fn go(&mut self, t: usize, found: &mut Option<Vec<(u32, u32)>>) -> Step {
        if t == self.len {
            *found = Some(self.color.iter().copied().zip(self.cluster.iter().copied()).collect());
            return Step::Found;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::OutOfBudget;
        }
        let key = (self.len - t, self.state(t));
        if self.failed.contains(&key) {
            return Step::Dead;
        }
        let colors = if t == 0 { 1 } else { self.k };
        for c in 0..colors {
            for opt in self.options(t, c) {
                let id = match opt {
                    Some(id) => id,
                    None => {
                        self.start.push(t);
                        (self.start.len() - 1) as u32
                    }
                };
                self.color.push(c);
                self.cluster.push(id);
                let step = self.go(t + 1, found);
                self.color.pop();
                self.cluster.pop();
                match step {
                    Step::Dead => {
                        if opt.is_none() {
                            self.start.pop();
                        }
                    }
                    other => return other,
                }
            }
        }
        self.failed.insert(key);
        Step::Dead
    }
}

/// The assignment as a scheme on `Z`: color as given, cell = cluster,
/// declared `n`-disjoint and `R`-bounded; positions not listed are uncovered.
pub fn assignment_scheme(n: i64, r: i64, k: u32, assignment: &[Assignment]) -> CoverScheme {
    let table: HashMap<i64, (u32, i64)> = assignment
        .iter()
        .map(|a| (a.position, (a.color, i64::from(a.cluster))))
        .collect();
    CoverScheme::new(
        "oracle-assignment",
        SpaceSpec::lattice(1),
        vec![n; k as usize],
        vec![r; k as usize],
        "positions of the assignment",
        move |p| {
            let t = p.as_lattice()?[0];
            Ok(table.get(&t).map(|&(c, id)| (c, vec![id])))
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(n: i64, r: i64, k: u32, lo: i64, hi: i64) -> OracleOutcome {
        oracle_1d_nocover(n, r, k, Interval::new(lo, hi), 10_000_000).unwrap()
    }

    /// With one color and `n >= 2`, neighbors share a cluster, so the
    /// interval must be a single cluster; `n = 1` separates anything.
    fn one_color_feasible(n: i64, r: i64, lo: i64, hi: i64) -> bool {
        n == 1 || hi - lo <= r
    }

    #[test]
    fn spec_examples() {
        assert!(matches!(outcome(3, 5, 1, -5, 5), OracleOutcome::Infeasible { .. }));
        match outcome(3, 5, 1, -2, 2) {
            OracleOutcome::Feasible {
                assignment,
                reverified,
                ..
            } => {
                assert!(reverified);
                assert!(assignment.iter().all(|a| a.cluster == assignment[0].cluster));
            }
            other => panic!("{other:?}"),
        }
        match outcome(3, 30, 2, -30, 30) {
            OracleOutcome::Feasible { reverified, .. } => assert!(reverified),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn one_color_matches_closed_form() {
        for n in 1..4 {
            for r in 1..6 {
                for len in 1..10 {
                    let feasible = matches!(outcome(n, r, 1, 0, len - 1), OracleOutcome::Feasible { .. });
                    assert_eq!(feasible, one_color_feasible(n, r, 0, len - 1), "n={n} r={r} len={len}");
                }
            }
        }
    }

    /// Naive search over all (color, cluster) labelings for tiny windows.
    fn naive(n: i64, r: i64, k: u32, len: usize) -> bool {
        fn rec(t: usize, len: usize, lab: &mut Vec<(u32, u32)>, n: i64, r: i64, k: u32) -> bool {
            if t == len {
                for i in 0..len {
                    for j in i + 1..len {
                        let d = (j - i) as i64;
                        let (a, b) = (lab[i], lab[j]);
                        if a == b && d > r {
                            return false;
                        }
                        if a.0 == b.0 && a.1 != b.1 && d < n {
                            return false;
                        }
                    }
                }
                return true;
            }
            for c in 0..k {
                for cl in 0..=t as u32 {
                    lab.push((c, cl));
                    if rec(t + 1, len, lab, n, r, k) {
                        return true;
                    }
                    lab.pop();
                }
            }
            false
        }
        rec(0, len, &mut Vec::new(), n, r, k)
    }

    #[test]
    fn two_colors_match_naive_search() {
        for n in 1..4 {
            for r in 1..4 {
                for len in 1..7 {
                    let fast = matches!(outcome(n, r, 2, 0, len as i64 - 1), OracleOutcome::Feasible { .. });
                    assert_eq!(fast, naive(n, r, 2, len), "n={n} r={r} len={len}");
                }
            }
        }
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        assert!(matches!(
            oracle_1d_nocover(3, 5, 2, Interval::new(0, 40), 3).unwrap(),
            OracleOutcome::Inconclusive { .. }
        ));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(oracle_1d_nocover(0, 5, 1, Interval::new(0, 3), 10).is_err());
        assert!(oracle_1d_nocover(3, 5, 3, Interval::new(0, 3), 10).is_err());
    }
}
