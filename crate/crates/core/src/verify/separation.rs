//! Exact minimum distance between points of distinct cells.
//!
//! Points are bucketed on a few spread axes with bucket width `w`. Since
//! every encoded metric dominates the row maximum metric, a pair at
//! distance `< w` always lands in neighboring buckets; a best value below
//! `w` is therefore the exact minimum. Otherwise `w` doubles.
//!
//! Under ℓ1 such a pair also differs on fewer than `w` axes, so neighbor
//! offsets moving on `w` or more key axes are skipped.

use std::collections::HashMap;

use rayon::prelude::*;

use super::encode::{Encoded, Shape};

/// Key axes for the maximum metric, and the cap under ℓ1.
const AXES: usize = 6;
const L1_AXES: usize = 16;
/// Neighbor offsets allowed per bucket when widening an ℓ1 key.
const L1_OFFSETS: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Separation {
    /// Exact minimum, or a lower bound when `exact` is false.
    pub value: i64,
    pub exact: bool,
}

/// `members[i]` is a row of `enc`, `cells[i]` its cell id. Returns `None`
/// when fewer than two cells are present.
pub(crate) fn min_cross_distance(
    enc: &Encoded,
    members: &[u32],
    cells: &[u32],
    start_width: i64,
    pair_budget: u64,
) -> Option<Separation> {
    debug_assert_eq!(members.len(), cells.len());
    let first = *cells.first()?;
    if cells.iter().all(|&c| c == first) {
        return None;
    }
    let dim = enc.dim;
    let mut lo = vec![i64::MAX; dim];
    let mut hi = vec![i64::MIN; dim];
    for &m in members {
        for (a, &v) in enc.row(m as usize).iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    let mut order: Vec<usize> = (0..dim).filter(|&a| hi[a] > lo[a]).collect();
    order.sort_by_key(|&a| std::cmp::Reverse(hi[a] - lo[a]));
    let spread = order.first().map_or(0, |&a| hi[a] - lo[a]);
    // key axes for width w: add spread axes while buckets stay sparse
    let l1 = enc.shape == Shape::L1;
    let key_axes = |w: i64| -> Vec<usize> {
        let mut buckets = 1u64;
        let mut out = Vec::new();
        for &a in &order {
            let full = if l1 {
                out.len() == L1_AXES || offset_count(out.len() + 1, w) > L1_OFFSETS
            } else {
                out.len() == AXES
            };
            // window unions are not products, so the estimate only limits the ℓ∞ key
            if full || (!l1 && buckets >= members.len() as u64) {
                break;
            }
            buckets = buckets.saturating_mul(((hi[a] - lo[a]) / w + 1) as u64);
            out.push(a);
        }
        if out.is_empty() {
            out.extend(order.first());
        }
        out
    };

    let mut w = start_width.max(1);
    // every cross pair found so far is at distance >= proven
    let mut proven = 0;
    loop {
        let all_pairs = w > spread;
        match scan(enc, members, cells, &key_axes(w), w, pair_budget) {
            Some(best) if best < w || all_pairs => {
                return Some(Separation {
                    value: best,
                    exact: true,
                })
            }
            Some(_) => proven = w,
            None => {
                return Some(Separation {
                    value: proven,
                    exact: false,
                })
            }
        }
        w = w.saturating_mul(2);
    }
}

type Key = [i64; L1_AXES];

/// Smallest distance over pairs in neighboring buckets, `i64::MAX` if none,
/// `None` if the pair estimate exceeds the budget.
fn scan(
    enc: &Encoded,
    members: &[u32],
    cells: &[u32],
    axes: &[usize],
    w: i64,
    budget: u64,
) -> Option<i64> {
    let mut buckets: HashMap<Key, Vec<u32>> = HashMap::new();
    for (i, &m) in members.iter().enumerate() {
        let row = enc.row(m as usize);
        let mut key = [0i64; L1_AXES];
        for (s, &a) in axes.iter().enumerate() {
            key[s] = row[a].div_euclid(w);
        }
        buckets.entry(key).or_default().push(i as u32);
    }
    let moves = if enc.shape == Shape::L1 { w - 1 } else { axes.len() as i64 };
    let offsets = forward_offsets(axes.len(), moves);
    let mut work: u64 = 0;
    let list: Vec<(&Key, &Vec<u32>)> = buckets.iter().collect();
    for (key, here) in &list {
        for off in &offsets {
            let n = shifted(key, off);
            if let Some(there) = buckets.get(&n) {
                let pairs = if off.iter().all(|&o| o == 0) {
                    (here.len() as u64).pow(2) / 2
                } else {
                    here.len() as u64 * there.len() as u64
                };
                work = work.saturating_add(pairs);
            }
        }
    }
    if work > budget {
        return None;
    }
    let best = list
        .par_iter()
        .map(|(key, here)| {
            let mut best = i64::MAX;
            for off in &offsets {
                let same = off.iter().all(|&o| o == 0);
                let Some(there) = buckets.get(&shifted(key, off)) else {
                    continue;
                };
                for (x, &i) in here.iter().enumerate() {
                    let rest = if same { &there[x + 1..] } else { &there[..] };
                    let (mi, ci) = (members[i as usize] as usize, cells[i as usize]);
                    for &j in rest {
                        if cells[j as usize] != ci {
                            best = best.min(enc.dist(mi, members[j as usize] as usize));
                        }
                    }
                }
            }
            best
        })
        .min()
        .unwrap_or(i64::MAX);
    Some(best)
}

fn shifted(key: &Key, off: &Key) -> Key {
    let mut k = *key;
    for (a, o) in k.iter_mut().zip(off) {
        *a += o;
    }
    k
}

/// Offsets in `{-1,0,1}^d` with at most `moves` nonzero entries whose
/// first nonzero entry is positive, plus zero, so each unordered bucket
/// pair is visited once.
fn forward_offsets(d: usize, moves: i64) -> Vec<Key> {
    fn go(k: &mut Key, at: usize, d: usize, left: i64, signed: bool, out: &mut Vec<Key>) {
        if at == d {
            out.push(*k);
            return;
        }
        go(k, at + 1, d, left, signed, out);
        if left > 0 {
            for v in [1, -1] {
                if v < 0 && !signed {
                    continue;
                }
                k[at] = v;
                go(k, at + 1, d, left - 1, true, out);
                k[at] = 0;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut [0; L1_AXES], 0, d, moves.max(0), false, &mut out);
    out
}

/// `forward_offsets(d, w - 1).len()` without building them.
fn offset_count(d: usize, w: i64) -> usize {
    let mut total = 1usize;
    let mut choose = 1usize;
    for j in 1..=d.min((w - 1).max(0) as usize) {
        choose = choose * (d + 1 - j) / j;
        total = total.saturating_add(choose.saturating_mul(1 << (j - 1)));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Point, SpaceSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(enc: &Encoded, cells: &[u32]) -> Option<i64> {
        let mut best = None;
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if cells[i] != cells[j] {
                    let d = enc.dist(i, j);
                    best = Some(best.map_or(d, |b: i64| b.min(d)));
                }
            }
        }
        best
    }

    #[test]
    fn offsets_cover_each_pair_once() {
        assert_eq!(forward_offsets(1, 1).len(), 2);
        assert_eq!(forward_offsets(2, 2).len(), 5);
        assert_eq!(forward_offsets(3, 3).len(), 14);
        assert_eq!(forward_offsets(6, 6).len(), 729_usize.div_ceil(2));
        for d in 0..8 {
            for w in 1..6 {
                // brute force over {-1,0,1}^d
                let brute = (0..3usize.pow(d as u32))
                    .filter(|code| {
                        let v: Vec<i64> =
                            (0..d).map(|s| (code / 3usize.pow(s as u32) % 3) as i64 - 1).collect();
                        let nz = v.iter().filter(|&&x| x != 0).count() as i64;
                        nz < w && v.iter().find(|&&x| x != 0).map_or(true, |&x| x > 0)
                    })
                    .count();
                assert_eq!(forward_offsets(d, w - 1).len(), brute);
                assert_eq!(offset_count(d, w), brute);
            }
        }
    }

    #[test]
    fn matches_brute_force_on_random_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..60 {
            let dim = 1 + round % 5;
            let spread = 3 + (round as i64 * 7) % 90;
            let n = 2 + rng.random_range(0..150);
            let pts: Vec<Point> = (0..n)
                .map(|_| Point::Lattice((0..dim).map(|_| rng.random_range(-spread..=spread)).collect()))
                .collect();
            let cells: Vec<u32> = (0..n).map(|_| rng.random_range(0..4)).collect();
            let enc = Encoded::new(&SpaceSpec::lattice(dim), &pts).unwrap();
            let members: Vec<u32> = (0..n as u32).collect();
            let start = 1 + rng.random_range(0..6);
            let got = min_cross_distance(&enc, &members, &cells, start, u64::MAX);
            assert_eq!(got.map(|s| s.value), brute(&enc, &cells));
            assert!(got.map_or(true, |s| s.exact));
        }
    }

    #[test]
    fn single_cell_has_no_separation() {
        let pts = vec![Point::Lattice(vec![0]), Point::Lattice(vec![5])];
        let enc = Encoded::new(&SpaceSpec::lattice(1), &pts).unwrap();
        assert_eq!(min_cross_distance(&enc, &[0, 1], &[3, 3], 1, u64::MAX), None);
    }

    #[test]
    fn budget_yields_lower_bound() {
        let pts: Vec<Point> = (0..100).map(|t| Point::Lattice(vec![t * 10])).collect();
        let cells: Vec<u32> = (0..100).collect();
        let enc = Encoded::new(&SpaceSpec::lattice(1), &pts).unwrap();
        let members: Vec<u32> = (0..100).collect();
        let s = min_cross_distance(&enc, &members, &cells, 2, 0).unwrap();
        assert!(!s.exact && s.value <= 10);
    }
}
