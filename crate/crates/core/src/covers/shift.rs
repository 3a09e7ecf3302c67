use super::grid::{grid_cell, two_color};
use super::mixed::cd_locate;
use super::{check_positive, checked_mul, CoverScheme};
use crate::error::{Error, Result};
use crate::spaces::{pow2, ShiftPoint, SpaceSpec};

/// Parameters of the block cover of the shift union.
///
/// Levels `[2bk, 2bk+2k−1]` form block `b`. Inside a block the `3k` head
/// indices `2bk..2bk+3k−1` are split by `C_l`/`D_l`/`V`, the next `m`
/// indices pick `l` through `W_l`, and every later index (the tail) is
/// fixed per cell. With `S = k + m` and `P = 2^m·2S`, `D_l` cells are
/// `[(2^m j + l)2S − m − k, (2^m j + l)2S − m)`; `V` cells have width `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftUnionCover {
    pub k: i64,
    pub m: i64,
    pub s: i64,
    pub period: i64,
}

impl ShiftUnionCover {
    pub fn new(k: i64, m: i64) -> Result<Self> {
        check_positive("k", k)?;
        check_positive("m", m)?;
        if k > 5 || m > 20 {
            return Err(Error::InvalidParameter(format!(
                "shift-union cover with k={k}, m={m} is too large"
            )));
        }
        let s = k + m;
        let period = checked_mul(pow2(m as u32)?, 2 * s, "the shift-union period")?;
        Ok(ShiftUnionCover { k, m, s, period })
    }

    pub fn heads(&self) -> i64 {
        3 * self.k
    }

    /// Families per block besides the `k`-disjoint one: `3k·2^{3k}`.
    pub fn families_per_block(&self) -> u32 {
        (self.heads() as u32) << self.heads()
    }

    pub fn colors(&self) -> u32 {
        2 * self.families_per_block() + 2
    }

    /// Block of a level.
    pub fn block(&self, level: i64) -> i64 {
        level.div_euclid(2 * self.k)
    }

    fn d_origin(&self, l: i64) -> i64 {
        2 * l * self.s - self.m - self.k
    }

    /// Half-open `D_l` cell `j`.
    pub fn d_cell(&self, l: i64, j: i64) -> (i64, i64) {
        let lo = j * self.period + self.d_origin(l);
        (lo, lo + self.k)
    }

    /// Half-open `C_l` cell `j`.
    pub fn c_cell(&self, l: i64, j: i64) -> (i64, i64) {
        (self.d_cell(l, j - 1).1, self.d_cell(l, j).0)
    }

    pub fn separation(&self, color: u32) -> i64 {
        if color < 2 {
            self.k
        } else {
            self.m
        }
    }

    /// ℓ1 diameter bound of a cell of `color`: level spread, head spreads,
    /// `W` spreads; the tail is constant.
    pub fn bound(&self, color: u32) -> i64 {
        let (k, m) = (self.k, self.m);
        let levels = 2 * k - 1;
        let w = m * (m - 1);
        if color < 2 {
            levels + 3 * k * (self.period - k - 1) + w
        } else {
            levels + (k - 1) + (3 * k - 1) * (m - 1) + w
        }
    }

    /// Classifies a shift point, appending the cell key to `key`.
    pub fn classify(&self, p: &ShiftPoint, key: &mut Vec<i64>) -> u32 {
        let b = self.block(p.level);
        let start = 2 * b * self.k;
        let heads: Vec<i64> = (start..start + self.heads()).map(|i| p.get(i)).collect();
        let w_start = start + self.heads();
        let w: Vec<i64> = (w_start..w_start + self.m).map(|i| p.get(i)).collect();
        let mut widx = Vec::with_capacity(w.len());
        let l = 1 + i64::from(grid_cell(&w, self.m, &mut widx));
        let origin = self.d_origin(l);
        let parity = b.rem_euclid(2) as u32;
        key.push(b);
        key.push(l);
        let first_d = heads
            .iter()
            .position(|&x| cd_locate(x, origin, self.period, self.k).0);
        let color = match first_d {
            None => {
                key.extend(
                    heads
                        .iter()
                        .map(|&x| cd_locate(x, origin, self.period, self.k).1),
                );
                parity
            }
            Some(s) => {
                let mut t = 0u32;
                for (a, &x) in heads.iter().enumerate() {
                    let (bit, j) = two_color(x, self.m);
                    t |= bit << a;
                    key.push(if a == s {
                        cd_locate(x, origin, self.period, self.k).1
                    } else {
                        j
                    });
                }
                let family = (s as u32) * (1u32 << self.heads()) + t + 1;
                2 * family + parity
            }
        };
        key.extend(widx);
        for (&i, &v) in p.support.range(w_start + self.m..) {
            key.push(i);
            key.push(v);
        }
        color
    }
}

/// Cover of the shift union by `2 + (6k)·2^{3k}` colors: colors 0 and 1
/// (even and odd blocks) are `k`-disjoint, the rest `m`-disjoint.
pub fn shift_union_cover(k: i64, m: i64) -> Result<CoverScheme> {
    let c = ShiftUnionCover::new(k, m)?;
    let colors = c.colors();
    Ok(CoverScheme::new(
        format!("shift-union(k={k}, m={m})"),
        SpaceSpec::ShiftUnion,
        (0..colors).map(|i| c.separation(i)).collect(),
        (0..colors).map(|i| c.bound(i)).collect(),
        "all of the shift union",
        move |p| {
            let s = p.as_shift()?;
            let mut key = Vec::new();
            let color = c.classify(s, &mut key);
            Ok(Some((color, key)))
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_count() {
        assert_eq!(ShiftUnionCover::new(2, 3).unwrap().colors(), 770);
        assert_eq!(shift_union_cover(2, 1).unwrap().colors(), 770);
        assert_eq!(shift_union_cover(1, 2).unwrap().colors(), 6 * 8 + 2);
    }

    #[test]
    fn d_cells_width_and_offset() {
        let c = ShiftUnionCover::new(2, 3).unwrap();
        assert_eq!(c.s, 5);
        for l in 1..8 {
            let (lo, hi) = c.d_cell(l, 0);
            assert_eq!(hi - lo, 2);
            assert_eq!(c.d_cell(l + 1, 0).0 - lo, 10);
            assert_eq!(lo, 10 * l - 3 - 2);
        }
    }

    #[test]
    fn c_and_d_tile_and_clear_the_origin() {
        for (k, m) in [(1, 2), (2, 2), (2, 3), (3, 1)] {
            let c = ShiftUnionCover::new(k, m).unwrap();
            for l in 1..=(1 << m) {
                for x in -200..200 {
                    let (in_d, j) = cd_locate(x, c.d_origin(l), c.period, k);
                    let (lo, hi) = if in_d { c.d_cell(l, j) } else { c.c_cell(l, j) };
                    assert!(lo <= x && x < hi);
                    if (-m..=m).contains(&x) {
                        assert!(!in_d, "[-m, m] must avoid D_l");
                    }
                }
            }
        }
    }

    #[test]
    fn union_of_d_families_is_m_disjoint() {
        for (k, m) in [(1, 2), (2, 2), (2, 3)] {
            let c = ShiftUnionCover::new(k, m).unwrap();
            let mut cells: Vec<(i64, i64)> = (1..=(1 << m))
                .flat_map(|l| (-3..4).map(move |j| c.d_cell(l, j)))
                .collect();
            cells.sort();
            for w in cells.windows(2) {
                assert!(w[1].0 - (w[0].1 - 1) >= m);
            }
        }
    }

    #[test]
    fn levels_route_to_blocks() {
        let c = ShiftUnionCover::new(2, 2).unwrap();
        for b in -3..3 {
            for a in 4 * b..4 * b + 4 {
                assert_eq!(c.block(a), b);
            }
        }
    }
}
