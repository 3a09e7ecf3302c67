use super::grid::{grid_cell, two_color};
use super::{check_positive, checked_mul, CoverScheme};
use crate::error::{Error, Result};
use crate::spaces::{pad_point, pow2, Point, SpaceSpec, Step, TowerPoint};

/// Position of `x` in the partition of `Z` into `D` cells
/// `[origin + jP, origin + jP + width)` and the `C` cells between them.
///
/// Returns `(true, j)` for `D` cell `j`, `(false, j)` for the `C` cell that
/// ends where `D` cell `j` starts.
pub(crate) fn cd_locate(x: i64, origin: i64, period: i64, width: i64) -> (bool, i64) {
    let u = x - origin;
    let j = u.div_euclid(period);
    if u - j * period < width {
        (true, j)
    } else {
        (false, j + 1)
    }
}

/// Parameters of the mixed grid cover of `Z^m × (kZ)^n`.
///
/// With `S = R + k` and `P = 2^n·n·S`, for `l ∈ 1..=2^n`:
/// `D_l` cells are `[(2^n n j + l)S − R − k, (2^n n j + l)S − R)` and `C_l`
/// cells fill the gaps. The `W` axes pick `l` through the 1-D two-coloring of
/// width `R` (bit `i` of `l − 1` is the color of axis `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixedGrid {
    pub m: usize,
    pub n: usize,
    pub k: i64,
    pub r: i64,
    pub s: i64,
    pub period: i64,
}

impl MixedGrid {
    pub fn new(m: usize, n: usize, k: i64, r: i64) -> Result<Self> {
        check_positive("k", k)?;
        check_positive("R", r)?;
        if n == 0 {
            return Err(Error::InvalidParameter(
                "mixed grid needs n >= 1 (the C/D period is 2^n·n·S)".into(),
            ));
        }
        if m > 16 || n > 30 {
            return Err(Error::InvalidParameter(format!(
                "mixed grid with m={m}, n={n} is too large"
            )));
        }
        let s = r + k;
        let period = checked_mul(
            checked_mul(pow2(n as u32)?, n as i64, "the mixed-grid period")?,
            s,
            "the mixed-grid period",
        )?;
        checked_mul(period, 64, "the mixed-grid period")?;
        Ok(MixedGrid {
            m,
            n,
            k,
            r,
            s,
            period,
        })
    }

    pub fn colors(&self) -> u32 {
        (self.m as u32) * (1u32 << self.m) + 1
    }

    fn d_origin(&self, l: i64) -> i64 {
        l * self.s - self.r - self.k
    }

    /// Half-open `D_l` cell `j`.
    pub fn d_cell(&self, l: i64, j: i64) -> (i64, i64) {
        let lo = j * self.period + self.d_origin(l);
        (lo, lo + self.k)
    }

    /// Half-open `C_l` cell `j`.
    pub fn c_cell(&self, l: i64, j: i64) -> (i64, i64) {
        let (_, lo) = self.d_cell(l, j - 1);
        let (hi, _) = self.d_cell(l, j);
        (lo, hi)
    }

    pub fn separation(&self, color: u32) -> i64 {
        if color == 0 {
            self.k
        } else {
            self.r
        }
    }

    pub fn bound(&self, color: u32) -> i64 {
        if color == 0 {
            (self.period - self.k - 1).max(self.r - 1)
        } else {
            (self.k - 1).max(self.r - 1)
        }
    }

    /// Classifies `v ∈ Z^m × (kZ)^n`, appending the cell key to `key`.
    pub fn classify(&self, v: &[i64], key: &mut Vec<i64>) -> u32 {
        let (x, w) = v.split_at(self.m);
        let mut widx = Vec::with_capacity(self.n);
        let l = 1 + i64::from(grid_cell(w, self.r, &mut widx));
        let origin = self.d_origin(l);
        let first_d = x
            .iter()
            .position(|&t| cd_locate(t, origin, self.period, self.k).0);
        key.push(l);
        let color = match first_d {
            None => {
                key.extend(
                    x.iter()
                        .map(|&t| cd_locate(t, origin, self.period, self.k).1),
                );
                0
            }
            Some(s) => {
                let mut t = 0u32;
                for (a, &xa) in x.iter().enumerate() {
                    let (bit, j) = two_color(xa, self.r);
                    t |= bit << a;
                    key.push(if a == s {
                        cd_locate(xa, origin, self.period, self.k).1
                    } else {
                        j
                    });
                }
                (1u32 << self.m) * s as u32 + t + 1
            }
        };
        key.extend(widx);
        color
    }
}

/// Mixed grid cover: color 0 is `k`-disjoint, colors `1..=m·2^m` are
/// `R`-disjoint, together they cover `Z^m × (kZ)^n`.
pub fn mixed_grid_cover(m: usize, n: usize, k: i64, r: i64) -> Result<CoverScheme> {
    let g = MixedGrid::new(m, n, k, r)?;
    let colors = g.colors();
    let mut steps = vec![1; m];
    steps.extend(std::iter::repeat(k).take(n));
    Ok(CoverScheme::new(
        format!("mixed-grid(m={m}, n={n}, k={k}, R={r})"),
        SpaceSpec::PlainLattice { steps },
        (0..colors).map(|c| g.separation(c)).collect(),
        (0..colors).map(|c| g.bound(c)).collect(),
        format!("all of Z^{m} × ({k}Z)^{n}"),
        move |p| {
            let v = p.as_lattice()?;
            if v.len() != g.m + g.n {
                return Err(Error::Membership(format!(
                    "expected {} coordinates, got {}",
                    g.m + g.n,
                    v.len()
                )));
            }
            let mut key = Vec::with_capacity(v.len() + 1);
            let c = g.classify(v, &mut key);
            Ok(Some((c, key)))
        },
    ))
}

/// The six level regions of `X × X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SquareRegion {
    /// Both levels `> k`.
    Y1,
    /// Both levels `≤ k`.
    Y2,
    /// First `≤ k`, second `> n`.
    Y3,
    /// First `> n`, second `≤ k`.
    Y4,
    /// First `≤ k`, second in `k+1..=n`.
    Y5,
    /// First in `k+1..=n`, second `≤ k`.
    Y6,
}

impl SquareRegion {
    pub fn of(i: u32, j: u32, k: u32, n: u32) -> Self {
        match (i <= k, j <= k) {
            (false, false) => SquareRegion::Y1,
            (true, true) => SquareRegion::Y2,
            (true, false) if j > n => SquareRegion::Y3,
            (true, false) => SquareRegion::Y5,
            (false, true) if i > n => SquareRegion::Y4,
            (false, true) => SquareRegion::Y6,
        }
    }
}

fn height(t: &TowerPoint) -> i64 {
    let l = i64::from(t.level);
    l * (l - 1) / 2
}

/// `(x_1..x_i, 0..0)` padded to `target` followed by `i(i−1)/2`.
fn stacked(t: &TowerPoint, target: u32, out: &mut Vec<i64>) -> Result<()> {
    out.extend(pad_point(t, target)?);
    out.push(height(t));
    Ok(())
}

/// Six-region cover of `X × X` for `X = ⋃_i (2^i Z)^i`: one merged
/// `k`-disjoint color 0 and `n`-disjoint colors whose count depends on `k`
/// alone.
///
/// Y₂ uses a grid of gap `n` on the `2k` coordinate axes of `X₁ × X₁`; Y₃/Y₄
/// cross a grid on one `X₁` factor with singletons of the high factor; Y₅/Y₆
/// run the mixed grid `(m, n, 2^k, n)` with `m = k + 2` on
/// `(φ(x), height(y)) × (padded y)`, which is isometric on Y₅.
pub fn product_square_cover(k: u32, n: u32) -> Result<CoverScheme> {
    if k == 0 || n < k {
        return Err(Error::InvalidParameter(format!(
            "product-square cover requires n >= k >= 1, got k={k}, n={n}"
        )));
    }
    if 2 * k > 16 {
        return Err(Error::InvalidParameter(format!("k={k} is too large")));
    }
    let (ki, ni) = (i64::from(k), i64::from(n));
    let mg = MixedGrid::new(k as usize + 2, n as usize, pow2(k)?, ni)?;
    let y2_colors = 1u32 << (2 * k);
    let y3_colors = 1u32 << k;
    let y5_colors = mg.colors() - 1;
    let y2_base = 1;
    let y3_base = y2_base + y2_colors;
    let y4_base = y3_base + y3_colors;
    let y5_base = y4_base + y3_colors;
    let y6_base = y5_base + y5_colors;
    let colors = y6_base + y5_colors;
    let grid_bound = (ni - 1).max(ki * (ki - 1) / 2);
    let mut sep = vec![ni; colors as usize];
    sep[0] = ki;
    let mut bound = vec![grid_bound; colors as usize];
    bound[0] = mg.bound(0);
    for c in y5_base..colors {
        bound[c as usize] = mg.bound(1);
    }
    Ok(CoverScheme::new(
        format!("product-square(k={k}, n={n})"),
        SpaceSpec::ProductOfTowers {
            step: Step::PowerOfTwo,
        },
        sep,
        bound,
        "all of X × X",
        move |p| {
            let (a, b) = p.as_pair()?;
            let region = SquareRegion::of(a.level, b.level, k, n);
            let mut key = Vec::new();
            let color = match region {
                SquareRegion::Y1 => {
                    key.push(1);
                    key.extend(p.digest());
                    0
                }
                SquareRegion::Y2 => {
                    key.push(2);
                    let mut axes = pad_point(a, k)?;
                    axes.extend(pad_point(b, k)?);
                    y2_base + grid_cell(&axes, ni, &mut key)
                }
                SquareRegion::Y3 => {
                    key.push(3);
                    let c = grid_cell(&pad_point(a, k)?, ni, &mut key);
                    key.extend(Point::Tower(b.clone()).digest());
                    y3_base + c
                }
                SquareRegion::Y4 => {
                    key.push(4);
                    let c = grid_cell(&pad_point(b, k)?, ni, &mut key);
                    key.extend(Point::Tower(a.clone()).digest());
                    y4_base + c
                }
                SquareRegion::Y5 | SquareRegion::Y6 => {
                    let (low, mid, tag, base) = if region == SquareRegion::Y5 {
                        (a, b, 5, y5_base)
                    } else {
                        (b, a, 6, y6_base)
                    };
                    let mut v = Vec::with_capacity(mg.m + mg.n);
                    stacked(low, k, &mut v)?;
                    v.push(height(mid));
                    v.extend(pad_point(mid, n)?);
                    key.push(tag);
                    match mg.classify(&v, &mut key) {
                        0 => 0,
                        c => base + c - 1,
                    }
                }
            };
            Ok(Some((color, key)))
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::classify_point;

    #[test]
    fn cell_formulas_example() {
        let g = MixedGrid::new(1, 1, 3, 5).unwrap();
        assert_eq!(g.s, 8);
        assert_eq!(g.period, 16);
        assert_eq!(g.c_cell(1, 1), (3, 16));
        assert_eq!(g.d_cell(1, 1), (16, 19));
        assert_eq!(g.colors(), 3);
    }

    #[test]
    fn cd_cells_tile_the_line() {
        let g = MixedGrid::new(2, 2, 3, 7).unwrap();
        for l in 1..=4 {
            for x in -300..300 {
                let (in_d, j) = cd_locate(x, g.d_origin(l), g.period, g.k);
                let (lo, hi) = if in_d { g.d_cell(l, j) } else { g.c_cell(l, j) };
                assert!(lo <= x && x < hi);
            }
        }
    }

    #[test]
    fn color_count_formula() {
        for m in 0..4 {
            let s = mixed_grid_cover(m, 2, 3, 4).unwrap();
            assert_eq!(s.colors() as usize, m * (1 << m) + 1);
        }
    }

    #[test]
    fn classification_lands_in_its_cells() {
        let g = MixedGrid::new(2, 1, 3, 5).unwrap();
        let s = mixed_grid_cover(2, 1, 3, 5).unwrap();
        for x in -40..40 {
            for y in -10..10 {
                for w in (-30..30).step_by(3) {
                    let (c, key) = classify_point(&s, &Point::Lattice(vec![x, y, w]))
                        .unwrap()
                        .unwrap();
                    let l = key[0];
                    let (bit, _) = two_color(w, 5);
                    assert_eq!(l, 1 + i64::from(bit));
                    if c == 0 {
                        for (a, &t) in [x, y].iter().enumerate() {
                            let (lo, hi) = g.c_cell(l, key[1 + a]);
                            assert!(lo <= t && t < hi);
                        }
                    } else {
                        let s_axis = ((c - 1) / 4) as usize;
                        let t = [x, y][s_axis];
                        let (lo, hi) = g.d_cell(l, key[1 + s_axis]);
                        assert!(lo <= t && t < hi);
                    }
                }
            }
        }
    }

    #[test]
    fn regions_partition_levels() {
        for (k, n) in [(1, 2), (2, 4), (1, 5)] {
            for i in 1..9 {
                for j in 1..9 {
                    let r = SquareRegion::of(i, j, k, n);
                    let expect = [
                        i > k && j > k,
                        i <= k && j <= k,
                        i <= k && j > n,
                        i > n && j <= k,
                        i <= k && j > k && j <= n,
                        i > k && i <= n && j <= k,
                    ];
                    assert_eq!(expect.iter().filter(|&&b| b).count(), 1);
                    let idx = [
                        SquareRegion::Y1,
                        SquareRegion::Y2,
                        SquareRegion::Y3,
                        SquareRegion::Y4,
                        SquareRegion::Y5,
                        SquareRegion::Y6,
                    ]
                    .iter()
                    .position(|&x| x == r)
                    .unwrap();
                    assert!(expect[idx]);
                }
            }
        }
    }

    #[test]
    fn square_color_count_ignores_n() {
        for k in 1..3 {
            let a = product_square_cover(k, k + 1).unwrap().colors();
            for n in k + 2..k + 5 {
                assert_eq!(product_square_cover(k, n).unwrap().colors(), a);
            }
        }
        assert_eq!(
            product_square_cover(1, 2).unwrap().colors(),
            product_square_cover(1, 5).unwrap().colors()
        );
        assert!(product_square_cover(3, 2).is_err());
    }
}
