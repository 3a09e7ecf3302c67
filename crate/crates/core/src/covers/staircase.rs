use super::grid::{grid_cell, two_color};
use super::{check_positive, checked_add, checked_mul, CoverScheme, FiberLayout, Run};
use crate::error::{Error, Result};
use crate::spaces::{evaluate_map, pow2, Interval, MapSpec, SpaceSpec, Step};

/// Color of the long `J` cells (`n`-disjoint).
pub const STAIRCASE_J: u32 = 0;
/// Color of the short `I` cells (`r`-disjoint).
pub const STAIRCASE_I: u32 = 1;

/// Parameters of the staircase cover of `(2^n Z)^dim × Z × height`.
///
/// Along the moving axis the fiber over `x` alternates closed intervals
/// `I_{x,k} = [(kT+p(x))(r+n) − n, (kT+p(x))(r+n)]` and
/// `J_{x,k} = [(kT+p(x))(r+n), ((k+1)T+p(x))(r+n) − n]`, with
/// `T = Σ_{j=1}^{dim} 2^{rj}`. Shared endpoints go to `I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Staircase {
    pub n: i64,
    pub r: i64,
    pub dim: usize,
    pub height: Interval,
    /// `T = Σ_{j=1}^{dim} 2^{rj}`.
    pub total: i64,
    /// `Q = T(r+n)`, the length of one `I ∪ J` period.
    pub period: i64,
}

impl Staircase {
    pub fn new(n: i64, r: i64, dim: usize, height: Interval) -> Result<Self> {
        check_positive("n", n)?;
        if r <= n {
            return Err(Error::InvalidParameter(format!(
                "staircase requires r > n, got n={n}, r={r}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("staircase needs dim >= 1".into()));
        }
        if height.is_empty() {
            return Err(Error::InvalidParameter("empty height interval".into()));
        }
        let r32 = u32::try_from(r).map_err(|_| Error::Overflow("2^r"))?;
        let mut total = 0i64;
        for j in 1..=dim as u32 {
            let e = r32.checked_mul(j).ok_or(Error::Overflow("2^{rj}"))?;
            total = checked_add(total, pow2(e)?, "the staircase period")?;
        }
        let period = checked_mul(total, r + n, "the staircase period")?;
        // keep a few periods of headroom for window arithmetic
        checked_mul(period, 64, "the staircase period")?;
        Ok(Staircase {
            n,
            r,
            dim,
            height,
            total,
            period,
        })
    }

    /// `p(x) = Σ_j (x_j mod 2^r)·2^{r(j−1)}`, the exact form of
    /// `Σ_j frac(x_j / 2^r)·2^{rj}`.
    pub fn p(&self, x: &[i64]) -> i64 {
        let m = 1i64 << self.r;
        x.iter()
            .enumerate()
            .map(|(j, &v)| v.rem_euclid(m) << (self.r * j as i64))
            .sum()
    }

    /// Moving-axis coordinate of the left end of `I_{x,0}`.
    fn offset(&self, x: &[i64]) -> i64 {
        self.p(x) * (self.r + self.n) - self.n
    }

    /// Closed `I_{x,k}`.
    pub fn i_interval(&self, x: &[i64], k: i64) -> (i64, i64) {
        let lo = k * self.period + self.offset(x);
        (lo, lo + self.n)
    }

    /// Closed `J_{x,k}`.
    pub fn j_interval(&self, x: &[i64], k: i64) -> (i64, i64) {
        let lo = k * self.period + self.offset(x) + self.n;
        (lo, lo + self.period - self.n)
    }

    /// `(color, k)` of the moving coordinate `t` in the fiber over `x`.
    pub fn locate(&self, x: &[i64], t: i64) -> (u32, i64) {
        let s = t - self.offset(x);
        let k = s.div_euclid(self.period);
        if s - k * self.period <= self.n {
            (STAIRCASE_I, k)
        } else {
            (STAIRCASE_J, k)
        }
    }

    fn height_span(&self) -> i64 {
        self.height.hi - self.height.lo
    }

    fn runs(&self, x: &[i64], lo: i64, hi: i64, out: &mut Vec<Run>) {
        out.clear();
        if lo > hi {
            return;
        }
        let off = self.offset(x);
        let mut k = (lo - off).div_euclid(self.period);
        loop {
            let start = k * self.period + off;
            if start > hi {
                break;
            }
            let i_hi = start + self.n;
            let j_hi = start + self.period - 1;
            if i_hi >= lo {
                out.push(Run {
                    lo: start.max(lo),
                    hi: i_hi.min(hi),
                    color: STAIRCASE_I,
                    local: 2 * k + 1,
                });
            }
            if j_hi >= lo && i_hi < hi {
                out.push(Run {
                    lo: (i_hi + 1).max(lo),
                    hi: j_hi.min(hi),
                    color: STAIRCASE_J,
                    local: 2 * k,
                });
            }
            k += 1;
        }
    }
}

/// Two-color staircase cover of `(2^n Z)^dim × Z × height`; points are
/// lattice points `(x_1, .., x_dim, t, h)`.
pub fn staircase_cover(n: i64, r: i64, dim: usize, height: Interval) -> Result<CoverScheme> {
    let st = Staircase::new(n, r, dim, height)?;
    let step = pow2(u32::try_from(n).map_err(|_| Error::Overflow("2^n"))?)?;
    let mut steps = vec![step; dim];
    steps.extend([1, 1]);
    let hspan = st.height_span();
    let mut sep = vec![0; 2];
    let mut bound = vec![0; 2];
    sep[STAIRCASE_J as usize] = n;
    bound[STAIRCASE_J as usize] = st.period.max(hspan);
    sep[STAIRCASE_I as usize] = r;
    bound[STAIRCASE_I as usize] = n.max(hspan);
    let layout_st = st;
    let layout = FiberLayout::new(dim, vec![dim + 1], vec![height], move |x, lo, hi, out| {
        layout_st.runs(x, lo, hi, out);
        Ok(())
    });
    Ok(CoverScheme::new(
        format!("staircase(n={n}, r={r}, dim={dim})"),
        SpaceSpec::PlainLattice { steps },
        sep,
        bound,
        format!(
            "(2^{n}Z)^{dim} × Z × [{}, {}]",
            height.lo, height.hi
        ),
        move |p| {
            let c = p.as_lattice()?;
            if c.len() != st.dim + 2 {
                return Err(Error::Membership(format!(
                    "staircase points have {} coordinates, got {}",
                    st.dim + 2,
                    c.len()
                )));
            }
            if !st.height.contains(c[st.dim + 1]) {
                return Ok(None);
            }
            let x = &c[..st.dim];
            let (color, k) = st.locate(x, c[st.dim]);
            let mut key = x.to_vec();
            key.push(k);
            Ok(Some((color, key)))
        },
    )
    .with_layout(layout))
}

/// First color of the low-level grid region in [`omega_cover`].
pub const OMEGA_GRID_BASE: u32 = 4;

/// Cover of `⋃_i (2^i Z)^i × Z` with one `n`-disjoint color and
/// `3 + 2^{n+1}` `r`-disjoint colors.
///
/// Levels `≥ r` use the two interval colors `2` (`[2jr, (2j+1)r)`) and `3`
/// (`[(2j−1)r, 2jr)`) on the `Z` factor; levels `n+1 .. r−1` go through the
/// staircase after `ψ`; levels `1..=n` go through `φ` to a grid on `Z^{n+1}`
/// that ignores the height coordinate.
pub fn omega_cover(n: u32, r: u32) -> Result<CoverScheme> {
    if n <= 2 || r <= n {
        return Err(Error::InvalidParameter(format!(
            "omega cover requires r > n > 2, got n={n}, r={r}"
        )));
    }
    if n + 1 > 16 {
        return Err(Error::InvalidParameter(format!("n={n} is too large")));
    }
    let (ni, ri) = (i64::from(n), i64::from(r));
    let height = Interval::new(ni * (ni + 1) / 2, ri * (ri - 1) / 2);
    let stair = staircase_cover(ni, ri, r as usize, height)?;
    let phi = MapSpec::phi(n);
    let psi = MapSpec::psi(n, r);
    let grid_colors = 1usize << (n + 1);
    let mut sep = vec![ni, ri, ri, ri];
    let mut bound = vec![
        stair.bound(STAIRCASE_J),
        stair.bound(STAIRCASE_I),
        ri - 1,
        ri - 1,
    ];
    sep.extend(std::iter::repeat(ri).take(grid_colors));
    bound.extend(std::iter::repeat((ri - 1).max(ni * (ni - 1) / 2)).take(grid_colors));
    Ok(CoverScheme::new(
        format!("omega(n={n}, r={r})"),
        SpaceSpec::tower_with_factor(Step::PowerOfTwo, 1),
        sep,
        bound,
        "all of ⋃_i (2^i Z)^i × Z",
        move |p| {
            let t = p.as_tower()?;
            if t.level >= r {
                let (bit, j) = two_color(t.extra[0], ri);
                let mut key = Vec::with_capacity(t.coords.len() + 2);
                key.push(i64::from(t.level));
                key.extend_from_slice(&t.coords);
                key.push(j);
                Ok(Some((if bit == 1 { 2 } else { 3 }, key)))
            } else if t.level > n {
                stair.classify_unchecked(&evaluate_map(&psi, p)?)
            } else {
                let img = evaluate_map(&phi, p)?;
                let v = img.as_lattice()?;
                let mut key = Vec::with_capacity(v.len());
                let c = grid_cell(&v[..n as usize + 1], ri, &mut key);
                Ok(Some((OMEGA_GRID_BASE + c, key)))
            }
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::classify_point;

    /// `Σ_j (x_j/2^r − ⌊x_j/2^r⌋)·2^{rj}` evaluated over exact rationals.
    fn p_by_fractions(x: &[i64], r: i64) -> i64 {
        let m = 1i64 << r;
        let mut num = 0i128;
        for (j, &v) in x.iter().enumerate() {
            let frac_num = i128::from(v) - i128::from(v.div_euclid(m)) * i128::from(m);
            num += frac_num * (1i128 << (r * (j as i64 + 1)));
        }
        assert_eq!(num % i128::from(m), 0);
        (num / i128::from(m)) as i64
    }

    #[test]
    fn p_example_and_fraction_formula() {
        let st = Staircase::new(1, 2, 2, Interval::new(3, 3)).unwrap();
        assert_eq!(st.p(&[2, 4]), 2);
        for a in (-40..40).step_by(2) {
            for b in (-40..40).step_by(2) {
                let p = st.p(&[a, b]);
                assert_eq!(p, p_by_fractions(&[a, b], 2));
                assert!((0..st.total).contains(&p));
            }
        }
    }

    #[test]
    fn interval_endpoints_example() {
        let st = Staircase::new(1, 2, 2, Interval::new(3, 3)).unwrap();
        assert_eq!(st.total, 20);
        let x = [2, 4];
        assert_eq!(st.i_interval(&x, 1), (65, 66));
        assert_eq!(st.j_interval(&x, 1), (66, 125));
        assert_eq!(st.locate(&x, 65), (STAIRCASE_I, 1));
        assert_eq!(st.locate(&x, 66), (STAIRCASE_I, 1));
        assert_eq!(st.locate(&x, 67), (STAIRCASE_J, 1));
        assert_eq!(st.locate(&x, 124), (STAIRCASE_J, 1));
        // 125 closes J_{x,1} and opens I_{x,2}
        assert_eq!(st.locate(&x, 125), (STAIRCASE_I, 2));
    }

    #[test]
    fn requires_r_above_n() {
        assert!(staircase_cover(2, 2, 2, Interval::new(0, 0)).is_err());
        assert!(omega_cover(3, 3).is_err());
        assert!(omega_cover(2, 5).is_err());
    }

    #[test]
    fn runs_agree_with_pointwise_classification() {
        let st = Staircase::new(2, 3, 2, Interval::new(0, 0)).unwrap();
        let mut runs = Vec::new();
        for x in [[0, 0], [4, -8], [12, 20]] {
            let (lo, hi) = (-700, 900);
            st.runs(&x, lo, hi, &mut runs);
            let mut t = lo;
            for run in &runs {
                assert_eq!(run.lo, t);
                for u in run.lo..=run.hi {
                    let (c, k) = st.locate(&x, u);
                    assert_eq!(c, run.color);
                    assert_eq!(2 * k + i64::from(c), run.local);
                }
                t = run.hi + 1;
            }
            assert_eq!(t, hi + 1);
        }
    }

    #[test]
    fn omega_color_count_depends_on_n_only() {
        for n in 3..5 {
            let a = omega_cover(n, n + 1).unwrap().colors();
            let b = omega_cover(n, n + 2).unwrap().colors();
            assert_eq!(a, b);
            assert_eq!(a, 4 + (1 << (n + 1)));
        }
        assert_eq!(omega_cover(3, 4).unwrap().colors(), 20);
    }

    #[test]
    fn omega_regions() {
        let s = omega_cover(3, 5).unwrap();
        let hi = crate::spaces::TowerPoint::with_extra(vec![0; 5], vec![7]).unwrap();
        assert_eq!(classify_point(&s, &hi.into()).unwrap().unwrap().0, 3);
        let hi = crate::spaces::TowerPoint::with_extra(vec![0; 6], vec![12]).unwrap();
        assert_eq!(classify_point(&s, &hi.into()).unwrap().unwrap().0, 2);
        let mid = crate::spaces::TowerPoint::with_extra(vec![16, 0, 0, 32], vec![0]).unwrap();
        assert!(classify_point(&s, &mid.into()).unwrap().unwrap().0 < 2);
        let low = crate::spaces::TowerPoint::with_extra(vec![2], vec![0]).unwrap();
        assert!(classify_point(&s, &low.into()).unwrap().unwrap().0 >= OMEGA_GRID_BASE);
    }
}
