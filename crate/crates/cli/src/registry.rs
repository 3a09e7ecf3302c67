//! Constructions by name.

use anyhow::{anyhow, bail, Context, Result};
use coasdim_core::covers::{
    fiber_product_cover, grid_cover, grid_cover_on, mixed_grid_cover, omega_cover,
    product_square_cover, shift_union_cover, singleton_cover, staircase_cover, CoverScheme,
};
use coasdim_core::spaces::{Interval, SpaceSpec, Step};
use coasdim_core::suite::shifted_intervals;
use serde::de::DeserializeOwned;

use crate::config::Construction;

pub const NAMES: &[(&str, &str)] = &[
    ("grid", "dim, r"),
    ("grid-on", "steps, r"),
    ("singleton", "n (uses the config space)"),
    ("mixed-grid", "m, n, k, R"),
    ("product-square", "k, n"),
    ("staircase", "n, r, dim = r, height = [0, 0]"),
    ("omega", "n, r"),
    ("shift-union", "k, m"),
    ("shifted-intervals", "level"),
    ("fiber-product", "base (a construction), step, n"),
];

struct Params<'a>(&'a Construction);

impl Params<'_> {
    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<T> {
        let v = self
            .0
            .params
            .get(key)
            .ok_or_else(|| anyhow!("construction `{}` needs parameter `{key}`", self.0.name))?;
        serde_json::from_value(v.clone())
            .with_context(|| format!("parameter `{key}` of `{}`", self.0.name))
    }

    fn get_or<T: DeserializeOwned>(&self, key: &str, default: T) -> Result<T> {
        if self.0.params.contains_key(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    fn only(&self, keys: &[&str]) -> Result<()> {
        for k in self.0.params.keys() {
            if !keys.contains(&k.as_str()) {
                bail!("construction `{}` has no parameter `{k}`", self.0.name);
            }
        }
        Ok(())
    }
}

/// Builds the scheme named by `c`. `space` is only read by constructions
/// that work on any space.
pub fn build_scheme(c: &Construction, space: Option<&SpaceSpec>) -> Result<CoverScheme> {
    let p = Params(c);
    let s = match c.name.as_str() {
        "grid" => {
            p.only(&["dim", "r"])?;
            grid_cover(p.get("dim")?, p.get("r")?)?
        }
        "grid-on" => {
            p.only(&["steps", "r"])?;
            grid_cover_on(p.get("steps")?, p.get("r")?)?
        }
        "singleton" => {
            p.only(&["n"])?;
            let space = space.ok_or_else(|| anyhow!("`singleton` needs a space"))?;
            singleton_cover(space, p.get("n")?)?
        }
        "mixed-grid" => {
            p.only(&["m", "n", "k", "R"])?;
            mixed_grid_cover(p.get("m")?, p.get("n")?, p.get("k")?, p.get("R")?)?
        }
        "product-square" => {
            p.only(&["k", "n"])?;
            product_square_cover(p.get("k")?, p.get("n")?)?
        }
        "staircase" => {
            p.only(&["n", "r", "dim", "height"])?;
            let r: i64 = p.get("r")?;
            let dim = p.get_or("dim", usize::try_from(r).unwrap_or(0))?;
            let height: Interval = p.get_or("height", Interval::new(0, 0))?;
            staircase_cover(p.get("n")?, r, dim, height)?
        }
        "omega" => {
            p.only(&["n", "r"])?;
            omega_cover(p.get("n")?, p.get("r")?)?
        }
        "shift-union" => {
            p.only(&["k", "m"])?;
            shift_union_cover(p.get("k")?, p.get("m")?)?
        }
        "shifted-intervals" => {
            p.only(&["level"])?;
            shifted_intervals(p.get("level")?)
        }
        "fiber-product" => {
            p.only(&["base", "step", "n"])?;
            let base: Construction = p.get("base")?;
            let step: Step = p.get("step")?;
            fiber_product_cover(&build_scheme(&base, None)?, step, p.get("n")?)?
        }
        other => {
            let known: Vec<&str> = NAMES.iter().map(|(n, _)| *n).collect();
            bail!("unknown construction `{other}` (known: {})", known.join(", "))
        }
    };
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn c(v: serde_json::Value) -> Construction {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn builds_each_name() {
        let cases = [
            json!({"name": "grid", "params": {"dim": 2, "r": 3}}),
            json!({"name": "grid-on", "params": {"steps": [1, 2], "r": 3}}),
            json!({"name": "mixed-grid", "params": {"m": 1, "n": 1, "k": 3, "R": 5}}),
            json!({"name": "product-square", "params": {"k": 1, "n": 2}}),
            json!({"name": "staircase", "params": {"n": 1, "r": 2}}),
            json!({"name": "omega", "params": {"n": 3, "r": 4}}),
            json!({"name": "shift-union", "params": {"k": 1, "m": 2}}),
            json!({"name": "shifted-intervals", "params": {"level": 4}}),
            json!({"name": "fiber-product", "params": {
                "base": {"name": "grid", "params": {"dim": 1, "r": 2}},
                "step": "power-of-two", "n": 2}}),
        ];
        assert_eq!(cases.len() + 1, NAMES.len());
        for v in cases {
            build_scheme(&c(v.clone()), None).unwrap_or_else(|e| panic!("{v}: {e:#}"));
        }
        let sp = SpaceSpec::tower(Step::Identity);
        build_scheme(&c(json!({"name": "singleton", "params": {"n": 2}})), Some(&sp)).unwrap();
    }

    #[test]
    fn mixed_grid_color_count() {
        let s = build_scheme(&c(json!({"name": "mixed-grid", "params": {"m": 2, "n": 1, "k": 4, "R": 6}})), None)
            .unwrap();
        assert_eq!(s.colors(), 2 * 4 + 1);
    }

    #[test]
    fn rejects_bad_names_and_params() {
        assert!(build_scheme(&c(json!({"name": "nope"})), None).is_err());
        assert!(build_scheme(&c(json!({"name": "grid", "params": {"dim": 2}})), None).is_err());
        assert!(build_scheme(&c(json!({"name": "grid", "params": {"dim": 2, "r": 3, "x": 1}})), None).is_err());
        assert!(build_scheme(&c(json!({"name": "grid", "params": {"dim": "two", "r": 3}})), None).is_err());
        assert!(build_scheme(&c(json!({"name": "singleton", "params": {"n": 2}})), None).is_err());
    }
}
