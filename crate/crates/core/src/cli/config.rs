//! Flat `key = value` config files and grid specs.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::param::CircleParameter;
use crate::spectra::linspace;

/// Every key a config file may set; each mirrors a long flag.
pub const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "at",
    "buffer",
    "c",
    "count",
    "cylinder",
    "depth",
    "emit-plotdata",
    "format",
    "grid",
    "grid-depth",
    "kind",
    "length",
    "m",
    "markov-check",
    "max",
    "order",
    "output",
    "pipeline",
    "quick",
    "r",
    "restrict",
    "seed",
    "t",
    "theta",
    "workers",
];

/// Largest number of points a grid spec may expand to.
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
        text.parse()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// The flag value if given, else the parsed config value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::InvalidArgument(format!("config key {key} = {v:?}: {e}")))
            })
            .transpose()
    }

    /// A switch is on if the flag is given or the config sets it to true.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

impl FromStr for ConfigFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("config line {}: expected key = value", i + 1))
            })?;
            let key = key.trim().replace('_', "-");
            let value = value.trim().trim_matches('"').to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "config line {}: unknown key {key:?}",
                    i + 1
                )));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "config line {}: duplicate key {key:?}",
                    i + 1
                )));
            }
        }
        Ok(ConfigFile { entries })
    }
}

/// `"a:b:n"` (n evenly spaced points), `"x,y,z"`, or a single value. The
/// result is sorted and free of duplicates.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::InvalidArgument(format!("grid {spec:?}: {why}"));
    let num = |s: &str| -> Result<f64> {
        let x: f64 = s.trim().parse().map_err(|_| bad("not a number"))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(bad("non-finite value"))
        }
    };
    let mut xs = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(bad("expected a:b:n"));
        };
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| bad("point count is not an integer"))?;
        if n == 0 || n > MAX_GRID_POINTS {
            return Err(bad("point count outside 1..=100000"));
        }
        let (a, b) = (num(a)?, num(b)?);
        if n == 1 {
            vec![a]
        } else {
            linspace(a, b, n)
        }
    } else {
        spec.split(',').map(num).collect::<Result<Vec<f64>>>()?
    };
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    Ok(xs)
}

/// A single parameter, or a grid of them. List entries keep their exact
/// form (`1/3`, `0.3`); `a:b:n` ranges are floating point.
pub fn parse_parameters(spec: &str) -> Result<Vec<CircleParameter>> {
    if spec.contains(':') {
        parse_grid(spec)?
            .into_iter()
            .map(CircleParameter::from_real)
            .collect()
    } else {
        spec.split(',').map(str::parse).collect()
    }
}
