//! Finite-depth topological pressure of `t psi` with certified brackets, its
//! closed form at `c = 0`, the restricted pressure on the subshift avoiding
//! the forbidden words, and pressure curves.

use std::f64::consts::LN_2;
use std::fmt;

use rayon::prelude::*;

use crate::bracket::{log_sum_exp, pad_down, pad_up, Bracket};
use crate::combinatorics::{admissible_mask, SingularityCoding};
use crate::error::{Error, Result};
use crate::param::CircleParameter;
use crate::potential::{grid_birkhoff, LevelTables, MAX_TABLE_LEVEL};
use crate::spectra::{Provenance, SpectrumCurve};

/// Grid depth used when the caller does not choose one.
pub const DEFAULT_GRID_DEPTH: u32 = 3;

/// Which extremum of the Birkhoff sum enters the partition sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PressureMode {
    /// `sup` over each cylinder, used for `t >= 0`.
    SupBased,
    /// `inf` over each cylinder, used for `t < 0`.
    InfBased,
}

impl PressureMode {
    pub fn for_t(t: f64) -> Self {
        if t >= 0.0 {
            PressureMode::SupBased
        } else {
            PressureMode::InfBased
        }
    }
}

impl fmt::Display for PressureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PressureMode::SupBased => "sup",
            PressureMode::InfBased => "inf",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PressureEstimate {
    pub t: f64,
    pub n: u32,
    pub value: Bracket,
    pub mode: PressureMode,
    pub restricted_m: Option<u32>,
}

/// `max{(1 - 2t) log 2, 0}`, the pressure at `c = 0`.
pub fn pressure_c0(t: f64) -> f64 {
    ((1.0 - 2.0 * t) * LN_2).max(0.0)
}

/// Per-word enclosures of the extrema of `psi_n`, one entry per word taking
/// part in the partition sum.
pub(crate) struct PartitionData {
    n: u32,
    restricted_m: Option<u32>,
    sum_of_sups: Vec<f64>,
    sum_of_infs: Vec<f64>,
    grid_max: Vec<f64>,
    grid_min: Vec<f64>,
}

fn check_depths(n: u32, grid_depth: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("depth must be >= 1".into()));
    }
    if grid_depth == 0 {
        return Err(Error::InvalidArgument("grid depth must be >= 1".into()));
    }
    if n + grid_depth > MAX_TABLE_LEVEL {
        return Err(Error::ResourceLimit(format!(
            "depth {n} plus grid depth {grid_depth} exceeds {MAX_TABLE_LEVEL}"
        )));
    }
    Ok(())
}

impl PartitionData {
    pub fn unrestricted(param: &CircleParameter, n: u32, grid_depth: u32) -> Result<Self> {
        check_depths(n, grid_depth)?;
        let (sups, infs) = LevelTables::new(param, n, None).word_sums();
        let grid = grid_birkhoff(param, n, grid_depth);
        let modulus = grid.len();
        let (grid_max, grid_min): (Vec<f64>, Vec<f64>) = (0..1usize << n)
            .into_par_iter()
            .map(|w| {
                let base = w << grid_depth;
                (0..=1usize << grid_depth)
                    .map(|i| grid[(base + i) % modulus])
                    .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), v| {
                        (hi.max(v), lo.min(v))
                    })
            })
            .unzip();
        Ok(PartitionData {
            n,
            restricted_m: None,
            sum_of_sups: sups.into_iter().map(|s| pad_up(s, n)).collect(),
            sum_of_infs: infs.into_iter().map(|s| pad_down(s, n)).collect(),
            grid_max,
            grid_min,
        })
    }

    /// Words avoiding the forbidden `(m+1)`-words, with extrema over the part
    /// of each cylinder outside the forbidden zone. Grid values come from the
    /// midpoints of admissible refinements and are projected into the
    /// closed-form window; words without such a midpoint use the window alone.
    pub fn restricted(param: &CircleParameter, n: u32, m: u32, grid_depth: u32) -> Result<Self> {
        check_depths(n, grid_depth + 1)?;
        if m == 0 {
            return Err(Error::InvalidArgument("forbidden depth must be >= 1".into()));
        }
        let coding = SingularityCoding::new(param, (m + 1) as usize)?;
        let forbidden = coding.forbidden_words(m)?;
        let zone = coding.forbidden_zone(m)?;
        let (sups, infs) = LevelTables::new(param, n, Some(&zone)).word_sums();
        let words = admissible_mask(n, m, &forbidden);
        let fine = admissible_mask(n + grid_depth, m, &forbidden);
        let grid = grid_birkhoff(param, n, grid_depth + 1);

        let rows: Vec<Option<(f64, f64, f64, f64)>> = (0..1usize << n)
            .into_par_iter()
            .map(|w| {
                // sup = -inf marks a cylinder lying inside the zone
                if !words[w] || sups[w] == f64::NEG_INFINITY {
                    return None;
                }
                let hi = pad_up(sups[w], n);
                let lo = pad_down(infs[w], n);
                let base = w << grid_depth;
                let mut gmax = f64::NEG_INFINITY;
                let mut gmin = f64::INFINITY;
                for i in 0..1usize << grid_depth {
                    if fine[base + i] {
                        let v = grid[2 * (base + i) + 1].clamp(lo, hi);
                        gmax = gmax.max(v);
                        gmin = gmin.min(v);
                    }
                }
                if gmax == f64::NEG_INFINITY {
                    gmax = lo;
                    gmin = hi;
                }
                Some((hi, lo, gmax, gmin))
            })
            .collect();
        let rows: Vec<_> = rows.into_iter().flatten().collect();
        if rows.is_empty() {
            return Err(Error::Invariant(format!(
                "no admissible words of length {n} at forbidden depth {m}"
            )));
        }
        Ok(PartitionData {
            n,
            restricted_m: Some(m),
            sum_of_sups: rows.iter().map(|r| r.0).collect(),
            sum_of_infs: rows.iter().map(|r| r.1).collect(),
            grid_max: rows.iter().map(|r| r.2).collect(),
            grid_min: rows.iter().map(|r| r.3).collect(),
        })
    }

    pub fn word_count(&self) -> usize {
        self.sum_of_sups.len()
    }

    /// `(1/n) log sum exp(t E_w)` as a bracket.
    pub fn estimate(&self, t: f64) -> Result<PressureEstimate> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("t must be finite, got {t}")));
        }
        let mode = PressureMode::for_t(t);
        let n = self.n as f64;
        let value = if t == 0.0 {
            let count = self.word_count() as f64;
            if self.restricted_m.is_none() {
                Bracket::point(LN_2)
            } else {
                Bracket::point(count.ln() / n).outward()
            }
        } else {
            // extrema giving the lower and the upper partition sum
            let (small, large): (&[f64], &[f64]) = match mode {
                PressureMode::SupBased => (&self.grid_max, &self.sum_of_sups),
                PressureMode::InfBased => (&self.grid_min, &self.sum_of_infs),
            };
            let scaled = |xs: &[f64]| -> Vec<f64> { xs.par_iter().map(|&x| scale_exponent(t, x)).collect() };
            let lo = log_sum_exp(&scaled(small)) / n;
            let hi = log_sum_exp(&scaled(large)) / n;
            let pad = |x: f64| {
                if x.is_finite() {
                    1e-14 * (1.0 + x.abs())
                } else {
                    0.0
                }
            };
            Bracket::new(lo - pad(lo), hi + pad(hi))?
        };
        Ok(PressureEstimate {
            t,
            n: self.n,
            value,
            mode,
            restricted_m: self.restricted_m,
        })
    }
}

/// `t x` with `0 * (-inf) = 0` never arising since `t != 0`.
fn scale_exponent(t: f64, x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        if t > 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        t * x
    }
}

/// Sup-based (`t >= 0`) or inf-based (`t < 0`) partition pressure at depth
/// `n`, over all `2^n` words. Unrestricted inf-based sums with a singular
/// cylinder have `hi = +inf`.
pub fn partition_pressure(
    param: &CircleParameter,
    t: f64,
    n: u32,
    grid_depth: u32,
) -> Result<PressureEstimate> {
    PartitionData::unrestricted(param, n, grid_depth)?.estimate(t)
}

/// Partition pressure over the words of length `n` avoiding the forbidden
/// `(m+1)`-words of the singularity coding.
pub fn restricted_partition_pressure(
    param: &CircleParameter,
    t: f64,
    n: u32,
    m: u32,
) -> Result<PressureEstimate> {
    PartitionData::restricted(param, n, m, DEFAULT_GRID_DEPTH)?.estimate(t)
}

/// Partition pressures on a sorted `t` grid, sharing the per-word tables.
pub fn pressure_curve(param: &CircleParameter, t_grid: &[f64], n: u32) -> Result<SpectrumCurve> {
    pressure_curve_with(param, t_grid, n, DEFAULT_GRID_DEPTH, None)
}

/// [`pressure_curve`] with an explicit grid depth and optional restriction.
pub fn pressure_curve_with(
    param: &CircleParameter,
    t_grid: &[f64],
    n: u32,
    grid_depth: u32,
    restrict: Option<u32>,
) -> Result<SpectrumCurve> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty t grid".into()));
    }
    let data = match restrict {
        None => PartitionData::unrestricted(param, n, grid_depth)?,
        Some(m) => PartitionData::restricted(param, n, m, grid_depth)?,
    };
    let values = t_grid
        .iter()
        .map(|&t| data.estimate(t).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    let mut curve = SpectrumCurve::new(
        Some(param.clone()),
        t_grid.to_vec(),
        values,
        Provenance::PressurePartition,
    )?;
    for i in curve.convexity_violations() {
        let note = format!(
            "convexity violated beyond brackets at t = {}",
            curve.arguments()[i]
        );
        log::warn!("{note}");
        curve.push_diagnostic(note);
    }
    Ok(curve)
}
