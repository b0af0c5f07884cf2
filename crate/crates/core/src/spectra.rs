//! Curve-level quantities: the L^q-spectrum, Legendre transforms, Birkhoff
//! and dimension spectra, Fourier dimension, `q_r` and the quantization and
//! spectral dimensions.

use std::f64::consts::LN_2;
use std::fmt;

use crate::autocorr::{correlation_exponent, theta_growth};
use crate::bracket::{pairwise_sum, Bracket};
use crate::error::{Error, Result};
use crate::measure::{CylinderMeasureTable, DEFAULT_BUFFER};
use crate::param::CircleParameter;
use crate::pressure::{partition_pressure, pressure_curve_with, DEFAULT_GRID_DEPTH};

/// Which computation produced a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    PressurePartition,
    MeasurePartition,
    ClosedForm,
    Uniform,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::PressurePartition => "pressure-partition",
            Provenance::MeasurePartition => "measure-partition",
            Provenance::ClosedForm => "closed-form",
            Provenance::Uniform => "uniform",
        })
    }
}

/// Bracketed values on a strictly increasing grid of `t` or `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumCurve {
    parameter: Option<CircleParameter>,
    arguments: Vec<f64>,
    values: Vec<Bracket>,
    provenance: Provenance,
    diagnostics: Vec<String>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("grid values must be finite".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    Ok(())
}

impl SpectrumCurve {
    pub fn new(
        parameter: Option<CircleParameter>,
        arguments: Vec<f64>,
        values: Vec<Bracket>,
        provenance: Provenance,
    ) -> Result<Self> {
        check_grid(&arguments)?;
        if arguments.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} arguments but {} values",
                arguments.len(),
                values.len()
            )));
        }
        Ok(SpectrumCurve {
            parameter,
            arguments,
            values,
            provenance,
            diagnostics: Vec::new(),
        })
    }

    pub fn parameter(&self) -> Option<&CircleParameter> {
        self.parameter.as_ref()
    }

    pub fn arguments(&self) -> &[f64] {
        &self.arguments
    }

    pub fn values(&self) -> &[Bracket] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn push_diagnostic(&mut self, note: String) {
        self.diagnostics.push(note);
    }

    /// Value at `x` in the grid, if present.
    pub fn at(&self, x: f64) -> Option<Bracket> {
        self.arguments
            .iter()
            .position(|&a| a == x)
            .map(|i| self.values[i])
    }

    /// Interior indices `i` where even the lowest value at `i` lies above the
    /// chord through the highest values at `i - 1` and `i + 1`.
    pub fn convexity_violations(&self) -> Vec<usize> {
        let (a, v) = (&self.arguments, &self.values);
        (1..a.len().saturating_sub(1))
            .filter(|&i| {
                let lambda = (a[i + 1] - a[i]) / (a[i + 1] - a[i - 1]);
                let chord = lambda * v[i - 1].hi() + (1.0 - lambda) * v[i + 1].hi();
                chord.is_finite() && v[i].lo() > chord + 1e-12 * (1.0 + chord.abs())
            })
            .collect()
    }

    /// Multiplies every value by `k > 0`.
    fn scaled(mut self, k: f64) -> Self {
        self.values = self.values.iter().map(|b| b.scale(k).outward()).collect();
        self
    }
}

/// Where the L^q sums come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// Cylinder-measure brackets, depth at most 12.
    MeasurePartition,
    /// Partition pressure divided by `log 2`, depth at most 20.
    PressurePartition,
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pipeline::MeasurePartition => "measure",
            Pipeline::PressurePartition => "pressure",
        })
    }
}

/// `log2 sum 2^{x_i}` in a fixed pairwise order.
fn log2_sum_exp2(xs: &[f64]) -> f64 {
    let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    let shifted: Vec<f64> = xs.iter().map(|x| (x - top).exp2()).collect();
    top + pairwise_sum(&shifted).log2()
}

/// `beta(q) = (1/n) log2 sum_w nu(<w>)^q` from bracketed cylinder masses.
pub fn lq_from_masses(
    masses: &[Bracket],
    n: u32,
    q_grid: &[f64],
    parameter: Option<CircleParameter>,
    provenance: Provenance,
) -> Result<SpectrumCurve> {
    check_grid(q_grid)?;
    if n == 0 {
        return Err(Error::InvalidArgument("depth must be >= 1".into()));
    }
    if masses.iter().any(|m| m.lo() < 0.0) {
        return Err(Error::InvalidArgument("negative mass".into()));
    }
    let support: Vec<(f64, f64)> = masses
        .iter()
        .filter(|m| m.hi() > 0.0)
        .map(|m| (m.lo().log2(), m.hi().log2()))
        .collect();
    let depth = n as f64;
    let values = q_grid
        .iter()
        .map(|&q| {
            if q < 0.0 && support.iter().any(|&(lo, _)| lo == f64::NEG_INFINITY) {
                return Err(Error::InvalidArgument(format!(
                    "q = {q} < 0 with a cylinder mass bracket touching 0"
                )));
            }
            let (small, large): (Vec<f64>, Vec<f64>) = support
                .iter()
                .map(|&(lo, hi)| {
                    let (a, b) = (scale_log(q, lo), scale_log(q, hi));
                    (a.min(b), a.max(b))
                })
                .unzip();
            Ok(Bracket::spanning(log2_sum_exp2(&small) / depth, log2_sum_exp2(&large) / depth).outward())
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrumCurve::new(parameter, q_grid.to_vec(), values, provenance)
}

/// `q log2 m` with `0 * log2 0 = 0`.
fn scale_log(q: f64, log_mass: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else {
        q * log_mass
    }
}

/// The L^q-spectrum of the uniform measure on `[0, 1)`, `beta(q) = 1 - q`,
/// computed through the same mass pipeline.
pub fn uniform_lq(q_grid: &[f64], n: u32) -> Result<SpectrumCurve> {
    if n > 24 {
        return Err(Error::ResourceLimit(format!("uniform depth {n} > 24")));
    }
    let mass = Bracket::point((-(n as f64)).exp2());
    lq_from_masses(&vec![mass; 1 << n], n, q_grid, None, Provenance::Uniform)
}

/// The L^q-spectrum at depth `n`. At `c = 0` the measure is a point mass and
/// `beta = 0` for `q >= 0` is returned in closed form.
pub fn lq_spectrum(
    param: &CircleParameter,
    q_grid: &[f64],
    n: u32,
    pipeline: Pipeline,
) -> Result<SpectrumCurve> {
    check_grid(q_grid)?;
    if param.is_zero() {
        if q_grid[0] < 0.0 {
            return Err(Error::InvalidArgument("c = 0: beta is infinite for q < 0".into()));
        }
        let values = vec![Bracket::point(0.0); q_grid.len()];
        return SpectrumCurve::new(
            Some(param.clone()),
            q_grid.to_vec(),
            values,
            Provenance::ClosedForm,
        );
    }
    match pipeline {
        Pipeline::MeasurePartition => {
            if n > 12 {
                return Err(Error::ResourceLimit(format!("measure pipeline depth {n} > 12")));
            }
            let table = CylinderMeasureTable::new(param, n, DEFAULT_BUFFER)?;
            let masses: Vec<Bracket> = table.level(n).iter().map(|m| m.estimate).collect();
            lq_from_masses(
                &masses,
                n,
                q_grid,
                Some(param.clone()),
                Provenance::MeasurePartition,
            )
        }
        Pipeline::PressurePartition => {
            if n > 20 {
                return Err(Error::ResourceLimit(format!("pressure pipeline depth {n} > 20")));
            }
            Ok(pressure_curve_with(param, q_grid, n, DEFAULT_GRID_DEPTH, None)?.scaled(1.0 / LN_2))
        }
    }
}

/// Convex conjugate `p*(alpha) = sup_q (q alpha - p(q))` on a grid of
/// `alpha`, with the domain `[lower, upper]` estimated from end slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct LegendreCurve {
    pub alphas: Vec<f64>,
    pub values: Vec<Bracket>,
    pub domain: (f64, f64),
    /// Points near an excluded endpoint.
    pub flagged: Vec<bool>,
    pub diagnostics: Vec<String>,
}

/// Slope of the midpoint curve at each end of the finite part of the grid,
/// together with the spread of the envelope slopes there.
fn end_slopes(curve: &SpectrumCurve) -> Result<((f64, f64), (f64, f64))> {
    let pts: Vec<(f64, Bracket)> = curve
        .arguments()
        .iter()
        .copied()
        .zip(curve.values().iter().copied())
        .filter(|(_, v)| v.is_finite())
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument("need two finite curve points".into()));
    }
    let slope = |a: &(f64, Bracket), b: &(f64, Bracket)| {
        let dx = b.0 - a.0;
        let mid = (b.1.mid() - a.1.mid()) / dx;
        let spread = (b.1.width() + a.1.width()) / dx;
        (mid, spread)
    };
    let k = pts.len();
    Ok((slope(&pts[0], &pts[1]), slope(&pts[k - 2], &pts[k - 1])))
}

pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// [`legendre_on`] over 41 points spanning the estimated domain.
pub fn legendre(curve: &SpectrumCurve) -> Result<LegendreCurve> {
    let ((lower, _), (upper, _)) = end_slopes(curve)?;
    legendre_on(curve, &linspace(lower, upper, 41))
}

/// Conjugates the two envelopes separately: the upper values give the
/// lower conjugate and vice versa. `+inf` outside the estimated domain.
pub fn legendre_on(curve: &SpectrumCurve, alphas: &[f64]) -> Result<LegendreCurve> {
    if !curve.convexity_violations().is_empty() {
        return Err(Error::InvalidArgument(format!(
            "curve is not convex within its brackets at {:?}",
            curve
                .convexity_violations()
                .iter()
                .map(|&i| curve.arguments()[i])
                .collect::<Vec<_>>()
        )));
    }
    let ((lower, _), (upper, _)) = end_slopes(curve)?;
    let tol = 1e-12 * (1.0 + lower.abs().max(upper.abs()));
    let conj = |alpha: f64, pick: &dyn Fn(&Bracket) -> f64| {
        curve
            .arguments()
            .iter()
            .zip(curve.values())
            .map(|(&q, v)| (q, pick(v)))
            .filter(|(_, p)| p.is_finite())
            .map(|(q, p)| q * alpha - p)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let values = alphas
        .iter()
        .map(|&alpha| {
            if alpha < lower - tol || alpha > upper + tol {
                Bracket::point(f64::INFINITY)
            } else {
                Bracket::spanning(
                    conj(alpha, &|v: &Bracket| v.hi()),
                    conj(alpha, &|v: &Bracket| v.lo()),
                )
                .outward()
            }
        })
        .collect();
    Ok(LegendreCurve {
        alphas: alphas.to_vec(),
        values,
        domain: (lower, upper),
        flagged: vec![false; alphas.len()],
        diagnostics: Vec::new(),
    })
}

/// Pressure grid used by the spectra when none is given.
pub fn default_t_grid() -> Vec<f64> {
    (0..=16).map(|i| i as f64 * 0.25).collect()
}

fn reject_zero(param: &CircleParameter, what: &str) -> Result<()> {
    if param.is_zero() {
        return Err(Error::InvalidParameter(format!(
            "{what} is not defined through the pressure at c = 0, where the measure is a point mass"
        )));
    }
    Ok(())
}

/// `b(alpha) = -p*(alpha) / log 2`, clipped to `[0, 1]` on the domain and 0
/// outside, from the sup-based pressure on `t_grid` at depth `n`.
pub fn birkhoff_spectrum(
    param: &CircleParameter,
    alpha_grid: Option<&[f64]>,
    t_grid: &[f64],
    n: u32,
) -> Result<LegendreCurve> {
    reject_zero(param, "the Birkhoff spectrum")?;
    let curve = pressure_curve_with(param, t_grid, n, DEFAULT_GRID_DEPTH, None)?;
    let mut conj = match alpha_grid {
        Some(a) => legendre_on(&curve, a)?,
        None => legendre(&curve)?,
    };
    let mut clipped = 0.0f64;
    conj.values = conj
        .values
        .iter()
        .map(|v| {
            if v.lo() == f64::INFINITY {
                return Bracket::point(0.0);
            }
            let raw = Bracket::spanning(-v.hi() / LN_2, -v.lo() / LN_2);
            let lo = raw.lo().clamp(0.0, 1.0);
            let hi = raw.hi().clamp(0.0, 1.0);
            clipped = clipped.max((raw.lo() - lo).abs()).max((raw.hi() - hi).abs());
            Bracket::spanning(lo, hi)
        })
        .collect();
    if clipped > 0.0 {
        conj.diagnostics
            .push(format!("clipped into [0, 1] by up to {clipped:.3e}"));
    }
    Ok(conj)
}

/// `f(alpha) = b(-alpha log 2)`. Points within the slope uncertainty of
/// `-lower / log 2` are flagged.
pub fn dimension_spectrum(
    param: &CircleParameter,
    alpha_grid: Option<&[f64]>,
    t_grid: &[f64],
    n: u32,
) -> Result<LegendreCurve> {
    reject_zero(param, "the dimension spectrum")?;
    let curve = pressure_curve_with(param, t_grid, n, DEFAULT_GRID_DEPTH, None)?;
    let ((lower, spread), (upper, _)) = end_slopes(&curve)?;
    let alphas = match alpha_grid {
        Some(a) => a.to_vec(),
        None => linspace(-upper / LN_2, -lower / LN_2, 41),
    };
    let mapped: Vec<f64> = alphas.iter().rev().map(|a| -a * LN_2).collect();
    let b = birkhoff_spectrum(param, Some(&mapped), t_grid, n)?;
    let excluded = -lower / LN_2;
    let radius = spread / LN_2 + 1e-9;
    Ok(LegendreCurve {
        flagged: alphas.iter().map(|a| (a - excluded).abs() <= radius).collect(),
        values: b.values.into_iter().rev().collect(),
        alphas,
        domain: (-upper / LN_2, -lower / LN_2),
        diagnostics: b.diagnostics,
    })
}

/// The three estimates of the Fourier dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierRoutes {
    /// `1 - D_2` with `D_2 = log2 lambda_1`.
    pub eigen_route: Bracket,
    /// `-P_n(2) / log 2`, the negated L^q-spectrum at 2.
    pub pressure_route: Bracket,
    /// `1 -` growth slope of `log2 Theta_{2^k}`.
    pub theta_route: Bracket,
}

impl FourierRoutes {
    /// Largest distance between two of the three brackets.
    pub fn largest_gap(&self) -> f64 {
        let r = [self.eigen_route, self.pressure_route, self.theta_route];
        (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| r[i].gap(&r[j]))
            .fold(0.0, f64::max)
    }

    /// Every pair of brackets lies within `slack` of each other.
    pub fn pairwise_agree(&self, slack: f64) -> bool {
        self.largest_gap() <= slack
    }
}

/// Depth of the pressure route by default.
pub const FOURIER_PRESSURE_DEPTH: u32 = 18;
/// Largest `k` of `Theta_{2^k}` by default.
pub const FOURIER_THETA_KMAX: u32 = 20;

pub fn fourier_dimension(param: &CircleParameter) -> Result<FourierRoutes> {
    fourier_dimension_with(param, FOURIER_PRESSURE_DEPTH, FOURIER_THETA_KMAX)
}

pub fn fourier_dimension_with(param: &CircleParameter, depth: u32, kmax: u32) -> Result<FourierRoutes> {
    let d2 = correlation_exponent(param)?;
    let eigen_route = (Bracket::point(1.0) - d2).outward();
    let p = partition_pressure(param, 2.0, depth, DEFAULT_GRID_DEPTH)?.value;
    let pressure_route = p.scale(-1.0 / LN_2).outward();
    let theta = theta_growth(param, kmax)?;
    let theta_route = Bracket::spanning(1.0 - theta.slope, 1.0 - theta.local_slope);
    Ok(FourierRoutes {
        eigen_route,
        pressure_route,
        theta_route,
    })
}

/// First crossing of `f(q) - r q` from `>= 0` to `< 0` over `q >= 0` on the
/// piecewise linear interpolation of one envelope.
fn crossing(args: &[f64], f: &[f64], r: f64) -> Option<f64> {
    let g: Vec<(f64, f64)> = args
        .iter()
        .zip(f)
        .filter(|(&q, _)| q >= 0.0)
        .map(|(&q, &v)| (q, v - r * q))
        .collect();
    if g.first()?.1 < 0.0 {
        return None;
    }
    g.windows(2).find_map(|w| {
        let ((q0, g0), (q1, g1)) = (w[0], w[1]);
        if !(g0 >= 0.0 && g1 < 0.0) {
            return None;
        }
        if g0 == f64::INFINITY {
            return Some(q1);
        }
        Some(q0 + g0 / (g0 - g1) * (q1 - q0))
    })
}

/// `q_r = inf{q > 0 : beta(q) < r q}` bracketed by the crossings of the
/// lower and upper envelopes.
pub fn q_r(curve: &SpectrumCurve, r: f64) -> Result<Bracket> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("r must be >= 0, got {r}")));
    }
    let lo: Vec<f64> = curve.values().iter().map(|b| b.lo()).collect();
    let hi: Vec<f64> = curve.values().iter().map(|b| b.hi()).collect();
    let args = curve.arguments();
    let extend = || {
        Error::ExtendGrid(format!(
            "beta(q) - {r} q does not change sign on the positive part of [{}, {}]",
            args[0],
            args[args.len() - 1]
        ))
    };
    let a = crossing(args, &lo, r).ok_or_else(extend)?;
    let b = crossing(args, &hi, r).ok_or_else(extend)?;
    Ok(Bracket::spanning(a, b).outward())
}

/// `D_r = r q_r / (1 - q_r)`; 0 at `c = 0`.
pub fn quantization_dimension(curve: &SpectrumCurve, r: f64) -> Result<Bracket> {
    if curve.parameter().is_some_and(|p| p.is_zero()) {
        return Ok(Bracket::point(0.0));
    }
    let q = q_r(curve, r)?;
    if q.hi() >= 1.0 {
        return Err(Error::Undefined(format!("q_r bracket {q} reaches 1")));
    }
    let d = |x: f64| r * x / (1.0 - x);
    Ok(Bracket::spanning(d(q.lo()), d(q.hi())).outward())
}

/// The spectral dimension `q_1`.
pub fn spectral_dimension(curve: &SpectrumCurve) -> Result<Bracket> {
    if let Some(p) = curve.parameter() {
        reject_zero(p, "the spectral dimension")?;
    }
    q_r(curve, 1.0)
}
