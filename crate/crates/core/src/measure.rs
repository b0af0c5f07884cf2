//! The Riesz product `mu_c`, weak limit of the densities
//! `h_N(x) = prod_{k<N} (1 + cos(2 pi (2^k x - c)))`: Fourier coefficients of
//! the partial products, and cylinder masses with Gibbs certificates.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bracket::{pad_down, pad_up, Bracket, ExtReal};
use crate::dyadic::DyadicWord;
use crate::error::{Error, Result};
use crate::param::{CircleParameter, TorusPoint};
use crate::potential::{term_extrema, LevelTables};

/// Largest partial-product order.
pub const MAX_ORDER: u32 = 22;
/// Buffer orders beyond the word length used by default.
pub const DEFAULT_BUFFER: u32 = 8;
/// Deepest word length for [`CylinderMeasureTable`].
pub const MAX_TABLE_DEPTH: u32 = 16;

const GAUSS_NODES: usize = 12;

/// Order-`N` partial product. Frequencies lie in `(-2^N, 2^N)`; only the
/// nonnegative ones are stored since `coeff(-m) = conj coeff(m)`.
#[derive(Clone, Debug)]
pub struct PartialProduct {
    parameter: CircleParameter,
    order: u32,
    coefficients: Vec<Complex64>,
}

pub fn partial_product(param: &CircleParameter, order: u32) -> Result<PartialProduct> {
    if order > MAX_ORDER {
        return Err(Error::ResourceLimit(format!("order {order} > {MAX_ORDER}")));
    }
    let half_conj = param.phase().conj() / 2.0;
    let mut coefficients = vec![Complex64::new(1.0, 0.0)];
    for level in 0..order {
        let shift = 1usize << level;
        let prev = coefficients;
        // coeff(m) + (conj phase / 2) coeff(m - 2^level); the (phase / 2)
        // coeff(m + 2^level) term vanishes for m >= 0
        coefficients = (0..2 * shift)
            .map(|m| {
                let own = prev.get(m).copied().unwrap_or_default();
                let lower = if m >= shift {
                    prev[m - shift]
                } else {
                    prev.get(shift - m).map_or(Complex64::default(), |z| z.conj())
                };
                own + half_conj * lower
            })
            .collect();
    }
    Ok(PartialProduct {
        parameter: param.clone(),
        order,
        coefficients,
    })
}

/// `frac(m x)` accurate to a few ulps of 1, using the exact product error.
fn frac_product(m: f64, x: f64) -> f64 {
    let p = m * x;
    let err = m.mul_add(x, -p);
    let f = (p - p.floor()) + err;
    f.rem_euclid(1.0)
}

fn unit(turns: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * turns).sin_cos();
    Complex64::new(c, s)
}

/// `1 + cos(2 pi (y - c)) = 2 sin^2(pi rho(y, c + 1/2))` for `y` in `[0, 1)`.
fn factor(singularity: f64, y: f64) -> f64 {
    let rho = crate::param::torus_dist(y, singularity);
    let s = (PI * rho).sin();
    2.0 * s * s
}

impl PartialProduct {
    pub fn parameter(&self) -> &CircleParameter {
        &self.parameter
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients at `m = 0, 1, ..., 2^N - 1`.
    pub fn nonnegative_coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient of `e^{2 pi i m x}`.
    pub fn coefficient(&self, m: i64) -> Complex64 {
        match self.coefficients.get(m.unsigned_abs() as usize) {
            None => Complex64::default(),
            Some(&z) if m < 0 => z.conj(),
            Some(&z) => z,
        }
    }

    /// The density as the product of its factors.
    pub fn density_product(&self, x: f64) -> f64 {
        let singularity = self.parameter.singularity();
        let mut y = x.rem_euclid(1.0);
        let mut value = 1.0;
        for _ in 0..self.order {
            value *= factor(singularity, y);
            y = (2.0 * y).rem_euclid(1.0);
        }
        value
    }

    /// The density summed from its Fourier coefficients.
    pub fn density_fourier(&self, x: f64) -> f64 {
        const SPLIT: usize = 11;
        let x = x.rem_euclid(1.0);
        let low: Vec<Complex64> = (0..1usize << SPLIT)
            .map(|b| unit(frac_product(b as f64, x)))
            .collect();
        let blocks = self.coefficients.len().div_ceil(1 << SPLIT);
        let total: f64 = (0..blocks)
            .map(|a| {
                let high = unit(frac_product((a << SPLIT) as f64, x));
                let start = a << SPLIT;
                let end = (start + (1 << SPLIT)).min(self.coefficients.len());
                let partial: Complex64 = (start..end).map(|m| self.coefficients[m] * low[m - start]).sum();
                (high * partial).re
            })
            .sum();
        // the m = 0 term was counted once, the others stand for the pair +-m
        2.0 * total - self.coefficients[0].re
    }

    /// `int_a^b h_N` over the cylinder of `w`, integrating the Fourier form
    /// term by term.
    pub fn cylinder_integral_fourier(&self, w: &DyadicWord) -> Result<f64> {
        let (a, n) = w.left();
        if n > 62 {
            return Err(Error::ResourceLimit(format!("word length {n} too large")));
        }
        let full = 1u128 << n;
        let width = 1.0 / full as f64;
        let turns = |m: usize, k: u64| ((m as u128 * k as u128) % full) as f64 / full as f64;
        let mut total = 0.0;
        for (m, &coef) in self.coefficients.iter().enumerate().skip(1) {
            let diff = unit(turns(m, a + 1)) - unit(turns(m, a));
            let term = coef * diff / Complex64::new(0.0, 2.0 * PI * m as f64);
            total += 2.0 * term.re;
        }
        Ok(self.coefficients[0].re * width + total)
    }
}

/// Density at `x`, returned from the product form after checking it against
/// the Fourier form.
pub fn density_at(pp: &PartialProduct, x: f64) -> Result<f64> {
    let direct = pp.density_product(x);
    let fourier = pp.density_fourier(x);
    if (direct - fourier).abs() > 1e-8 * direct.abs().max(1.0) {
        return Err(Error::Invariant(format!(
            "density mismatch at x = {x}: product {direct}, Fourier {fourier}"
        )));
    }
    Ok(direct)
}

/// Estimate of `mu_c` on one cylinder with its Gibbs window
/// `[exp(gibbs_lo), exp(gibbs_hi)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMeasure {
    pub word: DyadicWord,
    pub estimate: Bracket,
    /// Spread of the quadrature values before clamping.
    pub quadrature: Bracket,
    pub gibbs_lo: ExtReal,
    pub gibbs_hi: f64,
    pub clamped: bool,
}

impl CylinderMeasure {
    pub fn gibbs_window(&self) -> Bracket {
        Bracket::spanning(
            self.gibbs_lo.exp().next_down().max(0.0),
            self.gibbs_hi.exp().next_up(),
        )
    }
}

/// Composite Gauss-Legendre nodes on `[0, 1]` together with the densities
/// `h_{K-1}, h_K, h_{K+1}` at every node.
struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    densities: [Vec<f64>; 3],
}

impl Quadrature {
    fn new(param: &CircleParameter, buffer: u32) -> Result<Quadrature> {
        let rule =
            GaussLegendre::new(GAUSS_NODES).map_err(|e| Error::Invariant(format!("quadrature rule: {e}")))?;
        let panels = 1usize << (buffer + 3);
        let width = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * GAUSS_NODES);
        let mut weights = Vec::with_capacity(panels * GAUSS_NODES);
        for p in 0..panels {
            let left = p as f64 * width;
            for &(x, w) in rule.as_node_weight_pairs() {
                nodes.push(left + (x + 1.0) * width / 2.0);
                weights.push(w * width / 2.0);
            }
        }
        let singularity = param.singularity();
        let densities_at = |y: f64| {
            let mut out = [1.0; 3];
            let mut value = 1.0;
            let mut z = y;
            for k in 0..=buffer + 1 {
                if k + 1 >= buffer {
                    out[(k + 1 - buffer) as usize] = value;
                }
                value *= factor(singularity, z);
                z = (2.0 * z).rem_euclid(1.0);
            }
            out
        };
        let per_node: Vec<[f64; 3]> = nodes.par_iter().map(|&y| densities_at(y)).collect();
        let densities = [0, 1, 2].map(|i| per_node.iter().map(|d| d[i]).collect());
        Ok(Quadrature {
            nodes,
            weights,
            densities,
        })
    }

    fn integrals(&self, weight: &[f64]) -> [f64; 3] {
        [0, 1, 2].map(|i| {
            self.weights
                .iter()
                .zip(weight)
                .zip(&self.densities[i])
                .map(|((w, g), h)| w * g * h)
                .sum()
        })
    }
}

/// `g(x) = sin^2(pi rho(x, c + 1/2))` at `x = (m + y) / 2^level` for every
/// node `y`, with the distance formed from exact integer parts.
fn g_on_cylinder(singular: TorusPoint, m: u64, level: u32, nodes: &[f64]) -> Vec<f64> {
    let (whole, frac) = singular.scaled_parts(level);
    let full = 1i64 << level;
    let r = (m as i64 - whole).rem_euclid(full);
    let scale = (level as f64).exp2().recip();
    nodes
        .iter()
        .map(|&y| {
            let e = y - frac;
            let up = r as f64 + e;
            let down = (full - r) as f64 - e;
            let rho = up.abs().min(down.abs()) * scale;
            let s = (PI * rho).sin();
            s * s
        })
        .collect()
}

fn finish(word: DyadicWord, integrals: [f64; 3], sups: f64, infs: f64) -> CylinderMeasure {
    let n = word.len() as u32;
    let gibbs_hi = pad_up(sups, n);
    let gibbs_lo = ExtReal::from_f64(pad_down(infs, n));
    let lo = integrals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = integrals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let quadrature = Bracket::spanning(lo, hi);
    let mut m = CylinderMeasure {
        word,
        estimate: quadrature,
        quadrature,
        gibbs_lo,
        gibbs_hi,
        clamped: false,
    };
    let window = m.gibbs_window();
    if window.lo() > quadrature.lo() || window.hi() < quadrature.hi() {
        m.clamped = true;
        m.estimate = quadrature.clamp_into(&window).unwrap_or_else(|| {
            let end = if quadrature.hi() < window.lo() {
                window.lo()
            } else {
                window.hi()
            };
            Bracket::point(end)
        });
        log::warn!(
            "cylinder {} estimate {} clamped into Gibbs window {}",
            m.word,
            quadrature,
            window
        );
    }
    m
}

fn empty_word_measure() -> CylinderMeasure {
    CylinderMeasure {
        word: DyadicWord::empty(),
        estimate: Bracket::point(1.0),
        quadrature: Bracket::point(1.0),
        gibbs_lo: ExtReal::Finite(0.0),
        gibbs_hi: 0.0,
        clamped: false,
    }
}

fn check_buffer(n: u32, buffer: u32) -> Result<()> {
    if buffer == 0 {
        return Err(Error::InvalidArgument("buffer must be >= 1".into()));
    }
    if n + buffer + 1 > MAX_ORDER {
        return Err(Error::ResourceLimit(format!(
            "word length {n} plus buffer {buffer} exceeds order {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// `mu_N(<w>) = int_0^1 exp(psi_n((w + y) / 2^n)) h_K(y) dy` for
/// `N = n + K - 1, n + K, n + K + 1`; the spread of the three values,
/// clamped into the Gibbs window.
pub fn cylinder_measure(param: &CircleParameter, w: &DyadicWord, buffer: u32) -> Result<CylinderMeasure> {
    let n = w.len() as u32;
    check_buffer(n, buffer)?;
    if n == 0 {
        return Ok(empty_word_measure());
    }
    let quad = Quadrature::new(param, buffer)?;
    let (m, _) = w.left();
    let mut weight = vec![1.0; quad.nodes.len()];
    let (mut sups, mut infs) = (0.0, 0.0);
    for k in 0..n {
        let level = n - k;
        let suffix = m % (1u64 << level);
        let g = g_on_cylinder(param.singular_point(), suffix, level, &quad.nodes);
        weight.iter_mut().zip(&g).for_each(|(a, b)| *a *= b);
        let t = term_extrema(param, suffix, level, None)
            .ok_or_else(|| Error::Invariant("empty unrestricted cylinder".into()))?;
        sups += t.sup;
        infs += t.inf;
    }
    Ok(finish(w.clone(), quad.integrals(&weight), sups, infs))
}

/// Cylinder measures of every word of length at most `n`.
#[derive(Clone, Debug)]
pub struct CylinderMeasureTable {
    parameter: CircleParameter,
    buffer: u32,
    levels: Vec<Vec<CylinderMeasure>>,
}

struct Node<'a> {
    param: &'a CircleParameter,
    quad: &'a Quadrature,
    depth: u32,
}

type Record = (u32, u64, [f64; 3], f64, f64);

impl Node<'_> {
    /// Visits the words obtained by prepending letters to the word `u` of
    /// length `j`, whose weight function and extremum sums are given.
    fn visit(&self, u: u64, j: u32, weight: &[f64], sups: f64, infs: f64) -> Vec<Record> {
        if j == self.depth {
            return Vec::new();
        }
        let child = |b: u64| -> Vec<Record> {
            let w = (b << j) | u;
            let level = j + 1;
            let g = g_on_cylinder(self.param.singular_point(), w, level, &self.quad.nodes);
            let weight: Vec<f64> = weight.iter().zip(&g).map(|(a, b)| a * b).collect();
            let t = term_extrema(self.param, w, level, None).expect("unrestricted cylinder is nonempty");
            let (s, i) = (sups + t.sup, infs + t.inf);
            let mut out = vec![(level, w, self.quad.integrals(&weight), s, i)];
            out.extend(self.visit(w, level, &weight, s, i));
            out
        };
        if j < 6 {
            let (mut a, b) = rayon::join(|| child(0), || child(1));
            a.extend(b);
            a
        } else {
            let mut a = child(0);
            a.extend(child(1));
            a
        }
    }
}

impl CylinderMeasureTable {
    pub fn new(param: &CircleParameter, depth: u32, buffer: u32) -> Result<Self> {
        if depth > MAX_TABLE_DEPTH {
            return Err(Error::ResourceLimit(format!(
                "table depth {depth} > {MAX_TABLE_DEPTH}"
            )));
        }
        check_buffer(depth, buffer)?;
        let quad = Quadrature::new(param, buffer)?;
        let root = Node {
            param,
            quad: &quad,
            depth,
        };
        let records = root.visit(0, 0, &vec![1.0; quad.nodes.len()], 0.0, 0.0);
        let mut levels: Vec<Vec<Option<CylinderMeasure>>> =
            (0..=depth).map(|j| vec![None; 1usize << j]).collect();
        levels[0][0] = Some(empty_word_measure());
        for (level, w, integrals, sups, infs) in records {
            let word = DyadicWord::from_index(w, level);
            levels[level as usize][w as usize] = Some(finish(word, integrals, sups, infs));
        }
        let levels = levels
            .into_iter()
            .map(|l| l.into_iter().map(|m| m.expect("every word visited")).collect())
            .collect();
        Ok(CylinderMeasureTable {
            parameter: param.clone(),
            buffer,
            levels,
        })
    }

    pub fn parameter(&self) -> &CircleParameter {
        &self.parameter
    }

    pub fn buffer(&self) -> u32 {
        self.buffer
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// All words of length `j`, indexed by value.
    pub fn level(&self, j: u32) -> &[CylinderMeasure] {
        &self.levels[j as usize]
    }

    pub fn get(&self, w: &DyadicWord) -> Option<&CylinderMeasure> {
        self.levels.get(w.len())?.get(w.index()? as usize)
    }
}

/// Length of the words `u` splitting the integral in [`measure_decay_check`].
const DECAY_SPLIT: u32 = 4;

/// `(1/n^2) min_w` of a certified lower bound on `log mu(<w>)`.
///
/// Invariance of `mu` gives `mu(<w>) = int exp(psi_n((w + y) / 2^n)) dmu(y)`.
/// Splitting `[0, 1]` into the cylinders `<u>`, `|u| = 4`, the integrand is at
/// least `a_u = exp(inf over <wu> of the first n terms)` on `<u>`, while
/// `mu(<u>) <= b_u = exp(sum_of_sups(u))` and the masses add up to 1. The
/// least value of `sum a_u mu(<u>)` under these constraints fills the
/// smallest `a_u` first.
pub fn measure_decay_check(param: &CircleParameter, n: u32) -> Result<f64> {
    if param.is_zero() {
        return Err(Error::InvalidParameter("c = 0 gives a point mass".into()));
    }
    if n == 0 || n > 14 {
        return Err(Error::InvalidArgument(format!("depth {n} outside 1..=14")));
    }
    let split = DECAY_SPLIT;
    let len = n + split;
    let (_, infs) = LevelTables::new(param, len, None).word_sums_above(split as usize);
    let (caps, _) = LevelTables::new(param, split, None).word_sums();
    let caps: Vec<f64> = caps.iter().map(|&s| pad_up(s, split).exp().next_up()).collect();
    let bounds: Vec<f64> = (0..1usize << n)
        .into_par_iter()
        .map(|w| {
            let mut terms: Vec<(f64, f64)> = (0..1usize << split)
                .map(|u| (pad_down(infs[(w << split) | u], n), caps[u]))
                .collect();
            terms.sort_by(|a, b| a.0.total_cmp(&b.0));
            // log of sum a_u m_u with masses poured into the smallest a_u first
            let mut remaining = 1.0f64;
            let mut logs = Vec::new();
            for (log_a, cap) in terms {
                if remaining <= 0.0 {
                    break;
                }
                let m = cap.min(remaining);
                remaining -= m;
                logs.push(log_a + m.ln());
            }
            crate::bracket::log_sum_exp(&logs)
        })
        .collect();
    let worst = bounds.iter().copied().fold(f64::INFINITY, f64::min);
    if worst == f64::NEG_INFINITY {
        return Err(Error::Invariant(format!("no finite lower bound at depth {n}")));
    }
    Ok(worst.next_down() / (n as f64 * n as f64))
}
