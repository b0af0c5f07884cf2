//! Autocorrelation coefficients, the three-term vector recursion and the
//! correlation exponent.

use num_complex::Complex64;

use crate::bracket::Bracket;
use crate::error::{Error, Result};
use crate::param::CircleParameter;
use crate::sequence::TmPrefix;

/// Largest table index accepted by [`eta_table`].
pub const MAX_ETA_INDEX: usize = 1 << 28;

/// `eta_0 ..= eta_N` together with `eta_{N+1}`, which the pair sums need.
#[derive(Clone, Debug)]
pub struct EtaTable {
    parameter: CircleParameter,
    eta: Vec<Complex64>,
}

impl EtaTable {
    pub fn parameter(&self) -> &CircleParameter {
        &self.parameter
    }

    /// Largest index `N` requested at construction.
    pub fn max_index(&self) -> usize {
        self.eta.len() - 2
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.eta[n]
    }

    /// `eta_0 ..= eta_N`.
    pub fn values(&self) -> &[Complex64] {
        &self.eta[..self.eta.len() - 1]
    }

    /// `(Z_n, Pi_n)` by direct summation over `[n, 2n)`.
    pub fn state(&self, n: usize) -> Result<CorrelationState> {
        if n == 0 || 2 * n > self.eta.len() - 1 {
            return Err(Error::InvalidArgument(format!(
                "state index {n} needs eta up to {}, table has {}",
                2 * n,
                self.max_index()
            )));
        }
        let phase = self.parameter.phase();
        let z = (n..2 * n).map(|m| self.eta[m].norm_sqr()).sum();
        let pair: Complex64 = (n..2 * n).map(|m| self.eta[m] * self.eta[m + 1].conj()).sum();
        Ok(CorrelationState {
            index: n,
            z,
            pi: phase * phase * 0.5 * pair,
        })
    }
}

/// `eta_0 = 1`, `eta_1 = phase/(2 - conj phase)`, `eta_{2n} = eta_n` and
/// `eta_{2n+1} = (phase eta_n + conj(phase) eta_{n+1})/2`.
pub fn eta_table(param: &CircleParameter, max_index: usize) -> Result<EtaTable> {
    if max_index == 0 {
        return Err(Error::InvalidArgument("eta table needs max index >= 1".into()));
    }
    if max_index > MAX_ETA_INDEX {
        return Err(Error::ResourceLimit(format!(
            "eta index {max_index} > {MAX_ETA_INDEX}"
        )));
    }
    let phase = param.phase();
    let conj = phase.conj();
    let len = max_index + 2;
    let mut eta = vec![Complex64::new(0.0, 0.0); len];
    eta[0] = Complex64::new(1.0, 0.0);
    eta[1] = phase / (2.0 - conj);
    for k in 2..len {
        let n = k / 2;
        eta[k] = if k % 2 == 0 {
            eta[n]
        } else {
            0.5 * (phase * eta[n] + conj * eta[n + 1])
        };
    }
    Ok(EtaTable {
        parameter: param.clone(),
        eta,
    })
}

/// `(1/k) sum_{m<k} conj(t_m) t_{m+lag}`.
pub fn empirical_eta(prefix: &TmPrefix, lag: usize, window: usize) -> Result<Complex64> {
    if window == 0 || lag + window > prefix.len() {
        return Err(Error::InvalidArgument(format!(
            "lag {lag} + window {window} exceeds prefix length {}",
            prefix.len()
        )));
    }
    let t = prefix.values();
    let sum: Complex64 = (0..window).map(|m| t[m].conj() * t[m + lag]).sum();
    Ok(sum / window as f64)
}

/// `v_n = (Z_n, Pi_n, conj Pi_n)`, third entry implicit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationState {
    pub index: usize,
    pub z: f64,
    pub pi: Complex64,
}

/// The matrix with `v_{2n} = M v_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McMatrix {
    entries: [[Complex64; 3]; 3],
}

impl McMatrix {
    pub fn entries(&self) -> &[[Complex64; 3]; 3] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..3).map(|i| self.entries[i][i]).sum()
    }

    pub fn apply(&self, v: &CorrelationState) -> CorrelationState {
        let x = [Complex64::new(v.z, 0.0), v.pi, v.pi.conj()];
        let row = |i: usize| -> Complex64 { (0..3).map(|j| self.entries[i][j] * x[j]).sum() };
        CorrelationState {
            index: 2 * v.index,
            z: row(0).re,
            pi: row(1),
        }
    }
}

pub fn mc_matrix(param: &CircleParameter) -> McMatrix {
    let phase = param.phase();
    let conj = phase.conj();
    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    McMatrix {
        entries: [
            [re(1.5), re(0.5), re(0.5)],
            [0.5 * phase, phase, zero],
            [0.5 * conj, zero, conj],
        ],
    }
}

/// Coefficients `(a, b)` of the characteristic polynomial
/// `x^3 - a x^2 + b x - 1`.
pub fn characteristic_coefficients(param: &CircleParameter) -> (f64, f64) {
    let cos = param.cos2pi();
    (1.5 + 2.0 * cos, 1.0 + 2.5 * cos)
}

fn cubic(a: f64, b: f64, x: f64) -> f64 {
    ((x - a) * x + b) * x - 1.0
}

/// The eigenvalue of modulus greater than one, as the real root of the
/// characteristic cubic above one.
pub fn lambda1(param: &CircleParameter) -> Result<Bracket> {
    let (a, b) = characteristic_coefficients(param);
    let f = |x: f64| cubic(a, b, x);
    // f(1) = (cos - 1)/2 <= 0; start past the local minimum so the sign
    // change is clean even when f(1) = 0.
    let disc = a * a - 3.0 * b;
    let mut lo = 1.0;
    if disc > 0.0 {
        let crit = (a + disc.sqrt()) / 3.0;
        if crit > 1.0 && f(crit) < 0.0 {
            lo = crit;
        }
    }
    if f(lo) >= 0.0 {
        return Err(Error::Invariant(format!("no sign change above 1 at c = {param}")));
    }
    let mut hi = 3.0;
    if f(hi) <= 0.0 {
        return Err(Error::Invariant(format!(
            "cubic not positive at 3 for c = {param}"
        )));
    }
    while hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // widen by the evaluation error over the derivative
    let x = 0.5 * (lo + hi);
    let slope = (3.0 * x - 2.0 * a) * x + b;
    if slope <= 0.0 {
        return Err(Error::Invariant(format!("non-simple root at c = {param}")));
    }
    let magnitude = x * x * x + a.abs() * x * x + b.abs() * x + 1.0;
    let pad = 8.0 * f64::EPSILON * magnitude / slope;
    Bracket::new(lo - pad, hi + pad)
}

/// `D_2 = log_2 lambda_1`.
pub fn correlation_exponent(param: &CircleParameter) -> Result<Bracket> {
    let l = lambda1(param)?;
    Bracket::new(l.lo().log2().next_down(), l.hi().log2().next_up())
}

/// Dyadic partial sums of `|eta|^2` and their growth rate.
#[derive(Clone, Debug)]
pub struct ThetaGrowth {
    /// `(k, Theta_{2^k})` for `k = 0..=kmax`.
    pub points: Vec<(u32, f64)>,
    /// Least-squares slope of `log_2 Theta_{2^k}` against `k` over
    /// `k in [kmax/2, kmax]`.
    pub slope: f64,
    /// `log_2(Theta_{2^kmax} - Theta_{2^(kmax-1)}) - log_2(Theta_{2^(kmax-1)} - Theta_{2^(kmax-2)})`.
    pub local_slope: f64,
}

pub fn theta_growth(param: &CircleParameter, kmax: u32) -> Result<ThetaGrowth> {
    if !(2..=28).contains(&kmax) {
        return Err(Error::InvalidArgument(format!("kmax = {kmax} outside [2, 28]")));
    }
    let table = eta_table(param, 1 << kmax)?;
    let mut points = Vec::with_capacity(kmax as usize + 1);
    let mut theta = 0.0;
    let mut next = 0usize;
    for k in 0..=kmax {
        let end = 1usize << k;
        theta += (next..end).map(|m| table.get(m).norm_sqr()).sum::<f64>();
        next = end;
        points.push((k, theta));
    }
    let window: Vec<(f64, f64)> = points[(kmax / 2) as usize..]
        .iter()
        .map(|&(k, th)| (k as f64, th.log2()))
        .collect();
    let slope = least_squares_slope(&window);
    let th = |k: u32| points[k as usize].1;
    let local_slope = (th(kmax) - th(kmax - 1)).log2() - (th(kmax - 1) - th(kmax - 2)).log2();
    Ok(ThetaGrowth {
        points,
        slope,
        local_slope,
    })
}

pub(crate) fn least_squares_slope(xy: &[(f64, f64)]) -> f64 {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
