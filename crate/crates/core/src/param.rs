//! The circle parameter `c` with its phase and singularity.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest accepted denominator for exact parameters. Keeps every exact
/// comparison against dyadic points of level <= [`MAX_LEVEL`] inside `u128`.
pub const MAX_DENOMINATOR: u64 = 1 << 40;

/// Deepest dyadic level supported by the exact geometry helpers.
pub const MAX_LEVEL: u32 = 60;

/// A reduced fraction `num/den` in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    /// Reduces `p/q` modulo one.
    pub fn new(p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let num = (p as i128).rem_euclid(q as i128) as u64;
        let g = num.gcd(&q);
        let (num, den) = (num / g, q / g);
        if den > MAX_DENOMINATOR {
            return Err(Error::InvalidParameter(format!(
                "denominator {den} exceeds {MAX_DENOMINATOR}"
            )));
        }
        Ok(Fraction { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn plus_half(&self) -> Fraction {
        // (2p + q) / 2q, reduced
        Fraction::new((2 * self.num + self.den) as i64, 2 * self.den)
            .expect("denominator doubled within bounds")
    }

    /// Denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        self.den.is_power_of_two()
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A point of the torus, either exactly rational or a float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum TorusPoint {
    Exact(Fraction),
    Float(f64),
}

impl TorusPoint {
    fn value(&self) -> f64 {
        match self {
            TorusPoint::Exact(r) => r.to_f64(),
            TorusPoint::Float(x) => *x,
        }
    }

    /// Compares the point with `m / 2^level` for `m` in `[0, 2^level]`.
    pub(crate) fn cmp_dyadic(&self, m: u64, level: u32) -> Ordering {
        debug_assert!(level <= MAX_LEVEL);
        match self {
            TorusPoint::Exact(r) => {
                let lhs = (r.num as u128) << level;
                let rhs = m as u128 * r.den as u128;
                lhs.cmp(&rhs)
            }
            TorusPoint::Float(x) => {
                let scaled = x * (1u64 << level) as f64;
                let whole = scaled.floor();
                let whole_int = whole as u64;
                match whole_int.cmp(&m) {
                    Ordering::Equal if scaled > whole => Ordering::Greater,
                    ord => ord,
                }
            }
        }
    }

    /// Torus distance to `m / 2^level`.
    pub(crate) fn dist_dyadic(&self, m: u64, level: u32) -> f64 {
        match self {
            TorusPoint::Exact(r) => {
                let total = (r.den as u128) << level;
                let a = (r.num as u128) << level;
                let b = (m as u128 % (1u128 << level)) * r.den as u128;
                let d = a.abs_diff(b);
                let d = d.min(total - d);
                d as f64 / total as f64
            }
            TorusPoint::Float(x) => {
                let y = (m % (1u64 << level)) as f64 / (1u64 << level) as f64;
                torus_dist(*x, y)
            }
        }
    }

    /// Splits `point * 2^level` into an integer part and a fractional part.
    pub(crate) fn scaled_parts(&self, level: u32) -> (i64, f64) {
        match self {
            TorusPoint::Exact(r) => {
                let scaled = (r.num as u128) << level;
                let whole = scaled / r.den as u128;
                let rem = scaled % r.den as u128;
                (whole as i64, rem as f64 / r.den as f64)
            }
            TorusPoint::Float(x) => {
                let scaled = x * (1u64 << level) as f64;
                let whole = scaled.floor();
                (whole as i64, scaled - whole)
            }
        }
    }
}

/// Distance on the circle of length one.
pub fn torus_dist(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `e^{2 pi i k/q}` with exact values on the quarter points.
fn root_of_unity(k: u64, q: u64) -> Complex64 {
    let k = k % q;
    if (4 * k).is_multiple_of(q) {
        return match 4 * k / q {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    // reduce to (-1/2, 1/2] before scaling by 2 pi
    let x = if 2 * k > q {
        -((q - k) as f64 / q as f64)
    } else {
        k as f64 / q as f64
    };
    let (s, c) = (2.0 * std::f64::consts::PI * x).sin_cos();
    Complex64::new(c, s)
}

/// The parameter `c` in `[0, 1)` of the measure family.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleParameter {
    c: TorusPoint,
    singularity: TorusPoint,
    phase: Complex64,
}

impl CircleParameter {
    /// Exact parameter `p/q` reduced modulo one.
    pub fn from_ratio(p: i64, q: u64) -> Result<Self> {
        let c = Fraction::new(p, q)?;
        Ok(CircleParameter {
            c: TorusPoint::Exact(c),
            singularity: TorusPoint::Exact(c.plus_half()),
            phase: root_of_unity(c.num, c.den),
        })
    }

    /// Floating-point parameter reduced modulo one.
    pub fn from_real(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite c = {c}")));
        }
        let mut c = c.rem_euclid(1.0);
        if c >= 1.0 {
            c = 0.0;
        }
        let s = (c + 0.5).rem_euclid(1.0);
        let (sin, cos) = (2.0 * std::f64::consts::PI * c).sin_cos();
        Ok(CircleParameter {
            c: TorusPoint::Float(c),
            singularity: TorusPoint::Float(s),
            phase: Complex64::new(cos, sin),
        })
    }

    pub fn value(&self) -> f64 {
        self.c.value()
    }

    /// `e^{2 pi i c}`.
    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    /// The zero of `cos(pi (x - c))`, at `c + 1/2 mod 1`.
    pub fn singularity(&self) -> f64 {
        self.singularity.value()
    }

    pub fn rational_form(&self) -> Option<Fraction> {
        match self.c {
            TorusPoint::Exact(r) => Some(r),
            TorusPoint::Float(_) => None,
        }
    }

    pub fn singularity_exact(&self) -> Option<Fraction> {
        match self.singularity {
            TorusPoint::Exact(r) => Some(r),
            TorusPoint::Float(_) => None,
        }
    }

    /// True for `c = 0`, where the measure degenerates to a point mass.
    pub fn is_zero(&self) -> bool {
        self.value() == 0.0
    }

    /// True for `c = 1/2`.
    pub fn is_half(&self) -> bool {
        self.value() == 0.5
    }

    /// `cos(2 pi c)`, exact at the quarter points.
    pub fn cos2pi(&self) -> f64 {
        self.phase.re
    }

    pub(crate) fn point(&self) -> TorusPoint {
        self.c
    }

    pub(crate) fn singular_point(&self) -> TorusPoint {
        self.singularity
    }

    /// Powers `phase^k` for `k < q` when the parameter is exact.
    pub(crate) fn phase_powers(&self) -> Option<Vec<Complex64>> {
        let r = self.rational_form()?;
        Some((0..r.den).map(|k| root_of_unity(k * r.num, r.den)).collect())
    }
}

impl fmt::Display for CircleParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.c {
            TorusPoint::Exact(r) => write!(f, "{r}"),
            TorusPoint::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Parses `p/q`, a decimal literal (read exactly, `0.3` is `3/10`), or a
/// float in exponent notation.
impl FromStr for CircleParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad numerator in {s:?}")))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad denominator in {s:?}")))?;
            return CircleParameter::from_ratio(p, q);
        }
        if let Some((p, q)) = parse_decimal(s) {
            return CircleParameter::from_ratio(p, q);
        }
        let x: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse {s:?}")))?;
        CircleParameter::from_real(x)
    }
}

/// `"-1.25"` -> `(-125, 100)`; `None` for exponent notation or too many digits.
pub(crate) fn parse_decimal(s: &str) -> Option<(i64, u64)> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|ch| ch.is_ascii_digit()) || frac.len() > 12 {
        return None;
    }
    let den = 10u64.checked_pow(frac.len() as u32)?;
    let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac_val: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let num = int.checked_mul(den as i64)?.checked_add(frac_val)?;
    Some((if neg { -num } else { num }, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_has_real_phase() {
        let p = CircleParameter::from_ratio(1, 2).unwrap();
        assert_eq!(p.phase(), Complex64::new(-1.0, 0.0));
        assert_eq!(p.singularity(), 0.0);
    }

    #[test]
    fn zero_and_third() {
        let p = CircleParameter::from_ratio(0, 1).unwrap();
        assert_eq!(p.phase(), Complex64::new(1.0, 0.0));
        assert_eq!(p.singularity(), 0.5);
        let p = CircleParameter::from_ratio(1, 3).unwrap();
        assert_eq!(p.singularity_exact(), Some(Fraction::new(5, 6).unwrap()));
        let expect = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((p.phase() - expect).norm() < 1e-15);
    }

    #[test]
    fn reduces_mod_one() {
        let p = CircleParameter::from_ratio(-1, 4).unwrap();
        assert_eq!(p.rational_form().unwrap(), Fraction::new(3, 4).unwrap());
        let p = CircleParameter::from_real(1.25).unwrap();
        assert_eq!(p.value(), 0.25);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(CircleParameter::from_real(f64::NAN).is_err());
        assert!(CircleParameter::from_real(f64::INFINITY).is_err());
        assert!(CircleParameter::from_ratio(1, 0).is_err());
    }

    #[test]
    fn parses_decimals_exactly() {
        let p: CircleParameter = "0.3".parse().unwrap();
        assert_eq!(p.rational_form(), Some(Fraction::new(3, 10).unwrap()));
        let p: CircleParameter = "2/6".parse().unwrap();
        assert_eq!(p.rational_form(), Some(Fraction::new(1, 3).unwrap()));
        let p: CircleParameter = "1e-1".parse().unwrap();
        assert!(p.rational_form().is_none());
    }

    #[test]
    fn exact_dyadic_comparisons() {
        let third = TorusPoint::Exact(Fraction::new(1, 3).unwrap());
        assert_eq!(third.cmp_dyadic(1, 2), Ordering::Greater);
        assert_eq!(third.cmp_dyadic(2, 2), Ordering::Less);
        let quarter = TorusPoint::Float(0.25);
        assert_eq!(quarter.cmp_dyadic(1, 2), Ordering::Equal);
        assert_eq!(quarter.cmp_dyadic(1, 3), Ordering::Greater);
        assert!((third.dist_dyadic(1, 1) - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(third.dist_dyadic(0, 3), 1.0 / 3.0);
    }
}
