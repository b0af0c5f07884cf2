//! Lower/upper enclosures and extended reals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// A real number or `-inf`. Values of the potential live here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
}

impl ExtReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// IEEE view, `-inf` for [`ExtReal::NegInf`].
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
        }
    }

    /// Inverse of [`ExtReal::to_f64`]. Panics on NaN and `+inf`.
    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan() && x != f64::INFINITY, "not an extended real: {x}");
        if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::NegInf => None,
            ExtReal::Finite(x) => Some(x),
        }
    }

    /// `exp`, with `exp(-inf) = 0`.
    pub fn exp(self) -> f64 {
        match self {
            ExtReal::NegInf => 0.0,
            ExtReal::Finite(x) => x.exp(),
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::NegInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &ExtReal) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
        }
    }
}

/// Closed enclosure `[lo, hi]`. Either end may be infinite; NaN never is.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Invariant(format!("malformed bracket [{lo}, {hi}]")));
        }
        Ok(Bracket { lo, hi })
    }

    /// Bracket of the two values in either order.
    pub fn spanning(a: f64, b: f64) -> Self {
        assert!(!a.is_nan() && !b.is_nan(), "NaN in bracket");
        Bracket {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn point(x: f64) -> Self {
        Bracket::spanning(x, x)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        if self.lo == self.hi {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Smallest bracket holding both.
    pub fn hull(&self, other: &Bracket) -> Bracket {
        Bracket {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(&self, other: &Bracket) -> Option<Bracket> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Bracket { lo, hi })
    }

    /// Distance between the two sets, zero when they overlap.
    pub fn gap(&self, other: &Bracket) -> f64 {
        if self.hi < other.lo {
            other.lo - self.hi
        } else if other.hi < self.lo {
            self.lo - other.hi
        } else {
            0.0
        }
    }

    /// Gap no larger than `slack` plus both widths.
    pub fn agrees_with(&self, other: &Bracket, slack: f64) -> bool {
        self.gap(other) <= self.width() + other.width() + slack
    }

    /// Widen by one ulp on each side.
    pub fn outward(&self) -> Bracket {
        Bracket {
            lo: self.lo.next_down(),
            hi: self.hi.next_up(),
        }
    }

    pub fn scale(&self, k: f64) -> Bracket {
        Bracket::spanning(self.lo * k, self.hi * k)
    }

    pub fn exp(&self) -> Bracket {
        Bracket {
            lo: self.lo.exp().next_down().max(0.0),
            hi: self.hi.exp().next_up(),
        }
    }

    /// Natural log; a zero lower end maps to `-inf`.
    pub fn ln(&self) -> Result<Bracket> {
        if self.lo < 0.0 {
            return Err(Error::InvalidArgument(format!("log of {self}")));
        }
        Ok(Bracket {
            lo: self.lo.ln().next_down(),
            hi: self.hi.ln().next_up(),
        })
    }

    /// Pointwise max of two enclosed quantities.
    pub fn max(&self, other: &Bracket) -> Bracket {
        Bracket {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Pointwise min of two enclosed quantities.
    pub fn min(&self, other: &Bracket) -> Bracket {
        Bracket {
            lo: self.lo.min(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    /// Clamp into `window`; `None` when disjoint.
    pub fn clamp_into(&self, window: &Bracket) -> Option<Bracket> {
        if self.hi < window.lo || self.lo > window.hi {
            return None;
        }
        Some(Bracket {
            lo: self.lo.clamp(window.lo, window.hi),
            hi: self.hi.clamp(window.lo, window.hi),
        })
    }
}

impl Add for Bracket {
    type Output = Bracket;

    fn add(self, rhs: Bracket) -> Bracket {
        Bracket {
            lo: (self.lo + rhs.lo).next_down(),
            hi: (self.hi + rhs.hi).next_up(),
        }
    }
}

impl Neg for Bracket {
    type Output = Bracket;

    fn neg(self) -> Bracket {
        Bracket {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Sub for Bracket {
    type Output = Bracket;

    fn sub(self, rhs: Bracket) -> Bracket {
        self + (-rhs)
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.p$}, {:.p$}]", self.lo, self.hi),
            None => write!(f, "[{}, {}]", self.lo, self.hi),
        }
    }
}

/// Sum in a fixed pairwise order, independent of how the input was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `ln sum exp(x_i)` with the pairwise order of [`pairwise_sum`].
/// `+inf` entries make the result `+inf`; an all `-inf` input gives `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top.is_infinite() {
        return top;
    }
    let shifted: Vec<f64> = xs.iter().map(|x| (x - top).exp()).collect();
    top + pairwise_sum(&shifted).ln()
}

/// Widens a sum of `n` rounded terms by its worst-case accumulated error.
pub(crate) fn pad_up(x: f64, n: u32) -> f64 {
    if x.is_finite() && x != 0.0 {
        x + x.abs() * (n as f64 + 1.0) * f64::EPSILON
    } else {
        x
    }
}

pub(crate) fn pad_down(x: f64, n: u32) -> f64 {
    if x.is_finite() && x != 0.0 {
        x - x.abs() * (n as f64 + 1.0) * f64::EPSILON
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_reversed() {
        assert!(Bracket::new(1.0, 0.0).is_err());
        assert!(Bracket::new(f64::NAN, 0.0).is_err());
        assert!(Bracket::new(0.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn gap_and_agreement() {
        let a = Bracket::new(0.0, 1.0).unwrap();
        let b = Bracket::new(1.5, 2.0).unwrap();
        assert_eq!(a.gap(&b), 0.5);
        assert!(a.agrees_with(&b, 0.0));
        assert!(!Bracket::point(0.0).agrees_with(&Bracket::point(0.1), 0.05));
    }

    #[test]
    fn extreal_order_and_sum() {
        assert!(ExtReal::NegInf < ExtReal::Finite(-1e300));
        assert_eq!(ExtReal::Finite(1.0) + ExtReal::NegInf, ExtReal::NegInf);
        assert_eq!(ExtReal::NegInf.exp(), 0.0);
    }

    #[test]
    fn log_sum_exp_edges() {
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[0.0, f64::INFINITY]), f64::INFINITY);
        let v = log_sum_exp(&[0.0; 1024]);
        assert!((v - 1024f64.ln()).abs() < 1e-13);
    }

    fn bracket() -> impl Strategy<Value = (Bracket, f64)> {
        (-50.0..50.0f64, 0.0..10.0f64, 0.0..1.0f64).prop_map(|(lo, w, s)| {
            let b = Bracket::new(lo, lo + w).unwrap();
            (b, lo + s * w)
        })
    }

    proptest! {
        #[test]
        fn arithmetic_preserves_enclosure((a, x) in bracket(), (b, y) in bracket(), k in -5.0..5.0f64) {
            prop_assert!((a + b).contains(x + y));
            prop_assert!((a - b).contains(x - y));
            prop_assert!(a.scale(k).contains(x * k));
            prop_assert!(a.max(&b).contains(x.max(y)));
            prop_assert!(a.min(&b).contains(x.min(y)));
            prop_assert!(a.exp().contains(x.exp()));
            let pos = Bracket::new(a.lo().abs(), a.lo().abs() + a.width()).unwrap();
            let z = x - a.lo() + a.lo().abs();
            prop_assert!(pos.ln().unwrap().contains(z.ln()));
        }

        #[test]
        fn hull_contains_both((a, x) in bracket(), (b, y) in bracket()) {
            let h = a.hull(&b);
            prop_assert!(h.contains(x) && h.contains(y));
        }
    }
}
