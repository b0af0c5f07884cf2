//! The potential `psi(x) = 2 log|cos(pi (x - c))|`, its Birkhoff sums under
//! the doubling map and enclosures of their extrema over cylinders.

use rayon::prelude::*;

use crate::bracket::ExtReal;
use crate::dyadic::DyadicWord;
use crate::error::{Error, Result};
use crate::param::{CircleParameter, TorusPoint};

/// Deepest level (word length plus grid depth) handled by the bulk tables.
pub const MAX_TABLE_LEVEL: u32 = 28;

/// `2 log sin(pi rho)` for a distance `rho` in `[0, 1/2]` to the singularity.
fn psi_from_dist(rho: f64) -> f64 {
    if rho == 0.0 {
        f64::NEG_INFINITY
    } else {
        2.0 * (std::f64::consts::PI * rho).sin().ln()
    }
}

/// Distance from a float `x` to the singularity, exact when `x` has at most
/// 60 fractional binary digits and the singularity is rational.
fn dist_to_singularity(param: &CircleParameter, x: f64) -> f64 {
    let x = x.rem_euclid(1.0);
    let scaled = x * (1u64 << 60) as f64;
    if scaled.fract() == 0.0 {
        param.singular_point().dist_dyadic(scaled as u64, 60)
    } else {
        crate::param::torus_dist(x, param.singularity())
    }
}

pub fn psi(param: &CircleParameter, x: f64) -> ExtReal {
    ExtReal::from_f64(psi_from_dist(dist_to_singularity(param, x)))
}

/// `sum_{k<n} psi(T^k x)`, following the exact binary orbit of the float `x`.
pub fn birkhoff_sum(param: &CircleParameter, x: f64, n: usize) -> ExtReal {
    let mut y = x.rem_euclid(1.0);
    let mut total = 0.0;
    for _ in 0..n {
        total += psi_from_dist(dist_to_singularity(param, y));
        if total == f64::NEG_INFINITY {
            return ExtReal::NegInf;
        }
        y = (2.0 * y).rem_euclid(1.0);
    }
    ExtReal::Finite(total)
}

/// `psi(m / 2^level)` with the distance computed exactly.
pub(crate) fn psi_dyadic(param: &CircleParameter, m: u64, level: u32) -> f64 {
    psi_from_dist(param.singular_point().dist_dyadic(m, level))
}

/// Birkhoff sum of length `n` at the dyadic point `m / 2^level`.
pub(crate) fn birkhoff_sum_dyadic(param: &CircleParameter, m: u64, level: u32, n: usize) -> f64 {
    let modulus = 1u64 << level;
    let mut point = m % modulus;
    let mut total = 0.0;
    for _ in 0..n {
        total += psi_dyadic(param, point, level);
        point = (2 * point) % modulus;
    }
    total
}

/// An open arc `(lo, hi) 2^-level` of the torus, `lo` possibly negative,
/// that orbits of the restricted system never enter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForbiddenZone {
    pub level: u32,
    pub lo: i64,
    pub hi: i64,
}

/// Bounds on `sup psi` and `inf psi` over one closed cylinder, possibly with
/// a forbidden zone removed. `inf` may be `-inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct TermExtrema {
    pub sup: f64,
    pub inf: f64,
}

fn contains_point(point: TorusPoint, p: i128, q: i128, level: u32) -> bool {
    use std::cmp::Ordering::*;
    let full = 1i128 << level;
    let inside = |x: i128| -> bool { (0..=full).contains(&x) };
    debug_assert!(inside(p) && inside(q));
    let after_p = point.cmp_dyadic(p as u64, level) != Less;
    let before_q = point.cmp_dyadic(q as u64, level) != Greater;
    // the point 1 coincides with 0
    let wraps = q == full && point.cmp_dyadic(0, level) == Equal;
    (after_p && before_q) || wraps
}

/// Closed-form extrema of `psi` over the level-`level` cylinder `m`, minus
/// the zone when given. `psi` is monotone in the distance to the singularity,
/// so the sup sits at the point nearest `c` and the inf at the point nearest
/// the singularity; both are endpoints unless the point itself is inside.
pub(crate) fn term_extrema(
    param: &CircleParameter,
    m: u64,
    level: u32,
    zone: Option<&ForbiddenZone>,
) -> Option<TermExtrema> {
    let depth = zone.map_or(level, |z| z.level.max(level));
    let scale = 1i128 << (depth - level);
    let mut pieces: Vec<(i128, i128)> = vec![(m as i128 * scale, (m as i128 + 1) * scale)];
    if let Some(z) = zone {
        let zs = 1i128 << (depth - z.level);
        let full = 1i128 << depth;
        for shift in [-full, 0, full] {
            let (a, b) = (z.lo as i128 * zs + shift, z.hi as i128 * zs + shift);
            pieces = pieces
                .into_iter()
                .flat_map(|(p, q)| {
                    let mut out = Vec::with_capacity(2);
                    if b <= p || a >= q {
                        out.push((p, q));
                    } else {
                        if p <= a {
                            out.push((p, a));
                        }
                        if b <= q {
                            out.push((b, q));
                        }
                    }
                    out
                })
                .collect();
        }
    }
    if pieces.is_empty() {
        return None;
    }
    let full = 1i128 << depth;
    let value = |x: i128| psi_dyadic(param, (x % full) as u64, depth);
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    for (p, q) in pieces {
        let ends = value(p).min(value(q));
        let ends_max = value(p).max(value(q));
        inf = inf.min(if contains_point(param.singular_point(), p, q, depth) {
            f64::NEG_INFINITY
        } else {
            ends
        });
        sup = sup.max(if contains_point(param.point(), p, q, depth) {
            0.0
        } else {
            ends_max
        });
    }
    let round_up = |x: f64| {
        if x == 0.0 || !x.is_finite() {
            x
        } else {
            x.next_up()
        }
    };
    let round_down = |x: f64| {
        if x == 0.0 || !x.is_finite() {
            x
        } else {
            x.next_down()
        }
    };
    Some(TermExtrema {
        sup: round_up(sup),
        inf: round_down(inf),
    })
}

/// Enclosures of the extrema of the Birkhoff sum of length `|w|` over the
/// cylinder of `w`: `sum_of_infs <= inf <= grid_min <= grid_max <= sup <=
/// sum_of_sups`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderExtrema {
    pub word: DyadicWord,
    pub sum_of_sups: f64,
    pub sum_of_infs: ExtReal,
    pub grid_max: ExtReal,
    pub grid_min: ExtReal,
}

/// Termwise closed-form sums plus the Birkhoff sum sampled at the `2^b + 1`
/// dyadic points of the cylinder at depth `|w| + b`.
pub fn cylinder_extrema(
    param: &CircleParameter,
    word: &DyadicWord,
    grid_depth: u32,
) -> Result<CylinderExtrema> {
    if grid_depth == 0 {
        return Err(Error::InvalidArgument("grid depth must be >= 1".into()));
    }
    let n = word.len() as u32;
    if n + grid_depth > crate::param::MAX_LEVEL {
        return Err(Error::ResourceLimit(format!(
            "word length {n} plus grid depth {grid_depth} too deep"
        )));
    }
    let (m, _) = word.left();
    let mut sups = 0.0;
    let mut infs = 0.0;
    for k in 0..n {
        let level = n - k;
        let term = term_extrema(param, m % (1u64 << level), level, None)
            .ok_or_else(|| Error::Invariant("empty unrestricted cylinder".into()))?;
        sups += term.sup;
        infs += term.inf;
    }
    let level = n + grid_depth;
    let mut grid_max = f64::NEG_INFINITY;
    let mut grid_min = f64::INFINITY;
    for i in 0..=(1u64 << grid_depth) {
        let v = birkhoff_sum_dyadic(param, (m << grid_depth) + i, level, n as usize);
        grid_max = grid_max.max(v);
        grid_min = grid_min.min(v);
    }
    if n == 0 {
        grid_max = 0.0;
        grid_min = 0.0;
    }
    Ok(CylinderExtrema {
        word: word.clone(),
        sum_of_sups: if sups == 0.0 { 0.0 } else { sups.next_up() },
        sum_of_infs: ExtReal::from_f64(if infs.is_finite() { infs.next_down() } else { infs }),
        grid_max: ExtReal::from_f64(grid_max),
        grid_min: ExtReal::from_f64(grid_min),
    })
}

/// Per-level closed-form extrema: `sup[L-1][m]`, `inf[L-1][m]` for the
/// level-`L` cylinder `m`.
pub(crate) struct LevelTables {
    pub sup: Vec<Vec<f64>>,
    pub inf: Vec<Vec<f64>>,
}

impl LevelTables {
    pub fn new(param: &CircleParameter, n: u32, zone: Option<&ForbiddenZone>) -> LevelTables {
        let (sup, inf) = (1..=n)
            .map(|level| {
                let pairs: Vec<(f64, f64)> = (0..1u64 << level)
                    .into_par_iter()
                    .map(|m| match term_extrema(param, m, level, zone) {
                        Some(t) => (t.sup, t.inf),
                        // fully inside the zone: no admissible point
                        None => (f64::NEG_INFINITY, f64::INFINITY),
                    })
                    .collect();
                pairs.into_iter().unzip::<f64, f64, Vec<f64>, Vec<f64>>()
            })
            .unzip();
        LevelTables { sup, inf }
    }

    /// Termwise sums over all words of length `n`, indexed by word value.
    pub fn word_sums(&self) -> (Vec<f64>, Vec<f64>) {
        self.word_sums_above(0)
    }

    /// Like [`LevelTables::word_sums`] but only over the levels above `skip`,
    /// i.e. the first `n - skip` terms of the Birkhoff sum.
    pub fn word_sums_above(&self, skip: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.sup.len();
        let mut sups = vec![0.0f64; 1 << skip];
        let mut infs = vec![0.0f64; 1 << skip];
        for level in skip + 1..=n {
            let mask = (1usize << (level - 1)) - 1;
            let (ts, ti) = (&self.sup[level - 1], &self.inf[level - 1]);
            sups = (0..1usize << level)
                .into_par_iter()
                .map(|u| ts[u] + sups[u & mask])
                .collect();
            infs = (0..1usize << level)
                .into_par_iter()
                .map(|u| ti[u] + infs[u & mask])
                .collect();
        }
        (sups, infs)
    }
}

/// `psi_n(N / 2^(n+b))` for every `N < 2^(n+b)`.
pub(crate) fn grid_birkhoff(param: &CircleParameter, n: u32, grid_depth: u32) -> Vec<f64> {
    let mut values = vec![0.0f64; 1usize << grid_depth];
    for level in grid_depth + 1..=n + grid_depth {
        let mask = (1usize << (level - 1)) - 1;
        values = (0..1usize << level)
            .into_par_iter()
            .map(|x| psi_dyadic(param, x as u64, level) + values[x & mask])
            .collect();
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half() -> CircleParameter {
        CircleParameter::from_ratio(1, 2).unwrap()
    }

    #[test]
    fn extremes_of_psi() {
        let p = CircleParameter::from_ratio(1, 3).unwrap();
        assert_eq!(psi(&p, 1.0 / 3.0).finite().map(|v| v.abs() < 1e-15), Some(true));
        assert_eq!(psi(&half(), 0.0), ExtReal::NegInf);
        assert_eq!(
            psi(&CircleParameter::from_ratio(0, 1).unwrap(), 0.5),
            ExtReal::NegInf
        );
        assert!(psi(&p, 5.0 / 6.0).is_finite());
    }

    #[test]
    fn birkhoff_at_fixed_point() {
        let p = CircleParameter::from_ratio(0, 1).unwrap();
        assert_eq!(birkhoff_sum(&p, 0.0, 40), ExtReal::Finite(0.0));
        assert_eq!(birkhoff_sum(&p, 0.375, 3), ExtReal::NegInf);
        assert!(birkhoff_sum(&p, 0.375, 2).is_finite());
    }

    #[test]
    fn half_on_right_cylinder() {
        let w: DyadicWord = "1".parse().unwrap();
        let t = term_extrema(&half(), 1, 1, None).unwrap();
        assert_eq!(t.sup, 0.0);
        let e = cylinder_extrema(&half(), &w, 3).unwrap();
        assert_eq!(e.sum_of_sups, 0.0);
        assert_eq!(e.sum_of_infs, ExtReal::NegInf);
    }

    #[test]
    fn zone_removes_singular_neighbourhood() {
        // singularity 0, zone (-1/4, 1/4)
        let zone = ForbiddenZone {
            level: 2,
            lo: -1,
            hi: 1,
        };
        let t = term_extrema(&half(), 0, 1, Some(&zone)).unwrap();
        let expect = 2.0 * (std::f64::consts::PI * 0.25).sin().ln();
        assert!((t.inf - expect).abs() < 1e-14);
        assert_eq!(t.sup, 0.0);
        assert!(term_extrema(&half(), 0, 3, Some(&zone)).is_none());
    }

    #[test]
    fn tables_match_single_word() {
        for p in [half(), CircleParameter::from_ratio(1, 3).unwrap()] {
            let n = 6;
            let (sups, infs) = LevelTables::new(&p, n, None).word_sums();
            let grid = grid_birkhoff(&p, n, 2);
            for m in 0..1u64 << n {
                let e = cylinder_extrema(&p, &DyadicWord::from_index(m, n), 2).unwrap();
                assert!((e.sum_of_sups - sups[m as usize]).abs() < 1e-12);
                let i = infs[m as usize];
                match e.sum_of_infs {
                    ExtReal::NegInf => assert_eq!(i, f64::NEG_INFINITY),
                    ExtReal::Finite(v) => assert!((v - i).abs() < 1e-12),
                }
                let g = grid[(m as usize) << 2];
                let direct = birkhoff_sum_dyadic(&p, m << 2, n + 2, n as usize);
                assert!(g == direct || (g - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coboundary_at_zero() {
        let p = CircleParameter::from_ratio(0, 1).unwrap();
        let pi = std::f64::consts::PI;
        for &x in &[0.1234567, 0.3, 0.71, 0.987654321] {
            for n in 1..20 {
                let lhs = birkhoff_sum(&p, x, n).finite().unwrap();
                let top = (x * (n as f64).exp2()).rem_euclid(1.0);
                let rhs = -2.0 * n as f64 * 2f64.ln() + 2.0 * (pi * top).sin().abs().ln()
                    - 2.0 * (pi * x).sin().abs().ln();
                assert!((lhs - rhs).abs() < 1e-9, "x={x} n={n}");
            }
        }
    }

    proptest! {
        #[test]
        fn distance_bounds(x in 0.0..1.0f64, c in 0.0..1.0f64) {
            let p = CircleParameter::from_real(c).unwrap();
            let rho = crate::param::torus_dist(x, p.singularity());
            if let ExtReal::Finite(v) = psi(&p, x) {
                prop_assert!(2.0 * (2.0 * rho).ln() <= v + 1e-12);
                prop_assert!(v <= 2.0 * (std::f64::consts::PI * rho).ln() + 1e-12);
            }
        }

        #[test]
        fn closed_form_term_matches_sampling(m in 0u64..64, level in 1u32..=6, c in 0.0..1.0f64) {
            let p = CircleParameter::from_real(c).unwrap();
            let m = m % (1 << level);
            let t = term_extrema(&p, m, level, None).unwrap();
            let scale = (level as f64).exp2();
            let samples = 20_000;
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..=samples {
                let x = (m as f64 + i as f64 / samples as f64) / scale;
                let v = psi(&p, x).to_f64();
                hi = hi.max(v);
                lo = lo.min(v);
            }
            prop_assert!(hi <= t.sup + 1e-12);
            prop_assert!(t.inf <= lo + 1e-12);
            // dense sampling gets within the sampling step of the true sup
            prop_assert!(t.sup - hi < 1e-6);
        }

        #[test]
        fn enclosure_chain(m in 0u64..1024, n in 1u32..=10, b in 1u32..=4, c in 0.0..1.0f64) {
            let p = CircleParameter::from_real(c).unwrap();
            let w = DyadicWord::from_index(m % (1 << n), n);
            let e = cylinder_extrema(&p, &w, b).unwrap();
            prop_assert!(e.sum_of_infs <= e.grid_min);
            prop_assert!(e.grid_min <= e.grid_max);
            prop_assert!(e.grid_max <= ExtReal::Finite(e.sum_of_sups));
            let (a, len) = w.interval();
            let width = len - a;
            for i in 0..200 {
                let x = a + width * (i as f64 + 0.5) / 200.0;
                let v = birkhoff_sum(&p, x, n as usize);
                prop_assert!(e.sum_of_infs <= v);
                prop_assert!(v <= ExtReal::Finite(e.sum_of_sups));
            }
        }
    }
}
