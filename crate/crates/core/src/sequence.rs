//! The generalized Thue-Morse sequence `t_n = phase^{s(n)}`, `s` the binary
//! digit sum, and its substitution.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::param::CircleParameter;

/// Longest prefix we are willing to allocate.
pub const MAX_PREFIX: usize = 1 << 30;

/// Number of one bits in `n`.
pub fn digit_sum(n: u64) -> u32 {
    n.count_ones()
}

/// The first `len` terms `t_0, ..., t_{len-1}`.
#[derive(Clone, Debug)]
pub struct TmPrefix {
    parameter: CircleParameter,
    values: Vec<Complex64>,
}

impl TmPrefix {
    pub fn parameter(&self) -> &CircleParameter {
        &self.parameter
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_{k < len} t_k e^{-2 pi i k x}`.
    pub fn exponential_sum(&self, x: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * x.rem_euclid(1.0));
        // Horner from the top keeps the rounding error linear in len
        self.values
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &t| acc * step + t)
    }
}

/// Builds the prefix with `t_{2n} = t_n`, `t_{2n+1} = phase t_n`. For an exact
/// parameter `p/q` the digit sums are tracked mod `q` and mapped to exact
/// powers, so no rounding accumulates.
pub fn tm_prefix(param: &CircleParameter, len: usize) -> Result<TmPrefix> {
    if len == 0 {
        return Err(Error::InvalidArgument("prefix length must be positive".into()));
    }
    if len > MAX_PREFIX {
        return Err(Error::ResourceLimit(format!(
            "prefix length {len} > {MAX_PREFIX}"
        )));
    }
    let values = match param.phase_powers() {
        Some(powers) => {
            let q = powers.len() as u32;
            let mut residue = vec![0u32; len];
            for n in 1..len {
                residue[n] = if n % 2 == 0 {
                    residue[n / 2]
                } else {
                    (residue[n / 2] + 1) % q
                };
            }
            residue.into_iter().map(|r| powers[r as usize]).collect()
        }
        None => {
            let phase = param.phase();
            let mut values = vec![Complex64::new(1.0, 0.0); len];
            for n in 1..len {
                values[n] = if n % 2 == 0 {
                    values[n / 2]
                } else {
                    phase * values[n / 2]
                };
            }
            values
        }
    };
    Ok(TmPrefix {
        parameter: param.clone(),
        values,
    })
}

/// Applies the substitution `z -> (z, phase z)` letterwise `k` times.
pub fn substitute(param: &CircleParameter, word: &[Complex64], k: u32) -> Vec<Complex64> {
    let phase = param.phase();
    let mut current = word.to_vec();
    for _ in 0..k {
        current = current.iter().flat_map(|&z| [z, phase * z]).collect();
    }
    current
}

/// `u^{n+1} = u^n R(u^n)` with `R` multiplying every letter by the phase,
/// started from `u^0 = (1)`.
pub fn fixed_point_word(param: &CircleParameter, n: u32) -> Vec<Complex64> {
    let phase = param.phase();
    let mut u = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n {
        let rotated: Vec<Complex64> = u.iter().map(|&z| phase * z).collect();
        u.extend(rotated);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn digit_sums() {
        assert_eq!(digit_sum(7), 3);
        assert_eq!(digit_sum(0), 0);
        for k in 0..64 {
            assert_eq!(digit_sum(1 << k), 1);
        }
    }

    #[test]
    fn classic_signs() {
        let p = CircleParameter::from_ratio(1, 2).unwrap();
        let t = tm_prefix(&p, 8).unwrap();
        let re: Vec<f64> = t.values().iter().map(|z| z.re).collect();
        assert_eq!(re, [1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0]);
        assert!(t.values().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn constant_at_zero() {
        let p = CircleParameter::from_ratio(0, 1).unwrap();
        let t = tm_prefix(&p, 100).unwrap();
        assert!(t.values().iter().all(|&z| z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn third_entry_at_one_third() {
        let p = CircleParameter::from_ratio(1, 3).unwrap();
        let t = tm_prefix(&p, 4).unwrap();
        let expect = Complex64::from_polar(1.0, 4.0 * std::f64::consts::PI / 3.0);
        assert!((t.values()[3] - expect).norm() < 1e-15);
    }

    #[test]
    fn rejects_empty() {
        let p = CircleParameter::from_ratio(1, 2).unwrap();
        assert!(tm_prefix(&p, 0).is_err());
    }

    #[test]
    fn substitution_reproduces_prefix() {
        for p in [
            CircleParameter::from_ratio(1, 3).unwrap(),
            CircleParameter::from_real(0.3).unwrap(),
        ] {
            let one = [Complex64::new(1.0, 0.0)];
            assert_eq!(substitute(&p, &one, 1), vec![one[0], p.phase()]);
            for n in 0..=12 {
                let t = tm_prefix(&p, 1 << n).unwrap();
                let s = substitute(&p, &one, n);
                let u = fixed_point_word(&p, n);
                for k in 0..(1 << n) {
                    assert!((s[k] - t.values()[k]).norm() < 1e-12);
                    assert!((u[k] - t.values()[k]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn float_phase_stays_on_circle() {
        let p = CircleParameter::from_real(0.1234567).unwrap();
        let t = tm_prefix(&p, 1 << 20).unwrap();
        assert!(t.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn doubling_identities(p in 0i64..97, q in 1u64..97, n in 0usize..2000) {
            let param = CircleParameter::from_ratio(p, q).unwrap();
            let t = tm_prefix(&param, 2 * n + 2).unwrap();
            let v = t.values();
            prop_assert_eq!(v[2 * n], v[n]);
            let expect = param.phase().powu(digit_sum(2 * n as u64 + 1));
            prop_assert!((v[2 * n + 1] - expect).norm() < 1e-12);
        }
    }
}
