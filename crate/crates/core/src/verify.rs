//! Cross-method consistency checks behind `tm-spectra verify`.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::autocorr::{correlation_exponent, empirical_eta, eta_table, lambda1, mc_matrix, theta_growth};
use crate::combinatorics::{
    closing_length_bound, extension_search, forbidden_automaton, is_admissible, markov_check, ExtensionGoal,
    SingularityCoding,
};
use crate::dyadic::DyadicWord;
use crate::error::Result;
use crate::measure::{density_at, partial_product, CylinderMeasureTable};
use crate::param::CircleParameter;
use crate::pressure::partition_pressure;
use crate::sequence::tm_prefix;
use crate::spectra::{
    birkhoff_spectrum, default_t_grid, linspace, lq_spectrum, quantization_dimension, spectral_dimension,
    uniform_lq, Pipeline,
};

/// Additive constant of the closing-word length envelope.
pub const CLOSING_SLACK: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Sizes of the checks; the quick profile stays well under a minute.
#[derive(Clone, Copy, Debug)]
struct Profile {
    theta_kmax: u32,
    empirical_len: usize,
    gibbs_depth: u32,
    lq_depth: u32,
    automaton_n: u32,
    automaton_m: u32,
    recursion_max: usize,
    extension_words: usize,
}

const QUICK: Profile = Profile {
    theta_kmax: 16,
    empirical_len: 1 << 16,
    gibbs_depth: 8,
    lq_depth: 10,
    automaton_n: 10,
    automaton_m: 4,
    recursion_max: 1 << 8,
    extension_words: 250,
};

const FULL: Profile = Profile {
    theta_kmax: 20,
    empirical_len: 1 << 18,
    gibbs_depth: 12,
    lq_depth: 12,
    automaton_n: 14,
    automaton_m: 6,
    recursion_max: 1 << 10,
    extension_words: 1000,
};

fn ratio(p: i64, q: u64) -> CircleParameter {
    CircleParameter::from_ratio(p, q).expect("valid literal parameter")
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match run() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs every check; `seed` drives the sampled points.
pub fn run_checks(quick: bool, seed: u64) -> Vec<CheckResult> {
    let prof = if quick { QUICK } else { FULL };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample_points: Vec<f64> = (0..100).map(|_| rng.gen::<f64>()).collect();
    let words: Vec<DyadicWord> = (0..prof.extension_words)
        .map(|_| {
            (0..4).fold(DyadicWord::empty(), |acc, _| {
                acc.concat(&DyadicWord::from_index(rng.gen(), 64))
            })
        })
        .collect();
    vec![
        check("eigenvalue closed forms", || {
            let zero = lambda1(&ratio(0, 1))?;
            let half = lambda1(&ratio(1, 2))?;
            let golden = (1.0 + 17f64.sqrt()) / 4.0;
            let ok = (zero.mid() - 2.0).abs() < 1e-10 && (half.mid() - golden).abs() < 1e-10;
            Ok((ok, format!("lambda1(0) = {zero}, lambda1(1/2) = {half}")))
        }),
        check("correlation exponent vs theta growth", || {
            let mut worst = 0.0f64;
            for p in [ratio(1, 2), ratio(1, 3), CircleParameter::from_real(0.3)?] {
                let d2 = correlation_exponent(&p)?.mid();
                let theta = theta_growth(&p, prof.theta_kmax)?;
                worst = worst.max((theta.slope - d2).abs());
            }
            Ok((worst <= 0.02, format!("largest gap {worst:.4}")))
        }),
        check("eta recursion vs empirical averages", || {
            let mut worst = 0.0f64;
            for p in [ratio(1, 2), ratio(1, 3), CircleParameter::from_real(0.3)?] {
                let table = eta_table(&p, 33)?;
                let prefix = tm_prefix(&p, prof.empirical_len + 33)?;
                for lag in 0..=32 {
                    let emp = empirical_eta(&prefix, lag, prof.empirical_len)?;
                    worst = worst.max((emp - table.get(lag)).norm());
                }
            }
            let tol = if quick { 4e-3 } else { 1e-3 };
            Ok((worst <= tol, format!("largest gap {worst:.2e}")))
        }),
        check("correlation matrix recursion", || {
            let mut worst = 0.0f64;
            for p in [ratio(1, 2), ratio(1, 3), CircleParameter::from_real(0.3)?] {
                let table = eta_table(&p, 4 * prof.recursion_max)?;
                let m = mc_matrix(&p);
                for n in 1..=prof.recursion_max {
                    let direct = table.state(2 * n)?;
                    let stepped = m.apply(&table.state(n)?);
                    let scale = direct.z.abs().max(1.0);
                    worst = worst.max((direct.z - stepped.z).abs() / scale);
                    worst = worst.max((direct.pi - stepped.pi).norm() / scale);
                }
            }
            Ok((worst <= 1e-10, format!("largest relative gap {worst:.2e}")))
        }),
        check("density vs Dirac comb", || {
            let mut worst = 0.0f64;
            for p in [ratio(1, 2), ratio(1, 3)] {
                let pp = partial_product(&p, 10)?;
                let prefix = tm_prefix(&p, 1 << 10)?;
                for &x in &sample_points {
                    let comb = prefix.exponential_sum(x).norm_sqr() / 1024.0;
                    worst = worst.max((density_at(&pp, x)? - comb).abs());
                }
            }
            Ok((worst <= 1e-6, format!("largest gap {worst:.2e}")))
        }),
        check("automaton counts vs enumeration", || {
            let mut mismatches = 0;
            for p in [ratio(1, 2), ratio(1, 3), ratio(2, 7)] {
                let coding = SingularityCoding::new(&p, prof.automaton_m as usize + 1)?;
                for m in 1..=prof.automaton_m {
                    let aut = forbidden_automaton(&coding, m)?;
                    let forbidden = aut.forbidden().to_vec();
                    for n in 1..=prof.automaton_n {
                        let brute = (0..1u64 << n)
                            .filter(|&w| is_admissible(w, n, m, &forbidden))
                            .count();
                        if aut.count_words(n) != brute as u128 {
                            mismatches += 1;
                        }
                    }
                }
            }
            let aut = forbidden_automaton(&SingularityCoding::new(&ratio(1, 3), 8)?, prof.automaton_m)?;
            let report = markov_check(&aut);
            let ok = mismatches == 0 && report.irreducible && report.aperiodic;
            Ok((
                ok,
                format!(
                    "{mismatches} mismatches; c = 1/3 mixing: {}",
                    report.irreducible && report.aperiodic
                ),
            ))
        }),
        check("closing extensions", || {
            let mut longest = 0usize;
            let limit = 20;
            for p in [ratio(1, 3), ratio(3, 10), ratio(2, 7)] {
                let coding = SingularityCoding::new(&p, 4 * 64 + limit)?;
                for w in &words {
                    for goal in [ExtensionGoal::LeaveNeighbourhood, ExtensionGoal::NoPrefix] {
                        longest = longest.max(extension_search(&coding, w, goal, limit)?.len());
                    }
                }
            }
            let envelope = closing_length_bound(256) + CLOSING_SLACK;
            Ok((
                longest as f64 <= envelope,
                format!("longest {longest}, envelope {envelope:.2}"),
            ))
        }),
        check("Gibbs sandwich", || {
            let mut violations = 0;
            for p in [ratio(1, 2), ratio(1, 3)] {
                let table = CylinderMeasureTable::new(&p, prof.gibbs_depth, crate::measure::DEFAULT_BUFFER)?;
                for j in 0..=prof.gibbs_depth {
                    violations += table.level(j).iter().filter(|m| m.clamped).count();
                }
            }
            Ok((
                violations == 0,
                format!("{violations} cylinders outside their window"),
            ))
        }),
        check("measure sums below sup-based pressure", || {
            let q = [0.5, 1.0, 2.0];
            let mut ok = true;
            for p in [ratio(1, 2), ratio(1, 3)] {
                let m = lq_spectrum(&p, &q, prof.lq_depth, Pipeline::MeasurePartition)?;
                let s = lq_spectrum(&p, &q, prof.lq_depth, Pipeline::PressurePartition)?;
                ok &= m.values().iter().zip(s.values()).all(|(a, b)| a.lo() <= b.hi());
            }
            Ok((
                ok,
                "beta from masses never exceeds the upper pressure bound".into(),
            ))
        }),
        check("zero temperature pressure", || {
            let est = partition_pressure(&ratio(1, 3), 0.0, 12, 3)?;
            Ok((est.value.contains(LN_2), format!("{}", est.value)))
        }),
        check("uniform spectrum harness", || {
            let beta = uniform_lq(&linspace(0.0, 2.0, 41), 10)?;
            let exact = beta
                .arguments()
                .iter()
                .zip(beta.values())
                .all(|(q, b)| (b.mid() - (1.0 - q)).abs() < 1e-12);
            let s = spectral_dimension(&beta)?;
            let d = quantization_dimension(&beta, 2.0)?;
            let ok = exact && (s.mid() - 0.5).abs() < 1e-12 && (d.mid() - 1.0).abs() < 1e-12;
            Ok((ok, format!("s = {s}, D_2 = {d}")))
        }),
        check("Birkhoff spectrum at 1/2", || {
            let b = birkhoff_spectrum(&ratio(1, 2), None, &default_t_grid(), prof.lq_depth)?;
            let apex = b.values.iter().map(|v| v.mid()).fold(f64::NEG_INFINITY, f64::max);
            let in_range = b.values.iter().all(|v| v.lo() >= 0.0 && v.hi() <= 1.0);
            Ok(((apex - 1.0).abs() <= 0.03 && in_range, format!("apex {apex:.4}")))
        }),
    ]
}
