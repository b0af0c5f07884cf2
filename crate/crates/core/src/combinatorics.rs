//! Words around the binary coding of the singularity: the neighbourhoods
//! `G_n`, hitting times, the forbidden-word subshift and extension search.

use std::collections::VecDeque;

use crate::dyadic::DyadicWord;
use crate::error::{Error, Result};
use crate::param::{CircleParameter, TorusPoint};
use crate::potential::ForbiddenZone;

/// Longest forbidden word handled by [`ForbiddenAutomaton`].
pub const MAX_AUTOMATON_DEPTH: u32 = 24;

/// Binary expansions of the singularity, both of them when it is dyadic.
#[derive(Clone, Debug)]
pub struct SingularityCoding {
    parameter: CircleParameter,
    primary: Vec<u8>,
    dual: Option<Vec<u8>>,
    /// First (1-based) position where the two expansions differ.
    split: Option<usize>,
}

impl SingularityCoding {
    /// Expansions up to `len` digits. For a float parameter every digit must
    /// be decided with a margin of `2^-52`, otherwise a precision error asks
    /// for exact input.
    pub fn new(param: &CircleParameter, len: usize) -> Result<Self> {
        match param.singular_point() {
            TorusPoint::Exact(r) => {
                let (s, d) = (r.num() as u128, r.den() as u128);
                let mut primary = Vec::with_capacity(len);
                let mut rem = s;
                for _ in 0..len {
                    rem *= 2;
                    let bit = (rem >= d) as u8;
                    rem -= bit as u128 * d;
                    primary.push(bit);
                }
                let (dual, split) = if r.is_dyadic() {
                    let k = r.den().trailing_zeros() as usize;
                    let dual: Vec<u8> = if k == 0 {
                        vec![1; len]
                    } else {
                        let below = r.num() - 1;
                        (0..len)
                            .map(|i| {
                                if i < k {
                                    ((below >> (k - 1 - i)) & 1) as u8
                                } else {
                                    1
                                }
                            })
                            .collect()
                    };
                    (Some(dual), Some(k.max(1)))
                } else {
                    (None, None)
                };
                Ok(SingularityCoding {
                    parameter: param.clone(),
                    primary,
                    dual,
                    split,
                })
            }
            TorusPoint::Float(x) => {
                let mut primary = Vec::with_capacity(len);
                for n in 1..=len {
                    let scaled = x * (n as f64).exp2();
                    let margin = (scaled - scaled.round()).abs() / (n as f64).exp2();
                    if margin < f64::EPSILON / 2.0 {
                        return Err(Error::PrecisionGuard(format!(
                            "digit {n} of the singularity {x} lies within 2^-52 of a dyadic \
                             boundary; pass c as an exact fraction"
                        )));
                    }
                    primary.push((scaled.floor() as u64 & 1) as u8);
                }
                Ok(SingularityCoding {
                    parameter: param.clone(),
                    primary,
                    dual: None,
                    split: None,
                })
            }
        }
    }

    pub fn parameter(&self) -> &CircleParameter {
        &self.parameter
    }

    pub fn len(&self) -> usize {
        self.primary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primary.is_empty()
    }

    pub fn is_dyadic(&self) -> bool {
        self.dual.is_some()
    }

    pub fn prefix(&self, n: usize) -> &[u8] {
        &self.primary[..n]
    }

    /// The other expansion of a dyadic singularity.
    pub fn dual_prefix(&self, n: usize) -> Option<&[u8]> {
        self.dual.as_ref().map(|d| &d[..n])
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::InvalidArgument(format!(
                "coding computed to {} digits, {n} needed",
                self.len()
            )));
        }
        Ok(())
    }

    /// Both expansions agree on the first `n` digits.
    fn expansions_agree(&self, n: usize) -> bool {
        self.split.is_none_or(|k| n < k)
    }

    /// Membership in `G_n`, `n = |v|`: the prefix plus `{0, +1, -1}` modulo
    /// `2^n`, or the two expansions once they differ.
    pub fn in_g(&self, v: &[u8]) -> bool {
        let n = v.len();
        if n == 0 {
            return true;
        }
        assert!(n <= self.len(), "coding too short for a word of length {n}");
        let p = &self.primary[..n];
        if !self.expansions_agree(n) {
            let d = &self.dual.as_ref().expect("dyadic coding")[..n];
            return v == p || v == d;
        }
        // v - p mod 2^n, least significant digit last
        let mut diff = vec![0u8; n];
        let mut borrow = 0i8;
        for i in (0..n).rev() {
            let mut x = v[i] as i8 - p[i] as i8 - borrow;
            borrow = (x < 0) as i8;
            if x < 0 {
                x += 2;
            }
            diff[i] = x as u8;
        }
        let zero = diff.iter().all(|&b| b == 0);
        let one = diff[..n - 1].iter().all(|&b| b == 0) && diff[n - 1] == 1;
        let minus_one = diff.iter().all(|&b| b == 1);
        zero || one || minus_one
    }

    /// A prefix of one of the expansions.
    pub fn is_prefix(&self, v: &[u8]) -> bool {
        let n = v.len();
        v == &self.primary[..n] || self.dual.as_ref().is_some_and(|d| v == &d[..n])
    }

    /// The words of `G_n`, sorted.
    pub fn g_n(&self, n: usize) -> Result<Vec<DyadicWord>> {
        if n == 0 {
            return Err(Error::InvalidArgument("G_n needs n >= 1".into()));
        }
        self.check_len(n)?;
        let mut words: Vec<DyadicWord> = if !self.expansions_agree(n) {
            vec![
                DyadicWord::new(self.primary[..n].to_vec())?,
                DyadicWord::new(self.dual.as_ref().expect("dyadic")[..n].to_vec())?,
            ]
        } else {
            let p = &self.primary[..n];
            let mut plus = p.to_vec();
            let mut minus = p.to_vec();
            add_one(&mut plus);
            sub_one(&mut minus);
            vec![
                DyadicWord::new(p.to_vec())?,
                DyadicWord::new(plus)?,
                DyadicWord::new(minus)?,
            ]
        };
        words.sort_by(|a, b| a.bits().cmp(b.bits()));
        words.dedup();
        Ok(words)
    }

    /// Forbidden `(m+1)`-words as integers: the prefix of the singularity and,
    /// when it differs there, the prefix of the dual expansion.
    pub fn forbidden_words(&self, m: u32) -> Result<Vec<u64>> {
        let len = m as usize + 1;
        self.check_len(len)?;
        let value = |bits: &[u8]| bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        let mut out = vec![value(&self.primary[..len])];
        if !self.expansions_agree(len) {
            out.push(value(&self.dual.as_ref().expect("dyadic")[..len]));
        }
        Ok(out)
    }

    /// The open arc covered by the forbidden cylinders, with the singularity
    /// itself when it is their common endpoint.
    pub fn forbidden_zone(&self, m: u32) -> Result<ForbiddenZone> {
        let words = self.forbidden_words(m)?;
        let first = words[0] as i64;
        let lo = if words.len() == 2 { first - 1 } else { first };
        Ok(ForbiddenZone {
            level: m + 1,
            lo,
            hi: first + 1,
        })
    }
}

fn add_one(bits: &mut [u8]) {
    for b in bits.iter_mut().rev() {
        if *b == 0 {
            *b = 1;
            return;
        }
        *b = 0;
    }
}

fn sub_one(bits: &mut [u8]) {
    for b in bits.iter_mut().rev() {
        if *b == 1 {
            *b = 0;
            return;
        }
        *b = 1;
    }
}

/// Hitting class of a position `k` of a word `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HittingClass {
    /// The whole suffix `w_k ... w_n` lies in `G`.
    Full,
    /// `w_k ... w_j` lies in `G` but `w_k ... w_{j+1}` does not (1-based `j`).
    Depth(usize),
}

/// Class of every position `k = 1..=|w|` (entry `k-1` of the result).
pub fn hitting_partition(coding: &SingularityCoding, w: &DyadicWord) -> Result<Vec<HittingClass>> {
    let bits = w.bits();
    let n = bits.len();
    coding.check_len(n)?;
    let classes: Vec<HittingClass> = (0..n)
        .map(|k| {
            if coding.in_g(&bits[k..]) {
                return HittingClass::Full;
            }
            // G is prefix closed, so membership stops at a single depth
            let mut j = k;
            while j < n && coding.in_g(&bits[k..=j]) {
                j += 1;
            }
            HittingClass::Depth(j)
        })
        .collect();
    debug_assert!(classes.iter().enumerate().all(|(k, c)| match c {
        HittingClass::Full => true,
        HittingClass::Depth(j) => *j > k && *j < n,
    }));
    Ok(classes)
}

/// Number of full hitting times.
pub fn kappa(coding: &SingularityCoding, w: &DyadicWord) -> Result<usize> {
    Ok(hitting_partition(coding, w)?
        .iter()
        .filter(|c| **c == HittingClass::Full)
        .count())
}

/// What an extension word has to achieve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionGoal {
    /// `w_{[k,n]} v` outside `G` for every `k`.
    LeaveNeighbourhood,
    /// No suffix of `w v` is a prefix of the singularity's expansion.
    NoPrefix,
}

/// `2 log_2 log_{3/2} n`, the asymptotic length bound for closing words.
pub fn closing_length_bound(n: usize) -> f64 {
    2.0 * ((n as f64).ln() / 1.5f64.ln()).log2()
}

/// Shortest extension (lexicographically first among the shortest) meeting
/// `goal`, searching lengths up to `max_len`.
pub fn extension_search(
    coding: &SingularityCoding,
    w: &DyadicWord,
    goal: ExtensionGoal,
    max_len: usize,
) -> Result<DyadicWord> {
    if goal == ExtensionGoal::NoPrefix {
        let p = coding.parameter();
        if p.is_zero() || p.is_half() {
            return Err(Error::InvalidArgument(
                "a suffix always prefixes the singularity when c is 0 or 1/2".into(),
            ));
        }
    }
    let n = w.len();
    coding.check_len(n + max_len)?;
    let bits = w.bits();
    let full_positions: Vec<usize> = (0..n).filter(|&k| coding.in_g(&bits[k..])).collect();
    let mut queue: VecDeque<Vec<u8>> = VecDeque::from([Vec::new()]);
    let mut buf = Vec::with_capacity(n + max_len);
    while let Some(v) = queue.pop_front() {
        buf.clear();
        buf.extend_from_slice(bits);
        buf.extend_from_slice(&v);
        let ok = match goal {
            ExtensionGoal::LeaveNeighbourhood => full_positions.iter().all(|&k| !coding.in_g(&buf[k..])),
            ExtensionGoal::NoPrefix => (0..buf.len()).all(|k| !coding.is_prefix(&buf[k..])),
        };
        if ok {
            return DyadicWord::new(v);
        }
        if v.len() < max_len {
            for b in [0u8, 1] {
                let mut next = v.clone();
                next.push(b);
                queue.push_back(next);
            }
        }
    }
    Err(Error::Invariant(format!(
        "no extension of length <= {max_len} for {w} at c = {}",
        coding.parameter()
    )))
}

/// Whether the length-`n` word `w` avoids every forbidden `(m+1)`-word.
pub fn is_admissible(w: u64, n: u32, m: u32, forbidden: &[u64]) -> bool {
    let len = m + 1;
    if n < len {
        return true;
    }
    let mask = (1u64 << len) - 1;
    (0..=n - len).all(|shift| !forbidden.contains(&((w >> shift) & mask)))
}

/// Admissibility of every word of length `n`, indexed by value.
pub fn admissible_mask(n: u32, m: u32, forbidden: &[u64]) -> Vec<bool> {
    let len = m + 1;
    let window = (1u64 << len) - 1;
    let mut mask = vec![true; 1];
    for level in 1..=n {
        let lower = (1usize << (level - 1)) - 1;
        mask = (0..1usize << level)
            .map(|w| {
                let tail_ok = mask[w & lower];
                let head_ok = level < len || !forbidden.contains(&((w as u64 >> (level - len)) & window));
                tail_ok && head_ok
            })
            .collect();
    }
    mask
}

/// Transition graph on admissible `(m+1)`-words, appending one letter.
#[derive(Clone, Debug)]
pub struct ForbiddenAutomaton {
    m: u32,
    forbidden: Vec<u64>,
    states: Vec<u64>,
    transitions: Vec<[Option<usize>; 2]>,
}

pub fn forbidden_automaton(coding: &SingularityCoding, m: u32) -> Result<ForbiddenAutomaton> {
    if m == 0 || m > MAX_AUTOMATON_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "depth m = {m} outside [1, {MAX_AUTOMATON_DEPTH}]"
        )));
    }
    let forbidden = coding.forbidden_words(m)?;
    let size = 1usize << (m + 1);
    let mut index = vec![None; size];
    let mut states = Vec::with_capacity(size);
    for w in 0..size as u64 {
        if !forbidden.contains(&w) {
            index[w as usize] = Some(states.len());
            states.push(w);
        }
    }
    let mask = size as u64 - 1;
    let transitions = states
        .iter()
        .map(|&s| [0u64, 1].map(|a| index[(((s << 1) | a) & mask) as usize]))
        .collect();
    Ok(ForbiddenAutomaton {
        m,
        forbidden,
        states,
        transitions,
    })
}

impl ForbiddenAutomaton {
    pub fn depth(&self) -> u32 {
        self.m
    }

    pub fn forbidden(&self) -> &[u64] {
        &self.forbidden
    }

    /// Admissible `(m+1)`-words.
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn transitions(&self) -> &[[Option<usize>; 2]] {
        &self.transitions
    }

    /// 0/1 transition matrix.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        let k = self.states.len();
        self.transitions
            .iter()
            .map(|t| {
                let mut row = vec![0u8; k];
                for j in t.iter().flatten() {
                    row[*j] = 1;
                }
                row
            })
            .collect()
    }

    /// Number of admissible words of length `n`.
    pub fn count_words(&self, n: u32) -> u128 {
        let len = self.m + 1;
        if n < len {
            return 1u128 << n;
        }
        let mut counts = vec![1u128; self.states.len()];
        for _ in len..n {
            let mut next = vec![0u128; counts.len()];
            for (i, t) in self.transitions.iter().enumerate() {
                for j in t.iter().flatten() {
                    next[*j] += counts[i];
                }
            }
            counts = next;
        }
        counts.iter().sum()
    }
}

/// Recurrence structure of the admissible-word graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkovReport {
    /// States left after repeatedly removing states without successors or
    /// predecessors.
    pub essential_states: usize,
    /// The essential part is one strongly connected component.
    pub irreducible: bool,
    /// gcd of cycle lengths of the essential part (0 when empty).
    pub period: usize,
    pub aperiodic: bool,
    /// Perron root of the transition matrix.
    pub spectral_radius: f64,
}

pub fn markov_check(aut: &ForbiddenAutomaton) -> MarkovReport {
    let k = aut.states.len();
    let succ: Vec<Vec<usize>> = aut
        .transitions
        .iter()
        .map(|t| t.iter().flatten().copied().collect())
        .collect();
    let mut alive = vec![true; k];
    loop {
        let mut indeg = vec![0usize; k];
        let mut outdeg = vec![0usize; k];
        for i in (0..k).filter(|&i| alive[i]) {
            for &j in succ[i].iter().filter(|&&j| alive[j]) {
                outdeg[i] += 1;
                indeg[j] += 1;
            }
        }
        let mut changed = false;
        for i in 0..k {
            if alive[i] && (indeg[i] == 0 || outdeg[i] == 0) {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let essential: Vec<usize> = (0..k).filter(|&i| alive[i]).collect();
    let spectral_radius = perron_root(&succ, &alive);
    if essential.is_empty() {
        return MarkovReport {
            essential_states: 0,
            irreducible: false,
            period: 0,
            aperiodic: false,
            spectral_radius,
        };
    }
    let root = essential[0];
    let bfs = |adj: &dyn Fn(usize) -> Vec<usize>| -> Vec<Option<usize>> {
        let mut level = vec![None; k];
        level[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in adj(u) {
                if alive[v] && level[v].is_none() {
                    level[v] = Some(level[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        level
    };
    let pred: Vec<Vec<usize>> = {
        let mut p = vec![Vec::new(); k];
        for (i, s) in succ.iter().enumerate() {
            for &j in s {
                p[j].push(i);
            }
        }
        p
    };
    let forward = bfs(&|u| succ[u].clone());
    let backward = bfs(&|u| pred[u].clone());
    let irreducible = essential
        .iter()
        .all(|&i| forward[i].is_some() && backward[i].is_some());
    let mut period = 0usize;
    if irreducible {
        for &u in &essential {
            for &v in succ[u].iter().filter(|&&v| alive[v]) {
                let (lu, lv) = (forward[u].unwrap() as i64, forward[v].unwrap() as i64);
                period = num_integer::gcd(period, (lu + 1 - lv).unsigned_abs() as usize);
            }
        }
    }
    MarkovReport {
        essential_states: essential.len(),
        irreducible,
        period,
        aperiodic: irreducible && period == 1,
        spectral_radius,
    }
}

/// Power iteration on `A + I`, which shares the Perron vector of `A` and has
/// no other eigenvalue on its spectral circle.
fn perron_root(succ: &[Vec<usize>], alive: &[bool]) -> f64 {
    if !alive.iter().any(|&a| a) {
        return 0.0;
    }
    let k = succ.len();
    let mut x: Vec<f64> = alive.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
    let mut estimate = 0.0;
    for _ in 0..100_000 {
        let mut y = x.clone();
        for i in 0..k {
            for &j in &succ[i] {
                y[j] += x[i];
            }
        }
        let norm: f64 = y.iter().sum();
        let next = norm / x.iter().sum::<f64>();
        x = y.iter().map(|v| v / norm).collect();
        if (next - estimate).abs() < 1e-14 * next {
            estimate = next;
            break;
        }
        estimate = next;
    }
    estimate - 1.0
}
