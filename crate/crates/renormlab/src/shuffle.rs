//! Symbolic layer: shuffle permutations read off superattracting orbits,
//! itinerary patterns and their kneading order, the tuning (star) product,
//! and signed ordered semigroups with unimodal/admissible return-type
//! homomorphisms.
//!
//! Conventions. Orbit points are labeled left to right, 1-based. The
//! quadratic family has a minimum at the critical point, so a realized
//! permutation decreases strictly up to the critical index (the position of
//! 0 in the sorted orbit, equivalently the index mapping to 1) and increases
//! strictly after it. Itinerary symbols L/C/R are sides relative to 0; the
//! L branch reverses orientation.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::QuadParam;

#[derive(Debug, Error, PartialEq)]
pub enum ShuffleError {
    #[error("permutation is not a bijection on 1..={0}")]
    MalformedPermutation(usize),
    #[error("period must be at least 2, got {0}")]
    PeriodTooShort(usize),
    #[error("permutation is not a single cycle")]
    NotACycle,
    #[error("permutation is not unimodal")]
    NotUnimodal,
    #[error("blocks of {0} consecutive indices are permuted block-wise")]
    Renormalizable(usize),
    #[error("critical orbit does not close up with period {period} (|f^p(0)| = {residual:e})")]
    NotSuperattracting { period: usize, residual: f64 },
    #[error("orbit points too close to order reliably (gap {gap:e} vs diameter {diam:e})")]
    OrbitCollision { gap: f64, diam: f64 },
    #[error("parameter solver failed: {0}")]
    SolverFailure(String),
    #[error("cannot parse cycle notation: {0}")]
    Parse(String),
}

/// Itinerary symbol relative to the critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symbol {
    L,
    C,
    R,
}

impl Symbol {
    fn spatial_rank(self) -> i32 {
        match self {
            Symbol::L => -1,
            Symbol::C => 0,
            Symbol::R => 1,
        }
    }

    pub fn flip(self) -> Symbol {
        match self {
            Symbol::L => Symbol::R,
            Symbol::R => Symbol::L,
            Symbol::C => Symbol::C,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ch = match self {
            Symbol::L => 'L',
            Symbol::C => 'C',
            Symbol::R => 'R',
        };
        write!(f, "{ch}")
    }
}

/// Compares the orbit points at times `t` and `u` (1-based, `pattern[k]` is
/// the symbol of `f^{k+1}(0)`) in the signed lexicographic itinerary order:
/// the accumulated orientation over the common prefix flips on every L.
pub(crate) fn cmp_orbit_times(pattern: &[Symbol], t: usize, u: usize) -> Ordering {
    if t == u {
        return Ordering::Equal;
    }
    let p = pattern.len();
    let mut sign = 1i32;
    for j in 0..2 * p {
        let a = pattern[(t - 1 + j) % p];
        let b = pattern[(u - 1 + j) % p];
        if a != b {
            let ord = (sign * a.spatial_rank()).cmp(&(sign * b.spatial_rank()));
            return ord;
        }
        match a {
            Symbol::L => sign = -sign,
            Symbol::C => return Ordering::Equal,
            Symbol::R => {}
        }
    }
    Ordering::Equal
}

/// Sorts the `p` orbit points of a superattracting pattern by the itinerary
/// order and returns `(perm, crit)`, both 1-based: `perm[i-1]` is the image
/// of the i-th point from the left, `crit` the position of the critical
/// point.
pub(crate) fn orbit_order_from_pattern(pattern: &[Symbol]) -> (Vec<usize>, usize) {
    let p = pattern.len();
    debug_assert!(p >= 1);
    debug_assert_eq!(pattern[p - 1], Symbol::C, "pattern must close at the critical point");
    let mut times: Vec<usize> = (1..=p).collect();
    times.sort_by(|&a, &b| cmp_orbit_times(pattern, a, b));
    let mut rank = vec![0usize; p + 1];
    for (i, &t) in times.iter().enumerate() {
        rank[t] = i + 1;
    }
    let mut perm = vec![0usize; p];
    for t in 1..=p {
        let next = if t == p { 1 } else { t + 1 };
        perm[rank[t] - 1] = rank[next];
    }
    (perm, rank[p])
}

/// A unimodal non-renormalizable permutation on a labeled superattracting
/// orbit. `tuned_block` records the block size when the permutation carries a
/// tuning block structure (star products and tuned centers); plain validation
/// rejects such permutations instead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shuffle {
    images: Vec<usize>,
    tuned_block: Option<usize>,
}

impl Shuffle {
    /// The trivial period-1 permutation, the identity of the star product.
    pub fn identity() -> Shuffle {
        Shuffle {
            images: vec![0],
            tuned_block: None,
        }
    }

    pub fn sigma2() -> Shuffle {
        validate_shuffle(&[2, 1]).unwrap()
    }

    pub fn sigma3() -> Shuffle {
        validate_shuffle(&[3, 1, 2]).unwrap()
    }

    pub fn period(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based index `i`.
    pub fn image_of(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    /// 1-based position of the critical point in the sorted orbit (the index
    /// mapping to the leftmost point).
    pub fn critical_index(&self) -> usize {
        if self.period() == 1 {
            return 1;
        }
        self.images.iter().position(|&v| v == 0).unwrap() + 1
    }

    pub fn is_sigma2(&self) -> bool {
        self.period() == 2
    }

    pub fn tuned_block(&self) -> Option<usize> {
        self.tuned_block
    }

    /// Itinerary of the center orbit: symbols of `f(0), ..., f^p(0)`, the
    /// last one C.
    pub fn pattern(&self) -> Vec<Symbol> {
        let p = self.period();
        let crit = self.critical_index() - 1;
        let mut pos = crit;
        let mut out = Vec::with_capacity(p);
        for _ in 0..p {
            pos = self.images[pos];
            out.push(match pos.cmp(&crit) {
                Ordering::Less => Symbol::L,
                Ordering::Equal => Symbol::C,
                Ordering::Greater => Symbol::R,
            });
        }
        out
    }

    /// One-line cycle notation starting at 1, e.g. `(1 3 2)`.
    pub fn cycle_notation(&self) -> String {
        let mut out = String::from("(");
        let mut i = 0usize;
        loop {
            out.push_str(&(i + 1).to_string());
            i = self.images[i];
            if i == 0 {
                break;
            }
            out.push(' ');
        }
        out.push(')');
        out
    }

    /// Parses the output of [`Shuffle::cycle_notation`] and re-validates.
    pub fn from_cycle_notation(text: &str) -> Result<Shuffle, ShuffleError> {
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| ShuffleError::Parse(text.to_string()))?;
        let entries: Vec<usize> = inner
            .split_whitespace()
            .map(|tok| tok.parse::<usize>().map_err(|_| ShuffleError::Parse(text.to_string())))
            .collect::<Result<_, _>>()?;
        if entries.is_empty() || entries[0] != 1 {
            return Err(ShuffleError::Parse(text.to_string()));
        }
        let p = entries.len();
        let mut perm = vec![0usize; p];
        for k in 0..p {
            let from = entries[k];
            let to = entries[(k + 1) % p];
            if from == 0 || from > p || to == 0 || to > p {
                return Err(ShuffleError::Parse(text.to_string()));
            }
            perm[from - 1] = to;
        }
        validate_with_blocks(&perm)
    }
}

impl fmt::Display for Shuffle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_notation())
    }
}

fn check_bijection(perm: &[usize]) -> Result<(), ShuffleError> {
    let p = perm.len();
    let mut seen = vec![false; p + 1];
    for &v in perm {
        if v == 0 || v > p || seen[v] {
            return Err(ShuffleError::MalformedPermutation(p));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Smallest block size `q` (1 < q < p, q | p) for which consecutive q-blocks
/// are permuted block-wise, if any.
fn block_structure(perm: &[usize]) -> Option<usize> {
    let p = perm.len();
    for q in 2..p {
        if p % q != 0 {
            continue;
        }
        let blocks = p / q;
        let mut ok = true;
        'outer: for b in 0..blocks {
            let target = (perm[b * q] - 1) / q;
            for i in 0..q {
                if (perm[b * q + i] - 1) / q != target {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok {
            return Some(q);
        }
    }
    None
}

fn check_single_cycle(perm: &[usize]) -> Result<(), ShuffleError> {
    let p = perm.len();
    let mut i = 0usize;
    for _ in 0..p {
        i = perm[i] - 1;
    }
    // a permutation returns to the start exactly at a multiple of the cycle
    // length through 1
    let mut len = 1usize;
    let mut j = perm[0] - 1;
    while j != 0 {
        j = perm[j] - 1;
        len += 1;
    }
    if len != p {
        return Err(ShuffleError::NotACycle);
    }
    let _ = i;
    Ok(())
}

fn check_unimodal(perm: &[usize]) -> Result<usize, ShuffleError> {
    let p = perm.len();
    let crit = perm
        .iter()
        .position(|&v| v == 1)
        .ok_or(ShuffleError::NotUnimodal)?;
    for i in 1..=crit {
        if perm[i] >= perm[i - 1] {
            return Err(ShuffleError::NotUnimodal);
        }
    }
    for i in crit + 1..p {
        if perm[i] <= perm[i - 1] {
            return Err(ShuffleError::NotUnimodal);
        }
    }
    Ok(crit + 1)
}

/// Validates a 1-based permutation as a shuffle. The block test runs before
/// the cycle test: a tuned (block-wise) permutation reports its block size
/// regardless of its cycle structure.
pub fn validate_shuffle(perm: &[usize]) -> Result<Shuffle, ShuffleError> {
    if perm.len() < 2 {
        return Err(ShuffleError::PeriodTooShort(perm.len()));
    }
    check_bijection(perm)?;
    if let Some(q) = block_structure(perm) {
        return Err(ShuffleError::Renormalizable(q));
    }
    check_single_cycle(perm)?;
    check_unimodal(perm)?;
    Ok(Shuffle {
        images: perm.iter().map(|&v| v - 1).collect(),
        tuned_block: None,
    })
}

/// Like [`validate_shuffle`] but records a block structure instead of
/// rejecting it; used when reading permutations off tuned centers.
fn validate_with_blocks(perm: &[usize]) -> Result<Shuffle, ShuffleError> {
    if perm.len() < 2 {
        return Err(ShuffleError::PeriodTooShort(perm.len()));
    }
    check_bijection(perm)?;
    let tuned_block = block_structure(perm);
    check_single_cycle(perm)?;
    check_unimodal(perm)?;
    Ok(Shuffle {
        images: perm.iter().map(|&v| v - 1).collect(),
        tuned_block,
    })
}

/// Reads the permutation induced by `f_c` on its superattracting orbit of
/// period `p`, labeled left to right. Tuned centers come back with their
/// block size recorded.
pub fn shuffle_of_center(c: QuadParam, p: usize) -> Result<Shuffle, ShuffleError> {
    let cr = c.c().re;
    let mut orbit = Vec::with_capacity(p);
    let mut x = 0.0f64;
    for k in 0..p {
        if k > 0 && x.abs() <= 1e-9 {
            return Err(ShuffleError::NotSuperattracting {
                period: p,
                residual: x.abs(),
            });
        }
        orbit.push(x);
        x = x * x + cr;
    }
    if x.abs() > 1e-9 {
        return Err(ShuffleError::NotSuperattracting {
            period: p,
            residual: x.abs(),
        });
    }
    if p < 2 {
        return Err(ShuffleError::PeriodTooShort(p));
    }
    let mut sorted: Vec<(f64, usize)> = orbit.iter().copied().zip(0..p).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let diam = sorted[p - 1].0 - sorted[0].0;
    for w in sorted.windows(2) {
        let gap = w[1].0 - w[0].0;
        if gap <= 1e-6 * diam {
            return Err(ShuffleError::OrbitCollision { gap, diam });
        }
    }
    let mut rank = vec![0usize; p];
    for (i, &(_, t)) in sorted.iter().enumerate() {
        rank[t] = i + 1;
    }
    let mut perm = vec![0usize; p];
    for t in 0..p {
        perm[rank[t] - 1] = rank[(t + 1) % p];
    }
    validate_with_blocks(&perm)
}

/// The essentially-period-tripling shuffle of period `3n + 2`, realized by
/// solving for its center and reading the orbit permutation; results are
/// memoized.
pub fn sigma3_n(n: usize) -> Result<Shuffle, ShuffleError> {
    assert!(n >= 1, "sigma3_n requires n >= 1");
    static CACHE: OnceLock<Mutex<HashMap<usize, Shuffle>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&n) {
        return Ok(s.clone());
    }
    let c = crate::solver::sigma3_center(n).map_err(|e| ShuffleError::SolverFailure(e.to_string()))?;
    let s = shuffle_of_center(QuadParam::real(c.c).unwrap(), 3 * n + 2)?;
    cache.lock().unwrap().insert(n, s.clone());
    Ok(s)
}

/// Itinerary pattern of the period-`3n+2` essentially-period-tripling center:
/// `LR (LLR)^(n-1) LLC`. Used to seed the parameter solver; the realized
/// orbit permutation is cross-checked against it.
pub fn sigma3_pattern(n: usize) -> Vec<Symbol> {
    let mut pat = vec![Symbol::L, Symbol::R];
    for _ in 1..n {
        pat.extend_from_slice(&[Symbol::L, Symbol::L, Symbol::R]);
    }
    pat.extend_from_slice(&[Symbol::L, Symbol::L, Symbol::C]);
    pat
}

/// Tuning product on patterns: each inner symbol is appended after a copy of
/// the outer pattern body, flipped when the outer body has an odd number of
/// orientation-reversing (L) branches.
pub fn star_pattern(outer: &[Symbol], inner: &[Symbol]) -> Vec<Symbol> {
    let body = &outer[..outer.len() - 1];
    let reversing = body.iter().filter(|&&s| s == Symbol::L).count() % 2 == 1;
    let mut out = Vec::with_capacity(outer.len() * inner.len());
    for &q in inner {
        out.extend_from_slice(body);
        out.push(if reversing { q.flip() } else { q });
    }
    out
}

/// Star (tuning) product. The result has period `p1 * p2` and carries the
/// inner block structure whenever both factors are nontrivial.
pub fn star_product(outer: &Shuffle, inner: &Shuffle) -> Shuffle {
    if inner.period() == 1 {
        return outer.clone();
    }
    if outer.period() == 1 {
        return inner.clone();
    }
    let pattern = star_pattern(&outer.pattern(), &inner.pattern());
    let (perm, _) = orbit_order_from_pattern(&pattern);
    validate_with_blocks(&perm).expect("star product of valid shuffles is a valid tuned permutation")
}

// ---------------------------------------------------------------------------
// Signed ordered semigroups and return-type homomorphisms
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq)]
pub enum SemigroupError {
    #[error("expected exactly one central generator at position 0, found {0}")]
    CentralCount(usize),
    #[error("duplicate generator position {0}")]
    DuplicatePosition(i32),
    #[error("sign must be +1 or -1, got {0}")]
    BadSign(i8),
    #[error("word for generator {0} refers to unknown target position {1}")]
    UnknownLetter(i32, i32),
    #[error("word for generator {0} is empty")]
    EmptyWord(i32),
    #[error("source/target of composed homomorphisms do not match")]
    Mismatch,
    #[error("cannot parse: {0}")]
    Parse(String),
}

/// Free ordered signed semigroup: interval symbols at integer positions with
/// exactly one central generator at position 0, each carrying a sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedSemigroup {
    /// `(position, sign)` sorted by position.
    gens: Vec<(i32, i8)>,
}

impl SignedSemigroup {
    pub fn new(mut gens: Vec<(i32, i8)>) -> Result<Self, SemigroupError> {
        gens.sort_by_key(|g| g.0);
        let central = gens.iter().filter(|g| g.0 == 0).count();
        if central != 1 {
            return Err(SemigroupError::CentralCount(central));
        }
        for w in gens.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(SemigroupError::DuplicatePosition(w[0].0));
            }
        }
        for &(_, s) in &gens {
            if s != 1 && s != -1 {
                return Err(SemigroupError::BadSign(s));
            }
        }
        Ok(SignedSemigroup { gens })
    }

    /// The base semigroup of the initial partition: `-I_-1`, `+I_0`, `+I_1`.
    pub fn gamma0() -> SignedSemigroup {
        SignedSemigroup::new(vec![(-1, -1), (0, 1), (1, 1)]).unwrap()
    }

    pub fn positions(&self) -> impl Iterator<Item = i32> + '_ {
        self.gens.iter().map(|g| g.0)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn sign_of(&self, pos: i32) -> Option<i8> {
        self.gens.iter().find(|g| g.0 == pos).map(|g| g.1)
    }

    pub fn contains(&self, pos: i32) -> bool {
        self.sign_of(pos).is_some()
    }

    /// Sign of a word as the product of its generator signs.
    pub fn word_sign(&self, word: &[i32]) -> Option<i8> {
        let mut s = 1i8;
        for &p in word {
            s *= self.sign_of(p)?;
        }
        Some(s)
    }

    pub fn to_text(&self) -> String {
        self.gens
            .iter()
            .map(|&(p, s)| format!("{}I_{}", if s > 0 { '+' } else { '-' }, p))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Homomorphism between signed semigroups given by the image word of each
/// source generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnHom {
    pub source: SignedSemigroup,
    pub target: SignedSemigroup,
    /// Image words, parallel to `source.gens`.
    words: Vec<Vec<i32>>,
}

impl ReturnHom {
    pub fn new(
        source: SignedSemigroup,
        target: SignedSemigroup,
        words_by_pos: Vec<(i32, Vec<i32>)>,
    ) -> Result<Self, SemigroupError> {
        let mut words = vec![None; source.gens.len()];
        for (pos, w) in words_by_pos {
            let idx = source
                .gens
                .iter()
                .position(|g| g.0 == pos)
                .ok_or(SemigroupError::UnknownLetter(pos, pos))?;
            if w.is_empty() {
                return Err(SemigroupError::EmptyWord(pos));
            }
            for &letter in &w {
                if !target.contains(letter) {
                    return Err(SemigroupError::UnknownLetter(pos, letter));
                }
            }
            words[idx] = Some(w);
        }
        let words = words
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or(SemigroupError::EmptyWord(source.gens[i].0)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ReturnHom {
            source,
            target,
            words,
        })
    }

    pub fn word_of(&self, pos: i32) -> Option<&[i32]> {
        let idx = self.source.gens.iter().position(|g| g.0 == pos)?;
        Some(&self.words[idx])
    }

    /// `I_j -> word` lines, one per source generator in position order.
    pub fn to_text(&self) -> String {
        self.source
            .gens
            .iter()
            .zip(&self.words)
            .map(|(&(pos, _), w)| {
                let word = w
                    .iter()
                    .map(|l| format!("I_{l}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                format!("I_{pos} -> {word}")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Unimodality: every image word ends with the central target generator and
/// the first letters are weakly monotone in the source position with one
/// extremum at the center.
pub fn is_unimodal(hom: &ReturnHom) -> bool {
    for w in &hom.words {
        if *w.last().unwrap() != 0 {
            return false;
        }
    }
    let firsts: Vec<i32> = hom.words.iter().map(|w| w[0]).collect();
    let ci = hom
        .source
        .gens
        .iter()
        .position(|g| g.0 == 0)
        .expect("validated semigroup has a central generator");
    let weakly = |slice: &[i32], up: bool| {
        slice
            .windows(2)
            .all(|w| if up { w[1] >= w[0] } else { w[1] <= w[0] })
    };
    let valley = weakly(&firsts[..=ci], false) && weakly(&firsts[ci..], true);
    let ridge = weakly(&firsts[..=ci], true) && weakly(&firsts[ci..], false);
    valley || ridge
}

/// Admissibility: `eps'(I_j) = sgn(j) eps(chi(I_j))` off the center and
/// `eps'(I_0) = eps(chi(I_0))` at it.
pub fn is_admissible(hom: &ReturnHom) -> bool {
    if !is_unimodal(hom) {
        return false;
    }
    for (&(pos, sign), w) in hom.source.gens.iter().zip(&hom.words) {
        let Some(ws) = hom.target.word_sign(w) else {
            return false;
        };
        let expect = if pos == 0 {
            ws
        } else if pos > 0 {
            ws
        } else {
            -ws
        };
        if sign != expect {
            return false;
        }
    }
    true
}

/// Zero-admissibility: admissible into the base semigroup with every word of
/// the shape `I_-1 I_1^p I_0`, `p >= 1` on the central generator.
pub fn is_zero_admissible(hom: &ReturnHom) -> bool {
    if hom.target != SignedSemigroup::gamma0() || !is_admissible(hom) {
        return false;
    }
    for (&(pos, _), w) in hom.source.gens.iter().zip(&hom.words) {
        if w[0] != -1 || *w.last().unwrap() != 0 {
            return false;
        }
        let inner = &w[1..w.len() - 1];
        if inner.iter().any(|&l| l != 1) {
            return false;
        }
        if pos == 0 && inner.is_empty() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_named_shuffles() {
        let s2 = validate_shuffle(&[2, 1]).unwrap();
        assert!(s2.is_sigma2());
        assert_eq!(s2.cycle_notation(), "(1 2)");

        let s3 = validate_shuffle(&[3, 1, 2]).unwrap();
        assert_eq!(s3.period(), 3);
        assert_eq!(s3.critical_index(), 2);
        assert_eq!(s3.cycle_notation(), "(1 3 2)");
    }

    #[test]
    fn validate_rejects_blockwise_permutation() {
        // Blocks {1,2} and {3,4} swap block-wise.
        assert_eq!(
            validate_shuffle(&[3, 4, 1, 2]),
            Err(ShuffleError::Renormalizable(2))
        );
        // The realized doubling permutation is also block-wise.
        assert_eq!(
            validate_shuffle(&[4, 3, 1, 2]),
            Err(ShuffleError::Renormalizable(2))
        );
    }

    #[test]
    fn validate_rejects_non_cycles_and_non_unimodal() {
        assert_eq!(validate_shuffle(&[1, 2]), Err(ShuffleError::NotACycle));
        // Single 4-cycle, but images (2,4,1,3) rise before reaching 1.
        assert_eq!(validate_shuffle(&[2, 4, 1, 3]), Err(ShuffleError::NotUnimodal));
        assert_eq!(
            validate_shuffle(&[2, 2]),
            Err(ShuffleError::MalformedPermutation(2))
        );
        assert_eq!(validate_shuffle(&[1]), Err(ShuffleError::PeriodTooShort(1)));
    }

    #[test]
    fn shuffle_of_center_basilica_and_triple() {
        let s = shuffle_of_center(QuadParam::real(-1.0).unwrap(), 2).unwrap();
        assert_eq!(s, Shuffle::sigma2());

        // Real root of c^3 + 2c^2 + c + 1.
        let c3 = -1.7548776662466927;
        let s = shuffle_of_center(QuadParam::real(c3).unwrap(), 3).unwrap();
        assert_eq!(s.cycle_notation(), "(1 3 2)");

        assert!(matches!(
            shuffle_of_center(QuadParam::real(0.0).unwrap(), 2),
            Err(ShuffleError::NotSuperattracting { .. })
        ));
    }

    #[test]
    fn pattern_round_trip_via_order() {
        for perm in [vec![2usize, 1], vec![3, 1, 2]] {
            let s = validate_shuffle(&perm).unwrap();
            let (perm2, crit) = orbit_order_from_pattern(&s.pattern());
            assert_eq!(perm, perm2);
            assert_eq!(crit, s.critical_index());
        }
    }

    #[test]
    fn star_product_doubling_and_identity() {
        let s2 = Shuffle::sigma2();
        let d = star_product(&s2, &s2);
        assert_eq!(d.period(), 4);
        assert_eq!(d.tuned_block(), Some(2));
        // Matches the permutation realized at the period-4 doubling center.
        let images: Vec<usize> = (1..=4).map(|i| d.image_of(i)).collect();
        assert_eq!(images, vec![4, 3, 1, 2]);

        let s3 = Shuffle::sigma3();
        assert_eq!(star_product(&s3, &Shuffle::identity()), s3);
        assert_eq!(star_product(&Shuffle::identity(), &s3), s3);
    }

    #[test]
    fn star_product_period_multiplies() {
        let s2 = Shuffle::sigma2();
        let s3 = Shuffle::sigma3();
        assert_eq!(star_product(&s3, &s2).period(), 6);
        assert_eq!(star_product(&s2, &s3).period(), 6);
        let t = star_product(&star_product(&s2, &s2), &s2);
        assert_eq!(t.period(), 8);
    }

    #[test]
    fn cycle_notation_round_trip() {
        let s3 = Shuffle::sigma3();
        let text = s3.cycle_notation();
        let back = Shuffle::from_cycle_notation(&text).unwrap();
        assert_eq!(s3, back);
    }

    fn gamma() -> SignedSemigroup {
        SignedSemigroup::new(vec![(-1, 1), (0, -1)]).unwrap()
    }

    #[test]
    fn admissibility_of_paper_homomorphisms() {
        // chi: I_-1 -> I_-1 I_0, I_0 -> I_0 over Gamma = <+I_-1, -I_0>.
        let chi = ReturnHom::new(
            gamma(),
            gamma(),
            vec![(-1, vec![-1, 0]), (0, vec![0])],
        )
        .unwrap();
        assert!(is_admissible(&chi));
        assert!(!is_zero_admissible(&chi));

        // chi_0 into Gamma_0: I_-1 -> I_-1 I_0, I_0 -> I_-1 I_1 I_0.
        let chi0 = ReturnHom::new(
            gamma(),
            SignedSemigroup::gamma0(),
            vec![(-1, vec![-1, 0]), (0, vec![-1, 1, 0])],
        )
        .unwrap();
        assert!(is_admissible(&chi0));
        assert!(is_zero_admissible(&chi0));

        // A word that does not end centrally is not unimodal.
        let bad = ReturnHom::new(
            gamma(),
            gamma(),
            vec![(-1, vec![0, -1]), (0, vec![0])],
        )
        .unwrap();
        assert!(!is_unimodal(&bad));
        assert!(!is_admissible(&bad));
    }

    #[test]
    fn zero_admissible_requires_right_visit() {
        // I_0 -> I_-1 I_0 has p_0 = 0: the sigma2 shape is excluded.
        let g1 = SignedSemigroup::new(vec![(0, -1)]).unwrap();
        let chi = ReturnHom::new(g1, SignedSemigroup::gamma0(), vec![(0, vec![-1, 0])]).unwrap();
        assert!(is_admissible(&chi));
        assert!(!is_zero_admissible(&chi));
    }

    #[test]
    fn return_hom_text_format() {
        let chi0 = ReturnHom::new(
            gamma(),
            SignedSemigroup::gamma0(),
            vec![(-1, vec![-1, 0]), (0, vec![-1, 1, 0])],
        )
        .unwrap();
        assert_eq!(chi0.to_text(), "I_-1 -> I_-1 I_0\nI_0 -> I_-1 I_1 I_0");
        assert_eq!(gamma().to_text(), "+I_-1 -I_0");
    }

    #[test]
    fn goes_through_twice_homomorphism_is_admissible() {
        // chi_2: I_-1 -> I_-1 I_-1 I_0, I_0 -> I_0.
        let chi2 = ReturnHom::new(
            gamma(),
            gamma(),
            vec![(-1, vec![-1, -1, 0]), (0, vec![0])],
        )
        .unwrap();
        assert!(is_admissible(&chi2));
        // chi_3: I_-1 -> I_-1 I_-1 I_0, I_0 -> I_-1 I_0.
        let chi3 = ReturnHom::new(
            gamma(),
            gamma(),
            vec![(-1, vec![-1, -1, 0]), (0, vec![-1, 0])],
        )
        .unwrap();
        assert!(is_admissible(&chi3));
    }
}
