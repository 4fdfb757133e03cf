//! The real principal nest at superattracting parameters: first-return
//! components with their itineraries, return-type sequences, central
//! cascades with neglectable levels, essential period, truncation and
//! insertion of neglectable levels, essential equivalence, and the
//! compactification coordinates of shuffle space.
//!
//! Levels are stored so that `levels[m]` holds the interval `I^m` together
//! with the components of the first-return map to `I^m` that contain
//! postcritical points; the central component of `levels[m]` is `I^{m+1}`.
//! The semigroup of the components of `levels[m]` is `Gamma_{m+1}` in the
//! return-type chain, whose words live over the components one level up.

use std::collections::{BTreeMap, HashSet};

use serde_json::{json, Value};
use thiserror::Error;

use crate::dynamics::QuadParam;
use crate::shuffle::{
    self, is_admissible, is_zero_admissible, orbit_order_from_pattern, ReturnHom, Shuffle,
    SignedSemigroup, Symbol,
};
use crate::solver;

#[derive(Debug, Error)]
pub enum NestError {
    #[error("critical orbit does not close up (|f^p(0)| = {residual:e} after {period} steps)")]
    NotSuperattracting { period: usize, residual: f64 },
    #[error("map is immediately renormalizable; peel the tuning first")]
    ImmediatelyRenormalizable,
    #[error("nest did not terminate within {0} levels")]
    LevelBudgetExceeded(usize),
    #[error("return-type data violates admissibility: {0}")]
    AdmissibilityViolation(String),
    #[error("level {0} is not neglectable")]
    NotNeglectable(usize),
    #[error("no canonical level can be inserted at position {0}")]
    NotInsertable(usize),
    #[error("nest construction inconsistency: {0}")]
    Inconsistent(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("shuffle: {0}")]
    Shuffle(String),
    #[error("semigroup: {0}")]
    Semigroup(String),
}

impl From<solver::SolverError> for NestError {
    fn from(e: solver::SolverError) -> Self {
        NestError::Solver(e.to_string())
    }
}

impl From<shuffle::ShuffleError> for NestError {
    fn from(e: shuffle::ShuffleError) -> Self {
        NestError::Shuffle(e.to_string())
    }
}

impl From<shuffle::SemigroupError> for NestError {
    fn from(e: shuffle::SemigroupError) -> Self {
        NestError::Semigroup(e.to_string())
    }
}

/// One first-return component containing postcritical points.
#[derive(Debug, Clone)]
pub struct NestComponent {
    /// Position index, 0 central, negatives to the left.
    pub index: i32,
    pub interval: (f64, f64),
    /// f-iterations until the component returns to the enclosing interval.
    pub return_time: usize,
    /// Itinerary over the previous level's component positions, ending at 0.
    pub word: Vec<i32>,
    /// Orientation of the return branch; for the central component +1 means
    /// the critical point is a local minimum of the return map.
    pub sign: i8,
}

#[derive(Debug, Clone)]
pub struct NestLevel {
    pub interval: (f64, f64),
    pub components: Vec<NestComponent>,
}

/// Landing stacks of the critical orbit through the nest, shared between the
/// numeric construction and the symbolic expansion of a return-type chain.
/// `stacks[t-1][k]` is the position of the orbit point at time `t` among the
/// level-`k` components (`k = 0` is the base partition); entries are present
/// exactly while the prefix stays central.
#[derive(Debug, Clone)]
pub struct OrbitCombinatorics {
    pub period: usize,
    pub stacks: Vec<Vec<i32>>,
    /// Central-generator signs per level of the chain, bottom up.
    pub central_signs: Vec<i8>,
}

const DEPTH_CRITICAL: i64 = i64::MAX;

impl OrbitCombinatorics {
    /// Deepest `m` with the time-`t` point inside `I^m`; -1 outside the nest,
    /// `DEPTH_CRITICAL` for the critical point itself.
    pub fn depth(&self, t: usize) -> i64 {
        if t == self.period {
            return DEPTH_CRITICAL;
        }
        let stack = &self.stacks[t - 1];
        for (k, &e) in stack.iter().enumerate() {
            if e != 0 {
                return k as i64 - 1;
            }
        }
        stack.len() as i64 - 1
    }

    /// Side of the point relative to the critical point: the sign of the
    /// first noncentral entry.
    fn side(&self, t: usize) -> Option<i8> {
        self.stacks[t - 1]
            .iter()
            .find(|&&e| e != 0)
            .map(|&e| if e < 0 { -1 } else { 1 })
    }

    fn wrap(&self, t: usize) -> usize {
        (t - 1) % self.period + 1
    }

    /// First time after `t` (cyclically) whose depth reaches `min_depth`.
    fn next_return(&self, t: usize, min_depth: i64) -> usize {
        let mut u = t;
        for _ in 0..self.period {
            u = self.wrap(u + 1);
            if self.depth(u) >= min_depth {
                return u;
            }
        }
        self.period
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CascadeKind {
    SaddleNode,
    UlamNeumann,
}

/// A central cascade between consecutive non-central levels.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Cascade {
    pub k: usize,
    /// `m(k)`, the non-central level opening the cascade (0 for the first).
    pub start: usize,
    /// `m(k+1)`, the non-central level closing it.
    pub end: usize,
    pub length: usize,
    pub kind: CascadeKind,
    /// Maximal landing depth of postcritical points entering the cascade.
    pub d_k: usize,
    /// Levels `start + d_k < l < end - d_k` (saddle-node cascades only).
    pub neglectable: Vec<usize>,
}

/// Cascade structure of a critical-orbit combinatorics.
pub fn analyze_cascades(comb: &OrbitCombinatorics) -> Vec<Cascade> {
    let top = comb.central_signs.len();
    let mut noncentral = Vec::new();
    for m in 1..top {
        let u = comb.next_return(comb.period, m as i64 - 1);
        if comb.depth(u) == m as i64 - 1 {
            noncentral.push(m);
        }
    }
    let mut cascades = Vec::new();
    let mut start = 0usize;
    for (k, &end) in noncentral.iter().enumerate() {
        // saddle-node iff the first central-branch return lands on the side
        // matched by the extremum orientation of the return map
        let u0 = comb.next_return(comb.period, start as i64);
        let kind = match comb.side(u0) {
            Some(s) if s == comb.central_signs[start] => CascadeKind::SaddleNode,
            Some(_) => CascadeKind::UlamNeumann,
            None => CascadeKind::SaddleNode,
        };
        let mut d_k = 0usize;
        for t in 1..comb.period {
            if comb.depth(t) != start as i64 {
                continue;
            }
            let u = comb.next_return(t, start as i64);
            let j = comb.depth(u);
            if j == DEPTH_CRITICAL {
                continue;
            }
            let d = (j - start as i64).min(end as i64 - j).max(0);
            d_k = d_k.max(d as usize);
        }
        let neglectable = if kind == CascadeKind::SaddleNode {
            ((start + d_k + 1)..end.saturating_sub(d_k)).collect()
        } else {
            Vec::new()
        };
        cascades.push(Cascade {
            k,
            start,
            end,
            length: end - start,
            kind,
            d_k,
            neglectable,
        });
        start = end;
    }
    cascades
}

/// The real principal nest of a superattracting parameter.
#[derive(Debug, Clone)]
pub struct PrincipalNest {
    pub c: f64,
    pub period: usize,
    pub levels: Vec<NestLevel>,
    /// Non-central levels `m(k)` in chain numbering.
    pub noncentral_levels: Vec<usize>,
    orbit: Vec<f64>,
    combinatorics: OrbitCombinatorics,
}

fn base_position(x: f64, a: (f64, f64)) -> i32 {
    if x < a.0 {
        -1
    } else if x > a.1 {
        1
    } else {
        0
    }
}

/// Builds the principal nest at a superattracting center. The period is
/// inferred from the critical orbit.
pub fn build_nest(c: QuadParam, max_level: usize) -> Result<PrincipalNest, NestError> {
    let cr = c.c().re;
    // detect the period
    let mut x = 0.0f64;
    let mut period = None;
    for k in 1..=4096usize {
        x = x * x + cr;
        if x.abs() <= 1e-9 {
            period = Some(k);
            break;
        }
        if x.abs() > 2.5 {
            break;
        }
    }
    let Some(p) = period else {
        return Err(NestError::NotSuperattracting {
            period: 4096,
            residual: x.abs(),
        });
    };
    let mut orbit = Vec::with_capacity(p);
    let mut x = 0.0f64;
    for _ in 0..p {
        x = x * x + cr;
        orbit.push(x);
    }
    orbit[p - 1] = 0.0;
    let ri = crate::dynamics::real_intervals(c).map_err(|e| NestError::Inconsistent(e.to_string()))?;
    let a = ri.a;
    if !orbit.iter().take(p - 1).any(|&x| x > a.1) {
        return Err(NestError::ImmediatelyRenormalizable);
    }
    let at = |t: usize| orbit[(t - 1) % p];

    let mut levels: Vec<NestLevel> = Vec::new();
    let mut noncentral_levels = Vec::new();
    let mut current = a;
    let mut terminated = false;
    // component position of each orbit time per level, for word building
    let mut comp_positions: Vec<BTreeMap<usize, i32>> = Vec::new();

    for level in 0..=max_level {
        let inside: Vec<usize> = (1..=p).filter(|&t| at(t) >= current.0 && at(t) <= current.1).collect();
        if inside.is_empty() {
            return Err(NestError::Inconsistent(format!(
                "no postcritical points inside level {level}"
            )));
        }
        // return times
        let mut times = BTreeMap::new();
        for &t in &inside {
            let mut tau = 0usize;
            for s in 1..=p {
                let y = at(t + s);
                if y >= current.0 && y <= current.1 {
                    tau = s;
                    break;
                }
            }
            if tau == 0 {
                return Err(NestError::Inconsistent(format!(
                    "no return from time {t} at level {level}"
                )));
            }
            times.insert(t, tau);
        }
        // pull back the level interval along each return branch
        // One inverse step takes the connected preimage component around the
        // orbit point; when the pulled interval reaches the critical value
        // the preimage is a single interval through 0.
        let pullback = |t: usize, tau: usize| -> (f64, f64) {
            let mut j = current;
            for s in (0..tau).rev() {
                let pt = at(t + s);
                let lo2 = j.0 - cr;
                let hi2 = (j.1 - cr).max(0.0);
                let rh = hi2.sqrt();
                j = if lo2 <= 0.0 {
                    (-rh, rh)
                } else {
                    let rl = lo2.sqrt();
                    if pt >= 0.0 {
                        (rl, rh)
                    } else {
                        (-rh, -rl)
                    }
                };
            }
            j
        };
        let scale = current.1 - current.0;
        let mut groups: Vec<((f64, f64), Vec<usize>)> = Vec::new();
        for &t in &inside {
            let iv = pullback(t, times[&t]);
            if at(t) < iv.0 - 1e-9 * scale || at(t) > iv.1 + 1e-9 * scale {
                return Err(NestError::Inconsistent(format!(
                    "pullback at level {level} misses its point (time {t})"
                )));
            }
            match groups
                .iter_mut()
                .find(|(g, _)| (g.0 - iv.0).abs() <= 1e-9 * scale && (g.1 - iv.1).abs() <= 1e-9 * scale)
            {
                Some((_, ts)) => ts.push(t),
                None => groups.push((iv, vec![t])),
            }
        }
        groups.sort_by(|a, b| a.0 .0.partial_cmp(&b.0 .0).unwrap());
        let central_pos = groups
            .iter()
            .position(|(iv, _)| iv.0 < 0.0 && iv.1 > 0.0)
            .ok_or_else(|| NestError::Inconsistent(format!("no central component at level {level}")))?;
        // words over the previous level's positions
        let word_of = |t: usize, tau: usize| -> Result<Vec<i32>, NestError> {
            let mut w = Vec::new();
            if level == 0 {
                for s in 1..=tau {
                    w.push(base_position(at(t + s), a));
                }
            } else {
                let prev = &comp_positions[level - 1];
                let prev_interval = levels[level - 1].interval;
                for s in 1..=tau {
                    let y = at(t + s);
                    if y >= prev_interval.0 && y <= prev_interval.1 {
                        let tt = (t + s - 1) % p + 1;
                        w.push(*prev.get(&tt).ok_or_else(|| {
                            NestError::Inconsistent(format!(
                                "time {tt} missing from level {} components",
                                level - 1
                            ))
                        })?);
                    }
                }
            }
            Ok(w)
        };
        let mut comps = Vec::new();
        let mut positions = BTreeMap::new();
        for (gi, (iv, ts)) in groups.iter().enumerate() {
            let index = gi as i32 - central_pos as i32;
            let t0 = *ts.iter().find(|&&t| t != p).unwrap_or(&p);
            let tau = times[&t0];
            let word = word_of(t0, tau)?;
            for &t in ts {
                positions.insert(t, index);
                if times[&t] != tau || word_of(t, times[&t])? != word {
                    return Err(NestError::Inconsistent(format!(
                        "component at level {level} has inconsistent itineraries"
                    )));
                }
            }
            let sign = if index == 0 {
                let tau0 = times[&p];
                let mut s = 1i8;
                for k in 1..tau0 {
                    if at(p + k) < 0.0 {
                        s = -s;
                    }
                }
                s
            } else {
                let mut s = 1i8;
                for k in 0..tau {
                    if at(t0 + k) < 0.0 {
                        s = -s;
                    }
                }
                s
            };
            comps.push(NestComponent {
                index,
                interval: *iv,
                return_time: tau,
                word,
                sign,
            });
        }
        let central_interval = comps[central_pos].interval;
        let single = comps.len() == 1;
        levels.push(NestLevel {
            interval: current,
            components: comps,
        });
        comp_positions.push(positions);
        if single {
            terminated = true;
            break;
        }
        // centrality of the next chain level: where does the first return of
        // the critical point land relative to the new central interval
        let tau0 = times[&p];
        let y = at(p + tau0);
        if !(y >= central_interval.0 && y <= central_interval.1) {
            noncentral_levels.push(level + 1);
        }
        current = central_interval;
    }
    if !terminated {
        return Err(NestError::LevelBudgetExceeded(max_level));
    }

    // landing stacks
    let mut stacks = Vec::with_capacity(p);
    for t in 1..=p {
        let mut stack = vec![base_position(at(t), a)];
        if stack[0] == 0 {
            for positions in &comp_positions {
                match positions.get(&t) {
                    Some(&pos) => {
                        stack.push(pos);
                        if pos != 0 {
                            break;
                        }
                    }
                    None => break,
                }
            }
        }
        stacks.push(stack);
    }
    let central_signs = levels
        .iter()
        .map(|lv| lv.components.iter().find(|c| c.index == 0).unwrap().sign)
        .collect();
    Ok(PrincipalNest {
        c: cr,
        period: p,
        levels,
        noncentral_levels,
        orbit,
        combinatorics: OrbitCombinatorics {
            period: p,
            stacks,
            central_signs,
        },
    })
}

impl PrincipalNest {
    pub fn orbit(&self) -> &[f64] {
        &self.orbit
    }

    pub fn combinatorics(&self) -> &OrbitCombinatorics {
        &self.combinatorics
    }

    /// Number of chain levels (the `m'` of the return-type sequence).
    pub fn chain_levels(&self) -> usize {
        self.levels.len()
    }

    /// Verifies that every component endpoint reaches the alpha fixed point
    /// within its return time plus the boundary depth.
    pub fn verify_endpoints(&self) -> Result<(), NestError> {
        let alpha = crate::dynamics::fixed_points(QuadParam::real(self.c).unwrap())
            .alpha
            .re;
        let tol = 1e-8 * (self.levels[0].interval.1 - self.levels[0].interval.0);
        for (li, level) in self.levels.iter().enumerate() {
            for comp in &level.components {
                for e in [comp.interval.0, comp.interval.1] {
                    let mut y = e;
                    let budget = comp.return_time + 4 * (li + 2);
                    let mut ok = false;
                    for _ in 0..=budget {
                        if (y - alpha).abs() <= tol {
                            ok = true;
                            break;
                        }
                        y = y * y + self.c;
                    }
                    if !ok {
                        return Err(NestError::Inconsistent(format!(
                            "endpoint {e} at level {li} does not reach alpha"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// JSON dump with intervals rendered as 17-significant-digit decimals.
    pub fn to_json(&self) -> Value {
        let iv = |t: (f64, f64)| json!([format!("{:.16e}", t.0), format!("{:.16e}", t.1)]);
        json!({
            "c": format!("{:.16e}", self.c),
            "period": self.period,
            "noncentral_levels": self.noncentral_levels,
            "levels": self.levels.iter().map(|lv| json!({
                "interval": iv(lv.interval),
                "components": lv.components.iter().map(|c| json!({
                    "index": c.index,
                    "interval": iv(c.interval),
                    "return_time": c.return_time,
                    "word": c.word,
                    "sign": c.sign,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// A composable chain of admissible unimodal return types, bottom (mapping
/// into the base semigroup) first.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnTypeSequence {
    homs: Vec<ReturnHom>,
}

impl ReturnTypeSequence {
    pub fn new(homs: Vec<ReturnHom>) -> Result<Self, NestError> {
        let seq = ReturnTypeSequence { homs };
        seq.validate()?;
        Ok(seq)
    }

    pub fn levels(&self) -> usize {
        self.homs.len()
    }

    /// The homomorphism at chain level `m` (1-based).
    pub fn hom(&self, m: usize) -> &ReturnHom {
        &self.homs[m - 1]
    }

    pub fn homs(&self) -> &[ReturnHom] {
        &self.homs
    }

    /// Semigroup at level `m` (0 = base).
    pub fn gamma(&self, m: usize) -> &SignedSemigroup {
        if m == 0 {
            &self.homs[0].target
        } else {
            &self.homs[m - 1].source
        }
    }

    pub fn validate(&self) -> Result<(), NestError> {
        if self.homs.is_empty() {
            return Err(NestError::AdmissibilityViolation("empty chain".into()));
        }
        if self.homs[0].target != SignedSemigroup::gamma0() {
            return Err(NestError::AdmissibilityViolation(
                "bottom target must be the base semigroup".into(),
            ));
        }
        for w in self.homs.windows(2) {
            if w[0].source != w[1].target {
                return Err(NestError::AdmissibilityViolation(
                    "chain is not composable".into(),
                ));
            }
        }
        for (i, h) in self.homs.iter().enumerate() {
            if !is_admissible(h) {
                return Err(NestError::AdmissibilityViolation(format!(
                    "level {} is not admissible",
                    i + 1
                )));
            }
        }
        if !is_zero_admissible(&self.homs[0]) {
            return Err(NestError::AdmissibilityViolation(
                "bottom level is not zero-admissible".into(),
            ));
        }
        let top = self.homs.len();
        if self.gamma(top).len() != 1 {
            return Err(NestError::AdmissibilityViolation(
                "top semigroup must have one generator".into(),
            ));
        }
        for m in 1..top {
            if self.gamma(m).len() == 1 {
                return Err(NestError::AdmissibilityViolation(format!(
                    "only the top semigroup may have one generator (level {m})"
                )));
            }
        }
        // irreducibility: every generator below the top is visited by the
        // expansion of the central symbol
        let visited = self.visited_sets();
        for m in 1..top {
            for pos in self.gamma(m).positions() {
                if !visited[m].contains(&pos) {
                    return Err(NestError::AdmissibilityViolation(format!(
                        "generator I_{pos} at level {m} is outside the critical orbit"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Positions reachable from the top central generator, per level.
    fn visited_sets(&self) -> Vec<HashSet<i32>> {
        let top = self.homs.len();
        let mut visited: Vec<HashSet<i32>> = vec![HashSet::new(); top + 1];
        visited[top].insert(0);
        for m in (1..=top).rev() {
            let hom = self.hom(m);
            let sources: Vec<i32> = visited[m].iter().copied().collect();
            for s in sources {
                if let Some(word) = hom.word_of(s) {
                    for &l in word {
                        visited[m - 1].insert(l);
                    }
                }
            }
        }
        visited
    }

    /// Expands the chain into the landing stacks of its critical orbit.
    pub fn expand(&self) -> OrbitCombinatorics {
        fn walk(seq: &ReturnTypeSequence, m: usize, pos: i32, events: &mut Vec<Vec<i32>>) {
            if m == 0 {
                events.push(Vec::new());
                return;
            }
            let word: Vec<i32> = seq.hom(m).word_of(pos).expect("validated word").to_vec();
            let mut prev = 0i32;
            for w in word {
                walk(seq, m - 1, prev, events);
                events.last_mut().unwrap().push(w);
                prev = w;
            }
        }
        let mut events = Vec::new();
        walk(self, self.homs.len(), 0, &mut events);
        let central_signs = (1..=self.homs.len())
            .map(|m| self.gamma(m).sign_of(0).unwrap())
            .collect();
        OrbitCombinatorics {
            period: events.len(),
            stacks: events,
            central_signs,
        }
    }

    /// Total period of the realized shuffle.
    pub fn period(&self) -> usize {
        self.expand().period
    }

    /// `I_j -> word` lines per level, top level last.
    pub fn to_text(&self) -> String {
        self.homs
            .iter()
            .enumerate()
            .map(|(i, h)| {
                format!(
                    "level {}: <{}> -> <{}>\n{}",
                    i + 1,
                    h.source.to_text(),
                    h.target.to_text(),
                    h.to_text()
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "levels": self.homs.iter().map(|h| json!({
                "source": h.source,
                "target": h.target,
                "words": h.source.positions().map(|p| json!({
                    "generator": p,
                    "word": h.word_of(p).unwrap(),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Reads the return-type chain off a completed nest and validates it.
pub fn return_type_sequence(nest: &PrincipalNest) -> Result<ReturnTypeSequence, NestError> {
    let mut homs = Vec::with_capacity(nest.levels.len());
    for (li, level) in nest.levels.iter().enumerate() {
        let source = SignedSemigroup::new(
            level
                .components
                .iter()
                .map(|c| (c.index, c.sign))
                .collect(),
        )?;
        let target = if li == 0 {
            SignedSemigroup::gamma0()
        } else {
            SignedSemigroup::new(
                nest.levels[li - 1]
                    .components
                    .iter()
                    .map(|c| (c.index, c.sign))
                    .collect(),
            )?
        };
        let words = level
            .components
            .iter()
            .map(|c| (c.index, c.word.clone()))
            .collect();
        homs.push(ReturnHom::new(source, target, words)?);
    }
    ReturnTypeSequence::new(homs)
}

/// Cascade structure of a nest.
pub fn detect_cascades(nest: &PrincipalNest) -> Vec<Cascade> {
    let cascades = analyze_cascades(&nest.combinatorics);
    // cross-check the saddle-node criterion on the intervals: the image of
    // the central component under its return map avoids the critical point
    for c in &cascades {
        debug_assert!({
            let level = &nest.levels[c.start];
            let comp = level.components.iter().find(|x| x.index == 0).unwrap();
            let mut iv = comp.interval;
            for _ in 0..comp.return_time {
                let va = iv.0 * iv.0 + nest.c;
                let vb = iv.1 * iv.1 + nest.c;
                let mut lo = va.min(vb);
                let mut hi = va.max(vb);
                if iv.0 < 0.0 && iv.1 > 0.0 {
                    lo = lo.min(nest.c);
                    hi = hi.max(nest.c);
                }
                iv = (lo, hi);
            }
            let contains_zero = iv.0 <= 0.0 && iv.1 >= 0.0;
            contains_zero == (c.kind == CascadeKind::UlamNeumann)
        });
    }
    cascades
}

/// Essential period: the number of renormalization orbit intervals whose
/// first landing into the nest is not at a neglectable level.
pub fn essential_period(sigma: &Shuffle) -> Result<usize, NestError> {
    if sigma.period() == 2 {
        // the immediately renormalizable shuffle carries no nest; both orbit
        // intervals survive
        return Ok(2);
    }
    let center = solver::center_of_shuffle(sigma)?;
    let nest = build_nest(QuadParam::real(center.c).unwrap(), 64)?;
    let cascades = detect_cascades(&nest);
    Ok(essential_period_of(&nest.combinatorics, &cascades))
}

pub(crate) fn essential_period_of(comb: &OrbitCombinatorics, cascades: &[Cascade]) -> usize {
    let negl: HashSet<usize> = cascades
        .iter()
        .flat_map(|c| c.neglectable.iter().copied())
        .collect();
    let mut survivors = 0usize;
    for t in 1..=comb.period {
        // first landing of the orbit interval J_t into the nest
        let mut u = t;
        for _ in 0..comb.period {
            if comb.depth(u) >= 0 {
                break;
            }
            u = comb.wrap(u + 1);
        }
        let depth = comb.depth(u);
        let removed = depth != DEPTH_CRITICAL && negl.contains(&(depth as usize));
        if !removed {
            survivors += 1;
        }
    }
    survivors
}

/// The unique shuffle realizing a validated chain.
pub fn shuffle_from_sequence(seq: &ReturnTypeSequence) -> Result<Shuffle, NestError> {
    let comb = seq.expand();
    let p = comb.period;
    let mut pattern = Vec::with_capacity(p);
    for t in 1..=p {
        if t == p {
            pattern.push(Symbol::C);
        } else {
            let side = comb.stacks[t - 1].iter().find(|&&e| e != 0).copied().ok_or(
                NestError::Inconsistent("noncritical time with all-central stack at top".into()),
            )?;
            pattern.push(if side < 0 { Symbol::L } else { Symbol::R });
        }
    }
    let (perm, _) = orbit_order_from_pattern(&pattern);
    shuffle::validate_shuffle(&perm).map_err(|e| NestError::Shuffle(e.to_string()))
}

/// Dynamically neglectable levels of a chain.
pub fn neglectable_levels(seq: &ReturnTypeSequence) -> Vec<usize> {
    let comb = seq.expand();
    analyze_cascades(&comb)
        .iter()
        .flat_map(|c| c.neglectable.iter().copied())
        .collect()
}

fn is_canonical_hom(hom: &ReturnHom) -> bool {
    if hom.source != hom.target {
        return false;
    }
    for pos in hom.source.positions().collect::<Vec<_>>() {
        let expect: Vec<i32> = if pos == 0 { vec![0] } else { vec![pos, 0] };
        if hom.word_of(pos) != Some(expect.as_slice()) {
            return false;
        }
    }
    true
}

/// Truncates the chain at a neglectable level `l`: levels above `l` collapse
/// into a one-generator top whose word is the central word of level `l`,
/// followed by the irreducibility reduction.
pub fn truncate(seq: &ReturnTypeSequence, l: usize) -> Result<Shuffle, NestError> {
    if !neglectable_levels(seq).contains(&l) {
        return Err(NestError::NotNeglectable(l));
    }
    let truncated = truncate_sequence(seq, l)?;
    shuffle_from_sequence(&truncated)
}

/// The truncated chain itself (exposed for root computations).
pub fn truncate_sequence(seq: &ReturnTypeSequence, l: usize) -> Result<ReturnTypeSequence, NestError> {
    let gamma_prev = seq.gamma(l - 1).clone();
    let central_sign = seq.gamma(l).sign_of(0).unwrap();
    let central_word = seq.hom(l).word_of(0).unwrap().to_vec();
    let top = SignedSemigroup::new(vec![(0, central_sign)])?;
    let chi_top = ReturnHom::new(top, gamma_prev, vec![(0, central_word)])?;
    let mut homs: Vec<ReturnHom> = seq.homs[..l - 1].to_vec();
    homs.push(chi_top);
    reduce_chain(homs)
}

/// Removes generators outside the critical orbit and collapses internal
/// one-generator levels by composition.
fn reduce_chain(mut homs: Vec<ReturnHom>) -> Result<ReturnTypeSequence, NestError> {
    // visited positions per level
    loop {
        let top = homs.len();
        let mut visited: Vec<HashSet<i32>> = vec![HashSet::new(); top + 1];
        visited[top].insert(0);
        for m in (1..=top).rev() {
            let hom = &homs[m - 1];
            let sources: Vec<i32> = visited[m].iter().copied().collect();
            for s in sources {
                if let Some(word) = hom.word_of(s) {
                    for &l in word {
                        visited[m - 1].insert(l);
                    }
                }
            }
        }
        // rebuild each hom keeping only visited source generators; the base
        // level (targets of hom 1) is never reduced
        let mut changed = false;
        let mut new_homs = Vec::with_capacity(top);
        for m in 1..=top {
            let hom = &homs[m - 1];
            let keep: Vec<i32> = hom
                .source
                .positions()
                .filter(|p| visited[m].contains(p))
                .collect();
            if keep.len() != hom.source.len() {
                changed = true;
            }
            let source = SignedSemigroup::new(
                keep.iter()
                    .map(|&p| (p, hom.source.sign_of(p).unwrap()))
                    .collect(),
            )?;
            let target = if m == 1 {
                hom.target.clone()
            } else {
                // match the reduced source of the level below
                new_homs
                    .last()
                    .map(|h: &ReturnHom| h.source.clone())
                    .unwrap()
            };
            let words = keep
                .iter()
                .map(|&p| (p, hom.word_of(p).unwrap().to_vec()))
                .collect();
            new_homs.push(ReturnHom::new(source, target, words)?);
        }
        homs = new_homs;
        // collapse internal one-generator levels: compose chi_m into chi_{m+1}
        let top = homs.len();
        let mut collapse_at = None;
        for m in 1..top {
            if homs[m - 1].source.len() == 1 {
                collapse_at = Some(m);
                break;
            }
        }
        if let Some(m) = collapse_at {
            let lower = homs[m - 1].clone();
            let upper = homs[m].clone();
            let target = lower.target.clone();
            let words = upper
                .source
                .positions()
                .map(|p| {
                    let w = upper.word_of(p).unwrap();
                    let mut out = Vec::new();
                    for &letter in w {
                        out.extend_from_slice(lower.word_of(letter).unwrap());
                    }
                    (p, out)
                })
                .collect();
            let merged = ReturnHom::new(upper.source.clone(), target, words)?;
            homs.remove(m);
            homs[m - 1] = merged;
            continue;
        }
        if !changed {
            break;
        }
    }
    ReturnTypeSequence::new(homs)
}

/// Inserts a canonical level at position `l` (the new level becomes level
/// `l`). Requires the canonical self-homomorphism to be admissible on the
/// semigroup below.
pub fn insert_neglectable(seq: &ReturnTypeSequence, l: usize) -> Result<ReturnTypeSequence, NestError> {
    if l < 1 || l > seq.levels() {
        return Err(NestError::NotInsertable(l));
    }
    let gamma = seq.gamma(l - 1).clone();
    let words: Vec<(i32, Vec<i32>)> = gamma
        .positions()
        .map(|p| (p, if p == 0 { vec![0] } else { vec![p, 0] }))
        .collect();
    let canon = ReturnHom::new(gamma.clone(), gamma, words).map_err(|_| NestError::NotInsertable(l))?;
    if !is_admissible(&canon) {
        return Err(NestError::NotInsertable(l));
    }
    let mut homs = seq.homs.clone();
    homs.insert(l - 1, canon);
    ReturnTypeSequence::new(homs).map_err(|_| NestError::NotInsertable(l))
}

/// Canonical representative of essential equivalence: delete canonical
/// levels until none remain.
pub fn canonical_form(seq: &ReturnTypeSequence) -> ReturnTypeSequence {
    let mut homs = seq.homs.clone();
    loop {
        let top = homs.len();
        let mut removed = false;
        for l in 1..top {
            if is_canonical_hom(&homs[l - 1]) {
                homs.remove(l - 1);
                removed = true;
                break;
            }
        }
        if !removed {
            break;
        }
    }
    ReturnTypeSequence { homs }
}

/// Essential equivalence: equal canonical forms. Both shuffles must carry
/// return-type chains; the period-2 shuffle is its own class.
pub fn essentially_equivalent(a: &Shuffle, b: &Shuffle) -> Result<bool, NestError> {
    if a == b {
        return Ok(true);
    }
    if a.period() == 2 || b.period() == 2 {
        return Ok(a.period() == b.period());
    }
    let seq_a = sequence_of_shuffle(a)?;
    let seq_b = sequence_of_shuffle(b)?;
    Ok(canonical_form(&seq_a) == canonical_form(&seq_b))
}

/// Return-type chain of a shuffle via its solved center.
pub fn sequence_of_shuffle(sigma: &Shuffle) -> Result<ReturnTypeSequence, NestError> {
    let center = solver::center_of_shuffle(sigma)?;
    let nest = build_nest(QuadParam::real(center.c).unwrap(), 64)?;
    return_type_sequence(&nest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CompactCoord {
    Finite(usize),
    Infinite,
}

/// A point of the compactified shuffle space: the essential-equivalence
/// class plus the neglectable-run lengths per cascade.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CompactShuffle {
    pub class_id: String,
    pub coords: Vec<CompactCoord>,
}

/// Compactification coordinates of a shuffle: neglectable-run lengths over
/// the cascades that carry them, bottom cascade first.
pub fn compact_coords(sigma: &Shuffle) -> Result<CompactShuffle, NestError> {
    let seq = sequence_of_shuffle(sigma)?;
    let comb = seq.expand();
    let coords = analyze_cascades(&comb)
        .iter()
        .filter(|c| !c.neglectable.is_empty())
        .map(|c| CompactCoord::Finite(c.neglectable.len()))
        .collect();
    Ok(CompactShuffle {
        class_id: canonical_form(&seq).to_text(),
        coords,
    })
}

/// Marks the coordinate of `cascade` as infinite, representing an end.
pub fn end_of_family(sigma: &Shuffle, cascade: usize) -> Result<CompactShuffle, NestError> {
    let mut cs = compact_coords(sigma)?;
    if cascade >= cs.coords.len() {
        return Err(NestError::Inconsistent(format!(
            "no cascade {cascade} with neglectable levels"
        )));
    }
    cs.coords[cascade] = CompactCoord::Infinite;
    Ok(cs)
}

/// The embedding `F(x_1, ..., x_n) = sum 2^{-x_1 x_2 ... x_k - k + 1}` of the
/// coordinate space into the line.
pub fn embed_f(coords: &[u32]) -> f64 {
    let mut sum = 0.0f64;
    let mut prod: f64 = 1.0;
    for (k, &x) in coords.iter().enumerate() {
        prod *= x as f64;
        sum += (-(prod + k as f64) ).exp2();
    }
    sum
}

/// Parameter of an end: the parabolic root of the copy obtained by
/// truncating a nearby representative inside the infinite cascade.
pub fn c_of_end(representative: &Shuffle, infinite_cascade: usize) -> Result<f64, NestError> {
    let seq = sequence_of_shuffle(representative)?;
    let comb = seq.expand();
    let cascades = analyze_cascades(&comb);
    let with_negl: Vec<&Cascade> = cascades.iter().filter(|c| !c.neglectable.is_empty()).collect();
    let cascade = with_negl.get(infinite_cascade).ok_or_else(|| {
        NestError::Inconsistent(format!("no cascade {infinite_cascade} with neglectable levels"))
    })?;
    let l = cascade.neglectable[cascade.neglectable.len() / 2];
    let truncated = truncate(&seq, l)?;
    let root = solver::root_of_copy(&truncated)?;
    Ok(root.c)
}

/// Reference chains and fixtures.
pub mod fixtures {
    use super::*;

    fn gamma() -> SignedSemigroup {
        SignedSemigroup::new(vec![(-1, 1), (0, -1)]).unwrap()
    }

    fn gamma_prime() -> SignedSemigroup {
        SignedSemigroup::new(vec![(0, -1)]).unwrap()
    }

    fn chi_bottom() -> ReturnHom {
        ReturnHom::new(
            gamma(),
            SignedSemigroup::gamma0(),
            vec![(-1, vec![-1, 0]), (0, vec![-1, 1, 0])],
        )
        .unwrap()
    }

    fn chi_cascade() -> ReturnHom {
        ReturnHom::new(gamma(), gamma(), vec![(-1, vec![-1, 0]), (0, vec![0])]).unwrap()
    }

    fn chi_top() -> ReturnHom {
        ReturnHom::new(gamma_prime(), gamma(), vec![(0, vec![-1, 0])]).unwrap()
    }

    fn chi_double_pass() -> ReturnHom {
        ReturnHom::new(gamma(), gamma(), vec![(-1, vec![-1, -1, 0]), (0, vec![0])]).unwrap()
    }

    fn chi_two_cascades() -> ReturnHom {
        ReturnHom::new(gamma(), gamma(), vec![(-1, vec![-1, -1, 0]), (0, vec![-1, 0])]).unwrap()
    }

    /// The essentially-period-tripling chain with the cascade level repeated
    /// `n - 1` times.
    pub fn sigma3_sequence(n: usize) -> ReturnTypeSequence {
        assert!(n >= 1);
        let mut homs = vec![chi_bottom()];
        for _ in 1..n {
            homs.push(chi_cascade());
        }
        homs.push(chi_top());
        ReturnTypeSequence::new(homs).unwrap()
    }

    /// One cascade whose exit passes through the off-central interval twice:
    /// `a` cascade levels below the double-pass level and `b` above.
    pub fn goes_through_twice(a: usize, b: usize) -> ReturnTypeSequence {
        let mut homs = vec![chi_bottom()];
        for _ in 0..a {
            homs.push(chi_cascade());
        }
        homs.push(chi_double_pass());
        for _ in 0..b {
            homs.push(chi_cascade());
        }
        homs.push(chi_top());
        ReturnTypeSequence::new(homs).unwrap()
    }

    /// Two separate saddle-node cascades of `a` and `b` interior levels.
    pub fn two_cascades(a: usize, b: usize) -> ReturnTypeSequence {
        let mut homs = vec![chi_bottom()];
        for _ in 0..a {
            homs.push(chi_cascade());
        }
        homs.push(chi_two_cascades());
        for _ in 0..b {
            homs.push(chi_cascade());
        }
        homs.push(chi_top());
        ReturnTypeSequence::new(homs).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shuffle::sigma3_n;

    fn nest_at_sigma3_center() -> PrincipalNest {
        let c = solver::center_of_shuffle(&Shuffle::sigma3()).unwrap().c;
        build_nest(QuadParam::real(c).unwrap(), 64).unwrap()
    }

    #[test]
    fn nest_terminates_immediately_at_period_three() {
        let nest = nest_at_sigma3_center();
        assert_eq!(nest.chain_levels(), 1);
        let level = &nest.levels[0];
        assert_eq!(level.components.len(), 1);
        let central = &level.components[0];
        assert_eq!(central.return_time, 3);
        assert_eq!(central.word, vec![-1, 1, 0]);
        nest.verify_endpoints().unwrap();
    }

    #[test]
    fn nest_rejects_basilica_and_noncenters() {
        assert!(matches!(
            build_nest(QuadParam::real(-1.0).unwrap(), 64),
            Err(NestError::ImmediatelyRenormalizable)
        ));
        assert!(matches!(
            build_nest(QuadParam::real(-1.4).unwrap(), 64),
            Err(NestError::NotSuperattracting { .. })
        ));
    }

    #[test]
    fn sigma3_n_chain_matches_reference() {
        for n in [1usize, 2, 3, 5] {
            let c = solver::sigma3_center(n).unwrap().c;
            let nest = build_nest(QuadParam::real(c).unwrap(), 64).unwrap();
            let seq = return_type_sequence(&nest).unwrap();
            let expected = fixtures::sigma3_sequence(n);
            assert_eq!(seq, expected, "chain differs for n = {n}");
            nest.verify_endpoints().unwrap();
        }
    }

    #[test]
    fn nest_intervals_shrink_strictly() {
        let c = solver::sigma3_center(5).unwrap().c;
        let nest = build_nest(QuadParam::real(c).unwrap(), 64).unwrap();
        for w in nest.levels.windows(2) {
            let w0 = w[0].interval.1 - w[0].interval.0;
            let w1 = w[1].interval.1 - w[1].interval.0;
            assert!(w1 < w0);
        }
    }

    #[test]
    fn cascades_of_sigma3_n() {
        for n in [3usize, 5, 8] {
            let c = solver::sigma3_center(n).unwrap().c;
            let nest = build_nest(QuadParam::real(c).unwrap(), 64).unwrap();
            let cascades = detect_cascades(&nest);
            assert_eq!(cascades.len(), 1, "n = {n}");
            let c0 = &cascades[0];
            assert_eq!(c0.kind, CascadeKind::SaddleNode);
            assert_eq!(c0.length, n);
            assert_eq!(c0.d_k, 0);
            assert_eq!(c0.neglectable, (1..n).collect::<Vec<_>>());
        }
        // period-3 center: no cascades at all
        let nest = nest_at_sigma3_center();
        assert!(detect_cascades(&nest).is_empty());
    }

    #[test]
    fn essential_period_values() {
        assert_eq!(essential_period(&Shuffle::sigma2()).unwrap(), 2);
        assert_eq!(essential_period(&Shuffle::sigma3()).unwrap(), 3);
        for n in [1usize, 2, 4] {
            let s = sigma3_n(n).unwrap();
            assert_eq!(essential_period(&s).unwrap(), 5, "n = {n}");
        }
    }

    #[test]
    fn essential_period_bounded_by_period() {
        for n in [1usize, 3] {
            let s = sigma3_n(n).unwrap();
            assert!(essential_period(&s).unwrap() <= s.period());
        }
        // no neglectable levels implies equality
        let s3 = Shuffle::sigma3();
        assert_eq!(essential_period(&s3).unwrap(), s3.period());
    }

    #[test]
    fn sequence_round_trips_through_shuffle() {
        for n in [1usize, 2, 3] {
            let seq = fixtures::sigma3_sequence(n);
            let sigma = shuffle_from_sequence(&seq).unwrap();
            assert_eq!(sigma.period(), 3 * n + 2);
            assert_eq!(sigma, sigma3_n(n).unwrap());
            let back = sequence_of_shuffle(&sigma).unwrap();
            assert_eq!(back, seq);
        }
    }

    #[test]
    fn truncation_of_sigma3_n() {
        for n in [3usize, 5] {
            let seq = fixtures::sigma3_sequence(n);
            for l in neglectable_levels(&seq) {
                let t = truncate(&seq, l).unwrap();
                assert_eq!(t, Shuffle::sigma3(), "n = {n}, l = {l}");
            }
            // non-neglectable level errors
            assert!(matches!(
                truncate(&seq, n + 1),
                Err(NestError::NotNeglectable(_))
            ));
        }
    }

    #[test]
    fn insertion_builds_the_next_family_member() {
        for n in [1usize, 2, 4] {
            let seq = fixtures::sigma3_sequence(n);
            let inserted = insert_neglectable(&seq, 2).unwrap();
            assert_eq!(inserted, fixtures::sigma3_sequence(n + 1), "n = {n}");
        }
        // double insertion commutes with composing single insertions
        let seq = fixtures::sigma3_sequence(2);
        let a = insert_neglectable(&insert_neglectable(&seq, 2).unwrap(), 2).unwrap();
        let b = insert_neglectable(&insert_neglectable(&seq, 3).unwrap(), 2).unwrap();
        assert_eq!(a, b);
        // insertion at the base is impossible: the base semigroup has
        // generators on both sides
        assert!(matches!(
            insert_neglectable(&seq, 1),
            Err(NestError::NotInsertable(1))
        ));
    }

    #[test]
    fn insertion_then_truncation_recovers_the_original_truncation() {
        let seq = fixtures::sigma3_sequence(4);
        let l = 2usize;
        let before = truncate(&seq, l).unwrap();
        let inserted = insert_neglectable(&seq, l).unwrap();
        let after = truncate(&inserted, l).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn essential_equivalence_within_the_tripling_family() {
        let s1 = sigma3_n(1).unwrap();
        let s3 = sigma3_n(3).unwrap();
        let s5 = sigma3_n(5).unwrap();
        assert!(essentially_equivalent(&s1, &s3).unwrap());
        assert!(essentially_equivalent(&s3, &s5).unwrap());
        assert!(essentially_equivalent(&s1, &s1).unwrap());
        assert!(!essentially_equivalent(&s1, &Shuffle::sigma2()).unwrap());
        assert!(!essentially_equivalent(&s1, &Shuffle::sigma3()).unwrap());
    }

    #[test]
    fn two_cascades_fixture_has_two_cascades() {
        let seq = fixtures::two_cascades(1, 1);
        seq.validate().unwrap();
        let comb = seq.expand();
        let cascades = analyze_cascades(&comb);
        assert_eq!(cascades.len(), 2);
        assert!(cascades.iter().all(|c| c.kind == CascadeKind::SaddleNode));
        // realized by an actual center
        let sigma = shuffle_from_sequence(&seq).unwrap();
        let back = sequence_of_shuffle(&sigma).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn goes_through_twice_fixture_round_trips() {
        let seq = fixtures::goes_through_twice(1, 1);
        seq.validate().unwrap();
        let comb = seq.expand();
        let cascades = analyze_cascades(&comb);
        assert_eq!(cascades.len(), 1);
        let sigma = shuffle_from_sequence(&seq).unwrap();
        assert_eq!(sigma.period(), 19);
        let back = sequence_of_shuffle(&sigma).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn truncating_the_second_cascade_keeps_lower_structure() {
        // two_cascades(a, b): truncation inside the upper cascade keeps the
        // bottom cascade and yields the (a+1)-st tripling shuffle
        let seq = fixtures::two_cascades(1, 3);
        let comb = seq.expand();
        let cascades = analyze_cascades(&comb);
        assert_eq!(cascades.len(), 2);
        let upper = &cascades[1];
        assert!(!upper.neglectable.is_empty());
        let t = truncate(&seq, upper.neglectable[0]).unwrap();
        assert_eq!(t, sigma3_n(2).unwrap());
        // truncation inside the lower cascade collapses to the period-3 core
        let lower = &cascades[0];
        if let Some(&l) = lower.neglectable.first() {
            assert_eq!(truncate(&seq, l).unwrap(), Shuffle::sigma3());
        }
    }

    #[test]
    fn compact_coordinates_and_embedding() {
        assert_eq!(embed_f(&[1]), 0.5);
        assert_eq!(embed_f(&[1, 2]), 0.625);
        // decreasing in each coordinate; strictness holds whenever the
        // affected term is representable next to the leading one (beyond
        // ~52 bits of exponent separation f64 absorbs it)
        for x1 in 1..=10u32 {
            for x2 in 1..=10u32 {
                if x1 < 10 {
                    assert!(embed_f(&[x1 + 1, x2]) < embed_f(&[x1, x2]));
                }
                if x2 < 10 {
                    let lhs = embed_f(&[x1, x2 + 1]);
                    let rhs = embed_f(&[x1, x2]);
                    let span_bits = (x1 * x2 + 1) as i32 - x1 as i32;
                    if span_bits <= 50 {
                        assert!(lhs < rhs, "x = ({x1}, {x2})");
                    } else {
                        assert!(lhs <= rhs);
                    }
                }
            }
        }
        let s5 = sigma3_n(5).unwrap();
        let cs = compact_coords(&s5).unwrap();
        assert_eq!(cs.coords, vec![CompactCoord::Finite(4)]);
        let end = end_of_family(&s5, 0).unwrap();
        assert_eq!(end.coords, vec![CompactCoord::Infinite]);
    }

    #[test]
    fn c_of_end_of_the_tripling_family() {
        let s5 = sigma3_n(5).unwrap();
        let c = c_of_end(&s5, 0).unwrap();
        assert!((c + 1.75).abs() <= 1e-9, "end parameter {c}");
    }

    #[test]
    fn return_words_match_symbolic_prediction_through_cascades() {
        // the words stored in the nest at c_n agree with the reference chain
        for n in [6usize, 9, 12] {
            let c = solver::sigma3_center(n).unwrap().c;
            let nest = build_nest(QuadParam::real(c).unwrap(), 64).unwrap();
            let seq = return_type_sequence(&nest).unwrap();
            assert_eq!(seq, fixtures::sigma3_sequence(n), "n = {n}");
        }
    }

    #[test]
    fn landing_stacks_agree_between_nest_and_expansion() {
        for n in [2usize, 4] {
            let c = solver::sigma3_center(n).unwrap().c;
            let nest = build_nest(QuadParam::real(c).unwrap(), 64).unwrap();
            let seq = return_type_sequence(&nest).unwrap();
            let symbolic = seq.expand();
            let numeric = nest.combinatorics();
            assert_eq!(numeric.period, symbolic.period);
            // the critical point's stack depth is a representation detail;
            // compare all other times
            for t in 1..numeric.period {
                assert_eq!(
                    numeric.stacks[t - 1],
                    symbolic.stacks[t - 1],
                    "n = {n}, t = {t}"
                );
            }
        }
    }
}
