//! Distinguished real parameters of the quadratic family: superattracting
//! centers of prescribed shuffles (kneading bisection plus Newton), the
//! essentially-period-tripling centers `c_n`, parabolic root points of real
//! M-copies (two-variable Newton with multiplier continuation), and a
//! kneading-matching estimator for the inner class of a unimodal germ.

use std::cmp::Ordering;

use thiserror::Error;

use crate::dynamics::QuadParam;
use crate::renorm::RenormGerm;
use crate::shuffle::{self, cmp_orbit_times, Shuffle, Symbol};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no bracket for the requested combinatorics: {0}")]
    NoBracket(String),
    #[error("Newton refinement diverged (best residual {residual:e})")]
    NewtonDivergence { residual: f64 },
    #[error("solved parameter fails its round-trip check: {0}")]
    RoundTrip(String),
    #[error("shuffle error: {0}")]
    Shuffle(#[from] shuffle::ShuffleError),
}

/// A solved superattracting center.
#[derive(Debug, Clone)]
pub struct CenterSolve {
    pub sigma: Shuffle,
    pub c: f64,
    /// Compensated tail of the parameter: the solved center is `c + c_lo`.
    /// Zero whenever plain double precision already meets the tolerance;
    /// long essentially-bounded orbits need the extra digits because the
    /// representable-parameter floor of the residual exceeds 1e-12.
    pub c_lo: f64,
    /// `|f_c^p(0)|` at the returned (compensated) parameter.
    pub residual: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
}

/// A solved parabolic root point of a real M-copy.
#[derive(Debug, Clone)]
pub struct RootSolve {
    pub sigma: Shuffle,
    pub c: f64,
    pub z: f64,
    pub period: usize,
    pub residual_fix: f64,
    pub residual_mult: f64,
}

/// Kneading-matching bracket for the inner class of a real germ.
#[derive(Debug, Clone, Copy)]
pub struct InnerClassBracket {
    pub lo: f64,
    pub hi: f64,
    pub depth_used: usize,
    /// Set when the germ's critical orbit hit the partition boundary before
    /// the requested depth.
    pub truncated: bool,
}

impl InnerClassBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Compares the critical-value itinerary of `f_c` against the periodic
/// extension of a superattracting pattern, in the signed lexicographic order
/// aligned with the parameter: smaller `c` has smaller kneading.
fn cmp_kneading_to_pattern(c: f64, pattern: &[Symbol], periods: usize) -> Ordering {
    let p = pattern.len();
    let mut x = 0.0f64;
    let mut sign = 1i32;
    for j in 0..p * periods {
        x = x * x + c;
        let actual = if x == 0.0 {
            Symbol::C
        } else if x < 0.0 {
            Symbol::L
        } else {
            Symbol::R
        };
        let target = pattern[j % p];
        if actual != target {
            let a = sign * match actual {
                Symbol::L => -1,
                Symbol::C => 0,
                Symbol::R => 1,
            };
            let b = sign * match target {
                Symbol::L => -1,
                Symbol::C => 0,
                Symbol::R => 1,
            };
            return a.cmp(&b);
        }
        match actual {
            Symbol::L => sign = -sign,
            Symbol::C => return Ordering::Equal,
            Symbol::R => {}
        }
        if x.abs() > 4.0 {
            // escaped; the remaining symbols stay R and the comparison above
            // would have resolved already for admissible targets
            break;
        }
    }
    Ordering::Equal
}

/// Kneading bisection toward the superattracting parameter realizing
/// `pattern`, optionally Newton-polished on `c -> f_c^p(0)`. Long composed
/// patterns are accepted at bisection accuracy.
pub fn center_of_pattern(
    pattern: &[Symbol],
    tol: f64,
    polish: bool,
) -> Result<(f64, (f64, f64), f64), SolverError> {
    let p = pattern.len();
    let mut lo = -2.0f64;
    let mut hi = 0.25f64;
    if cmp_kneading_to_pattern(lo, pattern, 3) == Ordering::Greater
        || cmp_kneading_to_pattern(hi, pattern, 3) == Ordering::Less
    {
        return Err(SolverError::NoBracket(format!(
            "pattern of period {p} not bracketed by [-2, 1/4]"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match cmp_kneading_to_pattern(mid, pattern, 3) {
            Ordering::Less => lo = mid,
            Ordering::Greater => hi = mid,
            Ordering::Equal => {
                lo = mid;
                hi = mid;
                break;
            }
        }
    }
    let bracket = (lo, hi);
    let mut c = 0.5 * (lo + hi);
    let orbit_end = |c: f64| {
        let mut x = 0.0f64;
        for _ in 0..p {
            x = x * x + c;
        }
        x
    };
    if polish {
        let mut best = (c, orbit_end(c).abs());
        for _ in 0..50 {
            let mut x = 0.0f64;
            let mut dc = 0.0f64;
            for _ in 0..p {
                dc = 2.0 * x * dc + 1.0;
                x = x * x + c;
            }
            if x.abs() < best.1 {
                best = (c, x.abs());
            }
            if x.abs() <= tol || dc == 0.0 || !dc.is_finite() {
                break;
            }
            let step = x / dc;
            let next = (c - step).clamp(lo - 1e-9, hi + 1e-9);
            if next == c {
                break;
            }
            c = next;
        }
        let r = orbit_end(c).abs();
        if r > best.1 {
            c = best.0;
        }
    }
    let residual = orbit_end(c).abs();
    Ok((c, bracket, residual))
}

/// Compensated Newton polish of a superattracting parameter: refines the
/// tail beyond the f64-representable grid, where the residual of long orbits
/// otherwise floors at `|d f^p(0)/dc| * ulp(c)`.
fn dd_polish(c0: f64, p: usize) -> (Dd, f64) {
    let mut c = Dd::new(c0);
    let mut best = (c, f64::INFINITY);
    for _ in 0..30 {
        let (x, dc) = orbit_end_dd(c, p);
        let r = x.value().abs();
        if r < best.1 {
            best = (c, r);
        }
        if r <= 1e-14 || dc == 0.0 || !dc.is_finite() {
            break;
        }
        c = c.add(Dd::new(-x.value() / dc));
    }
    best
}

/// Center of a valid shuffle, with the round-trip check enforced.
pub fn center_of_shuffle(sigma: &Shuffle) -> Result<CenterSolve, SolverError> {
    let p = sigma.period();
    assert!(p >= 2 && p <= 64, "center solving supports periods 2..=64");
    let pattern = sigma.pattern();
    let (c, bracket, mut residual) = center_of_pattern(&pattern, 1e-12, true)?;
    let mut c = Dd::new(c);
    if residual > 1e-12 {
        let (cd, r) = dd_polish(c.hi, p);
        c = cd;
        residual = r;
    }
    if residual > 1e-12 {
        return Err(SolverError::NewtonDivergence { residual });
    }
    let back = shuffle::shuffle_of_center(QuadParam::real(c.hi).unwrap(), p)?;
    if back != *sigma {
        return Err(SolverError::RoundTrip(format!(
            "expected {} got {}",
            sigma.cycle_notation(),
            back.cycle_notation()
        )));
    }
    Ok(CenterSolve {
        sigma: sigma.clone(),
        c: c.hi,
        c_lo: c.lo,
        residual,
        bracket,
    })
}

/// The essentially-period-tripling center `c_n` (period `3n + 2`).
pub fn sigma3_center(n: usize) -> Result<CenterSolve, SolverError> {
    assert!(n >= 1);
    let pattern = shuffle::sigma3_pattern(n);
    let p = 3 * n + 2;
    let (c, bracket, mut residual) = center_of_pattern(&pattern, 1e-12, true)?;
    let mut c = Dd::new(c);
    if residual > 1e-12 {
        let (cd, r) = dd_polish(c.hi, p);
        c = cd;
        residual = r;
    }
    if residual > 1e-12 {
        return Err(SolverError::NewtonDivergence { residual });
    }
    let sigma = shuffle::shuffle_of_center(QuadParam::real(c.hi).unwrap(), p)?;
    if sigma.pattern() != pattern {
        return Err(SolverError::RoundTrip(format!(
            "realized pattern differs for c_{n}"
        )));
    }
    Ok(CenterSolve {
        sigma,
        c: c.hi,
        c_lo: c.lo,
        residual,
        bracket,
    })
}

/// Solves `c_n` for `n = 1..=n_max`; per-n failures are recorded, not fatal.
pub fn centers_sigma3(n_max: usize) -> Vec<(usize, Result<CenterSolve, SolverError>)> {
    (1..=n_max).map(|n| (n, sigma3_center(n))).collect()
}

/// Double-double value for compensated orbit evaluation.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(hi: f64) -> Dd {
        Dd { hi, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Dd {
        let s = hi + lo;
        let e = lo - (s - hi);
        Dd { hi: s, lo: e }
    }

    fn add(self, other: Dd) -> Dd {
        let s = self.hi + other.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (other.hi - bb) + self.lo + other.lo;
        Dd::renorm(s, err)
    }

    fn mul(self, other: Dd) -> Dd {
        let p = self.hi * other.hi;
        let e = self.hi.mul_add(other.hi, -p);
        let err = e + self.hi * other.lo + self.lo * other.hi;
        Dd::renorm(p, err)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// `|f_c^p(0)|` and the parameter derivative, with the orbit carried in
/// compensated arithmetic at the compensated parameter `c = c_hi + c_lo`.
fn orbit_end_dd(c: Dd, p: usize) -> (Dd, f64) {
    let mut x = Dd::new(0.0);
    let mut dc = 0.0f64;
    for _ in 0..p {
        dc = 2.0 * x.value() * dc + 1.0;
        x = x.mul(x).add(c);
    }
    (x, dc)
}

/// Jet of `f_c^n(z)` in `(z, c)`: value, d/dz, d/dc, d2/dz2, d2/dzdc.
fn mixed_jet(c: f64, z: f64, n: usize) -> (f64, f64, f64, f64, f64) {
    let mut v = z;
    let mut vz = 1.0f64;
    let mut vc = 0.0f64;
    let mut vzz = 0.0f64;
    let mut vzc = 0.0f64;
    for _ in 0..n {
        vzz = 2.0 * (vz * vz + v * vzz);
        vzc = 2.0 * (vc * vz + v * vzc);
        vz = 2.0 * v * vz;
        vc = 2.0 * v * vc + 1.0;
        v = v * v + c;
    }
    (v, vz, vc, vzz, vzc)
}

/// Root point of the real M-copy of `sigma`: the parameter where the
/// periodic orbit born at the center reaches multiplier one. Solved by
/// two-variable Newton on `(f^q(z) - z, (f^q)'(z) - m)` continued in the
/// multiplier `m` from the superattracting center.
pub fn root_of_copy(sigma: &Shuffle) -> Result<RootSolve, SolverError> {
    let q = sigma.period();
    let center = center_of_shuffle(sigma)?;
    let mut c = center.c;
    let mut z = 0.0f64;
    for &m in &[0.25f64, 0.5, 0.75, 0.9, 0.99, 1.0] {
        let mut converged = false;
        for _ in 0..80 {
            let (v, vz, vc, vzz, vzc) = mixed_jet(c, z, q);
            let g1 = v - z;
            let g2 = vz - m;
            if g1.abs() <= 1e-13 && g2.abs() <= 1e-13 {
                converged = true;
                break;
            }
            // rows: d(g1)/(dz,dc), d(g2)/(dz,dc)
            let a11 = vz - 1.0;
            let a12 = vc;
            let a21 = vzz;
            let a22 = vzc;
            let det = a11 * a22 - a12 * a21;
            if det.abs() < 1e-300 {
                break;
            }
            let dz = (g1 * a22 - g2 * a12) / det;
            let dc = (a11 * g2 - a21 * g1) / det;
            z -= dz;
            c -= dc;
            if !z.is_finite() || !c.is_finite() {
                return Err(SolverError::NewtonDivergence { residual: f64::NAN });
            }
        }
        if !converged && m == 1.0 {
            let (v, vz, ..) = mixed_jet(c, z, q);
            let res = (v - z).abs().max((vz - 1.0).abs());
            if res > 1e-10 {
                return Err(SolverError::NewtonDivergence { residual: res });
            }
        }
    }
    let (v, vz, ..) = mixed_jet(c, z, q);
    let residual_fix = (v - z).abs();
    let residual_mult = (vz - 1.0).abs();
    if residual_fix > 1e-10 || residual_mult > 1e-10 {
        return Err(SolverError::NewtonDivergence {
            residual: residual_fix.max(residual_mult),
        });
    }
    Ok(RootSolve {
        sigma: sigma.clone(),
        c,
        z,
        period: q,
        residual_fix,
        residual_mult,
    })
}

fn germ_symbols(germ: &RenormGerm, depth: usize) -> (Vec<Symbol>, bool) {
    let mut out = Vec::with_capacity(depth);
    let mut x = 0.0f64;
    for _ in 0..depth {
        x = germ.eval(x);
        if x.abs() <= 1e-12 {
            return (out, true);
        }
        out.push(if x < 0.0 { Symbol::L } else { Symbol::R });
    }
    (out, false)
}

fn quadratic_prefix_matches(c: f64, target: &[Symbol]) -> bool {
    let mut x = 0.0f64;
    for &t in target {
        x = x * x + c;
        let s = if x < 0.0 { Symbol::L } else { Symbol::R };
        if x == 0.0 || s != t {
            return false;
        }
    }
    true
}

fn cmp_prefix(c: f64, target: &[Symbol]) -> Ordering {
    let mut x = 0.0f64;
    let mut sign = 1i32;
    for &t in target {
        x = x * x + c;
        let actual = if x == 0.0 {
            Symbol::C
        } else if x < 0.0 {
            Symbol::L
        } else {
            Symbol::R
        };
        if actual != t {
            let rank = |s: Symbol| match s {
                Symbol::L => -1,
                Symbol::C => 0,
                Symbol::R => 1,
            };
            return (sign * rank(actual)).cmp(&(sign * rank(t)));
        }
        if actual == Symbol::L {
            sign = -sign;
        }
    }
    Ordering::Equal
}

/// Estimates the inner class of a real unimodal germ by bisecting for the
/// quadratic parameters whose critical itinerary matches the germ's first
/// `depth` symbols. Returns the bracketing parameter interval.
pub fn inner_class_real(germ: &RenormGerm, depth: usize) -> InnerClassBracket {
    assert!(depth <= 48, "kneading depth limited to 48 symbols");
    if depth == 0 {
        return InnerClassBracket {
            lo: -2.0,
            hi: 0.25,
            depth_used: 0,
            truncated: false,
        };
    }
    let (symbols, truncated) = germ_symbols(germ, depth);
    let depth_used = symbols.len();
    if depth_used == 0 {
        return InnerClassBracket {
            lo: -2.0,
            hi: 0.25,
            depth_used: 0,
            truncated,
        };
    }
    if truncated {
        // the germ's critical orbit closed up: it is superattracting and the
        // matching parameter is the center realizing the finite pattern
        let mut pattern = symbols.clone();
        pattern.push(Symbol::C);
        if let Ok((c, bracket, _)) = center_of_pattern(&pattern, 1e-12, true) {
            let w = (bracket.1 - bracket.0).max(1e-13);
            return InnerClassBracket {
                lo: c - w,
                hi: c + w,
                depth_used,
                truncated,
            };
        }
    }
    // Locate one matching parameter.
    let mut lo = -2.0f64;
    let mut hi = 0.25f64;
    let mut inside = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if quadratic_prefix_matches(mid, &symbols) {
            inside = Some(mid);
            break;
        }
        match cmp_prefix(mid, &symbols) {
            Ordering::Less => lo = mid,
            Ordering::Greater => hi = mid,
            Ordering::Equal => break,
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    let Some(c_in) = inside else {
        // Match set below bisection resolution; report the residual bracket.
        return InnerClassBracket {
            lo,
            hi,
            depth_used,
            truncated,
        };
    };
    // Edge bisection on the matching predicate.
    let mut l_out = -2.0f64;
    let mut l_in = c_in;
    for _ in 0..100 {
        let mid = 0.5 * (l_out + l_in);
        if quadratic_prefix_matches(mid, &symbols) {
            l_in = mid;
        } else {
            l_out = mid;
        }
    }
    let mut r_in = c_in;
    let mut r_out = 0.25f64;
    for _ in 0..100 {
        let mid = 0.5 * (r_in + r_out);
        if quadratic_prefix_matches(mid, &symbols) {
            r_in = mid;
        } else {
            r_out = mid;
        }
    }
    InnerClassBracket {
        lo: l_in,
        hi: r_in,
        depth_used,
        truncated,
    }
}

/// Itinerary order check used by property tests: ranks orbit times of a
/// pattern exactly as the realized orbit sorts on the line.
pub(crate) fn pattern_order_consistent(pattern: &[Symbol], orbit: &[f64]) -> bool {
    let p = pattern.len();
    for t in 1..=p {
        for u in 1..=p {
            let by_pattern = cmp_orbit_times(pattern, t, u);
            let by_value = orbit[t - 1].partial_cmp(&orbit[u - 1]).unwrap();
            if t != u && by_pattern != by_value {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shuffle::{star_product, validate_shuffle};

    #[test]
    fn center_of_sigma2_is_minus_one() {
        let s = center_of_shuffle(&Shuffle::sigma2()).unwrap();
        assert!((s.c + 1.0).abs() <= 1e-12, "c = {}", s.c);
        assert!(s.residual <= 1e-12);
    }

    #[test]
    fn center_of_sigma3_matches_cubic_root() {
        // Newton on the factored quartic f^3(0) = c (c^3 + 2c^2 + c + 1).
        let mut r = -1.75f64;
        for _ in 0..60 {
            let g = r * r * r + 2.0 * r * r + r + 1.0;
            let dg = 3.0 * r * r + 4.0 * r + 1.0;
            r -= g / dg;
        }
        let s = center_of_shuffle(&Shuffle::sigma3()).unwrap();
        assert!((s.c - r).abs() <= 1e-12, "c = {} vs {}", s.c, r);
    }

    #[test]
    fn center_of_doubling_product() {
        let d = star_product(&Shuffle::sigma2(), &Shuffle::sigma2());
        let s = center_of_shuffle(&d).unwrap();
        assert!((s.c + 1.3107026).abs() <= 1e-6, "c = {}", s.c);
        assert!(s.residual <= 1e-12);
    }

    #[test]
    fn tuned_center_agrees_with_star_product() {
        let t = star_product(&Shuffle::sigma3(), &Shuffle::sigma2());
        let s = center_of_shuffle(&t).unwrap();
        let read = shuffle::shuffle_of_center(QuadParam::real(s.c).unwrap(), 6).unwrap();
        assert_eq!(read, t);
    }

    #[test]
    fn sigma3_centers_first_two() {
        let c1 = sigma3_center(1).unwrap();
        assert!((c1.c + 1.6254137251235).abs() <= 1e-9, "c1 = {}", c1.c);
        let c2 = sigma3_center(2).unwrap();
        assert!((c2.c + 1.7110794700) .abs() <= 1e-8, "c2 = {}", c2.c);
        assert!(c2.c < c1.c);
        assert!(c1.residual <= 1e-12 && c2.residual <= 1e-12);
    }

    #[test]
    fn sigma3_centers_decrease_toward_root() {
        let solves = centers_sigma3(10);
        let mut prev = f64::INFINITY;
        for (n, s) in &solves {
            let s = s.as_ref().unwrap_or_else(|e| panic!("n={n}: {e}"));
            assert!(s.c > -1.75, "c_{n} = {} below the root", s.c);
            assert!(s.c < prev, "not strictly decreasing at n={n}");
            assert!(s.residual <= 1e-12);
            prev = s.c;
        }
    }

    #[test]
    fn root_of_sigma2_and_sigma3() {
        let r2 = root_of_copy(&Shuffle::sigma2()).unwrap();
        assert!((r2.c + 0.75).abs() <= 1e-9, "root {}", r2.c);
        // Closed-form: the 2-cycle multiplier is 4(c+1), equal to 1 at -3/4.
        assert!((4.0 * (r2.c + 1.0) - 1.0).abs() <= 1e-8);

        let r3 = root_of_copy(&Shuffle::sigma3()).unwrap();
        assert!((r3.c + 1.75).abs() <= 1e-9, "root {}", r3.c);
        assert!(r3.residual_fix <= 1e-10 && r3.residual_mult <= 1e-10);
    }

    #[test]
    fn roots_sit_on_the_cardioid_side_of_their_centers() {
        for sigma in [Shuffle::sigma2(), Shuffle::sigma3()] {
            let center = center_of_shuffle(&sigma).unwrap();
            let root = root_of_copy(&sigma).unwrap();
            assert!(root.c > center.c, "root of a real copy lies toward 1/4");
        }
    }

    #[test]
    fn distinct_shuffles_of_equal_period_have_separated_centers() {
        // All period-5 shuffles.
        let mut centers = Vec::new();
        let perms = all_permutations(5);
        for perm in perms {
            if let Ok(s) = validate_shuffle(&perm) {
                centers.push(center_of_shuffle(&s).unwrap().c);
            }
        }
        assert_eq!(centers.len(), 3);
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in centers.windows(2) {
            assert!(w[1] - w[0] > 1e-9);
        }
    }

    pub(crate) fn all_permutations(p: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut items: Vec<usize> = (1..=p).collect();
        fn rec(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == items.len() {
                out.push(items.clone());
                return;
            }
            for i in k..items.len() {
                items.swap(k, i);
                rec(k + 1, items, out);
                items.swap(k, i);
            }
        }
        rec(0, &mut items, &mut out);
        out
    }

    #[test]
    fn pattern_order_matches_realized_orbit() {
        for sigma in [Shuffle::sigma2(), Shuffle::sigma3()] {
            let s = center_of_shuffle(&sigma).unwrap();
            let mut orbit = Vec::new();
            let mut x = 0.0f64;
            for _ in 0..sigma.period() {
                x = x * x + s.c;
                orbit.push(x);
            }
            assert!(pattern_order_consistent(&sigma.pattern(), &orbit));
        }
    }
}
