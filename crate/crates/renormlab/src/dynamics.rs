//! Floating-point kernel for the quadratic family `f_c(z) = z^2 + c`:
//! iteration with escape tests, fixed points, Newton-refined periodic orbits
//! and the dynamical real intervals `B(f) = [-beta, beta]`, `A(f)` bounded by
//! the alpha fixed point and its preimage.

use num_complex::Complex64;
use thiserror::Error;

/// Validated parameter of the quadratic family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadParam {
    c: Complex64,
}

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("parameter has a non-finite component: {0}")]
    NonFinite(Complex64),
    #[error("Newton iteration failed to reach residual {tol:e} in {budget} steps (residual {residual:e})")]
    NoConvergence {
        tol: f64,
        budget: usize,
        residual: f64,
    },
    #[error("real parameter {0} outside [-2, 1/4]")]
    OutOfFamily(f64),
}

impl QuadParam {
    pub fn new(c: Complex64) -> Result<Self, DynamicsError> {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(DynamicsError::NonFinite(c));
        }
        Ok(QuadParam { c })
    }

    pub fn real(c: f64) -> Result<Self, DynamicsError> {
        Self::new(Complex64::new(c, 0.0))
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// One application of `z -> z^2 + c`.
    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        z * z + self.c
    }

    #[inline]
    pub fn apply_real(&self, x: f64) -> f64 {
        x * x + self.c.re
    }
}

/// Solver knobs shared by the Newton-based routines.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    /// Absolute residual tolerance on the defining equation.
    pub tol: f64,
    /// Iteration budget.
    pub budget: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-12,
            budget: 200,
        }
    }
}

/// Both fixed points of `f_c` with their multipliers. `beta` is the fixed
/// point for which `J(f) \ {beta}` stays connected; concretely the root of
/// `z^2 - z + c` with the larger `|2z|`, ties broken toward larger real part.
#[derive(Debug, Clone, Copy)]
pub struct FixedPointData {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub lambda_alpha: Complex64,
    pub lambda_beta: Complex64,
}

/// A recorded forward orbit, truncated at the first escape.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub start: Complex64,
    pub points: Vec<Complex64>,
    pub escaped: bool,
    pub escape_index: Option<usize>,
}

/// Real dynamical intervals: `B = [-beta, beta]` and `A` bounded by alpha and
/// its preimage `-alpha`, both stored as ordered `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealIntervals {
    pub b: (f64, f64),
    pub a: (f64, f64),
}

/// Iterates `z0` under `f_c` for up to `n` steps, recording `z0` itself and
/// every image, stopping early once `|z_k| > escape_radius`.
pub fn iterate(c: QuadParam, z0: Complex64, n: usize, escape_radius: f64) -> Orbit {
    let radius = escape_radius.max(2.0);
    let mut points = Vec::with_capacity(n + 1);
    points.push(z0);
    let mut z = z0;
    for k in 1..=n {
        z = c.apply(z);
        points.push(z);
        if z.norm() > radius {
            return Orbit {
                start: z0,
                points,
                escaped: true,
                escape_index: Some(k),
            };
        }
    }
    Orbit {
        start: z0,
        points,
        escaped: false,
        escape_index: None,
    }
}

/// Solves `z^2 - z + c = 0` in closed form and labels the roots.
pub fn fixed_points(c: QuadParam) -> FixedPointData {
    let disc = (Complex64::new(1.0, 0.0) - 4.0 * c.c()).sqrt();
    let z_plus = (Complex64::new(1.0, 0.0) + disc) / 2.0;
    let z_minus = (Complex64::new(1.0, 0.0) - disc) / 2.0;
    let (beta, alpha) = if z_plus.norm() > z_minus.norm() {
        (z_plus, z_minus)
    } else if z_minus.norm() > z_plus.norm() {
        (z_minus, z_plus)
    } else if z_plus.re >= z_minus.re {
        (z_plus, z_minus)
    } else {
        (z_minus, z_plus)
    };
    FixedPointData {
        alpha,
        beta,
        lambda_alpha: 2.0 * alpha,
        lambda_beta: 2.0 * beta,
    }
}

/// Second-order jet of `f_c^n` with respect to the phase variable: value,
/// first and second derivative propagated along the orbit.
#[derive(Debug, Clone, Copy)]
pub struct PhaseJet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

/// Propagates `(f^n(z), (f^n)'(z), (f^n)''(z))`.
pub fn phase_jet(c: QuadParam, z: Complex64, n: usize) -> PhaseJet {
    let mut v = z;
    let mut d1 = Complex64::new(1.0, 0.0);
    let mut d2 = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        d2 = 2.0 * (d1 * d1 + v * d2);
        d1 = 2.0 * v * d1;
        v = c.apply(v);
    }
    PhaseJet { value: v, d1, d2 }
}

/// Newton-refined periodic point of period `period` from `seed`. Returns the
/// full cycle and its multiplier. Near-parabolic cycles (multiplier close to
/// 1) are polished on `(f^q)'(z) = 1`, where the root is simple.
pub fn periodic_orbit(
    c: QuadParam,
    period: usize,
    seed: Complex64,
    cfg: SolveConfig,
) -> Result<(Vec<Complex64>, Complex64), DynamicsError> {
    assert!(period >= 1, "period must be positive");
    let mut z = seed;
    let mut best_res = f64::INFINITY;
    for _ in 0..cfg.budget {
        let jet = phase_jet(c, z, period);
        let g = jet.value - z;
        best_res = g.norm();
        if best_res <= cfg.tol {
            break;
        }
        let dg = jet.d1 - Complex64::new(1.0, 0.0);
        if dg.norm() < 1e-300 {
            break;
        }
        let step = g / dg;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(DynamicsError::NoConvergence {
                tol: cfg.tol,
                budget: cfg.budget,
                residual: f64::INFINITY,
            });
        }
    }
    // Parabolic polish: when the multiplier sits near 1, f^q(z) - z has a
    // near-double root and plain Newton stalls at ~sqrt(tol) accuracy. The
    // derivative equation (f^q)'(z) = 1 has a simple root there.
    let jet = phase_jet(c, z, period);
    if (jet.d1 - 1.0).norm() < 1e-3 {
        let mut w = z;
        for _ in 0..cfg.budget {
            let j = phase_jet(c, w, period);
            let h = j.d1 - Complex64::new(1.0, 0.0);
            if h.norm() <= 1e-14 || j.d2.norm() < 1e-300 {
                break;
            }
            w -= h / j.d2;
        }
        let jw = phase_jet(c, w, period);
        if (jw.value - w).norm() <= cfg.tol {
            z = w;
        }
    }
    let jet = phase_jet(c, z, period);
    let residual = (jet.value - z).norm();
    if residual > cfg.tol {
        return Err(DynamicsError::NoConvergence {
            tol: cfg.tol,
            budget: cfg.budget,
            residual: residual.min(best_res),
        });
    }
    let mut cycle = Vec::with_capacity(period);
    let mut multiplier = Complex64::new(1.0, 0.0);
    let mut p = z;
    for _ in 0..period {
        cycle.push(p);
        multiplier *= 2.0 * p;
        p = c.apply(p);
    }
    Ok((cycle, multiplier))
}

/// Real intervals for `c` in `[-2, 1/4]`.
pub fn real_intervals(c: QuadParam) -> Result<RealIntervals, DynamicsError> {
    let cr = c.c().re;
    if c.c().im != 0.0 || !(-2.0..=0.25).contains(&cr) {
        return Err(DynamicsError::OutOfFamily(cr));
    }
    let fp = fixed_points(c);
    let beta = fp.beta.re;
    let alpha = fp.alpha.re;
    let b = (-beta, beta);
    let a = if alpha <= -alpha {
        (alpha, -alpha)
    } else {
        (-alpha, alpha)
    };
    Ok(RealIntervals { b, a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> QuadParam {
        QuadParam::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn iterate_fixed_critical_point_at_zero() {
        let orbit = iterate(c(0.0, 0.0), Complex64::new(0.0, 0.0), 5, 2.0);
        assert!(!orbit.escaped);
        assert_eq!(orbit.points.len(), 6);
        for p in &orbit.points {
            assert_eq!(*p, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn iterate_chebyshev_orbit_by_hand() {
        // Hand iteration of z^2 - 2 from 0: 0, -2, 2, 2.
        let orbit = iterate(c(-2.0, 0.0), Complex64::new(0.0, 0.0), 3, 2.5);
        let expect = [0.0, -2.0, 2.0, 2.0];
        assert!(!orbit.escaped);
        for (p, e) in orbit.points.iter().zip(expect) {
            assert_eq!(p.re, e);
            assert_eq!(p.im, 0.0);
        }
    }

    #[test]
    fn iterate_escape_at_c_one() {
        // Brute-force oracle: 0, 1, 2, 5, 26 -> |z_4| = 26 > 2.
        let mut z = Complex64::new(0.0, 0.0);
        let cc = c(1.0, 0.0);
        let mut oracle_escape = None;
        for k in 1..=20 {
            z = cc.apply(z);
            if z.norm() > 2.0 {
                oracle_escape = Some(k);
                break;
            }
        }
        let orbit = iterate(cc, Complex64::new(0.0, 0.0), 20, 2.0);
        assert!(orbit.escaped);
        assert_eq!(orbit.escape_index, oracle_escape);
        assert!(orbit.escape_index.unwrap() <= 5);
    }

    #[test]
    fn orbit_recurrence_is_bit_exact() {
        let cc = c(-1.401155, 0.0);
        let orbit = iterate(cc, Complex64::new(0.3, 0.0), 64, 4.0);
        for k in 0..orbit.points.len() - 1 {
            let again = cc.apply(orbit.points[k]);
            assert_eq!(again, orbit.points[k + 1]);
        }
    }

    #[test]
    fn fixed_points_basic() {
        let fp = fixed_points(c(0.0, 0.0));
        assert!((fp.alpha.norm()) <= 1e-15);
        assert!((fp.beta - Complex64::new(1.0, 0.0)).norm() <= 1e-15);
        assert!((fp.lambda_beta - Complex64::new(2.0, 0.0)).norm() <= 1e-15);
        assert!(fp.lambda_alpha.norm() <= 1e-15);
    }

    #[test]
    fn fixed_points_merge_at_quarter() {
        let fp = fixed_points(c(0.25, 0.0));
        assert!((fp.alpha - fp.beta).norm() <= 1e-7);
        assert!((fp.alpha - Complex64::new(0.5, 0.0)).norm() <= 1e-7);
    }

    #[test]
    fn fixed_points_period_three_root_parameter() {
        // Quadratic formula at c = -1.75: beta = (1+sqrt(8))/2, alpha = (1-sqrt(8))/2.
        let fp = fixed_points(c(-1.75, 0.0));
        let s8 = 8.0_f64.sqrt();
        assert!((fp.beta.re - (1.0 + s8) / 2.0).abs() <= 1e-14);
        assert!((fp.alpha.re - (1.0 - s8) / 2.0).abs() <= 1e-14);
    }

    #[test]
    fn fixed_point_residuals() {
        for &(re, im) in &[(0.1, 0.3), (-1.3, 0.02), (-1.99, 0.0), (0.25, 0.0)] {
            let cc = c(re, im);
            let fp = fixed_points(cc);
            for z in [fp.alpha, fp.beta] {
                let res = (cc.apply(z) - z).norm();
                assert!(res <= 1e-12 * (1.0 + z.norm_sqr()), "residual {res}");
            }
        }
    }

    #[test]
    fn fixed_points_conjugation_symmetry() {
        let cc = c(-0.4, 0.31);
        let cj = c(-0.4, -0.31);
        let a = fixed_points(cc);
        let b = fixed_points(cj);
        assert!((a.alpha.conj() - b.alpha).norm() <= 1e-14);
        assert!((a.beta.conj() - b.beta).norm() <= 1e-14);
    }

    #[test]
    fn periodic_orbit_trivial_and_basilica() {
        let (orbit, mult) = periodic_orbit(
            c(0.0, 0.0),
            1,
            Complex64::new(0.1, 0.0),
            SolveConfig::default(),
        )
        .unwrap();
        assert!(orbit[0].norm() <= 1e-12);
        assert!(mult.norm() <= 1e-11);

        // f_{-1}: 0 -> -1 -> 0, superattracting 2-cycle.
        let (orbit, mult) = periodic_orbit(
            c(-1.0, 0.0),
            2,
            Complex64::new(-1.1, 0.0),
            SolveConfig::default(),
        )
        .unwrap();
        let mut pts: Vec<f64> = orbit.iter().map(|z| z.re).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((pts[0] + 1.0).abs() <= 1e-9);
        assert!(pts[1].abs() <= 1e-9);
        assert!(mult.norm() <= 1e-9);
    }

    #[test]
    fn periodic_orbit_parabolic_triple() {
        // Period-3 parabolic orbit at the root parameter -1.75.
        let (orbit, mult) = periodic_orbit(
            c(-1.75, 0.0),
            3,
            Complex64::new(0.3, 0.0),
            SolveConfig::default(),
        )
        .unwrap();
        assert_eq!(orbit.len(), 3);
        assert!((mult - Complex64::new(1.0, 0.0)).norm() <= 1e-8, "multiplier {mult}");
    }

    #[test]
    fn real_intervals_examples() {
        let ri = real_intervals(c(0.0, 0.0)).unwrap();
        assert_eq!(ri.b, (-1.0, 1.0));
        assert!(ri.a.0.abs() <= 1e-15 && ri.a.1.abs() <= 1e-15);

        let ri = real_intervals(c(-2.0, 0.0)).unwrap();
        assert!((ri.b.0 + 2.0).abs() <= 1e-14 && (ri.b.1 - 2.0).abs() <= 1e-14);

        let ri = real_intervals(c(-1.75, 0.0)).unwrap();
        let s8 = 8.0_f64.sqrt();
        let beta = (1.0 + s8) / 2.0;
        let alpha = (1.0 - s8) / 2.0;
        assert!((ri.b.1 - beta).abs() <= 1e-12);
        assert!((ri.a.0 - alpha).abs() <= 1e-12);
        assert!((ri.a.1 + alpha).abs() <= 1e-12);

        assert!(real_intervals(c(-2.01, 0.0)).is_err());
        assert!(real_intervals(c(0.26, 0.0)).is_err());
    }

    #[test]
    fn b_interval_is_forward_invariant_on_grid() {
        for &cr in &[-2.0, -1.75, -1.3, -0.5, 0.0, 0.25] {
            let cc = c(cr, 0.0);
            let ri = real_intervals(cc).unwrap();
            let n = 1200;
            for k in 0..=n {
                let x = ri.b.0 + (ri.b.1 - ri.b.0) * (k as f64) / (n as f64);
                let y = cc.apply_real(x);
                assert!(
                    y >= ri.b.0 - 1e-9 && y <= ri.b.1 + 1e-9,
                    "c={cr} x={x} image {y} leaves {:?}",
                    ri.b
                );
            }
        }
    }

    #[test]
    fn phase_jet_matches_finite_differences() {
        let cc = c(-1.2, 0.1);
        let z = Complex64::new(0.2, -0.1);
        let jet = phase_jet(cc, z, 5);
        let h = 1e-6;
        let f = |w: Complex64| iterate(cc, w, 5, 1e9).points[5];
        let d1 = (f(z + Complex64::new(h, 0.0)) - f(z - Complex64::new(h, 0.0)))
            / Complex64::new(2.0 * h, 0.0);
        assert!((jet.d1 - d1).norm() <= 1e-5);
        let d2 = (f(z + Complex64::new(h, 0.0)) - 2.0 * f(z) + f(z - Complex64::new(h, 0.0)))
            / Complex64::new(h * h, 0.0);
        assert!((jet.d2 - d2).norm() <= 1e-3);
    }
}
