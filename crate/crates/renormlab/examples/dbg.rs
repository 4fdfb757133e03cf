use renormlab::renorm::*;
use renormlab::shuffle::{sigma3_pattern, star_pattern};
fn main() {
    let mut pat = sigma3_pattern(8);
    pat = star_pattern(&pat, &sigma3_pattern(10));
    pat = star_pattern(&pat, &sigma3_pattern(12));
    let (c, _, _) = renormlab::solver::center_of_pattern(&pat, 1e-12, true).unwrap();
    let g = RenormGerm::base(c).unwrap();
    let g1 = renormalize(&g, 40).unwrap();
    let n = 32usize;
    let ev = |x: f64| { let mut y = x; for _ in 0..n { y = g1.eval(y); } y };
    let j = (-0.0007036516961643415f64, 0.0007036516961643415f64);
    // coarse extremum location
    let at = 1.368972e-5f64;
    let w = (j.1 - j.0) / 64.0;
    let (lo, hi) = ((at - w).max(j.0), (at + w).min(j.1));
    println!("refine window ({lo:e}, {hi:e})");
    let pts = 128;
    let mut vals = vec![];
    for k in 0..=pts { let x = lo + (hi-lo)*(k as f64)/(pts as f64); vals.push(ev(x)); }
    let mut dirs = 0; let mut last = 0i8;
    for k in 1..=pts {
        let d = vals[k] - vals[k-1];
        let s = if d > 0.0 { 1i8 } else if d < 0.0 { -1 } else { 0 };
        if s != 0 {
            if last != 0 && s != last { dirs += 1; println!("  direction change at k={k} x={:e} d={:e}", lo + (hi-lo)*((k-1) as f64)/(pts as f64), d); }
            last = s;
        }
    }
    println!("refined extrema: {dirs}");
    for k in (0..=pts).step_by(16) { println!("  k={k} x={:.4e} val={:.12e}", lo + (hi-lo)*(k as f64)/(pts as f64), vals[k]); }
}
