//! Shared oracles for the integration tests.
#![allow(dead_code)]

/// Adaptive Simpson quadrature; `eps` is relative to the first estimate.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps || (b - a) <= 1e-14 * a.abs().max(b.abs()) {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = (b - a).abs() * (fa.abs() + fm.abs() + fb.abs()) / 3.0;
    rec(f, a, b, fa, fm, fb, whole, eps * scale.max(1e-300), 40)
}

/// Simpson over a split grid, refining more where the integrand is steep.
pub fn simpson_split<F: Fn(f64) -> f64>(f: &F, cuts: &[f64], eps: f64) -> f64 {
    cuts.windows(2).map(|w| simpson(f, w[0], w[1], eps)).sum()
}

/// Geometric cut points accumulating at `b` (from `a`).
pub fn cuts_towards(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut out = vec![a];
    let mut gap = b - a;
    for _ in 0..n {
        gap /= 2.0;
        out.push(b - gap);
    }
    out.push(b);
    out
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
