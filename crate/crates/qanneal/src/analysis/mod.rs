//! Scaling analysis: log-log fits, onset of adiabaticity, collapse quality
//! and automatic fit windows.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub exponent: f64,
    pub stderr: f64,
    /// Log-log intercept: ln n = intercept + exponent ln T.
    pub intercept: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub points: usize,
}

fn check_positive(points: &[(f64, f64)]) -> Result<()> {
    for &(t, n) in points {
        if !(t > 0.0 && n > 0.0 && t.is_finite() && n.is_finite()) {
            return Err(Error::Invalid(format!("log-log fit needs positive finite data, got ({t}, {n})")));
        }
    }
    Ok(())
}

/// Ordinary least squares of ln n on ln T over all given points.
fn loglog_ols(points: &[(f64, f64)]) -> FitResult {
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if points.len() > 2 { (sse / (m - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let tmin = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let tmax = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    FitResult { exponent: slope, stderr, intercept, window: (tmin, tmax), r_squared, points: points.len() }
}

/// Power-law fit n ~ T^exponent over the points inside `window` (all points
/// when `None`). Needs at least five points.
pub fn fit_power_law(points: &[(f64, f64)], window: Option<(f64, f64)>) -> Result<FitResult> {
    let sel: Vec<(f64, f64)> = match window {
        Some((lo, hi)) => points.iter().copied().filter(|p| p.0 >= lo && p.0 <= hi).collect(),
        None => points.to_vec(),
    };
    if sel.len() < 5 {
        return Err(Error::Invalid(format!("power-law fit needs at least 5 points in the window, got {}", sel.len())));
    }
    check_positive(&sel)?;
    let mut fit = loglog_ols(&sel);
    if let Some(w) = window {
        fit.window = w;
    }
    Ok(fit)
}

/// Log-log fit for a handful of points (e.g. onset time against L).
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::Invalid("scaling fit needs at least 2 points".into()));
    }
    check_positive(points)?;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::Invalid("scaling fit needs distinct abscissae".into()));
    }
    Ok(loglog_ols(points))
}

fn sorted(curve: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut c = curve.to_vec();
    c.sort_by(|a, b| a.0.total_cmp(&b.0));
    c
}

/// First T where n drops to 1/L, by log-log interpolation between the
/// bracketing samples. Input order does not matter.
pub fn onset_time(curve: &[(f64, f64)], l: usize) -> Result<f64> {
    let c = sorted(curve);
    check_positive(&c)?;
    let target = 1.0 / l as f64;
    if c.is_empty() {
        return Err(Error::Invalid("empty curve".into()));
    }
    if c[0].1 <= target {
        if c[0].1 == target {
            return Ok(c[0].0);
        }
        return Err(Error::Invalid(format!(
            "curve starts below 1/L = {target:e} at T = {}; onset not bracketed",
            c[0].0
        )));
    }
    for w in c.windows(2) {
        let ((t0, n0), (t1, n1)) = (w[0], w[1]);
        if n1 <= target {
            let f = (target.ln() - n0.ln()) / (n1.ln() - n0.ln());
            return Ok((t0.ln() + f * (t1.ln() - t0.ln())).exp());
        }
    }
    let min = c.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Err(Error::Invalid(format!("no crossing of 1/L = {target:e}; smallest n attained is {min:e}")))
}

fn interp_loglog(c: &[(f64, f64)], x: f64) -> f64 {
    let i = c.partition_point(|p| p.0 < x);
    if i == 0 {
        return c[0].1;
    }
    if i == c.len() {
        return c[c.len() - 1].1;
    }
    let ((x0, y0), (x1, y1)) = (c[i - 1], c[i]);
    if x1 == x0 {
        return y1;
    }
    let f = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
    (y0.ln() + f * (y1.ln() - y0.ln())).exp()
}

/// Largest relative spread max/min - 1 between curves after rescaling
/// T -> T / L^mu, over their common range.
pub fn collapse_error(curves: &[(usize, Vec<(f64, f64)>)], mu: f64) -> Result<f64> {
    if curves.len() < 2 {
        return Err(Error::Invalid("collapse needs at least two sizes".into()));
    }
    let scaled: Vec<Vec<(f64, f64)>> = curves
        .iter()
        .map(|(l, c)| {
            let s = (*l as f64).powf(mu);
            sorted(&c.iter().map(|&(t, n)| (t / s, n)).collect::<Vec<_>>())
        })
        .collect();
    for c in &scaled {
        check_positive(c)?;
        if c.len() < 2 {
            return Err(Error::Invalid("each curve needs at least two points".into()));
        }
    }
    let lo = scaled.iter().map(|c| c[0].0).fold(f64::NEG_INFINITY, f64::max);
    let hi = scaled.iter().map(|c| c[c.len() - 1].0).fold(f64::INFINITY, f64::min);
    if !(lo < hi) {
        return Err(Error::Invalid(format!("rescaled curves do not overlap for mu = {mu}")));
    }
    // probe at every rescaled sample inside the overlap plus a log grid
    let mut xs: Vec<f64> = scaled.iter().flatten().map(|p| p.0).filter(|&x| x >= lo && x <= hi).collect();
    xs.extend((0..=64).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / 64.0).exp()));
    let mut worst = 0.0f64;
    for x in xs {
        let vals: Vec<f64> = scaled.iter().map(|c| interp_loglog(c, x)).collect();
        let mx = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mn = vals.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(mx / mn - 1.0);
    }
    Ok(worst)
}

/// First T where n falls below 0.9 of the mean of the three smallest-T
/// values.
pub fn plateau_end(curve: &[(f64, f64)]) -> Result<f64> {
    let c = sorted(curve);
    if c.len() < 3 {
        return Err(Error::Invalid("plateau detection needs at least three points".into()));
    }
    let level = (c[0].1 + c[1].1 + c[2].1) / 3.0;
    c.iter()
        .find(|p| p.1 < 0.9 * level)
        .map(|p| p.0)
        .ok_or_else(|| Error::Invalid("no decay below the plateau".into()))
}

/// Longest run of samples after the plateau whose local log-log slopes
/// stay within 20% of each other.
pub fn auto_window(curve: &[(f64, f64)]) -> Result<(f64, f64)> {
    let c = sorted(curve);
    check_positive(&c)?;
    let start = plateau_end(&c)?;
    let tail: Vec<(f64, f64)> = c.into_iter().filter(|p| p.0 >= start).collect();
    if tail.len() < 5 {
        return Err(Error::Invalid("fewer than 5 points after the plateau".into()));
    }
    let slopes: Vec<f64> = tail
        .windows(2)
        .map(|w| (w[1].1.ln() - w[0].1.ln()) / (w[1].0.ln() - w[0].0.ln()))
        .collect();
    let mut best = (0usize, 0usize);
    for i in 0..slopes.len() {
        let (mut mn, mut mx) = (slopes[i], slopes[i]);
        let mut j = i;
        while j + 1 < slopes.len() {
            let (a, b) = (mn.min(slopes[j + 1]), mx.max(slopes[j + 1]));
            let mean = 0.5 * (a + b);
            if a * b <= 0.0 || (b - a) > 0.2 * mean.abs() {
                break;
            }
            mn = a;
            mx = b;
            j += 1;
        }
        if slopes[i] != 0.0 && j - i > best.1 - best.0 {
            best = (i, j);
        }
    }
    // slopes i..=j span samples i..=j+1
    let (i, j) = best;
    if j + 2 - i < 5 {
        return Err(Error::Invalid("no power-law stretch of at least 5 points".into()));
    }
    Ok((tail[i].0, tail[j + 1].0))
}

/// Decay exponent over the automatic window.
pub fn fit_decay(curve: &[(f64, f64)]) -> Result<FitResult> {
    let w = auto_window(curve)?;
    fit_power_law(curve, Some(w))
}
