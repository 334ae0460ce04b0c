//! Exact diagonalisation and real-time propagation for the disordered chain.
//!
//! Everything works in the full 2^L space. The even sector of the global
//! spin flip is selected by projecting Krylov vectors, and parity of the
//! propagated state is monitored rather than enforced.

mod evolve;
mod lanczos;

pub use evolve::{
    disordered_sweep, evolve_manybody, evolve_manybody_with, DisorderedRecord, DisorderedSink, DisorderedSweepConfig,
    ManybodyEvolution, PropagatorOptions, DISORDERED_CSV_HEADER,
};
pub use lanczos::{expm_apply, lowest_eigenpair, Eigenpair, LanczosOptions};

use serde::Serialize;

use crate::analysis::fit_scaling;
use crate::error::{Error, Result};
use crate::models::DisorderedChain;

/// Lowest state of H(g) in the even parity sector, or over the full space.
pub fn ground_state(chain: &DisorderedChain, g: f64, even_only: bool) -> Result<Eigenpair> {
    let dim = chain.dim();
    // |+...+> has a large overlap with the paramagnetic ground state; the
    // small ramp breaks accidental orthogonality at g = 0.
    let start: Vec<f64> = (0..dim).map(|b| 1.0 + 1e-3 * ((b % 7) as f64)).collect();
    let scale = chain.norm_bound(g);
    let opts = LanczosOptions::default();
    let apply = |x: &[f64], y: &mut [f64]| chain.apply(g, x, y);
    if even_only {
        lowest_eigenpair(apply, |v: &mut [f64]| project_even(v), &start, scale, &opts)
    } else {
        lowest_eigenpair(apply, |_: &mut [f64]| {}, &start, scale, &opts)
    }
}

/// Symmetrises a vector under the global spin flip.
pub fn project_even(v: &mut [f64]) {
    let n = v.len();
    for b in 0..n / 2 {
        let p = b ^ (n - 1);
        let s = 0.5 * (v[b] + v[p]);
        v[b] = s;
        v[p] = s;
    }
}

/// Two lowest even-sector levels at g.
pub fn even_levels(chain: &DisorderedChain, g: f64) -> Result<(Eigenpair, Eigenpair)> {
    even_levels_from(chain, g, None)
}

fn scramble(dim: usize) -> Vec<f64> {
    (0..dim).map(|b| ((b * 2654435761usize) % 1000) as f64 / 1000.0 - 0.5).collect()
}

/// As [`even_levels`], warm-started from nearby eigenvectors.
fn even_levels_from(chain: &DisorderedChain, g: f64, warm: Option<(&[f64], &[f64])>) -> Result<(Eigenpair, Eigenpair)> {
    let dim = chain.dim();
    let scale = chain.norm_bound(g);
    let opts = LanczosOptions::default();
    let ground = match warm {
        Some((v, _)) => lowest_eigenpair(|x, y| chain.apply(g, x, y), |v: &mut [f64]| project_even(v), v, scale, &opts)?,
        None => ground_state(chain, g, true)?,
    };
    let v0 = ground.vector.clone();
    let deflate = |v: &mut [f64]| {
        project_even(v);
        let c: f64 = v.iter().zip(&v0).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(&v0).for_each(|(x, y)| *x -= c * y);
    };
    // a little scrambled noise keeps the warm start from missing a level
    // that was orthogonal to the previous excited state
    let start: Vec<f64> = match warm {
        Some((_, v1)) => v1.iter().zip(scramble(dim)).map(|(a, b)| a + 1e-3 * b).collect(),
        None => scramble(dim),
    };
    let excited = lowest_eigenpair(|x, y| chain.apply(g, x, y), deflate, &start, scale, &opts)?;
    Ok((ground, excited))
}

/// Even-sector gap E1 - E0 at g.
pub fn even_gap(chain: &DisorderedChain, g: f64) -> Result<f64> {
    let (e0, e1) = even_levels(chain, g)?;
    Ok(e1.value - e0.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapScan {
    pub g_grid: Vec<f64>,
    pub gap: Vec<f64>,
    pub g_star: f64,
    pub delta_min: f64,
}

/// Scans the even-sector gap on a uniform grid and refines the minimum
/// with a parabola through the three lowest neighbouring points.
pub fn gap_scan(chain: &DisorderedChain, interval: (f64, f64), points: usize) -> Result<GapScan> {
    if points < 20 {
        return Err(Error::Invalid(format!("gap scan needs at least 20 points, got {points}")));
    }
    let (a, b) = interval;
    if !(b > a) {
        return Err(Error::Invalid(format!("empty interval [{a}, {b}]")));
    }
    let h = (b - a) / (points - 1) as f64;
    let g_grid: Vec<f64> = (0..points).map(|i| a + h * i as f64).collect();
    let mut gap = Vec::with_capacity(points);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for &g in &g_grid {
        let warm = prev.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice()));
        let (e0, e1) = even_levels_from(chain, g, warm)?;
        gap.push(e1.value - e0.value);
        prev = Some((e0.vector, e1.vector));
    }
    if let Some(i) = gap.iter().position(|&d| d < 1e-10) {
        return Err(Error::Convergence(format!(
            "gap {:e} at g = {} is below 1e-10; level crossing cannot be resolved",
            gap[i], g_grid[i]
        )));
    }
    let imin = (0..points).fold(0, |m, i| if gap[i] < gap[m] { i } else { m });
    if imin == 0 || imin + 1 == points {
        return Err(Error::Invalid(format!(
            "gap minimum at the scan boundary g = {}; widen the interval",
            g_grid[imin]
        )));
    }
    let (y0, y1, y2) = (gap[imin - 1], gap[imin], gap[imin + 1]);
    let curv = y0 - 2.0 * y1 + y2;
    let shift = if curv > 0.0 { 0.5 * h * (y0 - y2) / curv } else { 0.0 };
    let g_star = g_grid[imin] + shift.clamp(-h, h);
    let refined = even_gap(chain, g_star)?;
    let (g_star, delta_min) = if refined <= y1 { (g_star, refined) } else { (g_grid[imin], y1) };
    Ok(GapScan { g_grid, gap, g_star, delta_min })
}

/// 1 + |slope| of log(gap) against log(L).
pub fn effective_beta(delta_min_by_l: &[(usize, f64)]) -> Result<f64> {
    if delta_min_by_l.len() < 3 {
        return Err(Error::Invalid(format!(
            "effective exponent needs at least 3 sizes, got {}",
            delta_min_by_l.len()
        )));
    }
    let pts: Vec<(f64, f64)> = delta_min_by_l.iter().map(|&(l, d)| (l as f64, d)).collect();
    let fit = fit_scaling(&pts)?;
    Ok(1.0 + fit.exponent.abs())
}
