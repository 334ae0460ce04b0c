//! Single-mode propagation.
//!
//! The state is tracked in the instantaneous eigenbasis of
//! H = a(g) tau_z + b tau_x with the dynamical phase Phi = int eps dt
//! removed. The amplitudes then obey
//!   c+' = (theta'/2) e^{2 i Phi} c-,   c-' = -(theta'/2) e^{-2 i Phi} c+
//! with theta the mixing angle. Each step integrates this generator in the
//! phase variable: theta is modelled as a quadratic in Phi, the first two
//! Magnus terms are done in closed form and the 2x2 exponential is exact.
//! The step sequence is refined by bisection until p stops changing.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::ModeProblem;
use crate::schedules::Schedule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperOptions {
    /// Absolute tolerance on p between successive refinements.
    pub tol: f64,
    /// Largest mixing-angle change per step on the initial grid.
    pub max_dtheta: f64,
    /// Bound on |eps0 - 2 eps_mid + eps1| * h per step on the initial grid.
    pub max_phase_curvature: f64,
    /// Initial grid has at least this many steps per unit of duration.
    pub min_steps: usize,
    pub max_refinements: u32,
}

impl Default for StepperOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_dtheta: 0.02, max_phase_curvature: 0.05, min_steps: 128, max_refinements: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEvolution {
    /// Excitation probability at the end of the ramp.
    pub p: f64,
    /// | |c+|^2 + |c-|^2 - 1 | of the returned state.
    pub norm_drift: f64,
    /// Steps taken on the finest grid.
    pub steps: u64,
    pub refinements: u32,
    /// |p_fine - p_coarse| at termination.
    pub error_estimate: f64,
}

/// Sample of the mode at one time.
#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    theta: f64,
    eps: f64,
}

fn node(mode: &ModeProblem, t: f64, g: f64) -> Node {
    Node { t, theta: mode.angle(g), eps: mode.energy(g) }
}

/// A smooth piece of the schedule, sampled by the step grid.
struct Segment {
    /// Evaluation at the left end (limit from the right).
    start: Node,
    /// Evaluation at the right end (limit from the left).
    end: Node,
    interior: Vec<f64>,
}

pub fn evolve_mode(mode: &ModeProblem, schedule: &Schedule, tol: f64) -> Result<ModeEvolution> {
    evolve_mode_with(mode, schedule, &StepperOptions { tol, ..StepperOptions::default() })
}

pub fn evolve_mode_with(mode: &ModeProblem, schedule: &Schedule, opts: &StepperOptions) -> Result<ModeEvolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::Invalid(format!("stepper tolerance must be positive, got {}", opts.tol)));
    }
    if mode.b == 0.0 {
        // uncoupled levels: the state stays put, so it is excited iff a changes sign
        let a0 = mode.a(schedule.boundary.0);
        let a1 = mode.a(schedule.boundary.1);
        let p = if a0 * a1 < 0.0 { 1.0 } else { 0.0 };
        return Ok(ModeEvolution { p, norm_drift: 0.0, steps: 0, refinements: 0, error_estimate: 0.0 });
    }
    let mut segments = initial_grid(mode, schedule, opts);
    let mut prev = propagate(mode, schedule, &segments)?;
    for level in 1..=opts.max_refinements {
        refine(mode, schedule, &mut segments);
        let cur = propagate(mode, schedule, &segments)?;
        let diff = (cur.0 - prev.0).abs();
        if diff <= opts.tol {
            let steps = segments.iter().map(|s| s.interior.len() as u64 + 1).sum();
            return Ok(ModeEvolution { p: cur.0, norm_drift: cur.1, steps, refinements: level, error_estimate: diff });
        }
        prev = cur;
    }
    Err(Error::Convergence(format!(
        "mode k={} did not converge to {:e} after {} refinements",
        mode.k, opts.tol, opts.max_refinements
    )))
}

fn split_points(schedule: &Schedule) -> Vec<f64> {
    let half = schedule.duration / 2.0;
    let mut pts = vec![-half];
    pts.extend(schedule.breakpoints().into_iter().filter(|&b| b > -half && b < half));
    pts.push(half);
    pts
}

fn initial_grid(mode: &ModeProblem, schedule: &Schedule, opts: &StepperOptions) -> Vec<Segment> {
    let pts = split_points(schedule);
    let h_max = schedule.duration / opts.min_steps as f64;
    let mut out = Vec::with_capacity(pts.len() - 1);
    for w in pts.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let start = node(mode, ta, schedule.eval(ta).0);
        let end = node(mode, tb, schedule.eval_left(tb).0);
        let mut interior = Vec::new();
        let mut t = ta;
        let mut cur = start;
        let mut h = h_max.min(tb - ta);
        let h_min = 1e-13 * schedule.duration.max(1.0);
        loop {
            let t1 = (t + h).min(tb);
            let last = t1 >= tb;
            let n1 = if last { end } else { node(mode, t1, schedule.eval(t1).0) };
            let tm = 0.5 * (t + t1);
            let nm = node(mode, tm, schedule.eval(tm).0);
            let hh = t1 - t;
            let ok = (n1.theta - cur.theta).abs() <= opts.max_dtheta
                && (cur.theta - 2.0 * nm.theta + n1.theta).abs() <= 0.25 * opts.max_dtheta
                && (cur.eps - 2.0 * nm.eps + n1.eps).abs() * hh <= opts.max_phase_curvature;
            if ok || hh <= h_min {
                if last {
                    break;
                }
                interior.push(t1);
                t = t1;
                cur = n1;
                h = (1.5 * hh).min(h_max);
            } else {
                h = 0.5 * hh;
            }
        }
        out.push(Segment { start, end, interior });
    }
    out
}

fn refine(_mode: &ModeProblem, _schedule: &Schedule, segments: &mut [Segment]) {
    for seg in segments.iter_mut() {
        let mut pts = Vec::with_capacity(2 * seg.interior.len() + 1);
        let mut prev = seg.start.t;
        for &t in seg.interior.iter().chain(std::iter::once(&seg.end.t)) {
            pts.push(0.5 * (prev + t));
            if t != seg.end.t {
                pts.push(t);
            }
            prev = t;
        }
        seg.interior = pts;
    }
}

/// Runs the state over the grid; returns (p, norm drift).
fn propagate(mode: &ModeProblem, schedule: &Schedule, segments: &[Segment]) -> Result<(f64, f64)> {
    let mut cp = Complex64::new(0.0, 0.0);
    let mut cm = Complex64::new(1.0, 0.0);
    let mut phase = 0.0f64;
    let mut prev_end: Option<Node> = None;
    for seg in segments {
        if let Some(pe) = prev_end {
            // jump of the control between segments: sudden rotation
            let (a, b) = step_generator(pe.theta, pe.theta, seg.start.theta, 0.0, 0.0, phase);
            apply(&mut cp, &mut cm, a, b);
        }
        let mut cur = seg.start;
        let n = seg.interior.len();
        for i in 0..=n {
            let next = if i == n { seg.end } else { node(mode, seg.interior[i], schedule.eval(seg.interior[i]).0) };
            let h = next.t - cur.t;
            let tm = 0.5 * (cur.t + next.t);
            let mid = node(mode, tm, schedule.eval(tm).0);
            let d_mid = h / 24.0 * (5.0 * cur.eps + 8.0 * mid.eps - next.eps);
            let d = h / 6.0 * (cur.eps + 4.0 * mid.eps + next.eps);
            let (a, b) = step_generator(cur.theta, mid.theta, next.theta, d_mid, d, phase);
            apply(&mut cp, &mut cm, a, b);
            phase = (phase + d) % PI;
            cur = next;
        }
        if !(cp.re.is_finite() && cp.im.is_finite() && cm.re.is_finite() && cm.im.is_finite()) {
            return Err(Error::Integration {
                t: cur.t,
                last_state: vec![cp.re, cp.im, cm.re, cm.im],
                reason: format!("non-finite amplitude for mode k={}", mode.k),
            });
        }
        prev_end = Some(seg.end);
    }
    let norm = cp.norm_sqr() + cm.norm_sqr();
    Ok((cp.norm_sqr(), (norm - 1.0).abs()))
}

/// Generator [[-i z, w], [-conj w, i z]] of one step, returned as (w, z).
/// `d_mid` and `d` are the phase increments to the midpoint and the end.
fn step_generator(th0: f64, thm: f64, th1: f64, d_mid: f64, d: f64, phase: f64) -> (Complex64, f64) {
    let dth = th1 - th0;
    if d < 1e-9 {
        // phase does not advance: pure rotation
        return (Complex64::from_polar(0.5 * dth, 2.0 * phase), 0.0);
    }
    // theta(u) = th0 + beta1 u + beta2 u^2 through (0, th0), (d_mid, thm), (d, th1)
    let beta2 = if d_mid > 0.0 && d_mid < d {
        ((thm - th0) / d_mid - dth / d) / (d_mid - d)
    } else {
        0.0
    };
    let (sinc, cubic) = if d < 1e-3 {
        let d2 = d * d;
        (1.0 - d2 / 6.0 + d2 * d2 / 120.0, d * d2 * (1.0 / 3.0 - d2 / 30.0 + d2 * d2 / 840.0))
    } else {
        let (s, c) = d.sin_cos();
        (s / d, s - d * c)
    };
    let w = Complex64::from_polar(0.5, 2.0 * phase + d) * Complex64::new(dth * sinc, beta2 * cubic);
    // second Magnus term with theta' ~ dth/d
    let two_d = 2.0 * d;
    let tail = if two_d < 1e-3 { two_d.powi(3) / 6.0 - two_d.powi(5) / 120.0 } else { two_d - two_d.sin() };
    let z = dth * dth / (d * d) * tail / 16.0;
    (w, z)
}

fn apply(cp: &mut Complex64, cm: &mut Complex64, w: Complex64, z: f64) {
    let r = (z * z + w.norm_sqr()).sqrt();
    let (s, c) = r.sin_cos();
    let f = if r < 1e-8 { 1.0 - r * r / 6.0 } else { s / r };
    let i = Complex64::i();
    // exp(Omega) = cos r + (sin r / r) Omega
    let p = *cp;
    let m = *cm;
    *cp = p * c + (p * (-i * z) + m * w) * f;
    *cm = m * c + (-(p * w.conj()) + m * (i * z)) * f;
}

/// Reference propagator in the fixed basis: midpoint exponential
/// exp(-i H(g(t_mid)) dt) on `steps` equal steps. Intended for checks at
/// moderate durations.
pub fn evolve_mode_midpoint(mode: &ModeProblem, schedule: &Schedule, steps: usize) -> ModeEvolution {
    let half = schedule.duration / 2.0;
    let th0 = mode.angle(schedule.g(-half));
    // lower eigenvector (-sin th/2, cos th/2)
    let mut psi = [Complex64::new(-(th0 / 2.0).sin(), 0.0), Complex64::new((th0 / 2.0).cos(), 0.0)];
    let h = schedule.duration / steps as f64;
    for i in 0..steps {
        let tm = -half + (i as f64 + 0.5) * h;
        let g = schedule.g(tm);
        let (a, b) = (mode.a(g), mode.b);
        let e = a.hypot(b);
        let (s, c) = (e * h).sin_cos();
        let f = if e > 0.0 { s / e } else { h };
        // exp(-i H h) = cos(e h) - i sin(e h) H / e
        let i_ = Complex64::i();
        let p0 = psi[0];
        let p1 = psi[1];
        psi[0] = p0 * c - i_ * f * (p0 * a + p1 * b);
        psi[1] = p1 * c - i_ * f * (p0 * b - p1 * a);
    }
    let th1 = mode.angle(schedule.g(half));
    let up = [(th1 / 2.0).cos(), (th1 / 2.0).sin()];
    let amp = psi[0] * up[0] + psi[1] * up[1];
    let norm = psi[0].norm_sqr() + psi[1].norm_sqr();
    ModeEvolution { p: amp.norm_sqr(), norm_drift: (norm - 1.0).abs(), steps: steps as u64, refinements: 0, error_estimate: f64::NAN }
}
