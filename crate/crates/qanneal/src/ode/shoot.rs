use super::rk::{integrate_ivp, IvpOptions, IvpSolution};
use crate::error::{Error, Result};

/// Terminal-value problem for an autonomous equation g'' = F(g, g') whose
/// solutions decrease monotonically from `g0` to `g_target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingProblem {
    pub g0: f64,
    pub g_target: f64,
    /// Time at which g must reach `g_target`.
    pub t_target: f64,
    /// Initial velocity is -s * slope_scale.
    pub slope_scale: f64,
    pub slope_range: (f64, f64),
    pub grid_per_decade: usize,
    /// Relative tolerance on the terminal time.
    pub tol: f64,
    pub ivp: IvpOptions,
}

impl ShootingProblem {
    pub fn new(g0: f64, g_target: f64, t_target: f64, slope_scale: f64) -> Self {
        Self {
            g0,
            g_target,
            t_target,
            slope_scale,
            slope_range: (1e-6, 1e6),
            grid_per_decade: 4,
            tol: 1e-10,
            ivp: IvpOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    pub slope: f64,
    pub half_duration: f64,
    /// Nodes in time on [0, t_target]; state (g, g'), derivative (g', g'').
    pub trajectory: IvpSolution,
    pub converged: bool,
    pub residual: f64,
    /// Relative mismatch of the terminal time before the final rescaling.
    pub duration_error: f64,
    pub evaluations: usize,
    /// Raw solution in the field variable: nodes are g, state (t, g'), with
    /// continuous extension. Times here are before rescaling.
    pub field_solution: IvpSolution,
    /// Factor mapping field-solution times onto the target duration.
    pub time_scale: f64,
}

/// Integrates in the field variable: with v = g', dt/dg = 1/v and
/// dv/dg = F(g, v)/v, from g0 down to g_target.
fn flow<F>(rhs: &F, p: &ShootingProblem, s: f64) -> Result<IvpSolution>
where
    F: Fn(f64, f64) -> f64,
{
    let v0 = -s * p.slope_scale;
    integrate_ivp(
        |g, y: &[f64], dy: &mut [f64]| {
            let v = y[1];
            dy[0] = 1.0 / v;
            dy[1] = rhs(g, v) / v;
        },
        &[0.0, v0],
        (p.g0, p.g_target),
        &p.ivp,
    )
    .and_then(|sol| {
        let last = sol.last();
        if last[1] >= 0.0 || !last[0].is_finite() {
            return Err(Error::Integration {
                t: p.g_target,
                last_state: last.to_vec(),
                reason: "velocity changed sign".into(),
            });
        }
        Ok(sol)
    })
}

/// Bisection on the initial slope (log scale) so that g reaches `g_target`
/// at `t_target`.
pub fn shoot_terminal<F>(rhs: F, p: &ShootingProblem) -> Result<ShootingResult>
where
    F: Fn(f64, f64) -> f64,
{
    if !(p.g0 > p.g_target) || !(p.t_target > 0.0) || !(p.slope_scale > 0.0) {
        return Err(Error::Invalid(format!(
            "shooting needs g0 > g_target and positive duration, got g0={}, g_target={}, T={}",
            p.g0, p.g_target, p.t_target
        )));
    }
    let (mut lo, hi) = p.slope_range;
    let mut evaluations = 0usize;
    // long durations need slopes below the nominal range
    for _ in 0..60 {
        evaluations += 1;
        match flow(&rhs, p, lo) {
            Ok(sol) if sol.last()[0] <= p.t_target => lo /= 10.0,
            _ => break,
        }
    }
    let decades = (hi / lo).log10();
    let n_grid = (decades * p.grid_per_decade as f64).ceil() as usize;
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    let mut attained = (f64::INFINITY, 0.0f64);
    for i in 0..=n_grid {
        let s = lo * 10f64.powf(decades * i as f64 / n_grid as f64);
        evaluations += 1;
        let tau = match flow(&rhs, p, s) {
            Ok(sol) => sol.last()[0],
            // larger slopes overshoot into the singular region
            Err(_) => break,
        };
        attained = (attained.0.min(tau), attained.1.max(tau));
        if let Some((_, tau_prev)) = prev {
            if tau >= tau_prev {
                return Err(Error::Shooting(format!(
                    "terminal time not decreasing in the slope near s={s:e} ({tau_prev} -> {tau})"
                )));
            }
        }
        if tau <= p.t_target {
            match prev {
                Some((s_prev, _)) => bracket = Some((s_prev, s)),
                None if tau == p.t_target => bracket = Some((s, s)),
                None => {}
            }
            break;
        }
        prev = Some((s, tau));
    }
    let (mut s_lo, mut s_hi) = bracket.ok_or_else(|| {
        Error::Shooting(format!(
            "target duration {} outside attainable range [{}, {}] for slopes in [{lo:e}, {hi:e}]",
            p.t_target, attained.0, attained.1
        ))
    })?;

    let mut best = None;
    for _ in 0..200 {
        let s = (s_lo * s_hi).sqrt();
        evaluations += 1;
        let sol = flow(&rhs, p, s)?;
        let tau = sol.last()[0];
        let err = (tau - p.t_target) / p.t_target;
        let done = err.abs() <= p.tol || s_hi / s_lo - 1.0 < 4.0 * f64::EPSILON;
        if tau > p.t_target {
            s_lo = s;
        } else {
            s_hi = s;
        }
        if done {
            best = Some((s, sol, err));
            break;
        }
    }
    let (slope, sol, duration_error) =
        best.ok_or_else(|| Error::Shooting("bisection did not terminate".into()))?;
    // the terminal time is only as accurate as the integration itself
    let floor = p.tol.max(1e4 * p.ivp.rel_tol);
    if duration_error.abs() > floor {
        return Err(Error::Shooting(format!(
            "terminal time mismatch {duration_error:e} above tolerance {floor:e}"
        )));
    }

    // map field-parametrized nodes to time-parametrized ones, stretching time
    // by the (tiny) factor that makes the terminal time exact
    let tau = sol.last()[0];
    let lambda = p.t_target / tau;
    let n = sol.t_nodes.len();
    let mut trajectory = IvpSolution {
        t_nodes: Vec::with_capacity(n),
        y_nodes: Vec::with_capacity(n),
        dy_nodes: Vec::with_capacity(n),
        dense: Vec::new(),
        accepted: sol.accepted,
        rejected: sol.rejected,
        max_error: sol.max_error,
    };
    for i in 0..n {
        let g = sol.t_nodes[i];
        let t = sol.y_nodes[i][0] * lambda;
        let v = sol.y_nodes[i][1] / lambda;
        trajectory.t_nodes.push(if i + 1 == n { p.t_target } else { t });
        trajectory.y_nodes.push(vec![g, v]);
        trajectory.dy_nodes.push(vec![v, rhs(g, v)]);
    }
    let residual = (trajectory.last()[0] - p.g_target).abs();
    Ok(ShootingResult {
        slope,
        half_duration: p.t_target,
        trajectory,
        converged: true,
        residual,
        duration_error,
        evaluations,
        field_solution: sol,
        time_scale: lambda,
    })
}
