//! ODE-based schedules: eQAB and the NAQO family, solved by shooting on the
//! initial velocity.

use serde::Serialize;
use std::f64::consts::PI;

use super::{Curve, Family, Schedule, ScheduleParams, SplitAffine};
use crate::error::{Error, Result};
use crate::models::{classify_regime, hopping_coefficient, hopping_power, pairing_coefficient, pairing_power, Regime};
use crate::ode::{shoot_terminal, IvpOptions, MonotoneCubic, ShootingProblem, ShootingResult};

/// Constants of g'' = A g'^3 / x^(c+1) - c g'^2 / x with x = 2 - g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaqoOdeCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub big_a: f64,
    /// None for the alpha -> infinity ansatz.
    pub regime: Option<Regime>,
    /// x(0) = coef * k0^power
    pub init_coef: f64,
    pub init_power: f64,
}

impl NaqoOdeCoefficients {
    pub fn accel(&self, g: f64, v: f64) -> f64 {
        let x = 2.0 - g;
        self.big_a * v * v * v / x.powf(self.c + 1.0) - self.c * v * v / x
    }
}

/// Builds (a, b, c) from the pairing law 2 - g_c(k) = C k^p and the hopping
/// law d(k) = D k^q: then c = 2q/p, a = (p-1)/p, b = 2 pi D^2 C^(-c).
fn coefficients_from_laws(p: f64, cc: f64, q: f64, d: f64, regime: Option<Regime>) -> Result<NaqoOdeCoefficients> {
    let c = 2.0 * q / p;
    let a = (p - 1.0) / p;
    let b = 2.0 * PI * d * d * cc.powf(-c);
    let big_a = (c - a) / b;
    if !(big_a.is_finite() && b > 0.0) {
        return Err(Error::Domain { func: "naqo_lrk_coefficients", arg: b, why: "degenerate prefactor" });
    }
    Ok(NaqoOdeCoefficients { a, b, c, big_a, regime, init_coef: cc, init_power: p })
}

pub fn naqo_lrk_coefficients(alpha: f64, beta: f64) -> Result<NaqoOdeCoefficients> {
    let regime = classify_regime(alpha, beta)?;
    coefficients_from_laws(
        pairing_power(alpha)?,
        pairing_coefficient(alpha)?,
        hopping_power(beta)?,
        hopping_coefficient(beta)?,
        Some(regime),
    )
}

/// alpha -> infinity coefficients with hopping exponent `beta_eff` in (1, 2).
pub fn naqo_ansatz_coefficients(beta_eff: f64) -> Result<NaqoOdeCoefficients> {
    if !(beta_eff > 1.0 && beta_eff < 2.0) {
        return Err(Error::Domain { func: "naqo_ansatz_coefficients", arg: beta_eff, why: "needs 1 < beta_eff < 2" });
    }
    coefficients_from_laws(2.0, 1.0, hopping_power(beta_eff)?, hopping_coefficient(beta_eff)?, None)
}

fn check_duration(duration: f64) -> Result<()> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Invalid(format!("duration must be positive, got {duration}")));
    }
    Ok(())
}

/// Dense monotone interpolant of a shooting trajectory. The g-parametrized
/// solution has a continuous extension; `sub` extra points per step are
/// taken from it.
fn trajectory_curve(res: &ShootingResult, shift: f64, sub: usize) -> Result<MonotoneCubic> {
    let field = &res.field_solution;
    let lam = res.time_scale;
    let mut t = Vec::new();
    let mut g = Vec::new();
    let mut d = Vec::new();
    let gs = &field.t_nodes;
    let mut push = |gv: f64, y: &[f64]| {
        // state (t, v) in g; stretched time lam*t has velocity v/lam
        t.push(y[0] * lam + shift);
        g.push(gv);
        d.push(y[1] / lam);
    };
    for i in 0..gs.len() {
        push(gs[i], &field.y_nodes[i]);
        if i + 1 < gs.len() {
            for j in 1..=sub {
                let gv = gs[i] + (gs[i + 1] - gs[i]) * j as f64 / (sub + 1) as f64;
                push(gv, &field.eval(gv));
            }
        }
    }
    // pin the end exactly
    let n = t.len();
    let t_end = res.half_duration + shift;
    t[n - 1] = t_end;
    let (t, g, d) = reverse_if_needed(t, g, d);
    MonotoneCubic::with_slopes(t, g, d)
}

fn reverse_if_needed(t: Vec<f64>, g: Vec<f64>, d: Vec<f64>) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    if t.len() > 1 && t[0] > t[t.len() - 1] {
        (t.into_iter().rev().collect(), g.into_iter().rev().collect(), d.into_iter().rev().collect())
    } else {
        (t, g, d)
    }
}

const SUBSAMPLE: usize = 3;

fn ivp_for(tol: f64) -> IvpOptions {
    let rel_tol = (tol / 10.0).clamp(1e-13, 1e-9);
    IvpOptions { rel_tol, abs_tol: rel_tol * 1e-3, ..IvpOptions::default() }
}

/// eQAB: g'' = 5 g'^2 g (g^2-1) / ((g^2-1)^2 + 8 k0), from 2 to 0 over T.
pub fn eqab_schedule(l: usize, duration: f64, tol: f64) -> Result<Schedule> {
    check_duration(duration)?;
    let k0 = PI / l as f64;
    let rhs = move |g: f64, v: f64| {
        let u = g * g - 1.0;
        5.0 * v * v * g * u / (u * u + 8.0 * k0)
    };
    let mut prob = ShootingProblem::new(2.0, 0.0, duration, 1.0);
    prob.tol = tol;
    prob.ivp = ivp_for(tol);
    let res = shoot_terminal(rhs, &prob)?;
    let curve = trajectory_curve(&res, -duration / 2.0, SUBSAMPLE)?;
    Ok(Schedule {
        family: Family::Eqab,
        duration,
        params: ScheduleParams::Eqab { slope: res.slope, k0 },
        boundary: (2.0, 0.0),
        curve: Curve::Sampled(curve),
    })
}

/// TFIM NAQO: 4 pi (1-g^2) g g'^2 + 2 pi (1-g^2)^2 g'' - g g'^3 = 0 from
/// g(0) = cos k0, g(T/2) = 0, mirrored about g = 1.
pub fn naqo_tfim_schedule(l: usize, duration: f64, tol: f64) -> Result<Schedule> {
    check_duration(duration)?;
    if l < 4 {
        return Err(Error::Invalid(format!("L must be at least 4, got {l}")));
    }
    let k0 = PI / l as f64;
    let g0 = k0.cos();
    let rhs = |g: f64, v: f64| {
        let u = 1.0 - g * g;
        g * v * v * v / (2.0 * PI * u * u) - 2.0 * g * v * v / u
    };
    let mut prob = ShootingProblem::new(g0, 0.0, duration / 2.0, 1.0 / (l as f64 * l as f64));
    prob.tol = tol;
    prob.ivp = ivp_for(tol);
    let res = shoot_terminal(rhs, &prob)?;
    let half = trajectory_curve(&res, 0.0, SUBSAMPLE)?;
    Ok(Schedule {
        family: Family::Naqo,
        duration,
        params: ScheduleParams::Naqo { slope: res.slope, g0, a: 0.5, c: 1.0 },
        boundary: (2.0, 0.0),
        curve: Curve::Mirrored { half, center: 1.0 },
    })
}

fn solve_lrk_half(coef: &NaqoOdeCoefficients, l: usize, duration: f64, tol: f64) -> Result<(MonotoneCubic, f64, f64)> {
    check_duration(duration)?;
    if l < 4 {
        return Err(Error::Invalid(format!("L must be at least 4, got {l}")));
    }
    let k0 = PI / l as f64;
    let x0 = coef.init_coef * k0.powf(coef.init_power);
    if !(x0 > 0.0 && x0 < 2.0) {
        return Err(Error::Domain { func: "naqo_lrk_schedule", arg: x0, why: "initial offset 2 - g(0) outside (0, 2)" });
    }
    let g0 = 2.0 - x0;
    let c = *coef;
    let rhs = move |g: f64, v: f64| c.accel(g, v);
    // |g'(0)| = x0^c / (K - A ln x0) and K > A ln 2 when A > 0
    let scale = x0.powf(coef.c) / (1.0 + (coef.big_a * x0.ln()).abs());
    let mut prob = ShootingProblem::new(g0, 0.0, duration / 2.0, scale);
    prob.tol = tol;
    prob.ivp = ivp_for(tol);
    let res = shoot_terminal(rhs, &prob)?;
    Ok((trajectory_curve(&res, 0.0, SUBSAMPLE)?, res.slope, g0))
}

/// Long-range Kitaev NAQO from the regime ODE, mirrored about g = 2.
pub fn naqo_lrk_schedule(
    alpha: f64,
    beta: f64,
    l: usize,
    duration: f64,
    tol: f64,
    prefactor_scale: f64,
) -> Result<Schedule> {
    let mut coef = naqo_lrk_coefficients(alpha, beta)?;
    coef.big_a *= prefactor_scale;
    let (half, slope, g0) = solve_lrk_half(&coef, l, duration, tol)?;
    Ok(Schedule {
        family: Family::NaqoLrk,
        duration,
        params: ScheduleParams::Naqo { slope, g0, a: coef.big_a, c: coef.c },
        boundary: (4.0, 0.0),
        curve: Curve::Mirrored { half, center: 2.0 },
    })
}

/// Disordered-chain ansatz: alpha -> infinity NAQO with beta_eff, mirrored
/// about 2 and then mapped so that 2 lands on `g_star`, 0 on 0 and 4 on
/// `g_start`.
pub fn naqo_ansatz_schedule(
    beta_eff: f64,
    g_star: f64,
    l: usize,
    duration: f64,
    g_start: f64,
    tol: f64,
    prefactor_scale: f64,
) -> Result<Schedule> {
    if !(g_star > 0.0 && g_star < g_start) {
        return Err(Error::Domain { func: "naqo_ansatz_schedule", arg: g_star, why: "needs 0 < g_star < g_start" });
    }
    let mut coef = naqo_ansatz_coefficients(beta_eff)?;
    coef.big_a *= prefactor_scale;
    let (half, slope, g0) = solve_lrk_half(&coef, l, duration, tol)?;
    let map = SplitAffine { pivot_in: 2.0, pivot_out: g_star, below: g_star / 2.0, above: (g_start - g_star) / 2.0 };
    Ok(Schedule {
        family: Family::NaqoAnsatz,
        duration,
        params: ScheduleParams::NaqoAnsatz { slope, g0, a: coef.big_a, c: coef.c, g_star },
        boundary: (g_start, 0.0),
        curve: Curve::Mapped { inner: Box::new(Curve::Mirrored { half, center: 2.0 }), map },
    })
}
