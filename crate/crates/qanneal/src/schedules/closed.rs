//! Closed-form schedules.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{Curve, Family, Schedule, ScheduleParams};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::specfun::chebyshev_t;

pub fn linear_schedule(model: &ModelSpec, duration: f64) -> Schedule {
    Schedule {
        family: Family::Linear,
        duration,
        params: ScheduleParams::Linear,
        boundary: (model.g_start, model.g_end),
        curve: Curve::Linear { g_start: model.g_start, g_end: model.g_end },
    }
}

/// Which reading of the ONLP exponent to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnlpFormula {
    /// r = ln[TC / ln(TC)] / (z nu); positive for TC > e.
    #[default]
    Corrected,
    /// r = ln[ln(TC) / (TC)] / (z nu); negative, kept for inspection only.
    Verbatim,
}

impl std::str::FromStr for OnlpFormula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "corrected" => Ok(OnlpFormula::Corrected),
            "verbatim" => Ok(OnlpFormula::Verbatim),
            other => Err(Error::Invalid(format!("unknown ONLP formula '{other}'"))),
        }
    }
}

/// ONLP exponent r. Fails when TC <= e or when r comes out non-positive.
pub fn onlp_exponent(duration: f64, c: f64, z_nu: f64, formula: OnlpFormula) -> Result<f64> {
    let tc = duration * c;
    if !(tc > std::f64::consts::E) {
        return Err(Error::Domain { func: "onlp_exponent", arg: tc, why: "needs T*C > e" });
    }
    if !(z_nu > 0.0) {
        return Err(Error::Domain { func: "onlp_exponent", arg: z_nu, why: "z*nu must be positive" });
    }
    let ln_tc = tc.ln();
    let r = match formula {
        OnlpFormula::Corrected => (ln_tc - ln_tc.ln()) / z_nu,
        OnlpFormula::Verbatim => (ln_tc.ln() - ln_tc) / z_nu,
    };
    if !(r > 0.0) {
        return Err(Error::Domain {
            func: "onlp_exponent",
            arg: r,
            why: "non-positive exponent gives a divergent schedule",
        });
    }
    Ok(r)
}

pub fn onlp_schedule(model: &ModelSpec, duration: f64, z_nu: f64, c: f64, formula: OnlpFormula) -> Result<Schedule> {
    let r = onlp_exponent(duration, c, z_nu, formula)?;
    let g_c = model.g_critical();
    if !(model.g_start > g_c && model.g_end < g_c) {
        return Err(Error::Invalid("ONLP needs g_start > g_c > g_end".into()));
    }
    Ok(Schedule {
        family: Family::Onlp,
        duration,
        params: ScheduleParams::Onlp { r, g_c },
        boundary: (model.g_start, model.g_end),
        curve: Curve::Onlp { g_c, r, g_start: model.g_start, g_end: model.g_end },
    })
}

pub(crate) fn onlp_eval(g_c: f64, r: f64, g_start: f64, g_end: f64, duration: f64, t: f64) -> (f64, f64) {
    let x = 2.0 * t / duration;
    let ax = x.abs();
    let pow = ax.powf(r);
    // d|x|^r/dt = r |x|^(r-1) * 2/T; finite at x = 0 only for r >= 1
    let dpow = if ax == 0.0 {
        if r > 1.0 {
            0.0
        } else if r == 1.0 {
            2.0 / duration
        } else {
            f64::INFINITY
        }
    } else {
        r * pow / ax * 2.0 / duration
    };
    if x >= 0.0 {
        (g_c - (g_c - g_end) * pow, -(g_c - g_end) * dpow)
    } else {
        (g_c + (g_start - g_c) * pow, -(g_start - g_c) * dpow)
    }
}

fn k0_parts(l: usize) -> Result<(f64, f64, f64, f64)> {
    if l < 4 {
        return Err(Error::Invalid(format!("L must be at least 4, got {l}")));
    }
    let k0 = PI / l as f64;
    let sigma = (k0 / 2.0).sin().powi(2);
    Ok((k0, k0.cos(), k0.sin(), sigma))
}

/// LAD: g = cos k0 - y sin k0 / sqrt(1 - y^2), y = eps'(t - t0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LadCurve {
    pub cos_k0: f64,
    pub sin_k0: f64,
    pub eps_prime: f64,
    pub t0: f64,
    pub half: f64,
    /// 1 - y at t = T/2 and 1 + y at t = -T/2, computed without cancellation.
    pub one_minus_end: f64,
    pub one_plus_start: f64,
}

impl LadCurve {
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let from_end = self.half - t;
        let from_start = t + self.half;
        let one_minus = self.one_minus_end + self.eps_prime * from_end;
        let one_plus = self.one_plus_start + self.eps_prime * from_start;
        let y = if t >= self.t0 { 1.0 - one_minus } else { one_plus - 1.0 };
        let q = one_minus * one_plus;
        let g = self.cos_k0 - y * self.sin_k0 / q.sqrt();
        let gdot = -self.eps_prime * self.sin_k0 / (q * q.sqrt());
        (g, gdot)
    }
}

pub fn lad_schedule(l: usize, duration: f64) -> Result<Schedule> {
    let (k0, c, s, sigma) = k0_parts(l)?;
    let root = (1.0 + 8.0 * sigma).sqrt();
    // value of -F(0) and F(2) with F(g) = (g - cos k0)/sqrt(1 + g^2 - 2 g cos k0)
    let a = c;
    let b = (1.0 + 2.0 * sigma) / root;
    let one_minus_b = 16.0 * sigma * (1.0 - sigma) / ((3.0 + root) * (1.0 + root) * root);
    let one_minus_a = 2.0 * sigma;
    let eps_prime = (a + b) / duration;
    let t0 = duration * (b - a) / (2.0 * (a + b));
    let curve = LadCurve {
        cos_k0: c,
        sin_k0: s,
        eps_prime,
        t0,
        half: duration / 2.0,
        one_minus_end: one_minus_a,
        one_plus_start: one_minus_b,
    };
    Ok(Schedule {
        family: Family::Lad,
        duration,
        params: ScheduleParams::Lad { eps_prime, t0, k0 },
        boundary: (2.0, 0.0),
        curve: Curve::Lad(curve),
    })
}

/// QAB: g = cos k0 - sin k0 tan(eps (t - t0)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct QabCurve {
    pub cos_k0: f64,
    pub sin_k0: f64,
    pub eps: f64,
    pub t0: f64,
    pub half: f64,
    pub phase_end: f64,
    pub phase_start: f64,
}

impl QabCurve {
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let phase = if t >= self.t0 {
            self.phase_end - self.eps * (self.half - t)
        } else {
            -self.phase_start + self.eps * (t + self.half)
        };
        let tan = phase.tan();
        let g = self.cos_k0 - self.sin_k0 * tan;
        let gdot = -self.sin_k0 * self.eps * (1.0 + tan * tan);
        (g, gdot)
    }
}

pub fn qab_schedule(l: usize, duration: f64) -> Result<Schedule> {
    let (k0, c, s, _) = k0_parts(l)?;
    let p = c.atan2(s);
    let q = (2.0 - c).atan2(s);
    let eps = (p + q) / duration;
    let t0 = duration / 2.0 - p / eps;
    let curve = QabCurve {
        cos_k0: c,
        sin_k0: s,
        eps,
        t0,
        half: duration / 2.0,
        phase_end: p,
        phase_start: q,
    };
    Ok(Schedule {
        family: Family::Qab,
        duration,
        params: ScheduleParams::Qab { eps, t0, k0 },
        boundary: (2.0, 0.0),
        curve: Curve::Qab(curve),
    })
}

/// CRAB control g0 (1/2 - t/T) [1 + sum g_m T_{2m}(2t/T) - sum g_m].
pub fn crab_g(coeffs: &[f64], g0: f64, duration: f64, t: f64) -> f64 {
    let x = (2.0 * t / duration).clamp(-1.0, 1.0);
    let mut bracket = 1.0;
    for (i, gm) in coeffs.iter().enumerate() {
        bracket += gm * (chebyshev_t(2 * (i + 1), x) - 1.0);
    }
    g0 * (0.5 - t / duration) * bracket
}

/// Time derivative of [`crab_g`].
pub fn crab_gdot(coeffs: &[f64], g0: f64, duration: f64, t: f64) -> f64 {
    let x = (2.0 * t / duration).clamp(-1.0, 1.0);
    let mut bracket = 1.0;
    let mut dbracket = 0.0;
    for (i, gm) in coeffs.iter().enumerate() {
        let n = 2 * (i + 1);
        bracket += gm * (chebyshev_t(n, x) - 1.0);
        dbracket += gm * n as f64 * chebyshev_u(n - 1, x);
    }
    g0 * (-bracket / duration + (0.5 - t / duration) * dbracket * 2.0 / duration)
}

fn chebyshev_u(m: usize, x: f64) -> f64 {
    let (mut u0, mut u1) = (1.0, 2.0 * x);
    if m == 0 {
        return u0;
    }
    for _ in 1..m {
        let u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

pub(crate) fn crab_schedule(coeffs: &[f64], g0: f64, duration: f64) -> Schedule {
    Schedule {
        family: Family::Crab,
        duration,
        params: ScheduleParams::Crab { g0, coeffs: coeffs.to_vec() },
        boundary: (g0, 0.0),
        curve: Curve::Crab { g0, coeffs: coeffs.to_vec() },
    }
}
