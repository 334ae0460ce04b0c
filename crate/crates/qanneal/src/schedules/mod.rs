//! Control schedules g(t) on [-T/2, T/2]: closed forms (linear, ONLP, LAD,
//! QAB, CRAB) and ODE-based ones (eQAB, NAQO variants) obtained by shooting.

mod closed;
mod naqo;

pub use closed::{crab_g, crab_gdot, lad_schedule, linear_schedule, onlp_exponent, onlp_schedule, qab_schedule, OnlpFormula};
pub use naqo::{
    eqab_schedule, naqo_ansatz_coefficients, naqo_ansatz_schedule, naqo_lrk_coefficients, naqo_lrk_schedule,
    naqo_tfim_schedule, NaqoOdeCoefficients,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};
use crate::ode::MonotoneCubic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Linear,
    Onlp,
    Lad,
    Qab,
    Eqab,
    Naqo,
    NaqoLrk,
    NaqoAnsatz,
    Crab,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Linear,
        Family::Onlp,
        Family::Lad,
        Family::Qab,
        Family::Eqab,
        Family::Naqo,
        Family::NaqoLrk,
        Family::NaqoAnsatz,
        Family::Crab,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Onlp => "onlp",
            Family::Lad => "lad",
            Family::Qab => "qab",
            Family::Eqab => "eqab",
            Family::Naqo => "naqo",
            Family::NaqoLrk => "naqo-lrk",
            Family::NaqoAnsatz => "naqo-ansatz",
            Family::Crab => "crab",
        }
    }

    pub fn is_monotone(&self) -> bool {
        !matches!(self, Family::Crab)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == norm)
            .ok_or_else(|| Error::Invalid(format!("unknown schedule family '{s}'")))
    }
}

/// Family-specific constants of a generated schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ScheduleParams {
    Linear,
    Onlp { r: f64, g_c: f64 },
    Lad { eps_prime: f64, t0: f64, k0: f64 },
    Qab { eps: f64, t0: f64, k0: f64 },
    Eqab { slope: f64, k0: f64 },
    Naqo { slope: f64, g0: f64, a: f64, c: f64 },
    NaqoAnsatz { slope: f64, g0: f64, a: f64, c: f64, g_star: f64 },
    Crab { g0: f64, coeffs: Vec<f64> },
}

/// Piecewise-affine map applied to a curve in "reference" units: values
/// below `pivot_in` scale onto [.., pivot_out], values above onto
/// [pivot_out, ..] with separate factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SplitAffine {
    pub pivot_in: f64,
    pub pivot_out: f64,
    pub below: f64,
    pub above: f64,
}

impl SplitAffine {
    fn map(&self, g: f64) -> (f64, f64) {
        if g <= self.pivot_in {
            (self.pivot_out + (g - self.pivot_in) * self.below, self.below)
        } else {
            (self.pivot_out + (g - self.pivot_in) * self.above, self.above)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Curve {
    Linear { g_start: f64, g_end: f64 },
    Onlp { g_c: f64, r: f64, g_start: f64, g_end: f64 },
    Lad(closed::LadCurve),
    Qab(closed::QabCurve),
    Crab { g0: f64, coeffs: Vec<f64> },
    Sampled(MonotoneCubic),
    /// t >= 0 from `half`; t < 0 mirrored as 2*center - half(-t).
    Mirrored { half: MonotoneCubic, center: f64 },
    Mapped { inner: Box<Curve>, map: SplitAffine },
}

impl Curve {
    fn eval(&self, t: f64, duration: f64) -> (f64, f64) {
        self.eval_side(t, duration, false)
    }

    /// `left` picks the limit from below at a jump.
    fn eval_side(&self, t: f64, duration: f64, left: bool) -> (f64, f64) {
        let half_t = duration / 2.0;
        let t = t.clamp(-half_t, half_t);
        match self {
            Curve::Linear { g_start, g_end } => {
                let rate = (g_end - g_start) / duration;
                (g_start + rate * (t + half_t), rate)
            }
            Curve::Onlp { g_c, r, g_start, g_end } => closed::onlp_eval(*g_c, *r, *g_start, *g_end, duration, t),
            Curve::Lad(c) => c.eval(t),
            Curve::Qab(c) => c.eval(t),
            Curve::Crab { g0, coeffs } => (crab_g(coeffs, *g0, duration, t), crab_gdot(coeffs, *g0, duration, t)),
            Curve::Sampled(f) => (f.value(t), f.derivative(t)),
            Curve::Mirrored { half, center } => {
                if t > 0.0 || (t == 0.0 && !left) {
                    (half.value(t), half.derivative(t))
                } else {
                    (2.0 * center - half.value(-t), half.derivative(-t))
                }
            }
            Curve::Mapped { inner, map } => {
                let (g, gd) = inner.eval_side(t, duration, left);
                let (m, slope) = map.map(g);
                (m, gd * slope)
            }
        }
    }
}

/// A control curve on [-T/2, T/2] with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub family: Family,
    pub duration: f64,
    pub params: ScheduleParams,
    pub boundary: (f64, f64),
    pub(crate) curve: Curve,
}

impl Schedule {
    /// g(t); t is clamped to [-T/2, T/2].
    pub fn g(&self, t: f64) -> f64 {
        self.curve.eval(t, self.duration).0
    }

    pub fn gdot(&self, t: f64) -> f64 {
        self.curve.eval(t, self.duration).1
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        self.curve.eval(t, self.duration)
    }

    /// Limit from below; differs from [`Schedule::eval`] only at a jump.
    pub fn eval_left(&self, t: f64) -> (f64, f64) {
        self.curve.eval_side(t, self.duration, true)
    }

    /// `n` equally spaced samples (t, g, gdot), first at -T/2, last at T/2.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let n = n.max(2);
        let half = self.duration / 2.0;
        (0..n)
            .map(|i| {
                let t = if i + 1 == n { half } else { -half + self.duration * i as f64 / (n - 1) as f64 };
                let (g, gd) = self.eval(t);
                (t, g, gd)
            })
            .collect()
    }

    /// Sampling nodes of ODE-based schedules (empty for closed forms).
    pub fn nodes(&self) -> Vec<f64> {
        fn collect(c: &Curve) -> Vec<f64> {
            match c {
                Curve::Sampled(f) => f.nodes().0.to_vec(),
                Curve::Mirrored { half, .. } => {
                    let t = half.nodes().0;
                    let mut out: Vec<f64> = t.iter().rev().filter(|&&x| x > 0.0).map(|x| -x).collect();
                    out.extend_from_slice(t);
                    out
                }
                Curve::Mapped { inner, .. } => collect(inner),
                _ => Vec::new(),
            }
        }
        collect(&self.curve)
    }

    /// Structural time points where the curve is not smooth (for steppers).
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.curve {
            Curve::Mirrored { .. } | Curve::Onlp { .. } => vec![0.0],
            Curve::Mapped { inner, .. } if matches!(**inner, Curve::Mirrored { .. }) => vec![0.0],
            _ => Vec::new(),
        }
    }
}

/// Knobs shared by the schedule builders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleOptions {
    /// Relative tolerance on the duration reached by shooting.
    pub tol: f64,
    pub onlp_formula: OnlpFormula,
    pub onlp_c: f64,
    pub z_nu: f64,
    pub naqo_prefactor_scale: f64,
    pub crab_coeffs: Vec<f64>,
    /// Effective hopping exponent for the disordered-chain ansatz.
    pub beta_eff: f64,
    /// Gap-minimum position for the disordered-chain ansatz.
    pub g_star: Option<f64>,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            onlp_formula: OnlpFormula::Corrected,
            onlp_c: 14.6,
            z_nu: 1.0,
            naqo_prefactor_scale: 1.0,
            crab_coeffs: Vec::new(),
            beta_eff: 1.65,
            g_star: None,
        }
    }
}

/// Builds a schedule of the requested family for a model.
pub fn build_schedule(model: &ModelSpec, family: Family, duration: f64, opts: &ScheduleOptions) -> Result<Schedule> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Invalid(format!("duration must be positive, got {duration}")));
    }
    let tfim_only = |name: &str| -> Result<()> {
        match model.kind {
            ModelKind::Tfim => Ok(()),
            _ => Err(Error::Unsupported(format!("{name} is TFIM-only"))),
        }
    };
    match family {
        Family::Linear => Ok(linear_schedule(model, duration)),
        Family::Onlp => onlp_schedule(model, duration, opts.z_nu, opts.onlp_c, opts.onlp_formula),
        Family::Lad => {
            tfim_only("LAD")?;
            check_tfim_boundaries(model, "LAD")?;
            lad_schedule(model.l, duration)
        }
        Family::Qab => {
            tfim_only("QAB")?;
            check_tfim_boundaries(model, "QAB")?;
            qab_schedule(model.l, duration)
        }
        Family::Eqab => {
            tfim_only("eQAB")?;
            check_tfim_boundaries(model, "eQAB")?;
            eqab_schedule(model.l, duration, opts.tol)
        }
        Family::Naqo | Family::NaqoLrk => match model.kind {
            ModelKind::Tfim => {
                check_tfim_boundaries(model, "NAQO")?;
                naqo_tfim_schedule(model.l, duration, opts.tol)
            }
            ModelKind::Lrk { alpha, beta } => {
                if model.g_start != 4.0 || model.g_end != 0.0 {
                    return Err(Error::Unsupported("NAQO for the Kitaev chain runs from 4 to 0".into()));
                }
                naqo_lrk_schedule(alpha, beta, model.l, duration, opts.tol, opts.naqo_prefactor_scale)
            }
            ModelKind::Disordered { .. } => Err(Error::Unsupported(
                "use the naqo-ansatz family for the disordered chain".into(),
            )),
        },
        Family::NaqoAnsatz => {
            let g_star = opts
                .g_star
                .ok_or_else(|| Error::Invalid("naqo-ansatz needs the gap-minimum position g_star".into()))?;
            naqo_ansatz_schedule(
                opts.beta_eff,
                g_star,
                model.l,
                duration,
                model.g_start,
                opts.tol,
                opts.naqo_prefactor_scale,
            )
        }
        Family::Crab => {
            if model.g_end != 0.0 {
                return Err(Error::Unsupported("CRAB parametrization ends at g = 0".into()));
            }
            Ok(closed::crab_schedule(&opts.crab_coeffs, model.g_start, duration))
        }
    }
}

fn check_tfim_boundaries(model: &ModelSpec, name: &str) -> Result<()> {
    if model.g_start != 2.0 || model.g_end != 0.0 {
        return Err(Error::Unsupported(format!("{name} is defined for the 2 -> 0 protocol")));
    }
    Ok(())
}
