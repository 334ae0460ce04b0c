//! Derivative-free minimisation and the CRAB driver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{defect_density_with, StepperOptions};
use crate::error::{Error, Result};
use crate::manybody::{evolve_manybody_with, PropagatorOptions};
use crate::models::{DisorderedChain, ModelKind, ModelSpec};
use crate::schedules::{build_schedule, Family, ScheduleOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NelderMeadOptions {
    /// Stop once every vertex lies within this distance of the best one.
    pub x_tol: f64,
    /// Evaluation budget per dimension.
    pub evals_per_dim: usize,
    /// Relative initial edge for nonzero coordinates.
    pub rel_step: f64,
    /// Initial edge for zero coordinates.
    pub zero_step: f64,
    /// Uniform initial edge; overrides the two above when set.
    pub abs_step: Option<f64>,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { x_tol: 1e-6, evals_per_dim: 500, rel_step: 0.05, zero_step: 0.00025, abs_step: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder-Mead with the dimension-dependent coefficients of Gao and Han:
/// reflection 1, expansion 1 + 2/n, contraction 3/4 - 1/(2n),
/// shrink 1 - 1/n. Non-finite costs count as +inf.
pub fn nelder_mead<F>(cost: F, x0: &[f64], opts: &NelderMeadOptions) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        return Err(Error::Invalid("Nelder-Mead needs at least one dimension".into()));
    }
    let nf = n as f64;
    let (rho, chi, gamma, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let budget = opts.evals_per_dim * n;
    let evals = std::cell::Cell::new(0usize);
    let f = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = cost(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let f0 = f(x0);
    if !f0.is_finite() {
        return Err(Error::Invalid("cost is not finite at the starting point".into()));
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] = match opts.abs_step {
            Some(h) => x[i] + h,
            None if x[i] != 0.0 => x[i] * (1.0 + opts.rel_step),
            None => opts.zero_step,
        };
        let v = f(&x);
        simplex.push((x, v));
    }
    let sort = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect() };
    sort(&mut simplex);
    let mut converged = false;
    loop {
        let best = &simplex[0].0;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.x_tol {
            converged = true;
            break;
        }
        if evals.get() >= budget {
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf).collect();
        let (worst, fw) = simplex[n].clone();
        let xr = combine(&centroid, &worst, -rho);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = combine(&centroid, &worst, -rho * chi);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < fw {
                let xc = combine(&centroid, &worst, -rho * gamma);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = combine(&centroid, &worst, gamma);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < fr.min(fw) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let x = combine(&x_best, &v.0, sigma);
                    let fx = f(&x);
                    *v = (x, fx);
                }
            }
        }
        sort(&mut simplex);
    }
    let (x, fx) = simplex.swap_remove(0);
    Ok(Minimum { x, f: fx, evaluations: evals.get(), converged })
}

/// Random-restart CRAB setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrabConfig {
    pub m_max: usize,
    pub restarts: usize,
    pub init_box: (f64, f64),
    pub seed: u64,
    /// Stepper tolerance of the free-fermion cost.
    pub tol: f64,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for CrabConfig {
    fn default() -> Self {
        Self {
            m_max: 5,
            restarts: 50,
            init_box: (-0.1, 0.1),
            seed: 0,
            tol: 1e-10,
            nelder_mead: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrabRestart {
    pub index: usize,
    pub start: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub cost: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrabOutcome {
    pub best_coeffs: Vec<f64>,
    pub best_cost: f64,
    /// Mean of the optimised per-restart costs.
    pub mean_cost: f64,
    pub restarts: Vec<CrabRestart>,
    pub seed: u64,
}

/// Cost of a CRAB coefficient vector: defect density for free fermions,
/// excess energy density for the disordered chain.
pub fn crab_cost(model: &ModelSpec, duration: f64, coeffs: &[f64], tol: f64) -> Result<f64> {
    let opts = ScheduleOptions { crab_coeffs: coeffs.to_vec(), ..ScheduleOptions::default() };
    let schedule = build_schedule(model, Family::Crab, duration, &opts)?;
    match model.kind {
        ModelKind::Disordered { .. } => {
            let chain = DisorderedChain::new(model)?;
            Ok(evolve_manybody_with(&chain, &schedule, &PropagatorOptions::default())?.e)
        }
        _ => Ok(defect_density_with(model, &schedule, &StepperOptions { tol, ..StepperOptions::default() })?.n),
    }
}

/// Start point of restart `index`: its own ChaCha stream of `seed`.
pub fn crab_start(cfg: &CrabConfig, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let (lo, hi) = cfg.init_box;
    (0..cfg.m_max).map(|_| rng.gen_range(lo..=hi)).collect()
}

pub fn crab_optimize(model: &ModelSpec, duration: f64, cfg: &CrabConfig) -> Result<CrabOutcome> {
    if cfg.m_max == 0 || cfg.restarts == 0 {
        return Err(Error::Invalid("CRAB needs m_max >= 1 and restarts >= 1".into()));
    }
    if !(cfg.init_box.1 >= cfg.init_box.0) {
        return Err(Error::Invalid("CRAB init box is empty".into()));
    }
    if let ModelKind::Disordered { .. } = model.kind {
        if model.l > 10 {
            return Err(Error::Unsupported("CRAB on the disordered chain is limited to L <= 10".into()));
        }
    }
    let restarts: Vec<CrabRestart> = (0..cfg.restarts)
        .into_par_iter()
        .map(|index| {
            let start = crab_start(cfg, index);
            let cost = |c: &[f64]| crab_cost(model, duration, c, cfg.tol).unwrap_or(f64::INFINITY);
            match nelder_mead(cost, &start, &cfg.nelder_mead) {
                Ok(m) => CrabRestart {
                    index,
                    start,
                    coeffs: m.x,
                    cost: m.f,
                    evaluations: m.evaluations,
                    converged: m.converged,
                    error: None,
                },
                Err(e) => CrabRestart {
                    index,
                    start,
                    coeffs: Vec::new(),
                    cost: f64::NAN,
                    evaluations: 0,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let ok: Vec<&CrabRestart> = restarts.iter().filter(|r| r.error.is_none()).collect();
    if ok.is_empty() {
        return Err(Error::Convergence(format!(
            "all {} CRAB restarts failed: {}",
            restarts.len(),
            restarts[0].error.as_deref().unwrap_or("")
        )));
    }
    let best = ok.iter().min_by(|a, b| a.cost.total_cmp(&b.cost)).expect("nonempty");
    let mean_cost = ok.iter().map(|r| r.cost).sum::<f64>() / ok.len() as f64;
    Ok(CrabOutcome {
        best_coeffs: best.coeffs.clone(),
        best_cost: best.cost,
        mean_cost,
        seed: cfg.seed,
        restarts,
    })
}
