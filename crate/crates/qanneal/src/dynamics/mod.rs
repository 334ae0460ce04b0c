//! Free-fermion dynamics: per-mode two-level propagation, excitation
//! probabilities, defect density and final energy.

mod mode;
mod sweep;

pub use mode::{evolve_mode, evolve_mode_midpoint, evolve_mode_with, ModeEvolution, StepperOptions};
pub use sweep::{
    read_sweep_csv, sweep, sweep_cells, write_mode_dump, CsvWriter, SweepCell, SweepConfig, SweepRecord, SweepSink,
    CSV_HEADER,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::schedules::Schedule;

/// Aggregated stepper statistics over modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct StepStats {
    pub total_steps: u64,
    pub max_steps: u64,
    pub max_refinements: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionResult {
    /// (k, p_k) over the positive momentum grid.
    pub per_mode: Vec<(f64, f64)>,
    /// (1/L) sum_k p_k
    pub n: f64,
    /// Final energy -sum eps_k + 2 sum eps_k p_k at g(T/2).
    pub energy: f64,
    pub norm_drift: f64,
    pub steps: StepStats,
}

/// Evolves every mode of a free-fermion model under `schedule`.
pub fn defect_density(model: &ModelSpec, schedule: &Schedule, tol: f64) -> Result<EvolutionResult> {
    defect_density_with(model, schedule, &StepperOptions { tol, ..StepperOptions::default() })
}

pub fn defect_density_with(model: &ModelSpec, schedule: &Schedule, opts: &StepperOptions) -> Result<EvolutionResult> {
    model.validate()?;
    let modes = model.modes()?;
    let outcomes: Vec<Result<ModeEvolution>> = modes.par_iter().map(|m| evolve_mode_with(m, schedule, opts)).collect();
    let g_end = schedule.g(schedule.duration / 2.0);
    let mut per_mode = Vec::with_capacity(modes.len());
    let mut sum_p = 0.0;
    let mut energy = 0.0;
    let mut drift = 0.0f64;
    let mut steps = StepStats::default();
    // fixed k-order reduction
    for (m, out) in modes.iter().zip(outcomes) {
        let ev = out.map_err(|e| match e {
            Error::Integration { t, last_state, reason } => {
                Error::Integration { t, last_state, reason: format!("mode k={}: {reason}", m.k) }
            }
            other => other,
        })?;
        let eps = m.energy(g_end);
        sum_p += ev.p;
        energy += -eps + 2.0 * eps * ev.p;
        drift = drift.max(ev.norm_drift);
        steps.total_steps += ev.steps;
        steps.max_steps = steps.max_steps.max(ev.steps);
        steps.max_refinements = steps.max_refinements.max(ev.refinements);
        per_mode.push((m.k, ev.p));
    }
    Ok(EvolutionResult { per_mode, n: sum_p / model.l as f64, energy, norm_drift: drift, steps })
}
