//! Real-time propagation of the disordered chain and sweeps over seeds.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;

use super::lanczos::expm_apply;
use super::{gap_scan, ground_state};
use crate::dynamics::CsvWriter;
use crate::error::{Error, Result};
use crate::models::{DisorderedChain, ModelSpec};
use crate::schedules::{build_schedule, Family, Schedule, ScheduleOptions};

pub const DISORDERED_CSV_HEADER: &str = "model,L,alpha,beta,schedule,T,e,E,norm_drift,wall_seconds,seed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagatorOptions {
    /// Largest Magnus step.
    pub dt_max: f64,
    /// Krylov error per exponential.
    pub krylov_tol: f64,
    pub krylov_dim: usize,
}

impl Default for PropagatorOptions {
    fn default() -> Self {
        Self { dt_max: 0.025, krylov_tol: 1e-12, krylov_dim: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManybodyEvolution {
    /// Excess energy density (<H(T/2)> - E0(T/2)) / L.
    pub e: f64,
    /// <H(T/2)>.
    pub energy: f64,
    pub ground_energy: f64,
    pub norm_drift: f64,
    /// Largest norm of the odd-sector component seen during the ramp.
    pub parity_leak: f64,
    pub steps: usize,
    pub applications: usize,
}

/// Excess energy density after the ramp, with default propagator settings
/// and Krylov tolerance `tol`.
pub fn evolve_manybody(spec: &ModelSpec, schedule: &Schedule, tol: f64) -> Result<ManybodyEvolution> {
    let chain = DisorderedChain::new(spec)?;
    let opts = PropagatorOptions { krylov_tol: tol, ..PropagatorOptions::default() };
    evolve_manybody_with(&chain, schedule, &opts)
}

fn energy_of(chain: &DisorderedChain, g: f64, psi: &[Complex64]) -> f64 {
    let mut w = vec![Complex64::new(0.0, 0.0); psi.len()];
    chain.apply_complex(g, psi, &mut w);
    psi.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum()
}

fn odd_part(psi: &[Complex64]) -> f64 {
    let n = psi.len();
    let mut s = 0.0;
    for b in 0..n / 2 {
        s += 0.5 * (psi[b] - psi[b ^ (n - 1)]).norm_sqr();
    }
    s.sqrt()
}

/// Fourth-order commutator-free Magnus steps; each exponential is a Krylov
/// action of H at an effective field. Steps align with the schedule
/// breakpoints so jumps are never straddled.
pub fn evolve_manybody_with(
    chain: &DisorderedChain,
    schedule: &Schedule,
    opts: &PropagatorOptions,
) -> Result<ManybodyEvolution> {
    if !(opts.dt_max > 0.0 && opts.krylov_tol > 0.0 && opts.krylov_dim >= 2) {
        return Err(Error::Invalid("propagator options must be positive".into()));
    }
    let half = schedule.duration / 2.0;
    let g0 = schedule.g(-half);
    let g1 = schedule.g(half);
    let start = ground_state(chain, g0, true)?;
    let mut psi: Vec<Complex64> = start.vector.iter().map(|&x| Complex64::new(x, 0.0)).collect();

    let s3 = 3f64.sqrt();
    let (c1, c2) = (0.5 - s3 / 6.0, 0.5 + s3 / 6.0);
    let (a1, a2) = (0.25 - s3 / 6.0, 0.25 + s3 / 6.0);

    let mut edges = vec![-half];
    edges.extend(schedule.breakpoints().into_iter().filter(|&t| t > -half && t < half));
    edges.push(half);

    let mut steps = 0;
    let mut applications = 0;
    let mut parity_leak: f64 = 0.0;
    for w in edges.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let n = ((tb - ta) / opts.dt_max).ceil().max(1.0) as usize;
        let h = (tb - ta) / n as f64;
        for i in 0..n {
            let t = ta + h * i as f64;
            let ga = schedule.g(t + c1 * h);
            let gb = schedule.g(t + c2 * h);
            // a1 H(ga) + a2 H(gb) = H(g_eff) / 2 since H is affine in g
            let first = 2.0 * (a2 * ga + a1 * gb);
            let second = 2.0 * (a1 * ga + a2 * gb);
            for g in [first, second] {
                applications += expm_apply(
                    |x, y| chain.apply_complex(g, x, y),
                    &mut psi,
                    0.5 * h,
                    opts.krylov_tol,
                    opts.krylov_dim,
                )?;
            }
            steps += 1;
            parity_leak = parity_leak.max(odd_part(&psi));
        }
    }
    let norm_drift = (psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs();
    let energy = energy_of(chain, g1, &psi);
    let ground = ground_state(chain, g1, true)?;
    let e = (energy - ground.value) / chain.l as f64;
    Ok(ManybodyEvolution {
        e,
        energy,
        ground_energy: ground.value,
        norm_drift,
        parity_leak,
        steps,
        applications,
    })
}

/// Grid for disordered-chain runs: sizes x seeds x families x durations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisorderedSweepConfig {
    pub l_list: Vec<usize>,
    pub seeds: Vec<u64>,
    pub families: Vec<Family>,
    pub t_list: Vec<f64>,
    pub delta_j: f64,
    pub j_prime: f64,
    pub g_start: f64,
    /// Gap-scan window and resolution used to place the ansatz.
    pub scan_interval: (f64, f64),
    pub scan_points: usize,
    pub schedule: ScheduleOptions,
    pub propagator: PropagatorOptions,
    pub timing: bool,
}

impl Default for DisorderedSweepConfig {
    fn default() -> Self {
        Self {
            l_list: vec![8],
            seeds: (1..=20).collect(),
            families: vec![Family::Linear, Family::NaqoAnsatz],
            t_list: vec![10.0],
            delta_j: 0.1,
            j_prime: 0.4,
            g_start: 2.0,
            scan_interval: (0.05, 1.95),
            scan_points: 39,
            schedule: ScheduleOptions::default(),
            propagator: PropagatorOptions::default(),
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderedRecord {
    pub l: usize,
    pub seed: u64,
    pub family: Family,
    pub duration: f64,
    pub e: f64,
    pub energy: f64,
    pub norm_drift: f64,
    pub wall_seconds: f64,
    /// Gap minimum used by the ansatz; None for other families.
    pub g_star: Option<f64>,
    pub error: Option<String>,
}

impl DisorderedRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "disordered,{},,,{},{},{},{},{},{},{}",
            self.l, self.family, self.duration, self.e, self.energy, self.norm_drift, self.wall_seconds, self.seed
        )
    }
}

/// Receives disordered-chain records in grid order.
pub trait DisorderedSink {
    fn record(&mut self, rec: &DisorderedRecord) -> Result<()>;
}

impl DisorderedSink for Vec<DisorderedRecord> {
    fn record(&mut self, rec: &DisorderedRecord) -> Result<()> {
        self.push(rec.clone());
        Ok(())
    }
}

impl<W: Write> DisorderedSink for CsvWriter<W> {
    fn record(&mut self, rec: &DisorderedRecord) -> Result<()> {
        let io = |e: std::io::Error| Error::Invalid(format!("writing sweep output: {e}"));
        writeln!(self.inner, "{}", rec.csv_row()).map_err(io)?;
        if let Some(why) = &rec.error {
            let why = why.replace('\n', " ");
            writeln!(self.inner, "# error: L={} seed={} T={}: {why}", rec.l, rec.seed, rec.duration).map_err(io)?;
        }
        self.inner.flush().map_err(io)
    }
}

fn run_group(cfg: &DisorderedSweepConfig, l: usize, seed: u64, skip_within: usize) -> Vec<DisorderedRecord> {
    let spec = ModelSpec { g_start: cfg.g_start, ..ModelSpec::disordered(l, cfg.delta_j, cfg.j_prime, seed) };
    let mut out = Vec::new();
    let fail = |family: Family, duration: f64, g_star: Option<f64>, e: &Error| DisorderedRecord {
        l,
        seed,
        family,
        duration,
        e: f64::NAN,
        energy: f64::NAN,
        norm_drift: f64::NAN,
        wall_seconds: 0.0,
        g_star,
        error: Some(e.to_string()),
    };
    let chain = DisorderedChain::new(&spec);
    let needs_scan = cfg.families.contains(&Family::NaqoAnsatz);
    let scan = match (&chain, needs_scan) {
        (Ok(c), true) => Some(gap_scan(c, cfg.scan_interval, cfg.scan_points).map(|s| s.g_star)),
        _ => None,
    };
    let mut index = 0;
    for &family in &cfg.families {
        for &duration in &cfg.t_list {
            index += 1;
            if index <= skip_within {
                continue;
            }
            let started = Instant::now();
            let chain = match &chain {
                Ok(c) => c,
                Err(e) => {
                    out.push(fail(family, duration, None, e));
                    continue;
                }
            };
            let mut opts = cfg.schedule.clone();
            let mut g_star = None;
            if family == Family::NaqoAnsatz {
                match scan.as_ref().expect("scan computed when the ansatz is requested") {
                    Ok(g) => {
                        opts.g_star = Some(*g);
                        g_star = Some(*g);
                    }
                    Err(e) => {
                        out.push(fail(family, duration, None, e));
                        continue;
                    }
                }
            }
            let res = build_schedule(&spec, family, duration, &opts)
                .and_then(|s| evolve_manybody_with(chain, &s, &cfg.propagator));
            match res {
                Ok(r) => out.push(DisorderedRecord {
                    l,
                    seed,
                    family,
                    duration,
                    e: r.e,
                    energy: r.energy,
                    norm_drift: r.norm_drift,
                    wall_seconds: if cfg.timing { started.elapsed().as_secs_f64() } else { 0.0 },
                    g_star,
                    error: None,
                }),
                Err(e) => out.push(fail(family, duration, g_star, &e)),
            }
        }
    }
    out
}

/// Runs the grid, skipping the first `skip` cells (resume). (L, seed)
/// groups run in parallel; records reach the sink in grid order.
pub fn disordered_sweep(cfg: &DisorderedSweepConfig, skip: usize, sink: &mut dyn DisorderedSink) -> Result<usize> {
    if cfg.l_list.is_empty() || cfg.seeds.is_empty() || cfg.families.is_empty() || cfg.t_list.is_empty() {
        return Err(Error::Invalid("disordered sweep grid is empty".into()));
    }
    if let Some(f) = cfg.families.iter().find(|f| !matches!(f, Family::Linear | Family::NaqoAnsatz | Family::Onlp)) {
        return Err(Error::Unsupported(format!("family {f} is not available for the disordered chain")));
    }
    let per_group = cfg.families.len() * cfg.t_list.len();
    let groups: Vec<(usize, u64, usize)> = cfg
        .l_list
        .iter()
        .flat_map(|&l| cfg.seeds.iter().map(move |&s| (l, s)))
        .enumerate()
        .filter_map(|(i, (l, s))| {
            let first = i * per_group;
            if first + per_group <= skip {
                None
            } else {
                Some((l, s, skip.saturating_sub(first)))
            }
        })
        .collect();
    let batch = rayon::current_num_threads().max(1);
    let mut done = 0;
    for chunk in groups.chunks(batch) {
        let recs: Vec<Vec<DisorderedRecord>> =
            chunk.par_iter().map(|&(l, s, k)| run_group(cfg, l, s, k)).collect();
        for r in recs.iter().flatten() {
            sink.record(r)?;
            done += 1;
        }
    }
    Ok(done)
}
