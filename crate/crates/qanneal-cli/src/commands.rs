//! Subcommand bodies.

use serde_json::{json, Value};
use std::io::Write;

use qanneal::analysis::{fit_decay, fit_power_law, onset_time, plateau_end};
use qanneal::dynamics::{
    defect_density_with, read_sweep_csv, sweep as run_sweep, write_mode_dump, CsvWriter, StepperOptions, SweepConfig,
    SweepRecord, SweepSink, CSV_HEADER,
};
use qanneal::manybody::{
    disordered_sweep, evolve_manybody_with, gap_scan, DisorderedRecord, DisorderedSink, DisorderedSweepConfig,
    PropagatorOptions, DISORDERED_CSV_HEADER,
};
use qanneal::models::{DisorderedChain, ModelKind, ModelSpec};
use qanneal::optimize::{crab_optimize, CrabConfig, NelderMeadOptions};
use qanneal::schedules::{build_schedule, Family, ScheduleOptions};

use crate::config::{ModelName, Settings};
use crate::output::{create, header, open_csv};
use crate::CliError;

/// Gap-scan window used to place the disordered-chain ansatz.
const SCAN: ((f64, f64), usize) = ((0.05, 1.95), 39);

fn write_err(e: std::io::Error) -> CliError {
    CliError::Usage(format!("writing output: {e}"))
}

fn model_spec(s: &Settings, l: usize) -> Result<ModelSpec, CliError> {
    Ok(match s.model() {
        ModelName::Tfim => ModelSpec::tfim(l),
        ModelName::Lrk => {
            let (a, b) = s.lrk_exponents()?;
            ModelSpec::lrk(l, a, b)
        }
        ModelName::Disordered => {
            ModelSpec::disordered(l, s.delta_j.unwrap_or(0.1), s.j_prime.unwrap_or(0.4), s.single_seed()?)
        }
    })
}

fn free_fermion_kind(s: &Settings) -> Result<ModelKind, CliError> {
    match s.model() {
        ModelName::Tfim => Ok(ModelKind::Tfim),
        ModelName::Lrk => {
            let (alpha, beta) = s.lrk_exponents()?;
            Ok(ModelKind::Lrk { alpha, beta })
        }
        ModelName::Disordered => Err(CliError::Usage("use the `disordered` subcommand for the disordered chain".into())),
    }
}

/// Fills defaults that shape the result so the header records them.
fn fill_defaults(s: &mut Settings) {
    let tol = if s.model() == ModelName::Disordered { PropagatorOptions::default().krylov_tol } else { 1e-10 };
    s.model.get_or_insert(ModelName::Tfim);
    s.tol.get_or_insert(tol);
    s.onlp_formula.get_or_insert_with(Default::default);
    s.naqo_prefactor_scale.get_or_insert(1.0);
    if s.model() == ModelName::Disordered {
        let d = DisorderedSweepConfig::default();
        s.delta_j.get_or_insert(d.delta_j);
        s.j_prime.get_or_insert(d.j_prime);
        s.beta_eff.get_or_insert(d.schedule.beta_eff);
    }
}

fn schedule_options(s: &Settings) -> ScheduleOptions {
    let mut o = ScheduleOptions::default();
    if let Some(f) = s.onlp_formula {
        o.onlp_formula = f;
    }
    if let Some(x) = s.naqo_prefactor_scale {
        o.naqo_prefactor_scale = x;
    }
    if let Some(b) = s.beta_eff {
        o.beta_eff = b;
    }
    o.g_star = s.g_star;
    o
}

fn tol(s: &Settings) -> Result<f64, CliError> {
    match s.tol {
        Some(t) if t > 0.0 => Ok(t),
        Some(t) => Err(CliError::Usage(format!("--tol must be positive, got {t}"))),
        None => Ok(1e-10),
    }
}

/// Locates the gap minimum when the ansatz needs it and none was given.
fn place_ansatz(s: &mut Settings, model: &ModelSpec, family: Family) -> Result<(), CliError> {
    if family == Family::NaqoAnsatz && s.g_star.is_none() {
        if let ModelKind::Disordered { .. } = model.kind {
            let chain = DisorderedChain::new(model)?;
            s.g_star = Some(gap_scan(&chain, SCAN.0, SCAN.1)?.g_star);
        }
    }
    Ok(())
}

pub fn schedule(mut s: Settings) -> Result<(), CliError> {
    let family = s.single_family()?;
    let (l, duration) = (s.single_size()?, s.single_duration()?);
    fill_defaults(&mut s);
    let samples = *s.samples.get_or_insert(1001);
    if samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let model = model_spec(&s, l)?;
    place_ansatz(&mut s, &model, family)?;
    let sched = build_schedule(&model, family, duration, &schedule_options(&s))?;
    let mut w = create(s.out.as_deref())?;
    let mut text = header("schedule", &s.provenance());
    text.push_str("t,g,gdot\n");
    for (t, g, gd) in sched.samples(samples) {
        text.push_str(&format!("{t},{g},{gd}\n"));
    }
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(write_err)
}

fn emit_json(s: &Settings, command: &str, mut body: Value) -> Result<(), CliError> {
    body["version"] = json!(env!("CARGO_PKG_VERSION"));
    body["command"] = json!(command);
    body["config"] = serde_json::to_value(s).expect("settings serialise");
    let mut w = create(s.out.as_deref())?;
    let text = serde_json::to_string_pretty(&body).expect("json");
    writeln!(w, "{text}").and_then(|_| w.flush()).map_err(write_err)
}

pub fn evolve(mut s: Settings) -> Result<(), CliError> {
    let family = s.single_family()?;
    let (l, duration) = (s.single_size()?, s.single_duration()?);
    fill_defaults(&mut s);
    let tol = tol(&s)?;
    let model = model_spec(&s, l)?;
    place_ansatz(&mut s, &model, family)?;
    let sched = build_schedule(&model, family, duration, &schedule_options(&s))?;
    let body = if let ModelKind::Disordered { .. } = model.kind {
        let chain = DisorderedChain::new(&model)?;
        let opts = PropagatorOptions { krylov_tol: tol, ..PropagatorOptions::default() };
        let r = evolve_manybody_with(&chain, &sched, &opts)?;
        json!({"model": model.name(), "L": l, "T": duration, "schedule": family, "e": r.e, "E": r.energy,
               "ground_energy": r.ground_energy, "norm_drift": r.norm_drift, "parity_leak": r.parity_leak})
    } else {
        let r = defect_density_with(&model, &sched, &StepperOptions { tol, ..StepperOptions::default() })?;
        if let Some(p) = &s.modes_out {
            let f = std::fs::File::create(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            write_mode_dump(std::io::BufWriter::new(f), &r.per_mode).map_err(write_err)?;
        }
        json!({"model": model.name(), "L": l, "T": duration, "schedule": family, "n": r.n, "E": r.energy,
               "norm_drift": r.norm_drift, "steps": r.steps})
    };
    emit_json(&s, "evolve", body)
}

/// Forwards rows to the CSV and counts failed cells.
struct Counting<W: Write> {
    csv: CsvWriter<W>,
    failed: usize,
}

impl<W: Write> SweepSink for Counting<W> {
    fn record(&mut self, rec: &SweepRecord) -> qanneal::Result<()> {
        self.failed += rec.error.is_some() as usize;
        SweepSink::record(&mut self.csv, rec)
    }
}

impl<W: Write> DisorderedSink for Counting<W> {
    fn record(&mut self, rec: &DisorderedRecord) -> qanneal::Result<()> {
        self.failed += rec.error.is_some() as usize;
        DisorderedSink::record(&mut self.csv, rec)
    }
}

fn finish(failed: usize, total: usize) -> Result<(), CliError> {
    if failed > 0 {
        Err(CliError::Numerical(format!("{failed} of {total} cells failed; see the '# error:' lines")))
    } else {
        Ok(())
    }
}

pub fn sweep(mut s: Settings) -> Result<(), CliError> {
    let family = s.single_family()?;
    let kind = free_fermion_kind(&s)?;
    let cfg = SweepConfig {
        model: kind,
        family,
        l_list: s.sizes()?.to_vec(),
        t_list: s.durations()?.to_vec(),
        tol: tol(&s)?,
        schedule: schedule_options(&s),
        timing: s.timing,
    };
    fill_defaults(&mut s);
    let preamble = format!("{}{CSV_HEADER}\n", header("sweep", &s.provenance()));
    let (w, skip) = open_csv(s.out.as_deref(), &preamble, s.resume)?;
    let total = cfg.l_list.len() * cfg.t_list.len();
    if skip > total {
        return Err(CliError::Usage(format!("output already holds {skip} rows, more than the {total} cells")));
    }
    let mut sink = Counting { csv: CsvWriter { inner: w }, failed: 0 };
    run_sweep(&cfg, skip, &mut sink)?;
    finish(sink.failed, total - skip)
}

pub fn crab(mut s: Settings) -> Result<(), CliError> {
    let (l, duration) = (s.single_size()?, s.single_duration()?);
    fill_defaults(&mut s);
    let d = CrabConfig::default();
    let cfg = CrabConfig {
        m_max: *s.m_max.get_or_insert(d.m_max),
        restarts: *s.restarts.get_or_insert(d.restarts),
        seed: s.single_seed()?,
        tol: tol(&s)?,
        nelder_mead: NelderMeadOptions {
            evals_per_dim: *s.evals_per_dim.get_or_insert(d.nelder_mead.evals_per_dim),
            ..NelderMeadOptions::default()
        },
        ..d
    };
    s.seed = Some(vec![cfg.seed]);
    let model = model_spec(&s, l)?;
    let out = crab_optimize(&model, duration, &cfg)?;
    let body = serde_json::to_value(&out).expect("outcome serialises");
    emit_json(&s, "crab", body)
}

pub fn disordered(mut s: Settings) -> Result<(), CliError> {
    if s.model.is_some_and(|m| m != ModelName::Disordered) {
        return Err(CliError::Usage("the disordered subcommand only runs --model disordered".into()));
    }
    if s.g_star.is_some() {
        return Err(CliError::Usage("g_star is located per disorder realisation; drop --g-star".into()));
    }
    s.model = Some(ModelName::Disordered);
    fill_defaults(&mut s);
    let d = DisorderedSweepConfig::default();
    let cfg = DisorderedSweepConfig {
        l_list: s.sizes()?.to_vec(),
        seeds: s.seed.get_or_insert(d.seeds.clone()).clone(),
        families: s.family.get_or_insert(d.families.clone()).clone(),
        t_list: s.durations()?.to_vec(),
        delta_j: s.delta_j.unwrap_or(d.delta_j),
        j_prime: s.j_prime.unwrap_or(d.j_prime),
        schedule: schedule_options(&s),
        propagator: PropagatorOptions { krylov_tol: tol(&s)?, ..d.propagator },
        timing: s.timing,
        ..d
    };
    let preamble = format!("{}{DISORDERED_CSV_HEADER}\n", header("disordered", &s.provenance()));
    let (w, skip) = open_csv(s.out.as_deref(), &preamble, s.resume)?;
    let total = cfg.l_list.len() * cfg.seeds.len() * cfg.families.len() * cfg.t_list.len();
    if skip > total {
        return Err(CliError::Usage(format!("output already holds {skip} rows, more than the {total} cells")));
    }
    let mut sink = Counting { csv: CsvWriter { inner: w }, failed: 0 };
    disordered_sweep(&cfg, skip, &mut sink)?;
    finish(sink.failed, total - skip)
}

pub fn fit(s: Settings) -> Result<(), CliError> {
    let Some(path) = s.input.clone() else {
        return Err(CliError::Usage("--input is required".into()));
    };
    let window = match s.window.as_deref() {
        None => None,
        Some([a, b]) if a < b => Some((*a, *b)),
        Some(_) => return Err(CliError::Usage("--window takes two increasing durations".into())),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let rows = read_sweep_csv(&text)?;
    let mut groups: Vec<(SweepRecord, Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        if r.error.is_some() || !(r.n > 0.0 && r.n.is_finite()) {
            continue;
        }
        if s.family.as_ref().is_some_and(|f| !f.contains(&r.family)) || s.l.as_ref().is_some_and(|l| !l.contains(&r.l)) {
            continue;
        }
        let same = |g: &SweepRecord| g.model == r.model && g.l == r.l && g.alpha == r.alpha && g.beta == r.beta && g.family == r.family;
        match groups.iter_mut().find(|(g, _)| same(g)) {
            Some((_, pts)) => pts.push((r.duration, r.n)),
            None => {
                let p = (r.duration, r.n);
                groups.push((r, vec![p]));
            }
        }
    }
    if groups.is_empty() {
        return Err(CliError::Usage(format!("{}: no usable rows", path.display())));
    }
    let fits: Vec<Value> = groups
        .into_iter()
        .map(|(g, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let fit = match window {
                Some(w) => fit_power_law(&pts, Some(w)),
                None => fit_decay(&pts),
            };
            let (fit, fit_error) = match fit {
                Ok(f) => (json!(f), Value::Null),
                Err(e) => (Value::Null, json!(e.to_string())),
            };
            json!({"model": g.model, "L": g.l, "alpha": g.alpha, "beta": g.beta, "schedule": g.family,
                   "points": pts.len(), "fit": fit, "fit_error": fit_error,
                   "onset_time": onset_time(&pts, g.l).ok(), "plateau_end": plateau_end(&pts).ok()})
        })
        .collect();
    emit_json(&s, "fit", json!({"input": path.display().to_string(), "fits": fits}))
}
