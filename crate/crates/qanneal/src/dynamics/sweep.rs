//! Parameter sweeps over (L, T) grids and their CSV form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;

use super::{defect_density_with, StepperOptions};
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};
use crate::schedules::{build_schedule, Family, ScheduleOptions};

pub const CSV_HEADER: &str = "model,L,alpha,beta,schedule,T,n,E,norm_drift,wall_seconds";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub family: Family,
    pub l_list: Vec<usize>,
    pub t_list: Vec<f64>,
    pub tol: f64,
    pub schedule: ScheduleOptions,
    /// Record wall-clock time per cell; off by default so reruns are
    /// byte-identical.
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub l: usize,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub model: String,
    pub l: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub family: Family,
    pub duration: f64,
    pub n: f64,
    pub energy: f64,
    pub norm_drift: f64,
    pub wall_seconds: f64,
    /// Reason when the cell failed; numeric fields are then NaN.
    pub error: Option<String>,
    pub per_mode: Vec<(f64, f64)>,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl SweepRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.model,
            self.l,
            opt(self.alpha),
            opt(self.beta),
            self.family,
            self.duration,
            self.n,
            self.energy,
            self.norm_drift,
            self.wall_seconds
        )
    }
}

/// Receives records in grid order.
pub trait SweepSink {
    fn record(&mut self, rec: &SweepRecord) -> Result<()>;
}

impl<W: Write> SweepSink for CsvWriter<W> {
    fn record(&mut self, rec: &SweepRecord) -> Result<()> {
        let io = |e: std::io::Error| Error::Invalid(format!("writing sweep output: {e}"));
        writeln!(self.inner, "{}", rec.csv_row()).map_err(io)?;
        if let Some(why) = &rec.error {
            writeln!(self.inner, "# error: L={} T={}: {}", rec.l, rec.duration, why.replace('\n', " ")).map_err(io)?;
        }
        self.inner.flush().map_err(io)
    }
}

/// Writes rows (no header) to any writer, flushing after each record.
pub struct CsvWriter<W: Write> {
    pub inner: W,
}

impl SweepSink for Vec<SweepRecord> {
    fn record(&mut self, rec: &SweepRecord) -> Result<()> {
        self.push(rec.clone());
        Ok(())
    }
}

/// Grid in row order: L outer, T inner.
pub fn sweep_cells(cfg: &SweepConfig) -> Vec<SweepCell> {
    cfg.l_list
        .iter()
        .flat_map(|&l| cfg.t_list.iter().map(move |&duration| SweepCell { l, duration }))
        .collect()
}

fn model_for(kind: ModelKind, l: usize) -> Result<ModelSpec> {
    match kind {
        ModelKind::Tfim => Ok(ModelSpec::tfim(l)),
        ModelKind::Lrk { alpha, beta } => Ok(ModelSpec::lrk(l, alpha, beta)),
        ModelKind::Disordered { .. } => Err(Error::Unsupported("sweeps cover free-fermion models".into())),
    }
}

fn run_cell(cfg: &SweepConfig, cell: SweepCell) -> SweepRecord {
    let (alpha, beta) = match cfg.model {
        ModelKind::Lrk { alpha, beta } => (Some(alpha), Some(beta)),
        _ => (None, None),
    };
    let start = Instant::now();
    let outcome = model_for(cfg.model, cell.l).and_then(|m| {
        let s = build_schedule(&m, cfg.family, cell.duration, &cfg.schedule)?;
        defect_density_with(&m, &s, &StepperOptions { tol: cfg.tol, ..StepperOptions::default() })
    });
    let wall = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    let name = match cfg.model {
        ModelKind::Tfim => "tfim",
        ModelKind::Lrk { .. } => "lrk",
        ModelKind::Disordered { .. } => "disordered",
    };
    let mut rec = SweepRecord {
        model: name.to_string(),
        l: cell.l,
        alpha,
        beta,
        family: cfg.family,
        duration: cell.duration,
        n: f64::NAN,
        energy: f64::NAN,
        norm_drift: f64::NAN,
        wall_seconds: wall,
        error: None,
        per_mode: Vec::new(),
    };
    match outcome {
        Ok(r) => {
            rec.n = r.n;
            rec.energy = r.energy;
            rec.norm_drift = r.norm_drift;
            rec.per_mode = r.per_mode;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Runs the grid, skipping the first `skip` cells (already on disk), and
/// hands records to `sink` in grid order. Cells run in parallel batches of
/// the pool size; a failing cell is recorded and the sweep goes on.
pub fn sweep(cfg: &SweepConfig, skip: usize, sink: &mut dyn SweepSink) -> Result<usize> {
    if !(cfg.tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let cells = sweep_cells(cfg);
    let batch = rayon::current_num_threads().max(1);
    let mut done = 0;
    for chunk in cells.get(skip..).unwrap_or(&[]).chunks(batch) {
        let recs: Vec<SweepRecord> = chunk.par_iter().map(|&c| run_cell(cfg, c)).collect();
        for r in &recs {
            sink.record(r)?;
            done += 1;
        }
    }
    Ok(done)
}

fn parse_f(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad number '{s}' in sweep CSV")))
}

/// Parses sweep rows, skipping comments and the header. `# error:` comments
/// attach to the preceding row.
pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut out: Vec<SweepRecord> = Vec::new();
    for line in text.lines() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# error:") {
            if let Some(last) = out.last_mut() {
                last.error = Some(rest.trim().to_string());
            }
            continue;
        }
        if line.starts_with('#') || line == CSV_HEADER {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(Error::Invalid(format!("sweep row with {} fields: '{line}'", f.len())));
        }
        let o = |s: &str| -> Result<Option<f64>> { if s.is_empty() { Ok(None) } else { parse_f(s).map(Some) } };
        out.push(SweepRecord {
            model: f[0].to_string(),
            l: f[1].parse().map_err(|_| Error::Invalid(format!("bad L '{}'", f[1])))?,
            alpha: o(f[2])?,
            beta: o(f[3])?,
            family: f[4].parse()?,
            duration: parse_f(f[5])?,
            n: parse_f(f[6])?,
            energy: parse_f(f[7])?,
            norm_drift: parse_f(f[8])?,
            wall_seconds: parse_f(f[9])?,
            error: None,
            per_mode: Vec::new(),
        });
    }
    Ok(out)
}

/// Per-mode dump with header `k,p_k`.
pub fn write_mode_dump<W: Write>(mut w: W, per_mode: &[(f64, f64)]) -> std::io::Result<()> {
    writeln!(w, "k,p_k")?;
    for (k, p) in per_mode {
        writeln!(w, "{k},{p}")?;
    }
    Ok(())
}
