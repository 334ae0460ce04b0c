//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! This target prints verdicts instead of asserting them, so a physics
//! target the implementation cannot reach shows up as FAIL without
//! aborting the rest of the report. Set `QANNEAL_ACCEPTANCE_STRICT=1` to
//! turn any FAIL into a nonzero exit status.

mod common;

use common::{rel, simpson};
use qanneal::analysis::{collapse_error, fit_decay, fit_power_law, fit_scaling, onset_time, plateau_end};
use qanneal::dynamics::{defect_density, sweep, CsvWriter, SweepConfig};
use qanneal::manybody::{disordered_sweep, evolve_manybody_with, gap_scan, DisorderedSweepConfig, PropagatorOptions};
use qanneal::models::{DisorderedChain, ModelKind, ModelSpec};
use qanneal::optimize::{crab_cost, crab_optimize, CrabConfig, NelderMeadOptions};
use qanneal::schedules::{
    build_schedule, eqab_schedule, lad_schedule, naqo_lrk_coefficients, naqo_lrk_schedule, naqo_tfim_schedule, Family,
    Schedule, ScheduleOptions,
};
use qanneal::specfun::{chebyshev_t, gamma, lambert_w0, zeta};
use qanneal::Result;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

const TOL: f64 = 1e-10;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "MISS"
    }
}

/// Log grid lo * 10^(i / per_decade) up to hi.
fn grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let n = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=n).map(|i| lo * 10f64.powf(i as f64 / per_decade as f64)).collect()
}

fn post_plateau(c: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let start = plateau_end(c)?;
    Ok(c.iter().copied().filter(|p| p.0 >= start).collect())
}

/// Shared state: largest norm drift seen and curves reused across criteria.
#[derive(Default)]
struct Ctx {
    drift: f64,
    opts: ScheduleOptions,
    tfim_linear_2000: Vec<(f64, f64)>,
    qab_onset_2000: Option<f64>,
    naqo_onset_2000: Option<f64>,
}

impl Ctx {
    fn run(&mut self, model: &ModelSpec, family: Family, duration: f64) -> Result<f64> {
        let s = build_schedule(model, family, duration, &self.opts)?;
        let r = defect_density(model, &s, TOL)?;
        self.drift = self.drift.max(r.norm_drift);
        Ok(r.n)
    }

    fn curve(&mut self, model: &ModelSpec, family: Family, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
        ts.iter().map(|&t| Ok((t, self.run(model, family, t)?))).collect()
    }
}

fn linear_kz(ctx: &mut Ctx) -> Result<Verdict> {
    let model = ModelSpec::tfim(2000);
    let c = ctx.curve(&model, Family::Linear, &grid(1.0, 1e5, 8))?;
    let fit = fit_power_law(&c, Some((100.0 * (1.0 - 1e-9), 1000.0 * (1.0 + 1e-9))))?;
    ctx.tfim_linear_2000 = c;
    let ok = (fit.exponent + 0.5).abs() <= 0.05;
    Ok(verdict(ok, format!("L=2000 T in [1e2, 1e3]: exponent {:.4} (target -0.5 +- 0.05)", fit.exponent)))
}

fn sudden_quench(ctx: &mut Ctx) -> Result<Verdict> {
    // ground state at g = 2 projected on the excited state at g = 0
    let p = |k: f64| {
        let c = k.cos();
        0.5 * (1.0 - (1.0 - 2.0 * c) / (5.0 - 4.0 * c).sqrt())
    };
    let oracle = simpson(&p, 0.0, PI, 1e-13) / (2.0 * PI);
    let n = ctx.run(&ModelSpec::tfim(4000), Family::Linear, 1e-10)?;
    let ok = (n - oracle).abs() <= 1e-3;
    Ok(verdict(ok, format!("L=4000 T=1e-10: n = {n:.7}, quadrature {oracle:.7}, |diff| {:.1e} (<= 1e-3)", (n - oracle).abs())))
}

fn lad_scaling(ctx: &mut Ctx) -> Result<Verdict> {
    let xs = grid(1e-4, 10.0, 4);
    let mut curves = Vec::new();
    let mut fits = Vec::new();
    for l in [500usize, 1000] {
        let ts: Vec<f64> = xs.iter().map(|x| x * (l * l) as f64).collect();
        let c = ctx.curve(&ModelSpec::tfim(l), Family::Lad, &ts)?;
        fits.push((l, fit_decay(&c)?));
        curves.push((l, c));
    }
    let full = collapse_error(&curves, 2.0)?;
    let tails: Vec<(usize, Vec<(f64, f64)>)> =
        curves.iter().map(|(l, c)| Ok((*l, post_plateau(c)?))).collect::<Result<_>>()?;
    let err = collapse_error(&tails, 2.0)?;
    let collapse_ok = err <= 0.1;
    let decay_ok = fits.iter().all(|(_, f)| (f.exponent + 2.0).abs() <= 0.2);
    let fit_txt: Vec<String> =
        fits.iter().map(|(l, f)| format!("L={l} {:.3} on [{:.3e}, {:.3e}]", f.exponent, f.window.0, f.window.1)).collect();
    Ok(verdict(
        collapse_ok && decay_ok,
        format!(
            "collapse vs T/L^2 past the plateau {err:.3} (<= 0.1) [{}], whole range {full:.3}; decay {} (target -2 +- 0.2) [{}]",
            mark(collapse_ok),
            fit_txt.join(", "),
            mark(decay_ok)
        ),
    ))
}

fn qab_scaling(ctx: &mut Ctx) -> Result<Verdict> {
    let xs = grid(0.01, 1000.0, 6);
    let mut curves = Vec::new();
    let mut fits = Vec::new();
    let mut onsets = Vec::new();
    for l in [500usize, 1000, 2000] {
        let ts: Vec<f64> = xs.iter().map(|x| x * l as f64).collect();
        let c = ctx.curve(&ModelSpec::tfim(l), Family::Qab, &ts)?;
        fits.push((l, fit_decay(&c)?));
        onsets.push((l as f64, onset_time(&c, l)?));
        curves.push((l, c));
    }
    ctx.qab_onset_2000 = Some(onsets[2].1);
    let tails: Vec<(usize, Vec<(f64, f64)>)> =
        curves.iter().map(|(l, c)| Ok((*l, post_plateau(c)?))).collect::<Result<_>>()?;
    let err = collapse_error(&tails, 1.0)?;
    let ons = fit_scaling(&onsets)?;
    let collapse_ok = err <= 0.1;
    let decay_ok = fits.iter().all(|(_, f)| (f.exponent + 2.0).abs() <= 0.2);
    let onset_ok = (ons.exponent - 1.5).abs() <= 0.2;
    let fit_txt: Vec<String> = fits.iter().map(|(l, f)| format!("L={l} {:.3}", f.exponent)).collect();
    let ons_txt: Vec<String> = onsets.iter().map(|(l, t)| format!("{l}:{t:.0}")).collect();
    Ok(verdict(
        collapse_ok && decay_ok && onset_ok,
        format!(
            "collapse vs T/L {err:.3} (<= 0.1) [{}]; decay {} (-2 +- 0.2) [{}]; onsets {} -> L^{:.3} (1.5 +- 0.2) [{}]",
            mark(collapse_ok),
            fit_txt.join(", "),
            mark(decay_ok),
            ons_txt.join(" "),
            ons.exponent,
            mark(onset_ok)
        ),
    ))
}

/// eQAB, ONLP and NAQO at L = 2000 plus the orderings between families.
struct TfimFamilies {
    eqab: Vec<(f64, f64)>,
    onlp: Vec<(f64, f64)>,
    naqo: Vec<(f64, f64)>,
}

fn tfim_families(ctx: &mut Ctx) -> Result<TfimFamilies> {
    let model = ModelSpec::tfim(2000);
    let eqab = ctx.curve(&model, Family::Eqab, &grid(10.0, 1e4, 8))?;
    let onlp = ctx.curve(&model, Family::Onlp, &grid(10.0, 3000.0, 12))?;
    let naqo = ctx.curve(&model, Family::Naqo, &grid(20.0, 3000.0, 12))?;
    Ok(TfimFamilies { eqab, onlp, naqo })
}

fn eqab_decay(f: &TfimFamilies) -> Result<Verdict> {
    let fit = fit_decay(&f.eqab)?;
    let ok = (fit.exponent + 0.66).abs() <= 0.10;
    Ok(verdict(
        ok,
        format!("L=2000: exponent {:.3} on [{:.0}, {:.0}] (target -0.66 +- 0.10)", fit.exponent, fit.window.0, fit.window.1),
    ))
}

fn naqo_tfim(ctx: &mut Ctx) -> Result<Verdict> {
    let mut onsets = Vec::new();
    let c1000 = ctx.curve(&ModelSpec::tfim(1000), Family::Naqo, &grid(20.0, 1000.0, 8))?;
    onsets.push((1000.0, onset_time(&c1000, 1000)?));
    onsets.push((2000.0, ctx.naqo_onset_2000.expect("L=2000 NAQO curve computed first")));
    let c4000 = ctx.curve(&ModelSpec::tfim(4000), Family::Naqo, &grid(20.0, 4000.0, 8))?;
    onsets.push((4000.0, onset_time(&c4000, 4000)?));
    let fit = fit_decay(&c4000)?;
    let ons = fit_scaling(&onsets)?;
    let decay_ok = (fit.exponent + 1.0).abs() <= 0.15;
    let onset_ok = (ons.exponent - 1.0).abs() <= 0.2;
    let ons_txt: Vec<String> = onsets.iter().map(|(l, t)| format!("{l}:{t:.0}")).collect();
    Ok(verdict(
        decay_ok && onset_ok,
        format!(
            "L=4000 decay {:.3} on [{:.0}, {:.0}] (-1 +- 0.15) [{}]; onsets {} -> L^{:.3} (1 +- 0.2) [{}]",
            fit.exponent,
            fit.window.0,
            fit.window.1,
            mark(decay_ok),
            ons_txt.join(" "),
            ons.exponent,
            mark(onset_ok)
        ),
    ))
}

fn onlp_decay(f: &TfimFamilies) -> Result<Verdict> {
    let fit = fit_decay(&f.onlp)?;
    let ok = (fit.exponent + 0.84).abs() <= 0.12;
    Ok(verdict(
        ok,
        format!("L=2000: exponent {:.3} on [{:.0}, {:.0}] (target -0.84 +- 0.12)", fit.exponent, fit.window.0, fit.window.1),
    ))
}

fn ordering(ctx: &mut Ctx, f: &TfimFamilies) -> Result<Verdict> {
    let l = 2000;
    let model = ModelSpec::tfim(l);
    let tt = 750.0;
    let mut n = Vec::new();
    for fam in [Family::Naqo, Family::Onlp, Family::Eqab, Family::Linear] {
        n.push(ctx.run(&model, fam, tt)?);
    }
    let density_ok = n.windows(2).all(|w| w[0] < w[1]);
    let t_naqo = onset_time(&f.naqo, l)?;
    let t_onlp = onset_time(&f.onlp, l)?;
    let t_eqab = onset_time(&f.eqab, l)?;
    let t_qab = ctx.qab_onset_2000.expect("QAB onsets computed first");
    let t_lin = onset_time(&ctx.tfim_linear_2000, l)?;
    // LAD's onset lies beyond linear's iff LAD is still above 1/L there
    let n_lad = ctx.run(&model, Family::Lad, t_lin)?;
    let lad_ok = n_lad > 1.0 / l as f64;
    let onset_ok = t_naqo < t_onlp && t_onlp < t_eqab && t_eqab <= t_qab && t_qab < t_lin && lad_ok;
    Ok(verdict(
        density_ok && onset_ok,
        format!(
            "L=2000 T=750: n naqo {:.3e} < onlp {:.3e} < eqab {:.3e} < linear {:.3e} [{}]; onsets naqo {t_naqo:.0} < onlp {t_onlp:.0} < eqab {t_eqab:.0} <= qab {t_qab:.0} < linear {t_lin:.0} < lad (n_lad(T={t_lin:.0}) = {n_lad:.2e} > 1/L) [{}]",
            n[0],
            n[1],
            n[2],
            n[3],
            mark(density_ok),
            mark(onset_ok)
        ),
    ))
}

fn lad_qab_equivalence() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for l in [500usize, 1000, 2000] {
        let tt = (l * l) as f64;
        let s = lad_schedule(l, tt)?;
        let k0 = PI / l as f64;
        let mut reference = None;
        for (_, g, gd) in s.samples(20_001) {
            // gap 4 sqrt(d) and |<1|dH/dg|0>| = 2 sin k0 / sqrt(d), up to constants
            let d = (g - k0.cos()).powi(2) + k0.sin().powi(2);
            let q = gd * k0.sin() / (8.0 * d.powf(1.5));
            let r = *reference.get_or_insert(q);
            worst = worst.max(rel(q, r));
        }
    }
    Ok(verdict(worst <= 1e-8, format!("L in {{500, 1000, 2000}}, T = L^2: max relative spread {worst:.2e} (<= 1e-8)")))
}

fn lrk_kz(ctx: &mut Ctx) -> Result<Verdict> {
    let m55 = ModelSpec::lrk(2000, 5.0, 5.0);
    let lin = ctx.curve(&m55, Family::Linear, &grid(1.0, 1e5, 4))?;
    let f55 = fit_decay(&lin)?;
    let ok55 = (f55.exponent + 0.5).abs() <= 0.07;
    let tt = 750.0;
    let nn = ctx.run(&m55, Family::Naqo, tt)?;
    let no = ctx.run(&m55, Family::Onlp, tt)?;
    let nl = ctx.run(&m55, Family::Linear, tt)?;
    let order_ok = nn < no && no < nl;

    let ts = grid(3.0, 3000.0, 6);
    let f2000 = fit_decay(&ctx.curve(&ModelSpec::lrk(2000, 5.0, 1.5), Family::Linear, &ts)?)?;
    let f8000 = fit_decay(&ctx.curve(&ModelSpec::lrk(8000, 5.0, 1.5), Family::Linear, &ts)?)?;
    let ok15 = (f8000.exponent + 1.0).abs() <= 0.15;
    Ok(verdict(
        ok55 && order_ok && ok15,
        format!(
            "(5,5) L=2000 linear {:.3} (-0.5 +- 0.07) [{}]; T=750 naqo {nn:.3e} < onlp {no:.3e} < linear {nl:.3e} [{}]; (5,1.5) linear L=8000 {:.3} on [{:.0}, {:.0}] (-1 +- 0.15) [{}], L=2000 {:.3}",
            f55.exponent,
            mark(ok55),
            mark(order_ok),
            f8000.exponent,
            f8000.window.0,
            f8000.window.1,
            mark(ok15),
            f2000.exponent
        ),
    ))
}

fn lrk_dynamical(ctx: &mut Ctx) -> Result<Verdict> {
    let tt = 1e5;
    let mut exps = Vec::new();
    let mut at = Vec::new();
    for alpha in [1.4, 1.8] {
        let model = ModelSpec::lrk(2000, alpha, 5.0);
        let lin = ctx.curve(&model, Family::Linear, &grid(10.0, 1e5, 4))?;
        exps.push(fit_decay(&lin)?.exponent);
        let nn = ctx.run(&model, Family::Naqo, tt)?;
        let no = ctx.run(&model, Family::Onlp, tt)?;
        let nl = ctx.run(&model, Family::Linear, tt)?;
        at.push((alpha, nn, no, nl));
    }
    let equal_ok = (exps[0] - exps[1]).abs() <= 0.05;
    let target_ok = exps.iter().all(|e| (e + 0.125).abs() <= 0.05);
    let depends_ok = rel(at[0].1, at[1].1) > 0.05;
    let below_ok = at.iter().all(|&(_, nn, no, nl)| nn < no && nn < nl);
    let rows: Vec<String> =
        at.iter().map(|(a, nn, no, nl)| format!("alpha={a}: naqo {nn:.3e} onlp {no:.3e} linear {nl:.3e}")).collect();
    Ok(verdict(
        equal_ok && target_ok && depends_ok && below_ok,
        format!(
            "linear exponents {:.3}, {:.3}: equal within 0.05 [{}], -0.125 +- 0.05 [{}]; T=1e5 {} ; naqo depends on alpha [{}], below linear and onlp [{}]",
            exps[0],
            exps[1],
            mark(equal_ok),
            mark(target_ok),
            rows.join("; "),
            mark(depends_ok),
            mark(below_ok)
        ),
    ))
}

fn crab_benchmark() -> Result<Verdict> {
    let model = ModelSpec::tfim(200);
    let cfg = CrabConfig {
        restarts: 50,
        tol: 1e-6,
        nelder_mead: NelderMeadOptions { evals_per_dim: 40, ..NelderMeadOptions::default() },
        ..CrabConfig::default()
    };
    let mut rows = Vec::new();
    let mut ok = true;
    for tt in [5.0, 10.0, 20.0] {
        let out = crab_optimize(&model, tt, &cfg)?;
        // both costs re-evaluated at the tight tolerance
        let best = crab_cost(&model, tt, &out.best_coeffs, TOL)?;
        let linear = crab_cost(&model, tt, &[], TOL)?;
        ok &= best <= linear;
        rows.push(format!("T={tt}: best {best:.4e} mean {:.4e} linear {linear:.4e}", out.mean_cost));
    }
    Ok(verdict(ok, format!("L=200, 50 restarts: {} (best <= linear at every T)", rows.join("; "))))
}

fn disordered(ctx: &mut Ctx) -> Result<Verdict> {
    let seeds: Vec<u64> = (1..=20).collect();
    let mut means = Vec::new();
    let mut g_star_12 = Vec::new();
    for l in [8usize, 10, 12, 14] {
        let mut sum = 0.0;
        for &seed in &seeds {
            let chain = DisorderedChain::new(&ModelSpec::disordered(l, 0.1, 0.4, seed))?;
            let scan = gap_scan(&chain, (0.05, 1.95), 39)?;
            sum += scan.delta_min;
            if l == 12 {
                g_star_12.push(scan.g_star);
            }
        }
        means.push((l as f64, sum / seeds.len() as f64));
    }
    let fit = fit_scaling(&means)?;
    let gap_ok = (fit.exponent + 0.65).abs() <= 0.15;

    let mut wins = Vec::new();
    for tt in [10.0, 30.0] {
        let mut won = 0;
        for (&seed, &g_star) in seeds.iter().zip(&g_star_12) {
            let spec = ModelSpec::disordered(12, 0.1, 0.4, seed);
            let chain = DisorderedChain::new(&spec)?;
            let opts = ScheduleOptions { g_star: Some(g_star), ..ScheduleOptions::default() };
            let mut e = [0.0; 2];
            for (i, fam) in [Family::Linear, Family::NaqoAnsatz].into_iter().enumerate() {
                let s = build_schedule(&spec, fam, tt, &opts)?;
                let r = evolve_manybody_with(&chain, &s, &PropagatorOptions::default())?;
                ctx.drift = ctx.drift.max(r.norm_drift);
                e[i] = r.e;
            }
            if e[1] < e[0] {
                won += 1;
            }
        }
        wins.push((tt, won));
    }
    let win_ok = wins.iter().all(|&(_, w)| w * 5 >= seeds.len() * 4);
    let gaps: Vec<String> = means.iter().map(|(l, d)| format!("{l}:{d:.4}")).collect();
    let win_txt: Vec<String> = wins.iter().map(|(t, w)| format!("T={t} {w}/{}", seeds.len())).collect();
    Ok(verdict(
        gap_ok && win_ok,
        format!(
            "mean minimal gap {} -> L^{:.3} (-0.65 +- 0.15) [{}]; L=12 ansatz below linear: {} (>= 80%) [{}]",
            gaps.join(" "),
            fit.exponent,
            mark(gap_ok),
            win_txt.join(", "),
            mark(win_ok)
        ),
    ))
}

fn specfun_worst() -> Result<f64> {
    let mut worst = 0.0f64;
    let mut see = |a: f64, b: f64| worst = worst.max(rel(a, b));
    for x in [0.3, 1.7, 4.2, 9.5, 17.25] {
        see(gamma(x + 1.0)?, x * gamma(x)?);
    }
    see(gamma(0.5)?, PI.sqrt());
    for x in [0.3, 0.77] {
        see(gamma(x)? * gamma(1.0 - x)?, PI / (PI * x).sin());
    }
    see(zeta(2.0)?, PI * PI / 6.0);
    see(zeta(4.0)?, PI.powi(4) / 90.0);
    see(zeta(0.0)?, -0.5);
    see(zeta(-1.0)?, -1.0 / 12.0);
    for x in [-0.3, 0.1, 1.0, 10.0, 1e3] {
        let w = lambert_w0(x)?;
        see(w * w.exp(), x);
    }
    for m in [0usize, 1, 5, 12] {
        for th in [0.3f64, 1.1, 2.9] {
            let exact = (m as f64 * th).cos();
            worst = worst.max((chebyshev_t(m, th.cos()) - exact).abs());
        }
    }
    Ok(worst)
}

/// Largest relative deviation of a first integral q(g, g') over the
/// schedule's nodes with t >= `from`, measured against the median value.
fn first_integral_spread(s: &Schedule, from: f64, q: impl Fn(f64, f64) -> (f64, f64)) -> f64 {
    let vals: Vec<(f64, f64)> =
        s.nodes().into_iter().filter(|&t| t >= from).map(|t| { let (g, gd) = s.eval(t); q(g, gd) }).collect();
    let mut sorted: Vec<f64> = vals.iter().map(|v| v.0).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    vals.iter().map(|&(v, scale)| (v - median).abs() / scale.abs()).fold(0.0, f64::max)
}

fn ode_residuals() -> Result<f64> {
    let (l, tt) = (2000usize, 750.0);
    let k0 = PI / l as f64;
    // eQAB: g' / w^(5/4) is constant, w = (g^2 - 1)^2 + 8 k0
    let s = eqab_schedule(l, tt, TOL)?;
    let eqab = first_integral_spread(&s, -tt, |g, gd| {
        let c = -gd / ((g * g - 1.0).powi(2) + 8.0 * k0).powf(1.25);
        (c, c)
    });
    // TFIM NAQO: ln u / 4pi - u / g' is constant, u = 1 - g^2
    let s = naqo_tfim_schedule(l, tt, TOL)?;
    let naqo = first_integral_spread(&s, 0.0, |g, gd| {
        let u = 1.0 - g * g;
        (u.ln() / (4.0 * PI) - u / gd, u / gd)
    });
    // Kitaev NAQO: A ln x - x^c / g' is constant, x = 2 - g
    let coef = naqo_lrk_coefficients(5.0, 5.0)?;
    let s = naqo_lrk_schedule(5.0, 5.0, l, tt, TOL, 1.0)?;
    let lrk = first_integral_spread(&s, 0.0, |g, gd| {
        let x = 2.0 - g;
        let inv = x.powf(coef.c) / gd;
        (coef.big_a * x.ln() - inv, inv)
    });
    Ok(eqab.max(naqo).max(lrk))
}

fn reruns_identical() -> Result<bool> {
    let run_free = || -> Result<Vec<u8>> {
        let mut out = CsvWriter { inner: Vec::new() };
        for family in [Family::Naqo, Family::Onlp, Family::Qab] {
            let cfg = SweepConfig {
                model: ModelKind::Tfim,
                family,
                l_list: vec![100, 300],
                t_list: vec![5.0, 50.0, 500.0],
                tol: TOL,
                schedule: ScheduleOptions::default(),
                timing: false,
            };
            sweep(&cfg, 0, &mut out)?;
        }
        Ok(out.inner)
    };
    let run_chain = || -> Result<Vec<u8>> {
        let mut out = CsvWriter { inner: Vec::new() };
        let cfg = DisorderedSweepConfig { l_list: vec![6], seeds: vec![1, 2], t_list: vec![3.0], ..Default::default() };
        disordered_sweep(&cfg, 0, &mut out)?;
        Ok(out.inner)
    };
    Ok(run_free()? == run_free()? && run_chain()? == run_chain()?)
}

fn hygiene(ctx: &Ctx) -> Result<Verdict> {
    let drift_ok = ctx.drift <= 1e-8;
    let sf = specfun_worst()?;
    let sf_ok = sf <= 1e-10;
    let ode = ode_residuals()?;
    let ode_ok = ode <= 1e-6;
    let det_ok = reruns_identical()?;
    Ok(verdict(
        drift_ok && sf_ok && ode_ok && det_ok,
        format!(
            "norm drift over all runs {:.1e} (<= 1e-8) [{}]; special-function identities {sf:.1e} (<= 1e-10) [{}]; schedule ODE first integrals {ode:.1e} (<= 1e-6) [{}]; byte-identical reruns [{}]",
            ctx.drift,
            mark(drift_ok),
            mark(sf_ok),
            mark(ode_ok),
            mark(det_ok)
        ),
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut ctx = Ctx::default();
    let mut passed = 0;
    let mut total = 0;
    let mut report = |id: usize, name: &str, t0: Instant, v: Result<Verdict>| {
        total += 1;
        let (pass, detail) = match v {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if pass {
            passed += 1;
        }
        println!("{} {id:>2} {name}: {detail} ({:.0}s)", if pass { "PASS" } else { "FAIL" }, t0.elapsed().as_secs_f64());
    };

    let t = Instant::now();
    report(1, "TFIM linear KZ law", t, linear_kz(&mut ctx));
    let t = Instant::now();
    report(2, "sudden quench", t, sudden_quench(&mut ctx));
    let t = Instant::now();
    report(3, "LAD collapse and decay", t, lad_scaling(&mut ctx));
    let t = Instant::now();
    report(4, "QAB collapse, decay and onset", t, qab_scaling(&mut ctx));

    let t = Instant::now();
    let fams = tfim_families(&mut ctx);
    if let Ok(f) = &fams {
        ctx.naqo_onset_2000 = onset_time(&f.naqo, 2000).ok();
    }
    match &fams {
        Ok(f) => {
            report(5, "eQAB decay", t, eqab_decay(f));
            let t = Instant::now();
            report(6, "NAQO (TFIM) decay and onset", t, naqo_tfim(&mut ctx));
            let t = Instant::now();
            report(7, "ONLP decay", t, onlp_decay(f));
            let t = Instant::now();
            report(8, "family ordering", t, ordering(&mut ctx, f));
        }
        Err(e) => {
            for (id, name) in [(5, "eQAB decay"), (6, "NAQO (TFIM)"), (7, "ONLP decay"), (8, "family ordering")] {
                report(id, name, t, Err(qanneal::Error::Invalid(format!("L=2000 family curves: {e}"))));
            }
        }
    }
    let t = Instant::now();
    report(9, "LAD/QAB equivalence", t, lad_qab_equivalence());
    let t = Instant::now();
    report(10, "Kitaev chain KZ regime", t, lrk_kz(&mut ctx));
    let t = Instant::now();
    report(11, "Kitaev chain dynamical regime", t, lrk_dynamical(&mut ctx));
    let t = Instant::now();
    report(12, "CRAB desk benchmark", t, crab_benchmark());
    let t = Instant::now();
    report(13, "disordered chain", t, disordered(&mut ctx));
    let t = Instant::now();
    report(14, "numerical hygiene", t, hygiene(&ctx));

    println!("acceptance: {passed}/{total} criteria pass ({:.0}s)", start.elapsed().as_secs_f64());
    let strict = std::env::var("QANNEAL_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed < total {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
