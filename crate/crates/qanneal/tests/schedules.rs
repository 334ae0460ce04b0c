mod common;

use common::{cuts_towards, rel, simpson, simpson_split};
use proptest::prelude::*;
use qanneal::models::ModelSpec;
use qanneal::schedules::*;
use qanneal::specfun::zeta;
use std::f64::consts::{E, PI};

fn boundary_ok(s: &Schedule, start: f64, end: f64) {
    let h = s.duration / 2.0;
    assert!((s.g(-h) - start).abs() <= 1e-9, "{} start {}", s.family, s.g(-h));
    assert!((s.g(h) - end).abs() <= 1e-9, "{} end {}", s.family, s.g(h));
}

fn assert_non_increasing(s: &Schedule, n: usize) {
    let pts = s.samples(n);
    for w in pts.windows(2) {
        assert!(w[1].1 <= w[0].1 + 1e-12, "{} increases at t={}", s.family, w[1].0);
    }
}

#[test]
fn linear_examples() {
    let tfim = ModelSpec::tfim(100);
    let s = linear_schedule(&tfim, 10.0);
    assert!((s.g(0.0) - 1.0).abs() < 1e-15);
    assert!((s.g(5.0)).abs() < 1e-15);
    assert!((s.gdot(1.0) + 0.2).abs() < 1e-15);
    let lrk = ModelSpec::lrk(100, 5.0, 5.0);
    let s = linear_schedule(&lrk, 10.0);
    assert!((s.g(0.0) - 2.0).abs() < 1e-15);
    boundary_ok(&s, 4.0, 0.0);
}

#[test]
fn onlp_exponent_values() {
    let tt = E * E / 14.6;
    let r = onlp_exponent(tt, 14.6, 1.0, OnlpFormula::Corrected).unwrap();
    assert!((r - (E * E / 2.0).ln()).abs() < 1e-12);
    assert!((r - 1.306_852_819_440_054_7).abs() < 1e-12);
    assert!(onlp_exponent(0.1, 14.6, 1.0, OnlpFormula::Corrected).is_err());
    // the printed reading is negative and rejected
    assert!(onlp_exponent(100.0, 14.6, 1.0, OnlpFormula::Verbatim).is_err());
    // grows with T
    let r1 = onlp_exponent(100.0, 14.6, 1.0, OnlpFormula::Corrected).unwrap();
    let r2 = onlp_exponent(1000.0, 14.6, 1.0, OnlpFormula::Corrected).unwrap();
    assert!(r2 > r1 && r1 > 1.0);
}

#[test]
fn onlp_shape() {
    for model in [ModelSpec::tfim(64), ModelSpec::lrk(64, 2.5, 1.5)] {
        let s = onlp_schedule(&model, 300.0, 1.0, 14.6, OnlpFormula::Corrected).unwrap();
        assert_eq!(s.g(0.0), model.g_critical());
        boundary_ok(&s, model.g_start, model.g_end);
        assert_non_increasing(&s, 2001);
    }
    // r -> 1 at TC -> e reproduces the linear ramp
    let model = ModelSpec::tfim(64);
    let tt = E * (1.0 + 1e-8) / 14.6;
    let s = onlp_schedule(&model, tt, 1.0, 14.6, OnlpFormula::Corrected).unwrap();
    let lin = linear_schedule(&model, tt);
    for (t, g, _) in s.samples(101) {
        assert!((g - lin.g(t)).abs() < 1e-12);
    }
}

#[test]
fn lad_constants() {
    let s = lad_schedule(1_000_000, 777.0).unwrap();
    let ScheduleParams::Lad { eps_prime, t0, k0 } = s.params else { panic!() };
    assert!((eps_prime * 777.0 - 2.0).abs() < 1e-10);
    assert!((s.g(t0) - k0.cos()).abs() < 1e-12);
    for l in [4usize, 10, 1000, 100_000] {
        let s = lad_schedule(l, 50.0).unwrap();
        assert!((s.g(-25.0) - 2.0).abs() < 1e-12, "L={l}");
        assert!(s.g(25.0).abs() < 1e-12, "L={l}");
        assert_non_increasing(&s, 4001);
    }
}

#[test]
fn lad_speed_tracks_gap_over_matrix_element() {
    for (l, tt) in [(16usize, 10.0), (1000, 1e4), (100_000, 3e5)] {
        let s = lad_schedule(l, tt).unwrap();
        let k0 = PI / l as f64;
        let mut reference = None;
        for (_, g, gd) in s.samples(2001) {
            // 1 + g^2 - 2 g cos k0 written without cancellation
            let d = (g - k0.cos()).powi(2) + k0.sin().powi(2);
            let inv = gd * k0.sin() / (8.0 * d.powf(1.5));
            let r = *reference.get_or_insert(inv);
            assert!(rel(inv, r) < 1e-8, "L={l}: {inv} vs {r}");
        }
    }
}

#[test]
fn lad_flattens_near_critical_point() {
    let s = lad_schedule(1000, 1e4).unwrap();
    let pts = s.samples(100_001);
    let near = pts.iter().filter(|p| (p.1 - 1.0).abs() < 0.1).count();
    assert!(near as f64 >= 0.9 * pts.len() as f64, "{near}");
}

fn qab_accel(s: &Schedule, t: f64) -> f64 {
    let ScheduleParams::Qab { eps, t0, k0 } = s.params else { panic!() };
    let th = eps * (t - t0);
    -k0.sin() * eps * eps * 2.0 * th.tan() / th.cos().powi(2)
}

#[test]
fn qab_constants_and_equation() {
    let s = qab_schedule(1_000_000, 100.0).unwrap();
    let ScheduleParams::Qab { eps, t0, k0 } = s.params else { panic!() };
    assert!((eps * 100.0 - PI).abs() < 3.0 * k0);
    assert!((s.g(t0) - k0.cos()).abs() < 1e-12);
    for l in [8usize, 200, 5000] {
        let tt = 40.0;
        let s = qab_schedule(l, tt).unwrap();
        boundary_ok(&s, 2.0, 0.0);
        assert_non_increasing(&s, 2001);
        let c = (PI / l as f64).cos();
        for (t, g, gd) in s.samples(401) {
            // velocity from the curve itself
            let h = 1e-3 * (gd / qab_accel(&s, t)).abs().min(tt);
            if (t - 2.0 * h) < -tt / 2.0 || t + 2.0 * h > tt / 2.0 {
                continue;
            }
            let fd = (8.0 * (s.g(t + h) - s.g(t - h)) - (s.g(t + 2.0 * h) - s.g(t - 2.0 * h))) / (12.0 * h);
            assert!(rel(fd, gd) < 1e-6, "L={l} t={t}: {fd} vs {gd}");
            let gdd = qab_accel(&s, t);
            let sk = (PI / l as f64).sin();
            let lhs = gdd * ((g - c).powi(2) + sk * sk);
            let rhs = 2.0 * gd * gd * (g - c);
            // g - c is only known to rounding near t0, so scale by sin k0
            let scale = lhs.abs() + 2.0 * gd * gd * ((g - c).abs() + sk);
            assert!((lhs - rhs).abs() <= 1e-8 * scale, "L={l} t={t}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn crab_examples() {
    let coeffs = [0.4, -0.25, 0.1];
    let tt = 30.0;
    assert!(crab_g(&coeffs, 2.0, tt, tt / 2.0).abs() < 1e-15);
    assert!((crab_g(&coeffs, 2.0, tt, -tt / 2.0) - 2.0).abs() < 1e-14);
    for i in 0..=20 {
        let t = -tt / 2.0 + tt * i as f64 / 20.0;
        assert!((crab_g(&[], 2.0, tt, t) - 2.0 * (0.5 - t / tt)).abs() < 1e-15);
    }
    let model = ModelSpec::tfim(50);
    let opts = ScheduleOptions { crab_coeffs: coeffs.to_vec(), ..Default::default() };
    let s = build_schedule(&model, Family::Crab, tt, &opts).unwrap();
    boundary_ok(&s, 2.0, 0.0);
}

/// Oracle for eQAB: the first integral g' = -C w^(5/4), w = (g^2-1)^2 + 8 k0,
/// with C fixed by the duration.
#[test]
fn eqab_first_integral() {
    for (l, tt) in [(100usize, 20.0), (1000, 200.0), (1000, 5.0)] {
        let k0 = PI / l as f64;
        let w = |g: f64| (g * g - 1.0).powi(2) + 8.0 * k0;
        let f = |g: f64| w(g).powf(-1.25);
        let cuts = [0.0, 0.5, 0.9, 0.99, 1.0, 1.01, 1.1, 1.5, 2.0];
        let c = simpson_split(&f, &cuts, 1e-14) / tt;
        let s = eqab_schedule(l, tt, 1e-11).unwrap();
        boundary_ok(&s, 2.0, 0.0);
        assert_non_increasing(&s, 2001);
        let ScheduleParams::Eqab { .. } = s.params else { panic!() };
        let nodes = s.nodes();
        assert!(nodes.len() > 10);
        for &t in &nodes {
            let (g, gd) = s.eval(t);
            assert!(rel(-gd / w(g).powf(1.25), c) < 1e-6, "L={l} T={tt} t={t}");
        }
        // off-node values through the inverse map t(g)
        for &g in &[1.9f64, 1.5, 1.1, 1.02, 1.0, 0.98, 0.7, 0.2] {
            let mut pts = vec![g];
            pts.extend(cuts.iter().copied().filter(|&x| x > g));
            let t = -tt / 2.0 + simpson_split(&f, &pts, 1e-14) / c;
            assert!((s.g(t) - g).abs() < 1e-6, "L={l} T={tt} g={g} got {}", s.g(t));
        }
    }
}

/// TFIM NAQO oracle: 1/g' = ((1/4pi) ln u - K')/u with u = 1 - g^2 and K'
/// linear in the half duration.
fn naqo_tfim_oracle(l: usize, tt: f64) -> (f64, impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let g0 = (PI / l as f64).cos();
    let i1_f = |g: f64| {
        let u = 1.0 - g * g;
        -u.ln() / (4.0 * PI * u)
    };
    let cuts = cuts_towards(0.0, g0, 60);
    let i1 = simpson_split(&i1_f, &cuts, 1e-13);
    let i2 = g0.atanh();
    let kp = (tt / 2.0 - i1) / i2;
    let inv_speed = move |g: f64| {
        let u = 1.0 - g * g;
        (u.ln() / (4.0 * PI) - kp) / u
    };
    let time_of = move |g: f64| {
        let f = |x: f64| -inv_speed(x);
        let cuts = cuts_towards(g, g0, 60);
        simpson_split(&f, &cuts, 1e-13)
    };
    (kp, inv_speed, time_of)
}

#[test]
fn naqo_tfim_matches_first_integral() {
    for (l, tt) in [(100usize, 100.0), (1000, 500.0), (1000, 1e4), (10_000, 2e3)] {
        let s = naqo_tfim_schedule(l, tt, 1e-11).unwrap();
        boundary_ok(&s, 2.0, 0.0);
        assert_non_increasing(&s, 4001);
        let g0 = (PI / l as f64).cos();
        assert!((s.g(0.0) - g0).abs() < 1e-14);
        let (_, inv_speed, time_of) = naqo_tfim_oracle(l, tt);
        for &t in s.nodes().iter().filter(|&&t| t >= 0.0) {
            let (g, gd) = s.eval(t);
            assert!(rel(1.0 / gd, inv_speed(g)) < 1e-6, "L={l} T={tt} t={t}");
        }
        for &g in &[0.999, 0.99, 0.9, 0.5, 0.1] {
            let t = time_of(g);
            assert!((s.g(t) - g).abs() < 1e-6, "L={l} T={tt} g={g}: {}", s.g(t));
            // mirror
            assert!((s.g(-t) - (2.0 - g)).abs() < 1e-6);
        }
    }
}

#[test]
fn naqo_tfim_initial_slope_scales_with_l_squared() {
    let tt = 1e4;
    let a = naqo_tfim_schedule(1000, tt, 1e-10).unwrap().gdot(0.0) * 1e6;
    let b = naqo_tfim_schedule(10_000, tt, 1e-10).unwrap().gdot(0.0) * 1e8;
    assert!(a < 0.0 && b < 0.0);
    let ratio = a / b;
    assert!(ratio > 1.0 / 3.0 && ratio < 3.0, "{a} {b}");
}

#[test]
fn naqo_tfim_short_time_lambert_form() {
    let l = 1000usize;
    let tt = 20.0;
    let s = naqo_tfim_schedule(l, tt, 1e-10).unwrap();
    let lf = (l as f64).powi(2);
    for i in 0..=20 {
        let t = tt / 100.0 * i as f64 / 20.0;
        let w = qanneal::specfun::lambert_w0(-PI * PI * (8.0 * PI * t).exp() / (2.0 * lf)).unwrap();
        assert!((s.g(t) - (w + 1.0)).abs() < 1e-3, "t={t}");
    }
}

#[test]
fn naqo_unreachable_duration_reports_range() {
    let err = naqo_tfim_schedule(1000, 1e-3, 1e-10).unwrap_err();
    assert!(err.to_string().contains("attainable range"), "{err}");
}

#[test]
fn lrk_coefficients() {
    let c = naqo_lrk_coefficients(5.0, 5.0).unwrap();
    let expect = zeta(3.0).unwrap() * zeta(5.0).unwrap() / (4.0 * PI * zeta(4.0).unwrap().powi(2));
    assert!(rel(c.big_a, expect) < 1e-12);
    assert!((c.big_a - 0.08468).abs() < 5e-5);
    assert_eq!((c.a, c.c), (0.5, 1.0));
    let inf = naqo_lrk_coefficients(60.0, 60.0).unwrap();
    assert!(rel(inf.big_a, 1.0 / (4.0 * PI)) < 1e-12);
    let below = naqo_lrk_coefficients(5.0, 1.5 - 1e-6).unwrap();
    let above = naqo_lrk_coefficients(5.0, 1.5 + 1e-6).unwrap();
    assert!(below.big_a < 0.0 && above.big_a > 0.0);
    assert!((naqo_lrk_coefficients(5.0, 1.5).unwrap().big_a).abs() < 1e-14);
    let lr = naqo_lrk_coefficients(2.5, 1.5).unwrap();
    assert!((lr.a - 0.5 / 1.5).abs() < 1e-15 && (lr.c - 2.0 * 0.5 / 1.5).abs() < 1e-15);
    let lr = naqo_lrk_coefficients(2.5, 5.0).unwrap();
    assert!((lr.c - 2.0 / 1.5).abs() < 1e-15);
    assert!(naqo_lrk_coefficients(3.0, 5.0).is_err());
    assert!(naqo_lrk_coefficients(5.0, 2.0).is_err());
}

/// LRK NAQO oracle: 1/g' = (A ln x + K)/x^c with x = 2 - g, from x0 to 2.
fn lrk_time_oracle(a: f64, c: f64, x0: f64, tt: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let ln_part = |x: f64| -a * x.ln() / x.powf(c);
    let one_part = |x: f64| x.powf(-c);
    let cuts = cuts_towards(2.0, x0, 60);
    let cuts: Vec<f64> = cuts.into_iter().rev().collect();
    let i1 = simpson_split(&ln_part, &cuts, 1e-13);
    let i2 = simpson_split(&one_part, &cuts, 1e-13);
    let kp = (tt / 2.0 - i1) / i2;
    let inv_speed = move |g: f64| {
        let x = 2.0 - g;
        (a * x.ln() - kp) / x.powf(c)
    };
    let time_of = move |g: f64| {
        let x1 = 2.0 - g;
        let f = |x: f64| -(a * x.ln() - kp) / x.powf(c);
        let cuts: Vec<f64> = cuts_towards(x1, x0, 60).into_iter().rev().collect();
        simpson_split(&f, &cuts, 1e-13)
    };
    (inv_speed, time_of)
}

#[test]
fn naqo_lrk_matches_first_integral() {
    for &(alpha, beta, l, tt) in &[(5.0, 5.0, 500usize, 300.0), (2.5, 1.5, 500, 300.0), (1.8, 5.0, 2000, 5e4), (5.0, 1.7, 300, 100.0)] {
        let s = naqo_lrk_schedule(alpha, beta, l, tt, 1e-11, 1.0).unwrap();
        boundary_ok(&s, 4.0, 0.0);
        assert_non_increasing(&s, 4001);
        let coef = naqo_lrk_coefficients(alpha, beta).unwrap();
        let x0 = 2.0 - s.g(0.0);
        assert!(x0 > 0.0);
        let (inv_speed, time_of) = lrk_time_oracle(coef.big_a, coef.c, x0, tt);
        for &t in s.nodes().iter().filter(|&&t| t >= 0.0) {
            let (g, gd) = s.eval(t);
            assert!(rel(1.0 / gd, inv_speed(g)) < 1e-6, "({alpha},{beta}) t={t}");
        }
        for g in [2.0 - 1.5 * x0, 1.9, 1.0, 0.3] {
            let t = time_of(g);
            assert!((s.g(t) - g).abs() < 1e-6, "({alpha},{beta}) g={g}: {}", s.g(t));
        }
    }
}

#[test]
fn naqo_lrk_initial_offset_vanishes_with_size() {
    for &(alpha, beta) in &[(5.0, 5.0), (2.5, 1.5), (1.8, 5.0), (5.0, 1.7)] {
        let mut prev = f64::INFINITY;
        for l in [100usize, 1000, 10_000] {
            let s = naqo_lrk_schedule(alpha, beta, l, 1e8, 1e-10, 1.0).unwrap();
            let x0 = 2.0 - s.g(0.0);
            assert!(x0 > 0.0 && x0 < prev);
            prev = x0;
        }
    }
}

#[test]
fn naqo_lrk_large_exponents_approach_limit() {
    let (l, tt) = (400usize, 200.0);
    let s = naqo_lrk_schedule(30.0, 30.0, l, tt, 1e-11, 1.0).unwrap();
    let k0 = PI / l as f64;
    let (_, time_of) = lrk_time_oracle(1.0 / (4.0 * PI), 1.0, k0 * k0, tt);
    for &g in &[1.99, 1.5, 1.0, 0.5, 0.05] {
        let t = time_of(g);
        assert!((s.g(t) - g).abs() < 1e-3, "g={g}: {}", s.g(t));
        assert!((s.g(-t) - (4.0 - g)).abs() < 1e-3);
    }
}

#[test]
fn naqo_ansatz_rescaling() {
    let c = naqo_ansatz_coefficients(1.65).unwrap();
    assert!(c.big_a.is_finite() && c.big_a > 0.0);
    assert!((c.c - 0.65).abs() < 1e-15);
    let (l, tt) = (12usize, 60.0);
    let s = naqo_ansatz_schedule(1.65, 2.0, l, tt, 4.0, 1e-11, 1.0).unwrap();
    boundary_ok(&s, 4.0, 0.0);
    let k0 = PI / l as f64;
    let (_, time_of) = lrk_time_oracle(c.big_a, c.c, k0 * k0, tt);
    for &g in &[1.9, 1.0, 0.2] {
        assert!((s.g(time_of(g)) - g).abs() < 1e-6);
    }
    let m = ModelSpec::disordered(12, 0.3, 0.2, 7);
    let opts = ScheduleOptions { g_star: Some(0.8), ..Default::default() };
    let s = build_schedule(&m, Family::NaqoAnsatz, tt, &opts).unwrap();
    boundary_ok(&s, m.g_start, m.g_end);
    assert_non_increasing(&s, 4001);
    assert!((s.g(0.0) - 0.8 * (1.0 - k0 * k0 / 2.0)).abs() < 1e-12);
    assert!(naqo_ansatz_schedule(2.5, 1.0, l, tt, 2.0, 1e-10, 1.0).is_err());
}

#[test]
fn family_restrictions() {
    let lrk = ModelSpec::lrk(100, 5.0, 5.0);
    let opts = ScheduleOptions::default();
    for f in [Family::Lad, Family::Qab, Family::Eqab] {
        assert!(build_schedule(&lrk, f, 100.0, &opts).is_err());
    }
    assert!(build_schedule(&ModelSpec::tfim(100), Family::Naqo, -1.0, &opts).is_err());
    assert_eq!("naqo-lrk".parse::<Family>().unwrap(), Family::NaqoLrk);
    assert_eq!("NAQO_Ansatz".parse::<Family>().unwrap(), Family::NaqoAnsatz);
    assert!("magic".parse::<Family>().is_err());
}

#[test]
fn quadrature_helper_sanity() {
    assert!((simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-14) - (E - 1.0)).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_forms_monotone_with_exact_ends(l in 4usize..5000, tt in 1.0f64..1e4) {
        let m = ModelSpec::tfim(l - l % 2);
        for s in [lad_schedule(m.l, tt).unwrap(), qab_schedule(m.l, tt).unwrap(), linear_schedule(&m, tt)] {
            let pts = s.samples(513);
            prop_assert!((pts[0].1 - 2.0).abs() <= 1e-9);
            prop_assert!(pts[512].1.abs() <= 1e-9);
            for w in pts.windows(2) {
                prop_assert!(w[1].1 <= w[0].1 + 1e-12);
            }
        }
    }

    #[test]
    fn crab_endpoints_any_coefficients(c in proptest::collection::vec(-1.0f64..1.0, 0..6), g0 in 0.5f64..5.0, tt in 1.0f64..100.0) {
        prop_assert!(crab_g(&c, g0, tt, tt / 2.0).abs() < 1e-12);
        prop_assert!((crab_g(&c, g0, tt, -tt / 2.0) - g0).abs() < 1e-12 * (1.0 + c.iter().map(|x| x.abs()).sum::<f64>()));
    }
}
