//! Real special functions: Riemann zeta, gamma, Lambert W (principal branch)
//! and Chebyshev polynomials of the first kind.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

// B_{2j} / (2j)! for j = 1..10
const BERNOULLI_OVER_FACT: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
];

const EM_CUTOFF: usize = 16;

/// Riemann zeta function on the real line, s != 1.
pub fn zeta(s: f64) -> Result<f64> {
    if s == 1.0 || s.is_nan() {
        return Err(Error::Domain {
            func: "zeta",
            arg: s,
            why: "pole at s = 1",
        });
    }
    if s == f64::INFINITY {
        return Ok(1.0);
    }
    if s >= 0.0 {
        return Ok(zeta_em(s));
    }
    // functional equation, 1 - s > 1
    let trivial = s / 2.0;
    if trivial == trivial.floor() {
        return Ok(0.0);
    }
    let rhs = zeta_em(1.0 - s);
    Ok(2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * gamma(1.0 - s)? * rhs)
}

// Euler-Maclaurin summation; valid for any real s != 1 with s > -2*10+1,
// used here for s >= 0.
fn zeta_em(s: f64) -> f64 {
    if s > 60.0 {
        return 1.0 + 2f64.powf(-s) + 3f64.powf(-s);
    }
    let n = EM_CUTOFF as f64;
    let mut head = 0.0;
    for k in (1..EM_CUTOFF).rev() {
        head += (k as f64).powf(-s);
    }
    let n_pow = n.powf(-s);
    let mut tail = n * n_pow / (s - 1.0) + 0.5 * n_pow;
    // rising factorial s(s+1)...(s+2j-2) times N^{-s-2j+1}
    let mut rising = s;
    let mut npow = n_pow / n;
    for (j, c) in BERNOULLI_OVER_FACT.iter().enumerate() {
        tail += c * rising * npow;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        npow /= n * n;
    }
    head + tail
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real x away from the non-positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain {
            func: "gamma",
            arg: x,
            why: "pole at non-positive integer",
        });
    }
    if x.is_nan() {
        return Err(Error::Domain {
            func: "gamma",
            arg: x,
            why: "not a number",
        });
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma(1.0 - x)?));
    }
    if x == x.floor() && x <= 30.0 {
        let mut f = 1.0;
        for i in 2..(x as u64) {
            f *= i as f64;
        }
        return Ok(f);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power to delay overflow
    let half = t.powf((z + 0.5) / 2.0);
    Ok((2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc)
}

/// Principal branch W0 of the Lambert function, x >= -1/e.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch - 1e-15 {
        return Err(Error::Domain {
            func: "lambert_w0",
            arg: x,
            why: "x < -1/e",
        });
    }
    if x <= branch {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < -0.25 {
        let p = (2.0 * (E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        let l = (1.0 + x).ln();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// Chebyshev polynomial T_m(x) via the three-term recurrence.
pub fn chebyshev_t(m: usize, x: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..m {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}
