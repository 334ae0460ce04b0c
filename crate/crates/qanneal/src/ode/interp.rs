use super::rk::hermite_basis;
use crate::error::{Error, Result};

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson limited slopes:
/// monotone data give a monotone curve. Outside the node range the boundary
/// values are returned (and a zero derivative).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    t: Vec<f64>,
    g: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// Slopes estimated from the data (PCHIP rule).
    pub fn new(t: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        check_nodes(&t, &g)?;
        let n = t.len();
        let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (g[i + 1] - g[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { t, g, d })
    }

    /// Caller-supplied slopes, limited where they would break monotonicity.
    pub fn with_slopes(t: Vec<f64>, g: Vec<f64>, mut d: Vec<f64>) -> Result<Self> {
        check_nodes(&t, &g)?;
        if d.len() != t.len() || d.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("slopes must be finite, one per node".into()));
        }
        for i in 0..t.len() - 1 {
            let delta = (g[i + 1] - g[i]) / (t[i + 1] - t[i]);
            if delta == 0.0 {
                d[i] = 0.0;
                d[i + 1] = 0.0;
                continue;
            }
            if d[i] * delta < 0.0 {
                d[i] = 0.0;
            }
            if d[i + 1] * delta < 0.0 {
                d[i + 1] = 0.0;
            }
            let a = d[i] / delta;
            let b = d[i + 1] / delta;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                d[i] = tau * a * delta;
                d[i + 1] = tau * b * delta;
            }
        }
        Ok(Self { t, g, d })
    }

    pub fn nodes(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.t, &self.g, &self.d)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let n = self.t.len();
        if x < self.t[0] || x > self.t[n - 1] {
            return None;
        }
        let pos = self.t.partition_point(|&v| v <= x);
        Some(pos.clamp(1, n - 1) - 1)
    }

    pub fn value(&self, x: f64) -> f64 {
        let n = self.t.len();
        match self.locate(x) {
            None if x < self.t[0] => self.g[0],
            None => self.g[n - 1],
            Some(i) => {
                if x == self.t[i] {
                    return self.g[i];
                }
                if x == self.t[i + 1] {
                    return self.g[i + 1];
                }
                let h = self.t[i + 1] - self.t[i];
                let s = (x - self.t[i]) / h;
                let (h00, h10, h01, h11) = hermite_basis(s);
                h00 * self.g[i] + h10 * h * self.d[i] + h01 * self.g[i + 1] + h11 * h * self.d[i + 1]
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => 0.0,
            Some(i) => {
                let h = self.t[i + 1] - self.t[i];
                let s = (x - self.t[i]) / h;
                let s2 = s * s;
                let dg = self.g[i + 1] - self.g[i];
                (6.0 * (s - s2) * dg) / h
                    + (3.0 * s2 - 4.0 * s + 1.0) * self.d[i]
                    + (3.0 * s2 - 2.0 * s) * self.d[i + 1]
            }
        }
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

fn check_nodes(t: &[f64], g: &[f64]) -> Result<()> {
    if t.len() < 2 || t.len() != g.len() {
        return Err(Error::Invalid("need at least two (t, g) samples of equal length".into()));
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("sample times must be strictly increasing".into()));
    }
    if g.iter().chain(t).any(|x| !x.is_finite()) {
        return Err(Error::Invalid("samples must be finite".into()));
    }
    Ok(())
}
