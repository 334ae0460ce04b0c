use crate::error::{Error, Result};

// Dormand-Prince 5(4)
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step magnitude; picked from the tolerances when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            h_init: None,
            max_steps: 1_000_000,
        }
    }
}

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Accepted nodes of an integration together with the vector field at each
/// node. Between nodes the solution is evaluated with the fourth-order
/// continuous extension of the pair when `dense` is filled (one entry per
/// step), otherwise with cubic Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct IvpSolution {
    pub t_nodes: Vec<f64>,
    pub y_nodes: Vec<Vec<f64>>,
    pub dy_nodes: Vec<Vec<f64>>,
    pub dense: Vec<Vec<f64>>,
    pub accepted: usize,
    pub rejected: usize,
    pub max_error: f64,
}

impl IvpSolution {
    pub fn last(&self) -> &[f64] {
        self.y_nodes.last().expect("solution has at least one node")
    }

    /// Dense evaluation; clamps outside the integration span. Works for either
    /// integration direction.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let n = self.t_nodes.len();
        let first = self.t_nodes[0];
        let increasing = n < 2 || self.t_nodes[n - 1] >= first;
        let pos = if increasing {
            self.t_nodes.partition_point(|&x| x <= t)
        } else {
            self.t_nodes.partition_point(|&x| x >= t)
        };
        if pos == 0 {
            return self.y_nodes[0].clone();
        }
        if pos >= n {
            return self.y_nodes[n - 1].clone();
        }
        let (i, j) = (pos - 1, pos);
        let h = self.t_nodes[j] - self.t_nodes[i];
        let s = (t - self.t_nodes[i]) / h;
        if let Some(r5) = self.dense.get(i) {
            let s1 = 1.0 - s;
            return (0..self.y_nodes[i].len())
                .map(|c| {
                    let y0 = self.y_nodes[i][c];
                    let r2 = self.y_nodes[j][c] - y0;
                    let r3 = h * self.dy_nodes[i][c] - r2;
                    let r4 = r2 - h * self.dy_nodes[j][c] - r3;
                    y0 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5[c])))
                })
                .collect();
        }
        let (h00, h10, h01, h11) = hermite_basis(s);
        (0..self.y_nodes[i].len())
            .map(|c| {
                h00 * self.y_nodes[i][c]
                    + h10 * h * self.dy_nodes[i][c]
                    + h01 * self.y_nodes[j][c]
                    + h11 * h * self.dy_nodes[j][c]
            })
            .collect()
    }
}

pub(crate) fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

struct Stepper {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl Stepper {
    fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
        }
    }

    /// One DP step from (t, y) with k[0] = f(t, y) already filled.
    /// Writes the fifth-order solution to `out` and returns the error vector
    /// in `err`. On exit k[6] holds f(t+h, out).
    fn step<F>(&mut self, rhs: &mut F, t: f64, y: &[f64], h: f64, out: &mut [f64], err: &mut [f64])
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let dim = y.len();
        for s in 1..7 {
            for c in 0..dim {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().enumerate().take(s) {
                    acc += a * self.k[j][c];
                }
                self.tmp[c] = y[c] + h * acc;
            }
            rhs(t + C[s] * h, &self.tmp, &mut self.k[s]);
        }
        // stage 7 evaluated at the fifth-order solution itself (FSAL)
        out.copy_from_slice(&self.tmp);
        for c in 0..dim {
            let mut e = 0.0;
            for (j, w) in E.iter().enumerate() {
                e += w * self.k[j][c];
            }
            err[c] = h * e;
        }
    }
}

/// Adaptive Dormand-Prince 5(4) integration with PI step-size control.
pub fn integrate_ivp<F>(mut rhs: F, y0: &[f64], t_span: (f64, f64), opts: &IvpOptions) -> Result<IvpSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::Invalid("tolerances must be positive".into()));
    }
    let (t0, t1) = t_span;
    let dim = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut sol = IvpSolution {
        t_nodes: vec![t0],
        y_nodes: vec![y0.to_vec()],
        dy_nodes: Vec::new(),
        dense: Vec::new(),
        accepted: 0,
        rejected: 0,
        max_error: 0.0,
    };
    let mut st = Stepper::new(dim);
    rhs(t0, y0, &mut st.k[0]);
    sol.dy_nodes.push(st.k[0].clone());
    if span == 0.0 {
        return Ok(sol);
    }
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut h = match opts.h_init {
        Some(h) => h.abs().min(span),
        None => initial_step(&st.k[0], &y, span, opts),
    };
    let mut err_prev: f64 = 1e-4;
    let h_floor = 1e-14 * (t0.abs().max(t1.abs())).max(span);

    loop {
        if sol.accepted + sol.rejected >= opts.max_steps {
            return Err(Error::Integration {
                t,
                last_state: y,
                reason: format!("step budget {} exhausted", opts.max_steps),
            });
        }
        let remaining = (t1 - t) * dir;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        st.step(&mut rhs, t, &y, dir * h, &mut y_new, &mut err);
        let mut norm = 0.0;
        let mut finite = true;
        for c in 0..dim {
            if !y_new[c].is_finite() || !st.k[6][c].is_finite() {
                finite = false;
            }
            let sc = opts.abs_tol + opts.rel_tol * y[c].abs().max(y_new[c].abs());
            let r = err[c] / sc;
            norm += r * r;
        }
        let norm = if finite { (norm / dim.max(1) as f64).sqrt() } else { f64::INFINITY };
        if norm <= 1.0 {
            sol.accepted += 1;
            sol.max_error = sol.max_error.max(norm);
            let hs = dir * h;
            sol.dense.push(
                (0..dim)
                    .map(|c| hs * D.iter().zip(&st.k).map(|(d, k)| d * k[c]).sum::<f64>())
                    .collect(),
            );
            t = if last { t1 } else { t + dir * h };
            std::mem::swap(&mut y, &mut y_new);
            st.k.swap(0, 6);
            sol.t_nodes.push(t);
            sol.y_nodes.push(y.clone());
            sol.dy_nodes.push(st.k[0].clone());
            if last {
                return Ok(sol);
            }
            let fac = 0.9 * norm.max(1e-10).powf(-0.17) * err_prev.powf(0.04);
            h *= fac.clamp(0.2, 10.0);
            err_prev = norm.max(1e-4);
        } else {
            sol.rejected += 1;
            let fac = if norm.is_finite() { 0.9 * norm.powf(-0.2) } else { 0.1 };
            h *= fac.clamp(0.1, 0.9);
        }
        if h < h_floor {
            return Err(Error::Integration {
                t,
                last_state: y,
                reason: "step size underflow".into(),
            });
        }
    }
}

fn initial_step(f0: &[f64], y0: &[f64], span: f64, opts: &IvpOptions) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (y, f) in y0.iter().zip(f0) {
        let sc = opts.abs_tol + opts.rel_tol * y.abs();
        d0 += (y / sc).powi(2);
        d1 += (f / sc).powi(2);
    }
    let h = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6 * span
    } else {
        0.01 * (d0 / d1).sqrt()
    };
    h.min(span).max(1e-12 * span)
}

/// Fixed-step fifth-order propagation; used to check the convergence order.
pub fn integrate_fixed<F>(mut rhs: F, y0: &[f64], t_span: (f64, f64), steps: usize) -> Vec<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let h = (t_span.1 - t_span.0) / steps as f64;
    let mut st = Stepper::new(dim);
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    for i in 0..steps {
        let t = t_span.0 + i as f64 * h;
        rhs(t, &y, &mut st.k[0]);
        st.step(&mut rhs, t, &y, h, &mut y_new, &mut err);
        std::mem::swap(&mut y, &mut y_new);
    }
    y
}
