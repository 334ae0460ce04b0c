//! Restarted Lanczos for the lowest eigenpair of a real symmetric operator,
//! and a Lanczos-based action of exp(-i tau H) on a complex vector.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov dimension per restart cycle.
    pub basis: usize,
    pub max_restarts: usize,
    /// Residual target, relative to `scale`.
    pub tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { basis: 30, max_restarts: 500, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn tridiag(alpha: &[f64], beta: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    SymmetricEigen::new(t)
}

/// Lowest eigenpair of `apply` reachable from `start`.
///
/// `project` is applied to every new Krylov vector; use it to stay inside a
/// symmetry sector or to deflate known eigenvectors. `scale` is a bound on
/// the operator norm, the residual target is `tol * scale`.
pub fn lowest_eigenpair<A, P>(apply: A, project: P, start: &[f64], scale: f64, opts: &LanczosOptions) -> Result<Eigenpair>
where
    A: Fn(&[f64], &mut [f64]),
    P: Fn(&mut [f64]),
{
    let dim = start.len();
    let mut v = start.to_vec();
    project(&mut v);
    let nv = norm(&v);
    if !(nv > 0.0) {
        return Err(Error::Invalid("Lanczos start vector vanishes in the target subspace".into()));
    }
    v.iter_mut().for_each(|x| *x /= nv);
    let m_max = opts.basis.min(dim).max(1);
    let target = opts.tol * scale;
    let mut w = vec![0.0; dim];
    let mut iterations = 0;
    let mut last = f64::NAN;
    for _ in 0..opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![v.clone()];
        // projected matrix Q^T H Q, filled column by column from the
        // orthogonalisation coefficients; stays exact after a breakdown
        let mut proj = vec![vec![0.0; m_max]; m_max];
        loop {
            let j = basis.len() - 1;
            apply(&basis[j], &mut w);
            iterations += 1;
            project(&mut w);
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let c = dot(&w, q);
                    proj[i][j] += c;
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if basis.len() == m_max || b <= 1e-14 * scale {
                break;
            }
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let m = basis.len();
        let sym = DMatrix::from_fn(m, m, |r, c| proj[r.min(c)][r.max(c)]);
        let eig = SymmetricEigen::new(sym);
        let (imin, value) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
        let s = eig.eigenvectors.column(imin);
        let mut y = vec![0.0; dim];
        for (q, &c) in basis.iter().zip(s.iter()) {
            y.iter_mut().zip(q).for_each(|(x, qv)| *x += c * qv);
        }
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);
        apply(&y, &mut w);
        iterations += 1;
        let residual = w.iter().zip(&y).map(|(hw, yv)| (hw - value * yv).powi(2)).sum::<f64>().sqrt();
        last = residual;
        if residual <= target {
            return Ok(Eigenpair { value, vector: y, residual, iterations });
        }
        v = y;
    }
    Err(Error::Convergence(format!(
        "Lanczos: residual {last:e} above {target:e} after {iterations} operator applications"
    )))
}

/// Applies exp(-i tau H) to `psi` in place with Krylov substeps.
///
/// Each substep keeps the a-posteriori Krylov error below `tol`; the substep
/// is halved when `max_dim` vectors are not enough. Returns the number of
/// operator applications.
pub fn expm_apply<A>(apply: A, psi: &mut [Complex64], tau: f64, tol: f64, max_dim: usize) -> Result<usize>
where
    A: Fn(&[Complex64], &mut [Complex64]),
{
    let dim = psi.len();
    let mut done = 0.0;
    let mut step = tau;
    let mut applications = 0;
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let cdot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let cnorm = |a: &[Complex64]| -> f64 { a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() };
    let mut halvings = 0;
    while tau - done > 1e-14 * tau {
        let h = step.min(tau - done);
        let n0 = cnorm(psi);
        let mut basis: Vec<Vec<Complex64>> = vec![psi.iter().map(|x| x / n0).collect()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut accepted = None;
        loop {
            let j = basis.len() - 1;
            apply(&basis[j], &mut w);
            applications += 1;
            alpha.push(cdot(&basis[j], &w).re);
            for _ in 0..2 {
                for q in &basis {
                    let c = cdot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = cnorm(&w);
            let m = alpha.len();
            let eig = tridiag(&alpha, &beta);
            // c = exp(-i h T) e1
            let coef: Vec<Complex64> = (0..m)
                .map(|r| {
                    (0..m)
                        .map(|c| {
                            let vr = eig.eigenvectors[(r, c)];
                            let v0 = eig.eigenvectors[(0, c)];
                            Complex64::from_polar(vr * v0, -h * eig.eigenvalues[c])
                        })
                        .sum()
                })
                .collect();
            let err = b * coef[m - 1].norm();
            if err <= tol || b <= 1e-14 || m == dim {
                accepted = Some(coef);
                break;
            }
            if m == max_dim {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        match accepted {
            Some(coef) => {
                psi.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
                for (q, c) in basis.iter().zip(&coef) {
                    let c = c * n0;
                    psi.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
                }
                done += h;
                if halvings == 0 {
                    step *= 1.25;
                }
                halvings = 0;
            }
            None => {
                step = h / 2.0;
                halvings += 1;
                if halvings > 60 {
                    return Err(Error::Convergence("Krylov exponential: substep underflow".into()));
                }
            }
        }
    }
    Ok(applications)
}
