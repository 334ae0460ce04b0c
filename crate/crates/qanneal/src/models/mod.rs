//! Model definitions: transverse-field Ising modes, long-range Kitaev
//! couplings and crossings, regime classification, and the disordered chain.

mod disordered;

pub use disordered::DisorderedChain;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{gamma, zeta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelKind {
    Tfim,
    Lrk { alpha: f64, beta: f64 },
    Disordered { delta_j: f64, j_prime: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub l: usize,
    pub kind: ModelKind,
    pub g_start: f64,
    pub g_end: f64,
}

impl ModelSpec {
    pub fn tfim(l: usize) -> Self {
        Self { l, kind: ModelKind::Tfim, g_start: 2.0, g_end: 0.0 }
    }

    pub fn lrk(l: usize, alpha: f64, beta: f64) -> Self {
        Self { l, kind: ModelKind::Lrk { alpha, beta }, g_start: 4.0, g_end: 0.0 }
    }

    pub fn disordered(l: usize, delta_j: f64, j_prime: f64, seed: u64) -> Self {
        Self {
            l,
            kind: ModelKind::Disordered { delta_j, j_prime, seed },
            g_start: 2.0,
            g_end: 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Tfim => "tfim",
            ModelKind::Lrk { .. } => "lrk",
            ModelKind::Disordered { .. } => "disordered",
        }
    }

    /// Critical value of the control field in the thermodynamic limit.
    pub fn g_critical(&self) -> f64 {
        match self.kind {
            ModelKind::Lrk { .. } => 2.0,
            _ => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ModelKind::Tfim => {
                momentum_grid(self.l)?;
            }
            ModelKind::Lrk { alpha, beta } => {
                momentum_grid(self.l)?;
                classify_regime(alpha, beta)?;
            }
            ModelKind::Disordered { delta_j, .. } => {
                if self.l < 3 || self.l > 20 {
                    return Err(Error::Invalid(format!("disordered chain needs 3 <= L <= 20, got {}", self.l)));
                }
                if !(delta_j >= 0.0) {
                    return Err(Error::Invalid("disorder strength must be non-negative".into()));
                }
            }
        }
        if !(self.g_start.is_finite() && self.g_end.is_finite()) || self.g_start <= self.g_end {
            return Err(Error::Invalid("need finite g_start > g_end".into()));
        }
        Ok(())
    }

    /// Free-fermion modes on the positive momentum grid.
    pub fn modes(&self) -> Result<Vec<ModeProblem>> {
        let ks = momentum_grid(self.l)?;
        match self.kind {
            ModelKind::Tfim => Ok(ks.into_iter().map(tfim_mode).collect()),
            ModelKind::Lrk { alpha, beta } => {
                classify_regime(alpha, beta)?;
                let c = LrkCouplings::new(alpha, beta, self.l);
                Ok(ks.into_iter().map(|k| c.mode(k)).collect())
            }
            ModelKind::Disordered { .. } => Err(Error::Unsupported(
                "the disordered chain has no free-fermion modes".into(),
            )),
        }
    }
}

/// Two-level problem H_k = a(g) tau_z + b tau_x with a(g) = a1 g + a0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProblem {
    pub k: f64,
    pub a0: f64,
    pub a1: f64,
    pub b: f64,
}

impl ModeProblem {
    #[inline]
    pub fn a(&self, g: f64) -> f64 {
        self.a1 * g + self.a0
    }

    /// Positive eigenvalue sqrt(a^2 + b^2).
    #[inline]
    pub fn energy(&self, g: f64) -> f64 {
        self.a(g).hypot(self.b)
    }

    /// Mixing angle in [0, pi]: the upper eigenvector is (cos th/2, sin th/2).
    #[inline]
    pub fn angle(&self, g: f64) -> f64 {
        self.b.atan2(self.a(g))
    }

    /// Field value where |a| vanishes.
    pub fn crossing(&self) -> f64 {
        -self.a0 / self.a1
    }
}

pub fn momentum_grid(l: usize) -> Result<Vec<f64>> {
    if l < 4 || l % 2 != 0 {
        return Err(Error::Invalid(format!("momentum grid needs even L >= 4, got {l}")));
    }
    let lf = l as f64;
    Ok((1..=l / 2).map(|m| (2 * m - 1) as f64 * PI / lf).collect())
}

pub fn tfim_mode(k: f64) -> ModeProblem {
    ModeProblem { k, a0: -2.0 * k.cos(), a1: 2.0, b: 2.0 * k.sin() }
}

/// Avoided-crossing position cos k; none for k >= pi/2.
pub fn tfim_crossing(k: f64) -> Option<f64> {
    (k > 0.0 && k < PI / 2.0).then(|| k.cos())
}

/// Finite-range sums for the long-range Kitaev chain, normalized so that
/// j(0) = 1.
#[derive(Debug, Clone)]
pub struct LrkCouplings {
    pub alpha: f64,
    pub beta: f64,
    w_alpha: Vec<f64>,
    w_beta: Vec<f64>,
}

impl LrkCouplings {
    pub fn new(alpha: f64, beta: f64, l: usize) -> Self {
        let range = (l / 2).max(1);
        let weights = |e: f64| {
            let w: Vec<f64> = (1..=range).map(|r| (r as f64).powf(-e)).collect();
            let norm: f64 = w.iter().rev().sum();
            w.into_iter().map(|x| x / norm).collect::<Vec<_>>()
        };
        Self { alpha, beta, w_alpha: weights(alpha), w_beta: weights(beta) }
    }

    /// (j_alpha(k), d_beta(k)).
    pub fn at(&self, k: f64) -> (f64, f64) {
        let mut j = 0.0;
        let mut d = 0.0;
        for (i, (wa, wb)) in self.w_alpha.iter().zip(&self.w_beta).enumerate().rev() {
            let (s, c) = (k * (i + 1) as f64).sin_cos();
            j += wa * c;
            d += wb * s;
        }
        (j, d)
    }

    /// 1 - j_alpha(k), summed directly to avoid cancellation at small k.
    pub fn one_minus_j(&self, k: f64) -> f64 {
        self.w_alpha
            .iter()
            .enumerate()
            .rev()
            .map(|(i, w)| {
                let h = (0.5 * k * (i + 1) as f64).sin();
                2.0 * w * h * h
            })
            .sum()
    }

    pub fn mode(&self, k: f64) -> ModeProblem {
        let (_, d) = self.at(k);
        // a = g - 2j = (g - 2) + 2(1 - j)
        ModeProblem { k, a0: -2.0 + 2.0 * self.one_minus_j(k), a1: 1.0, b: 2.0 * d }
    }

    pub fn crossing(&self, k: f64) -> f64 {
        2.0 - 2.0 * self.one_minus_j(k)
    }
}

pub fn lrk_couplings(alpha: f64, beta: f64, l: usize, k: f64) -> (f64, f64) {
    LrkCouplings::new(alpha, beta, l).at(k)
}

pub fn lrk_mode(alpha: f64, beta: f64, l: usize, k: f64) -> ModeProblem {
    LrkCouplings::new(alpha, beta, l).mode(k)
}

pub fn lrk_crossing(alpha: f64, l: usize, k: f64) -> f64 {
    LrkCouplings::new(alpha, 2.5, l).crossing(k)
}

/// Small-k leading order of the crossing position.
pub fn lrk_crossing_leading(alpha: f64, k: f64) -> Result<f64> {
    Ok(2.0 - pairing_coefficient(alpha)? * k.powf(pairing_power(alpha)?))
}

/// C with 2 - g_c(k) ~ C k^p at small k.
pub fn pairing_coefficient(alpha: f64) -> Result<f64> {
    if alpha > 3.0 {
        Ok(zeta(alpha - 2.0)? / zeta(alpha)?)
    } else if alpha > 1.0 && alpha < 3.0 {
        Ok(-2.0 * (alpha * PI / 2.0).sin() * gamma(1.0 - alpha)? / zeta(alpha)?)
    } else {
        Err(Error::Unsupported(format!("pairing exponent alpha={alpha}")))
    }
}

pub fn pairing_power(alpha: f64) -> Result<f64> {
    if alpha > 3.0 {
        Ok(2.0)
    } else if alpha > 1.0 && alpha < 3.0 {
        Ok(alpha - 1.0)
    } else {
        Err(Error::Unsupported(format!("pairing exponent alpha={alpha}")))
    }
}

/// D with d_beta(k) ~ D k^q at small k.
pub fn hopping_coefficient(beta: f64) -> Result<f64> {
    if beta > 2.0 {
        Ok(zeta(beta - 1.0)? / zeta(beta)?)
    } else if beta > 1.0 && beta < 2.0 {
        Ok((beta * PI / 2.0).cos() * gamma(1.0 - beta)? / zeta(beta)?)
    } else {
        Err(Error::Unsupported(format!("hopping exponent beta={beta}")))
    }
}

pub fn hopping_power(beta: f64) -> Result<f64> {
    if beta > 2.0 {
        Ok(1.0)
    } else if beta > 1.0 && beta < 2.0 {
        Ok(beta - 1.0)
    } else {
        Err(Error::Unsupported(format!("hopping exponent beta={beta}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// alpha > 3, beta > 2
    SrSr,
    /// alpha > 3, beta < 2
    SrPairLrHop,
    /// alpha < 3, beta > 2
    LrPairSrHop,
    /// alpha < 3, beta < 2
    LrLr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalingClass {
    KibbleZurek,
    Dynamical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Regime {
    pub sector: Sector,
    pub class: ScalingClass,
}

impl Regime {
    /// Exponent z of the gap at the critical field, eps ~ k^z.
    pub fn dynamic_exponent(alpha: f64, beta: f64) -> Result<f64> {
        let r = classify_regime(alpha, beta)?;
        Ok(match r.sector {
            Sector::SrSr => 1.0,
            Sector::SrPairLrHop => beta - 1.0,
            Sector::LrPairSrHop => alpha - 1.0,
            Sector::LrLr => alpha.min(beta) - 1.0,
        })
    }
}

pub fn classify_regime(alpha: f64, beta: f64) -> Result<Regime> {
    if !(alpha > 1.0 && beta > 1.0) {
        return Err(Error::Unsupported(format!("exponents must exceed 1, got alpha={alpha}, beta={beta}")));
    }
    if alpha == 3.0 || beta == 2.0 {
        return Err(Error::Unsupported(format!(
            "marginal exponents alpha=3 / beta=2 (got alpha={alpha}, beta={beta})"
        )));
    }
    let sector = match (alpha > 3.0, beta > 2.0) {
        (true, true) => Sector::SrSr,
        (true, false) => Sector::SrPairLrHop,
        (false, true) => Sector::LrPairSrHop,
        (false, false) => Sector::LrLr,
    };
    let class = if alpha < 3.0 && alpha < beta {
        ScalingClass::Dynamical
    } else {
        ScalingClass::KibbleZurek
    };
    Ok(Regime { sector, class })
}
