//! Product-form stationary state.
//!
//! Every Fock projector P_n carries weight Λ_n = Π_ℓ λ^(ℓ)_{n_ℓ} with
//!
//! ```text
//! λ^(ℓ)_n = R^(ℓ)_n / R_ℓ
//! R^(ℓ)_n = w_L (1 − n + n_L(ω_ℓ)) + w_R (1 − n + n_R(ω_ℓ))
//! R_ℓ     = w_L (1 + 2 n_L(ω_ℓ)) + w_R (1 + 2 n_R(ω_ℓ))
//! ```
//!
//! where w_α = h_α(ω_ℓ)² are the per-mode coupling weights.

use crate::chain::{FockString, ModeTable};
use crate::error::{Error, Result};

/// Bath temperatures (k_B = 1), squared smearing values per mode, and λ².
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub temp_left: f64,
    pub temp_right: f64,
    pub weight_left: Vec<f64>,
    pub weight_right: Vec<f64>,
    pub lambda_sq: f64,
}

impl BathSpec {
    pub fn new(
        temp_left: f64,
        temp_right: f64,
        weight_left: Vec<f64>,
        weight_right: Vec<f64>,
        lambda_sq: f64,
    ) -> Result<Self> {
        let baths = Self {
            temp_left,
            temp_right,
            weight_left,
            weight_right,
            lambda_sq,
        };
        baths.validate(baths.weight_left.len())?;
        Ok(baths)
    }

    /// h_L = h_R = 1 on every mode and λ² = 1.
    pub fn equal_weights(n_sites: usize, temp_left: f64, temp_right: f64) -> Result<Self> {
        Self::new(
            temp_left,
            temp_right,
            vec![1.0; n_sites],
            vec![1.0; n_sites],
            1.0,
        )
    }

    pub fn with_lambda_sq(mut self, lambda_sq: f64) -> Result<Self> {
        self.lambda_sq = lambda_sq;
        self.validate(self.weight_left.len())?;
        Ok(self)
    }

    pub fn with_temperatures(&self, temp_left: f64, temp_right: f64) -> Result<Self> {
        let mut out = self.clone();
        out.temp_left = temp_left;
        out.temp_right = temp_right;
        out.validate(out.weight_left.len())?;
        Ok(out)
    }

    /// Left and right baths exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            temp_left: self.temp_right,
            temp_right: self.temp_left,
            weight_left: self.weight_right.clone(),
            weight_right: self.weight_left.clone(),
            lambda_sq: self.lambda_sq,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.weight_left.len()
    }

    pub fn validate(&self, n_modes: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidBath(msg));
        for (name, t) in [
            ("temp_left", self.temp_left),
            ("temp_right", self.temp_right),
        ] {
            if !(t.is_finite() && t >= 0.0) {
                return bad(format!("{name} must be a finite temperature >= 0, got {t}"));
            }
        }
        if !(self.lambda_sq.is_finite() && self.lambda_sq >= 0.0) {
            return bad(format!("lambda_sq must be >= 0, got {}", self.lambda_sq));
        }
        if self.weight_left.len() != n_modes || self.weight_right.len() != n_modes {
            return bad(format!(
                "expected {n_modes} weights per bath, got {} (left) and {} (right)",
                self.weight_left.len(),
                self.weight_right.len()
            ));
        }
        for (l, (&wl, &wr)) in self.weight_left.iter().zip(&self.weight_right).enumerate() {
            if !(wl.is_finite() && wr.is_finite() && wl >= 0.0 && wr >= 0.0) {
                return bad(format!("weights of mode {} must be finite and >= 0", l + 1));
            }
            if wl + wr <= 0.0 {
                return bad(format!("mode {} has zero total coupling weight", l + 1));
            }
        }
        Ok(())
    }
}

/// 1/(e^{ω/T} − 1); exactly 0 at T = 0.
pub fn bose_occupation(temp: f64, omega: f64) -> Result<f64> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::InvalidBath(format!(
            "Bose occupation needs omega > 0, got {omega:e}"
        )));
    }
    if !(temp.is_finite() && temp >= 0.0) {
        return Err(Error::InvalidBath(format!(
            "temperature must be >= 0, got {temp}"
        )));
    }
    if temp == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temp).exp_m1())
}

/// Bose occupations (n_L(ω_ℓ), n_R(ω_ℓ)) for every mode.
pub fn occupations(modes: &ModeTable, baths: &BathSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    baths.validate(modes.n_sites())?;
    let left = modes
        .omega()
        .iter()
        .map(|&w| bose_occupation(baths.temp_left, w));
    let right = modes
        .omega()
        .iter()
        .map(|&w| bose_occupation(baths.temp_right, w));
    Ok((left.collect::<Result<_>>()?, right.collect::<Result<_>>()?))
}

/// Per-mode probabilities of the empty (`lam0`) and filled (`lam1`) mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyFactors {
    pub lam0: Vec<f64>,
    pub lam1: Vec<f64>,
}

impl SteadyFactors {
    pub fn n_modes(&self) -> usize {
        self.lam0.len()
    }

    pub fn factor(&self, mode: usize, occupied: bool) -> f64 {
        if occupied {
            self.lam1[mode]
        } else {
            self.lam0[mode]
        }
    }

    /// Λ_n; panics on a length mismatch (see [`steady_eigenvalue`]).
    pub fn eigenvalue(&self, n: &FockString) -> f64 {
        assert_eq!(
            n.len(),
            self.n_modes(),
            "string length must equal the mode count"
        );
        (0..self.n_modes())
            .map(|l| self.factor(l, n.is_occupied(l)))
            .product()
    }
}

pub fn steady_factors(modes: &ModeTable, baths: &BathSpec) -> Result<SteadyFactors> {
    let (n_left, n_right) = occupations(modes, baths)?;
    let n = modes.n_sites();
    let mut lam0 = Vec::with_capacity(n);
    let mut lam1 = Vec::with_capacity(n);
    for l in 0..n {
        let (wl, wr) = (baths.weight_left[l], baths.weight_right[l]);
        let (nl, nr) = (n_left[l], n_right[l]);
        let r_total = wl * (1.0 + 2.0 * nl) + wr * (1.0 + 2.0 * nr);
        lam0.push((wl * (1.0 + nl) + wr * (1.0 + nr)) / r_total);
        lam1.push((wl * nl + wr * nr) / r_total);
    }
    Ok(SteadyFactors { lam0, lam1 })
}

pub fn steady_eigenvalue(factors: &SteadyFactors, n: &FockString) -> Result<f64> {
    if n.len() != factors.n_modes() {
        return Err(Error::LengthMismatch {
            expected: factors.n_modes(),
            actual: n.len(),
        });
    }
    Ok(factors.eigenvalue(n))
}

/// Factors of e^{−βH}/Z; `beta = f64::INFINITY` gives the ground state.
pub fn gibbs_weights(modes: &ModeTable, beta: f64) -> Result<SteadyFactors> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidBath(format!("beta must be >= 0, got {beta}")));
    }
    let mut lam0 = Vec::with_capacity(modes.n_sites());
    let mut lam1 = Vec::with_capacity(modes.n_sites());
    for &w in modes.omega() {
        let boltz = if beta == 0.0 { 1.0 } else { (-beta * w).exp() };
        lam0.push(1.0 / (1.0 + boltz));
        lam1.push(boltz / (1.0 + boltz));
    }
    Ok(SteadyFactors { lam0, lam1 })
}
