//! Closed-form spectral data of the open XX chain
//!
//! H = g Σ (σx σx + σy σy) + Δ Σ σz is mapped by a Jordan–Wigner transform
//! onto free fermions with single-particle modes
//!
//! ```text
//! u[ℓ][k] = sqrt(2/(N+1)) sin(ℓkπ/(N+1)),   ω_ℓ = 2Δ + 4g cos(ℓπ/(N+1)).
//! ```
//!
//! Modes and sites are 1-based in documentation, CLI input and output, and
//! 0-based everywhere in the API: `u(l, k)` with `l, k in 0..n` is the entry
//! u[l+1][k+1], and `omega()[l]` is ω_{l+1}.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest chain handled; Fock strings are packed into a `u64`.
pub const MAX_SITES: usize = 64;

/// Relative floor below which a transition frequency counts as non-positive.
pub const DEFAULT_FREQUENCY_FLOOR: f64 = 1e-9;

/// Chain size N, transverse field Δ and hopping g (ħ = k_B = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    n_sites: usize,
    delta: f64,
    g: f64,
}

impl ChainSpec {
    pub fn new(n_sites: usize, delta: f64, g: f64) -> Result<Self> {
        if !(2..=MAX_SITES).contains(&n_sites) {
            return Err(Error::InvalidChain(format!(
                "n_sites must lie in 2..={MAX_SITES}, got {n_sites}"
            )));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidChain(format!(
                "delta must be > 0, got {delta}"
            )));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidChain(format!("g must be > 0, got {g}")));
        }
        Ok(Self { n_sites, delta, g })
    }

    /// Chain with `g = fraction · Δ / (2 cos(π/(N+1)))`.
    pub fn near_saturation(n_sites: usize, delta: f64, fraction: f64) -> Result<Self> {
        if !(fraction.is_finite() && fraction > 0.0) {
            return Err(Error::InvalidChain(format!(
                "coupling fraction must be > 0, got {fraction}"
            )));
        }
        Self::new(
            n_sites,
            delta,
            fraction * saturation_coupling(n_sites, delta),
        )
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// γ = Δ/g.
    pub fn gamma(&self) -> f64 {
        self.delta / self.g
    }

    pub fn coupling_bound(&self) -> f64 {
        saturation_coupling(self.n_sites, self.delta)
    }

    /// Weak form of the positivity assumption: g ≤ Δ / (2 cos(π/(N+1))).
    pub fn check_frequency_assumption(&self) -> bool {
        self.g <= self.coupling_bound()
    }

    /// Strict form: every ω_ℓ exceeds `floor` (defaults to 1e-9·Δ).
    pub fn require_positive_frequencies(&self, floor: Option<f64>) -> Result<()> {
        let floor = floor.unwrap_or(DEFAULT_FREQUENCY_FLOOR * self.delta);
        for mode in 0..self.n_sites {
            let omega = transition_frequency(self, mode);
            if omega.is_nan() || omega <= floor {
                return Err(Error::NonPositiveFrequency {
                    mode: mode + 1,
                    omega,
                    floor,
                });
            }
        }
        Ok(())
    }
}

/// Largest hopping keeping all ω_ℓ ≥ 0.
pub fn saturation_coupling(n_sites: usize, delta: f64) -> f64 {
    delta / (2.0 * (PI / (n_sites as f64 + 1.0)).cos())
}

fn transition_frequency(spec: &ChainSpec, mode: usize) -> f64 {
    let n1 = spec.n_sites as f64 + 1.0;
    2.0 * spec.delta + 4.0 * spec.g * ((mode as f64 + 1.0) * PI / n1).cos()
}

/// Orthogonal symmetric mode matrix and transition frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTable {
    u: DMatrix<f64>,
    omega: Vec<f64>,
}

impl ModeTable {
    pub fn new(spec: &ChainSpec) -> Self {
        let n = spec.n_sites;
        let n1 = n as f64 + 1.0;
        let norm = (2.0 / n1).sqrt();
        // Fill the upper triangle and mirror it so that u = uᵀ bit for bit.
        let mut u = DMatrix::zeros(n, n);
        for l in 0..n {
            for k in l..n {
                let v = norm * (((l + 1) * (k + 1)) as f64 * PI / n1).sin();
                u[(l, k)] = v;
                u[(k, l)] = v;
            }
        }
        let omega = (0..n).map(|l| transition_frequency(spec, l)).collect();
        Self { u, omega }
    }

    pub fn n_sites(&self) -> usize {
        self.omega.len()
    }

    /// u[mode+1][site+1].
    pub fn u(&self, mode: usize, site: usize) -> f64 {
        self.u[(mode, site)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn min_omega(&self) -> f64 {
        self.omega.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Errors unless every ω_ℓ is above `floor`.
    pub fn require_positive(&self, floor: f64) -> Result<()> {
        match self.omega.iter().position(|&w| w.is_nan() || w <= floor) {
            Some(mode) => Err(Error::NonPositiveFrequency {
                mode: mode + 1,
                omega: self.omega[mode],
                floor,
            }),
            None => Ok(()),
        }
    }
}

pub fn build_mode_table(spec: &ChainSpec) -> ModeTable {
    ModeTable::new(spec)
}

/// Occupation word of the N fermionic normal modes. Mode ℓ (1-based) is bit ℓ-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockString {
    len: usize,
    bits: u64,
}

impl FockString {
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len > MAX_SITES {
            return Err(Error::InvalidChain(format!(
                "string length {len} exceeds {MAX_SITES}"
            )));
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::InvalidChain(format!(
                "bit pattern {bits:#x} does not fit in {len} modes"
            )));
        }
        Ok(Self { len, bits })
    }

    pub fn vacuum(len: usize) -> Self {
        Self { len, bits: 0 }
    }

    pub fn from_occupations(occupations: &[u8]) -> Result<Self> {
        let mut bits = 0u64;
        for (i, &o) in occupations.iter().enumerate() {
            match o {
                0 => {}
                1 => bits |= 1 << i,
                _ => return Err(Error::InvalidChain(format!("occupation {o} is not a bit"))),
            }
        }
        Self::new(occupations.len(), bits)
    }

    /// Iterates over all 2^len strings in increasing bit-pattern order.
    pub fn all(len: usize) -> impl Iterator<Item = FockString> {
        assert!(len < 64, "enumeration needs len < 64");
        (0..1u64 << len).map(move |bits| FockString { len, bits })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_occupied(&self, mode: usize) -> bool {
        self.bits >> mode & 1 == 1
    }

    pub fn with(self, mode: usize, occupied: bool) -> Self {
        let bits = if occupied {
            self.bits | 1 << mode
        } else {
            self.bits & !(1 << mode)
        };
        Self { bits, ..self }
    }

    /// Occupied positions, ascending, 0-based.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.is_occupied(i))
    }
}

impl fmt::Display for FockString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.is_occupied(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for FockString {
    type Err = Error;

    /// Parses "101" as n_1 = 1, n_2 = 0, n_3 = 1.
    fn from_str(s: &str) -> Result<Self> {
        let occ = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::InvalidChain(format!(
                    "invalid occupation digit {c:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_occupations(&occ)
    }
}

/// E_n = Δ(2 Σ n_ℓ − N) + 4g Σ n_ℓ cos(ℓπ/(N+1)).
pub fn eigen_energy(spec: &ChainSpec, n: &FockString) -> Result<f64> {
    if n.len() != spec.n_sites {
        return Err(Error::LengthMismatch {
            expected: spec.n_sites,
            actual: n.len(),
        });
    }
    let n1 = spec.n_sites as f64 + 1.0;
    let hopping: f64 = n.ones().map(|l| ((l + 1) as f64 * PI / n1).cos()).sum();
    Ok(spec.delta * (2.0 * n.weight() as f64 - spec.n_sites as f64) + 4.0 * spec.g * hopping)
}
