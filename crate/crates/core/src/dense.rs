//! Dense 2^N × 2^N operators and the basis orderings they live in.
//!
//! * `Fock`: index = bit pattern of the mode occupations (mode ℓ at bit ℓ−1).
//! * `SpinTensor`: Kronecker order over sites 1..N with |↑⟩ = 0, |↓⟩ = 1, so
//!   site 1 is the most significant digit and (↑↑, ↑↓, ↓↑, ↓↓) = (0, 1, 2, 3).
//! * `SpinSector`: spin configurations grouped by the number p of up spins,
//!   ranked combinadically (over the up sites) inside each group.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::chain::FockString;
use crate::combinadics::{rank, sector_size, weight_class};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Fock,
    SpinTensor,
    SpinSector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_sites: usize,
    basis: Basis,
    matrix: DMatrix<Complex64>,
}

impl DenseState {
    pub fn new(n_sites: usize, basis: Basis, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Oracle(format!(
                "expected a {dim}x{dim} matrix for N = {n_sites}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            n_sites,
            basis,
            matrix,
        })
    }

    pub fn from_real(n_sites: usize, basis: Basis, matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(n_sites, basis, matrix.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// max |ρ − ρ†|.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest modulus of an off-diagonal entry.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                if i != j {
                    m = m.max(self.matrix[(i, j)].norm());
                }
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &DenseState) -> Result<f64> {
        if self.basis != other.basis || self.n_sites != other.n_sites {
            return Err(Error::Oracle(format!(
                "cannot compare {:?} (N = {}) with {:?} (N = {})",
                self.basis, self.n_sites, other.basis, other.n_sites
            )));
        }
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }

    /// Reorders a sector-basis operator into tensor order. Tensor states pass through.
    pub fn to_spin_tensor(&self) -> Result<DenseState> {
        match self.basis {
            Basis::SpinTensor => Ok(self.clone()),
            Basis::SpinSector => {
                let perm = sector_to_tensor(self.n_sites);
                let dim = self.dim();
                let mut out = DMatrix::zeros(dim, dim);
                for j in 0..dim {
                    for i in 0..dim {
                        out[(perm[i], perm[j])] = self.matrix[(i, j)];
                    }
                }
                DenseState::new(self.n_sites, Basis::SpinTensor, out)
            }
            Basis::Fock => Err(Error::Oracle(
                "a Fock-basis state needs the mode transform, see oracle::operators".into(),
            )),
        }
    }
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Tensor index of the spin configuration whose up sites are the ones of `up`.
pub fn tensor_index(up: &FockString) -> usize {
    let n = up.len();
    (0..n)
        .filter(|&k| !up.is_occupied(k))
        .map(|k| 1usize << (n - 1 - k))
        .sum()
}

/// Inverse of [`tensor_index`].
pub fn up_sites(n_sites: usize, tensor: usize) -> FockString {
    let bits = (0..n_sites)
        .filter(|&k| tensor >> (n_sites - 1 - k) & 1 == 0)
        .fold(0u64, |acc, k| acc | 1 << k);
    FockString::new(n_sites, bits).expect("bits fit")
}

/// First sector-basis position of weight `p`.
pub fn sector_offset(n_sites: usize, p: usize) -> usize {
    (0..p).map(|q| sector_size(n_sites, q) as usize).sum()
}

/// Sector-basis position of a spin configuration given by its up sites.
pub fn sector_position(up: &FockString) -> usize {
    let idx = rank(up);
    sector_offset(up.len(), idx.weight) + idx.rank as usize - 1
}

/// `perm[sector position] = tensor index`.
pub fn sector_to_tensor(n_sites: usize) -> Vec<usize> {
    (0..=n_sites)
        .flat_map(|p| weight_class(n_sites, p))
        .map(|up| tensor_index(&up))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_orders() {
        // Sector order: ↓↓, then ↑↓ (rank 1), ↓↑ (rank 2), then ↑↑.
        assert_eq!(sector_to_tensor(2), vec![3, 1, 2, 0]);
        assert_eq!(tensor_index(&"10".parse().unwrap()), 1);
        assert_eq!(up_sites(2, 2).to_string(), "01");
    }

    #[test]
    fn permutation_is_bijective() {
        for n in 1..=10 {
            let mut perm = sector_to_tensor(n);
            for (pos, &t) in perm.iter().enumerate() {
                assert_eq!(sector_position(&up_sites(n, t)), pos);
            }
            perm.sort_unstable();
            assert!(perm.iter().enumerate().all(|(i, &t)| i == t));
        }
    }

    #[test]
    fn diagnostics() {
        let mut m = DMatrix::<f64>::identity(4, 4) * 0.25;
        m[(0, 3)] = 0.1;
        let s = DenseState::from_real(2, Basis::SpinSector, &m).unwrap();
        assert!((s.hermiticity_error() - 0.1).abs() < 1e-15);
        assert!((s.trace().re - 1.0).abs() < 1e-15);
        assert!((s.min_eigenvalue() - 0.2).abs() < 1e-14);
        let t = s.to_spin_tensor().unwrap();
        assert_eq!(t.matrix()[(3, 0)].re, 0.1);
        assert!(s.max_abs_diff(&t).is_err());
        assert!(DenseState::from_real(3, Basis::Fock, &m).is_err());
    }
}
