//! Observables, partial traces and basis changes of dense states.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use super::operators::{
    check_size, fock_to_spin, pauli_z, real, sigma_minus, sigma_plus, site_operator,
    spin_hamiltonian, CMatrix, OPERATOR_LIMIT,
};
use crate::chain::{ChainSpec, FockString, ModeTable};
use crate::dense::{Basis, DenseState};
use crate::error::{Error, Result};
use crate::steady_state::SteadyFactors;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinObservable {
    /// σz on site k (0-based).
    SigmaZ(usize),
    /// J^(k,k+1) = 4i(σ−^k σ+^{k+1} − σ+^k σ−^{k+1}).
    Current(usize),
    Energy,
}

/// The observable as a dense operator in the spin tensor basis.
pub fn spin_observable(spec: &ChainSpec, kind: SpinObservable) -> Result<CMatrix> {
    let n = spec.n_sites();
    check_size("spin observable", n, OPERATOR_LIMIT)?;
    match kind {
        SpinObservable::SigmaZ(k) => {
            check_site(n, k)?;
            Ok(real(&site_operator(n, k, &pauli_z())))
        }
        SpinObservable::Current(k) => {
            check_site(n, k + 1)?;
            let forward =
                site_operator(n, k, &sigma_minus()) * site_operator(n, k + 1, &sigma_plus());
            let backward =
                site_operator(n, k, &sigma_plus()) * site_operator(n, k + 1, &sigma_minus());
            Ok(real(&(forward - backward)) * Complex64::new(0.0, 4.0))
        }
        SpinObservable::Energy => Ok(real(&spin_hamiltonian(spec)?)),
    }
}

fn check_site(n: usize, k: usize) -> Result<()> {
    if k < n {
        Ok(())
    } else {
        Err(Error::SiteOutOfRange {
            site: k + 1,
            n_sites: n,
        })
    }
}

/// Tr(ρ O).
pub fn expectation(rho: &DenseState, op: &CMatrix) -> Complex64 {
    (rho.matrix() * op).trace()
}

/// Σ Λ_n |n⟩⟨n| in the Fock basis.
pub fn fock_state(factors: &SteadyFactors) -> Result<DenseState> {
    let n = factors.n_modes();
    check_size("dense Fock state", n, OPERATOR_LIMIT)?;
    let diag: Vec<Complex64> = FockString::all(n)
        .map(|f| Complex64::new(factors.eigenvalue(&f), 0.0))
        .collect();
    DenseState::new(n, Basis::Fock, DMatrix::from_diagonal(&diag.into()))
}

/// Fock-basis state rewritten in the spin tensor basis, W ρ Wᵀ.
pub fn fock_to_tensor(modes: &ModeTable, rho: &DenseState) -> Result<DenseState> {
    if rho.basis() != Basis::Fock {
        return rho.to_spin_tensor();
    }
    let w = real(&fock_to_spin(modes)?);
    DenseState::new(
        rho.n_sites(),
        Basis::SpinTensor,
        &w * rho.matrix() * w.transpose(),
    )
}

/// Any representation of a state, in the spin tensor basis.
pub fn to_tensor(modes: &ModeTable, rho: &DenseState) -> Result<DenseState> {
    match rho.basis() {
        Basis::Fock => fock_to_tensor(modes, rho),
        _ => rho.to_spin_tensor(),
    }
}

/// Reduced state of sites r < s (0-based) in the order (↑↑, ↑↓, ↓↑, ↓↓).
pub fn partial_trace_pair(rho: &DenseState, r: usize, s: usize) -> Result<Matrix4<Complex64>> {
    let n = rho.n_sites();
    if !(r < s && s < n) {
        return Err(Error::InvalidPair {
            r: r + 1,
            s: s + 1,
            n_sites: n,
        });
    }
    let tensor = match rho.basis() {
        Basis::Fock => {
            return Err(Error::Oracle(
                "convert a Fock-basis state with fock_to_tensor first".into(),
            ))
        }
        _ => rho.to_spin_tensor()?,
    };
    let m = tensor.matrix();
    let (br, bs) = (n - 1 - r, n - 1 - s);
    let digit = |t: usize| 2 * (t >> br & 1) + (t >> bs & 1);
    let rest = |t: usize| t & !(1 << br) & !(1 << bs);
    let mut out = Matrix4::zeros();
    let dim = 1usize << n;
    for i in 0..dim {
        for j in 0..dim {
            if rest(i) == rest(j) {
                out[(digit(i), digit(j))] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// e^{−βH}/Z in the spin tensor basis from a dense diagonalization.
pub fn gibbs_dense(spec: &ChainSpec, beta: f64) -> Result<DenseState> {
    let h = spin_hamiltonian(spec)?;
    let eig = SymmetricEigen::new(h);
    let e_min = eig.eigenvalues.min();
    let weights = eig.eigenvalues.map(|e| (-beta * (e - e_min)).exp());
    let z = weights.sum();
    let v = &eig.eigenvectors;
    let rho = v * DMatrix::from_diagonal(&(weights / z)) * v.transpose();
    DenseState::new(spec.n_sites(), Basis::SpinTensor, real(&rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady_state::{steady_factors, BathSpec};

    #[test]
    fn all_down_reduces_to_down_down() {
        let spec = ChainSpec::new(4, 1.0, 0.2).unwrap();
        let modes = ModeTable::new(&spec);
        let f = steady_factors(&modes, &BathSpec::equal_weights(4, 0.0, 0.0).unwrap()).unwrap();
        let rho = fock_to_tensor(&modes, &fock_state(&f).unwrap()).unwrap();
        let red = partial_trace_pair(&rho, 1, 3).unwrap();
        assert!((red[(3, 3)].re - 1.0).abs() < 1e-15);
        assert!(red.iter().map(|z| z.norm()).sum::<f64>() - 1.0 < 1e-15);
    }

    #[test]
    fn current_vanishes_on_eigenstates() {
        let spec = ChainSpec::near_saturation(4, 1.0, 0.9).unwrap();
        let modes = ModeTable::new(&spec);
        let w = fock_to_spin(&modes).unwrap();
        for k in 0..3 {
            let j = spin_observable(&spec, SpinObservable::Current(k)).unwrap();
            for col in 0..16 {
                let v = real(&DMatrix::from_column_slice(16, 1, w.column(col).as_slice()));
                let value = (v.adjoint() * &j * &v)[(0, 0)];
                assert!(value.norm() < 1e-14);
            }
        }
        assert!(spin_observable(&spec, SpinObservable::Current(3)).is_err());
    }

    #[test]
    fn reduced_trace_is_preserved() {
        let spec = ChainSpec::near_saturation(4, 1.0, 0.9).unwrap();
        let rho = gibbs_dense(&spec, 0.7).unwrap();
        for (r, s) in [(0, 1), (0, 3), (2, 3)] {
            let red = partial_trace_pair(&rho, r, s).unwrap();
            assert!((red.trace() - rho.trace()).norm() < 1e-14);
        }
        assert!(partial_trace_pair(&rho, 2, 2).is_err());
    }
}
