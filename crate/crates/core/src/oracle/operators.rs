//! Spin-basis operators and the Fock-to-spin change of basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::{eigen_energy, ChainSpec, FockString, ModeTable};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest N accepted by the dense spin-basis constructions.
pub const OPERATOR_LIMIT: usize = 10;

pub(crate) fn check_size(what: &'static str, n_sites: usize, limit: usize) -> Result<()> {
    if n_sites > limit {
        Err(Error::SizeLimit {
            what,
            n_sites,
            limit,
        })
    } else {
        Ok(())
    }
}

pub fn real(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// σz = diag(1, −1) in (↑, ↓) order.
pub fn pauli_z() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// σ+ = |↑⟩⟨↓|.
pub fn sigma_plus() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])
}

pub fn sigma_minus() -> DMatrix<f64> {
    sigma_plus().transpose()
}

/// `op` acting on site `k` (0-based, most significant tensor factor first).
pub fn site_operator(n_sites: usize, k: usize, op: &DMatrix<f64>) -> DMatrix<f64> {
    let left = DMatrix::<f64>::identity(1 << k, 1 << k);
    let right = DMatrix::<f64>::identity(1 << (n_sites - k - 1), 1 << (n_sites - k - 1));
    left.kronecker(op).kronecker(&right)
}

/// g Σ (σx σx + σy σy) + Δ Σ σz.
pub fn spin_hamiltonian(spec: &ChainSpec) -> Result<DMatrix<f64>> {
    let n = spec.n_sites();
    check_size("spin Hamiltonian", n, OPERATOR_LIMIT)?;
    let dim = 1 << n;
    let mut h = DMatrix::zeros(dim, dim);
    for k in 0..n {
        h += site_operator(n, k, &pauli_z()) * spec.delta();
    }
    for k in 0..n - 1 {
        let hop = site_operator(n, k, &sigma_plus()) * site_operator(n, k + 1, &sigma_minus());
        // σxσx + σyσy = 2(σ+σ− + σ−σ+).
        h += (&hop + hop.transpose()) * (2.0 * spec.g());
    }
    Ok(h)
}

/// Jordan–Wigner a†_j = Π_{k<j} (−σz^k) σ+^j.
pub fn jw_creator(n_sites: usize, j: usize) -> DMatrix<f64> {
    let mut op = site_operator(n_sites, j, &sigma_plus());
    for k in 0..j {
        op = site_operator(n_sites, k, &(-pauli_z())) * op;
    }
    op
}

/// b†_ℓ = Σ_j u_ℓj a†_j.
pub fn mode_creator(modes: &ModeTable, l: usize) -> DMatrix<f64> {
    let n = modes.n_sites();
    let dim = 1 << n;
    (0..n).fold(DMatrix::zeros(dim, dim), |acc, j| {
        acc + jw_creator(n, j) * modes.u(l, j)
    })
}

/// Columns are the Fock states b†_{i_1} … b†_{i_p} |↓…↓⟩ (i_1 < … < i_p),
/// indexed by their occupation bits, written in the spin tensor basis.
pub fn fock_to_spin(modes: &ModeTable) -> Result<DMatrix<f64>> {
    let n = modes.n_sites();
    check_size("Fock-to-spin transform", n, OPERATOR_LIMIT)?;
    let dim = 1usize << n;
    let creators: Vec<DMatrix<f64>> = (0..n).map(|l| mode_creator(modes, l)).collect();
    let mut w = DMatrix::zeros(dim, dim);
    for f in FockString::all(n) {
        let mut v = nalgebra::DVector::<f64>::zeros(dim);
        v[dim - 1] = 1.0;
        let ones: Vec<usize> = f.ones().collect();
        for &l in ones.iter().rev() {
            v = &creators[l] * v;
        }
        w.set_column(f.bits() as usize, &v);
    }
    Ok(w)
}

/// Fock-basis Hamiltonian diag(E_n).
pub fn fock_hamiltonian(spec: &ChainSpec) -> Result<DMatrix<f64>> {
    let n = spec.n_sites();
    check_size("Fock Hamiltonian", n, OPERATOR_LIMIT)?;
    let energies = FockString::all(n)
        .map(|f| eigen_energy(spec, &f))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_diagonal(&energies.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::tensor_index;

    #[test]
    fn three_site_eigenvector() {
        // |100⟩ = (|↑↓↓⟩ + √2 |↓↑↓⟩ + |↓↓↑⟩)/2.
        let modes = ModeTable::new(&ChainSpec::new(3, 1.0, 0.2).unwrap());
        let w = fock_to_spin(&modes).unwrap();
        let col = w.column(0b001);
        let t = |s: &str| tensor_index(&s.parse().unwrap());
        assert!((col[t("100")] - 0.5).abs() < 1e-15);
        assert!((col[t("010")] - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        assert!((col[t("001")] - 0.5).abs() < 1e-15);
        assert!((col.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transform_diagonalizes_the_hamiltonian() {
        for n in 2..=6 {
            let spec = ChainSpec::near_saturation(n, 1.7, 0.9).unwrap();
            let modes = ModeTable::new(&spec);
            let w = fock_to_spin(&modes).unwrap();
            let h = spin_hamiltonian(&spec).unwrap();
            let e = fock_hamiltonian(&spec).unwrap();
            assert!((&h * &w - &w * e).abs().max() < 1e-12, "N={n}");
            let dim = 1 << n;
            assert!(
                (w.transpose() * &w - DMatrix::identity(dim, dim))
                    .abs()
                    .max()
                    < 1e-13
            );
        }
    }

    #[test]
    fn jordan_wigner_anticommutes() {
        let n = 4;
        for i in 0..n {
            for j in 0..n {
                let (ai, aj) = (jw_creator(n, i), jw_creator(n, j));
                let anti = &ai.transpose() * &aj + &aj * ai.transpose();
                let expected = if i == j {
                    DMatrix::identity(16, 16)
                } else {
                    DMatrix::zeros(16, 16)
                };
                assert!((anti - expected).abs().max() < 1e-15);
            }
        }
    }

    #[test]
    fn size_limits() {
        let spec = ChainSpec::new(OPERATOR_LIMIT + 1, 1.0, 0.1).unwrap();
        assert!(spin_hamiltonian(&spec).is_err());
        assert!(fock_to_spin(&ModeTable::new(&spec)).is_err());
    }
}
