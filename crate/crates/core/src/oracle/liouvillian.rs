//! Vectorized generator L[ρ] = −i[H, ρ] + D[ρ] and its null space.
//!
//! Vectorization is column-major: entry (i, j) of ρ sits at j·d + i, so
//! vec(AρB) = (Bᵀ ⊗ A) vec(ρ).

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

use super::lindblad::{dissipator_apply, LindbladSet};
use super::operators::{check_size, fock_hamiltonian, real, spin_hamiltonian, CMatrix};
use crate::chain::ChainSpec;
use crate::dense::{Basis, DenseState};
use crate::error::{Error, Result};

/// Largest N for which the 4^N × 4^N generator is built.
pub const SUPEROPERATOR_LIMIT: usize = 5;

/// Relative singular-value threshold defining the numerical kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-10;

fn nonzeros(m: &CMatrix) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if z.norm() != 0.0 {
                out.push((i, j, z));
            }
        }
    }
    out
}

/// Adds `coeff · (Bᵀ ⊗ A)` to `sup`.
fn add_sandwich(
    sup: &mut CMatrix,
    d: usize,
    coeff: Complex64,
    a: &[(usize, usize, Complex64)],
    b: &[(usize, usize, Complex64)],
) {
    for &(i, k, aik) in a {
        for &(l, j, blj) in b {
            sup[(j * d + i, l * d + k)] += coeff * aik * blj;
        }
    }
}

fn identity_entries(d: usize) -> Vec<(usize, usize, Complex64)> {
    (0..d).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect()
}

/// Hamiltonian in the basis of the Lindblad set.
pub fn hamiltonian_for(spec: &ChainSpec, basis: Basis) -> Result<CMatrix> {
    match basis {
        Basis::Fock => Ok(real(&fock_hamiltonian(spec)?)),
        Basis::SpinTensor => Ok(real(&spin_hamiltonian(spec)?)),
        Basis::SpinSector => Err(Error::Oracle(
            "the generator is built in the Fock or tensor basis".into(),
        )),
    }
}

pub fn generator_matrix(hamiltonian: &CMatrix, set: &LindbladSet) -> Result<CMatrix> {
    check_size("vectorized generator", set.n_sites, SUPEROPERATOR_LIMIT)?;
    let d = hamiltonian.nrows();
    let mut sup = CMatrix::zeros(d * d, d * d);
    let id = identity_entries(d);
    let h = nonzeros(hamiltonian);
    let minus_i = Complex64::new(0.0, -1.0);
    add_sandwich(&mut sup, d, minus_i, &h, &id);
    add_sandwich(&mut sup, d, -minus_i, &id, &h);
    let half = Complex64::new(-0.5, 0.0);
    for t in &set.terms {
        let up = &t.raising;
        let down = up.adjoint();
        let a_dag_a = nonzeros(&(up * &down));
        let a_a_dag = nonzeros(&(&down * up));
        let (up_nz, down_nz) = (nonzeros(up), nonzeros(&down));
        let c = Complex64::new(set.lambda_sq * t.rate_down, 0.0);
        let ct = Complex64::new(set.lambda_sq * t.rate_up, 0.0);
        add_sandwich(&mut sup, d, c, &down_nz, &up_nz);
        add_sandwich(&mut sup, d, c * half, &a_dag_a, &id);
        add_sandwich(&mut sup, d, c * half, &id, &a_dag_a);
        add_sandwich(&mut sup, d, ct, &up_nz, &down_nz);
        add_sandwich(&mut sup, d, ct * half, &a_a_dag, &id);
        add_sandwich(&mut sup, d, ct * half, &id, &a_a_dag);
    }
    Ok(sup)
}

/// −i[H, ρ] + D[ρ] applied directly.
pub fn apply_generator(
    hamiltonian: &CMatrix,
    set: &LindbladSet,
    rho: &DenseState,
) -> Result<DenseState> {
    let r = rho.matrix();
    let commutator = (hamiltonian * r - r * hamiltonian) * Complex64::new(0.0, -1.0);
    let diss = dissipator_apply(set, rho)?;
    DenseState::new(rho.n_sites(), rho.basis(), commutator + diss.matrix())
}

pub fn vectorize(m: &CMatrix) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &[Complex64], d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v)
}

/// Numerical null space of a square matrix.
#[derive(Debug, Clone)]
pub struct KernelReport {
    pub dimension: usize,
    pub sigma_max: f64,
    /// Largest singular value counted as zero (0 when the kernel is empty).
    pub largest_null_sigma: f64,
    /// Smallest singular value above the threshold.
    pub smallest_nonzero_sigma: f64,
    pub vectors: Vec<nalgebra::DVector<Complex64>>,
    /// Sizes of the independent blocks the SVD was split into.
    pub block_sizes: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Splits the matrix into the connected components of its sparsity graph and
/// takes the SVD of each block; the threshold is relative to the global σ_max.
pub fn kernel_blocks(m: &CMatrix) -> KernelReport {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    for j in 0..n {
        for i in 0..n {
            if m[(i, j)].norm() != 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut components: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        components.entry(root).or_default().push(i);
    }
    let blocks: Vec<Vec<usize>> = components.into_values().collect();
    let svds: Vec<(Vec<usize>, SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>)> = blocks
        .into_iter()
        .map(|idx| {
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])]);
            let svd = SVD::new(sub, false, true);
            (idx, svd)
        })
        .collect();
    let sigma_max = svds
        .iter()
        .flat_map(|(_, s)| s.singular_values.iter().copied())
        .fold(0.0, f64::max);
    collect_kernel(n, sigma_max, &svds)
}

/// Single dense SVD of the whole matrix, for cross-checking [`kernel_blocks`].
pub fn kernel_dense(m: &CMatrix) -> KernelReport {
    let idx: Vec<usize> = (0..m.nrows()).collect();
    let svd = SVD::new(m.clone(), false, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    collect_kernel(m.nrows(), sigma_max, &[(idx, svd)])
}

type BlockSvd = SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>;

fn collect_kernel(n: usize, sigma_max: f64, svds: &[(Vec<usize>, BlockSvd)]) -> KernelReport {
    let threshold = KERNEL_THRESHOLD * sigma_max;
    let mut report = KernelReport {
        dimension: 0,
        sigma_max,
        largest_null_sigma: 0.0,
        smallest_nonzero_sigma: f64::INFINITY,
        vectors: Vec::new(),
        block_sizes: svds.iter().map(|(idx, _)| idx.len()).collect(),
    };
    for (idx, svd) in svds {
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        for (k, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma <= threshold {
                report.dimension += 1;
                report.largest_null_sigma = report.largest_null_sigma.max(sigma);
                let mut v = nalgebra::DVector::zeros(n);
                for (a, &i) in idx.iter().enumerate() {
                    v[i] = v_t[(k, a)].conj();
                }
                report.vectors.push(v);
            } else {
                report.smallest_nonzero_sigma = report.smallest_nonzero_sigma.min(sigma);
            }
        }
    }
    report
}

/// Normalizes a null vector into a unit-trace Hermitian state.
pub fn state_from_vector(
    n_sites: usize,
    basis: Basis,
    v: &nalgebra::DVector<Complex64>,
) -> Result<DenseState> {
    let d = 1usize << n_sites;
    let m = unvectorize(v.as_slice(), d);
    let tr = m.trace();
    if tr.norm() < 1e-14 {
        return Err(Error::Oracle("kernel vector is traceless".into()));
    }
    let m = m / tr;
    let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DenseState::new(n_sites, basis, herm)
}

/// Kernel of the full generator in the basis of `set`.
pub fn kernel_report(spec: &ChainSpec, set: &LindbladSet) -> Result<KernelReport> {
    let h = hamiltonian_for(spec, set.basis)?;
    Ok(kernel_blocks(&generator_matrix(&h, set)?))
}

/// The unique stationary state and the kernel dimension (always 1 on success).
pub fn kernel_state(spec: &ChainSpec, set: &LindbladSet) -> Result<(DenseState, usize)> {
    let report = kernel_report(spec, set)?;
    if report.dimension != 1 {
        return Err(Error::AmbiguousKernel {
            dimension: report.dimension,
        });
    }
    Ok((
        state_from_vector(spec.n_sites(), set.basis, &report.vectors[0])?,
        1,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ModeTable;
    use crate::oracle::lindblad::{build_lindblad_set, spectral_lindblad_set};
    use crate::steady_state::BathSpec;

    #[test]
    fn vectorized_and_direct_generators_agree() {
        let spec = ChainSpec::near_saturation(3, 1.3, 0.8).unwrap();
        let modes = ModeTable::new(&spec);
        let baths = BathSpec::new(0.7, 2.2, vec![1.0, 0.5, 1.5], vec![0.3, 1.0, 0.8], 0.9).unwrap();
        for set in [
            build_lindblad_set(&spec, &modes, &baths).unwrap(),
            spectral_lindblad_set(&spec, &modes, &baths).unwrap(),
        ] {
            let h = hamiltonian_for(&spec, set.basis).unwrap();
            let sup = generator_matrix(&h, &set).unwrap();
            let d = 8;
            let rho = CMatrix::from_fn(d, d, |i, j| {
                Complex64::new((i * 7 + j * 3) as f64 * 0.01, (i as f64 - j as f64) * 0.02)
            });
            let direct = apply_generator(
                &h,
                &set,
                &DenseState::new(3, set.basis, rho.clone()).unwrap(),
            )
            .unwrap();
            let via = unvectorize((&sup * vectorize(&rho)).as_slice(), d);
            assert!((direct.matrix() - via).map(|z| z.norm()).max() < 1e-12);
        }
    }

    #[test]
    fn block_and_dense_kernels_agree() {
        let spec = ChainSpec::near_saturation(3, 2.0, 0.6).unwrap();
        let modes = ModeTable::new(&spec);
        let baths = BathSpec::equal_weights(3, 0.5, 4.0).unwrap();
        let set = spectral_lindblad_set(&spec, &modes, &baths).unwrap();
        let sup = generator_matrix(&hamiltonian_for(&spec, set.basis).unwrap(), &set).unwrap();
        let blocks = kernel_blocks(&sup);
        let dense = kernel_dense(&sup);
        assert_eq!(blocks.dimension, 1);
        assert_eq!(dense.dimension, 1);
        assert!(blocks.block_sizes.len() > 1);
        let a = state_from_vector(3, set.basis, &blocks.vectors[0]).unwrap();
        let b = state_from_vector(3, set.basis, &dense.vectors[0]).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-10);
    }

    #[test]
    fn superoperator_limit() {
        let spec = ChainSpec::near_saturation(6, 2.0, 0.6).unwrap();
        let modes = ModeTable::new(&spec);
        let baths = BathSpec::equal_weights(6, 0.5, 4.0).unwrap();
        let set = build_lindblad_set(&spec, &modes, &baths).unwrap();
        assert!(matches!(
            kernel_state(&spec, &set),
            Err(Error::SizeLimit { .. })
        ));
    }
}
