//! Lindblad operators of the two baths and the dissipator they generate.
//!
//! The left (right) bath couples to σx on site 1 (N). For each transition
//! frequency ω_ℓ the lowering operator A_α(ω_ℓ) carries the rates
//! C = 2π w_α (n_α + 1) and C̃ = 2π w_α n_α, and
//!
//! ```text
//! D[ρ] = λ² Σ_{α,ℓ} C (A ρ A† − ½{A†A, ρ}) + C̃ (A† ρ A − ½{A A†, ρ}).
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::operators::{
    check_size, real, sigma_plus, site_operator, spin_hamiltonian, CMatrix, OPERATOR_LIMIT,
};
use crate::chain::{ChainSpec, FockString, ModeTable};
use crate::dense::{Basis, DenseState};
use crate::error::{Error, Result};
use crate::steady_state::{occupations, BathSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bath {
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub struct LindbladTerm {
    pub bath: Bath,
    /// 0-based mode index ℓ − 1.
    pub mode: usize,
    pub omega: f64,
    /// A†_α(ω_ℓ).
    pub raising: CMatrix,
    /// C^(α)_{ω_ℓ}.
    pub rate_down: f64,
    /// C̃^(α)_{ω_ℓ}.
    pub rate_up: f64,
}

#[derive(Debug, Clone)]
pub struct LindbladSet {
    pub n_sites: usize,
    pub basis: Basis,
    pub lambda_sq: f64,
    pub terms: Vec<LindbladTerm>,
    /// Modes whose frequencies coincide within 1e-12·Δ.
    pub frequency_groups: Vec<Vec<usize>>,
}

fn rates(weight: f64, occupation: f64) -> (f64, f64) {
    (
        2.0 * PI * weight * (occupation + 1.0),
        2.0 * PI * weight * occupation,
    )
}

fn frequency_groups(modes: &ModeTable, tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (l, &w) in modes.omega().iter().enumerate() {
        match groups
            .iter_mut()
            .find(|g| (modes.omega()[g[0]] - w).abs() <= tol)
        {
            Some(g) => g.push(l),
            None => groups.push(vec![l]),
        }
    }
    groups
}

/// Closed-form operators in the Fock basis:
/// A†_L(ω_ℓ) = u_1ℓ Σ (−1)^{Σ_{j<ℓ} n_j} |n + 1_ℓ⟩⟨n|, and the right bath with
/// u_Nℓ and the parity of the modes above ℓ.
pub fn build_lindblad_set(
    spec: &ChainSpec,
    modes: &ModeTable,
    baths: &BathSpec,
) -> Result<LindbladSet> {
    let n = spec.n_sites();
    check_size("Lindblad operators", n, OPERATOR_LIMIT)?;
    spec.require_positive_frequencies(None)?;
    let (nl, nr) = occupations(modes, baths)?;
    let dim = 1usize << n;
    let mut terms = Vec::with_capacity(2 * n);
    for bath in [Bath::Left, Bath::Right] {
        for l in 0..n {
            let amplitude = match bath {
                Bath::Left => modes.u(0, l),
                Bath::Right => modes.u(n - 1, l),
            };
            let mut raising = CMatrix::zeros(dim, dim);
            for f in FockString::all(n).filter(|f| !f.is_occupied(l)) {
                let parity = match bath {
                    Bath::Left => (f.bits() & ((1u64 << l) - 1)).count_ones(),
                    Bath::Right => (f.bits() >> (l + 1)).count_ones(),
                };
                let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
                let target = f.with(l, true).bits() as usize;
                raising[(target, f.bits() as usize)] = Complex64::new(sign * amplitude, 0.0);
            }
            let (weight, occ) = match bath {
                Bath::Left => (baths.weight_left[l], nl[l]),
                Bath::Right => (baths.weight_right[l], nr[l]),
            };
            let (rate_down, rate_up) = rates(weight, occ);
            terms.push(LindbladTerm {
                bath,
                mode: l,
                omega: modes.omega()[l],
                raising,
                rate_down,
                rate_up,
            });
        }
    }
    Ok(LindbladSet {
        n_sites: n,
        basis: Basis::Fock,
        lambda_sq: baths.lambda_sq,
        terms,
        frequency_groups: frequency_groups(modes, 1e-12 * spec.delta()),
    })
}

/// Operators obtained numerically from the spin Hamiltonian:
/// A†_α(ω) = Σ_{E' − E = ω} P_{E'} σ+^α P_E, with P_E the eigenprojectors of a
/// dense diagonalization. Each positive Bohr frequency carrying a nonzero
/// operator is matched to a mode frequency to pick its coupling weight.
pub fn spectral_lindblad_set(
    spec: &ChainSpec,
    modes: &ModeTable,
    baths: &BathSpec,
) -> Result<LindbladSet> {
    let n = spec.n_sites();
    check_size("spectral Lindblad operators", n, OPERATOR_LIMIT)?;
    spec.require_positive_frequencies(None)?;
    let (nl, nr) = occupations(modes, baths)?;
    let h = spin_hamiltonian(spec)?;
    let scale = h.abs().max();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let cluster_tol = 1e-9 * scale;
    let mut levels: Vec<(f64, Vec<usize>)> = Vec::new();
    for &i in &order {
        let e = eig.eigenvalues[i];
        match levels.last_mut() {
            Some((e0, members)) if e - *e0 <= cluster_tol => members.push(i),
            _ => levels.push((e, vec![i])),
        }
    }
    let projectors: Vec<DMatrix<f64>> = levels
        .iter()
        .map(|(_, members)| {
            let v = eig.eigenvectors.select_columns(members.iter());
            &v * v.transpose()
        })
        .collect();
    let energies: Vec<f64> = levels
        .iter()
        .map(|(_, m)| m.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / m.len() as f64)
        .collect();

    let match_tol = 1e-8 * scale;
    let mut terms = Vec::with_capacity(2 * n);
    for bath in [Bath::Left, Bath::Right] {
        let site = if bath == Bath::Left { 0 } else { n - 1 };
        let plus = site_operator(n, site, &sigma_plus());
        let mut by_mode: Vec<Option<DMatrix<f64>>> = vec![None; n];
        for (lo, p_lo) in projectors.iter().enumerate() {
            let lifted = &plus * p_lo;
            for (hi, p_hi) in projectors.iter().enumerate().skip(lo + 1) {
                let piece = p_hi * &lifted;
                if piece.abs().max() < 1e-12 {
                    continue;
                }
                let bohr = energies[hi] - energies[lo];
                let mode = modes
                    .omega()
                    .iter()
                    .position(|&w| (w - bohr).abs() <= match_tol)
                    .ok_or_else(|| {
                        Error::Oracle(format!("Bohr frequency {bohr:e} carries no mode frequency"))
                    })?;
                let slot = by_mode[mode].get_or_insert_with(|| DMatrix::zeros(1 << n, 1 << n));
                *slot += piece;
            }
        }
        // Drop eigensolver round-off so the generator keeps its exact sparsity.
        for op in by_mode.iter_mut().flatten() {
            op.apply(|x| {
                if x.abs() < 1e-12 {
                    *x = 0.0;
                }
            });
        }
        for (l, op) in by_mode.into_iter().enumerate() {
            let op = op.ok_or_else(|| {
                Error::Oracle(format!(
                    "no transition found at omega_{} for bath {bath:?}",
                    l + 1
                ))
            })?;
            let (weight, occ) = match bath {
                Bath::Left => (baths.weight_left[l], nl[l]),
                Bath::Right => (baths.weight_right[l], nr[l]),
            };
            let (rate_down, rate_up) = rates(weight, occ);
            terms.push(LindbladTerm {
                bath,
                mode: l,
                omega: modes.omega()[l],
                raising: real(&op),
                rate_down,
                rate_up,
            });
        }
    }
    Ok(LindbladSet {
        n_sites: n,
        basis: Basis::SpinTensor,
        lambda_sq: baths.lambda_sq,
        terms,
        frequency_groups: frequency_groups(modes, 1e-12 * spec.delta()),
    })
}

fn check_basis(set: &LindbladSet, rho: &DenseState) -> Result<()> {
    if set.basis != rho.basis() || set.n_sites != rho.n_sites() {
        return Err(Error::Oracle(format!(
            "operators in {:?} (N = {}) cannot act on a {:?} state (N = {})",
            set.basis,
            set.n_sites,
            rho.basis(),
            rho.n_sites()
        )));
    }
    Ok(())
}

/// Full dissipator.
pub fn dissipator_apply(set: &LindbladSet, rho: &DenseState) -> Result<DenseState> {
    dissipator_apply_bath(set, None, rho)
}

/// Dissipator restricted to one bath when `bath` is given.
pub fn dissipator_apply_bath(
    set: &LindbladSet,
    bath: Option<Bath>,
    rho: &DenseState,
) -> Result<DenseState> {
    check_basis(set, rho)?;
    let r = rho.matrix();
    let mut out = CMatrix::zeros(r.nrows(), r.ncols());
    let half = Complex64::new(0.5, 0.0);
    for t in set
        .terms
        .iter()
        .filter(|t| bath.is_none_or(|b| b == t.bath))
    {
        let up = &t.raising;
        let down = up.adjoint();
        let a_dag_a = up * &down;
        let a_a_dag = &down * up;
        let emit = &down * r * up - (&a_dag_a * r + r * &a_dag_a) * half;
        let absorb = up * r * &down - (&a_a_dag * r + r * &a_a_dag) * half;
        out += emit * Complex64::new(t.rate_down, 0.0) + absorb * Complex64::new(t.rate_up, 0.0);
    }
    out *= Complex64::new(set.lambda_sq, 0.0);
    DenseState::new(rho.n_sites(), rho.basis(), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket_bra(n: usize, to: &str, from: &str) -> (usize, usize) {
        let a: FockString = to.parse().unwrap();
        let b: FockString = from.parse().unwrap();
        assert_eq!(a.len(), n);
        (a.bits() as usize, b.bits() as usize)
    }

    fn setup(n: usize) -> (ChainSpec, ModeTable, BathSpec) {
        let spec = ChainSpec::near_saturation(n, 2.0, 0.7).unwrap();
        let modes = ModeTable::new(&spec);
        (spec, modes, BathSpec::equal_weights(n, 1.0, 3.0).unwrap())
    }

    #[test]
    fn two_site_left_operator() {
        let (spec, modes, baths) = setup(2);
        let set = build_lindblad_set(&spec, &modes, &baths).unwrap();
        let op = &set.terms[0].raising;
        let s = 0.5f64.sqrt();
        assert!((op[ket_bra(2, "10", "00")].re - s).abs() < 1e-15);
        assert!((op[ket_bra(2, "11", "01")].re - s).abs() < 1e-15);
        assert_eq!(op.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn three_site_operators() {
        let (spec, modes, baths) = setup(3);
        let set = build_lindblad_set(&spec, &modes, &baths).unwrap();
        let s = 0.5f64.sqrt();
        let left2 = &set.terms[1].raising;
        for (to, from, sign) in [
            ("010", "000", 1.0),
            ("110", "100", -1.0),
            ("111", "101", -1.0),
            ("011", "001", 1.0),
        ] {
            assert!(
                (left2[ket_bra(3, to, from)].re - sign * s).abs() < 1e-15,
                "{to} {from}"
            );
        }
        let right1 = &set.terms[3].raising;
        for (to, from, sign) in [
            ("100", "000", 1.0),
            ("110", "010", -1.0),
            ("101", "001", -1.0),
            ("111", "011", 1.0),
        ] {
            assert!(
                (right1[ket_bra(3, to, from)].re - sign * 0.5).abs() < 1e-15,
                "{to} {from}"
            );
        }
    }

    #[test]
    fn number_operators_are_diagonal() {
        for n in 2..=5 {
            let (spec, modes, baths) = setup(n);
            let set = build_lindblad_set(&spec, &modes, &baths).unwrap();
            assert_eq!(set.frequency_groups.len(), n);
            for t in &set.terms {
                assert_eq!(
                    t.raising.iter().filter(|z| z.norm() > 0.0).count(),
                    1 << (n - 1)
                );
                let amp = if t.bath == Bath::Left {
                    modes.u(0, t.mode)
                } else {
                    modes.u(n - 1, t.mode)
                };
                assert!(t
                    .raising
                    .iter()
                    .all(|z| z.norm() == 0.0 || (z.norm() - amp.abs()).abs() < 1e-15));
                let number = &t.raising * t.raising.adjoint();
                for f in FockString::all(n) {
                    for g in FockString::all(n) {
                        let v = number[(f.bits() as usize, g.bits() as usize)].norm();
                        let expected = if f == g && f.is_occupied(t.mode) {
                            amp * amp
                        } else {
                            0.0
                        };
                        assert!((v - expected).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn spectral_operators_match_closed_form() {
        use super::super::operators::fock_to_spin;
        for n in 2..=4 {
            let (spec, modes, baths) = setup(n);
            let fock = build_lindblad_set(&spec, &modes, &baths).unwrap();
            let spin = spectral_lindblad_set(&spec, &modes, &baths).unwrap();
            let w = real(&fock_to_spin(&modes).unwrap());
            for (a, b) in fock.terms.iter().zip(&spin.terms) {
                assert_eq!((a.bath, a.mode), (b.bath, b.mode));
                let mapped = &w * &a.raising * w.transpose();
                let same = crate::dense::max_abs(&(&mapped - &b.raising));
                let flipped = crate::dense::max_abs(&(&mapped + &b.raising));
                assert!(same.min(flipped) < 1e-10, "N={n} {:?} {}", a.bath, a.mode);
                assert_eq!((a.rate_down, a.rate_up), (b.rate_down, b.rate_up));
            }
        }
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let (spec, modes, baths) = setup(2);
        let set = build_lindblad_set(&spec, &modes, &baths).unwrap();
        let rho = DenseState::new(2, Basis::SpinTensor, CMatrix::identity(4, 4)).unwrap();
        assert!(dissipator_apply(&set, &rho).is_err());
    }
}
