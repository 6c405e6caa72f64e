//! Stationary transport: per-site sink/source terms and bath heat flows.
//!
//! With w_α = h_α(ω_ℓ)², n_α = n_α(ω_ℓ) and R_ℓ as in [`crate::steady_state`]:
//!
//! ```text
//! Q_L^(k) = 4πλ² Σ_ℓ u²_kℓ u²_1ℓ w_L w_R (n_L − n_R) / R_ℓ
//! Q_R^(k) = 4πλ² Σ_ℓ u²_kℓ u²_Nℓ w_L w_R (n_R − n_L) / R_ℓ
//! H_L     = 2πλ² Σ_ℓ ω_ℓ u²_1ℓ w_L w_R (n_L − n_R) / R_ℓ
//! H_R     = 2πλ² Σ_ℓ ω_ℓ u²_Nℓ w_L w_R (n_R − n_L) / R_ℓ
//! ```
//!
//! Q_α^(k) = Tr(D_α[ρ∞] σz^(k)) and H_α = Tr(D_α[ρ∞] H), D_α the dissipator of
//! bath α. At h_L = h_R these reduce to 2πλ² (resp. πλ²) times
//! Σ (…)(n_L − n_R)/(1 + n_L + n_R).

use std::f64::consts::PI;

use crate::chain::ModeTable;
use crate::error::{Error, Result};
use crate::steady_state::{occupations, BathSpec, SteadyFactors};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub q_left: Vec<f64>,
    pub q_right: Vec<f64>,
    pub heat_left: f64,
    pub heat_right: f64,
}

/// w_L w_R (n_L − n_R) / R_ℓ for every mode.
fn imbalance(modes: &ModeTable, baths: &BathSpec) -> Result<Vec<f64>> {
    let (nl, nr) = occupations(modes, baths)?;
    Ok((0..modes.n_sites())
        .map(|l| {
            let (wl, wr) = (baths.weight_left[l], baths.weight_right[l]);
            let r_total = wl * (1.0 + 2.0 * nl[l]) + wr * (1.0 + 2.0 * nr[l]);
            wl * wr * (nl[l] - nr[l]) / r_total
        })
        .collect())
}

fn check_site(modes: &ModeTable, k: usize) -> Result<()> {
    if k < modes.n_sites() {
        Ok(())
    } else {
        Err(Error::SiteOutOfRange {
            site: k + 1,
            n_sites: modes.n_sites(),
        })
    }
}

fn sink_source_from(modes: &ModeTable, lambda_sq: f64, imb: &[f64], k: usize) -> (f64, f64) {
    let last = modes.n_sites() - 1;
    let (mut left, mut right) = (0.0, 0.0);
    for (l, &x) in imb.iter().enumerate() {
        let ukl = modes.u(k, l).powi(2);
        left += ukl * modes.u(0, l).powi(2) * x;
        right -= ukl * modes.u(last, l).powi(2) * x;
    }
    (4.0 * PI * lambda_sq * left, 4.0 * PI * lambda_sq * right)
}

/// (Q_L^(k), Q_R^(k)) for site `k` (0-based).
pub fn sink_source(modes: &ModeTable, baths: &BathSpec, k: usize) -> Result<(f64, f64)> {
    check_site(modes, k)?;
    let imb = imbalance(modes, baths)?;
    Ok(sink_source_from(modes, baths.lambda_sq, &imb, k))
}

/// (H_L, H_R).
pub fn heat_flow(modes: &ModeTable, baths: &BathSpec) -> Result<(f64, f64)> {
    let imb = imbalance(modes, baths)?;
    Ok(heat_from(modes, baths.lambda_sq, &imb))
}

fn heat_from(modes: &ModeTable, lambda_sq: f64, imb: &[f64]) -> (f64, f64) {
    let last = modes.n_sites() - 1;
    let (mut left, mut right) = (0.0, 0.0);
    for (l, &x) in imb.iter().enumerate() {
        let w = modes.omega()[l];
        left += w * modes.u(0, l).powi(2) * x;
        right -= w * modes.u(last, l).powi(2) * x;
    }
    (2.0 * PI * lambda_sq * left, 2.0 * PI * lambda_sq * right)
}

pub fn flow_report(modes: &ModeTable, baths: &BathSpec) -> Result<FlowReport> {
    let imb = imbalance(modes, baths)?;
    let (q_left, q_right) = (0..modes.n_sites())
        .map(|k| sink_source_from(modes, baths.lambda_sq, &imb, k))
        .unzip();
    let (heat_left, heat_right) = heat_from(modes, baths.lambda_sq, &imb);
    Ok(FlowReport {
        q_left,
        q_right,
        heat_left,
        heat_right,
    })
}

/// Equal-weight sink/source, (n_L − n_R)/(1 + n_L + n_R) form.
pub fn sink_source_equal_weights(
    modes: &ModeTable,
    baths: &BathSpec,
    k: usize,
) -> Result<(f64, f64)> {
    check_site(modes, k)?;
    let (nl, nr) = occupations(modes, baths)?;
    let last = modes.n_sites() - 1;
    let (mut left, mut right) = (0.0, 0.0);
    for l in 0..modes.n_sites() {
        let x = (nl[l] - nr[l]) / (1.0 + nl[l] + nr[l]);
        left += modes.u(k, l).powi(2) * modes.u(0, l).powi(2) * x;
        right -= modes.u(k, l).powi(2) * modes.u(last, l).powi(2) * x;
    }
    let h2 = baths.weight_left[0];
    Ok((
        2.0 * PI * baths.lambda_sq * h2 * left,
        2.0 * PI * baths.lambda_sq * h2 * right,
    ))
}

/// ⟨a†_i a_j⟩ = Σ_ℓ u_iℓ u_jℓ λ^(ℓ)_1.
pub fn correlation(modes: &ModeTable, factors: &SteadyFactors, i: usize, j: usize) -> f64 {
    (0..modes.n_sites())
        .map(|l| modes.u(i, l) * modes.u(j, l) * factors.lam1[l])
        .sum()
}

/// ⟨J^(k,k+1)⟩ = 4i(⟨a†_{k+1} a_k⟩ − ⟨a†_k a_{k+1}⟩), which vanishes identically.
pub fn stationary_spin_current(
    modes: &ModeTable,
    factors: &SteadyFactors,
    k: usize,
) -> Result<f64> {
    if k + 1 >= modes.n_sites() {
        return Err(Error::SiteOutOfRange {
            site: k + 2,
            n_sites: modes.n_sites(),
        });
    }
    let imaginary_part =
        correlation(modes, factors, k + 1, k) - correlation(modes, factors, k, k + 1);
    Ok(4.0 * imaginary_part)
}

/// ⟨σz^(k)⟩ = 2 Σ_ℓ u²_kℓ λ^(ℓ)_1 − 1.
pub fn sigma_z_expectation(modes: &ModeTable, factors: &SteadyFactors, k: usize) -> Result<f64> {
    check_site(modes, k)?;
    Ok(2.0 * correlation(modes, factors, k, k) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainSpec;
    use crate::steady_state::steady_factors;
    use proptest::prelude::*;

    fn draw() -> impl Strategy<Value = (ModeTable, BathSpec)> {
        (
            2usize..=16,
            1.0f64..50.0,
            0.01f64..0.99,
            0.0f64..20.0,
            0.0f64..20.0,
            0.1f64..3.0,
        )
            .prop_flat_map(|(n, d, f, tl, tr, l2)| {
                let w = proptest::collection::vec(0.2f64..2.0, n);
                (Just((n, d, f, tl, tr, l2)), w.clone(), w)
            })
            .prop_map(|((n, d, f, tl, tr, l2), wl, wr)| {
                let modes = ModeTable::new(&ChainSpec::near_saturation(n, d, f).unwrap());
                (modes, BathSpec::new(tl, tr, wl, wr, l2).unwrap())
            })
    }

    proptest! {
        #[test]
        fn flows_are_antisymmetric((modes, baths) in draw()) {
            let rep = flow_report(&modes, &baths).unwrap();
            let scale = 1.0 + rep.heat_left.abs();
            prop_assert!((rep.heat_left + rep.heat_right).abs() < 1e-12 * scale);
            for k in 0..modes.n_sites() {
                prop_assert!((rep.q_left[k] + rep.q_right[k]).abs() < 1e-12);
            }
        }

        #[test]
        fn equal_temperatures_give_no_flow((modes, baths) in draw()) {
            let b = baths.with_temperatures(baths.temp_left, baths.temp_left).unwrap();
            let rep = flow_report(&modes, &b).unwrap();
            prop_assert_eq!(rep.heat_left, 0.0);
            prop_assert!(rep.q_left.iter().chain(&rep.q_right).all(|&q| q == 0.0));
        }

        #[test]
        fn heat_follows_the_gradient((modes, baths) in draw()) {
            let (hl, _) = heat_flow(&modes, &baths).unwrap();
            if baths.temp_left > baths.temp_right + 1e-3 {
                prop_assert!(hl > 0.0);
            } else if baths.temp_right > baths.temp_left + 1e-3 {
                prop_assert!(hl < 0.0);
            }
        }

        #[test]
        fn equal_weight_reduction((modes, baths) in draw(), h2 in 0.1f64..3.0) {
            let n = modes.n_sites();
            let b = BathSpec::new(baths.temp_left, baths.temp_right, vec![h2; n], vec![h2; n], baths.lambda_sq).unwrap();
            for k in 0..n {
                let (ql, qr) = sink_source(&modes, &b, k).unwrap();
                let (el, er) = sink_source_equal_weights(&modes, &b, k).unwrap();
                prop_assert!((ql - el).abs() < 1e-12 * (1.0 + el.abs()));
                prop_assert!((qr - er).abs() < 1e-12 * (1.0 + er.abs()));
            }
        }

        #[test]
        fn current_vanishes((modes, baths) in draw()) {
            let f = steady_factors(&modes, &baths).unwrap();
            for k in 0..modes.n_sites() - 1 {
                prop_assert_eq!(stationary_spin_current(&modes, &f, k).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn vacuum_magnetization() {
        let modes = ModeTable::new(&ChainSpec::new(4, 1.0, 0.3).unwrap());
        let f = steady_factors(&modes, &BathSpec::equal_weights(4, 0.0, 0.0).unwrap()).unwrap();
        for k in 0..4 {
            assert_eq!(sigma_z_expectation(&modes, &f, k).unwrap(), -1.0);
        }
        assert!(sigma_z_expectation(&modes, &f, 4).is_err());
        assert!(stationary_spin_current(&modes, &f, 3).is_err());
        assert!(sink_source(&modes, &BathSpec::equal_weights(4, 1.0, 0.0).unwrap(), 4).is_err());
    }
}
