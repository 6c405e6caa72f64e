//! Reduced states at N = 8 against a dense route that never touches the D blocks.

mod common;

use xxchain::chain::{ChainSpec, ModeTable};
use xxchain::oracle::{fock_state, fock_to_tensor, partial_trace_pair};
use xxchain::reduced_density::{xstate_from_rep, xstate_lazy};
use xxchain::spin_rep::SpinRepresentation;
use xxchain::steady_state::{steady_factors, BathSpec};

fn check(spec: &ChainSpec, baths: &BathSpec, pairs: &[(usize, usize)]) {
    let modes = ModeTable::new(spec);
    let factors = steady_factors(&modes, baths).unwrap();
    let rep = SpinRepresentation::new(&modes).unwrap();
    let rho = fock_to_tensor(&modes, &fock_state(&factors).unwrap()).unwrap();
    for &(r, s) in pairs {
        let x = xstate_from_rep(&rep, &factors, r, s).unwrap();
        let m = partial_trace_pair(&rho, r, s).unwrap();
        assert!((m[(0, 0)].re - x.a).abs() < 1e-12);
        assert!((m[(1, 1)].re - x.b).abs() < 1e-12);
        assert!((m[(2, 2)].re - x.d).abs() < 1e-12);
        assert!((m[(3, 3)].re - x.e).abs() < 1e-12);
        assert!((m[(1, 2)].re - x.c).abs() < 1e-12);
        assert!(m[(0, 3)].norm() < 1e-12 && m[(0, 1)].norm() < 1e-12);
    }
}

#[test]
fn eight_sites_random_draws() {
    let mut rng = common::rng(81);
    for _ in 0..3 {
        let d = common::random_draw(&mut rng, 8);
        check(&d.spec, &d.baths, &[(0, 1), (2, 3), (0, 7), (1, 5)]);
    }
}

#[test]
fn weak_coherence_at_large_field_is_real() {
    // Δ = 50 with g pinned near the Δ = 15 bound: small but nonzero concurrence.
    let g = ChainSpec::near_saturation(8, 15.0, 0.98).unwrap().g();
    let spec = ChainSpec::new(8, 50.0, g).unwrap();
    let baths = BathSpec::equal_weights(8, 0.0, 10.0).unwrap();
    check(&spec, &baths, &[(2, 3)]);
    let modes = ModeTable::new(&spec);
    let f = steady_factors(&modes, &baths).unwrap();
    let c = xstate_lazy(&modes, &f, 2, 3).unwrap().concurrence();
    assert!((c - 6.090197e-5).abs() < 1e-10, "{c}");
}

#[test]
fn lazy_minors_match_blocks() {
    let mut rng = common::rng(82);
    for n in [4, 7, 10] {
        let d = common::random_draw(&mut rng, n);
        let f = steady_factors(&d.modes, &d.baths).unwrap();
        let rep = SpinRepresentation::new(&d.modes).unwrap();
        for r in 0..n {
            for s in r + 1..n {
                let a = xstate_from_rep(&rep, &f, r, s).unwrap();
                let b = xstate_lazy(&d.modes, &f, r, s).unwrap();
                for (u, v) in [(a.a, b.a), (a.b, b.b), (a.c, b.c), (a.d, b.d), (a.e, b.e)] {
                    assert!((u - v).abs() < 1e-12);
                }
            }
        }
    }
}
