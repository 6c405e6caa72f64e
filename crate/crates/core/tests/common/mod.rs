#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xxchain::{BathSpec, ChainSpec, ModeTable};

pub const SEED: u64 = 0x5eed_0c1a_2024;

pub fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

#[derive(Debug, Clone)]
pub struct Draw {
    pub spec: ChainSpec,
    pub modes: ModeTable,
    pub baths: BathSpec,
}

/// T_L, T_R ∈ [0, 20], Δ ∈ [1, 50], g = f·bound with f ∈ (0, 0.99],
/// per-mode weights h² ∈ [0.2, 2], λ² = 1.
pub fn random_draw(rng: &mut impl Rng, n: usize) -> Draw {
    let delta = rng.random_range(1.0..=50.0);
    let fraction = rng.random_range(1e-3..=0.99);
    let spec = ChainSpec::near_saturation(n, delta, fraction).unwrap();
    let modes = ModeTable::new(&spec);
    let (tl, tr) = (rng.random_range(0.0..=20.0), rng.random_range(0.0..=20.0));
    let wl: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..=2.0)).collect();
    let wr: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..=2.0)).collect();
    let baths = BathSpec::new(tl, tr, wl, wr, 1.0).unwrap();
    Draw { spec, modes, baths }
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}
