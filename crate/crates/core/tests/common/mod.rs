#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zak_gkp::gkp::{approx_codeword, GKPCode};
use zak_gkp::zak_core::{zak_transform, ModularWavefunction, PositionStateDescriptor, ZakGrid};

pub const M_MAX: usize = 16;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized state with independent uniform real and imaginary parts.
pub fn random_state(grid: ZakGrid, rng: &mut ChaCha8Rng) -> ModularWavefunction {
    let samples = ndarray::Array2::from_shape_simple_fn((grid.nu(), grid.nv()), || {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    ModularWavefunction::new(grid, samples).unwrap().normalized().unwrap()
}

pub fn max_diff(x: &ModularWavefunction, y: &ModularWavefunction) -> f64 {
    assert_eq!(x.grid(), y.grid());
    x.samples().iter().zip(y.samples()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

pub fn transform(desc: &PositionStateDescriptor, grid: &ZakGrid) -> ModularWavefunction {
    zak_transform(desc, grid, M_MAX).unwrap().wavefunction
}

/// Vacuum plus approximate codewords for Δ ∈ {0.2, 0.3, 0.4} and ℓ ∈ {0, 1}.
pub fn logical_corpus(code: &GKPCode) -> Vec<(String, PositionStateDescriptor)> {
    let mut out = vec![("vacuum".to_string(), PositionStateDescriptor::vacuum())];
    for delta in [0.2, 0.3, 0.4] {
        for l in 0..2 {
            out.push((format!("gkp-approx:{delta}:{l}"), approx_codeword(code, l, delta).unwrap()));
        }
    }
    out
}
