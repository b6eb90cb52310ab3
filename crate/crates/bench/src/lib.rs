//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specgan_core::numerics::{HiddenActivation, Matrix, MlpParams, OutputActivation, DEFAULT_LEAKY_SLOPE};

/// Deterministic values in [0, 1).
pub fn inputs(rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|i| ((i * 37) % 101) as f64 / 101.0).collect();
    Matrix::from_vec(rows, cols, data).expect("finite inputs")
}

/// Four-layer network of the given hidden width.
pub fn network(width: usize, input: usize, output: usize, activation: OutputActivation) -> MlpParams {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    MlpParams::init(
        &[input, width, width, width, output],
        HiddenActivation::LeakyRelu(DEFAULT_LEAKY_SLOPE),
        activation,
        &mut rng,
    )
    .expect("valid dims")
}

pub fn bench_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
