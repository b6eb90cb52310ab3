#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specgan_core::numerics::{HiddenActivation, Matrix, MlpParams, OutputActivation, DEFAULT_LEAKY_SLOPE};

pub mod grad_checks;
pub mod oracles;

pub const FD_STEP: f64 = 1e-5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-scale..scale)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

/// Random network with random (non-zero) biases so the kinks move around.
pub fn random_net(rng: &mut ChaCha8Rng, dims: &[usize], output: OutputActivation) -> MlpParams {
    let mut net = MlpParams::init(dims, HiddenActivation::LeakyRelu(DEFAULT_LEAKY_SLOPE), output, rng).unwrap();
    for i in 0..net.param_count() {
        let v = net.flat_get(i) + rng.random_range(-0.3..0.3);
        net.flat_set(i, v);
    }
    net
}

/// Central difference of `f` around `x0` by perturbing one coordinate.
pub fn central_difference(mut f: impl FnMut(f64) -> f64, x0: f64) -> f64 {
    (f(x0 + FD_STEP) - f(x0 - FD_STEP)) / (2.0 * FD_STEP)
}

/// Relative agreement with a small absolute floor for gradients that are ~0.
pub fn close(analytic: f64, numeric: f64, rel: f64) -> bool {
    let scale = analytic.abs().max(numeric.abs());
    (analytic - numeric).abs() <= rel * scale + 1e-8
}

/// Outputs of `f` are compared to the numeric gradient of each parameter of `net`.
pub fn check_param_grads(
    net: &MlpParams,
    analytic: &[f64],
    rel: f64,
    mut loss: impl FnMut(&MlpParams) -> f64,
) -> Result<(), String> {
    let mut probe = net.clone();
    for i in 0..net.param_count() {
        let x0 = net.flat_get(i);
        let numeric = central_difference(
            |v| {
                probe.flat_set(i, v);
                loss(&probe)
            },
            x0,
        );
        probe.flat_set(i, x0);
        if !close(analytic[i], numeric, rel) {
            return Err(format!("param {i}: analytic {} vs numeric {numeric}", analytic[i]));
        }
    }
    Ok(())
}
