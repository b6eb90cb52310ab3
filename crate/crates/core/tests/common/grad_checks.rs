//! Finite-difference checks of the analytic gradients, shared by the unit
//! suite and the acceptance runner.

use super::*;
use rand::Rng;
use specgan_core::numerics::{
    critic_input_gradient, gradient_penalty_param_grads, mlp_backward, mlp_forward, softmax_cross_entropy, Matrix,
    OutputActivation,
};

fn weighted_sum(out: &Matrix, weights: &Matrix) -> f64 {
    out.as_slice().iter().zip(weights.as_slice()).map(|(a, b)| a * b).sum()
}

pub fn mlp_backward_cases(trials: u64) -> Result<(), String> {
    for trial in 0..trials {
        let mut r = rng(1000 + trial);
        let output = [OutputActivation::Identity, OutputActivation::Sigmoid, OutputActivation::Logits][trial as usize % 3];
        let net = random_net(&mut r, &[3, 5, 4, 2], output);
        let x = random_matrix(&mut r, 3, 3, 1.0);
        let w = random_matrix(&mut r, 3, 2, 1.0);
        let (_, cache) = mlp_forward(&net, &x).unwrap();
        let (grads, gx) = mlp_backward(&net, &cache, &w).unwrap();

        check_param_grads(&net, &grads.to_flat(), 1e-4, |n| weighted_sum(&n.predict(&x).unwrap(), &w))
            .map_err(|e| format!("mlp_backward trial {trial}: {e}"))?;

        for i in 0..x.as_slice().len() {
            let mut probe = x.clone();
            let numeric = central_difference(
                |v| {
                    probe.as_mut_slice()[i] = v;
                    weighted_sum(&net.predict(&probe).unwrap(), &w)
                },
                x.as_slice()[i],
            );
            if !close(gx.as_slice()[i], numeric, 1e-4) {
                return Err(format!("mlp_backward trial {trial} input {i}: {} vs {numeric}", gx.as_slice()[i]));
            }
        }
    }
    Ok(())
}

pub fn softmax_cross_entropy_cases(trials: u64) -> Result<(), String> {
    for trial in 0..trials {
        let mut r = rng(2000 + trial);
        let logits = random_matrix(&mut r, 4, 5, 3.0);
        let labels: Vec<usize> = (0..4).map(|_| r.random_range(0..5)).collect();
        let (loss, grad) = softmax_cross_entropy(&logits, &labels).unwrap();
        if loss < 0.0 {
            return Err(format!("negative cross-entropy {loss}"));
        }
        for i in 0..logits.as_slice().len() {
            let mut probe = logits.clone();
            let numeric = central_difference(
                |v| {
                    probe.as_mut_slice()[i] = v;
                    softmax_cross_entropy(&probe, &labels).unwrap().0
                },
                logits.as_slice()[i],
            );
            if !close(grad.as_slice()[i], numeric, 1e-4) {
                return Err(format!("cross-entropy trial {trial} logit {i}: {} vs {numeric}", grad.as_slice()[i]));
            }
        }
    }
    Ok(())
}

pub fn critic_input_gradient_cases(trials: u64) -> Result<(), String> {
    for trial in 0..trials {
        let mut r = rng(3000 + trial);
        let critic = random_net(&mut r, &[4, 6, 5, 1], OutputActivation::Identity);
        let x = random_matrix(&mut r, 3, 4, 1.0);
        let g = critic_input_gradient(&critic, &x).unwrap();
        for b in 0..x.rows() {
            for i in 0..x.cols() {
                let mut probe = x.clone();
                let numeric = central_difference(
                    |v| {
                        probe.set(b, i, v);
                        critic.predict(&probe).unwrap().get(b, 0)
                    },
                    x.get(b, i),
                );
                if !close(g.get(b, i), numeric, 1e-4) {
                    return Err(format!("critic input trial {trial} row {b} coord {i}: {} vs {numeric}", g.get(b, i)));
                }
            }
        }
    }
    Ok(())
}

pub fn penalty_param_grad_cases(trials: u64) -> Result<(), String> {
    for trial in 0..trials {
        let mut r = rng(4000 + trial);
        let critic = random_net(&mut r, &[4, 6, 5, 1], OutputActivation::Identity);
        let x = random_matrix(&mut r, 5, 4, 1.0);
        let coefficient = r.random_range(0.5..10.0);
        let (_, grads) = gradient_penalty_param_grads(&critic, &x, coefficient).unwrap();
        check_param_grads(&critic, &grads.to_flat(), 1e-3, |n| {
            gradient_penalty_param_grads(n, &x, coefficient).unwrap().0
        })
        .map_err(|e| format!("penalty trial {trial}: {e}"))?;
    }
    Ok(())
}
