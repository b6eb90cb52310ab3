//! Fully connected networks with leaky-ReLU hidden layers.
//!
//! Layer `l` computes `a_l = h_{l-1} W_l + b_l` with `W_l` stored `in×out`.
//! Hidden layers apply the leaky ReLU, the last layer applies the declared
//! output activation.

use rand::Rng;
use rand_distr::{Distribution, Uniform};

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Negative slope used by every network in this crate.
pub const DEFAULT_LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HiddenActivation {
    LeakyRelu(f64),
}

impl HiddenActivation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            HiddenActivation::LeakyRelu(slope) => {
                if x > 0.0 {
                    x
                } else {
                    slope * x
                }
            }
        }
    }

    /// Derivative, using the negative-side slope at the kink.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            HiddenActivation::LeakyRelu(slope) => {
                if x > 0.0 {
                    1.0
                } else {
                    slope
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputActivation {
    Identity,
    Sigmoid,
    /// Raw scores meant to be fed to a softmax loss.
    Logits,
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// One affine layer. Also used to hold the gradients of one.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `in×out`
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(input: usize, output: usize) -> Self {
        Self {
            weight: Matrix::zeros(input, output),
            bias: vec![0.0; output],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.cols()
    }

    fn param_len(&self) -> usize {
        self.weight.as_slice().len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    layers: Vec<Dense>,
    hidden: HiddenActivation,
    output: OutputActivation,
}

impl MlpParams {
    pub fn new(layers: Vec<Dense>, hidden: HiddenActivation, output: OutputActivation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Contract("network needs at least one layer".into()));
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.bias.len() != layer.output_dim() {
                return Err(Error::shape(
                    "MlpParams::new",
                    format!("layer {i} weight {}", layer.weight.shape_str()),
                    format!("bias[{}]", layer.bias.len()),
                ));
            }
            if !layer.weight.is_finite() || layer.bias.iter().any(|b| !b.is_finite()) {
                return Err(Error::Numeric(format!("layer {i} has non-finite parameters")));
            }
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::shape(
                    "MlpParams::new",
                    format!("layer {i} out {}", pair[0].output_dim()),
                    format!("layer {} in {}", i + 1, pair[1].input_dim()),
                ));
            }
        }
        Ok(Self { layers, hidden, output })
    }

    /// Glorot-uniform weights, zero biases. `dims` lists every width from input to output.
    pub fn init<R: Rng + ?Sized>(
        dims: &[usize],
        hidden: HiddenActivation,
        output: OutputActivation,
        rng: &mut R,
    ) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::Config(format!("invalid layer widths {dims:?}")));
        }
        let layers = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let dist = Uniform::new_inclusive(-limit, limit).expect("finite limit");
                let data = (0..fan_in * fan_out).map(|_| dist.sample(rng)).collect();
                Dense {
                    weight: Matrix::from_vec(fan_in, fan_out, data).expect("sized"),
                    bias: vec![0.0; fan_out],
                }
            })
            .collect();
        Self::new(layers, hidden, output)
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn hidden_activation(&self) -> HiddenActivation {
        self.hidden
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    /// Widths from input to output, e.g. `[8, 64, 64, 64, 1]`.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(Dense::output_dim))
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_len).sum()
    }

    /// Reads parameter `idx` in flattened order (layer by layer, weights then bias).
    pub fn flat_get(&self, idx: usize) -> f64 {
        let (l, off) = self.locate(idx);
        let layer = &self.layers[l];
        let nw = layer.weight.as_slice().len();
        if off < nw {
            layer.weight.as_slice()[off]
        } else {
            layer.bias[off - nw]
        }
    }

    pub fn flat_set(&mut self, idx: usize, value: f64) {
        let (l, off) = self.locate(idx);
        let layer = &mut self.layers[l];
        let nw = layer.weight.as_slice().len();
        if off < nw {
            layer.weight.as_mut_slice()[off] = value;
        } else {
            layer.bias[off - nw] = value;
        }
    }

    fn locate(&self, mut idx: usize) -> (usize, usize) {
        for (l, layer) in self.layers.iter().enumerate() {
            let n = layer.param_len();
            if idx < n {
                return (l, idx);
            }
            idx -= n;
        }
        panic!("parameter index out of range");
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    /// Forward pass without keeping intermediates.
    pub fn predict(&self, input: &Matrix) -> Result<Matrix> {
        self.check_input(input)?;
        let last = self.layers.len() - 1;
        let mut h = input.clone();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut a = h.matmul(&layer.weight)?;
            a.add_row_broadcast(&layer.bias)?;
            h = if l == last {
                apply_output(self.output, &a)
            } else {
                a.map(|x| self.hidden.apply(x))
            };
        }
        Ok(h)
    }

    fn check_input(&self, input: &Matrix) -> Result<()> {
        if input.cols() != self.input_dim() {
            return Err(Error::shape(
                "mlp_forward",
                format!("input {}", input.shape_str()),
                format!("first layer {}", self.layers[0].weight.shape_str()),
            ));
        }
        Ok(())
    }
}

fn apply_output(act: OutputActivation, a: &Matrix) -> Matrix {
    match act {
        OutputActivation::Identity | OutputActivation::Logits => a.clone(),
        OutputActivation::Sigmoid => a.map(sigmoid),
    }
}

/// Intermediates recorded by [`mlp_forward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    dims: Vec<usize>,
    output_activation: OutputActivation,
    /// Input to each layer.
    inputs: Vec<Matrix>,
    /// Pre-activation of each layer.
    pre: Vec<Matrix>,
    output: Matrix,
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        &self.output
    }

    pub fn pre_activations(&self) -> &[Matrix] {
        &self.pre
    }

    pub fn batch(&self) -> usize {
        self.output.rows()
    }
}

pub fn mlp_forward(params: &MlpParams, input: &Matrix) -> Result<(Matrix, ForwardCache)> {
    params.check_input(input)?;
    let last = params.layers.len() - 1;
    let mut inputs = Vec::with_capacity(params.layers.len());
    let mut pre = Vec::with_capacity(params.layers.len());
    let mut h = input.clone();
    for (l, layer) in params.layers.iter().enumerate() {
        let mut a = h.matmul(&layer.weight)?;
        a.add_row_broadcast(&layer.bias)?;
        let next = if l == last {
            apply_output(params.output, &a)
        } else {
            a.map(|x| params.hidden.apply(x))
        };
        inputs.push(h);
        pre.push(a);
        h = next;
    }
    let cache = ForwardCache {
        dims: params.dims(),
        output_activation: params.output,
        inputs,
        pre,
        output: h.clone(),
    };
    Ok((h, cache))
}

/// Gradients with the same layout as an [`MlpParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub layers: Vec<Dense>,
}

impl MlpGrads {
    pub fn zeros_like(params: &MlpParams) -> Self {
        Self {
            layers: params
                .layers
                .iter()
                .map(|l| Dense::zeros(l.input_dim(), l.output_dim()))
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &MlpGrads) -> Result<()> {
        self.check_same(other)?;
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weight.add_scaled(&b.weight, 1.0)?;
            super::matrix::axpy(&mut a.bias, 1.0, &b.bias);
        }
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        for l in &mut self.layers {
            l.weight.scale(s);
            l.bias.iter_mut().for_each(|b| *b *= s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.iter().all(|v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(f64::is_finite)
    }

    /// Flattened values in the same order as [`MlpParams::flat_get`].
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weight.as_slice().iter().chain(l.bias.iter()).copied())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.iter().collect()
    }

    pub(crate) fn matches(&self, params: &MlpParams) -> bool {
        self.layers.len() == params.layers.len()
            && self
                .layers
                .iter()
                .zip(&params.layers)
                .all(|(g, p)| g.weight.shape() == p.weight.shape() && g.bias.len() == p.bias.len())
    }

    fn check_same(&self, other: &MlpGrads) -> Result<()> {
        let same = self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.weight.shape() == b.weight.shape());
        if same {
            Ok(())
        } else {
            Err(Error::shape("MlpGrads::add_assign", format!("{} layers", self.layers.len()), format!("{} layers", other.layers.len())))
        }
    }
}

/// Backpropagates `output_grad` (∂L/∂output) through the network.
///
/// Returns ∂L/∂θ for every layer and ∂L/∂input.
pub fn mlp_backward(params: &MlpParams, cache: &ForwardCache, output_grad: &Matrix) -> Result<(MlpGrads, Matrix)> {
    if cache.dims != params.dims() || cache.output_activation != params.output {
        return Err(Error::Cache(format!(
            "cache built for {:?}, network is {:?}",
            cache.dims,
            params.dims()
        )));
    }
    if output_grad.shape() != cache.output.shape() {
        return Err(Error::shape(
            "mlp_backward",
            format!("output_grad {}", output_grad.shape_str()),
            format!("output {}", cache.output.shape_str()),
        ));
    }
    let last = params.layers.len() - 1;
    let mut grads = Vec::with_capacity(params.layers.len());
    let mut delta = match params.output {
        OutputActivation::Identity | OutputActivation::Logits => output_grad.clone(),
        OutputActivation::Sigmoid => output_grad.zip_map(&cache.output, |g, y| g * y * (1.0 - y))?,
    };
    for l in (0..=last).rev() {
        let layer = &params.layers[l];
        let weight = cache.inputs[l].t_matmul(&delta)?;
        let bias = delta.column_sums();
        let mut upstream = delta.matmul_t(&layer.weight)?;
        grads.push(Dense { weight, bias });
        if l > 0 {
            let hidden = params.hidden;
            let pre = &cache.pre[l - 1];
            for (u, &a) in upstream.as_mut_slice().iter_mut().zip(pre.as_slice()) {
                *u *= hidden.derivative(a);
            }
        }
        delta = upstream;
    }
    grads.reverse();
    Ok((MlpGrads { layers: grads }, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn leaky() -> HiddenActivation {
        HiddenActivation::LeakyRelu(DEFAULT_LEAKY_SLOPE)
    }

    #[test]
    fn identity_layer_passes_input_through() {
        let layer = Dense {
            weight: Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            bias: vec![0.0, 0.0],
        };
        let net = MlpParams::new(vec![layer], leaky(), OutputActivation::Identity).unwrap();
        let x = Matrix::row_vector(&[1.0, 2.0]).unwrap();
        let (y, _) = mlp_forward(&net, &x).unwrap();
        assert_eq!(y.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn sigmoid_of_zero_is_half() {
        let net = MlpParams::new(vec![Dense::zeros(3, 4)], leaky(), OutputActivation::Sigmoid).unwrap();
        let x = Matrix::from_rows(&[vec![1.0, -2.0, 3.0], vec![0.5, 0.5, 0.5]]).unwrap();
        let (y, _) = mlp_forward(&net, &x).unwrap();
        assert!(y.as_slice().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn sigmoid_is_finite_at_extremes() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
    }

    #[test]
    fn two_layer_net_matches_scalar_reimplementation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut net = MlpParams::init(&[3, 4, 2], leaky(), OutputActivation::Identity, &mut rng).unwrap();
        for i in 0..net.param_count() {
            net.flat_set(i, rng.random_range(-1.0..1.0));
        }
        let input: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = Matrix::from_vec(2, 3, input.clone()).unwrap();
        let (y, _) = mlp_forward(&net, &x).unwrap();

        let (w1, b1) = (&net.layers()[0].weight, &net.layers()[0].bias);
        let (w2, b2) = (&net.layers()[1].weight, &net.layers()[1].bias);
        for b in 0..2 {
            let mut hidden = [0.0; 4];
            for j in 0..4 {
                let mut s = b1[j];
                for i in 0..3 {
                    s += input[b * 3 + i] * w1.get(i, j);
                }
                hidden[j] = if s > 0.0 { s } else { 0.2 * s };
            }
            for k in 0..2 {
                let mut s = b2[k];
                for j in 0..4 {
                    s += hidden[j] * w2.get(j, k);
                }
                assert!((y.get(b, k) - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_gradients() {
        // y = w·x, loss = y
        let layer = Dense {
            weight: Matrix::from_rows(&[vec![0.5], vec![-1.5]]).unwrap(),
            bias: vec![0.0],
        };
        let net = MlpParams::new(vec![layer], leaky(), OutputActivation::Identity).unwrap();
        let x = Matrix::row_vector(&[2.0, 3.0]).unwrap();
        let (_, cache) = mlp_forward(&net, &x).unwrap();
        let (g, gx) = mlp_backward(&net, &cache, &Matrix::filled(1, 1, 1.0)).unwrap();
        assert_eq!(g.layers[0].weight.as_slice(), &[2.0, 3.0]);
        assert_eq!(g.layers[0].bias, vec![1.0]);
        assert_eq!(gx.as_slice(), &[0.5, -1.5]);
    }

    #[test]
    fn zero_output_grad_gives_zero_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = MlpParams::init(&[4, 6, 6, 3], leaky(), OutputActivation::Sigmoid, &mut rng).unwrap();
        let x = Matrix::filled(5, 4, 0.3);
        let (_, cache) = mlp_forward(&net, &x).unwrap();
        let (g, gx) = mlp_backward(&net, &cache, &Matrix::zeros(5, 3)).unwrap();
        assert!(g.is_zero());
        assert!(gx.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn errors_on_bad_input_and_stale_cache() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = MlpParams::init(&[4, 5, 2], leaky(), OutputActivation::Identity, &mut rng).unwrap();
        let b = MlpParams::init(&[4, 7, 2], leaky(), OutputActivation::Identity, &mut rng).unwrap();
        let err = mlp_forward(&a, &Matrix::zeros(1, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("1x3") && msg.contains("4x5"), "{msg}");

        let (_, cache) = mlp_forward(&a, &Matrix::zeros(2, 4)).unwrap();
        assert!(matches!(
            mlp_backward(&b, &cache, &Matrix::zeros(2, 2)),
            Err(Error::Cache(_))
        ));
    }

    #[test]
    fn rejects_unchained_layers() {
        let layers = vec![Dense::zeros(3, 4), Dense::zeros(5, 1)];
        assert!(MlpParams::new(layers, leaky(), OutputActivation::Identity).is_err());
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let make = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            MlpParams::init(&[10, 20, 1], leaky(), OutputActivation::Identity, &mut rng).unwrap()
        };
        assert_eq!(make(3), make(3));
        assert_ne!(make(3), make(4));
        let limit = (6.0f64 / 30.0).sqrt();
        let net = make(3);
        assert!(net.layers()[0].weight.as_slice().iter().all(|w| w.abs() <= limit));
        assert!(net.layers()[0].bias.iter().all(|&b| b == 0.0));
    }
}
