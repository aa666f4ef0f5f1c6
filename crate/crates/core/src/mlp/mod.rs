//! Feed-forward multi-layer perceptron trained by per-pattern gradient descent.
//!
//! Layer 0 is the input; every later layer computes `act(W * prev + b)`.
//! The error function is half the sum of squared output errors, and
//! [`MlpNetwork::gradients`] returns its exact partial derivatives by reverse
//! accumulation through all layers.

mod train;

pub use train::{
    error_percent, predict, train, Affine, Normalizer, TrainConfig, TrainedExpert, DEFAULT_SEED,
};

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Logistic,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Logistic => 1.0 / (1.0 + (-x).exp()),
            Activation::Linear => x,
        }
    }

    /// Derivative expressed through the unit's output `y = apply(x)`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Logistic => y * (1.0 - y),
            Activation::Linear => 1.0,
        }
    }
}

/// Dense layer; `weights` is row-major `n_out x n_in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn new(
        n_in: usize,
        n_out: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::invalid("layer sizes must be >= 1"));
        }
        if weights.len() != n_in * n_out {
            return Err(Error::Dimension {
                expected: n_in * n_out,
                got: weights.len(),
            });
        }
        if biases.len() != n_out {
            return Err(Error::Dimension {
                expected: n_out,
                got: biases.len(),
            });
        }
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::invalid("layer parameters must be finite"));
        }
        Ok(Self {
            n_in,
            n_out,
            weights,
            biases,
            activation,
        })
    }

    #[inline]
    fn forward_into(&self, input: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let row = &self.weights[j * self.n_in..(j + 1) * self.n_in];
            let z = self.biases[j] + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
            *o = self.activation.apply(z);
        }
    }
}

/// Per-parameter partial derivatives, laid out like the network's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    /// Flattened in [`MlpNetwork::param`] order.
    pub fn flat(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b).copied())
            .collect()
    }
}

/// Reusable per-layer buffers for forward/backward passes.
#[derive(Debug, Clone)]
pub(crate) struct Workspace {
    /// `acts[0]` is the input, `acts[l + 1]` the output of layer `l`.
    acts: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Workspace {
    pub(crate) fn new(net: &MlpNetwork) -> Self {
        let mut acts = vec![vec![0.0; net.n_inputs()]];
        acts.extend(net.layers.iter().map(|l| vec![0.0; l.n_out]));
        let deltas = net.layers.iter().map(|l| vec![0.0; l.n_out]).collect();
        Self { acts, deltas }
    }

    pub(crate) fn output(&self) -> &[f64] {
        self.acts.last().expect("at least one layer")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNetwork {
    layers: Vec<Layer>,
}

impl MlpNetwork {
    /// Assembles a network from explicit layers (hidden layers optional).
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("network needs at least one layer"));
        }
        for pair in layers.windows(2) {
            if pair[0].n_out != pair[1].n_in {
                return Err(Error::Dimension {
                    expected: pair[0].n_out,
                    got: pair[1].n_in,
                });
            }
        }
        Ok(Self { layers })
    }

    /// Random network with weights and biases uniform in
    /// `[-init_weight_bound, +init_weight_bound]`, drawn layer by layer
    /// (weights row-major, then biases) from a generator seeded with
    /// `config.rng_seed`.
    pub fn init(
        layer_sizes: &[usize],
        hidden: Activation,
        output: Activation,
        config: &TrainConfig,
    ) -> Result<Self> {
        if layer_sizes.len() < 3 {
            return Err(Error::invalid(format!(
                "need input, at least one hidden and an output layer, got sizes {layer_sizes:?}"
            )));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::invalid("layer sizes must be >= 1"));
        }
        config.validate()?;
        let bound = config.init_weight_bound;
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    if bound == 0.0 {
                        0.0
                    } else {
                        rng.random_range(-bound..=bound)
                    }
                })
                .collect()
        };
        let last = layer_sizes.len() - 2;
        let layers = layer_sizes
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let weights = draw(w[0] * w[1]);
                let biases = draw(w[1]);
                let act = if i == last { output } else { hidden };
                Layer::new(w[0], w[1], weights, biases, act)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_layers(layers)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.n_inputs())
            .chain(self.layers.iter().map(|l| l.n_out))
            .collect()
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn n_outputs(&self) -> usize {
        self.layers.last().expect("non-empty").n_out
    }

    pub fn output_activation(&self) -> Activation {
        self.layers.last().expect("non-empty").activation
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    fn locate(&self, mut i: usize) -> (usize, bool, usize) {
        for (li, l) in self.layers.iter().enumerate() {
            if i < l.weights.len() {
                return (li, true, i);
            }
            i -= l.weights.len();
            if i < l.biases.len() {
                return (li, false, i);
            }
            i -= l.biases.len();
        }
        panic!("parameter index out of range");
    }

    /// Parameter `i` in flat order: per layer, weights row-major then biases.
    pub fn param(&self, i: usize) -> f64 {
        match self.locate(i) {
            (l, true, k) => self.layers[l].weights[k],
            (l, false, k) => self.layers[l].biases[k],
        }
    }

    pub fn set_param(&mut self, i: usize, v: f64) {
        match self.locate(i) {
            (l, true, k) => self.layers[l].weights[k] = v,
            (l, false, k) => self.layers[l].biases[k] = v,
        }
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.n_inputs() {
            return Err(Error::Dimension {
                expected: self.n_inputs(),
                got: input.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn forward_ws(&self, input: &[f64], ws: &mut Workspace) {
        ws.acts[0].copy_from_slice(input);
        for (l, layer) in self.layers.iter().enumerate() {
            let (prev, next) = ws.acts.split_at_mut(l + 1);
            layer.forward_into(&prev[l], &mut next[0]);
        }
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut ws = Workspace::new(self);
        self.forward_ws(input, &mut ws);
        Ok(ws.output().to_vec())
    }

    /// Back-propagates `dE/d(output)` into per-layer deltas (`dE/dz`).
    /// Requires a preceding `forward_ws` on the same workspace. Returns E.
    fn backward_ws(&self, target: &[f64], ws: &mut Workspace) -> f64 {
        let n = self.layers.len();
        let mut loss = 0.0;
        {
            let out = &ws.acts[n];
            let act = self.layers[n - 1].activation;
            for (k, d) in ws.deltas[n - 1].iter_mut().enumerate() {
                let e = out[k] - target[k];
                loss += 0.5 * e * e;
                *d = e * act.derivative_from_output(out[k]);
            }
        }
        for l in (0..n - 1).rev() {
            let (lower, upper) = ws.deltas.split_at_mut(l + 1);
            let next = &self.layers[l + 1];
            let act = self.layers[l].activation;
            let out = &ws.acts[l + 1];
            for (j, d) in lower[l].iter_mut().enumerate() {
                let back: f64 = upper[0]
                    .iter()
                    .enumerate()
                    .map(|(k, dk)| dk * next.weights[k * next.n_in + j])
                    .sum();
                *d = back * act.derivative_from_output(out[j]);
            }
        }
        loss
    }

    /// Error `E = 0.5 * sum((out - target)^2)` and its exact gradient.
    pub fn gradients(&self, input: &[f64], target: &[f64]) -> Result<(f64, Gradients)> {
        self.check_input(input)?;
        if target.len() != self.n_outputs() {
            return Err(Error::Dimension {
                expected: self.n_outputs(),
                got: target.len(),
            });
        }
        let mut ws = Workspace::new(self);
        self.forward_ws(input, &mut ws);
        let loss = self.backward_ws(target, &mut ws);
        let mut g = Gradients {
            weights: Vec::with_capacity(self.layers.len()),
            biases: Vec::with_capacity(self.layers.len()),
        };
        for (l, layer) in self.layers.iter().enumerate() {
            let a = &ws.acts[l];
            let d = &ws.deltas[l];
            g.weights
                .push((0..layer.n_out).flat_map(|j| a.iter().map(move |x| d[j] * x)).collect());
            g.biases.push(d.clone());
        }
        Ok((loss, g))
    }

    /// One gradient step `w -= eta * dE/dw` on a single pattern. Returns the
    /// pattern's error before the step.
    pub(crate) fn step(&mut self, input: &[f64], target: &[f64], eta: f64, ws: &mut Workspace) -> f64 {
        self.forward_ws(input, ws);
        let loss = self.backward_ws(target, ws);
        for (l, layer) in self.layers.iter_mut().enumerate() {
            let a = &ws.acts[l];
            for (j, &d) in ws.deltas[l].iter().enumerate() {
                let scaled = eta * d;
                let row = &mut layer.weights[j * layer.n_in..(j + 1) * layer.n_in];
                for (w, x) in row.iter_mut().zip(a) {
                    *w -= scaled * x;
                }
                layer.biases[j] -= scaled;
            }
        }
        loss
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64, bound: f64) -> TrainConfig {
        TrainConfig {
            rng_seed: seed,
            init_weight_bound: bound,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = MlpNetwork::init(&[3, 5, 2], Activation::Logistic, Activation::Linear, &cfg(9, 0.5)).unwrap();
        let b = MlpNetwork::init(&[3, 5, 2], Activation::Logistic, Activation::Linear, &cfg(9, 0.5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.param_count(), 3 * 5 + 5 + 5 * 2 + 2);
        assert!((0..a.param_count()).all(|i| a.param(i).abs() <= 0.5));
        let z = MlpNetwork::init(&[3, 5, 2], Activation::Logistic, Activation::Linear, &cfg(9, 0.0)).unwrap();
        assert!((0..z.param_count()).all(|i| z.param(i) == 0.0));
        assert!(MlpNetwork::init(&[3, 2], Activation::Logistic, Activation::Linear, &cfg(1, 0.3)).is_err());
        assert!(MlpNetwork::init(&[3, 0, 2], Activation::Logistic, Activation::Linear, &cfg(1, 0.3)).is_err());
        assert!(MlpNetwork::from_layers(vec![]).is_err());
    }

    #[test]
    fn forward_identity_and_logistic_zero() {
        let id = Layer::new(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0; 2], Activation::Linear).unwrap();
        let net = MlpNetwork::from_layers(vec![id]).unwrap();
        assert_eq!(net.forward(&[3.5, -2.0]).unwrap(), vec![3.5, -2.0]);
        let z = Layer::new(3, 1, vec![0.0; 3], vec![0.0], Activation::Logistic).unwrap();
        let net = MlpNetwork::from_layers(vec![z]).unwrap();
        assert_eq!(net.forward(&[1.0, 2.0, 3.0]).unwrap(), vec![0.5]);
        assert!(matches!(net.forward(&[1.0]), Err(Error::Dimension { expected: 3, got: 1 })));
    }

    #[test]
    fn hand_computed_1_2_1() {
        // hidden: h1 = s(0.5x + 0.1), h2 = s(-0.3x - 0.2); out = 0.7h1 - 0.4h2 + 0.05
        let hidden = Layer::new(1, 2, vec![0.5, -0.3], vec![0.1, -0.2], Activation::Logistic).unwrap();
        let out = Layer::new(2, 1, vec![0.7, -0.4], vec![0.05], Activation::Linear).unwrap();
        let net = MlpNetwork::from_layers(vec![hidden, out]).unwrap();
        let x = 2.0;
        let h1 = 1.0 / (1.0 + (-(0.5f64 * x + 0.1)).exp()); // s(1.1) = 0.750260
        let h2 = 1.0 / (1.0 + (-(-0.3f64 * x - 0.2)).exp()); // s(-0.8) = 0.310026
        let expect = 0.7 * h1 - 0.4 * h2 + 0.05;
        assert!((expect - 0.451172).abs() < 5e-7);
        assert!((net.forward(&[x]).unwrap()[0] - 0.451172).abs() < 5e-7);
    }

    #[test]
    fn single_linear_unit_gradient() {
        let (w, b, x, y) = (0.8, -0.3, 1.7, 0.4);
        let l = Layer::new(1, 1, vec![w], vec![b], Activation::Linear).unwrap();
        let net = MlpNetwork::from_layers(vec![l]).unwrap();
        let (loss, g) = net.gradients(&[x], &[y]).unwrap();
        let r = w * x + b - y;
        assert!((loss - 0.5 * r * r).abs() < 1e-15);
        assert!((g.weights[0][0] - r * x).abs() < 1e-15);
        assert!((g.biases[0][0] - r).abs() < 1e-15);
    }

    #[test]
    fn zero_error_means_zero_gradient() {
        let net = MlpNetwork::init(&[3, 4, 2], Activation::Logistic, Activation::Linear, &cfg(3, 0.5)).unwrap();
        let input = [0.2, -0.7, 1.1];
        let out = net.forward(&input).unwrap();
        let (loss, g) = net.gradients(&input, &out).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.flat().iter().all(|&v| v == 0.0));
    }

    /// Central differences on E; returns the worst relative error.
    fn fd_worst(net: &MlpNetwork, x: &[f64], y: &[f64]) -> f64 {
        let h = 1e-5;
        let (_, g) = net.gradients(x, y).unwrap();
        let analytic = g.flat();
        let mut probe = net.clone();
        let mut worst: f64 = 0.0;
        for (i, a) in analytic.iter().enumerate() {
            let p = net.param(i);
            probe.set_param(i, p + h);
            let up = probe.gradients(x, y).unwrap().0;
            probe.set_param(i, p - h);
            let down = probe.gradients(x, y).unwrap().0;
            probe.set_param(i, p);
            let numeric = (up - down) / (2.0 * h);
            let denom = a.abs().max(numeric.abs()).max(1e-4);
            worst = worst.max((a - numeric).abs() / denom);
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences_3_5_2() {
        let net = MlpNetwork::init(&[3, 5, 2], Activation::Logistic, Activation::Linear, &cfg(11, 1.0)).unwrap();
        let w = fd_worst(&net, &[0.4, -1.2, 0.9], &[0.3, -0.8]);
        assert!(w < 1e-6, "worst relative error {w}");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(100))]
        #[test]
        fn gradients_match_finite_differences(
            seed in 0u64..1_000_000,
            n_in in 1usize..4,
            hidden in proptest::collection::vec(1usize..5, 1..3),
            n_out in 1usize..3,
            logistic_out in proptest::bool::ANY,
            xs in proptest::collection::vec(-2.0f64..2.0, 4),
            ys in proptest::collection::vec(-1.0f64..1.0, 3),
        ) {
            let mut sizes = vec![n_in];
            sizes.extend(&hidden);
            sizes.push(n_out);
            let out = if logistic_out { Activation::Logistic } else { Activation::Linear };
            let net = MlpNetwork::init(&sizes, Activation::Logistic, out, &cfg(seed, 1.0)).unwrap();
            let w = fd_worst(&net, &xs[..n_in], &ys[..n_out]);
            proptest::prop_assert!(w < 1e-6, "worst relative error {}", w);
        }
    }

    #[test]
    fn step_matches_gradient_descent() {
        let mut net = MlpNetwork::init(&[2, 3, 1], Activation::Logistic, Activation::Linear, &cfg(4, 0.5)).unwrap();
        let (x, y, eta) = ([0.3, -0.9], [0.25], 0.1);
        let (_, g) = net.gradients(&x, &y).unwrap();
        let before: Vec<f64> = (0..net.param_count()).map(|i| net.param(i)).collect();
        let mut ws = Workspace::new(&net);
        net.step(&x, &y, eta, &mut ws);
        for (i, gi) in g.flat().iter().enumerate() {
            assert!((net.param(i) - (before[i] - eta * gi)).abs() < 1e-15);
        }
    }
}
