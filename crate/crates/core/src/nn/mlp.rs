use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scalar::{gemm, View};
use super::{mse_loss, Activation, Scalar};
use crate::error::{Error, Result};

/// One affine map `z = W x + b`, `W` stored row-major as `n_out × n_in`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer<T> {
    pub n_in: usize,
    pub n_out: usize,
    pub w: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Scalar> Layer<T> {
    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Layer {
            n_in,
            n_out,
            w: vec![T::zero(); n_in * n_out],
            b: vec![T::zero(); n_out],
        }
    }

    fn cast<U: Scalar>(&self) -> Layer<U> {
        Layer {
            n_in: self.n_in,
            n_out: self.n_out,
            w: self.w.iter().map(|x| U::of(x.as_f64())).collect(),
            b: self.b.iter().map(|x| U::of(x.as_f64())).collect(),
        }
    }
}

/// Entries i.i.d. uniform in `±√(6/(rows + cols))`.
pub fn xavier_init<T: Scalar>(rows: usize, cols: usize, seed: u64) -> Vec<T> {
    xavier_fill(&mut ChaCha8Rng::seed_from_u64(seed), rows, cols)
}

fn xavier_fill<T: Scalar>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<T> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    (0..rows * cols)
        .map(|_| T::of(rng.random_range(-bound..=bound)))
        .collect()
}

/// Fully connected network; hidden layers apply an elementwise activation,
/// the output layer is affine.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<T> {
    widths: Vec<usize>,
    activations: Vec<Activation>,
    bias: bool,
    layers: Vec<Layer<T>>,
}

/// Per-layer activations and backpropagated errors reused across calls.
#[derive(Clone, Debug, Default)]
pub struct Workspace<T> {
    acts: Vec<Vec<T>>,
    delta: Vec<T>,
    delta_prev: Vec<T>,
}

impl<T: Scalar> Workspace<T> {
    pub fn new() -> Self {
        Workspace { acts: Vec::new(), delta: Vec::new(), delta_prev: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T> {
    pub layers: Vec<Layer<T>>,
}

fn check_widths(widths: &[usize]) -> Result<()> {
    if widths.len() < 2 {
        return Err(Error::Shape("a network needs an input and an output width".into()));
    }
    if widths.contains(&0) {
        return Err(Error::Shape(format!("layer widths must be positive, got {widths:?}")));
    }
    Ok(())
}

impl<T: Scalar> Mlp<T> {
    /// Xavier-initialized weights and zero biases; every hidden layer uses
    /// `activation`.
    pub fn new(widths: &[usize], activation: Activation, bias: bool, seed: u64) -> Result<Self> {
        check_widths(widths)?;
        Self::with_activations(widths, vec![activation; widths.len() - 2], bias, seed)
    }

    pub fn with_activations(widths: &[usize], activations: Vec<Activation>, bias: bool, seed: u64) -> Result<Self> {
        check_widths(widths)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = widths
            .windows(2)
            .map(|w| Layer {
                n_in: w[0],
                n_out: w[1],
                w: xavier_fill(&mut rng, w[1], w[0]),
                b: vec![T::zero(); w[1]],
            })
            .collect();
        Self::from_layers(layers, activations, bias)
    }

    pub fn from_layers(layers: Vec<Layer<T>>, activations: Vec<Activation>, bias: bool) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("a network needs at least one layer".into()));
        }
        if activations.len() != layers.len() - 1 {
            return Err(Error::Shape(format!(
                "{} hidden layers but {} activations",
                layers.len() - 1,
                activations.len()
            )));
        }
        let mut widths = vec![layers[0].n_in];
        for (i, l) in layers.iter().enumerate() {
            if l.n_in != *widths.last().unwrap() {
                return Err(Error::Shape(format!("layer {i} expects {} inputs, previous layer gives {}", l.n_in, widths.last().unwrap())));
            }
            if l.w.len() != l.n_in * l.n_out || l.b.len() != l.n_out {
                return Err(Error::Shape(format!("layer {i} parameter sizes do not match {}×{}", l.n_out, l.n_in)));
            }
            if l.w.iter().chain(&l.b).any(|x| !x.is_finite()) {
                return Err(Error::Shape(format!("layer {i} has non-finite parameters")));
            }
            if !bias && l.b.iter().any(|x| *x != T::zero()) {
                return Err(Error::Shape(format!("layer {i} has biases in a bias-free network")));
            }
            widths.push(l.n_out);
        }
        check_widths(&widths)?;
        Ok(Mlp { widths, activations, bias, layers })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn n_in(&self) -> usize {
        self.widths[0]
    }

    pub fn n_out(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn has_bias(&self) -> bool {
        self.bias
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn n_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.w.len() + if self.bias { l.b.len() } else { 0 })
            .sum()
    }

    pub fn cast<U: Scalar>(&self) -> Mlp<U> {
        Mlp {
            widths: self.widths.clone(),
            activations: self.activations.clone(),
            bias: self.bias,
            layers: self.layers.iter().map(Layer::cast).collect(),
        }
    }

    pub fn zero_gradients(&self) -> Gradients<T> {
        Gradients {
            layers: self.layers.iter().map(|l| Layer::zeros(l.n_in, l.n_out)).collect(),
        }
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }

    /// Forward pass over `n` row-major samples.
    pub fn predict(&self, x: &[T], n: usize) -> Result<Vec<T>> {
        let mut ws = Workspace::new();
        self.forward(x, n, &mut ws).map(<[T]>::to_vec)
    }

    /// Forward pass reusing `ws`; returns the `n × n_out` output block.
    pub fn forward<'w>(&self, x: &[T], n: usize, ws: &'w mut Workspace<T>) -> Result<&'w [T]> {
        if x.len() != n * self.n_in() {
            return Err(Error::Shape(format!(
                "expected {n} samples of width {}, got {} values",
                self.n_in(),
                x.len()
            )));
        }
        ws.acts.resize_with(self.layers.len(), Vec::new);
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let (done, rest) = ws.acts.split_at_mut(i);
            let input: &[T] = if i == 0 { x } else { &done[i - 1] };
            let out = &mut rest[0];
            out.clear();
            let beta = if self.bias {
                for _ in 0..n {
                    out.extend_from_slice(&layer.b);
                }
                T::one()
            } else {
                out.resize(n * layer.n_out, T::zero());
                T::zero()
            };
            gemm(
                View::row_major(input, n, layer.n_in),
                View::transposed(&layer.w, layer.n_in, layer.n_out),
                beta,
                out,
            );
            if i < last {
                let act = self.activations[i];
                if act != Activation::Identity {
                    out.iter_mut().for_each(|z| *z = act.apply(*z));
                }
            }
        }
        Ok(&ws.acts[last])
    }

    /// Mean squared error over all outputs of the batch and its exact gradient
    /// with respect to every parameter.
    pub fn gradients(&self, x: &[T], y: &[T], n: usize, ws: &mut Workspace<T>, grads: &mut Gradients<T>) -> Result<f64> {
        if y.len() != n * self.n_out() {
            return Err(Error::Shape(format!(
                "expected {n} targets of width {}, got {} values",
                self.n_out(),
                y.len()
            )));
        }
        self.forward(x, n, ws)?;
        let last = self.layers.len() - 1;
        let pred = &ws.acts[last];
        let loss = mse_loss(pred, y)?;
        let scale = T::of(2.0 / (n * self.n_out()) as f64);
        ws.delta.clear();
        ws.delta.extend(pred.iter().zip(y).map(|(&p, &t)| scale * (p - t)));

        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let input: &[T] = if i == 0 { x } else { &ws.acts[i - 1] };
            let g = &mut grads.layers[i];
            gemm(
                View::transposed(&ws.delta, layer.n_out, n),
                View::row_major(input, n, layer.n_in),
                T::zero(),
                &mut g.w,
            );
            if self.bias {
                g.b.iter_mut().for_each(|b| *b = T::zero());
                for row in ws.delta.chunks_exact(layer.n_out) {
                    for (b, &d) in g.b.iter_mut().zip(row) {
                        *b = *b + d;
                    }
                }
            }
            if i > 0 {
                ws.delta_prev.clear();
                ws.delta_prev.resize(n * layer.n_in, T::zero());
                gemm(
                    View::row_major(&ws.delta, n, layer.n_out),
                    View::row_major(&layer.w, layer.n_out, layer.n_in),
                    T::zero(),
                    &mut ws.delta_prev,
                );
                let act = self.activations[i - 1];
                if act != Activation::Identity {
                    for (d, &a) in ws.delta_prev.iter_mut().zip(&ws.acts[i - 1]) {
                        *d = *d * act.derivative(a);
                    }
                }
                std::mem::swap(&mut ws.delta, &mut ws.delta_prev);
            }
        }
        Ok(loss)
    }
}
