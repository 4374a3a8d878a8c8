use super::{Gradients, Layer, Mlp, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// ADAM moments for every parameter of one network.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam<T> {
    pub config: AdamConfig,
    pub step: u64,
    pub m: Vec<Layer<T>>,
    pub v: Vec<Layer<T>>,
}

impl<T: Scalar> Adam<T> {
    pub fn new<U: Scalar>(net: &Mlp<U>, config: AdamConfig) -> Self {
        let zeros = || net.layers().iter().map(|l| Layer::zeros(l.n_in, l.n_out)).collect();
        Adam { config, step: 0, m: zeros(), v: zeros() }
    }
}

impl<T: Scalar> Adam<T> {
    /// One bias-corrected update `p ← p − lr·m̂/(√v̂ + ε)`.
    pub fn update(&mut self, net: &mut Mlp<T>, grads: &Gradients<T>) {
        self.step += 1;
        let c = self.config;
        let b1 = T::of(c.beta1);
        let b2 = T::of(c.beta2);
        let one = T::one();
        let lr = T::of(c.lr);
        let eps = T::of(c.eps);
        let bc1 = T::of(1.0 - c.beta1.powf(self.step as f64));
        let bc2 = T::of(1.0 - c.beta2.powf(self.step as f64));
        let with_bias = net.has_bias();
        let step = |p: &mut [T], g: &[T], m: &mut [T], v: &mut [T]| {
            for i in 0..p.len() {
                let gi = g[i];
                m[i] = b1 * m[i] + (one - b1) * gi;
                v[i] = b2 * v[i] + (one - b2) * gi * gi;
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                p[i] = p[i] - lr * m_hat / (v_hat.sqrt() + eps);
            }
        };
        for (i, layer) in net.layers_mut().iter_mut().enumerate() {
            let g = &grads.layers[i];
            step(&mut layer.w, &g.w, &mut self.m[i].w, &mut self.v[i].w);
            if with_bias {
                step(&mut layer.b, &g.b, &mut self.m[i].b, &mut self.v[i].b);
            }
        }
    }
}
