use log::{debug, info};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{rmse, Adam, AdamConfig, Mlp, Scalar, Workspace};
use crate::error::{Error, Result};

/// Row-major samples: `x` is `len × n_in`, `y` is `len × n_out`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    pub n_in: usize,
    pub n_out: usize,
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(n_in: usize, n_out: usize, x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if n_in == 0 || n_out == 0 || x.len() % n_in != 0 || y.len() % n_out != 0 || x.len() / n_in != y.len() / n_out {
            return Err(Error::Shape(format!(
                "{} input values of width {n_in} do not pair with {} target values of width {n_out}",
                x.len(),
                y.len()
            )));
        }
        Ok(Dataset { n_in, n_out, x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len() / self.n_in
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn input(&self, i: usize) -> &[T] {
        &self.x[i * self.n_in..(i + 1) * self.n_in]
    }

    pub fn target(&self, i: usize) -> &[T] {
        &self.y[i * self.n_out..(i + 1) * self.n_out]
    }

    pub fn cast<U: Scalar>(&self) -> Dataset<U> {
        let c = |v: &[T]| v.iter().map(|x| U::of(x.as_f64())).collect();
        Dataset { n_in: self.n_in, n_out: self.n_out, x: c(&self.x), y: c(&self.y) }
    }

    /// Samples `range` as a new dataset.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Dataset<T> {
        Dataset {
            n_in: self.n_in,
            n_out: self.n_out,
            x: self.x[range.start * self.n_in..range.end * self.n_in].to_vec(),
            y: self.y[range.start * self.n_out..range.end * self.n_out].to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    /// Defaults to an eighth of the training set.
    pub batch_size: Option<usize>,
    pub epochs: usize,
    pub val_every: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let adam = AdamConfig::default();
        TrainConfig {
            lr: adam.lr,
            batch_size: None,
            epochs: 100,
            val_every: 20,
            seed: 0,
            beta1: adam.beta1,
            beta2: adam.beta2,
            eps: adam.eps,
        }
    }
}

impl TrainConfig {
    pub fn resolved_batch_size(&self, n_train: usize) -> usize {
        self.batch_size.unwrap_or((n_train / 8).max(1))
    }

    fn adam(&self) -> AdamConfig {
        AdamConfig { lr: self.lr, beta1: self.beta1, beta2: self.beta2, eps: self.eps }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    /// Mean training loss of every epoch, weighted by batch size.
    pub epoch_loss: Vec<f64>,
    /// `(epoch, validation RMSE)` at every validation point; epochs count from 1.
    pub validation: Vec<(usize, f64)>,
    pub best_epoch: usize,
    pub best_val_rmse: f64,
    pub iterations_per_epoch: usize,
    pub batch_size: usize,
}

/// Mini-batch ADAM on the mean squared error.
///
/// Every epoch draws one permutation of the training set from the seeded
/// generator and walks it in batches, keeping a short final batch. The network
/// is validated every `val_every` epochs and after the last one; the weights
/// with the lowest validation RMSE are returned.
pub fn train<T: Scalar>(
    mut model: Mlp<T>,
    train_set: &Dataset<T>,
    val_set: &Dataset<T>,
    config: &TrainConfig,
) -> Result<(Mlp<T>, TrainReport)> {
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::Shape("training and validation sets must be nonempty".into()));
    }
    for set in [train_set, val_set] {
        if set.n_in != model.n_in() || set.n_out != model.n_out() {
            return Err(Error::Shape(format!(
                "dataset widths {}→{} do not match network {}→{}",
                set.n_in,
                set.n_out,
                model.n_in(),
                model.n_out()
            )));
        }
    }
    if !(config.lr > 0.0) {
        return Err(Error::config("lr", "learning rate must be positive"));
    }
    if config.val_every == 0 {
        return Err(Error::config("val_every", "validation period must be positive"));
    }
    let n = train_set.len();
    let batch = config.resolved_batch_size(n);
    if batch == 0 || batch > n {
        return Err(Error::config("batch", format!("batch size {batch} must lie in 1..={n}")));
    }
    let iterations = n.div_ceil(batch);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut adam: Adam<T> = Adam::new(&model, config.adam());
    let mut grads = model.zero_gradients();
    let mut ws = Workspace::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut bx = Vec::with_capacity(batch * train_set.n_in);
    let mut by = Vec::with_capacity(batch * train_set.n_out);

    let mut report = TrainReport {
        epoch_loss: Vec::with_capacity(config.epochs),
        validation: Vec::new(),
        best_epoch: 0,
        best_val_rmse: f64::INFINITY,
        iterations_per_epoch: iterations,
        batch_size: batch,
    };
    let mut best = model.clone();

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for (it, idx) in order.chunks(batch).enumerate() {
            bx.clear();
            by.clear();
            for &i in idx {
                bx.extend_from_slice(train_set.input(i));
                by.extend_from_slice(train_set.target(i));
            }
            let loss = model.gradients(&bx, &by, idx.len(), &mut ws, &mut grads)?;
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch, iteration: it + 1 });
            }
            loss_sum += loss * idx.len() as f64;
            adam.update(&mut model, &grads);
        }
        let epoch_loss = loss_sum / n as f64;
        report.epoch_loss.push(epoch_loss);
        debug!("epoch {epoch}: training loss {epoch_loss:.4e}");

        if epoch % config.val_every == 0 || epoch == config.epochs {
            let pred = model.forward(&val_set.x, val_set.len(), &mut ws)?;
            let val = rmse(pred, &val_set.y)?;
            if !val.is_finite() {
                return Err(Error::TrainingDiverged { epoch, iteration: iterations });
            }
            info!("epoch {epoch}: training loss {epoch_loss:.4e}, validation RMSE {val:.4e}");
            report.validation.push((epoch, val));
            if val < report.best_val_rmse {
                report.best_val_rmse = val;
                report.best_epoch = epoch;
                best.clone_from(&model);
            }
        }
    }
    Ok((best, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;

    fn line(n: usize) -> Dataset<f64> {
        let x: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let y = x.iter().map(|x| 2.0 * x + 1.0).collect();
        Dataset::new(1, 1, x, y).unwrap()
    }

    #[test]
    fn iterations_per_epoch() {
        let data = Dataset::new(1, 1, vec![0.0f32; 4096], vec![0.0; 4096]).unwrap();
        let net: Mlp<f32> = Mlp::new(&[1, 1], Activation::Identity, true, 0).unwrap();
        let cfg = TrainConfig { batch_size: Some(512), epochs: 1, ..Default::default() };
        let (_, r) = train(net.clone(), &data, &data.slice(0..8), &cfg).unwrap();
        assert_eq!(r.iterations_per_epoch, 8);
        let cfg = TrainConfig { batch_size: None, epochs: 1, ..Default::default() };
        assert_eq!(train(net.clone(), &data, &data.slice(0..8), &cfg).unwrap().1.batch_size, 512);
        let small = data.slice(0..100);
        let cfg = TrainConfig { batch_size: Some(100), epochs: 1, ..Default::default() };
        assert_eq!(train(net.clone(), &small, &small, &cfg).unwrap().1.iterations_per_epoch, 1);
        let cfg = TrainConfig { batch_size: Some(30), epochs: 1, ..Default::default() };
        assert_eq!(train(net.clone(), &small, &small, &cfg).unwrap().1.iterations_per_epoch, 4);
        let cfg = TrainConfig { batch_size: Some(101), epochs: 1, ..Default::default() };
        assert!(matches!(train(net, &small, &small, &cfg), Err(Error::Config { .. })));
    }

    #[test]
    fn linear_regression_converges() {
        let data = line(64);
        let net: Mlp<f64> = Mlp::new(&[1, 1], Activation::Identity, true, 5).unwrap();
        let cfg = TrainConfig { lr: 1e-2, batch_size: Some(16), epochs: 2000, val_every: 20, seed: 1, ..Default::default() };
        let (best, r) = train(net, &data, &data, &cfg).unwrap();
        let mse = r.best_val_rmse.powi(2);
        assert!(mse <= 1e-8, "mse {mse}");
        let pred = best.predict(&data.x, data.len()).unwrap();
        assert_eq!(rmse(&pred, &data.y).unwrap(), r.best_val_rmse);
        let min = r.validation.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        assert_eq!(min, r.best_val_rmse);
    }

    #[test]
    fn divergence_is_reported() {
        let data = line(32);
        let mut y = data.y.clone();
        y[3] = f64::NAN;
        let bad = Dataset::new(1, 1, data.x.clone(), y).unwrap();
        let net: Mlp<f64> = Mlp::new(&[1, 4, 1], Activation::Tanh, true, 5).unwrap();
        let cfg = TrainConfig { batch_size: Some(8), epochs: 3, ..Default::default() };
        match train(net, &bad, &data, &cfg) {
            Err(Error::TrainingDiverged { epoch: 1, iteration }) => assert!((1..=4).contains(&iteration)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
