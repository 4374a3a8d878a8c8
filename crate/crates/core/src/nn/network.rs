use super::{Activation, Dataset, Mlp, Precision, Scalar, TrainConfig, TrainReport, Workspace};
use crate::error::Result;

/// A network of either precision, for code that picks the precision at run
/// time. Inputs and outputs cross this boundary as binary64.
#[derive(Clone, Debug, PartialEq)]
pub enum Network {
    F32(Mlp<f32>),
    F64(Mlp<f64>),
}

macro_rules! each {
    ($self:expr, $net:ident => $body:expr) => {
        match $self {
            Network::F32($net) => $body,
            Network::F64($net) => $body,
        }
    };
}

impl Network {
    pub fn new(widths: &[usize], activation: Activation, bias: bool, precision: Precision, seed: u64) -> Result<Self> {
        Ok(match precision {
            Precision::F32 => Network::F32(Mlp::new(widths, activation, bias, seed)?),
            Precision::F64 => Network::F64(Mlp::new(widths, activation, bias, seed)?),
        })
    }

    pub fn precision(&self) -> Precision {
        match self {
            Network::F32(_) => Precision::F32,
            Network::F64(_) => Precision::F64,
        }
    }

    pub fn widths(&self) -> &[usize] {
        each!(self, n => n.widths())
    }

    pub fn n_in(&self) -> usize {
        each!(self, n => n.n_in())
    }

    pub fn n_out(&self) -> usize {
        each!(self, n => n.n_out())
    }

    pub fn activations(&self) -> &[Activation] {
        each!(self, n => n.activations())
    }

    pub fn has_bias(&self) -> bool {
        each!(self, n => n.has_bias())
    }

    pub fn n_params(&self) -> usize {
        each!(self, n => n.n_params())
    }

    /// Forward pass over `n` row-major samples given in binary64.
    pub fn predict(&self, x: &[f64], n: usize) -> Result<Vec<f64>> {
        fn run<T: Scalar>(net: &Mlp<T>, x: &[f64], n: usize) -> Result<Vec<f64>> {
            let xt: Vec<T> = x.iter().map(|&v| T::of(v)).collect();
            let mut ws = Workspace::new();
            Ok(net.forward(&xt, n, &mut ws)?.iter().map(|v| v.as_f64()).collect())
        }
        each!(self, net => run(net, x, n))
    }

    /// Trains in the network's own precision on binary64 data.
    pub fn train(self, train_set: &Dataset<f64>, val_set: &Dataset<f64>, config: &TrainConfig) -> Result<(Network, TrainReport)> {
        Ok(match self {
            Network::F32(net) => {
                let (best, r) = super::train(net, &train_set.cast(), &val_set.cast(), config)?;
                (Network::F32(best), r)
            }
            Network::F64(net) => {
                let (best, r) = super::train(net, train_set, val_set, config)?;
                (Network::F64(best), r)
            }
        })
    }
}
