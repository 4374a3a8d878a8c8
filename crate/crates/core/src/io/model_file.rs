use std::path::Path;

use serde::{Deserialize, Serialize};

use super::binary::{parse_meta, toml_text, Reader, Writer};
use super::dataset_file::{precision_code, precision_from};
use crate::engine::{ErrorMap, SlideConfig};
use crate::error::{Error, Result};
use crate::nn::{Activation, Layer, Mlp, Network, Precision, Scalar};

const MAGIC: &[u8; 4] = b"SLNN";
const VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelRole {
    Surrogate,
    Estimator,
}

/// How a network was trained.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingProvenance {
    pub seed: u64,
    pub epochs: usize,
    pub best_epoch: usize,
    pub best_val_rmse: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub n_train: usize,
    pub n_val: usize,
}

/// A trained network with everything needed to apply it to raw signals.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub network: Network,
    pub role: ModelRole,
    pub config: SlideConfig,
    pub error_map: Option<ErrorMap>,
    pub training: TrainingProvenance,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    role: ModelRole,
    #[serde(default)]
    error_map: Option<ErrorMap>,
    training: TrainingProvenance,
    config: SlideConfig,
}

fn activation_code(a: Activation) -> u8 {
    match a {
        Activation::Relu => 0,
        Activation::Elu => 1,
        Activation::Tanh => 2,
        Activation::Identity => 3,
    }
}

fn activation_from(code: u8, offset: usize) -> Result<Activation> {
    Ok(match code {
        0 => Activation::Relu,
        1 => Activation::Elu,
        2 => Activation::Tanh,
        3 => Activation::Identity,
        c => return Err(Error::format(offset as u64, format!("unknown activation code {c}"))),
    })
}

impl ModelFile {
    /// `(gain, offset)` of every input and output column.
    fn scaling(&self) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let pairs = |c: Vec<crate::engine::Channel>| c.iter().map(|c| (c.gain, c.offset)).collect();
        let inputs = pairs(self.config.input_scaling());
        let outputs = match self.role {
            ModelRole::Surrogate => pairs(self.config.output_scaling()),
            ModelRole::Estimator => vec![(1.0, 0.0)],
        };
        (inputs, outputs)
    }

    fn check(&self) -> Result<()> {
        let (i, o) = self.scaling();
        if self.network.n_in() != i.len() || self.network.n_out() != o.len() {
            return Err(Error::Shape(format!(
                "network maps {}→{} but the {:?} configuration needs {}→{}",
                self.network.n_in(),
                self.network.n_out(),
                self.role,
                i.len(),
                o.len()
            )));
        }
        if self.role == ModelRole::Estimator && self.error_map.is_none() {
            return Err(Error::Shape("an estimator needs its error map".into()));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.check()?;
        let net = &self.network;
        let mut w = Writer::default();
        w.bytes(MAGIC);
        w.u16(VERSION);
        w.u8(precision_code(net.precision()));
        w.u8(if net.has_bias() { 0 } else { 1 });
        let widths = net.widths();
        w.u32((widths.len() - 1) as u32);
        for &n in widths {
            w.u64(n as u64);
        }
        for &a in net.activations() {
            w.u8(activation_code(a));
        }
        fn params<T: Scalar>(w: &mut Writer, net: &Mlp<T>, put: impl Fn(&mut Writer, &[T])) {
            for l in net.layers() {
                put(w, &l.w);
                if net.has_bias() {
                    put(w, &l.b);
                }
            }
        }
        match net {
            Network::F32(n) => params(&mut w, n, |w, v| w.f32s(v)),
            Network::F64(n) => params(&mut w, n, |w, v| w.f64s(v)),
        }
        let (si, so) = self.scaling();
        for block in [&si, &so] {
            w.f64s(&block.iter().map(|p| p.0).collect::<Vec<_>>());
            w.f64s(&block.iter().map(|p| p.1).collect::<Vec<_>>());
        }
        let text = toml_text(&Meta {
            role: self.role,
            error_map: self.error_map,
            training: self.training.clone(),
            config: self.config.clone(),
        })?;
        w.u64(text.len() as u64);
        w.bytes(text.as_bytes());
        Ok(w.finish())
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader::new(buf);
        r.header(MAGIC, VERSION)?;
        let precision = precision_from(r.u8("precision flag")?, 6)?;
        let flags_at = r.pos;
        let bias = match r.u8("flags")? {
            0 => true,
            1 => false,
            f => return Err(Error::format(flags_at as u64, format!("unknown flags {f:#x}"))),
        };
        let count_at = r.pos;
        let n_layers = r.u32("layer count")? as usize;
        if n_layers == 0 || n_layers.saturating_mul(8) > buf.len() {
            return Err(Error::format(count_at as u64, format!("implausible layer count {n_layers}")));
        }
        let widths_at = r.pos;
        let mut widths = Vec::with_capacity(n_layers + 1);
        for _ in 0..=n_layers {
            let w = r.u64("layer width")?;
            if w == 0 || w > buf.len() as u64 {
                return Err(Error::format(widths_at as u64, format!("implausible layer width {w}")));
            }
            widths.push(w as usize);
        }
        let mut activations = Vec::with_capacity(n_layers - 1);
        for _ in 1..n_layers {
            let at = r.pos;
            activations.push(activation_from(r.u8("activation code")?, at)?);
        }
        fn layers<T: Scalar>(
            r: &mut Reader<'_>,
            widths: &[usize],
            bias: bool,
            get: impl Fn(&mut Reader<'_>, usize) -> Result<Vec<T>>,
        ) -> Result<Vec<Layer<T>>> {
            widths
                .windows(2)
                .map(|w| {
                    let weights = get(r, w[0] * w[1])?;
                    let b = if bias { get(r, w[1])? } else { vec![T::zero(); w[1]] };
                    Ok(Layer { n_in: w[0], n_out: w[1], w: weights, b })
                })
                .collect()
        }
        let params_at = r.pos as u64;
        let network = match precision {
            Precision::F32 => {
                let l = layers(&mut r, &widths, bias, |r, n| r.f32s(n, "weights"))?;
                Network::F32(Mlp::from_layers(l, activations, bias).map_err(|e| Error::format(params_at, e.to_string()))?)
            }
            Precision::F64 => {
                let l = layers(&mut r, &widths, bias, |r, n| r.f64s(n, "weights"))?;
                Network::F64(Mlp::from_layers(l, activations, bias).map_err(|e| Error::format(params_at, e.to_string()))?)
            }
        };
        let scaling_at = r.pos;
        let mut read_pairs = |n: usize| -> Result<Vec<(f64, f64)>> {
            let g = r.f64s(n, "scaling gains")?;
            let o = r.f64s(n, "scaling offsets")?;
            Ok(g.into_iter().zip(o).collect())
        };
        let si = read_pairs(widths[0])?;
        let so = read_pairs(*widths.last().unwrap())?;
        let meta_at = r.pos;
        let text = r.text("metadata")?;
        r.checksum()?;
        let meta: Meta = parse_meta(text, meta_at)?;
        meta.config
            .validate()
            .map_err(|e| Error::format(meta_at as u64, format!("metadata config: {e}")))?;
        let file = ModelFile {
            network,
            role: meta.role,
            config: meta.config,
            error_map: meta.error_map,
            training: meta.training,
        };
        file.check().map_err(|e| Error::format(meta_at as u64, e.to_string()))?;
        let bits = |v: &[(f64, f64)]| v.iter().map(|p| (p.0.to_bits(), p.1.to_bits())).collect::<Vec<_>>();
        let (ei, eo) = file.scaling();
        if bits(&ei) != bits(&si) || bits(&eo) != bits(&so) {
            return Err(Error::format(scaling_at as u64, "scaling block disagrees with the window configuration"));
        }
        Ok(file)
    }
}

pub fn save_model(path: impl AsRef<Path>, model: &ModelFile) -> Result<()> {
    std::fs::write(path, model.to_bytes()?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    ModelFile::from_bytes(&std::fs::read(path)?)
}
