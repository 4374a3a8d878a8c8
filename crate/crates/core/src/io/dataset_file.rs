use std::path::Path;

use serde::{Deserialize, Serialize};

use super::binary::{parse_meta, toml_text, Reader, Writer};
use crate::engine::{ErrorMap, Provenance, SlideConfig, WindowedDataset};
use crate::error::{Error, Result};
use crate::nn::{Dataset, Precision};

const MAGIC: &[u8; 4] = b"SLDS";
const VERSION: u16 = 1;

/// What the target columns of a dataset hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetTarget {
    /// Scaled output windows of the surrogate.
    Window,
    /// Encoded surrogate errors for the estimator.
    LogError,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetFile {
    pub dataset: WindowedDataset,
    pub target: DatasetTarget,
    pub error_map: Option<ErrorMap>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    target: DatasetTarget,
    input_names: Vec<String>,
    output_names: Vec<String>,
    #[serde(default)]
    error_map: Option<ErrorMap>,
    provenance: Provenance,
    config: SlideConfig,
}

fn channel_names(c: &[crate::engine::Channel]) -> Vec<String> {
    c.iter().map(|c| c.name()).collect()
}

impl DatasetFile {
    pub fn window(dataset: WindowedDataset) -> Self {
        DatasetFile { dataset, target: DatasetTarget::Window, error_map: None }
    }

    fn expected_output_width(&self) -> usize {
        match self.target {
            DatasetTarget::Window => self.dataset.config.output_width(),
            DatasetTarget::LogError => 1,
        }
    }

    pub fn to_bytes(&self, precision: Precision) -> Result<Vec<u8>> {
        let ds = &self.dataset;
        let data = &ds.data;
        if data.n_in != ds.config.input_width() || data.n_out != self.expected_output_width() {
            return Err(Error::Shape("dataset widths do not match its window configuration".into()));
        }
        let mut w = Writer::default();
        w.bytes(MAGIC);
        w.u16(VERSION);
        w.u8(precision_code(precision));
        w.u8(0);
        w.u64(data.len() as u64);
        w.u64(data.n_in as u64);
        w.u64(data.n_out as u64);
        for block in [&data.x, &data.y] {
            match precision {
                Precision::F64 => w.f64s(block),
                Precision::F32 => w.f32s(&block.iter().map(|&v| v as f32).collect::<Vec<_>>()),
            }
        }
        let meta = Meta {
            target: self.target,
            input_names: channel_names(&ds.config.inputs),
            output_names: match self.target {
                DatasetTarget::Window => channel_names(&ds.config.outputs),
                DatasetTarget::LogError => vec!["log_error".into()],
            },
            error_map: self.error_map,
            provenance: ds.provenance.clone(),
            config: ds.config.clone(),
        };
        let text = toml_text(&meta)?;
        w.u64(text.len() as u64);
        w.bytes(text.as_bytes());
        Ok(w.finish())
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader::new(buf);
        r.header(MAGIC, VERSION)?;
        let precision = precision_from(r.u8("precision flag")?, 6)?;
        r.u8("reserved byte")?;
        let n = r.u64("sample count")?;
        let n_in = r.u64("input width")?;
        let n_out = r.u64("output width")?;
        let size = match precision {
            Precision::F32 => 4,
            Precision::F64 => 8,
        };
        let block = |rows: u64, cols: u64| -> Result<usize> {
            rows.checked_mul(cols)
                .filter(|&c| c.saturating_mul(size) <= buf.len() as u64)
                .map(|c| c as usize)
                .ok_or_else(|| Error::format(buf.len() as u64, "declared dataset size exceeds the file"))
        };
        let (nx, ny) = (block(n, n_in)?, block(n, n_out)?);
        let mut read = |count: usize, what: &str| -> Result<Vec<f64>> {
            Ok(match precision {
                Precision::F64 => r.f64s(count, what)?,
                Precision::F32 => r.f32s(count, what)?.into_iter().map(f64::from).collect(),
            })
        };
        let x = read(nx, "input block")?;
        let y = read(ny, "output block")?;
        let meta_at = r.pos;
        let text = r.text("metadata")?;
        r.checksum()?;
        let meta: Meta = parse_meta(text, meta_at)?;
        meta.config.validate().map_err(|e| Error::format(meta_at as u64, format!("metadata config: {e}")))?;
        let file = DatasetFile {
            dataset: WindowedDataset {
                data: Dataset::new(n_in as usize, n_out as usize, x, y)
                    .map_err(|e| Error::format(14, e.to_string()))?,
                config: meta.config,
                provenance: meta.provenance,
            },
            target: meta.target,
            error_map: meta.error_map,
        };
        if n_in as usize != file.dataset.config.input_width() || n_out as usize != file.expected_output_width() {
            return Err(Error::format(14, "header widths disagree with the window configuration"));
        }
        Ok(file)
    }
}

pub(crate) fn precision_code(p: Precision) -> u8 {
    match p {
        Precision::F32 => 0,
        Precision::F64 => 1,
    }
}

pub(crate) fn precision_from(code: u8, offset: u64) -> Result<Precision> {
    match code {
        0 => Ok(Precision::F32),
        1 => Ok(Precision::F64),
        c => Err(Error::format(offset, format!("unknown precision flag {c}"))),
    }
}

pub fn save_dataset(path: impl AsRef<Path>, file: &DatasetFile, precision: Precision) -> Result<()> {
    std::fs::write(path, file.to_bytes(precision)?)?;
    Ok(())
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<DatasetFile> {
    DatasetFile::from_bytes(&std::fs::read(path)?)
}
