use super::sliding::{assemble, check_estimator, evaluate, sliding_windows};
use super::{build_windows, ErrorMap, EvalMode, Sequence, SlideConfig, SlidingOutput, WindowedDataset};
use crate::dynamics::DriveSignal;
use crate::error::{Error, Result};
use crate::nn::{Dataset, Network};

/// Root mean squared error of every window in unscaled output units.
pub fn window_rmse(net: &Network, dataset: &WindowedDataset) -> Result<Vec<f64>> {
    let data = &dataset.data;
    let pred = net.predict(&data.x, data.len())?;
    Ok(unscaled_rmse(&dataset.config, &pred, &data.y))
}

fn unscaled_rmse(config: &SlideConfig, pred: &[f64], target: &[f64]) -> Vec<f64> {
    let scaling = config.output_scaling();
    let w = scaling.len();
    pred.chunks_exact(w)
        .zip(target.chunks_exact(w))
        .map(|(p, t)| {
            let sum: f64 = p
                .iter()
                .zip(t)
                .zip(&scaling)
                .map(|((&a, &b), c)| {
                    let d = c.unscale(a) - c.unscale(b);
                    d * d
                })
                .sum();
            (sum / w as f64).sqrt()
        })
        .collect()
}

/// Training data for the error estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorData {
    /// Surrogate inputs paired with encoded errors (width 1).
    pub dataset: WindowedDataset,
    /// Unencoded surrogate error of every window.
    pub errors: Vec<f64>,
    /// Amplitude multiplier each window was generated with.
    pub multipliers: Vec<f64>,
    /// Windows whose error fell below the map and was clamped.
    pub clamped: usize,
}

/// Re-simulates every base drive scaled by every multiplier, evaluates the
/// frozen surrogate on the resulting windows and pairs its inputs with the
/// encoded window error.
///
/// A multiplier of one is always included, so the surrogate's own training
/// windows are part of the set.
pub fn build_estimator_dataset(
    surrogate: &Network,
    config: &SlideConfig,
    map: &ErrorMap,
    base_drives: &[DriveSignal],
    multipliers: &[f64],
    simulate: impl Fn(&DriveSignal) -> Result<Sequence>,
) -> Result<EstimatorData> {
    let mut mults: Vec<f64> = multipliers.to_vec();
    if !mults.contains(&1.0) {
        mults.push(1.0);
    }
    if mults.iter().any(|m| !m.is_finite()) {
        return Err(Error::config("estimator.multipliers", "amplitude multipliers must be finite"));
    }
    let mut x = Vec::new();
    let mut eps = Vec::new();
    let mut errors = Vec::new();
    let mut labels = Vec::new();
    let mut clamped = 0;
    for &m in &mults {
        let seqs = base_drives
            .iter()
            .map(|d| simulate(&d.scaled(m)))
            .collect::<Result<Vec<_>>>()?;
        let windows = build_windows(&seqs, config, None)?;
        let e = window_rmse(surrogate, &windows)?;
        for &ei in &e {
            let (v, c) = map.encode(ei);
            clamped += c as usize;
            eps.push(v);
        }
        labels.extend(std::iter::repeat_n(m, e.len()));
        errors.extend(e);
        x.extend(windows.data.x);
    }
    let provenance = super::Provenance {
        system: config.system.clone(),
        h: config.h,
        n_sequences: base_drives.len() * mults.len(),
        ..Default::default()
    };
    Ok(EstimatorData {
        dataset: WindowedDataset {
            config: config.clone(),
            data: Dataset::new(config.input_width(), 1, x, eps)?,
            provenance,
        },
        errors,
        multipliers: labels,
        clamped,
    })
}

/// Sliding surrogate predictions with the decoded error estimate of every
/// window. Both networks see the same window inputs.
pub fn predict_with_error(
    surrogate: &Network,
    surrogate_config: &SlideConfig,
    estimator: &Network,
    estimator_config: &SlideConfig,
    map: &ErrorMap,
    seq: &Sequence,
    mode: EvalMode,
) -> Result<(SlidingOutput, Vec<f64>)> {
    if !surrogate_config.compatible_with(estimator_config) {
        return Err(Error::config("estimator", "estimator was trained for a different window configuration"));
    }
    check_estimator(estimator, surrogate_config)?;
    if surrogate.n_in() != surrogate_config.input_width() || surrogate.n_out() != surrogate_config.output_width() {
        return Err(Error::Shape("surrogate does not match its window configuration".into()));
    }
    let (x, n) = sliding_windows(surrogate_config, seq)?;
    let pred = evaluate(surrogate, &x, n, mode)?;
    let e_hat = evaluate(estimator, &x, n, mode)?.into_iter().map(|v| map.decode(v)).collect();
    Ok((assemble(surrogate_config, &pred, n), e_hat))
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && v[order[j]] == v[order[i]] {
            j += 1;
        }
        let mean = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            r[k] = mean;
        }
        i = j;
    }
    r
}

/// Spearman rank correlation: Pearson correlation of the average ranks.
pub fn rank_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Shape(format!("rank correlation needs two equal series of length ≥ 2, got {} and {}", a.len(), b.len())));
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(0.0);
    }
    Ok(sab / (saa * sbb).sqrt())
}
