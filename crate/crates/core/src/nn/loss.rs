use super::Scalar;
use crate::error::{Error, Result};

/// Mean of the squared elementwise differences, accumulated in binary64.
pub fn mse_loss<T: Scalar>(pred: &[T], target: &[T]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::Shape(format!(
            "prediction has {} elements, target {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Shape("loss of an empty batch".into()));
    }
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| {
            let d = p.as_f64() - t.as_f64();
            d * d
        })
        .sum();
    Ok(sum / pred.len() as f64)
}

pub fn rmse<T: Scalar>(pred: &[T], target: &[T]) -> Result<f64> {
    mse_loss(pred, target).map(f64::sqrt)
}
