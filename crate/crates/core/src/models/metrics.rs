use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mae: f64,
    pub n: usize,
}

fn check(y_true: &[f64], y_pred: &[f64]) -> Result<(), ModelError> {
    if y_true.len() != y_pred.len() {
        return Err(ModelError::Shape(format!(
            "{} targets vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(ModelError::Shape("metrics need at least one sample".into()));
    }
    Ok(())
}

/// Root of the mean squared error.
pub fn rmse(y_true: &[f64], y_pred: &[f64]) -> Result<f64, ModelError> {
    check(y_true, y_pred)?;
    let sse: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p).powi(2))
        .sum();
    Ok((sse / y_true.len() as f64).sqrt())
}

pub fn mae(y_true: &[f64], y_pred: &[f64]) -> Result<f64, ModelError> {
    check(y_true, y_pred)?;
    let sae: f64 = y_true.iter().zip(y_pred).map(|(t, p)| (p - t).abs()).sum();
    Ok(sae / y_true.len() as f64)
}

impl Metrics {
    pub fn compute(y_true: &[f64], y_pred: &[f64]) -> Result<Self, ModelError> {
        let rmse = rmse(y_true, y_pred)?;
        let mae = mae(y_true, y_pred)?;
        // power-mean inequality, up to rounding when all errors are equal
        debug_assert!(rmse >= mae * (1.0 - 1e-12), "rmse {rmse} < mae {mae}");
        Ok(Self {
            rmse,
            mae,
            n: y_true.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[0.0, 2.0], &[1.0, 3.0]).unwrap(), 1.0);
        assert_eq!(mae(&[0.0, 2.0], &[1.0, 3.0]).unwrap(), 1.0);
        assert_eq!(mae(&[0.0, 0.0, 0.0], &[3.0, 0.0, 0.0]).unwrap(), 1.0);
        assert!((rmse(&[0.0, 0.0, 0.0], &[3.0, 0.0, 0.0]).unwrap() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(rmse(&[1.0], &[1.0, 2.0]), Err(ModelError::Shape(_))));
        assert!(matches!(mae(&[], &[]), Err(ModelError::Shape(_))));
    }
}
