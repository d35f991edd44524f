//! Static evaluation: feature extraction, the weighted sum `V = Σ wᵢ·vᵢ`
//! and its logistic win probability.

pub mod catalogue;
mod features;
pub mod pst;

use std::ops::Index;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalogue::{FeatureCatalogue, FeatureSpec, Formation, Rule, NUM_FEATURES};
pub use features::{extract_features, extract_with};

/// Logistic scale: a one-pawn advantage maps to `P ≈ 0.731`.
pub const DEFAULT_KAPPA: f64 = 0.01;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("expected {expected} values, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("weight {index} is {value}; weights must be finite and non-negative")]
    NegativeWeight { index: usize, value: f64 },
    #[error("material weight must be exactly 1, got {0}")]
    MaterialWeight(f64),
}

/// Centipawn feature values of one position from one side's perspective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureValues(pub [f64; NUM_FEATURES]);

impl FeatureValues {
    pub fn zeros() -> Self {
        FeatureValues([0.0; NUM_FEATURES])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for FeatureValues {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Evaluation weights. Always non-negative with the material weight fixed at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureVector([f64; NUM_FEATURES]);

impl FeatureVector {
    /// All weights 1: the untrained starting point.
    pub fn uniform() -> Self {
        FeatureVector([1.0; NUM_FEATURES])
    }

    pub fn new(weights: [f64; NUM_FEATURES]) -> Result<Self, EvalError> {
        if weights[0] != 1.0 {
            return Err(EvalError::MaterialWeight(weights[0]));
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(EvalError::NegativeWeight { index, value });
        }
        Ok(FeatureVector(weights))
    }

    pub fn from_slice(weights: &[f64]) -> Result<Self, EvalError> {
        let arr: [f64; NUM_FEATURES] = weights
            .try_into()
            .map_err(|_| EvalError::Length { expected: NUM_FEATURES, actual: weights.len() })?;
        Self::new(arr)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Sets a non-material weight, clamping negatives to 0.
    pub(crate) fn set_clamped(&mut self, i: usize, w: f64) {
        debug_assert!(i != 0);
        self.0[i] = w.max(0.0);
    }
}

impl Index<usize> for FeatureVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = EvalError;

    fn try_from(v: Vec<f64>) -> Result<Self, EvalError> {
        FeatureVector::from_slice(&v)
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(w: FeatureVector) -> Vec<f64> {
        w.0.to_vec()
    }
}

/// `V = Σ wᵢ·vᵢ`, summed in index order.
#[inline]
pub fn evaluate(values: &FeatureValues, weights: &FeatureVector) -> f64 {
    values.0.iter().zip(&weights.0).map(|(v, w)| v * w).sum()
}

/// Unchecked-weights variant of [`evaluate`] over raw slices.
pub fn evaluate_slices(values: &[f64], weights: &[f64]) -> Result<f64, EvalError> {
    if values.len() != weights.len() {
        return Err(EvalError::Length { expected: values.len(), actual: weights.len() });
    }
    Ok(values.iter().zip(weights).map(|(v, w)| v * w).sum())
}

/// `P(V) = 1 / (1 + exp(-κV))`.
///
/// In `f64` the result rounds to exactly 1.0 once `κV` exceeds about 37, and
/// underflows to exactly 0.0 below about -745; callers that need the open
/// interval (the learner) must keep mate scores away from here.
#[inline]
pub fn win_probability(value: f64, kappa: f64) -> f64 {
    let x = kappa * value;
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `dP/dV = κ·P·(1-P)`.
#[inline]
pub fn win_probability_slope(value: f64, kappa: f64) -> f64 {
    let p = win_probability(value, kappa);
    kappa * p * (1.0 - p)
}
