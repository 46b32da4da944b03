//! Grid functions: real samples on the uniform grid `x_j = j/n` of `[0, 1]`,
//! or plain coefficient sequences for diagonal operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discrete norm attached to a [`GridFunction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Discrete maximum norm, the `C[0,1]` analogue.
    #[default]
    Sup,
    /// Euclidean norm weighted by `sqrt(h)`, `h = 1/(len - 1)`.
    L2Scaled,
}

impl NormKind {
    pub fn eval(self, values: &[f64]) -> f64 {
        match self {
            NormKind::Sup => values.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            NormKind::L2Scaled => {
                let h = if values.len() > 1 {
                    1.0 / (values.len() - 1) as f64
                } else {
                    1.0
                };
                (h * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
    norm_kind: NormKind,
}

impl GridFunction {
    pub fn new(values: Vec<f64>, norm_kind: NormKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid("empty value vector".into()));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value at index {j}")));
        }
        Ok(Self { values, norm_kind })
    }

    /// Samples `f` at the nodes `x_j = j/n`, `j = 0..=n`.
    pub fn sample<F: Fn(f64) -> f64>(n: usize, norm_kind: NormKind, f: F) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("grid needs n >= 1 intervals".into()));
        }
        let values = (0..=n).map(|j| f(j as f64 / n as f64)).collect();
        Self::new(values, norm_kind)
    }

    pub fn zeros(len: usize, norm_kind: NormKind) -> Self {
        Self {
            values: vec![0.0; len.max(1)],
            norm_kind,
        }
    }

    pub(crate) fn from_raw(values: Vec<f64>, norm_kind: NormKind) -> Self {
        debug_assert!(!values.is_empty());
        Self { values, norm_kind }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }

    pub fn with_norm(mut self, norm_kind: NormKind) -> Self {
        self.norm_kind = norm_kind;
        self
    }

    pub fn norm(&self) -> f64 {
        self.norm_kind.eval(&self.values)
    }

    /// Grid nodes `x_j = j/n` matching this function's length.
    pub fn nodes(&self) -> Vec<f64> {
        let n = (self.len() - 1).max(1) as f64;
        (0..self.len()).map(|j| j as f64 / n).collect()
    }

    pub fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.len(),
            });
        }
        Ok(())
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self::from_raw(self.values.iter().map(|&v| f(v)).collect(), self.norm_kind)
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        other.check_len(self.len())?;
        Ok(Self::from_raw(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            self.norm_kind,
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lincomb(1.0, other, -1.0)
    }

    /// `‖self − other‖` in this function's norm.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }
}
