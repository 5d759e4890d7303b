//! Validated domain types used across the library.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Spatial dimension. The library supports d in {2, 3}.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d == 2 || d == 3 {
            Ok(Dimension(d))
        } else {
            Err(Error::domain(format!("dimension must be 2 or 3, got {d}")))
        }
    }

    #[inline]
    pub fn val(self) -> usize {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(d: usize) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

/// Fractional order s in (0, 1), the range in which the operator itself is
/// defined. Operations on the wider calculus range (-d/2, 1] validate their
/// own preconditions and take a raw `f64`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 0.0 && s < 1.0 {
            Ok(FracOrder(s))
        } else {
            Err(Error::domain(format!(
                "fractional order must lie in (0, 1), got {s}"
            )))
        }
    }

    #[inline]
    pub fn val(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        FracOrder::new(s)
    }
}

impl From<FracOrder> for f64 {
    fn from(s: FracOrder) -> f64 {
        s.0
    }
}
