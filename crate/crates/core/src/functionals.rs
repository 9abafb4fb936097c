//! Power-weighted edge-length functionals.

use crate::error::{invalid, Result};
use crate::graphs::EdgeList;

/// Exponent applied to each edge length. Finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WeightExponent(f64);

impl WeightExponent {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(WeightExponent(alpha))
        } else {
            Err(invalid(format!("weight exponent must be finite and >= 0, got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `len^alpha`, with `0^0 = 1` so that `alpha = 0` counts edges.
    #[inline]
    pub fn apply(self, len: f64) -> f64 {
        if self.0 == 0.0 {
            1.0
        } else if self.0 == 1.0 {
            len
        } else if self.0 == 2.0 {
            len * len
        } else {
            len.powf(self.0)
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Sum of `length^alpha` over the edges of `g`.
pub fn total_weight(g: &impl EdgeList, alpha: WeightExponent) -> f64 {
    if alpha.value() == 0.0 {
        return g.edges().len() as f64;
    }
    g.edges().iter().map(|e| alpha.apply(e.length)).collect::<CompensatedSum>().value()
}

/// `n^((alpha - d) / d)` times the total weight of `g`.
///
/// `n` is passed separately because a graph built on a set with an appended
/// origin is still rescaled by the sample size.
pub fn rescaled_weight(g: &impl EdgeList, alpha: WeightExponent, n: usize, d: usize) -> f64 {
    rescale(total_weight(g, alpha), alpha.value(), n, d)
}

/// `n^((alpha - d) / d) * weight`.
pub fn rescale(weight: f64, alpha: f64, n: usize, d: usize) -> f64 {
    if n <= 1 || alpha == d as f64 {
        return weight;
    }
    weight * (n as f64).powf((alpha - d as f64) / d as f64)
}
