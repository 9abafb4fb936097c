//! Distance queries used by the graph builders.
//!
//! Equidistant candidates are ordered lexicographically by coordinates and
//! then by index, everywhere. Random inputs produce such ties with
//! probability zero, hand-made test inputs produce them routinely.

mod cone;
pub(crate) mod grid;
mod kdtree;
mod online;

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

pub use cone::{cone_nn, ConeIndex};
pub use kdtree::KdIndex;
pub use online::{online_nn, OnlineIndex};

use crate::error::{invalid, Result};
use crate::points::{lex_cmp, PointSet};

/// A neighbour returned by a query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbour {
    pub index: usize,
    pub distance: f64,
}

/// Total order on candidates `(squared distance, index)` seen from a fixed query.
#[inline]
pub(crate) fn candidate_cmp(ps: &PointSet, a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| lex_cmp(ps.point(a.1), ps.point(b.1))).then(a.1.cmp(&b.1))
}

/// The cone partial order on the plane.
///
/// `u` precedes `v` when `u` lies in the closed cone with apex `v` bounded
/// by the rays at angles `theta` and `theta + phi`, measured anticlockwise
/// from the upward vertical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeOrder {
    theta: f64,
    phi: f64,
    start: [f64; 2],
    end: [f64; 2],
}

impl ConeOrder {
    /// `theta` is reduced modulo `2 pi`; `phi` must lie in `(0, pi]`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(invalid(format!("cone angle theta must be finite, got {theta}")));
        }
        if !(phi > 0.0 && phi <= PI) {
            return Err(invalid(format!("cone aperture phi must lie in (0, pi], got {phi}")));
        }
        let theta = theta.rem_euclid(TAU);
        Ok(ConeOrder { theta, phi, start: direction(theta), end: direction(theta + phi) })
    }

    /// The coordinatewise order: `u` precedes `v` iff `u1 <= v1` and `u2 <= v2`.
    pub fn star() -> Self {
        ConeOrder::new(FRAC_PI_2, FRAC_PI_2).expect("valid angles")
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn is_star(&self) -> bool {
        self.start == [-1.0, 0.0] && self.end == [0.0, -1.0]
    }

    /// Whether `u` precedes `v`, i.e. `u` lies in the cone at `v`.
    #[inline]
    pub fn precedes(&self, u: &[f64], v: &[f64]) -> bool {
        let w = [u[0] - v[0], u[1] - v[1]];
        cross(self.start, w) >= 0.0 && cross(w, self.end) >= 0.0
    }

    /// Conservative test: `false` only if no point of the box
    /// `[lo, hi]` lies in the cone with apex `v`.
    pub(crate) fn may_meet_box(&self, v: &[f64], lo: &[f64], hi: &[f64]) -> bool {
        let corners = [[lo[0], lo[1]], [hi[0], lo[1]], [lo[0], hi[1]], [hi[0], hi[1]]];
        let rel = corners.map(|c| [c[0] - v[0], c[1] - v[1]]);
        let outside_start = rel.iter().all(|&w| cross(self.start, w) < 0.0);
        let outside_end = rel.iter().all(|&w| cross(w, self.end) < 0.0);
        !(outside_start || outside_end)
    }
}

#[inline]
fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Unit vector at `angle` anticlockwise from the upward vertical, snapped to
/// exact axis directions at multiples of `pi/2`.
fn direction(angle: f64) -> [f64; 2] {
    let (s, c) = angle.sin_cos();
    let snap = |x: f64| {
        if x.abs() < 1e-12 {
            0.0
        } else if (x.abs() - 1.0).abs() < 1e-12 {
            x.signum()
        } else {
            x
        }
    };
    [snap(-s), snap(c)]
}
