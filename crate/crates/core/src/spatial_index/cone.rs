use std::cmp::Ordering;

use super::grid::CellGrid;
use super::{candidate_cmp, ConeOrder, Neighbour};
use crate::error::{invalid, Error, Result};
use crate::points::PointSet;

/// Directed nearest-neighbour queries under a cone order in the plane.
///
/// Ring expansion over a bucket grid; cells that cannot meet the cone at
/// the query point are skipped without scanning.
#[derive(Debug, Clone)]
pub struct ConeIndex<'a> {
    ps: &'a PointSet,
    order: ConeOrder,
    grid: CellGrid,
}

impl<'a> ConeIndex<'a> {
    pub fn new(ps: &'a PointSet, order: ConeOrder) -> Result<Self> {
        if ps.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: ps.dim() });
        }
        Ok(ConeIndex { ps, order, grid: CellGrid::new(ps, 1.0) })
    }

    pub fn order(&self) -> ConeOrder {
        self.order
    }

    /// Nearest `u != v` with `u` preceding `v`, or `None` when `v` is a sink.
    pub fn nearest(&self, v: usize) -> Option<Neighbour> {
        let p = self.ps.point(v);
        let geom = &self.grid.geom;
        let c = geom.cell_of(p);
        let mut best: Option<(f64, usize)> = None;
        let (mut lo, mut hi) = ([0.0; 2], [0.0; 2]);
        let mut rho = 0;
        while !geom.exhausted(&c, rho) {
            geom.for_each_ring_cell(&c, rho, |cell, lin| {
                if self.grid.cell_is_empty(lin) {
                    return;
                }
                geom.cell_bounds(cell, &mut lo, &mut hi);
                if !self.order.may_meet_box(p, &lo, &hi) {
                    return;
                }
                for (u, q) in self.grid.cell_points(lin) {
                    if u == v || !self.order.precedes(q, p) {
                        continue;
                    }
                    let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
                    let better = match best {
                        None => true,
                        Some(b) => candidate_cmp(self.ps, (d2, u), b) == Ordering::Less,
                    };
                    if better {
                        best = Some((d2, u));
                    }
                }
            });
            if let Some((d2, _)) = best {
                if d2.sqrt() < geom.covered_radius(p, &c, rho) {
                    break;
                }
            }
            rho += 1;
        }
        best.map(|(d2, index)| Neighbour { index, distance: d2.sqrt() })
    }
}

/// One-off directed nearest-neighbour query; builds a [`ConeIndex`].
pub fn cone_nn(ps: &PointSet, v: usize, order: ConeOrder) -> Result<Option<Neighbour>> {
    if v >= ps.len() {
        return Err(invalid(format!("query index {v} out of range for {} points", ps.len())));
    }
    Ok(ConeIndex::new(ps, order)?.nearest(v))
}
