use std::cmp::Ordering;

use super::grid::IncrementalGrid;
use super::{candidate_cmp, Neighbour};
use crate::error::{invalid, Result};
use crate::points::PointSet;

/// Nearest-predecessor queries for points arriving in index order.
///
/// The grid is sized for the whole set up front and points are inserted as
/// they arrive; there is no rebuild.
#[derive(Debug, Clone)]
pub struct OnlineIndex<'a> {
    ps: &'a PointSet,
    grid: IncrementalGrid,
    inserted: usize,
}

impl<'a> OnlineIndex<'a> {
    pub fn new(ps: &'a PointSet) -> Self {
        OnlineIndex { ps, grid: IncrementalGrid::new(ps, 1.0), inserted: 0 }
    }

    /// Number of points inserted so far (they are `0..inserted`).
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Inserts the next arrival. Returns `false` once every point is in.
    pub fn insert_next(&mut self) -> bool {
        if self.inserted == self.ps.len() {
            return false;
        }
        let i = self.inserted;
        self.grid.insert(i, self.ps.point(i));
        self.inserted += 1;
        true
    }

    /// Nearest inserted point to point `v` (which need not be inserted).
    pub fn nearest_inserted(&self, v: usize) -> Option<Neighbour> {
        if self.inserted == 0 {
            return None;
        }
        let p = self.ps.point(v);
        let geom = &self.grid.geom;
        let c = geom.cell_of(p);
        let mut best: Option<(f64, usize)> = None;
        let mut rho = 0;
        while !geom.exhausted(&c, rho) {
            geom.for_each_ring_cell(&c, rho, |_, lin| {
                for u in self.grid.cell_items(lin) {
                    if u == v {
                        continue;
                    }
                    let d2 = self.ps.dist2(u, v);
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

/// Nearest predecessor of the `i`-th arrival, with `i` counted from 1.
///
/// Returns a 0-based point index. Ties go to the lexicographically
/// smallest predecessor.
pub fn online_nn(ps: &PointSet, i: usize) -> Result<Neighbour> {
    if i < 2 || i > ps.len() {
        return Err(invalid(format!(
            "arrival index {i} must lie in 2..={} (the first arrival has no predecessor)",
            ps.len()
        )));
    }
    let mut idx = OnlineIndex::new(ps);
    while idx.inserted() < i - 1 {
        idx.insert_next();
    }
    Ok(idx.nearest_inserted(i - 1).expect("at least one predecessor"))
}
