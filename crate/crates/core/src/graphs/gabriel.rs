//! Gabriel graph by local candidate search.
//!
//! A point `z` lies strictly inside the ball with diameter `xy` iff
//! `(z - x).(y - x) > |z - x|^2`. For fixed `x` and `z` that is an open
//! half-space of positions `y`, and it is closed under pushing `y` further
//! away from `x`. So once a whole ring of grid cells around `x` is covered
//! by such half-spaces, nothing beyond the ring can be a neighbour of `x`.

use super::{Edge, WeightedGraph};
use crate::error::Result;
use crate::points::PointSet;
use crate::spatial_index::grid::{Cell, CellGrid, GridGeometry};

#[inline]
fn blocks(x: &[f64], y: &[f64], z: &[f64]) -> bool {
    let mut dot = 0.0;
    let mut zz = 0.0;
    for k in 0..x.len() {
        let w = z[k] - x[k];
        dot += w * (y[k] - x[k]);
        zz += w * w;
    }
    dot > zz
}

/// Gabriel graph: `{x, y}` is an edge iff no other point lies strictly
/// inside the ball with diameter `xy`. Points on the sphere do not block.
pub fn build_gabriel(ps: &PointSet) -> Result<WeightedGraph> {
    let n = ps.len();
    if n < 2 {
        return Ok(WeightedGraph { n, edges: Vec::new() });
    }
    let d = ps.dim();
    let grid = CellGrid::new(ps, 1.0);
    let geom = &grid.geom;
    let mut edges = Vec::new();
    let mut cands: Vec<(f64, usize)> = Vec::new();
    let mut accepted: Vec<usize> = Vec::new();
    let (mut lo, mut hi) = (vec![0.0; d], vec![0.0; d]);

    for x in 0..n {
        let px = ps.point(x);
        let c = geom.cell_of(px);
        cands.clear();
        let mut rho = 0;
        loop {
            geom.for_each_ring_cell(&c, rho, |_, lin| {
                for (i, p) in grid.cell_points(lin) {
                    if i != x {
                        cands.push((crate::points::dist2(px, p), i));
                    }
                }
            });
            if geom.exhausted(&c, rho + 1) {
                break;
            }
            cands.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            if ring_covered(ps, geom, &c, rho + 1, px, &cands, &mut lo, &mut hi) {
                break;
            }
            rho += 1;
        }
        cands.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let cover = geom.covered_radius(px, &c, rho);

        accepted.clear();
        for t in 0..cands.len() {
            let (d2y, y) = cands[t];
            let py = ps.point(y);
            let by_accepted = accepted.iter().any(|&s| blocks(px, py, ps.point(cands[s].1)));
            if by_accepted || cands[..t].iter().any(|&(_, z)| blocks(px, py, ps.point(z))) {
                continue;
            }
            // Blockers are strictly closer to x than y; beyond the covered
            // radius some of them may not have been collected.
            if d2y.sqrt() >= cover && blocked_anywhere(ps, &grid, x, y) {
                continue;
            }
            accepted.push(t);
            if x < y {
                edges.push(Edge { src: x, dst: y, length: d2y.sqrt() });
            }
        }
    }
    edges.sort_by_key(|e| (e.src, e.dst));
    Ok(WeightedGraph { n, edges })
}

/// Whether every grid cell at Chebyshev distance `rho` from `c` lies inside
/// the blocking half-space of some collected point.
#[allow(clippy::too_many_arguments)]
fn ring_covered(
    ps: &PointSet,
    geom: &GridGeometry,
    c: &Cell,
    rho: usize,
    px: &[f64],
    cands: &[(f64, usize)],
    lo: &mut [f64],
    hi: &mut [f64],
) -> bool {
    if cands.is_empty() {
        return false;
    }
    let d = px.len();
    let mut covered = true;
    let mut last_blocker = 0usize;
    geom.for_each_ring_cell(c, rho, |cell, _| {
        if !covered {
            return;
        }
        geom.cell_bounds(cell, lo, hi);
        let box_blocked_by = |z: usize| {
            let pz = ps.point(z);
            let mut min_dot = 0.0;
            let mut zz = 0.0;
            for k in 0..d {
                let w = pz[k] - px[k];
                zz += w * w;
                min_dot += w * if w > 0.0 { lo[k] - px[k] } else { hi[k] - px[k] };
            }
            min_dot > zz
        };
        if box_blocked_by(cands[last_blocker].1) {
            return;
        }
        match cands.iter().position(|&(_, z)| box_blocked_by(z)) {
            Some(s) => last_blocker = s,
            None => covered = false,
        }
    });
    covered
}

/// Exact test for any point other than `x`, `y` strictly inside the ball
/// with diameter `xy`.
fn blocked_anywhere(ps: &PointSet, grid: &CellGrid, x: usize, y: usize) -> bool {
    let (px, py) = (ps.point(x), ps.point(y));
    let mid: Vec<f64> = px.iter().zip(py).map(|(a, b)| 0.5 * (a + b)).collect();
    let radius = 0.5 * ps.distance(x, y);
    let mut found = false;
    grid.geom.for_each_cell_near(&mid, radius, |lin| {
        if found {
            return;
        }
        found = grid.cell_points(lin).any(|(z, pz)| z != x && z != y && blocks(px, py, pz));
    });
    found
}
