//! Uniform bucket grids with ring-expansion search.
//!
//! Only the first `min(d, 3)` axes are bucketed. Distances measured on the
//! bucketed axes lower-bound full distances, so every pruning rule below
//! stays exact in higher dimensions, only slower.

use crate::points::PointSet;

pub(crate) const MAX_GRID_AXES: usize = 3;

pub(crate) type Cell = [usize; MAX_GRID_AXES];

#[derive(Debug, Clone)]
pub(crate) struct GridGeometry {
    d: usize,
    g: usize,
    mins: [f64; MAX_GRID_AXES],
    cell: f64,
    dims: [usize; MAX_GRID_AXES],
    strides: [usize; MAX_GRID_AXES],
    bbox_lo: Vec<f64>,
    bbox_hi: Vec<f64>,
    slack: f64,
}

impl GridGeometry {
    /// Grid over the bounding box of `ps` with roughly `per_cell` points per cell.
    pub(crate) fn new(ps: &PointSet, per_cell: f64) -> Self {
        let d = ps.dim();
        let g = d.min(MAX_GRID_AXES);
        let n = ps.len().max(1);
        let mut bbox_lo = vec![f64::INFINITY; d];
        let mut bbox_hi = vec![f64::NEG_INFINITY; d];
        for p in ps.iter() {
            for k in 0..d {
                bbox_lo[k] = bbox_lo[k].min(p[k]);
                bbox_hi[k] = bbox_hi[k].max(p[k]);
            }
        }
        if ps.is_empty() {
            bbox_lo.iter_mut().for_each(|x| *x = 0.0);
            bbox_hi.iter_mut().for_each(|x| *x = 0.0);
        }
        let ext: Vec<f64> = (0..g).map(|a| bbox_hi[a] - bbox_lo[a]).collect();
        let max_ext = ext.iter().cloned().fold(0.0, f64::max);
        let mut cell = if max_ext > 0.0 {
            let floor = max_ext * 1e-9;
            let vol: f64 = ext.iter().map(|&e| e.max(floor)).product();
            (vol * per_cell / n as f64).powf(1.0 / g as f64)
        } else {
            1.0
        };
        let cap = (4.0 * n as f64 / per_cell.max(1e-3)).max(16.0);
        let mut dims = [1usize; MAX_GRID_AXES];
        loop {
            for a in 0..g {
                dims[a] = ((ext[a] / cell).ceil() as usize).max(1);
            }
            let total: f64 = dims[..g].iter().map(|&x| x as f64).product();
            if total <= cap {
                break;
            }
            cell *= 1.5;
        }
        let mut strides = [0usize; MAX_GRID_AXES];
        let mut s = 1;
        for a in 0..g {
            strides[a] = s;
            s *= dims[a];
        }
        let mut mins = [0.0; MAX_GRID_AXES];
        mins[..g].copy_from_slice(&bbox_lo[..g]);
        let scale = bbox_lo.iter().chain(&bbox_hi).fold(cell, |m, x| m.max(x.abs()));
        GridGeometry { d, g, mins, cell, dims, strides, bbox_lo, bbox_hi, slack: 1e-12 * scale }
    }

    pub(crate) fn n_cells(&self) -> usize {
        self.dims[..self.g].iter().product()
    }

    #[inline]
    pub(crate) fn cell_of(&self, p: &[f64]) -> Cell {
        let mut c = [0usize; MAX_GRID_AXES];
        for a in 0..self.g {
            c[a] = self.axis_index(a, p[a]);
        }
        c
    }

    #[inline]
    fn axis_index(&self, a: usize, x: f64) -> usize {
        let t = ((x - self.mins[a]) / self.cell).floor();
        if t <= 0.0 {
            0
        } else {
            (t as usize).min(self.dims[a] - 1)
        }
    }

    #[inline]
    pub(crate) fn linear(&self, c: &Cell) -> usize {
        (0..self.g).map(|a| c[a] * self.strides[a]).sum()
    }

    /// Bounds of a cell in all `d` axes, padded outward by a rounding slack.
    /// Axes that are not bucketed take the bounding box of the point set.
    pub(crate) fn cell_bounds(&self, c: &Cell, lo: &mut [f64], hi: &mut [f64]) {
        for a in 0..self.d {
            if a < self.g {
                lo[a] = self.mins[a] + c[a] as f64 * self.cell - self.slack;
                hi[a] = self.mins[a] + (c[a] + 1) as f64 * self.cell + self.slack;
            } else {
                lo[a] = self.bbox_lo[a] - self.slack;
                hi[a] = self.bbox_hi[a] + self.slack;
            }
        }
    }

    /// True when no cell lies at Chebyshev distance `rho` or more from `c`.
    pub(crate) fn exhausted(&self, c: &Cell, rho: usize) -> bool {
        (0..self.g).all(|a| rho > c[a].max(self.dims[a] - 1 - c[a]))
    }

    /// Lower bound on the distance from `p` (in cell `c`) to any point
    /// outside the cells within Chebyshev distance `rho` of `c`.
    pub(crate) fn covered_radius(&self, p: &[f64], c: &Cell, rho: usize) -> f64 {
        let mut r = f64::INFINITY;
        for a in 0..self.g {
            if c[a] > rho {
                let face = self.mins[a] + (c[a] - rho) as f64 * self.cell;
                r = r.min(p[a] - face);
            }
            if c[a] + rho + 1 < self.dims[a] {
                let face = self.mins[a] + (c[a] + rho + 1) as f64 * self.cell;
                r = r.min(face - p[a]);
            }
        }
        (r - self.slack).max(0.0)
    }

    /// Visits every in-range cell at Chebyshev distance exactly `rho` from `c`.
    pub(crate) fn for_each_ring_cell(&self, c: &Cell, rho: usize, mut f: impl FnMut(&Cell, usize)) {
        let r = rho as i64;
        let rng = |a: usize| {
            let lo = (c[a] as i64 - r).max(0);
            let hi = (c[a] as i64 + r).min(self.dims[a] as i64 - 1);
            (lo, hi)
        };
        // Along the last axis, either the whole clipped range or its two ends.
        let last_axis = |prefix: Cell, on_edge: bool, axis: usize, f: &mut dyn FnMut(&Cell, usize)| {
            let (lo, hi) = rng(axis);
            let mut cell = prefix;
            let mut emit = |z: i64, f: &mut dyn FnMut(&Cell, usize)| {
                cell[axis] = z as usize;
                let lin = self.linear(&cell);
                f(&cell, lin);
            };
            if on_edge {
                for z in lo..=hi {
                    emit(z, f);
                }
            } else {
                let z0 = c[axis] as i64 - r;
                let z1 = c[axis] as i64 + r;
                if z0 >= 0 {
                    emit(z0, f);
                }
                if z1 != z0 && z1 < self.dims[axis] as i64 {
                    emit(z1, f);
                }
            }
        };
        let mut cell = [0usize; MAX_GRID_AXES];
        match self.g {
            1 => last_axis(cell, false, 0, &mut f),
            2 => {
                let (lo, hi) = rng(0);
                for x in lo..=hi {
                    cell[0] = x as usize;
                    let edge = (x - c[0] as i64).abs() == r;
                    last_axis(cell, edge, 1, &mut f);
                }
            }
            _ => {
                let (lo0, hi0) = rng(0);
                let (lo1, hi1) = rng(1);
                for x in lo0..=hi0 {
                    cell[0] = x as usize;
                    for y in lo1..=hi1 {
                        cell[1] = y as usize;
                        let edge = (x - c[0] as i64).abs() == r || (y - c[1] as i64).abs() == r;
                        last_axis(cell, edge, 2, &mut f);
                    }
                }
            }
        }
    }

    /// Cells meeting the axis-aligned box `center +- radius` on the bucketed axes.
    pub(crate) fn for_each_cell_near(&self, center: &[f64], radius: f64, mut f: impl FnMut(usize)) {
        let mut lo = [0usize; MAX_GRID_AXES];
        let mut hi = [0usize; MAX_GRID_AXES];
        for a in 0..self.g {
            lo[a] = self.axis_index(a, center[a] - radius - self.slack);
            hi[a] = self.axis_index(a, center[a] + radius + self.slack);
        }
        let mut c = [0usize; MAX_GRID_AXES];
        match self.g {
            1 => {
                for x in lo[0]..=hi[0] {
                    c[0] = x;
                    f(self.linear(&c));
                }
            }
            2 => {
                for y in lo[1]..=hi[1] {
                    c[1] = y;
                    for x in lo[0]..=hi[0] {
                        c[0] = x;
                        f(self.linear(&c));
                    }
                }
            }
            _ => {
                for z in lo[2]..=hi[2] {
                    c[2] = z;
                    for y in lo[1]..=hi[1] {
                        c[1] = y;
                        for x in lo[0]..=hi[0] {
                            c[0] = x;
                            f(self.linear(&c));
                        }
                    }
                }
            }
        }
    }
}

/// Static grid: points bucketed once, stored contiguously per cell.
#[derive(Debug, Clone)]
pub(crate) struct CellGrid {
    pub(crate) geom: GridGeometry,
    start: Vec<u32>,
    items: Vec<u32>,
    coords: Vec<f64>,
    d: usize,
}

impl CellGrid {
    pub(crate) fn new(ps: &PointSet, per_cell: f64) -> Self {
        let geom = GridGeometry::new(ps, per_cell);
        let d = ps.dim();
        let cells: Vec<usize> = ps.iter().map(|p| geom.linear(&geom.cell_of(p))).collect();
        let mut start = vec![0u32; geom.n_cells() + 1];
        for &c in &cells {
            start[c + 1] += 1;
        }
        for i in 0..geom.n_cells() {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut items = vec![0u32; ps.len()];
        for (i, &c) in cells.iter().enumerate() {
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        let mut coords = Vec::with_capacity(ps.len() * d);
        for &i in &items {
            coords.extend_from_slice(ps.point(i as usize));
        }
        CellGrid { geom, start, items, coords, d }
    }

    /// `(original index, coordinates)` of the points bucketed in a cell.
    #[inline]
    pub(crate) fn cell_points(&self, lin: usize) -> impl Iterator<Item = (usize, &[f64])> + '_ {
        let (a, b) = (self.start[lin] as usize, self.start[lin + 1] as usize);
        self.items[a..b]
            .iter()
            .zip(self.coords[a * self.d..b * self.d].chunks_exact(self.d))
            .map(|(&i, p)| (i as usize, p))
    }

    #[inline]
    pub(crate) fn cell_is_empty(&self, lin: usize) -> bool {
        self.start[lin] == self.start[lin + 1]
    }
}

/// Grid that receives points one at a time.
#[derive(Debug, Clone)]
pub(crate) struct IncrementalGrid {
    pub(crate) geom: GridGeometry,
    head: Vec<u32>,
    next: Vec<u32>,
}

const NIL: u32 = u32::MAX;

impl IncrementalGrid {
    /// Geometry sized for all of `ps`; nothing inserted yet.
    pub(crate) fn new(ps: &PointSet, per_cell: f64) -> Self {
        let geom = GridGeometry::new(ps, per_cell);
        let head = vec![NIL; geom.n_cells()];
        IncrementalGrid { geom, head, next: vec![NIL; ps.len()] }
    }

    pub(crate) fn insert(&mut self, i: usize, p: &[f64]) {
        let c = self.geom.linear(&self.geom.cell_of(p));
        self.next[i] = self.head[c];
        self.head[c] = i as u32;
    }

    #[inline]
    pub(crate) fn cell_items(&self, lin: usize) -> impl Iterator<Item = usize> + '_ {
        let mut cur = self.head[lin];
        std::iter::from_fn(move || {
            if cur == NIL {
                None
            } else {
                let i = cur;
                cur = self.next[i as usize];
                Some(i as usize)
            }
        })
    }
}
