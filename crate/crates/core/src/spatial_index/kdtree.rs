use std::cmp::Ordering;

use super::Neighbour;
use crate::error::{invalid, Result};
use crate::points::{lex_cmp, PointSet};

const LEAF_SIZE: usize = 8;

/// Balanced k-d tree over a point set, for exact k-nearest-neighbour queries.
///
/// The tree is implicit: the permuted slice `[lo, hi)` is a node whose
/// median position `mid` holds the splitting point, with `[lo, mid)` on the
/// low side and `(mid, hi)` on the high side of `axis[mid]`.
#[derive(Debug, Clone)]
pub struct KdIndex {
    d: usize,
    /// coordinates in tree order
    coords: Vec<f64>,
    /// tree position -> original index
    order: Vec<u32>,
    axis: Vec<u8>,
}

impl KdIndex {
    pub fn build(ps: &PointSet) -> Self {
        let d = ps.dim();
        let n = ps.len();
        assert!(n <= u32::MAX as usize, "point set too large for the index");
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut axis = vec![0u8; n];
        split(ps, &mut order, 0, &mut axis);
        let mut coords = Vec::with_capacity(n * d);
        for &i in &order {
            coords.extend_from_slice(ps.point(i as usize));
        }
        KdIndex { d, coords, order, axis }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    fn at(&self, pos: usize) -> &[f64] {
        &self.coords[pos * self.d..(pos + 1) * self.d]
    }

    /// The `k` nearest points to point `query` (itself excluded), in
    /// ascending order of distance.
    pub fn knn(&self, query: usize, k: usize) -> Result<Vec<Neighbour>> {
        let n = self.len();
        if query >= n {
            return Err(invalid(format!("query index {query} out of range for {n} points")));
        }
        if k == 0 || k >= n {
            return Err(invalid(format!("k = {k} must satisfy 1 <= k <= n - 1 = {}", n.saturating_sub(1))));
        }
        let pos = self.order.iter().position(|&i| i as usize == query).expect("every point is indexed");
        let mut best = Best::new(k);
        self.search_from(pos, &mut best);
        Ok(self.finish(&best))
    }

    /// `knn` for every point, indexed by original point index.
    pub fn knn_all(&self, k: usize) -> Result<Vec<Vec<Neighbour>>> {
        let n = self.len();
        if k == 0 || k >= n {
            return Err(invalid(format!("k = {k} must satisfy 1 <= k <= n - 1 = {}", n.saturating_sub(1))));
        }
        let mut out = vec![Vec::new(); n];
        let mut best = Best::new(k);
        // Tree order keeps consecutive queries close together.
        for pos in 0..n {
            best.clear();
            self.search_from(pos, &mut best);
            out[self.order[pos] as usize] = self.finish(&best);
        }
        Ok(out)
    }

    fn search_from(&self, pos: usize, best: &mut Best) {
        let q = self.at(pos).to_vec();
        self.search(0, self.len(), &q, pos, best);
    }

    fn finish(&self, best: &Best) -> Vec<Neighbour> {
        best.items
            .iter()
            .map(|&(d2, p)| Neighbour { index: self.order[p as usize] as usize, distance: d2.sqrt() })
            .collect()
    }

    fn consider(&self, pos: usize, q: &[f64], skip: usize, best: &mut Best) {
        if pos == skip {
            return;
        }
        let p = self.at(pos);
        let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2 > best.worst() {
            return;
        }
        best.offer(d2, pos as u32, |a, b| self.cmp_candidates(a, b));
    }

    fn cmp_candidates(&self, a: (f64, u32), b: (f64, u32)) -> Ordering {
        a.0.total_cmp(&b.0)
            .then_with(|| lex_cmp(self.at(a.1 as usize), self.at(b.1 as usize)))
            .then(self.order[a.1 as usize].cmp(&self.order[b.1 as usize]))
    }

    fn search(&self, lo: usize, hi: usize, q: &[f64], skip: usize, best: &mut Best) {
        if hi - lo <= LEAF_SIZE {
            for pos in lo..hi {
                self.consider(pos, q, skip, best);
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let axis = self.axis[mid] as usize;
        let diff = q[axis] - self.at(mid)[axis];
        self.consider(mid, q, skip, best);
        let (near, far) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.search(near.0, near.1, q, skip, best);
        // `<=` keeps equidistant candidates on the far side reachable for tie-breaking.
        if diff * diff <= best.worst() {
            self.search(far.0, far.1, q, skip, best);
        }
    }
}

fn split(ps: &PointSet, slice: &mut [u32], offset: usize, axis_out: &mut [u8]) {
    if slice.len() <= LEAF_SIZE {
        return;
    }
    let d = ps.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for &i in slice.iter() {
        for (k, &c) in ps.point(i as usize).iter().enumerate() {
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    let axis = (0..d).max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b]))).unwrap_or(0);
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| ps.point(a as usize)[axis].total_cmp(&ps.point(b as usize)[axis]));
    axis_out[offset + mid] = axis as u8;
    let (left, rest) = slice.split_at_mut(mid);
    split(ps, left, offset, axis_out);
    split(ps, &mut rest[1..], offset + mid + 1, axis_out);
}

/// Up to `k` best candidates, kept sorted.
struct Best {
    k: usize,
    items: Vec<(f64, u32)>,
}

impl Best {
    fn new(k: usize) -> Self {
        Best { k, items: Vec::with_capacity(k + 1) }
    }

    fn clear(&mut self) {
        self.items.clear();
    }

    #[inline]
    fn worst(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.items[self.k - 1].0
        }
    }

    fn offer(&mut self, d2: f64, pos: u32, cmp: impl Fn((f64, u32), (f64, u32)) -> Ordering) {
        let cand = (d2, pos);
        if self.items.len() == self.k && cmp(cand, self.items[self.k - 1]) != Ordering::Less {
            return;
        }
        let at = self.items.partition_point(|&e| cmp(e, cand) == Ordering::Less);
        self.items.insert(at, cand);
        self.items.truncate(self.k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::new(1, xs.to_vec()).unwrap()
    }

    #[test]
    fn three_points_on_a_line() {
        let idx = KdIndex::build(&line(&[0.0, 1.0, 3.0]));
        let nn = idx.knn(1, 2).unwrap();
        assert_eq!(nn, vec![Neighbour { index: 0, distance: 1.0 }, Neighbour { index: 2, distance: 2.0 }]);
    }

    #[test]
    fn two_points() {
        let idx = KdIndex::build(&line(&[0.3, 0.7]));
        assert_eq!(idx.knn(0, 1).unwrap()[0].index, 1);
        assert_eq!(idx.knn(1, 1).unwrap()[0].index, 0);
    }

    #[test]
    fn k_too_large() {
        let idx = KdIndex::build(&line(&[0.0, 1.0, 3.0]));
        assert!(idx.knn(0, 3).is_err());
        assert!(idx.knn(0, 0).is_err());
        assert!(idx.knn(5, 1).is_err());
        assert!(idx.knn_all(3).is_err());
    }

    #[test]
    fn ties_broken_lexicographically() {
        // From the origin, (-1, 0) and (0, -1) and (0, 1) and (1, 0) are equidistant.
        let ps = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]]).unwrap();
        let idx = KdIndex::build(&ps);
        let got: Vec<usize> = idx.knn(0, 4).unwrap().iter().map(|n| n.index).collect();
        assert_eq!(got, vec![4, 3, 2, 1]);
    }

    #[test]
    fn larger_tree_against_scan() {
        let mut coords = Vec::new();
        let mut s = 12345u64;
        for _ in 0..(300 * 2) {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            coords.push((s >> 11) as f64 / (1u64 << 53) as f64);
        }
        let ps = PointSet::new(2, coords).unwrap();
        let idx = KdIndex::build(&ps);
        let all = idx.knn_all(7).unwrap();
        for (q, got_q) in all.iter().enumerate() {
            let mut d: Vec<(f64, usize)> = (0..ps.len()).filter(|&i| i != q).map(|i| (ps.dist2(q, i), i)).collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0));
            let want: Vec<usize> = d[..7].iter().map(|x| x.1).collect();
            let got: Vec<usize> = got_q.iter().map(|n| n.index).collect();
            assert_eq!(got, want);
            assert_eq!(&idx.knn(q, 7).unwrap(), got_q);
        }
    }
}
