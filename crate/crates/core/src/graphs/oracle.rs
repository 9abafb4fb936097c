//! Brute-force reference builders, quadratic or cubic in `n`.
//!
//! These share no search code with the indexed builders and exist to check
//! them. The cone test here works with angles from `atan2`, not with the
//! cross products used by [`ConeOrder::precedes`].

use std::f64::consts::TAU;

use super::{Edge, WeightedDigraph, WeightedGraph};
use crate::points::PointSet;
use crate::spatial_index::ConeOrder;

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lex_less(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

/// All other points ranked by distance from `q`; ties lexicographic, then by index.
pub fn ranking(ps: &PointSet, q: usize) -> Vec<(usize, f64)> {
    let mut r: Vec<(usize, f64)> =
        (0..ps.len()).filter(|&i| i != q).map(|i| (i, euclid(ps.point(q), ps.point(i)))).collect();
    r.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_less(ps.point(a.0), ps.point(b.0))).then(a.0.cmp(&b.0)));
    r
}

pub fn jth_nng(ps: &PointSet, j: usize) -> WeightedDigraph {
    let edges = (0..ps.len())
        .map(|i| {
            let (dst, length) = ranking(ps, i)[j - 1];
            Edge { src: i, dst, length }
        })
        .collect();
    WeightedDigraph { n: ps.len(), edges }
}

pub fn knng(ps: &PointSet, k: usize) -> WeightedDigraph {
    let mut edges = Vec::new();
    for i in 0..ps.len() {
        for &(dst, length) in &ranking(ps, i)[..k] {
            edges.push(Edge { src: i, dst, length });
        }
    }
    WeightedDigraph { n: ps.len(), edges }
}

pub fn knng_undirected(ps: &PointSet, k: usize) -> WeightedGraph {
    let n = ps.len();
    let near: Vec<Vec<usize>> = (0..n).map(|i| ranking(ps, i)[..k].iter().map(|e| e.0).collect()).collect();
    let mut edges = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if near[x].contains(&y) || near[y].contains(&x) {
                edges.push(Edge { src: x, dst: y, length: euclid(ps.point(x), ps.point(y)) });
            }
        }
    }
    WeightedGraph { n, edges }
}

pub fn ong(ps: &PointSet) -> WeightedDigraph {
    let mut edges = Vec::new();
    for i in 1..ps.len() {
        let best = (0..i)
            .map(|u| (u, euclid(ps.point(i), ps.point(u))))
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_less(ps.point(a.0), ps.point(b.0))))
            .expect("i >= 1");
        edges.push(Edge { src: i, dst: best.0, length: best.1 });
    }
    WeightedDigraph { n: ps.len(), edges }
}

/// `u` precedes `v` when the direction of `u - v`, measured anticlockwise
/// from the upward vertical, lies in `[theta, theta + phi]`.
pub fn precedes_by_angle(order: &ConeOrder, u: &[f64], v: &[f64]) -> bool {
    let (wx, wy) = (u[0] - v[0], u[1] - v[1]);
    let angle = (-wx).atan2(wy).rem_euclid(TAU);
    (angle - order.theta()).rem_euclid(TAU) <= order.phi()
}

pub fn cone_nn(ps: &PointSet, v: usize, order: &ConeOrder) -> Option<(usize, f64)> {
    (0..ps.len())
        .filter(|&u| u != v && precedes_by_angle(order, ps.point(u), ps.point(v)))
        .map(|u| (u, euclid(ps.point(u), ps.point(v))))
        .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_less(ps.point(a.0), ps.point(b.0))).then(a.0.cmp(&b.0)))
}

pub fn mdsf(ps: &PointSet, order: &ConeOrder) -> WeightedDigraph {
    let edges =
        (0..ps.len()).filter_map(|v| cone_nn(ps, v, order).map(|(dst, length)| Edge { src: v, dst, length })).collect();
    WeightedDigraph { n: ps.len(), edges }
}

pub fn minimal_elements(ps: &PointSet, order: &ConeOrder) -> usize {
    (0..ps.len()).filter(|&v| cone_nn(ps, v, order).is_none()).count()
}

/// Pairs `{x, y}` whose diametral open ball holds no third point, checked
/// against every point.
pub fn gabriel(ps: &PointSet) -> WeightedGraph {
    let n = ps.len();
    let mut edges = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let (px, py) = (ps.point(x), ps.point(y));
            let mid: Vec<f64> = px.iter().zip(py).map(|(a, b)| (a + b) / 2.0).collect();
            let half = euclid(px, py) / 2.0;
            let empty = (0..n).filter(|&z| z != x && z != y).all(|z| euclid(ps.point(z), &mid) >= half);
            if empty {
                edges.push(Edge { src: x, dst: y, length: 2.0 * half });
            }
        }
    }
    WeightedGraph { n, edges }
}

pub fn reciprocal_pairs(ps: &PointSet) -> usize {
    let nn: Vec<usize> = (0..ps.len()).map(|i| ranking(ps, i)[0].0).collect();
    (0..ps.len()).filter(|&i| nn[i] > i && nn[nn[i]] == i).count()
}
