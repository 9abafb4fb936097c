//! Graph builders for the six nearest-neighbour type families.
//!
//! Edges carry raw Euclidean lengths; the weight exponent is applied later
//! by [`crate::functionals`], so one build serves every `alpha`.

mod gabriel;
pub mod oracle;

pub use gabriel::build_gabriel;

use crate::constants::GraphFamily;
use crate::error::{invalid, Error, Result};
use crate::points::PointSet;
use crate::spatial_index::{ConeIndex, ConeOrder, KdIndex, Neighbour, OnlineIndex};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub length: f64,
}

/// Directed graph as an edge list over vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedDigraph {
    pub n: usize,
    pub edges: Vec<Edge>,
}

/// Undirected graph; every edge is stored once with `src < dst`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Collapses a directed edge list to unordered pairs.
    pub fn from_directed(g: &WeightedDigraph) -> Self {
        let mut edges: Vec<Edge> =
            g.edges.iter().map(|e| Edge { src: e.src.min(e.dst), dst: e.src.max(e.dst), length: e.length }).collect();
        edges.sort_by_key(|e| (e.src, e.dst));
        edges.dedup_by(|a, b| (a.src, a.dst) == (b.src, b.dst));
        WeightedGraph { n: g.n, edges }
    }
}

/// Anything with an edge list.
pub trait EdgeList {
    fn vertex_count(&self) -> usize;
    fn edges(&self) -> &[Edge];
}

impl EdgeList for WeightedDigraph {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

impl EdgeList for WeightedGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

/// Output of [`build`].
#[derive(Debug, Clone, PartialEq)]
pub enum Graph {
    Directed(WeightedDigraph),
    Undirected(WeightedGraph),
}

impl EdgeList for Graph {
    fn vertex_count(&self) -> usize {
        match self {
            Graph::Directed(g) => g.n,
            Graph::Undirected(g) => g.n,
        }
    }
    fn edges(&self) -> &[Edge] {
        match self {
            Graph::Directed(g) => &g.edges,
            Graph::Undirected(g) => &g.edges,
        }
    }
}

fn require_more_than(ps: &PointSet, k: usize, what: &str) -> Result<()> {
    if ps.len() <= k {
        Err(invalid(format!("{what} needs at least {} points, got {}", k + 1, ps.len())))
    } else {
        Ok(())
    }
}

fn neighbour_edge(src: usize, nb: &Neighbour) -> Edge {
    Edge { src, dst: nb.index, length: nb.distance }
}

/// Each point joined to its `j`-th nearest neighbour.
pub fn build_jth_nng(ps: &PointSet, j: usize) -> Result<WeightedDigraph> {
    if j == 0 {
        return Err(invalid("j must be >= 1"));
    }
    require_more_than(ps, j, "the j-th nearest-neighbour graph")?;
    let all = KdIndex::build(ps).knn_all(j)?;
    let edges = all.iter().enumerate().map(|(i, nb)| neighbour_edge(i, &nb[j - 1])).collect();
    Ok(WeightedDigraph { n: ps.len(), edges })
}

/// Each point joined to each of its first `k` nearest neighbours, in rank order.
pub fn build_knng(ps: &PointSet, k: usize) -> Result<WeightedDigraph> {
    if k == 0 {
        return Err(invalid("k must be >= 1"));
    }
    require_more_than(ps, k, "the k-nearest-neighbours graph")?;
    let all = KdIndex::build(ps).knn_all(k)?;
    let edges = all.iter().enumerate().flat_map(|(i, nbs)| nbs.iter().map(move |nb| neighbour_edge(i, nb))).collect();
    Ok(WeightedDigraph { n: ps.len(), edges })
}

pub fn build_knng_undirected(ps: &PointSet, k: usize) -> Result<WeightedGraph> {
    Ok(WeightedGraph::from_directed(&build_knng(ps, k)?))
}

/// On-line nearest-neighbour graph: arrival `i >= 1` (0-based) joins its
/// nearest predecessor.
pub fn build_ong(ps: &PointSet) -> Result<WeightedDigraph> {
    if ps.len() < 2 {
        return Err(invalid(format!("the on-line graph needs at least 2 points, got {}", ps.len())));
    }
    let mut index = OnlineIndex::new(ps);
    index.insert_next();
    let mut edges = Vec::with_capacity(ps.len() - 1);
    for i in 1..ps.len() {
        let nb = index.nearest_inserted(i).expect("point 0 is inserted");
        edges.push(neighbour_edge(i, &nb));
        index.insert_next();
    }
    Ok(WeightedDigraph { n: ps.len(), edges })
}

/// Minimal directed spanning forest: every non-sink joins its directed
/// nearest neighbour under `order`.
pub fn build_mdsf(ps: &PointSet, order: ConeOrder) -> Result<WeightedDigraph> {
    let index = ConeIndex::new(ps, order)?;
    let edges = (0..ps.len()).filter_map(|v| index.nearest(v).map(|nb| neighbour_edge(v, &nb))).collect();
    Ok(WeightedDigraph { n: ps.len(), edges })
}

/// Number of points with no predecessor under `order`.
pub fn count_minimal_elements(ps: &PointSet, order: ConeOrder) -> Result<usize> {
    if ps.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: ps.dim() });
    }
    let n = ps.len();
    // Minimality only needs existence of a predecessor, which a scan with
    // early exit answers faster than a nearest query on small sets.
    if n <= 64 {
        return Ok((0..n).filter(|&v| !(0..n).any(|u| u != v && order.precedes(ps.point(u), ps.point(v)))).count());
    }
    Ok(n - build_mdsf(ps, order)?.edges.len())
}

/// Number of unordered mutual nearest-neighbour pairs.
pub fn count_reciprocal_pairs(ps: &PointSet) -> Result<usize> {
    require_more_than(ps, 1, "reciprocal pairs")?;
    let nn = build_jth_nng(ps, 1)?;
    Ok(nn.edges.iter().filter(|e| e.src < e.dst && nn.edges[e.dst].dst == e.src).count())
}

/// Builds the graph of `family` on `ps`. An origin sink is prepended first
/// for an MDSF with `with_origin` unless `ps` already carries one.
pub fn build(ps: &PointSet, family: &GraphFamily) -> Result<Graph> {
    family.validate(ps.dim())?;
    Ok(match *family {
        GraphFamily::JthNng { j } => Graph::Directed(build_jth_nng(ps, j)?),
        GraphFamily::Knng { k } => Graph::Directed(build_knng(ps, k)?),
        GraphFamily::KnngUndirected { k } => Graph::Undirected(build_knng_undirected(ps, k)?),
        GraphFamily::Ong => Graph::Directed(build_ong(ps)?),
        GraphFamily::Mdsf { order, with_origin } => {
            if with_origin && !ps.origin_appended() {
                Graph::Directed(build_mdsf(&ps.append_origin()?, order)?)
            } else {
                Graph::Directed(build_mdsf(ps, order)?)
            }
        }
        GraphFamily::Gabriel => Graph::Undirected(build_gabriel(ps)?),
    })
}
