//! Instance generators and oracle comparisons shared by the test targets.
#![allow(dead_code)]

use nnlln::graphs::{self, oracle, Edge, EdgeList};
use nnlln::points::{generate, generate_with_rng, DensitySpec, PointSet, Seed};
use nnlln::ConeOrder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn uniform(n: usize, d: usize, seed: u64) -> PointSet {
    generate(n, d, &DensitySpec::UniformUnitCube, Seed(seed)).unwrap()
}

/// Distinct points on a coarse dyadic lattice, so that equal distances
/// are common and all arithmetic on them is exact.
pub fn lattice(n: usize, d: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = ((n as f64).powf(1.0 / d as f64).ceil() as u32 + 1).next_power_of_two();
    let mut seen = std::collections::HashSet::new();
    let mut coords = Vec::new();
    while seen.len() < n {
        let cell: Vec<u32> = (0..d).map(|_| rng.random_range(0..side)).collect();
        if seen.insert(cell.clone()) {
            coords.extend(cell.iter().map(|&c| c as f64 / side as f64));
        }
    }
    PointSet::new(d, coords).unwrap()
}

/// A random instance for the `i`-th trial: mostly uniform, every third on a lattice.
pub fn instance(i: u64, d: usize, max_n: usize) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + i);
    let n = rng.random_range(5..=max_n);
    if i % 3 == 2 {
        lattice(n, d, i)
    } else {
        generate_with_rng(n, d, &DensitySpec::UniformUnitCube, &mut rng).unwrap()
    }
}

pub fn random_cone(i: u64) -> ConeOrder {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de_0000 + i);
    match i % 4 {
        0 => ConeOrder::star(),
        1 => ConeOrder::new(rng.random_range(0.0..std::f64::consts::TAU), std::f64::consts::PI).unwrap(),
        _ => ConeOrder::new(rng.random_range(0.0..std::f64::consts::TAU), rng.random_range(0.2..std::f64::consts::PI))
            .unwrap(),
    }
}

fn same_edges(what: &str, got: &[Edge], want: &[Edge]) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{what}: {} edges, oracle has {}", got.len(), want.len()));
    }
    for (g, w) in got.iter().zip(want) {
        if (g.src, g.dst) != (w.src, w.dst) || (g.length - w.length).abs() > 1e-12 {
            return Err(format!("{what}: edge {g:?} where oracle has {w:?}"));
        }
    }
    Ok(())
}

fn sorted(mut e: Vec<Edge>) -> Vec<Edge> {
    e.sort_by_key(|e| (e.src, e.dst));
    e
}

pub fn check_nng(ps: &PointSet, j: usize) -> Result<(), String> {
    let g = graphs::build_jth_nng(ps, j).map_err(|e| e.to_string())?;
    same_edges(&format!("nng j={j}"), g.edges(), &oracle::jth_nng(ps, j).edges)
}

pub fn check_knng(ps: &PointSet, k: usize) -> Result<(), String> {
    let g = graphs::build_knng(ps, k).map_err(|e| e.to_string())?;
    same_edges(&format!("knng k={k}"), g.edges(), &oracle::knng(ps, k).edges)
}

pub fn check_knng_undirected(ps: &PointSet, k: usize) -> Result<(), String> {
    let g = graphs::build_knng_undirected(ps, k).map_err(|e| e.to_string())?;
    same_edges(&format!("undirected k={k}"), g.edges(), &oracle::knng_undirected(ps, k).edges)
}

pub fn check_ong(ps: &PointSet) -> Result<(), String> {
    let g = graphs::build_ong(ps).map_err(|e| e.to_string())?;
    same_edges("ong", g.edges(), &oracle::ong(ps).edges)
}

pub fn check_mdsf(ps: &PointSet, order: &ConeOrder) -> Result<(), String> {
    let g = graphs::build_mdsf(ps, *order).map_err(|e| e.to_string())?;
    let what = format!("mdsf theta={} phi={}", order.theta(), order.phi());
    same_edges(&what, g.edges(), &oracle::mdsf(ps, order).edges)?;
    let sinks = graphs::count_minimal_elements(ps, *order).map_err(|e| e.to_string())?;
    if sinks != oracle::minimal_elements(ps, order) {
        return Err(format!("{what}: {sinks} minimal elements, oracle has {}", oracle::minimal_elements(ps, order)));
    }
    Ok(())
}

pub fn check_gabriel(ps: &PointSet) -> Result<(), String> {
    let g = graphs::build_gabriel(ps).map_err(|e| e.to_string())?;
    same_edges("gabriel", &sorted(g.edges), &oracle::gabriel(ps).edges)
}

pub fn check_reciprocal(ps: &PointSet) -> Result<(), String> {
    let got = graphs::count_reciprocal_pairs(ps).map_err(|e| e.to_string())?;
    let want = oracle::reciprocal_pairs(ps);
    if got == want {
        Ok(())
    } else {
        Err(format!("{got} reciprocal pairs, oracle has {want}"))
    }
}

/// Every builder against its oracle on `count` instances per builder.
/// Returns the failures.
pub fn oracle_sweep(count: u64) -> Vec<String> {
    let mut failures = Vec::new();
    let mut note = |r: Result<(), String>, i: u64| {
        if let Err(e) = r {
            failures.push(format!("instance {i}: {e}"));
        }
    };
    for i in 0..count {
        let d = 1 + (i % 3) as usize;
        let ps = instance(i, d, 300);
        let j = 1 + (i % 4) as usize;
        note(check_nng(&ps, j), i);
        note(check_knng(&ps, j), i);
        note(check_knng_undirected(&ps, j), i);
        note(check_ong(&ps), i);
        note(check_reciprocal(&ps), i);
        let gab = instance(1000 + i, d, 200);
        note(check_gabriel(&gab), i);
        let plane = instance(2000 + i, 2, 300);
        let order = random_cone(i);
        // Lattice points sit on non-axis cone boundaries, where the two
        // membership tests may round differently; keep those to the star order.
        if order.is_star() || i % 3 != 2 {
            note(check_mdsf(&plane, &order), i);
        } else {
            note(check_mdsf(&uniform(plane.len(), 2, i), &order), i);
        }
    }
    failures
}
