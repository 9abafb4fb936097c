//! Point sets, sampling densities on the unit cube and the seeded sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// An ordered list of points in `R^d`.
///
/// The order is the arrival order used by the on-line nearest-neighbour
/// graph. Coordinates are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    coords: Vec<f64>,
    origin_appended: bool,
}

impl PointSet {
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if !coords.len().is_multiple_of(d) {
            return Err(Error::Parse(format!(
                "{} coordinates do not split into points of dimension {d}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Parse(format!("non-finite coordinate {bad}")));
        }
        Ok(PointSet { d, coords, origin_appended: false })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut coords = Vec::with_capacity(rows.len() * d);
        for r in rows {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: r.len() });
            }
            coords.extend_from_slice(r);
        }
        PointSet::new(d, coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    /// True when index 0 holds an origin sink added by [`PointSet::append_origin`].
    pub fn origin_appended(&self) -> bool {
        self.origin_appended
    }

    #[inline]
    pub fn dist2(&self, i: usize, j: usize) -> f64 {
        dist2(self.point(i), self.point(j))
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist2(i, j).sqrt()
    }

    /// Returns a copy with the origin inserted at index 0.
    pub fn append_origin(&self) -> Result<PointSet> {
        if self.d != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.d });
        }
        if self.origin_appended {
            return Err(invalid("origin already appended"));
        }
        if self.is_empty() {
            return Err(invalid("cannot append an origin to an empty point set"));
        }
        let mut coords = Vec::with_capacity(self.coords.len() + 2);
        coords.extend_from_slice(&[0.0, 0.0]);
        coords.extend_from_slice(&self.coords);
        Ok(PointSet { d: 2, coords, origin_appended: true })
    }

    pub fn translated(&self, shift: &[f64]) -> Result<PointSet> {
        if shift.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: shift.len() });
        }
        let coords = self.coords.iter().enumerate().map(|(i, c)| c + shift[i % self.d]).collect();
        Ok(PointSet { coords, ..self.clone() })
    }

    pub fn scaled(&self, r: f64) -> PointSet {
        PointSet { coords: self.coords.iter().map(|c| c * r).collect(), ..self.clone() }
    }
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Seed for the point sampler. The same seed and configuration always yield
/// bit-identical point sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// An independent ChaCha stream under this seed.
    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(stream);
        rng
    }
}

/// An axis-aligned box carrying a constant density value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub f: f64,
}

impl DensityBox {
    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    fn overlap(&self, other: &DensityBox) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .map(|((a0, a1), (b0, b1))| (a1.min(*b1) - a0.max(*b0)).max(0.0))
            .product()
    }

    fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| *x >= *l && *x < *h)
    }
}

const VOLUME_TOL: f64 = 1e-12;
const MASS_TOL: f64 = 1e-9;

/// Probability density on the unit cube `[0,1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    UniformUnitCube,
    /// Constant on each box of a partition of the unit cube.
    PiecewiseConstant(Vec<DensityBox>),
}

impl DensitySpec {
    pub fn validate(&self, d: usize) -> Result<()> {
        let boxes = match self {
            DensitySpec::UniformUnitCube => return Ok(()),
            DensitySpec::PiecewiseConstant(b) => b,
        };
        let bad = |m: String| Err(Error::InvalidDensity(m));
        if boxes.is_empty() {
            return bad("no boxes".into());
        }
        let mut volume = 0.0;
        let mut mass = 0.0;
        for (i, b) in boxes.iter().enumerate() {
            if b.lo.len() != d || b.hi.len() != d {
                return bad(format!("box {i} does not have dimension {d}"));
            }
            if !(b.f.is_finite() && b.f > 0.0) {
                return bad(format!("box {i} has density {} outside (0, inf)", b.f));
            }
            for (l, h) in b.lo.iter().zip(&b.hi) {
                if !(l.is_finite() && h.is_finite() && *l < *h) {
                    return bad(format!("box {i} has an empty or non-finite side [{l}, {h}]"));
                }
                if *l < -VOLUME_TOL || *h > 1.0 + VOLUME_TOL {
                    return bad(format!("box {i} leaves the unit cube"));
                }
            }
            volume += b.volume();
            mass += b.f * b.volume();
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].overlap(&boxes[j]) > VOLUME_TOL {
                    return bad(format!("boxes {i} and {j} overlap"));
                }
            }
        }
        if (volume - 1.0).abs() > VOLUME_TOL {
            return bad(format!("boxes cover volume {volume}, not the whole unit cube"));
        }
        if (mass - 1.0).abs() > MASS_TOL {
            return bad(format!("total mass is {mass}, expected 1"));
        }
        Ok(())
    }

    /// Value of the density at `p`, zero outside the cube.
    pub fn value_at(&self, p: &[f64]) -> f64 {
        match self {
            DensitySpec::UniformUnitCube => {
                if p.iter().all(|x| (0.0..1.0).contains(x)) {
                    1.0
                } else {
                    0.0
                }
            }
            DensitySpec::PiecewiseConstant(boxes) => boxes.iter().find(|b| b.contains(p)).map_or(0.0, |b| b.f),
        }
    }
}

/// `int f^{(d-alpha)/d}` over the support. Assumes `density` is valid for `d`.
pub fn density_integral(density: &DensitySpec, d: usize, alpha: f64) -> f64 {
    match density {
        DensitySpec::UniformUnitCube => 1.0,
        DensitySpec::PiecewiseConstant(boxes) => {
            let e = (d as f64 - alpha) / d as f64;
            boxes.iter().map(|b| b.f.powf(e) * b.volume()).sum()
        }
    }
}

/// Draws `n` independent points with the given density, seeded.
pub fn generate(n: usize, d: usize, density: &DensitySpec, seed: Seed) -> Result<PointSet> {
    generate_with_rng(n, d, density, &mut seed.rng())
}

/// As [`generate`], drawing from a caller-supplied generator.
pub fn generate_with_rng<R: Rng + ?Sized>(n: usize, d: usize, density: &DensitySpec, rng: &mut R) -> Result<PointSet> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    density.validate(d)?;
    let sampler = Sampler::new(density);
    let mut coords = vec![0.0; n * d];
    for p in coords.chunks_exact_mut(d) {
        sampler.draw(rng, p);
    }
    // Coincident points are redrawn so that all distances are distinct a.s.
    loop {
        let dups = duplicate_indices(&coords, d);
        if dups.is_empty() {
            break;
        }
        for i in dups {
            sampler.draw(rng, &mut coords[i * d..(i + 1) * d]);
        }
    }
    PointSet::new(d, coords)
}

struct Sampler<'a> {
    boxes: Option<&'a [DensityBox]>,
    cumulative: Vec<f64>,
}

impl<'a> Sampler<'a> {
    fn new(density: &'a DensitySpec) -> Self {
        match density {
            DensitySpec::UniformUnitCube => Sampler { boxes: None, cumulative: Vec::new() },
            DensitySpec::PiecewiseConstant(boxes) => {
                let mut acc = 0.0;
                let cumulative = boxes
                    .iter()
                    .map(|b| {
                        acc += b.f * b.volume();
                        acc
                    })
                    .collect();
                Sampler { boxes: Some(boxes), cumulative }
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.boxes {
            None => out.iter_mut().for_each(|x| *x = rng.random::<f64>()),
            Some(boxes) => {
                let total = *self.cumulative.last().expect("validated non-empty");
                let u = rng.random::<f64>() * total;
                let i = self.cumulative.partition_point(|&c| c <= u).min(boxes.len() - 1);
                let b = &boxes[i];
                for (k, x) in out.iter_mut().enumerate() {
                    let (lo, hi) = (b.lo[k], b.hi[k]);
                    let v = lo + rng.random::<f64>() * (hi - lo);
                    *x = if v >= hi { hi.next_down().max(lo) } else { v };
                }
            }
        }
    }
}

/// Indices of points equal to an earlier point.
fn duplicate_indices(coords: &[f64], d: usize) -> Vec<usize> {
    let n = coords.len() / d;
    let mut order: Vec<usize> = (0..n).collect();
    let row = |i: usize| &coords[i * d..(i + 1) * d];
    order.sort_unstable_by(|&a, &b| lex_cmp(row(a), row(b)).then(a.cmp(&b)));
    let mut dups: Vec<usize> = order.windows(2).filter(|w| row(w[0]) == row(w[1])).map(|w| w[1]).collect();
    dups.sort_unstable();
    dups
}

#[inline]
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_box() -> DensitySpec {
        DensitySpec::PiecewiseConstant(vec![
            DensityBox { lo: vec![0.0, 0.0], hi: vec![0.5, 1.0], f: 1.5 },
            DensityBox { lo: vec![0.5, 0.0], hi: vec![1.0, 1.0], f: 0.5 },
        ])
    }

    #[test]
    fn single_point_in_unit_cube() {
        let ps = generate(1, 3, &DensitySpec::UniformUnitCube, Seed(99)).unwrap();
        assert_eq!(ps.len(), 1);
        assert!(ps.point(0).iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn uniform_means() {
        let ps = generate(100_000, 2, &DensitySpec::UniformUnitCube, Seed(1)).unwrap();
        for axis in 0..2 {
            let mean = ps.iter().map(|p| p[axis]).sum::<f64>() / ps.len() as f64;
            assert!((mean - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn two_box_left_mass() {
        let ps = generate(100_000, 2, &two_box(), Seed(2)).unwrap();
        let left = ps.iter().filter(|p| p[0] < 0.5).count() as f64 / ps.len() as f64;
        assert!((left - 0.75).abs() < 0.01, "{left}");
        assert!(ps.iter().all(|p| p.iter().all(|x| (0.0..1.0).contains(x))));
    }

    #[test]
    fn reproducible() {
        let a = generate(500, 3, &two_box_3d(), Seed(5)).unwrap();
        let b = generate(500, 3, &two_box_3d(), Seed(5)).unwrap();
        assert_eq!(a, b);
        let c = generate(500, 3, &two_box_3d(), Seed(6)).unwrap();
        assert_ne!(a, c);
    }

    fn two_box_3d() -> DensitySpec {
        DensitySpec::PiecewiseConstant(vec![
            DensityBox { lo: vec![0.0, 0.0, 0.0], hi: vec![1.0, 1.0, 0.25], f: 2.0 },
            DensityBox { lo: vec![0.0, 0.0, 0.25], hi: vec![1.0, 1.0, 1.0], f: 2.0 / 3.0 },
        ])
    }

    #[test]
    fn density_integral_values() {
        assert_eq!(density_integral(&DensitySpec::UniformUnitCube, 3, 1.7), 1.0);
        assert!((density_integral(&two_box(), 2, 2.0) - 1.0).abs() < 1e-15);
        let expect = 0.5 * (1.5f64.sqrt() + 0.5f64.sqrt());
        assert!((density_integral(&two_box(), 2, 1.0) - expect).abs() < 1e-15);
        assert!((expect - 0.96593).abs() < 1e-5);
    }

    #[test]
    fn invalid_densities_rejected() {
        let mk = |boxes| DensitySpec::PiecewiseConstant(boxes).validate(2);
        // gap
        assert!(mk(vec![DensityBox { lo: vec![0.0, 0.0], hi: vec![0.5, 1.0], f: 2.0 }]).is_err());
        // overlap
        assert!(mk(vec![
            DensityBox { lo: vec![0.0, 0.0], hi: vec![0.6, 1.0], f: 1.0 },
            DensityBox { lo: vec![0.4, 0.0], hi: vec![1.0, 1.0], f: 1.0 },
        ])
        .is_err());
        // mass
        assert!(mk(vec![
            DensityBox { lo: vec![0.0, 0.0], hi: vec![0.5, 1.0], f: 1.0 },
            DensityBox { lo: vec![0.5, 0.0], hi: vec![1.0, 1.0], f: 2.0 },
        ])
        .is_err());
        // zero density
        assert!(mk(vec![
            DensityBox { lo: vec![0.0, 0.0], hi: vec![0.5, 1.0], f: 2.0 },
            DensityBox { lo: vec![0.5, 0.0], hi: vec![1.0, 1.0], f: 0.0 },
        ])
        .is_err());
        // wrong dimension
        assert!(two_box().validate(3).is_err());
        assert!(two_box().validate(2).is_ok());
        assert!(matches!(generate(10, 3, &two_box(), Seed(0)), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn generate_rejects_empty() {
        assert!(generate(0, 2, &DensitySpec::UniformUnitCube, Seed(0)).is_err());
        assert!(generate(3, 0, &DensitySpec::UniformUnitCube, Seed(0)).is_err());
    }

    #[test]
    fn append_origin_behaviour() {
        let ps = PointSet::from_rows(&[[0.25, 0.25], [0.5, 0.5], [0.75, 0.3]]).unwrap();
        let with = ps.append_origin().unwrap();
        assert_eq!(with.len(), 4);
        assert_eq!(with.point(0), &[0.0, 0.0]);
        assert_eq!(with.point(3), &[0.75, 0.3]);
        assert!(with.origin_appended());
        assert!(with.append_origin().is_err());
        assert!(PointSet::from_rows(&[[0.1, 0.2, 0.3]]).unwrap().append_origin().is_err());
        assert!(PointSet::new(2, vec![]).unwrap().append_origin().is_err());
    }

    #[test]
    fn duplicates_detected() {
        let coords = vec![0.1, 0.2, 0.3, 0.4, 0.1, 0.2, 0.3, 0.4, 0.5, 0.5];
        assert_eq!(duplicate_indices(&coords, 2), vec![2, 3]);
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::new(2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(PointSet::new(1, vec![f64::NAN]).is_err());
        assert!(PointSet::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }
}
