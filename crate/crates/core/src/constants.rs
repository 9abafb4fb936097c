//! Closed-form constants: ball volumes and the limits of the rescaled total
//! power-weighted edge length for every supported graph family.
//!
//! All limits here are the uniform-density values. For a general density
//! multiply by [`crate::points::density_integral`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spatial_index::ConeOrder;

/// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::InvalidParameter(format!("log_gamma requires a positive finite argument, got {x}")));
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
        return (PI / (PI * x).sin()).ln() - ln_gamma_positive(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `Gamma(a) / Gamma(b)` evaluated in the log domain.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    Ok((log_gamma(a)? - log_gamma(b)?).exp())
}

fn check_dimension(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// Volume `v_d = pi^{d/2} / Gamma(1 + d/2)` of the Euclidean unit `d`-ball.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    check_dimension(d)?;
    Ok(ball_volume_unchecked(d))
}

// v_0 = 1, v_1 = 2, v_m = v_{m-2} * 2 pi / m.
fn ball_volume_unchecked(d: usize) -> f64 {
    let mut v = if d.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut m = if d.is_multiple_of(2) { 2 } else { 3 };
    while m <= d {
        v *= 2.0 * PI / m as f64;
        m += 2;
    }
    v
}

/// `int_c^1 (1 - t^2)^{m/2} dt`, by the reduction
/// `J_m = -c (1 - c^2)^{m/2} / (m + 1) + m / (m + 1) J_{m-2}`.
fn cap_profile_integral(m: usize, c: f64) -> f64 {
    let s = 1.0 - c * c;
    let (mut j, mut k) =
        if m.is_multiple_of(2) { (1.0 - c, 0) } else { (0.25 * PI - 0.5 * (c * s.sqrt() + c.asin()), 1) };
    while k < m {
        k += 2;
        let kf = k as f64;
        j = -c * s.powf(kf / 2.0) / (kf + 1.0) + kf / (kf + 1.0) * j;
    }
    j
}

/// Volume `omega_d` of the union of two unit `d`-balls whose centres are a
/// unit distance apart.
///
/// The overlap is two spherical caps of height 1/2, so
/// `omega_d = 2 v_d - 2 v_{d-1} int_{1/2}^1 (1 - t^2)^{(d-1)/2} dt`.
pub fn union_two_balls_volume(d: usize) -> Result<f64> {
    check_dimension(d)?;
    let cap = ball_volume_unchecked(d - 1) * cap_profile_integral(d - 1, 0.5);
    Ok(2.0 * ball_volume_unchecked(d) - 2.0 * cap)
}

/// The same volume as [`union_two_balls_volume`], computed by integrating
/// the cross-sectional `(d-1)`-volume of the union along the line of centres
/// with adaptive Simpson quadrature.
pub fn union_two_balls_volume_quadrature(d: usize) -> Result<f64> {
    check_dimension(d)?;
    let section = ball_volume_unchecked(d - 1);
    let half = (d as f64 - 1.0) / 2.0;
    // The union is symmetric about t = 1/2; integrate the left ball's slab.
    let f = |t: f64| section * (1.0 - t * t).max(0.0).powf(half);
    Ok(2.0 * adaptive_simpson(&f, -1.0, 0.5, 1e-14))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Limiting probability `v_d / omega_d` that a point belongs to a reciprocal
/// nearest-neighbour pair.
pub fn reciprocal_pair_fraction(d: usize) -> Result<f64> {
    Ok(unit_ball_volume(d)? / union_two_balls_volume(d)?)
}

/// The graph families with a builder in [`crate::graphs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphFamily {
    /// Each point joined to its `j`-th nearest neighbour (directed).
    JthNng {
        j: usize,
    },
    /// Each point joined to each of its first `k` nearest neighbours (directed).
    Knng {
        k: usize,
    },
    /// The undirected version of [`GraphFamily::Knng`].
    KnngUndirected {
        k: usize,
    },
    /// On-line nearest-neighbour graph: each arrival joins its nearest predecessor.
    Ong,
    /// Minimal directed spanning forest under a cone order in the plane.
    Mdsf {
        order: ConeOrder,
        with_origin: bool,
    },
    Gabriel,
}

impl GraphFamily {
    /// Short tag used on the command line and in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            GraphFamily::JthNng { .. } => "nng",
            GraphFamily::Knng { .. } => "knng",
            GraphFamily::KnngUndirected { .. } => "knng-undirected",
            GraphFamily::Ong => "ong",
            GraphFamily::Mdsf { .. } => "mdsf",
            GraphFamily::Gabriel => "gabriel",
        }
    }

    /// Structural checks that do not depend on `alpha`.
    pub fn validate(&self, d: usize) -> Result<()> {
        check_dimension(d)?;
        match *self {
            GraphFamily::JthNng { j: 0 } => Err(Error::InvalidParameter("j must be >= 1".into())),
            GraphFamily::Knng { k: 0 } | GraphFamily::KnngUndirected { k: 0 } => {
                Err(Error::InvalidParameter("k must be >= 1".into()))
            }
            GraphFamily::Mdsf { order, with_origin } => {
                if d != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, found: d });
                }
                if with_origin && !order.is_star() {
                    return Err(Error::InvalidParameter(
                        "an origin sink is only defined for the coordinatewise order (theta = phi = pi/2)".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphFamily::JthNng { j } => write!(f, "nng(j={j})"),
            GraphFamily::Knng { k } => write!(f, "knng(k={k})"),
            GraphFamily::KnngUndirected { k } => write!(f, "knng-undirected(k={k})"),
            GraphFamily::Ong => f.write_str("ong"),
            GraphFamily::Mdsf { order, with_origin } => {
                write!(f, "mdsf(theta={},phi={}", order.theta(), order.phi())?;
                if *with_origin {
                    f.write_str(",origin")?;
                }
                f.write_str(")")
            }
            GraphFamily::Gabriel => f.write_str("gabriel"),
        }
    }
}

/// A family together with the ambient dimension and the weight exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitQuery {
    pub family: GraphFamily,
    pub d: usize,
    pub alpha: f64,
}

impl LimitQuery {
    pub fn new(family: GraphFamily, d: usize, alpha: f64) -> Self {
        LimitQuery { family, d, alpha }
    }
}

/// `C(d, alpha, k) = v_d^{-alpha/d} d/(d+alpha) Gamma(k+1+alpha/d) / Gamma(k)`.
pub fn knng_constant(d: usize, alpha: f64, k: usize) -> Result<f64> {
    check_dimension(d)?;
    check_alpha(alpha)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let df = d as f64;
    let a = alpha / df;
    Ok(ball_volume_unchecked(d).powf(-a) * df / (df + alpha) * gamma_ratio(k as f64 + 1.0 + a, k as f64)?)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("weight exponent must be finite and non-negative, got {alpha}")))
    }
}

/// Per-point limit of `n^{(alpha-d)/d} * (total weight)` for uniform points
/// in the unit cube.
///
/// Fails with [`Error::Domain`] when the parameters fall outside the range
/// for which the family's law of large numbers holds.
pub fn limit_constant(q: &LimitQuery) -> Result<f64> {
    let LimitQuery { family, d, alpha } = *q;
    family.validate(d)?;
    check_alpha(alpha)?;
    let df = d as f64;
    let a = alpha / df;
    let vd = ball_volume_unchecked(d);
    match family {
        GraphFamily::JthNng { j } => Ok(vd.powf(-a) * gamma_ratio(j as f64 + a, j as f64)?),
        GraphFamily::Knng { k } => knng_constant(d, alpha, k),
        GraphFamily::KnngUndirected { k } => {
            if k != 1 {
                return Err(Error::Domain(format!(
                    "the undirected k-nearest-neighbour limit is only available for k = 1 (got k = {k})"
                )));
            }
            let omega = union_two_balls_volume(d)?;
            Ok(gamma_ratio(1.0 + a, 1.0)? * (vd.powf(-a) - 0.5 * vd * omega.powf(-1.0 - a)))
        }
        GraphFamily::Ong => {
            if alpha >= df {
                return Err(Error::Domain(format!(
                    "the on-line nearest-neighbour limit requires 0 <= alpha < d (got alpha = {alpha}, d = {d})"
                )));
            }
            Ok(df / (df - alpha) * vd.powf(-a) * gamma_ratio(1.0 + a, 1.0)?)
        }
        GraphFamily::Mdsf { order, .. } => {
            if !(alpha > 0.0 && alpha < 2.0) {
                return Err(Error::Domain(format!(
                    "the minimal directed spanning forest limit requires 0 < alpha < 2 (got alpha = {alpha})"
                )));
            }
            // Independent of theta and of the origin sink.
            Ok((2.0 / order.phi()).powf(alpha / 2.0) * gamma_ratio(1.0 + alpha / 2.0, 1.0)?)
        }
        GraphFamily::Gabriel => Ok(vd.powf(-a) * 2f64.powf(df + alpha - 1.0) * gamma_ratio(1.0 + a, 1.0)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn log_gamma_reference_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-15);
        assert!((log_gamma(1.5).unwrap() - (PI.sqrt() / 2.0).ln()).abs() < 1e-14);
        assert!((log_gamma(1.5).unwrap() + 0.120_782).abs() < 1e-6);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-13);
        assert!((log_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn log_gamma_matches_factorials_and_half_integers() {
        // ln Gamma(m) = sum ln k, ln Gamma(m + 1/2) = ln sqrt(pi) + sum ln(k + 1/2).
        let mut ln_fact = 0.0f64;
        let mut ln_half = PI.sqrt().ln();
        for m in 1..=50u32 {
            let got = log_gamma(m as f64).unwrap();
            if ln_fact == 0.0 {
                assert!(got.abs() < 1e-14, "m = {m}");
            } else {
                assert!(close(got, ln_fact, 1e-12), "m = {m}: {got} vs {ln_fact}");
            }
            ln_fact += (m as f64).ln();

            let x = m as f64 - 0.5;
            let got = log_gamma(x).unwrap();
            assert!(close(got, ln_half, 1e-12) || (got - ln_half).abs() < 1e-14, "x = {x}");
            ln_half += x.ln();
        }
    }

    #[test]
    fn log_gamma_rejects_non_positive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn reflection_branch_is_consistent() {
        // Gamma(x + 1) = x Gamma(x) across the x = 0.5 switch.
        for &x in &[0.1, 0.25, 0.4999, 0.3] {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = x.ln() + log_gamma(x).unwrap();
            assert!((lhs - rhs).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(unit_ball_volume(1).unwrap(), 2.0);
        assert!((unit_ball_volume(2).unwrap() - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!(matches!(unit_ball_volume(0), Err(Error::InvalidDimension(0))));
        for d in 1..=20usize {
            let via_gamma = ((d as f64 / 2.0) * PI.ln() - log_gamma(1.0 + d as f64 / 2.0).unwrap()).exp();
            assert!(close(unit_ball_volume(d).unwrap(), via_gamma, 1e-13), "d = {d}");
        }
    }

    #[test]
    fn union_volume_low_dimensions() {
        assert!((union_two_balls_volume(1).unwrap() - 3.0).abs() < 1e-14);
        let w2 = 4.0 * PI / 3.0 + 3f64.sqrt() / 2.0;
        assert!((union_two_balls_volume(2).unwrap() - w2).abs() < 1e-13);
        assert!((union_two_balls_volume(3).unwrap() - 9.0 * PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn union_volume_formula_agrees_with_quadrature() {
        for d in 1..=10 {
            let exact = union_two_balls_volume(d).unwrap();
            let quad = union_two_balls_volume_quadrature(d).unwrap();
            assert!(close(exact, quad, 1e-9), "d = {d}: {exact} vs {quad}");
        }
    }

    #[test]
    fn union_volume_between_one_and_two_balls() {
        for d in 1..=10 {
            let v = unit_ball_volume(d).unwrap();
            let w = union_two_balls_volume(d).unwrap();
            assert!(v < w && w < 2.0 * v, "d = {d}");
            let frac = reciprocal_pair_fraction(d).unwrap();
            assert!(frac > 0.0 && frac < 1.0);
        }
    }

    #[test]
    fn reciprocal_fractions() {
        assert!((reciprocal_pair_fraction(1).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        let expect = 6.0 * PI / (8.0 * PI + 3.0 * 3f64.sqrt());
        assert!((reciprocal_pair_fraction(2).unwrap() - expect).abs() < 1e-14);
        // 0.6215049..., quoted elsewhere as 0.62149
        assert!((expect - 0.62150).abs() < 1e-5);
    }

    fn q(family: GraphFamily, d: usize, alpha: f64) -> f64 {
        limit_constant(&LimitQuery::new(family, d, alpha)).unwrap()
    }

    #[test]
    fn limit_constant_examples() {
        assert!((q(GraphFamily::Knng { k: 1 }, 2, 1.0) - 0.5).abs() < 1e-14);
        for d in 1..=5 {
            for k in 1..=6 {
                assert!((q(GraphFamily::Knng { k }, d, 0.0) - k as f64).abs() < 1e-12);
            }
        }
        assert!((q(GraphFamily::KnngUndirected { k: 1 }, 1, 1.0) - 7.0 / 18.0).abs() < 1e-14);
        assert!((q(GraphFamily::KnngUndirected { k: 1 }, 2, 1.0) - 0.377_508).abs() < 5e-7);
        assert!((q(GraphFamily::Ong, 2, 1.0) - 1.0).abs() < 1e-14);
        let star = GraphFamily::Mdsf { order: ConeOrder::star(), with_origin: false };
        assert!((q(star, 2, 1.0) - 1.0).abs() < 1e-14);
        let half_plane = GraphFamily::Mdsf { order: ConeOrder::new(0.3, PI).unwrap(), with_origin: false };
        assert!((q(half_plane, 2, 1.0) - 2f64.sqrt() / 2.0).abs() < 1e-14);
        assert!((q(GraphFamily::Gabriel, 2, 1.0) - 2.0).abs() < 1e-14);
        assert!((q(GraphFamily::Gabriel, 2, 0.0) - 2.0).abs() < 1e-14);
        assert!((q(GraphFamily::Knng { k: 3 }, 2, 2.0) - 6.0 / PI).abs() < 1e-13);
    }

    #[test]
    fn undirected_closed_form_at_d2() {
        // The d = 2 specialisation written out with 6 / (8 pi + 3 sqrt 3).
        let r = 6.0 / (8.0 * PI + 3.0 * 3f64.sqrt());
        for &alpha in &[0.0, 0.5, 1.0, 2.0, 3.5] {
            let expect = gamma_ratio(1.0 + alpha / 2.0, 1.0).unwrap()
                * (PI.powf(-alpha / 2.0) - PI / 2.0 * r.powf(1.0 + alpha / 2.0));
            assert!(close(q(GraphFamily::KnngUndirected { k: 1 }, 2, alpha), expect, 1e-12));
        }
    }

    #[test]
    fn mdsf_constant_ignores_theta_and_origin() {
        let a = GraphFamily::Mdsf { order: ConeOrder::new(0.0, 1.0).unwrap(), with_origin: false };
        let b = GraphFamily::Mdsf { order: ConeOrder::new(4.0, 1.0).unwrap(), with_origin: false };
        assert_eq!(q(a, 2, 0.7), q(b, 2, 0.7));
        let s0 = GraphFamily::Mdsf { order: ConeOrder::star(), with_origin: false };
        let s1 = GraphFamily::Mdsf { order: ConeOrder::star(), with_origin: true };
        assert_eq!(q(s0, 2, 1.3), q(s1, 2, 1.3));
    }

    #[test]
    fn domain_errors() {
        let err = |f, d, a| limit_constant(&LimitQuery::new(f, d, a)).unwrap_err();
        assert!(matches!(err(GraphFamily::Ong, 2, 2.0), Error::Domain(_)));
        assert!(matches!(err(GraphFamily::Ong, 1, 1.5), Error::Domain(_)));
        let star = GraphFamily::Mdsf { order: ConeOrder::star(), with_origin: false };
        assert!(matches!(err(star, 2, 0.0), Error::Domain(_)));
        assert!(matches!(err(star, 2, 2.0), Error::Domain(_)));
        assert!(matches!(err(star, 3, 1.0), Error::DimensionMismatch { .. }));
        assert!(matches!(err(GraphFamily::KnngUndirected { k: 2 }, 2, 1.0), Error::Domain(_)));
        assert!(matches!(err(GraphFamily::Knng { k: 0 }, 2, 1.0), Error::InvalidParameter(_)));
        assert!(matches!(err(GraphFamily::Gabriel, 2, -1.0), Error::InvalidParameter(_)));
        let tilted = GraphFamily::Mdsf { order: ConeOrder::new(0.0, 1.0).unwrap(), with_origin: true };
        assert!(matches!(err(tilted, 2, 1.0), Error::InvalidParameter(_)));
    }

    #[test]
    fn undirected_below_directed() {
        for d in 1..=6 {
            for i in 0..=12 {
                let alpha = i as f64 * 0.5;
                assert!(q(GraphFamily::KnngUndirected { k: 1 }, d, alpha) < q(GraphFamily::Knng { k: 1 }, d, alpha));
            }
        }
    }
}
