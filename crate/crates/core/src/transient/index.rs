use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};
use crate::maps::{Complex, Family};
use crate::quadrature::{circle_mean, circle_nodes};

/// Starting node count for the trapezoid rule.
pub const MIN_NODES: usize = 64;
/// Node count at which doubling gives up.
pub const MAX_NODES: usize = 1 << 20;

const RADIUS_CAP: f64 = 1e-2;
const DOUBLING_TOL: f64 = 1e-10;

/// A positively oriented circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub centre: Complex,
    pub radius: f64,
    pub nodes: usize,
}

impl ContourSpec {
    pub fn new(centre: Complex, radius: f64, nodes: usize) -> Result<Self> {
        ensure_finite(centre, "contour centre")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InputDomain(format!("radius must be > 0, got {radius}")));
        }
        if nodes < 4 {
            return Err(Error::InputDomain(format!("need at least 4 nodes, got {nodes}")));
        }
        Ok(Self { centre, radius, nodes })
    }

    /// Circle around `fixed` with radius half the distance to the nearest of
    /// `others`, capped at `1e-2`.
    pub fn isolating(fixed: Complex, others: &[Complex]) -> Result<Self> {
        let nearest = others
            .iter()
            .map(|o| (o - fixed).norm())
            .fold(f64::INFINITY, f64::min);
        if nearest == 0.0 {
            return Err(Error::ContourContent { count: 2 });
        }
        Self::new(fixed, (0.5 * nearest).min(RADIUS_CAP), MIN_NODES)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexEstimate {
    pub index: Complex,
    /// Fixed points inside the contour counted with multiplicity.
    pub enclosed: i64,
    /// Nodes used by the accepted estimate.
    pub nodes: usize,
    /// Change between the last two doublings.
    pub change: f64,
}

fn winding_number<F: Family + ?Sized>(family: &F, c: &ContourSpec) -> Result<i64> {
    let mut n = c.nodes;
    loop {
        let d: Vec<Complex> = circle_nodes(c.centre, c.radius, n)
            .map(|(z, _)| family.displacement(z))
            .collect();
        let mut total = 0.0;
        let mut coarse = false;
        for k in 0..n {
            let step = (d[(k + 1) % n] / d[k]).arg();
            if step.abs() > PI / 2.0 {
                coarse = true;
                break;
            }
            total += step;
        }
        if !coarse {
            return Ok((total / (2.0 * PI)).round() as i64);
        }
        if n >= MAX_NODES {
            return Err(Error::QuadratureFailed(
                "argument of z - f(z) not resolved on the contour".into(),
            ));
        }
        n *= 2;
    }
}

fn check_nodes<F: Family + ?Sized>(family: &F, c: &ContourSpec) -> Result<()> {
    let scale = c.centre.norm().max(c.radius);
    let tol = 10.0 * f64::EPSILON * scale;
    for (k, (z, _)) in circle_nodes(c.centre, c.radius, c.nodes).enumerate() {
        let d = family.displacement(z);
        ensure_finite(d, "z - f(z) on the contour")?;
        // one Newton step estimates the distance to the nearest fixed point
        let distance = match family.derivative(z) {
            Ok(g1) => d.norm() / (Complex::new(1.0, 0.0) - g1).norm(),
            Err(_) => d.norm(),
        };
        if distance <= tol || d.norm() == 0.0 {
            return Err(Error::ContourDegenerate { node: k, distance });
        }
    }
    Ok(())
}

/// `(1 / 2 pi i) * contour integral of dz / (z - f(z))`, the holomorphic index of
/// the single fixed point inside `contour`.
///
/// Nodes double from `contour.nodes` until successive estimates agree to
/// `1e-10` relative (absolute below magnitude one).
pub fn holomorphic_index_numeric<F: Family + ?Sized>(family: &F, contour: ContourSpec) -> Result<IndexEstimate> {
    check_nodes(family, &contour)?;
    let enclosed = winding_number(family, &contour)?;
    if enclosed != 1 {
        return Err(Error::ContourContent { count: enclosed });
    }
    let integrand = |z: Complex| 1.0 / family.displacement(z);
    let mut n = contour.nodes;
    let mut prev = circle_mean(integrand, contour.centre, contour.radius, n);
    loop {
        n *= 2;
        let cur = circle_mean(integrand, contour.centre, contour.radius, n);
        let change = (cur - prev).norm();
        if !change.is_finite() {
            return Err(Error::QuadratureFailed("non-finite index estimate".into()));
        }
        if change < DOUBLING_TOL * cur.norm().max(1.0) {
            return Ok(IndexEstimate { index: cur, enclosed, nodes: n, change });
        }
        if n >= MAX_NODES {
            return Err(Error::QuadratureFailed(format!(
                "index estimate still changing by {change:e} at {n} nodes"
            )));
        }
        prev = cur;
    }
}
