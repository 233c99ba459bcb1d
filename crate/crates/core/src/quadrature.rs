//! Quadrature on triangles, segments and star-shaped polygons.
//!
//! Polygon rules are built by splitting the cell into one triangle per edge,
//! all sharing the centroid, and mapping a symmetric Gauss rule onto each.

use nalgebra::Point2;
use thiserror::Error;

use crate::mesh::ElementGeometry;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("no triangle rule of exactness {0} (maximum {MAX_TRIANGLE_EXACTNESS})")]
    UnsupportedDegree(usize),
    #[error("polygon is not star-shaped with respect to its centroid (sub-triangle {edge})")]
    NotStarShaped { edge: usize },
    #[error("segment endpoints coincide")]
    DegenerateSegment,
}

/// Highest exactness covered by the triangle table.
pub const MAX_TRIANGLE_EXACTNESS: usize = 5;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<Point2<f64>>,
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly.
    pub exactness: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: Fn(Point2<f64>) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Gauss-Legendre rule on a straight segment.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    /// Parameters in `[0, 1]` measured from the first endpoint.
    pub abscissae: Vec<f64>,
    pub points: Vec<Point2<f64>>,
    /// Length-weighted.
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl EdgeRule {
    pub fn integrate<F: Fn(Point2<f64>) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }
}

/// Barycentric orbit generators: (multiplicity class, coordinate, weight).
enum Orbit {
    Centroid(f64),
    /// Points `(a, a, 1 - 2a)` and permutations.
    Three(f64, f64),
}

fn table(exactness: usize) -> Option<(Vec<Orbit>, usize)> {
    let s15 = 15f64.sqrt();
    let orbits = match exactness {
        0 | 1 => (vec![Orbit::Centroid(1.0)], 1),
        2 => (vec![Orbit::Three(1.0 / 6.0, 1.0 / 3.0)], 2),
        3 | 4 => (vec![
            Orbit::Three(0.445_948_490_915_965, 0.223_381_589_678_011),
            Orbit::Three(0.091_576_213_509_771, 0.109_951_743_655_322),
        ], 4),
        5 => (vec![
            Orbit::Centroid(0.225),
            Orbit::Three((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0),
            Orbit::Three((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0),
        ], 5),
        _ => return None,
    };
    Some(orbits)
}

/// Symmetric Gauss rule as barycentric coordinates and weights summing to one.
fn barycentric_rule(exactness: usize) -> Result<(Vec<([f64; 3], f64)>, usize), QuadratureError> {
    let (orbits, exact) = table(exactness).ok_or(QuadratureError::UnsupportedDegree(exactness))?;
    let mut out = Vec::new();
    for orbit in orbits {
        match orbit {
            Orbit::Centroid(w) => out.push(([1.0 / 3.0; 3], w)),
            Orbit::Three(a, w) => {
                let b = 1.0 - 2.0 * a;
                out.push(([b, a, a], w));
                out.push(([a, b, a], w));
                out.push(([a, a, b], w));
            }
        }
    }
    Ok((out, exact))
}

/// Rule on the triangle `corners`, weights summing to its area.
pub fn triangle_rule_on(corners: [Point2<f64>; 3], exactness: usize) -> Result<QuadratureRule, QuadratureError> {
    let area = 0.5
        * ((corners[1].x - corners[0].x) * (corners[2].y - corners[0].y)
            - (corners[2].x - corners[0].x) * (corners[1].y - corners[0].y));
    let (bary, exact) = barycentric_rule(exactness)?;
    let mut points = Vec::with_capacity(bary.len());
    let mut weights = Vec::with_capacity(bary.len());
    for (l, w) in bary {
        points.push(Point2::new(
            l[0] * corners[0].x + l[1] * corners[1].x + l[2] * corners[2].x,
            l[0] * corners[0].y + l[1] * corners[1].y + l[2] * corners[2].y,
        ));
        weights.push(w * area);
    }
    Ok(QuadratureRule {
        points,
        weights,
        exactness: exact,
    })
}

/// Rule on the reference triangle `(0,0), (1,0), (0,1)`.
pub fn triangle_rule(exactness: usize) -> Result<QuadratureRule, QuadratureError> {
    triangle_rule_on(
        [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
        exactness,
    )
}

/// Centroid sub-triangulation rule; `m * s` points for an `m`-gon.
pub fn polygon_rule(geom: &ElementGeometry, exactness: usize) -> Result<QuadratureRule, QuadratureError> {
    let c = geom.centroid;
    let tol = 1e-12 * geom.area;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut exact = usize::MAX;
    for (i, edge) in geom.edges.iter().enumerate() {
        let sub = triangle_rule_on([c, edge.start, edge.end], exactness)?;
        if sub.measure() <= tol {
            return Err(QuadratureError::NotStarShaped { edge: i });
        }
        exact = exact.min(sub.exactness);
        points.extend(sub.points);
        weights.extend(sub.weights);
    }
    Ok(QuadratureRule {
        points,
        weights,
        exactness: exact,
    })
}

/// Collapsed (Duffy) Gauss-Legendre product rule on a triangle, exact to any
/// degree. More points than the symmetric table; meant as a reference rule.
pub fn collapsed_triangle_rule(corners: [Point2<f64>; 3], exactness: usize) -> QuadratureRule {
    let n = exactness / 2 + 2;
    let (x, w) = gauss_legendre(n);
    let area2 = (corners[1].x - corners[0].x) * (corners[2].y - corners[0].y)
        - (corners[2].x - corners[0].x) * (corners[1].y - corners[0].y);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (xi, wi) in x.iter().zip(&w) {
        let u = 0.5 * (1.0 + xi);
        for (xj, wj) in x.iter().zip(&w) {
            let v = 0.5 * (1.0 + xj) * (1.0 - u);
            let l0 = 1.0 - u - v;
            points.push(Point2::new(
                l0 * corners[0].x + u * corners[1].x + v * corners[2].x,
                l0 * corners[0].y + u * corners[1].y + v * corners[2].y,
            ));
            weights.push(0.25 * wi * wj * (1.0 - u) * area2.abs());
        }
    }
    QuadratureRule {
        points,
        weights,
        exactness,
    }
}

/// Reference polygon rule of arbitrary exactness, built like [`polygon_rule`]
/// from collapsed product rules.
pub fn reference_polygon_rule(geom: &ElementGeometry, exactness: usize) -> QuadratureRule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for edge in &geom.edges {
        let sub = collapsed_triangle_rule([geom.centroid, edge.start, edge.end], exactness);
        points.extend(sub.points);
        weights.extend(sub.weights);
    }
    QuadratureRule {
        points,
        weights,
        exactness,
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Interior Gauss-Lobatto nodes of order `k` on `[-1, 1]` (the `k - 1`
/// roots of `P_k'`), ascending.
pub fn gauss_lobatto_interior(k: usize) -> Vec<f64> {
    if k < 2 {
        return Vec::new();
    }
    let n = k as f64;
    let mut nodes = Vec::with_capacity(k - 1);
    for j in 1..k {
        // Chebyshev-Lobatto initial guess, Newton on P_k'
        let mut x = -(std::f64::consts::PI * j as f64 / n).cos();
        for _ in 0..100 {
            let (p, d1) = legendre_with_derivative(k, x);
            let d2 = (2.0 * x * d1 - n * (n + 1.0) * p) / (1.0 - x * x);
            let dx = d1 / d2;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        nodes.push(x);
    }
    if k % 2 == 0 {
        nodes[k / 2 - 1] = 0.0;
    }
    nodes
}

/// Gauss-Legendre rule on the segment `a`-`b` exact to `exactness`.
pub fn edge_rule(a: Point2<f64>, b: Point2<f64>, exactness: usize) -> Result<EdgeRule, QuadratureError> {
    let length = (b - a).norm();
    if length <= f64::EPSILON * (a.coords.norm() + b.coords.norm()).max(1.0) {
        return Err(QuadratureError::DegenerateSegment);
    }
    let n = exactness / 2 + 1;
    let (nodes, weights) = gauss_legendre(n);
    let abscissae: Vec<f64> = nodes.iter().map(|x| 0.5 * (1.0 + x)).collect();
    Ok(EdgeRule {
        points: abscissae.iter().map(|&t| a + (b - a) * t).collect(),
        weights: weights.iter().map(|w| 0.5 * w * length).collect(),
        abscissae,
        exactness: 2 * n - 1,
    })
}
