//! Geometric boundary models.
//!
//! The simplicial complex carries the combinatorics; exit-region analysis
//! needs a smooth parameterization of each boundary component. Supported
//! models: round circles in the plane (n = 2) and endpoints on the line
//! (n = 1). Orientation (which side is outward) is probed against the
//! complex rather than declared, so a misdescribed scenario fails loudly.

use crate::error::{Error, Result};
use crate::presentation::QuotientPresentation;
use std::f64::consts::TAU;

/// Circle parameters supplied by a scenario.
#[derive(Debug, Clone)]
pub struct CircleSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct CircleBoundary {
    pub center: [f64; 2],
    pub radius: f64,
    /// +1 when the outward normal is the outward radial direction e(theta)
    /// (disk-like), -1 when outward points toward the center (inner rim of
    /// an annulus).
    pub outward_sign: f64,
}

impl CircleBoundary {
    pub fn point(&self, theta: f64) -> [f64; 2] {
        [
            self.center[0] + self.radius * theta.cos(),
            self.center[1] + self.radius * theta.sin(),
        ]
    }

    /// Collar chart: inward depth v >= 0 moves into the manifold.
    pub fn point_at_depth(&self, theta: f64, v: f64) -> [f64; 2] {
        let r = self.radius - self.outward_sign * v;
        [
            self.center[0] + r * theta.cos(),
            self.center[1] + r * theta.sin(),
        ]
    }

    pub fn outward_normal(&self, theta: f64) -> [f64; 2] {
        [
            self.outward_sign * theta.cos(),
            self.outward_sign * theta.sin(),
        ]
    }

    pub fn tangent(&self, theta: f64) -> [f64; 2] {
        [-theta.sin(), theta.cos()]
    }

    pub fn angle_of(&self, p: &[f64]) -> f64 {
        let a = (p[1] - self.center[1]).atan2(p[0] - self.center[0]);
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }
}

#[derive(Debug, Clone)]
pub struct Endpoint {
    pub location: f64,
    /// +1 when the manifold lies to the left of the endpoint.
    pub outward_sign: f64,
}

#[derive(Debug, Clone)]
pub enum BoundaryModel {
    Endpoints(Vec<Endpoint>),
    Circles {
        circles: Vec<CircleBoundary>,
        /// `permutation[g][i]` is the circle that element g carries circle i
        /// onto.
        permutation: Vec<Vec<usize>>,
    },
}

impl BoundaryModel {
    pub fn component_count(&self) -> usize {
        match self {
            BoundaryModel::Endpoints(e) => e.len(),
            BoundaryModel::Circles { circles, .. } => circles.len(),
        }
    }
}

/// Builds the boundary model for a presentation, checking that the declared
/// circles actually trace the boundary of the complex and that the group
/// permutes them.
pub fn build_boundary_model(
    p: &QuotientPresentation,
    specs: &[CircleSpec],
    tol: f64,
) -> Result<BoundaryModel> {
    let boundary = p.complex.boundary_subcomplex()?;
    if boundary.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    match p.complex.ambient_dim() {
        1 => build_endpoints(p),
        2 => build_circles(p, specs, tol),
        n => Err(Error::UnsupportedDimension { n }),
    }
}

fn build_endpoints(p: &QuotientPresentation) -> Result<BoundaryModel> {
    let boundary = p.complex.boundary_subcomplex()?;
    let (lo, hi) = p
        .complex
        .bounding_box()
        .expect("nonempty complex has a bounding box");
    let delta = 0.01 * (hi[0] - lo[0]).max(1e-6);
    let mut endpoints = Vec::new();
    for s in boundary.simplices_of_dim(0) {
        let x = p.complex.vertices[s[0]][0];
        let right_inside = p.complex.contains_point(&[x + delta]);
        let left_inside = p.complex.contains_point(&[x - delta]);
        let outward_sign = match (left_inside, right_inside) {
            (true, false) => 1.0,
            (false, true) => -1.0,
            _ => {
                return Err(Error::ValidationError {
                    path: "complex".into(),
                    message: format!("cannot orient the boundary point at x = {x}"),
                })
            }
        };
        endpoints.push(Endpoint {
            location: x,
            outward_sign,
        });
    }
    endpoints.sort_by(|a, b| a.location.total_cmp(&b.location));
    Ok(BoundaryModel::Endpoints(endpoints))
}

fn build_circles(
    p: &QuotientPresentation,
    specs: &[CircleSpec],
    tol: f64,
) -> Result<BoundaryModel> {
    if specs.is_empty() {
        return Err(Error::ValidationError {
            path: "boundary.circles".into(),
            message: "two-dimensional scenarios must declare their boundary circles".into(),
        });
    }
    for (i, s) in specs.iter().enumerate() {
        if s.center.len() != 2 || !s.radius.is_finite() || s.radius <= 0.0 {
            return Err(Error::ValidationError {
                path: format!("boundary.circles[{i}]"),
                message: "expected a planar center and a positive radius".into(),
            });
        }
    }

    let boundary = p.complex.boundary_subcomplex()?;
    // Every boundary vertex must sit on (near) exactly one declared circle,
    // and every circle must own some vertices.
    let mut owned: Vec<Vec<usize>> = vec![Vec::new(); specs.len()];
    for s in boundary.simplices_of_dim(0) {
        let v = &p.complex.vertices[s[0]];
        let (best, dev) = specs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let d = ((v[0] - c.center[0]).powi(2) + (v[1] - c.center[1]).powi(2)).sqrt();
                (i, (d - c.radius).abs())
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one circle");
        if dev > 0.2 * specs[best].radius {
            return Err(Error::ValidationError {
                path: format!("boundary.circles[{best}]"),
                message: format!(
                    "boundary vertex {:?} is {dev:.3} away from the nearest declared circle",
                    v
                ),
            });
        }
        owned[best].push(s[0]);
    }
    for (i, o) in owned.iter().enumerate() {
        if o.len() < 3 {
            return Err(Error::ValidationError {
                path: format!("boundary.circles[{i}]"),
                message: "circle matches fewer than three boundary vertices".into(),
            });
        }
    }

    // Orient each circle by probing just inside and outside along the
    // direction of an owned vertex (the complex is polygonal, so the probe
    // must follow a vertex ray where the rim actually reaches the circle).
    let mut circles = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let v = &p.complex.vertices[owned[i][0]];
        let dx = v[0] - spec.center[0];
        let dy = v[1] - spec.center[1];
        let d = (dx * dx + dy * dy).sqrt();
        let u = [dx / d, dy / d];
        let delta = 0.02 * spec.radius;
        let probe = |rr: f64| {
            p.complex
                .contains_point(&[spec.center[0] + rr * u[0], spec.center[1] + rr * u[1]])
        };
        let inside_out = probe(d + delta);
        let inside_in = probe(d - delta);
        let outward_sign = match (inside_in, inside_out) {
            (true, false) => 1.0,
            (false, true) => -1.0,
            _ => {
                return Err(Error::ValidationError {
                    path: format!("boundary.circles[{i}]"),
                    message: "cannot orient the circle against the complex".into(),
                })
            }
        };
        circles.push(CircleBoundary {
            center: [spec.center[0], spec.center[1]],
            radius: spec.radius,
            outward_sign,
        });
    }

    // The action must permute the declared circles.
    let mut permutation = Vec::with_capacity(p.action.order());
    for g in 0..p.action.order() {
        let mut row = Vec::with_capacity(circles.len());
        for (i, c) in circles.iter().enumerate() {
            let img = p.action.apply(g, &c.center);
            let target = circles.iter().position(|t| {
                ((img[0] - t.center[0]).powi(2) + (img[1] - t.center[1]).powi(2)).sqrt()
                    <= tol.max(1e-9) * (1.0 + c.radius)
                    && (c.radius - t.radius).abs() <= tol.max(1e-9) * (1.0 + c.radius)
            });
            match target {
                Some(j) => row.push(j),
                None => {
                    return Err(Error::ValidationError {
                        path: format!("boundary.circles[{i}]"),
                        message: format!("group element {g} does not map this circle onto a declared circle"),
                    })
                }
            }
        }
        permutation.push(row);
    }

    Ok(BoundaryModel::Circles {
        circles,
        permutation,
    })
}
