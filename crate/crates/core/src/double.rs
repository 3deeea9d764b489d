//! Doubling across the boundary.
//!
//! Given a field that is generic along the boundary, the double carries a
//! field that agrees with the original away from a collar and, inside the
//! collar, interpolates to the tangential restriction on the seam. Its
//! zeros are the interior zeros of both copies plus one zero per
//! tangential boundary zero, and the index bookkeeping at those seam zeros
//! ties the closed-case identity on the double back to the relative
//! identity on the original orbifold.

use crate::boundary::{BoundaryModel, CircleBoundary, Endpoint};
use crate::chain::{
    circle_scalar_roots, normal_component, require_field_nonvanishing_on_circle,
    tangential_component, tangential_component_derivative,
};
use crate::error::{Error, Result};
use crate::euler::{chi_orb, chi_orb_relative};
use crate::field::{orbifold_index_sum, IndexSum, VectorField};
use crate::presentation::QuotientPresentation;
use crate::rational::{rat, rat_int, Rational};
use crate::tol::Tolerances;
use std::f64::consts::TAU;

/// Angular samples per circle in the dense collar scan.
const SCAN_THETA: usize = 256;
/// Depth samples across the collar in the dense scan.
const SCAN_DEPTH: usize = 33;
/// How many times the collar support is halved before giving up.
const SUPPORT_RETRIES: usize = 6;

/// One zero of the doubled field sitting on the seam.
#[derive(Debug, Clone)]
pub struct BoundaryZero {
    /// Circle index, or None for an interval endpoint.
    pub circle: Option<usize>,
    /// Angle on the circle; the coordinate itself for an endpoint.
    pub theta: f64,
    pub point: Vec<f64>,
    /// True when the field exits the domain here (positive normal part).
    pub exit_side: bool,
    /// Index of the tangential restriction at this zero.
    pub tangential_index: i64,
    /// Index of the doubled field at this zero.
    pub doubled_index: i64,
    pub tangential_lambda: usize,
    pub doubled_lambda: usize,
    pub orbit_size: usize,
    pub isotropy_order: usize,
    pub normal_value: f64,
    pub tangential_slope: f64,
    /// Finite-difference residual of the block Jacobian check.
    pub jacobian_deviation: f64,
    /// Marks the lowest-index member of each orbit.
    pub orbit_representative: bool,
}

/// All quantities entering the doubling identities.
#[derive(Debug, Clone)]
pub struct DoubleReport {
    /// Collar half-width actually used for the interpolation band.
    pub support: f64,
    pub interior: IndexSum,
    pub boundary_zeros: Vec<BoundaryZero>,
    /// Orbit-weighted tangential indices on the entry side.
    pub entry_sum: Rational,
    /// Orbit-weighted tangential indices on the exit side.
    pub exit_sum: Rational,
    /// Total index of the doubled field: twice the interior sum plus the
    /// seam contributions.
    pub doubled_total: Rational,
    pub chi_double: Rational,
    pub chi_q: Rational,
    pub chi_boundary: Rational,
    pub chi_relative: Rational,
}

impl DoubleReport {
    /// The identities the double must satisfy, as (name, lhs, rhs) triples.
    pub fn identity_checks(&self) -> Vec<(&'static str, Rational, Rational)> {
        vec![
            (
                "index of the doubled field equals chi_orb of the double",
                self.doubled_total,
                self.chi_double,
            ),
            (
                "seam zeros of the tangential field account for chi_orb of the boundary",
                self.entry_sum + self.exit_sum,
                self.chi_boundary,
            ),
            (
                "doubling additivity of chi_orb",
                self.chi_double,
                rat_int(2) * self.chi_q - self.chi_boundary,
            ),
            (
                "relative identity through the exit-side sum",
                self.interior.total,
                self.chi_relative + self.exit_sum,
            ),
        ]
    }
}

/// C1 bump: 1 on [0, s/2], 0 beyond s, cubic in between.
fn smoothstep_down(u: f64, s: f64) -> f64 {
    if u <= 0.5 * s {
        1.0
    } else if u >= s {
        0.0
    } else {
        let w = (u - 0.5 * s) / (0.5 * s);
        1.0 - (3.0 * w * w - 2.0 * w * w * w)
    }
}

/// Point-set distance between two boundary circles.
fn circle_gap(a: &CircleBoundary, b: &CircleBoundary) -> f64 {
    let dx = a.center[0] - b.center[0];
    let dy = a.center[1] - b.center[1];
    let d = (dx * dx + dy * dy).sqrt();
    let lo = (d - a.radius).abs();
    let hi = d + a.radius;
    if lo <= b.radius && b.radius <= hi {
        0.0
    } else {
        (lo - b.radius).abs().min((hi - b.radius).abs())
    }
}

/// The doubled field in one collar chart. Coordinates are (theta, v) with
/// v the signed depth: positive on the original side, negative on the
/// mirror copy, zero on the seam.
struct CollarChart<'a> {
    field: &'a dyn VectorField,
    circle: CircleBoundary,
    support: f64,
}

impl CollarChart<'_> {
    fn eval(&self, theta: f64, v: f64) -> Result<[f64; 2]> {
        let av = v.abs();
        let phi = smoothstep_down(av, self.support);
        let c = &self.circle;
        let f0 = self.field.eval(&c.point(theta))?;
        let t0 = f0[0] * c.tangent(theta)[0] + f0[1] * c.tangent(theta)[1];
        let fv = self.field.eval(&c.point_at_depth(theta, av))?;
        let tangent = c.tangent(theta);
        let normal = c.outward_normal(theta);
        let tv = fv[0] * tangent[0] + fv[1] * tangent[1];
        let nv = fv[0] * normal[0] + fv[1] * normal[1];
        let xh = phi * t0 + (1.0 - phi) * tv;
        // At v = 0 the bump is 1 and the bracket vanishes, so signum(0)
        // never matters.
        let bracket = phi * v + (1.0 - phi) * v.signum();
        let xv = bracket * (-nv);
        Ok([xh, xv])
    }
}

/// The 1D analogue of the collar chart at an interval endpoint.
struct EndpointChart<'a> {
    field: &'a dyn VectorField,
    endpoint: Endpoint,
    support: f64,
}

impl EndpointChart<'_> {
    fn eval(&self, v: f64) -> Result<f64> {
        let av = v.abs();
        let phi = smoothstep_down(av, self.support);
        let x = self.endpoint.location - self.endpoint.outward_sign * av;
        let f = self.field.eval(&[x])?;
        let nv = f[0] * self.endpoint.outward_sign;
        let bracket = phi * v + (1.0 - phi) * v.signum();
        Ok(bracket * (-nv))
    }
}

fn wrap_angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Verify the doubled-field construction and collect the quantities the
/// doubling identities compare.
pub fn verify_double(
    p: &QuotientPresentation,
    field: &dyn VectorField,
    model: &BoundaryModel,
    tol: &Tolerances,
) -> Result<DoubleReport> {
    if p.complex.ambient_dim() > 2 {
        return Err(Error::UnsupportedCollar {
            requirement: "collar charts exist only for interval endpoints and circle boundaries"
                .into(),
        });
    }
    let interior = orbifold_index_sum(p, field, tol)?;
    let chi_q = chi_orb(p)?;
    let chi_boundary = chi_orb(&p.boundary()?)?;
    let chi_relative = chi_orb_relative(p)?;
    let chi_double = chi_orb(&p.double()?)?;

    let boundary_zeros = match model {
        BoundaryModel::Circles { circles, .. } => {
            seam_zeros_on_circles(p, field, circles, &interior, tol)?
        }
        BoundaryModel::Endpoints(endpoints) => {
            seam_zeros_on_endpoints(field, endpoints, &interior, tol)?
        }
    };
    let support = boundary_zeros.1;
    let boundary_zeros = boundary_zeros.0;

    let mut entry_sum = rat_int(0);
    let mut exit_sum = rat_int(0);
    let mut doubled_seam = rat_int(0);
    for z in &boundary_zeros {
        if !z.orbit_representative {
            continue;
        }
        let w = rat(z.tangential_index, z.isotropy_order as i64);
        if z.exit_side {
            exit_sum += w;
        } else {
            entry_sum += w;
        }
        doubled_seam += rat(z.doubled_index, z.isotropy_order as i64);
    }
    // The seam contribution is entry_sum - exit_sum by construction; keep
    // the direct sum as a consistency guard.
    debug_assert_eq!(doubled_seam, entry_sum - exit_sum);

    let doubled_total = rat_int(2) * interior.total + entry_sum - exit_sum;

    Ok(DoubleReport {
        support,
        interior,
        boundary_zeros,
        entry_sum,
        exit_sum,
        doubled_total,
        chi_double,
        chi_q,
        chi_boundary,
        chi_relative,
    })
}

fn seam_zeros_on_circles(
    p: &QuotientPresentation,
    field: &dyn VectorField,
    circles: &[CircleBoundary],
    interior: &IndexSum,
    tol: &Tolerances,
) -> Result<(Vec<BoundaryZero>, f64)> {
    // Locate the tangential zeros circle by circle.
    let mut raw: Vec<(usize, f64)> = Vec::new();
    for (ci, c) in circles.iter().enumerate() {
        require_field_nonvanishing_on_circle(field, c, tol)?;
        let mut max_t: f64 = 0.0;
        for j in 0..crate::chain::CIRCLE_SAMPLES {
            let theta = TAU * j as f64 / crate::chain::CIRCLE_SAMPLES as f64;
            max_t = max_t.max(tangential_component(field, c, theta)?.abs());
        }
        if max_t <= tol.tol_field {
            return Err(Error::BoundaryZeroDegenerate {
                reason: format!(
                    "tangential component vanishes identically on boundary circle {ci}; \
                     the seam restriction has no isolated zeros"
                ),
            });
        }
        let scalar = |theta: f64| tangential_component(field, c, theta);
        for theta in circle_scalar_roots(&scalar, c, "tangential component", tol)? {
            raw.push((ci, theta));
        }
    }

    // Collar size: a quarter of the tightest clearance, halved once more
    // for the interpolation band.
    let mut clearance = f64::INFINITY;
    for c in circles {
        clearance = clearance.min(c.radius);
    }
    for orbit in &interior.orbits {
        for c in circles {
            let dx = orbit.representative[0] - c.center[0];
            let dy = orbit.representative[1] - c.center[1];
            let d = ((dx * dx + dy * dy).sqrt() - c.radius).abs();
            clearance = clearance.min(d);
        }
    }
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            clearance = clearance.min(circle_gap(&circles[i], &circles[j]));
        }
    }
    let epsilon = 0.25 * clearance;
    let mut support = 0.5 * epsilon;

    // Classify each seam zero and cross-check the claimed block Jacobian
    // diag(T', -N) against finite differences of the actual doubled field.
    let mut zeros: Vec<BoundaryZero> = Vec::new();
    for &(ci, theta) in &raw {
        let c = &circles[ci];
        let n = normal_component(field, c, theta)?;
        if n.abs() <= tol.tol_field {
            return Err(Error::BoundaryZeroDegenerate {
                reason: format!(
                    "seam zero at angle {theta:.6} on circle {ci} sits on the exit-entry interface"
                ),
            });
        }
        let t_slope = tangential_component_derivative(field, c, theta)?;
        if t_slope.abs() <= tol.tol_degenerate {
            return Err(Error::BoundaryZeroDegenerate {
                reason: format!(
                    "seam zero at angle {theta:.6} on circle {ci} has a degenerate tangential slope"
                ),
            });
        }
        let exit_side = n > 0.0;
        let tangential_index = if t_slope > 0.0 { 1 } else { -1 };
        let doubled_index = if exit_side {
            -tangential_index
        } else {
            tangential_index
        };
        let tangential_lambda = usize::from(t_slope < 0.0);
        let doubled_lambda = tangential_lambda + usize::from(exit_side);
        zeros.push(BoundaryZero {
            circle: Some(ci),
            theta,
            point: c.point(theta).to_vec(),
            exit_side,
            tangential_index,
            doubled_index,
            tangential_lambda,
            doubled_lambda,
            orbit_size: 1,
            isotropy_order: 1,
            normal_value: n,
            tangential_slope: t_slope,
            jacobian_deviation: 0.0,
            orbit_representative: true,
        });
    }

    // Dense scan of the collar: away from the designated seam zeros the
    // doubled field must not vanish. A hit inside the interpolation band
    // means the support is too wide; halve it and retry.
    'support: for attempt in 0.. {
        for (ci, c) in circles.iter().enumerate() {
            let chart = CollarChart {
                field,
                circle: c.clone(),
                support,
            };
            let owned: Vec<f64> = zeros
                .iter()
                .filter(|z| z.circle == Some(ci))
                .map(|z| z.theta)
                .collect();
            for jt in 0..SCAN_THETA {
                let theta = TAU * jt as f64 / SCAN_THETA as f64;
                for jv in 0..SCAN_DEPTH {
                    let v = 0.96 * epsilon * (2.0 * jv as f64 / (SCAN_DEPTH - 1) as f64 - 1.0);
                    let near_zero = owned.iter().any(|&tz| {
                        let du = c.radius * wrap_angle_diff(theta, tz);
                        (du * du + v * v).sqrt() < 0.25 * support
                    });
                    if near_zero {
                        continue;
                    }
                    let x = chart.eval(theta, v)?;
                    if (x[0] * x[0] + x[1] * x[1]).sqrt() <= tol.tol_field {
                        if attempt + 1 < SUPPORT_RETRIES {
                            support *= 0.5;
                            continue 'support;
                        }
                        return Err(Error::SupportTooWide {
                            s: support,
                            location: c.point_at_depth(theta, v.abs()).to_vec(),
                        });
                    }
                }
            }
        }
        break;
    }

    // Finite-difference check of the seam Jacobian block structure.
    for z in &mut zeros {
        let ci = z.circle.expect("circle seam zero");
        let chart = CollarChart {
            field,
            circle: circles[ci].clone(),
            support,
        };
        let h_theta = 1e-4;
        let h_v = support / 16.0;
        let xp = chart.eval(z.theta + h_theta, 0.0)?;
        let xm = chart.eval(z.theta - h_theta, 0.0)?;
        let fd_hh = (xp[0] - xm[0]) / (2.0 * h_theta);
        let fd_vh = (xp[1] - xm[1]) / (2.0 * h_theta);
        let vp = chart.eval(z.theta, h_v)?;
        let vm = chart.eval(z.theta, -h_v)?;
        let fd_hv = (vp[0] - vm[0]) / (2.0 * h_v);
        let fd_vv = (vp[1] - vm[1]) / (2.0 * h_v);
        let deviation = (fd_hh - z.tangential_slope)
            .abs()
            .max((fd_vv + z.normal_value).abs())
            .max(fd_hv.abs())
            .max(fd_vh.abs());
        let scale = z.tangential_slope.abs() + z.normal_value.abs();
        if deviation > 0.1 * scale {
            return Err(Error::MismatchDetected {
                identity: "seam Jacobian block structure".into(),
                lhs: format!("finite differences [[{fd_hh:.6}, {fd_hv:.6}], [{fd_vh:.6}, {fd_vv:.6}]]"),
                rhs: format!(
                    "diag({:.6}, {:.6})",
                    z.tangential_slope, -z.normal_value
                ),
            });
        }
        z.jacobian_deviation = deviation;
    }

    group_seam_orbits(p, &mut zeros, tol)?;
    Ok((zeros, support))
}

/// Partition the seam zeros into group orbits and stamp orbit sizes,
/// isotropy orders, and representatives.
fn group_seam_orbits(
    p: &QuotientPresentation,
    zeros: &mut [BoundaryZero],
    tol: &Tolerances,
) -> Result<()> {
    let thresh = (10.0 * tol.tol_dedup).max(1e-7);
    let order = p.action.order();
    let mut orbit_of: Vec<usize> = (0..zeros.len()).collect();
    for g in &p.action.elements {
        if g.id == p.action.identity() {
            continue;
        }
        for i in 0..zeros.len() {
            let image = g.matrix_apply(&zeros[i].point);
            let mut target = None;
            for (j, other) in zeros.iter().enumerate() {
                let d = ((image[0] - other.point[0]).powi(2)
                    + (image[1] - other.point[1]).powi(2))
                .sqrt();
                if d < thresh {
                    target = Some(j);
                    break;
                }
            }
            let j = target.ok_or_else(|| Error::ZeroSetNotInvariant {
                location: zeros[i].point.clone(),
                element: g.id,
            })?;
            if zeros[j].exit_side != zeros[i].exit_side
                || zeros[j].tangential_index != zeros[i].tangential_index
            {
                return Err(Error::MismatchDetected {
                    identity: "seam zero classification is orbit-invariant".into(),
                    lhs: format!(
                        "zero at angle {:.6}: exit {}, index {}",
                        zeros[i].theta, zeros[i].exit_side, zeros[i].tangential_index
                    ),
                    rhs: format!(
                        "image at angle {:.6}: exit {}, index {}",
                        zeros[j].theta, zeros[j].exit_side, zeros[j].tangential_index
                    ),
                });
            }
            // Union by minimum representative.
            let (a, b) = (orbit_root(&orbit_of, i), orbit_root(&orbit_of, j));
            if a != b {
                let m = a.min(b);
                orbit_of[a] = m;
                orbit_of[b] = m;
            }
        }
    }
    let roots: Vec<usize> = (0..zeros.len()).map(|i| orbit_root(&orbit_of, i)).collect();
    for i in 0..zeros.len() {
        let size = roots.iter().filter(|&&r| r == roots[i]).count();
        zeros[i].orbit_size = size;
        zeros[i].isotropy_order = order / size;
        zeros[i].orbit_representative = roots[i] == i;
    }
    Ok(())
}

fn orbit_root(parent: &[usize], mut i: usize) -> usize {
    while parent[i] != i {
        i = parent[i];
    }
    i
}

fn seam_zeros_on_endpoints(
    field: &dyn VectorField,
    endpoints: &[Endpoint],
    interior: &IndexSum,
    tol: &Tolerances,
) -> Result<(Vec<BoundaryZero>, f64)> {
    // Clearance: interior zeros and the other endpoints.
    let mut clearance = f64::INFINITY;
    for e in endpoints {
        for orbit in &interior.orbits {
            clearance = clearance.min((orbit.representative[0] - e.location).abs());
        }
        for other in endpoints {
            let d = (other.location - e.location).abs();
            if d > 0.0 {
                clearance = clearance.min(0.5 * d);
            }
        }
    }
    let epsilon = 0.25 * clearance;
    let support = 0.5 * epsilon;

    let mut zeros = Vec::new();
    for e in endpoints {
        let f = field.eval(&[e.location])?;
        if f[0].abs() <= tol.tol_field {
            return Err(Error::FieldVanishesOnBoundary {
                location: vec![e.location],
                min_norm: f[0].abs(),
            });
        }
        let n = f[0] * e.outward_sign;
        let exit_side = n > 0.0;
        // A point is a zero of the empty tangential restriction; the empty
        // Jacobian has determinant one, so the index is +1 with no
        // negative eigenvalues.
        let tangential_index = 1;
        let doubled_index = if exit_side { -1 } else { 1 };
        let chart = EndpointChart {
            field,
            endpoint: e.clone(),
            support,
        };
        // Dense scan along the collar line.
        for jv in 0..4 * SCAN_DEPTH {
            let v = 0.96 * epsilon * (2.0 * jv as f64 / (4 * SCAN_DEPTH - 1) as f64 - 1.0);
            if v.abs() < 0.25 * support {
                continue;
            }
            let x = chart.eval(v)?;
            if x.abs() <= tol.tol_field {
                return Err(Error::SupportTooWide {
                    s: support,
                    location: vec![e.location - e.outward_sign * v.abs()],
                });
            }
        }
        let h_v = support / 16.0;
        let fd = (chart.eval(h_v)? - chart.eval(-h_v)?) / (2.0 * h_v);
        let deviation = (fd + n).abs();
        if deviation > 0.1 * n.abs() {
            return Err(Error::MismatchDetected {
                identity: "seam Jacobian block structure".into(),
                lhs: format!("finite difference {fd:.6}"),
                rhs: format!("{:.6}", -n),
            });
        }
        zeros.push(BoundaryZero {
            circle: None,
            theta: e.location,
            point: vec![e.location],
            exit_side,
            tangential_index,
            doubled_index,
            tangential_lambda: 0,
            doubled_lambda: usize::from(exit_side),
            orbit_size: 1,
            isotropy_order: 1,
            normal_value: n,
            tangential_slope: 0.0,
            jacobian_deviation: deviation,
            orbit_representative: true,
        });
    }
    Ok((zeros, support))
}
