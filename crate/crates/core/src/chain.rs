//! Exit-region chains on the boundary.
//!
//! Level 1 splits the boundary by the sign of the outward-normal component
//! N of the field: the exit set R- (N > 0), the entry set R+ (N < 0), and
//! the interface Gamma (transversal roots of N). Level 2 classifies each
//! root by whether the tangential flow leaves R-: a root belongs to the
//! level-2 exit set exactly when the tangential component T and the
//! derivative N' have opposite signs. Each level contributes
//! chi(R-, Gamma) / |G| to the boundary correction.

use crate::boundary::{BoundaryModel, CircleBoundary};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::presentation::QuotientPresentation;
use crate::rational::{rat, Rational};
use crate::tol::Tolerances;
use std::f64::consts::TAU;

pub(crate) const CIRCLE_SAMPLES: usize = 1024;
const BISECT_ITERS: usize = 80;

/// A transversal root of the normal component on one boundary circle.
#[derive(Debug, Clone)]
pub struct BoundaryRoot {
    pub circle: usize,
    pub theta: f64,
    pub point: Vec<f64>,
    /// Analytic derivative dN/dtheta at the root.
    pub n_prime: f64,
    /// Tangential component T at the root.
    pub t_value: f64,
    /// Whether the root lies in the level-2 exit set.
    pub level2: bool,
}

#[derive(Debug, Clone)]
pub struct CircleRegions {
    pub circle: usize,
    /// `Some(true)`: the whole circle exits; `Some(false)`: it all enters;
    /// `None`: the circle carries roots and alternating arcs.
    pub uniform: Option<bool>,
    /// Exit arcs as (start, end) angles with end > start (end may pass TAU).
    pub exit_arcs: Vec<(f64, f64)>,
    pub entry_arc_count: usize,
}

#[derive(Debug, Clone)]
pub struct EndpointExit {
    pub location: f64,
    pub normal_component: f64,
    pub exits: bool,
}

/// Component counts for one chain level, both upstairs (total space) and
/// downstairs (underlying quotient, counted through orbits).
#[derive(Debug, Clone, Default)]
pub struct LevelCounts {
    /// Contractible components of the exit set (arcs at level 1 on circles,
    /// points at level 2 and on endpoints). Each contributes chi = 1.
    pub exit_components: usize,
    /// Closed components of the exit set (full circles), chi = 0 each.
    pub exit_closed: usize,
    /// Interface points at this level.
    pub gamma_points: usize,
    pub exit_component_orbits: usize,
    pub exit_closed_orbits: usize,
    pub gamma_orbits: usize,
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    /// One rational term per dimension level: chi_orb(R-_i, Gamma_i).
    pub terms: Vec<Rational>,
    pub levels: Vec<LevelCounts>,
    pub roots: Vec<BoundaryRoot>,
    pub regions: Vec<CircleRegions>,
    pub endpoints: Vec<EndpointExit>,
    /// chi of the boundary reconstructed from the regions (exit components
    /// plus entry components minus interface points); must match the complex.
    pub chi_boundary_from_regions: i64,
}

impl ChainResult {
    pub fn terms_total(&self) -> Rational {
        self.terms.iter().copied().sum()
    }

    /// chi(X_{R-_i}, X_{Gamma_i}) of underlying quotient spaces, per level.
    pub fn underlying_terms(&self) -> Vec<i64> {
        self.levels
            .iter()
            .map(|l| l.exit_component_orbits as i64 - l.gamma_orbits as i64)
            .collect()
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
    fn count(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&i| self.find(i) == i).count()
    }
}

fn dot2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn normal_component(field: &dyn VectorField, c: &CircleBoundary, theta: f64) -> Result<f64> {
    let p = c.point(theta);
    let f = field.eval(&p)?;
    Ok(dot2(&f, &c.outward_normal(theta)))
}

pub fn tangential_component(field: &dyn VectorField, c: &CircleBoundary, theta: f64) -> Result<f64> {
    let p = c.point(theta);
    let f = field.eval(&p)?;
    Ok(dot2(&f, &c.tangent(theta)))
}

/// Analytic dN/dtheta = r (J t)·n + s T along the circle.
pub fn normal_component_derivative(
    field: &dyn VectorField,
    c: &CircleBoundary,
    theta: f64,
) -> Result<f64> {
    let p = c.point(theta);
    let j = field.jacobian(&p)?;
    let t = c.tangent(theta);
    let n = c.outward_normal(theta);
    let jt = [
        j[(0, 0)] * t[0] + j[(0, 1)] * t[1],
        j[(1, 0)] * t[0] + j[(1, 1)] * t[1],
    ];
    let tv = tangential_component(field, c, theta)?;
    Ok(c.radius * dot2(&jt, &n) + c.outward_sign * tv)
}

/// Analytic dT/dtheta = r (J t)·t - s N along the circle.
pub fn tangential_component_derivative(
    field: &dyn VectorField,
    c: &CircleBoundary,
    theta: f64,
) -> Result<f64> {
    let p = c.point(theta);
    let j = field.jacobian(&p)?;
    let t = c.tangent(theta);
    let jt = [
        j[(0, 0)] * t[0] + j[(0, 1)] * t[1],
        j[(1, 0)] * t[0] + j[(1, 1)] * t[1],
    ];
    let nv = normal_component(field, c, theta)?;
    Ok(c.radius * dot2(&jt, &t) - c.outward_sign * nv)
}

/// The field must not vanish anywhere on a boundary circle (genericity of
/// the boundary contact). Returns the sampled minimum.
pub(crate) fn require_field_nonvanishing_on_circle(
    field: &dyn VectorField,
    c: &CircleBoundary,
    tol: &Tolerances,
) -> Result<f64> {
    let mut min_norm = f64::INFINITY;
    let mut min_at = 0.0;
    for j in 0..CIRCLE_SAMPLES {
        let theta = TAU * j as f64 / CIRCLE_SAMPLES as f64;
        let f = field.eval(&c.point(theta))?;
        let n = (f[0] * f[0] + f[1] * f[1]).sqrt();
        if n < min_norm {
            min_norm = n;
            min_at = theta;
        }
    }
    if min_norm <= tol.tol_field {
        return Err(Error::FieldVanishesOnBoundary {
            location: c.point(min_at).to_vec(),
            min_norm,
        });
    }
    Ok(min_norm)
}

/// Transversal roots of a scalar function on the circle, by a sign scan over
/// 1024 samples refined with bisection. A sample landing on a root (within
/// tol_field) is bracketed by its neighbors; tangencies without a sign
/// change are rejected as non-generic, with `what` naming the component in
/// the diagnostic.
pub(crate) fn circle_scalar_roots(
    scalar: &dyn Fn(f64) -> Result<f64>,
    c: &CircleBoundary,
    what: &str,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let s = CIRCLE_SAMPLES;
    let mut vals = Vec::with_capacity(s);
    for j in 0..s {
        vals.push(scalar(TAU * j as f64 / s as f64)?);
    }
    let step = TAU / s as f64;
    let exact: Vec<bool> = vals.iter().map(|v| v.abs() <= tol.tol_field).collect();

    let bisect = |mut a: f64, mut b: f64, fa_sign: f64| -> Result<f64> {
        for _ in 0..BISECT_ITERS {
            let m = 0.5 * (a + b);
            let fm = scalar(m)?;
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == fa_sign {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    };

    let mut roots = Vec::new();
    for j in 0..s {
        if exact[j] {
            let jm = (j + s - 1) % s;
            let jp = (j + 1) % s;
            if exact[jm] || exact[jp] {
                return Err(Error::NotGeneric {
                    reason: format!("{what} vanishes on adjacent samples"),
                    location: c.point(TAU * j as f64 / s as f64).to_vec(),
                });
            }
            if vals[jm].signum() == vals[jp].signum() {
                return Err(Error::NotGeneric {
                    reason: format!("even-order tangency of the {what}"),
                    location: c.point(TAU * j as f64 / s as f64).to_vec(),
                });
            }
            let mid = TAU * j as f64 / s as f64;
            roots.push(bisect(mid - step, mid + step, vals[jm].signum())?);
        }
    }
    for j in 0..s {
        let jp = (j + 1) % s;
        if exact[j] || exact[jp] {
            continue;
        }
        if vals[j].signum() != vals[jp].signum() {
            let a = TAU * j as f64 / s as f64;
            roots.push(bisect(a, a + step, vals[j].signum())?);
        }
    }
    let mut roots: Vec<f64> = roots.into_iter().map(|t| t.rem_euclid(TAU)).collect();
    roots.sort_by(|a, b| a.total_cmp(b));
    Ok(roots)
}

fn chain_on_circles(
    p: &QuotientPresentation,
    field: &dyn VectorField,
    circles: &[CircleBoundary],
    permutation: &[Vec<usize>],
    tol: &Tolerances,
) -> Result<ChainResult> {
    let mut all_roots: Vec<BoundaryRoot> = Vec::new();
    let mut regions: Vec<CircleRegions> = Vec::new();

    for (ci, c) in circles.iter().enumerate() {
        require_field_nonvanishing_on_circle(field, c, tol)?;
        let scalar = |theta: f64| normal_component(field, c, theta);
        let thetas = circle_scalar_roots(&scalar, c, "normal component", tol)?;
        if thetas.is_empty() {
            let exits = normal_component(field, c, 0.0)? > 0.0;
            regions.push(CircleRegions {
                circle: ci,
                uniform: Some(exits),
                exit_arcs: Vec::new(),
                entry_arc_count: 0,
            });
            continue;
        }
        let mut exit_arcs = Vec::new();
        let mut entry_arc_count = 0;
        for (k, &a) in thetas.iter().enumerate() {
            let b = if k + 1 < thetas.len() {
                thetas[k + 1]
            } else {
                thetas[0] + TAU
            };
            let mid = 0.5 * (a + b);
            let n_mid = normal_component(field, c, mid)?;
            if n_mid.abs() <= tol.tol_field {
                return Err(Error::NotGeneric {
                    reason: "normal component is ambiguous between adjacent roots".into(),
                    location: c.point(mid).to_vec(),
                });
            }
            if n_mid > 0.0 {
                exit_arcs.push((a, b));
            } else {
                entry_arc_count += 1;
            }
        }
        // Signs must alternate across roots; a mismatch means a missed root.
        if exit_arcs.len() * 2 != thetas.len() {
            return Err(Error::NotGeneric {
                reason: "exit and entry arcs do not alternate".into(),
                location: c.point(thetas[0]).to_vec(),
            });
        }
        for &theta in &thetas {
            let n_prime = normal_component_derivative(field, c, theta)?;
            if n_prime.abs() <= tol.tol_degenerate {
                return Err(Error::NotGeneric {
                    reason: "non-transversal root of the normal component".into(),
                    location: c.point(theta).to_vec(),
                });
            }
            let t_value = tangential_component(field, c, theta)?;
            if t_value.abs() <= tol.tol_field {
                return Err(Error::NotGeneric {
                    reason: "tangential component vanishes at a boundary root".into(),
                    location: c.point(theta).to_vec(),
                });
            }
            let level2 = t_value.signum() == -n_prime.signum();
            all_roots.push(BoundaryRoot {
                circle: ci,
                theta,
                point: c.point(theta).to_vec(),
                n_prime,
                t_value,
                level2,
            });
        }
        regions.push(CircleRegions {
            circle: ci,
            uniform: None,
            exit_arcs,
            entry_arc_count,
        });
    }

    // Upstairs counts.
    let gamma_points = all_roots.len();
    let exit_components: usize = regions.iter().map(|r| r.exit_arcs.len()).sum();
    let exit_closed = regions
        .iter()
        .filter(|r| r.uniform == Some(true))
        .count();
    let level2_points = all_roots.iter().filter(|r| r.level2).count();

    // Downstairs orbit counts via the action on roots, arcs, and circles.
    let order = p.action.order();
    let match_tol = (10.0 * tol.tol_dedup).max(1e-7);

    let mut root_sets = DisjointSet::new(all_roots.len());
    for (i, r) in all_roots.iter().enumerate() {
        for g in 1..order {
            let img = p.action.apply(g, &r.point);
            let tc = permutation[g][r.circle];
            let j = all_roots
                .iter()
                .position(|q| {
                    q.circle == tc
                        && ((q.point[0] - img[0]).powi(2) + (q.point[1] - img[1]).powi(2)).sqrt()
                            < match_tol
                })
                .ok_or_else(|| Error::NotGeneric {
                    reason: format!("boundary root set is not invariant under element {g}"),
                    location: r.point.clone(),
                })?;
            if all_roots[j].level2 != r.level2 {
                return Err(Error::NotGeneric {
                    reason: format!("level-2 classification is not invariant under element {g}"),
                    location: r.point.clone(),
                });
            }
            root_sets.union(i, j);
        }
    }
    let gamma_orbits = root_sets.count();

    let mut level2_sets = DisjointSet::new(all_roots.len());
    for (i, r) in all_roots.iter().enumerate() {
        if !r.level2 {
            continue;
        }
        for g in 1..order {
            let img = p.action.apply(g, &r.point);
            let tc = permutation[g][r.circle];
            if let Some(j) = all_roots.iter().position(|q| {
                q.circle == tc
                    && ((q.point[0] - img[0]).powi(2) + (q.point[1] - img[1]).powi(2)).sqrt()
                        < match_tol
            }) {
                level2_sets.union(i, j);
            }
        }
    }
    let level2_orbits = {
        let mut seen = std::collections::BTreeSet::new();
        for (i, r) in all_roots.iter().enumerate() {
            if r.level2 {
                seen.insert(level2_sets.find(i));
            }
        }
        seen.len()
    };

    // Arc orbits: identify each exit arc by (circle, index) and map its
    // midpoint through the action.
    let arc_ids: Vec<(usize, usize)> = regions
        .iter()
        .flat_map(|r| (0..r.exit_arcs.len()).map(move |k| (r.circle, k)))
        .collect();
    let mut arc_sets = DisjointSet::new(arc_ids.len());
    for (ai, &(ci, k)) in arc_ids.iter().enumerate() {
        let (a, b) = regions[ci].exit_arcs[k];
        let mid = 0.5 * (a + b);
        let point = circles[ci].point(mid);
        for g in 1..order {
            let img = p.action.apply(g, &point);
            let tc = permutation[g][ci];
            let phi = circles[tc].angle_of(&img);
            let hit = regions[tc].exit_arcs.iter().position(|&(aa, bb)| {
                let span = bb - aa;
                (phi - aa).rem_euclid(TAU) <= span
            });
            match hit.and_then(|kk| arc_ids.iter().position(|&id| id == (tc, kk))) {
                Some(aj) => arc_sets.union(ai, aj),
                None => {
                    return Err(Error::NotGeneric {
                        reason: format!("exit region is not invariant under element {g}"),
                        location: point.to_vec(),
                    })
                }
            }
        }
    }
    let exit_component_orbits = arc_sets.count();

    let closed_ids: Vec<usize> = regions
        .iter()
        .filter(|r| r.uniform == Some(true))
        .map(|r| r.circle)
        .collect();
    let mut closed_sets = DisjointSet::new(closed_ids.len());
    for (i, &ci) in closed_ids.iter().enumerate() {
        for g in 1..order {
            let tc = permutation[g][ci];
            match closed_ids.iter().position(|&c2| c2 == tc) {
                Some(j) => closed_sets.union(i, j),
                None => {
                    return Err(Error::NotGeneric {
                        reason: format!("exit region is not invariant under element {g}"),
                        location: circles[ci].point(0.0).to_vec(),
                    })
                }
            }
        }
    }
    let exit_closed_orbits = closed_sets.count();

    let order_i = order as i64;
    let levels = vec![
        LevelCounts {
            exit_components,
            exit_closed,
            gamma_points,
            exit_component_orbits,
            exit_closed_orbits,
            gamma_orbits,
        },
        LevelCounts {
            exit_components: level2_points,
            exit_closed: 0,
            gamma_points: 0,
            exit_component_orbits: level2_orbits,
            exit_closed_orbits: 0,
            gamma_orbits: 0,
        },
    ];
    let terms = vec![
        rat(exit_components as i64 - gamma_points as i64, order_i),
        rat(level2_points as i64, order_i),
    ];
    // Sum rule: each circle is covered by its closed exit and entry arcs,
    // which overlap exactly at the roots, so chi(circle) = #arcs - #roots.
    let chi_boundary_from_regions = regions
        .iter()
        .enumerate()
        .map(|(ci, r)| {
            let arcs = r.exit_arcs.len() + r.entry_arc_count;
            let roots = all_roots.iter().filter(|b| b.circle == ci).count();
            arcs as i64 - roots as i64
        })
        .sum();

    Ok(ChainResult {
        terms,
        levels,
        roots: all_roots,
        regions,
        endpoints: Vec::new(),
        chi_boundary_from_regions,
    })
}

fn chain_on_endpoints(
    field: &dyn VectorField,
    endpoints: &[crate::boundary::Endpoint],
    tol: &Tolerances,
) -> Result<ChainResult> {
    let mut details = Vec::new();
    for e in endpoints {
        let f = field.eval(&[e.location])?[0];
        if f.abs() <= tol.tol_field {
            return Err(Error::FieldVanishesOnBoundary {
                location: vec![e.location],
                min_norm: f.abs(),
            });
        }
        let n = f * e.outward_sign;
        details.push(EndpointExit {
            location: e.location,
            normal_component: n,
            exits: n > 0.0,
        });
    }
    let exits = details.iter().filter(|d| d.exits).count();
    let levels = vec![LevelCounts {
        exit_components: exits,
        exit_closed: 0,
        gamma_points: 0,
        exit_component_orbits: exits,
        exit_closed_orbits: 0,
        gamma_orbits: 0,
    }];
    Ok(ChainResult {
        terms: vec![rat(exits as i64, 1)],
        levels,
        roots: Vec::new(),
        regions: Vec::new(),
        endpoints: details,
        chi_boundary_from_regions: endpoints.len() as i64,
    })
}

/// Computes the full exit-region chain for a presentation with boundary.
/// Supported in dimensions 1 and 2.
pub fn compute_chain(
    p: &QuotientPresentation,
    field: &dyn VectorField,
    model: &BoundaryModel,
    tol: &Tolerances,
) -> Result<ChainResult> {
    match model {
        BoundaryModel::Endpoints(endpoints) => chain_on_endpoints(field, endpoints, tol),
        BoundaryModel::Circles {
            circles,
            permutation,
        } => chain_on_circles(p, field, circles, permutation, tol),
    }
}
