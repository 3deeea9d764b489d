//! Vector fields given by coordinate expressions: evaluation, symbolic
//! Jacobians, zero finding, winding numbers, and orbifold index sums.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::group::GroupAction;
use crate::presentation::QuotientPresentation;
use crate::rational::{rat, rat_int, Rational};
use crate::simplicial::SimplicialComplex;
use crate::tol::Tolerances;
use nalgebra::{DMatrix, DVector};

pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>>;
}

/// A field whose components are symbolic expressions in x1..xn. The Jacobian
/// is differentiated once at construction time.
#[derive(Debug, Clone)]
pub struct FieldExpr {
    pub components: Vec<Expr>,
    jacobian: Vec<Vec<Expr>>,
    dim: usize,
}

impl FieldExpr {
    pub fn parse(component_sources: &[String], dim: usize) -> Result<Self> {
        if component_sources.len() != dim {
            return Err(Error::ValidationError {
                path: "field.components".into(),
                message: format!(
                    "expected {dim} components, found {}",
                    component_sources.len()
                ),
            });
        }
        let mut components = Vec::with_capacity(dim);
        for src in component_sources {
            let e = Expr::parse(src)?;
            if e.arity() > dim {
                return Err(Error::ValidationError {
                    path: "field.components".into(),
                    message: format!(
                        "component `{src}` uses variable x{} beyond dimension {dim}",
                        e.arity()
                    ),
                });
            }
            components.push(e);
        }
        let jacobian = components
            .iter()
            .map(|c| (0..dim).map(|v| c.diff(v)).collect())
            .collect();
        Ok(FieldExpr {
            components,
            jacobian,
            dim,
        })
    }
}

impl VectorField for FieldExpr {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.evaluate(x)).collect()
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let mut j = DMatrix::zeros(self.dim, self.dim);
        for (r, row) in self.jacobian.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                j[(r, c)] = e.evaluate(x)?;
            }
        }
        Ok(j)
    }
}

/// Restriction of an ambient field to a linear subspace spanned by the
/// orthonormal columns of `basis`: G(u) = B^T F(B u).
pub struct RestrictedField<'a> {
    pub ambient: &'a dyn VectorField,
    pub basis: DMatrix<f64>,
}

impl VectorField for RestrictedField<'_> {
    fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn eval(&self, u: &[f64]) -> Result<Vec<f64>> {
        let x = &self.basis * DVector::from_column_slice(u);
        let f = self.ambient.eval(x.as_slice())?;
        let g = self.basis.transpose() * DVector::from_column_slice(&f);
        Ok(g.iter().copied().collect())
    }

    fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        let x = &self.basis * DVector::from_column_slice(u);
        let j = self.ambient.jacobian(x.as_slice())?;
        Ok(self.basis.transpose() * j * &self.basis)
    }
}

fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const HALTON_BASES: [usize; 3] = [2, 3, 5];
const EQUIVARIANCE_SAMPLES: usize = 64;

/// Checks F(g x) = g F(x) for every group element at low-discrepancy sample
/// points inside the complex's bounding box.
pub fn check_equivariance(
    field: &dyn VectorField,
    action: &GroupAction,
    complex: &SimplicialComplex,
    tol: f64,
) -> Result<()> {
    let Some((lo, hi)) = complex.bounding_box() else {
        return Ok(());
    };
    let n = field.dim();
    for k in 1..=EQUIVARIANCE_SAMPLES {
        let x: Vec<f64> = (0..n)
            .map(|d| lo[d] + (hi[d] - lo[d]) * halton(k, HALTON_BASES[d]))
            .collect();
        let Ok(fx) = field.eval(&x) else {
            continue;
        };
        for g in 1..action.order() {
            let gx = action.apply(g, &x);
            let Ok(fgx) = field.eval(&gx) else {
                continue;
            };
            let gfx = action.apply(g, &fx);
            let dev = fgx
                .iter()
                .zip(&gfx)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if dev > tol {
                return Err(Error::NotEquivariant {
                    element: g,
                    sample: k,
                    deviation: dev,
                });
            }
        }
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn newton_from(field: &dyn VectorField, seed: &[f64], tol: &Tolerances) -> Option<Vec<f64>> {
    let n = field.dim();
    let mut x = seed.to_vec();
    let mut fx = field.eval(&x).ok()?;
    for _ in 0..80 {
        let r = norm(&fx);
        if r < tol.tol_newton {
            return Some(x);
        }
        let mut j = field.jacobian(&x).ok()?;
        let b = DVector::from_column_slice(&fx);
        let step = match j.clone().lu().solve(&b) {
            Some(s) => s,
            None => {
                // Singular Jacobian along the way: nudge and keep going.
                for d in 0..n {
                    j[(d, d)] += 1e-8;
                }
                j.lu().solve(&b)?
            }
        };
        // Damping: halve until the residual actually decreases.
        let mut alpha = 1.0;
        let mut improved = false;
        for _ in 0..24 {
            let cand: Vec<f64> = (0..n).map(|d| x[d] - alpha * step[d]).collect();
            if let Ok(fc) = field.eval(&cand) {
                if norm(&fc) < r {
                    x = cand;
                    fx = fc;
                    improved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !improved {
            return None;
        }
    }
    if norm(&fx) < tol.tol_newton {
        Some(x)
    } else {
        None
    }
}

fn grid_seeds(lo: &[f64], hi: &[f64], density: usize) -> Vec<Vec<f64>> {
    let n = lo.len();
    let counts: Vec<usize> = (0..n)
        .map(|d| (((hi[d] - lo[d]) * density as f64).ceil() as usize).max(1) + 1)
        .collect();
    let mut seeds = vec![Vec::new()];
    for d in 0..n {
        let mut next = Vec::with_capacity(seeds.len() * counts[d]);
        for s in &seeds {
            for k in 0..counts[d] {
                let mut t = s.clone();
                let frac = k as f64 / (counts[d] - 1).max(1) as f64;
                t.push(lo[d] + (hi[d] - lo[d]) * frac);
                next.push(t);
            }
        }
        seeds = next;
    }
    seeds
}

/// Finds the zeros of the field inside the carrier of the complex by
/// grid-seeded damped Newton iteration. Zeros closer to the boundary than
/// the dedup tolerance are reported as an error (callers require interior
/// zeros); the zero set must be invariant under the action when one is given.
pub fn find_zeros(
    field: &dyn VectorField,
    domain: &SimplicialComplex,
    action: Option<&GroupAction>,
    tol: &Tolerances,
) -> Result<Vec<Vec<f64>>> {
    let Some((lo, hi)) = domain.bounding_box() else {
        return Ok(Vec::new());
    };
    let boundary = domain.boundary_subcomplex()?;
    // At a degenerate zero Newton converges linearly, so a residual below
    // tol_newton only pins the location to about sqrt(tol_newton); the dedup
    // radius must absorb that spread.
    let dedup = tol.tol_dedup.max(8.0 * tol.tol_newton.sqrt());
    let mut zeros: Vec<Vec<f64>> = Vec::new();
    for seed in grid_seeds(&lo, &hi, tol.grid_density) {
        if !domain.contains_point(&seed) {
            continue;
        }
        let Some(z) = newton_from(field, &seed, tol) else {
            continue;
        };
        if !domain.contains_point(&z) {
            continue;
        }
        if zeros
            .iter()
            .any(|w| norm(&w.iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>()) < dedup)
        {
            continue;
        }
        if !boundary.is_empty() && boundary.distance_to_point(&z) < tol.tol_dedup {
            return Err(Error::ZeroOnBoundary {
                location: z,
                tol: tol.tol_dedup,
            });
        }
        zeros.push(z);
    }
    zeros.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    if let Some(action) = action {
        // The zero set must be carried to itself by every element.
        for z in &zeros {
            for g in 1..action.order() {
                let gz = action.apply(g, z);
                let hit = zeros.iter().any(|w| {
                    norm(&w.iter().zip(&gz).map(|(a, b)| a - b).collect::<Vec<_>>())
                        < 10.0 * dedup
                });
                if !hit {
                    return Err(Error::ZeroSetNotInvariant {
                        location: z.clone(),
                        element: g,
                    });
                }
            }
        }
    }
    Ok(zeros)
}

/// Degree of the field around a circle, by accumulated angle. The sample
/// count doubles until consecutive directions turn by less than a quarter
/// turn, which pins the winding number.
pub fn winding_number_2d(
    field: &dyn VectorField,
    center: &[f64],
    radius: f64,
    tol_field: f64,
) -> Result<i64> {
    let mut steps = 64usize;
    loop {
        let mut min_norm = f64::INFINITY;
        let mut total = 0.0;
        let mut prev_angle: Option<f64> = None;
        let mut coarse = false;
        for k in 0..=steps {
            let t = 2.0 * std::f64::consts::PI * (k % steps) as f64 / steps as f64;
            let p = [center[0] + radius * t.cos(), center[1] + radius * t.sin()];
            let f = field.eval(&p)?;
            let n = norm(&f);
            min_norm = min_norm.min(n);
            if n <= tol_field {
                return Err(Error::FieldVanishesOnCircle { min_norm });
            }
            let angle = f[1].atan2(f[0]);
            if let Some(prev) = prev_angle {
                let mut d: f64 = angle - prev;
                while d > std::f64::consts::PI {
                    d -= 2.0 * std::f64::consts::PI;
                }
                while d < -std::f64::consts::PI {
                    d += 2.0 * std::f64::consts::PI;
                }
                if d.abs() > std::f64::consts::FRAC_PI_2 {
                    coarse = true;
                    break;
                }
                total += d;
            }
            prev_angle = Some(angle);
        }
        if !coarse {
            let w = total / (2.0 * std::f64::consts::PI);
            let rounded = w.round();
            if (w - rounded).abs() > 1e-6 {
                return Err(Error::Eval {
                    message: format!("winding number {w} did not close up to an integer"),
                });
            }
            return Ok(rounded as i64);
        }
        steps *= 2;
        if steps > 1 << 20 {
            return Err(Error::Eval {
                message: "winding number failed to stabilize".into(),
            });
        }
    }
}

/// One orbit of zeros with its lift index and isotropy weight.
#[derive(Debug, Clone)]
pub struct ZeroOrbit {
    pub representative: Vec<f64>,
    pub orbit_size: usize,
    pub isotropy_order: usize,
    /// Index of the lifted field at the representative.
    pub index: i64,
    /// Sign of det J at the zero; `None` when the zero is degenerate.
    pub det_sign: Option<i8>,
    /// Number of Jacobian eigenvalues with negative real part.
    pub morse_lambda: Option<usize>,
    /// index / isotropy_order.
    pub orb_index: Rational,
}

#[derive(Debug, Clone)]
pub struct IndexSum {
    pub total: Rational,
    pub orbits: Vec<ZeroOrbit>,
    pub zero_count: usize,
    pub used_winding_fallback: bool,
}

/// Index of a single zero: sign of the Jacobian determinant when it is
/// nondegenerate, otherwise a local degree computation (angle winding in the
/// plane, a sign change on the line).
fn zero_index(
    field: &dyn VectorField,
    z: &[f64],
    clearance: f64,
    tol: &Tolerances,
) -> Result<(i64, Option<i8>, Option<usize>, bool)> {
    let j = field.jacobian(z)?;
    let det = j.determinant();
    if det.abs() > tol.tol_degenerate {
        let sign = if det > 0.0 { 1i8 } else { -1i8 };
        let lambda = j
            .complex_eigenvalues()
            .iter()
            .filter(|e| e.re < 0.0)
            .count();
        return Ok((sign as i64, Some(sign), Some(lambda), false));
    }
    match field.dim() {
        1 => {
            let h = 0.5 * clearance;
            let right = field.eval(&[z[0] + h])?[0];
            let left = field.eval(&[z[0] - h])?[0];
            if right.abs() <= tol.tol_field || left.abs() <= tol.tol_field {
                return Err(Error::DegenerateZero {
                    location: z.to_vec(),
                    det,
                });
            }
            let index = ((right.signum() as i64) - (left.signum() as i64)) / 2;
            Ok((index, None, None, true))
        }
        2 => {
            let mut radius = 0.5 * clearance;
            let mut last_err = None;
            for _ in 0..6 {
                match winding_number_2d(field, z, radius, tol.tol_field) {
                    Ok(w) => return Ok((w, None, None, true)),
                    Err(e @ Error::FieldVanishesOnCircle { .. }) => {
                        last_err = Some(e);
                        radius *= 0.5;
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(last_err.unwrap_or(Error::DegenerateZero {
                location: z.to_vec(),
                det,
            }))
        }
        _ => Err(Error::DegenerateZero {
            location: z.to_vec(),
            det,
        }),
    }
}

/// Left-hand side of the boundary identity: the orbifold index sum of the
/// field over the presentation. Zeros are grouped into orbits; each orbit
/// representative contributes `index / |isotropy|`.
pub fn orbifold_index_sum(
    p: &QuotientPresentation,
    field: &dyn VectorField,
    tol: &Tolerances,
) -> Result<IndexSum> {
    let zeros = find_zeros(field, &p.complex, Some(&p.action), tol)?;
    let boundary = p.complex.boundary_subcomplex()?;
    let dedup = tol.tol_dedup.max(8.0 * tol.tol_newton.sqrt());

    // Partition zero indices into orbits through the action.
    let mut orbit_of: Vec<Option<usize>> = vec![None; zeros.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..zeros.len() {
        if orbit_of[i].is_some() {
            continue;
        }
        let orbit_id = orbits.len();
        let mut members = Vec::new();
        for g in 0..p.action.order() {
            let gz = p.action.apply(g, &zeros[i]);
            let j = zeros
                .iter()
                .position(|w| {
                    norm(&w.iter().zip(&gz).map(|(a, b)| a - b).collect::<Vec<_>>())
                        < 10.0 * dedup
                })
                .ok_or_else(|| Error::ZeroSetNotInvariant {
                    location: zeros[i].clone(),
                    element: g,
                })?;
            if orbit_of[j].is_none() {
                orbit_of[j] = Some(orbit_id);
                members.push(j);
            }
        }
        orbits.push(members);
    }

    let mut records = Vec::new();
    let mut total = rat_int(0);
    let mut used_winding = false;
    for members in &orbits {
        let rep = &zeros[members[0]];
        let orbit_size = members.len();
        debug_assert_eq!(p.action.order() % orbit_size, 0);
        let isotropy = p.action.order() / orbit_size;

        // Clearance for local degree work: distance to other zeros and to
        // the boundary, so the probe region contains only this zero.
        let mut clearance = f64::INFINITY;
        for (j, w) in zeros.iter().enumerate() {
            if j != members[0] {
                clearance = clearance
                    .min(norm(&w.iter().zip(rep).map(|(a, b)| a - b).collect::<Vec<_>>()));
            }
        }
        if !boundary.is_empty() {
            clearance = clearance.min(boundary.distance_to_point(rep));
        }
        if !clearance.is_finite() {
            clearance = 1.0;
        }

        let (index, det_sign, morse_lambda, winding) = zero_index(field, rep, clearance, tol)?;
        used_winding |= winding;
        let orb_index = rat(index, isotropy as i64);
        total += orb_index;
        records.push(ZeroOrbit {
            representative: rep.clone(),
            orbit_size,
            isotropy_order: isotropy,
            index,
            det_sign,
            morse_lambda,
            orb_index,
        });
    }
    Ok(IndexSum {
        total,
        orbits: records,
        zero_count: zeros.len(),
        used_winding_fallback: used_winding,
    })
}

/// Minimum field norm over a dense sample of the complex's maximal simplices
/// (used for boundary genericity: the field must not vanish there).
pub fn min_norm_on_complex(
    field: &dyn VectorField,
    complex: &SimplicialComplex,
    samples_per_dim: usize,
) -> Result<(f64, Vec<f64>)> {
    let mut best = f64::INFINITY;
    let mut at = Vec::new();
    for s in complex.maximal_simplices() {
        let pts: Vec<&Vec<f64>> = s.iter().map(|&v| &complex.vertices[v]).collect();
        let n_coords = pts[0].len();
        let combos = barycentric_grid(s.len(), samples_per_dim);
        for lambda in combos {
            let mut x = vec![0.0; n_coords];
            for (l, p) in lambda.iter().zip(&pts) {
                for (k, c) in p.iter().enumerate() {
                    x[k] += l * c;
                }
            }
            let f = field.eval(&x)?;
            let nn = norm(&f);
            if nn < best {
                best = nn;
                at = x;
            }
        }
    }
    Ok((best, at))
}

pub(crate) fn barycentric_grid(k: usize, m: usize) -> Vec<Vec<f64>> {
    // All nonnegative integer k-tuples summing to m, scaled by 1/m.
    fn go(k: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            prefix.push(m);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in 0..=m {
            prefix.push(i);
            go(k - 1, m - i, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    go(k, m, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|t| t.into_iter().map(|i| i as f64 / m as f64).collect())
        .collect()
}
