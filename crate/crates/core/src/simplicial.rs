//! Finite simplicial complexes embedded in chart coordinates.
//!
//! Simplices are sorted vertex-id vectors stored face-closed in a `BTreeSet`,
//! so iteration order (and everything derived from it, like barycenter ids)
//! is deterministic. The vertex coordinate table may contain rows that no
//! simplex references; characteristics count simplices, never table rows,
//! which lets subcomplexes share their parent's vertex indexing.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::collections::{BTreeMap, BTreeSet};

pub type Simplex = Vec<usize>;

#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    pub vertices: Vec<Vec<f64>>,
    pub simplices: BTreeSet<Simplex>,
}

const BARYCENTRIC_EPS: f64 = 1e-9;

impl SimplicialComplex {
    /// Builds the face closure of the given top simplices.
    pub fn from_top_simplices(vertices: Vec<Vec<f64>>, tops: &[Vec<usize>]) -> Result<Self> {
        let n_vertices = vertices.len();
        let ambient = vertices.first().map(|v| v.len()).unwrap_or(0);
        if vertices.iter().any(|v| v.len() != ambient) {
            return Err(Error::ValidationError {
                path: "complex.vertices".into(),
                message: "vertices have mixed coordinate lengths".into(),
            });
        }
        let mut simplices = BTreeSet::new();
        for (i, top) in tops.iter().enumerate() {
            let mut s = top.clone();
            s.sort_unstable();
            let before = s.len();
            s.dedup();
            if s.len() != before || s.iter().any(|&v| v >= n_vertices) {
                return Err(Error::ValidationError {
                    path: format!("complex.top_simplices[{i}]"),
                    message: "repeated or out-of-range vertex".into(),
                });
            }
            insert_with_faces(&mut simplices, &s);
        }
        Ok(SimplicialComplex {
            vertices,
            simplices,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Top dimension, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len() - 1).max()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices.first().map(|v| v.len()).unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .map(|s| if (s.len() - 1) % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn simplices_of_dim(&self, d: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().filter(move |s| s.len() == d + 1)
    }

    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        self.simplices
            .iter()
            .filter(|s| {
                !self
                    .simplices
                    .iter()
                    .any(|t| t.len() == s.len() + 1 && is_subset(s, t))
            })
            .cloned()
            .collect()
    }

    /// Every maximal simplex has top dimension and every (top-1)-face lies in
    /// at most two top simplices.
    pub fn validate_manifold(&self) -> Result<()> {
        let Some(d) = self.dim() else {
            return Ok(());
        };
        for m in self.maximal_simplices() {
            if m.len() - 1 != d {
                return Err(Error::NotManifold {
                    face: m.clone(),
                    count: 0,
                });
            }
        }
        for (face, count) in self.ridge_incidence(d) {
            if count > 2 {
                return Err(Error::NotManifold { face, count });
            }
        }
        Ok(())
    }

    fn ridge_incidence(&self, top_dim: usize) -> BTreeMap<Simplex, usize> {
        let mut counts: BTreeMap<Simplex, usize> = BTreeMap::new();
        if top_dim == 0 {
            return counts;
        }
        for top in self.simplices_of_dim(top_dim) {
            for skip in 0..top.len() {
                let mut face = top.clone();
                face.remove(skip);
                *counts.entry(face).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Face closure of the (top-1)-faces lying in exactly one top simplex.
    /// Shares this complex's vertex table.
    pub fn boundary_subcomplex(&self) -> Result<SimplicialComplex> {
        let Some(d) = self.dim() else {
            return Ok(SimplicialComplex {
                vertices: self.vertices.clone(),
                simplices: BTreeSet::new(),
            });
        };
        let mut simplices = BTreeSet::new();
        for (face, count) in self.ridge_incidence(d) {
            if count > 2 {
                return Err(Error::NotManifold { face, count });
            }
            if count == 1 {
                insert_with_faces(&mut simplices, &face);
            }
        }
        Ok(SimplicialComplex {
            vertices: self.vertices.clone(),
            simplices,
        })
    }

    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.simplices_of_dim(0).map(|s| s[0]).collect()
    }

    /// Barycentric subdivision. Also returns the map from each simplex of
    /// this complex to the id of its barycenter vertex in the result.
    pub fn barycentric_subdivision(&self) -> (SimplicialComplex, BTreeMap<Simplex, usize>) {
        let ambient = self.ambient_dim();
        let mut bary_id: BTreeMap<Simplex, usize> = BTreeMap::new();
        let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(self.simplices.len());
        for s in &self.simplices {
            let mut c = vec![0.0; ambient];
            for &v in s {
                for (k, x) in self.vertices[v].iter().enumerate() {
                    c[k] += x;
                }
            }
            for x in &mut c {
                *x /= s.len() as f64;
            }
            bary_id.insert(s.clone(), vertices.len());
            vertices.push(c);
        }
        let mut simplices = BTreeSet::new();
        for maximal in self.maximal_simplices() {
            for order in permutations(&maximal) {
                // One full flag per vertex ordering: prefixes of the ordering
                // are the nested faces whose barycenters span a top simplex.
                let mut flag: Vec<usize> = Vec::with_capacity(order.len());
                let mut prefix: Vec<usize> = Vec::with_capacity(order.len());
                for v in order {
                    prefix.push(v);
                    let mut key = prefix.clone();
                    key.sort_unstable();
                    flag.push(bary_id[&key]);
                }
                flag.sort_unstable();
                insert_with_faces(&mut simplices, &flag);
            }
        }
        (
            SimplicialComplex {
                vertices,
                simplices,
            },
            bary_id,
        )
    }

    /// Subcomplex of simplices fixed vertexwise by the permutation.
    /// Shares this complex's vertex table.
    pub fn fixed_subcomplex(&self, perm: &[usize]) -> SimplicialComplex {
        let simplices = self
            .simplices
            .iter()
            .filter(|s| s.iter().all(|&v| perm[v] == v))
            .cloned()
            .collect();
        SimplicialComplex {
            vertices: self.vertices.clone(),
            simplices,
        }
    }

    /// Rewrites vertex coordinates as `basis^T x` (columns of `basis` are an
    /// orthonormal frame of a subspace containing the complex).
    pub fn project_to_basis(&self, basis: &DMatrix<f64>) -> SimplicialComplex {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let x = DVector::from_column_slice(v);
                let u = basis.transpose() * x;
                u.iter().copied().collect()
            })
            .collect();
        SimplicialComplex {
            vertices,
            simplices: self.simplices.clone(),
        }
    }

    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let used = self.vertex_set();
        let mut it = used.iter();
        let first = *it.next()?;
        let mut lo = self.vertices[first].clone();
        let mut hi = lo.clone();
        for &v in it {
            for (k, x) in self.vertices[v].iter().enumerate() {
                lo[k] = lo[k].min(*x);
                hi[k] = hi[k].max(*x);
            }
        }
        Some((lo, hi))
    }

    /// Point membership: lies in some full-dimensional simplex (barycentric
    /// coordinates all >= -eps).
    pub fn contains_point(&self, p: &[f64]) -> bool {
        let ambient = self.ambient_dim();
        let Some(d) = self.dim() else {
            return false;
        };
        if d != ambient {
            return false;
        }
        self.simplices_of_dim(d)
            .any(|s| self.barycentric_inside(s, p))
    }

    fn barycentric_inside(&self, s: &Simplex, p: &[f64]) -> bool {
        let n = p.len();
        let k = s.len();
        debug_assert_eq!(k, n + 1);
        let mut a = DMatrix::zeros(n + 1, k);
        for (col, &v) in s.iter().enumerate() {
            for r in 0..n {
                a[(r, col)] = self.vertices[v][r];
            }
            a[(n, col)] = 1.0;
        }
        let mut b = DVector::zeros(n + 1);
        for r in 0..n {
            b[r] = p[r];
        }
        b[n] = 1.0;
        match a.lu().solve(&b) {
            Some(lambda) => lambda.iter().all(|&l| l >= -BARYCENTRIC_EPS),
            None => false,
        }
    }

    /// Distance from a point to the nearest simplex of this complex
    /// (supported for simplices of dimension <= 2).
    pub fn distance_to_point(&self, p: &[f64]) -> f64 {
        self.maximal_simplices()
            .iter()
            .map(|s| distance_point_simplex(p, s, &self.vertices))
            .fold(f64::INFINITY, f64::min)
    }
}

fn insert_with_faces(set: &mut BTreeSet<Simplex>, s: &[usize]) {
    // All nonempty subsets; simplices here have at most 4 vertices.
    let n = s.len();
    for mask in 1u32..(1 << n) {
        let face: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect();
        set.insert(face);
    }
}

fn is_subset(small: &[usize], large: &[usize]) -> bool {
    small.iter().all(|v| large.binary_search(v).is_ok())
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &head) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn distance_point_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        (dot(&ap, &ab) / len2).clamp(0.0, 1.0)
    };
    let closest: Vec<f64> = a.iter().zip(&ab).map(|(x, d)| x + t * d).collect();
    norm(&sub(p, &closest))
}

fn distance_point_simplex(p: &[f64], s: &Simplex, vertices: &[Vec<f64>]) -> f64 {
    match s.len() {
        1 => norm(&sub(p, &vertices[s[0]])),
        2 => distance_point_segment(p, &vertices[s[0]], &vertices[s[1]]),
        3 => {
            let (a, b, c) = (&vertices[s[0]], &vertices[s[1]], &vertices[s[2]]);
            // Project onto the triangle plane; fall back to edges when the
            // projection lands outside.
            let u = sub(b, a);
            let v = sub(c, a);
            let w = sub(p, a);
            let uu = dot(&u, &u);
            let vv = dot(&v, &v);
            let uv = dot(&u, &v);
            let det = uu * vv - uv * uv;
            if det.abs() > 1e-18 {
                let wu = dot(&w, &u);
                let wv = dot(&w, &v);
                let s1 = (wu * vv - wv * uv) / det;
                let s2 = (wv * uu - wu * uv) / det;
                if s1 >= 0.0 && s2 >= 0.0 && s1 + s2 <= 1.0 {
                    let proj: Vec<f64> = a
                        .iter()
                        .enumerate()
                        .map(|(k, x)| x + s1 * u[k] + s2 * v[k])
                        .collect();
                    return norm(&sub(p, &proj));
                }
            }
            distance_point_segment(p, a, b)
                .min(distance_point_segment(p, b, c))
                .min(distance_point_segment(p, a, c))
        }
        _ => f64::INFINITY,
    }
}

/// The standard hexagonal disk fixture: center vertex 0, rim vertices 1..=6
/// at angles 0, 60, ..., 300 degrees on the unit circle.
pub fn hexagonal_disk() -> SimplicialComplex {
    let mut vertices = vec![vec![0.0, 0.0]];
    for k in 0..6 {
        let a = k as f64 * std::f64::consts::PI / 3.0;
        vertices.push(vec![a.cos(), a.sin()]);
    }
    let tops: Vec<Vec<usize>> = (1..=6).map(|k| vec![0, k, k % 6 + 1]).collect();
    SimplicialComplex::from_top_simplices(vertices, &tops).expect("valid fixture")
}

/// Hexagonal annulus fixture: inner rim vertices 0..6 at radius 1, outer rim
/// 6..12 at radius 2, each quad split into two triangles.
pub fn hexagonal_annulus() -> SimplicialComplex {
    let mut vertices = Vec::new();
    for k in 0..6 {
        let a = k as f64 * std::f64::consts::PI / 3.0;
        vertices.push(vec![a.cos(), a.sin()]);
    }
    for k in 0..6 {
        let a = k as f64 * std::f64::consts::PI / 3.0;
        vertices.push(vec![2.0 * a.cos(), 2.0 * a.sin()]);
    }
    let mut tops = Vec::new();
    for k in 0..6 {
        let kn = (k + 1) % 6;
        tops.push(vec![k, kn, 6 + kn]);
        tops.push(vec![k, 6 + kn, 6 + k]);
    }
    SimplicialComplex::from_top_simplices(vertices, &tops).expect("valid fixture")
}
