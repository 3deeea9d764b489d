//! Global-quotient presentations: a simplicial complex together with a finite
//! orthogonal group acting simplicially on it.
//!
//! Most computations require the action to be *regular*: any element mapping a
//! simplex to itself fixes it vertexwise. Simplicial actions become regular
//! after at most two barycentric subdivisions, so `regularize` refuses to loop
//! further than that.

use crate::error::{Error, Result};
use crate::group::{GroupAction, GroupElement};
use crate::simplicial::{Simplex, SimplicialComplex};
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct QuotientPresentation {
    pub complex: SimplicialComplex,
    pub action: GroupAction,
    regular: bool,
}

/// Cells of the quotient space: one canonical representative per simplex
/// orbit. Distinct orbits stay distinct here even when their vertex orbits
/// coincide, which a naive "relabel vertices by orbit" encoding gets wrong.
#[derive(Debug, Clone)]
pub struct OrbitComplex {
    pub cells: BTreeSet<Simplex>,
}

impl OrbitComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .map(|s| if (s.len() - 1) % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    pub fn cells_of_dim(&self, d: usize) -> impl Iterator<Item = &Simplex> {
        self.cells.iter().filter(move |s| s.len() == d + 1)
    }
}

impl QuotientPresentation {
    /// Validates compatibility between the complex and the action:
    /// coordinates transform by the matrices, every element permutes the
    /// simplices, and non-identity fixed spaces have codimension >= 2.
    pub fn new(complex: SimplicialComplex, action: GroupAction, tol: f64) -> Result<Self> {
        if action.dim != complex.ambient_dim() {
            return Err(Error::ValidationError {
                path: "group.generators".into(),
                message: format!(
                    "matrix dimension {} does not match ambient dimension {}",
                    action.dim,
                    complex.ambient_dim()
                ),
            });
        }
        for g in &action.elements {
            if g.vertex_perm.len() != complex.vertices.len() {
                return Err(Error::ValidationError {
                    path: "group.generators".into(),
                    message: format!(
                        "permutation length {} does not match vertex count {}",
                        g.vertex_perm.len(),
                        complex.vertices.len()
                    ),
                });
            }
        }
        let used = complex.vertex_set();
        for g in &action.elements {
            for &v in &used {
                let image = g.matrix_apply(&complex.vertices[v]);
                let target = &complex.vertices[g.vertex_perm[v]];
                let dev = image
                    .iter()
                    .zip(target)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if dev > tol {
                    return Err(Error::ValidationError {
                        path: "group.generators".into(),
                        message: format!(
                            "element {} moves vertex {} to {:?} but its permutation points at \
                             vertex {} (deviation {dev:.3e})",
                            g.id, v, image, g.vertex_perm[v]
                        ),
                    });
                }
            }
        }
        for g in &action.elements {
            for s in &complex.simplices {
                let mapped = map_simplex(s, &g.vertex_perm);
                if !complex.simplices.contains(&mapped) {
                    return Err(Error::NotSimplicial { element: g.id });
                }
            }
        }
        action.validate_codimension2(tol)?;
        let regular = is_regular(&complex, &action);
        Ok(QuotientPresentation {
            complex,
            action,
            regular,
        })
    }

    /// For internally derived objects (boundaries, doubles, subdivisions)
    /// whose compatibility holds by construction.
    pub(crate) fn new_unchecked(
        complex: SimplicialComplex,
        action: GroupAction,
        regular: bool,
    ) -> Self {
        QuotientPresentation {
            complex,
            action,
            regular,
        }
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    pub fn require_regular(&self) -> Result<()> {
        if self.regular {
            Ok(())
        } else {
            Err(Error::RequiresRegular)
        }
    }

    /// Barycentric subdivision with the action carried along: the barycenter
    /// of sigma maps to the barycenter of g(sigma).
    pub fn subdivide(&self) -> Self {
        let (complex, bary_id) = self.complex.barycentric_subdivision();
        let n_new = complex.vertices.len();
        let elements = self
            .action
            .elements
            .iter()
            .map(|g| {
                let mut perm = vec![0usize; n_new];
                for (s, &id) in &bary_id {
                    perm[id] = bary_id[&map_simplex(s, &g.vertex_perm)];
                }
                GroupElement {
                    matrix: g.matrix.clone(),
                    vertex_perm: perm,
                    id: g.id,
                }
            })
            .collect();
        let action = GroupAction {
            elements,
            mult_table: self.action.mult_table.clone(),
            dim: self.action.dim,
        };
        let regular = is_regular(&complex, &action);
        QuotientPresentation {
            complex,
            action,
            regular,
        }
    }

    /// Subdivides until the action is regular; two subdivisions always
    /// suffice for a simplicial action, so more than that is reported as a
    /// failure rather than looped on.
    pub fn regularize(&self) -> Result<Self> {
        if self.regular {
            return Ok(self.clone());
        }
        let mut current = self.clone();
        for _ in 0..2 {
            current = current.subdivide();
            if current.regular {
                return Ok(current);
            }
        }
        Err(Error::RegularizationFailed { subdivisions: 2 })
    }

    /// Boundary subcomplex with the same action (the boundary is invariant
    /// because the action permutes top simplices).
    pub fn boundary(&self) -> Result<QuotientPresentation> {
        let complex = self.complex.boundary_subcomplex()?;
        let regular = self.regular || is_regular(&complex, &self.action);
        Ok(QuotientPresentation {
            complex,
            action: self.action.clone(),
            regular,
        })
    }

    /// Orbit space cells: canonical (minimal) representative per orbit.
    pub fn quotient_complex(&self) -> Result<OrbitComplex> {
        self.require_regular()?;
        let mut cells = BTreeSet::new();
        for s in &self.complex.simplices {
            let rep = self
                .action
                .elements
                .iter()
                .map(|g| map_simplex(s, &g.vertex_perm))
                .min()
                .expect("group has at least the identity");
            cells.insert(rep);
        }
        Ok(OrbitComplex { cells })
    }

    /// Order of the subgroup fixing the simplex vertexwise. Under a regular
    /// action this is the full setwise stabilizer.
    pub fn simplex_stabilizer_order(&self, s: &Simplex) -> usize {
        self.action
            .elements
            .iter()
            .filter(|g| s.iter().all(|&v| g.vertex_perm[v] == v))
            .count()
    }

    /// Subcomplex fixed vertexwise by element `g`; for a regular action this
    /// triangulates the geometric fixed-point set.
    pub fn fixed_subcomplex(&self, g: usize) -> Result<SimplicialComplex> {
        self.require_regular()?;
        Ok(self
            .complex
            .fixed_subcomplex(&self.action.elements[g].vertex_perm))
    }

    /// Glues two copies along the boundary. Interior vertices are duplicated
    /// (copy-1 vertex ids start at the original vertex count); the action
    /// extends diagonally. If some interior simplex has all its vertices on
    /// the boundary the two copies would collide, so the presentation is
    /// subdivided once first (after one subdivision every interior simplex
    /// owns an interior barycenter).
    pub fn double(&self) -> Result<QuotientPresentation> {
        let boundary = self.complex.boundary_subcomplex()?;
        if boundary.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        let boundary_vertices = boundary.vertex_set();
        let collision = self
            .complex
            .simplices
            .iter()
            .any(|s| !boundary.simplices.contains(s) && s.iter().all(|v| boundary_vertices.contains(v)));
        if collision {
            return self.subdivide().double();
        }

        let n = self.complex.vertices.len();
        let used = self.complex.vertex_set();
        let mut copy1: Vec<usize> = (0..n).collect();
        let mut vertices = self.complex.vertices.clone();
        for v in 0..n {
            if used.contains(&v) && !boundary_vertices.contains(&v) {
                copy1[v] = vertices.len();
                vertices.push(self.complex.vertices[v].clone());
            }
        }

        let mut simplices = self.complex.simplices.clone();
        for s in &self.complex.simplices {
            let mirrored = map_simplex(s, &copy1);
            simplices.insert(mirrored);
        }
        let complex = SimplicialComplex {
            vertices,
            simplices,
        };

        let n_new = complex.vertices.len();
        let elements = self
            .action
            .elements
            .iter()
            .map(|g| {
                let mut perm: Vec<usize> = (0..n_new).collect();
                for v in 0..n {
                    perm[v] = g.vertex_perm[v];
                    if copy1[v] != v {
                        perm[copy1[v]] = copy1[g.vertex_perm[v]];
                    }
                }
                GroupElement {
                    matrix: g.matrix.clone(),
                    vertex_perm: perm,
                    id: g.id,
                }
            })
            .collect();
        let action = GroupAction {
            elements,
            mult_table: self.action.mult_table.clone(),
            dim: self.action.dim,
        };
        let regular = is_regular(&complex, &action);
        Ok(QuotientPresentation {
            complex,
            action,
            regular,
        })
    }
}

pub(crate) fn map_simplex(s: &Simplex, perm: &[usize]) -> Simplex {
    let mut mapped: Vec<usize> = s.iter().map(|&v| perm[v]).collect();
    mapped.sort_unstable();
    mapped
}

fn is_regular(complex: &SimplicialComplex, action: &GroupAction) -> bool {
    for g in action.elements.iter().skip(1) {
        for s in &complex.simplices {
            if map_simplex(s, &g.vertex_perm) == *s && s.iter().any(|&v| g.vertex_perm[v] != v) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{close_group, rotation2};
    use crate::simplicial::hexagonal_disk;
    use nalgebra::DMatrix;

    fn z3_hexagon() -> QuotientPresentation {
        let complex = hexagonal_disk();
        let action = close_group(
            &[(rotation2(2.0 * std::f64::consts::PI / 3.0), vec![0, 3, 4, 5, 6, 1, 2])],
            2,
            7,
            64,
            1e-9,
        )
        .unwrap();
        QuotientPresentation::new(complex, action, 1e-9).unwrap()
    }

    fn z2_hexagon() -> QuotientPresentation {
        let complex = hexagonal_disk();
        let action = close_group(
            &[(-DMatrix::identity(2, 2), vec![0, 4, 5, 6, 1, 2, 3])],
            2,
            7,
            64,
            1e-9,
        )
        .unwrap();
        QuotientPresentation::new(complex, action, 1e-9).unwrap()
    }

    #[test]
    fn hexagon_rotations_are_already_regular() {
        assert!(z3_hexagon().is_regular());
        assert!(z2_hexagon().is_regular());
    }

    #[test]
    fn edge_swap_needs_one_subdivision() {
        // Single edge in the plane with the half-turn swapping its endpoints:
        // the edge maps to itself without fixing its vertices.
        let complex = SimplicialComplex::from_top_simplices(
            vec![vec![-1.0, 0.0], vec![1.0, 0.0]],
            &[vec![0, 1]],
        )
        .unwrap();
        let action =
            close_group(&[(-DMatrix::identity(2, 2), vec![1, 0])], 2, 2, 64, 1e-9).unwrap();
        let p = QuotientPresentation::new(complex, action, 1e-9).unwrap();
        assert!(!p.is_regular());
        let r = p.regularize().unwrap();
        assert!(r.is_regular());
        assert_eq!(r.complex.euler_characteristic(), 1);
        assert_eq!(r.complex.simplices_of_dim(1).count(), 2);
    }

    #[test]
    fn quotient_requires_regularity() {
        let complex = SimplicialComplex::from_top_simplices(
            vec![vec![-1.0, 0.0], vec![1.0, 0.0]],
            &[vec![0, 1]],
        )
        .unwrap();
        let action =
            close_group(&[(-DMatrix::identity(2, 2), vec![1, 0])], 2, 2, 64, 1e-9).unwrap();
        let p = QuotientPresentation::new(complex, action, 1e-9).unwrap();
        assert!(matches!(p.quotient_complex(), Err(Error::RequiresRegular)));
    }

    #[test]
    fn antipodal_circle_quotient_keeps_distinct_edge_orbits() {
        // Square circle (4 vertices, 4 edges) with the antipodal map. Both
        // edge orbits have the same pair of vertex orbits, so counting orbit
        // cells must still see 2 vertices and 2 edges: chi = 0.
        let complex = SimplicialComplex::from_top_simplices(
            vec![
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![-1.0, 0.0],
                vec![0.0, -1.0],
            ],
            &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        let action =
            close_group(&[(-DMatrix::identity(2, 2), vec![2, 3, 0, 1])], 2, 4, 64, 1e-9).unwrap();
        let p = QuotientPresentation::new(complex, action, 1e-9).unwrap();
        assert!(p.is_regular());
        let q = p.quotient_complex().unwrap();
        assert_eq!(q.cells_of_dim(0).count(), 2);
        assert_eq!(q.cells_of_dim(1).count(), 2);
        assert_eq!(q.euler_characteristic(), 0);
    }

    #[test]
    fn z3_disk_quotient_is_a_disk() {
        let q = z3_hexagon().quotient_complex().unwrap();
        assert_eq!(q.euler_characteristic(), 1);
    }

    #[test]
    fn stabilizer_orders_on_the_hexagon() {
        let p = z3_hexagon();
        assert_eq!(p.simplex_stabilizer_order(&vec![0]), 3);
        assert_eq!(p.simplex_stabilizer_order(&vec![1]), 1);
        assert_eq!(p.simplex_stabilizer_order(&vec![0, 1, 2]), 1);
    }

    #[test]
    fn doubling_the_hexagon_gives_a_sphere() {
        let p = z3_hexagon();
        let d = p.double().unwrap();
        assert_eq!(d.complex.simplices_of_dim(0).count(), 8);
        assert_eq!(d.complex.simplices_of_dim(1).count(), 18);
        assert_eq!(d.complex.simplices_of_dim(2).count(), 12);
        assert_eq!(d.complex.euler_characteristic(), 2);
        assert!(d.complex.boundary_subcomplex().unwrap().is_empty());
        assert!(d.is_regular());
    }

    #[test]
    fn doubling_the_interval_gives_a_circle() {
        // Both vertices of the single edge lie on the boundary, so a naive
        // doubling would merge the two copies; the pre-subdivision prevents
        // that and yields a genuine circle.
        let complex =
            SimplicialComplex::from_top_simplices(vec![vec![0.0], vec![1.0]], &[vec![0, 1]])
                .unwrap();
        let action = close_group(&[], 1, 2, 64, 1e-9).unwrap();
        let p = QuotientPresentation::new_unchecked(complex, action, true);
        let d = p.double().unwrap();
        assert_eq!(d.complex.euler_characteristic(), 0);
        assert!(d.complex.boundary_subcomplex().unwrap().is_empty());
        assert_eq!(d.complex.simplices_of_dim(1).count(), 4);
    }

    #[test]
    fn double_of_a_closed_complex_is_rejected() {
        let p = z3_hexagon();
        let closed = p.double().unwrap();
        assert!(matches!(closed.double(), Err(Error::EmptyBoundary)));
    }

    #[test]
    fn incompatible_permutation_is_rejected() {
        let complex = hexagonal_disk();
        // The 120 degree matrix paired with the 240 degree vertex cycle:
        // closes as a group of order three, but the coordinates disagree.
        let action = close_group(
            &[(rotation2(2.0 * std::f64::consts::PI / 3.0), vec![0, 5, 6, 1, 2, 3, 4])],
            2,
            7,
            64,
            1e-9,
        )
        .unwrap();
        assert!(matches!(
            QuotientPresentation::new(complex, action, 1e-9),
            Err(Error::ValidationError { .. })
        ));
    }

    #[test]
    fn action_must_permute_simplices() {
        // Two disjoint edges on the square circle; the quarter-turn maps the
        // edge [0,1] onto [1,2], which is not in the complex.
        let complex = SimplicialComplex::from_top_simplices(
            vec![
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![-1.0, 0.0],
                vec![0.0, -1.0],
            ],
            &[vec![0, 1], vec![2, 3]],
        )
        .unwrap();
        let action = close_group(
            &[(rotation2(std::f64::consts::FRAC_PI_2), vec![1, 2, 3, 0])],
            2,
            4,
            64,
            1e-9,
        )
        .unwrap();
        assert!(matches!(
            QuotientPresentation::new(complex, action, 1e-9),
            Err(Error::NotSimplicial { .. })
        ));
    }

    #[test]
    fn reflection_fails_codimension_validation() {
        let mut m = DMatrix::identity(2, 2);
        m[(1, 1)] = -1.0;
        // Hexagon reflection across the x axis: 1<->1? vertices 1..6 at
        // angles 0,60,...,300 reflect as 1->1, 2->6, 3->5, 4->4, 5->3, 6->2.
        let action = close_group(&[(m, vec![0, 1, 6, 5, 4, 3, 2])], 2, 7, 64, 1e-9).unwrap();
        assert!(matches!(
            QuotientPresentation::new(hexagonal_disk(), action, 1e-9),
            Err(Error::CodimensionViolation { fixed_dim: 1, .. })
        ));
    }
}
