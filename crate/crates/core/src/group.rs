//! Finite matrix groups paired with vertex permutations.
//!
//! The vertex permutation is the authoritative combinatorial action; matrices
//! carry the geometry. Element identity during closure is decided by the
//! permutation (exact data), and matrices are then required to agree within
//! `tol`, so a permutation shared by two geometrically distinct elements is
//! rejected rather than silently merged.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct GroupElement {
    /// Orthogonal matrix on the ambient chart coordinates, row-major n x n.
    pub matrix: DMatrix<f64>,
    /// Image of each vertex: vertex v maps to `vertex_perm[v]`.
    pub vertex_perm: Vec<usize>,
    /// Index of this element within its [`GroupAction`].
    pub id: usize,
}

impl GroupElement {
    pub fn matrix_apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.matrix.nrows();
        (0..n)
            .map(|r| (0..n).map(|c| self.matrix[(r, c)] * x[c]).sum())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GroupAction {
    pub elements: Vec<GroupElement>,
    /// `mult_table[i][j]` is the index of `elements[i] * elements[j]`
    /// (composition acting as `x -> M_i M_j x`).
    pub mult_table: Vec<Vec<usize>>,
    /// Ambient dimension n.
    pub dim: usize,
}

pub const DEFAULT_MAX_ORDER: usize = 512;

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m.transpose() * m), &DMatrix::identity(n, n))
}

fn compose_perms(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    // (outer . inner)(v) = outer[inner[v]], matching matrix product M_o M_i.
    inner.iter().map(|&v| outer[v]).collect()
}

fn validate_perm(p: &[usize], n_vertices: usize) -> bool {
    if p.len() != n_vertices {
        return false;
    }
    let mut seen = vec![false; n_vertices];
    for &v in p {
        if v >= n_vertices || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Closes the group generated by `(matrix, vertex_perm)` pairs.
///
/// All generator permutations must act on the same vertex count; matrices are
/// checked orthogonal within `tol` and the closure aborts once it would grow
/// past `max_order`.
pub fn close_group(
    generators: &[(DMatrix<f64>, Vec<usize>)],
    dim: usize,
    n_vertices: usize,
    max_order: usize,
    tol: f64,
) -> Result<GroupAction> {
    let mut elements: Vec<GroupElement> = Vec::new();
    let mut by_perm: std::collections::HashMap<Vec<usize>, usize> = std::collections::HashMap::new();

    let insert = |matrix: DMatrix<f64>,
                      perm: Vec<usize>,
                      elements: &mut Vec<GroupElement>,
                      by_perm: &mut std::collections::HashMap<Vec<usize>, usize>|
     -> Result<Option<usize>> {
        if let Some(&idx) = by_perm.get(&perm) {
            let dev = max_abs_diff(&elements[idx].matrix, &matrix);
            if dev > tol {
                return Err(Error::NonFaithfulAction {
                    a: elements[idx].id,
                    b: elements.len(),
                });
            }
            return Ok(None);
        }
        if elements.len() >= max_order {
            return Err(Error::OrderExceeded { max_order });
        }
        let defect = orthogonality_defect(&matrix);
        if defect > tol {
            return Err(Error::NotOrthogonal {
                index: elements.len(),
                deviation: defect,
            });
        }
        let id = elements.len();
        by_perm.insert(perm.clone(), id);
        elements.push(GroupElement {
            matrix,
            vertex_perm: perm,
            id,
        });
        Ok(Some(id))
    };

    let identity_perm: Vec<usize> = (0..n_vertices).collect();
    insert(
        DMatrix::identity(dim, dim),
        identity_perm,
        &mut elements,
        &mut by_perm,
    )?;

    for (i, (m, p)) in generators.iter().enumerate() {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::ValidationError {
                path: format!("group.generators[{i}].matrix"),
                message: format!("expected a {dim}x{dim} matrix"),
            });
        }
        if !validate_perm(p, n_vertices) {
            return Err(Error::ValidationError {
                path: format!("group.generators[{i}].vertex_perm"),
                message: format!("not a permutation of 0..{n_vertices}"),
            });
        }
        insert(m.clone(), p.clone(), &mut elements, &mut by_perm)?;
    }

    // Breadth-first closure under right multiplication by the generator set.
    let mut frontier: Vec<usize> = (0..elements.len()).collect();
    while let Some(a) = frontier.pop() {
        for gi in 0..generators.len() {
            let (gm, gp) = &generators[gi];
            let matrix = &elements[a].matrix * gm;
            let perm = compose_perms(&elements[a].vertex_perm, gp);
            if let Some(new_id) = insert(matrix, perm, &mut elements, &mut by_perm)? {
                frontier.push(new_id);
            }
        }
    }

    // Products of arbitrary pairs must land back in the closed set, with the
    // matrix product agreeing with the element found through the permutation.
    let order = elements.len();
    let mut mult_table = vec![vec![0usize; order]; order];
    for i in 0..order {
        for j in 0..order {
            let perm = compose_perms(&elements[i].vertex_perm, &elements[j].vertex_perm);
            let k = *by_perm.get(&perm).ok_or(Error::OrderExceeded { max_order })?;
            let prod = &elements[i].matrix * &elements[j].matrix;
            let dev = max_abs_diff(&prod, &elements[k].matrix);
            if dev > tol {
                return Err(Error::NonFaithfulAction { a: k, b: i });
            }
            mult_table[i][j] = k;
        }
    }

    Ok(GroupAction {
        elements,
        mult_table,
        dim,
    })
}

impl GroupAction {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.mult_table[g]
            .iter()
            .position(|&k| k == 0)
            .expect("every element of a closed group has an inverse")
    }

    pub fn multiply(&self, g: usize, h: usize) -> usize {
        self.mult_table[g][h]
    }

    pub fn conjugate(&self, h: usize, g: usize) -> usize {
        // h g h^{-1}
        self.multiply(self.multiply(h, g), self.inverse(h))
    }

    /// Partition of element indices into conjugacy classes, each sorted, the
    /// classes ordered by their smallest member (identity class first).
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.order()];
        let mut classes = Vec::new();
        for g in 0..self.order() {
            if assigned[g] {
                continue;
            }
            let mut class: Vec<usize> = (0..self.order()).map(|h| self.conjugate(h, g)).collect();
            class.sort_unstable();
            class.dedup();
            for &m in &class {
                assigned[m] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// Indices of elements commuting with `g`, sorted ascending.
    pub fn centralizer(&self, g: usize) -> Vec<usize> {
        (0..self.order())
            .filter(|&h| self.multiply(h, g) == self.multiply(g, h))
            .collect()
    }

    /// Restriction to a subgroup given by sorted parent indices; element 0 of
    /// the result is the identity and the table is inherited from the parent.
    pub fn subgroup(&self, indices: &[usize]) -> GroupAction {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(indices.first(), Some(&0));
        let to_new: std::collections::HashMap<usize, usize> = indices
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let elements: Vec<GroupElement> = indices
            .iter()
            .enumerate()
            .map(|(new, &old)| GroupElement {
                matrix: self.elements[old].matrix.clone(),
                vertex_perm: self.elements[old].vertex_perm.clone(),
                id: new,
            })
            .collect();
        let mult_table: Vec<Vec<usize>> = indices
            .iter()
            .map(|&i| {
                indices
                    .iter()
                    .map(|&j| {
                        *to_new
                            .get(&self.multiply(i, j))
                            .expect("subgroup indices must be closed under multiplication")
                    })
                    .collect()
            })
            .collect();
        GroupAction {
            elements,
            mult_table,
            dim: self.dim,
        }
    }

    pub fn apply(&self, g: usize, x: &[f64]) -> Vec<f64> {
        let m = &self.elements[g].matrix;
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| m[(r, c)] * x[c]).sum())
            .collect()
    }

    /// Order of the isotropy subgroup of a geometric point.
    pub fn stabilizer_order(&self, x: &[f64], tol: f64) -> usize {
        (0..self.order())
            .filter(|&g| {
                self.apply(g, x)
                    .iter()
                    .zip(x)
                    .all(|(a, b)| (a - b).abs() <= tol)
            })
            .count()
    }

    /// Indices of elements fixing a geometric point.
    pub fn stabilizer(&self, x: &[f64], tol: f64) -> Vec<usize> {
        (0..self.order())
            .filter(|&g| {
                self.apply(g, x)
                    .iter()
                    .zip(x)
                    .all(|(a, b)| (a - b).abs() <= tol)
            })
            .collect()
    }

    /// Orthonormal basis of the fixed subspace `ker(M_g - I)`.
    pub fn fixed_space_basis(&self, g: usize, tol: f64) -> DMatrix<f64> {
        let n = self.dim;
        if g == self.identity() {
            return DMatrix::identity(n, n);
        }
        let m = &self.elements[g].matrix - DMatrix::identity(n, n);
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("SVD with V requested");
        let mut basis_rows: Vec<usize> = Vec::new();
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s < tol {
                basis_rows.push(i);
            }
        }
        // Rows of V^T beyond the singular value count also span the kernel
        // when the matrix is rectangular; square here, so this is complete.
        let mut basis = DMatrix::zeros(n, basis_rows.len());
        for (col, &row) in basis_rows.iter().enumerate() {
            for r in 0..n {
                basis[(r, col)] = v_t[(row, r)];
            }
        }
        basis
    }

    /// Non-identity isotropy must fix only subspaces of codimension >= 2;
    /// reflections (codimension-1 fixed sets) are rejected.
    pub fn validate_codimension2(&self, tol: f64) -> Result<()> {
        for g in 1..self.order() {
            let fixed_dim = self.fixed_space_basis(g, tol).ncols();
            if self.dim < 2 || fixed_dim > self.dim - 2 {
                return Err(Error::CodimensionViolation {
                    element: g,
                    fixed_dim,
                    ambient: self.dim,
                });
            }
        }
        Ok(())
    }

    /// Trivial group on the given vertex count.
    pub fn trivial(dim: usize, n_vertices: usize) -> GroupAction {
        close_group(&[], dim, n_vertices, 1, 1e-9).expect("trivial closure")
    }
}

pub fn rotation2(angle: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()])
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn hexagon_rotation_generator() -> (DMatrix<f64>, Vec<usize>) {
        // Hexagonal disk: vertex 0 at the origin, rim vertices 1..=6 at
        // angles 0, 60, ..., 300 degrees. Rotation by 120 degrees.
        (
            rotation2(2.0 * std::f64::consts::PI / 3.0),
            vec![0, 3, 4, 5, 6, 1, 2],
        )
    }

    fn hexagon_reflection_generator() -> (DMatrix<f64>, Vec<usize>) {
        // Reflection across the x axis: angle a maps to -a.
        (
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            vec![0, 1, 6, 5, 4, 3, 2],
        )
    }

    #[test]
    fn cyclic_group_of_order_three_closes() {
        let g = close_group(&[hexagon_rotation_generator()], 2, 7, 512, TOL).unwrap();
        assert_eq!(g.order(), 3);
        // Abelian: every conjugacy class is a singleton and every centralizer
        // is the whole group.
        assert_eq!(g.conjugacy_classes(), vec![vec![0], vec![1], vec![2]]);
        for e in 0..3 {
            assert_eq!(g.centralizer(e).len(), 3);
        }
    }

    #[test]
    fn mult_table_matches_matrix_products() {
        let g = close_group(&[hexagon_rotation_generator()], 2, 7, 512, TOL).unwrap();
        for i in 0..g.order() {
            for j in 0..g.order() {
                let k = g.mult_table[i][j];
                let prod = &g.elements[i].matrix * &g.elements[j].matrix;
                assert!(max_abs_diff(&prod, &g.elements[k].matrix) < TOL);
            }
        }
    }

    #[test]
    fn dihedral_group_structure() {
        // Oracle: the dihedral group of order 6 has classes of sizes 1, 2, 3
        // (identity, the two rotations, the three reflections), and each
        // reflection commutes only with itself and the identity.
        let g = close_group(
            &[hexagon_rotation_generator(), hexagon_reflection_generator()],
            2,
            7,
            512,
            TOL,
        )
        .unwrap();
        assert_eq!(g.order(), 6);
        let mut sizes: Vec<usize> = g.conjugacy_classes().iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
        for class in g.conjugacy_classes() {
            if class.len() == 3 {
                for &refl in &class {
                    assert_eq!(g.centralizer(refl).len(), 2);
                }
            }
        }
        // Class size times centralizer order equals the group order.
        for class in g.conjugacy_classes() {
            assert_eq!(class.len() * g.centralizer(class[0]).len(), g.order());
        }
    }

    #[test]
    fn order_cap_stops_runaway_closure() {
        // A rotation of order 600 driven by a 600-cycle permutation.
        let n = 600usize;
        let perm: Vec<usize> = (0..n).map(|v| (v + 1) % n).collect();
        let gen = (rotation2(2.0 * std::f64::consts::PI / n as f64), perm);
        let err = close_group(&[gen], 2, n, 512, TOL).unwrap_err();
        assert!(matches!(err, Error::OrderExceeded { max_order: 512 }));
    }

    #[test]
    fn shear_matrix_is_rejected() {
        let gen = (
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]),
            vec![1, 0],
        );
        let err = close_group(&[gen], 2, 2, 512, TOL).unwrap_err();
        assert!(matches!(err, Error::NotOrthogonal { .. }));
    }

    #[test]
    fn shared_permutation_with_distinct_matrices_is_rejected() {
        // Two rotations that both claim the identity permutation: the
        // combinatorial action cannot tell them apart.
        let a = (rotation2(2.0 * std::f64::consts::PI / 3.0), vec![0, 1]);
        let b = (rotation2(4.0 * std::f64::consts::PI / 3.0), vec![0, 1]);
        let err = close_group(&[a, b], 2, 2, 512, TOL).unwrap_err();
        assert!(matches!(err, Error::NonFaithfulAction { .. }));
    }

    #[test]
    fn codimension_validation_rejects_reflections() {
        let g = close_group(&[hexagon_reflection_generator()], 2, 7, 512, TOL).unwrap();
        let err = g.validate_codimension2(TOL).unwrap_err();
        match err {
            Error::CodimensionViolation {
                fixed_dim, ambient, ..
            } => {
                assert_eq!(fixed_dim, 1);
                assert_eq!(ambient, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
        // Rotations fix only the origin and pass.
        let rot = close_group(&[hexagon_rotation_generator()], 2, 7, 512, TOL).unwrap();
        rot.validate_codimension2(TOL).unwrap();
    }

    #[test]
    fn fixed_space_of_a_rotation_is_trivial() {
        let g = close_group(&[hexagon_rotation_generator()], 2, 7, 512, TOL).unwrap();
        assert_eq!(g.fixed_space_basis(1, TOL).ncols(), 0);
        assert_eq!(g.fixed_space_basis(0, TOL).ncols(), 2);
    }

    #[test]
    fn stabilizers_at_geometric_points() {
        let g = close_group(&[hexagon_rotation_generator()], 2, 7, 512, TOL).unwrap();
        assert_eq!(g.stabilizer_order(&[0.0, 0.0], TOL), 3);
        assert_eq!(g.stabilizer_order(&[1.0, 0.0], TOL), 1);
    }

    #[test]
    fn subgroup_of_rotations_inside_dihedral() {
        let g = close_group(
            &[hexagon_rotation_generator(), hexagon_reflection_generator()],
            2,
            7,
            512,
            TOL,
        )
        .unwrap();
        // The centralizer of a rotation is the rotation subgroup.
        let rotations: Vec<usize> = g
            .conjugacy_classes()
            .into_iter()
            .find(|c| c.len() == 2)
            .unwrap();
        let cent = g.centralizer(rotations[0]);
        assert_eq!(cent.len(), 3);
        let sub = g.subgroup(&cent);
        assert_eq!(sub.order(), 3);
        assert_eq!(sub.inverse(1), 2);
    }
}
