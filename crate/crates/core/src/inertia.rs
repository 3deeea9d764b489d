//! Inertia sectors of a global quotient.
//!
//! Each conjugacy class contributes one sector: the fixed complex of a
//! class representative, acted on by its centralizer. Summing sector
//! characteristics recovers the Euler characteristic of the underlying
//! quotient space (Burnside averaging), and summing sector index totals
//! of a restricted field gives the index of the induced field on the
//! inertia orbifold.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::euler::{chi_orb, chi_underlying};
use crate::field::{barycentric_grid, orbifold_index_sum, RestrictedField, VectorField};
use crate::group::{GroupAction, GroupElement};
use crate::presentation::QuotientPresentation;
use crate::rational::{rat, rat_display, rat_int, Rational};
use crate::simplicial::SimplicialComplex;
use crate::tol::Tolerances;

/// Barycentric samples per simplex dimension in the tangency scan.
const TANGENCY_SAMPLES: usize = 8;

/// One twisted sector, indexed by a conjugacy class.
#[derive(Debug, Clone)]
pub struct Sector {
    /// Lowest-id element of the class.
    pub class_representative: usize,
    pub class_size: usize,
    pub centralizer_order: usize,
    /// Dimension of the fixed subspace of the representative's matrix.
    pub fixed_space_dim: usize,
    /// Euler characteristic of the fixed complex upstairs.
    pub chi_fixed: i64,
    /// chi_orb of the sector, computed as an orbit sum over the fixed
    /// complex and cross-checked against chi_fixed / |centralizer|.
    pub chi_sector: Rational,
    /// Orbifold index sum of the restricted field over the sector, when a
    /// field was supplied.
    pub index_sum: Option<Rational>,
    pub zero_count: usize,
}

/// Sector decomposition with its two running totals.
#[derive(Debug, Clone)]
pub struct InertiaReport {
    pub sectors: Vec<Sector>,
    /// Sum of sector characteristics.
    pub chi_total: Rational,
    /// Euler characteristic of the underlying quotient space.
    pub chi_underlying: i64,
    /// Sum of sector index totals, when a field was supplied.
    pub index_total: Option<Rational>,
}

impl InertiaReport {
    /// The averaging identity: sector characteristics must add up to the
    /// characteristic of the underlying space.
    pub fn check_burnside(&self) -> Result<()> {
        if self.chi_total != rat_int(self.chi_underlying) {
            return Err(Error::InertiaMismatch {
                inertia: rat_display(&self.chi_total),
                underlying: self.chi_underlying.to_string(),
            });
        }
        Ok(())
    }
}

/// Sector decomposition without a field: characteristics only.
pub fn inertia_characteristic(p: &QuotientPresentation) -> Result<InertiaReport> {
    build_report(p, None, &Tolerances::default())
}

/// Sector decomposition of a field: restricted index sums per sector.
pub fn inertia_index(
    p: &QuotientPresentation,
    field: &dyn VectorField,
    tol: &Tolerances,
) -> Result<InertiaReport> {
    build_report(p, Some(field), tol)
}

fn build_report(
    p: &QuotientPresentation,
    field: Option<&dyn VectorField>,
    tol: &Tolerances,
) -> Result<InertiaReport> {
    let regularized;
    let p = if p.is_regular() {
        p
    } else {
        regularized = p.regularize()?;
        &regularized
    };

    let mut sectors = Vec::new();
    let mut chi_total = rat_int(0);
    let mut index_total = field.map(|_| rat_int(0));

    for class in p.action.conjugacy_classes() {
        let rep = *class.iter().min().expect("nonempty class");
        let fixed = p.fixed_subcomplex(rep)?;
        let centralizer = p.action.centralizer(rep);
        let cent_order = centralizer.len();
        let chi_fixed = fixed.euler_characteristic();
        let basis = p.action.fixed_space_basis(rep, tol.tol_group);
        let k = basis.ncols();

        let mut sector = Sector {
            class_representative: rep,
            class_size: class.len(),
            centralizer_order: cent_order,
            fixed_space_dim: k,
            chi_fixed,
            chi_sector: rat_int(0),
            index_sum: None,
            zero_count: 0,
        };

        if fixed.is_empty() {
            // A free class: the sector is empty and contributes nothing.
            if field.is_some() {
                sector.index_sum = Some(rat_int(0));
            }
        } else if k == 0 {
            point_sector(p, field, rep, &centralizer, &fixed, tol, &mut sector)?;
        } else {
            projected_sector(p, field, rep, &centralizer, &fixed, &basis, tol, &mut sector)?;
        }

        // Dual route for the sector characteristic: the orbit sum must
        // agree with averaging the fixed complex over the centralizer.
        let oracle = rat(chi_fixed, cent_order as i64);
        if !fixed.is_empty() && sector.chi_sector != oracle {
            return Err(Error::MismatchDetected {
                identity: format!("sector characteristic routes for class of element {rep}"),
                lhs: rat_display(&sector.chi_sector),
                rhs: rat_display(&oracle),
            });
        }

        chi_total += sector.chi_sector;
        if let (Some(total), Some(s)) = (index_total.as_mut(), sector.index_sum) {
            *total += s;
        }
        sectors.push(sector);
    }

    Ok(InertiaReport {
        sectors,
        chi_total,
        chi_underlying: chi_underlying(p)?,
        index_total,
    })
}

/// Sector over a zero-dimensional fixed space: isolated fixed points.
/// Equivariance forces the field to vanish there, and each point orbit
/// carries index +1 (the empty Jacobian has determinant one).
fn point_sector(
    p: &QuotientPresentation,
    field: Option<&dyn VectorField>,
    rep: usize,
    centralizer: &[usize],
    fixed: &SimplicialComplex,
    tol: &Tolerances,
    sector: &mut Sector,
) -> Result<()> {
    let mut seen = vec![false; p.complex.vertices.len()];
    let mut chi = rat_int(0);
    let mut zero_count = 0;
    for s in &fixed.simplices {
        debug_assert_eq!(s.len(), 1);
        let v = s[0];
        if seen[v] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut stab = 0;
        for &h in centralizer {
            let image = p.action.elements[h].vertex_perm[v];
            if image == v {
                stab += 1;
            }
            if !orbit.contains(&image) {
                orbit.push(image);
            }
        }
        for &w in &orbit {
            seen[w] = true;
        }
        if let Some(f) = field {
            let x = &p.complex.vertices[v];
            let value = f.eval(x)?;
            let residue = value.iter().map(|c| c * c).sum::<f64>().sqrt();
            if residue > tol.tol_field.max(tol.tol_equivariance) {
                return Err(Error::TangencyViolation {
                    element: rep,
                    location: x.clone(),
                    residue,
                });
            }
        }
        chi += rat(1, stab as i64);
        zero_count += 1;
    }
    sector.chi_sector = chi;
    sector.zero_count = zero_count;
    if field.is_some() {
        // Index +1 per point orbit, weighted exactly like the cells above.
        sector.index_sum = Some(chi);
    }
    Ok(())
}

/// Sector over a positive-dimensional fixed space: project the fixed
/// complex onto an orthonormal basis of the subspace and restrict both the
/// centralizer action and the field to those coordinates.
#[allow(clippy::too_many_arguments)]
fn projected_sector(
    p: &QuotientPresentation,
    field: Option<&dyn VectorField>,
    rep: usize,
    centralizer: &[usize],
    fixed: &SimplicialComplex,
    basis: &DMatrix<f64>,
    tol: &Tolerances,
    sector: &mut Sector,
) -> Result<()> {
    let sub = p.action.subgroup(centralizer);
    let k = basis.ncols();
    let elements: Vec<GroupElement> = sub
        .elements
        .iter()
        .map(|e| GroupElement {
            matrix: basis.transpose() * &e.matrix * basis,
            vertex_perm: e.vertex_perm.clone(),
            id: e.id,
        })
        .collect();
    let action = GroupAction {
        elements,
        mult_table: sub.mult_table.clone(),
        dim: k,
    };
    let projected = fixed.project_to_basis(basis);
    let sector_presentation = QuotientPresentation::new_unchecked(projected, action, true);
    sector.chi_sector = chi_orb(&sector_presentation)?;

    let Some(field) = field else {
        return Ok(());
    };

    // The field must be tangent to the fixed locus before restriction
    // makes sense: scan each maximal simplex for a normal component.
    for s in fixed.maximal_simplices() {
        let pts: Vec<&Vec<f64>> = s.iter().map(|&v| &fixed.vertices[v]).collect();
        for lambda in barycentric_grid(s.len(), TANGENCY_SAMPLES) {
            let mut x = vec![0.0; p.complex.ambient_dim()];
            for (l, pt) in lambda.iter().zip(&pts) {
                for (c, coord) in pt.iter().enumerate() {
                    x[c] += l * coord;
                }
            }
            let value = f_as_vector(field, &x)?;
            let projected_back = basis * (basis.transpose() * &value);
            let residue = (&value - &projected_back).norm();
            if residue > tol.tol_equivariance * (1.0 + value.norm()) {
                return Err(Error::TangencyViolation {
                    element: rep,
                    location: x,
                    residue,
                });
            }
        }
    }

    let restricted = RestrictedField {
        ambient: field,
        basis: basis.clone(),
    };
    let sum = orbifold_index_sum(&sector_presentation, &restricted, tol)?;
    sector.index_sum = Some(sum.total);
    sector.zero_count = sum.zero_count;
    Ok(())
}

fn f_as_vector(field: &dyn VectorField, x: &[f64]) -> Result<nalgebra::DVector<f64>> {
    Ok(nalgebra::DVector::from_vec(field.eval(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldExpr;
    use crate::group::{close_group, rotation2, GroupAction};
    use crate::simplicial::hexagonal_disk;

    fn parse2(a: &str, b: &str) -> FieldExpr {
        FieldExpr::parse(&[a.to_string(), b.to_string()], 2).unwrap()
    }

    fn z3_disk() -> QuotientPresentation {
        let action = close_group(
            &[(
                rotation2(2.0 * std::f64::consts::PI / 3.0),
                vec![0, 3, 4, 5, 6, 1, 2],
            )],
            2,
            7,
            64,
            1e-9,
        )
        .unwrap();
        QuotientPresentation::new(hexagonal_disk(), action, 1e-9).unwrap()
    }

    fn z2_disk() -> QuotientPresentation {
        let action = close_group(
            &[(
                -nalgebra::DMatrix::identity(2, 2),
                vec![0, 4, 5, 6, 1, 2, 3],
            )],
            2,
            7,
            64,
            1e-9,
        )
        .unwrap();
        QuotientPresentation::new(hexagonal_disk(), action, 1e-9).unwrap()
    }

    #[test]
    fn rotation_by_thirds_splits_into_three_sectors() {
        let p = z3_disk();
        let report = inertia_characteristic(&p).unwrap();
        assert_eq!(report.sectors.len(), 3);
        assert_eq!(report.sectors[0].chi_sector, rat(1, 3));
        assert_eq!(report.sectors[1].chi_sector, rat(1, 3));
        assert_eq!(report.sectors[2].chi_sector, rat(1, 3));
        assert_eq!(report.sectors[1].fixed_space_dim, 0);
        assert_eq!(report.chi_total, rat_int(1));
        assert_eq!(report.chi_underlying, 1);
        report.check_burnside().unwrap();
    }

    #[test]
    fn radial_field_indices_add_up_over_the_sectors() {
        let p = z3_disk();
        let field = parse2("x1", "x2");
        let report = inertia_index(&p, &field, &Tolerances::default()).unwrap();
        assert_eq!(report.sectors[0].index_sum, Some(rat(1, 3)));
        assert_eq!(report.sectors[1].index_sum, Some(rat(1, 3)));
        assert_eq!(report.index_total, Some(rat_int(1)));
        report.check_burnside().unwrap();
    }

    #[test]
    fn half_turn_saddle_cancels_against_its_twisted_sector() {
        let p = z2_disk();
        let field = parse2("x1", "0 - x2");
        let report = inertia_index(&p, &field, &Tolerances::default()).unwrap();
        assert_eq!(report.sectors.len(), 2);
        assert_eq!(report.sectors[0].index_sum, Some(rat(-1, 2)));
        assert_eq!(report.sectors[1].index_sum, Some(rat(1, 2)));
        assert_eq!(report.index_total, Some(rat_int(0)));
        assert_eq!(report.chi_total, rat_int(1));
        report.check_burnside().unwrap();
    }

    #[test]
    fn trivial_group_has_a_single_sector() {
        let p =
            QuotientPresentation::new(hexagonal_disk(), GroupAction::trivial(2, 7), 1e-9).unwrap();
        let field = parse2("x1", "0 - x2");
        let report = inertia_index(&p, &field, &Tolerances::default()).unwrap();
        assert_eq!(report.sectors.len(), 1);
        assert_eq!(report.index_total, Some(rat_int(-1)));
        assert_eq!(report.chi_total, rat_int(1));
        report.check_burnside().unwrap();
    }

    #[test]
    fn field_not_vanishing_at_an_isolated_fixed_point_is_rejected() {
        let p = z2_disk();
        // Zero set {(-1/2, 0), (1/2, 0)} is invariant under the half turn,
        // but the field does not vanish at the fixed point of the action.
        let field = parse2("4*x1^2 - 1", "x2");
        let err = inertia_index(&p, &field, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::TangencyViolation { .. }));
    }

    #[test]
    fn doctored_totals_fail_the_burnside_check() {
        let p = z3_disk();
        let mut report = inertia_characteristic(&p).unwrap();
        report.chi_total += rat(1, 3);
        let err = report.check_burnside().unwrap_err();
        assert!(matches!(err, Error::InertiaMismatch { .. }));
    }
}
