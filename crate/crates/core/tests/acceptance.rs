//! End-to-end guarantees of the library, one test per headline property.
//!
//! Every equality below is exact over the rationals: the expected values were
//! fixed by hand (winding numbers upstairs, cell counts divided by the group
//! order) before the library computed them. Each test prints a one-line
//! summary; run with `--nocapture` to see all of them.

use std::time::Instant;

use orbifold_ph::boundary::{build_boundary_model, BoundaryModel};
use orbifold_ph::catalog::{catalog_source, load_catalog_scenario, SCENARIO_NAMES};
use orbifold_ph::chain::compute_chain;
use orbifold_ph::double::verify_double;
use orbifold_ph::euler::{chi_orb, chi_orb_oracle, chi_orb_relative, chi_underlying};
use orbifold_ph::field::{orbifold_index_sum, winding_number_2d};
use orbifold_ph::inertia::{inertia_characteristic, inertia_index};
use orbifold_ph::rational::{rat, rat_int, rat_display};
use orbifold_ph::scenario::{load_scenario_str, Scenario};
use orbifold_ph::verify::{run_verify, VerifyOptions};
use orbifold_ph::{Error, Rational};

fn scenario(name: &str) -> Scenario {
    load_catalog_scenario(name).unwrap_or_else(|e| panic!("loading {name}: {e}"))
}

fn boundary_model(sc: &Scenario) -> BoundaryModel {
    build_boundary_model(&sc.presentation, &sc.circle_specs(), sc.tolerances.tol_group)
        .unwrap_or_else(|e| panic!("boundary model for {}: {e}", sc.spec.name))
}

/// Boundary identity: the orbifold index sum equals the relative
/// characteristic plus the exit-region chain terms, with every value matching
/// a hand-computed table, across the whole catalog, in bounded time.
#[test]
fn t1_boundary_identity_across_the_catalog() {
    let start = Instant::now();
    // (name, index sum, relative characteristic, chain terms)
    let frozen: [(&str, Rational, Rational, Vec<Rational>); 6] = [
        ("interval_outflow", rat_int(0), rat_int(-1), vec![rat_int(1)]),
        (
            "disk_trivial_inward",
            rat_int(1),
            rat_int(1),
            vec![rat_int(0), rat_int(0)],
        ),
        (
            "disk_z3_radial",
            rat(1, 3),
            rat(1, 3),
            vec![rat_int(0), rat_int(0)],
        ),
        (
            "disk_z2_saddle",
            rat(-1, 2),
            rat(1, 2),
            vec![rat_int(-1), rat_int(0)],
        ),
        (
            "disk_trivial_saddle",
            rat_int(-1),
            rat_int(1),
            vec![rat_int(-2), rat_int(0)],
        ),
        (
            "annulus_trivial",
            rat_int(0),
            rat_int(0),
            vec![rat_int(0), rat_int(0)],
        ),
    ];
    for (name, want_index, want_rel, want_terms) in &frozen {
        let sc = scenario(name);
        let p = &sc.presentation;
        let model = boundary_model(&sc);
        let index = orbifold_index_sum(p, &sc.field, &sc.tolerances).unwrap();
        let rel = chi_orb_relative(p).unwrap();
        let chain = compute_chain(p, &sc.field, &model, &sc.tolerances).unwrap();
        assert_eq!(&index.total, want_index, "{name}: index sum");
        assert_eq!(&rel, want_rel, "{name}: relative characteristic");
        assert_eq!(&chain.terms, want_terms, "{name}: chain terms");
        assert_eq!(
            index.total,
            rel + chain.terms_total(),
            "{name}: boundary identity"
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "catalog identity run took {elapsed:?}"
    );
    println!(
        "PASS 1/9 boundary index identity on {} scenarios in {:.2?}",
        frozen.len(),
        elapsed
    );
}

/// Closed case through doubling: the index of the doubled field equals the
/// Euler-Satake characteristic of the closed double, for every catalog
/// scenario whose seam zeros are isolated.
#[test]
fn t2_doubled_fields_satisfy_the_closed_identity() {
    let doubled: [(&str, Rational); 6] = [
        ("interval_outflow", rat_int(0)),
        ("disk_trivial_saddle", rat_int(2)),
        ("disk_trivial_squared", rat_int(2)),
        ("disk_z2_saddle", rat_int(1)),
        ("disk_z3_spiral", rat(2, 3)),
        ("annulus_trivial", rat_int(0)),
    ];
    for (name, want) in &doubled {
        let sc = scenario(name);
        let model = boundary_model(&sc);
        let report = verify_double(&sc.presentation, &sc.field, &model, &sc.tolerances)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(
            report.doubled_total, report.chi_double,
            "{name}: closed identity on the double"
        );
        assert_eq!(&report.doubled_total, want, "{name}: doubled index total");
    }
    // The one-third-turn disk doubles to a sphere with two cone points of
    // order three: chi is 2/3.
    let spindle = doubled.iter().find(|(n, _)| *n == "disk_z3_spiral").unwrap();
    assert_eq!(spindle.1, rat(2, 3));
    println!("PASS 2/9 doubled index equals doubled characteristic on {} doubles", doubled.len());
}

/// The orbit-sum characteristic agrees with the quotient average chi(M)/|G|
/// on every catalog presentation, and is stable under one and two barycentric
/// subdivisions.
#[test]
fn t3_characteristic_oracle_and_subdivision_stability() {
    for name in SCENARIO_NAMES {
        let sc = scenario(name);
        let p = &sc.presentation;
        let base = chi_orb(p).unwrap();
        assert_eq!(base, chi_orb_oracle(p), "{name}: quotient average");
        let mut sub = p.clone();
        for round in 1..=2 {
            sub = sub.subdivide();
            let chi_sub = chi_orb(&sub).unwrap();
            assert_eq!(chi_sub, base, "{name}: chi after {round} subdivisions");
            assert_eq!(
                chi_sub,
                chi_orb_oracle(&sub),
                "{name}: quotient average after {round} subdivisions"
            );
        }
        println!(
            "  {name}: chi_orb = {} stable under subdivision",
            rat_display(&base)
        );
    }
    println!("PASS 3/9 characteristic oracle and subdivision stability on the catalog");
}

/// Doubling additivity: chi_orb of the double equals twice chi_orb of the
/// original minus chi_orb of the boundary, on every catalog scenario.
#[test]
fn t4_doubling_additivity() {
    let frozen_double: [(&str, Rational); 8] = [
        ("interval_outflow", rat_int(0)),
        ("disk_trivial_inward", rat_int(2)),
        ("disk_trivial_saddle", rat_int(2)),
        ("disk_trivial_squared", rat_int(2)),
        ("disk_z2_saddle", rat_int(1)),
        ("disk_z3_radial", rat(2, 3)),
        ("disk_z3_spiral", rat(2, 3)),
        ("annulus_trivial", rat_int(0)),
    ];
    for (name, want) in &frozen_double {
        let sc = scenario(name);
        let p = &sc.presentation;
        let double = p.double().unwrap();
        let chi_d = chi_orb(&double).unwrap();
        let chi_q = chi_orb(p).unwrap();
        let chi_b = chi_orb(&p.boundary().unwrap()).unwrap();
        assert_eq!(
            chi_d,
            rat_int(2) * chi_q - chi_b,
            "{name}: additivity under doubling"
        );
        assert_eq!(&chi_d, want, "{name}: doubled characteristic");
    }
    println!("PASS 4/9 doubling additivity on all {} scenarios", frozen_double.len());
}

/// Morse bookkeeping: on every scenario whose zeros are all nondegenerate,
/// the alternating, isotropy-weighted count of zeros by Morse index equals
/// the orbifold index sum, and each zero's sign is (-1)^lambda.
#[test]
fn t5_morse_counts_resolve_the_index() {
    let nondegenerate = [
        "disk_trivial_inward",
        "disk_trivial_saddle",
        "disk_z2_saddle",
        "disk_z3_radial",
        "disk_z3_spiral",
    ];
    for name in nondegenerate {
        let sc = scenario(name);
        let index = orbifold_index_sum(&sc.presentation, &sc.field, &sc.tolerances).unwrap();
        assert!(!index.orbits.is_empty(), "{name}: has zeros");
        let mut weighted = vec![Rational::from_integer(0); 3];
        for orbit in &index.orbits {
            let lambda = orbit.morse_lambda.unwrap_or_else(|| {
                panic!("{name}: zero at {:?} is degenerate", orbit.representative)
            });
            let det = orbit.det_sign.expect("nondegenerate zero has a det sign");
            let sign = if lambda % 2 == 0 { 1 } else { -1 };
            assert_eq!(i64::from(det), sign, "{name}: (-1)^lambda vs det sign");
            assert_eq!(orbit.index, sign, "{name}: local index is (-1)^lambda");
            weighted[lambda] += rat(1, orbit.isotropy_order as i64);
        }
        let alternating: Rational = weighted
            .iter()
            .enumerate()
            .map(|(lambda, c)| if lambda % 2 == 0 { *c } else { -*c })
            .sum();
        assert_eq!(alternating, index.total, "{name}: alternating Morse count");
    }
    println!(
        "PASS 5/9 Morse index bookkeeping on {} nondegenerate scenarios",
        nondegenerate.len()
    );
}

/// Winding-number oracle: around every nondegenerate planar zero the angle
/// winding of the field equals the Jacobian determinant sign; around the
/// squaring field's degenerate zero it is 2.
#[test]
fn t6_winding_oracle_agrees_with_determinant_signs() {
    let mut checked = 0;
    for name in [
        "disk_trivial_inward",
        "disk_trivial_saddle",
        "disk_z2_saddle",
        "disk_z3_radial",
        "disk_z3_spiral",
    ] {
        let sc = scenario(name);
        let index = orbifold_index_sum(&sc.presentation, &sc.field, &sc.tolerances).unwrap();
        for orbit in &index.orbits {
            let det = orbit.det_sign.expect("nondegenerate catalog zero");
            let w = winding_number_2d(
                &sc.field,
                &orbit.representative,
                0.4,
                sc.tolerances.tol_field,
            )
            .unwrap();
            assert_eq!(w, i64::from(det), "{name}: winding vs determinant sign");
            checked += 1;
        }
    }
    let sq = scenario("disk_trivial_squared");
    let w = winding_number_2d(&sq.field, &[0.0, 0.0], 0.4, sq.tolerances.tol_field).unwrap();
    assert_eq!(w, 2, "squaring field winds twice");
    println!(
        "PASS 6/9 winding oracle on {checked} nondegenerate zeros and one degenerate zero"
    );
}

/// Doubled-field construction on the half-turn saddle: zeros appear only at
/// the interior copies and on the seam, each seam zero obeys the entry/exit
/// sign rule, and the totals balance the closed identity exactly.
#[test]
fn t7_doubled_field_seam_bookkeeping() {
    let sc = scenario("disk_z2_saddle");
    let model = boundary_model(&sc);
    let report = verify_double(&sc.presentation, &sc.field, &model, &sc.tolerances).unwrap();

    // Interior: the saddle zero at the origin, index -1 over isotropy 2.
    assert_eq!(report.interior.zero_count, 1);
    assert_eq!(report.interior.total, rat(-1, 2));

    // Seam: four tangency zeros in two orbits, alternating entry/exit.
    assert_eq!(report.boundary_zeros.len(), 4);
    let entries = report.boundary_zeros.iter().filter(|z| !z.exit_side).count();
    assert_eq!(entries, 2, "two entry-side seam zeros");
    for z in &report.boundary_zeros {
        let expected = if z.exit_side {
            -z.tangential_index
        } else {
            z.tangential_index
        };
        assert_eq!(
            z.doubled_index, expected,
            "seam zero at theta = {}: entry keeps the tangential index, exit flips it",
            z.theta
        );
    }
    assert_eq!(report.entry_sum, rat_int(1));
    assert_eq!(report.exit_sum, rat_int(-1));

    // All bookkeeping identities hold exactly.
    for (what, lhs, rhs) in report.identity_checks() {
        assert_eq!(lhs, rhs, "{what}");
    }
    assert_eq!(report.doubled_total, rat_int(1), "sphere with two cone points");
    println!(
        "PASS 7/9 doubled-field construction: {} seam zeros obey the sign rule, support {:.3}",
        report.boundary_zeros.len(),
        report.support
    );
}

/// Sector decomposition: sector characteristics sum to the characteristic of
/// the underlying space on every catalog presentation, and the sector index
/// totals reproduce the boundary identity of the underlying space.
#[test]
fn t8_sector_decomposition_identities() {
    for name in SCENARIO_NAMES {
        let sc = scenario(name);
        let report = inertia_characteristic(&sc.presentation).unwrap();
        report
            .check_burnside()
            .unwrap_or_else(|e| panic!("{name}: {e}"));
    }

    // On the symmetric scenarios, the summed sector indices of the restricted
    // fields match the underlying-space identity computed from the chain.
    let frozen: [(&str, usize, Rational); 2] = [
        ("disk_z3_radial", 3, rat_int(1)),
        ("disk_z2_saddle", 2, rat_int(0)),
    ];
    for (name, want_sectors, want_total) in &frozen {
        let sc = scenario(name);
        let p = &sc.presentation;
        let report = inertia_index(p, &sc.field, &sc.tolerances).unwrap();
        assert_eq!(report.sectors.len(), *want_sectors, "{name}: sector count");
        let total = report.index_total.expect("field supplied");
        assert_eq!(&total, want_total, "{name}: summed sector indices");

        let model = boundary_model(&sc);
        let chain = compute_chain(p, &sc.field, &model, &sc.tolerances).unwrap();
        let rel = chi_underlying(p).unwrap() - chi_underlying(&p.boundary().unwrap()).unwrap();
        let rhs = rel + chain.underlying_terms().iter().sum::<i64>();
        assert_eq!(total, rat_int(rhs), "{name}: underlying-space identity");
    }
    println!("PASS 8/9 sector decomposition identities on the catalog");
}

/// Inputs outside the theory are rejected: a field everywhere tangent to the
/// boundary fails the generic-contact test, and a reflection generator fails
/// the codimension requirement on fixed sets.
#[test]
fn t9_nongeneric_and_reflective_inputs_are_rejected() {
    // Rotational field on the disk: tangent to the boundary circle at every
    // point, so no transversal exit chain exists.
    let mut v: serde_json::Value =
        serde_json::from_str(catalog_source("disk_trivial_saddle").unwrap()).unwrap();
    v["name"] = "disk_rotational".into();
    v["field"]["components"] = serde_json::json!(["-x2", "x1"]);
    let sc = load_scenario_str(&v.to_string(), "inline").unwrap();
    let model = boundary_model(&sc);
    let err = compute_chain(&sc.presentation, &sc.field, &model, &sc.tolerances).unwrap_err();
    assert!(
        matches!(err, Error::NotGeneric { .. }),
        "expected a genericity rejection, got: {err}"
    );
    // The full verifier reports it as a failure, not an input error.
    let report = run_verify(&sc, &VerifyOptions::default()).unwrap();
    assert!(!report.passed, "tangent field must fail verification");

    // Reflection across the x-axis: its fixed line has codimension 1.
    let mut v: serde_json::Value =
        serde_json::from_str(catalog_source("disk_trivial_saddle").unwrap()).unwrap();
    v["name"] = "disk_reflection".into();
    v["group"] = serde_json::json!({
        "generators": [{
            "matrix": [[1.0, 0.0], [0.0, -1.0]],
            "vertex_perm": [0, 1, 6, 5, 4, 3, 2]
        }]
    });
    let err = load_scenario_str(&v.to_string(), "inline").unwrap_err();
    assert!(
        matches!(err, Error::CodimensionViolation { .. }),
        "expected a codimension rejection, got: {err}"
    );
    assert!(err.is_input_error(), "reflection is rejected as bad input");
    println!("PASS 9/9 tangent fields and reflection generators are rejected");
}
