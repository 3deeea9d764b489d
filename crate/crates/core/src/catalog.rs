//! Built-in scenario catalog.
//!
//! A small set of scenarios that together exercise every code path of the
//! verifier: trivial and nontrivial symmetry groups, nondegenerate and
//! degenerate zeros, empty / partial / full exit regions, one and two
//! boundary circles, and the one-dimensional endpoint case.  Each file is
//! embedded in the library so the catalog is available without any
//! filesystem access.

use crate::error::{Error, Result};
use crate::scenario::{load_scenario_str, Scenario};

/// Names of the built-in scenarios, in presentation order.
pub const SCENARIO_NAMES: [&str; 8] = [
    "interval_outflow",
    "disk_trivial_inward",
    "disk_trivial_saddle",
    "disk_trivial_squared",
    "disk_z2_saddle",
    "disk_z3_radial",
    "disk_z3_spiral",
    "annulus_trivial",
];

/// Returns the embedded JSON source of a built-in scenario.
pub fn catalog_source(name: &str) -> Option<&'static str> {
    match name {
        "interval_outflow" => Some(include_str!("../catalog/interval_outflow.json")),
        "disk_trivial_inward" => Some(include_str!("../catalog/disk_trivial_inward.json")),
        "disk_trivial_saddle" => Some(include_str!("../catalog/disk_trivial_saddle.json")),
        "disk_trivial_squared" => Some(include_str!("../catalog/disk_trivial_squared.json")),
        "disk_z2_saddle" => Some(include_str!("../catalog/disk_z2_saddle.json")),
        "disk_z3_radial" => Some(include_str!("../catalog/disk_z3_radial.json")),
        "disk_z3_spiral" => Some(include_str!("../catalog/disk_z3_spiral.json")),
        "annulus_trivial" => Some(include_str!("../catalog/annulus_trivial.json")),
        _ => None,
    }
}

/// Loads and validates a built-in scenario by name.
pub fn load_catalog_scenario(name: &str) -> Result<Scenario> {
    let source = catalog_source(name).ok_or_else(|| Error::ValidationError {
        path: "name".into(),
        message: format!(
            "unknown catalog scenario {name:?}; available: {}",
            SCENARIO_NAMES.join(", ")
        ),
    })?;
    load_scenario_str(source, name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use crate::report::Verdict;
    use crate::verify::{run_verify, VerifyOptions};
    use crate::Rational;

    #[test]
    fn every_catalog_scenario_loads_and_matches_its_name() {
        for name in SCENARIO_NAMES {
            let sc = load_catalog_scenario(name).unwrap();
            assert_eq!(sc.spec.name, name, "file name and scenario name agree");
            assert!(!sc.spec.description.is_empty(), "{name} has a description");
        }
    }

    #[test]
    fn unknown_name_is_an_input_error() {
        let err = load_catalog_scenario("no_such_scenario").unwrap_err();
        assert!(err.is_input_error());
        assert!(err.to_string().contains("annulus_trivial"));
    }

    #[test]
    fn every_catalog_scenario_passes_verification() {
        for name in SCENARIO_NAMES {
            let sc = load_catalog_scenario(name).unwrap();
            let report = run_verify(&sc, &VerifyOptions::default()).unwrap();
            assert!(report.passed, "{name} failed:\n{}", report.render_text());
        }
    }

    #[test]
    fn catalog_quantities_match_hand_computed_values() {
        // (scenario, index_orb, chi_orb, chi_orb of the double); the doubled
        // characteristic is recorded even when seam analysis is skipped.
        let frozen: [(&str, Rational, Rational, Rational); 8] = [
            ("interval_outflow", rat_int(0), rat_int(1), rat_int(0)),
            ("disk_trivial_inward", rat_int(1), rat_int(1), rat_int(2)),
            ("disk_trivial_saddle", rat_int(-1), rat_int(1), rat_int(2)),
            ("disk_trivial_squared", rat_int(2), rat_int(1), rat_int(2)),
            ("disk_z2_saddle", rat(-1, 2), rat(1, 2), rat_int(1)),
            ("disk_z3_radial", rat(1, 3), rat(1, 3), rat(2, 3)),
            ("disk_z3_spiral", rat(1, 3), rat(1, 3), rat(2, 3)),
            ("annulus_trivial", rat_int(0), rat_int(0), rat_int(0)),
        ];
        for (name, index, chi, chi_double) in frozen {
            let sc = load_catalog_scenario(name).unwrap();
            let report = run_verify(&sc, &VerifyOptions::default()).unwrap();
            assert!(report.passed, "{name} failed:\n{}", report.render_text());
            let q = |key: &str| -> Rational {
                report
                    .quantities
                    .get(key)
                    .unwrap_or_else(|| panic!("{name} records {key}"))
                    .0
            };
            assert_eq!(q("index_orb"), index, "{name}: orbifold index sum");
            assert_eq!(q("chi_orb"), chi, "{name}: Euler-Satake characteristic");
            assert_eq!(q("chi_orb_double"), chi_double, "{name}: doubled chi");
        }
    }

    #[test]
    fn expected_checks_are_skipped_and_no_others() {
        // Scenarios whose tangential field vanishes identically on a circle
        // cannot be doubled into a field with isolated seam zeros; the
        // degenerate-zero scenario also has no usable linearization data.
        let expect_skips = |name: &str| -> Vec<&'static str> {
            match name {
                // no zeros at all, and winding numbers are planar-only
                "interval_outflow" => vec!["morse", "winding"],
                // zero-free field on the annulus
                "annulus_trivial" => vec!["morse", "winding"],
                "disk_trivial_inward" | "disk_z3_radial" => vec!["double"],
                // a single degenerate zero: no linearization to check, and
                // the index itself already came from the winding fallback
                "disk_trivial_squared" => vec!["morse", "winding"],
                _ => vec![],
            }
        };
        for name in SCENARIO_NAMES {
            let sc = load_catalog_scenario(name).unwrap();
            let report = run_verify(&sc, &VerifyOptions::default()).unwrap();
            let skipped: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| c.verdict == Verdict::Skipped)
                .map(|c| c.name.as_str())
                .collect();
            let expected = expect_skips(name);
            assert_eq!(
                skipped.len(),
                expected.len(),
                "{name}: skipped {skipped:?}, expected {expected:?}"
            );
            for want in expected {
                assert!(
                    skipped.iter().any(|s| s.starts_with(want)),
                    "{name}: expected a skip under {want:?}, got {skipped:?}"
                );
            }
        }
    }
}
