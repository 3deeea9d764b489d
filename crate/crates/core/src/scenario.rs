//! Scenario files: a simplicial complex, a finite group action, a vector
//! field, and the boundary description, bundled as JSON.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::boundary::CircleSpec;
use crate::error::{Error, Result};
use crate::field::FieldExpr;
use crate::group::{close_group, GroupAction};
use crate::presentation::QuotientPresentation;
use crate::simplicial::SimplicialComplex;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub dim: usize,
    pub complex: ComplexSpec,
    #[serde(default)]
    pub group: GroupSpec,
    pub field: FieldSpec,
    #[serde(default)]
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub tolerances: Option<ToleranceOverrides>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub vertices: Vec<Vec<f64>>,
    pub top_simplices: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    /// Row-major orthogonal matrix, one row per ambient coordinate.
    pub matrix: Vec<Vec<f64>>,
    /// Image of each vertex index.
    pub vertex_perm: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// One expression per coordinate in variables x1..xn.
    pub components: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    #[serde(default)]
    pub circles: Vec<CircleJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleJson {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Per-scenario tolerance overrides; anything omitted keeps the base value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub tol_group: Option<f64>,
    pub tol_field: Option<f64>,
    pub tol_newton: Option<f64>,
    pub tol_dedup: Option<f64>,
    pub tol_degenerate: Option<f64>,
    pub tol_equivariance: Option<f64>,
    pub grid_density: Option<usize>,
    pub max_order: Option<usize>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut base: Tolerances) -> Tolerances {
        if let Some(v) = self.tol_group {
            base.tol_group = v;
        }
        if let Some(v) = self.tol_field {
            base.tol_field = v;
        }
        if let Some(v) = self.tol_newton {
            base.tol_newton = v;
        }
        if let Some(v) = self.tol_dedup {
            base.tol_dedup = v;
        }
        if let Some(v) = self.tol_degenerate {
            base.tol_degenerate = v;
        }
        if let Some(v) = self.tol_equivariance {
            base.tol_equivariance = v;
        }
        if let Some(v) = self.grid_density {
            base.grid_density = v;
        }
        if let Some(v) = self.max_order {
            base.max_order = v;
        }
        base
    }
}

/// A scenario after structural validation: the presentation and field are
/// built, but no numeric verification has run yet.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub presentation: QuotientPresentation,
    pub field: FieldExpr,
    pub tolerances: Tolerances,
}

impl Scenario {
    pub fn circle_specs(&self) -> Vec<CircleSpec> {
        self.spec
            .boundary
            .circles
            .iter()
            .map(|c| CircleSpec {
                center: c.center.clone(),
                radius: c.radius,
            })
            .collect()
    }
}

pub fn load_scenario_str(source: &str, origin: &str) -> Result<Scenario> {
    let spec: ScenarioSpec = serde_json::from_str(source).map_err(|e| Error::ParseError {
        message: format!("{origin}: {e}"),
    })?;
    build_scenario(spec)
}

pub fn load_scenario_file(path: &Path) -> Result<Scenario> {
    let source = std::fs::read_to_string(path).map_err(|e| Error::ParseError {
        message: format!("{}: {e}", path.display()),
    })?;
    load_scenario_str(&source, &path.display().to_string())
}

fn build_scenario(spec: ScenarioSpec) -> Result<Scenario> {
    let dim = spec.dim;
    if dim == 0 {
        return Err(Error::ValidationError {
            path: "dim".into(),
            message: "dimension must be positive".into(),
        });
    }
    for (i, v) in spec.complex.vertices.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::ValidationError {
                path: format!("complex.vertices[{i}]"),
                message: format!("expected {dim} coordinates, found {}", v.len()),
            });
        }
    }
    let n_vertices = spec.complex.vertices.len();
    let complex = SimplicialComplex::from_top_simplices(
        spec.complex.vertices.clone(),
        &spec.complex.top_simplices,
    )?;

    let tolerances = spec
        .tolerances
        .as_ref()
        .map(|t| t.apply(Tolerances::default()))
        .unwrap_or_default();

    let action = if spec.group.generators.is_empty() {
        GroupAction::trivial(dim, n_vertices)
    } else {
        let mut generators = Vec::new();
        for (i, g) in spec.group.generators.iter().enumerate() {
            if g.matrix.len() != dim || g.matrix.iter().any(|row| row.len() != dim) {
                return Err(Error::ValidationError {
                    path: format!("group.generators[{i}].matrix"),
                    message: format!("expected a {dim}x{dim} matrix"),
                });
            }
            if g.vertex_perm.len() != n_vertices {
                return Err(Error::ValidationError {
                    path: format!("group.generators[{i}].vertex_perm"),
                    message: format!(
                        "expected {n_vertices} entries, found {}",
                        g.vertex_perm.len()
                    ),
                });
            }
            let matrix =
                DMatrix::from_fn(dim, dim, |r, c| g.matrix[r][c]);
            generators.push((matrix, g.vertex_perm.clone()));
        }
        close_group(
            &generators,
            dim,
            n_vertices,
            tolerances.max_order,
            tolerances.tol_group,
        )?
    };

    for (i, c) in spec.boundary.circles.iter().enumerate() {
        if c.center.len() != dim {
            return Err(Error::ValidationError {
                path: format!("boundary.circles[{i}].center"),
                message: format!("expected {dim} coordinates, found {}", c.center.len()),
            });
        }
        if !(c.radius > 0.0) {
            return Err(Error::ValidationError {
                path: format!("boundary.circles[{i}].radius"),
                message: "radius must be positive".into(),
            });
        }
    }

    let field = FieldExpr::parse(&spec.field.components, dim)?;
    let presentation = QuotientPresentation::new(complex, action, tolerances.tol_group)?;

    Ok(Scenario {
        spec,
        presentation,
        field,
        tolerances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_json() -> String {
        r#"{
            "name": "interval",
            "dim": 1,
            "complex": {
                "vertices": [[0.0], [1.0]],
                "top_simplices": [[0, 1]]
            },
            "field": {"components": ["1"]}
        }"#
        .to_string()
    }

    #[test]
    fn minimal_interval_scenario_loads() {
        let sc = load_scenario_str(&interval_json(), "inline").unwrap();
        assert_eq!(sc.spec.name, "interval");
        assert_eq!(sc.presentation.action.order(), 1);
        assert_eq!(sc.presentation.complex.euler_characteristic(), 1);
    }

    #[test]
    fn malformed_json_reports_the_origin() {
        let err = load_scenario_str("{not json", "broken.json").unwrap_err();
        match err {
            Error::ParseError { message } => assert!(message.contains("broken.json")),
            other => panic!("unexpected error: {other}"),
        }
        assert!(load_scenario_str("{not json", "x").unwrap_err().is_input_error());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let src = interval_json().replace("\"dim\": 1,", "\"dim\": 1, \"extra\": 3,");
        assert!(load_scenario_str(&src, "inline").is_err());
    }

    #[test]
    fn wrong_perm_length_is_flagged_with_its_path() {
        let src = r#"{
            "name": "bad",
            "dim": 2,
            "complex": {
                "vertices": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
                "top_simplices": [[0, 1, 2]]
            },
            "group": {"generators": [{"matrix": [[1.0, 0.0], [0.0, 1.0]], "vertex_perm": [0, 1]}]},
            "field": {"components": ["x1", "x2"]}
        }"#;
        match load_scenario_str(src, "inline").unwrap_err() {
            Error::ValidationError { path, .. } => {
                assert_eq!(path, "group.generators[0].vertex_perm")
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn tolerance_overrides_apply_on_top_of_defaults() {
        let src = interval_json().replace(
            "\"field\": {\"components\": [\"1\"]}",
            "\"field\": {\"components\": [\"1\"]}, \"tolerances\": {\"tol_field\": 1e-6}",
        );
        let sc = load_scenario_str(&src, "inline").unwrap();
        assert_eq!(sc.tolerances.tol_field, 1e-6);
        assert_eq!(sc.tolerances.tol_newton, Tolerances::default().tol_newton);
    }

    #[test]
    fn arity_overflow_in_a_component_is_rejected() {
        let src = interval_json().replace("[\"1\"]", "[\"x2\"]");
        assert!(load_scenario_str(&src, "inline").is_err());
    }
}
