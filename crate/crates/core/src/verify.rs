//! Orchestration: run the named verification checks for a scenario and
//! assemble a report.
//!
//! Checks are selectable by id. Input problems (malformed scenarios,
//! unknown check names) surface as errors; identity violations and
//! genericity failures become FAIL outcomes in the report.

use crate::boundary::{build_boundary_model, BoundaryModel};
use crate::chain::{compute_chain, ChainResult};
use crate::double::verify_double;
use crate::error::{Error, Result};
use crate::euler::{chi_orb, chi_orb_oracle, chi_orb_relative, chi_underlying};
use crate::field::{
    check_equivariance, min_norm_on_complex, orbifold_index_sum, winding_number_2d, IndexSum,
};
use crate::inertia::inertia_index;
use crate::rational::{rat_int, sum_rationals, Rational};
use crate::report::{CheckOutcome, VerificationReport};
use crate::scenario::Scenario;

/// All check ids, in report order.
pub const CHECK_NAMES: [&str; 8] = [
    "generic",
    "chi-oracle",
    "main",
    "additivity",
    "morse",
    "winding",
    "double",
    "inertia",
];

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Subset of [`CHECK_NAMES`] to run; None runs everything.
    pub checks: Option<Vec<String>>,
}

enum ModelState {
    Closed,
    Unsupported(String),
    Ready(BoundaryModel),
}

struct Shared<'a> {
    sc: &'a Scenario,
    model: ModelState,
    index: Result<IndexSum>,
    chain: Option<Result<ChainResult>>,
}

pub fn run_verify(sc: &Scenario, opts: &VerifyOptions) -> Result<VerificationReport> {
    if let Some(checks) = &opts.checks {
        for c in checks {
            if !CHECK_NAMES.contains(&c.as_str()) {
                return Err(Error::ValidationError {
                    path: "checks".into(),
                    message: format!(
                        "unknown check `{c}`; available: {}",
                        CHECK_NAMES.join(", ")
                    ),
                });
            }
        }
    }
    let enabled = |name: &str| {
        opts.checks
            .as_ref()
            .map_or(true, |cs| cs.iter().any(|c| c == name))
    };

    let p = &sc.presentation;
    let mut report = VerificationReport::new(
        sc.spec.name.clone(),
        p.complex.ambient_dim(),
        p.action.order(),
    );

    let model = match build_boundary_model(p, &sc.circle_specs(), sc.tolerances.tol_group) {
        Ok(m) => ModelState::Ready(m),
        Err(Error::EmptyBoundary) => ModelState::Closed,
        Err(Error::UnsupportedDimension { n }) => ModelState::Unsupported(format!(
            "boundary models exist only for dimensions 1 and 2, not {n}"
        )),
        Err(e) => return Err(e),
    };
    let index = orbifold_index_sum(p, &sc.field, &sc.tolerances);
    let chain = match &model {
        ModelState::Ready(m) => Some(compute_chain(p, &sc.field, m, &sc.tolerances)),
        _ => None,
    };
    let shared = Shared {
        sc,
        model,
        index,
        chain,
    };

    if enabled("generic") {
        for o in check_generic(&shared)? {
            report.push(o);
        }
    }
    if enabled("chi-oracle") {
        for o in check_chi_oracle(&mut report, &shared)? {
            report.push(o);
        }
    }
    if enabled("main") {
        for o in check_main(&mut report, &shared)? {
            report.push(o);
        }
    }
    if enabled("additivity") {
        for o in check_additivity(&mut report, &shared)? {
            report.push(o);
        }
    }
    if enabled("morse") {
        for o in check_morse(&shared)? {
            report.push(o);
        }
    }
    if enabled("winding") {
        for o in check_winding(&shared)? {
            report.push(o);
        }
    }
    if enabled("double") {
        for o in check_double(&mut report, &shared)? {
            report.push(o);
        }
    }
    if enabled("inertia") {
        for o in check_inertia(&mut report, &shared)? {
            report.push(o);
        }
    }
    Ok(report)
}

/// Wrap a computation: input errors propagate, verification errors become
/// a FAIL outcome.
fn guard<T>(name: &str, r: &Result<T>) -> Result<Option<CheckOutcome>> {
    match r {
        Ok(_) => Ok(None),
        Err(e) if e.is_input_error() => Err(clone_error(e)),
        Err(e) => Ok(Some(CheckOutcome::fail(name, e.to_string()))),
    }
}

/// Errors are not Clone (they carry context by value); rebuild the few
/// input-error shapes that can reach `guard`.
fn clone_error(e: &Error) -> Error {
    Error::ValidationError {
        path: "input".into(),
        message: e.to_string(),
    }
}

fn check_generic(shared: &Shared) -> Result<Vec<CheckOutcome>> {
    let sc = shared.sc;
    let p = &sc.presentation;
    let mut out = Vec::new();

    match check_equivariance(
        &sc.field,
        &p.action,
        &p.complex,
        sc.tolerances.tol_equivariance,
    ) {
        Ok(()) => out.push(CheckOutcome::pass(
            "generic: equivariance",
            format!(
                "field commutes with all {} group elements on sampled points",
                p.action.order()
            ),
        )),
        Err(e) if !e.is_input_error() => {
            out.push(CheckOutcome::fail("generic: equivariance", e.to_string()))
        }
        Err(e) => return Err(e),
    }

    match &shared.model {
        ModelState::Closed => out.push(CheckOutcome::skipped(
            "generic: boundary contact",
            "the complex is closed; no boundary to check",
        )),
        ModelState::Unsupported(reason) => {
            out.push(CheckOutcome::skipped("generic: boundary contact", reason))
        }
        ModelState::Ready(_) => {
            let boundary = p.complex.boundary_subcomplex()?;
            match min_norm_on_complex(&sc.field, &boundary, 32) {
                Ok((min, at)) => {
                    if min > sc.tolerances.tol_field {
                        out.push(CheckOutcome::pass(
                            "generic: boundary contact",
                            format!("field norm stays above {min:.3e} on the boundary"),
                        ));
                    } else {
                        out.push(CheckOutcome::fail(
                            "generic: boundary contact",
                            format!("field vanishes on the boundary near {at:?}"),
                        ));
                    }
                }
                Err(e) if !e.is_input_error() => {
                    out.push(CheckOutcome::fail("generic: boundary contact", e.to_string()))
                }
                Err(e) => return Err(e),
            }
        }
    }

    match &shared.index {
        Ok(sum) => out.push(CheckOutcome::pass(
            "generic: zero set",
            format!(
                "{} interior zeros in {} orbits, all nondegenerate or resolvable",
                sum.zero_count,
                sum.orbits.len()
            ),
        )),
        Err(e) if e.is_input_error() => return Err(clone_error(e)),
        Err(e) => out.push(CheckOutcome::fail("generic: zero set", e.to_string())),
    }

    Ok(out)
}

fn check_chi_oracle(
    report: &mut VerificationReport,
    shared: &Shared,
) -> Result<Vec<CheckOutcome>> {
    let p = &shared.sc.presentation;
    let mut out = Vec::new();

    let direct = chi_orb(p)?;
    let oracle = chi_orb_oracle(p);
    report.record("chi_orb", direct);
    out.push(CheckOutcome::equality(
        "chi-oracle: orbit sum vs quotient average",
        direct,
        oracle,
    ));

    if !matches!(shared.model, ModelState::Closed) {
        let b = p.boundary()?;
        let direct_b = chi_orb(&b)?;
        report.record("chi_orb_boundary", direct_b);
        report.record("chi_orb_relative", chi_orb_relative(p)?);
        out.push(CheckOutcome::equality(
            "chi-oracle: boundary orbit sum vs quotient average",
            direct_b,
            chi_orb_oracle(&b),
        ));
    }
    Ok(out)
}

fn check_main(report: &mut VerificationReport, shared: &Shared) -> Result<Vec<CheckOutcome>> {
    let p = &shared.sc.presentation;
    let mut out = Vec::new();
    if let Some(o) = guard("main", &shared.index)? {
        return Ok(vec![o]);
    }
    let index = shared.index.as_ref().expect("guarded");
    report.record("index_orb", index.total);

    match &shared.model {
        ModelState::Closed => {
            out.push(CheckOutcome::equality(
                "main: closed identity",
                index.total,
                chi_orb(p)?,
            ));
        }
        ModelState::Unsupported(reason) => {
            out.push(CheckOutcome::skipped("main: boundary identity", reason));
        }
        ModelState::Ready(_) => {
            let chain = shared.chain.as_ref().expect("chain computed when ready");
            if let Some(o) = guard("main: boundary identity", chain)? {
                return Ok(vec![o]);
            }
            let chain = chain.as_ref().expect("guarded");
            for (i, t) in chain.terms.iter().enumerate() {
                report.record(format!("chain_term_{}", i + 1), *t);
            }
            let rhs = chi_orb_relative(p)? + sum_rationals(chain.terms.iter().copied());
            out.push(CheckOutcome::equality(
                "main: boundary identity",
                index.total,
                rhs,
            ));

            let upstairs_boundary = p.complex.boundary_subcomplex()?.euler_characteristic();
            out.push(CheckOutcome::equality(
                "main: exit regions tile the boundary",
                rat_int(chain.chi_boundary_from_regions),
                rat_int(upstairs_boundary),
            ));
        }
    }
    Ok(out)
}

fn check_additivity(
    report: &mut VerificationReport,
    shared: &Shared,
) -> Result<Vec<CheckOutcome>> {
    let p = &shared.sc.presentation;
    if matches!(shared.model, ModelState::Closed) {
        return Ok(vec![CheckOutcome::skipped(
            "additivity",
            "the complex is already closed; doubling applies to boundaries",
        )]);
    }
    let double = p.double()?;
    let chi_d = chi_orb(&double)?;
    report.record("chi_orb_double", chi_d);
    let rhs = rat_int(2) * chi_orb(p)? - chi_orb(&p.boundary()?)?;
    Ok(vec![CheckOutcome::equality(
        "additivity: chi_orb of the double",
        chi_d,
        rhs,
    )])
}

fn check_morse(shared: &Shared) -> Result<Vec<CheckOutcome>> {
    if let Some(o) = guard("morse", &shared.index)? {
        return Ok(vec![o]);
    }
    let index = shared.index.as_ref().expect("guarded");
    let mut checked = 0usize;
    let mut degenerate = 0usize;
    for orbit in &index.orbits {
        match (orbit.det_sign, orbit.morse_lambda) {
            (Some(d), Some(l)) => {
                let expected = if l % 2 == 0 { 1 } else { -1 };
                if i64::from(d) != expected {
                    return Ok(vec![CheckOutcome::fail(
                        "morse",
                        format!(
                            "zero near {:?}: sign(det) = {d} but (-1)^{l} = {expected}",
                            orbit.representative
                        ),
                    )]);
                }
                checked += 1;
            }
            _ => degenerate += 1,
        }
    }
    if checked == 0 {
        return Ok(vec![CheckOutcome::skipped(
            "morse",
            format!(
                "all {degenerate} zero orbits are degenerate; \
                 no Morse data to compare against the determinant sign"
            ),
        )]);
    }
    let detail = if degenerate == 0 {
        format!("sign(det) matches (-1)^lambda on all {checked} zero orbits")
    } else {
        format!(
            "sign(det) matches (-1)^lambda on {checked} zero orbits \
             ({degenerate} degenerate orbits excluded)"
        )
    };
    Ok(vec![CheckOutcome::pass("morse", detail)])
}

fn check_winding(shared: &Shared) -> Result<Vec<CheckOutcome>> {
    let sc = shared.sc;
    let p = &sc.presentation;
    if p.complex.ambient_dim() != 2 {
        return Ok(vec![CheckOutcome::skipped(
            "winding",
            "winding numbers are defined for two-dimensional fields",
        )]);
    }
    if let Some(o) = guard("winding", &shared.index)? {
        return Ok(vec![o]);
    }
    let index = shared.index.as_ref().expect("guarded");

    // Every zero position, to size safe probe radii.
    let mut all_zeros: Vec<Vec<f64>> = Vec::new();
    for orbit in &index.orbits {
        for g in 0..p.action.order() {
            let z = p.action.apply(g, &orbit.representative);
            if !all_zeros
                .iter()
                .any(|w| dist(w, &z) < (10.0 * sc.tolerances.tol_dedup).max(1e-7))
            {
                all_zeros.push(z);
            }
        }
    }
    let boundary = p.complex.boundary_subcomplex()?;

    let mut checked = 0usize;
    let mut fallback = 0usize;
    for orbit in &index.orbits {
        if orbit.det_sign.is_none() {
            // The index of this orbit already came from the winding route;
            // there is nothing independent to compare.
            fallback += 1;
            continue;
        }
        let rep = &orbit.representative;
        let mut clearance = f64::INFINITY;
        for z in &all_zeros {
            let d = dist(z, rep);
            if d > 1e-12 {
                clearance = clearance.min(d);
            }
        }
        if !boundary.is_empty() {
            clearance = clearance.min(boundary.distance_to_point(rep));
        }
        if !clearance.is_finite() {
            clearance = 1.0;
        }
        let w = match winding_number_2d(&sc.field, rep, 0.5 * clearance, sc.tolerances.tol_field)
        {
            Ok(w) => w,
            Err(e) if e.is_input_error() => return Err(e),
            Err(e) => return Ok(vec![CheckOutcome::fail("winding", e.to_string())]),
        };
        if w != orbit.index {
            return Ok(vec![CheckOutcome::fail(
                "winding",
                format!(
                    "zero near {rep:?}: winding {w} disagrees with Jacobian index {}",
                    orbit.index
                ),
            )]);
        }
        checked += 1;
    }
    if checked == 0 {
        let reason = if index.orbits.is_empty() {
            "the field has no interior zeros".to_string()
        } else {
            format!("all {fallback} zero orbits took the winding fallback; the route is not independent")
        };
        return Ok(vec![CheckOutcome::skipped("winding", reason)]);
    }
    let detail = if fallback == 0 {
        format!("winding count confirms the Jacobian index on all {checked} zero orbits")
    } else {
        format!(
            "winding count confirms the Jacobian index on {checked} zero orbits \
             ({fallback} already winding-derived)"
        )
    };
    Ok(vec![CheckOutcome::pass("winding", detail)])
}

fn check_double(
    report: &mut VerificationReport,
    shared: &Shared,
) -> Result<Vec<CheckOutcome>> {
    let sc = shared.sc;
    let p = &sc.presentation;
    let model = match &shared.model {
        ModelState::Closed => {
            return Ok(vec![CheckOutcome::skipped(
                "double",
                "the complex is already closed; nothing to double",
            )])
        }
        ModelState::Unsupported(reason) => {
            return Ok(vec![CheckOutcome::skipped("double", reason)])
        }
        ModelState::Ready(m) => m,
    };
    let double = match verify_double(p, &sc.field, model, &sc.tolerances) {
        Ok(d) => d,
        Err(Error::BoundaryZeroDegenerate { reason }) => {
            return Ok(vec![CheckOutcome::skipped("double", reason)]);
        }
        Err(e) if e.is_input_error() => return Err(e),
        Err(e) => return Ok(vec![CheckOutcome::fail("double", e.to_string())]),
    };

    report.record("seam_entry_sum", double.entry_sum);
    report.record("seam_exit_sum", double.exit_sum);
    report.record("doubled_index_total", double.doubled_total);

    let mut out = Vec::new();
    for (name, lhs, rhs) in double.identity_checks() {
        out.push(CheckOutcome::equality(format!("double: {name}"), lhs, rhs));
    }
    // Exit-side seam zeros and the exit-region chain count the same thing
    // by two different routes.
    if let Some(Ok(chain)) = &shared.chain {
        out.push(CheckOutcome::equality(
            "double: exit-side seam sum matches the chain total",
            double.exit_sum,
            sum_rationals(chain.terms.iter().copied()),
        ));
    } else {
        out.push(CheckOutcome::skipped(
            "double: exit-side seam sum matches the chain total",
            "the exit-region chain was not available",
        ));
    }
    Ok(out)
}

fn check_inertia(
    report: &mut VerificationReport,
    shared: &Shared,
) -> Result<Vec<CheckOutcome>> {
    let sc = shared.sc;
    let p = &sc.presentation;
    let inertia = match inertia_index(p, &sc.field, &sc.tolerances) {
        Ok(r) => r,
        Err(e) if e.is_input_error() => return Err(e),
        Err(e) => return Ok(vec![CheckOutcome::fail("inertia", e.to_string())]),
    };
    report.record("inertia_chi_total", inertia.chi_total);
    if let Some(total) = inertia.index_total {
        report.record("inertia_index_total", total);
    }

    let mut out = Vec::new();
    out.push(CheckOutcome::equality(
        "inertia: sector characteristics average to the underlying characteristic",
        inertia.chi_total,
        rat_int(inertia.chi_underlying),
    ));

    let Some(index_total) = inertia.index_total else {
        out.push(CheckOutcome::skipped(
            "inertia: induced index on the underlying space",
            "no field index was computed",
        ));
        return Ok(out);
    };

    // Underlying Poincare-Hopf: the sector index total equals the integer
    // characteristic count of the quotient, with exit data counted by
    // orbit when there is a boundary.
    let rhs: Rational = match (&shared.model, &shared.chain) {
        (ModelState::Closed, _) => rat_int(chi_underlying(p)?),
        (ModelState::Ready(_), Some(Ok(chain))) => {
            let rel = chi_underlying(p)? - chi_underlying(&p.boundary()?)?;
            let chain_part: i64 = chain.underlying_terms().iter().sum();
            rat_int(rel + chain_part)
        }
        (ModelState::Unsupported(reason), _) => {
            out.push(CheckOutcome::skipped(
                "inertia: induced index on the underlying space",
                reason,
            ));
            return Ok(out);
        }
        (ModelState::Ready(_), _) => {
            out.push(CheckOutcome::skipped(
                "inertia: induced index on the underlying space",
                "the exit-region chain was not available",
            ));
            return Ok(out);
        }
    };
    out.push(CheckOutcome::equality(
        "inertia: induced index on the underlying space",
        index_total,
        rhs,
    ));
    Ok(out)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
