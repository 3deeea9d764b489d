//! Command line front end: loads a scenario (from a file or the built-in
//! catalog), runs the requested analysis, and reports in text or JSON.
//!
//! Exit codes: 0 when every executed check holds, 1 when a verified identity
//! fails or the scenario is mathematically rejected, 2 on malformed input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use orbifold_ph::boundary::build_boundary_model;
use orbifold_ph::catalog::{catalog_source, load_catalog_scenario, SCENARIO_NAMES};
use orbifold_ph::chain::compute_chain;
use orbifold_ph::double::verify_double;
use orbifold_ph::euler::{chi_orb, chi_orb_relative, chi_underlying};
use orbifold_ph::field::orbifold_index_sum;
use orbifold_ph::inertia::inertia_index;
use orbifold_ph::rational::{rat_display, RatJson, Rational};
use orbifold_ph::scenario::{load_scenario_str, Scenario};
use orbifold_ph::verify::{run_verify, VerifyOptions, CHECK_NAMES};
use orbifold_ph::{Error, Result};

#[derive(Parser)]
#[command(
    name = "orbifold-ph",
    version,
    about = "Exact Poincare-Hopf index verification on global-quotient orbifolds with boundary"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification checks on a scenario
    Verify(VerifyArgs),
    /// Print the Euler-Satake characteristics of a scenario
    Chi(CommonArgs),
    /// Print the orbifold index sum of the scenario's field
    Index(CommonArgs),
    /// Print the exit-region chain on the boundary
    Chain(CommonArgs),
    /// Double the scenario and print the seam bookkeeping
    Double(CommonArgs),
    /// Print the sector decomposition of the scenario
    Inertia(CommonArgs),
    /// List the built-in scenarios
    Catalog {
        /// Emit JSON instead of text
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated subset of checks to run (see --help for the names)
    #[arg(long, value_delimiter = ',', value_name = "NAMES",
          long_help = format!("Comma-separated subset of checks to run; available: {}", CHECK_NAMES.join(", ")))]
    checks: Option<Vec<String>>,
}

#[derive(Args)]
struct CommonArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    tols: TolArgs,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Path to a scenario JSON file
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
    /// Name of a built-in scenario (see the `catalog` command)
    #[arg(long, value_name = "NAME")]
    name: Option<String>,
}

/// Tolerance overrides; each one replaces both the default and whatever the
/// scenario file declares.
#[derive(Args)]
struct TolArgs {
    /// Group closure: orthogonality and permutation agreement
    #[arg(long, value_name = "X")]
    tol_group: Option<f64>,
    /// Field norms at or below this count as vanishing
    #[arg(long, value_name = "X")]
    tol_field: Option<f64>,
    /// Newton convergence threshold on the residual norm
    #[arg(long, value_name = "X")]
    tol_newton: Option<f64>,
    /// Zeros closer than this are merged
    #[arg(long, value_name = "X")]
    tol_dedup: Option<f64>,
    /// Jacobian determinants at or below this are degenerate
    #[arg(long, value_name = "X")]
    tol_degenerate: Option<f64>,
    /// Allowed equivariance residual at sample points
    #[arg(long, value_name = "X")]
    tol_equivariance: Option<f64>,
    /// Newton seeds per unit length along each axis
    #[arg(long, value_name = "N")]
    grid_density: Option<usize>,
    /// Cap on the closed group order
    #[arg(long, value_name = "N")]
    max_order: Option<usize>,
}

impl TolArgs {
    fn pairs(&self) -> Vec<(&'static str, serde_json::Value)> {
        let mut out = Vec::new();
        let mut push_f = |k: &'static str, v: &Option<f64>| {
            if let Some(x) = v {
                out.push((k, json!(x)));
            }
        };
        push_f("tol_group", &self.tol_group);
        push_f("tol_field", &self.tol_field);
        push_f("tol_newton", &self.tol_newton);
        push_f("tol_dedup", &self.tol_dedup);
        push_f("tol_degenerate", &self.tol_degenerate);
        push_f("tol_equivariance", &self.tol_equivariance);
        if let Some(n) = self.grid_density {
            out.push(("grid_density", json!(n)));
        }
        if let Some(n) = self.max_order {
            out.push(("max_order", json!(n)));
        }
        out
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Verify(args) => cmd_verify(args),
        Command::Chi(args) => cmd_chi(args),
        Command::Index(args) => cmd_index(args),
        Command::Chain(args) => cmd_chain(args),
        Command::Double(args) => cmd_double(args),
        Command::Inertia(args) => cmd_inertia(args),
        Command::Catalog { json } => cmd_catalog(json),
    }
}

/// Loads the scenario source and routes it through the one validation path,
/// overlaying any command-line tolerance overrides on the file's own.
fn load(source: &SourceArgs, tols: &TolArgs) -> Result<Scenario> {
    let (text, origin): (String, String) = match (&source.scenario, &source.name) {
        (Some(path), None) => (
            std::fs::read_to_string(path).map_err(|e| Error::ParseError {
                message: format!("{}: {e}", path.display()),
            })?,
            path.display().to_string(),
        ),
        (None, Some(name)) => (
            catalog_source(name)
                .ok_or_else(|| Error::ValidationError {
                    path: "name".into(),
                    message: format!(
                        "unknown catalog scenario {name:?}; available: {}",
                        SCENARIO_NAMES.join(", ")
                    ),
                })?
                .to_string(),
            name.clone(),
        ),
        _ => unreachable!("clap requires exactly one scenario source"),
    };

    let overrides = tols.pairs();
    if overrides.is_empty() {
        return load_scenario_str(&text, &origin);
    }
    match serde_json::from_str::<serde_json::Value>(&text) {
        Ok(mut v) => {
            if !v["tolerances"].is_object() {
                v["tolerances"] = json!({});
            }
            for (key, value) in overrides {
                v["tolerances"][key] = value;
            }
            load_scenario_str(&v.to_string(), &origin)
        }
        // Let the scenario loader produce its own parse error.
        Err(_) => load_scenario_str(&text, &origin),
    }
}

fn rj(r: Rational) -> serde_json::Value {
    serde_json::to_value(RatJson(r)).expect("rational serializes")
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    let sc = load(&args.common.source, &args.common.tols)?;
    let opts = VerifyOptions {
        checks: args.checks,
    };
    let report = run_verify(&sc, &opts)?;
    if args.common.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
    Ok(report.passed)
}

fn cmd_chi(args: CommonArgs) -> Result<bool> {
    let sc = load(&args.source, &args.tols)?;
    let p = &sc.presentation;
    let chi = chi_orb(p)?;
    let underlying = chi_underlying(p)?;
    let closed = p.complex.boundary_subcomplex()?.is_empty();
    let (chi_b, chi_rel, chi_d) = if closed {
        (None, None, None)
    } else {
        (
            Some(chi_orb(&p.boundary()?)?),
            Some(chi_orb_relative(p)?),
            Some(chi_orb(&p.double()?)?),
        )
    };

    if args.json {
        let out = json!({
            "scenario": sc.spec.name,
            "dim": p.complex.ambient_dim(),
            "group_order": p.action.order(),
            "chi_orb": rj(chi),
            "chi_orb_boundary": chi_b.map(rj),
            "chi_orb_relative": chi_rel.map(rj),
            "chi_orb_double": chi_d.map(rj),
            "chi_underlying": underlying,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!(
            "scenario {} (dim {}, group order {})",
            sc.spec.name,
            p.complex.ambient_dim(),
            p.action.order()
        );
        println!("chi_orb             = {}", rat_display(&chi));
        match (chi_b, chi_rel, chi_d) {
            (Some(b), Some(r), Some(d)) => {
                println!("chi_orb (boundary)  = {}", rat_display(&b));
                println!("chi_orb (relative)  = {}", rat_display(&r));
                println!("chi_orb (double)    = {}", rat_display(&d));
            }
            _ => println!("boundary            = empty (closed)"),
        }
        println!("chi (underlying)    = {underlying}");
    }
    Ok(true)
}

fn cmd_index(args: CommonArgs) -> Result<bool> {
    let sc = load(&args.source, &args.tols)?;
    let sum = orbifold_index_sum(&sc.presentation, &sc.field, &sc.tolerances)?;

    if args.json {
        let orbits: Vec<serde_json::Value> = sum
            .orbits
            .iter()
            .map(|o| {
                json!({
                    "representative": o.representative,
                    "orbit_size": o.orbit_size,
                    "isotropy_order": o.isotropy_order,
                    "index": o.index,
                    "det_sign": o.det_sign,
                    "morse_lambda": o.morse_lambda,
                    "contribution": rj(o.orb_index),
                })
            })
            .collect();
        let out = json!({
            "scenario": sc.spec.name,
            "total": rj(sum.total),
            "zero_count": sum.zero_count,
            "winding_fallback": sum.used_winding_fallback,
            "orbits": orbits,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!(
            "index_orb = {} ({} zero orbits, {} zeros upstairs)",
            rat_display(&sum.total),
            sum.orbits.len(),
            sum.zero_count
        );
        for o in &sum.orbits {
            let coords: Vec<String> = o.representative.iter().map(|x| format!("{x:.6}")).collect();
            let lambda = o
                .morse_lambda
                .map_or("degenerate".to_string(), |l| format!("lambda {l}"));
            println!(
                "  orbit at [{}]: size {}, isotropy {}, index {}, contribution {} ({})",
                coords.join(", "),
                o.orbit_size,
                o.isotropy_order,
                o.index,
                rat_display(&o.orb_index),
                lambda
            );
        }
    }
    Ok(true)
}

fn cmd_chain(args: CommonArgs) -> Result<bool> {
    let sc = load(&args.source, &args.tols)?;
    let p = &sc.presentation;
    let model = build_boundary_model(p, &sc.circle_specs(), sc.tolerances.tol_group)?;
    let chain = compute_chain(p, &sc.field, &model, &sc.tolerances)?;

    if args.json {
        let roots: Vec<serde_json::Value> = chain
            .roots
            .iter()
            .map(|r| {
                json!({
                    "circle": r.circle,
                    "theta": r.theta,
                    "point": r.point,
                    "level2": r.level2,
                })
            })
            .collect();
        let regions: Vec<serde_json::Value> = chain
            .regions
            .iter()
            .map(|c| {
                json!({
                    "circle": c.circle,
                    "uniform": c.uniform,
                    "exit_arcs": c.exit_arcs,
                    "entry_arc_count": c.entry_arc_count,
                })
            })
            .collect();
        let endpoints: Vec<serde_json::Value> = chain
            .endpoints
            .iter()
            .map(|e| {
                json!({
                    "location": e.location,
                    "normal_component": e.normal_component,
                    "exits": e.exits,
                })
            })
            .collect();
        let out = json!({
            "scenario": sc.spec.name,
            "terms": chain.terms.iter().map(|t| rj(*t)).collect::<Vec<_>>(),
            "total": rj(chain.terms_total()),
            "underlying_terms": chain.underlying_terms(),
            "roots": roots,
            "regions": regions,
            "endpoints": endpoints,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!("scenario {}", sc.spec.name);
        for (i, t) in chain.terms.iter().enumerate() {
            println!("term[{}] = {}", i + 1, rat_display(t));
        }
        println!("chain total = {}", rat_display(&chain.terms_total()));
        if !chain.roots.is_empty() {
            println!("tangency roots:");
            for r in &chain.roots {
                println!(
                    "  circle {} at theta {:.6}{}",
                    r.circle,
                    r.theta,
                    if r.level2 { " (level-2 exit)" } else { "" }
                );
            }
        }
        for c in &chain.regions {
            match c.uniform {
                Some(true) => println!("circle {}: the whole circle exits", c.circle),
                Some(false) => println!("circle {}: the whole circle enters", c.circle),
                None => println!(
                    "circle {}: {} exit arcs, {} entry arcs",
                    c.circle,
                    c.exit_arcs.len(),
                    c.entry_arc_count
                ),
            }
        }
        for e in &chain.endpoints {
            println!(
                "endpoint at {}: field {}",
                e.location,
                if e.exits { "exits" } else { "enters" }
            );
        }
    }
    Ok(true)
}

fn cmd_double(args: CommonArgs) -> Result<bool> {
    let sc = load(&args.source, &args.tols)?;
    let p = &sc.presentation;
    let model = build_boundary_model(p, &sc.circle_specs(), sc.tolerances.tol_group)?;
    let report = verify_double(p, &sc.field, &model, &sc.tolerances)?;
    let identities = report.identity_checks();
    let all_hold = identities.iter().all(|(_, lhs, rhs)| lhs == rhs);

    if args.json {
        let zeros: Vec<serde_json::Value> = report
            .boundary_zeros
            .iter()
            .map(|z| {
                json!({
                    "circle": z.circle,
                    "theta": z.theta,
                    "point": z.point,
                    "exit_side": z.exit_side,
                    "tangential_index": z.tangential_index,
                    "doubled_index": z.doubled_index,
                    "tangential_lambda": z.tangential_lambda,
                    "doubled_lambda": z.doubled_lambda,
                    "orbit_size": z.orbit_size,
                    "isotropy_order": z.isotropy_order,
                    "orbit_representative": z.orbit_representative,
                })
            })
            .collect();
        let ids: Vec<serde_json::Value> = identities
            .iter()
            .map(|(name, lhs, rhs)| {
                json!({"name": name, "lhs": rj(*lhs), "rhs": rj(*rhs), "holds": lhs == rhs})
            })
            .collect();
        let out = json!({
            "scenario": sc.spec.name,
            "support": report.support,
            "interior_total": rj(report.interior.total),
            "entry_sum": rj(report.entry_sum),
            "exit_sum": rj(report.exit_sum),
            "doubled_total": rj(report.doubled_total),
            "chi_double": rj(report.chi_double),
            "boundary_zeros": zeros,
            "identities": ids,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!("scenario {}", sc.spec.name);
        println!("collar support = {}", report.support);
        println!(
            "interior zeros: {} orbits, total {}",
            report.interior.orbits.len(),
            rat_display(&report.interior.total)
        );
        println!("seam zeros: {}", report.boundary_zeros.len());
        for z in &report.boundary_zeros {
            let side = if z.exit_side { "exit" } else { "entry" };
            let circle = z
                .circle
                .map_or("endpoint".to_string(), |c| format!("circle {c}"));
            println!(
                "  {} at theta {:.6} ({}): tangential index {}, doubled index {}",
                circle, z.theta, side, z.tangential_index, z.doubled_index
            );
        }
        println!(
            "entry sum = {}, exit sum = {}",
            rat_display(&report.entry_sum),
            rat_display(&report.exit_sum)
        );
        println!("doubled index total = {}", rat_display(&report.doubled_total));
        for (name, lhs, rhs) in &identities {
            let tag = if lhs == rhs { "PASS" } else { "FAIL" };
            println!(
                "  {tag}  {name}: {} {} {}",
                rat_display(lhs),
                if lhs == rhs { "==" } else { "!=" },
                rat_display(rhs)
            );
        }
    }
    Ok(all_hold)
}

fn cmd_inertia(args: CommonArgs) -> Result<bool> {
    let sc = load(&args.source, &args.tols)?;
    let report = inertia_index(&sc.presentation, &sc.field, &sc.tolerances)?;
    let burnside_ok = report.check_burnside().is_ok();

    if args.json {
        let sectors: Vec<serde_json::Value> = report
            .sectors
            .iter()
            .map(|s| {
                json!({
                    "class_representative": s.class_representative,
                    "class_size": s.class_size,
                    "centralizer_order": s.centralizer_order,
                    "fixed_space_dim": s.fixed_space_dim,
                    "chi_fixed": s.chi_fixed,
                    "chi_sector": rj(s.chi_sector),
                    "index_sum": s.index_sum.map(rj),
                    "zero_count": s.zero_count,
                })
            })
            .collect();
        let out = json!({
            "scenario": sc.spec.name,
            "sectors": sectors,
            "chi_total": rj(report.chi_total),
            "chi_underlying": report.chi_underlying,
            "index_total": report.index_total.map(rj),
            "averaging_identity_holds": burnside_ok,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!("scenario {}", sc.spec.name);
        for s in &report.sectors {
            let index = s
                .index_sum
                .map_or("-".to_string(), |r| rat_display(&r));
            println!(
                "sector g{}: class size {}, centralizer {}, fixed dim {}, chi {}, index {}, zeros {}",
                s.class_representative,
                s.class_size,
                s.centralizer_order,
                s.fixed_space_dim,
                rat_display(&s.chi_sector),
                index,
                s.zero_count
            );
        }
        println!(
            "chi total = {} vs underlying {} ({})",
            rat_display(&report.chi_total),
            report.chi_underlying,
            if burnside_ok { "PASS" } else { "FAIL" }
        );
        if let Some(total) = report.index_total {
            println!("index total = {}", rat_display(&total));
        }
    }
    Ok(burnside_ok)
}

fn cmd_catalog(json: bool) -> Result<bool> {
    if json {
        let mut entries = Vec::new();
        for name in SCENARIO_NAMES {
            let sc = load_catalog_scenario(name)?;
            entries.push(json!({
                "name": name,
                "description": sc.spec.description,
                "dim": sc.spec.dim,
                "group_order": sc.presentation.action.order(),
            }));
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::Value::Array(entries)).expect("json")
        );
    } else {
        for name in SCENARIO_NAMES {
            let sc = load_catalog_scenario(name)?;
            println!(
                "{name}  (dim {}, group order {})",
                sc.spec.dim,
                sc.presentation.action.order()
            );
            println!("    {}", sc.spec.description);
        }
    }
    Ok(true)
}
