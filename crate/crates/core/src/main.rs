use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use capunfold::base::{
    globally_safe, omega_grid, scene_reports, sweep_counterexample, tree_centers, unfold_polyhedron, BaseError,
    PipelineConfig, DEFAULT_TOL,
};
use capunfold::cap::{curvature_bounds_check, project, validate_cap, Cap};
use capunfold::capgen::{generate_cap, generate_counterexample, AdversarialScene, GenParams};
use capunfold::forest::{build_forest, check_forest};
use capunfold::io::{
    forest_json, format_off, pipeline_report, read_off, write_off, write_report, write_svg, IoError, LayerKind,
    NetDocument, Shape,
};
use capunfold::unfold::{check_development, check_net_simple, develop};

const EXIT_USAGE: u8 = 1;
const EXIT_NO_SAFE_EDGE: u8 = 2;
const EXIT_INVALID_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "capunfold", version, about = "Edge-unfold convex caps with their base")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Input mesh (ASCII OFF).
    off: PathBuf,
    /// Quadrant slant Δθ in degrees.
    #[arg(long, default_value_t = 3.0)]
    delta_theta: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a cap and print its metrics.
    Validate(Common),
    /// Generate a random cap.
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Target number of internal vertices.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Largest face tilt Φ in radians.
        #[arg(long, default_value_t = 0.05)]
        phi: f64,
        #[arg(long, default_value_t = 12)]
        sides: usize,
        /// Output OFF file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grow the quadrant cut forest.
    Forest {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Develop the cap cut along its forest.
    Unfold {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Evaluate every boundary edge.
    SafeEdges(Common),
    /// Unfold the cap and attach the base.
    Full {
        #[command(flatten)]
        common: Common,
        /// Boundary edge index, or `auto` to scan.
        #[arg(long, default_value = "auto")]
        edge: String,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Planar scene where no edge is safe.
    Counterexample {
        #[arg(long, default_value_t = 12)]
        ngon: usize,
        /// Curvature per tree in radians; sweeps for the threshold when absent.
        #[arg(long)]
        omega: Option<f64>,
        /// Cut angle in degrees.
        #[arg(long, default_value_t = 5.0)]
        cut_angle: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Invalid(String),
    NoSafeEdge,
    Other(String),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Parse { .. } | IoError::NonDisk(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<BaseError> for CliError {
    fn from(e: BaseError) -> Self {
        match e {
            BaseError::Cap(_) => CliError::Invalid(e.to_string()),
            BaseError::NoSafeEdge { .. } => CliError::NoSafeEdge,
            _ => CliError::Other(e.to_string()),
        }
    }
}

fn tolerance() -> Result<f64, CliError> {
    match std::env::var("CAPUNFOLD_TOL") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Usage(format!("CAPUNFOLD_TOL must be a positive number, got `{s}`"))),
        },
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn emit(value: &Value, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => write_report(value, p)?,
        None => print_stdout(&serde_json::to_string_pretty(value).map_err(|e| CliError::Other(e.to_string()))?),
    }
    Ok(())
}

/// Prints a line, ignoring a closed pipe.
fn print_stdout(s: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn load(common: &Common) -> Result<(Cap, PipelineConfig), CliError> {
    let cap = read_off(&common.off)?;
    let cfg = PipelineConfig {
        delta_theta: common.delta_theta.to_radians(),
        tol: tolerance()?,
        edge: None,
    };
    Ok((cap, cfg))
}

fn validate(common: &Common) -> Result<(), CliError> {
    let (cap, cfg) = load(common)?;
    let metrics = validate_cap(&cap).map_err(|e| CliError::Invalid(e.to_string()))?;
    let bounds = curvature_bounds_check(&metrics, cfg.delta_theta, None);
    emit(&json!({ "valid": true, "metrics": metrics, "bounds": bounds, "bounds_pass": bounds.passes() }), common.json.as_deref())
}

fn forest(common: &Common, svg: Option<&Path>) -> Result<(), CliError> {
    let (cap, cfg) = load(common)?;
    validate_cap(&cap).map_err(|e| CliError::Invalid(e.to_string()))?;
    let g = project(&cap).map_err(|e| CliError::Invalid(e.to_string()))?;
    let (apex, frame, forest) = build_forest(&g, cfg.delta_theta).map_err(|e| CliError::Other(e.to_string()))?;
    let report = check_forest(&forest, &g, &frame);
    if let Some(path) = svg {
        let m = cap.boundary.len();
        let boundary: std::collections::BTreeSet<(usize, usize)> = (0..m)
            .map(|i| {
                let (a, b) = (cap.boundary[i], cap.boundary[(i + 1) % m]);
                (a.min(b), a.max(b))
            })
            .collect();
        let mut doc = NetDocument::default();
        for &(a, b) in &g.edges {
            let seg = Shape::Segment(g.positions[a], g.positions[b]);
            let kind = if forest.is_cut_edge(a, b) {
                LayerKind::Cuts
            } else if boundary.contains(&(a.min(b), a.max(b))) {
                LayerKind::Boundary
            } else {
                LayerKind::Folds
            };
            doc.push(kind, seg);
        }
        doc.push(LayerKind::Centers, Shape::Marker(frame.apex_pos));
        write_svg(&doc, path)?;
    }
    emit(&forest_json(&apex, &frame, &forest, &report), common.json.as_deref())
}

fn unfold(common: &Common, svg: Option<&Path>) -> Result<(), CliError> {
    let (cap, cfg) = load(common)?;
    validate_cap(&cap).map_err(|e| CliError::Invalid(e.to_string()))?;
    let g = project(&cap).map_err(|e| CliError::Invalid(e.to_string()))?;
    let (apex, _, forest) = build_forest(&g, cfg.delta_theta).map_err(|e| CliError::Other(e.to_string()))?;
    let dev = develop(&cap, &forest, Some(apex.gap_edge)).map_err(|e| CliError::Other(e.to_string()))?;
    let (centers, _) = tree_centers(&cap, &dev, &forest)?;
    let net = check_net_simple(&dev, cfg.tol * dev.diameter);
    if let Some(path) = svg {
        let mut doc = NetDocument::from_development(&cap, &dev, &forest);
        doc.add_centers(&centers);
        write_svg(&doc, path)?;
    }
    let report = json!({
        "schema": capunfold::io::SCHEMA,
        "root_edge": apex.gap_edge,
        "development": check_development(&cap, &dev, &forest),
        "gap_segments": dev.gap_segments,
        "composite_centers": centers,
        "net": net,
    });
    emit(&report, common.json.as_deref())
}

fn safe_edges(common: &Common) -> Result<(), CliError> {
    let (cap, cfg) = load(common)?;
    validate_cap(&cap).map_err(|e| CliError::Invalid(e.to_string()))?;
    let g = project(&cap).map_err(|e| CliError::Invalid(e.to_string()))?;
    let (apex, _, forest) = build_forest(&g, cfg.delta_theta).map_err(|e| CliError::Other(e.to_string()))?;
    let dev = develop(&cap, &forest, Some(apex.gap_edge)).map_err(|e| CliError::Other(e.to_string()))?;
    let reports = (0..cap.boundary.len())
        .map(|e| globally_safe(&dev, &cap, &forest, e, cfg.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let count = reports.iter().filter(|r| r.globally_safe).count();
    emit(
        &json!({ "schema": capunfold::io::SCHEMA, "gap_edge": apex.gap_edge, "edges": reports, "safe_edge_count": count }),
        common.json.as_deref(),
    )
}

fn full(common: &Common, edge: &str, svg: Option<&Path>) -> Result<(), CliError> {
    let (cap, mut cfg) = load(common)?;
    if edge != "auto" {
        cfg.edge = Some(edge.parse().map_err(|_| CliError::Usage(format!("--edge expects an index or `auto`, got `{edge}`")))?);
    }
    let outcome = unfold_polyhedron(&cap, &cfg);
    let report = pipeline_report(&cap, &cfg, &outcome);
    emit(&report, common.json.as_deref())?;
    match outcome {
        Ok(r) => {
            if let Some(path) = svg {
                write_svg(&NetDocument::from_pipeline(&cap, &r), path)?;
            }
            if common.json.is_some() {
                print_stdout(&format!("attached base across edge {} ({} safe edges)", r.full.attach_edge, r.safe_edge_count()));
            }
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn counterexample(
    ngon: usize,
    omega: Option<f64>,
    cut_angle: f64,
    svg: Option<&Path>,
    json_path: Option<&Path>,
) -> Result<(), CliError> {
    let tol = tolerance()?;
    let cut = cut_angle.to_radians();
    let sweep = match omega {
        Some(_) => None,
        None => Some(sweep_counterexample(ngon, cut, &omega_grid(1e-12, 1.0, 1.25), tol)?),
    };
    let omega = omega.or_else(|| sweep.as_ref().and_then(|s| s.threshold)).unwrap_or(1.0);
    let scene = generate_counterexample(&AdversarialScene { n_gon: ngon, omega, cut_angle: cut })
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let reports = scene_reports(&scene, tol).map_err(|e| CliError::Other(e.to_string()))?;
    let safe = reports.iter().filter(|r| r.globally_safe).count();
    if let Some(path) = svg {
        write_svg(&NetDocument::from_scene(&scene, 0), path)?;
    }
    emit(
        &json!({
            "schema": capunfold::io::SCHEMA,
            "n_gon": ngon,
            "omega": omega,
            "cut_angle_deg": cut_angle,
            "sweep": sweep,
            "edges": reports,
            "safe_edge_count": safe,
        }),
        json_path,
    )
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate(c) => validate(&c),
        Command::Gen { seed, n, phi, sides, out } => {
            let params = GenParams { seed, n_target: n, phi_max: phi, boundary_sides: sides };
            let cap = generate_cap(&params).map_err(|e| CliError::Usage(e.to_string()))?;
            match out {
                Some(p) => write_off(&cap, p)?,
                None => print_stdout(format_off(&cap).trim_end()),
            }
            Ok(())
        }
        Command::Forest { common, svg } => forest(&common, svg.as_deref()),
        Command::Unfold { common, svg } => unfold(&common, svg.as_deref()),
        Command::SafeEdges(c) => safe_edges(&c),
        Command::Full { common, edge, svg } => full(&common, &edge, svg.as_deref()),
        Command::Counterexample { ngon, omega, cut_angle, svg, json } => {
            counterexample(ngon, omega, cut_angle, svg.as_deref(), json.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::NoSafeEdge) => {
            eprintln!("error: no globally safe boundary edge");
            ExitCode::from(EXIT_NO_SAFE_EDGE)
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: invalid cap: {msg}");
            ExitCode::from(EXIT_INVALID_CAP)
        }
        Err(CliError::Usage(msg)) | Err(CliError::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
