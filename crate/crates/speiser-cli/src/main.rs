//! Single executable exposing graph generation, surgery, path lifting,
//! convergence checks, and type diagnostics as reproducible file-based
//! workflows. Every output starts with its resolved configuration as
//! `# key = value` comments; identical argv and seed give identical
//! bytes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use speiser_core::analytic::{gluing_check, order_estimate, CatalogFunction};
use speiser_core::convergence::{
    embedding_convergence_check, kernel_consistency_check, translation_asymptotics_check,
    uniform_convergence_check, CompactSpec, ConvergenceReport, PointedSequence,
};
use speiser_core::error::Error;
use speiser_core::families::{binary_tree_scheme, FamilySpec};
use speiser_core::graph::dot::to_dot;
use speiser_core::graph::spg::{read_spg_file, write_spg};
use speiser_core::graph::{ball, ball_of_patch, validate, GraphScheme};
use speiser_core::lifting::{graph_from_function, lift_path, LiftStatus, PathSample, Rect};
use speiser_core::sphere::SphereValue;
use speiser_core::surgery::{collide_patch, collide_scheme, CollisionSpec};
use speiser_core::typeest::{
    classify_profile, effective_resistance, random_walk_escape, TYPE_CAVEAT,
};

mod config;
mod output;

use config::{Config, Resolve};
use output::{csv, emit, header_block, opt_sig, resolve_input, sig, svg_loglog};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(std::io::Error),
    Msg(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Msg(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "speiser",
    version,
    about = "line complexes of entire functions: generation, surgery, lifting, convergence, type diagnostics"
)]
struct Cli {
    /// plain `key = value` defaults; explicit flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate, truncate, or render SPG graph files
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Generate catalog family graphs
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Collide a singular value into another and write the survivor
    Collide(CollideArgs),
    /// Lift a sampled plane path through a function
    Lift(LiftArgs),
    /// Derive a line complex from a formula by path lifting
    #[command(name = "speiser-from-fn")]
    SpeiserFromFn(FromFnArgs),
    /// Run a convergence check and write its decay report
    Converge(ConvergeArgs),
    /// Estimate the growth order from circle samples
    Order(OrderArgs),
    /// Evaluate the overflow-free gluing map h
    #[command(name = "glue-check")]
    GlueCheck(GlueArgs),
    /// Effective-resistance profile with the type heuristic
    Resistance(ResistanceArgs),
    /// Random-walk escape probability from the root
    Walk(WalkArgs),
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Check a file against the rotation-system invariants
    Validate(ValidateArgs),
    /// Ball around the root, rim marked as boundary
    Ball(BallArgs),
    /// Graphviz rendering
    Dot(DotArgs),
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Write the ball of a family's line complex as SPG
    Gen(FamilyGenArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// SPG file (bare names fall back to the fixture directory)
    file: String,
}

#[derive(Args)]
struct BallArgs {
    #[arg(long = "in")]
    input: Option<String>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DotArgs {
    #[arg(long = "in")]
    input: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyGenArgs {
    /// exp, dexp, or hyp
    #[arg(long)]
    name: Option<String>,
    /// first finite label (dexp)
    #[arg(long)]
    a: Option<String>,
    /// second finite label (dexp, hyp)
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CollideArgs {
    /// SPG file or family name (exp, dexp, hyp)
    #[arg(long = "in")]
    input: Option<String>,
    /// label to move: a value, or `moving` for the family's collapsing label
    #[arg(long)]
    from: Option<String>,
    /// label it lands on
    #[arg(long)]
    into: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    /// ball radius of the output (required for family input)
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LiftArgs {
    /// formula, e.g. `a*(exp(exp(z))-1)+1 with a=100`
    #[arg(long = "fn")]
    formula: Option<String>,
    /// CSV of knots: columns t, re, im
    #[arg(long)]
    path: Option<String>,
    /// start point with f(start) = path start
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FromFnArgs {
    #[arg(long = "fn")]
    formula: Option<String>,
    /// half side of the centered search square
    #[arg(long = "box")]
    box_radius: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// BFS depth of the extracted graph
    #[arg(long)]
    hops: Option<usize>,
    /// marked point whose vertex becomes the root
    #[arg(long)]
    marked: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    /// uniform, embedding, translation, or kernel
    #[arg(long)]
    mode: Option<String>,
    /// sequence indices (uniform, embedding)
    #[arg(long)]
    n: Option<String>,
    /// scale parameters (translation, kernel)
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    outer: Option<f64>,
    #[arg(long)]
    hole: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// ball radius (kernel)
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// log-log decay plot
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long = "fn")]
    formula: Option<String>,
    #[arg(long)]
    radii: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GlueArgs {
    #[arg(long)]
    xs: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResistanceArgs {
    /// exp, dexp, hyp, or tree
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    radii: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.cmd, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Cmd, cfg: &Config) -> CliResult<()> {
    match cmd {
        Cmd::Graph(GraphCmd::Validate(a)) => graph_validate(a, cfg),
        Cmd::Graph(GraphCmd::Ball(a)) => graph_ball(a, cfg),
        Cmd::Graph(GraphCmd::Dot(a)) => graph_dot(a, cfg),
        Cmd::Family(FamilyCmd::Gen(a)) => family_gen(a, cfg),
        Cmd::Collide(a) => collide(a, cfg),
        Cmd::Lift(a) => lift(a, cfg),
        Cmd::SpeiserFromFn(a) => speiser_from_fn(a, cfg),
        Cmd::Converge(a) => converge(a, cfg),
        Cmd::Order(a) => order(a, cfg),
        Cmd::GlueCheck(a) => glue_check(a, cfg),
        Cmd::Resistance(a) => resistance(a, cfg),
        Cmd::Walk(a) => walk(a, cfg),
    }
}

fn graph_validate(a: ValidateArgs, _cfg: &Config) -> CliResult<()> {
    let path = resolve_input(&a.file);
    let patch = read_spg_file(&path)?;
    let report = validate(&patch);
    if report.is_valid() {
        println!("valid");
        Ok(())
    } else {
        Err(Error::InvalidFile(report.to_string()).into())
    }
}

fn graph_ball(a: BallArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let input = r.string("in", a.input)?;
    let radius = r.usize_req("radius", a.radius)?;
    let budget = r.usize_or("budget", a.budget, 100_000)?;
    let patch = read_spg_file(&resolve_input(&input))?;
    let b = ball_of_patch(&patch, radius, budget)?;
    let text = format!("{}{}", header_block("graph ball", &r.header), write_spg(&b));
    emit(a.out.as_deref(), &text)
}

fn graph_dot(a: DotArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let input = r.string("in", a.input)?;
    let patch = read_spg_file(&resolve_input(&input))?;
    let text = format!("{}{}", header_block("graph dot", &r.header), to_dot(&patch));
    emit(a.out.as_deref(), &text)
}

/// Family selection shared by gen, collide, resistance, and walk:
/// dexp defaults to a = b = -9, hyp to b = -3, matching the shipped
/// fixtures.
fn family_of(name: &str, a: Option<SphereValue>, b: Option<SphereValue>) -> CliResult<FamilySpec> {
    let (a, b) = match name {
        "dexp" => {
            let a = a.unwrap_or(SphereValue::real(-9.0));
            (Some(a), Some(b.unwrap_or(a)))
        }
        "hyp" => (a, Some(b.or(a).unwrap_or(SphereValue::real(-3.0)))),
        _ => (a, b),
    };
    Ok(FamilySpec::from_cli(name, a, b)?)
}

fn family_gen(a: FamilyGenArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let name = r.string("name", a.name)?;
    let av = r.sphere_opt("a", a.a)?;
    let bv = r.sphere_opt("b", a.b)?;
    let radius = r.usize_req("radius", a.radius)?;
    let budget = r.usize_or("budget", a.budget, 100_000)?;
    let spec = family_of(&name, av, bv)?;
    let scheme = spec.scheme()?;
    for (k, v) in scheme.meta().params {
        r.note(&k, v);
    }
    let patch = ball(scheme.as_ref(), radius, budget)?;
    let text = format!("{}{}", header_block("family gen", &r.header), write_spg(&patch));
    emit(a.out.as_deref(), &text)
}

fn collide(a: CollideArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let input = r.string("in", a.input)?;
    let from = r.string("from", a.from)?;
    let into = r.string("into", a.into)?;
    let target = SphereValue::parse(&into)?;
    let budget = r.usize_or("budget", a.budget, 100_000)?;

    let as_file = resolve_input(&input);
    if as_file.exists() {
        if from == "moving" {
            return Err(CliError::Msg(
                "`--from moving` needs a family input; give an explicit label".into(),
            ));
        }
        let spec = CollisionSpec { moving: SphereValue::parse(&from)?, target };
        let patch = read_spg_file(&as_file)?;
        let mut collided = collide_patch(&patch, spec)?;
        if let Some(radius) = a.radius {
            r.note("radius", radius);
            collided = ball_of_patch(&collided, radius, budget)?;
        }
        let text = format!("{}{}", header_block("collide", &r.header), write_spg(&collided));
        return emit(a.out.as_deref(), &text);
    }

    let av = r.sphere_opt("a", a.a)?;
    let bv = r.sphere_opt("b", a.b)?;
    let fam = family_of(&input, av, bv)?;
    let moving = if from == "moving" {
        match &fam {
            FamilySpec::ExpPlusOne => SphereValue::real(1.0),
            FamilySpec::DoubleExpPerturbed { a, .. } => *a,
            FamilySpec::HyperbolicSb { b } => *b,
        }
    } else {
        SphereValue::parse(&from)?
    };
    r.note("moving", moving);
    let radius = r
        .usize_req("radius", a.radius)
        .map_err(|_| CliError::Msg("family input needs --radius for the output ball".into()))?;
    let scheme = fam.scheme()?;
    let collided = collide_scheme(scheme.as_ref(), CollisionSpec { moving, target })?;
    let patch = ball(&collided, radius, budget)?;
    let text = format!("{}{}", header_block("collide", &r.header), write_spg(&patch));
    emit(a.out.as_deref(), &text)
}

fn parse_path_csv(text: &str) -> CliResult<PathSample> {
    let mut knots = Vec::new();
    let mut vals = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(|c| c.trim()).collect();
        if cols.len() < 3 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: "need columns t, re, im".into(),
            }
            .into());
        }
        let nums: Option<Vec<f64>> = cols[..3].iter().map(|c| c.parse().ok()).collect();
        match nums {
            Some(n) => {
                knots.push(n[0]);
                vals.push(Complex64::new(n[1], n[2]));
            }
            // one non-numeric header row is fine
            None if knots.is_empty() => continue,
            None => {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("cannot parse `{line}` as t, re, im"),
                }
                .into())
            }
        }
    }
    Ok(PathSample::new(knots, vals)?)
}

fn lift(a: LiftArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let formula = r.string("fn", a.formula)?;
    let path_file = r.string("path", a.path)?;
    let start = r.complex_req("start", a.start)?;
    let tol = r.f64_or("tol", a.tol, 1e-10)?;
    let f = CatalogFunction::from_formula(&formula)?;
    let path = parse_path_csv(&std::fs::read_to_string(resolve_input(&path_file))?)?;
    let lift = lift_path(&f, &path, start, tol)?;
    let status = match lift.status {
        LiftStatus::Completed => "completed".to_string(),
        LiftStatus::NearCritical(z) => format!("near-critical at {}", SphereValue::from_complex(z)),
        LiftStatus::Escaped(bound) => format!("escaped |z| > {bound}"),
    };
    r.note("status", &status);
    r.note("max_residual", sig(lift.max_residual()));
    let rows: Vec<Vec<String>> = lift
        .knots
        .iter()
        .zip(&lift.points)
        .zip(&lift.residuals)
        .map(|((t, z), res)| vec![sig(*t), sig(z.re), sig(z.im), sig(*res)])
        .collect();
    let text = csv("lift", &r.header, &["t", "z_re", "z_im", "residual"], &rows);
    emit(a.out.as_deref(), &text)?;
    match lift.status {
        LiftStatus::Completed => Ok(()),
        other => Err(CliError::Msg(format!("lift did not complete: {status} ({other:?})"))),
    }
}

fn speiser_from_fn(a: FromFnArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let formula = r.string("fn", a.formula)?;
    let box_radius = r.f64_req("box", a.box_radius)?;
    let grid = r.usize_or("grid", a.grid, 30)?;
    let tol = r.f64_or("tol", a.tol, 1e-10)?;
    let hops = r.usize_or("hops", a.hops, 4)?;
    let marked = r.complex_opt("marked", a.marked)?;
    let f = CatalogFunction::from_formula(&formula)?;
    let lifted = graph_from_function(&f, Rect::square(box_radius), grid, tol, marked, hops)?;
    r.note("vertices", lifted.patch.vertex_count());
    r.note("edges", lifted.patch.edge_count());
    let text =
        format!("{}{}", header_block("speiser-from-fn", &r.header), write_spg(&lifted.patch));
    emit(a.out.as_deref(), &text)
}

fn convergence_rows(report: &ConvergenceReport) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let columns = vec![
        "index",
        "sup",
        "ratio",
        "plane_sup",
        "oracle_sup",
        "route_gap",
        "attained_re",
        "attained_im",
    ];
    let rows = report
        .rows
        .iter()
        .map(|row| {
            vec![
                sig(row.index),
                sig(row.sup),
                opt_sig(row.ratio),
                opt_sig(row.plane_sup),
                opt_sig(row.oracle_sup),
                opt_sig(row.route_gap),
                sig(row.attained_at.re),
                sig(row.attained_at.im),
            ]
        })
        .collect();
    (columns, rows)
}

fn converge(a: ConvergeArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let mode = r.string("mode", a.mode)?;
    let title = format!("converge {mode}");
    let report = match mode.as_str() {
        "uniform" | "embedding" => {
            let n = r.u64_list("n", a.n, &[10, 100, 1000])?;
            let outer = r.f64_or("outer", a.outer, 2.0)?;
            let seq = PointedSequence::squares_perturbed();
            if mode == "uniform" {
                let hole = r.f64_or("hole", a.hole, 0.1)?;
                let grid = r.usize_or("grid", a.grid, 41)?;
                let threshold = r.f64_or("threshold", a.threshold, 0.05)?;
                let k = CompactSpec::new(outer, hole).with_grid(grid);
                uniform_convergence_check(&seq, &k, &n, threshold)?
            } else {
                // the inverse branch sqrt(z^2 - 1/n) has branch points at
                // |z| = sqrt(1/n); the hole must cover them for every listed n
                let hole = r.f64_or("hole", a.hole, 0.5)?;
                let grid = r.usize_or("grid", a.grid, 21)?;
                let tol = r.f64_or("tol", a.tol, 1e-8)?;
                let threshold = r.f64_or("threshold", a.threshold, 0.05)?;
                let k = CompactSpec::new(outer, hole).with_grid(grid);
                embedding_convergence_check(&seq, &k, &n, tol, threshold)?
            }
        }
        "translation" => {
            let scales =
                r.f64_list("a", a.a, &[1e1, 1e2, 1e3, 1e4, 1e5, 1e6])?;
            let outer = r.f64_or("outer", a.outer, 1.0)?;
            let grid = r.usize_or("grid", a.grid, 41)?;
            let tol = r.f64_or("tol", a.tol, 1e-8)?;
            let threshold = r.f64_or("threshold", a.threshold, 0.01)?;
            // no holes: the translation compact is a full disk
            let k = CompactSpec::new(outer, 1e-9).with_grid(grid);
            translation_asymptotics_check(&scales, &k, tol, threshold)?
        }
        "kernel" => {
            let scales = r.f64_list("a", a.a, &[1e4])?;
            let radius = r.usize_or("radius", a.radius, 3)?;
            let mut rows = Vec::new();
            let mut all = true;
            for &scale in &scales {
                let rep = kernel_consistency_check(scale, radius, None)?;
                all &= rep.matched;
                rows.push(vec![
                    sig(scale),
                    rep.radius.to_string(),
                    rep.matched.to_string(),
                    rep.collided_vertices.to_string(),
                    rep.reference_vertices.to_string(),
                ]);
            }
            r.note("pass", all);
            let text = csv(
                &title,
                &r.header,
                &["a", "radius", "matched", "collided_vertices", "reference_vertices"],
                &rows,
            );
            emit(a.out.as_deref(), &text)?;
            if !all {
                return Err(CliError::Msg(
                    "kernel check failed: collided and reference balls differ".into(),
                ));
            }
            println!("pass");
            return Ok(());
        }
        other => {
            return Err(CliError::Msg(format!(
                "unknown mode `{other}` (expected uniform, embedding, translation, or kernel)"
            )))
        }
    };
    r.note("pass", report.pass);
    let (columns, rows) = convergence_rows(&report);
    let text = csv(&title, &r.header, &columns, &rows);
    emit(a.out.as_deref(), &text)?;
    if let Some(svg_path) = &a.svg {
        let pts: Vec<(f64, f64)> =
            report.rows.iter().map(|row| (row.index, row.sup)).collect();
        std::fs::write(svg_path, svg_loglog(&title, &pts))?;
        println!("wrote {}", svg_path.display());
    }
    if !report.pass {
        return Err(CliError::Msg(format!(
            "convergence check failed: final sup {} exceeds threshold {} or rows fail to shrink",
            sig(report.rows.last().map(|row| row.sup).unwrap_or(f64::NAN)),
            sig(report.threshold)
        )));
    }
    println!("pass");
    Ok(())
}

fn order(a: OrderArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let formula = r.string("fn", a.formula)?;
    let radii = r.f64_list("radii", a.radii, &[10.0, 20.0, 50.0])?;
    let samples = r.usize_or("samples", a.samples, 64)?;
    let f = CatalogFunction::from_formula(&formula)?;
    let rows = order_estimate(&f, &radii, samples)?;
    let out_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|row| vec![sig(row.r), sig(row.ln_max_modulus), opt_sig(row.rho)])
        .collect();
    let text = csv("order", &r.header, &["r", "ln_max_modulus", "rho"], &out_rows);
    emit(a.out.as_deref(), &text)?;
    for row in &rows {
        match row.rho {
            Some(rho) => println!("rho({}) = {}", row.r, sig(rho)),
            None => println!("rho({}) undefined (max modulus too small)", row.r),
        }
    }
    Ok(())
}

fn glue_check(a: GlueArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let xs = r.f64_list("xs", a.xs, &[-20.0, 0.0, 10.0, 1e6])?;
    let rows = gluing_check(&xs);
    let out_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|row| vec![sig(row.x), sig(row.h), sig(row.h_minus_x), opt_sig(row.h_over_ln_x)])
        .collect();
    let text = csv("glue-check", &r.header, &["x", "h", "h_minus_x", "h_over_ln_x"], &out_rows);
    emit(a.out.as_deref(), &text)
}

/// Scheme for the diagnostics commands: the three families plus the
/// binary tree test input.
fn diagnostics_scheme(
    name: &str,
    a: Option<SphereValue>,
    b: Option<SphereValue>,
) -> CliResult<Box<dyn GraphScheme>> {
    if name == "tree" {
        return Ok(Box::new(binary_tree_scheme()));
    }
    Ok(family_of(name, a, b)?.scheme()?)
}

fn resistance(a: ResistanceArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let family = r.string("family", a.family)?;
    let av = r.sphere_opt("a", a.a)?;
    let bv = r.sphere_opt("b", a.b)?;
    let radii = r.radii("radii", a.radii, "2..12")?;
    let tol = r.f64_or("tol", a.tol, 1e-10)?;
    let scheme = diagnostics_scheme(&family, av, bv)?;
    let profile = effective_resistance(scheme.as_ref(), &radii, tol)?;
    let verdict = classify_profile(&profile);
    r.note("verdict", verdict);
    let ground = scheme.meta().conformal_type;
    if let Some(t) = ground {
        r.note("ground_truth", t);
    }
    let rows: Vec<Vec<String>> = profile
        .radii
        .iter()
        .zip(&profile.resistance)
        .zip(&profile.residuals)
        .map(|((rad, res), err)| vec![rad.to_string(), sig(*res), sig(*err)])
        .collect();
    let text = csv("resistance", &r.header, &["radius", "resistance", "residual"], &rows);
    emit(a.out.as_deref(), &text)?;
    if let Some(svg_path) = &a.svg {
        let pts: Vec<(f64, f64)> = profile
            .radii
            .iter()
            .zip(&profile.resistance)
            .map(|(rad, res)| (*rad as f64, *res))
            .collect();
        std::fs::write(svg_path, svg_loglog("resistance profile", &pts))?;
        println!("wrote {}", svg_path.display());
    }
    println!("{TYPE_CAVEAT}");
    println!("heuristic verdict: {verdict}");
    match ground {
        Some(t) => println!("ground truth (literature): {t}"),
        None => println!("no ground truth recorded for this input"),
    }
    Ok(())
}

fn walk(a: WalkArgs, cfg: &Config) -> CliResult<()> {
    let mut r = Resolve::new(cfg);
    let family = r.string("family", a.family)?;
    let av = r.sphere_opt("a", a.a)?;
    let bv = r.sphere_opt("b", a.b)?;
    let radius = r.usize_req("radius", a.radius)?;
    let trials = r.u64_or("trials", a.trials, 10_000)?;
    let seed = r.u64_or("seed", a.seed, 0)?;
    let scheme = diagnostics_scheme(&family, av, bv)?;
    let est = random_walk_escape(scheme.as_ref(), radius, trials, seed)?;
    let rows = vec![vec![
        radius.to_string(),
        trials.to_string(),
        seed.to_string(),
        est.hits.to_string(),
        sig(est.probability),
        sig(est.half_width),
    ]];
    let text = csv(
        "walk",
        &r.header,
        &["radius", "trials", "seed", "hits", "probability", "half_width"],
        &rows,
    );
    emit(a.out.as_deref(), &text)?;
    println!("{TYPE_CAVEAT}");
    println!(
        "escape probability {} +- {} (95 percent, {}/{} walks)",
        sig(est.probability),
        sig(est.half_width),
        est.hits,
        est.trials
    );
    Ok(())
}
