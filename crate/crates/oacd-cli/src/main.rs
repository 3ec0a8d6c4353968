//! Command-line front end: builds diagrams from point files, answers
//! code-only relation queries, runs the verification suite, renders SVG,
//! prints cluster matrices, and lists hidden particles.
//!
//! Exit codes: 0 success, 1 verification found hard failures, 2 bad input
//! or degenerate geometry.

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;

use oacd::chroma::{classify_kind, fmt_tuple, parse_code};
use oacd::diagram::FullOacd;
use oacd::exact::{GeneratorSet, Point2, Rat};
use oacd::io::{parse_points, parse_rat, particle_records, InputFormat};
use oacd::render::{render_svg, BBox, RenderOptions};
use oacd::topo::{
    amatrix, conn, cscs_relation, imatrix, rmatrix, CdnReading, Cluster, RelationVerdict,
};
use oacd::verify::{hidden_particles, run_suite, SuiteConfig};
use oacd::ChromaticCode;

#[derive(Parser)]
#[command(
    name = "oacd",
    version,
    about = "Full-coded chromatic diagrams: build, query, verify, render"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a diagram from a point file and list every particle.
    Build(BuildArgs),
    /// Relate two particle codes without touching geometry.
    Query(QueryArgs),
    /// Run the randomized verification suite against geometric ground truth.
    Verify(VerifyArgs),
    /// Render a diagram as SVG.
    Render(RenderArgs),
    /// Distance/adjacency/reachability matrices of a cell cluster.
    Matrix(MatrixArgs),
    /// List candidate codes no particle of the diagram carries.
    Hidden(HiddenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFmt {
    Table,
    Json,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CdnArg {
    Cross,
    Union,
}

impl From<CdnArg> for CdnReading {
    fn from(a: CdnArg) -> CdnReading {
        match a {
            CdnArg::Cross => CdnReading::Cross,
            CdnArg::Union => CdnReading::Union,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    /// Point file: CSV `x,y` lines or JSON `[[x,y],...]`.
    #[arg(long)]
    input: String,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_enum, default_value = "table")]
    out: OutFmt,
}

#[derive(Args)]
struct QueryArgs {
    /// First code: compact digits, `d:` comma list, or `(a,b,c)` tuple.
    code_a: String,
    /// Second code.
    code_b: String,
    /// Optional diagram context; marks evidence codes realized or hidden.
    #[arg(long)]
    input: Option<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_enum, default_value = "table")]
    out: OutFmt,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    #[arg(long, default_value_t = 7)]
    n_max: usize,
    /// Generator sets sampled per size.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Which shared-cell count enters the cluster counting rules.
    #[arg(long, value_enum, default_value = "cross")]
    cdn_reading: CdnArg,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: String,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Viewport `x0,y0,x1,y1` (exact rationals); fitted automatically when
    /// omitted.
    #[arg(long, allow_hyphen_values = true)]
    bbox: Option<String>,
    /// Write the SVG here instead of stdout.
    #[arg(long)]
    output: Option<String>,
    /// Label edges with their codes too.
    #[arg(long)]
    edge_labels: bool,
    #[arg(long, value_enum, default_value = "svg")]
    out: OutFmt,
}

#[derive(Args)]
struct MatrixArgs {
    /// Cell codes forming the cluster.
    #[arg(required = true)]
    codes: Vec<String>,
    /// Second cluster for a cluster-cluster verdict; repeat per code.
    #[arg(long)]
    versus: Vec<String>,
    #[arg(long, value_enum, default_value = "cross")]
    cdn_reading: CdnArg,
    #[arg(long, value_enum, default_value = "table")]
    out: OutFmt,
}

#[derive(Args)]
struct HiddenArgs {
    #[arg(long)]
    input: String,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_enum, default_value = "table")]
    out: OutFmt,
}

struct CliError(String);

macro_rules! wrap_error {
    ($($ty:ty),+) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError(e.to_string())
            }
        })+
    };
}

wrap_error!(
    oacd::exact::GeneratorError,
    oacd::arrangement::BuildError,
    oacd::topo::TopoError,
    oacd::render::RenderError,
    serde_json::Error
);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Query(a) => cmd_query(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Render(a) => cmd_render(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Hidden(a) => cmd_hidden(a),
    }
}

// ---------------------------------------------------------------- input

fn read_points(path: &str, format: Option<FormatArg>) -> Result<Vec<Point2>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError(format!("{path}: {e}")))?;
    let fmt = match format {
        Some(FormatArg::Csv) => InputFormat::Csv,
        Some(FormatArg::Json) => InputFormat::Json,
        None => InputFormat::from_path(path),
    };
    let points = parse_points(&text, fmt).map_err(|e| CliError(format!("{path}: {e}")))?;
    Ok(points)
}

fn load_diagram(path: &str, format: Option<FormatArg>) -> Result<FullOacd, CliError> {
    let points = read_points(path, format)?;
    let gs = GeneratorSet::new(points)?;
    Ok(FullOacd::build(gs)?)
}

/// Parses one code argument. Compact digit strings are read as doubled
/// components; when that reading names no particle but reading the digits
/// as whole (integer) components does, the latter wins, so cell strings
/// like `012` work the way diagrams label them. Tuples `(a,b,c)` with `/2`
/// fractions or `.5` decimals are read in natural units.
fn parse_code_arg(s: &str) -> Result<ChromaticCode, CliError> {
    let t = s.trim();
    if t.starts_with('(') || t.contains('/') || t.contains('.') {
        let body = t.trim_start_matches('(').trim_end_matches(')');
        let mut doubled = Vec::new();
        for part in body.split(',') {
            let r = parse_rat(part).map_err(|m| CliError(format!("in code {s:?}: {m}")))?;
            let two = r * Rat::from_integer(2.into());
            if !two.is_integer() {
                return Err(CliError(format!(
                    "in code {s:?}: component {part:?} is not a half-integer"
                )));
            }
            let v = two.to_integer().to_u32().ok_or_else(|| {
                CliError(format!("in code {s:?}: component {part:?} out of range"))
            })?;
            doubled.push(v);
        }
        return Ok(ChromaticCode::from_doubled(doubled));
    }
    let c = parse_code(t).map_err(|e| CliError(format!("bad code {s:?}: {e}")))?;
    if !t.starts_with("d:") && !t.contains(',') && classify_kind(&c).is_none() {
        let redoubled =
            ChromaticCode::from_doubled(c.doubled().iter().map(|&d| d * 2).collect());
        if classify_kind(&redoubled).is_some() {
            return Ok(redoubled);
        }
    }
    Ok(c)
}

// ---------------------------------------------------------------- output

/// Distance in natural units: halves print as `.5`.
fn fmt_delta(doubled: u64) -> String {
    if doubled % 2 == 0 {
        (doubled / 2).to_string()
    } else {
        format!("{}.5", doubled / 2)
    }
}

fn print_table(headers: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let fmt_row = |cells: Vec<String>| {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<1$}", c, widths[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    println!("{}", fmt_row(headers.iter().map(|h| h.to_string()).collect()));
    for row in rows {
        println!("{}", fmt_row(row.clone()));
    }
}

fn reject_svg(out: OutFmt) -> Result<(), CliError> {
    if out == OutFmt::Svg {
        Err(CliError(
            "svg output is only produced by the render command".to_string(),
        ))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------- build

fn cmd_build(a: BuildArgs) -> Result<ExitCode, CliError> {
    reject_svg(a.out)?;
    let d = load_diagram(&a.input, a.format)?;
    let records = particle_records(&d);
    match a.out {
        OutFmt::Json => println!("{}", serde_json::to_string_pretty(&records)?),
        _ => {
            let c = d.counts();
            println!(
                "n={}: {} cells, {} edges, {} 2-I vertices, {} 3-I vertices ({} particles)",
                d.n(),
                c.cells,
                c.edges,
                c.vertices_2i,
                c.vertices_3i,
                c.total()
            );
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.id.to_string(),
                        r.kind.to_string(),
                        r.code.clone(),
                        r.code_tuple.clone(),
                        r.location.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            print_table(&["id", "kind", "code", "tuple", "location"], &rows);
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- query

fn describe_code(c: &ChromaticCode) -> String {
    let kind = classify_kind(c).map_or("not a particle", |k| k.name());
    format!("{c} = {} [{kind}]", fmt_tuple(c))
}

fn verdict_lines(v: &RelationVerdict, with_flags: bool) -> Vec<String> {
    let mut out = Vec::new();
    let rel = match v.joint_kind {
        Some(k) => format!("{} via {}", v.relation.name(), k.name()),
        None => v.relation.name().to_string(),
    };
    out.push(format!("relation: {rel}"));
    out.push(format!("delta: {}", fmt_delta(v.delta_doubled)));
    out.push(format!("gamma: {}", v.gamma));
    for (i, e) in v.evidence.iter().enumerate() {
        let flag = match (&v.realized, with_flags) {
            (Some(r), true) => {
                if r[i] {
                    " [realized]"
                } else {
                    " [hidden]"
                }
            }
            _ => "",
        };
        out.push(format!("evidence: {e} = {}{flag}", fmt_tuple(e)));
    }
    out
}

fn cmd_query(a: QueryArgs) -> Result<ExitCode, CliError> {
    reject_svg(a.out)?;
    let ca = parse_code_arg(&a.code_a)?;
    let cb = parse_code_arg(&a.code_b)?;
    let diagram = match &a.input {
        Some(path) => Some(load_diagram(path, a.format)?),
        None => None,
    };
    if let Some(d) = &diagram {
        for c in [&ca, &cb] {
            if c.n() != d.n() {
                return Err(CliError(format!(
                    "code {c} has {} components but the diagram has {} generators",
                    c.n(),
                    d.n()
                )));
            }
        }
    }
    let mut verdict = oacd::topo::relate(&ca, &cb)?;
    if let Some(d) = &diagram {
        verdict = verdict.annotate_realized(|c| d.is_realized(c));
    }
    match a.out {
        OutFmt::Json => {
            let evidence: Vec<serde_json::Value> = verdict
                .evidence
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let mut obj = serde_json::json!({
                        "code": e.to_string(),
                        "tuple": fmt_tuple(e),
                    });
                    if let Some(r) = &verdict.realized {
                        obj["realized"] = serde_json::json!(r[i]);
                    }
                    obj
                })
                .collect();
            let doc = serde_json::json!({
                "a": { "code": ca.to_string(), "tuple": fmt_tuple(&ca),
                       "kind": classify_kind(&ca).map(|k| k.name()),
                       "realized": diagram.as_ref().map(|d| d.is_realized(&ca)) },
                "b": { "code": cb.to_string(), "tuple": fmt_tuple(&cb),
                       "kind": classify_kind(&cb).map(|k| k.name()),
                       "realized": diagram.as_ref().map(|d| d.is_realized(&cb)) },
                "relation": verdict.relation.name(),
                "joint_kind": verdict.joint_kind.map(|k| k.name()),
                "delta": fmt_delta(verdict.delta_doubled),
                "delta_doubled": verdict.delta_doubled,
                "gamma": verdict.gamma,
                "evidence": evidence,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        _ => {
            let flag = |c: &ChromaticCode| match &diagram {
                Some(d) => {
                    if d.is_realized(c) {
                        " [realized]"
                    } else {
                        " [hidden]"
                    }
                }
                None => "",
            };
            println!("a: {}{}", describe_code(&ca), flag(&ca));
            println!("b: {}{}", describe_code(&cb), flag(&cb));
            for line in verdict_lines(&verdict, diagram.is_some()) {
                println!("{line}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- verify

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode, CliError> {
    if a.n_min < 2 || a.n_min > a.n_max {
        return Err(CliError(format!(
            "need 2 <= n-min <= n-max, got {}..{}",
            a.n_min, a.n_max
        )));
    }
    let cfg = SuiteConfig {
        seed: a.seed,
        n_min: a.n_min,
        n_max: a.n_max,
        trials: a.trials,
        cdn_reading: a.cdn_reading.into(),
        ..SuiteConfig::default()
    };
    let started = Instant::now();
    let report = run_suite(&cfg);
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    println!("{report}");
    if report.hard_failures() == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

// ---------------------------------------------------------------- render

fn parse_bbox(s: &str) -> Result<BBox, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let [x0, y0, x1, y1] = parts.as_slice() else {
        return Err(CliError(format!("bbox must be `x0,y0,x1,y1`, got {s:?}")));
    };
    let r = |t: &str| parse_rat(t).map_err(|m| CliError(format!("in bbox: {m}")));
    Ok(BBox::new(r(x0)?, r(y0)?, r(x1)?, r(y1)?)?)
}

fn cmd_render(a: RenderArgs) -> Result<ExitCode, CliError> {
    if a.out != OutFmt::Svg {
        return Err(CliError("render only emits svg".to_string()));
    }
    let d = load_diagram(&a.input, a.format)?;
    let bbox = match &a.bbox {
        Some(s) => parse_bbox(s)?,
        None => BBox::around(d.generators().points()),
    };
    let opts = RenderOptions {
        edge_labels: a.edge_labels,
        ..RenderOptions::default()
    };
    let svg = render_svg(&d, &bbox, &opts)?;
    match &a.output {
        Some(path) => fs::write(path, svg).map_err(|e| CliError(format!("{path}: {e}")))?,
        None => print!("{svg}"),
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- matrix

fn matrix_rows(entries: &[Vec<u64>], labels: &[ChromaticCode]) -> Vec<Vec<String>> {
    entries
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut cells = vec![labels[i].to_string()];
            cells.extend(row.iter().map(|&d| fmt_delta(d)));
            cells
        })
        .collect()
}

fn print_binary_matrix(title: &str, entries: &[Vec<u8>], labels: &[ChromaticCode]) {
    println!("{title}:");
    let mut rows = Vec::new();
    for (i, row) in entries.iter().enumerate() {
        let mut cells = vec![labels[i].to_string()];
        cells.extend(row.iter().map(|b| b.to_string()));
        rows.push(cells);
    }
    let mut header = vec![String::new()];
    header.extend(labels.iter().map(|c| c.to_string()));
    let all: Vec<Vec<String>> = std::iter::once(header).chain(rows).collect();
    for line in render_aligned(&all) {
        println!("{line}");
    }
}

/// Pads a ragged list of rows into aligned columns.
fn render_aligned(rows: &[Vec<String>]) -> Vec<String> {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    rows.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(i, c)| format!("{:<1$}", c, widths[i]))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        })
        .collect()
}

fn cmd_matrix(a: MatrixArgs) -> Result<ExitCode, CliError> {
    reject_svg(a.out)?;
    let codes: Vec<ChromaticCode> = a
        .codes
        .iter()
        .map(|s| parse_code_arg(s))
        .collect::<Result<_, _>>()?;
    let cluster = Cluster::new(codes)?;

    if !a.versus.is_empty() {
        let other: Vec<ChromaticCode> = a
            .versus
            .iter()
            .map(|s| parse_code_arg(s))
            .collect::<Result<_, _>>()?;
        let other = Cluster::new(other)?;
        let cross = oacd::topo::dmatrix(cluster.members(), other.members())?;
        let verdict = cscs_relation(&cluster, &other, a.cdn_reading.into())?;
        match a.out {
            OutFmt::Json => {
                let doc = serde_json::json!({
                    "cross_distances": cross.entries.iter()
                        .map(|row| row.iter().map(|&d| fmt_delta(d)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "set_relation": verdict.set_relation.name(),
                    "cdn_relation": verdict.cdn_relation.name(),
                    "agree": verdict.agree,
                    "container": verdict.container,
                    "shared_cells": verdict.shared_cells.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "shared_edges": verdict.shared_edges.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "shared_vertices": verdict.shared_vertices.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            }
            _ => {
                println!("cross distances (rows: first cluster):");
                let mut header = vec![String::new()];
                header.extend(other.members().iter().map(|c| c.to_string()));
                let body = matrix_rows(&cross.entries, cluster.members());
                let all: Vec<Vec<String>> =
                    std::iter::once(header).chain(body).collect();
                for line in render_aligned(&all) {
                    println!("{line}");
                }
                println!("set route: {}", verdict.set_relation.name());
                println!("count route: {}", verdict.cdn_relation.name());
                println!("agree: {}", if verdict.agree { "yes" } else { "no" });
                if let Some(side) = verdict.container {
                    println!("container: cluster {side}");
                }
                for (label, list) in [
                    ("shared cells", &verdict.shared_cells),
                    ("shared edges", &verdict.shared_edges),
                    ("shared vertices", &verdict.shared_vertices),
                ] {
                    if !list.is_empty() {
                        let items: Vec<String> =
                            list.iter().map(|c| c.to_string()).collect();
                        println!("{label}: {}", items.join(" "));
                    }
                }
            }
        }
        return Ok(ExitCode::SUCCESS);
    }

    let dm = imatrix(cluster.members())?;
    let am = amatrix(&cluster)?;
    let rm = rmatrix(&am);
    let cn = conn(&cluster)?;
    match a.out {
        OutFmt::Json => {
            let doc = serde_json::json!({
                "members": cluster.members().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "distances": dm.entries.iter()
                    .map(|row| row.iter().map(|&d| fmt_delta(d)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "adjacency": am.entries,
                "reachability": rm.entries,
                "connected": cn.connected,
                "components": cn.components.iter()
                    .map(|comp| comp.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        _ => {
            println!("distances:");
            let mut header = vec![String::new()];
            header.extend(cluster.members().iter().map(|c| c.to_string()));
            let body = matrix_rows(&dm.entries, cluster.members());
            let all: Vec<Vec<String>> = std::iter::once(header).chain(body).collect();
            for line in render_aligned(&all) {
                println!("{line}");
            }
            print_binary_matrix("adjacency", &am.entries, cluster.members());
            print_binary_matrix("reachability", &rm.entries, cluster.members());
            println!(
                "connected: {} ({} component{})",
                if cn.connected { "yes" } else { "no" },
                cn.components.len(),
                if cn.components.len() == 1 { "" } else { "s" }
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- hidden

fn cmd_hidden(a: HiddenArgs) -> Result<ExitCode, CliError> {
    reject_svg(a.out)?;
    let d = load_diagram(&a.input, a.format)?;
    let hidden = hidden_particles(&d);
    match a.out {
        OutFmt::Json => {
            let doc: Vec<serde_json::Value> = hidden
                .iter()
                .map(|h| {
                    serde_json::json!({
                        "code": h.code.to_string(),
                        "tuple": fmt_tuple(&h.code),
                        "kind": h.kind.name(),
                        "provenance": h.provenance,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        _ => {
            if hidden.is_empty() {
                println!("no hidden particles");
            } else {
                println!("{} hidden particle(s):", hidden.len());
                let rows: Vec<Vec<String>> = hidden
                    .iter()
                    .map(|h| {
                        vec![
                            h.code.to_string(),
                            fmt_tuple(&h.code),
                            h.kind.name().to_string(),
                            h.provenance.clone(),
                        ]
                    })
                    .collect();
                print_table(&["code", "tuple", "kind", "provenance"], &rows);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
