//! Command-line surface: graph generation, metrics, exact solving, parameter
//! probes, strategy matches, quasi-retraction verification, and trace replay.
//!
//! Every artifact embeds the run configuration; identical config + seed
//! yields byte-identical output. Exit codes: 0 success, 2 invalid input,
//! 3 resource limit, 4 strategy fault.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::engine::{play_match, replay, GameParams, Side, Trace};
use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph, Vertex, VertexSet};
use crate::metrics::Ratio;
use crate::solver::{cop_number_probe, decide_copwin_with, DEFAULT_STATE_BUDGET};
use crate::strategies::{parse_strategy, verify_quasi_retraction};

/// Environment variable overriding the default solver state budget.
pub const BUDGET_ENV: &str = "COPGAME_STATE_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "copgame", version, about = "Pursuit games on graphs with cop speed, reach, robber speed, and a protected ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a graph from a family descriptor, e.g. "theta_nm:n=2,m=5".
    Gen(GenArgs),
    /// Compute a structural metric of a graph.
    Metrics(MetricsArgs),
    /// Decide cop-win exactly for one parameter tuple.
    Solve(SolveArgs),
    /// Sweep parameter grids for the minimal winning cop count.
    Probe(ProbeArgs),
    /// Play two strategies against each other and record the trace.
    Match(MatchArgs),
    /// Find minimal (C, D) Lipschitz constants for a map pair.
    VerifyQr(VerifyQrArgs),
    /// Re-validate a recorded trace against the rules.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Family descriptor, e.g. "grid:80x80", "theta_nm:n=2,m=5", "tiling:p=7,q=3,layers=4".
    descriptor: String,
    /// Output path for the graph JSON (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write a DOT rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    /// Graph JSON file.
    #[arg(short, long)]
    graph: PathBuf,
    /// One of: slim, expansion, growth, distortion, lambda.
    #[arg(long)]
    kind: String,
    /// Per-triple geodesic budget (slim).
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Subset size cap (expansion).
    #[arg(long, default_value_t = 8)]
    size_cap: usize,
    /// Center vertex, a number or "center" (growth, lambda).
    #[arg(long, default_value = "center")]
    v: String,
    /// Maximum radius (growth).
    #[arg(long, default_value_t = 10)]
    r_max: u16,
    /// Comma-separated deleted vertices (distortion).
    #[arg(long)]
    delta_set: Option<String>,
    /// Expansion lower bound as NUM/DEN (lambda).
    #[arg(long, default_value = "1/1")]
    h: String,
    /// Maximum degree to assume (lambda).
    #[arg(long, default_value_t = 0)]
    d: usize,
    /// Cop reach ρ (lambda).
    #[arg(long, default_value_t = 0)]
    rho: u16,
    /// Cop count n (lambda).
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Output path (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Graph JSON file.
    #[arg(short, long)]
    graph: PathBuf,
    /// Game parameters "n=1,sigma=1,rho=0,psi=1,v=0,R=diam"; v accepts "center", R accepts "diam".
    #[arg(short, long)]
    params: String,
    /// Arena state budget (overrides the COPGAME_STATE_BUDGET environment variable).
    #[arg(long)]
    budget: Option<u64>,
    /// Use the symmetric-cop arena reduction.
    #[arg(long)]
    symmetric: bool,
    /// Include wall-clock milliseconds in the output.
    #[arg(long)]
    timings: bool,
    /// Output path (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// Graph JSON file.
    #[arg(short, long)]
    graph: PathBuf,
    /// Comma-separated cop speeds.
    #[arg(long, default_value = "1")]
    sigma: String,
    /// Comma-separated cop reaches.
    #[arg(long, default_value = "0")]
    rho: String,
    /// Comma-separated robber speeds.
    #[arg(long, default_value = "1")]
    psi: String,
    /// Comma-separated horizon radii; entries may be "diam".
    #[arg(long = "R", default_value = "diam")]
    big_r: String,
    /// Protected vertex, a number or "center".
    #[arg(long, default_value = "center")]
    v: String,
    /// Largest cop count to try.
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    /// Output path for the CSV (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MatchArgs {
    /// Graph JSON file.
    #[arg(short, long)]
    graph: PathBuf,
    /// Game parameters "n=1,sigma=1,rho=1,psi=64,v=center,R=32".
    #[arg(short, long)]
    params: String,
    /// Cops strategy spec, e.g. "greedy", "optimal", "transfer:qr=f.json,inner=greedy".
    #[arg(long)]
    cops: String,
    /// Robber strategy spec, e.g. "grid_robber", "random", "optimal".
    #[arg(long)]
    robber: String,
    /// Number of stages to play before adjudicating.
    #[arg(long, default_value_t = 1000)]
    horizon: usize,
    /// Seed for randomized strategies.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the JSONL trace (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyQrArgs {
    /// Γ graph JSON file (the larger graph).
    #[arg(long)]
    gamma: PathBuf,
    /// Δ graph JSON file (the retract).
    #[arg(long)]
    delta: PathBuf,
    /// Comma-separated f: Δ → Γ vertex map.
    #[arg(long)]
    f: String,
    /// Comma-separated g: Γ → Δ vertex map.
    #[arg(long)]
    g: String,
    /// Output path (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    /// Graph JSON file.
    #[arg(short, long)]
    graph: PathBuf,
    /// JSONL trace file as written by `match`.
    #[arg(long)]
    trace: PathBuf,
    /// Output path (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Parses argv and runs the requested command, returning the process exit
/// code. Usage errors (including unknown flags) print help text and map to 2.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Version/help requests are successes.
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Probe(a) => cmd_probe(a),
        Command::Match(a) => cmd_match(a),
        Command::VerifyQr(a) => cmd_verify_qr(a),
        Command::Replay(a) => cmd_replay(a),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &PathBuf) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    crate::io::graph_from_json(&text)
}

fn parse_vertex(spec: &str, g: &Graph, dm: &DistanceMatrix) -> Result<Vertex> {
    if spec == "center" {
        return Ok(g.center(dm));
    }
    let v: Vertex = spec
        .parse()
        .map_err(|_| Error::invalid(format!("vertex must be a number or \"center\", got {spec:?}")))?;
    if v >= g.vertex_count() {
        return Err(Error::invalid(format!("vertex {v} outside the graph")));
    }
    Ok(v)
}

fn parse_radius(spec: &str, g: &Graph, dm: &DistanceMatrix) -> Result<u16> {
    if spec == "diam" {
        return Ok(g.diameter(dm));
    }
    spec.parse()
        .map_err(|_| Error::invalid(format!("radius must be a number or \"diam\", got {spec:?}")))
}

fn parse_u16_list(spec: &str) -> Result<Vec<u16>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("expected a number, got {s:?}")))
        })
        .collect()
}

/// Parses "n=1,sigma=1,rho=0,psi=1,v=0,R=diam" with shorthand resolution.
pub fn parse_params(spec: &str, g: &Graph, dm: &DistanceMatrix) -> Result<GameParams> {
    let mut kv = std::collections::BTreeMap::new();
    for part in spec.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("expected key=value, got {part:?}")))?;
        kv.insert(k.trim(), v.trim());
    }
    let get = |key: &str| -> Result<&str> {
        kv.get(key)
            .copied()
            .ok_or_else(|| Error::invalid(format!("missing game parameter {key}")))
    };
    let int = |key: &str| -> Result<u16> {
        get(key)?
            .parse()
            .map_err(|_| Error::invalid(format!("parameter {key} is not a valid integer")))
    };
    let params = GameParams {
        n: get("n")?
            .parse()
            .map_err(|_| Error::invalid("parameter n is not a valid integer"))?,
        sigma: int("sigma")?,
        rho: int("rho")?,
        psi: int("psi")?,
        v: parse_vertex(get("v")?, g, dm)?,
        big_r: parse_radius(get("R")?, g, dm)?,
    };
    for key in kv.keys() {
        if !["n", "sigma", "rho", "psi", "v", "R"].contains(key) {
            return Err(Error::invalid(format!("unknown game parameter {key}")));
        }
    }
    params.validate(g)?;
    Ok(params)
}

fn state_budget(flag: Option<u64>) -> Result<u64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(text) => text
            .parse()
            .map_err(|_| Error::invalid(format!("{BUDGET_ENV} is not a valid integer"))),
        Err(_) => Ok(DEFAULT_STATE_BUDGET),
    }
}

fn params_json(p: &GameParams) -> serde_json::Value {
    json!({
        "n": p.n, "sigma": p.sigma, "rho": p.rho,
        "psi": p.psi, "v": p.v, "R": p.big_r,
    })
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_gen(a: GenArgs) -> Result<()> {
    let g = crate::constructions::generate(&a.descriptor)?;
    if let Some(dot) = &a.dot {
        std::fs::write(dot, crate::io::graph_to_dot(&g))
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", dot.display())))?;
    }
    emit(&a.output, &crate::io::graph_to_json(&g))
}

fn cmd_metrics(a: MetricsArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let config = json!({
        "command": "metrics", "kind": a.kind, "graph": a.graph.display().to_string(),
    });
    let text = match a.kind.as_str() {
        "slim" => {
            let dm = g.distance_matrix();
            let report = crate::metrics::slim_triangle_constant(&g, &dm, a.budget)?;
            let witness = report.witness.as_ref().map(|w| {
                json!({"corners": [w.corners.0, w.corners.1, w.corners.2], "sides": w.sides})
            });
            serde_json::to_string_pretty(&json!({
                "config": config, "delta": report.delta, "witness": witness,
            }))
            .unwrap()
                + "\n"
        }
        "expansion" => {
            let report = crate::metrics::expansion_profile(&g, a.size_cap)?;
            serde_json::to_string_pretty(&json!({
                "config": config,
                "min_ratio": {"num": report.min_ratio.num, "den": report.min_ratio.den},
                "witness_set": report.witness_set.to_vec(),
                "size_cap": report.size_cap,
            }))
            .unwrap()
                + "\n"
        }
        "growth" => {
            let dm = g.distance_matrix();
            let v = parse_vertex(&a.v, &g, &dm)?;
            let interior = g
                .annotation_set("interior")
                .unwrap_or_else(|| (0..g.vertex_count()).collect::<Vec<_>>().into_iter().fold(
                    VertexSet::new(g.vertex_count()),
                    |mut s, u| {
                        s.insert(u);
                        s
                    },
                ));
            let profile = crate::metrics::growth_profile(&g, &dm, v, a.r_max, &interior)?;
            let mut csv = format!(
                "# copgame growth csv v1 config={}\n",
                serde_json::to_string(&config).unwrap()
            );
            csv.push_str("radius,alpha,beta,certified\n");
            for (r, (&al, &be)) in profile.alpha.iter().zip(&profile.beta).enumerate() {
                let _ = writeln!(
                    csv,
                    "{r},{al},{be},{}",
                    (r as u16 <= profile.valid_radius) as u8
                );
            }
            csv
        }
        "distortion" => {
            let spec = a
                .delta_set
                .as_deref()
                .ok_or_else(|| Error::invalid("distortion requires --delta-set"))?;
            let mut set = VertexSet::new(g.vertex_count());
            for v in parse_u16_list(spec)? {
                set.insert(v as usize);
            }
            let report = crate::metrics::distortion(&g, &set)?;
            serde_json::to_string_pretty(&json!({
                "config": config,
                "max_ratio": {"num": report.max_ratio.num, "den": report.max_ratio.den},
                "witness": report.witness.map(|(x, y)| vec![x, y]),
                "components": report.components,
            }))
            .unwrap()
                + "\n"
        }
        "lambda" => {
            let dm = g.distance_matrix();
            let v = parse_vertex(&a.v, &g, &dm)?;
            let interior = g
                .annotation_set("interior")
                .ok_or_else(|| Error::invalid("lambda requires a patch with interior annotations"))?;
            let (num, den) = a
                .h
                .split_once('/')
                .ok_or_else(|| Error::invalid("expansion bound must be NUM/DEN"))?;
            let h = Ratio::new(
                num.parse().map_err(|_| Error::invalid("bad expansion numerator"))?,
                den.parse().map_err(|_| Error::invalid("bad expansion denominator"))?,
            );
            let d = if a.d == 0 {
                (0..g.vertex_count()).map(|u| g.degree(u)).max().unwrap_or(0)
            } else {
                a.d
            };
            let profile = crate::metrics::growth_profile(&g, &dm, v, a.r_max.max(64), &interior)?;
            let lambda = crate::metrics::safe_distance_lambda(&profile, h, d, a.rho, a.n)?;
            serde_json::to_string_pretty(&json!({
                "config": config,
                "h": {"num": h.num, "den": h.den}, "d": d, "rho": a.rho, "n": a.n,
                "lambda": lambda,
            }))
            .unwrap()
                + "\n"
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown metric {other:?}; expected slim, expansion, growth, distortion, or lambda"
            )))
        }
    };
    emit(&a.output, &text)
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let dm = g.distance_matrix();
    let params = parse_params(&a.params, &g, &dm)?;
    let budget = state_budget(a.budget)?;
    let started = std::time::Instant::now();
    let outcome = decide_copwin_with(&g, &dm, &params, budget, a.symmetric)?;
    let millis = started.elapsed().as_millis() as u64;
    let config = json!({
        "command": "solve", "graph": a.graph.display().to_string(),
        "params": params_json(&params), "budget": budget, "symmetric": a.symmetric,
    });
    let mut out = json!({
        "config": config,
        "copwin": outcome.copwin,
        "witness": outcome.witness,
        "states": outcome.arena.node_count(),
    });
    if a.timings {
        out["millis"] = json!(millis);
    }
    emit(&a.output, &(serde_json::to_string_pretty(&out).unwrap() + "\n"))
}

fn cmd_probe(a: ProbeArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let dm = g.distance_matrix();
    let v = parse_vertex(&a.v, &g, &dm)?;
    let sigma = parse_u16_list(&a.sigma)?;
    let rho = parse_u16_list(&a.rho)?;
    let psi = parse_u16_list(&a.psi)?;
    let big_r: Vec<u16> = a
        .big_r
        .split(',')
        .map(|s| parse_radius(s.trim(), &g, &dm))
        .collect::<Result<_>>()?;
    let config = json!({
        "command": "probe", "graph": a.graph.display().to_string(),
        "sigma": sigma, "rho": rho, "psi": psi, "R": big_r, "v": v, "n_max": a.n_max,
    });
    let rows = cop_number_probe(&g, &dm, &sigma, &rho, &psi, &big_r, v, a.n_max)?;
    let mut csv = format!(
        "# copgame probe csv v1 config={}\n",
        serde_json::to_string(&config).unwrap()
    );
    csv.push_str("sigma,rho,minimal_n\n");
    for row in rows {
        let _ = writeln!(
            csv,
            "{},{},{}",
            row.sigma,
            row.rho,
            row.minimal_n.map_or("none".into(), |n| n.to_string())
        );
    }
    emit(&a.output, &csv)
}

fn cmd_match(a: MatchArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let dm = g.distance_matrix();
    let params = parse_params(&a.params, &g, &dm)?;
    let mut cops = parse_strategy(&a.cops, Side::Cops, &g, &dm, &params, a.seed)?;
    let mut robber = parse_strategy(&a.robber, Side::Robber, &g, &dm, &params, a.seed.wrapping_add(1))?;
    let trace = play_match(&g, &dm, &params, cops.as_mut(), robber.as_mut(), a.horizon)?;
    let config = json!({
        "command": "match", "graph": a.graph.display().to_string(),
        "params": params_json(&params), "cops": a.cops, "robber": a.robber,
        "horizon": a.horizon, "seed": a.seed,
    });
    let mut text = serde_json::to_string(&json!({ "config": config })).unwrap();
    text.push('\n');
    text.push_str(&trace.to_jsonl());
    emit(&a.output, &text)
}

fn cmd_verify_qr(a: VerifyQrArgs) -> Result<()> {
    let gamma = load_graph(&a.gamma)?;
    let delta = load_graph(&a.delta)?;
    let f: Vec<Vertex> = parse_u16_list(&a.f)?.into_iter().map(|x| x as usize).collect();
    let g_map: Vec<Vertex> = parse_u16_list(&a.g)?.into_iter().map(|x| x as usize).collect();
    let qr = verify_quasi_retraction(&gamma, &delta, &f, &g_map)?;
    let config = json!({
        "command": "verify-qr",
        "gamma": a.gamma.display().to_string(), "delta": a.delta.display().to_string(),
    });
    let out = json!({"config": config, "C": qr.c, "D": qr.d});
    emit(&a.output, &(serde_json::to_string_pretty(&out).unwrap() + "\n"))
}

fn cmd_replay(a: ReplayArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let dm = g.distance_matrix();
    let text = std::fs::read_to_string(&a.trace)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", a.trace.display())))?;
    // Skip the config header line if present.
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with("{\"config\""))
        .collect::<Vec<_>>()
        .join("\n");
    let trace = Trace::from_jsonl(&body)?;
    let checked = replay(&g, &dm, &trace)?;
    let config = json!({
        "command": "replay", "graph": a.graph.display().to_string(),
        "trace": a.trace.display().to_string(),
    });
    let out = json!({
        "config": config, "ok": true, "verdict": checked.verdict,
        "states": checked.states.len(),
    });
    emit(&a.output, &(serde_json::to_string_pretty(&out).unwrap() + "\n"))
}
