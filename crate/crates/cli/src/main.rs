use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use treecut::cutmatch::{check_sweep_cut, cut_player_step, sparsity_parameter, CutMatchingGame};
use treecut::flow::{fair_cut, verify_fair_cut};
use treecut::generators::{
    complete, diamond, diamond_adversarial_demands, dumbbell, erdos_renyi, grid, random_connected, random_pair_demands,
    tree_load_chooser,
};
use treecut::hierarchy::{
    certify_well_expanding, construct_hierarchy, default_gamma, quality_ratio, to_tree_sparsifier, ClusterStatus,
    TreeSparsifier,
};
use treecut::io::{parse_demands, parse_edge_list, parse_weights, write_demands, write_edge_list};
use treecut::rational::{int, rat, to_f64, Rational};
use treecut::{sparsest_cut_apx, GameConfig, Graph, HierarchyConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Hierarchical congestion approximators from fair cuts and a cut-matching game.
#[derive(Parser, Debug)]
#[command(name = "treecut", version)]
struct Cli {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Edgelist,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Diamond,
    Dumbbell,
    ErdosRenyi,
    Grid,
    Complete,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a graph as an edge list.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Diamond order.
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Vertex count (erdos-renyi, complete, random) or clique size (dumbbell).
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Edge probability for erdos-renyi.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        /// Bridges between the dumbbell cliques.
        #[arg(long, default_value_t = 1)]
        bridges: usize,
        #[arg(long, default_value_t = 4)]
        width: usize,
        #[arg(long, default_value_t = 4)]
        height: usize,
        /// Edges added to the random spanning tree (random).
        #[arg(long, default_value_t = 8)]
        extra: usize,
        /// Largest capacity (random).
        #[arg(long, default_value_t = 4)]
        max_cap: u64,
    },
    /// Build the hierarchy of a graph and write its tree.
    Build {
        /// Edge-list file.
        graph: PathBuf,
    },
    /// Compare tree predictions with optimal congestion for a set of demands.
    Eval {
        /// Edge-list file.
        graph: PathBuf,
        /// Tree JSON written by `build`.
        tree: PathBuf,
        /// Demand file, one balanced vector per line.
        #[arg(long, conflicts_with_all = ["random_pairs", "diamond_adversarial"])]
        demands: Option<PathBuf>,
        /// Sample this many random pair demands.
        #[arg(long, conflicts_with = "diamond_adversarial")]
        random_pairs: Option<usize>,
        /// Largest pair demand magnitude.
        #[arg(long, default_value_t = 8)]
        magnitude: i64,
        /// Adversarial demands on the diamond of this order (the graph must be that diamond).
        #[arg(long)]
        diamond_adversarial: Option<u32>,
        /// Also write the evaluated demands to this file.
        #[arg(long)]
        save_demands: Option<PathBuf>,
    },
    /// Check the well-expansion, fair-cut and sweep-cut properties on a small graph.
    Certify {
        /// Edge-list file.
        graph: PathBuf,
        /// Random fair-cut instances to check.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Run the sparsest-cut approximation and print one JSON object per round.
    GameTrace {
        /// Edge-list file.
        graph: PathBuf,
        /// Target sparsity, as `a/b` or an integer.
        #[arg(long, default_value = "1/4")]
        phi: String,
        /// Vertex weights (`v w` lines); defaults to degrees.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(String),
}

impl From<treecut::Error> for CliError {
    fn from(e: treecut::Error) -> Self {
        use treecut::Error::*;
        match e {
            Argument(_) | Refused(_) | Input { .. } => CliError::Input(e.to_string()),
            Consistency(_) | State(_) | Internal(_) => CliError::Internal(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: treecut::Result<T>) -> CliResult<T> {
    r.map_err(|e| match CliError::from(e) {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn read_graph(path: &Path) -> CliResult<Graph> {
    with_path(path, parse_edge_list(&read(path)?, None))
}

fn read_tree(path: &Path) -> CliResult<TreeSparsifier> {
    let t: TreeSparsifier =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: line {}: {e}", path.display(), e.line())))?;
    with_path(path, t.validate())?;
    Ok(t)
}

fn parse_rational(s: &str) -> CliResult<Rational> {
    let bad = || CliError::Input(format!("invalid rational {s:?}"));
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let (a, b): (i128, i128) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if b <= 0 {
        return Err(bad());
    }
    Ok(rat(a, b))
}

fn rational_json(r: &Rational) -> Value {
    json!({ "exact": r.to_string(), "value": to_f64(r) })
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string())),
    }
}

fn unsupported(cmd: &str, f: Format) -> CliError {
    CliError::Input(format!("{cmd} does not support --format {f:?}").to_lowercase())
}

fn generate(cli: &Cli, kind: Kind, args: &Command) -> CliResult<String> {
    let Command::Generate { k, n, p, bridges, width, height, extra, max_cap, .. } = *args else { unreachable!() };
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let g = match kind {
        Kind::Diamond => diamond(k)?.graph,
        Kind::Dumbbell => dumbbell(n, bridges)?,
        Kind::Grid => grid(width, height)?,
        Kind::Complete => complete(n)?,
        Kind::Random => random_connected(n, extra, max_cap, &mut rng)?,
        Kind::ErdosRenyi => {
            let mut attempt = 0;
            loop {
                let g = erdos_renyi(n, p, &mut rng)?;
                if g.is_connected() {
                    break g;
                }
                attempt += 1;
                if attempt == 1000 {
                    return Err(CliError::Input(format!("no connected G({n}, {p}) in 1000 attempts")));
                }
            }
        }
    };
    match cli.format.unwrap_or(Format::Edgelist) {
        Format::Edgelist => Ok(write_edge_list(&g)),
        Format::Json => {
            let edges: Vec<_> = g.edges().iter().map(|e| json!([e.u, e.v, e.cap])).collect();
            Ok(format!("{}\n", json!({ "n": g.n(), "edges": edges })))
        }
        f => Err(unsupported("generate", f)),
    }
}

fn build(cli: &Cli, path: &Path) -> CliResult<String> {
    let g = read_graph(path)?;
    let start = Instant::now();
    let h = with_path(path, construct_hierarchy(&g, &HierarchyConfig { seed: cli.seed, ..HierarchyConfig::default() }))?;
    let t = to_tree_sparsifier(&h, &g)?;
    let seconds = start.elapsed().as_secs_f64();
    let levels: Vec<Value> = h
        .levels()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
            for c in p.clusters() {
                *hist.entry(c.len()).or_default() += 1;
            }
            json!({ "level": i, "clusters": p.len(), "sizes": hist })
        })
        .collect();
    let stats = json!({
        "n": g.n(),
        "m": g.m(),
        "height": h.height(),
        "height_bound": h.height_bound(),
        "tree_nodes": t.nodes.len(),
        "levels": levels,
        "build": h.stats,
        "seconds": seconds,
    });
    eprintln!("{stats}");
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&t).map(|s| s + "\n").map_err(|e| CliError::Internal(e.to_string())),
        Format::Dot => Ok(t.to_dot()),
        f => Err(unsupported("build", f)),
    }
}

#[allow(clippy::too_many_arguments)]
fn eval(
    cli: &Cli,
    graph: &Path,
    tree: &Path,
    demands: Option<&Path>,
    random_pairs: Option<usize>,
    magnitude: i64,
    diamond_k: Option<u32>,
    save: Option<&Path>,
) -> CliResult<String> {
    let g = read_graph(graph)?;
    let t = read_tree(tree)?;
    if t.n != g.n() {
        return Err(CliError::Input(format!("tree covers {} vertices but the graph has {}", t.n, g.n())));
    }
    let ds = if let Some(p) = demands {
        with_path(p, parse_demands(&read(p)?, g.n()))?
    } else if let Some(k) = diamond_k {
        let d = diamond(k)?;
        if d.graph != g {
            return Err(CliError::Input(format!("the graph is not the diamond of order {k}")));
        }
        diamond_adversarial_demands(&d, tree_load_chooser(&d, &t))?
    } else {
        if magnitude < 1 {
            return Err(CliError::Input("--magnitude must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
        random_pair_demands(g.n(), random_pairs.unwrap_or(20), magnitude, &mut rng)
    };
    if let Some(p) = save {
        fs::write(p, write_demands(&ds)).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    }
    let report = quality_ratio(&g, &t, &ds)?;
    match cli.format {
        None => {
            let mut s = String::from("demand\tpredict\topt\tratio\n");
            for (i, row) in report.rows.iter().enumerate() {
                s += &format!("{i}\t{}\t{}\t{:.6}\n", row.predict, row.opt, to_f64(&row.ratio));
            }
            s += &format!("max\t\t\t{:.6}\n", to_f64(&report.max_ratio));
            Ok(s)
        }
        Some(Format::Json) => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| json!({ "predict": rational_json(&r.predict), "opt": rational_json(&r.opt), "ratio": rational_json(&r.ratio) }))
                .collect();
            Ok(format!("{}\n", json!({ "rows": rows, "max_ratio": rational_json(&report.max_ratio) })))
        }
        Some(f) => Err(unsupported("eval", f)),
    }
}

fn certify(cli: &Cli, path: &Path, trials: usize) -> CliResult<String> {
    let g = read_graph(path)?;
    let n = g.n();
    let h = with_path(path, construct_hierarchy(&g, &HierarchyConfig { seed: cli.seed, ..HierarchyConfig::default() }))?;
    let gamma = default_gamma(&g);
    let report = certify_well_expanding(&g, &h, &gamma)?;
    let clusters: Vec<Value> = report
        .clusters
        .iter()
        .map(|c| {
            json!({
                "level": c.level,
                "size": c.cluster.len(),
                "quality": rational_json(&c.quality),
                "status": c.status,
                "witness": c.worst.as_ref().map(|(s, q)| json!({ "set": s, "sparsity": rational_json(q) })),
            })
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut fair_failures = Vec::new();
    for trial in 0..trials {
        let s: Vec<Rational> = (0..n).map(|_| int(rng.random_range(0..=8))).collect();
        let t: Vec<Rational> = (0..n).map(|_| int(rng.random_range(0..=8))).collect();
        for alpha in [int(1), rat(3, 2)] {
            let fc = fair_cut(&g, &s, &t, &alpha)?;
            let r = verify_fair_cut(&g, &s, &t, &alpha, &fc.u, &fc.f);
            if !r.ok {
                fair_failures.push(json!({ "trial": trial, "alpha": alpha.to_string(), "violated": r.violated }));
            }
        }
    }

    let pi = g.degrees();
    let c = sparsity_parameter(&rat(1, 4))?;
    let mut game = CutMatchingGame::new(&g, &pi, c, GameConfig { seed: cli.seed, ..GameConfig::default() })?;
    let mut sweep_rounds = 0;
    let mut sweep_failures = Vec::new();
    while !game.is_finished() {
        let (u, cut) = cut_player_step::<f64, _>(game.matchings(), game.active(), game.delta(), &mut rng)?;
        let units: Vec<usize> = (0..game.k()).filter(|&i| game.active()[i]).collect();
        let bad = check_sweep_cut(&units, &u, &cut);
        if !bad.is_empty() {
            sweep_failures.push(json!({ "round": sweep_rounds, "violated": bad }));
        }
        sweep_rounds += 1;
        game.step()?;
    }

    let pass = report.all_pass() && fair_failures.is_empty() && sweep_failures.is_empty();
    let value = json!({
        "pass": pass,
        "gamma": rational_json(&gamma),
        "well_expanding": { "pass": report.all_pass(), "skipped": report.skipped(), "clusters": clusters },
        "fair_cut": { "instances": 2 * trials, "failures": fair_failures },
        "sweep_cut": { "rounds": sweep_rounds, "failures": sweep_failures },
    });
    match cli.format {
        Some(Format::Json) => Ok(format!("{value:#}\n")),
        None => {
            let failed = report.clusters.iter().filter(|c| c.status == ClusterStatus::Fail).count();
            Ok(format!(
                "well-expanding: {} clusters, {failed} failed, {} skipped (gamma {})\nfair cut: {} instances, {} failed\nsweep cut: {sweep_rounds} rounds, {} failed\noverall: {}\n",
                report.clusters.len(),
                report.skipped(),
                gamma,
                2 * trials,
                value["fair_cut"]["failures"].as_array().map_or(0, Vec::len),
                value["sweep_cut"]["failures"].as_array().map_or(0, Vec::len),
                if pass { "PASS" } else { "FAIL" },
            ))
        }
        Some(f) => Err(unsupported("certify", f)),
    }
}

fn game_trace(cli: &Cli, path: &Path, phi: &str, weights: Option<&Path>) -> CliResult<String> {
    if let Some(f) = cli.format.filter(|&f| f != Format::Json) {
        return Err(unsupported("game-trace", f));
    }
    let g = read_graph(path)?;
    let pi = match weights {
        Some(w) => with_path(w, parse_weights(&read(w)?, g.n()))?,
        None => g.degrees(),
    };
    let phi = parse_rational(phi)?;
    let out = sparsest_cut_apx(&g, &pi, &phi, GameConfig { seed: cli.seed, ..GameConfig::default() })?;
    let mut s = String::new();
    for tr in &out.trace {
        s += &serde_json::to_string(tr).map_err(|e| CliError::Internal(e.to_string()))?;
        s.push('\n');
    }
    let summary = json!({
        "cut": out.cut,
        "rounds": out.rounds,
        "balanced_stop": out.balanced_stop,
        "final_active": out.final_active,
        "k": out.k,
        "c": out.c,
    });
    s += &format!("{summary}\n");
    Ok(s)
}

fn run(cli: &Cli) -> CliResult<()> {
    let text = match &cli.command {
        cmd @ Command::Generate { kind, .. } => generate(cli, *kind, cmd)?,
        Command::Build { graph } => build(cli, graph)?,
        Command::Eval { graph, tree, demands, random_pairs, magnitude, diamond_adversarial, save_demands } => eval(
            cli,
            graph,
            tree,
            demands.as_deref(),
            *random_pairs,
            *magnitude,
            *diamond_adversarial,
            save_demands.as_deref(),
        )?,
        Command::Certify { graph, trials } => certify(cli, graph, *trials)?,
        Command::GameTrace { graph, phi, weights } => game_trace(cli, graph, phi, weights.as_deref())?,
    };
    emit(&cli.out, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
