//! Command-line front end. [`run_cli`] takes its arguments and output
//! streams explicitly so it can be driven from tests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pulseforge::harness::{
    generate, oracle_expected_leader, seeded_ids, sweep, verify_exploration, verify_outcome,
    Family, GeneratorSpec, SweepConfig, VerifyReport,
};
use pulseforge::protocol::{compile_even_rules, compile_general_rules, MatchMode};
use pulseforge::simulator::{
    explore_all_schedules, run, write_trace, Algorithm, DirectedEdge, ExploreCaps, NetworkState,
    RunConfig, Scheduler,
};
use pulseforge::topology::{
    decode_parens, encode_parens, enumerate_subtrees, is_edge_symmetric, layer_decomposition,
    parse_edge_list, TreeTopology,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pulseforge",
    version,
    about = "Content-oblivious leader election on trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one execution and print its outcome as JSON.
    Run(RunArgs),
    /// Print the compiled rule set.
    Rules(RulesArgs),
    /// Print the layer decomposition and subtree enumeration.
    Layers(TreeArgs),
    /// Report whether the tree is symmetric about an edge.
    Symmetry(TreeArgs),
    /// Explore every delivery order of a small instance.
    Mc(McArgs),
    /// Run a batch of instances and emit one row per run.
    Sweep(SweepArgs),
    /// Print the balanced-parentheses encoding of a tree.
    Encode(EncodeArgs),
    /// Turn a balanced-parentheses string back into an edge list.
    Decode(DecodeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgArg {
    Even,
    General,
    Stabilizing,
}

impl From<AlgArg> for Algorithm {
    fn from(a: AlgArg) -> Self {
        match a {
            AlgArg::Even => Algorithm::EvenDiameter,
            AlgArg::General => Algorithm::GeneralTree,
            AlgArg::Stabilizing => Algorithm::Stabilizing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Random,
    RoundRobin,
}

#[derive(Debug, Args)]
struct TreeArgs {
    /// Edge-list file, or a builtin: pathN, starN, binaryR, c5.
    #[arg(long)]
    tree: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    tree: TreeArgs,
    #[arg(long, value_enum)]
    alg: AlgArg,
    #[arg(long, env = "PULSEFORGE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Comma-separated IDs for the stabilizing algorithm; defaults to a
    /// seeded permutation of 1..n.
    #[arg(long, value_delimiter = ',')]
    ids: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value = "random")]
    schedule: ScheduleArg,
    /// File of `from to` lines delivered first, in order.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Write one JSON line per delivery here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RulesArgs {
    #[command(flatten)]
    tree: TreeArgs,
    #[arg(long, value_enum)]
    alg: AlgArg,
    /// Require trigger counts to match exactly instead of at least.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct McArgs {
    #[command(flatten)]
    tree: TreeArgs,
    #[arg(long, value_enum)]
    alg: AlgArg,
    #[arg(long, value_delimiter = ',')]
    ids: Option<Vec<u32>>,
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// path, star, complete-binary, random-tree or random-asymmetric.
    #[arg(long = "gen")]
    generator: String,
    /// Radius range for complete-binary, e.g. `1..3` or `2`.
    #[arg(long, conflicts_with = "n")]
    radius: Option<String>,
    /// Vertex-count range for the other generators, e.g. `4..12`.
    #[arg(long)]
    n: Option<String>,
    #[arg(long, value_enum)]
    alg: AlgArg,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// First seed; instance seeds count up from here.
    #[arg(long, env = "PULSEFORGE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Add a wall-time column (output is then no longer reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[command(flatten)]
    tree: TreeArgs,
    /// Root of the encoding; defaults to the layering root.
    #[arg(long)]
    root: Option<usize>,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    encoding: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Resolves a `--tree` argument to a topology.
pub fn load_tree(arg: &str) -> Result<TreeTopology> {
    let builtin = |name: &str| -> Option<GeneratorSpec> {
        let num = |prefix: &str| {
            name.strip_prefix(prefix)
                .and_then(|s| s.parse::<usize>().ok())
        };
        if let Some(n) = num("path") {
            Some(GeneratorSpec::Path { n })
        } else if let Some(n) = num("star") {
            Some(GeneratorSpec::Star { n })
        } else {
            num("binary").map(|radius| GeneratorSpec::CompleteBinary { radius })
        }
    };
    if matches!(arg, "c5" | "caterpillar5") {
        return Ok(parse_edge_list("1 2\n2 3\n3 4\n2 0")?);
    }
    if !Path::new(arg).exists() {
        if let Some(spec) = builtin(arg) {
            return Ok(generate(spec)?);
        }
    }
    let text = fs::read_to_string(arg).with_context(|| format!("cannot read tree file `{arg}`"))?;
    parse_edge_list(&text).with_context(|| format!("invalid edge list in `{arg}`"))
}

fn parse_range(text: &str) -> Result<Vec<usize>> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .with_context(|| format!("bad number `{s}` in range `{text}`"))
    };
    match text.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo > hi {
                bail!("empty range `{text}`");
            }
            Ok((lo..=hi).collect())
        }
        None => Ok(vec![parse(text)?]),
    }
}

fn read_script(path: &Path) -> Result<Vec<DirectedEdge>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read script `{}`", path.display()))?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut it = l.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok(DirectedEdge::new(a, b)),
                _ => Err(anyhow!("bad script line `{l}`")),
            }
        })
        .collect()
}

/// Writes `body` to `--out` if given, otherwise to `out`.
fn emit(out: &mut dyn Write, path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("cannot write `{}`", p.display())),
        None => out
            .write_all(body.as_bytes())
            .context("cannot write output"),
    }
}

fn report_failures(err: &mut dyn Write, report: &VerifyReport) {
    for c in report.failures() {
        let _ = writeln!(
            err,
            "check {} failed: expected {}, observed {}",
            c.name, c.expected, c.observed
        );
    }
}

fn cmd_run(a: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let tree = load_tree(&a.tree.tree)?;
    let algorithm = Algorithm::from(a.alg);
    let ids = match (algorithm, a.ids) {
        (Algorithm::Stabilizing, None) => Some(seeded_ids(tree.len(), a.seed)),
        (_, ids) => ids,
    };
    let state = NetworkState::new(tree.clone(), algorithm, ids)?;
    let mut scheduler = match (a.script, a.schedule) {
        (Some(path), _) => Scheduler::scripted(read_script(&path)?),
        (None, ScheduleArg::Random) => Scheduler::seeded(a.seed),
        (None, ScheduleArg::RoundRobin) => Scheduler::round_robin(),
    };
    let outcome = run(
        state,
        &mut scheduler,
        RunConfig {
            budget: a.budget.max(1),
            record_trace: a.trace.is_some(),
        },
    );
    if let Some(path) = &a.trace {
        let file =
            fs::File::create(path).with_context(|| format!("cannot write `{}`", path.display()))?;
        write_trace(std::io::BufWriter::new(file), &outcome.trace)?;
    }
    let body = serde_json::to_string_pretty(&outcome.to_json())? + "\n";
    emit(out, a.tree.out.as_deref(), &body)?;
    let report = verify_outcome(&outcome, &tree);
    report_failures(err, &report);
    Ok(report.passed())
}

fn cmd_rules(a: RulesArgs, out: &mut dyn Write) -> Result<bool> {
    let tree = load_tree(&a.tree.tree)?;
    let rules = match Algorithm::from(a.alg) {
        Algorithm::EvenDiameter => compile_even_rules(tree.diameter())?,
        Algorithm::GeneralTree => compile_general_rules(&tree)?,
        Algorithm::Stabilizing => bail!("the stabilizing algorithm has no compiled rules"),
    };
    let rules = if a.exact {
        rules.with_mode(MatchMode::Exact)
    } else {
        rules
    };
    let body = match a.tree.format {
        Format::Json => serde_json::to_string_pretty(&rules)? + "\n",
        _ => rules.to_string(),
    };
    emit(out, a.tree.out.as_deref(), &body)?;
    Ok(true)
}

fn cmd_layers(a: TreeArgs, out: &mut dyn Write) -> Result<bool> {
    let tree = load_tree(&a.tree)?;
    let layering = layer_decomposition(&tree);
    let index = enumerate_subtrees(&tree, &layering);
    let body = if a.format == Format::Json {
        serde_json::to_string_pretty(&json!({ "layering": layering, "subtrees": index }))? + "\n"
    } else {
        let mut s = format!(
            "n={} diameter={} radius={} root={} co_root={} k={}{}\n",
            tree.len(),
            layering.diameter(),
            layering.radius(),
            layering.root(),
            layering
                .co_root()
                .map_or("-".to_string(), |v| v.to_string()),
            index.k(),
            if layering.root_is_arbitrary() {
                " (root chosen by index: symmetric)"
            } else {
                ""
            },
        );
        for (i, layer) in layering.layers().iter().enumerate() {
            let names: Vec<String> = layer.iter().map(|v| v.to_string()).collect();
            s += &format!("layer {i}: {}\n", names.join(" "));
        }
        s += "vertex layer parent tau lambda_tau\n";
        for v in tree.vertices() {
            s += &format!(
                "{v} {} {} {} {}\n",
                layering.layer_of(v),
                layering
                    .parent_of(v)
                    .map_or("-".to_string(), |p| p.to_string()),
                index.tau(v),
                index.lambda_tau(v),
            );
        }
        s
    };
    emit(out, a.out.as_deref(), &body)?;
    Ok(true)
}

fn cmd_symmetry(a: TreeArgs, out: &mut dyn Write) -> Result<bool> {
    let tree = load_tree(&a.tree)?;
    let report = is_edge_symmetric(&tree);
    let body = match (a.format, report.witness_edge) {
        (Format::Json, _) => serde_json::to_string_pretty(&report)? + "\n",
        (_, Some((u, v))) => format!("symmetric about edge {u} {v}\n"),
        (_, None) => "asymmetric\n".to_string(),
    };
    emit(out, a.out.as_deref(), &body)?;
    Ok(true)
}

fn cmd_mc(a: McArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let tree = load_tree(&a.tree.tree)?;
    let algorithm = Algorithm::from(a.alg);
    let ids = match (algorithm, a.ids) {
        (Algorithm::Stabilizing, None) => Some((1..=tree.len() as u32).collect()),
        (_, ids) => ids,
    };
    let report = explore_all_schedules(
        tree.clone(),
        algorithm,
        ids.clone(),
        ExploreCaps {
            max_states: a.max_states,
        },
    )?;
    let verdict = verify_exploration(&report, &tree, algorithm, ids.as_deref());
    let body = if a.tree.format == Format::Json {
        serde_json::to_string_pretty(&json!({ "report": report, "checks": verdict.checks }))? + "\n"
    } else {
        let count = report.classes.len();
        let mut s = String::new();
        for (class, states) in &report.classes {
            let leaders: Vec<String> = class.leaders.iter().map(|v| v.to_string()).collect();
            let line = format!(
                "leader={}, pulses={}, deliveries_to_halted={}",
                leaders.join("+"),
                class.total_pulses,
                class.deliveries_to_halted
            );
            if count == 1 {
                s += &format!("1 terminal class, {line}\n");
            } else {
                s += &format!("class ({states} terminal states): {line}\n");
            }
        }
        if count != 1 {
            s = format!("{count} terminal classes\n") + &s;
        }
        s += &format!(
            "states={} transitions={} terminal_states={}\n",
            report.states, report.transitions, report.terminal_states
        );
        s += &format!(
            "violations: direction={} port_star={} output={} quota={}\n",
            report.direction_violations,
            report.port_star_rewrites,
            report.output_flips,
            report.quota_overruns
        );
        if algorithm != Algorithm::Stabilizing {
            if let Ok(l) = oracle_expected_leader(&tree) {
                s += &format!("expected leader={l}\n");
            }
        }
        s += if verdict.passed() {
            "checks: pass\n"
        } else {
            "checks: FAIL\n"
        };
        s
    };
    emit(out, a.tree.out.as_deref(), &body)?;
    report_failures(err, &verdict);
    Ok(verdict.passed())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let family: Family = a.generator.parse().map_err(|e: String| anyhow!(e))?;
    let sizes = match (family, &a.radius, &a.n) {
        (Family::CompleteBinary, Some(r), None) => parse_range(r)?,
        (Family::CompleteBinary, None, _) => bail!("complete-binary sweeps take --radius"),
        (_, None, Some(n)) => parse_range(n)?,
        (_, _, None) => bail!("this generator takes --n"),
        (_, Some(_), Some(_)) => bail!("give either --radius or --n"),
    };
    let config = SweepConfig {
        family,
        sizes,
        algorithm: a.alg.into(),
        seeds: a.seeds,
        base_seed: a.seed,
        budget: a.budget.max(1),
        timing: a.timing,
    };
    let report = sweep(&config);
    let body = match a.format {
        Format::Json => serde_json::to_string_pretty(&report.rows)? + "\n",
        _ => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf, a.timing)?;
            String::from_utf8(buf)?
        }
    };
    emit(out, a.out.as_deref(), &body)?;
    if !report.passed() {
        writeln!(
            err,
            "{} of {} rows failed",
            report.failed_rows(),
            report.rows.len()
        )?;
    }
    Ok(report.passed())
}

fn cmd_encode(a: EncodeArgs, out: &mut dyn Write) -> Result<bool> {
    let tree = load_tree(&a.tree.tree)?;
    let root = match a.root {
        Some(r) if r < tree.len() => r,
        Some(r) => bail!("root {r} is not a vertex of a {}-vertex tree", tree.len()),
        None => layer_decomposition(&tree).root(),
    };
    emit(
        out,
        a.tree.out.as_deref(),
        &(encode_parens(&tree, root) + "\n"),
    )?;
    Ok(true)
}

fn cmd_decode(a: DecodeArgs, out: &mut dyn Write) -> Result<bool> {
    let tree = decode_parens(a.encoding.trim())?;
    emit(out, a.out.as_deref(), &tree.to_edge_list())?;
    Ok(true)
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// process exit code: 0 when every check passed, 1 when a check failed,
/// 2 for usage or input errors.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Rules(a) => cmd_rules(a, out),
        Command::Layers(a) => cmd_layers(a, out),
        Command::Symmetry(a) => cmd_symmetry(a, out),
        Command::Mc(a) => cmd_mc(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Encode(a) => cmd_encode(a, out),
        Command::Decode(a) => cmd_decode(a, out),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_range("1..=2").unwrap(), vec![1, 2]);
        assert_eq!(parse_range("7").unwrap(), vec![7]);
        assert!(parse_range("3..1").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn builtin_trees() {
        assert_eq!(load_tree("path3").unwrap().len(), 3);
        assert_eq!(load_tree("star4").unwrap().degree(0), 3);
        assert_eq!(load_tree("binary2").unwrap().len(), 7);
        assert_eq!(load_tree("c5").unwrap().diameter(), 3);
        assert!(load_tree("no-such-file.edges").is_err());
    }
}
