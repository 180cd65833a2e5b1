//! The `wpc` command-line front end. [`run_cli`] takes its streams as
//! arguments so the whole surface can be driven from tests.

use std::fs;
use std::io::{Read, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::generators::{
    gen_chordal, gen_chordal_extension, gen_dp_instance, gen_gnp, gen_split, gen_split_compact, gen_wpc,
    plant_obstruction, GenParams, TreeShape, PRNG_NAME,
};
use crate::graph::{parse_graph, sniff_format, write_edge_list, Graph, GraphFormat};
use crate::kernel::{kernelize_dp, kernelize_split, kernelize_split_compact, write_trace, KernelResult, SplitInstance, Verdict};
use crate::obstructions::{
    brute_force_obstruction_search, build_obstruction, parse_certificate, verify_obstruction_certificate,
    write_certificate, ObstructionCertificate, ObstructionKind,
};
use crate::oracle::{brute_force_disjoint_paths, brute_force_is_wpc, OracleBudget, PathsVerdict, WpcVerdict};
use crate::partition::{parse_forest, validate_partition_forest, write_forest, ForestDoc, PartitionForest};
use crate::paths::{
    parse_instance, solve, validate_solution, write_answer, write_instance, Answer, DpInstance, PathsError, Solution,
    Terminals, Variant,
};
use crate::recognizer::{recognize, verify_certificate, Certificate};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    /// Positive answer or plain success.
    Positive,
    /// NotWpc, NO, TrivialNo, or an invalid certificate.
    Negative,
    /// Bad arguments or unreadable input.
    Usage,
    /// A self-check failed; this is a bug.
    Internal,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        match self {
            ExitCode::Positive => 0,
            ExitCode::Negative => 1,
            ExitCode::Usage => 2,
            ExitCode::Internal => 3,
        }
    }

    fn from_bool(yes: bool) -> Self {
        if yes {
            ExitCode::Positive
        } else {
            ExitCode::Negative
        }
    }
}

/// A failed self-check: reported with exit code 3.
#[derive(Debug, thiserror::Error)]
#[error("internal check failed: {0}")]
struct InternalFailure(String);

#[derive(Parser, Debug)]
#[command(name = "wpc", version, about = "Well-partitioned chordal graphs: certifying recognition and disjoint paths")]
struct Cli {
    /// Emit one JSON document instead of the text formats.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide membership; prints a partition forest or an obstruction.
    Recognize {
        /// Graph file (edge list or graph6); `-` reads stdin.
        graph: String,
        /// Also write the certificate to this file.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Check a forest or obstruction certificate against a graph.
    CheckCert {
        graph: String,
        /// Certificate file (text or JSON); `-` reads stdin.
        cert: String,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Solve a disjoint-paths instance.
    Solve {
        /// Overrides the instance's `variant` line.
        #[arg(long)]
        variant: Option<String>,
        instance: String,
        /// Partition forest to use instead of recognizing the graph.
        #[arg(long)]
        forest: Option<PathBuf>,
    },
    /// Reduce a DP/TDP instance (or any pair instance on a split graph).
    Kernelize {
        instance: String,
        /// Write the reduction trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Use the split-graph kernel; implied for SRDP and SRTDP.
        #[arg(long)]
        split: bool,
        #[arg(long)]
        forest: Option<PathBuf>,
        /// Write the kernel's partition forest to this file.
        #[arg(long)]
        forest_out: Option<PathBuf>,
    },
    /// Generate graphs and instances.
    Generate(GenerateArgs),
    /// Brute-force reference answers for small inputs.
    Oracle {
        #[command(subcommand)]
        sub: OracleCommand,
    },
    /// Time the pipelines on generated inputs; writes CSV.
    Bench(BenchArgs),
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Membership by exhaustive partition search (up to 9 vertices).
    Wpc { graph: String },
    /// Exhaustive obstruction search with patterns up to the graph's size.
    Obstruction { graph: String },
    /// Exhaustive disjoint-paths search (up to 14 vertices, k at most 3).
    Paths { instance: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Edgelist,
    Graph6,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    /// Well-partitioned chordal graph with its forest.
    Wpc,
    /// Split graph with its star forest.
    Split,
    /// Chordal graph from subtrees of a random tree.
    Chordal,
    /// Chordal graph grown by simplicial extension.
    ChordalExtension,
    /// Erdős–Rényi graph.
    Gnp,
    /// A catalog obstruction on its own.
    Obstruction,
    /// A generated WPC graph with an obstruction attached.
    Plant,
    /// Disjoint-paths instance on a generated WPC graph.
    Instance,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    bags: usize,
    #[arg(long, default_value_t = 1)]
    bag_min: usize,
    #[arg(long, default_value_t = 3)]
    bag_max: usize,
    #[arg(long, default_value_t = 0.5)]
    boundary_density: f64,
    /// path, star or random.
    #[arg(long, default_value = "random")]
    shape: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    domain_density: f64,
    #[arg(long, default_value = "dp")]
    variant: String,
    #[arg(long, default_value_t = 2)]
    max_set_size: usize,
    /// Vertex count for chordal and gnp graphs.
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Split center size.
    #[arg(long, default_value_t = 5)]
    center: usize,
    /// Split leaf count.
    #[arg(long, default_value_t = 10)]
    leaves: usize,
    /// Edge probability (gnp, split) or keep probability (chordal-extension).
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 12)]
    tree_size: usize,
    #[arg(long, default_value_t = 4)]
    max_subtree: usize,
    /// Obstruction kind such as O1, W-1-2 or HOLE-5.
    #[arg(long, default_value = "O1")]
    obstruction: String,
    /// Write the partition forest here, when the kind has one.
    #[arg(long)]
    forest_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Recognize,
    Srdp,
    Kernel,
    SplitKernel,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Recognize => "recognize",
            Suite::Srdp => "srdp",
            Suite::Kernel => "kernel",
            Suite::SplitKernel => "split-kernel",
        }
    }
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Target vertex counts (center sizes for split-kernel).
    #[arg(long, value_delimiter = ',', default_value = "10000,20000,40000,80000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Timed runs per size; the median is reported.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Parses `argv` (program name first), runs one command and reports its
/// exit status. Panics are caught and reported as internal failures.
pub fn run_cli<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.use_stderr();
            let _ = if shown {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return if shown { ExitCode::Usage } else { ExitCode::Positive };
        }
    };
    configure_threads();
    let outcome = catch_unwind(AssertUnwindSafe(|| dispatch(&cli, stdin, stdout, stderr)));
    match outcome {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            if e.downcast_ref::<InternalFailure>().is_some() {
                let _ = writeln!(stderr, "error: {e:#}\nplease report this with the input that triggered it");
                ExitCode::Internal
            } else {
                let _ = writeln!(stderr, "error: {e:#}");
                ExitCode::Usage
            }
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            let _ = writeln!(stderr, "internal error: {msg}\nplease report this with the input that triggered it");
            ExitCode::Internal
        }
    }
}

/// `WPC_THREADS` caps the worker pool; unset or 0 leaves the default.
fn configure_threads() {
    let Ok(raw) = std::env::var("WPC_THREADS") else { return };
    if let Ok(n) = raw.trim().parse::<usize>() {
        if n > 0 {
            // A pool may already exist when the CLI is driven from tests.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<ExitCode> {
    let mut io = Io { stdin, json: cli.json };
    match &cli.command {
        Command::Recognize { graph, cert, format } => cmd_recognize(&mut io, stdout, graph, cert.as_deref(), *format),
        Command::CheckCert { graph, cert, format } => cmd_check_cert(&mut io, stdout, graph, cert, *format),
        Command::Solve {
            variant,
            instance,
            forest,
        } => cmd_solve(&mut io, stdout, variant.as_deref(), instance, forest.as_deref()),
        Command::Kernelize {
            instance,
            trace,
            split,
            forest,
            forest_out,
        } => cmd_kernelize(
            &mut io,
            stdout,
            instance,
            trace.as_deref(),
            *split,
            forest.as_deref(),
            forest_out.as_deref(),
        ),
        Command::Generate(args) => cmd_generate(&io, stdout, args),
        Command::Oracle { sub } => cmd_oracle(&mut io, stdout, stderr, sub),
        Command::Bench(args) => cmd_bench(&io, stdout, args),
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    json: bool,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String> {
        if path == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        } else {
            fs::read_to_string(path).with_context(|| format!("reading {path}"))
        }
    }

    fn graph(&mut self, path: &str, format: Option<FormatArg>) -> Result<Graph> {
        let text = self.read(path)?;
        let format = match format {
            Some(FormatArg::Edgelist) => GraphFormat::EdgeList,
            Some(FormatArg::Graph6) => GraphFormat::Graph6,
            None => sniff_format(text.as_bytes()),
        };
        parse_graph(text.as_bytes(), format).with_context(|| format!("parsing graph {path}"))
    }

    fn instance(&mut self, path: &str, variant: Option<&str>, forest: Option<&Path>) -> Result<DpInstance> {
        let text = self.read(path)?;
        let inst = match variant {
            Some(name) => {
                let v = Variant::from_name(name).ok_or_else(|| anyhow!("unknown variant `{name}`"))?;
                // Blank the file's own variant line so line numbers stay put.
                let text: String = text
                    .lines()
                    .map(|l| if l.trim_start().starts_with("variant") { "" } else { l })
                    .collect::<Vec<_>>()
                    .join("\n");
                parse_instance(&text, Some(v))
            }
            None => parse_instance(&text, None),
        }
        .with_context(|| format!("parsing instance {path}"))?;
        match forest {
            Some(fp) => {
                let text = fs::read_to_string(fp).with_context(|| format!("reading {}", fp.display()))?;
                let f = parse_forest(&text, inst.graph.n()).with_context(|| format!("parsing forest {}", fp.display()))?;
                Ok(inst.with_forest(f))
            }
            None => Ok(inst),
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).context("writing output")
}

fn emit_json(out: &mut dyn Write, doc: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    emit(out, &text)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn certificate_doc(cert: &Certificate) -> Value {
    match cert {
        Certificate::Accepted(f) => json!({ "result": "accepted", "forest": f.to_doc() }),
        Certificate::Rejected(c) => json!({ "result": "rejected", "certificate": c }),
    }
}

fn certificate_text(cert: &Certificate) -> String {
    match cert {
        Certificate::Accepted(f) => write_forest(f),
        Certificate::Rejected(c) => write_certificate(c),
    }
}

fn cmd_recognize(io: &mut Io, out: &mut dyn Write, path: &str, cert_out: Option<&Path>, format: Option<FormatArg>) -> Result<ExitCode> {
    let g = io.graph(path, format)?;
    let cert = recognize(&g);
    if !verify_certificate(&g, &cert) {
        return Err(InternalFailure("the recognizer produced a certificate that does not verify".into()).into());
    }
    let text = certificate_text(&cert);
    if let Some(p) = cert_out {
        write_file(p, &text)?;
    }
    if io.json {
        emit_json(out, &certificate_doc(&cert))?;
    } else {
        emit(out, &text)?;
    }
    Ok(ExitCode::from_bool(cert.is_accepted()))
}

/// A certificate read back from text or JSON.
enum ParsedCert {
    Forest(PartitionForest),
    Obstruction(ObstructionCertificate),
}

fn parse_any_certificate(text: &str, n: usize) -> Result<ParsedCert> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: Value = serde_json::from_str(trimmed).context("parsing JSON certificate")?;
        if let Some(f) = doc.get("forest") {
            let f: ForestDoc = serde_json::from_value(f.clone()).context("reading forest document")?;
            return Ok(ParsedCert::Forest(PartitionForest::new(n, f.bags, f.links)));
        }
        if let Some(c) = doc.get("certificate") {
            return Ok(ParsedCert::Obstruction(serde_json::from_value(c.clone()).context("reading certificate document")?));
        }
        bail!("JSON certificate has neither `forest` nor `certificate`");
    }
    let first = trimmed
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && *l != "c" && !l.starts_with("c "))
        .unwrap_or("");
    if first.starts_with("f ") {
        Ok(ParsedCert::Forest(parse_forest(text, n)?))
    } else if first.starts_with("o ") {
        Ok(ParsedCert::Obstruction(parse_certificate(text)?))
    } else {
        bail!("unrecognized certificate: expected a partition forest or an obstruction")
    }
}

fn cmd_check_cert(io: &mut Io, out: &mut dyn Write, graph: &str, cert: &str, format: Option<FormatArg>) -> Result<ExitCode> {
    let g = io.graph(graph, format)?;
    let text = io.read(cert)?;
    let (kind, problem) = match parse_any_certificate(&text, g.n())? {
        ParsedCert::Forest(f) => ("forest", validate_partition_forest(&g, &f).map(|v| v.to_string())),
        ParsedCert::Obstruction(c) => (
            "obstruction",
            (!verify_obstruction_certificate(&g, &c)).then(|| format!("the vertices do not induce {}", c.kind)),
        ),
    };
    if io.json {
        emit_json(out, &json!({ "certificate": kind, "valid": problem.is_none(), "reason": problem }))?;
    } else {
        match &problem {
            None => emit(out, &format!("valid {kind}\n"))?,
            Some(why) => emit(out, &format!("invalid {kind}: {why}\n"))?,
        }
    }
    Ok(ExitCode::from_bool(problem.is_none()))
}

fn answer_doc(answer: &Answer) -> Value {
    match answer {
        Answer::No => json!({ "solution": "NO" }),
        Answer::Yes(Solution::Paths(p)) => json!({ "solution": "YES", "paths": p }),
        Answer::Yes(Solution::Sets(s)) => json!({ "solution": "YES", "sets": s }),
    }
}

fn instance_doc(inst: &DpInstance) -> Value {
    let edges: Vec<(usize, usize)> = inst.graph.edges().collect();
    let mut doc = json!({
        "variant": inst.variant.name(),
        "n": inst.graph.n(),
        "edges": edges,
        "k": inst.k(),
    });
    match &inst.terminals {
        Terminals::Pairs(p) => doc["pairs"] = json!(p),
        Terminals::Sets(s) => doc["sets"] = json!(s),
    }
    if !inst.variant.full_domains() {
        doc["domains"] = json!(inst.domains);
    }
    doc
}

fn cmd_solve(io: &mut Io, out: &mut dyn Write, variant: Option<&str>, path: &str, forest: Option<&Path>) -> Result<ExitCode> {
    let inst = io.instance(path, variant, forest)?;
    let answer = match solve(&inst) {
        Ok(a) => a,
        Err(PathsError::NotWpc(cert)) => {
            // A certifying tool never answers "no" bare.
            if io.json {
                emit_json(out, &json!({ "result": "rejected", "certificate": *cert }))?;
            } else {
                emit(out, &write_certificate(&cert))?;
            }
            return Ok(ExitCode::Negative);
        }
        Err(e) => return Err(e.into()),
    };
    if let Answer::Yes(sol) = &answer {
        validate_solution(&inst, sol).map_err(|e| InternalFailure(format!("the solver returned an invalid solution: {e}")))?;
    }
    if io.json {
        emit_json(out, &answer_doc(&answer))?;
    } else {
        emit(out, &write_answer(&answer))?;
    }
    Ok(ExitCode::from_bool(answer.is_yes()))
}

fn kernel_doc(res: &KernelResult) -> Value {
    let trace: Vec<Value> = res.trace.iter().map(|s| json!({ "name": s.name, "bags": s.bags })).collect();
    json!({
        "verdict": res.verdict.to_string(),
        "instance": instance_doc(&res.instance),
        "forest": res.instance.forest.as_ref().map(PartitionForest::to_doc),
        "trace": trace,
        "origin": res.origin,
    })
}

fn cmd_kernelize(
    io: &mut Io,
    out: &mut dyn Write,
    path: &str,
    trace: Option<&Path>,
    split: bool,
    forest: Option<&Path>,
    forest_out: Option<&Path>,
) -> Result<ExitCode> {
    let inst = io.instance(path, None, forest)?;
    let res = if split || matches!(inst.variant, Variant::Srdp | Variant::Srtdp) {
        kernelize_split(&inst)?
    } else {
        kernelize_dp(&inst)?
    };
    if let Some(p) = trace {
        write_file(p, &write_trace(&res))?;
    }
    if let (Some(p), Some(f)) = (forest_out, res.instance.forest.as_ref()) {
        write_file(p, &write_forest(f))?;
    }
    if io.json {
        emit_json(out, &kernel_doc(&res))?;
    } else {
        emit(out, &write_instance(&res.instance))?;
    }
    Ok(ExitCode::from_bool(res.verdict == Verdict::Reduced))
}

/// Accepts `O1`…`O4`, `W-s-t` and `HOLE-k` (any separator, any case).
pub fn parse_obstruction_kind(s: &str) -> Option<ObstructionKind> {
    let upper = s.to_ascii_uppercase();
    let head: String = upper.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    let nums: Vec<usize> = upper[head.len()..]
        .split(|c: char| !c.is_ascii_digit())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().ok())
        .collect::<Option<_>>()?;
    let kind = match (head.as_str(), nums.as_slice()) {
        ("O", [1]) => ObstructionKind::O1,
        ("O", [2]) => ObstructionKind::O2,
        ("O", [3]) => ObstructionKind::O3,
        ("O", [4]) => ObstructionKind::O4,
        ("W", [s, t]) => ObstructionKind::W {
            s: u8::try_from(*s).ok()?,
            t: *t,
        },
        ("HOLE" | "C", [k]) => ObstructionKind::Hole { k: *k },
        _ => return None,
    };
    kind.validate().ok()?;
    Some(kind)
}

fn gen_params(args: &GenerateArgs) -> Result<GenParams> {
    let params = GenParams {
        seed: args.seed,
        bag_count: args.bags,
        bag_size: (args.bag_min, args.bag_max),
        boundary_density: args.boundary_density,
        tree_shape: TreeShape::from_name(&args.shape).ok_or_else(|| anyhow!("unknown tree shape `{}`", args.shape))?,
        k: args.k,
        domain_density: args.domain_density,
        variant: Variant::from_name(&args.variant).ok_or_else(|| anyhow!("unknown variant `{}`", args.variant))?,
        max_set_size: args.max_set_size,
    };
    params.validate()?;
    Ok(params)
}

fn cmd_generate(io: &Io, out: &mut dyn Write, args: &GenerateArgs) -> Result<ExitCode> {
    let density_ok = (0.0..=1.0).contains(&args.density);
    if !density_ok {
        bail!("--density must lie in [0, 1]");
    }
    let kind_name = args.kind.to_possible_value().expect("no skipped variants").get_name().to_string();
    let mut meta = json!({ "kind": kind_name, "prng": PRNG_NAME, "seed": args.seed });
    let mut forest: Option<PartitionForest> = None;
    let mut instance: Option<DpInstance> = None;
    let graph = match args.kind {
        GenKind::Wpc => {
            let p = gen_params(args)?;
            meta["params"] = json!(p);
            let (g, f) = gen_wpc(&p)?;
            forest = Some(f);
            g
        }
        GenKind::Split => {
            meta["params"] = json!({ "center": args.center, "leaves": args.leaves, "density": args.density });
            let (g, f) = gen_split(args.seed, args.center, args.leaves, args.density)?;
            forest = Some(f);
            g
        }
        GenKind::Chordal => {
            meta["params"] = json!({ "n": args.n, "tree_size": args.tree_size, "max_subtree": args.max_subtree });
            if args.tree_size == 0 || args.max_subtree == 0 {
                bail!("--tree-size and --max-subtree must be positive");
            }
            gen_chordal(args.seed, args.n, args.tree_size, args.max_subtree)
        }
        GenKind::ChordalExtension => {
            meta["params"] = json!({ "n": args.n, "keep": args.density });
            gen_chordal_extension(args.seed, args.n, args.density)
        }
        GenKind::Gnp => {
            meta["params"] = json!({ "n": args.n, "p": args.density });
            gen_gnp(args.seed, args.n, args.density)
        }
        GenKind::Obstruction => {
            let kind = parse_obstruction_kind(&args.obstruction)
                .ok_or_else(|| anyhow!("unknown obstruction kind `{}`", args.obstruction))?;
            meta["params"] = json!({ "obstruction": kind.to_string() });
            build_obstruction(kind)?
        }
        GenKind::Plant => {
            let kind = parse_obstruction_kind(&args.obstruction)
                .ok_or_else(|| anyhow!("unknown obstruction kind `{}`", args.obstruction))?;
            let p = gen_params(args)?;
            let (base, _) = gen_wpc(&p)?;
            let (g, planted) = plant_obstruction(&base, kind, args.seed)?;
            meta["params"] = json!({ "base": p, "obstruction": kind.to_string() });
            meta["planted"] = json!(planted);
            g
        }
        GenKind::Instance => {
            let p = gen_params(args)?;
            meta["params"] = json!(p);
            let (g, f) = gen_wpc(&p)?;
            let inst = gen_dp_instance(&g, &f, &p)?;
            forest = Some(f);
            instance = Some(inst);
            g
        }
    };
    if let (Some(path), Some(f)) = (&args.forest_out, &forest) {
        write_file(path, &write_forest(f))?;
    }
    if io.json {
        let mut doc = json!({ "meta": meta });
        match &instance {
            Some(inst) => doc["instance"] = instance_doc(inst),
            None => {
                let edges: Vec<(usize, usize)> = graph.edges().collect();
                doc["graph"] = json!({ "n": graph.n(), "edges": edges });
            }
        }
        if let Some(f) = &forest {
            doc["forest"] = json!(f.to_doc());
        }
        emit_json(out, &doc)?;
    } else {
        let mut text = format!("c wpc generate {kind_name}\nc prng {PRNG_NAME} seed {}\n", args.seed);
        text.push_str(&format!("c params {}\n", meta["params"]));
        if let Some(planted) = meta.get("planted") {
            text.push_str(&format!("c planted {planted}\n"));
        }
        match &instance {
            Some(inst) => text.push_str(&write_instance(inst)),
            None => text.push_str(&write_edge_list(&graph)),
        }
        emit(out, &text)?;
    }
    Ok(ExitCode::Positive)
}

fn cmd_oracle(io: &mut Io, out: &mut dyn Write, stderr: &mut dyn Write, sub: &OracleCommand) -> Result<ExitCode> {
    match sub {
        OracleCommand::Wpc { graph } => {
            let g = io.graph(graph, None)?;
            match brute_force_is_wpc(&g, OracleBudget::wpc()) {
                WpcVerdict::Forest(f) => {
                    if io.json {
                        emit_json(out, &json!({ "result": "accepted", "forest": f.to_doc() }))?;
                    } else {
                        emit(out, &write_forest(&f))?;
                    }
                    Ok(ExitCode::Positive)
                }
                WpcVerdict::NotWpc => {
                    if io.json {
                        emit_json(out, &json!({ "result": "rejected" }))?;
                    } else {
                        emit(out, "not-wpc\n")?;
                    }
                    Ok(ExitCode::Negative)
                }
                WpcVerdict::BudgetExceeded => budget(stderr),
            }
        }
        OracleCommand::Obstruction { graph } => {
            let g = io.graph(graph, None)?;
            if g.n() > OracleBudget::wpc().max_n {
                return budget(stderr);
            }
            let found = brute_force_obstruction_search(&g, g.n());
            if io.json {
                emit_json(out, &json!({ "certificate": found }))?;
            } else {
                match &found {
                    Some(c) => emit(out, &write_certificate(c))?,
                    None => emit(out, "none\n")?,
                }
            }
            // Finding an obstruction is the negative membership answer.
            Ok(ExitCode::from_bool(found.is_none()))
        }
        OracleCommand::Paths { instance } => {
            let inst = io.instance(instance, None, None)?;
            match brute_force_disjoint_paths(&inst, OracleBudget::paths()) {
                PathsVerdict::BudgetExceeded => budget(stderr),
                verdict => {
                    let answer = verdict.as_answer().expect("decided");
                    if io.json {
                        emit_json(out, &answer_doc(&answer))?;
                    } else {
                        emit(out, &write_answer(&answer))?;
                    }
                    Ok(ExitCode::from_bool(answer.is_yes()))
                }
            }
        }
    }
}

fn budget(stderr: &mut dyn Write) -> Result<ExitCode> {
    writeln!(stderr, "error: input exceeds the oracle budget")?;
    Ok(ExitCode::Usage)
}

/// One CSV row of `bench`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BenchRow {
    pub suite: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub wall_ns: u128,
    pub result: String,
    pub kernel_vertices: Option<usize>,
}

pub const BENCH_HEADER: &str = "suite,n,m,k,wall_ns,result,kernel_vertices";

impl BenchRow {
    pub fn csv(&self) -> String {
        let kv = self.kernel_vertices.map(|v| v.to_string()).unwrap_or_default();
        format!("{},{},{},{},{},{},{}", self.suite, self.n, self.m, self.k, self.wall_ns, self.result, kv)
    }
}

fn median(mut xs: Vec<u128>) -> u128 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

/// Runs `f` `runs` times and returns the median time and the last result.
/// Each run gets a fresh input from `setup`, built and dropped off the
/// clock, so no run profits from caches filled by an earlier one.
fn timed<I, T>(runs: usize, mut setup: impl FnMut() -> I, mut f: impl FnMut(&I) -> Result<T>) -> Result<(u128, T)> {
    let mut times = Vec::with_capacity(runs);
    let mut last = None;
    for _ in 0..runs.max(1) {
        let input = setup();
        let start = Instant::now();
        let v = f(&input)?;
        times.push(start.elapsed().as_nanos());
        last = Some(v);
        drop(input);
    }
    Ok((median(times), last.expect("at least one run")))
}

/// WPC generator settings used by the timing suites for `n` vertices.
pub fn bench_params(seed: u64, n: usize, k: usize, variant: Variant) -> GenParams {
    GenParams {
        seed,
        bag_count: (n / 3).max(1),
        bag_size: (2, 4),
        boundary_density: 0.8,
        k,
        variant,
        ..GenParams::default()
    }
}

/// Runs one benchmark suite and returns its rows.
pub fn run_bench(suite: &str, sizes: &[usize], k: usize, runs: usize, seed: u64) -> Result<Vec<BenchRow>> {
    let suite = Suite::from_str(suite, true).map_err(|e| anyhow!("unknown suite: {e}"))?;
    bench_rows(suite, sizes, k, runs, seed)
}

fn bench_rows(suite: Suite, sizes: &[usize], k: usize, runs: usize, seed: u64) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        let row = match suite {
            Suite::Recognize => {
                let (g, _) = gen_wpc(&bench_params(seed, n, 0, Variant::Dp))?;
                let (ns, cert) = timed(runs, || (), |_| Ok(recognize(&g)))?;
                let result = if cert.is_accepted() { "accepted" } else { "rejected" };
                BenchRow {
                    suite: suite.name().into(),
                    n: g.n(),
                    m: g.m(),
                    k: 0,
                    wall_ns: ns,
                    result: result.into(),
                    kernel_vertices: None,
                }
            }
            Suite::Srdp => {
                let p = bench_params(seed, n, k, Variant::Srdp);
                let (g, f) = gen_wpc(&p)?;
                let inst = gen_dp_instance(&g, &f, &p)?.with_forest(f);
                let (ns, answer) = timed(runs, || inst.clone(), |i| Ok(solve(i)?))?;
                BenchRow {
                    suite: suite.name().into(),
                    n: g.n(),
                    m: g.m(),
                    k,
                    wall_ns: ns,
                    result: if answer.is_yes() { "YES" } else { "NO" }.into(),
                    kernel_vertices: None,
                }
            }
            Suite::Kernel => {
                let p = bench_params(seed, n, k, Variant::Dp);
                let (g, f) = gen_wpc(&p)?;
                let inst = gen_dp_instance(&g, &f, &p)?.with_forest(f);
                let (ns, res) = timed(runs, || inst.clone(), |i| Ok(kernelize_dp(i)?))?;
                BenchRow {
                    suite: suite.name().into(),
                    n: g.n(),
                    m: g.m(),
                    k,
                    wall_ns: ns,
                    result: res.verdict.to_string(),
                    kernel_vertices: Some(res.instance.graph.n()),
                }
            }
            Suite::SplitKernel => {
                let split = gen_split_compact(seed, n, 4 * k.max(1), 0.3)?;
                let total = split.n();
                let edges = n * (n - 1) / 2 + split.leaves.iter().map(Vec::len).sum::<usize>();
                let pairs = (0..k).map(|i| (n + 2 * i, n + 2 * i + 1)).collect();
                let inst = SplitInstance::new(split, Variant::Srtdp, pairs, None)?;
                let (ns, res) = timed(runs, || (), |_| Ok(kernelize_split_compact(&inst)))?;
                BenchRow {
                    suite: suite.name().into(),
                    n: total,
                    m: edges,
                    k,
                    wall_ns: ns,
                    result: res.verdict.to_string(),
                    kernel_vertices: Some(res.instance.graph.n()),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_bench(io: &Io, out: &mut dyn Write, args: &BenchArgs) -> Result<ExitCode> {
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        bail!("--sizes needs positive values");
    }
    let rows = bench_rows(args.suite, &args.sizes, args.k, args.runs, args.seed)?;
    if io.json {
        emit_json(out, &json!({ "columns": BENCH_HEADER.split(',').collect::<Vec<_>>(), "rows": rows }))?;
    } else {
        let mut text = String::from(BENCH_HEADER);
        text.push('\n');
        for r in &rows {
            text.push_str(&r.csv());
            text.push('\n');
        }
        emit(out, &text)?;
    }
    Ok(ExitCode::Positive)
}
