//! The `clusteralg` command line.
//!
//! Mutation directions and subsets are 1-based on the command line;
//! variable ids are the atlas's 0-based interning ids. Exit codes: 0 on
//! success, 1 when a verification fails, 2 on bad input or an incomplete
//! atlas.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::atlas::{Caps, Cluster, PatternAtlas, VariableId};
use crate::compat::{compatibility_degree, d_vector, degree_matrix, verify_compat_theorem, verify_degree_properties};
use crate::error::Error;
use crate::grading::{find_g_pair, g_vector, g_vector_tsv, verify_g_pairs};
use crate::io::SeedFile;
use crate::seed::Seed;
use crate::unistructure::{all_certificates, laurent_witness, verify_unistructural, verify_witnesses};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    DegreeProperties,
    CompatTheorem,
    GPairs,
    Witnesses,
    Unistructural,
}

#[derive(Debug, Parser)]
#[command(name = "clusteralg", version, about = "Exact computations in cluster algebras of finite and infinite type")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed file (JSON); repeat for `verify unistructural`.
    #[arg(long, global = true)]
    pub seed: Vec<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_seeds: u64,

    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_depth: u64,

    /// Print exploration statistics to standard error.
    #[arg(short, long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutate the seed along a path of directions.
    Mutate {
        /// Directions `1..=n`, separated by spaces.
        #[arg(long, default_value = "")]
        path: String,
    },
    /// Explore the cluster pattern and summarize it.
    Explore,
    /// Laurent expansion of a variable in a cluster.
    Expand {
        /// Variable id, as listed by `explore --format json`.
        #[arg(long)]
        var: VariableId,
        /// Variable ids of the cluster; defaults to the root cluster.
        #[arg(long)]
        cluster: Option<String>,
    },
    /// g-vectors (principal coefficients only).
    Gvector {
        /// One variable; all of them when omitted.
        #[arg(long)]
        var: Option<VariableId>,
    },
    /// d-vector of a variable with respect to a cluster.
    Dvector {
        #[arg(long)]
        var: VariableId,
        /// Variable ids of the cluster; defaults to the root cluster.
        #[arg(long)]
        cluster: Option<String>,
    },
    /// Compatibility degree `d(ref, var)`, or the full degree table.
    Compat {
        #[arg(long)]
        var: Option<VariableId>,
        #[arg(long = "ref")]
        reference: Option<VariableId>,
    },
    /// The exchange graph.
    ExchangeGraph,
    /// Find a g-pair for a cluster along a subset of directions.
    Gpair {
        /// Variable ids of the cluster; defaults to the root cluster.
        #[arg(long)]
        cluster: Option<String>,
        /// Directions `1..=n`, separated by spaces.
        #[arg(long, default_value = "")]
        subset: String,
    },
    /// Laurent-monomial witness of `var` against `ref`.
    Witness {
        #[arg(long = "ref")]
        reference: VariableId,
        #[arg(long)]
        var: VariableId,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

/// What a command produced: output text and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: u8,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self { output, code: 0 }
    }

    fn verdict(output: String, passed: bool) -> Self {
        Self {
            output,
            code: if passed { 0 } else { 1 },
        }
    }
}

/// A failure carrying its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GPairNotFound { .. }
            | Error::WitnessNotFound { .. }
            | Error::TrichotomyViolated(_)
            | Error::InvariantViolated(_)
            | Error::PositivityViolated
            | Error::NotDivisible
            | Error::NotHomogeneous { .. } => 1,
            _ => 2,
        };
        Self {
            message: e.to_string(),
            code,
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
        code: 2,
    }
}

type CliResult = std::result::Result<Outcome, Failure>;

fn parse_list(s: &str) -> std::result::Result<Vec<usize>, Failure> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| usage(format!("not a nonnegative integer: {t:?}"))))
        .collect()
}

fn parse_directions(s: &str, n: usize) -> std::result::Result<Vec<usize>, Failure> {
    parse_list(s)?
        .into_iter()
        .map(|k| {
            if (1..=n).contains(&k) {
                Ok(k - 1)
            } else {
                Err(Failure::from(Error::DirectionOutOfRange { k, n }))
            }
        })
        .collect()
}

fn require_format(cli: &Cli, allowed: &[Format]) -> std::result::Result<(), Failure> {
    if allowed.contains(&cli.format) {
        Ok(())
    } else {
        Err(usage(format!("format {:?} is not available for this command", cli.format).to_lowercase()))
    }
}

struct Context<'a> {
    cli: &'a Cli,
    seed: Seed,
}

impl Context<'_> {
    fn caps(&self) -> Caps {
        Caps {
            max_seeds: usize::try_from(self.cli.max_seeds).unwrap_or(usize::MAX),
            max_depth: usize::try_from(self.cli.max_depth).unwrap_or(usize::MAX),
        }
    }

    fn explore(&self, seed: &Seed) -> std::result::Result<PatternAtlas, Failure> {
        let a = PatternAtlas::explore(seed, self.caps())?;
        if self.cli.verbose {
            eprintln!(
                "explored {} seeds, {} variables, {} clusters, complete: {}",
                a.seeds().len(),
                a.num_variables(),
                a.clusters().len(),
                a.is_complete()
            );
        }
        Ok(a)
    }

    fn atlas(&self) -> std::result::Result<PatternAtlas, Failure> {
        self.explore(&self.seed)
    }

    fn cluster(&self, a: &PatternAtlas, arg: &Option<String>) -> std::result::Result<Cluster, Failure> {
        match arg {
            None => Ok(a.root_cluster().clone()),
            Some(s) => {
                let ids = parse_list(s)?;
                let c = Cluster::new(ids.clone());
                if c.len() != ids.len() || c.len() != a.rank() {
                    return Err(usage(format!("a cluster needs {} distinct variable ids", a.rank())));
                }
                a.cluster_index(&c)?;
                Ok(c)
            }
        }
    }
}

fn vec_text(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn pretty(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
    s.push('\n');
    s
}

fn seed_report(cli: &Cli, s: &Seed) -> String {
    let b = s.exchange_matrix().matrix();
    let y: Vec<String> = s.coefficients().iter().map(ToString::to_string).collect();
    let x: Vec<String> = s.cluster().iter().map(ToString::to_string).collect();
    let path: Vec<usize> = s.path().iter().map(|k| k + 1).collect();
    if cli.format == Format::Json {
        return pretty(json!({
            "n": s.rank(),
            "B": b.to_rows(),
            "y": y,
            "cluster": x,
            "path": path,
        }));
    }
    let mut out = format!("B: {b}\n");
    for (i, v) in y.iter().enumerate() {
        let _ = writeln!(out, "y{}: {v}", i + 1);
    }
    for (i, v) in x.iter().enumerate() {
        let _ = writeln!(out, "x{}: {v}", i + 1);
    }
    let _ = write!(out, "path:");
    for k in path {
        let _ = write!(out, " {k}");
    }
    out.push('\n');
    out
}

fn cmd_explore(ctx: &Context) -> CliResult {
    require_format(ctx.cli, &[Format::Text, Format::Json, Format::Dot])?;
    let a = ctx.atlas()?;
    Ok(Outcome::ok(match ctx.cli.format {
        Format::Json => pretty(serde_json::to_value(a.to_document()).expect("atlas serializes")),
        Format::Dot => a.exchange_graph().to_dot(),
        _ => format!(
            "variables: {}, clusters: {}, complete: {}\n",
            a.num_variables(),
            a.clusters().len(),
            a.is_complete()
        ),
    }))
}

fn cmd_exchange_graph(ctx: &Context) -> CliResult {
    require_format(ctx.cli, &[Format::Text, Format::Json, Format::Dot])?;
    let a = ctx.atlas()?;
    let g = a.exchange_graph();
    if !g.is_complete() {
        eprintln!("warning: exploration was truncated; the graph may be a proper subgraph");
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    Ok(Outcome::ok(match ctx.cli.format {
        Format::Dot => g.to_dot(),
        Format::Json => pretty(json!({
            "complete": g.is_complete(),
            "vertices": g.vertices(),
            "edges": edges,
        })),
        _ => {
            let mut out = format!("vertices: {}\nedges: {}\ncomplete: {}\n", g.vertices().len(), edges.len(), g.is_complete());
            for (i, c) in g.vertices().iter().enumerate() {
                let _ = writeln!(out, "vertex {i}: {c}");
            }
            for (u, v) in edges {
                let _ = writeln!(out, "edge: {u} -- {v}");
            }
            out
        }
    }))
}

fn cmd_expand(ctx: &Context, var: VariableId, cluster: &Option<String>) -> CliResult {
    require_format(ctx.cli, &[Format::Text, Format::Json])?;
    let a = ctx.atlas()?;
    let c = ctx.cluster(&a, cluster)?;
    let p = a.expand(var, &c)?;
    Ok(Outcome::ok(if ctx.cli.format == Format::Json {
        pretty(json!({"variable": var, "cluster": c, "expansion": p.to_string()}))
    } else {
        format!("variable: {var}\ncluster: {c}\nexpansion: {p}\n")
    }))
}

fn cmd_gvector(ctx: &Context, var: Option<VariableId>) -> CliResult {
    require_format(ctx.cli, &[Format::Text, Format::Json, Format::Tsv])?;
    let a = ctx.atlas()?;
    let ids: Vec<VariableId> = match var {
        Some(v) => vec![v],
        None => a.variable_ids().collect(),
    };
    if ctx.cli.format == Format::Tsv && var.is_none() {
        return Ok(Outcome::ok(g_vector_tsv(&a)?));
    }
    let rows = ids
        .iter()
        .map(|&v| Ok((v, g_vector(&a, v)?)))
        .collect::<std::result::Result<Vec<_>, Error>>()?;
    Ok(Outcome::ok(match ctx.cli.format {
        Format::Json => pretty(json!(rows
            .iter()
            .map(|(v, g)| json!({"variable": v, "g": g}))
            .collect::<Vec<_>>())),
        Format::Tsv => rows
            .iter()
            .map(|(v, g)| {
                let cols: Vec<String> = g.0.iter().map(ToString::to_string).collect();
                format!("{v}\t{}\n", cols.join("\t"))
            })
            .collect(),
        _ => rows.iter().map(|(v, g)| format!("g({v}): {g}\n")).collect(),
    }))
}

fn cmd_dvector(ctx: &Context, var: VariableId, cluster: &Option<String>) -> CliResult {
    require_format(ctx.cli, &[Format::Text, Format::Json])?;
    let a = ctx.atlas()?;
    let c = ctx.cluster(&a, cluster)?;
    let d = d_vector(&a, var, &c)?;
    Ok(Outcome::ok(if ctx.cli.format == Format::Json {
        pretty(json!({"variable": var, "cluster": c, "d": d.0}))
    } else {
        format!("variable: {var}\ncluster: {c}\nd-vector: {d}\n")
    }))
}

fn cmd_compat(ctx: &Context, var: Option<VariableId>, reference: Option<VariableId>) -> CliResult {
    let a = ctx.atlas()?;
    match (reference, var) {
        (Some(r), Some(v)) => {
            require_format(ctx.cli, &[Format::Text, Format::Json])?;
            let d = compatibility_degree(&a, r, v)?;
            Ok(Outcome::ok(if ctx.cli.format == Format::Json {
                pretty(json!({"reference": r, "variable": v, "degree": d, "compatible": d <= 0}))
            } else {
                format!("d({r}, {v}): {d}\ncompatible: {}\n", d <= 0)
            }))
        }
        (None, None) => {
            require_format(ctx.cli, &[Format::Text, Format::Tsv, Format::Json])?;
            let m = degree_matrix(&a)?;
            Ok(Outcome::ok(if ctx.cli.format == Format::Json {
                pretty(json!({"degrees": m.rows()}))
            } else {
                m.to_tsv()
            }))
        }
        _ => Err(usage("give both --ref and --var, or neither for the full table")),
    }
}

fn cmd_gpair(ctx: &Context, cluster: &Option<String>, subset: &str) -> CliResult {
    require_format(ctx.cli, &[Format::Text, Format::Json])?;
    let a = ctx.atlas()?;
    let t = ctx.cluster(&a, cluster)?;
    let subset = parse_directions(subset, a.rank())?;
    let pair = find_g_pair(&a, &t, &subset)?;
    let one_based: Vec<usize> = pair.subset.iter().map(|k| k + 1).collect();
    if ctx.cli.format == Format::Json {
        return Ok(Outcome::ok(pretty(json!({
            "t": pair.t,
            "subset": one_based,
            "t_prime": pair.t_prime,
            "labeled": pair.labeled,
            "solutions": pair.solutions.iter().map(|s| json!({"variable": s.variable, "v": s.coefficients})).collect::<Vec<_>>(),
        }))));
    }
    let sub: Vec<String> = one_based.iter().map(ToString::to_string).collect();
    let labeled: Vec<String> = pair.labeled.iter().map(ToString::to_string).collect();
    let mut out = format!(
        "t: {}\nsubset: {}\nt_prime: {}\nlabeled: {}\n",
        pair.t,
        sub.join(" "),
        pair.t_prime,
        labeled.join(" ")
    );
    for s in &pair.solutions {
        let _ = writeln!(out, "v({}): {}", s.variable, vec_text(&s.coefficients));
    }
    Ok(Outcome::ok(out))
}

fn cmd_witness(ctx: &Context, reference: VariableId, var: VariableId) -> CliResult {
    require_format(ctx.cli, &[Format::Text, Format::Json])?;
    let a = ctx.atlas()?;
    let w = laurent_witness(&a, reference, var)?;
    let case = match w.k_exponent() {
        e if e > 0 => "equal",
        0 => "in cluster",
        _ => "outside cluster",
    };
    let coefficient = crate::algebra::LaurentPoly::constant(0, w.coefficient.clone()).to_string();
    Ok(Outcome::ok(if ctx.cli.format == Format::Json {
        pretty(json!({
            "reference": reference,
            "variable": var,
            "cluster": w.cluster,
            "exponents": w.exponents,
            "coefficient": coefficient,
            "k_exponent": w.k_exponent(),
            "case": case,
        }))
    } else {
        format!(
            "reference: {reference}\nvariable: {var}\ncluster: {}\nexponents: {}\ncoefficient: {coefficient}\nk_exponent: {}\ncase: {case}\n",
            w.cluster,
            vec_text(&w.exponents),
            w.k_exponent()
        )
    }))
}

fn result_line(passed: bool) -> &'static str {
    if passed {
        "result: pass\n"
    } else {
        "result: fail\n"
    }
}

fn cmd_verify(ctx: &Context, suite: Suite) -> CliResult {
    require_format(ctx.cli, &[Format::Text])?;
    let a = ctx.atlas()?;
    a.require_complete()?;
    match suite {
        Suite::DegreeProperties => {
            let r = verify_degree_properties(&a)?;
            let mut out = format!("suite: degree-properties\nvariables: {}\npairs: {}\n", r.variables, r.pairs);
            for (i, p) in r.properties.iter().enumerate() {
                let status = if p.passed() { "pass" } else { "fail" };
                let _ = writeln!(out, "property {} ({}): {status}", i + 1, p.name);
                if let Some(c) = &p.counterexample {
                    let _ = writeln!(out, "counterexample {}: {c}", i + 1);
                }
            }
            out.push_str(result_line(r.passed()));
            Ok(Outcome::verdict(out, r.passed()))
        }
        Suite::CompatTheorem => {
            let r = verify_compat_theorem(&a)?;
            let mut out = format!(
                "suite: compat-theorem\nmaximal_sets: {}\nclusters: {}\n",
                r.maximal_sets, r.clusters
            );
            for s in &r.extra {
                let _ = writeln!(out, "extra: {}", Cluster::new(s.iter().copied().collect()));
            }
            for c in &r.missing {
                let _ = writeln!(out, "missing: {c}");
            }
            out.push_str(result_line(r.passed()));
            Ok(Outcome::verdict(out, r.passed()))
        }
        Suite::GPairs => {
            let r = verify_g_pairs(&a)?;
            let mut out = format!("suite: g-pairs\nchecked: {}\nfailures: {}\n", r.checked, r.failures.len());
            for (c, s) in &r.failures {
                let sub: Vec<String> = s.iter().map(|k| (k + 1).to_string()).collect();
                let _ = writeln!(out, "not found: {c} along {{{}}}", sub.join(","));
            }
            out.push_str(result_line(r.failures.is_empty()));
            Ok(Outcome::verdict(out, r.failures.is_empty()))
        }
        Suite::Witnesses => {
            let r = verify_witnesses(&a)?;
            let mut out = format!("suite: witnesses\npairs: {}\nfailures: {}\n", r.pairs, r.failures.len());
            for (k, i, e) in &r.failures {
                let _ = writeln!(out, "failure ({k}, {i}): {e}");
            }
            out.push_str(result_line(r.passed()));
            Ok(Outcome::verdict(out, r.passed()))
        }
        Suite::Unistructural => verify_two(ctx, &a),
    }
}

fn verify_two(ctx: &Context, a1: &PatternAtlas) -> CliResult {
    let [_, second] = ctx.cli.seed.as_slice() else {
        return Err(usage("verify unistructural needs exactly two --seed files"));
    };
    let file2 = SeedFile::read(second)?;
    let a2 = ctx.explore(&file2.seed()?)?;
    a2.require_complete()?;
    let ident = file2.identification(a1.rank(), a1.coef_rank())?;
    let r = verify_unistructural(a1, &a2, &ident)?;
    let mut out = format!(
        "suite: unistructural\nranks: {} {}\nvariables: {} {}\nvariable_sets_equal: {}\n",
        r.ranks.0,
        r.ranks.1,
        r.variables.0,
        r.variables.1,
        r.variable_sets_equal()
    );
    for (v, image) in &r.unmatched {
        let _ = writeln!(out, "unmatched: {v} -> {image}");
    }
    let _ = writeln!(out, "clusters: {} {}", r.clusters.0, r.clusters.1);
    let _ = writeln!(out, "clusters_equal: {}", r.clusters_equal());
    for c in &r.missing_clusters {
        let _ = writeln!(out, "missing_cluster: {c}");
    }
    for c in &r.extra_clusters {
        let _ = writeln!(out, "extra_cluster: {c}");
    }
    if let Some(g) = &r.graphs {
        let _ = writeln!(out, "exchange_graphs_equal: {}", g.equal);
        if let Some(d) = &g.difference {
            let _ = writeln!(out, "graph_difference: {d}");
        }
    }
    let _ = writeln!(out, "d_compatibility_equal: {}", r.compat_equal);
    if let Some((i, j)) = r.compat_difference {
        let _ = writeln!(out, "compat_difference: {i} {j}");
    }
    let _ = writeln!(out, "degree_matrices_equal: {}", r.degree_matrices_equal);
    let mut passed = r.passed();
    if r.variable_sets_equal() {
        let certs = all_certificates(a1)?;
        let negative = certs.values().all(|c| c.is_contradiction());
        let _ = writeln!(out, "certificates: {}\ncertificates_negative: {negative}", certs.len());
        passed &= negative;
    }
    out.push_str(result_line(passed));
    Ok(Outcome::verdict(out, passed))
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CliResult {
    let Some(first) = cli.seed.first() else {
        return Err(usage("missing --seed <file>"));
    };
    if cli.seed.len() > 1 && !matches!(cli.command, Command::Verify { suite: Suite::Unistructural }) {
        return Err(usage("only verify unistructural takes two --seed files"));
    }
    let seed = SeedFile::read(first)?.seed()?;
    let ctx = Context { cli, seed };
    match &cli.command {
        Command::Mutate { path } => {
            require_format(cli, &[Format::Text, Format::Json])?;
            let dirs = parse_directions(path, ctx.seed.rank())?;
            let s = ctx.seed.mutate_path(&dirs)?;
            Ok(Outcome::ok(seed_report(cli, &s)))
        }
        Command::Explore => cmd_explore(&ctx),
        Command::Expand { var, cluster } => cmd_expand(&ctx, *var, cluster),
        Command::Gvector { var } => cmd_gvector(&ctx, *var),
        Command::Dvector { var, cluster } => cmd_dvector(&ctx, *var, cluster),
        Command::Compat { var, reference } => cmd_compat(&ctx, *var, *reference),
        Command::ExchangeGraph => cmd_exchange_graph(&ctx),
        Command::Gpair { cluster, subset } => cmd_gpair(&ctx, cluster, subset),
        Command::Witness { reference, var } => cmd_witness(&ctx, *reference, *var),
        Command::Verify { suite } => cmd_verify(&ctx, *suite),
    }
}
