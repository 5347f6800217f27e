use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coconvex::newick::{self, Loaded};
use coconvex::partitions::write_partitions;
use coconvex::report::{self, Format};
use coconvex::taxa::TaxonMap;
use coconvex::verify::{self, Level};
use coconvex::{parallel, Result, ToolError};
use coconvex_core::coconvex::enumerate_coconvex;
use coconvex_core::convexity::{count_convex, enumerate_convex, is_convex};
use coconvex_core::expectation::{exact_expected_nontrivial, trend_table};
use coconvex_core::extremal::{
    bound_table, common_monotone_labels, shared_with_identity, thm31_witnesses, thm42_permutation, thm62_family,
    ExtremalResult, SearchReport, SharedCounter,
};
use coconvex_core::metrics::{character_distance, distance_report, dk_distance, quartet_distance, rf_distance};
use coconvex_core::partition::parse_partition;
use coconvex_core::rng::seeded;
use coconvex_core::{limits, Caterpillar, Label, Partition, Tree};
use num_bigint::BigUint;
use serde_json::json;

/// Convex and coconvex characters on binary phylogenetic trees.
///
/// Tree arguments are Newick files, or inline Newick text when they end
/// with `;`.
#[derive(Parser, Debug)]
#[command(name = "coconvex", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Size limit for exponential-time operations, replacing the defaults.
    #[arg(long, global = true)]
    max_n: Option<usize>,
    /// Lift every size limit.
    #[arg(long, global = true)]
    force: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// TSV taxon map (`label<TAB>name`) for named Newick leaves.
    #[arg(long, global = true)]
    taxa: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Characters convex on one tree.
    #[command(subcommand)]
    Convex(ConvexCmd),
    /// Characters convex on every tree of a collection.
    #[command(subcommand)]
    Coconvex(CoconvexCmd),
    /// Distances between two trees, or a distance matrix.
    Dist(DistArgs),
    /// Minimum shared character counts over caterpillar pairs.
    #[command(subcommand)]
    Extremal(ExtremalCmd),
    /// Explicit extremal constructions.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Agreement subsets of caterpillars.
    #[command(subcommand)]
    Agree(AgreeCmd),
    /// Expected shared nontrivial characters of random caterpillar pairs.
    #[command(subcommand)]
    Expect(ExpectCmd),
    /// The acceptance battery.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
enum ConvexCmd {
    /// Counts by number of blocks and singletons.
    Count { tree: String },
    /// Lists every convex character.
    Enum {
        tree: String,
        #[command(flatten)]
        out: EnumOut,
    },
    /// Tests one character; exit status 1 when it is not convex.
    Test { tree: String, partition: String },
}

#[derive(Args, Debug)]
struct EnumOut {
    /// Only characters with this many blocks.
    #[arg(long)]
    k: Option<usize>,
    /// Write the partition list here instead of standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CoconvexCmd {
    Count {
        #[arg(required = true)]
        trees: Vec<String>,
    },
    Enum {
        #[arg(required = true)]
        trees: Vec<String>,
        #[command(flatten)]
        out: EnumOut,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Metric {
    /// Every d_k, d, RF, and quartet distance.
    All,
    Dk,
    Character,
    Rf,
    Quartet,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct DistArgs {
    #[command(subcommand)]
    matrix: Option<DistCmd>,
    #[arg(long, value_enum, default_value_t = Metric::All)]
    metric: Metric,
    /// Number of blocks, for `--metric dk`.
    #[arg(long)]
    k: Option<usize>,
    trees: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum DistCmd {
    /// Square CSV matrix over every tree in the input.
    Matrix {
        #[arg(long, value_enum, default_value_t = Metric::Character)]
        metric: Metric,
        #[arg(long)]
        k: Option<usize>,
        #[arg(required = true)]
        trees: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct Method {
    /// Search every canonical caterpillar (the default).
    #[arg(long, conflicts_with = "construction")]
    exhaustive: bool,
    /// Evaluate an explicit construction instead of searching.
    #[arg(long, value_enum)]
    construction: Option<Construction>,
    /// Resumable search state file.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Write the stored minimizers here, one permutation per line.
    #[arg(long)]
    witnesses: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Construction {
    Thm42,
}

#[derive(Subcommand, Debug)]
enum ExtremalCmd {
    /// c_{n,k}.
    Cnk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        method: Method,
    },
    /// c_n.
    Cn {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        method: Method,
    },
    /// Lower bounds for every k, with exhaustive values when requested.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ConstructCmd {
    /// The small-k minimizer paired with the identity caterpillar.
    Thm42 {
        #[arg(long)]
        n: usize,
    },
    /// The residue-class family of `3m - 2` caterpillars.
    Thm62 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Shared two-big-block characters of `T_id` and `T_perm`.
    #[command(name = "thm31-witnesses")]
    Thm31Witnesses {
        /// Space- or comma-separated permutation; random from the seed when absent.
        #[arg(long)]
        perm: Option<String>,
        #[arg(long, required_unless_present = "perm")]
        n: Option<usize>,
        #[arg(long)]
        ell: usize,
    },
}

#[derive(Subcommand, Debug)]
enum AgreeCmd {
    /// Leaves on which every input caterpillar restricts to the same tree.
    Lis {
        #[arg(required = true)]
        trees: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum ExpectCmd {
    /// Exact rational value.
    Exact {
        #[arg(long)]
        n: usize,
    },
    /// Monte-Carlo estimate.
    Mc {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Exact values and `E n^2 / 2^n` over a range of n.
    Trend {
        #[arg(long, default_value_t = 10)]
        from: usize,
        #[arg(long, default_value_t = 20)]
        to: usize,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Suite {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

/// What a successful command leaves behind: text for standard output and
/// whether the tested property held.
struct Done {
    output: String,
    holds: bool,
}

impl From<String> for Done {
    fn from(output: String) -> Self {
        Done { output, holds: true }
    }
}

struct Ctx {
    seed: u64,
    max_n: Option<usize>,
    force: bool,
    format: Format,
    taxa: Option<TaxonMap>,
}

impl Ctx {
    fn limit(&self, default: usize) -> usize {
        if self.force {
            usize::MAX
        } else {
            self.max_n.unwrap_or(default)
        }
    }

    fn load(&self, sources: &[String]) -> Result<Loaded> {
        let mut raw = Vec::new();
        for s in sources {
            let text = if s.trim_end().ends_with(';') {
                s.clone()
            } else {
                let path = Path::new(s);
                std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?
            };
            raw.extend(newick::parse_raw(&text)?);
        }
        newick::resolve(&raw, self.taxa.as_ref())
    }

    fn load_one(&self, source: &str) -> Result<Tree> {
        let mut loaded = self.load(&[source.to_string()])?;
        if loaded.trees.len() != 1 {
            return Err(ToolError::Usage(format!("expected one tree, found {}", loaded.trees.len())));
        }
        Ok(loaded.trees.remove(0))
    }

    fn load_at_least(&self, sources: &[String], min: usize) -> Result<Loaded> {
        let loaded = self.load(sources)?;
        if loaded.trees.len() < min {
            return Err(ToolError::Usage(format!("need at least {min} trees, found {}", loaded.trees.len())));
        }
        Ok(loaded)
    }
}

fn enumerate_to(items: impl Iterator<Item = Partition>, out: &EnumOut) -> Result<Done> {
    let filtered = items.filter(|p| out.k.is_none_or(|k| p.num_blocks() == k));
    match &out.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| ToolError::io(path, e))?;
            let count = write_partitions(file, filtered).map_err(|e| ToolError::io(path, e))?;
            eprintln!("wrote {count} partitions to {}", path.display());
        }
        None => {
            write_partitions(io::stdout().lock(), filtered).map_err(|e| ToolError::io(Path::new("<stdout>"), e))?;
        }
    }
    Ok(String::new().into())
}

fn convex(ctx: &Ctx, cmd: &ConvexCmd) -> Result<Done> {
    match cmd {
        ConvexCmd::Count { tree } => Ok(report::count_table(&count_convex(&ctx.load_one(tree)?), ctx.format)?.into()),
        ConvexCmd::Enum { tree, out } => {
            let t = ctx.load_one(tree)?;
            enumerate_to(enumerate_convex(&t, ctx.limit(limits::CONVEX_ENUMERATION))?, out)
        }
        ConvexCmd::Test { tree, partition } => {
            let t = ctx.load_one(tree)?;
            let p = parse_partition(partition, Some(t.n()))?;
            let holds = is_convex(&t, &p)?;
            let output = match ctx.format {
                Format::Json => report::json_doc("convex_test", json!({ "partition": p.to_string(), "convex": holds })),
                Format::Csv => report::csv_table(&["partition", "convex"], [vec![p.to_string(), holds.to_string()]])?,
                Format::Text => format!("{}\n", if holds { "convex" } else { "not convex" }),
            };
            Ok(Done { output, holds })
        }
    }
}

fn coconvex(ctx: &Ctx, cmd: &CoconvexCmd) -> Result<Done> {
    match cmd {
        CoconvexCmd::Count { trees } => {
            let loaded = ctx.load_at_least(trees, 2)?;
            let table = parallel::coconvex_counts(&loaded.trees, ctx.limit(limits::CONVEX_ENUMERATION), 6)?;
            Ok(report::count_table(&table, ctx.format)?.into())
        }
        CoconvexCmd::Enum { trees, out } => {
            let loaded = ctx.load_at_least(trees, 2)?;
            enumerate_to(enumerate_coconvex(&loaded.trees, ctx.limit(limits::CONVEX_ENUMERATION))?, out)
        }
    }
}

fn metric_value(ctx: &Ctx, metric: Metric, k: Option<usize>, t: &Tree, f: &Tree) -> coconvex_core::Result<BigUint> {
    let limit = ctx.limit(limits::CONVEX_ENUMERATION);
    match metric {
        Metric::Dk => dk_distance(t, f, k.unwrap_or(2), limit),
        Metric::Character | Metric::All => character_distance(t, f, limit),
        Metric::Rf => rf_distance(t, f).map(BigUint::from),
        Metric::Quartet => quartet_distance(t, f).map(BigUint::from),
    }
}

fn dist(ctx: &Ctx, args: &DistArgs) -> Result<Done> {
    if let Some(DistCmd::Matrix { metric, k, trees }) = &args.matrix {
        if *metric == Metric::Dk && k.is_none() {
            return Err(ToolError::Usage("--metric dk needs --k".into()));
        }
        let loaded = ctx.load_at_least(trees, 1)?;
        let values = parallel::distance_matrix(&loaded.trees, |a, b| metric_value(ctx, *metric, *k, a, b))?;
        let names: Vec<String> = (1..=loaded.trees.len()).map(|i| format!("t{i}")).collect();
        let format = if ctx.format == Format::Json { Format::Json } else { Format::Csv };
        return Ok(report::matrix(&names, &values, format)?.into());
    }
    let loaded = ctx.load(&args.trees)?;
    let [t, f] = loaded.trees.as_slice() else {
        return Err(ToolError::Usage(format!("dist takes two trees, found {}", loaded.trees.len())));
    };
    if args.metric == Metric::Dk && args.k.is_none() {
        return Err(ToolError::Usage("--metric dk needs --k".into()));
    }
    if args.metric == Metric::All {
        let r = distance_report(t, f, ctx.limit(limits::CONVEX_ENUMERATION))?;
        return Ok(report::distance_report(&r, ctx.format)?.into());
    }
    let value = metric_value(ctx, args.metric, args.k, t, f)?;
    let kind = match args.metric {
        Metric::Dk => "dk",
        Metric::Rf => "rf",
        Metric::Quartet => "quartet",
        _ => "character",
    };
    Ok(report::scalar(kind, &value.to_string(), ctx.format)?.into())
}

fn search(ctx: &Ctx, n: usize, checkpoint: Option<&Path>) -> Result<SearchReport> {
    parallel::exhaustive_search(n, ctx.limit(limits::EXHAUSTIVE_SEARCH), checkpoint)
}

fn write_witnesses(path: Option<&Path>, r: &ExtremalResult) -> Result<()> {
    if let Some(path) = path {
        let mut text = String::new();
        for w in &r.witnesses {
            text.push_str(&format!("{w}\n"));
        }
        std::fs::write(path, text).map_err(|e| ToolError::io(path, e))?;
    }
    Ok(())
}

fn construction_result(ctx: &Ctx, n: usize, k: Option<usize>) -> Result<ExtremalResult> {
    let pi = thm42_permutation(n)?;
    let counter = SharedCounter::identity(n, ctx.limit(limits::CONVEX_ENUMERATION))?;
    let shared = shared_with_identity(&counter, &pi);
    let value = match k {
        Some(k) => shared[k].clone(),
        None => shared.iter().sum(),
    };
    Ok(ExtremalResult {
        n,
        k,
        value,
        witnesses: vec![pi],
        witness_count: 1,
        search_space: 1,
    })
}

fn extremal(ctx: &Ctx, cmd: &ExtremalCmd) -> Result<Done> {
    let (n, k, method) = match cmd {
        ExtremalCmd::Cnk { n, k, method } => {
            if *k == 0 || k > n {
                return Err(ToolError::Usage(format!("k = {k} outside [1, {n}]")));
            }
            (*n, Some(*k), method)
        }
        ExtremalCmd::Cn { n, method } => (*n, None, method),
        ExtremalCmd::Bounds { n, exhaustive, checkpoint } => {
            let r = if *exhaustive { Some(search(ctx, *n, checkpoint.as_deref())?) } else { None };
            return Ok(report::bounds(&bound_table(*n, r.as_ref()), ctx.format)?.into());
        }
    };
    let result = match method.construction {
        Some(Construction::Thm42) => construction_result(ctx, n, k)?,
        None => {
            let r = search(ctx, n, method.checkpoint.as_deref())?;
            match k {
                Some(k) => r.cnk(k).clone(),
                None => r.total,
            }
        }
    };
    write_witnesses(method.witnesses.as_deref(), &result)?;
    Ok(report::extremal_result(&result, ctx.format)?.into())
}

fn lines<T: ToString>(items: &[T], kind: &str, format: Format) -> Result<String> {
    let text: Vec<String> = items.iter().map(T::to_string).collect();
    Ok(match format {
        Format::Text => text.iter().map(|s| format!("{s}\n")).collect(),
        Format::Csv => report::csv_table(&[kind], text.into_iter().map(|s| vec![s]))?,
        Format::Json => report::json_doc(kind, json!({ "items": text })),
    })
}

fn parse_perm(text: &str) -> Result<Caterpillar> {
    let perm = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Label>().map_err(|_| ToolError::Usage(format!("not a label: {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Caterpillar::new(perm)?)
}

fn construct(ctx: &Ctx, cmd: &ConstructCmd) -> Result<Done> {
    match cmd {
        ConstructCmd::Thm42 { n } => Ok(lines(&[thm42_permutation(*n)?], "permutation", ctx.format)?.into()),
        ConstructCmd::Thm62 { n, m } => Ok(lines(&thm62_family(*n, *m)?, "permutation", ctx.format)?.into()),
        ConstructCmd::Thm31Witnesses { perm, n, ell } => {
            let pi = match (perm, n) {
                (Some(p), _) => parse_perm(p)?,
                (None, Some(n)) => Caterpillar::random(*n, &mut seeded(ctx.seed)),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let ws = thm31_witnesses(&pi, *ell)?;
            if ctx.format == Format::Text {
                eprintln!("pi = {pi}");
            }
            Ok(lines(&ws, "partition", ctx.format)?.into())
        }
    }
}

fn agree(ctx: &Ctx, cmd: &AgreeCmd) -> Result<Done> {
    let AgreeCmd::Lis { trees } = cmd;
    let loaded = ctx.load_at_least(trees, 2)?;
    let cats = loaded
        .trees
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if !t.has_standard_labels() {
                return Err(ToolError::Usage(format!("tree {} is not labeled 1..n", i + 1)));
            }
            t.as_caterpillar()
                .ok_or_else(|| ToolError::Usage(format!("tree {} is not a caterpillar", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    let y = common_monotone_labels(&cats)?;
    let names: Vec<String> = y
        .iter()
        .map(|&l| loaded.taxa.as_ref().and_then(|m| m.name(l)).map_or_else(|| l.to_string(), str::to_string))
        .collect();
    Ok(match ctx.format {
        Format::Text => format!("{}\n", names.join(" ")),
        _ => lines(&names, "leaf", ctx.format)?,
    }
    .into())
}

fn expect(ctx: &Ctx, cmd: &ExpectCmd) -> Result<Done> {
    match cmd {
        ExpectCmd::Exact { n } => {
            let e = exact_expected_nontrivial(*n, ctx.limit(limits::EXACT_EXPECTATION))?;
            Ok(report::rational("expectation", &e, ctx.format)?.into())
        }
        ExpectCmd::Mc { n, samples } => {
            let mc = parallel::monte_carlo(*n, *samples, ctx.seed, ctx.limit(limits::CONVEX_ENUMERATION))?;
            Ok(report::monte_carlo(*n, ctx.seed, &mc, ctx.format)?.into())
        }
        ExpectCmd::Trend { from, to } => {
            let rows = trend_table(*from, *to, ctx.limit(limits::EXACT_EXPECTATION))?;
            Ok(report::trend(&rows, ctx.format)?.into())
        }
    }
}

fn verify_suite(ctx: &Ctx, cmd: &VerifyCmd) -> Result<Done> {
    let VerifyCmd::Suite { level, only } = cmd;
    let ids: Vec<u32> = if only.is_empty() { verify::CRITERIA.iter().map(|c| c.0).collect() } else { only.clone() };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = verify::run(id, *level)?;
        if ctx.format == Format::Text {
            eprint!("{}", o.render());
        }
        outcomes.push(o);
    }
    let holds = outcomes.iter().all(|o| o.passed());
    let output = match ctx.format {
        Format::Text => outcomes.iter().map(|o| format!("{}\n", o.line())).collect(),
        Format::Csv => report::csv_table(
            &["id", "name", "check", "passed", "detail"],
            outcomes.iter().flat_map(|o| {
                o.checks.iter().map(move |c| {
                    vec![o.id.to_string(), o.name.to_string(), c.label.clone(), c.passed.to_string(), c.detail.clone()]
                })
            }),
        )?,
        Format::Json => report::json_doc(
            "verify",
            json!({
                "passed": holds,
                "criteria": outcomes.iter().map(|o| json!({
                    "id": o.id,
                    "name": o.name,
                    "passed": o.passed(),
                    "checks": o.checks.iter().map(|c| json!({
                        "check": c.label, "passed": c.passed, "detail": c.detail
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            }),
        ),
    };
    Ok(Done { output, holds })
}

fn run(cli: &Cli) -> Result<Done> {
    let ctx = Ctx {
        seed: cli.seed,
        max_n: cli.max_n,
        force: cli.force,
        format: cli.format,
        taxa: cli.taxa.as_deref().map(TaxonMap::read).transpose()?,
    };
    parallel::with_threads(cli.threads, || match &cli.command {
        Command::Convex(c) => convex(&ctx, c),
        Command::Coconvex(c) => coconvex(&ctx, c),
        Command::Dist(d) => dist(&ctx, d),
        Command::Extremal(c) => extremal(&ctx, c),
        Command::Construct(c) => construct(&ctx, c),
        Command::Agree(c) => agree(&ctx, c),
        Command::Expect(c) => expect(&ctx, c),
        Command::Verify(c) => verify_suite(&ctx, c),
    })?
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(done) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(done.output.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(if done.holds { 0 } else { 1 })
        }
        Err(e) => {
            if cli.format == Format::Json {
                let doc = report::json_doc("error", json!({ "code": e.code(), "message": e.to_string() }));
                eprint!("{doc}");
            } else {
                eprintln!("error[{}]: {e}", e.code());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use coconvex_core::combinatorics::trivial_count;

    #[test]
    fn command_line_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn permutations_parse() {
        assert_eq!(parse_perm("5 3 1,4 2").unwrap().perm(), &[5, 3, 1, 4, 2]);
        assert!(parse_perm("1 1 2").is_err());
        assert!(parse_perm("1 x").is_err());
    }

    #[test]
    fn construction_matches_trivial_census_for_small_k() {
        let ctx = Ctx {
            seed: 0,
            max_n: None,
            force: false,
            format: Format::Text,
            taxa: None,
        };
        let r = construction_result(&ctx, 9, Some(2)).unwrap();
        assert_eq!(r.value, trivial_count(9, 2));
    }
}
