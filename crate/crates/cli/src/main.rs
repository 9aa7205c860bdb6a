//! `formex` command-line front end.
//!
//! Exit status: 0 for success, a true answer or an all-pass verdict; 1 for a
//! false answer or a failed verdict; 3 for a verdict with inconclusive rows;
//! 2 for usage and input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use formex::formations::{contains_doubled_formation, max_formation_groups, DoubledSpec, FormationSpec};
use formex::io::{parse_matrix, parse_pattern, write_matrix, write_pattern};
use formex::recurrences::{alpha, alpha_j, recurrence_value, RecurrenceKind, RecurrenceTable};
use formex::search::{compute_g, ExtremalResult, ForbiddenFamily, ResultCache, SearchBudget, Solver};
use formex::verify::{affine_g, parse_rational, parse_values, BoundId, BoundReport, Grid, PartitionTuple, Verdict, Verifier, VerifyConfig};
use formex::{contains, find_occurrence, BitMatrix, Pattern, Shape};

const EXIT_TRUE: u8 = 0;
const EXIT_FALSE: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_GAPS: u8 = 3;

#[derive(Parser)]
#[command(name = "formex", version, about = "Forbidden 0-1 matrices: containment, formations, exact extremal values and bound checks")]
struct Cli {
    /// Repeat for more log output on stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Does the matrix contain the pattern?
    Contains { matrix: PathBuf, pattern: PathBuf },
    /// Print the lexicographically least occurrence of the pattern.
    Occurrence { matrix: PathBuf, pattern: PathBuf },
    /// Does the matrix contain a (P,s)-formation?
    Formation {
        matrix: PathBuf,
        pattern: PathBuf,
        #[arg(long)]
        s: usize,
    },
    /// Does the two-dimensional matrix contain a doubled (r,s)-formation?
    Doubled {
        matrix: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
    },
    /// Exact maximum number of ones in an avoiding matrix.
    Ex(SearchArgs),
    /// Exact maximum number of letters of multiplicity k.
    Lx {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// lx_k over (d+1)-dimensional hosts against F_{P,s}, divided by ex(n,P,d).
    GRatio {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Evaluate R or D; with --table print every value up to (s, j).
    Rec {
        #[arg(long)]
        kind: RecurrenceKind,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        table: bool,
    },
    /// alpha_j(n), or alpha(n) without --j.
    Alpha {
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        n: u128,
    },
    /// Print the alternating pattern A_t as a pattern file.
    GenAt {
        #[arg(long)]
        t: usize,
    },
    /// Sweep one inequality over a grid and report.
    Verify(Box<VerifyArgs>),
    /// Inspect or compact the result cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
        #[command(flatten)]
        cache: CacheArgs,
    },
}

#[derive(Subcommand, Clone, Copy)]
enum CacheAction {
    /// List cached records.
    Ls,
    /// Rewrite the cache keeping one valid record per key.
    Gc,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Search node limit.
    #[arg(long, default_value_t = 200_000_000)]
    budget_nodes: u64,
    /// Search wall-clock limit in seconds.
    #[arg(long, default_value_t = 600.0)]
    budget_seconds: f64,
}

impl BudgetArgs {
    fn budget(&self) -> Result<SearchBudget> {
        Ok(SearchBudget::new(self.budget_nodes, self.budget_seconds)?)
    }
}

#[derive(Args, Clone)]
struct CacheArgs {
    /// Result cache file.
    #[arg(long, env = "FORMEX_CACHE")]
    cache: Option<PathBuf>,
}

impl CacheArgs {
    fn solver(&self, budget: SearchBudget) -> Result<Solver> {
        let solver = Solver::new(budget);
        Ok(match &self.cache {
            Some(path) => solver.with_cache(open_cache(path)?),
            None => solver,
        })
    }
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Forbidden pattern files.
    #[arg(long, num_args = 1..)]
    forbid: Vec<PathBuf>,
    /// Forbidden formations as PATTERN_FILE,S.
    #[arg(long)]
    formation: Vec<String>,
    /// Forbidden doubled formations as R,S.
    #[arg(long)]
    doubled: Vec<String>,
}

impl FamilyArgs {
    fn family(&self) -> Result<ForbiddenFamily> {
        let mut family = ForbiddenFamily::new();
        for path in &self.forbid {
            family = family.with_pattern(&read_pattern(path)?)?;
        }
        for spec in &self.formation {
            let (file, s) = spec.rsplit_once(',').with_context(|| format!("--formation expects FILE,S, got {spec:?}"))?;
            let s: usize = s.parse().with_context(|| format!("bad s in {spec:?}"))?;
            family = family.with_formation(FormationSpec::new(&read_pattern(Path::new(file))?, s)?)?;
        }
        for spec in &self.doubled {
            let (r, s) = spec.split_once(',').with_context(|| format!("--doubled expects R,S, got {spec:?}"))?;
            family = family.with_doubled(DoubledSpec::new(r.trim().parse()?, s.trim().parse()?)?)?;
        }
        if family.is_empty() {
            bail!("no forbidden configurations given (use --forbid, --formation or --doubled)");
        }
        Ok(family)
    }
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Host shape such as 3x3 or 4x2x2.
    #[arg(long)]
    shape: Shape,
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    cache: CacheArgs,
    /// Also write the witness matrix to this file.
    #[arg(long)]
    witness_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    /// relate, lemma2, binomial, rec1, rec2, fp3 or light.
    bound: BoundId,
    /// Pattern file: the forbidden pattern, the formation base or the light pattern.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Values of n, as 3, 1..4 or 1,2,4.
    #[arg(long)]
    n: Option<Values>,
    #[arg(long)]
    m: Option<Values>,
    #[arg(long)]
    k: Option<Values>,
    #[arg(long)]
    s: Option<Values>,
    /// Formation size for rec1 and rec2.
    #[arg(long)]
    formation_s: Option<usize>,
    /// lemma2 constant c (integer or p/q).
    #[arg(long)]
    c: Option<String>,
    /// lemma2: g(m) = g_slope * m + g_offset.
    #[arg(long, default_value = "0")]
    g_slope: String,
    #[arg(long, default_value = "0")]
    g_offset: String,
    /// rec2 tuple as K,K1,K2,K3.
    #[arg(long)]
    tuple: Option<String>,
    /// rec2 block length.
    #[arg(long)]
    t: Option<usize>,
    /// light: host shapes, comma separated.
    #[arg(long, value_delimiter = ',')]
    hosts: Vec<Shape>,
    /// light: random stretched members per host.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Hosts with a longer axis are reported inconclusive.
    #[arg(long, default_value_t = 8)]
    max_axis: usize,
    /// Worker threads (0 = machine default).
    #[arg(long, default_value_t = 0)]
    width: usize,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    cache: CacheArgs,
}

/// A grid axis: `3`, `1..4` or `1,2,4`.
#[derive(Clone, Debug)]
struct Values(Vec<usize>);

impl std::str::FromStr for Values {
    type Err = String;

    fn from_str(text: &str) -> std::result::Result<Self, String> {
        parse_values(text).map(Values).map_err(|e| e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_pattern(path: &Path) -> Result<Pattern> {
    parse_pattern(&read_text(path)?).with_context(|| format!("parsing pattern {}", path.display()))
}

fn read_matrix(path: &Path) -> Result<BitMatrix> {
    parse_matrix(&read_text(path)?).with_context(|| format!("parsing matrix {}", path.display()))
}

fn open_cache(path: &Path) -> Result<ResultCache> {
    let cache = ResultCache::open(path).with_context(|| format!("opening cache {}", path.display()))?;
    if cache.skipped() > 0 {
        log::warn!("{} unreadable cache lines skipped", cache.skipped());
    }
    Ok(cache)
}

fn answer(value: bool) -> u8 {
    println!("{value}");
    if value {
        EXIT_TRUE
    } else {
        EXIT_FALSE
    }
}

fn print_result(res: &ExtremalResult) {
    println!("{} {} {}", res.mode, res.value, res.status);
    print!("{}", write_matrix(&res.witness));
    if let Some(letters) = &res.letters {
        println!("letter\trow\ttimes");
        for b in &letters.blocks {
            let row: Vec<String> = b.row.iter().map(|c| c.to_string()).collect();
            let times: Vec<String> = b.times.iter().map(|c| c.to_string()).collect();
            println!("{}\t{}\t{}", b.letter, row.join(","), times.join(","));
        }
    }
    log::info!("{} nodes, {:.3}s", res.nodes_explored, res.elapsed_seconds);
}

fn run_search(args: &SearchArgs, k: Option<usize>) -> Result<u8> {
    let family = args.family.family()?;
    let solver = args.cache.solver(args.budget.budget()?)?;
    let res = match k {
        Some(k) => solver.lx(&args.shape, k, &family)?,
        None => solver.ex(&args.shape, &family)?,
    };
    print_result(&res);
    if let Some(path) = &args.witness_out {
        fs::write(path, write_matrix(&res.witness)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(EXIT_TRUE)
}

fn need<T: Clone>(value: &Option<T>, flag: &str, bound: BoundId) -> Result<T> {
    value.clone().with_context(|| format!("verify {bound} needs --{flag}"))
}

fn run_verify(args: &VerifyArgs) -> Result<u8> {
    let budget = args.budget.budget()?;
    let mut config = VerifyConfig { budget, max_axis: args.max_axis, width: args.width, seed: args.seed, ..VerifyConfig::default() };
    if let Some(trials) = args.trials {
        config.light_trials = trials;
    }
    let verifier = Verifier::with_solver(args.cache.solver(budget)?, config)?;
    let bound = args.bound;
    let grid = Grid {
        n: args.n.clone().map(|v| v.0).unwrap_or_default(),
        m: args.m.clone().map(|v| v.0).unwrap_or_default(),
        k: args.k.clone().map(|v| v.0).unwrap_or_default(),
        s: args.s.clone().map(|v| v.0).unwrap_or_default(),
    };
    let pattern = || -> Result<Pattern> { read_pattern(&need(&args.pattern, "pattern", bound)?) };
    let family = || -> Result<ForbiddenFamily> {
        match &args.pattern {
            Some(p) if args.family.forbid.is_empty() && args.family.formation.is_empty() && args.family.doubled.is_empty() => {
                Ok(ForbiddenFamily::of_pattern(&read_pattern(p)?)?)
            }
            _ => args.family.family(),
        }
    };

    let report: BoundReport = match bound {
        BoundId::Relate => {
            let family = family()?;
            let d = family.host_dims().context("family has no dimension")?;
            verifier.check_relate(&family, d, &grid)?
        }
        BoundId::Lemma2 => {
            let c = parse_rational(&need(&args.c, "c", bound)?)?;
            let slope = parse_rational(&args.g_slope)?;
            let offset = parse_rational(&args.g_offset)?;
            let g = affine_g(&slope, &offset, &grid.m);
            verifier.check_lemma2(&family()?, &c, &g, &grid)?
        }
        BoundId::Binomial => verifier.check_binomial(&pattern()?, &grid)?,
        BoundId::Rec1 => verifier.check_recurrence_doubling(&pattern()?, need(&args.formation_s, "formation-s", bound)?, &grid)?,
        BoundId::Rec2 => {
            let text = need(&args.tuple, "tuple", bound)?;
            let parts = parse_values_exact(&text)?;
            let [k, k1, k2, k3] = parts[..] else { bail!("--tuple expects K,K1,K2,K3") };
            let tuple = PartitionTuple::new(k, k1, k2, k3)?;
            let s = need(&args.formation_s, "formation-s", bound)?;
            verifier.check_recurrence_partition(&pattern()?, s, tuple, need(&args.t, "t", bound)?, &grid)?
        }
        BoundId::Fp3 => verifier.check_fp3(&pattern()?, &grid.n)?,
        BoundId::Light => {
            if args.hosts.is_empty() {
                bail!("verify light needs --hosts");
            }
            verifier.check_light_reduction(&pattern()?, &args.hosts, verifier.config().light_trials)?
        }
    };

    let text = match args.format {
        Format::Tsv => report.to_tsv(),
        Format::Json => report.to_json(),
    };
    print!("{text}");
    if let Some(path) = &args.out {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(match report.verdict {
        Verdict::AllPass => EXIT_TRUE,
        Verdict::Fail => EXIT_FALSE,
        Verdict::PassWithGaps => EXIT_GAPS,
    })
}

/// Comma-separated values in the given order.
fn parse_values_exact(text: &str) -> Result<Vec<usize>> {
    text.split(',').map(|p| p.trim().parse::<usize>().with_context(|| format!("bad number in {text:?}"))).collect()
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Contains { matrix, pattern } => Ok(answer(contains(&read_matrix(&matrix)?, &read_pattern(&pattern)?)?)),
        Command::Occurrence { matrix, pattern } => {
            let pattern = read_pattern(&pattern)?;
            match find_occurrence(&read_matrix(&matrix)?, &pattern)? {
                Some(occ) => {
                    for (axis, map) in occ.axis_maps.iter().enumerate() {
                        let image: Vec<String> = map.iter().map(|c| c.to_string()).collect();
                        println!("axis {}: {}", axis + 1, image.join(" "));
                    }
                    Ok(EXIT_TRUE)
                }
                None => {
                    println!("none");
                    Ok(EXIT_FALSE)
                }
            }
        }
        Command::Formation { matrix, pattern, s } => {
            let host = read_matrix(&matrix)?;
            let spec = FormationSpec::new(&read_pattern(&pattern)?, s)?;
            let groups = max_formation_groups(&host, spec.base())?;
            log::info!("largest formation has {groups} groups");
            Ok(answer(groups >= s))
        }
        Command::Doubled { matrix, r, s } => {
            Ok(answer(contains_doubled_formation(&read_matrix(&matrix)?, &DoubledSpec::new(r, s)?)?))
        }
        Command::Ex(args) => run_search(&args, None),
        Command::Lx { k, search } => run_search(&search, Some(k)),
        Command::GRatio { p, s, n, m, k, budget, cache } => {
            let solver = cache.solver(budget.budget()?)?;
            println!("{}", compute_g(&solver, n, m, k, &read_pattern(&p)?, s)?);
            Ok(EXIT_TRUE)
        }
        Command::Rec { kind, s, j, table } => {
            if table {
                print!("{}", RecurrenceTable::build(kind, s, j)?.to_tsv());
            } else {
                println!("{}", recurrence_value(kind, s, j)?);
            }
            Ok(EXIT_TRUE)
        }
        Command::Alpha { j, n } => {
            match j {
                Some(j) => println!("{}", alpha_j(j, n)?),
                None => println!("{}", alpha(n)?),
            }
            Ok(EXIT_TRUE)
        }
        Command::GenAt { t } => {
            print!("{}", write_pattern(&Pattern::alternating(t)?));
            Ok(EXIT_TRUE)
        }
        Command::Verify(args) => run_verify(&args),
        Command::Cache { action, cache } => {
            let path = cache.cache.context("no cache path (use --cache or FORMEX_CACHE)")?;
            let mut store = open_cache(&path)?;
            match action {
                CacheAction::Ls => {
                    println!("key\tmode\tshape\tvalue\tstatus\tproblem");
                    for rec in store.records() {
                        println!("{}\t{}\t{}\t{}\t{}\t{}", &rec.key[..16], rec.mode, rec.shape, rec.value, rec.status, rec.canonical);
                    }
                }
                CacheAction::Gc => {
                    let skipped = store.skipped();
                    let kept = store.gc()?;
                    println!("kept {kept} records, dropped {skipped} unreadable lines");
                }
            }
            Ok(EXIT_TRUE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
