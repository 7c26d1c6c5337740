use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _, Result};
use cdomain::domain::{build_domain_par, size_par};
use cdomain::formats::{parse_domain, parse_tls, parse_trs, write_domain};
use cdomain::iso::isomorphic_hash;
use cdomain::orderings::{init_by_scheme, init_tuples, named_scheme, TupleOrdering};
use cdomain::search::{
    dfs_search, prs_search_resumable, size_score, write_results, Checkpoint, SearchConfig, SearchOrdering,
};
use cdomain::subsets::subset_states_any_ordering;
use cdomain::{ConstraintList, NeverRule, Pattern, Score};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

mod verify;

const EXIT_DATA: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Build, count, canonicalize and search domains of linear orders.
#[derive(Parser)]
#[command(name = "cdomain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a domain, write it to a file and print its size.
    Build {
        #[command(flatten)]
        source: Source,
        /// Where to write the domain; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Count a domain without building it.
    Size {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write the normal form of a domain file.
    Hash {
        domain: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Search for large Condorcet domains.
    Search(SearchArgs),
    /// Print the states of a TRS restricted to every t-subset.
    Subsets {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        trs: PathBuf,
        #[arg(short)]
        t: usize,
    },
    /// Run a regression suite.
    Verify {
        suite: Suite,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory of sequence files replacing the vendored ones (length4).
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(skip)]
#[command(group(ArgGroup::new("constraints").required(true).args(["scheme", "trs", "tls", "avoid"])))]
struct Source {
    #[arg(short)]
    n: usize,
    /// Built-in scheme: alternating or alternating-flipped.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    trs: Option<PathBuf>,
    #[arg(long)]
    tls: Option<PathBuf>,
    /// Forbid one pattern, such as 2-5-3-1-4, on every tuple of its length.
    #[arg(long)]
    avoid: Option<String>,
    /// Tuple order for --scheme and --avoid: lex, colex or rz.
    #[arg(long)]
    ordering: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(short)]
    n: usize,
    /// Comma-separated candidate rules, e.g. 1N3,2N1,2N3,3N1.
    #[arg(long)]
    rules: Option<String>,
    /// lex, colex, rz or dynamic.
    #[arg(long, default_value = "colex")]
    ordering: String,
    /// Best-first states kept per depth.
    #[arg(long, default_value_t = 1000)]
    frontier_cap: usize,
    #[arg(long)]
    batch: Option<usize>,
    /// Skip states that cannot complete to a lexicographically minimal one.
    #[arg(long)]
    prune_iso: bool,
    /// Stop at the first domain of at least this size.
    #[arg(long)]
    target: Option<u64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Depth-first instead of best-first.
    #[arg(long)]
    dfs: bool,
    #[arg(long)]
    max_results: Option<usize>,
    /// Pause after this many best-first rounds and write --checkpoint.
    #[arg(long, requires = "checkpoint", conflicts_with = "dfs")]
    max_rounds: Option<u64>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, conflicts_with = "dfs")]
    resume: Option<PathBuf>,
    /// Results file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Catalan,
    Length4,
    Alternating,
    K5,
}

/// A problem with the command line rather than with the data.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let is_usage = err.chain().any(|e| {
        e.is::<UsageError>() || matches!(e.downcast_ref::<cdomain::Error>(), Some(cdomain::Error::InvalidArgument(_)))
    });
    if is_usage {
        EXIT_USAGE
    } else {
        EXIT_DATA
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn tuple_ordering(name: Option<&str>, k: usize) -> Result<TupleOrdering> {
    match name {
        Some(s) => s.parse().map_err(|e: cdomain::Error| usage(e.to_string())),
        None if k == 3 => Ok(TupleOrdering::Rz),
        None => Ok(TupleOrdering::Lex),
    }
}

impl Source {
    fn load(&self) -> Result<ConstraintList> {
        let n = self.n;
        if let Some(name) = &self.scheme {
            let scheme = named_scheme(name)?;
            let base = init_tuples(n, 3, tuple_ordering(self.ordering.as_deref(), 3)?)?;
            return Ok(init_by_scheme(&base, |t| Ok::<_, cdomain::Error>(scheme(t)))?);
        }
        if let Some(text) = &self.avoid {
            let pattern: Pattern = text.parse().map_err(|e: cdomain::Error| usage(e.to_string()))?;
            let base = init_tuples(n, pattern.len(), tuple_ordering(self.ordering.as_deref(), pattern.len())?)?;
            return Ok(init_by_scheme(&base, |_| Ok::<_, cdomain::Error>(pattern.clone()))?);
        }
        if self.ordering.is_some() {
            return Err(usage("--ordering applies to --scheme and --avoid only"));
        }
        if let Some(path) = &self.trs {
            return parse_trs(&read(path)?, n).with_context(|| path.display().to_string());
        }
        if let Some(path) = &self.tls {
            return parse_tls(&read(path)?, n).with_context(|| path.display().to_string());
        }
        Err(usage("one of --scheme, --trs, --tls or --avoid is required"))
    }
}

fn parse_rules(text: &str) -> Result<Vec<NeverRule>> {
    text.split(',')
        .map(|r| r.trim().parse::<NeverRule>().map_err(|e| usage(e.to_string())))
        .collect()
}

fn search(args: &SearchArgs) -> Result<()> {
    let mut config = SearchConfig::new(args.n);
    config.ordering = args.ordering.parse::<SearchOrdering>().map_err(|e| usage(e.to_string()))?;
    if let Some(rules) = &args.rules {
        config.candidate_rules = parse_rules(rules)?;
    }
    config.frontier_cap = args.frontier_cap;
    if let Some(batch) = args.batch {
        config.batch = batch;
    }
    config.prune_non_minimal = args.prune_iso;
    config.target = args.target;
    config.jobs = args.jobs.max(1);
    config.max_results = args.max_results;

    let outcome = if args.dfs {
        dfs_search::<Score, _>(&config, size_score)?
    } else {
        let resume = match &args.resume {
            Some(path) => Some(Checkpoint::<Score>::parse(&read(path)?).with_context(|| path.display().to_string())?),
            None => None,
        };
        prs_search_resumable(&config, size_score, resume.as_ref(), args.max_rounds)?
    };

    if let Some(cp) = &outcome.checkpoint {
        let path = args.checkpoint.as_deref().ok_or_else(|| usage("--max-rounds needs --checkpoint"))?;
        fs::write(path, cp.to_text()).with_context(|| format!("cannot write {}", path.display()))?;
        eprintln!("paused; checkpoint written to {}", path.display());
    }
    eprintln!(
        "best={} results={} expanded={} peak={} truncated={} stopped_early={}",
        outcome.results.first().map_or(0, |r| r.1),
        outcome.results.len(),
        outcome.expanded,
        outcome.peak_tracked,
        outcome.truncated,
        outcome.stopped_early
    );
    emit(args.out.as_deref(), &write_results(&outcome.results))
}

fn run_verify(suite: Suite, max_n: Option<usize>, jobs: usize, fixtures: Option<&Path>) -> Result<bool> {
    let checks = match suite {
        Suite::Catalan => verify::catalan_suite(max_n.unwrap_or(6), jobs)?,
        Suite::Length4 => verify::length4_suite(max_n.unwrap_or(8), jobs, fixtures)?,
        Suite::Alternating => verify::alternating_suite(max_n.unwrap_or(11), jobs)?,
        Suite::K5 => verify::k5_suite(max_n.unwrap_or(9), jobs)?,
    };
    if checks.is_empty() {
        return Err(usage("--max-n leaves nothing to check"));
    }
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(failed == 0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Build { source, out, jobs } => {
            let domain = build_domain_par(&source.load()?, jobs.max(1))?;
            match &out {
                Some(path) => {
                    emit(Some(path), &write_domain(&domain))?;
                    println!("size={}", domain.len());
                }
                None => {
                    emit(None, &write_domain(&domain))?;
                    eprintln!("size={}", domain.len());
                }
            }
        }
        Command::Size { source, jobs } => {
            println!("{}", size_par(&source.load()?, jobs.max(1))?);
        }
        Command::Hash { domain, out } => {
            let d = parse_domain(&read(&domain)?, None).with_context(|| domain.display().to_string())?;
            if d.is_empty() {
                return Err(anyhow!("{}: the domain is empty", domain.display()));
            }
            emit(out.as_deref(), &write_domain(&isomorphic_hash(&d)?))?;
        }
        Command::Search(args) => search(&args)?,
        Command::Subsets { n, trs, t } => {
            let list = parse_trs(&read(&trs)?, n).with_context(|| trs.display().to_string())?;
            let mut text = String::new();
            for s in subset_states_any_ordering(&list, t)? {
                text.push_str(&format!("{s}\n"));
            }
            emit(None, &text)?;
        }
        Command::Verify { suite, max_n, jobs, fixtures } => {
            if !run_verify(suite, max_n, jobs.max(1), fixtures.as_deref())? {
                return Ok(EXIT_VERIFY);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
