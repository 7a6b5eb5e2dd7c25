//! `dimspread`: build map families, verify expansion and spreading, compute
//! tensor ranks, and certify or refute rank lower bounds.
//!
//! Exit codes: 0 success / property holds, 1 property refuted (a
//! counterexample is printed), 2 usage or input error, 3 budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dimspread::certify::{certify_lower_bound, check_trace, refute_spreading};
use dimspread::families::{
    matching_maps, measure_expansion, spreading_profile, verify_expander, verify_large_expansion, verify_spreading,
    MapFamily, SpreadingParams, Verdict,
};
use dimspread::format;
use dimspread::pipeline::{run_pipeline, Outcome, PipelineOptions};
use dimspread::tensor::{tensor_rank_bruteforce, Tensor3, TensorRank};
use dimspread::{report, Budgets, Config, Error, FieldSpec, Mode, Rational};

#[derive(Parser)]
#[command(name = "dimspread", version, about = "Dimension-spreading families and tensor rank lower bounds")]
struct Cli {
    /// Worker threads for enumeration and search (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(flatten)]
    budgets: BudgetArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BudgetArgs {
    /// Maximum number of subspaces enumerated per dimension.
    #[arg(long, global = true, value_parser = positive)]
    enumeration_cap: Option<u128>,
    /// Maximum nominal number of words D^t.
    #[arg(long, global = true, value_parser = positive)]
    word_cap: Option<u128>,
    /// Maximum number of rank-one candidates in a rank search.
    #[arg(long, global = true, value_parser = positive)]
    pool_cap: Option<u128>,
    /// Maximum number of candidate subsets per rank level.
    #[arg(long, global = true, value_parser = positive)]
    combination_cap: Option<u128>,
}

#[derive(Args, Clone, Copy)]
struct ModeArgs {
    /// Check this many random subspaces per dimension instead of all of them.
    #[arg(long, value_name = "COUNT", requires = "seed", value_parser = positive_u64)]
    sampled: Option<u64>,
    /// Seed for sampled mode.
    #[arg(long, requires = "sampled")]
    seed: Option<u64>,
}

impl ModeArgs {
    fn mode(self) -> Mode {
        match (self.sampled, self.seed) {
            (Some(count), Some(seed)) => Mode::Sampled { count, seed },
            _ => Mode::Exhaustive,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a `.maps` file.
    BuildMaps {
        #[command(subcommand)]
        kind: BuildKind,
        #[command(flatten)]
        out: Output,
    },
    /// Close a family under transposition and add the identity.
    Symmetrize {
        maps: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// All distinct products of exactly T maps.
    Words {
        maps: PathBuf,
        #[arg(short)]
        t: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Check (s,t)-spreading.
    VerifySpreading {
        maps: PathBuf,
        #[arg(short)]
        s: usize,
        #[arg(short)]
        t: usize,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Check the tau-expander property.
    VerifyExpander {
        maps: PathBuf,
        #[arg(long, value_parser = rational)]
        tau: Rational,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Check expansion of subspaces above half dimension (transpose-closed families with I).
    VerifyLargeExpansion {
        maps: PathBuf,
        #[arg(long, value_parser = rational)]
        tau: Rational,
    },
    /// Measure the exact expansion factor tau*.
    Measure {
        maps: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Largest spreading t for every s.
    Profile {
        maps: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Stack the maps of a family as tensor slices.
    BuildTensor {
        maps: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Exact tensor rank by exhaustive search up to R_MAX.
    TensorRank {
        tensor: PathBuf,
        #[arg(long)]
        r_max: usize,
        /// Write the minimal decomposition as a `.dec` file.
        #[arg(long)]
        decomposition: Option<PathBuf>,
    },
    /// Certify the rank lower bound n + t - s.
    Certify {
        maps: PathBuf,
        #[arg(short)]
        s: usize,
        #[arg(short)]
        t: usize,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Turn a short decomposition into a subspace that fails to spread.
    Refute {
        maps: PathBuf,
        decomposition: PathBuf,
        #[arg(short)]
        s: usize,
        #[arg(short)]
        t: usize,
    },
    /// Symmetrize, measure, take words, verify spreading, certify.
    Pipeline {
        maps: PathBuf,
        #[arg(long, value_parser = rational)]
        epsilon: Rational,
        /// Skip the brute-force rank cross-check above this n.
        #[arg(long, default_value_t = 3)]
        cross_check_max_n: usize,
        #[command(flatten)]
        mode: ModeArgs,
    },
}

#[derive(Subcommand)]
enum BuildKind {
    /// {I, S+1, S-1} with partial (non-cyclic) shifts.
    Shifts {
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        field: u64,
    },
    /// Identity plus partial shifts by +-1, +-2, +-4, ...
    Dyadic {
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        field: u64,
    },
    /// One 0/1 map per monotone matching listed in FILE.
    Matchings {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        field: u64,
    },
    /// COUNT uniformly random maps.
    Random {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        field: u64,
    },
    /// Validate an existing `.maps` file and rewrite it canonically.
    FromFile { file: PathBuf },
}

fn positive(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive(s).and_then(|v| u64::try_from(v).map_err(|e| e.to_string()))
}

fn rational(s: &str) -> Result<Rational, String> {
    s.trim().parse::<Rational>().map_err(|_| format!("`{s}` is not a rational a/b"))
}

/// A refutation is reported as a result, not an error.
enum Done {
    Holds(String),
    Refuted(String),
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn read_maps(path: &Path) -> Result<MapFamily, Error> {
    format::parse_maps(&read(path)?)
}

fn emit(out: &Output, text: String) -> Result<Done, Error> {
    match &out.output {
        Some(p) => {
            fs::write(p, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
            Ok(Done::Holds(String::new()))
        }
        None => Ok(Done::Holds(text)),
    }
}

fn verdict(v: &Verdict) -> Done {
    let text = report::verdict(v);
    if v.holds() {
        Done::Holds(text)
    } else {
        Done::Refuted(text)
    }
}

fn run(cli: Cli, cfg: &Config) -> Result<Done, Error> {
    match cli.command {
        Command::BuildMaps { kind, out } => {
            let fam = match kind {
                BuildKind::Shifts { n, field } => MapFamily::shifts(FieldSpec::new(field)?, n)?,
                BuildKind::Dyadic { n, field } => MapFamily::dyadic_shifts(FieldSpec::new(field)?, n)?,
                BuildKind::Matchings { file, field } => {
                    matching_maps(FieldSpec::new(field)?, &format::parse_matchings(&read(&file)?)?)?
                }
                BuildKind::Random { n, count, seed, field } => MapFamily::random(FieldSpec::new(field)?, n, count, seed)?,
                BuildKind::FromFile { file } => read_maps(&file)?,
            };
            emit(&out, format::write_maps(&fam))
        }
        Command::Symmetrize { maps, out } => emit(&out, format::write_maps(&read_maps(&maps)?.symmetrize())),
        Command::Words { maps, t, out } => emit(&out, format::write_maps(&read_maps(&maps)?.words(t, &cfg.budgets)?)),
        Command::VerifySpreading { maps, s, t, mode } => {
            let fam = read_maps(&maps)?;
            Ok(verdict(&verify_spreading(&fam, SpreadingParams::new(s, t), mode.mode(), cfg)?))
        }
        Command::VerifyExpander { maps, tau, mode } => {
            let fam = read_maps(&maps)?;
            Ok(verdict(&verify_expander(&fam, tau, mode.mode(), cfg)?))
        }
        Command::VerifyLargeExpansion { maps, tau } => {
            let rep = verify_large_expansion(&read_maps(&maps)?, tau, cfg)?;
            let text = report::large_expansion(&rep);
            Ok(if rep.verdict.holds() { Done::Holds(text) } else { Done::Refuted(text) })
        }
        Command::Measure { maps, mode } => {
            let rep = measure_expansion(&read_maps(&maps)?, mode.mode(), cfg)?;
            Ok(Done::Holds(report::expansion(&rep)))
        }
        Command::Profile { maps, mode } => {
            let fam = read_maps(&maps)?;
            let p = spreading_profile(&fam, mode.mode(), cfg)?;
            Ok(Done::Holds(report::profile(&p, fam.n())))
        }
        Command::BuildTensor { maps, out } => emit(&out, format::write_tensor(&Tensor3::from_family(&read_maps(&maps)?))),
        Command::TensorRank { tensor, r_max, decomposition } => {
            let t = format::parse_tensor(&read(&tensor)?)?;
            match tensor_rank_bruteforce(&t, r_max, cfg)? {
                TensorRank::Exact { rank, decomposition: d } => {
                    if let Some(p) = decomposition {
                        fs::write(&p, format::write_decomposition(&d))
                            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
                    }
                    Ok(Done::Holds(format!("rank {rank}\n")))
                }
                TensorRank::AboveMax { r_max } => Ok(Done::Holds(format!("rank > {r_max}\n"))),
            }
        }
        Command::Certify { maps, s, t, mode } => {
            let fam = read_maps(&maps)?;
            match certify_lower_bound(&fam, SpreadingParams::new(s, t), mode.mode(), cfg) {
                Ok(c) => Ok(Done::Holds(report::certificate(&c))),
                Err(Error::NotSpreading(cx)) => Ok(Done::Refuted(format!("verdict: refuted\n{}", report::counterexample(&cx)))),
                Err(e) => Err(e),
            }
        }
        Command::Refute { maps, decomposition, s, t } => {
            let fam = read_maps(&maps)?;
            let d = format::parse_decomposition(&read(&decomposition)?)?;
            let params = SpreadingParams::new(s, t);
            let trace = refute_spreading(&fam, &d, params)?;
            let mut text = report::trace(&trace);
            text.push_str(&format!("trace-valid: {}\n", check_trace(&fam, params, &trace)));
            Ok(Done::Refuted(text))
        }
        Command::Pipeline { maps, epsilon, cross_check_max_n, mode } => {
            let fam = read_maps(&maps)?;
            let opts = PipelineOptions {
                cross_check_max_n,
                ..PipelineOptions::new(epsilon, mode.mode())
            };
            let rep = run_pipeline(&fam, opts, cfg)?;
            let text = rep.render();
            Ok(match rep.outcome {
                Outcome::Certified => Done::Holds(text),
                Outcome::Refuted { .. } => Done::Refuted(text),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let defaults = Budgets::default();
    let b = &cli.budgets;
    let budgets = Budgets {
        enumeration_cap: b.enumeration_cap.unwrap_or(defaults.enumeration_cap),
        word_cap: b.word_cap.unwrap_or(defaults.word_cap),
        pool_cap: b.pool_cap.unwrap_or(defaults.pool_cap),
        combination_cap: b.combination_cap.unwrap_or(defaults.combination_cap),
    };
    let cfg = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        Some(n) => Config::with_budgets(n, budgets),
        None => Config::with_budgets(std::thread::available_parallelism().map_or(1, |n| n.get()), budgets),
    };

    match run(cli, &cfg) {
        Ok(Done::Holds(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(Done::Refuted(text)) => {
            print!("{text}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e.root() {
                Error::BudgetExceeded { .. } => ExitCode::from(3),
                Error::NotSpreading(cx) | Error::NotExpander(cx) => {
                    print!("{}", report::counterexample(cx));
                    ExitCode::from(1)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}
