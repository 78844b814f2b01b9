//! `abbrev`: command-line access to the law-of-abbreviation toolkit.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use abbrev_core::coding::{optimal_nonsingular_assign, ud_assign, CodeAssignment};
use abbrev_core::corpus::tokenize_corpus;
use abbrev_core::correlation::{rho_bounds, spearman_rho, RhoBounds, BOUNDS_TOLERANCE};
use abbrev_core::dataset::{read_dataset, rows_to_repertoire, write_dataset};
use abbrev_core::randtyping::RandomTypingModel;
use abbrev_core::report::{format_f64, law_report, rank_rows, to_json, to_tsv, AnalysisReport, ReportOptions};
use abbrev_core::significance::{permutation_test, Mode, PermutationTestConfig, Statistic, DEFAULT_EXHAUSTIVE_CAP};
use abbrev_core::swapdyn::{minimize_cost, verify_swap_formulas, InitialState, Minimization};
use abbrev_core::{CostModel, Repertoire};

#[derive(Parser)]
#[command(name = "abbrev", version, about = "Compression and the law of abbreviation")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output format. Defaults to tsv for `encode` and `rtgen`, json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Cost function: identity, power:<beta> or log1p.
    #[arg(long, global = true, default_value = "identity")]
    cost: CostModel,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Scheme {
    Nonsingular,
    Ud,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Initial {
    Both,
    Plus,
    Minus,
}

#[derive(Args)]
struct TestArgs {
    /// Monte Carlo replicates.
    #[arg(long, default_value_t = 9999)]
    permutations: u64,
    /// Enumerate all V! pairings instead of sampling (V <= 8).
    #[arg(long)]
    exhaustive: bool,
}

impl TestArgs {
    fn mode(&self) -> Mode {
        if self.exhaustive {
            Mode::Exhaustive
        } else {
            Mode::MonteCarlo
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Cost, correlations, bounds and p-values for a dataset or a text.
    Analyze {
        /// Dataset file (`id<TAB>frequency<TAB>magnitude`); `-` for stdin.
        dataset: Option<PathBuf>,
        /// Tokenise this UTF-8 text instead of reading a dataset.
        #[arg(long, conflicts_with = "dataset")]
        text: Option<PathBuf>,
        /// Write `rank, id, probability, magnitude` rows here.
        #[arg(long)]
        plot_data: Option<PathBuf>,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Optimal code table for a dataset.
    Encode {
        dataset: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        alphabet_size: usize,
        #[arg(long, value_enum, default_value_t = Scheme::Nonsingular)]
        scheme: Scheme,
    },
    /// Hill-climb on the mean cost by swapping magnitudes.
    Swapsim {
        dataset: Option<PathBuf>,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Check the closed-form swap derivatives against brute force.
    Verify {
        #[arg(long, default_value_t = 1)]
        vmin: usize,
        #[arg(long, default_value_t = 30)]
        vmax: usize,
        /// Swaps per V and initial state.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Initial::Both)]
        initial: Initial,
    },
    /// Generate a random-typing sample as a dataset.
    Rtgen {
        #[arg(long)]
        stop_probability: f64,
        #[arg(long, default_value_t = 2)]
        alphabet_size: usize,
        #[arg(long, default_value_t = 1)]
        min_length: u32,
        /// Number of tokens to draw.
        #[arg(long)]
        count: u64,
    },
    /// Permutation test of one statistic.
    Sigtest {
        dataset: Option<PathBuf>,
        /// mean_cost, tau, rho or r.
        #[arg(long, default_value = "mean_cost")]
        statistic: Statistic,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Daniels and Durbin intervals for rho given tau.
    Bounds {
        #[arg(long, conflicts_with = "dataset", allow_negative_numbers = true)]
        tau: Option<f64>,
        dataset: Option<PathBuf>,
    },
}

fn read_input(path: Option<&Path>) -> Result<Box<dyn Read>> {
    match path {
        None => Ok(Box::new(io::stdin())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdin())),
        Some(p) => Ok(Box::new(File::open(p).with_context(|| format!("cannot open {}", p.display()))?)),
    }
}

fn load_dataset(path: Option<&Path>) -> Result<Repertoire> {
    let name = path.map_or("<stdin>".into(), |p| p.display().to_string());
    let rows = read_dataset(read_input(path)?).with_context(|| format!("reading {name}"))?;
    rows_to_repertoire(&rows).with_context(|| format!("in {name}"))
}

fn emit<T: Serialize>(out: &mut impl Write, format: Format, value: &T) -> Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", to_json(value))?,
        Format::Tsv => write!(out, "{}", to_tsv(value))?,
    }
    Ok(())
}

#[derive(Serialize)]
struct CodeRow<'a> {
    rank: usize,
    id: &'a str,
    probability: f64,
    code: &'a str,
    length: u32,
}

#[derive(Serialize)]
struct EncodeOutput<'a> {
    scheme: Scheme,
    alphabet_size: usize,
    cost_model: CostModel,
    mean_length: f64,
    mean_cost: f64,
    max_length: u32,
    max_length_count: u64,
    codes: Vec<CodeRow<'a>>,
}

fn encode_output<'a>(r: &'a Repertoire, code: &'a CodeAssignment, scheme: Scheme, g: CostModel) -> EncodeOutput<'a> {
    let codes = code
        .order
        .iter()
        .zip(code.codes.iter().zip(&code.lengths))
        .enumerate()
        .map(|(k, (&idx, (c, &length)))| CodeRow {
            rank: k + 1,
            id: &r.ids()[idx],
            probability: r.probabilities()[idx],
            code: c,
            length,
        })
        .collect();
    EncodeOutput {
        scheme,
        alphabet_size: code.alphabet_size,
        cost_model: g,
        mean_length: code.mean_cost(r, &CostModel::Identity),
        mean_cost: code.mean_cost(r, &g),
        max_length: code.max_length,
        max_length_count: code.max_length_count,
        codes,
    }
}

#[derive(Serialize)]
struct SwapsimOutput<'a> {
    minimization: &'a Minimization,
    initial_tau: f64,
    report: AnalysisReport,
}

#[derive(Serialize)]
struct GeneratedRow<'a> {
    id: &'a str,
    frequency: u64,
    magnitude: usize,
}

#[derive(Serialize)]
struct RtgenOutput<'a> {
    stop_probability: f64,
    alphabet_size: usize,
    min_length: u32,
    slope: f64,
    intercept: f64,
    tokens: u64,
    types: usize,
    rows: Vec<GeneratedRow<'a>>,
}

#[derive(Serialize)]
struct BoundsOutput {
    #[serde(flatten)]
    bounds: RhoBounds,
    rho: Option<f64>,
    rho_within_bounds: Option<bool>,
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let g = cli.cost;
    let json_default = cli.format.unwrap_or(Format::Json);
    let report_options =
        |test: &TestArgs| ReportOptions { mode: test.mode(), replicates: test.permutations, seed: cli.seed };

    match &cli.command {
        Command::Analyze { dataset, text, plot_data, test } => {
            let r = match text {
                Some(path) => {
                    let table = tokenize_corpus(read_input(Some(path))?)
                        .with_context(|| format!("reading {}", path.display()))?;
                    table.to_repertoire()?
                }
                None => load_dataset(dataset.as_deref())?,
            };
            if let Some(path) = plot_data {
                let mut f =
                    BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
                writeln!(f, "rank\tid\tprobability\tmagnitude")?;
                for (rank, id, p, l) in rank_rows(&r) {
                    writeln!(f, "{rank}\t{id}\t{}\t{l}", format_f64(p))?;
                }
                f.flush()?;
            }
            emit(&mut out, json_default, &law_report(&r, &g, &report_options(test))?)?;
        }
        Command::Encode { dataset, alphabet_size, scheme } => {
            let r = load_dataset(dataset.as_deref())?;
            let code = match scheme {
                Scheme::Nonsingular => optimal_nonsingular_assign(&r, *alphabet_size)?,
                Scheme::Ud => ud_assign(&r, *alphabet_size)?,
            };
            let table = encode_output(&r, &code, *scheme, g);
            match cli.format.unwrap_or(Format::Tsv) {
                Format::Json => emit(&mut out, Format::Json, &table)?,
                Format::Tsv => {
                    writeln!(out, "# mean_length\t{}", format_f64(table.mean_length))?;
                    writeln!(out, "# mean_cost\t{}", format_f64(table.mean_cost))?;
                    writeln!(out, "rank\tid\tprobability\tcode\tlength")?;
                    for row in &table.codes {
                        writeln!(
                            out,
                            "{}\t{}\t{}\t{}\t{}",
                            row.rank,
                            row.id,
                            format_f64(row.probability),
                            row.code,
                            row.length
                        )?;
                    }
                }
            }
        }
        Command::Swapsim { dataset, test } => {
            let r = load_dataset(dataset.as_deref())?;
            let initial_tau = abbrev_core::correlation::kendall_tau(&r)?;
            let m = minimize_cost(&r, &g, cli.seed)?;
            let report = law_report(&m.repertoire, &g, &report_options(test))?;
            emit(&mut out, json_default, &SwapsimOutput { minimization: &m, initial_tau, report })?;
        }
        Command::Verify { vmin, vmax, trials, initial } => {
            if vmin > vmax || *vmin == 0 {
                bail!("need 1 <= vmin <= vmax, got {vmin}..{vmax}");
            }
            let states: &[InitialState] = match initial {
                Initial::Both => &[InitialState::TauPlusOne, InitialState::TauMinusOne],
                Initial::Plus => &[InitialState::TauPlusOne],
                Initial::Minus => &[InitialState::TauMinusOne],
            };
            let report = verify_swap_formulas(*vmin..=*vmax, *trials, states, cli.seed)?;
            emit(&mut out, json_default, &report)?;
            out.flush()?;
            eprintln!("{} mismatches", report.mismatch_count);
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Rtgen { stop_probability, alphabet_size, min_length, count } => {
            let model = RandomTypingModel::new(*stop_probability, *alphabet_size, *min_length)?;
            let sample = model.generate_tokens(*count, cli.seed)?;
            let rows = sample.rows();
            match cli.format.unwrap_or(Format::Tsv) {
                Format::Tsv => write_dataset(&mut out, rows.iter().map(|(w, n, l)| (w, *n as f64, *l as f64)), true)?,
                Format::Json => emit(
                    &mut out,
                    Format::Json,
                    &RtgenOutput {
                        stop_probability: model.stop_probability(),
                        alphabet_size: model.alphabet_size(),
                        min_length: model.min_length(),
                        slope: model.slope(),
                        intercept: model.intercept(),
                        tokens: sample.tokens,
                        types: rows.len(),
                        rows: rows
                            .iter()
                            .map(|(w, n, l)| GeneratedRow { id: w, frequency: *n, magnitude: *l })
                            .collect(),
                    },
                )?,
            }
        }
        Command::Sigtest { dataset, statistic, test } => {
            let r = load_dataset(dataset.as_deref())?;
            let config = PermutationTestConfig {
                statistic: *statistic,
                mode: test.mode(),
                replicates: test.permutations,
                seed: cli.seed,
                exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            };
            emit(&mut out, json_default, &permutation_test(&r, &g, &config)?)?;
        }
        Command::Bounds { tau, dataset } => {
            let output = match tau {
                Some(t) => BoundsOutput { bounds: rho_bounds(*t)?, rho: None, rho_within_bounds: None },
                None => {
                    let r = load_dataset(dataset.as_deref())?;
                    let bounds = rho_bounds(abbrev_core::correlation::kendall_tau(&r)?)?;
                    let rho = spearman_rho(&r)?;
                    let rho_within_bounds = rho.map(|x| bounds.contains(x, BOUNDS_TOLERANCE));
                    BoundsOutput { bounds, rho, rho_within_bounds }
                }
            };
            emit(&mut out, json_default, &output)?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("abbrev: {e:#}");
            ExitCode::FAILURE
        }
    }
}
