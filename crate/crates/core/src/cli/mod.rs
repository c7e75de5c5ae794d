//! The `dimdecon` command line.
//!
//! Exit status is 0 on success, 1 for bad input (arguments, files), and 2
//! for internal failures. Diagnostics go to standard error.

mod report;
mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bits::{format_dims, parse_dims, BitString, Grid};
use crate::codec::{self, BinarizationScheme, PbmFormat};
use crate::ctm::{self, CtmTable, MachineClass};
use crate::error::{Error, Result};
use crate::measures::{Measure, Scorer};
use crate::partition::{
    self, EnumerationMode, PartitionCandidate, ScoreBasis, SweepConfig, DEFAULT_SPIKE_WINDOW,
    DEFAULT_Z_THRESHOLD,
};
use crate::perturb::{self, FlipAmount, Perturbation};

pub use report::{parse_sweep_csv, sweep_csv};
pub use svg::sweep_svg;

#[derive(Debug, Parser)]
#[command(
    name = "dimdecon",
    version,
    about = "Recover the original layout of a linear bit stream"
)]
struct Cli {
    /// Worker threads for table building, sweeps and curves (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build or inspect CTM tables.
    #[command(subcommand)]
    Table(TableCommand),
    /// Score one input with a complexity measure; prints JSON.
    Score(ScoreArgs),
    /// Score every candidate layout of a stream.
    Sweep(SweepArgs),
    /// Detect downward spikes in a sweep CSV; prints JSON.
    Spikes(SpikesArgs),
    /// Apply a perturbation and write the result.
    Perturb(PerturbArgs),
    /// Score a stream under increasing numbers of random flips.
    Curve(CurveArgs),
    /// Write a layout and its symmetry variants.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Subcommand)]
enum TableCommand {
    /// Enumerate a machine class and write its table.
    Build {
        /// Number of non-halting states.
        #[arg(long, default_value_t = MachineClass::DEFAULT_STATES)]
        states: u32,
        /// Steps after which a machine counts as non-halting.
        #[arg(long, default_value_t = MachineClass::DEFAULT_STEP_BUDGET)]
        step_budget: u32,
        /// Work units the enumeration is split into.
        #[arg(long, default_value_t = 64)]
        shards: u64,
        /// Table file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a table file.
    Inspect {
        file: PathBuf,
        /// Print JSON instead of a text summary.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Bit file (0/1 and whitespace), PBM image (P1/P4), or text with --binarize. `-` reads stdin.
    input: PathBuf,
    /// Treat the input as text and binarize it: vowel, space or ascii8.
    #[arg(long)]
    binarize: Option<BinarizationScheme>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// entropy, compress or bdm.
    #[arg(long)]
    measure: Measure,
    /// CTM table file (required for bdm).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Block shape for grids, e.g. 2x4 or 2x2x2.
    #[arg(long)]
    block_shape: Option<String>,
    /// Block length for 1D inputs (entropy and bdm).
    #[arg(long)]
    block_len: Option<usize>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    /// Lay a bit stream out with these dims before scoring.
    #[arg(long)]
    dims: Option<String>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Number of dimensions in each candidate layout (2 or 3).
    #[arg(long, default_value_t = 2)]
    ndim: usize,
    #[command(flatten)]
    measure: MeasureArgs,
    /// full or divisors.
    #[arg(long, default_value = "full")]
    mode: EnumerationMode,
    /// Second dimension held fixed in 3D full sweeps.
    #[arg(long)]
    second: Option<usize>,
    /// Leading-dimension range for 3D full sweeps, as LO:HI.
    #[arg(long)]
    leading: Option<String>,
    /// raw, or full (scores scaled to the whole stream length).
    #[arg(long, default_value = "full")]
    basis: String,
    /// Odd window for the local median and MAD.
    #[arg(long, default_value_t = DEFAULT_SPIKE_WINDOW)]
    window: usize,
    /// Minimum depth reported as a spike, in MADs.
    #[arg(long, default_value_t = DEFAULT_Z_THRESHOLD)]
    z: f64,
    /// Write one row per candidate as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Plot the sweep as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the full series as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct SpikesArgs {
    /// CSV written by `sweep --csv`.
    csv: PathBuf,
    /// Odd window for the local median and MAD.
    #[arg(long, default_value_t = DEFAULT_SPIKE_WINDOW)]
    window: usize,
    /// Minimum depth reported as a spike, in MADs.
    #[arg(long, default_value_t = DEFAULT_Z_THRESHOLD)]
    z: f64,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    /// flip, scramble, complement or amplify.
    #[arg(long)]
    kind: String,
    /// Number of bits to flip.
    #[arg(long)]
    count: Option<usize>,
    /// Share of bits to flip, in [0, 1].
    #[arg(long)]
    rate: Option<f64>,
    /// Segment length for scramble.
    #[arg(long)]
    segment_len: Option<usize>,
    /// Amplification factors, e.g. 6x6.
    #[arg(long)]
    factors: Option<String>,
    /// Layout of a bit-stream input (needed by amplify).
    #[arg(long)]
    dims: Option<String>,
    /// Seed for flip and scramble.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Flip counts: LO:HI, LO:HI:STEP or a comma list.
    #[arg(long)]
    schedule: String,
    /// Trials per magnitude.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Base seed; trial seeds are derived from it.
    #[arg(long)]
    seed: u64,
    /// Write the curve as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    /// Layout to reconstruct, e.g. 23x73.
    #[arg(long)]
    dims: String,
    /// Directory for the variant files.
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    input: InputArgs,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit status.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = std::panic::catch_unwind(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = cli.jobs {
            builder = builder.num_threads(j.max(1));
        }
        let pool = builder
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        pool.install(|| run(cli.command))
    });
    match outcome {
        Ok(Ok(())) => 0,
        // the reader went away; nothing left to report
        Ok(Err(Error::Io(e))) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Ok(Err(e)) => {
            eprintln!("dimdecon: {e}");
            if e.is_input_error() {
                1
            } else {
                2
            }
        }
        Err(_) => {
            eprintln!("dimdecon: internal error");
            2
        }
    }
}

enum Input {
    Bits(BitString),
    Grid(Grid),
}

impl Input {
    fn into_bits(self) -> BitString {
        match self {
            Input::Bits(b) => b,
            Input::Grid(g) => g.to_bitstring(),
        }
    }
}

fn read_input(args: &InputArgs) -> Result<Input> {
    let raw = if args.input == Path::new("-") {
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)?;
        buf
    } else {
        std::fs::read(&args.input)?
    };
    if let Some(scheme) = args.binarize {
        let text = std::str::from_utf8(&raw).map_err(|e| Error::Parse {
            offset: e.valid_up_to(),
            msg: "input is not UTF-8 text".into(),
        })?;
        return Ok(Input::Bits(codec::binarize_text(text, scheme)?));
    }
    if raw.starts_with(b"P1") || raw.starts_with(b"P4") {
        Ok(Input::Grid(codec::parse_pbm(&raw)?))
    } else {
        Ok(Input::Bits(codec::parse_bits(&raw)?))
    }
}

fn load_table(path: &Option<PathBuf>, measure: Measure) -> Result<Option<CtmTable>> {
    match (path, measure) {
        (Some(p), _) => Ok(Some(CtmTable::load(p)?)),
        (None, Measure::Bdm) => Err(Error::MissingTable),
        (None, _) => Ok(None),
    }
}

fn build_scorer<'a>(
    args: &MeasureArgs,
    table: Option<&'a CtmTable>,
    ndim: usize,
) -> Result<Scorer<'a>> {
    let mut scorer = Scorer::new(args.measure, table)?;
    if let Some(shape) = &args.block_shape {
        scorer = scorer.with_block_shape(parse_dims(shape)?);
    }
    if ndim == 1 {
        if let Some(len) = args.block_len {
            scorer = scorer.with_block_shape(vec![len]);
        }
    }
    Ok(scorer)
}

fn write_output(path: Option<&Path>, data: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, data)?,
        None => std::io::stdout().lock().write_all(data)?,
    }
    Ok(())
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let s =
        serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    writeln!(std::io::stdout().lock(), "{s}")?;
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Table(TableCommand::Build {
            states,
            step_budget,
            shards,
            out,
        }) => {
            let class = MachineClass::new(states, step_budget)?;
            if !class.full_coverage() {
                eprintln!("warning: step budget {step_budget} is below the busy-beaver bound for {states} states");
            }
            let table = ctm::build_table(&class, shards)?;
            table.save(&out)?;
            eprintln!(
                "{} machines, {} halted, {} distinct outputs -> {}",
                table.ran_total(),
                table.halted_total(),
                table.raw_counts().len(),
                out.display()
            );
            Ok(())
        }
        Command::Table(TableCommand::Inspect { file, json }) => {
            let table = CtmTable::load(&file)?;
            let summary = report::TableSummary::of(&table);
            if json {
                print_json(&summary)
            } else {
                write!(std::io::stdout().lock(), "{summary}")?;
                Ok(())
            }
        }
        Command::Score(args) => {
            let table = load_table(&args.measure.table, args.measure.measure)?;
            let input = read_input(&args.input)?;
            let input = match (&args.dims, input) {
                (Some(d), i) => Input::Grid(partition::reshape(
                    &i.into_bits(),
                    &layout(parse_dims(d)?, usize::MAX)?,
                )?),
                (None, i) => i,
            };
            let score = match &input {
                Input::Bits(x) => build_scorer(&args.measure, table.as_ref(), 1)?.score_bits(x)?,
                Input::Grid(g) => {
                    build_scorer(&args.measure, table.as_ref(), g.ndim())?.score_grid(g)?
                }
            };
            if let Some(w) = &score.warning {
                eprintln!("warning: {w}");
            }
            print_json(&score)
        }
        Command::Sweep(args) => run_sweep(args),
        Command::Spikes(args) => {
            let text = std::fs::read_to_string(&args.csv)?;
            let series = parse_sweep_csv(&text)?;
            print_json(&partition::detect_spikes(&series, args.window, args.z)?)
        }
        Command::Perturb(args) => run_perturb(args),
        Command::Curve(args) => {
            let table = load_table(&args.measure.table, args.measure.measure)?;
            let scorer = build_scorer(&args.measure, table.as_ref(), 1)?;
            let x = read_input(&args.input)?.into_bits();
            let schedule = perturb::parse_schedule(&args.schedule)?;
            let curve = perturb::perturbation_curve(
                &x,
                &schedule,
                |m| Perturbation::FlipRandom(FlipAmount::Count(m)),
                &scorer,
                args.trials,
                args.seed,
            )?;
            match &args.csv {
                Some(p) => std::fs::write(p, report::curve_csv(&curve))?,
                None => print_json(&curve)?,
            }
            Ok(())
        }
        Command::Reconstruct(args) => {
            let x = read_input(&args.input)?.into_bits();
            let candidate = layout(parse_dims(&args.dims)?, x.len())?;
            std::fs::create_dir_all(&args.out_dir)?;
            let mut written = Vec::new();
            for (variant, grid) in partition::reconstruct(&x, &candidate)? {
                let path = if grid.ndim() == 2 {
                    let p = args
                        .out_dir
                        .join(format!("{variant}-{}.pbm", format_dims(grid.dims())));
                    codec::write_pbm(&grid, &p, PbmFormat::Plain)?;
                    p
                } else {
                    let p = args
                        .out_dir
                        .join(format!("{variant}-{}.bits", format_dims(grid.dims())));
                    codec::write_bits(&grid.to_bitstring(), &p)?;
                    p
                };
                written.push(serde_json::json!({
                    "variant": variant.to_string(),
                    "dims": grid.dims(),
                    "path": path,
                }));
            }
            print_json(&written)
        }
    }
}

/// A candidate for explicit dims; `stream_len = usize::MAX` means "exactly the dims".
fn layout(dims: Vec<usize>, stream_len: usize) -> Result<PartitionCandidate> {
    let covered: usize = dims.iter().product();
    let n = if stream_len == usize::MAX {
        covered
    } else {
        stream_len
    };
    if covered > n {
        return Err(Error::Dimension(format!(
            "dims {} need {covered} bits, stream has {n}",
            format_dims(&dims)
        )));
    }
    Ok(PartitionCandidate::new(dims, n))
}

fn run_sweep(args: SweepArgs) -> Result<()> {
    let table = load_table(&args.measure.table, args.measure.measure)?;
    let scorer = build_scorer(&args.measure, table.as_ref(), args.ndim)?;
    let x = read_input(&args.input)?.into_bits();
    let mut config = SweepConfig::new(args.ndim, args.mode);
    config.second_dim = args.second;
    config.basis = match args.basis.as_str() {
        "raw" => ScoreBasis::Raw,
        "full" => ScoreBasis::FullStream,
        other => return Err(Error::InvalidArgument(format!("unknown basis {other:?}"))),
    };
    if let Some(r) = &args.leading {
        let (lo, hi) = r
            .split_once(':')
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .ok_or_else(|| Error::InvalidArgument(format!("bad leading range {r:?}")))?;
        config.leading_range = Some((lo, hi));
    }
    let series = partition::sweep(&x, &config, &scorer)?;
    for w in &series.warnings {
        eprintln!("warning: {w}");
    }
    if !series.skipped.is_empty() {
        eprintln!(
            "skipped {} candidates discarding more than 25% of the stream",
            series.skipped.len()
        );
    }
    let spikes = partition::detect_spikes(&series, args.window, args.z);
    if let Some(p) = &args.csv {
        std::fs::write(p, sweep_csv(&series))?;
    }
    if let Some(p) = &args.svg {
        let ranked = spikes.as_ref().map(|s| s.ranked.as_slice()).unwrap_or(&[]);
        std::fs::write(p, sweep_svg(&series, ranked))?;
    }
    if let Some(p) = &args.json {
        let s =
            serde_json::to_string(&series).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        std::fs::write(p, s)?;
    }
    let spikes = spikes?;
    let minimum = series
        .minimum()
        .map(|(c, v)| serde_json::json!({ "dims": c.dims, "score": v }));
    let top: Vec<_> = spikes
        .ranked
        .iter()
        .take(10)
        .map(
            |s| serde_json::json!({ "dims": s.candidate.dims, "score": s.value, "depth": s.depth }),
        )
        .collect();
    print_json(&serde_json::json!({
        "measure": series.measure,
        "candidates": series.points.len(),
        "skipped": series.skipped.len(),
        "minimum": minimum,
        "spikes": top,
    }))
}

fn run_perturb(args: PerturbArgs) -> Result<()> {
    let need_seed = || {
        args.seed.ok_or_else(|| {
            Error::InvalidArgument(format!("--seed is required for --kind {}", args.kind))
        })
    };
    let (perturbation, seed) = match args.kind.as_str() {
        "flip" => {
            let amount = match (args.count, args.rate) {
                (Some(c), None) => FlipAmount::Count(c),
                (None, Some(r)) => FlipAmount::Rate(r),
                _ => {
                    return Err(Error::InvalidArgument(
                        "flip needs exactly one of --count and --rate".into(),
                    ))
                }
            };
            (Perturbation::FlipRandom(amount), need_seed()?)
        }
        "scramble" => {
            let segment_len = args
                .segment_len
                .ok_or_else(|| Error::InvalidArgument("scramble needs --segment-len".into()))?;
            (Perturbation::ScrambleSegments { segment_len }, need_seed()?)
        }
        "complement" => (Perturbation::Complement, args.seed.unwrap_or(0)),
        "amplify" => {
            let factors = args
                .factors
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("amplify needs --factors".into()))?;
            (
                Perturbation::Amplify {
                    factors: parse_dims(factors)?,
                },
                args.seed.unwrap_or(0),
            )
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown perturbation kind {other:?}"
            )))
        }
    };

    let input = read_input(&args.input)?;
    let out = args.out.as_deref();
    match (input, &args.dims) {
        (Input::Grid(g), _) => {
            let result = perturbation.apply_grid(&g, seed)?;
            if result.ndim() == 2 {
                write_output(out, &codec::encode_pbm(&result, PbmFormat::Plain)?)
            } else {
                write_output(
                    out,
                    codec::format_bits(&result.to_bitstring(), 80).as_bytes(),
                )
            }
        }
        (Input::Bits(x), Some(d)) => {
            let g = partition::reshape(&x, &layout(parse_dims(d)?, x.len())?)?;
            let result = perturbation.apply_grid(&g, seed)?;
            eprintln!("output dims {}", format_dims(result.dims()));
            write_output(
                out,
                codec::format_bits(&result.to_bitstring(), 80).as_bytes(),
            )
        }
        (Input::Bits(x), None) => {
            let result = perturbation.apply(&x, seed)?;
            write_output(out, codec::format_bits(&result, 80).as_bytes())
        }
    }
}
