use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use topics_qif::pipeline::{
    run_pipeline, synth_generate, write_profiles, Classification, InsufficientPolicy, SuffixList, SynthConfig,
    TreatmentConfig,
};
use topics_qif::qif::{bayes_capacity, Label};
use topics_qif::reports::{
    analyze, counting_curve, curve_csv, theory_csv, to_json, worked_csv, worked_examples, Format,
};
use topics_qif::sim::{
    estimate_report_channel, linkage_channel, multi_epoch_channels, run_counting_experiment_with,
    simulate_cookie_session, write_cookie_log, EpochWorld, SimRng, Truth, DEFAULT_PARTITIONS,
};
use topics_qif::topics::{
    counting_exact_probability, counting_params, dataset_presets, taxonomy_presets, theory_table, topics_capacity,
    topics_report_channel, tradeoff_presets, CookieWorld, TopSet, TopicAssignment,
};
use topics_qif::{Error, TopicsParams};

#[derive(Parser)]
#[command(
    name = "topics-qif",
    version,
    about = "Privacy and utility analysis of third-party cookies and the Topics API"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every random choice; never taken from the clock.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,

    /// Output file (or directory for gen-synth); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Theoretical limits per parameter set.
    Theory(TheoryArgs),
    /// Run the data pipeline and report measured leakage against the bounds.
    Analyze(AnalyzeArgs),
    /// Probability of a correct noisy count as a function of N.
    CountingCurve(CurveArgs),
    /// Seeded simulations of the browser algorithms.
    Simulate(SimulateArgs),
    /// Write a synthetic browsing world.
    GenSynth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// The four proposed taxonomies.
    Taxonomies,
    /// The privacy-utility trade-off grid.
    Tradeoff,
    /// The two dataset taxonomies.
    Datasets,
    /// Worked examples on the three-user world.
    Worked,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, value_enum, default_value_t = Preset::Taxonomies, conflicts_with = "m")]
    preset: Preset,
    /// Taxonomy size for a single custom row.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 5)]
    s: usize,
    #[arg(long, default_value_t = 0.05)]
    r: f64,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    history: PathBuf,
    #[arg(long)]
    classification: PathBuf,
    #[arg(long)]
    suffixes: PathBuf,
    /// One topic per line; defaults to the topics of the classification.
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    /// Top-set size.
    #[arg(long = "s-size", visible_alias = "s", default_value_t = 5)]
    s_size: usize,
    #[arg(long, default_value_t = 0.05)]
    r: f64,
    #[arg(long)]
    keep_singletons: bool,
    #[arg(long)]
    outlier_max_visits: Option<usize>,
    #[arg(long, value_enum, default_value_t = Insufficient::Drop)]
    insufficient: Insufficient,
    /// Also write one JSON line per kept user.
    #[arg(long)]
    profiles: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Insufficient {
    Drop,
    Error,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, default_value_t = 2)]
    from: u64,
    #[arg(long, default_value_t = 30)]
    to: u64,
    /// Taxonomy sizes; repeat for several curves.
    #[arg(long, default_values_t = vec![349, 629])]
    m: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    s: usize,
    #[arg(long, default_value_t = 0.05)]
    r: f64,
    /// Monte Carlo trials per point; 0 skips the simulation column.
    #[arg(long, default_value_t = 0)]
    trials: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimKind {
    /// Estimate the report channel and compare with the analytic one.
    ReportTopic,
    /// The counting experiment.
    Counting,
    /// A third-party cookie session; CSV output is the report log.
    Cookies,
    /// Privacy capacity over an increasing number of epochs.
    Epochs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(value_enum)]
    kind: SimKind,
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long, default_value_t = 0.05)]
    r: f64,
    /// Trials (per row for channel estimates).
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Population size for the counting experiment.
    #[arg(long, default_value_t = 10)]
    n: u64,
    /// Number of users for cookie and epoch worlds.
    #[arg(long, default_value_t = 10)]
    users: usize,
    #[arg(long, default_value_t = 5)]
    contexts: usize,
    /// Number of top-sets for report-topic.
    #[arg(long, default_value_t = 2)]
    sets: usize,
    #[arg(long, default_value_t = 2)]
    epochs: usize,
    #[arg(long, default_value_t = DEFAULT_PARTITIONS)]
    partitions: usize,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    users: usize,
    #[arg(long, default_value_t = 200)]
    domains: usize,
    #[arg(long, default_value_t = 30)]
    taxonomy_size: usize,
    #[arg(long, default_value_t = 5)]
    min_visits: usize,
    #[arg(long, default_value_t = 40)]
    max_visits: usize,
    #[arg(long, default_value_t = 1.0)]
    zipf: f64,
}

fn emit(out: Option<&Path>, text: &str) -> topics_qif::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render<T: Serialize + ?Sized>(
    format: Format,
    value: &T,
    csv: impl FnOnce() -> String,
) -> topics_qif::Result<String> {
    match format {
        Format::Csv => Ok(csv()),
        Format::Json => to_json(value),
    }
}

fn read(path: &Path) -> topics_qif::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn theory(args: &TheoryArgs, format: Format) -> topics_qif::Result<String> {
    let params = match (args.m, args.preset) {
        (Some(m), _) => vec![TopicsParams::new(m, args.s, args.r)?],
        (None, Preset::Taxonomies) => taxonomy_presets(),
        (None, Preset::Tradeoff) => tradeoff_presets(),
        (None, Preset::Datasets) => dataset_presets(),
        (None, Preset::Worked) => {
            let rows = worked_examples()?;
            return render(format, &rows, || worked_csv(&rows));
        }
    };
    let rows = theory_table(&params)?;
    render(format, &rows, || theory_csv(&rows))
}

fn analyze_cmd(args: &AnalyzeArgs, format: Format) -> topics_qif::Result<String> {
    let suffixes = SuffixList::parse(&read(&args.suffixes)?);
    let taxonomy = match &args.taxonomy {
        Some(path) => Some(topics_qif::pipeline::parse_taxonomy(&read(path)?)?),
        None => None,
    };
    let classification = Classification::from_csv(read(&args.classification)?.as_bytes(), taxonomy)?;
    let mut config = TreatmentConfig::new(args.s_size)?;
    config.drop_singletons = !args.keep_singletons;
    config.outlier_max_visits = args.outlier_max_visits;
    config.insufficient_topics = match args.insufficient {
        Insufficient::Drop => InsufficientPolicy::Drop,
        Insufficient::Error => InsufficientPolicy::Error,
    };
    let history = File::open(&args.history)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", args.history.display()))))?;
    let output = run_pipeline(io::BufReader::new(history), &suffixes, &classification, &config)?;
    if let Some(path) = &args.profiles {
        write_profiles(io::BufWriter::new(File::create(path)?), &output.profiles)?;
    }
    let report = analyze(&output, &classification, args.r)?;
    render(format, &report, || report.to_csv())
}

fn curve(args: &CurveArgs, seed: u64, format: Format) -> topics_qif::Result<String> {
    let params =
        args.m.iter().map(|&m| TopicsParams::new(m, args.s, args.r)).collect::<topics_qif::Result<Vec<_>>>()?;
    if args.from > args.to {
        return Err(Error::BadParams(format!("--from {} exceeds --to {}", args.from, args.to)));
    }
    let points = counting_curve(args.from..=args.to, &params, args.trials, seed)?;
    render(format, &points, || curve_csv(&points))
}

fn topic_labels(m: usize) -> topics_qif::Result<Vec<Label>> {
    (0..m).map(|i| Label::new(topics_qif::pipeline::topic_name(i))).collect()
}

fn random_topset(taxonomy: &[Label], s: usize, rng: &mut SimRng) -> topics_qif::Result<TopSet> {
    let mut idx: Vec<usize> = (0..taxonomy.len()).collect();
    for i in 0..s {
        let j = i + rng.uniform_index(idx.len() - i);
        idx.swap(i, j);
    }
    TopSet::new(idx[..s].iter().map(|&i| taxonomy[i].clone()).collect())
}

#[derive(Serialize)]
struct EntryReport {
    row: String,
    col: String,
    estimate: f64,
    exact: f64,
    stderr: f64,
}

fn simulate(args: &SimulateArgs, seed: u64, format: Format, out: Option<&Path>) -> topics_qif::Result<Option<String>> {
    let params = TopicsParams::new(args.m, args.s, args.r)?;
    match args.kind {
        SimKind::ReportTopic => {
            let taxonomy = topic_labels(args.m)?;
            let mut rng = SimRng::new(seed);
            let mut sets: Vec<TopSet> = Vec::new();
            for _ in 0..args.sets.max(1) * 64 {
                if sets.len() == args.sets.max(1) {
                    break;
                }
                let set = random_topset(&taxonomy, args.s, &mut rng)?;
                if !sets.contains(&set) {
                    sets.push(set);
                }
            }
            let estimate = estimate_report_channel(&sets, &taxonomy, args.r, args.trials, seed)?;
            let exact = topics_report_channel(&sets, &params, &taxonomy)?;
            let mut entries = Vec::new();
            for i in 0..exact.n_rows() {
                for j in 0..exact.n_cols() {
                    entries.push(EntryReport {
                        row: exact.rows()[i].to_string(),
                        col: exact.cols()[j].to_string(),
                        estimate: estimate.channel.get(i, j),
                        exact: exact.get(i, j),
                        stderr: estimate.stderr[i][j],
                    });
                }
            }
            let max_sigma = estimate.max_sigma_from(&exact).unwrap_or(f64::INFINITY);
            let value = json!({"seed": seed, "trials": args.trials, "max_sigma": max_sigma, "entries": entries});
            render(format, &value, || {
                let mut text = String::from("row,col,estimate,exact,stderr\n");
                for e in &entries {
                    text.push_str(&format!(
                        "\"{}\",{},{:.6},{:.6},{:.6}\n",
                        e.row, e.col, e.estimate, e.exact, e.stderr
                    ));
                }
                text
            })
            .map(Some)
        }
        SimKind::Counting => {
            let cp = counting_params(&params)?;
            let report = run_counting_experiment_with(args.n, Truth::FairCoin, cp, args.trials, seed, args.partitions)?;
            let exact = counting_exact_probability(args.n, cp);
            let value = json!({
                "seed": report.seed,
                "trials": report.trials,
                "estimate": report.estimate,
                "stderr": report.stderr,
                "partitions": report.partitions,
                "N": args.n,
                "m": args.m,
                "exact": exact,
            });
            render(format, &value, || {
                format!(
                    "N,m,seed,trials,partitions,estimate,stderr,exact\n{},{},{},{},{},{:.6},{:.6},{:.6}\n",
                    args.n,
                    args.m,
                    report.seed,
                    report.trials,
                    report.partitions,
                    report.estimate,
                    report.stderr,
                    exact
                )
            })
            .map(Some)
        }
        SimKind::Cookies => {
            let world = CookieWorld::uniform(args.users, args.contexts)?;
            let log = simulate_cookie_session(&world, &mut SimRng::new(seed))?;
            let linkage = linkage_channel(&log)?;
            let identity = linkage.is_deterministic() && bayes_capacity(&linkage) == args.users as f64;
            match format {
                Format::Csv => {
                    match out {
                        Some(path) => write_cookie_log(File::create(path)?, &log)?,
                        None => write_cookie_log(io::stdout().lock(), &log)?,
                    }
                    Ok(None)
                }
                Format::Json => to_json(&json!({
                    "seed": seed,
                    "users": args.users,
                    "contexts": args.contexts,
                    "reports": log.len(),
                    "uids": linkage.n_cols(),
                    "linkage_capacity": bayes_capacity(&linkage),
                    "identity_linkage": identity,
                }))
                .map(Some),
            }
        }
        SimKind::Epochs => {
            if args.epochs == 0 {
                return Err(Error::BadParams("--epochs must be at least 1".into()));
            }
            let taxonomy = topic_labels(args.m)?;
            let users: Vec<Label> =
                (0..args.users).map(|u| Label::new(format!("user{u}"))).collect::<Result<_, _>>()?;
            let mut epochs = Vec::new();
            for e in 0..args.epochs {
                let mut rng = SimRng::substream(seed, e as u64);
                let entries = users
                    .iter()
                    .map(|u| Ok((u.clone(), random_topset(&taxonomy, args.s, &mut rng)?)))
                    .collect::<topics_qif::Result<Vec<_>>>()?;
                epochs.push((TopicAssignment::new(entries, taxonomy.clone())?, params));
            }
            #[derive(Serialize)]
            struct Row {
                epochs: usize,
                capacity: f64,
                single_epoch_bound: f64,
            }
            let mut rows = Vec::new();
            for k in 1..=args.epochs {
                let world = EpochWorld::new(epochs[..k].to_vec())?;
                let (privacy, _) = multi_epoch_channels(&world)?;
                rows.push(Row {
                    epochs: k,
                    capacity: bayes_capacity(&privacy),
                    single_epoch_bound: topics_capacity(&params),
                });
            }
            render(format, &rows, || {
                let mut text = String::from("epochs,capacity,single_epoch_bound\n");
                for r in &rows {
                    text.push_str(&format!("{},{:.4},{:.4}\n", r.epochs, r.capacity, r.single_epoch_bound));
                }
                text
            })
            .map(Some)
        }
    }
}

fn gen_synth(args: &SynthArgs, seed: u64, out: Option<&Path>) -> topics_qif::Result<String> {
    let dir = out.ok_or_else(|| Error::BadParams("gen-synth needs --out DIR".into()))?;
    let config = SynthConfig {
        seed,
        n_users: args.users,
        n_domains: args.domains,
        taxonomy_size: args.taxonomy_size,
        min_visits: args.min_visits,
        max_visits: args.max_visits,
        zipf_exponent: args.zipf,
    };
    let paths = synth_generate(&config)?.write_to(dir)?;
    Ok(paths.iter().map(|p| format!("{}\n", p.display())).collect())
}

fn run(cli: &Cli) -> topics_qif::Result<()> {
    let format = Format::from(cli.format);
    let out = cli.out.as_deref();
    let text = match &cli.command {
        Command::Theory(args) => Some(theory(args, format)?),
        Command::Analyze(args) => Some(analyze_cmd(args, format)?),
        Command::CountingCurve(args) => Some(curve(args, cli.seed, format)?),
        Command::Simulate(args) => simulate(args, cli.seed, format, out)?,
        Command::GenSynth(args) => {
            let listing = gen_synth(args, cli.seed, out)?;
            return emit(None, &listing);
        }
    };
    match text {
        Some(text) => emit(out, &text),
        None => Ok(()),
    }
}

/// 3 for broken internal invariants, 2 for everything caused by input.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NonStochasticRow { .. }
        | Error::NegativeEntry { .. }
        | Error::NotDeterministic(_)
        | Error::DimensionMismatch(_)
        | Error::LabelMismatch(_)
        | Error::Json(_) => 3,
        _ => 2,
    }
}

fn fail(kind: &str, message: String, code: u8, extra: Option<serde_json::Value>) -> ExitCode {
    let mut body = json!({"error": kind, "message": message, "exit_code": code});
    if let Some(extra) = extra {
        body["summary"] = extra;
    }
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("Usage", e.to_string().trim().to_string(), 2, None),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let extra = match &err {
                Error::NoEligibleUsers { summary } => serde_json::from_str(summary).ok(),
                _ => None,
            };
            fail(err.kind(), err.to_string(), exit_code(&err), extra)
        }
    }
}
