use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nmland::analysis::{
    basin_fraction, count_local_peaks, distance_profile, enumerate, enumerate_nk,
    fitness_histogram, mean_walk_autocorrelation, EvaluatedLandscape, WalkConfig, DEFAULT_BINS,
    DEFAULT_BUDGET,
};
use nmland::experiments::{run_experiment, ExperimentId, ExperimentSpec};
use nmland::model::{
    build_type1, build_type1_proportion, build_type2, build_type3, Alphabet, Arity, BuildOptions,
    Coefficients, InteractionModel,
};
use nmland::nk::{generate_nk, NkLandscape};
use nmland::search::{ga_sweep, GaConfig, Selection};
use nmland::walsh::{from_walsh, to_walsh, BitString, WalshPolynomial};
use nmland::Error;

#[derive(Parser)]
#[command(name = "nmland", version, about = "NM landscapes: generation, analysis and search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a random NM landscape and write it as JSON.
    Gen(GenArgs),
    /// Report extremes and ruggedness statistics of a landscape file.
    Analyze(AnalyzeArgs),
    /// Generate or analyze NK landscapes.
    #[command(subcommand)]
    Nk(NkCommand),
    /// Run the genetic algorithm on a binary landscape file.
    Ga(GaArgs),
    /// Regenerate the data behind one of the figures.
    Experiment(ExperimentArgs),
    /// Convert between interaction models and Walsh polynomials.
    Walsh(WalshArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Landscape type: 1 (general), 2 (known minimum at the alternating point)
    /// or 3 (odd orders only).
    #[arg(long = "type", value_parser = clap::value_parser!(u8).range(1..=3))]
    kind: u8,
    #[arg(long)]
    n: usize,
    /// Maximum interaction order; every term up to this order is included.
    #[arg(long, default_value_t = 2)]
    m_order: usize,
    #[arg(long, default_value_t = 10.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Type 1 only: keep each pairwise term with this probability.
    #[arg(long)]
    proportion: Option<f64>,
    /// `a,b,arity` with arity an integer >= 2 or `real`.
    #[arg(long, default_value = "1,1,2")]
    alphabet: String,
    /// Include a constant term.
    #[arg(long)]
    constant: bool,
    /// Draw coefficients uniformly from (0, 1] instead of exp(-|N(0, sigma)|).
    #[arg(long)]
    uniform: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    file: PathBuf,
    /// Known maximum and minimum, without enumeration.
    #[arg(long)]
    extremes: bool,
    #[arg(long)]
    peaks: bool,
    #[arg(long)]
    autocorr: bool,
    #[arg(long)]
    basin: bool,
    /// Fitness histogram with this many bins (30 if none given).
    #[arg(long, num_args = 0..=1, default_missing_value = "30")]
    histogram: Option<usize>,
    /// Fitness against distance to the global maximum, one line per point.
    #[arg(long)]
    profile: bool,
    #[command(flatten)]
    walk: WalkArgs,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long, default_value_t = 10)]
    walks: usize,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Seed of the random walks.
    #[arg(long, default_value_t = 0)]
    walk_seed: u64,
}

#[derive(Subcommand)]
enum NkCommand {
    /// Write a random NK landscape as JSON.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Peaks, autocorrelation and basin of an NK landscape file.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Args)]
struct GaArgs {
    file: PathBuf,
    /// TOML file with GA settings; defaults are used for missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `runs` from the config.
    #[arg(long)]
    runs: Option<usize>,
    /// Overrides `selection`: proportional, rank or tournament[:k].
    #[arg(long)]
    selection: Option<Selection>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-generation CSV of every run.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Print the effective config and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    id: ExperimentId,
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated list.
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    /// Comma-separated interaction orders.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<usize>>,
    /// TOML file with GA settings for the search experiments.
    #[arg(long)]
    ga_config: Option<PathBuf>,
    /// Skip random walks.
    #[arg(long)]
    no_walks: bool,
}

#[derive(Args)]
struct WalshArgs {
    /// Landscape JSON, or Walsh JSON with `--from-walsh`.
    file: PathBuf,
    #[arg(long)]
    from_walsh: bool,
    /// Convert and back, then compare the two functions at every point.
    #[arg(long, conflicts_with = "from_walsh")]
    roundtrip: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::BudgetExceeded { required, .. } = e {
                eprintln!("rerun with --budget {required} (or larger) to allow it");
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(command: Command) -> nmland::Result<()> {
    match command {
        Command::Gen(args) => gen(args),
        Command::Analyze(args) => analyze(args),
        Command::Nk(cmd) => nk(cmd),
        Command::Ga(args) => ga(args),
        Command::Experiment(args) => experiment(args),
        Command::Walsh(args) => walsh(args),
    }
}

fn parse_alphabet(text: &str) -> nmland::Result<Alphabet> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::InvalidParameter(format!("alphabet '{text}' is not of the form a,b,arity"));
    let [a, b, arity] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let arity = match *arity {
        "real" => Arity::Real,
        r => Arity::Levels(r.parse().map_err(|_| bad())?),
    };
    Alphabet::new(a, b, arity)
}

fn emit(text: &str, out: Option<&Path>) -> nmland::Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn read(path: &Path) -> nmland::Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn gen(args: GenArgs) -> nmland::Result<()> {
    let mut opts = BuildOptions::default()
        .alphabet(parse_alphabet(&args.alphabet)?)
        .with_constant(args.constant);
    if args.uniform {
        opts = opts.coefficients(Coefficients::Uniform);
    }
    let model = match (args.kind, args.proportion) {
        (1, Some(p)) => build_type1_proportion(args.n, p, args.sigma, args.seed, &opts)?,
        (_, Some(_)) => {
            return Err(Error::InvalidParameter("--proportion applies to --type 1 only".into()))
        }
        (1, None) => build_type1(args.n, args.m_order, args.sigma, args.seed, &opts)?,
        (2, None) => build_type2(args.n, args.m_order, args.sigma, args.seed, &opts)?,
        _ => build_type3(args.n, args.m_order, args.sigma, args.seed, &opts)?,
    };
    emit(&model.to_json()?, args.out.as_deref())
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn walk_config(w: &WalkArgs) -> WalkConfig {
    WalkConfig { steps: w.steps, walks: w.walks }
}

fn analyze(args: AnalyzeArgs) -> nmland::Result<()> {
    let model = InteractionModel::from_json(&read(&args.file)?)?;
    let any = args.extremes
        || args.peaks
        || args.autocorr
        || args.basin
        || args.histogram.is_some()
        || args.profile;
    let (extremes, peaks, autocorr, basin) = if any {
        (args.extremes, args.peaks, args.autocorr, args.basin)
    } else {
        (true, true, true, true)
    };

    println!("kind: {}", model.kind());
    println!("n: {}", model.n());
    println!("m: {}", model.m());
    println!("max_order: {}", model.max_order());
    if extremes {
        match model.max_value() {
            Ok(max) => {
                println!("f_max: {max}");
                println!("argmax: {}", fmt_point(&model.max_location()?));
            }
            Err(e) => println!("f_max: unknown ({e})"),
        }
        match (model.min_location(), model.min_value()) {
            (Ok(loc), Ok(min)) => {
                println!("f_min: {min}");
                println!("argmin: {}", fmt_point(&loc));
            }
            (Err(e), _) | (_, Err(e)) => println!("f_min: unknown ({e})"),
        }
    }
    if !(peaks || autocorr || basin || args.histogram.is_some() || args.profile) {
        return Ok(());
    }
    let el = enumerate(&model, args.budget)?;
    report_landscape(&el, peaks, autocorr, basin, &args.walk)?;
    if let Some(bins) = args.histogram {
        let h = fitness_histogram(&el, if bins == 0 { DEFAULT_BINS } else { bins });
        let width = h.bin_width();
        println!("histogram: lo,hi,count");
        for (i, c) in h.counts.iter().enumerate() {
            println!("{},{},{c}", h.lo + width * i as f64, h.lo + width * (i + 1) as f64);
        }
    }
    if args.profile {
        println!("profile: index,distance,fitness,is_local_peak");
        for e in distance_profile(&el, el.argmax()) {
            println!("{},{},{},{}", e.index, e.distance, e.fitness, e.is_local_peak);
        }
    }
    Ok(())
}

fn report_landscape(
    el: &EvaluatedLandscape,
    peaks: bool,
    autocorr: bool,
    basin: bool,
    walk: &WalkArgs,
) -> nmland::Result<()> {
    if peaks {
        println!("peak_count: {}", count_local_peaks(el));
    }
    if autocorr {
        let r = mean_walk_autocorrelation(el, &walk_config(walk), walk.walk_seed)?;
        println!("lag1_autocorr: {r}");
    }
    if basin {
        match basin_fraction(el) {
            Ok(b) => println!("basin_fraction: {b}"),
            Err(e) => println!("basin_fraction: undefined ({e})"),
        }
    }
    Ok(())
}

fn nk(cmd: NkCommand) -> nmland::Result<()> {
    match cmd {
        NkCommand::Generate { n, k, seed, out } => emit(&generate_nk(n, k, seed)?.to_json()?, out.as_deref()),
        NkCommand::Analyze { file, walk, budget } => {
            let nk = NkLandscape::from_json(&read(&file)?)?;
            println!("n: {}", nk.n());
            println!("k: {}", nk.k());
            let el = enumerate_nk(&nk, budget)?;
            let top = el.argmax();
            println!("f_max: {}", el.fitness_at(top));
            println!("argmax: {}", el.digits(top).iter().map(|d| d.to_string()).collect::<String>());
            report_landscape(&el, true, true, true, &walk)
        }
    }
}

fn ga_config(path: Option<&Path>) -> nmland::Result<GaConfig> {
    match path {
        Some(p) => GaConfig::from_toml(&read(p)?),
        None => Ok(GaConfig::default()),
    }
}

fn ga(args: GaArgs) -> nmland::Result<()> {
    let mut config = ga_config(args.config.as_deref())?;
    if let Some(runs) = args.runs {
        config.runs = runs;
    }
    if let Some(selection) = args.selection {
        config.selection = selection;
    }
    config.validate()?;
    if args.print_config {
        print!("{}", config.to_toml());
        return Ok(());
    }
    let model = InteractionModel::from_json(&read(&args.file)?)?;
    let row = ga_sweep(std::slice::from_ref(&model), &config, args.seed)?.remove(0);
    if let Some(e) = row.error {
        return Err(Error::InvalidInput(e));
    }
    println!("run,seed,best_raw,best_by_max,found_global,found_at,distance_to_opt");
    for (r, t) in row.traces.iter().enumerate() {
        println!(
            "{r},{},{},{},{},{},{}",
            t.seed,
            t.final_raw(),
            t.best_by_max.last().copied().unwrap_or(f64::NAN),
            t.found_global,
            t.found_at.map_or(String::new(), |g| g.to_string()),
            t.distance_to_opt
        );
    }
    if let Some(s) = &row.summary {
        println!("success_proportion: {}", s.success_proportion);
        if let Some(d) = s.failed_distance {
            println!("failed_distance_mean: {}", d.mean);
        }
    }
    if let Some(path) = args.out {
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["run", "seed", "generation", "best_raw", "best_by_max", "best_minmax", "distance"])?;
        for (r, t) in row.traces.iter().enumerate() {
            for g in 0..t.best_raw.len() {
                let minmax = t.best_minmax.as_ref().map_or(String::new(), |v| v[g].to_string());
                w.write_record([
                    r.to_string(),
                    t.seed.to_string(),
                    g.to_string(),
                    t.best_raw[g].to_string(),
                    t.best_by_max[g].to_string(),
                    minmax,
                    t.best_distance[g].to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> nmland::Result<()> {
    let mut spec = ExperimentSpec::defaults(args.id);
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(s) = args.sigma {
        spec.sigmas = s;
    }
    if let Some(r) = args.replicates {
        spec.replicates = r;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(b) = args.budget {
        spec.budget = b;
    }
    if let Some(o) = args.orders {
        spec.orders = o;
    }
    if let Some(path) = args.ga_config.as_deref() {
        spec.ga = ga_config(Some(path))?;
    }
    if args.no_walks {
        spec.walks = None;
    }
    for path in run_experiment(&spec, &args.out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn walsh(args: WalshArgs) -> nmland::Result<()> {
    let text = read(&args.file)?;
    if args.from_walsh {
        let w = WalshPolynomial::from_json(&text)?;
        return emit(&from_walsh(&w)?.to_json()?, args.out.as_deref());
    }
    let model = InteractionModel::from_json(&text)?;
    let w = to_walsh(&model)?;
    if !args.roundtrip {
        return emit(&w.to_json()?, args.out.as_deref());
    }
    let back = from_walsh(&w)?;
    let n = model.n();
    let points = 1u128 << n;
    if points > u128::from(args.budget) {
        return Err(Error::BudgetExceeded { required: points, budget: args.budget });
    }
    let (mut roundtrip, mut walsh) = (0.0f64, 0.0f64);
    for bits in 0..1u64 << n {
        let y = BitString::new(n, bits)?;
        let x = y.to_point();
        let f = model.evaluate(&x)?;
        roundtrip = roundtrip.max((f - back.evaluate(&x)?).abs());
        walsh = walsh.max((f - w.evaluate(&y)?).abs());
    }
    println!("points: {points}");
    println!("walsh_coefficients: {}", w.omega().len());
    println!("terms_identical: {}", back.terms() == model.terms());
    println!("max_pointwise_deviation: {roundtrip}");
    // Same function, different summation order.
    println!("max_walsh_evaluation_deviation: {walsh:e}");
    Ok(())
}
