use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sparse_dtm::diagram::snr;
use sparse_dtm::dtm::{
    dtm_eval, dtm_measure_eval, dtm_weights, power_distance_eval, DiscreteMeasure, MassParameter, WeightedPointSet,
};
use sparse_dtm::experiments::{
    build_with_stats, distance_tables, load_space, run_pipeline, write_matrix_csv, BuildParams, Dataset,
    ExperimentConfig, Mode,
};
use sparse_dtm::filtration::Filtration;
use sparse_dtm::io::{read_matrix, read_measure, read_points, write_points};
use sparse_dtm::metric::{MetricKind, MetricSpace, Query};
use sparse_dtm::persistence::{reduce_with, PersistenceDiagram, ReduceOptions};

/// Robust persistent homology through the distance to a measure.
#[derive(Parser)]
#[command(name = "sparse-dtm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point cloud (cube skeleton or torus spiral).
    Gen(GenArgs),
    /// Distance to the measure and power distance at each point.
    Dtm(DtmArgs),
    /// Build a filtration and write it with its size statistics.
    Filtration(FiltrationArgs),
    /// Persistence diagram of a filtration file.
    Persist(PersistArgs),
    /// Bottleneck (or log-bottleneck) distance matrix between diagrams.
    Compare(CompareArgs),
    /// Signal-to-noise ratio of diagrams.
    Snr(SnrArgs),
    /// Filtration sizes over a range of epsilon values.
    Sweep(SweepArgs),
    /// Full pipeline: filtrations, diagrams, distance tables, SNR and sweep.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Cube,
    Torus,
}

#[derive(Args)]
struct SourceArgs {
    /// Points CSV (or distance matrix CSV with `--metric matrix`).
    #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "l2")]
    metric: MetricKind,
    /// Built-in dataset instead of an input file.
    #[arg(long, value_enum)]
    dataset: Option<Generator>,
    #[command(flatten)]
    shape: ShapeArgs,
    /// Standard deviation of Gaussian noise added to every coordinate.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ShapeArgs {
    /// Number of torus-spiral points.
    #[arg(long, default_value_t = 10000)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    big_r: f64,
    #[arg(long, default_value_t = 0.5)]
    small_r: f64,
    #[arg(long, default_value_t = 20)]
    windings: u32,
}

impl ShapeArgs {
    fn dataset(&self, g: Generator) -> Dataset {
        match g {
            Generator::Cube => Dataset::CubeSkeleton,
            Generator::Torus => Dataset::TorusSpiral {
                n: self.n,
                big_r: self.big_r,
                small_r: self.small_r,
                windings: self.windings,
            },
        }
    }
}

impl SourceArgs {
    fn dataset(&self) -> Result<Dataset> {
        if let Some(g) = self.dataset {
            return Ok(self.shape.dataset(g));
        }
        let path = self.input.as_ref().expect("clap enforces input or dataset");
        let file = open(path)?;
        Ok(match self.metric {
            MetricKind::Matrix => Dataset::Matrix(read_matrix(file).with_context(|| path.display().to_string())?),
            metric => Dataset::Points {
                points: read_points(file).with_context(|| path.display().to_string())?,
                metric,
            },
        })
    }

    fn space(&self) -> Result<MetricSpace> {
        Ok(load_space(&self.dataset()?, self.noise, self.seed)?)
    }
}

#[derive(Args)]
struct MassArgs {
    /// Mass fraction m in (0, 1].
    #[arg(long, conflicts_with = "k")]
    mass: Option<f64>,
    /// Neighbor count k (fractional values allowed).
    #[arg(long)]
    k: Option<f64>,
}

impl MassArgs {
    fn parameter(&self) -> Option<MassParameter> {
        self.mass
            .map(MassParameter::Fraction)
            .or(self.k.map(MassParameter::Count))
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    dataset: Generator,
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; the points go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DtmArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    mass: MassArgs,
    /// `point_id,mass` lines; the measure replaces the uniform one.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Points CSV to evaluate at instead of the sample points.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    mass: MassArgs,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Highest homology dimension; simplices go one dimension higher.
    #[arg(long, default_value_t = 1)]
    max_dim: usize,
    #[arg(long)]
    alpha_max: Option<f64>,
    /// Record wall-clock build times (otherwise `build_ms` is 0).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct FiltrationArgs {
    #[command(flatten)]
    build: BuildArgs,
    #[arg(long)]
    mode: Mode,
    /// Output directory; the filtration goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PersistArgs {
    /// Filtration text file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    max_dim: usize,
    /// Keep pairs that are born and die at the same value.
    #[arg(long)]
    keep_zero: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Diagram CSV files.
    #[arg(required = true)]
    diagrams: Vec<PathBuf>,
    /// Compare a single dimension instead of the maximum over dimensions.
    #[arg(long)]
    dim: Option<usize>,
    /// Use the bottleneck distance between log-scaled diagrams.
    #[arg(long)]
    log: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SnrArgs {
    #[arg(required = true)]
    diagrams: Vec<PathBuf>,
    #[arg(long)]
    dim: usize,
    /// Number of features counted as signal.
    #[arg(long)]
    j: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    build: BuildArgs,
    #[arg(long, default_value = "sparse-weighted-rips")]
    mode: Mode,
    /// Comma-separated epsilon values.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
    epsilons: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    build: BuildArgs,
    /// Comma-separated modes.
    #[arg(long, value_delimiter = ',', required = true)]
    mode: Vec<Mode>,
    /// Comma-separated `dim:j` pairs.
    #[arg(long, value_delimiter = ',', value_parser = parse_snr_pair)]
    snr: Vec<(usize, usize)>,
    /// Comma-separated epsilon values for a size sweep.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
    #[arg(long)]
    sweep_mode: Option<Mode>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_snr_pair(s: &str) -> Result<(usize, usize), String> {
    let (dim, j) = s.split_once(':').ok_or_else(|| format!("expected dim:j, got {s:?}"))?;
    Ok((
        dim.trim().parse().map_err(|e| format!("dim {dim:?}: {e}"))?,
        j.trim().parse().map_err(|e| format!("j {j:?}: {e}"))?,
    ))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

/// Writer for `name` inside `out`, or stdout.
fn sink(out: Option<&Path>, name: &str) -> Result<Box<dyn Write>> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let path = dir.join(name);
            let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

/// File name up to the first dot: `a/weighted-rips.diagram.csv` gives
/// `weighted-rips`.
fn stem(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_string()
}

fn read_diagram(path: &Path) -> Result<PersistenceDiagram> {
    PersistenceDiagram::read_csv(open(path)?).with_context(|| path.display().to_string())
}

fn write_json<T: serde::Serialize>(mut w: Box<dyn Write>, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    let space = load_space(&args.shape.dataset(args.dataset), args.noise, args.seed)?;
    let name = match args.dataset {
        Generator::Cube => "cube.csv",
        Generator::Torus => "torus.csv",
    };
    let mut w = sink(args.out.as_deref(), name)?;
    write_points(&space.points(), &mut w)?;
    w.flush()?;
    Ok(())
}

type Eval<'a> = dyn Fn(Query<'_>) -> sparse_dtm::Result<f64> + 'a;

fn dtm(args: DtmArgs) -> Result<()> {
    let space = args.source.space()?;
    let mass = args.mass.parameter().context("--mass or --k is required")?;
    let queries: Option<Vec<Vec<f64>>> = match &args.queries {
        Some(path) => Some(read_points(open(path)?).with_context(|| path.display().to_string())?),
        None => None,
    };
    let (eval, weights): (Box<Eval<'_>>, WeightedPointSet) = match &args.measure {
        Some(path) => {
            let MassParameter::Fraction(m) = mass else {
                bail!("a measure file takes --mass, not --k");
            };
            let (ids, masses) = read_measure(open(path)?).with_context(|| path.display().to_string())?;
            let measure = DiscreteMeasure::new(ids, masses)?;
            let support = measure
                .ids
                .iter()
                .map(|&p| dtm_measure_eval(&space, &measure, m, Query::Id(p)))
                .collect::<sparse_dtm::Result<Vec<_>>>()?;
            let weights = WeightedPointSet::new(measure.ids.clone(), support, 1.0)?;
            let space = &space;
            (Box::new(move |x| dtm_measure_eval(space, &measure, m, x)), weights)
        }
        None => {
            let ids = space.all_ids();
            let weights = dtm_weights(&space, &ids, mass)?;
            let space = &space;
            (Box::new(move |x| dtm_eval(space, &ids, mass, x)), weights)
        }
    };
    let mut w = sink(args.out.as_deref(), "dtm.csv")?;
    let row = |w: &mut dyn Write, label: String, x: Query<'_>| -> Result<()> {
        let d = eval(x)?;
        let p = power_distance_eval(&space, &weights, x)?;
        writeln!(w, "{label},{d},{p}")?;
        Ok(())
    };
    match &queries {
        Some(qs) => {
            for (i, q) in qs.iter().enumerate() {
                row(&mut w, i.to_string(), Query::Point(q))?;
            }
        }
        None => {
            for id in space.all_ids() {
                row(&mut w, id.to_string(), Query::Id(id))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn build_params(b: &BuildArgs, mode: Mode, epsilon: Option<f64>) -> BuildParams {
    BuildParams {
        mode,
        mass: b.mass.parameter(),
        epsilon,
        max_dim: b.max_dim + 1,
        alpha_max: b.alpha_max,
    }
}

fn filtration(args: FiltrationArgs) -> Result<()> {
    let space = args.build.source.space()?;
    let params = build_params(&args.build, args.mode, args.build.epsilon);
    let (f, stats) = build_with_stats(&space, &params, args.build.timing)?;
    let out = args.out.as_deref();
    let mut w = sink(out, &format!("{}.filtration.txt", args.mode))?;
    f.write_text(&mut w)?;
    w.flush()?;
    if out.is_some() {
        write_json(sink(out, &format!("{}.stats.json", args.mode))?, &stats)?;
    }
    Ok(())
}

fn persist(args: PersistArgs) -> Result<()> {
    let f = Filtration::read_text(open(&args.input)?).with_context(|| args.input.display().to_string())?;
    let d = reduce_with(
        &f,
        ReduceOptions {
            max_dim: args.max_dim,
            keep_zero_length: args.keep_zero,
        },
    )?;
    let mut w = sink(args.out.as_deref(), &format!("{}.diagram.csv", stem(&args.input)))?;
    d.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let diagrams = args.diagrams.iter().map(|p| read_diagram(p)).collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = args.diagrams.iter().map(|p| stem(p)).collect();
    let top = diagrams.iter().filter_map(|d| d.max_dim()).max().unwrap_or(0);
    let tables = distance_tables(&diagrams, args.dim.unwrap_or(top).max(top), args.log);
    let prefix = if args.log { "log_bottleneck" } else { "bottleneck" };
    let (matrix, name) = match args.dim {
        Some(dim) => (&tables.per_dim[dim], format!("{prefix}_dim{dim}.csv")),
        None => (&tables.overall, format!("{prefix}.csv")),
    };
    let mut w = sink(args.out.as_deref(), &name)?;
    write_matrix_csv(&names, matrix, &mut w)?;
    w.flush()?;
    Ok(())
}

fn snr_cmd(args: SnrArgs) -> Result<()> {
    let mut w = sink(args.out.as_deref(), "snr.csv")?;
    writeln!(w, "diagram,dim,j,snr")?;
    for path in &args.diagrams {
        let value = snr(&read_diagram(path)?, args.dim, args.j)?;
        writeln!(w, "{},{},{},{value}", stem(path), args.dim, args.j)?;
    }
    w.flush()?;
    Ok(())
}

fn config(b: &BuildArgs, modes: Vec<Mode>, out: Option<PathBuf>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(b.source.dataset()?, modes);
    cfg.noise = b.source.noise;
    cfg.seed = b.source.seed;
    cfg.mass = b.mass.parameter();
    cfg.epsilon = b.epsilon;
    cfg.max_dim = b.max_dim;
    cfg.alpha_max = b.alpha_max;
    cfg.record_timing = b.timing;
    cfg.out_dir = out;
    Ok(cfg)
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut cfg = config(&args.build, Vec::new(), None)?;
    cfg.sweep = args.epsilons;
    cfg.sweep_mode = Some(args.mode);
    let report = run_pipeline(&cfg)?;
    write_json(sink(args.out.as_deref(), "sweep.json")?, &report.sweep)
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = config(&args.build, args.mode, Some(args.out.clone()))?;
    cfg.snr = args.snr;
    cfg.sweep = args.sweep;
    cfg.sweep_mode = args.sweep_mode;
    let report = run_pipeline(&cfg)?;
    for s in &report.stats {
        eprintln!("{}: {} simplices {:?}", s.mode, s.total(), s.simplices_per_dim);
    }
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::Dtm(a) => dtm(a),
        Command::Filtration(a) => filtration(a),
        Command::Persist(a) => persist(a),
        Command::Compare(a) => compare(a),
        Command::Snr(a) => snr_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Run(a) => run(a),
    }
}
