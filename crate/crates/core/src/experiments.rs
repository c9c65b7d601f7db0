//! Synthetic datasets and the end-to-end pipeline from a point cloud to
//! diagrams, distance tables and size statistics.
//!
//! Random draws use `ChaCha8Rng` seeded with `seed_from_u64`, whose output is
//! fixed across platforms.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cech::build_cech;
use crate::diagram::{bottleneck, log_bottleneck, snr};
use crate::dtm::{dtm_weights, MassParameter, WeightedPointSet};
use crate::error::{Error, Result};
use crate::filtration::{format_value, Filtration, FiltrationEntry};
use crate::metric::{MetricKind, MetricSpace};
use crate::persistence::{reduce, PersistenceDiagram};
use crate::sparse_rips::{build_sparse_rips, build_sparse_weighted_rips};
use crate::weighted_rips::build_weighted_rips;
use crate::witnessed::{require_integer_count, WitnessSet};

/// Unit cube edges sampled every 0.1 (116 points) plus the centers of the
/// four faces orthogonal to the x and y axes.
pub fn gen_cube_skeleton() -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(120);
    for x in [0.0, 1.0] {
        for y in [0.0, 1.0] {
            for z in [0.0, 1.0] {
                pts.push(vec![x, y, z]);
            }
        }
    }
    for axis in 0..3 {
        for u in [0.0, 1.0] {
            for v in [0.0, 1.0] {
                for i in 1..10 {
                    let mut p = vec![u, v];
                    p.insert(axis, i as f64 / 10.0);
                    pts.push(p);
                }
            }
        }
    }
    for axis in 0..2 {
        for side in [0.0, 1.0] {
            let mut p = vec![0.5; 3];
            p[axis] = side;
            pts.push(p);
        }
    }
    pts
}

/// `n` points on a curve winding `windings` times around the torus with
/// radii `big_r > small_r`, evenly spaced in the long angle.
pub fn gen_torus_spiral(n: usize, big_r: f64, small_r: f64, windings: u32) -> Result<Vec<Vec<f64>>> {
    if n == 0 || windings == 0 || !(small_r > 0.0 && big_r > small_r) || !big_r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "torus spiral needs n >= 1, windings >= 1 and R > r > 0 (n={n}, R={big_r}, r={small_r}, w={windings})"
        )));
    }
    let w = windings as f64;
    Ok((0..n)
        .map(|i| {
            let theta = std::f64::consts::TAU * i as f64 / n as f64;
            let ring = big_r + small_r * (w * theta).cos();
            vec![ring * theta.cos(), ring * theta.sin(), small_r * (w * theta).sin()]
        })
        .collect())
}

/// Adds independent `N(0, sigma^2)` noise to every coordinate.
pub fn add_gaussian_noise(points: &[Vec<f64>], sigma: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise level {sigma} must be >= 0")));
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidParameter(format!("noise level {sigma}: {e}")))?;
    if sigma == 0.0 {
        return Ok(points.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(points
        .iter()
        .map(|p| p.iter().map(|x| x + normal.sample(&mut rng)).collect())
        .collect())
}

/// Which filtration to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Rips,
    WeightedRips,
    SparseRips,
    SparseWeightedRips,
    Witnessed,
    Cech,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Rips,
        Mode::WeightedRips,
        Mode::SparseRips,
        Mode::SparseWeightedRips,
        Mode::Witnessed,
        Mode::Cech,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Rips => "rips",
            Mode::WeightedRips => "weighted-rips",
            Mode::SparseRips => "sparse-rips",
            Mode::SparseWeightedRips => "sparse-weighted-rips",
            Mode::Witnessed => "witnessed",
            Mode::Cech => "cech",
        }
    }

    pub fn needs_mass(self) -> bool {
        matches!(self, Mode::WeightedRips | Mode::SparseWeightedRips | Mode::Witnessed)
    }

    pub fn needs_epsilon(self) -> bool {
        matches!(self, Mode::SparseRips | Mode::SparseWeightedRips)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mode {s:?}")))
    }
}

/// Parameters of a single filtration build.
#[derive(Debug, Clone, Copy)]
pub struct BuildParams {
    pub mode: Mode,
    pub mass: Option<MassParameter>,
    pub epsilon: Option<f64>,
    /// Largest simplex dimension.
    pub max_dim: usize,
    pub alpha_max: Option<f64>,
}

/// Drops every simplex with value above `alpha_max`. Cofaces never enter
/// before their faces, so the result is again a filtration.
pub fn truncate(filtration: Filtration, alpha_max: f64) -> Filtration {
    let kept: Vec<FiltrationEntry> = filtration
        .into_entries()
        .into_iter()
        .filter(|e| e.value <= alpha_max)
        .collect();
    Filtration::from_ordered(kept)
}

fn require_mass(p: &BuildParams) -> Result<MassParameter> {
    p.mass.ok_or_else(|| {
        Error::InvalidParameter(format!("mode {} needs a mass parameter", p.mode))
    })
}

fn require_epsilon(p: &BuildParams) -> Result<f64> {
    p.epsilon.ok_or_else(|| {
        Error::InvalidParameter(format!("mode {} needs epsilon", p.mode))
    })
}

/// Builds the filtration selected by `params.mode` on all points of `space`.
pub fn build_filtration(space: &MetricSpace, params: &BuildParams) -> Result<Filtration> {
    if space.is_empty() {
        return Err(Error::EmptySet);
    }
    let ids = space.all_ids();
    let alpha_max = params.alpha_max.unwrap_or(f64::INFINITY);
    let f = match params.mode {
        Mode::Rips => build_weighted_rips(
            space,
            &WeightedPointSet::unweighted(ids),
            params.max_dim,
            alpha_max,
        )?,
        Mode::WeightedRips => {
            let w = dtm_weights(space, &ids, require_mass(params)?).map_err(Error::at_stage("dtm"))?;
            build_weighted_rips(space, &w, params.max_dim, alpha_max)?
        }
        Mode::SparseRips => build_sparse_rips(space, &ids, require_epsilon(params)?, params.max_dim)?,
        Mode::SparseWeightedRips => {
            let eps = require_epsilon(params)?;
            let w = dtm_weights(space, &ids, require_mass(params)?).map_err(Error::at_stage("dtm"))?;
            build_sparse_weighted_rips(space, &w, eps, params.max_dim)?
        }
        Mode::Witnessed => {
            let k = require_mass(params)?.neighbor_count(ids.len())?;
            let k = require_integer_count(k)?;
            let witnesses = WitnessSet::build(space, &ids, k).map_err(Error::at_stage("dtm"))?;
            let (bary, w) = witnesses.to_weighted_space()?;
            build_weighted_rips(&bary, &w, params.max_dim, alpha_max)?
        }
        Mode::Cech => build_cech(space, &ids, params.max_dim, alpha_max)?,
    };
    Ok(match params.alpha_max {
        Some(a) if params.mode.needs_epsilon() => truncate(f, a),
        _ => f,
    })
}

/// Size record of one filtration build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiltrationStats {
    pub mode: Mode,
    pub epsilon: Option<f64>,
    pub n: usize,
    pub simplices_per_dim: Vec<usize>,
    pub build_ms: u64,
}

impl FiltrationStats {
    pub fn total(&self) -> usize {
        self.simplices_per_dim.iter().sum()
    }
}

/// Builds and times a filtration. With `record_timing` unset `build_ms` is 0,
/// which keeps the stats reproducible byte for byte.
pub fn build_with_stats(
    space: &MetricSpace,
    params: &BuildParams,
    record_timing: bool,
) -> Result<(Filtration, FiltrationStats)> {
    let start = Instant::now();
    let f = build_filtration(space, params)?;
    let build_ms = if record_timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    let stats = FiltrationStats {
        mode: params.mode,
        epsilon: params.epsilon.filter(|_| params.mode.needs_epsilon()),
        n: space.len(),
        simplices_per_dim: f.simplices_per_dim(),
        build_ms,
    };
    Ok((f, stats))
}

/// Pairwise distance matrices between diagrams: one per dimension in
/// `0..=max_dim`, then their entrywise maximum. Log entries that are
/// undefined (a birth at 0) are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTables {
    pub per_dim: Vec<Vec<Vec<f64>>>,
    pub overall: Vec<Vec<f64>>,
}

pub fn distance_tables(diagrams: &[PersistenceDiagram], max_dim: usize, log: bool) -> DistanceTables {
    let n = diagrams.len();
    let per_dim: Vec<Vec<Vec<f64>>> = (0..=max_dim)
        .map(|dim| {
            let mut m = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = if log {
                        log_bottleneck(&diagrams[i], &diagrams[j], dim).unwrap_or(f64::NAN)
                    } else {
                        bottleneck(&diagrams[i], &diagrams[j], dim)
                    };
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            m
        })
        .collect();
    let overall = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    per_dim.iter().map(|m| m[i][j]).fold(0.0, |acc: f64, v| {
                        if acc.is_nan() || v.is_nan() {
                            f64::NAN
                        } else {
                            acc.max(v)
                        }
                    })
                })
                .collect()
        })
        .collect();
    DistanceTables { per_dim, overall }
}

fn format_cell(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format_value(v)
    }
}

/// Square CSV matrix with the names as header row and first column.
pub fn write_matrix_csv<W: Write>(names: &[String], matrix: &[Vec<f64>], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(std::iter::once(String::new()).chain(names.iter().cloned()))?;
    for (name, row) in names.iter().zip(matrix) {
        w.write_record(std::iter::once(name.clone()).chain(row.iter().map(|&v| format_cell(v))))?;
    }
    w.flush()?;
    Ok(())
}

/// Where the point cloud comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Points { points: Vec<Vec<f64>>, metric: MetricKind },
    Matrix(Vec<Vec<f64>>),
    CubeSkeleton,
    TorusSpiral { n: usize, big_r: f64, small_r: f64, windings: u32 },
}

impl Dataset {
    /// The spiral with its default radii and winding count.
    pub fn torus_spiral(n: usize) -> Self {
        Dataset::TorusSpiral {
            n,
            big_r: 2.0,
            small_r: 0.5,
            windings: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrRecord {
    pub mode: Mode,
    pub dim: usize,
    pub j: usize,
    pub snr: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    /// Standard deviation of Gaussian noise added to coordinates.
    pub noise: f64,
    pub seed: u64,
    pub mass: Option<MassParameter>,
    pub epsilon: Option<f64>,
    /// Highest homology dimension of the diagrams; simplices are built one
    /// dimension higher.
    pub max_dim: usize,
    pub alpha_max: Option<f64>,
    pub modes: Vec<Mode>,
    /// `(dim, j)` pairs.
    pub snr: Vec<(usize, usize)>,
    /// Epsilon values for a size sweep.
    pub sweep: Vec<f64>,
    /// Mode of the sweep; defaults to the first sparse mode listed, else
    /// sparse-weighted-rips.
    pub sweep_mode: Option<Mode>,
    pub out_dir: Option<PathBuf>,
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(dataset: Dataset, modes: Vec<Mode>) -> Self {
        Self {
            dataset,
            noise: 0.0,
            seed: 0,
            mass: None,
            epsilon: None,
            max_dim: 1,
            alpha_max: None,
            modes,
            snr: Vec::new(),
            sweep: Vec::new(),
            sweep_mode: None,
            out_dir: None,
            record_timing: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.modes.is_empty() && self.sweep.is_empty() {
            return Err(Error::InvalidParameter("no modes and no sweep requested".into()));
        }
        for &m in &self.modes {
            if m.needs_mass() && self.mass.is_none() {
                return Err(Error::InvalidParameter(format!("mode {m} needs a mass parameter")));
            }
            if m.needs_epsilon() && self.epsilon.is_none() {
                return Err(Error::InvalidParameter(format!("mode {m} needs epsilon")));
            }
        }
        if !self.sweep.is_empty() {
            let m = self.sweep_mode();
            if !m.needs_epsilon() {
                return Err(Error::InvalidParameter(format!("mode {m} takes no epsilon to sweep")));
            }
            if m.needs_mass() && self.mass.is_none() {
                return Err(Error::InvalidParameter(format!("mode {m} needs a mass parameter")));
            }
        }
        if !(self.noise >= 0.0) {
            return Err(Error::InvalidParameter(format!("noise {} must be >= 0", self.noise)));
        }
        Ok(())
    }

    fn sweep_mode(&self) -> Mode {
        self.sweep_mode
            .or_else(|| self.modes.iter().copied().find(|m| m.needs_epsilon()))
            .unwrap_or(Mode::SparseWeightedRips)
    }

    fn params(&self, mode: Mode, epsilon: Option<f64>, max_dim: usize) -> BuildParams {
        BuildParams {
            mode,
            mass: self.mass,
            epsilon,
            max_dim,
            alpha_max: self.alpha_max,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub n: usize,
    pub stats: Vec<FiltrationStats>,
    pub diagrams: Vec<(Mode, PersistenceDiagram)>,
    pub bottleneck: DistanceTables,
    pub log_bottleneck: DistanceTables,
    pub snr: Vec<SnrRecord>,
    pub sweep: Vec<FiltrationStats>,
}

/// Materializes the dataset (with optional noise) as a metric space.
pub fn load_space(dataset: &Dataset, noise: f64, seed: u64) -> Result<MetricSpace> {
    let (points, kind) = match dataset {
        Dataset::Matrix(rows) => {
            if noise > 0.0 {
                return Err(Error::CoordinatesUnavailable);
            }
            return MetricSpace::from_matrix(rows, true);
        }
        Dataset::Points { points, metric } => (points.clone(), *metric),
        Dataset::CubeSkeleton => (gen_cube_skeleton(), MetricKind::L2),
        &Dataset::TorusSpiral {
            n,
            big_r,
            small_r,
            windings,
        } => (gen_torus_spiral(n, big_r, small_r, windings)?, MetricKind::L2),
    };
    let points = add_gaussian_noise(&points, noise, seed)?;
    MetricSpace::from_points(&points, kind)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(dir.join(name))?))
}

/// Builds every requested filtration, computes diagrams, distance tables, SNR
/// values and the epsilon sweep, and writes them to `out_dir` when set.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<PipelineReport> {
    cfg.validate().map_err(Error::at_stage("config"))?;
    let space = load_space(&cfg.dataset, cfg.noise, cfg.seed).map_err(Error::at_stage("load"))?;
    let build_dim = cfg.max_dim + 1;

    let mut stats = Vec::new();
    let mut diagrams = Vec::new();
    for &mode in &cfg.modes {
        let eps = cfg.epsilon.filter(|_| mode.needs_epsilon());
        let (f, s) = build_with_stats(&space, &cfg.params(mode, eps, build_dim), cfg.record_timing)
            .map_err(Error::at_stage("filtration"))?;
        let d = reduce(&f, cfg.max_dim).map_err(Error::at_stage("persistence"))?;
        stats.push(s);
        diagrams.push((mode, d));
    }

    let plain: Vec<PersistenceDiagram> = diagrams.iter().map(|(_, d)| d.clone()).collect();
    let bottleneck_tables = distance_tables(&plain, cfg.max_dim, false);
    let log_tables = distance_tables(&plain, cfg.max_dim, true);

    let mut snr_records = Vec::new();
    for (mode, d) in &diagrams {
        for &(dim, j) in &cfg.snr {
            let value = snr(d, dim, j).map_err(Error::at_stage("snr"))?;
            snr_records.push(SnrRecord {
                mode: *mode,
                dim,
                j,
                snr: value,
            });
        }
    }

    let sweep_mode = cfg.sweep_mode();
    let mut sweep = Vec::new();
    for &eps in &cfg.sweep {
        let params = cfg.params(sweep_mode, Some(eps), build_dim);
        let (_, s) = build_with_stats(&space, &params, cfg.record_timing).map_err(Error::at_stage("sweep"))?;
        sweep.push(s);
    }

    let report = PipelineReport {
        n: space.len(),
        stats,
        diagrams,
        bottleneck: bottleneck_tables,
        log_bottleneck: log_tables,
        snr: snr_records,
        sweep,
    };
    if let Some(dir) = &cfg.out_dir {
        write_report(&report, dir, cfg.max_dim).map_err(Error::at_stage("write"))?;
    }
    Ok(report)
}

fn write_report(report: &PipelineReport, dir: &Path, max_dim: usize) -> Result<()> {
    fs::create_dir_all(dir)?;
    for ((mode, d), s) in report.diagrams.iter().zip(&report.stats) {
        d.write_csv(create(dir, &format!("{mode}.diagram.csv"))?)?;
        let mut w = create(dir, &format!("{mode}.stats.json"))?;
        serde_json::to_writer_pretty(&mut w, s)?;
        writeln!(w)?;
        w.flush()?;
    }
    if !report.diagrams.is_empty() {
        let names: Vec<String> = report.diagrams.iter().map(|(m, _)| m.to_string()).collect();
        for (tables, prefix) in [(&report.bottleneck, "bottleneck"), (&report.log_bottleneck, "log_bottleneck")] {
            write_matrix_csv(&names, &tables.overall, create(dir, &format!("{prefix}.csv"))?)?;
            for dim in 0..=max_dim {
                write_matrix_csv(
                    &names,
                    &tables.per_dim[dim],
                    create(dir, &format!("{prefix}_dim{dim}.csv"))?,
                )?;
            }
        }
    }
    if !report.snr.is_empty() {
        let mut w = create(dir, "snr.csv")?;
        writeln!(w, "mode,dim,j,snr")?;
        for r in &report.snr {
            writeln!(w, "{},{},{},{}", r.mode, r.dim, r.j, format_cell(r.snr))?;
        }
        w.flush()?;
    }
    if !report.sweep.is_empty() {
        let mut w = create(dir, "sweep.json")?;
        serde_json::to_writer_pretty(&mut w, &report.sweep)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}
