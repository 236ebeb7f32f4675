//! θ sweeps: evaluate measures on a grid, flag candidate transitions and
//! write CSV, JSON metadata and SVG plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{Boundary, ChainTerms};
use crate::measures::{
    coherence_decomposition, ensemble_concurrence, ensemble_negativity, generalized_concurrence,
    von_neumann_entropy, zhou_correlations_with, LambdaOrdering,
};
use crate::spectra::{
    dense_eigh, dense_ground_space, lanczos_ground_space, GroundSolverOptions, DEFAULT_DEGENERACY_TOL,
    DEFAULT_LANCZOS_TOL, DEFAULT_SEED,
};
use crate::states::{ground_state_ensemble, thermal_ensemble, Bipartition, StateEnsemble};

/// Longest chain accepted for finite-temperature sweeps.
pub const MAX_THERMAL_LENGTH: usize = 8;
/// Longest chain accepted for the dense reference path.
pub const MAX_DENSE_LENGTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Site 1 against the rest of the chain.
    Negativity,
    /// Concurrence-vector norm, site 1 against the rest.
    ConcurrenceTotal,
    /// Concurrence-vector norm of the two-site reduced state.
    ConcurrencePartial,
    /// Entropy of the site-1 reduced state.
    EntropyTotal,
    /// Entropy of the two-site reduced state.
    EntropyPartial,
    /// Total, classical and quantum correlations of the two-site reduced state.
    Zhou,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Negativity,
        Measure::ConcurrenceTotal,
        Measure::ConcurrencePartial,
        Measure::EntropyTotal,
        Measure::EntropyPartial,
        Measure::Zhou,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Negativity => "negativity",
            Measure::ConcurrenceTotal => "concurrence_total",
            Measure::ConcurrencePartial => "concurrence_partial",
            Measure::EntropyTotal => "entropy_total",
            Measure::EntropyPartial => "entropy_partial",
            Measure::Zhou => "zhou",
        }
    }

    /// CSV columns produced by this measure.
    pub fn columns(self) -> Vec<&'static str> {
        match self {
            Measure::Zhou => vec!["zhou_tau", "zhou_classical", "zhou_quantum"],
            m => vec![m.name()],
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown measure `{s}`")))
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub min_over_pi: f64,
    pub max_over_pi: f64,
    /// Number of grid points, endpoints included.
    pub steps: usize,
}

impl ThetaGrid {
    pub fn new(min_over_pi: f64, max_over_pi: f64, steps: usize) -> Self {
        ThetaGrid { min_over_pi, max_over_pi, steps }
    }

    /// The full circle at spacing π/200.
    pub fn full_circle() -> Self {
        ThetaGrid::new(-1.0, 1.0, 401)
    }

    pub fn spacing_over_pi(&self) -> f64 {
        (self.max_over_pi - self.min_over_pi) / (self.steps - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing_over_pi();
        (0..self.steps)
            .map(|k| if k + 1 == self.steps { self.max_over_pi } else { self.min_over_pi + k as f64 * h })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub enabled: bool,
    pub derivative_threshold_factor: f64,
    pub jump_threshold: f64,
    /// Derivative peaks must also exceed this absolute slope (measure units
    /// per radian), so flat stretches with a zero median stay quiet.
    pub derivative_floor: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams { enabled: true, derivative_threshold_factor: 5.0, jump_threshold: 0.05, derivative_floor: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub length: usize,
    pub boundary: Boundary,
    pub theta_grid: ThetaGrid,
    /// `0` selects the ground state.
    pub temperature: f64,
    pub measures: Vec<Measure>,
    /// 1-based sites of the two-site reduced state.
    pub partial_sites: [usize; 2],
    pub detector: DetectorParams,
    pub seed: u64,
    /// Full dense diagonalization instead of Lanczos at `T = 0`.
    pub force_dense: bool,
    /// Worker threads; `None` uses every available core, `Some(1)` runs sequentially.
    pub jobs: Option<usize>,
    pub lanczos_tol: f64,
    pub degeneracy_tol: f64,
    pub lambda_ordering: LambdaOrdering,
}

impl SweepConfig {
    pub fn new(length: usize, boundary: Boundary, measures: Vec<Measure>) -> Self {
        SweepConfig {
            length,
            boundary,
            theta_grid: ThetaGrid::full_circle(),
            temperature: 0.0,
            measures,
            partial_sites: [1, 2],
            detector: DetectorParams::default(),
            seed: DEFAULT_SEED,
            force_dense: false,
            jobs: None,
            lanczos_tol: DEFAULT_LANCZOS_TOL,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            lambda_ordering: LambdaOrdering::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.theta_grid;
        if g.steps < 2 {
            return Err(Error::Config(format!("steps = {} < 2", g.steps)));
        }
        if !(g.min_over_pi < g.max_over_pi) || !g.min_over_pi.is_finite() || !g.max_over_pi.is_finite() {
            return Err(Error::Config(format!("theta range [{}, {}] is empty", g.min_over_pi, g.max_over_pi)));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::Config(format!("temperature {} must be finite and >= 0", self.temperature)));
        }
        if self.measures.is_empty() {
            return Err(Error::Config("no measures requested".into()));
        }
        if self.length < 2 {
            return Err(Error::Config(format!("chain length {} < 2", self.length)));
        }
        let [a, b] = self.partial_sites;
        if a == b || a == 0 || b == 0 || a > self.length || b > self.length {
            return Err(Error::Config(format!(
                "partial sites {a},{b} must be two distinct sites in 1..={}",
                self.length
            )));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        let d = &self.detector;
        if !(d.derivative_threshold_factor > 0.0 && d.jump_threshold > 0.0 && d.derivative_floor >= 0.0) {
            return Err(Error::Config("detector thresholds must be positive".into()));
        }
        if self.temperature > 0.0 && self.length > MAX_THERMAL_LENGTH {
            return Err(Error::ResourceLimit(format!(
                "finite-temperature sweeps need the full spectrum and are limited to L <= {MAX_THERMAL_LENGTH}"
            )));
        }
        if self.force_dense && self.length > MAX_DENSE_LENGTH {
            return Err(Error::ResourceLimit(format!("dense diagonalization is limited to L <= {MAX_DENSE_LENGTH}")));
        }
        Ok(())
    }

    /// CSV column names after `theta_over_pi`.
    pub fn columns(&self) -> Vec<String> {
        self.measures.iter().flat_map(|m| m.columns()).map(String::from).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta_over_pi: f64,
    /// One value per column of [`SweepConfig::columns`].
    pub values: Vec<f64>,
    /// Dimension of the ground manifold (`1` for thermal states).
    pub ground_degeneracy: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionKind {
    Jump,
    DerivativePeak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub index: usize,
    pub theta_over_pi: f64,
    pub kind: TransitionKind,
    /// `|ΔM|` for jumps, `|dM/dθ|` for derivative peaks.
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnTransitions {
    pub column: String,
    pub flags: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub config: SweepConfig,
    pub version: String,
    pub solver: String,
    /// Whether the detector ran (it needs at least five grid points).
    pub detector_ran: bool,
    /// `(θ/π, degeneracy)` for every grid point whose ground manifold is degenerate.
    pub degenerate_points: Vec<(f64, usize)>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub transitions: Vec<ColumnTransitions>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn thetas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.theta_over_pi).collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn flags(&self, name: &str) -> Option<&[Transition]> {
        self.transitions.iter().find(|t| t.column == name).map(|t| t.flags.as_slice())
    }
}

/// Shared per-sweep data: the precomputed Hamiltonian terms and bipartitions.
pub struct SweepContext {
    config: SweepConfig,
    terms: ChainTerms,
    site_one: Bipartition,
    pair: [usize; 2],
}

impl SweepContext {
    pub fn new(config: &SweepConfig) -> Result<Self> {
        config.validate()?;
        let terms = ChainTerms::new(config.length, config.boundary)?;
        let site_one = Bipartition::new(vec![0], config.length)?;
        let [a, b] = config.partial_sites;
        Ok(SweepContext { config: config.clone(), terms, site_one, pair: [a - 1, b - 1] })
    }

    pub fn config(&self) -> &SweepConfig {
        &self.config
    }

    /// The state at one grid point: ground manifold or Gibbs ensemble.
    pub fn state(&self, theta_over_pi: f64) -> Result<StateEnsemble> {
        let h = self.terms.operator(theta_over_pi * std::f64::consts::PI);
        let cfg = &self.config;
        if cfg.temperature > 0.0 {
            return thermal_ensemble(&dense_eigh(&h)?, cfg.temperature);
        }
        let gs = if cfg.force_dense {
            dense_ground_space(&h, cfg.degeneracy_tol, false)?
        } else {
            let opts = GroundSolverOptions {
                tol: cfg.lanczos_tol,
                degeneracy_tol: cfg.degeneracy_tol,
                seed: cfg.seed,
                ..GroundSolverOptions::default()
            };
            lanczos_ground_space(&h, &opts)?
        };
        Ok(ground_state_ensemble(&gs))
    }

    /// All configured measures at one grid point.
    pub fn evaluate(&self, theta_over_pi: f64) -> Result<SweepRow> {
        let at = |e: Error| Error::AtTheta { theta_over_pi, source: Box::new(e) };
        let ens = self.state(theta_over_pi).map_err(at)?;
        let values = self.measure_values(&ens).map_err(at)?;
        let ground_degeneracy = if self.config.temperature > 0.0 { 1 } else { ens.rank() };
        Ok(SweepRow { theta_over_pi, values, ground_degeneracy })
    }

    pub fn measure_values(&self, ens: &StateEnsemble) -> Result<Vec<f64>> {
        let mut pair_state = None;
        let mut pair = || -> Result<crate::states::DensityMatrix> {
            if pair_state.is_none() {
                pair_state = Some(ens.reduce(&self.pair)?);
            }
            Ok(pair_state.clone().unwrap())
        };
        let two = Bipartition::split_at(1, 2)?;
        let mut out = Vec::new();
        for m in &self.config.measures {
            match m {
                Measure::Negativity => out.push(ensemble_negativity(ens, &self.site_one)?),
                Measure::ConcurrenceTotal => out.push(ensemble_concurrence(ens, &self.site_one)?.norm()),
                Measure::ConcurrencePartial => out.push(generalized_concurrence(&pair()?, &two)?.norm()),
                Measure::EntropyTotal => out.push(von_neumann_entropy(&ens.reduce(&[0])?)),
                Measure::EntropyPartial => out.push(von_neumann_entropy(&pair()?)),
                Measure::Zhou => {
                    let d = coherence_decomposition(&pair()?)?;
                    let z = zhou_correlations_with(&d, 3, self.config.lambda_ordering)?;
                    out.extend([z.total, z.classical, z.quantum]);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(feature = "parallel")]
fn map_points<T, F>(points: &[f64], jobs: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    use rayon::prelude::*;
    if jobs == Some(1) {
        return points.iter().map(|&p| f(p)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build();
    match pool {
        Ok(pool) => pool.install(|| points.par_iter().map(|&p| f(p)).collect()),
        Err(_) => points.iter().map(|&p| f(p)).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_points<T, F>(points: &[f64], _jobs: Option<usize>, f: F) -> Vec<T>
where
    F: Fn(f64) -> T,
{
    points.iter().map(|&p| f(p)).collect()
}

/// Evaluates every grid point (in parallel when enabled), then runs the
/// detector on each column.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    let start = Instant::now();
    let ctx = SweepContext::new(config)?;
    let points = config.theta_grid.points();
    let rows = map_points(&points, config.jobs, |t| ctx.evaluate(t)).into_iter().collect::<Result<Vec<_>>>()?;
    let columns = config.columns();
    let detector_ran = config.detector.enabled && rows.len() >= MIN_DETECTOR_POINTS;
    let mut transitions = Vec::with_capacity(columns.len());
    for (i, name) in columns.iter().enumerate() {
        let flags = if detector_ran {
            let values: Vec<f64> = rows.iter().map(|r| r.values[i]).collect();
            detect_transitions(&points, &values, &config.detector)?
        } else {
            Vec::new()
        };
        transitions.push(ColumnTransitions { column: name.clone(), flags });
    }
    let degenerate_points =
        rows.iter().filter(|r| r.ground_degeneracy > 1).map(|r| (r.theta_over_pi, r.ground_degeneracy)).collect();
    let solver = if config.temperature > 0.0 {
        "dense-thermal"
    } else if config.force_dense {
        "dense-ground"
    } else {
        "lanczos-ground"
    };
    let metadata = SweepMetadata {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        solver: solver.to_string(),
        detector_ran,
        degenerate_points,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(SweepResult { columns, rows, transitions, metadata })
}

pub const MIN_DETECTOR_POINTS: usize = 5;

/// Flags grid points where `values` jumps by more than the jump threshold
/// (the left point of the pair) or where the central-difference slope is a
/// local maximum above `factor × median` and the absolute floor. Flags at
/// adjacent grid points are merged, keeping the strongest jump if any,
/// otherwise the steepest slope.
pub fn detect_transitions(thetas_over_pi: &[f64], values: &[f64], params: &DetectorParams) -> Result<Vec<Transition>> {
    let n = values.len();
    if n < MIN_DETECTOR_POINTS {
        return Err(Error::Domain(format!("transition detection needs at least {MIN_DETECTOR_POINTS} points, got {n}")));
    }
    if thetas_over_pi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: thetas_over_pi.len() });
    }
    let pi = std::f64::consts::PI;
    let mut flags = Vec::new();
    for k in 0..n - 1 {
        let d = (values[k + 1] - values[k]).abs();
        if d > params.jump_threshold {
            flags.push(Transition { index: k, theta_over_pi: thetas_over_pi[k], kind: TransitionKind::Jump, strength: d });
        }
    }
    let slope: Vec<f64> = (1..n - 1)
        .map(|k| ((values[k + 1] - values[k - 1]) / ((thetas_over_pi[k + 1] - thetas_over_pi[k - 1]) * pi)).abs())
        .collect();
    let mut sorted = slope.clone();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 { sorted[m / 2] } else { 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) };
    let threshold = (params.derivative_threshold_factor * median).max(params.derivative_floor);
    for j in 0..slope.len() {
        let left = if j > 0 { slope[j - 1] } else { f64::NEG_INFINITY };
        let right = slope.get(j + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if slope[j] > threshold && slope[j] >= left && slope[j] > right {
            let k = j + 1;
            flags.push(Transition {
                index: k,
                theta_over_pi: thetas_over_pi[k],
                kind: TransitionKind::DerivativePeak,
                strength: slope[j],
            });
        }
    }
    flags.sort_by_key(|t| (t.index, t.kind != TransitionKind::Jump));
    let mut out: Vec<Transition> = Vec::new();
    let mut cluster: Vec<Transition> = Vec::new();
    let flush = |cluster: &mut Vec<Transition>, out: &mut Vec<Transition>| {
        let best = cluster
            .iter()
            .copied()
            .max_by(|a, b| {
                let rank = |t: &Transition| (t.kind == TransitionKind::Jump) as u8;
                rank(a).cmp(&rank(b)).then(a.strength.total_cmp(&b.strength)).then(b.index.cmp(&a.index))
            });
        out.extend(best);
        cluster.clear();
    };
    for t in flags {
        if let Some(last) = cluster.last() {
            if t.index > last.index + 1 {
                flush(&mut cluster, &mut out);
            }
        }
        cluster.push(t);
    }
    flush(&mut cluster, &mut out);
    Ok(out)
}

/// 12 significant digits in scientific notation; zero is written unsigned.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        "0.00000000000e0".to_string()
    } else {
        format!("{x:.11e}")
    }
}

pub fn csv_string(result: &SweepResult) -> String {
    let mut s = String::from("theta_over_pi");
    for c in &result.columns {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    for row in &result.rows {
        s.push_str(&format_value(row.theta_over_pi));
        for v in &row.values {
            s.push(',');
            s.push_str(&format_value(*v));
        }
        s.push('\n');
    }
    s
}

/// `sweep.csv` → `sweep.meta.json`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

#[derive(Serialize)]
struct MetadataFile<'a> {
    #[serde(flatten)]
    metadata: &'a SweepMetadata,
    columns: &'a [String],
    transitions: &'a [ColumnTransitions],
}

/// Writes the CSV table and its `.meta.json` sidecar.
pub fn write_csv(result: &SweepResult, path: &Path) -> Result<PathBuf> {
    std::fs::write(path, csv_string(result))?;
    let meta = MetadataFile { metadata: &result.metadata, columns: &result.columns, transitions: &result.transitions };
    let meta_path = metadata_path(path);
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(meta_path)
}

/// Parses a CSV written by [`write_csv`] into its header and rows.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Domain("empty CSV".into()))?
        .split(',')
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| Error::Domain(format!("bad CSV field `{f}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(Error::DimensionMismatch { expected: header.len(), actual: row.len() });
        }
        rows.push(row);
    }
    Ok((header, rows))
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Self-contained SVG line plot of the selected measures against θ/π,
/// with dashed vertical markers at flagged transitions.
pub fn svg_string(result: &SweepResult, measures: &[Measure]) -> Result<String> {
    if result.rows.len() < 2 {
        return Err(Error::Domain("plot needs at least two grid points".into()));
    }
    let mut cols = Vec::new();
    for m in measures {
        for c in m.columns() {
            let i = result
                .columns
                .iter()
                .position(|x| x == c)
                .ok_or_else(|| Error::Config(format!("measure `{m}` is not in the sweep")))?;
            cols.push((i, c));
        }
    }
    let (w, h) = (800.0, 500.0);
    let (ml, mr, mt, mb) = (70.0, 170.0, 30.0, 50.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let thetas = result.thetas();
    let (x0, x1) = (thetas[0], thetas[thetas.len() - 1]);
    let mut y0 = 0.0f64;
    let mut y1 = f64::NEG_INFINITY;
    for &(i, _) in &cols {
        for r in &result.rows {
            y0 = y0.min(r.values[i]);
            y1 = y1.max(r.values[i]);
        }
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - if y0 < 0.0 { pad } else { 0.0 }, y1 + pad);
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| mt + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for t in 0..=4 {
        let xv = x0 + (x1 - x0) * t as f64 / 4.0;
        let yv = y0 + (y1 - y0) * t as f64 / 4.0;
        let (x, y) = (px(xv), py(yv));
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, mt + ph, mt + ph + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{xv:.2}</text>"#,
            mt + ph + 20.0
        );
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{ml}" y2="{y:.2}" stroke="black"/>"#, ml - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{yv:.3}</text>"#,
            ml - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">θ/π</text>"#,
        ml + pw / 2.0,
        h - 10.0
    );
    for (n, &(i, name)) in cols.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        if let Some(flags) = result.flags(name) {
            for f in flags {
                let x = px(f.theta_over_pi);
                let _ = writeln!(
                    s,
                    r#"<line class="transition" x1="{x:.2}" y1="{mt}" x2="{x:.2}" y2="{:.2}" stroke="{color}" stroke-width="1" stroke-dasharray="4 3"/>"#,
                    mt + ph
                );
            }
        }
        let pts: Vec<String> =
            result.rows.iter().map(|r| format!("{:.2},{:.2}", px(r.theta_over_pi), py(r.values[i]))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = mt + 15.0 + 20.0 * n as f64;
        let lx = ml + pw + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{name}</text>"#,
            lx + 32.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg_plot(result: &SweepResult, measures: &[Measure], path: &Path) -> Result<()> {
    std::fs::write(path, svg_string(result, measures)?)?;
    Ok(())
}
