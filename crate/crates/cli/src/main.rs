use std::path::PathBuf;
use std::process::ExitCode;

use bbq_core::hamiltonian::Boundary;
use bbq_core::measures::LambdaOrdering;
use bbq_core::spectra::DEFAULT_SEED;
use bbq_core::sweep::{csv_string, run_sweep, write_csv, write_svg_plot, DetectorParams, Measure, SweepConfig, ThetaGrid};
use bbq_core::{Error, Result};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Ordering {
    Abs,
    Value,
}

/// θ sweeps of entanglement and correlation measures for the spin-1
/// bilinear-biquadratic chain.
#[derive(Debug, Parser)]
#[command(name = "bbq", version)]
struct Args {
    /// Number of spin-1 sites.
    #[arg(long)]
    length: usize,

    /// periodic or open.
    #[arg(long, default_value = "periodic")]
    boundary: Boundary,

    /// Lower end of the grid, in units of π.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    theta_min: f64,

    /// Upper end of the grid, in units of π.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    theta_max: f64,

    /// Grid points, endpoints included.
    #[arg(long, default_value_t = 401)]
    steps: usize,

    /// 0 for the ground state, otherwise a Gibbs state (k_B = 1).
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,

    /// Comma-separated subset of negativity, concurrence_total,
    /// concurrence_partial, entropy_total, entropy_partial, zhou.
    #[arg(long, value_delimiter = ',', required = true)]
    measures: Vec<Measure>,

    /// 1-based sites of the two-site reduced state.
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "1,2")]
    partial_sites: Vec<usize>,

    /// CSV output path (a `.meta.json` sidecar is written next to it);
    /// stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// SVG plot of all requested measures.
    #[arg(long)]
    plot: Option<PathBuf>,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Full dense diagonalization instead of Lanczos (L <= 8).
    #[arg(long)]
    force_dense: bool,

    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,

    /// Disable transition detection.
    #[arg(long)]
    no_detect: bool,

    #[arg(long, default_value_t = DetectorParams::default().jump_threshold)]
    jump_threshold: f64,

    #[arg(long, default_value_t = DetectorParams::default().derivative_threshold_factor)]
    derivative_factor: f64,

    /// Ordering of criterion-matrix eigenvalues before the classical/quantum split.
    #[arg(long, value_enum, default_value = "abs")]
    lambda_order: Ordering,
}

impl Args {
    fn config(&self) -> Result<SweepConfig> {
        let [a, b] = self.partial_sites[..] else {
            return Err(Error::Config(format!("--partial-sites needs two sites, got {:?}", self.partial_sites)));
        };
        let mut c = SweepConfig::new(self.length, self.boundary, self.measures.clone());
        c.theta_grid = ThetaGrid::new(self.theta_min, self.theta_max, self.steps);
        c.temperature = self.temperature;
        c.partial_sites = [a, b];
        c.seed = self.seed;
        c.force_dense = self.force_dense;
        c.jobs = self.jobs;
        c.detector = DetectorParams {
            enabled: !self.no_detect,
            jump_threshold: self.jump_threshold,
            derivative_threshold_factor: self.derivative_factor,
            ..DetectorParams::default()
        };
        c.lambda_ordering = match self.lambda_order {
            Ordering::Abs => LambdaOrdering::DescendingAbs,
            Ordering::Value => LambdaOrdering::DescendingValue,
        };
        c.validate()?;
        Ok(c)
    }
}

fn run(args: &Args) -> Result<()> {
    let config = args.config()?;
    let result = run_sweep(&config)?;
    match &args.out {
        Some(path) => {
            let meta = write_csv(&result, path)?;
            eprintln!("wrote {} and {}", path.display(), meta.display());
        }
        None => print!("{}", csv_string(&result)),
    }
    if let Some(path) = &args.plot {
        write_svg_plot(&result, &config.measures, path)?;
        eprintln!("wrote {}", path.display());
    }
    for t in &result.transitions {
        let flags: Vec<String> =
            t.flags.iter().map(|f| format!("{:.4} ({:?})", f.theta_over_pi, f.kind)).collect();
        eprintln!("{}: [{}]", t.column, flags.join(", "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
