//! `dirac` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 numerical failure.

// `!(x > 0)` style comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac::experiments::{default_gamma_grid, drifter_planted, run_planted};
use dirac::io::{self, RunManifest};
use dirac::{
    ngf_generate, Alignment, Basis, Dirac, Error, ExperimentConfig, Filter, FilterSpec, NgfConfig, NoiseKind,
    NormalizationMode, SpectralBasis, Variant,
};

const THREADS_ENV: &str = "DIRAC_THREADS";

#[derive(Parser, Debug)]
#[command(name = "dirac", version, about = "Dirac-operator signal processing on simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow an NGF complex (flavor -1, beta 0) and write it to a complex file.
    Generate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        triangles: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the Dirac eigenpairs as CSV.
    Spectrum {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, value_enum, default_value_t = Norm::Spectral)]
        normalization: Norm,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply (I + gamma Q_n(z))^-1 to a signal.
    Filter {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        variant: u8,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, value_enum, default_value_t = Norm::Spectral)]
        normalization: Norm,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a signal into its im(D1), im(D2) and harmonic parts.
    Decompose {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, value_enum, default_value_t = Norm::Spectral)]
        normalization: Norm,
        #[arg(long)]
        out: PathBuf,
    },
    /// Planted-signal denoising sweep over z and gamma.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Complex file; when absent an NGF complex is generated.
    #[arg(long, conflicts_with = "triangles")]
    complex: Option<PathBuf>,
    /// Size of the generated NGF complex.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    triangles: Option<u64>,
    /// Seed of the generated NGF complex.
    #[arg(long, default_value_t = 0)]
    complex_seed: u64,
    /// Edge-flow CSV; the clean signal becomes the normalized im(D_n) part of sigma + D sigma.
    #[arg(long, requires = "complex")]
    flow: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    variant: u8,
    #[arg(long, value_enum, default_value_t = Noise::Opposite)]
    noise: Noise,
    #[arg(long = "z", value_delimiter = ',', allow_negative_numbers = true, default_values_t = [-0.95, 0.0, 0.95])]
    z_values: Vec<f64>,
    /// Comma-separated gamma values; defaults to 40 log-spaced points in [1e-2, 1e2].
    #[arg(long)]
    gamma_grid: Option<String>,
    #[arg(long, default_value_t = 50)]
    realizations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Norm {
    None,
    Spectral,
}

impl From<Norm> for NormalizationMode {
    fn from(n: Norm) -> Self {
        match n {
            Norm::None => NormalizationMode::None,
            Norm::Spectral => NormalizationMode::Spectral,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Noise {
    Opposite,
    Gaussian,
}

impl From<Noise> for NoiseKind {
    fn from(n: Noise) -> Self {
        match n {
            Noise::Opposite => NoiseKind::OppositeSymmetry,
            Noise::Gaussian => NoiseKind::GaussianSubspace,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_) | Error::UnsupportedNgf { .. } | Error::InvalidBoundaryIndex(_) => 1,
        Error::SvdFailure
        | Error::EigenFailure
        | Error::IndefiniteRegularizer(_)
        | Error::SolverBreakdown
        | Error::NonFinite(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads() -> dirac::Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{THREADS_ENV} must be a non-negative integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

fn run(command: Command) -> dirac::Result<()> {
    match command {
        Command::Generate { triangles, seed, out } => generate(triangles as usize, seed, &out),
        Command::Spectrum { complex, normalization, out } => spectrum(&complex, normalization.into(), &out),
        Command::Filter { complex, signal, variant, z, gamma, normalization, out } => {
            filter(&complex, &signal, variant, z, gamma, normalization.into(), &out)
        }
        Command::Decompose { complex, signal, normalization, out } => {
            decompose(&complex, &signal, normalization.into(), &out)
        }
        Command::Experiment(args) => experiment(args),
    }
}

fn generate(triangles: usize, seed: u64, out: &Path) -> dirac::Result<()> {
    let complex = ngf_generate(&NgfConfig::new(triangles, seed))?;
    io::write_complex(out, &complex)?;
    let (n, e, t) = complex.counts();
    println!("N={n} E={e} T={t}");
    Ok(())
}

fn load(path: &Path, mode: NormalizationMode) -> dirac::Result<(dirac::Complex, Dirac)> {
    let complex = io::read_complex(path)?;
    let op = Dirac::unweighted(&complex, mode)?;
    Ok((complex, op))
}

fn spectrum(path: &Path, mode: NormalizationMode, out: &Path) -> dirac::Result<()> {
    let (complex, op) = load(path, mode)?;
    let basis = SpectralBasis::compute(&op)?;
    let mut buf = Vec::new();
    io::write_spectrum(&mut buf, &complex, &basis)?;
    std::fs::write(out, buf).map_err(|e| Error::Io { path: out.into(), source: e })?;
    let (b0, b1, b2) = basis.betti_numbers(&complex)?;
    println!("rows={} betti=({b0},{b1},{b2})", complex.size());
    Ok(())
}

fn filter(
    complex_path: &Path,
    signal_path: &Path,
    variant: u8,
    z: f64,
    gamma: f64,
    mode: NormalizationMode,
    out: &Path,
) -> dirac::Result<()> {
    let spec = FilterSpec::new(Variant::from_index(variant)?, z, gamma)?;
    let (complex, op) = load(complex_path, mode)?;
    let signal = io::read_signal(signal_path, &complex)?;
    let result = Filter::new(&op, &spec)?.apply(&signal)?;
    let relative = if signal.norm() > 0.0 { result.solve_residual / signal.norm() } else { result.solve_residual };
    if !(relative <= 1e-8) {
        return Err(Error::SolverBreakdown);
    }
    io::write_signal(out, &complex, &result.s_hat)?;
    let mut manifest = RunManifest::new("filter");
    manifest
        .param("variant", variant)
        .param("z", z)
        .param("gamma", gamma)
        .param("normalization", format!("{mode:?}").to_lowercase())
        .meta("solve_residual", result.solve_residual)
        .meta("relative_residual", relative);
    manifest.input(complex_path)?.input(signal_path)?;
    manifest.write(&io::manifest_path(out))?;
    println!("solve_residual={}", io::format_float(result.solve_residual));
    Ok(())
}

fn decompose(complex_path: &Path, signal_path: &Path, mode: NormalizationMode, out: &Path) -> dirac::Result<()> {
    let (complex, op) = load(complex_path, mode)?;
    let signal = io::read_signal(signal_path, &complex)?;
    let basis: Basis = SpectralBasis::compute(&op)?;
    let parts = basis.decompose(&signal)?;
    io::write_decomposition(out, &complex, &signal, &parts)?;
    println!(
        "|s1|={} |s2|={} |s_harm|={}",
        io::format_float(parts.s1.norm()),
        io::format_float(parts.s2.norm()),
        io::format_float(parts.s_harm.norm())
    );
    Ok(())
}

fn parse_gamma_grid(raw: Option<&str>) -> dirac::Result<Vec<f64>> {
    let Some(raw) = raw else {
        return Ok(default_gamma_grid());
    };
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| Error::InvalidParameter(format!("gamma {s:?}: {e}"))))
        .collect()
}

fn experiment(args: ExperimentArgs) -> dirac::Result<()> {
    let variant = Variant::from_index(args.variant)?;
    let config = ExperimentConfig {
        gamma_grid: parse_gamma_grid(args.gamma_grid.as_deref())?,
        z_values: args.z_values.clone(),
        realizations: args.realizations,
        variant,
        noise: args.noise.into(),
        master_seed: args.seed,
    };
    config.validate()?;

    let mut manifest = RunManifest::new("experiment");
    let complex = match (&args.complex, args.triangles) {
        (Some(path), _) => {
            manifest.input(path)?;
            io::read_complex(path)?
        }
        (None, triangles) => {
            let t = triangles.unwrap_or(50) as usize;
            manifest.param("triangles", t).seed("complex", args.complex_seed);
            ngf_generate(&NgfConfig::new(t, args.complex_seed))?
        }
    };
    let op = Dirac::unweighted(&complex, NormalizationMode::Spectral)?;
    let basis = SpectralBasis::compute(&op)?;
    let (planted, alignment) = match &args.flow {
        Some(flow_path) => {
            manifest.input(flow_path)?;
            manifest.meta("planted", "drifter").meta("renormalized_projection", true);
            let sigma = io::read_edge_flow(flow_path, &complex)?;
            (drifter_planted(&op, &basis, &sigma, variant)?, Alignment::Aligned)
        }
        None => {
            manifest.meta("planted", "extremal_anti_aligned_eigenvector");
            (basis.planted_eigenvector(variant)?, Alignment::Anti)
        }
    };
    let curve = run_planted(&op, &basis, &planted, alignment, &config)?;

    let mut buf = Vec::new();
    io::write_error_curve(&mut buf, &curve)?;
    std::fs::write(&args.out, buf).map_err(|e| Error::Io { path: args.out.clone(), source: e })?;

    let (n, e, t) = complex.counts();
    manifest
        .param("variant", args.variant)
        .param("noise", config.noise.label())
        .param("z", &config.z_values)
        .param("gamma_grid", &config.gamma_grid)
        .param("realizations", config.realizations)
        .param("normalization", "spectral")
        .seed("master", config.master_seed)
        .meta("counts", [n, e, t]);
    manifest.write(&io::manifest_path(&args.out))?;
    for z in &config.z_values {
        if let Some(min) = curve.min_mean(*z) {
            println!("z={} min_mean_delta={}", io::format_float(*z), io::format_float(min));
        }
    }
    Ok(())
}
