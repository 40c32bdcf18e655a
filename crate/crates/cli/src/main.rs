use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mobsim_core::engine::run_simulation;
use mobsim_core::metrics::compare;
use mobsim_core::mobility::{build_contact_matrix, load_trips, network_stats};
use mobsim_core::runner::{
    export_results, generate_synthetic_city, read_sweep_result, run_sweep, Scenario, TripInput,
};
use mobsim_core::theory::{ranking_rows, write_ranking_csv};
use mobsim_core::transit::sample_transit_matrix;
use mobsim_core::{
    DeltaBand, ErrorKind, GammaTripModel, HazardVariant, InvasionVariant, ParamPair, PrevalenceSeries,
    ScenarioConfig, SeedRule,
};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] mobsim_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 1,
                ErrorKind::Infeasible => 2,
                ErrorKind::Io => 3,
            },
            CliError::Io { .. } => 3,
            CliError::Usage(_) => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Metapopulation epidemic simulations on mobility and transit contact matrices.
#[derive(Debug, Parser)]
#[command(name = "mobsim", version)]
struct Cli {
    /// Scenario configuration (JSON). Flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the contact matrix from trip records and report network statistics.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        /// Write the statistics JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic city as locations and trips CSV files.
    SynthCity {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        n_locations: Option<usize>,
        #[arg(long)]
        radius_km: Option<f64>,
        #[arg(long)]
        d0_km: Option<f64>,
        #[arg(long)]
        trips_per_capita: Option<f64>,
        /// Seed of the city generator.
        #[arg(long)]
        city_seed: Option<u64>,
    },
    /// Run a single simulation and write its prevalence series.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        disease: DiseaseArgs,
        /// Location index to seed; default draws proportionally to population.
        #[arg(long)]
        seed_location: Option<usize>,
        /// Simulate on a transit matrix sampled with this shape.
        #[arg(long, requires = "transit_theta")]
        transit_k: Option<u32>,
        #[arg(long, requires = "transit_k")]
        transit_theta: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full parameter sweep and export its results.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        seed_draws: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        horizon: Option<u32>,
        #[arg(long, value_enum)]
        hazard_variant: Option<HazardArg>,
        /// Distance bands to sweep; repeatable.
        #[arg(long = "band", value_enum)]
        bands: Vec<BandArg>,
    },
    /// Compare a transit prevalence CSV against a mobility prevalence CSV.
    Compare {
        #[arg(long)]
        transit: PathBuf,
        #[arg(long)]
        mobile: PathBuf,
        #[arg(long)]
        max_lag: Option<usize>,
        #[arg(long)]
        early_warning_level: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank destinations by invasion probability from a source location.
    #[command(allow_negative_numbers = true)]
    Theory {
        #[command(flatten)]
        input: InputArgs,
        /// Source location id.
        #[arg(long)]
        source: String,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, value_enum, default_value = "r0-consistent")]
        variant: VariantArg,
        #[arg(long, default_value_t = 2)]
        transit_k: u32,
        #[arg(long, default_value_t = 5)]
        transit_theta: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-export a saved sweep result.
    Export {
        /// `sweep_result.json` written by `sweep`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Trip records CSV; without it a synthetic city is generated.
    #[arg(long, requires = "locations")]
    trips: Option<PathBuf>,
    #[arg(long, requires = "trips")]
    locations: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiseaseArgs {
    /// Disease from the config roster, e.g. `h1n1`.
    #[arg(long, conflicts_with_all = ["beta", "gamma"])]
    disease: Option<String>,
    #[arg(long, requires = "gamma")]
    beta: Option<f64>,
    #[arg(long, requires = "beta")]
    gamma: Option<f64>,
    #[arg(long)]
    horizon: Option<u32>,
    #[arg(long, value_enum)]
    hazard_variant: Option<HazardArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HazardArg {
    AsPrinted,
    NoInnerS,
}

impl From<HazardArg> for HazardVariant {
    fn from(h: HazardArg) -> Self {
        match h {
            HazardArg::AsPrinted => HazardVariant::AsPrinted,
            HazardArg::NoInnerS => HazardVariant::NoInnerS,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BandArg {
    Low,
    Mediate,
    High,
}

impl From<BandArg> for DeltaBand {
    fn from(b: BandArg) -> Self {
        match b {
            BandArg::Low => DeltaBand::Low,
            BandArg::Mediate => DeltaBand::Mediate,
            BandArg::High => DeltaBand::High,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    R0Consistent,
    AsPrinted,
}

impl From<VariantArg> for InvasionVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::R0Consistent => InvasionVariant::R0Consistent,
            VariantArg::AsPrinted => InvasionVariant::AsPrinted,
        }
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
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_config(cli: &Cli) -> CliResult<ScenarioConfig> {
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::from_json_file(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    Ok(config)
}

fn apply_input(config: &mut ScenarioConfig, input: &InputArgs) {
    if let (Some(trips), Some(locations)) = (&input.trips, &input.locations) {
        config.input = Some(TripInput { trips: trips.clone(), locations: locations.clone() });
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.into(), source })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io { path: path.into(), source })
}

/// Runs `body` against the output file, or stdout when none is given.
fn with_output(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            body(&mut w)?;
            w.flush().map_err(|source| CliError::Io { path: path.into(), source })
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush().map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn write_json(w: &mut dyn Write, value: &impl serde::Serialize) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(mobsim_core::Error::from)?;
    writeln!(w).map_err(|source| CliError::Io { path: "<output>".into(), source })
}

fn run(cli: Cli) -> CliResult<()> {
    let mut config = load_config(&cli)?;
    match cli.command {
        Command::Ingest { input, out } => {
            let (Some(trips), Some(locations)) = (&input.trips, &input.locations) else {
                return Err(CliError::Usage("ingest needs --trips and --locations".into()));
            };
            let data = load_trips(trips, locations)?;
            log::info!(
                "{} rows, {} merged duplicates, {} records",
                data.report.trip_rows,
                data.report.duplicate_rows_merged,
                data.report.records
            );
            let matrix = build_contact_matrix(data.locations.len(), &data.trips)?;
            let stats = network_stats(&matrix);
            with_output(out.as_deref(), |w| write_json(w, &stats))
        }
        Command::SynthCity { out_dir, n_locations, radius_km, d0_km, trips_per_capita, city_seed } => {
            let spec = &mut config.city;
            if let Some(v) = n_locations {
                spec.n_locations = v;
            }
            if let Some(v) = radius_km {
                spec.radius_km = v;
            }
            if let Some(v) = d0_km {
                spec.d0_km = v;
            }
            if let Some(v) = trips_per_capita {
                spec.trips_per_capita = v;
            }
            if let Some(v) = city_seed {
                spec.seed = v;
            }
            let city = generate_synthetic_city(&config.city)?;
            with_output(Some(&out_dir.join("locations.csv")), |w| Ok(city.write_locations_csv(w)?))?;
            with_output(Some(&out_dir.join("trips.csv")), |w| Ok(city.write_trips_csv(w)?))
        }
        Command::Simulate { input, disease, seed_location, transit_k, transit_theta, out } => {
            apply_input(&mut config, &input);
            if let Some(h) = disease.horizon {
                config.horizon = h;
            }
            if let Some(v) = disease.hazard_variant {
                config.hazard_variant = v.into();
            }
            let chosen = match (&disease.disease, disease.beta, disease.gamma) {
                (_, Some(beta), Some(gamma)) => mobsim_core::runner::Disease::new("custom", beta, gamma),
                (Some(name), _, _) => config
                    .diseases
                    .iter()
                    .find(|d| &d.name == name)
                    .cloned()
                    .ok_or_else(|| CliError::Usage(format!("unknown disease {name}")))?,
                _ => config.diseases.first().cloned().ok_or_else(|| CliError::Usage("no disease configured".into()))?,
            };
            let params = config.params(&chosen)?;
            let scenario = Scenario::from_config(&config)?;
            let rule = seed_location.map_or(config.seed_rule, SeedRule::Fixed);
            let series = match (transit_k, transit_theta) {
                (Some(k), Some(theta)) => {
                    let mut model = GammaTripModel::from_pair(ParamPair { k, theta }, config.mu)?;
                    model.calibrate(&scenario.trip_masses()?)?;
                    let transit =
                        sample_transit_matrix(&scenario.matrix, &scenario.distances, &model, config.master_seed)?;
                    run_simulation(&transit, &params, rule, config.master_seed)?
                }
                _ => run_simulation(&scenario.matrix, &params, rule, config.master_seed)?,
            };
            log::info!("final size {:.4} after {} days", series.final_size, series.len() - 1);
            with_output(out.as_deref(), |w| Ok(series.write_csv(w)?))
        }
        Command::Sweep { input, output_dir, seed_draws, replicates, mu, horizon, hazard_variant, bands } => {
            apply_input(&mut config, &input);
            if let Some(v) = output_dir {
                config.output_dir = Some(v);
            }
            if let Some(v) = seed_draws {
                config.seed_draws = v;
            }
            if let Some(v) = replicates {
                config.replicates = v;
            }
            if let Some(v) = mu {
                config.mu = v;
            }
            if let Some(v) = horizon {
                config.horizon = v;
            }
            if let Some(v) = hazard_variant {
                config.hazard_variant = v.into();
            }
            if !bands.is_empty() {
                config.delta_bands = bands.into_iter().map(DeltaBand::from).collect();
            }
            let dir = config
                .output_dir
                .clone()
                .ok_or_else(|| CliError::Usage("sweep needs --output-dir or output_dir in the config".into()))?;
            let result = run_sweep(&config)?;
            export_results(&result, &dir)?;
            eprintln!(
                "{} simulations, {} paired comparisons, {} cells skipped -> {}",
                result.total_simulations,
                result.paired_runs(),
                result.skipped.len(),
                dir.display()
            );
            Ok(())
        }
        Command::Compare { transit, mobile, max_lag, early_warning_level, out } => {
            let read = |path: &Path| -> CliResult<PrevalenceSeries> {
                let file = File::open(path).map_err(|source| CliError::Io { path: path.into(), source })?;
                Ok(PrevalenceSeries::read_csv(io::BufReader::new(file))?)
            };
            let (x, y) = (read(&transit)?, read(&mobile)?);
            let mut cfg = config.compare_config();
            if cli.config.is_none() {
                cfg.max_lag = None;
            }
            if let Some(v) = max_lag {
                cfg.max_lag = Some(v);
            }
            if let Some(v) = early_warning_level {
                cfg.early_warning_level = v;
            }
            let report = compare(&x, &y, &cfg)?;
            with_output(out.as_deref(), |w| write_json(w, &report))
        }
        Command::Theory { input, source, beta, gamma, variant, transit_k, transit_theta, out } => {
            apply_input(&mut config, &input);
            let scenario = Scenario::from_config(&config)?;
            let ids: Vec<String> = scenario.locations.iter().map(|l| l.id.clone()).collect();
            let source = scenario
                .locations
                .index_of(&source)
                .ok_or_else(|| CliError::Usage(format!("unknown source location {source}")))?;
            let mut model = GammaTripModel::from_pair(ParamPair { k: transit_k, theta: transit_theta }, config.mu)?;
            model.calibrate(&scenario.trip_masses()?)?;
            let transit = sample_transit_matrix(&scenario.matrix, &scenario.distances, &model, config.master_seed)?;
            let rows = ranking_rows(&scenario.matrix, &transit, &ids, source, beta, gamma, variant.into())?;
            with_output(out.as_deref(), |w| Ok(write_ranking_csv(&rows, w)?))
        }
        Command::Export { input, out_dir } => {
            let result = read_sweep_result(&input)?;
            export_results(&result, &out_dir)?;
            Ok(())
        }
    }
}
