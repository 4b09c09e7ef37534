use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harvest_cli::config::{RunConfig, Task, CONFIG_HELP};
use harvest_cli::presets::{self, Preset};
use harvest_cli::run::{provenance, run};
use harvest_cli::svg::{render, PlotSpec, Table};
use harvest_cli::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "harvest",
    version,
    about = "Entanglement harvesting between localized probe-field modes",
    after_long_help = CONFIG_HELP
)]
struct Cli {
    /// JSON run configuration (see --help for every key)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// CSV (or, for `plot`, SVG) output path; stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Also write an SVG plot next to the CSV
    #[arg(long, global = true)]
    svg: bool,

    /// Override the number of sweep points (or couplings for `oracle`)
    #[arg(long, global = true)]
    points: Option<usize>,

    /// Fail if the configuration would draw random numbers
    #[arg(long, global = true)]
    seedless: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Leading-order detector state over a gap or separation sweep
    Harvest,
    /// Symplectic eigenvalue of a trapped Gaussian mode over sigma / l
    Purity,
    /// Exact lattice simulation against the leading-order prediction
    Oracle {
        /// Without --config, run the multimode probe-chain campaign
        #[arg(long)]
        chain: bool,
    },
    /// Render a CSV artifact as SVG
    Plot {
        /// CSV file to read
        csv: PathBuf,
        /// Column for the horizontal axis
        #[arg(long)]
        x: String,
        /// Comma-separated columns for the vertical axis
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<String>,
        /// Column whose values split the rows into curves
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        log_x: bool,
        #[arg(long)]
        log_y: bool,
        #[arg(long, default_value = "")]
        title: String,
    },
    /// Preset: harmonic traps, L = 5T, gap sweep
    Fig1,
    /// Preset: box traps, L = 4.5T and 5T, gap sweep
    Fig2,
    /// Preset: mode purity at m l = 10 in one to three dimensions
    Fig4,
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::io(p, e))?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    RunConfig::from_json(&text)
}

fn default_plot(cfg: &RunConfig) -> PlotSpec {
    match &cfg.task {
        Task::Harvest(h) => {
            let spec = PlotSpec::lines("sweep_value", &["negativity"]);
            if h.separations.is_empty() {
                spec
            } else {
                spec.grouped("separation")
            }
        }
        Task::Purity(_) => PlotSpec::lines("sigma_over_ell", &["nu"]).grouped("dim").log_x(),
        Task::Oracle(_) => PlotSpec::lines("lambda", &["residual"]).grouped("kind").log_x().log_y(),
    }
}

fn from_config(name: &'static str, cli: &Cli, expected: fn(&Task) -> bool) -> Result<Preset> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("`{name}` needs --config <path>")))?;
    let config = load_config(path)?;
    if !expected(&config.task) {
        return Err(CliError::config("task.kind", format!("expected a {name} task")));
    }
    Ok(Preset {
        name,
        plot: default_plot(&config),
        config,
        notes: Vec::new(),
    })
}

fn preset_only(cli: &Cli, preset: Preset) -> Result<Preset> {
    if cli.config.is_some() {
        return Err(CliError::Usage(format!("preset `{}` does not take --config", preset.name)));
    }
    Ok(preset)
}

fn execute(cli: &Cli) -> Result<()> {
    let preset = match &cli.command {
        Command::Plot {
            csv,
            x,
            y,
            group,
            log_x,
            log_y,
            title,
        } => {
            let spec = PlotSpec {
                x: x.clone(),
                y: y.clone(),
                group: group.clone(),
                log_x: *log_x,
                log_y: *log_y,
                title: title.clone(),
                x_label: x.clone(),
                y_label: y.join(", "),
            };
            let svg = render(&Table::read(csv)?, &spec)?;
            return write_or_print(cli.out.as_deref(), &svg);
        }
        Command::Harvest => from_config("harvest", cli, |t| matches!(t, Task::Harvest(_)))?,
        Command::Purity => from_config("purity", cli, |t| matches!(t, Task::Purity(_)))?,
        Command::Oracle { chain } => {
            if cli.config.is_some() {
                from_config("oracle", cli, |t| matches!(t, Task::Oracle(_)))?
            } else if *chain {
                presets::oracle_chain()
            } else {
                presets::oracle_single()
            }
        }
        Command::Fig1 => preset_only(cli, presets::fig1())?,
        Command::Fig2 => preset_only(cli, presets::fig2())?,
        Command::Fig4 => preset_only(cli, presets::fig4())?,
    };

    let mut cfg = preset.config;
    if let Some(n) = cli.points {
        cfg = cfg.with_points(n);
    }
    cfg.validate()?;
    if cli.seedless && cfg.uses_rng() {
        return Err(CliError::RngRequested("task.quadrature.method is monte_carlo".into()));
    }

    let csv = provenance(preset.name, &cfg, &preset.notes) + &run(&cfg)?;
    let out = cli.out.clone().or_else(|| cfg.output.csv.clone());
    write_or_print(out.as_deref(), &csv)?;

    if cli.svg {
        let path = cfg
            .output
            .svg
            .clone()
            .or_else(|| out.as_ref().map(|p| p.with_extension("svg")))
            .ok_or_else(|| CliError::Usage("--svg needs --out or output.svg".into()))?;
        let svg = render(&Table::parse(&csv)?, &preset.plot)?;
        write_or_print(Some(&path), &svg)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
