mod commands;
mod config;
mod error;
mod experiment;
mod output;
mod verify;

use clap::{Parser, Subcommand};
use config::RawConfig;
use error::{CliError, Result};
use experiment::Experiment;
use output::{fmt_g, write_tables};
use std::path::PathBuf;
use std::time::Instant;

/// Lattice Casimir experiments driven by `key = value` config files.
#[derive(Parser, Debug)]
#[command(name = "casimir", version)]
struct Cli {
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Override a config entry, e.g. `--set lattice.a=1/200`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues (and optionally eigenvectors) of the lattice operator.
    Spectrum { config: Option<PathBuf> },
    /// Stress tensor profiles or boundary values.
    Stress { config: Option<PathBuf> },
    /// Renormalized vacuum energy of one interval.
    Energy { config: Option<PathBuf> },
    /// Global and local forces on the middle wall, with extrapolation.
    Force { config: Option<PathBuf> },
    /// Boundary artefact functions h, f and delta.
    Artefacts { config: Option<PathBuf> },
    /// Continuum series for energies, pressures and energy densities.
    Series { config: Option<PathBuf> },
    /// Print the renormalization constants.
    Constants {
        config: Option<PathBuf>,
        /// Recompute the constants from lattice fits.
        #[arg(long)]
        determine: bool,
    },
    /// Run the invariant suite.
    Verify { config: Option<PathBuf> },
}

fn load(path: Option<&PathBuf>, sets: &[String]) -> Result<RawConfig> {
    let mut raw = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?;
            RawConfig::parse(&text).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{}: {m}", p.display())),
                other => other,
            })?
        }
        None => RawConfig::default(),
    };
    for s in sets {
        raw.set(s)?;
    }
    Ok(raw)
}

fn emit(exp: &Experiment, header: Vec<String>, tables: Vec<output::Table>, out: &Option<PathBuf>) -> Result<()> {
    let dir = out.clone().unwrap_or_else(|| exp.out_dir.clone());
    for p in write_tables(&dir, &exp.name, &header, &tables)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn constants_report(c: &casimir_core::renorm::RenormConstants) -> String {
    format!(
        "constants {{\n  provenance: {}\n  c_inf: {}\n  ln_chi: {}\n  ln_tau: {}\n  ln_chi_tilde: {}\n  ln_tau_tilde: {}\n}}\n",
        c.provenance.as_str(),
        fmt_g(c.c_inf),
        fmt_g(c.ln_chi),
        fmt_g(c.ln_tau),
        fmt_g(c.ln_chi_tilde),
        fmt_g(c.ln_tau_tilde)
    )
}

fn run(cli: Cli) -> Result<()> {
    let (name, path, rows) = match &cli.command {
        Command::Spectrum { config } => ("spectrum", config, None),
        Command::Stress { config } => ("stress", config, None),
        Command::Energy { config } => ("energy", config, Some("x2")),
        Command::Force { config } => ("force", config, Some("a")),
        Command::Artefacts { config } => ("artefacts", config, None),
        Command::Series { config } => ("series", config, None),
        Command::Constants { config, .. } => ("constants", config, None),
        Command::Verify { config } => ("verify", config, None),
    };
    let mut raw = load(path.as_ref(), &cli.set)?;
    if let Command::Constants { determine: true, .. } = cli.command {
        raw.insert("scheme", "constants", "self")?;
    }
    let stress_boundary = name == "stress" && matches!(raw.get("stress", "sites"), Some("left" | "right"));
    let rows = if stress_boundary { Some("a") } else { rows };
    let exp = Experiment::resolve(raw, name, rows)?;
    match cli.command {
        Command::Spectrum { .. } => emit(&exp, exp.header(), commands::spectrum(&exp)?, &cli.out),
        Command::Stress { .. } => emit(&exp, exp.header(), commands::stress(&exp)?, &cli.out),
        Command::Energy { .. } => emit(&exp, exp.header(), commands::energy(&exp)?, &cli.out),
        Command::Force { .. } => emit(&exp, exp.header(), commands::force(&exp)?, &cli.out),
        Command::Artefacts { .. } => emit(&exp, exp.header(), commands::artefacts(&exp)?, &cli.out),
        Command::Series { .. } => emit(&exp, commands::series_header(&exp), commands::series(&exp)?, &cli.out),
        Command::Constants { .. } => {
            print!("{}", constants_report(&exp.constants));
            Ok(())
        }
        Command::Verify { .. } => {
            let offset = exp.raw.number("verify", "ln_chi_offset")?.unwrap_or(0.0);
            let constants = if offset != 0.0 {
                exp.constants.with_ln_chi_offset(offset)
            } else {
                exp.constants
            };
            let sections = verify::parse_sections(exp.raw.get("verify", "sections"))?;
            let t = Instant::now();
            let checks = verify::run(&constants, &sections);
            print!("{}", constants_report(&constants));
            print!("{}", verify::render(&checks, t.elapsed().as_secs_f64()));
            verify::outcome(&checks)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            std::process::exit(1);
        }
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    if let Err(e) = pool.install(|| run(cli)) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
