use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirac_darboux_cli::config::{parse_grid, JobConfig, KeyValues};
use dirac_darboux_cli::error::{exit, CliError, CliResult};
use dirac_darboux_cli::{commands, reproduce};

#[derive(Parser)]
#[command(name = "dirac-darboux", version, about = "Darboux transformations of the 1D Dirac equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the partner potential v₁ (and optionally a transformed spinor).
    Transform(JobArgs),
    /// Run the intertwining, factorization and superalgebra checks.
    Verify(JobArgs),
    /// Tabulate Coulomb energies on both branches.
    Spectrum(JobArgs),
    /// Write a model potential or seed without transforming.
    Sample(JobArgs),
    /// Compare the pipeline with pinned closed-form results.
    Reproduce {
        #[arg(value_enum)]
        which: reproduce::Item,
    },
}

#[derive(Args)]
struct JobArgs {
    /// Key-value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model kind: free, coulomb or custom-table.
    #[arg(long)]
    model: Option<String>,
    /// Grid as MIN:MAX:N.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// analytic, fd2 or fd4.
    #[arg(long)]
    mode: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Also write a JSON metadata sidecar next to CSV output.
    #[arg(long)]
    sidecar: bool,
    /// Override any config key, e.g. --set model.m=2.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl JobArgs {
    fn into_config(self) -> CliResult<JobConfig> {
        let mut kv = KeyValues::default();
        if let Some(path) = &self.config {
            kv.merge_file(path)?;
        }
        for s in &self.set {
            kv.assign(s)?;
        }
        if let Some(m) = &self.model {
            kv.set("model.kind", m)?;
        }
        if let Some(g) = &self.grid {
            let (min, max, n) = parse_grid(g)?;
            kv.set("grid.min", &min.to_string())?;
            kv.set("grid.max", &max.to_string())?;
            kv.set("grid.n", &n.to_string())?;
        }
        if let Some(m) = &self.mode {
            kv.set("run.mode", m)?;
        }
        if let Some(o) = &self.out {
            kv.set("output.path", &o.to_string_lossy())?;
        }
        if let Some(f) = &self.format {
            kv.set("output.format", f)?;
        }
        if self.sidecar {
            kv.set("output.sidecar", "true")?;
        }
        JobConfig::from_key_values(kv)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Transform(a) => commands::transform(&a.into_config()?),
        Command::Verify(a) => commands::verify(&a.into_config()?),
        Command::Spectrum(a) => commands::spectrum(&a.into_config()?),
        Command::Sample(a) => commands::sample(&a.into_config()?),
        Command::Reproduce { which } => {
            let (lines, ok) = reproduce::run(which)?;
            for l in &lines {
                println!("{l}");
            }
            if ok {
                Ok(())
            } else {
                Err(CliError::Threshold("golden comparison failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::SUCCESS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
