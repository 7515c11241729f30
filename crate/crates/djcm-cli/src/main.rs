//! `djcm`: driven Jaynes-Cummings simulation runs, validation, and sweeps.

mod config;
mod runner;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Engine, Mode, Observable, RunConfig};
use djcm::validate::{run_acceptance, ValidationOptions};
use sweep::{classify, run_sweep, SweepParameter};

#[derive(Parser)]
#[command(name = "djcm", version, about = "Driven Jaynes-Cummings model simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one configuration and write CSV series plus a manifest.
    Run(RunArgs),
    /// Run the acceptance criteria and print one PASS/FAIL line each.
    Validate(ValidateArgs),
    /// Repeat a run over a list of values of one parameter.
    Sweep(SweepArgs),
}

/// Field-level overrides; any flag set here wins over the config file.
#[derive(Args, Clone)]
struct Overrides {
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    omega_c: Option<f64>,
    #[arg(long)]
    omega_eg: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    beta_re: Option<f64>,
    #[arg(long)]
    beta_im: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Fock truncation override (auto rule when absent).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    /// Comma-separated subset of inversion,nphoton,mandelq,entropy,invariant.
    #[arg(long, value_delimiter = ',')]
    observables: Option<Vec<Observable>>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            };
        }
        set!(mode);
        set!(omega_c);
        set!(omega_eg);
        set!(g);
        set!(zeta);
        set!(xi);
        set!(beta_re);
        set!(beta_im);
        set!(phi);
        set!(t_max);
        set!(steps);
        set!(engine);
        if self.dim.is_some() {
            cfg.dim = self.dim;
        }
        if let Some(obs) = &self.observables {
            cfg.observables = obs.clone();
        }
    }

    /// Build a config purely from flags (no file).
    fn to_config(&self) -> Result<RunConfig, ConfigError> {
        let mode = self.mode.ok_or(ConfigError("mode is required".into()))?;
        let omega_c = self
            .omega_c
            .ok_or(ConfigError("omega_c is required".into()))?;
        let omega_eg = self
            .omega_eg
            .ok_or(ConfigError("omega_eg is required".into()))?;
        let g = self.g.ok_or(ConfigError("g is required".into()))?;
        let t_max = self.t_max.ok_or(ConfigError("t_max is required".into()))?;
        let steps = self.steps.ok_or(ConfigError("steps is required".into()))?;
        Ok(RunConfig {
            mode,
            omega_c,
            omega_eg,
            g,
            zeta: self.zeta.unwrap_or(0.0),
            xi: self.xi.unwrap_or(0.0),
            beta_re: self.beta_re.unwrap_or(0.0),
            beta_im: self.beta_im.unwrap_or(0.0),
            phi: self.phi.unwrap_or(0.0),
            t_max,
            steps,
            dim: self.dim,
            engine: self.engine.unwrap_or(Engine::Analytic),
            observables: self
                .observables
                .clone()
                .unwrap_or_else(|| vec![Observable::Inversion]),
        })
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file with the RunConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV files and manifest.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct ValidateArgs {
    /// Run only the sub-minute subset of the criteria.
    #[arg(long)]
    quick: bool,
    /// Override the automatic Fock truncation (negative control).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "sweep")]
    out: PathBuf,
    /// Parameter to sweep.
    #[arg(long, value_enum)]
    param: SweepParameter,
    /// Comma-separated values the parameter takes.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// Worker-pool width (default: DJCM_JOBS or the available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
}

fn resolve_config(path: &Option<PathBuf>, overrides: &Overrides) -> anyhow::Result<RunConfig> {
    let cfg = match path {
        Some(p) => {
            let mut cfg = RunConfig::from_file(p)?;
            overrides.apply(&mut cfg);
            cfg
        }
        None => overrides.to_config()?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn default_jobs(requested: Option<usize>, n_values: usize) -> usize {
    requested
        .or_else(|| {
            std::env::var("DJCM_JOBS")
                .ok()
                .and_then(|s| s.parse::<usize>().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .clamp(1, n_values.max(1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: anyhow::Result<ExitCode> = match cli.command {
        Command::Run(args) => resolve_config(&args.config, &args.overrides)
            .and_then(|cfg| runner::execute(&cfg, &args.out))
            .map(|()| ExitCode::SUCCESS),
        Command::Validate(args) => {
            let opts = ValidationOptions {
                quick: args.quick,
                dim_override: args.dim,
            };
            let reports = run_acceptance(&opts);
            for r in &reports {
                println!("{}", r.line());
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed == 0 {
                println!("all {} criteria passed", reports.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("{failed} of {} criteria failed", reports.len());
                Ok(ExitCode::from(1))
            }
        }
        Command::Sweep(args) => resolve_config(&args.config, &args.overrides).and_then(|cfg| {
            let jobs = default_jobs(args.jobs, args.values.len());
            let failed = run_sweep(&cfg, args.param, &args.values, &args.out, jobs)?;
            if failed > 0 {
                eprintln!("{failed} sweep value(s) failed; see index.json");
            }
            Ok(ExitCode::SUCCESS)
        }),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(classify(&err) as u8)
        }
    }
}
