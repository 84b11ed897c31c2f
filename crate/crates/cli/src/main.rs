use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spin2gs_cli::{landscape_table, run_gs, run_sweep, uniform_report, CliError, FamilySpec, RunConfig, SweepConfig};

#[derive(Parser)]
#[command(name = "spin2gs", version, about = "Ground states of spin-2 condensates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one ground state from a config file.
    Gs {
        #[arg(short, long)]
        config: PathBuf,
        /// Output directory; overrides output.dir.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Build and report the initial data without stepping.
        #[arg(long)]
        dry_run: bool,
    },
    /// Uniform-system ground state and phase.
    Uniform {
        #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
        beta0: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta1: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta2: f64,
        #[arg(short, long, allow_negative_numbers = true)]
        m: f64,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Reduced uniform energy sampled over the feasible ellipse.
    Landscape {
        /// Take the interactions from a run config.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        beta0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta2: Option<f64>,
        #[arg(short, long, allow_negative_numbers = true)]
        m: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        /// Write landscape.tsv into this directory instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a config once per value of its [sweep] section.
    Sweep {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Concurrent runs; defaults to the number of CPUs.
        #[arg(short, long, env = "SPIN2GS_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        dry_run: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Ferromagnetic,
    Nematic,
    NematicMixed,
    NematicMixedOuter,
    NematicTilted,
    CyclicSplit,
    CyclicSymmetric,
    CyclicTheta,
    CyclicDefault,
}

#[derive(clap::Args)]
struct FamilyArgs {
    /// Closed-form family; all admissible defaults are listed when omitted.
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Outer amplitude for nematic-mixed-outer.
    #[arg(long)]
    outer: Option<f64>,
    /// Upper root branch of the cyclic theta family.
    #[arg(long)]
    upper: bool,
}

impl FamilyArgs {
    fn spec(&self) -> Result<Option<FamilySpec>, CliError> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Config(format!("--{name} is required for this family")));
        let Some(f) = self.family else {
            return Ok(None);
        };
        Ok(Some(match f {
            FamilyName::Ferromagnetic => FamilySpec::Ferromagnetic,
            FamilyName::Nematic => FamilySpec::Nematic,
            FamilyName::NematicMixed => FamilySpec::NematicMixed {
                gamma: need(self.gamma, "gamma")?,
                theta: need(self.theta, "theta")?,
            },
            FamilyName::NematicMixedOuter => FamilySpec::NematicMixedOuter {
                outer: need(self.outer, "outer")?,
                theta: need(self.theta, "theta")?,
            },
            FamilyName::NematicTilted => FamilySpec::NematicTilted {
                theta: need(self.theta, "theta")?,
            },
            FamilyName::CyclicSplit => FamilySpec::CyclicSplit,
            FamilyName::CyclicSymmetric => FamilySpec::CyclicSymmetric,
            FamilyName::CyclicTheta => FamilySpec::CyclicTheta {
                theta: need(self.theta, "theta")?,
                upper: self.upper,
            },
            FamilyName::CyclicDefault => FamilySpec::CyclicDefault,
        }))
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Gs { config, out, dry_run } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            let o = run_gs(&cfg, &dir, dry_run)?;
            let s = &o.summary;
            println!("energy\t{:.17e}", s.energy);
            println!("masses\t{}", s.masses.components.map(|c| format!("{c:.17e}")).join("\t"));
            println!("total\t{:.17e}\tmagnetization\t{:.17e}", s.masses.total, s.masses.magnetization);
            println!("iterations\t{}\tconverged\t{}", s.iterations, s.converged);
            println!("outputs\t{}", o.dir.display());
            if o.exit_code() != 0 {
                eprintln!("spin2gs: iteration limit reached before the stopping criterion; outputs are partial");
            }
            Ok(o.exit_code())
        }
        Command::Uniform {
            beta0,
            beta1,
            beta2,
            m,
            family,
        } => {
            print!("{}", uniform_report(beta0, beta1, beta2, m, family.spec()?)?);
            Ok(0)
        }
        Command::Landscape {
            config,
            beta0,
            beta1,
            beta2,
            m,
            resolution,
            out,
        } => {
            let base = config.as_deref().map(RunConfig::load).transpose()?;
            let pick = |flag: Option<f64>, from: Option<f64>, name: &str| {
                flag.or(from).ok_or_else(|| CliError::Config(format!("--{name} or --config is required")))
            };
            let model = base.as_ref().map(|c| &c.model);
            let b0 = beta0.or(model.map(|m| m.beta0)).unwrap_or(100.0);
            let b1 = pick(beta1, model.map(|m| m.beta1), "beta1")?;
            let b2 = pick(beta2, model.map(|m| m.beta2), "beta2")?;
            let mm = pick(m, model.map(|m| m.m), "m")?;
            let res = resolution.or(base.as_ref().map(|c| c.output.landscape_resolution)).unwrap_or(101);
            let table = landscape_table(b0, b1, b2, mm, res)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join(spin2gs_cli::commands::LANDSCAPE_FILE), table)?;
                }
                None => print!("{table}"),
            }
            Ok(0)
        }
        Command::Sweep {
            config,
            out,
            workers,
            dry_run,
        } => {
            let cfg = SweepConfig::from_run(RunConfig::load(&config)?)?;
            let dir = out.unwrap_or_else(|| cfg.base.output.dir.clone());
            let workers = workers.unwrap_or_else(spin2gs_cli::default_workers);
            let results = run_sweep(&cfg, &dir, workers, dry_run)?;
            let mut code = 0;
            for (v, r) in cfg.values.iter().zip(&results) {
                match r {
                    Ok(o) => {
                        println!("{v}\t{:.17e}\t{}", o.summary.energy, o.summary.converged);
                        code = code.max(o.exit_code());
                    }
                    Err(e) => {
                        eprintln!("spin2gs: {} = {v}: {e}", cfg.parameter.name());
                        code = code.max(e.exit_code());
                    }
                }
            }
            println!("table\t{}", dir.join(spin2gs_cli::commands::SWEEP_FILE).display());
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("spin2gs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
