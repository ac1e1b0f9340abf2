use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use imcmc::samplers::SamplerKind;
use imcmc_cli::bench::{bench, to_csv, DEFAULT_KINDS};
use imcmc_cli::config::Settings;
use imcmc_cli::output::write_atomic;
use imcmc_cli::run::{run, write_outputs};
use imcmc_cli::verify::{run_suite, Suite};
use imcmc_cli::{ess_of_trace, CliError};

#[derive(Parser)]
#[command(name = "imcmc", version, about = "Involutive MCMC samplers and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run chains and write traces plus summary.json.
    Sample(RunArgs),
    /// Exact checks on finite analogs and involutions.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Also check a kernel with a missing Hastings term (should fail).
        #[arg(long)]
        mutant: bool,
        /// Seed for the random test points of the involution checks.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Print results as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Batch-means ESS of a trace file, or of a fresh run from a config.
    Ess {
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        #[arg(long, conflicts_with = "trace")]
        config: Option<PathBuf>,
    },
    /// Compare ESS and ESS/sec across samplers.
    Bench {
        /// Comma-separated sampler kinds.
        #[arg(long, value_delimiter = ',')]
        samplers: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML file of settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    target: Option<String>,
    /// CSV dataset for the logistic target.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    chains: Option<u64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    burn_in: Option<u64>,
    /// Overrides the config file, which overrides $IMCMC_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<u64>,
    /// sample: `csv` (traces and summary) or `summary`; bench: `csv` or `json`.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    jump: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    tries: Option<f64>,
    #[arg(long)]
    lookahead: Option<f64>,
    #[arg(long)]
    scan: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    metric_scale: Option<f64>,
    #[arg(long)]
    shift: Option<f64>,
    #[arg(long)]
    dim: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    /// Any other numeric setting, as key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let mut f = Settings::default();
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Config(format!("--set `{kv}`: expected key=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Config(format!("--set `{kv}`: not a number")))?;
            f.set_num(&k.trim().replace('-', "_"), v);
        }
        let strings = [
            ("kind", self.kind.clone()),
            ("target", self.target.clone()),
            ("dataset", self.dataset.as_ref().map(|p| p.display().to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", self.format.clone()),
        ];
        for (k, v) in strings {
            if let Some(v) = v {
                f.set_str(k, v);
            }
        }
        let counts = [
            ("seed", self.seed),
            ("chains", self.chains),
            ("steps", self.steps),
            ("burn_in", self.burn_in),
            ("jobs", self.jobs),
        ];
        for (k, v) in counts {
            if let Some(v) = v {
                f.set_num(k, v as f64);
            }
        }
        let numbers = [
            ("eps", self.eps),
            ("k", self.k),
            ("jump", self.jump),
            ("beta", self.beta),
            ("c", self.c),
            ("alpha", self.alpha),
            ("scale", self.scale),
            ("tries", self.tries),
            ("lookahead", self.lookahead),
            ("scan", self.scan),
            ("tau", self.tau),
            ("metric_scale", self.metric_scale),
            ("shift", self.shift),
            ("dim", self.dim),
            ("rho", self.rho),
            ("rate", self.rate),
        ];
        for (k, v) in numbers {
            if let Some(v) = v {
                f.set_num(k, v);
            }
        }
        s.merge(f);
        Ok(s)
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(args) => {
            let cfg = args.settings()?.run_config()?;
            let res = run(&cfg)?;
            let written = write_outputs(&cfg, &res)?;
            let s = &res.summary;
            eprintln!(
                "{} on {}: {} chains x {} draws, ess {:.1} ± {:.1}, accept {:.3}, wrote {} files to {}",
                s.kind,
                s.target,
                s.chains,
                s.n,
                s.ess.mean,
                s.ess.std,
                s.accept_rate.mean,
                written.len(),
                cfg.out.display()
            );
            Ok(())
        }
        Command::Verify { suite, mutant, seed, json } => {
            let lines = run_suite(suite, mutant, seed)?;
            if json {
                print_json(&lines)?;
            } else {
                for l in &lines {
                    println!("{l}");
                }
            }
            let failed = lines.iter().filter(|l| !l.pass).count();
            if failed > 0 {
                return Err(CliError::Verification(format!("{failed} of {} checks", lines.len())));
            }
            eprintln!("{} checks passed", lines.len());
            Ok(())
        }
        Command::Ess { trace, burn_in, config } => match (trace, config) {
            (Some(t), None) => print_json(&ess_of_trace(&t, burn_in)?),
            (None, Some(c)) => {
                let mut s = Settings::from_file(&c)?;
                if burn_in > 0 {
                    s.set_num("burn_in", burn_in as f64);
                }
                print_json(&run(&s.run_config()?)?.summary)
            }
            _ => Err(CliError::Config("give a trace file or --config".into())),
        },
        Command::Bench { samplers, run } => {
            let kinds: Vec<SamplerKind> = if samplers.is_empty() {
                DEFAULT_KINDS.to_vec()
            } else {
                samplers
                    .iter()
                    .map(|s| s.parse().map_err(|e: imcmc::Error| CliError::Config(e.to_string())))
                    .collect::<Result<_, _>>()?
            };
            let mut settings = run.settings()?;
            let format = settings.strings.remove("format").unwrap_or_else(|| "csv".into());
            if format != "csv" && format != "json" {
                return Err(CliError::Config(format!("bench format `{format}` (csv or json)")));
            }
            let out = settings.strings.remove("out");
            let configs = settings.bench_configs(&kinds)?;
            let rows = bench(&configs)?;
            let text = if format == "json" {
                serde_json::to_string_pretty(&rows).map_err(|e| CliError::Runtime(e.to_string()))? + "\n"
            } else {
                to_csv(&rows)
            };
            print!("{text}");
            if let Some(out) = out {
                let path = PathBuf::from(out);
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
                }
                write_atomic(&path, |w| w.write_all(text.as_bytes()))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("imcmc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
