//! `tcost` command-line tool. See `tcost --help` and the README.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tcost::commands::{self, GaugeInput, Method, TimeSpec, Trace};
use tcost::config::{FamilySpec, Parameters, RunConfig, SpaceSource, Suite};
use tcost::emit::{emit_report, write_file};
use tcost::error::{exit, CliError, CliResult};
use tcost::formats::{load_density, load_potential, load_space, read_json, FunctionFile};
use tcost::suite::run_suite;
use tcost_core::orlicz::YoungFunction;
use tcost_core::transport::EntropicOptions;
use tcost_core::Density;

#[derive(Parser)]
#[command(name = "tcost", version, about = "Transport-cost, entropy and spectral checks on finite metric measure spaces")]
struct Cli {
    /// Seed for generated families (a family or config seed takes precedence).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; affects wall time only.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Entropic,
}

#[derive(Clone, Copy, ValueEnum)]
enum PsiArg {
    Tau,
    TauStar,
}

#[derive(Args)]
struct CheckParams {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "C")]
    c: Option<f64>,
    /// `C(α)` for bounded-density; estimated from the family when absent.
    #[arg(long = "C-alpha")]
    c_alpha: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// W_p between a density and μ (or a second density).
    Wasserstein {
        /// Space file: `{"dist", "mu", "x0"}` or `{"grid": {"lo", "hi", "n", "V"}}`.
        #[arg(long)]
        space: PathBuf,
        /// Density file `{"h": [..]}`.
        #[arg(long)]
        nu: PathBuf,
        /// Target density; μ itself when absent.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
        /// Entropic regularization, in units of d^p.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iter: usize,
    },
    /// Relative entropy H(ν, μ).
    Entropy {
        /// Space file: `{"dist", "mu", "x0"}` or `{"grid": {"lo", "hi", "n", "V"}}`.
        #[arg(long)]
        space: PathBuf,
        /// Density file `{"h": [..]}`.
        #[arg(long)]
        nu: PathBuf,
    },
    /// Gauge norm N_ψ(g).
    OrliczNorm {
        /// Space file: `{"dist", "mu", "x0"}` or `{"grid": {"lo", "hi", "n", "V"}}`.
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_enum)]
        psi: PsiArg,
        /// `dist`, `dist2`, or a function file `{"g": [..]}`.
        #[arg(long)]
        g: String,
        /// Take the norm on μ⊗μ.
        #[arg(long)]
        product: bool,
    },
    /// Poincaré constant from the eigensolve.
    Poincare {
        /// Space file: `{"dist", "mu", "x0"}` or `{"grid": {"lo", "hi", "n", "V"}}`.
        #[arg(long)]
        space: PathBuf,
        /// Potential file; switches to Metropolis rates.
        #[arg(long = "V")]
        potential: Option<PathBuf>,
    },
    /// Run inequality suites over a family or density files.
    Check {
        /// Space file: `{"dist", "mu", "x0"}` or `{"grid": {"lo", "hi", "n", "V"}}`.
        #[arg(long)]
        space: PathBuf,
        /// Family file `{"kind", "size", "seed"?, "scale_min"?, ..}`.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Density files (repeatable).
        #[arg(long)]
        nu: Vec<PathBuf>,
        /// Comma-separated suite names.
        #[arg(long, value_delimiter = ',', required = true)]
        suite: Vec<String>,
        #[command(flatten)]
        params: CheckParams,
    },
    /// Heat-flow traces as CSV.
    Flow {
        /// Space file: `{"dist", "mu", "x0"}` or `{"grid": {"lo", "hi", "n", "V"}}`.
        #[arg(long)]
        space: PathBuf,
        /// Potential file `{"V": [..]}`; switches to Metropolis rates.
        #[arg(long = "V")]
        potential: Option<PathBuf>,
        /// Initial density file `{"h": [..]}`.
        #[arg(long)]
        h0: PathBuf,
        /// Comma-separated subset of `entropy`, `pnorm`, `w2`.
        #[arg(long, value_delimiter = ',', default_value = "entropy,pnorm,w2")]
        trace: Vec<String>,
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        /// `geometric:N` (N times over [1e-3 C_P, 20 C_P]) or a comma list.
        #[arg(long, default_value = "geometric:40")]
        times: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run a configuration file.
    Report {
        /// Run config JSON; relative paths resolve against its directory.
        #[arg(long)]
        config: PathBuf,
    },
}

fn print_json(value: &impl Serialize, out: Option<&Path>, file: &str) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("record serializes") + "\n";
    print!("{text}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Write {
            path: dir.to_path_buf(),
            message: e.to_string(),
        })?;
        write_file(&dir.join(file), &text)?;
    }
    Ok(())
}

fn run_config(config: &RunConfig, origin: Option<&Path>, out: &Path) -> CliResult<()> {
    let run = run_suite(config, origin)?;
    let files = emit_report(out, config, &run)?;
    print!("{}", tcost::emit::summary_csv(&run.summary));
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    match run.summary.violations {
        0 => Ok(()),
        count => Err(CliError::Violations { count }),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::parameter("threads", e.to_string()))?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Wasserstein {
            space,
            nu,
            target,
            p,
            method,
            eps,
            tol,
            max_iter,
        } => {
            let s = load_space(&space)?;
            let source = load_density(&s, &nu)?;
            let target = match target {
                Some(t) => load_density(&s, &t)?,
                None => Density::uniform(s.n()),
            };
            let method = match method {
                MethodArg::Exact => Method::Exact,
                MethodArg::Entropic => Method::Entropic,
            };
            let opts = EntropicOptions {
                eps_reg: eps,
                tol,
                max_iter,
            };
            print_json(&commands::wasserstein(&s, &source, &target, p, method, opts)?, out, "wasserstein.json")
        }
        Command::Entropy { space, nu } => {
            let s = load_space(&space)?;
            let d = load_density(&s, &nu)?;
            print_json(&commands::entropy(&s, &d), out, "entropy.json")
        }
        Command::OrliczNorm { space, psi, g, product } => {
            let s = load_space(&space)?;
            let input = match g.as_str() {
                "dist" => GaugeInput::DistancePower(1.0),
                "dist2" => GaugeInput::DistancePower(2.0),
                path => GaugeInput::Values(read_json::<FunctionFile>(Path::new(path))?.g),
            };
            let psi = match psi {
                PsiArg::Tau => YoungFunction::Tau,
                PsiArg::TauStar => YoungFunction::TauStar,
            };
            print_json(&commands::orlicz_norm(&s, &input, psi, product)?, out, "orlicz-norm.json")
        }
        Command::Poincare { space, potential } => {
            let s = load_space(&space)?;
            let v = potential.as_deref().map(load_potential).transpose()?;
            print_json(&commands::poincare(&s, v.as_deref())?, out, "poincare.json")
        }
        Command::Check {
            space,
            family,
            nu,
            suite,
            params,
        } => {
            let mut p = Parameters::default();
            p.p = params.p.unwrap_or(p.p);
            p.a = params.a.unwrap_or(p.a);
            p.alpha = params.alpha.unwrap_or(p.alpha);
            p.q = params.q.unwrap_or(p.q);
            p.c = params.c.unwrap_or(p.c);
            p.c_alpha = params.c_alpha;
            let family: Option<FamilySpec> = family.as_deref().map(read_json).transpose()?;
            let config = RunConfig {
                name: None,
                version: None,
                space: SpaceSource::Path(space.display().to_string()),
                family,
                densities: nu.iter().map(|p| p.display().to_string()).collect(),
                suites: suite.iter().map(|s| s.parse()).collect::<CliResult<Vec<Suite>>>()?,
                params: p,
                seed: cli.seed.unwrap_or(0),
            };
            run_config(&config, None, out.unwrap_or(Path::new(".")))
        }
        Command::Flow {
            space,
            potential,
            h0,
            trace,
            p,
            times,
            tol,
        } => {
            let s = load_space(&space)?;
            let v = potential.as_deref().map(load_potential).transpose()?;
            let h = load_density(&s, &h0)?;
            let traces: Vec<Trace> = trace.iter().map(|t| t.parse()).collect::<CliResult<_>>()?;
            let times: TimeSpec = times.parse()?;
            let result = commands::flow(&s, v.as_deref(), &h, &traces, p, &times, tol)?;
            let text = result.csv();
            print!("{text}");
            if let Some(dir) = out {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Write {
                    path: dir.to_path_buf(),
                    message: e.to_string(),
                })?;
                write_file(&dir.join("flow.csv"), &text)?;
            }
            for v in &result.violations {
                eprintln!("violation: {v}");
            }
            match result.violations.len() {
                0 => Ok(()),
                count => Err(CliError::Violations { count }),
            }
        }
        Command::Report { config } => {
            let mut cfg: RunConfig = read_json(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            run_config(&cfg, Some(&config), out.unwrap_or(Path::new(".")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
