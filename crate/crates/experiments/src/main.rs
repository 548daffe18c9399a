use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cho_experiments::analysis;
use cho_experiments::config::{load_scenario, parse_surrogate, Scenario};
use cho_experiments::phase::{parse_grid, phase_diagram};
use cho_experiments::presets::run_preset;
use cho_experiments::sweep::{parse_sweep, run_sweep};
use cho_experiments::ExperimentError;

#[derive(Parser)]
#[command(
    name = "cho",
    version,
    about = "Coupled harmonic oscillators: purity dynamics of a bipartite Gaussian system"
)]
struct Cli {
    /// Print the run summary as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the exact evolution, plus any analyses listed in the config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form top-hat purity, optionally with one regime expansion.
    Isoso {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        expansion: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Second-order perturbative purity.
    Perturb {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adiabatic purity at leading (0) or next-to-leading (1) order.
    Adiabatic {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        order: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Noise eigenvalues, complete-positivity flags and Bures velocity.
    Markov {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "drop-negative")]
        surrogate: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parallel parameter sweep described by a TOML spec.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Regime classification over a (w, ψ) grid, each given as a:b:n[:log].
    PhaseDiagram {
        #[arg(long)]
        w: String,
        #[arg(long)]
        psi: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Reproduce one of the figure parameter sets.
    Preset {
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn scenario(config: &Path, out: Option<PathBuf>) -> Result<Scenario, ExperimentError> {
    let mut s = load_scenario(config)?;
    if let Some(o) = out {
        s.out_dir = o;
    }
    Ok(s)
}

fn simulate(s: &Scenario) -> Result<Value, ExperimentError> {
    let (p, cfg, dir) = (&s.params, &s.integrator, &s.out_dir);
    let mut v = analysis::simulate(p, cfg, dir)?;
    let a = &s.analysis;
    if a.isoso || a.expansion.is_some() {
        v["isoso"] = analysis::isoso(p, cfg, a.expansion.as_deref(), dir)?;
    }
    if a.perturbation {
        v["perturbation"] = analysis::perturb(p, cfg, dir)?;
    }
    if let Some(order) = a.adiabatic_order {
        v["adiabatic"] = analysis::adiabatic(p, cfg, order, dir)?;
    }
    if let Some(sur) = a.markov {
        v["markov"] = analysis::markov(p, cfg, sur, dir)?;
    }
    Ok(v)
}

fn run(cmd: Cmd) -> Result<Value, ExperimentError> {
    match cmd {
        Cmd::Simulate { config, out } => simulate(&scenario(&config, out)?),
        Cmd::Isoso { config, expansion, out } => {
            let s = scenario(&config, out)?;
            let expansion = expansion.or(s.analysis.expansion.clone());
            analysis::isoso(&s.params, &s.integrator, expansion.as_deref(), &s.out_dir)
        }
        Cmd::Perturb { config, out } => {
            let s = scenario(&config, out)?;
            analysis::perturb(&s.params, &s.integrator, &s.out_dir)
        }
        Cmd::Adiabatic { config, order, out } => {
            let s = scenario(&config, out)?;
            analysis::adiabatic(&s.params, &s.integrator, order, &s.out_dir)
        }
        Cmd::Markov { config, surrogate, out } => {
            let sur = parse_surrogate(&surrogate)?;
            let s = scenario(&config, out)?;
            analysis::markov(&s.params, &s.integrator, sur, &s.out_dir)
        }
        Cmd::Sweep { spec } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| ExperimentError::Config(format!("{}: {e}", spec.display())))?;
            run_sweep(&parse_sweep(&text)?)
        }
        Cmd::PhaseDiagram { w, psi, out } => phase_diagram(&parse_grid(&w)?, &parse_grid(&psi)?, &out),
        Cmd::Preset { name, out } => run_preset(&name, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(v) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&v).expect("JSON values serialise"));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string(), "exit_code": e.exit_code() }));
            }
            eprintln!("cho: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
