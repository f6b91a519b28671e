//! `curveflow`: run, inspect and sweep curve-flow scenarios.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use clap::{Parser, Subcommand};

use curveflow::scenario::{
    builtin_text, diag_report, parse_config_with_overrides, run_scenario, RunArtifacts, ScenarioConfig,
    ScenarioError, BUILTIN,
};

/// Environment variable that, when set, redirects every run to
/// `$CURVEFLOW_OUTPUT_DIR/<scenario name>`.
const OUTPUT_ENV: &str = "CURVEFLOW_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "curveflow", version, about = "Curvature-driven flow of closed curves on surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML config file.
    Run {
        config: PathBuf,
        /// Override a config value, e.g. `--set solver.t_end=2.0`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run a builtin scenario.
    Scenario {
        name: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Analyze a finished run directory and write plot data.
    Diag { run_dir: PathBuf },
    /// List the builtin scenarios.
    ListScenarios,
    /// Print the TOML config of a builtin scenario.
    ShowScenario { name: String },
    /// Run several scenarios (builtin names or config files) concurrently.
    Sweep {
        #[arg(required = true)]
        scenarios: Vec<String>,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn redirect(mut cfg: ScenarioConfig) -> ScenarioConfig {
    if let Some(root) = std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()) {
        cfg.output.directory = Some(PathBuf::from(root).join(&cfg.name));
    }
    cfg
}

fn from_file(path: &Path, overrides: &[String]) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(redirect(parse_config_with_overrides(&text, overrides)?))
}

fn from_builtin(name: &str, overrides: &[String]) -> Result<ScenarioConfig, ScenarioError> {
    let text = builtin_text(name).ok_or_else(|| ScenarioError::UnknownScenario(name.to_string()))?;
    Ok(redirect(parse_config_with_overrides(text, overrides)?))
}

/// A builtin name, or else a config file path.
fn load(source: &str, overrides: &[String]) -> Result<ScenarioConfig, ScenarioError> {
    if builtin_text(source).is_some() || !Path::new(source).exists() {
        from_builtin(source, overrides)
    } else {
        from_file(Path::new(source), overrides)
    }
}

fn report(art: &RunArtifacts) -> String {
    let stats = art.trajectory.state.stats;
    format!(
        "{}: {} at t = {} after {} accepted / {} rejected steps, {} snapshots",
        art.directory.display(),
        art.stop_reason.as_str(),
        art.trajectory.state.t,
        stats.accepted,
        stats.rejected,
        art.snapshots.len()
    )
}

fn run_one(cfg: &ScenarioConfig) -> Result<(), ScenarioError> {
    let art = run_scenario(cfg)?;
    println!("{}", report(&art));
    Ok(())
}

fn sweep(sources: &[String], threads: Option<usize>, overrides: &[String]) -> Result<(), ScenarioError> {
    let configs = sources
        .iter()
        .map(|s| load(s, overrides))
        .collect::<Result<Vec<_>, _>>()?;
    let workers = threads
        .or_else(|| thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .clamp(1, configs.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<String, ScenarioError>>>> =
        Mutex::new((0..configs.len()).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = configs.get(i) else { break };
                let out = run_scenario(cfg).map(|a| report(&a));
                results.lock().expect("results lock")[i] = Some(out);
            });
        }
    });
    let mut worst: Option<ScenarioError> = None;
    for (cfg, res) in configs.iter().zip(results.into_inner().expect("results lock")) {
        match res.expect("every scenario ran") {
            Ok(line) => println!("{line}"),
            Err(e) => {
                eprintln!("{}: error: {e}", cfg.name);
                if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                    worst = Some(e);
                }
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn execute(cli: Cli) -> Result<(), ScenarioError> {
    match cli.command {
        Command::Run { config, overrides } => run_one(&from_file(&config, &overrides)?),
        Command::Scenario { name, overrides } => run_one(&from_builtin(&name, &overrides)?),
        Command::Diag { run_dir } => {
            let summary = diag_report(&run_dir)?;
            let name = run_dir.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            print!("{}", summary.to_text(&name));
            Ok(())
        }
        Command::ListScenarios => {
            for (name, about) in BUILTIN {
                println!("{name:<26}{about}");
            }
            Ok(())
        }
        Command::ShowScenario { name } => {
            let text = builtin_text(&name).ok_or(ScenarioError::UnknownScenario(name))?;
            print!("{}", text.trim_start());
            Ok(())
        }
        Command::Sweep {
            scenarios,
            threads,
            overrides,
        } => sweep(&scenarios, threads, &overrides),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
