//! Command-line front end: scenario loading, batch runs, analysis reports,
//! trace and plot emission.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swarmlab::analysis::{analyze, product_diagnostics, DEFAULT_CONSENSUS_TOL};
use swarmlab::kernels::WeightMatrix;
use swarmlab::scenario::{parse_matrix, ScenarioFile};
use swarmlab::sim::{
    compare_controllers, expected_weight_matrix, median_steps, run, Controller, Scenario,
};
use swarmlab::sweep::emergent_targets;
use swarmlab::trace::{comparison_csv, diagnostics_csv, summary_json, trace_csv};
use swarmlab::{Error, Result};

const EXIT_OK: u8 = 0;
const EXIT_VERDICT_FALSE: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_SCENARIO: u8 = 3;
const EXIT_OUTPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "swarmlab", about = "Multi-robot consensus and sweep coverage toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario; writes trace.csv, summary.json and trajectory.svg.
    Simulate {
        scenario: PathBuf,
        /// Output directory (default: $SWARMLAB_OUT or the current directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Ergodicity report for a weight matrix (file) or a scenario's
    /// ensemble-average matrix. Exit 0 when the consensus verdict is
    /// positive, 1 when it is not.
    Analyze {
        /// Matrix file (JSON array or whitespace rows) or scenario JSON.
        input: PathBuf,
        /// Tolerance on the strict SLEM inequality.
        #[arg(long, default_value_t = DEFAULT_CONSENSUS_TOL)]
        tol: f64,
    },
    /// Run several controllers over a seed batch and tabulate consensus
    /// iterations.
    Compare {
        scenario: PathBuf,
        /// Controllers to compare (at least two).
        #[arg(long, value_delimiter = ',', required = true)]
        controllers: Vec<String>,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Schema-check a scenario file.
    Validate { scenario: PathBuf },
}

fn out_dir_or_default(out_dir: Option<PathBuf>) -> PathBuf {
    out_dir
        .or_else(|| std::env::var_os("SWARMLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario> {
    let file = ScenarioFile::load(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut scenario = file.into_scenario(base)?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn write_outputs(dir: &Path, files: &[(&str, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, content) in files {
        std::fs::write(dir.join(name), content)?;
    }
    Ok(())
}

fn cmd_simulate(path: &Path, out_dir: Option<PathBuf>, seed: Option<u64>) -> u8 {
    let scenario = match load_scenario(path, seed) {
        Ok(s) => s,
        Err(e @ (Error::Schema(_) | Error::Io(_))) => {
            eprintln!("scenario error: {e}");
            return EXIT_SCHEMA;
        }
        Err(e) => {
            eprintln!("scenario error: {e}");
            return EXIT_SCENARIO;
        }
    };
    let trace = match run(&scenario) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("simulation error: {e}");
            return EXIT_SCENARIO;
        }
    };

    let targets = scenario.sweep.as_ref().and_then(|setup| {
        let positions: Vec<_> = trace.final_states().iter().map(|r| r.position).collect();
        emergent_targets(&positions, &setup.boundary[0], scenario.params.spacing, setup.side).ok()
    });

    let mut files = vec![
        ("trace.csv", trace_csv(&trace)),
        ("summary.json", summary_json(&trace)),
        (
            "trajectory.svg",
            swarmlab::svg::render_trajectories(&trace, targets.as_ref()),
        ),
    ];
    if let Some(ws) = &trace.weight_matrices {
        match product_diagnostics(ws) {
            Ok(steps) => files.push(("diagnostics.csv", diagnostics_csv(&steps))),
            Err(e) => eprintln!("diagnostics skipped: {e}"),
        }
    }

    let dir = out_dir_or_default(out_dir);
    if let Err(e) = write_outputs(&dir, &files) {
        eprintln!("cannot write to {}: {e}", dir.display());
        return EXIT_OUTPUT;
    }
    match trace.consensus_step {
        Some(step) => println!("consensus after {step} iterations"),
        None => println!(
            "no consensus within {} steps (cycle detected: {})",
            scenario.max_steps, trace.cycle_detected
        ),
    }
    EXIT_OK
}

fn cmd_analyze(input: &Path, tol: f64) -> u8 {
    let text = match std::fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", input.display());
            return EXIT_SCHEMA;
        }
    };

    // A scenario document is a JSON object; anything else is a matrix.
    let (w, estimator) = if text.trim_start().starts_with('{') {
        let file = match ScenarioFile::from_json(&text) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("schema error: {e}");
                return EXIT_SCHEMA;
            }
        };
        let base = input.parent().unwrap_or_else(|| Path::new("."));
        let scenario = match file.into_scenario(base) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("schema error: {e}");
                return EXIT_SCHEMA;
            }
        };
        match expected_weight_matrix(&scenario) {
            Ok((w, label)) => (w, Some(label)),
            Err(e) => {
                eprintln!("scenario error: {e}");
                return EXIT_SCHEMA;
            }
        }
    } else {
        let rows = match parse_matrix(&text) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("matrix error: {e}");
                return EXIT_SCHEMA;
            }
        };
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            eprintln!("matrix error: not square");
            return EXIT_SCHEMA;
        }
        match WeightMatrix::from_rows(&rows) {
            Ok(w) => (w, None),
            Err(_) => {
                let deviation = rows
                    .iter()
                    .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
                    .fold(0.0, f64::max);
                eprintln!("matrix is not row-stochastic: max row-sum deviation {deviation:e}");
                return EXIT_SCHEMA;
            }
        }
    };

    let report = match analyze(&w, tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("analysis error: {e}");
            return EXIT_SCHEMA;
        }
    };
    let mut value = serde_json::to_value(&report).expect("report serializes");
    if let Some(estimator) = estimator {
        value["estimator"] = serde_json::to_value(estimator).expect("label serializes");
    }
    println!("{}", serde_json::to_string_pretty(&value).expect("report prints"));
    if report.consensus_verdict {
        EXIT_OK
    } else {
        EXIT_VERDICT_FALSE
    }
}

fn parse_controllers(names: &[String]) -> Result<Vec<Controller>> {
    names
        .iter()
        .map(|name| {
            serde_json::from_value(serde_json::Value::String(name.clone()))
                .map_err(|_| Error::Schema(format!("unknown controller {name:?}")))
        })
        .collect()
}

fn cmd_compare(
    path: &Path,
    controllers: &[String],
    seeds: u64,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
) -> u8 {
    let controllers = match parse_controllers(controllers) {
        Ok(c) if c.len() >= 2 => c,
        Ok(_) => {
            eprintln!("compare needs at least two controllers");
            return EXIT_SCHEMA;
        }
        Err(e) => {
            eprintln!("{e}");
            return EXIT_SCHEMA;
        }
    };
    let scenario = match load_scenario(path, seed) {
        Ok(s) => s,
        Err(e @ (Error::Schema(_) | Error::Io(_))) => {
            eprintln!("scenario error: {e}");
            return EXIT_SCHEMA;
        }
        Err(e) => {
            eprintln!("scenario error: {e}");
            return EXIT_SCENARIO;
        }
    };
    let rows = match compare_controllers(&scenario, &controllers, seeds) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("simulation error: {e}");
            return EXIT_SCENARIO;
        }
    };

    let medians: Vec<(String, f64)> = controllers
        .iter()
        .map(|c| {
            (
                c.name().to_string(),
                median_steps(&rows, c.name(), scenario.max_steps),
            )
        })
        .collect();
    let summary = serde_json::json!({
        "seeds": seeds,
        "medians": medians.iter().cloned().collect::<std::collections::BTreeMap<_, _>>(),
    });

    let dir = out_dir_or_default(out_dir);
    let files = [
        ("comparison.csv", comparison_csv(&rows)),
        (
            "medians.json",
            serde_json::to_string_pretty(&summary).expect("summary serializes"),
        ),
    ];
    if let Err(e) = write_outputs(&dir, &files) {
        eprintln!("cannot write to {}: {e}", dir.display());
        return EXIT_OUTPUT;
    }
    for (name, median) in &medians {
        println!("{name}: median {median} iterations over {seeds} seeds");
    }
    EXIT_OK
}

fn cmd_validate(path: &Path) -> u8 {
    match load_scenario(path, None) {
        Ok(_) => {
            println!("ok");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("invalid scenario: {e}");
            EXIT_SCHEMA
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Simulate { scenario, out_dir, seed } => cmd_simulate(&scenario, out_dir, seed),
        Command::Analyze { input, tol } => cmd_analyze(&input, tol),
        Command::Compare { scenario, controllers, seeds, out_dir, seed } => {
            cmd_compare(&scenario, &controllers, seeds, out_dir, seed)
        }
        Command::Validate { scenario } => cmd_validate(&scenario),
    };
    ExitCode::from(code)
}
