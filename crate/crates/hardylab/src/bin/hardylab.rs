//! Command-line front end: parse arguments into a RunConfig and hand off
//! to the library runner. All behavior lives in hardylab::runner so that
//! configs driven from JSON and from flags take the same path.

use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use hardylab::runner::{self, Command as RunCommand, RunConfig};

#[derive(Parser)]
#[command(name = "hardylab", version, about = "Numerical probes for shift-invariant operator models")]
struct Cli {
    /// Write report.json / report.csv / report.meta.json under this path
    /// instead of printing the report to stdout.
    #[arg(long, global = true)]
    output: Option<String>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Split a polynomial into its inner (Blaschke) and outer factors.
    Factor {
        /// Coefficients, constant term first, e.g. "1,-2.5,1".
        #[arg(long)]
        poly: String,
    },
    /// Witness and pairing checks for the shift or a Blaschke model space.
    Model {
        #[arg(long, default_value = "shift")]
        preset: String,
        /// Truncation size.
        #[arg(long = "N")]
        n: Option<usize>,
        /// Blaschke zeros as "re,im;re,im". Selects the model-space path.
        #[arg(long)]
        zeros: Option<String>,
        /// Biorthogonality depth (shift preset only).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Check tables for a two-component inner column.
    Theta {
        /// paper-example or common-factor-z.
        #[arg(long)]
        preset: String,
        #[arg(long = "N")]
        n: Option<usize>,
        /// Boundary grid size for unimodularity checks.
        #[arg(long = "M")]
        m: Option<usize>,
        /// "all" or a comma-separated list of check names.
        #[arg(long)]
        checks: Option<String>,
    },
    /// Focused experiments: closability, witness, biorthogonality, spectral.
    Probe {
        /// One of: closability, witness, biorthogonality, spectral.
        kind: String,
        #[arg(long)]
        preset: Option<String>,
        /// Closability scenario name (poly-vs-outer, poly-vs-kernels,
        /// bilateral-arcs).
        #[arg(long)]
        scenario: Option<String>,
        /// Target epsilon for the closability ladder.
        #[arg(long)]
        eps: Option<f64>,
        /// Iteration cap for the closability ladder.
        #[arg(long)]
        cap: Option<usize>,
        /// Target vector for the closability graph limit (only "one").
        #[arg(long)]
        g: Option<String>,
        /// shift, model, or column (witness / biorthogonality / spectral).
        #[arg(long)]
        operator: Option<String>,
        #[arg(long = "N")]
        n: Option<usize>,
        /// Biorthogonality depth.
        #[arg(long)]
        k: Option<usize>,
        /// Kernel-gap tolerance for the spectral probe.
        #[arg(long)]
        tol: Option<f64>,
        /// Sample points per circle for the spectral probe.
        #[arg(long = "per-circle")]
        per_circle: Option<usize>,
    },
    /// The full check battery at one truncation size.
    Suite {
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long)]
        checks: Option<String>,
    },
    /// List every preset name accepted elsewhere.
    Presets,
}

fn insert_usize(map: &mut Map<String, Value>, key: &str, v: Option<usize>) {
    if let Some(v) = v {
        map.insert(key.into(), Value::from(v as u64));
    }
}

fn insert_f64(map: &mut Map<String, Value>, key: &str, v: Option<f64>) {
    if let Some(v) = v {
        map.insert(key.into(), Value::from(v));
    }
}

fn insert_str(map: &mut Map<String, Value>, key: &str, v: Option<String>) {
    if let Some(v) = v {
        map.insert(key.into(), Value::String(v));
    }
}

fn main() {
    let cli = Cli::parse();
    let mut parameters = Map::new();
    let (command, preset) = match cli.command {
        Cmd::Presets => {
            for p in runner::list_presets() {
                println!("{}", p);
            }
            std::process::exit(0);
        }
        Cmd::Factor { poly } => {
            parameters.insert("poly".into(), Value::String(poly));
            (RunCommand::Factor, None)
        }
        Cmd::Model { preset, n, zeros, k } => {
            insert_usize(&mut parameters, "n", n);
            insert_usize(&mut parameters, "k", k);
            insert_str(&mut parameters, "zeros", zeros);
            (RunCommand::Model, Some(preset))
        }
        Cmd::Theta { preset, n, m, checks } => {
            insert_usize(&mut parameters, "n", n);
            insert_usize(&mut parameters, "m", m);
            insert_str(&mut parameters, "checks", checks);
            (RunCommand::Theta, Some(preset))
        }
        Cmd::Probe {
            kind,
            preset,
            scenario,
            eps,
            cap,
            g,
            operator,
            n,
            k,
            tol,
            per_circle,
        } => {
            parameters.insert("kind".into(), Value::String(kind));
            insert_str(&mut parameters, "scenario", scenario);
            insert_f64(&mut parameters, "eps", eps);
            insert_usize(&mut parameters, "cap", cap);
            insert_str(&mut parameters, "g", g);
            insert_str(&mut parameters, "operator", operator);
            insert_usize(&mut parameters, "n", n);
            insert_usize(&mut parameters, "k", k);
            insert_f64(&mut parameters, "tol", tol);
            insert_usize(&mut parameters, "per-circle", per_circle);
            (RunCommand::Probe, preset)
        }
        Cmd::Suite { n, m, checks } => {
            insert_usize(&mut parameters, "n", n);
            insert_usize(&mut parameters, "m", m);
            insert_str(&mut parameters, "checks", checks);
            (RunCommand::Suite, None)
        }
    };
    let config = RunConfig {
        schema: 1,
        command,
        preset,
        parameters,
        output: cli.output,
    };
    std::process::exit(runner::run(&config));
}
