// SPDX-License-Identifier: Apache-2.0
//! `dgalab` command-line driver.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dgalab::experiment::{self, ExperimentConfig, ExperimentError, KEYS, SEED_ENV};
use dgalab::graph::write_edge_list;
use dgalab::metrics::write_csv;

/// Simulator for distributed-control and delta-stepping shortest paths.
#[derive(Debug, Parser)]
#[command(name = "dgalab", version, after_help = keys_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the configured graph as an edge list.
    Generate(Common),
    /// Run the configured algorithm and emit one CSV row per source and repetition.
    Run(Common),
    /// Run the Cartesian product of all sweep axes.
    Sweep(Common),
    /// Check every algorithm against the sequential oracle.
    Validate(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Configuration overrides: --key=value or --key value, e.g. --rt.ee=22
    /// or --sweep.rt.coalescing_size=100,101.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY=VALUE")]
    overrides: Vec<String>,
}

fn keys_help() -> String {
    let mut s = String::from("Configuration keys (also usable as --key=value flags):\n");
    for (k, d) in KEYS {
        s.push_str(&format!("  {k:<28} {d}\n"));
    }
    s.push_str("  sweep.<key>                  comma-separated values to sweep over\n");
    s.push_str(&format!("\n{SEED_ENV} overrides the seed from the config file; flags override both."));
    s
}

/// Splits trailing arguments into config overrides, pulling out `--config`
/// and `--out` if they appear after the first override.
fn parse_overrides(common: &mut Common) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut args = std::mem::take(&mut common.overrides).into_iter();
    while let Some(arg) = args.next() {
        let Some(flag) = arg.strip_prefix("--") else { bail!("unexpected argument {arg:?}") };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = args.next().with_context(|| format!("missing value for --{flag}"))?;
                (flag.to_string(), v)
            }
        };
        match key.as_str() {
            "config" => common.config = Some(value.into()),
            "out" => common.out = Some(value.into()),
            _ => out.push((key, value)),
        }
    }
    Ok(out)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(common: &mut Common) -> Result<ExperimentConfig> {
    let overrides = parse_overrides(common)?;
    let env_seed = std::env::var(SEED_ENV).ok();
    Ok(experiment::parse_config(common.config.as_deref(), env_seed.as_deref(), &overrides)?)
}

/// Returns whether every validation passed.
fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate(mut c) => {
            let cfg = load(&mut c)?;
            let g = experiment::build_graph(&cfg)?;
            let mut out = output(&c.out)?;
            write_edge_list(&g, &mut out)?;
            out.flush()?;
            Ok(true)
        }
        Command::Run(mut c) => emit(&mut c, experiment::run),
        Command::Sweep(mut c) => emit(&mut c, experiment::sweep),
        Command::Validate(mut c) => {
            let cfg = load(&mut c)?;
            let report = experiment::validate_cmd(&cfg)?;
            let mut out = output(&c.out)?;
            for e in &report.entries {
                let verdict = if e.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{verdict} {} source={}", e.algorithm, e.source)?;
            }
            let passed = report.entries.iter().filter(|e| e.passed).count();
            writeln!(out, "{passed}/{} passed", report.entries.len())?;
            out.flush()?;
            Ok(report.all_passed())
        }
    }
}

fn emit(
    c: &mut Common,
    f: fn(&ExperimentConfig) -> Result<Vec<dgalab::metrics::CsvRow>, ExperimentError>,
) -> Result<bool> {
    let cfg = load(c)?;
    match f(&cfg) {
        Ok(rows) => {
            let mut out = output(&c.out)?;
            write_csv(&mut out, &rows)?;
            out.flush()?;
            Ok(true)
        }
        Err(e @ ExperimentError::ValidationFailed { .. }) => {
            eprintln!("dgalab: {e}");
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dgalab: {e:#}");
            ExitCode::from(2)
        }
    }
}
