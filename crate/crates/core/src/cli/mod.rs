//! Command-line front end. Every solving command prints one JSON
//! [`RunReport`]; `marco` first streams one JSON line per MUS.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 instance satisfiable,
//! 3 budget exhausted (the partial report is still printed).

pub mod bench_run;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::formula::{parse_spec, write_spec, Spec};
use crate::marco::{ShrinkBackend, DEFAULT_UNROLL_CAP};
use crate::ocus::{OcusConfig, DEFAULT_ENUM_CAP, DEFAULT_LEX_ENUM_CAP};
use crate::shrink::Order;
use crate::symmetry::{write_symmetries, DEFAULT_NODE_BUDGET};
pub use report::{run, Algorithm, Common, GroupSource, MarcoOptions, MusAlgo, RunReport, Status};

#[derive(Debug, Parser)]
#[command(name = "symmus", version, about = "Symmetry-aware MUS extraction, optimization and enumeration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Solver and generator seed.
    #[arg(long, env = "SYMMUS_SEED", default_value_t = 0, global = true)]
    seed: u64,
    /// Conflicts allowed per oracle call.
    #[arg(long, global = true)]
    conflict_budget: Option<u64>,
    /// Wall-clock limit for the whole run.
    #[arg(long, value_name = "SECONDS", global = true)]
    time_limit: Option<f64>,
    /// Search-node limit for symmetry detection.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET, global = true)]
    node_budget: u64,
    /// Leave excluded constraints unassumed instead of assuming their
    /// indicators false.
    #[arg(long, global = true)]
    no_negative_assumptions: bool,
    /// Read symmetries from FILE instead of detecting them.
    #[arg(long, value_name = "FILE", global = true)]
    symmetries: Option<PathBuf>,
    /// Comma-separated constraint labels, most significant first, for
    /// lex-leader breaking.
    #[arg(long, value_name = "LABELS", value_delimiter = ',', global = true)]
    lex_order: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Descending,
    Ascending,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Shrink,
    Symm,
    SymmRecompute,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShrinkArg {
    Plain,
    Symm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Php,
    Queens,
    Binpack,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract one MUS by deletion.
    Mus {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "shrink")]
        algo: AlgoArg,
        /// Order in which unmarked constraints are tested.
        #[arg(long, value_enum, default_value = "descending")]
        order: OrderArg,
    },
    /// Find a minimum-cost unsatisfiable subset.
    Ocus {
        input: PathBuf,
        #[arg(long)]
        lex: bool,
        /// Add symmetric images of correction subsets.
        #[arg(long)]
        dynamic: bool,
        /// Symmetric images added per iteration (default 50, or 5 with --lex).
        #[arg(long, value_name = "U")]
        mcs_cap: Option<usize>,
        /// Lines of `LABEL WEIGHT`; unlisted constraints weigh 1.
        #[arg(long, value_name = "FILE")]
        weights: Option<PathBuf>,
    },
    /// Enumerate MUSes.
    Marco {
        input: PathBuf,
        #[arg(long)]
        lex: bool,
        /// Expand the reported MUSes to their orbits.
        #[arg(long)]
        unroll: bool,
        #[arg(long, default_value_t = DEFAULT_UNROLL_CAP)]
        unroll_cap: usize,
        #[arg(long, value_name = "N")]
        max_muses: Option<usize>,
        #[arg(long, value_enum, default_value = "plain")]
        shrink: ShrinkArg,
    },
    /// Detect constraint symmetries and print them in symmetry-file format.
    Detect {
        input: PathBuf,
        /// Print a JSON report instead.
        #[arg(long)]
        json: bool,
    },
    /// Write a benchmark instance and its known symmetries.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma-separated: `p,h` (php), `n,k` (queens), `bins,ratio` (binpack).
        #[arg(long, value_delimiter = ',', required = true)]
        params: Vec<u64>,
        #[arg(short, long, value_name = "DIR", default_value = ".")]
        output: PathBuf,
    },
    /// Run every (instance, algorithm) cell of a TOML config.
    BenchRun {
        config: PathBuf,
        #[arg(short, long, value_name = "DIR", default_value = "bench-out")]
        output: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_spec(path: &Path) -> Result<Spec, String> {
    parse_spec(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_weights(text: &str, spec: &Spec) -> Result<Vec<u64>, String> {
    let index = spec.label_index();
    let mut w = vec![1; spec.len()];
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(label), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("weights line {}: expected `LABEL WEIGHT`", n + 1));
        };
        let id = *index
            .get(label)
            .ok_or_else(|| format!("weights line {}: unknown label {label:?}", n + 1))?;
        w[id] = value
            .parse()
            .ok()
            .filter(|&v: &u64| v > 0)
            .ok_or_else(|| format!("weights line {}: weight must be a positive integer", n + 1))?;
    }
    Ok(w)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into())
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn main_with(args: Vec<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let command: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(cli, command, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn execute(cli: Cli, command: Vec<String>, out: &mut dyn Write) -> Result<i32, String> {
    let c = cli.common;
    let common = Common {
        seed: c.seed,
        conflict_budget: c.conflict_budget,
        time_limit: c.time_limit,
        node_budget: c.node_budget,
        negative_assumptions: !c.no_negative_assumptions,
        lex_order: c.lex_order,
    };
    let source = match &c.symmetries {
        Some(p) => GroupSource::Text(read(p)?),
        None => GroupSource::Detect,
    };
    let io = |e: std::io::Error| e.to_string();
    let mut weights_path = None;

    let (input, mut algorithm, detect_text) = match cli.command {
        Command::Mus { input, algo, order } => {
            let algo = match algo {
                AlgoArg::Shrink => MusAlgo::Shrink,
                AlgoArg::Symm => MusAlgo::Symm,
                AlgoArg::SymmRecompute => MusAlgo::SymmRecompute,
            };
            let order = match order {
                OrderArg::Descending => Order::Descending,
                OrderArg::Ascending => Order::Ascending,
                OrderArg::Random => Order::Random(common.seed),
            };
            (input, Algorithm::Mus { algo, order }, false)
        }
        Command::Ocus {
            input,
            lex,
            dynamic,
            mcs_cap,
            weights,
        } => {
            weights_path = weights;
            let default_cap = if lex { DEFAULT_LEX_ENUM_CAP } else { DEFAULT_ENUM_CAP };
            let cfg = OcusConfig {
                use_lex: lex,
                dynamic,
                mcs_cap: mcs_cap.unwrap_or(default_cap),
                ..Default::default()
            };
            (input, Algorithm::Ocus(cfg), false)
        }
        Command::Marco {
            input,
            lex,
            unroll,
            unroll_cap,
            max_muses,
            shrink,
        } => {
            let opts = MarcoOptions {
                lex,
                unroll,
                unroll_cap,
                max_muses,
                shrink: match shrink {
                    ShrinkArg::Plain => ShrinkBackend::Plain,
                    ShrinkArg::Symm => ShrinkBackend::Symm,
                },
            };
            (input, Algorithm::Marco(opts), false)
        }
        Command::Detect { input, json } => (input, Algorithm::Detect, !json),
        Command::Gen {
            family,
            params,
            output,
        } => {
            let family = match family {
                FamilyArg::Php => "php",
                FamilyArg::Queens => "queens",
                FamilyArg::Binpack => "binpack",
            };
            let b = bench_run::generate(family, &params, common.seed)?;
            std::fs::create_dir_all(&output).map_err(io)?;
            let name = b.name();
            let spec_path = output.join(format!("{name}.opb"));
            let sym_path = output.join(format!("{name}.sym"));
            std::fs::write(&spec_path, write_spec(&b.spec)).map_err(io)?;
            std::fs::write(&sym_path, write_symmetries(&b.known_group, &b.spec)).map_err(io)?;
            let mut report = RunReport::new(command);
            report.instance = Some(report::InstanceInfo {
                name: name.clone(),
                constraints: b.spec.len(),
                variables: b.spec.num_vars,
            });
            report.config = json!({ "family": family, "params": params, "seed": common.seed });
            report.result = json!({
                "spec_file": spec_path.display().to_string(),
                "symmetry_file": sym_path.display().to_string(),
            });
            writeln!(out, "{}", report.to_json()).map_err(io)?;
            return Ok(0);
        }
        Command::BenchRun { config, output } => {
            let text = read(&config)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let cells = bench_run::bench_run(&text, base, &output)?;
            let mut report = RunReport::new(command);
            report.result = json!({ "cells": cells, "output": output.display().to_string() });
            writeln!(out, "{}", report.to_json()).map_err(io)?;
            return Ok(0);
        }
    };

    let spec = load_spec(&input)?;
    if let (Algorithm::Ocus(cfg), Some(p)) = (&mut algorithm, &weights_path) {
        cfg.weights = Some(parse_weights(&read(p)?, &spec)?);
    }
    let mut stream_err = None;
    let report = run(command, &stem(&input), &spec, &algorithm, &source, &common, |m| {
        if let Err(e) = writeln!(out, "{}", json!({ "mus": m })) {
            stream_err.get_or_insert(e);
        }
    });
    if let Some(e) = stream_err {
        return Err(e.to_string());
    }
    if report.status == Status::Error {
        return Err(report.error.unwrap_or_default());
    }
    if detect_text {
        let text = report.result["symmetry_file"].as_str().unwrap_or_default();
        write!(out, "{text}").map_err(io)?;
    } else {
        writeln!(out, "{}", report.to_json()).map_err(io)?;
    }
    Ok(report.exit_code)
}
