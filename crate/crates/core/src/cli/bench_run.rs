//! Batch runs over generated or file instances.
//!
//! Config format (TOML):
//!
//! ```toml
//! algorithms = ["shrink", "symm"]
//! time_limit = 10.0        # seconds per cell, optional
//! conflict_budget = 100000 # per oracle call, optional
//! seed = 0
//! threads = 2
//! group = "detect"         # or "known" for generated instances
//!
//! [[instances]]
//! family = "php"
//! params = [5, 3]
//!
//! [[instances]]
//! file = "specs/example.opb"
//! ```

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::report::{run, Algorithm, Common, GroupSource, MarcoOptions, MusAlgo, RunReport};
use crate::bench::{gen_binpack, gen_php, gen_queens, BenchInstance};
use crate::formula::{parse_spec, Spec};
use crate::ocus::OcusConfig;
use crate::shrink::Order;

pub const ALGORITHMS: &[&str] = &[
    "shrink",
    "symm",
    "symm-recompute",
    "ocus",
    "ocus-lex",
    "ocus-enum",
    "ocus-lex-enum",
    "marco",
    "marco-lex",
];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub algorithms: Vec<String>,
    #[serde(default)]
    pub instances: Vec<InstanceSpec>,
    pub time_limit: Option<f64>,
    pub conflict_budget: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    pub threads: Option<usize>,
    #[serde(default)]
    pub group: GroupChoice,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupChoice {
    #[default]
    Detect,
    Known,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub family: Option<String>,
    #[serde(default)]
    pub params: Vec<u64>,
    pub seed: Option<u64>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Row<'a> {
    instance: &'a str,
    algorithm: &'a str,
    status: &'a str,
    wall_ms: f64,
    oracle_calls: u64,
    iterations: u64,
    result_size: Option<u64>,
}

pub fn algorithm(name: &str) -> Option<Algorithm> {
    let mus = |algo| Algorithm::Mus {
        algo,
        order: Order::Descending,
    };
    Some(match name {
        "shrink" => mus(MusAlgo::Shrink),
        "symm" => mus(MusAlgo::Symm),
        "symm-recompute" => mus(MusAlgo::SymmRecompute),
        "ocus" => Algorithm::Ocus(OcusConfig::default()),
        "ocus-lex" => Algorithm::Ocus(OcusConfig::lex()),
        "ocus-enum" => Algorithm::Ocus(OcusConfig::enumerate(crate::ocus::DEFAULT_ENUM_CAP)),
        "ocus-lex-enum" => Algorithm::Ocus(OcusConfig::lex_enumerate(crate::ocus::DEFAULT_LEX_ENUM_CAP)),
        "marco" => Algorithm::Marco(MarcoOptions::default()),
        "marco-lex" => Algorithm::Marco(MarcoOptions {
            lex: true,
            ..Default::default()
        }),
        _ => return None,
    })
}

pub fn generate(family: &str, params: &[u64], seed: u64) -> Result<BenchInstance, String> {
    let p = |i: usize| -> Result<usize, String> {
        params
            .get(i)
            .map(|&v| v as usize)
            .ok_or_else(|| format!("{family} needs {} parameters", i + 1))
    };
    let res = match family {
        "php" => gen_php(p(0)?, p(1)?),
        "queens" => gen_queens(p(0)?, p(1)?),
        "binpack" => gen_binpack(p(0)?, p(1)? as u32, seed),
        other => return Err(format!("unknown family {other:?}")),
    };
    res.map_err(|e| e.to_string())
}

struct Cell {
    name: String,
    spec: Spec,
    known: Option<crate::symmetry::SymGroup>,
}

fn load(inst: &InstanceSpec, base: &Path, seed: u64) -> Result<Cell, String> {
    match (&inst.family, &inst.file) {
        (Some(f), None) => {
            let b = generate(f, &inst.params, inst.seed.unwrap_or(seed))?;
            Ok(Cell {
                name: b.name(),
                spec: b.spec,
                known: Some(b.known_group),
            })
        }
        (None, Some(file)) => {
            let path = base.join(file);
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let spec = parse_spec(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".into());
            Ok(Cell {
                name,
                spec,
                known: None,
            })
        }
        _ => Err("each instance needs exactly one of `family` or `file`".into()),
    }
}

/// Parses and validates `text` (paths in it are relative to `base`), runs
/// every (instance, algorithm) cell and writes reports into `out`.
/// Returns the number of cells run.
pub fn bench_run(text: &str, base: &Path, out: &Path) -> Result<usize, String> {
    let cfg: BenchConfig = toml::from_str(text).map_err(|e| format!("config: {e}"))?;
    let algos: Vec<(String, Algorithm)> = cfg
        .algorithms
        .iter()
        .map(|a| {
            algorithm(a)
                .map(|alg| (a.clone(), alg))
                .ok_or_else(|| format!("unknown algorithm {a:?}; known: {}", ALGORITHMS.join(", ")))
        })
        .collect::<Result<_, _>>()?;
    let cells: Vec<Cell> = cfg
        .instances
        .iter()
        .map(|i| load(i, base, cfg.seed))
        .collect::<Result<_, _>>()?;
    std::fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    if cells.is_empty() || algos.is_empty() {
        return Ok(0);
    }

    let common = Common {
        seed: cfg.seed,
        conflict_budget: cfg.conflict_budget,
        time_limit: cfg.time_limit,
        ..Default::default()
    };
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|i| (0..algos.len()).map(move |a| (i, a)))
        .collect();
    let results: Mutex<Vec<Option<RunReport>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let threads = cfg.threads.unwrap_or(1).clamp(1, jobs.len());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, a)) = jobs.get(j) else { break };
                let cell = &cells[i];
                let source = match (&cell.known, cfg.group) {
                    (Some(g), GroupChoice::Known) => GroupSource::Given(g.clone()),
                    _ => GroupSource::Detect,
                };
                let command = vec!["bench-run".into(), cell.name.clone(), algos[a].0.clone()];
                let r = run(command, &cell.name, &cell.spec, &algos[a].1, &source, &common, |_| {});
                results.lock().expect("no poisoned workers")[j] = Some(r);
            });
        }
    });

    let results = results.into_inner().expect("no poisoned workers");
    let mut csv = csv::Writer::from_path(out.join("summary.csv")).map_err(|e| e.to_string())?;
    for (&(i, a), r) in jobs.iter().zip(&results) {
        let r = r.as_ref().expect("every job ran");
        let (name, algo) = (&cells[i].name, &algos[a].0);
        let path = out.join(format!("{name}__{algo}.json"));
        std::fs::write(&path, r.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
        let status = serde_json::to_value(r.status).expect("status serializes");
        csv.serialize(Row {
            instance: name,
            algorithm: algo,
            status: status.as_str().unwrap_or_default(),
            wall_ms: r.stats.wall_ms,
            oracle_calls: r.stats.oracle_calls,
            iterations: r.stats.iterations,
            result_size: r
                .result
                .get("size")
                .or_else(|| r.result.get("count"))
                .and_then(|v| v.as_u64()),
        })
        .map_err(|e| e.to_string())?;
    }
    csv.flush().map_err(|e| e.to_string())?;
    Ok(jobs.len())
}
