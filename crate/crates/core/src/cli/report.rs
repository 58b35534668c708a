//! Machine-readable run reports and the runners that produce them.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::{json, Value};

use crate::formula::{half_reify, ConstraintSet, HalfReifiedSpec, Spec};
use crate::marco::{marco, unroll, MarcoConfig, MarcoError, ShrinkBackend};
use crate::ocus::{ocus, OcusConfig, OcusError};
use crate::oracle::{OracleConfig, SolverCtx};
use crate::shrink::{shrink, symm_shrink, Order, ShrinkConfig, ShrinkError};
use crate::solver::SolverStats;
use crate::symmetry::{detect_with_budget, parse_symmetries, write_symmetries, SymGroup};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
    Sat,
    Budget,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Error => 1,
            Status::Sat => 2,
            Status::Budget => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceInfo {
    pub name: String,
    pub constraints: usize,
    pub variables: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub oracle_calls: u64,
    pub detection_nodes: u64,
    pub detection_truncated: bool,
    pub iterations: u64,
    pub solver: SolverStats,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub instance: Option<InstanceInfo>,
    pub config: Value,
    pub result: Value,
    pub stats: RunStats,
    pub status: Status,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command,
            instance: None,
            config: Value::Null,
            result: Value::Null,
            stats: RunStats::default(),
            status: Status::Ok,
            exit_code: 0,
            error: None,
        }
    }

    pub fn set_status(&mut self, status: Status) {
        self.status = status;
        self.exit_code = status.exit_code();
    }

    pub fn fail(mut self, msg: impl ToString) -> Self {
        self.set_status(Status::Error);
        self.error = Some(msg.to_string());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Settings shared by every solving command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Common {
    pub seed: u64,
    pub conflict_budget: Option<u64>,
    pub time_limit: Option<f64>,
    pub node_budget: u64,
    pub negative_assumptions: bool,
    /// Constraint labels in lex significance order.
    pub lex_order: Option<Vec<String>>,
}

impl Default for Common {
    fn default() -> Self {
        Common {
            seed: 0,
            conflict_budget: None,
            time_limit: None,
            node_budget: crate::symmetry::DEFAULT_NODE_BUDGET,
            negative_assumptions: true,
            lex_order: None,
        }
    }
}

/// Where the symmetry group comes from.
#[derive(Debug, Clone)]
pub enum GroupSource {
    Detect,
    /// Contents of a symmetry file.
    Text(String),
    Given(SymGroup),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MusAlgo {
    Shrink,
    Symm,
    SymmRecompute,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarcoOptions {
    pub lex: bool,
    pub unroll: bool,
    pub unroll_cap: usize,
    pub max_muses: Option<usize>,
    pub shrink: ShrinkBackend,
}

impl Default for MarcoOptions {
    fn default() -> Self {
        MarcoOptions {
            lex: false,
            unroll: false,
            unroll_cap: crate::marco::DEFAULT_UNROLL_CAP,
            max_muses: None,
            shrink: ShrinkBackend::Plain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Algorithm {
    Mus { algo: MusAlgo, order: Order },
    Ocus(OcusConfig),
    Marco(MarcoOptions),
    Detect,
}

impl Algorithm {
    fn needs_group(&self) -> bool {
        match self {
            Algorithm::Mus { algo, .. } => *algo != MusAlgo::Shrink,
            Algorithm::Ocus(c) => c.use_lex || c.dynamic,
            Algorithm::Marco(m) => m.lex || m.unroll || m.shrink == ShrinkBackend::Symm,
            Algorithm::Detect => true,
        }
    }
}

/// Renders a generator as disjoint cycles over constraint labels.
pub fn cycle_string(spec: &Spec, cycles: &[Vec<usize>]) -> String {
    cycles
        .iter()
        .map(|c| format!("({})", c.iter().map(|&x| spec.label(x)).collect::<Vec<_>>().join(" ")))
        .collect()
}

fn labels(spec: &Spec, s: &ConstraintSet) -> Vec<String> {
    spec.labels(s)
}

fn lex_ids(spec: &Spec, order: &Option<Vec<String>>) -> Result<Option<Vec<usize>>, String> {
    let Some(order) = order else { return Ok(None) };
    let index = spec.label_index();
    order
        .iter()
        .map(|l| index.get(l).copied().ok_or_else(|| format!("unknown constraint label {l:?} in lex order")))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn resolve_group(
    h: &HalfReifiedSpec,
    source: &GroupSource,
    common: &Common,
    stats: &mut RunStats,
) -> Result<SymGroup, String> {
    match source {
        GroupSource::Detect => {
            let g = detect_with_budget(h, common.node_budget);
            stats.detection_nodes = g.nodes;
            stats.detection_truncated = g.truncated;
            Ok(g)
        }
        GroupSource::Text(t) => parse_symmetries(t, &h.base).map_err(|e| format!("symmetry file: {e}")),
        GroupSource::Given(g) => Ok(g.clone()),
    }
}

/// Runs one algorithm on `spec`. `on_mus` receives MUSes (as labels) as
/// soon as enumeration finds them.
pub fn run(
    command: Vec<String>,
    name: &str,
    spec: &Spec,
    algorithm: &Algorithm,
    source: &GroupSource,
    common: &Common,
    mut on_mus: impl FnMut(&[String]),
) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport::new(command);
    report.instance = Some(InstanceInfo {
        name: name.to_string(),
        constraints: spec.len(),
        variables: spec.num_vars,
    });
    report.config = json!({ "algorithm": algorithm, "common": common });
    let h = half_reify(spec);
    let group = if algorithm.needs_group() {
        match resolve_group(&h, source, common, &mut report.stats) {
            Ok(g) => g,
            Err(e) => return report.fail(e),
        }
    } else {
        SymGroup::identity(spec.len())
    };
    let order = match lex_ids(spec, &common.lex_order) {
        Ok(o) => o,
        Err(e) => return report.fail(e),
    };
    let oracle_cfg = OracleConfig {
        seed: common.seed,
        negative_assumptions: common.negative_assumptions,
        conflict_budget: common.conflict_budget,
        check_cores: false,
    };
    let mut ctx = SolverCtx::with_config(Arc::new(h), oracle_cfg);
    let deadline = common
        .time_limit
        .map(|s| start + Duration::from_secs_f64(s.max(0.0)));
    ctx.set_deadline(deadline);

    let all = spec.all_ids();
    match algorithm {
        Algorithm::Mus { algo, order } => {
            let cfg = ShrinkConfig {
                order: *order,
                recompute: *algo == MusAlgo::SymmRecompute,
                verify: false,
            };
            let res = match algo {
                MusAlgo::Shrink => shrink(&mut ctx, &all, &cfg),
                _ => symm_shrink(&mut ctx, &all, &group, &cfg),
            };
            match res {
                Ok(st) => {
                    report.stats.iterations = st.stats.marks_direct + st.stats.refinements;
                    report.result = json!({
                        "mus": labels(spec, &st.core),
                        "size": st.core.len(),
                        "complete": true,
                        "oracle_calls": st.stats.oracle_calls,
                        "marks_direct": st.stats.marks_direct,
                        "marks_symmetric": st.stats.marks_symmetric,
                        "refinements": st.stats.refinements,
                        "detections": st.stats.detections,
                    });
                }
                Err(ShrinkError::Sat) => report.set_status(Status::Sat),
                Err(ShrinkError::Budget { core }) => {
                    report.set_status(Status::Budget);
                    report.result = json!({
                        "mus": labels(spec, &core),
                        "size": core.len(),
                        "complete": false,
                    });
                }
                Err(ShrinkError::Oracle(e)) => return report.fail(e),
            }
        }
        Algorithm::Ocus(cfg) => {
            let mut cfg = cfg.clone();
            if cfg.order.is_none() {
                cfg.order = order;
            }
            match ocus(&mut ctx, &group, &cfg) {
                Ok(r) => {
                    report.stats.iterations = r.iterations;
                    report.result = json!({
                        "mus": labels(spec, &r.mus),
                        "size": r.mus.len(),
                        "cost": r.cost,
                        "iterations": r.iterations,
                        "h_size": r.h_size,
                        "oracle_calls": r.oracle_calls,
                        "symmetric_mcses": r.symmetric_mcses,
                        "hitting": r.hitting,
                    });
                }
                Err(OcusError::Sat) => report.set_status(Status::Sat),
                Err(OcusError::Budget { iterations, h_size }) => {
                    report.set_status(Status::Budget);
                    report.stats.iterations = iterations;
                    report.result = json!({ "iterations": iterations, "h_size": h_size });
                }
                Err(e) => return report.fail(e),
            }
        }
        Algorithm::Marco(opts) => {
            let cfg = MarcoConfig {
                lex: opts.lex,
                order,
                shrink: opts.shrink,
                max_muses: opts.max_muses,
                deadline,
                verify: false,
            };
            match marco(&mut ctx, Some(&group), &cfg, |m| on_mus(&labels(spec, m))) {
                Ok(r) => {
                    report.stats.iterations = r.stats.seeds;
                    let unrolled = opts.unroll.then(|| unroll(&r.muses, &group, opts.unroll_cap));
                    let hit_limit = opts.max_muses.is_some_and(|m| r.muses.len() >= m);
                    if r.complete && r.muses.is_empty() {
                        report.set_status(Status::Sat);
                    } else if !r.complete && !hit_limit {
                        report.set_status(Status::Budget);
                    }
                    report.result = json!({
                        "muses": r.muses.iter().map(|m| labels(spec, m)).collect::<Vec<_>>(),
                        "count": r.muses.len(),
                        "complete": r.complete,
                        "unrolled": unrolled.as_ref().map(|(u, _)| u.iter().map(|m| labels(spec, m)).collect::<Vec<_>>()),
                        "unroll_truncated": unrolled.as_ref().is_some_and(|(_, t)| *t),
                        "seeds": r.stats.seeds,
                        "grows": r.stats.grows,
                        "shrinks": r.stats.shrinks,
                        "uncanonical": r.stats.uncanonical,
                        "oracle_calls": r.stats.oracle_calls,
                    });
                }
                Err(MarcoError::Oracle(e)) => return report.fail(e),
                Err(e) => return report.fail(e),
            }
        }
        Algorithm::Detect => {
            report.result = json!({
                "generators": group
                    .generators
                    .iter()
                    .map(|g| cycle_string(spec, &g.cycles()))
                    .collect::<Vec<_>>(),
                "matrices": group
                    .matrices
                    .iter()
                    .map(|m| {
                        m.rows()
                            .iter()
                            .map(|r| r.iter().map(|&c| spec.label(c)).collect::<Vec<_>>())
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>(),
                "symmetry_file": write_symmetries(&group, spec),
                "truncated": group.truncated,
            });
        }
    }
    report.stats.oracle_calls = ctx.calls();
    report.stats.solver = ctx.solver_stats();
    report.stats.wall_ms = start.elapsed().as_secs_f64() * 1000.0;
    report
}
