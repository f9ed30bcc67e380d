//! Trace records, output files and replay.
//!
//! `trace.jsonl` starts with a header line carrying the seed, the
//! scenario text and both program texts, so a trace can be recomputed
//! from itself. Every following line is one tick (tick 0 is the
//! initialization round); a run that stopped early ends with an error
//! line.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{run_scenario, RunError, ScenarioConfig};
use crate::agent::CycleRecord;
use crate::continuous::Registry;
use crate::sim::SimRow;

pub const TRACE_FORMAT: &str = "hybridsat-trace/1";

pub const CSV_HEADER: &str = "t,rx,ry,rz,vx,vy,vz,mode,h0,h1,h2,h3,h4,h5,ax_cmd,ay_cmd,az_cmd";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub seed: u64,
    pub scenario: String,
    pub abstraction_program: String,
    pub reasoning_program: String,
}

impl TraceHeader {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        TraceHeader {
            format: TRACE_FORMAT.to_string(),
            seed: cfg.sim.seed,
            scenario: cfg.source.clone(),
            abstraction_program: cfg.abstraction_program.text.clone(),
            reasoning_program: cfg.reasoning_program.text.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TickRecord {
    pub tick: u64,
    /// Simulation time at the end of the tick.
    pub t: f64,
    /// Simulator commands from the previous tick applied before stepping.
    pub applied: Vec<String>,
    /// The `sim.csv` row for this tick.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim: Option<String>,
    pub sim_events: Vec<String>,
    pub clipped: usize,
    pub abstraction: Vec<CycleRecord>,
    pub reasoning: Vec<CycleRecord>,
    /// Shared store contents after the tick.
    pub store: Vec<String>,
}

impl TickRecord {
    pub fn new(tick: u64, t: f64) -> Self {
        TickRecord {
            tick,
            t,
            ..Default::default()
        }
    }

    /// Agent actions issued during this tick, across both engines.
    pub fn actions(&self) -> impl Iterator<Item = &str> {
        self.abstraction
            .iter()
            .chain(&self.reasoning)
            .flat_map(|r| r.actions.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone)]
pub struct TraceLog {
    pub header: TraceHeader,
    pub init: TickRecord,
    /// One record per simulated tick.
    pub ticks: Vec<TickRecord>,
    pub registry: Registry,
    pub error: Option<String>,
}

pub fn csv_row(row: &SimRow) -> String {
    let mut fields = vec![row.t.to_string()];
    fields.extend(row.state.iter().map(f64::to_string));
    fields.push(row.mode.clone());
    fields.extend(row.health.iter().map(f64::to_string));
    fields.extend(row.accel_cmd.iter().map(f64::to_string));
    fields.join(",")
}

#[derive(Serialize)]
struct AgentLine<'a> {
    tick: u64,
    #[serde(flatten)]
    record: &'a CycleRecord,
}

#[derive(Serialize)]
struct StoreLine<'a> {
    tick: u64,
    atoms: &'a [String],
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    error: &'a str,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("trace records serialize")
}

impl TraceLog {
    pub fn new(header: TraceHeader) -> Self {
        TraceLog {
            header,
            init: TickRecord::default(),
            ticks: Vec::new(),
            registry: Registry::new(),
            error: None,
        }
    }

    fn records(&self) -> impl Iterator<Item = &TickRecord> {
        std::iter::once(&self.init).chain(&self.ticks)
    }

    /// Lines of `trace.jsonl`.
    pub fn trace_lines(&self) -> Vec<String> {
        let mut lines = vec![json(&self.header)];
        lines.extend(self.records().map(json));
        if let Some(e) = &self.error {
            lines.push(json(&ErrorLine { error: e }));
        }
        lines
    }

    pub fn sim_csv(&self) -> String {
        let mut s = format!("{CSV_HEADER}\n");
        for r in &self.ticks {
            if let Some(row) = &r.sim {
                s.push_str(row);
                s.push('\n');
            }
        }
        s
    }

    pub fn agents_jsonl(&self) -> String {
        let mut s = String::new();
        for r in self.records() {
            for record in r.abstraction.iter().chain(&r.reasoning) {
                s.push_str(&json(&AgentLine { tick: r.tick, record }));
                s.push('\n');
            }
        }
        s
    }

    pub fn store_jsonl(&self) -> String {
        let mut s = String::new();
        for r in self.records() {
            s.push_str(&json(&StoreLine {
                tick: r.tick,
                atoms: &r.store,
            }));
            s.push('\n');
        }
        s
    }

    /// Writes `trace.jsonl`, `sim.csv`, `agents.jsonl`, `store.jsonl` and
    /// the `registry/` directory.
    pub fn write_to_dir(&self, dir: &Path) -> Result<(), RunError> {
        let io = |e: std::io::Error| RunError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let mut trace = fs::File::create(dir.join("trace.jsonl")).map_err(io)?;
        for line in self.trace_lines() {
            writeln!(trace, "{line}").map_err(io)?;
        }
        fs::write(dir.join("sim.csv"), self.sim_csv()).map_err(io)?;
        fs::write(dir.join("agents.jsonl"), self.agents_jsonl()).map_err(io)?;
        fs::write(dir.join("store.jsonl"), self.store_jsonl()).map_err(io)?;
        let reg = dir.join("registry");
        if reg.exists() {
            fs::remove_dir_all(&reg).map_err(io)?;
        }
        self.registry
            .dump_to_dir(&reg)
            .map_err(|e| RunError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReplayOutcome {
    Identical { lines: usize },
    /// `tick` is `None` when the divergence is in the header or in a
    /// trailing error line.
    Diverged {
        line: usize,
        tick: Option<u64>,
        expected: Option<String>,
        actual: Option<String>,
    },
}

fn tick_of(line: &str) -> Option<u64> {
    let v: serde_json::Value = serde_json::from_str(line).ok()?;
    v.get("tick")?.as_u64()
}

/// Recomputes a stored trace from its header and compares it line by
/// line. `expected` is the recomputed line, `actual` the stored one.
pub fn replay(stored: &str) -> Result<ReplayOutcome, RunError> {
    let lines: Vec<&str> = stored.lines().collect();
    let first = lines.first().ok_or_else(|| RunError::Config("empty trace".into()))?;
    let header: TraceHeader =
        serde_json::from_str(first).map_err(|e| RunError::Config(format!("bad trace header: {e}")))?;
    if header.format != TRACE_FORMAT {
        return Err(RunError::Config(format!("unsupported trace format {}", header.format)));
    }
    let mut cfg = ScenarioConfig::from_texts(&header.scenario, &header.abstraction_program, &header.reasoning_program)?;
    cfg.set_seed(header.seed);
    let fresh = run_scenario(&cfg).trace.trace_lines();
    for i in 0..fresh.len().max(lines.len()) {
        let (expected, actual) = (fresh.get(i), lines.get(i));
        if expected.map(String::as_str) != actual.copied() {
            let tick = actual
                .and_then(|l| tick_of(l))
                .or_else(|| expected.and_then(|l| tick_of(l)));
            return Ok(ReplayOutcome::Diverged {
                line: i + 1,
                tick,
                expected: expected.cloned(),
                actual: actual.map(|s| s.to_string()),
            });
        }
    }
    Ok(ReplayOutcome::Identical { lines: fresh.len() })
}

/// Time against position norm from the tick lines of a trace, keeping
/// at most `max_points` evenly strided samples (always including the
/// last).
pub fn plot_series(stored: &str, max_points: usize) -> Result<Vec<(f64, f64)>, RunError> {
    let mut points = Vec::new();
    for (no, line) in stored.lines().enumerate().skip(1) {
        let v: serde_json::Value =
            serde_json::from_str(line).map_err(|e| RunError::Config(format!("trace line {}: {e}", no + 1)))?;
        let Some(row) = v.get("sim").and_then(|s| s.as_str()) else {
            continue;
        };
        let f: Vec<f64> = row
            .split(',')
            .take(4)
            .map(|x| x.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| RunError::Config(format!("trace line {}: bad sim row", no + 1)))?;
        if f.len() < 4 {
            return Err(RunError::Config(format!("trace line {}: short sim row", no + 1)));
        }
        points.push((f[0], (f[1] * f[1] + f[2] * f[2] + f[3] * f[3]).sqrt()));
    }
    if points.len() <= max_points {
        return Ok(points);
    }
    let last = *points.last().expect("nonempty");
    if max_points < 2 {
        return Ok(vec![last]);
    }
    let stride = (points.len() - 1).div_ceil(max_points - 1);
    let mut out: Vec<_> = points.into_iter().step_by(stride).collect();
    if out.last() != Some(&last) {
        out.push(last);
    }
    Ok(out)
}
