//! Results files: one CSV row per qulet followed by a `# key,value` summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use thiserror::Error;

use crate::domain::QuletStatus;
use crate::runner::RunReport;

pub const RESULTS_HEADER: &str = "qulet_id,status,node_id,t_n,t_c,t_s,t_w,t_q,total,cost";

/// Renders the results file for `report`.
pub fn results_to_string(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in &report.results {
        let b = &r.breakdown;
        let node = r.node_id.map(|n| n.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
            r.qulet_id,
            r.status.as_str(),
            node,
            b.t_n,
            b.t_c,
            b.t_s,
            b.t_w,
            b.t_q,
            b.total,
            r.cost
        );
    }
    let _ = writeln!(out, "# makespan,{:.4}", report.makespan);
    let _ = writeln!(out, "# success_count,{}", report.success_count());
    let _ = writeln!(out, "# total_cost,{:.4}", report.total_cost());
    for (node, u) in report.utilization() {
        let _ = writeln!(out, "# node_utilization,{node},{u:.4}");
    }
    out
}

pub fn write_results<W: Write>(report: &RunReport, mut out: W) -> io::Result<()> {
    out.write_all(results_to_string(report).as_bytes())?;
    out.flush()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub qulet_id: u32,
    pub status: QuletStatus,
    pub node_id: Option<u32>,
    pub t_n: f64,
    pub t_c: f64,
    pub t_s: f64,
    pub t_w: f64,
    pub t_q: f64,
    pub total: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsFile {
    pub rows: Vec<ResultRow>,
    pub makespan: Option<f64>,
    pub success_count: Option<usize>,
    pub total_cost: Option<f64>,
    pub utilization: BTreeMap<u32, f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct MalformedResults {
    pub line: usize,
    pub message: String,
}

fn malformed(line: usize, message: impl Into<String>) -> MalformedResults {
    MalformedResults {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(field: &str, name: &str, line: usize) -> Result<T, MalformedResults> {
    field
        .trim()
        .parse()
        .map_err(|_| malformed(line, format!("{name}: `{field}` is not a number")))
}

pub fn parse_results(text: &str) -> Result<ResultsFile, MalformedResults> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim() == RESULTS_HEADER => {}
        Some((n, h)) => return Err(malformed(n, format!("unexpected header `{h}`"))),
        None => return Err(malformed(1, "missing header")),
    }
    let mut file = ResultsFile::default();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if let Some(summary) = line.strip_prefix('#') {
            let parts: Vec<&str> = summary.trim().split(',').collect();
            match parts.as_slice() {
                ["makespan", v] => file.makespan = Some(number(v, "makespan", n)?),
                ["success_count", v] => file.success_count = Some(number(v, "success_count", n)?),
                ["total_cost", v] => file.total_cost = Some(number(v, "total_cost", n)?),
                ["node_utilization", node, v] => {
                    file.utilization
                        .insert(number(node, "node", n)?, number(v, "node_utilization", n)?);
                }
                _ => return Err(malformed(n, format!("unknown summary line `{line}`"))),
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(malformed(n, format!("expected 10 fields, found {}", f.len())));
        }
        let node_id = if f[2].trim().is_empty() {
            None
        } else {
            Some(number(f[2], "node_id", n)?)
        };
        file.rows.push(ResultRow {
            qulet_id: number(f[0], "qulet_id", n)?,
            status: f[1].trim().parse().map_err(|e: String| malformed(n, e))?,
            node_id,
            t_n: number(f[3], "t_n", n)?,
            t_c: number(f[4], "t_c", n)?,
            t_s: number(f[5], "t_s", n)?,
            t_w: number(f[6], "t_w", n)?,
            t_q: number(f[7], "t_q", n)?,
            total: number(f[8], "total", n)?,
            cost: number(f[9], "cost", n)?,
        });
    }
    Ok(file)
}

/// Aggregate figures printed by `report`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub qulets: usize,
    pub succeeded: usize,
    pub makespan: f64,
    pub mean_wait: f64,
    pub p95_wait: f64,
    pub utilization: BTreeMap<u32, f64>,
    pub total_cost: f64,
}

/// Nearest-rank percentile of `values` (sorted in place).
pub fn percentile(values: &mut [f64], p: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let rank = ((p / 100.0) * values.len() as f64).ceil().max(1.0) as usize;
    values[rank.min(values.len()) - 1]
}

impl ResultsFile {
    pub fn summary(&self) -> Summary {
        let ok: Vec<&ResultRow> = self.rows.iter().filter(|r| r.status == QuletStatus::Success).collect();
        let mut waits: Vec<f64> = ok.iter().map(|r| r.t_w).collect();
        let mean_wait = if waits.is_empty() {
            0.0
        } else {
            waits.iter().sum::<f64>() / waits.len() as f64
        };
        let p95_wait = percentile(&mut waits, 95.0);
        let makespan = self.makespan.unwrap_or(0.0);
        let utilization = if self.utilization.is_empty() && makespan > 0.0 {
            let mut busy: BTreeMap<u32, f64> = BTreeMap::new();
            for r in &ok {
                if let Some(node) = r.node_id {
                    *busy.entry(node).or_default() += r.t_q;
                }
            }
            busy.into_iter().map(|(k, v)| (k, v / makespan)).collect()
        } else {
            self.utilization.clone()
        };
        Summary {
            qulets: self.rows.len(),
            succeeded: self.success_count.unwrap_or(ok.len()),
            makespan,
            mean_wait,
            p95_wait,
            utilization,
            total_cost: self.total_cost.unwrap_or_else(|| self.rows.iter().fold(0.0, |acc, r| acc + r.cost)),
        }
    }
}
