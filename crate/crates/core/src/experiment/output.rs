//! Output files: a header block that echoes the spec, per-run CSV and
//! JSON-lines rows, and per-value sweep summaries.

use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::{LsSchedule, Outcome, RunRecord};

use super::config::{format_depth, Spec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
    Both,
}

impl Format {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "csv" => Format::Csv,
            "jsonl" => Format::Jsonl,
            "both" => Format::Both,
            _ => return None,
        })
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn jsonl(self) -> bool {
        matches!(self, Format::Jsonl | Format::Both)
    }
}

/// Command name, spec echo and derived values shared by every file of one
/// invocation.
#[derive(Clone, Debug)]
pub struct Header {
    pub command: String,
    pub spec: Spec,
    /// Values computed by the command, such as a pilot budget.
    pub derived: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl Header {
    pub fn new(command: &str, spec: &Spec) -> Self {
        Self {
            command: command.to_string(),
            spec: spec.clone(),
            derived: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// `# `-prefixed block; valid in CSV and DOT files and re-parseable as a
    /// config.
    pub fn comment_block(&self) -> String {
        let mut s = format!("# memlab {VERSION}\n# command = {}\n", self.command);
        let seed = self.spec.get("master_seed");
        let _ = writeln!(s, "# master_seed = {seed}");
        for (k, v) in self.spec.entries() {
            if k != "master_seed" {
                let _ = writeln!(s, "# {k} = {v}");
            }
        }
        for (k, v) in &self.derived {
            let _ = writeln!(s, "# derived.{k} = {v}");
        }
        for w in &self.warnings {
            let _ = writeln!(s, "# warning = {w}");
        }
        s
    }

    pub fn json_line(&self) -> String {
        let spec: serde_json::Map<String, serde_json::Value> = self
            .spec
            .entries()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string())))
            .collect();
        let derived: serde_json::Map<String, serde_json::Value> = self
            .derived
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let obj = serde_json::json!({
            "memlab": VERSION,
            "command": self.command,
            "master_seed": self.spec.get("master_seed"),
            "spec": spec,
            "derived": derived,
            "warnings": self.warnings,
        });
        obj.to_string()
    }

    pub fn csv_file(&self, name: &str, body: &str) -> OutputFile {
        OutputFile {
            name: name.to_string(),
            contents: format!("{}{body}", self.comment_block()),
        }
    }
}

/// One replicate together with the labels needed for its output row.
#[derive(Clone, Debug, Serialize)]
pub struct RunRow {
    pub function: String,
    pub variant: String,
    pub replicate: u64,
    pub record: RunRecord,
}

pub const RUN_COLUMNS: &str = "function,variant,n,mu,lambda,p_m,schedule,tau_or_pls,delta,pivot,seed,outcome,generations,mutation_evals,ls_evals,ls_invocations,best_fitness";

pub fn schedule_fields(s: LsSchedule) -> (&'static str, String) {
    match s {
        LsSchedule::EveryTau(t) => ("every_tau", t.to_string()),
        LsSchedule::Probability(p) => ("probability", p.to_string()),
        LsSchedule::Never => ("never", "-".into()),
    }
}

impl RunRow {
    pub fn csv_line(&self) -> String {
        let r = &self.record;
        let c = &r.config_echo;
        let (schedule, tau) = schedule_fields(c.schedule);
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.function,
            self.variant,
            c.n,
            c.mu,
            c.lambda,
            c.mutation_rate(),
            schedule,
            tau,
            format_depth(c.depth),
            c.pivot.name(),
            c.seed,
            r.outcome.name(),
            r.generations,
            r.evaluations.mutation_evals,
            r.evaluations.ls_evals,
            r.ls_invocations,
            r.final_best_fitness,
        )
    }
}

pub fn runs_csv(rows: &[RunRow]) -> String {
    let mut s = format!("{RUN_COLUMNS}\n");
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

pub fn runs_jsonl(header: &Header, rows: &[RunRow]) -> String {
    let mut s = header.json_line();
    s.push('\n');
    for r in rows {
        s.push_str(&serde_json::to_string(r).expect("run rows serialize"));
        s.push('\n');
    }
    s
}

/// Writes `runs.csv` and/or `runs.jsonl`.
pub fn run_files(header: &Header, rows: &[RunRow], format: Format) -> Vec<OutputFile> {
    let mut files = Vec::new();
    if format.csv() {
        files.push(header.csv_file("runs.csv", &runs_csv(rows)));
    }
    if format.jsonl() {
        files.push(OutputFile {
            name: "runs.jsonl".into(),
            contents: runs_jsonl(header, rows),
        });
    }
    files
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[u64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0] as f64,
        n => {
            let pos = q * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = pos - lo as f64;
            sorted[lo] as f64 + frac * (sorted[hi] as f64 - sorted[lo] as f64)
        }
    }
}

/// Aggregates over the replicates of one parameter value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub function: String,
    pub variant: String,
    pub axis: String,
    pub value: String,
    pub replicates: usize,
    pub success_rate: f64,
    pub trap_rate: f64,
    pub budget_rate: f64,
    pub generations: [f64; 3],
    pub evaluations: [f64; 3],
}

pub const SUMMARY_COLUMNS: &str = "function,variant,axis,value,replicates,success_rate,trap_rate,budget_rate,gen_q1,gen_median,gen_q3,eval_q1,eval_median,eval_q3";

impl SweepRow {
    /// Order-independent: statistics depend only on the multiset of runs.
    pub fn from_runs(axis: &str, value: &str, runs: &[&RunRow]) -> Self {
        let n = runs.len();
        let rate = |o: Outcome| runs.iter().filter(|r| r.record.outcome == o).count() as f64 / n.max(1) as f64;
        let mut gens: Vec<u64> = runs.iter().map(|r| r.record.generations).collect();
        let mut evals: Vec<u64> = runs.iter().map(|r| r.record.evaluations.total).collect();
        gens.sort_unstable();
        evals.sort_unstable();
        let q = |v: &[u64]| [quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)];
        let first = runs.first();
        Self {
            function: first.map_or(String::new(), |r| r.function.clone()),
            variant: first.map_or(String::new(), |r| r.variant.clone()),
            axis: axis.to_string(),
            value: value.to_string(),
            replicates: n,
            success_rate: rate(Outcome::OptimumFound),
            trap_rate: rate(Outcome::Trapped),
            budget_rate: rate(Outcome::BudgetExhausted),
            generations: q(&gens),
            evaluations: q(&evals),
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.function,
            self.variant,
            self.axis,
            self.value,
            self.replicates,
            self.success_rate,
            self.trap_rate,
            self.budget_rate,
            self.generations[0],
            self.generations[1],
            self.generations[2],
            self.evaluations[0],
            self.evaluations[1],
            self.evaluations[2],
        )
    }
}

pub fn summary_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SUMMARY_COLUMNS}\n");
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

/// Strips the `#` header block from a CSV file.
pub fn csv_body(contents: &str) -> &str {
    let mut rest = contents;
    while rest.starts_with('#') {
        rest = rest.split_once('\n').map_or("", |(_, tail)| tail);
    }
    rest
}
