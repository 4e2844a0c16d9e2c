//! The experiment commands. Each returns the files it would write; the
//! binary decides where they go.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::engine::{run, LsSchedule, MaConfig, Outcome};
use crate::functions::{FitnessFunction, RaceFn, RaceParams, RaceVariant};
use crate::paths::build_long_k_path;
use crate::rng::{child_seed, RngStream};
use crate::stategraph::{
    autocorrelation_csv, autocorrelation_with_burn_in, build_state_graph_with_limit,
    longest_improving_path, pivot_trajectory_stats, sinks_csv, trajectories_csv, DOT_LIMIT,
};

use super::config::{format_depth, FunctionKind, Instance, Spec};
use super::output::{quantile, run_files, summary_csv, Format, Header, OutputFile, RunRow, SweepRow};
use super::ExperimentError;

/// How a command finished when it produced output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// race-calibrate found no pair meeting both targets.
    Infeasible,
    /// verify-paths found a structural violation.
    InvariantViolation,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Infeasible => 2,
            Status::InvariantViolation => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub files: Vec<OutputFile>,
    pub status: Status,
    /// Human-readable lines for stderr.
    pub messages: Vec<String>,
}

impl CommandOutput {
    fn success(files: Vec<OutputFile>, header: &Header) -> Self {
        Self {
            files,
            status: Status::Success,
            messages: header.warnings.iter().map(|w| format!("warning: {w}")).collect(),
        }
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }
}

pub const COMMANDS: &[&str] = &["run", "sweep-delta", "sweep-tau", "race-calibrate", "stategraph", "verify-paths"];

pub fn execute(command: &str, spec: &Spec, format: Format) -> Result<CommandOutput, ExperimentError> {
    match command {
        "run" => cmd_run(spec, format),
        "sweep-delta" => cmd_sweep_delta(spec, format),
        "sweep-tau" => cmd_sweep_tau(spec, format),
        "race-calibrate" => cmd_race_calibrate(spec),
        "stategraph" => cmd_stategraph(spec),
        "verify-paths" => cmd_verify_paths(spec),
        other => Err(ExperimentError::Config(format!("unknown command {other}"))),
    }
}

/// Runs `configs` in parallel; output order follows input order.
fn run_all(instance: &Instance, configs: Vec<(u64, MaConfig)>) -> Result<Vec<RunRow>, ExperimentError> {
    configs
        .into_par_iter()
        .map(|(replicate, cfg)| {
            Ok(RunRow {
                function: instance.name().to_string(),
                variant: instance.variant().to_string(),
                replicate,
                record: run(&cfg, instance)?,
            })
        })
        .collect()
}

pub fn cmd_run(spec: &Spec, format: Format) -> Result<CommandOutput, ExperimentError> {
    let instance = spec.instance()?;
    let master = spec.master_seed()?;
    let configs = (0..spec.replicates()?)
        .map(|i| Ok((i, spec.ma_config(&instance, child_seed(master, i))?)))
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let rows = run_all(&instance, configs)?;
    let header = Header::new("run", spec);
    Ok(CommandOutput::success(run_files(&header, &rows, format), &header))
}

/// Median generations counting runs without `success` as infinitely long.
fn median_success_generations(rows: &[RunRow], success: impl Fn(Outcome) -> bool) -> Option<f64> {
    let mut gens: Vec<u64> = rows
        .iter()
        .map(|r| if success(r.record.outcome) { r.record.generations } else { u64::MAX })
        .collect();
    gens.sort_unstable();
    let n = gens.len();
    if n == 0 {
        return None;
    }
    let (lo, hi) = ((n - 1) / 2, n / 2);
    (gens[hi] != u64::MAX).then(|| quantile(&gens, 0.5)).filter(|_| gens[lo] != u64::MAX)
}

/// Result of the pilot phase that fixes a sweep's generation budget.
struct Pilot {
    best_label: String,
    median: f64,
    budget: u64,
}

/// Runs `pilot_replicates` capped runs per value and derives
/// `budget_factor x` the median of the value with the highest success rate
/// (ties: smaller median).
fn pilot<V: Sync>(
    spec: &Spec,
    instance: &Instance,
    values: &[(String, V)],
    configure: impl Fn(&mut MaConfig, &V) + Sync,
    success: impl Fn(Outcome) -> bool + Copy + Sync,
) -> Result<Pilot, ExperimentError> {
    let reps: u64 = spec.parse_num("pilot_replicates")?;
    let cap: u64 = spec.parse_num("pilot_max_generations")?;
    let factor: f64 = spec.parse_num("budget_factor")?;
    let pilot_master = child_seed(spec.master_seed()?, u64::MAX);
    let mut best: Option<(f64, f64, String)> = None;
    for (axis, (label, v)) in values.iter().enumerate() {
        let configs = (0..reps)
            .map(|i| {
                let mut cfg = spec.ma_config(instance, child_seed(pilot_master, axis as u64 * reps + i))?;
                configure(&mut cfg, v);
                cfg.budget.max_generations = Some(cap);
                Ok((i, cfg))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        let rows = run_all(instance, configs)?;
        let rate = rows.iter().filter(|r| success(r.record.outcome)).count() as f64 / reps.max(1) as f64;
        let Some(median) = median_success_generations(&rows, success) else { continue };
        let better = match &best {
            None => true,
            Some((r, m, _)) => rate > *r || (rate == *r && median < *m),
        };
        if better {
            best = Some((rate, median, label.clone()));
        }
    }
    let (_, median, best_label) = best.ok_or_else(|| {
        ExperimentError::Infeasible(format!(
            "pilot: no value succeeded in at least half of {reps} runs within {cap} generations"
        ))
    })?;
    Ok(Pilot {
        best_label,
        median,
        budget: (factor * median).ceil().max(1.0) as u64,
    })
}

fn sweep_summary(rows: &[RunRow], axis: &str, label_of: impl Fn(&RunRow) -> String) -> Vec<SweepRow> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in rows {
        let key = (r.variant.clone(), label_of(r));
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.iter()
        .map(|(variant, value)| {
            let group: Vec<&RunRow> = rows
                .iter()
                .filter(|r| &r.variant == variant && &label_of(r) == value)
                .collect();
            SweepRow::from_runs(axis, value, &group)
        })
        .collect()
}

pub fn cmd_sweep_delta(spec: &Spec, format: Format) -> Result<CommandOutput, ExperimentError> {
    let instance = spec.instance()?;
    let Instance::Sectioned(f) = &instance else {
        return Err(ExperimentError::Config("sweep-delta needs function = f_d".into()));
    };
    let deltas = spec.depth_list("delta_values")?;
    if deltas.is_empty() {
        return Err(ExperimentError::Config("sweep-delta needs delta_values".into()));
    }
    let mut header = Header::new("sweep-delta", spec);
    let (d, gap) = (f.params().depth as u64, f.params().gap as u64);
    if !deltas.contains(&d) || !deltas.iter().any(|&x| x + gap <= d) || !deltas.iter().any(|&x| x >= d + gap) {
        header.warnings.push(format!(
            "delta_values should contain D = {d} and values at distance >= {gap} on both sides"
        ));
    }
    let values: Vec<(String, u64)> = deltas.iter().map(|&x| (format_depth(x), x)).collect();
    let set_depth = |cfg: &mut MaConfig, &x: &u64| cfg.depth = x;
    let budget = match spec.optional_num::<u64>("max_generations")? {
        Some(b) => b,
        None => {
            let p = pilot(spec, &instance, &values, set_depth, |o| o == Outcome::OptimumFound)?;
            header.derived.push(("pilot_best_delta".into(), p.best_label));
            header.derived.push(("pilot_median_generations".into(), p.median.to_string()));
            p.budget
        }
    };
    header.derived.push(("budget_generations".into(), budget.to_string()));

    let master = spec.master_seed()?;
    let reps = spec.replicates()?;
    let mut configs = Vec::new();
    for (axis, &(_, x)) in values.iter().enumerate() {
        for i in 0..reps {
            let mut cfg = spec.ma_config(&instance, child_seed(master, axis as u64 * reps + i))?;
            set_depth(&mut cfg, &x);
            cfg.budget.max_generations = Some(budget);
            configs.push((i, cfg));
        }
    }
    let rows = run_all(&instance, configs)?;
    let summary = sweep_summary(&rows, "delta", |r| format_depth(r.record.config_echo.depth));
    let mut files = run_files(&header, &rows, format);
    files.push(header.csv_file("summary.csv", &summary_csv(&summary)));
    Ok(CommandOutput::success(files, &header))
}

/// Sanity conditions on (delta, tau) carried over from the asymptotic
/// analysis; violations are reported, not enforced.
pub fn race_warnings(delta: u64, taus: &[u64], n: usize) -> Vec<String> {
    let mut w = Vec::new();
    if delta < 36 {
        w.push(format!("delta = {} is below 36", format_depth(delta)));
    }
    for &tau in taus {
        if (delta as f64) / (tau as f64) < 2.0 / n as f64 {
            w.push(format!("delta/tau = {}/{tau} is below 2/n = 2/{n}", format_depth(delta)));
        }
    }
    w
}

pub fn cmd_sweep_tau(spec: &Spec, format: Format) -> Result<CommandOutput, ExperimentError> {
    if !matches!(spec.function_kind()?, FunctionKind::Race(_)) {
        return Err(ExperimentError::Config("sweep-tau needs function = race_con or race_uncon".into()));
    }
    let mu: usize = spec.parse_num("mu")?;
    let lambda: usize = spec.parse_num("lambda")?;
    if (mu, lambda) != (1, 1) {
        return Err(ExperimentError::Config("sweep-tau needs mu = lambda = 1".into()));
    }
    let taus: Vec<u64> = spec.list("tau_values")?;
    if taus.is_empty() || taus.contains(&0) {
        return Err(ExperimentError::Config("sweep-tau needs positive tau_values".into()));
    }
    let instances = [RaceVariant::Con, RaceVariant::Uncon]
        .map(|v| spec.race_params(v).and_then(|p| Ok(Instance::Race(RaceFn::new(p)?))));
    let [con, uncon] = instances;
    let (con, uncon) = (con?, uncon?);
    let probe = spec.ma_config(&con, 0)?;

    let mut header = Header::new("sweep-tau", spec);
    header.warnings = race_warnings(probe.depth, &taus, con.dim());
    let values: Vec<(String, u64)> = taus.iter().map(|&t| (t.to_string(), t)).collect();
    let set_tau = |cfg: &mut MaConfig, &t: &u64| cfg.schedule = LsSchedule::EveryTau(t);
    let budget = match spec.optional_num::<u64>("max_generations")? {
        Some(b) => b,
        None => {
            let p = pilot(spec, &con, &values, set_tau, |o| o != Outcome::BudgetExhausted)?;
            header.derived.push(("pilot_best_tau".into(), p.best_label));
            header.derived.push(("pilot_median_generations".into(), p.median.to_string()));
            p.budget
        }
    };
    header.derived.push(("budget_generations".into(), budget.to_string()));

    let master = spec.master_seed()?;
    let reps = spec.replicates()?;
    let mut rows = Vec::new();
    for (axis, &(_, t)) in values.iter().enumerate() {
        for instance in [&con, &uncon] {
            let configs = (0..reps)
                .map(|i| {
                    let mut cfg = spec.ma_config(instance, child_seed(master, axis as u64 * reps + i))?;
                    set_tau(&mut cfg, &t);
                    cfg.budget.max_generations = Some(budget);
                    Ok((i, cfg))
                })
                .collect::<Result<Vec<_>, ExperimentError>>()?;
            rows.extend(run_all(instance, configs)?);
        }
    }
    let summary = sweep_summary(&rows, "tau", |r| match r.record.config_echo.schedule {
        LsSchedule::EveryTau(t) => t.to_string(),
        _ => unreachable!("sweep-tau only runs every_tau schedules"),
    });
    let mut files = run_files(&header, &rows, format);
    files.push(header.csv_file("summary.csv", &summary_csv(&summary)));
    Ok(CommandOutput::success(files, &header))
}

/// Which path reached its end first, given the variant and outcome.
pub fn connected_won(variant: RaceVariant, outcome: Outcome) -> Option<bool> {
    match (variant, outcome) {
        (_, Outcome::BudgetExhausted) => None,
        (RaceVariant::Con, o) => Some(o == Outcome::OptimumFound),
        (RaceVariant::Uncon, o) => Some(o == Outcome::Trapped),
    }
}

/// Fraction of `reps` runs of the (1+1) MA on `Race^con` in which the
/// connected path wins. Replicate `i` uses seed `child_seed(master, i)` for
/// every candidate, so candidates are compared on common random numbers.
pub fn connected_win_rate(
    spec: &Spec,
    params: RaceParams,
    tau: u64,
    reps: u64,
    max_generations: u64,
) -> Result<f64, ExperimentError> {
    let f = Instance::Race(RaceFn::new(RaceParams { variant: RaceVariant::Con, ..params })?);
    let master = spec.master_seed()?;
    let start_con: usize = spec.parse_num("race_start_con")?;
    let start_unc: usize = spec.parse_num("race_start_unc")?;
    let Instance::Race(race) = &f else { unreachable!() };
    let start = race
        .point(start_con.min(params.l_con), start_unc.min(params.l_unc))
        .expect("clamped start is valid");
    let wins: u64 = (0..reps)
        .into_par_iter()
        .map(|i| -> Result<u64, ExperimentError> {
            let mut cfg = spec.ma_config(&f, child_seed(master, i))?;
            cfg.mu = 1;
            cfg.lambda = 1;
            cfg.schedule = LsSchedule::EveryTau(tau);
            cfg.init = crate::engine::InitStrategy::CopiesOf(start.clone());
            cfg.budget.max_generations = Some(max_generations);
            let r = run(&cfg, &f)?;
            Ok(u64::from(connected_won(RaceVariant::Con, r.outcome) == Some(true)))
        })
        .sum::<Result<u64, _>>()?;
    Ok(wins as f64 / reps.max(1) as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationPoint {
    pub l_con: usize,
    pub l_unc: usize,
    pub p_tau: f64,
    pub p_2tau: f64,
}

impl CalibrationPoint {
    /// Positive iff both targets hold.
    fn margin(&self, high: f64, low: f64) -> f64 {
        (self.p_tau - high).min(low - self.p_2tau)
    }
}

pub fn cmd_race_calibrate(spec: &Spec) -> Result<CommandOutput, ExperimentError> {
    let half_dim: usize = spec.parse_num("half_dim")?;
    let base = spec.race_params(RaceVariant::Con)?;
    let path = build_long_k_path(half_dim, base.k)?;
    let path_len = path.len();
    let probe = spec.ma_config(&Instance::Race(RaceFn::with_path(base, path)?), 0)?;
    let LsSchedule::EveryTau(tau) = probe.schedule else {
        return Err(ExperimentError::Config("race-calibrate needs schedule = every_tau".into()));
    };
    let reps = spec.replicates()?;
    let high: f64 = spec.parse_num("calib_high")?;
    let low: f64 = spec.parse_num("calib_low")?;
    let cap: u64 = spec.parse_num("calib_max_generations")?;
    let mut grid: Vec<usize> = if spec.get("calib_l_con") == "auto" {
        (1..=4).map(|q| ((path_len - 1) * q / 4).max(1)).collect()
    } else {
        spec.list("calib_l_con")?
    };
    grid.dedup();
    let max_unc = spec.auto_num("calib_l_unc_max")?.unwrap_or((path_len - 1) / 3);
    if grid.iter().any(|&l| l >= path_len) || 3 * max_unc >= path_len || max_unc == 0 {
        return Err(ExperimentError::Config(format!(
            "calibration range outside the path of length {path_len}"
        )));
    }

    let mut header = Header::new("race-calibrate", spec);
    header.warnings = race_warnings(probe.depth, &[tau, 2 * tau], 2 * half_dim);
    let mut points: Vec<CalibrationPoint> = Vec::new();
    let mut evaluate = |l_con: usize, l_unc: usize| -> Result<CalibrationPoint, ExperimentError> {
        if let Some(p) = points.iter().find(|p| p.l_con == l_con && p.l_unc == l_unc) {
            return Ok(p.clone());
        }
        let params = RaceParams { l_con, l_unc, ..base };
        let p = CalibrationPoint {
            l_con,
            l_unc,
            p_tau: connected_win_rate(spec, params, tau, reps, cap)?,
            p_2tau: connected_win_rate(spec, params, 2 * tau, reps, cap)?,
        };
        points.push(p.clone());
        Ok(p)
    };

    // The connected path wins more often as the unconnected one grows, so
    // the smallest l_unc reaching `high` at tau leaves the most room at 2 tau.
    let mut found = None;
    for &l_con in &grid {
        let top = evaluate(l_con, max_unc)?;
        if top.p_tau < high {
            continue;
        }
        let (mut lo, mut hi) = (1usize, max_unc);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if evaluate(l_con, mid)?.p_tau >= high {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let p = evaluate(l_con, hi)?;
        if p.p_2tau <= low {
            found = Some(p);
            break;
        }
    }

    let mut body = String::from("l_con,l_unc,p_con_tau,p_con_2tau,feasible\n");
    for p in &points {
        let _ = writeln!(body, "{},{},{},{},{}", p.l_con, p.l_unc, p.p_tau, p.p_2tau, p.margin(high, low) >= 0.0);
    }
    let (status, chosen) = match found {
        Some(p) => (Status::Success, p),
        None => {
            let best = points
                .iter()
                .max_by(|a, b| a.margin(high, low).total_cmp(&b.margin(high, low)))
                .cloned()
                .expect("at least one point was evaluated");
            (Status::Infeasible, best)
        }
    };
    let prefix = if status == Status::Success { "calibrated" } else { "best" };
    for (k, v) in [
        ("l_con", chosen.l_con.to_string()),
        ("l_unc", chosen.l_unc.to_string()),
        ("p_con_tau", chosen.p_tau.to_string()),
        ("p_con_2tau", chosen.p_2tau.to_string()),
    ] {
        header.derived.push((format!("{prefix}_{k}"), v));
    }
    let mut messages: Vec<String> = header.warnings.iter().map(|w| format!("warning: {w}")).collect();
    messages.push(format!(
        "{}: l_con = {}, l_unc = {}, P(connected wins | tau = {tau}) = {}, P(connected wins | 2 tau) = {}",
        if status == Status::Success { "calibrated" } else { "infeasible, best pair" },
        chosen.l_con,
        chosen.l_unc,
        chosen.p_tau,
        chosen.p_2tau
    ));
    Ok(CommandOutput {
        files: vec![header.csv_file("calibration.csv", &body)],
        status,
        messages,
    })
}

pub fn cmd_stategraph(spec: &Spec) -> Result<CommandOutput, ExperimentError> {
    let instance = spec.instance()?;
    let analyses: Vec<String> = spec.list("analyses")?;
    const KNOWN: &[&str] = &["sinks", "longest_path", "trajectories", "autocorrelation", "dot"];
    if let Some(bad) = analyses.iter().find(|a| !KNOWN.contains(&a.as_str())) {
        return Err(ExperimentError::Config(format!("unknown analysis {bad}")));
    }
    let wants = |a: &str| analyses.iter().any(|x| x == a);
    let limit: usize = spec.parse_num("exhaustive_limit")?;
    let master = spec.master_seed()?;
    let mut header = Header::new("stategraph", spec);
    let mut bodies: Vec<(&str, String)> = Vec::new();

    if wants("sinks") || wants("longest_path") || wants("dot") {
        let g = build_state_graph_with_limit(&instance, limit)?;
        header.derived.push(("edges".into(), g.edge_count().to_string()));
        if wants("sinks") {
            header.derived.push(("sinks".into(), g.sink_indices().len().to_string()));
            bodies.push(("sinks.csv", sinks_csv(&g)));
        }
        if wants("longest_path") {
            let lp = longest_improving_path(&g);
            header.derived.push(("longest_path_length".into(), lp.length.to_string()));
            let mut s = String::from("step,point,fitness\n");
            for (i, x) in lp.witness.iter().enumerate() {
                let _ = writeln!(s, "{i},{x},{}", instance.evaluate(x));
            }
            bodies.push(("longest_path.csv", s));
        }
        if wants("dot") {
            if g.dim() > DOT_LIMIT {
                return Err(ExperimentError::Config(format!("dot export needs dim <= {DOT_LIMIT}")));
            }
            bodies.push(("graph.dot", g.to_dot()?));
        }
    }
    if wants("trajectories") {
        let pivot = spec.ma_config(&instance, 0)?.pivot;
        let samples: usize = spec.parse_num("trajectory_samples")?;
        let mut rng = RngStream::child(master, 0);
        let rows = pivot_trajectory_stats(&instance, pivot, &mut rng, samples, limit)?;
        bodies.push(("trajectories.csv", trajectories_csv(&rows)));
    }
    if wants("autocorrelation") {
        let mut rng = RngStream::child(master, 1);
        let a = autocorrelation_with_burn_in(
            &instance,
            spec.parse_num("walk_length")?,
            spec.parse_num("max_lag")?,
            spec.parse_num("burn_in")?,
            &mut rng,
        )?;
        let ell = a.correlation_length.map_or("undefined".to_string(), |v| v.to_string());
        header.derived.push(("correlation_length".into(), ell));
        bodies.push(("autocorrelation.csv", autocorrelation_csv(&a)));
    }
    let files = bodies.into_iter().map(|(name, body)| header.csv_file(name, &body)).collect();
    Ok(CommandOutput::success(files, &header))
}

pub fn cmd_verify_paths(spec: &Spec) -> Result<CommandOutput, ExperimentError> {
    let ks: Vec<usize> = spec.list("path_ks")?;
    let max_dim: usize = spec.parse_num("max_path_dim")?;
    let header = Header::new("verify-paths", spec);
    let mut body = String::from(
        "k,dim,length,expected_length,duplicate_points,adjacency_violations,shortcut_violations,start_violation,ok\n",
    );
    let mut all_ok = true;
    for &k in &ks {
        if k == 0 {
            return Err(ExperimentError::Config("path_ks must be positive".into()));
        }
        for dim in (1..=max_dim).step_by(k) {
            let r = build_long_k_path(dim, k)?.verify();
            all_ok &= r.ok();
            let _ = writeln!(
                body,
                "{k},{dim},{},{},{},{},{},{},{}",
                r.length,
                r.expected_length,
                r.duplicate_points,
                r.adjacency_violations,
                r.shortcut_violations,
                r.start_violation,
                r.ok()
            );
        }
    }
    let mut out = CommandOutput::success(vec![header.csv_file("paths.csv", &body)], &header);
    if !all_ok {
        out.status = Status::InvariantViolation;
        out.messages.push("path verification found violations".into());
    }
    Ok(out)
}
