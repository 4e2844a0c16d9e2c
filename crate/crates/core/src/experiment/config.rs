//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment line. Every key has a
//! default, unknown keys are errors, and later assignments override earlier
//! ones. Output headers written by the commands parse back into the same
//! spec, so any output file can be handed to `--config` to rerun it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bitstring::BitString;
use crate::engine::{Budget, InitStrategy, LsSchedule, MaConfig};
use crate::fitness::Fitness;
use crate::functions::{
    FitnessFunction, LongPathFn, OneMax, RaceFn, RaceParams, RaceVariant, SectionedPathFn,
    SectionedPathParams,
};
use crate::localsearch::{PivotRule, UNBOUNDED};

use super::ExperimentError;

/// `(key, default, description)` for every accepted key, in echo order.
pub const SCHEMA: &[(&str, &str, &str)] = &[
    ("function", "onemax", "onemax | longpath | f_d | race_con | race_uncon"),
    ("dim", "20", "string length for onemax, longpath and f_d"),
    ("k", "auto", "path parameter; auto is 2 for longpath, 3 for f_d, 4 for races"),
    ("fd_depth", "8", "f_d: depth D that lands next to a target"),
    ("fd_gap", "3", "f_d: gap l between D and the section end"),
    ("fd_sections", "4", "f_d: number of sections S"),
    ("half_dim", "13", "race: bits per half"),
    ("l_con", "20", "race: connected path length"),
    ("l_unc", "10", "race: number of peaks on the unconnected path"),
    ("weight", "auto", "race: connected path weight; auto is the total dimension"),
    ("race_start_con", "0", "race: initial connected position"),
    ("race_start_unc", "0", "race: initial peak index"),
    ("mu", "1", "parent population size"),
    ("lambda", "1", "offspring per generation"),
    ("p_m", "auto", "mutation probability; auto is 1/n"),
    ("schedule", "every_tau", "every_tau | probability | never"),
    ("tau", "1", "local search period for every_tau"),
    ("p_ls", "1", "per-offspring local search probability for probability"),
    ("delta", "0", "local search depth, a number or inf"),
    ("pivot", "first", "first | first_shuffled | steepest | random"),
    ("init", "auto", "uniform | path_start | race_start | zeros | bits:<01...>; auto picks per function"),
    ("max_generations", "none", "generation budget; in sweeps none means pilot-derived"),
    ("max_evaluations", "none", "evaluation budget"),
    ("replicates", "10", "replicates per configuration"),
    ("master_seed", "0", "seed from which every replicate seed is derived"),
    ("delta_values", "none", "sweep-delta: comma-separated depths"),
    ("tau_values", "none", "sweep-tau: comma-separated periods"),
    ("pilot_replicates", "20", "sweeps: replicates per value in the pilot phase"),
    ("pilot_max_generations", "1000000", "sweeps: generation cap of pilot runs"),
    ("budget_factor", "10", "sweeps: budget = factor x pilot median generations"),
    ("analyses", "sinks,longest_path", "stategraph: sinks, longest_path, trajectories, autocorrelation, dot"),
    ("walk_length", "100000", "stategraph: random walk length"),
    ("max_lag", "10", "stategraph: largest autocorrelation lag"),
    ("burn_in", "1000", "stategraph: random walk steps discarded first"),
    ("trajectory_samples", "20", "stategraph: samples per start for randomized pivots"),
    ("exhaustive_limit", "20", "stategraph: largest dimension analysed exhaustively"),
    ("path_ks", "2,3", "verify-paths: values of k"),
    ("max_path_dim", "13", "verify-paths: largest dimension"),
    ("calib_l_con", "auto", "race-calibrate: connected lengths for the coarse grid"),
    ("calib_l_unc_max", "auto", "race-calibrate: largest peak count searched"),
    ("calib_high", "0.9", "race-calibrate: required connected-win rate at tau"),
    ("calib_low", "0.1", "race-calibrate: allowed connected-win rate at 2 tau"),
    ("calib_max_generations", "1000000", "race-calibrate: generation cap per run"),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spec {
    values: BTreeMap<String, String>,
}

impl Default for Spec {
    fn default() -> Self {
        Self {
            values: SCHEMA
                .iter()
                .map(|(k, v, _)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }
}

fn default_of(key: &str) -> Option<&'static str> {
    SCHEMA.iter().find(|(k, _, _)| *k == key).map(|(_, v, _)| *v)
}

fn split_assignment(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    Some((k.trim(), v.trim()))
}

impl Spec {
    /// Parses a config file, or the header of a CSV, DOT or JSON-lines output.
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut spec = Spec::default();
        spec.merge_text(text)?;
        Ok(spec)
    }

    pub fn merge_text(&mut self, text: &str) -> Result<(), ExperimentError> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            return self.merge_json_header(trimmed.lines().next().unwrap_or(""));
        }
        if trimmed.starts_with("# memlab") {
            return self.merge_comment_header(trimmed);
        }
        let mut unknown = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = split_assignment(line).ok_or_else(|| {
                ExperimentError::Config(format!("line {}: expected key = value, got {line:?}", n + 1))
            })?;
            if default_of(k).is_none() {
                unknown.push(k.to_string());
                continue;
            }
            self.values.insert(k.to_string(), v.to_string());
        }
        if !unknown.is_empty() {
            return Err(ExperimentError::Config(format!("unknown keys: {}", unknown.join(", "))));
        }
        Ok(())
    }

    fn merge_comment_header(&mut self, text: &str) -> Result<(), ExperimentError> {
        let mut body = String::new();
        for line in text.lines().skip(1) {
            let Some(rest) = line.strip_prefix('#') else { break };
            let rest = rest.trim();
            match split_assignment(rest) {
                Some((k, _)) if k == "command" || k.starts_with("derived.") || k == "warning" => {}
                Some(_) => {
                    body.push_str(rest);
                    body.push('\n');
                }
                None => {}
            }
        }
        self.merge_text(&body)
    }

    fn merge_json_header(&mut self, line: &str) -> Result<(), ExperimentError> {
        let v: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| ExperimentError::Config(format!("bad JSON header: {e}")))?;
        let spec = v
            .get("spec")
            .and_then(|s| s.as_object())
            .ok_or_else(|| ExperimentError::Config("JSON header has no spec object".into()))?;
        let mut body = String::new();
        for (k, val) in spec {
            let val = val
                .as_str()
                .ok_or_else(|| ExperimentError::Config(format!("spec value for {k} is not a string")))?;
            let _ = writeln!(body, "{k} = {val}");
        }
        self.merge_text(&body)
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), ExperimentError> {
        let (k, v) = split_assignment(assignment)
            .ok_or_else(|| ExperimentError::Config(format!("expected KEY=VALUE, got {assignment:?}")))?;
        self.set_value(k, v)
    }

    pub fn set_value(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        if default_of(key).is_none() {
            return Err(ExperimentError::Config(format!("unknown keys: {key}")));
        }
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("key {key} missing from schema"))
    }

    /// All keys in schema order with their current values.
    pub fn entries(&self) -> impl Iterator<Item = (&'static str, &str)> + '_ {
        SCHEMA.iter().map(|(k, _, _)| (*k, self.get(k)))
    }

    fn bad(&self, key: &str, what: &str) -> ExperimentError {
        ExperimentError::Config(format!("{key} = {:?}: {what}", self.get(key)))
    }

    pub fn parse_num<T: std::str::FromStr>(&self, key: &str) -> Result<T, ExperimentError> {
        self.get(key).parse().map_err(|_| self.bad(key, "not a valid number"))
    }

    /// `None` for `none`.
    pub fn optional_num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ExperimentError> {
        match self.get(key) {
            "none" => Ok(None),
            _ => self.parse_num(key).map(Some),
        }
    }

    /// `None` for `auto`.
    pub fn auto_num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ExperimentError> {
        match self.get(key) {
            "auto" => Ok(None),
            _ => self.parse_num(key).map(Some),
        }
    }

    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>, ExperimentError> {
        let raw = self.get(key);
        if raw == "none" || raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| s.trim().parse().map_err(|_| self.bad(key, "not a comma-separated list")))
            .collect()
    }

    pub fn depth_list(&self, key: &str) -> Result<Vec<u64>, ExperimentError> {
        let raw = self.get(key);
        if raw == "none" || raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| parse_depth(s.trim()).ok_or_else(|| self.bad(key, "not a list of depths")))
            .collect()
    }

    pub fn replicates(&self) -> Result<u64, ExperimentError> {
        self.parse_num("replicates")
    }

    pub fn master_seed(&self) -> Result<u64, ExperimentError> {
        self.parse_num("master_seed")
    }

    pub fn function_kind(&self) -> Result<FunctionKind, ExperimentError> {
        FunctionKind::from_name(self.get("function"))
            .ok_or_else(|| self.bad("function", "expected onemax, longpath, f_d, race_con or race_uncon"))
    }

    fn path_k(&self, kind: FunctionKind) -> Result<usize, ExperimentError> {
        let default = match kind {
            FunctionKind::OneMax | FunctionKind::LongPath => 2,
            FunctionKind::Sectioned => 3,
            FunctionKind::Race(_) => 4,
        };
        Ok(self.auto_num("k")?.unwrap_or(default))
    }

    pub fn sectioned_params(&self) -> Result<SectionedPathParams, ExperimentError> {
        Ok(SectionedPathParams {
            dim: self.parse_num("dim")?,
            k: self.path_k(FunctionKind::Sectioned)?,
            depth: self.parse_num("fd_depth")?,
            gap: self.parse_num("fd_gap")?,
            sections: self.parse_num("fd_sections")?,
        })
    }

    pub fn race_params(&self, variant: RaceVariant) -> Result<RaceParams, ExperimentError> {
        Ok(RaceParams {
            half_dim: self.parse_num("half_dim")?,
            k: self.path_k(FunctionKind::Race(variant))?,
            l_con: self.parse_num("l_con")?,
            l_unc: self.parse_num("l_unc")?,
            weight: self.auto_num("weight")?,
            variant,
        })
    }

    /// Builds the configured fitness function.
    pub fn instance(&self) -> Result<Instance, ExperimentError> {
        let kind = self.function_kind()?;
        if kind == FunctionKind::LongPath && self.path_k(kind)? != 2 {
            return Err(self.bad("k", "longpath uses k = 2"));
        }
        Ok(match kind {
            FunctionKind::OneMax => Instance::OneMax(OneMax::new(self.parse_num("dim")?)),
            FunctionKind::LongPath => Instance::LongPath(LongPathFn::new(self.parse_num("dim")?)?),
            FunctionKind::Sectioned => Instance::Sectioned(SectionedPathFn::new(self.sectioned_params()?)?),
            FunctionKind::Race(v) => Instance::Race(RaceFn::new(self.race_params(v)?)?),
        })
    }

    /// Engine configuration for `instance` with the given seed.
    pub fn ma_config(&self, instance: &Instance, seed: u64) -> Result<MaConfig, ExperimentError> {
        let n = instance.dim();
        let schedule = match self.get("schedule") {
            "every_tau" => LsSchedule::EveryTau(self.parse_num("tau")?),
            "probability" => LsSchedule::Probability(self.parse_num("p_ls")?),
            "never" => LsSchedule::Never,
            _ => return Err(self.bad("schedule", "expected every_tau, probability or never")),
        };
        let depth = parse_depth(self.get("delta")).ok_or_else(|| self.bad("delta", "expected a number or inf"))?;
        let pivot = PivotRule::from_name(self.get("pivot"))
            .ok_or_else(|| self.bad("pivot", "expected first, first_shuffled, steepest or random"))?;
        let config = MaConfig {
            n,
            mu: self.parse_num("mu")?,
            lambda: self.parse_num("lambda")?,
            p_m: self.auto_num("p_m")?,
            schedule,
            depth,
            pivot,
            init: self.init(instance)?,
            budget: Budget {
                max_generations: self.optional_num("max_generations")?,
                max_evaluations: self.optional_num("max_evaluations")?,
            },
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    fn init(&self, instance: &Instance) -> Result<InitStrategy, ExperimentError> {
        let n = instance.dim();
        let raw = self.get("init");
        let choice = if raw == "auto" {
            match instance {
                Instance::OneMax(_) | Instance::LongPath(_) => "uniform",
                Instance::Sectioned(_) => "path_start",
                Instance::Race(_) => "race_start",
            }
        } else {
            raw
        };
        Ok(match choice {
            "uniform" => InitStrategy::UniformRandom,
            "zeros" => InitStrategy::CopiesOf(BitString::zeros(n)),
            "path_start" => match instance {
                Instance::LongPath(f) => InitStrategy::CopiesOf(f.path().points()[0].clone()),
                Instance::Sectioned(f) => InitStrategy::CopiesOf(f.path_start().clone()),
                Instance::Race(f) => InitStrategy::CopiesOf(f.point(0, 0).expect("origin is valid")),
                Instance::OneMax(_) => return Err(self.bad("init", "onemax has no path")),
            },
            "race_start" => {
                let Instance::Race(f) = instance else {
                    return Err(self.bad("init", "race_start needs a race function"));
                };
                let (c, u) = (self.parse_num("race_start_con")?, self.parse_num("race_start_unc")?);
                InitStrategy::CopiesOf(
                    f.point(c, u)
                        .ok_or_else(|| self.bad("race_start_con", "start position outside the race paths"))?,
                )
            }
            other => match other.strip_prefix("bits:") {
                Some(bits) => {
                    let x: BitString = bits.parse().map_err(|_| self.bad("init", "invalid bit string"))?;
                    if x.len() != n {
                        return Err(self.bad("init", &format!("needs {n} bits")));
                    }
                    InitStrategy::CopiesOf(x)
                }
                None => return Err(self.bad("init", "unknown initialization")),
            },
        })
    }
}

/// Parses a local search depth; `inf` means unbounded.
pub fn parse_depth(s: &str) -> Option<u64> {
    match s {
        "inf" => Some(UNBOUNDED),
        _ => s.parse().ok(),
    }
}

pub fn format_depth(d: u64) -> String {
    if d == UNBOUNDED {
        "inf".into()
    } else {
        d.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionKind {
    OneMax,
    LongPath,
    Sectioned,
    Race(RaceVariant),
}

impl FunctionKind {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "onemax" => Self::OneMax,
            "longpath" => Self::LongPath,
            "f_d" => Self::Sectioned,
            "race_con" => Self::Race(RaceVariant::Con),
            "race_uncon" => Self::Race(RaceVariant::Uncon),
            _ => return None,
        })
    }
}

/// A constructed benchmark function.
#[derive(Clone, Debug)]
pub enum Instance {
    OneMax(OneMax),
    LongPath(LongPathFn),
    Sectioned(SectionedPathFn),
    Race(RaceFn),
}

impl Instance {
    pub fn function(&self) -> &dyn FitnessFunction {
        match self {
            Instance::OneMax(f) => f,
            Instance::LongPath(f) => f,
            Instance::Sectioned(f) => f,
            Instance::Race(f) => f,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Instance::OneMax(_) => "onemax",
            Instance::LongPath(_) => "longpath",
            Instance::Sectioned(_) => "f_d",
            Instance::Race(f) => f.params().variant.name(),
        }
    }

    /// `con` or `uncon` for races, `-` otherwise.
    pub fn variant(&self) -> &'static str {
        match self {
            Instance::Race(f) => match f.params().variant {
                RaceVariant::Con => "con",
                RaceVariant::Uncon => "uncon",
            },
            _ => "-",
        }
    }
}

impl FitnessFunction for Instance {
    fn dim(&self) -> usize {
        self.function().dim()
    }

    fn evaluate(&self, x: &BitString) -> Fitness {
        self.function().evaluate(x)
    }

    fn is_global_optimum(&self, x: &BitString) -> bool {
        self.function().is_global_optimum(x)
    }

    fn classify(&self, x: &BitString) -> crate::functions::Classification {
        self.function().classify(x)
    }

    fn metadata(&self) -> String {
        self.function().metadata()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_cover_schema() {
        let s = Spec::default();
        assert_eq!(s.entries().count(), SCHEMA.len());
        assert_eq!(s.get("function"), "onemax");
    }

    #[test]
    fn parses_comments_and_overrides() {
        let mut s = Spec::parse("# a comment\nfunction = longpath\n\ndim = 9\n").unwrap();
        assert_eq!(s.get("function"), "longpath");
        s.set("dim=11").unwrap();
        assert_eq!(s.parse_num::<usize>("dim").unwrap(), 11);
    }

    #[test]
    fn unknown_keys_are_listed() {
        let err = Spec::parse("dimm = 3\nfunction = onemax\ntua = 4\n").unwrap_err();
        assert_eq!(err, ExperimentError::Config("unknown keys: dimm, tua".into()));
        assert!(Spec::default().set("nope=1").is_err());
        assert!(Spec::parse("just text\n").is_err());
    }

    #[test]
    fn depth_parsing() {
        assert_eq!(parse_depth("inf"), Some(UNBOUNDED));
        assert_eq!(parse_depth("12"), Some(12));
        assert_eq!(parse_depth("x"), None);
        assert_eq!(format_depth(UNBOUNDED), "inf");
        let s = Spec::parse("delta_values = 3, 8,inf").unwrap();
        assert_eq!(s.depth_list("delta_values").unwrap(), vec![3, 8, UNBOUNDED]);
    }

    #[test]
    fn builds_instances_and_configs() {
        let s = Spec::parse("function = race_uncon\nhalf_dim = 13\nl_con = 10\nl_unc = 5\nrace_start_unc = 2\n").unwrap();
        let inst = s.instance().unwrap();
        assert_eq!(inst.name(), "race_uncon");
        assert_eq!(inst.variant(), "uncon");
        let cfg = s.ma_config(&inst, 9).unwrap();
        let Instance::Race(f) = &inst else { unreachable!() };
        assert_eq!(cfg.init, InitStrategy::CopiesOf(f.point(0, 2).unwrap()));
        assert_eq!(cfg.n, 26);

        let s = Spec::parse("function = onemax\ndim = 4\ninit = bits:0101\ndelta = inf\n").unwrap();
        let inst = s.instance().unwrap();
        let cfg = s.ma_config(&inst, 0).unwrap();
        assert_eq!(cfg.depth, UNBOUNDED);
        assert_eq!(cfg.init, InitStrategy::CopiesOf("0101".parse().unwrap()));

        let s = Spec::parse("function = onemax\ndim = 4\ninit = bits:01\n").unwrap();
        assert!(s.ma_config(&s.instance().unwrap(), 0).is_err());
        let s = Spec::parse("function = longpath\ndim = 5\nk = 3\n").unwrap();
        assert!(s.instance().is_err());
        let s = Spec::parse("function = nothing\n").unwrap();
        assert!(s.instance().is_err());
    }
}
