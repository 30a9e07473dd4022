//! Experiment configs and the drivers behind the `gevrey-kam` binary.
//!
//! A config is flat `key = value` text, `#` starts a comment. Keys are checked
//! against a typed schema for the chosen command before anything runs.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::aubry_duality::{covariance_defect, dual_eigenfunction, good_eigenfunction_test};
use crate::cantor_toolkit::{
    component_report, gamma, middle_thirds_integer, newhouse_check, pipeline_verdict, set_component, sumset, thickness,
    IntervalUnion,
};
use crate::cocycle_dynamics::{golden, silver};
use crate::error::{Error, Result};
use crate::gevrey_fourier::{FrequencyLattice, GevreyParams, Idx, MatSeries, ScalarSeries};
use crate::kam_engine::{
    almost_reduce, reduce_diophantine, reduce_rational, Dioph, KamControls, ReduceParams, TraceStatus,
};
use crate::lie_algebra::Mat2;
use crate::spectral_analysis::{find_gaps, schrodinger_constant, verify_gap_decay, ScanControls, SchrodingerProblem};
use crate::VERSION;

pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Reduce,
    Gaps,
    Interval,
    Duality,
    Thickness,
    Sumset,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Reduce, Command::Gaps, Command::Interval, Command::Duality, Command::Thickness, Command::Sumset];

    pub fn name(self) -> &'static str {
        match self {
            Command::Reduce => "reduce",
            Command::Gaps => "gaps",
            Command::Interval => "interval",
            Command::Duality => "duality",
            Command::Thickness => "thickness",
            Command::Sumset => "sumset",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::Config(format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Positive,
    Real,
    Count,
    Flag,
    Alpha,
    Potential,
    Ints,
    Set,
    Choice(&'static [&'static str]),
}

use Command::*;

const KAM: &[Command] = &[Reduce, Duality];
const OPERATOR: &[Command] = &[Reduce, Gaps, Duality];
const SCAN: &[Command] = &[Gaps, Interval];
const GEVREY: &[Command] = &[Reduce, Gaps, Interval, Duality];
const ALL: &[Command] = &[Reduce, Gaps, Interval, Duality, Thickness, Sumset];

/// Keys ending in `_#` take a positive integer suffix.
const SCHEMA: &[(&str, Kind, &[Command])] = &[
    ("seed", Kind::Count, ALL),
    ("alpha", Kind::Alpha, GEVREY),
    ("potential", Kind::Potential, OPERATOR),
    ("max_modes", Kind::Count, GEVREY),
    ("nu", Kind::Positive, GEVREY),
    ("r0", Kind::Positive, GEVREY),
    ("r", Kind::Positive, GEVREY),
    ("gamma", Kind::Positive, &[Reduce, Interval, Duality]),
    ("tau", Kind::Positive, &[Reduce, Interval, Duality]),
    ("n_iter", Kind::Count, GEVREY),
    ("energy", Kind::Real, KAM),
    ("mode", Kind::Choice(&["almost", "diophantine", "rational"]), &[Reduce]),
    ("preset", Kind::Choice(&["desk", "strict"]), KAM),
    ("max_steps", Kind::Count, KAM),
    ("kappa", Kind::Positive, KAM),
    ("k", Kind::Ints, &[Reduce]),
    ("residual_tol", Kind::Positive, KAM),
    ("k_max", Kind::Count, SCAN),
    ("label_tol", Kind::Positive, SCAN),
    ("edge_tol", Kind::Positive, SCAN),
    ("e_min", Kind::Real, SCAN),
    ("e_max", Kind::Real, SCAN),
    ("resolution_factor", Kind::Positive, SCAN),
    ("check_uh", Kind::Flag, SCAN),
    ("eps0", Kind::Positive, &[Gaps]),
    ("potential_#", Kind::Potential, &[Interval]),
    ("alpha_#", Kind::Alpha, &[Interval]),
    ("set_#", Kind::Set, &[Interval, Sumset]),
    ("lambda", Kind::Positive, &[Duality]),
    ("m_prime", Kind::Ints, &[Duality]),
    ("window", Kind::Count, &[Duality]),
    ("series_cap", Kind::Count, &[Duality]),
    ("goodness_c", Kind::Positive, &[Duality]),
    ("goodness_eps", Kind::Positive, &[Duality]),
    ("goodness_n", Kind::Positive, &[Duality]),
    ("set", Kind::Set, &[Thickness]),
    ("cantor_level", Kind::Count, &[Thickness]),
];

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn lookup(key: &str) -> Option<(&'static str, Kind, &'static [Command])> {
    if let Some(e) = SCHEMA.iter().find(|e| e.0 == key) {
        return Some(*e);
    }
    let (stem, idx) = key.rsplit_once('_')?;
    if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) || idx.starts_with('0') {
        return None;
    }
    SCHEMA.iter().find(|e| e.0.strip_suffix("_#") == Some(stem)).copied()
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| cfg_err(format!("{key}: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(cfg_err(format!("{key}: `{v}` is not finite")));
    }
    Ok(x)
}

fn parse_alpha(key: &str, v: &str) -> Result<Vec<f64>> {
    let out = v
        .split(',')
        .map(|s| match s.trim() {
            "golden" => Ok(golden()),
            "silver" => Ok(silver()),
            t => parse_f64(key, t),
        })
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() || out.len() > 3 {
        return Err(cfg_err(format!("{key}: dimension {} is not 1, 2 or 3", out.len())));
    }
    Ok(out)
}

fn parse_ints(key: &str, v: &str) -> Result<Vec<i64>> {
    let t = v.trim().trim_start_matches('[').trim_end_matches(']');
    t.split(',').map(|s| s.trim().parse().map_err(|_| cfg_err(format!("{key}: `{v}` is not an integer list")))).collect()
}

fn parse_set(key: &str, v: &str) -> Result<IntervalUnion> {
    let raw: Vec<[f64; 2]> = serde_json::from_str(v).map_err(|e| cfg_err(format!("{key}: {e}")))?;
    let raw: Vec<(f64, f64)> = raw.into_iter().map(|[a, b]| (a, b)).collect();
    IntervalUnion::canonicalize(&raw).map_err(|e| cfg_err(format!("{key}: {e}")))
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    Zero,
    Amo(f64),
    Rows(Vec<Vec<f64>>),
}

impl PotentialSpec {
    fn parse(key: &str, v: &str) -> Result<Self> {
        if v == "zero" {
            return Ok(PotentialSpec::Zero);
        }
        if let Some(l) = v.strip_prefix("amo:") {
            return Ok(PotentialSpec::Amo(parse_f64(key, l.trim())?));
        }
        let rows: Vec<Vec<f64>> = serde_json::from_str(v)
            .map_err(|_| cfg_err(format!("{key}: expected `zero`, `amo: LAMBDA` or a list of [k..., re, im] rows")))?;
        Ok(PotentialSpec::Rows(rows))
    }

    pub fn series(&self, d: usize) -> Result<ScalarSeries> {
        let lat = FrequencyLattice::torus(d);
        match self {
            PotentialSpec::Zero => Ok(ScalarSeries::zero(lat)),
            PotentialSpec::Amo(l) => Ok(ScalarSeries::cosine(lat, Idx::unit(0), *l)),
            PotentialSpec::Rows(rows) => ScalarSeries::from_rows(lat, rows),
        }
    }
}

fn check_value(key: &str, kind: Kind, v: &str) -> Result<()> {
    match kind {
        Kind::Positive => {
            if parse_f64(key, v)? <= 0.0 {
                return Err(cfg_err(format!("{key}: must be positive, got {v}")));
            }
        }
        Kind::Real => {
            parse_f64(key, v)?;
        }
        Kind::Count => {
            v.parse::<u64>().map_err(|_| cfg_err(format!("{key}: `{v}` is not a non-negative integer")))?;
        }
        Kind::Flag => {
            if v != "true" && v != "false" {
                return Err(cfg_err(format!("{key}: expected true or false, got `{v}`")));
            }
        }
        Kind::Alpha => {
            parse_alpha(key, v)?;
        }
        Kind::Potential => {
            PotentialSpec::parse(key, v)?;
        }
        Kind::Ints => {
            parse_ints(key, v)?;
        }
        Kind::Set => {
            parse_set(key, v)?;
        }
        Kind::Choice(opts) => {
            if !opts.contains(&v) {
                return Err(cfg_err(format!("{key}: `{v}` is not one of {}", opts.join(", "))));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Config {
    pub command: Command,
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(command: Command, text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| cfg_err(format!("line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            let (_, kind, cmds) = lookup(k).ok_or_else(|| cfg_err(format!("line {}: unknown key `{k}`", no + 1)))?;
            if !cmds.contains(&command) {
                return Err(cfg_err(format!("line {}: key `{k}` does not apply to `{}`", no + 1, command.name())));
            }
            if v.is_empty() {
                return Err(cfg_err(format!("line {}: empty value for `{k}`", no + 1)));
            }
            check_value(k, kind, v)?;
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(cfg_err(format!("line {}: duplicate key `{k}`", no + 1)));
            }
        }
        let cfg = Config { command, entries };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(command: Command, path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        Self::parse(command, &text)
    }

    /// SHA-256 over the command and the sorted `key=value` pairs.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.name().as_bytes());
        h.update(b"\n");
        for (k, v) in &self.entries {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        h.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn f64_or(&self, key: &str, default: f64) -> f64 {
        self.get(key).map_or(default, |v| v.parse().expect("validated"))
    }

    fn opt_f64(&self, key: &str) -> Option<f64> {
        self.get(key).map(|v| v.parse().expect("validated"))
    }

    fn u64_or(&self, key: &str, default: u64) -> u64 {
        self.get(key).map_or(default, |v| v.parse().expect("validated"))
    }

    fn flag_or(&self, key: &str, default: bool) -> bool {
        self.get(key).map_or(default, |v| v == "true")
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| cfg_err(format!("missing required key `{key}`")))
    }

    pub fn seed(&self) -> u64 {
        self.u64_or("seed", 7)
    }

    fn alpha_key(&self, key: &str) -> Result<Vec<f64>> {
        parse_alpha(key, self.require(key)?)
    }

    fn indices(&self, stem: &str) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .entries
            .keys()
            .filter_map(|k| k.strip_prefix(stem).and_then(|s| s.strip_prefix('_')).and_then(|s| s.parse().ok()))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn nu(&self) -> f64 {
        self.f64_or("nu", 0.5)
    }

    pub fn r0(&self) -> f64 {
        self.f64_or("r0", 0.5)
    }

    pub fn r(&self) -> f64 {
        self.f64_or("r", 0.5 * self.r0())
    }

    fn dioph(&self) -> Dioph {
        Dioph { gamma: self.f64_or("gamma", 0.1), tau: self.f64_or("tau", 2.0) }
    }

    fn validate(&self) -> Result<()> {
        let c = self.command;
        if GEVREY.contains(&c) {
            let (nu, r0, r) = (self.nu(), self.r0(), self.r());
            if nu > 1.0 {
                return Err(cfg_err(format!("nu = {nu} must lie in (0, 1]")));
            }
            if r >= r0 {
                return Err(cfg_err(format!("r = {r} must be smaller than r0 = {r0}")));
            }
        }
        if OPERATOR.contains(&c) {
            let d = self.alpha_key("alpha")?.len();
            self.potential_series("potential", d)?;
        }
        if KAM.contains(&c) {
            self.require("energy")?;
        }
        match c {
            Reduce => {
                if self.get("mode") == Some("rational") {
                    let k = parse_ints("k", self.require("k")?)?;
                    if k.len() != self.alpha_key("alpha")?.len() {
                        return Err(cfg_err("k must have one entry per frequency"));
                    }
                }
            }
            Gaps | Interval => {
                if let (Some(a), Some(b)) = (self.opt_f64("e_min"), self.opt_f64("e_max")) {
                    if a >= b {
                        return Err(cfg_err("e_min must be smaller than e_max"));
                    }
                }
                if c == Interval {
                    let comps = self.components()?;
                    if comps.len() < 2 {
                        return Err(cfg_err("interval needs at least two components"));
                    }
                }
            }
            Duality => {
                self.require("lambda")?;
                if let Some(m) = self.get("m_prime") {
                    if parse_ints("m_prime", m)?.len() != self.alpha_key("alpha")?.len() {
                        return Err(cfg_err("m_prime must have one entry per frequency"));
                    }
                }
            }
            Thickness => {
                if self.get("set").is_some() == self.get("cantor_level").is_some() {
                    return Err(cfg_err("thickness needs exactly one of `set` and `cantor_level`"));
                }
                if self.u64_or("cantor_level", 0) > 20 {
                    return Err(cfg_err("cantor_level must be at most 20"));
                }
            }
            Sumset => {
                if self.indices("set").len() < 2 {
                    return Err(cfg_err("sumset needs at least two `set_#` keys"));
                }
            }
        }
        Ok(())
    }

    fn potential_series(&self, key: &str, d: usize) -> Result<ScalarSeries> {
        let spec = PotentialSpec::parse(key, self.require(key)?)?;
        let v = spec.series(d).map_err(|e| cfg_err(format!("{key}: {e}")))?;
        let cap = self.u64_or("max_modes", 4096) as usize;
        if v.len() > cap {
            return Err(cfg_err(format!("{key}: {} modes exceed max_modes = {cap}", v.len())));
        }
        if !v.is_real(1e-12) {
            return Err(cfg_err(format!("{key}: potential is not real-valued")));
        }
        Ok(v)
    }

    fn components(&self) -> Result<Vec<Component>> {
        let mut idx = self.indices("potential");
        idx.extend(self.indices("set"));
        idx.extend(self.indices("alpha"));
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter()
            .map(|i| {
                let (pk, sk, ak) = (format!("potential_{i}"), format!("set_{i}"), format!("alpha_{i}"));
                match (self.get(&pk), self.get(&sk)) {
                    (Some(_), Some(_)) => Err(cfg_err(format!("component {i} has both `{pk}` and `{sk}`"))),
                    (None, Some(s)) => Ok(Component::Set(parse_set(&sk, s)?)),
                    (Some(_), None) => {
                        let alpha = if self.get(&ak).is_some() { self.alpha_key(&ak)? } else { self.alpha_key("alpha")? };
                        let v = self.potential_series(&pk, alpha.len())?;
                        Ok(Component::Operator(v, alpha))
                    }
                    (None, None) => Err(cfg_err(format!("component {i} needs `{pk}` or `{sk}`"))),
                }
            })
            .collect()
    }

    fn problem(&self, v: ScalarSeries, alpha: Vec<f64>) -> Result<SchrodingerProblem> {
        let p = GevreyParams::new(self.nu(), self.r0())?;
        SchrodingerProblem::new(v, alpha, p).map_err(|e| cfg_err(e.to_string()))
    }

    fn scan_controls(&self, prob: &SchrodingerProblem) -> ScanControls {
        let mut sc = ScanControls::for_problem(prob);
        sc.k_max = self.u64_or("k_max", sc.k_max as u64) as i64;
        sc.label_tol = self.f64_or("label_tol", sc.label_tol);
        sc.edge_tol = self.f64_or("edge_tol", sc.edge_tol);
        sc.n_iter = self.u64_or("n_iter", sc.n_iter as u64) as usize;
        sc.e_range = (self.f64_or("e_min", sc.e_range.0), self.f64_or("e_max", sc.e_range.1));
        sc.resolution_factor = self.f64_or("resolution_factor", sc.resolution_factor);
        sc.check_uh = self.flag_or("check_uh", sc.check_uh);
        sc
    }

    fn controls(&self) -> KamControls {
        let base = if self.get("preset") == Some("strict") { KamControls::default() } else { KamControls::desk() };
        KamControls { seed: self.seed(), ..base }
    }

    fn reduce_params(&self) -> ReduceParams {
        ReduceParams {
            nu: self.nu(),
            r0: self.r0(),
            r: self.r(),
            max_steps: self.u64_or("max_steps", 8) as usize,
            dioph: self.dioph(),
            n_iter: self.u64_or("n_iter", 200_000) as usize,
            controls: self.controls(),
        }
    }
}

enum Component {
    Operator(ScalarSeries, Vec<f64>),
    Set(IntervalUnion),
}

/// What a driver produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    /// name of the first failing contract
    pub failure: Option<String>,
}

fn meta(cfg: &Config) -> Value {
    json!({
        "command": cfg.command.name(),
        "config_hash": cfg.hash(),
        "version": VERSION,
        "seed": cfg.seed(),
        "rng": RNG_NAME,
    })
}

fn csv_header(cfg: &Config) -> String {
    format!("# gevrey-kam {VERSION} {} config_hash={} seed={} rng={RNG_NAME}\n", cfg.command.name(), cfg.hash(), cfg.seed())
}

fn write_json(dir: &Path, name: &str, cfg: &Config, body: Value) -> Result<PathBuf> {
    let mut obj = Map::new();
    obj.insert("meta".into(), meta(cfg));
    match body {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("result".into(), other);
        }
    }
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(&Value::Object(obj)).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn schrodinger_pair(v: &ScalarSeries, e: f64) -> (Mat2, MatSeries) {
    (schrodinger_constant(e), v.times_matrix(&Mat2::real(0.0, 0.0, 1.0, 0.0)))
}

/// Runs `cfg.command`, writing its outputs under `out`.
pub fn run(cfg: &Config, out: &Path) -> Result<Outcome> {
    fs::create_dir_all(out)?;
    match cfg.command {
        Reduce => cmd_reduce(cfg, out),
        Gaps => cmd_gaps(cfg, out),
        Interval => cmd_interval(cfg, out),
        Duality => cmd_duality(cfg, out),
        Thickness => cmd_thickness(cfg, out),
        Sumset => cmd_sumset(cfg, out),
    }
}

pub fn cmd_reduce(cfg: &Config, out: &Path) -> Result<Outcome> {
    let alpha = cfg.alpha_key("alpha")?;
    let v = cfg.potential_series("potential", alpha.len())?;
    let e = cfg.f64_or("energy", 0.0);
    let (a0, f0) = schrodinger_pair(&v, e);
    let params = cfg.reduce_params();
    let tol = cfg.f64_or("residual_tol", 1e-8);
    let mode = cfg.get("mode").unwrap_or("almost");
    let (body, failure, summary) = match mode {
        "almost" => {
            let tr = almost_reduce(&a0, &f0, &alpha, params.nu, params.r0, params.r, params.max_steps, &params.dioph, &params.controls)?;
            let mut failure = None;
            if let TraceStatus::Aborted { reason } = &tr.status {
                failure = Some(format!("aborted: {reason}"));
            } else if let Some(s) = tr.steps.iter().find(|s| !s.checks.iter().all(|c| c.ok)) {
                let c = s.checks.iter().find(|c| !c.ok).expect("failing check");
                failure = Some(format!("step {}: {} = {:e} > {:e}", s.j, c.name, c.value, c.bound));
            } else if !tr.decay_ok {
                failure = Some("eps_{j+1} <= eps_j^{3/2}".into());
            } else if tr.composed_residual > tol {
                failure = Some(format!("composed residual {:e} > {tol:e}", tr.composed_residual));
            }
            let summary = format!("{} steps, final eps {:e}, composed residual {:e}", tr.steps.len(), tr.final_eps, tr.composed_residual);
            (json!({ "mode": mode, "trace": to_value(&tr) }), failure, summary)
        }
        "diophantine" => {
            let red = reduce_diophantine(&a0, &f0, &alpha, cfg.f64_or("kappa", 0.01), params.dioph.tau, &params)?;
            let failure = (red.residual > tol).then(|| format!("conjugacy residual {:e} > {tol:e}", red.residual));
            let summary = format!("reduced to constant in {} steps, rho {}, residual {:e}", red.steps, red.rho, red.residual);
            let trace = red.trace.as_ref().map(to_value).unwrap_or(Value::Null);
            (json!({ "mode": mode, "reduction": to_value(&red), "trace": trace }), failure, summary)
        }
        _ => {
            let k = parse_ints("k", cfg.require("k")?)?;
            let red = reduce_rational(&a0, &f0, &alpha, &k, &params)?;
            let failure = if red.residual > tol {
                Some(format!("conjugacy residual {:e} > {tol:e}", red.residual))
            } else if !red.phi_ok {
                Some(format!("|phi| = {:e} exceeds 10 x bound {:e}", red.phi.abs(), red.phi_bound))
            } else {
                None
            };
            let summary = format!("parabolic phi {:e}, degree {:?}, residual {:e}", red.phi, red.degree, red.residual);
            let trace = red.trace.as_ref().map(to_value).unwrap_or(Value::Null);
            (json!({ "mode": mode, "reduction": to_value(&red), "trace": trace }), failure, summary)
        }
    };
    let file = write_json(out, "trace.json", cfg, body)?;
    Ok(Outcome { files: vec![file], summary, failure })
}

pub fn cmd_gaps(cfg: &Config, out: &Path) -> Result<Outcome> {
    let alpha = cfg.alpha_key("alpha")?;
    let v = cfg.potential_series("potential", alpha.len())?;
    let prob = cfg.problem(v, alpha)?;
    let sc = cfg.scan_controls(&prob);
    let gaps = find_gaps(&prob, &sc);
    let eps0 = cfg.f64_or("eps0", prob.eps0);
    let p = GevreyParams::new(cfg.nu(), cfg.r())?;
    let checks = verify_gap_decay(&gaps, eps0, &p);
    let mut csv = csv_header(cfg);
    csv.push_str("k,E_minus,E_plus,length,bound,pass\n");
    for (g, c) in gaps.iter().zip(&checks) {
        let k: Vec<String> = g.k.iter().map(i64::to_string).collect();
        let _ = writeln!(csv, "{},{:?},{:?},{:?},{:?},{}", k.join(";"), g.e_minus, g.e_plus, g.length, c.bound, c.pass);
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    let fraction = if checks.is_empty() { Value::Null } else { json!(passed as f64 / checks.len() as f64) };
    let f1 = write_text(out, "gaps.csv", &csv)?;
    let f2 = write_json(
        out,
        "decay.json",
        cfg,
        json!({ "eps0": eps0, "r": p.r, "nu": p.nu, "pass_fraction": fraction, "checks": to_value(&checks), "gaps": to_value(&gaps), "scan": to_value(&sc) }),
    )?;
    let failure = checks.iter().find(|c| !c.pass).map(|c| format!("gap {:?}: length {:e} > bound {:e}", c.k, c.measured, c.bound));
    Ok(Outcome { files: vec![f1, f2], summary: format!("{} gaps, {passed} within the decay bound", gaps.len()), failure })
}

pub fn cmd_interval(cfg: &Config, out: &Path) -> Result<Outcome> {
    let dioph = cfg.dioph();
    let mut reports = Vec::new();
    for c in cfg.components()? {
        reports.push(match c {
            Component::Set(s) => set_component(s),
            Component::Operator(v, alpha) => {
                let prob = cfg.problem(v, alpha)?;
                component_report(&prob, &cfg.scan_controls(&prob), &dioph)?
            }
        });
    }
    let rep = pipeline_verdict(reports)?;
    let verdict = match rep.single_interval {
        Some(true) => "interval",
        _ if !rep.newhouse.pass => "fail",
        _ => "inconsistent",
    };
    let file = write_json(out, "interval.json", cfg, json!({ "verdict": verdict, "report": to_value(&rep) }))?;
    let summary = match &rep.sum {
        Some(s) if verdict == "interval" => format!("verdict interval: sum is [{}, {}]", s.min(), s.max()),
        _ => format!("verdict {verdict}: {}", rep.newhouse.violations.join("; ")),
    };
    let failure = (!rep.consistent).then(|| "Newhouse condition held but the sum is not an interval".to_string());
    Ok(Outcome { files: vec![file], summary, failure })
}

pub fn cmd_duality(cfg: &Config, out: &Path) -> Result<Outcome> {
    let alpha = cfg.alpha_key("alpha")?;
    let d = alpha.len();
    let v = cfg.potential_series("potential", d)?;
    let lambda = cfg.f64_or("lambda", 1.0);
    let e = cfg.f64_or("energy", 0.0);
    let w = v.scale(num_complex::Complex64::new(1.0 / lambda, 0.0));
    let (a0, f0) = schrodinger_pair(&w, e);
    let params = cfg.reduce_params();
    let red = reduce_diophantine(&a0, &f0, &alpha, cfg.f64_or("kappa", 0.01), params.dioph.tau, &params)?;
    let m_prime = cfg.get("m_prime").map_or(Ok(vec![0; d]), |m| parse_ints("m_prime", m))?;
    let window = cfg.u64_or("window", 50) as i64;
    let cap = cfg.u64_or("series_cap", 40) as i64;
    let (de, op) = dual_eigenfunction(&red.b, &red.a_final, &v, lambda, &alpha, &m_prime, e, cap, window)?;
    let c = cfg.f64_or("goodness_c", (2.0 * PI).powf(params.nu) * params.r);
    let eps = cfg.f64_or("goodness_eps", 0.5);
    let n_big = cfg.f64_or("goodness_n", 1.0);
    let good = good_eigenfunction_test(&de.u, params.nu, n_big, c, eps);
    let shift: Vec<i64> = (0..d).map(|i| i64::from(i == 0)).collect();
    let cov = covariance_defect(&op, &de.u, &shift)?;
    let tol = cfg.f64_or("residual_tol", 1e-6);

    let mut csv = csv_header(cfg);
    let names: Vec<String> = if d == 1 { vec!["n".into()] } else { (1..=d).map(|i| format!("n{i}")).collect() };
    let _ = writeln!(csv, "{},re,im", names.join(","));
    for (n, re, im) in de.u.to_rows() {
        let n: Vec<String> = n.iter().map(i64::to_string).collect();
        let _ = writeln!(csv, "{},{re:?},{im:?}", n.join(","));
    }
    let f1 = write_text(out, "eigenfunction.csv", &csv)?;
    let f2 = write_json(
        out,
        "duality.json",
        cfg,
        json!({
            "eigen": to_value(&de),
            "goodness": { "c": c, "eps": eps, "n": n_big, "nu": params.nu, "report": to_value(&good) },
            "covariance_defect": cov,
            "covariance_shift": shift,
            "reduction": to_value(&red),
        }),
    )?;
    let failure = if de.residual > tol {
        Some(format!("eigen residual {:e} > {tol:e}", de.residual))
    } else if !good.pass {
        Some(format!("goodness ratio {:e} at {:?}", good.worst_ratio, good.witness))
    } else {
        None
    };
    let summary = format!(
        "phi {}, eigenvalue {}, residual {:e}, {} sites, goodness {}",
        de.phi,
        de.e_scaled,
        de.residual,
        de.u.entries.len(),
        if good.pass { "pass" } else { "fail" }
    );
    Ok(Outcome { files: vec![f1, f2], summary, failure })
}

pub fn cmd_thickness(cfg: &Config, out: &Path) -> Result<Outcome> {
    let set = match cfg.get("set") {
        Some(s) => parse_set("set", s)?,
        None => middle_thirds_integer(cfg.u64_or("cantor_level", 0) as u32),
    };
    let rep = thickness(&set);
    let file = write_json(
        out,
        "thickness.json",
        cfg,
        json!({ "set": to_value(&set), "thickness": to_value(&rep), "gamma": gamma(&set), "diam": set.diam() }),
    )?;
    let t = match rep.tau.value() {
        x if x.is_infinite() => "inf".to_string(),
        x => x.to_string(),
    };
    Ok(Outcome { files: vec![file], summary: format!("{} components, thickness {t}", set.len()), failure: None })
}

pub fn cmd_sumset(cfg: &Config, out: &Path) -> Result<Outcome> {
    let sets = cfg
        .indices("set")
        .into_iter()
        .map(|i| {
            let k = format!("set_{i}");
            parse_set(&k, cfg.get(&k).expect("indexed key"))
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&IntervalUnion> = sets.iter().collect();
    let nh = newhouse_check(&refs)?;
    let sum = sumset(&refs)?;
    let file = write_json(
        out,
        "sumset.json",
        cfg,
        json!({ "sets": to_value(&sets), "newhouse": to_value(&nh), "sum": to_value(&sum), "is_interval": sum.is_interval() }),
    )?;
    let failure = (nh.pass && !sum.is_interval()).then(|| "Newhouse condition held but the sum is not an interval".to_string());
    Ok(Outcome {
        files: vec![file],
        summary: format!("sum has {} components, newhouse {}", sum.len(), if nh.pass { "pass" } else { "fail" }),
        failure,
    })
}
