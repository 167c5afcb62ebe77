//! Scenario files, network files and the tables the command-line tool
//! writes from them.
//!
//! A scenario (JSON, `"version": "v1"`) describes a comb, an optional
//! dual-rail wire, detection settings and an optional one-parameter sweep:
//!
//! ```json
//! {
//!   "version": "v1",
//!   "name": "wire_demo",
//!   "seed": 7,
//!   "comb": { "modes": 8, "cells": 1, "r": 1.0 },
//!   "wire": { "n_pairs": 4, "r": 1.0, "phase_convention": "odd_mode_minus_half_pi" },
//!   "detection": { "eta_d": 0.95, "misalignment": 0.1, "stray_etas": [0.5] },
//!   "sweep": { "parameter": "wire.r", "values": [0.0, 0.5, 1.0] }
//! }
//! ```
//!
//! Running it yields one witness row per comb pair (`comb/pair<k>`), one
//! misaligned-LO row when `misalignment > 0` (`comb/misaligned_lo`), and the
//! wire's X and P witnesses (`wire/source<k>/x|p`), for every sweep point.

use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch_messiah::{decompose, recomposition_error};
use crate::cluster::{
    build_dual_rail, extract_graph, rotate_modes, wire_witnesses, DualRailSpec, GraphReport, PhaseConvention,
    WitnessSigns,
};
use crate::comb::{amplify_comb, build_comb, overlap_spec_from_alignment, synthesize_lo, Band, LocalOscillator};
use crate::detection::{ideal_epr_noise, measure_witness, misaligned_noise};
use crate::elements::{
    gain_to_squeezing, two_mode_squeezer, AmplifierSpec, NetworkElement,
    DEFAULT_DETECTOR_EFFICIENCY,
};
use crate::error::Error;
use crate::gaussian::{apply_symplectic, vacuum_state, Quadrature, SymplecticTransform, Witness};

/// Recomposition error above which `decompose` reports a contract failure.
pub const RECOMPOSITION_TOL: f64 = 1e-9;

pub const SWEEP_PARAMETERS: [&str; 5] = [
    "comb.r",
    "comb.gain",
    "wire.r",
    "detection.eta_d",
    "detection.misalignment",
];

/// Failure of a command, carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or syntactically broken input (exit 2).
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    /// Input that parses but breaks a rule (exit 3).
    Validation { field: String, message: String },
    /// A computed result broke an internal guarantee (exit 4).
    Contract(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Validation { .. } => 3,
            CliError::Contract(_) => 4,
        }
    }

    fn validation(field: impl Into<String>, message: impl fmt::Display) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.to_string(),
        }
    }

    fn contract(message: impl fmt::Display) -> Self {
        CliError::Contract(message.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse {
                path,
                line,
                column,
                message,
            } => write!(f, "parse error in {path} at line {line}, column {column}: {message}"),
            CliError::Validation { field, message } => write!(f, "invalid field `{field}`: {message}"),
            CliError::Contract(m) => write!(f, "internal contract violated: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Output format of tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        line: 0,
        column: 0,
        message: e.to_string(),
    })
}

/// Syntax errors are parse failures; schema errors (missing or unknown
/// fields, wrong types) are validation failures naming the field.
fn parse_json<T: serde::de::DeserializeOwned>(text: &str, path: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => CliError::Validation {
                field: schema_field(&e.to_string()),
                message: e.to_string(),
            },
            _ => CliError::Parse {
                path: path.to_string(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
        }
    })
}

fn schema_field(message: &str) -> String {
    // serde names the offending field in backticks
    message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<document>".to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombConfig {
    #[serde(alias = "M")]
    pub modes: usize,
    #[serde(default = "one")]
    pub cells: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireConfig {
    pub n_pairs: usize,
    pub r: f64,
    #[serde(default)]
    pub phase_convention: PhaseConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    #[serde(default = "default_eta")]
    pub eta_d: f64,
    #[serde(default)]
    pub misalignment: f64,
    #[serde(default)]
    pub stray_etas: Vec<f64>,
}

fn default_eta() -> f64 {
    DEFAULT_DETECTOR_EFFICIENCY
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            eta_d: DEFAULT_DETECTOR_EFFICIENCY,
            misalignment: 0.0,
            stray_etas: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: String,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub comb: CombConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wire: Option<WireConfig>,
    #[serde(default)]
    pub detection: DetectionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Self::parse_named(text, "<input>")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse_named(&read_input(path)?, &path.display().to_string())
    }

    fn parse_named(text: &str, path: &str) -> Result<Self, CliError> {
        let s: Scenario = parse_json(text, path)?;
        s.validate()?;
        Ok(s)
    }

    /// Checks every field, and every sweep point after substitution.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != "v1" {
            return Err(CliError::validation("version", format!("unsupported version {:?}", self.version)));
        }
        let name_ok = !self.name.is_empty()
            && self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
            && !self.name.starts_with('.');
        if !name_ok {
            return Err(CliError::validation(
                "name",
                "must be non-empty and use only letters, digits, '_', '-' or '.'",
            ));
        }
        if let Some(sw) = &self.sweep {
            if !SWEEP_PARAMETERS.contains(&sw.parameter.as_str()) {
                return Err(CliError::validation(
                    "sweep.parameter",
                    format!("{:?} is not one of {}", sw.parameter, SWEEP_PARAMETERS.join(", ")),
                ));
            }
            if sw.parameter == "wire.r" && self.wire.is_none() {
                return Err(CliError::validation("sweep.parameter", "wire.r is swept but no wire is configured"));
            }
            if sw.values.is_empty() {
                return Err(CliError::validation("sweep.values", "needs at least one value"));
            }
            for (i, &v) in sw.values.iter().enumerate() {
                if !v.is_finite() {
                    return Err(CliError::validation(format!("sweep.values[{i}]"), "must be finite"));
                }
                self.with_parameter(&sw.parameter, v).validate_point()?;
            }
            Ok(())
        } else {
            self.validate_point()
        }
    }

    fn validate_point(&self) -> Result<(), CliError> {
        let c = &self.comb;
        if c.modes < 2 || c.modes % 2 != 0 {
            return Err(CliError::validation("comb.modes", format!("must be even and >= 2, got {}", c.modes)));
        }
        if c.cells == 0 {
            return Err(CliError::validation("comb.cells", "must be >= 1"));
        }
        match (c.r, c.gain) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(CliError::validation("comb", "give exactly one of `r` and `gain`"))
            }
            (Some(r), None) if !(r.is_finite() && r >= 0.0) => {
                return Err(CliError::validation("comb.r", format!("must be finite and >= 0, got {r}")))
            }
            (None, Some(g)) if !(g.is_finite() && g >= 1.0) => {
                return Err(CliError::validation("comb.gain", format!("must be finite and >= 1, got {g}")))
            }
            _ => {}
        }
        if let Some(w) = &self.wire {
            if w.n_pairs < 2 {
                return Err(CliError::validation("wire.n_pairs", format!("must be >= 2, got {}", w.n_pairs)));
            }
            if !(w.r.is_finite() && w.r >= 0.0) {
                return Err(CliError::validation("wire.r", format!("must be finite and >= 0, got {}", w.r)));
            }
        }
        let d = &self.detection;
        if !(d.eta_d > 0.0 && d.eta_d <= 1.0) {
            return Err(CliError::validation("detection.eta_d", format!("must lie in (0, 1], got {}", d.eta_d)));
        }
        if !(0.0..=1.0).contains(&d.misalignment) {
            return Err(CliError::validation(
                "detection.misalignment",
                format!("must lie in [0, 1], got {}", d.misalignment),
            ));
        }
        for (i, &e) in d.stray_etas.iter().enumerate() {
            if !(e >= 0.0 && e < d.eta_d) {
                return Err(CliError::validation(
                    format!("detection.stray_etas[{i}]"),
                    format!("must lie in [0, eta_d = {}), got {e}", d.eta_d),
                ));
            }
        }
        if d.misalignment > 0.0 && d.stray_etas.is_empty() {
            return Err(CliError::validation(
                "detection.stray_etas",
                "misaligned LO power needs at least one stray mode",
            ));
        }
        Ok(())
    }

    /// Copy of the scenario with one sweepable field replaced.
    pub fn with_parameter(&self, parameter: &str, value: f64) -> Scenario {
        let mut s = self.clone();
        match parameter {
            "comb.r" => {
                s.comb.r = Some(value);
                s.comb.gain = None;
            }
            "comb.gain" => {
                s.comb.gain = Some(value);
                s.comb.r = None;
            }
            "wire.r" => {
                if let Some(w) = s.wire.as_mut() {
                    w.r = value;
                }
            }
            "detection.eta_d" => s.detection.eta_d = value,
            "detection.misalignment" => s.detection.misalignment = value,
            _ => {}
        }
        s.sweep = None;
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRow {
    pub scenario: String,
    pub parameter: Option<String>,
    pub value: Option<f64>,
    pub witness_id: String,
    pub variance: f64,
    #[serde(rename = "dB")]
    pub db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphPoint {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub comb: GraphReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wire: Option<GraphReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphFile {
    pub scenario: String,
    pub seed: u64,
    pub points: Vec<GraphPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub name: String,
    pub rows: Vec<WitnessRow>,
    pub graphs: GraphFile,
}

fn internal(e: Error) -> CliError {
    match e {
        Error::InvalidArgument(m) | Error::InvalidSpec(m) => CliError::validation("<scenario>", m),
        other => CliError::contract(other),
    }
}

fn run_point(
    s: &Scenario,
    parameter: Option<&str>,
    value: Option<f64>,
) -> Result<(Vec<WitnessRow>, GraphPoint), CliError> {
    let amp = match (s.comb.r, s.comb.gain) {
        (Some(r), _) => AmplifierSpec::from_squeezing(r, 0.0),
        (None, Some(g)) => AmplifierSpec::from_gain(g, 0.0),
        _ => unreachable!("validated scenario"),
    }
    .map_err(internal)?;
    let comb = build_comb(s.comb.modes, amp, s.comb.cells).map_err(internal)?;
    let n = comb.n_modes();
    let state = amplify_comb(&vacuum_state(n).map_err(internal)?, &comb).map_err(internal)?;
    let eta = s.detection.eta_d;

    let mut rows = Vec::new();
    let row = |id: String, variance: f64, db: f64| WitnessRow {
        scenario: s.name.clone(),
        parameter: parameter.map(str::to_string),
        value,
        witness_id: id,
        variance,
        db,
    };
    for (k, &(a, b)) in comb.pairs().iter().enumerate() {
        let w = Witness::from_terms(n, &[(a, Quadrature::X, 1.0), (b, Quadrature::X, -1.0)]).map_err(internal)?;
        let rep = measure_witness(&state, &w, eta).map_err(internal)?;
        rows.push(row(format!("comb/pair{k}"), rep.variance, rep.db));
    }
    if s.detection.misalignment > 0.0 {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        coeffs[comb.pairs()[0].0] = Complex64::new(1.0, 0.0);
        let lo = synthesize_lo(&comb, &coeffs).map_err(internal)?;
        let spec = overlap_spec_from_alignment(&lo, comb.pairs()[0].0, s.detection.misalignment, &s.detection.stray_etas, eta)
            .map_err(internal)?;
        let rep = misaligned_noise(&spec, amp.gain()).map_err(internal)?;
        rows.push(row("comb/misaligned_lo".into(), rep.variance, rep.db));
    }

    let graph_frame = rotate_modes(&state, &comb.band_modes(Band::Conjugate), -std::f64::consts::FRAC_PI_2)
        .map_err(internal)?;
    let comb_graph = extract_graph(&graph_frame).map_err(internal)?.report();

    let wire_graph = match &s.wire {
        Some(w) => {
            let spec = DualRailSpec::new(w.n_pairs, w.r, w.phase_convention).map_err(internal)?;
            let (wire_state, _) = build_dual_rail(&spec).map_err(internal)?;
            for ww in wire_witnesses(&spec, WitnessSigns::Grouped).map_err(internal)? {
                let rep = measure_witness(&wire_state, &ww.witness, eta).map_err(internal)?;
                rows.push(row(ww.id(), rep.variance, rep.db));
            }
            Some(extract_graph(&wire_state).map_err(internal)?.report())
        }
        None => None,
    };

    let point = GraphPoint {
        parameter: parameter.map(str::to_string),
        value,
        comb: comb_graph,
        wire: wire_graph,
    };
    Ok((rows, point))
}

/// Evaluates every sweep point (in parallel) and gathers rows sorted by
/// sweep value; ties keep the order the values were listed in.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioOutput, CliError> {
    s.validate()?;
    let points: Vec<(Option<&str>, Option<f64>, Scenario)> = match &s.sweep {
        Some(sw) => {
            let mut vals: Vec<f64> = sw.values.clone();
            vals.sort_by(f64::total_cmp);
            vals.into_iter()
                .map(|v| (Some(sw.parameter.as_str()), Some(v), s.with_parameter(&sw.parameter, v)))
                .collect()
        }
        None => vec![(None, None, s.clone())],
    };
    let results: Vec<_> = points
        .par_iter()
        .map(|(p, v, sc)| run_point(sc, *p, *v))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut graph_points = Vec::new();
    for (r, g) in results {
        rows.extend(r);
        graph_points.push(g);
    }
    Ok(ScenarioOutput {
        name: s.name.clone(),
        rows,
        graphs: GraphFile {
            scenario: s.name.clone(),
            seed: s.seed,
            points: graph_points,
        },
    })
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn witness_csv(rows: &[WitnessRow]) -> String {
    let mut out = String::from("scenario,parameter,value,witness_id,variance,dB\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.scenario,
            opt(&r.parameter),
            opt(&r.value),
            r.witness_id,
            r.variance,
            r.db
        ));
    }
    out
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(CliError::contract)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::contract(format!("cannot write {}: {e}", path.display())))
}

/// Writes `<name>_witness.<csv|json>` and `<name>_graph.json` into `dir`.
pub fn write_scenario_outputs(out: &ScenarioOutput, dir: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::contract(format!("cannot create {}: {e}", dir.display())))?;
    let witness = dir.join(format!("{}_witness.{}", out.name, format.extension()));
    let body = match format {
        Format::Csv => witness_csv(&out.rows),
        Format::Json => to_json(&out.rows)?,
    };
    let graph = dir.join(format!("{}_graph.json", out.name));
    let graph_body = to_json(&out.graphs)?;
    write_file(&witness, &body)?;
    write_file(&graph, &graph_body)?;
    Ok(vec![witness, graph])
}

/// A linear-optical network: `modes` modes and elements applied in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub version: String,
    pub modes: usize,
    #[serde(default)]
    pub elements: Vec<NetworkElement>,
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Self::parse_named(text, "<input>")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse_named(&read_input(path)?, &path.display().to_string())
    }

    fn parse_named(text: &str, path: &str) -> Result<Self, CliError> {
        let n: NetworkFile = parse_json(text, path)?;
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != "v1" {
            return Err(CliError::validation("version", format!("unsupported version {:?}", self.version)));
        }
        if self.modes == 0 {
            return Err(CliError::validation("modes", "must be >= 1"));
        }
        for (i, el) in self.elements.iter().enumerate() {
            let modes = el.modes();
            if let Some(m) = modes.iter().find(|&&m| m >= self.modes) {
                return Err(CliError::validation(
                    format!("elements[{i}].modes"),
                    format!("mode {m} out of range for {} modes", self.modes),
                ));
            }
            if modes.len() == 2 && modes[0] == modes[1] {
                return Err(CliError::validation(format!("elements[{i}].modes"), "modes must differ"));
            }
            el.transform()
                .map_err(|e| CliError::validation(format!("elements[{i}]"), e))?;
        }
        Ok(())
    }

    pub fn transform(&self) -> Result<SymplecticTransform, CliError> {
        self.validate()?;
        crate::elements::compose_network(self.modes, &self.elements).map_err(internal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub modes: usize,
    pub squeeze: Vec<f64>,
    pub total_squeezing: f64,
    pub recomposition_error: f64,
    pub passive_in: Vec<Vec<f64>>,
    pub passive_out: Vec<Vec<f64>>,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Decomposes a network; a non-symplectic product or a recomposition error
/// above [`RECOMPOSITION_TOL`] is a contract failure.
pub fn decompose_network(net: &NetworkFile) -> Result<DecompositionReport, CliError> {
    let s = net.transform()?;
    let d = decompose(&s).map_err(CliError::contract)?;
    let err = recomposition_error(&s, &d);
    if !(err <= RECOMPOSITION_TOL) {
        return Err(CliError::contract(format!("recomposition error {err:e} exceeds {RECOMPOSITION_TOL:e}")));
    }
    Ok(DecompositionReport {
        modes: net.modes,
        squeeze: d.squeeze().iter().copied().collect(),
        total_squeezing: d.total_squeezing(),
        recomposition_error: err,
        passive_in: rows_of(d.passive_in().matrix()),
        passive_out: rows_of(d.passive_out().matrix()),
    })
}

pub fn decomposition_csv(rep: &DecompositionReport) -> String {
    let mut out = String::from("index,squeeze\n");
    for (i, r) in rep.squeeze.iter().enumerate() {
        out.push_str(&format!("{i},{r}\n"));
    }
    out
}

pub fn render_decomposition(rep: &DecompositionReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(decomposition_csv(rep)),
        Format::Json => to_json(rep),
    }
}

/// Grids for the noise table. `stray_etas` defaults to one stray mode at
/// half the detector efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTableRequest {
    pub gains: Vec<f64>,
    pub etas: Vec<f64>,
    pub misalignments: Vec<f64>,
    pub stray_etas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseRow {
    pub gain: f64,
    pub eta: f64,
    pub misalignment: f64,
    pub closed_form: f64,
    pub simulated: Option<f64>,
    pub abs_diff: Option<f64>,
}

fn check_grid(field: &str, values: &[f64], ok: impl Fn(f64) -> bool, rule: &str) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::validation(field, "needs at least one value"));
    }
    for (i, &v) in values.iter().enumerate() {
        if !ok(v) {
            return Err(CliError::validation(format!("{field}[{i}]"), format!("{v} {rule}")));
        }
    }
    Ok(())
}

/// Cartesian product of the grids (gains outermost). Aligned rows carry a
/// simulated EPR measurement next to the closed form; misaligned rows
/// carry only the closed form.
pub fn noise_table(req: &NoiseTableRequest) -> Result<Vec<NoiseRow>, CliError> {
    check_grid("gains", &req.gains, |g| g.is_finite() && g >= 1.0, "must be finite and >= 1")?;
    check_grid("etas", &req.etas, |e| (0.0..=1.0).contains(&e), "must lie in [0, 1]")?;
    check_grid("misalignments", &req.misalignments, |m| (0.0..=1.0).contains(&m), "must lie in [0, 1]")?;
    if let Some(st) = &req.stray_etas {
        check_grid("stray_etas", st, |e| (0.0..=1.0).contains(&e), "must lie in [0, 1]")?;
    }
    let xdiff = Witness::from_terms(2, &[(0, Quadrature::X, 1.0), (1, Quadrature::X, -1.0)]).map_err(internal)?;
    let lo = pair_lo();
    let mut rows = Vec::new();
    for &g in &req.gains {
        let r = gain_to_squeezing(g).map_err(internal)?;
        let pair = apply_symplectic(
            &vacuum_state(2).map_err(internal)?,
            &two_mode_squeezer(r, 0.0).map_err(internal)?,
            &[0, 1],
        )
        .map_err(internal)?;
        for &eta in &req.etas {
            for &mis in &req.misalignments {
                let row = if mis == 0.0 {
                    let cf = ideal_epr_noise(g, eta).map_err(internal)?.variance;
                    let sim = measure_witness(&pair, &xdiff, eta).map_err(internal)?.variance;
                    NoiseRow {
                        gain: g,
                        eta,
                        misalignment: mis,
                        closed_form: cf,
                        simulated: Some(sim),
                        abs_diff: Some((cf - sim).abs()),
                    }
                } else {
                    let strays = req.stray_etas.clone().unwrap_or_else(|| vec![0.5 * eta]);
                    let spec = overlap_spec_from_alignment(&lo, 0, mis, &strays, eta).map_err(|e| {
                        CliError::validation("misalignments", format!("gain {g}, eta {eta}, misalignment {mis}: {e}"))
                    })?;
                    let cf = misaligned_noise(&spec, g).map_err(internal)?.variance;
                    NoiseRow {
                        gain: g,
                        eta,
                        misalignment: mis,
                        closed_form: cf,
                        simulated: None,
                        abs_diff: None,
                    }
                };
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Unit-power LO on the probe of a single two-mode comb.
fn pair_lo() -> LocalOscillator {
    let amp = AmplifierSpec::from_squeezing(0.0, 0.0).expect("zero squeezing");
    let comb = build_comb(2, amp, 1).expect("two-mode comb");
    let coeffs = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    synthesize_lo(&comb, &coeffs).expect("nonzero LO")
}

pub fn noise_csv(rows: &[NoiseRow]) -> String {
    let mut out = String::from("gain,eta,misalignment,closed_form,simulated,abs_diff\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.gain,
            r.eta,
            r.misalignment,
            r.closed_form,
            opt(&r.simulated),
            opt(&r.abs_diff)
        ));
    }
    out
}

pub fn render_noise_table(rows: &[NoiseRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(noise_csv(rows)),
        Format::Json => to_json(&rows),
    }
}
