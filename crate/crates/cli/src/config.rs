//! Scenario configuration: flat TOML with dotted section prefixes.
//!
//! ```text
//! pipeline = "sweep"
//! seed = 7
//! domain.kind = "torus"
//! domain.n = 8
//! domain.side = 4.0
//! model.scenario = "s2"
//! flow.epsilon = [0.4, 0.2, 0.1, 0.05]
//! ```
//!
//! Sections written as `[domain]` tables parse the same way. `emit` always
//! writes the dotted form with every field present.

use crate::error::{field, CliError, Result};
use heflow_core::bundle::{make_scenario, HolomorphicModel, ScenarioParams, ScenarioTag};
use heflow_core::flow::{stable_dt, FlowConfig, FlowKind};
use heflow_core::grid::{build_flat_torus, build_punctured_square, ExhaustionSequence, GridDomain, MIN_POINTS};
use serde::{Deserialize, Deserializer, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Single,
    Exhaustion,
    Sweep,
    Uniqueness,
    Stability,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Single => "single",
            Pipeline::Exhaustion => "exhaustion",
            Pipeline::Sweep => "sweep",
            Pipeline::Uniqueness => "uniqueness",
            Pipeline::Stability => "stability",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Torus,
    Punctured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub n: usize,
    #[serde(default = "one")]
    pub side: f64,
    /// Excision radii, strictly decreasing (punctured only).
    #[serde(default)]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// `s1`, `s2`, `s3` or a long name, with optional `bumped_` / `punctured_` prefixes.
    pub scenario: String,
    #[serde(default)]
    pub c: f64,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default = "minus_one")]
    pub c2: f64,
    #[serde(default = "one")]
    pub nu: f64,
    #[serde(default)]
    pub bump: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKindSpec {
    Perturbed,
    Naive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    /// A single value or a list; always a list once parsed.
    #[serde(deserialize_with = "one_or_many")]
    pub epsilon: Vec<f64>,
    /// Defaults to the stability bound of the domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_tol")]
    pub tol_residual: f64,
    #[serde(default = "yes")]
    pub det_renorm: bool,
    #[serde(default = "default_stride")]
    pub monitor_stride: usize,
    #[serde(default = "default_kind")]
    pub kind: FlowKindSpec,
    /// Amplitude of a random compatible start (0 starts from `K`).
    #[serde(default)]
    pub init_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustionSpec {
    #[serde(default = "default_tol_j")]
    pub tol_j: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_max: Option<usize>,
}

impl Default for ExhaustionSpec {
    fn default() -> Self {
        Self {
            tol_j: default_tol_j(),
            j_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_ahe")]
    pub ahe_threshold: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            ahe_threshold: default_ahe(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub svg: bool,
    #[serde(default = "yes")]
    pub fields: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            csv: true,
            svg: true,
            fields: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub pipeline: Pipeline,
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainSpec,
    pub model: ModelSpec,
    pub flow: FlowSpec,
    #[serde(default)]
    pub exhaustion: ExhaustionSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

fn one() -> f64 {
    1.0
}
fn minus_one() -> f64 {
    -1.0
}
fn yes() -> bool {
    true
}
fn default_t_max() -> f64 {
    400.0
}
fn default_tol() -> f64 {
    1e-9
}
fn default_stride() -> usize {
    64
}
fn default_kind() -> FlowKindSpec {
    FlowKindSpec::Perturbed
}
fn default_tol_j() -> f64 {
    1e-3
}
fn default_ahe() -> f64 {
    0.05
}
fn default_dir() -> PathBuf {
    PathBuf::from("heflow-out")
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

impl ScenarioConfig {
    /// Parse and range-check.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Normalized dotted form; `parse(emit(c)) == c`.
    pub fn emit(&self) -> String {
        let value = toml::Value::try_from(self).expect("config serializes");
        let mut out = String::new();
        flatten("", &value, &mut out);
        out
    }

    pub fn scenario_tag(&self) -> Result<ScenarioTag> {
        self.model.scenario.parse().map_err(|e: heflow_core::HeError| field("model.scenario", e.to_string()))
    }

    pub fn scenario_params(&self) -> ScenarioParams {
        let m = &self.model;
        ScenarioParams {
            c: m.c,
            c1: m.c1,
            c2: m.c2,
            nu: m.nu,
            bump: m.bump,
        }
    }

    pub fn exhaustion_sequence(&self) -> Result<ExhaustionSequence> {
        let d = &self.domain;
        let built = match d.kind {
            DomainKind::Torus => build_flat_torus(d.n, d.side).map(ExhaustionSequence::trivial),
            DomainKind::Punctured => build_punctured_square(d.n, d.side, &d.radii),
        };
        built.map_err(|e| field("domain", e.to_string()))
    }

    pub fn model(&self, ex: &ExhaustionSequence) -> Result<HolomorphicModel> {
        make_scenario(&self.model.scenario, self.scenario_params(), ex.base())
            .map_err(|e| field("model", e.to_string()))
    }

    /// Flow settings for `epsilon`, with `dt` defaulting to the stability
    /// bound of the base lattice.
    pub fn flow_config(&self, base: &GridDomain, epsilon: f64) -> FlowConfig {
        let f = &self.flow;
        let mut cfg = FlowConfig::for_domain(base, epsilon);
        if let Some(dt) = f.dt {
            cfg.dt = dt;
        }
        cfg.t_max = f.t_max;
        cfg.tol_residual = f.tol_residual;
        cfg.det_renorm = f.det_renorm;
        cfg.monitor_stride = f.monitor_stride;
        cfg.kind = match f.kind {
            FlowKindSpec::Perturbed => FlowKind::Perturbed,
            FlowKindSpec::Naive => FlowKind::Naive,
        };
        cfg
    }

    /// Range checks against the solver's preconditions.
    pub fn validate(&self) -> Result<()> {
        let d = &self.domain;
        if d.n < MIN_POINTS || d.n % 2 != 0 || d.n > 4096 {
            return Err(field("domain.n", format!("must be even and in [{MIN_POINTS}, 4096], got {}", d.n)));
        }
        if !(d.side > 0.0) || !d.side.is_finite() {
            return Err(field("domain.side", format!("must be finite and > 0, got {}", d.side)));
        }
        match d.kind {
            DomainKind::Torus if !d.radii.is_empty() => {
                return Err(field("domain.radii", "only a punctured domain takes radii"));
            }
            DomainKind::Punctured if d.radii.is_empty() => {
                return Err(field("domain.radii", "a punctured domain needs at least one radius"));
            }
            _ => {}
        }
        for (k, &r) in d.radii.iter().enumerate() {
            if !(r > 0.0) || r >= d.side / 2.0 {
                return Err(field("domain.radii", format!("radius {k} = {r} outside (0, side/2)")));
            }
        }
        if d.radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(field("domain.radii", "radii must be strictly decreasing"));
        }

        let tag = self.scenario_tag()?;
        if tag.punctured != (d.kind == DomainKind::Punctured) {
            return Err(field(
                "model.scenario",
                format!("`{}` does not match domain.kind = {:?}", self.model.scenario, d.kind),
            ));
        }
        let m = &self.model;
        for (name, v) in [("model.c", m.c), ("model.c1", m.c1), ("model.c2", m.c2), ("model.nu", m.nu), ("model.bump", m.bump)] {
            if !v.is_finite() || v.abs() > 100.0 {
                return Err(field(name, format!("{v} outside [-100, 100]")));
            }
        }

        let f = &self.flow;
        if f.epsilon.is_empty() {
            return Err(field("flow.epsilon", "empty"));
        }
        if f.epsilon.iter().any(|e| !(*e >= 0.0) || !e.is_finite() || *e > 1e3) {
            return Err(field("flow.epsilon", format!("values must lie in [0, 1000], got {:?}", f.epsilon)));
        }
        match self.pipeline {
            Pipeline::Sweep => {
                if f.epsilon.contains(&0.0) || f.epsilon.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(field("flow.epsilon", "a sweep needs strictly decreasing positive values"));
                }
            }
            _ if f.epsilon.len() != 1 => {
                return Err(field("flow.epsilon", format!("pipeline {} takes a single value", self.pipeline.name())));
            }
            Pipeline::Exhaustion if f.epsilon[0] == 0.0 => {
                return Err(field("flow.epsilon", "an exhaustion solve needs ε > 0"));
            }
            _ => {}
        }
        if matches!(self.pipeline, Pipeline::Single | Pipeline::Uniqueness | Pipeline::Stability)
            && d.kind != DomainKind::Torus
        {
            return Err(field("pipeline", format!("{} runs on a torus domain", self.pipeline.name())));
        }
        if !(f.t_max > 0.0) || !f.t_max.is_finite() {
            return Err(field("flow.t_max", format!("must be finite and > 0, got {}", f.t_max)));
        }
        if !(f.tol_residual > 0.0) || !f.tol_residual.is_finite() {
            return Err(field("flow.tol_residual", format!("must be > 0, got {}", f.tol_residual)));
        }
        if f.monitor_stride == 0 {
            return Err(field("flow.monitor_stride", "must be ≥ 1"));
        }
        if !(0.0..=5.0).contains(&f.init_amplitude) {
            return Err(field("flow.init_amplitude", format!("must lie in [0, 5], got {}", f.init_amplitude)));
        }
        if let Some(dt) = f.dt {
            let dt_stable = stable_dt(&build_flat_torus(d.n, d.side).map_err(|e| field("domain", e.to_string()))?);
            if !(dt > 0.0) {
                return Err(field("flow.dt", format!("must be > 0, got {dt}")));
            }
            if dt > dt_stable * (1.0 + 1e-12) {
                return Err(field(
                    "flow.dt",
                    format!("{dt} exceeds the stable time step {dt_stable} (spacing² · λ_min / 8)"),
                ));
            }
        }
        if !(self.exhaustion.tol_j > 0.0) {
            return Err(field("exhaustion.tol_j", format!("must be > 0, got {}", self.exhaustion.tol_j)));
        }
        if !(self.sweep.ahe_threshold > 0.0) {
            return Err(field("sweep.ahe_threshold", format!("must be > 0, got {}", self.sweep.ahe_threshold)));
        }
        Ok(())
    }
}

fn flatten(prefix: &str, v: &toml::Value, out: &mut String) {
    match v {
        toml::Value::Table(t) => {
            // scalars first so the top-level keys lead
            let (tables, scalars): (Vec<_>, Vec<_>) = t.iter().partition(|(_, v)| v.is_table());
            for (k, v) in scalars.into_iter().chain(tables) {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => {
            out.push_str(prefix);
            out.push_str(" = ");
            out.push_str(&other.to_string());
            out.push('\n');
        }
    }
}
