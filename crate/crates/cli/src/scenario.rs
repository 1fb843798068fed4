//! Scenario files: JSON descriptions of a structured system, its observables,
//! initial conditions, stepper and output locations.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gchs::{parse_field, PhasePoint64, ScalarField, StepperConfig64, StructuredSystem};
use indexmap::IndexMap;
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub n: usize,
    pub hamiltonian: String,
    pub structural: String,
    #[serde(default)]
    pub observables: IndexMap<String, String>,
    pub initial: Initial,
    #[serde(default)]
    pub stepper: StepperOptions,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct State {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

/// A single initial condition or an ensemble of them.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Initial {
    One(State),
    Many(Vec<State>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    #[default]
    Rk4,
    Rk45,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperOptions {
    #[serde(default)]
    pub method: MethodName,
    pub step: Option<f64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    pub blowup: Option<f64>,
}

fn default_t_end() -> f64 {
    1.0
}

fn default_stride() -> usize {
    1
}

impl Default for StepperOptions {
    fn default() -> Self {
        Self {
            method: MethodName::Rk4,
            step: None,
            abs_tol: None,
            rel_tol: None,
            t_end: default_t_end(),
            stride: default_stride(),
            blowup: None,
        }
    }
}

impl StepperOptions {
    pub fn config(&self) -> Result<StepperConfig64> {
        let mut cfg = match self.method {
            MethodName::Rk4 => {
                if self.abs_tol.is_some() || self.rel_tol.is_some() {
                    bail!("stepper: abs_tol/rel_tol only apply to method \"rk45\"");
                }
                StepperConfig64::rk4(self.step.unwrap_or(1e-3), self.t_end)
            }
            MethodName::Rk45 => {
                if self.step.is_some() {
                    bail!("stepper: step only applies to method \"rk4\"");
                }
                let mut cfg = StepperConfig64::rk45(self.t_end);
                if let gchs::Method::Rk45 { abs_tol, rel_tol } = &mut cfg.method {
                    *abs_tol = self.abs_tol.unwrap_or(*abs_tol);
                    *rel_tol = self.rel_tol.unwrap_or(*rel_tol);
                }
                cfg
            }
        };
        cfg.stride = self.stride;
        if let Some(b) = self.blowup {
            cfg.blowup = b;
        }
        cfg.validate().context("stepper")?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// A scenario with every expression parsed and every path resolved.
#[derive(Clone, Debug)]
pub struct Setup {
    pub n: usize,
    pub system: StructuredSystem,
    pub observables: IndexMap<String, ScalarField>,
    pub initial: Vec<PhasePoint64>,
    pub stepper: StepperConfig64,
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn field(what: &str, text: &str, n: usize) -> Result<ScalarField> {
    parse_field(text, n).with_context(|| format!("{what}: cannot parse {text:?}"))
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid scenario")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn system(&self) -> Result<StructuredSystem> {
        if self.n == 0 {
            bail!("n must be at least 1");
        }
        let h = field("hamiltonian", &self.hamiltonian, self.n)?;
        let s = field("structural", &self.structural, self.n)?;
        Ok(StructuredSystem::new(h, s)?)
    }

    pub fn observables(&self) -> Result<IndexMap<String, ScalarField>> {
        let mut out = IndexMap::new();
        for (name, text) in &self.observables {
            if name.is_empty() || name.contains(|c: char| c == ',' || c == '"' || c.is_whitespace()) {
                bail!("observable name {name:?} must be non-empty without commas, quotes or spaces");
            }
            out.insert(name.clone(), field(&format!("observable {name}"), text, self.n)?);
        }
        Ok(out)
    }

    pub fn initial_states(&self) -> Result<Vec<PhasePoint64>> {
        let states = match &self.initial {
            Initial::One(s) => std::slice::from_ref(s),
            Initial::Many(v) if v.is_empty() => bail!("initial: ensemble is empty"),
            Initial::Many(v) => v.as_slice(),
        };
        states
            .iter()
            .enumerate()
            .map(|(k, s)| {
                if s.q.len() != self.n || s.p.len() != self.n {
                    bail!("initial[{k}]: q and p need {} entries (got {} and {})", self.n, s.q.len(), s.p.len());
                }
                PhasePoint64::new(&s.q, &s.p).with_context(|| format!("initial[{k}]"))
            })
            .collect()
    }

    /// Parses everything; relative output paths resolve against `base`.
    pub fn setup(&self, base: &Path, stem: &str) -> Result<Setup> {
        let resolve = |p: &Option<PathBuf>, default: String| {
            let p = p.clone().unwrap_or_else(|| PathBuf::from(default));
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        Ok(Setup {
            n: self.n,
            system: self.system()?,
            observables: self.observables()?,
            initial: self.initial_states()?,
            stepper: self.stepper.config()?,
            csv: resolve(&self.outputs.csv, format!("{stem}.csv")),
            json: resolve(&self.outputs.json, format!("{stem}.summary.json")),
        })
    }
}

/// Loads and fully parses a scenario file.
pub fn load_setup(path: &Path) -> Result<Setup> {
    let scenario = Scenario::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    scenario.setup(base, stem).with_context(|| format!("in {}", path.display()))
}
