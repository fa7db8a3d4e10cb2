//! Experiment configuration files and dotted-path overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use calvs_core::compression::build_wxz_class;
use calvs_core::dist::{Distribution, GaussianComponent, Marginal, NoiseModel};
use calvs_core::geometry::{ConceptClass, FiniteClassTable, Hypothesis};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{ExpError, Result};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CALVS_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "calvs-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassSpec {
    Threshold,
    Intervals { k: usize },
    Rect { k: usize },
    Linear { k: usize },
    /// The finite w/x/z class over `d` base points.
    Wxz { d: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistSpec {
    UniformCube { k: usize },
    GaussianMixture { components: Vec<GaussianComponent> },
    ProductCdf { marginals: Vec<Marginal> },
    /// Weights over the domain of a finite class, in table order.
    Discrete { weights: Vec<f64> },
    /// All mass on the named domain point of a finite class.
    PointMass { at: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Threshold { t: f64 },
    Intervals { boundaries: Vec<f64> },
    /// Boundaries `i / (2k + 1)`.
    Equispaced { k: usize },
    Rect { lo: Vec<f64>, hi: Vec<f64> },
    /// Normalized to a unit normal on construction.
    Linear { w: Vec<f64>, b: f64 },
    /// A row of a finite class table.
    Row { index: usize },
}

/// One class / distribution / target triple of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    pub class: ClassSpec,
    pub dist: DistSpec,
    /// The labeling target; the infimal hypothesis in agnostic suites.
    pub target: TargetSpec,
}

/// A case with its descriptors turned into library values.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub name: String,
    pub class: ConceptClass,
    pub dist: Distribution,
    pub target: Hypothesis,
    pub table: Option<Arc<FiniteClassTable>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    #[serde(rename = "case", default)]
    pub cases: Vec<Case>,
    #[serde(default)]
    pub noise: NoiseModel,
    /// Sample sizes.
    #[serde(default)]
    pub m: Vec<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub replicates: usize,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub r_grid: Vec<f64>,
    /// Radii at which θ is evaluated.
    #[serde(default)]
    pub r0: Vec<f64>,
    /// Massart flip probabilities compared on paired streams.
    #[serde(default)]
    pub beta: Vec<f64>,
    pub master_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    /// Acceptance thresholds read by the suite logic.
    #[serde(default)]
    pub checks: BTreeMap<String, f64>,
}

fn default_delta() -> f64 {
    0.1
}

impl ExperimentConfig {
    /// Parses a config file, then applies `key=value` overrides with dotted keys.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        // Parse once as typed data so schema errors carry line numbers.
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ExpError::Config(e.to_string()))?;
        if overrides.is_empty() {
            return Ok(cfg);
        }
        let mut table: Table = toml::from_str(text).map_err(|e| ExpError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ExpError::Config(format!("after overrides: {}", e.message())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// A named threshold from the `[checks]` table.
    pub fn check(&self, key: &str) -> Result<f64> {
        self.checks
            .get(key)
            .copied()
            .ok_or_else(|| ExpError::Config(format!("missing key `checks.{key}`")))
    }

    pub fn epsilon(&self) -> Result<f64> {
        self.epsilon.ok_or_else(|| ExpError::Config("missing key `epsilon`".into()))
    }

    pub fn first_m(&self) -> Result<usize> {
        self.m.first().copied().ok_or_else(|| ExpError::Config("key `m` is empty".into()))
    }

    pub fn resolved(&self) -> Result<Vec<Resolved>> {
        if self.cases.is_empty() {
            return Err(ExpError::Config("config defines no [[case]]".into()));
        }
        self.cases.iter().map(Case::resolve).collect()
    }

    /// Output directory: explicit flag, then config, then the environment, then the default.
    pub fn output_dir(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.or_else(|| self.output_dir.clone())
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }
}

/// Sets `path = raw` in `table`. Numeric path segments index arrays; `raw` is
/// read as a TOML value and falls back to a bare string.
pub fn apply_override(table: &mut Table, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| ExpError::Config(format!("override `{spec}` is not key=value")))?;
    let path = path.trim();
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(ExpError::Config(format!("bad override key `{path}`")));
    }
    let mut root = Value::Table(std::mem::take(table));
    let res = set_path(&mut root, &keys, parse_value(raw.trim()), path);
    if let Value::Table(t) = root {
        *table = t;
    }
    res
}

fn set_path(node: &mut Value, keys: &[&str], value: Value, path: &str) -> Result<()> {
    let (key, rest) = (keys[0], &keys[1..]);
    let child = match node {
        Value::Table(t) => {
            if rest.is_empty() {
                t.insert(key.to_string(), value);
                return Ok(());
            }
            t.entry(key.to_string()).or_insert_with(|| Value::Table(Table::new()))
        }
        Value::Array(items) => {
            let n = items.len();
            let slot = key
                .parse::<usize>()
                .ok()
                .and_then(|i| items.get_mut(i))
                .ok_or_else(|| ExpError::Config(format!("override `{path}`: `{key}` is not an index below {n}")))?;
            if rest.is_empty() {
                *slot = value;
                return Ok(());
            }
            slot
        }
        _ => return Err(ExpError::Config(format!("override `{path}` descends into a scalar"))),
    };
    set_path(child, rest, value, path)
}

fn parse_value(raw: &str) -> Value {
    match toml::from_str::<Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.to_string())),
        Err(_) => Value::String(raw.to_string()),
    }
}

impl ClassSpec {
    fn build(&self) -> Result<(ConceptClass, Option<Arc<FiniteClassTable>>)> {
        Ok(match *self {
            ClassSpec::Threshold => (ConceptClass::Threshold, None),
            ClassSpec::Intervals { k } => (ConceptClass::IntervalUnion { k }, None),
            ClassSpec::Rect { k } => (ConceptClass::AxisRect { k }, None),
            ClassSpec::Linear { k } => (ConceptClass::LinearSep { k }, None),
            ClassSpec::Wxz { d } => {
                let t = Arc::new(build_wxz_class(d)?);
                (ConceptClass::Finite(t.clone()), Some(t))
            }
        })
    }
}

impl DistSpec {
    fn build(&self, table: Option<&FiniteClassTable>) -> Result<Distribution> {
        let finite_only = |what: &str| {
            ExpError::Config(format!("distribution `{what}` needs a finite class"))
        };
        Ok(match self {
            DistSpec::UniformCube { k } => Distribution::uniform_cube(*k),
            DistSpec::GaussianMixture { components } => Distribution::gaussian_mixture(components.clone())?,
            DistSpec::ProductCdf { marginals } => Distribution::product(marginals.clone())?,
            DistSpec::Discrete { weights } => {
                table.ok_or_else(|| finite_only("discrete"))?;
                Distribution::discrete(weights.clone())?
            }
            DistSpec::PointMass { at } => {
                let t = table.ok_or_else(|| finite_only("point_mass"))?;
                let i = t
                    .index_of_name(at)
                    .ok_or_else(|| ExpError::Config(format!("no domain point named `{at}`")))?;
                Distribution::point_mass(t.domain_len(), i)?
            }
        })
    }
}

impl TargetSpec {
    fn build(&self, table: Option<&Arc<FiniteClassTable>>) -> Result<Hypothesis> {
        Ok(match self {
            TargetSpec::Threshold { t } => Hypothesis::threshold(*t)?,
            TargetSpec::Intervals { boundaries } => Hypothesis::interval_union(boundaries.clone())?,
            TargetSpec::Equispaced { k } => Hypothesis::equispaced_intervals(*k)?,
            TargetSpec::Rect { lo, hi } => Hypothesis::axis_rect(lo.clone(), hi.clone())?,
            TargetSpec::Linear { w, b } => Hypothesis::linear_normalized(w.clone(), *b)?,
            TargetSpec::Row { index } => {
                let t = table.ok_or_else(|| ExpError::Config("target `row` needs a finite class".into()))?;
                Hypothesis::finite(t.clone(), *index)?
            }
        })
    }
}

impl TargetSpec {
    /// Compact text form used in CSV columns.
    pub fn descriptor(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        match self {
            TargetSpec::Threshold { t } => format!("threshold:{t}"),
            TargetSpec::Intervals { boundaries } => format!("intervals:{}", list(boundaries)),
            TargetSpec::Equispaced { k } => format!("equispaced:{k}"),
            TargetSpec::Rect { lo, hi } => format!("rect:{}/{}", list(lo), list(hi)),
            TargetSpec::Linear { w, b } => format!("linear:{}/{b}", list(w)),
            TargetSpec::Row { index } => format!("row:{index}"),
        }
    }
}

impl Case {
    pub fn resolve(&self) -> Result<Resolved> {
        let ctx = |e: ExpError| match e {
            ExpError::Config(msg) => ExpError::Config(format!("case `{}`: {msg}", self.name)),
            e => e,
        };
        let (class, table) = self.class.build().map_err(ctx)?;
        let dist = self.dist.build(table.as_deref()).map_err(ctx)?;
        let target = self.target.build(table.as_ref()).map_err(ctx)?;
        let k = class.dim();
        let dist_dim = if table.is_some() { 1 } else { dist.dim() };
        if table.is_none() && matches!(dist, Distribution::Discrete { .. }) {
            return Err(ctx(ExpError::Config("discrete distributions need a finite class".into())));
        }
        if dist_dim != k || target.dim() != k {
            return Err(ctx(ExpError::Config(format!(
                "dimension mismatch: class {} has dimension {k}, distribution {dist_dim}, target {}",
                class.name(),
                target.dim()
            ))));
        }
        Ok(Resolved {
            name: self.name.clone(),
            class,
            dist,
            target,
            table,
        })
    }
}
