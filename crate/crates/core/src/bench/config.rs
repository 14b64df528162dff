//! Declarative sweep configuration, read from TOML. Key names are listed in
//! `docs/config.md`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::report::ReportOptions;
use crate::classifiers::{ModelKind, TrainGrid};
use crate::error::{Error, Result};
use crate::generators::{
    gencat_adjust, gencat_fit, gencat_generate, generate_pa, generate_regular, GenCatOptions, GenCatParams, PaSpec,
    RegularGraphSpec, STANDARD_LEVELS, STANDARD_MU_LEVELS,
};
use crate::graph::{read_bundle, Graph};
use crate::io::read_to_string;
use crate::metrics::{Metric, MetricOptions};

/// Generator family and the spec template each sweep level is derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorConfig {
    /// Levels are target edge homophily values.
    Regular {
        #[serde(default)]
        spec: RegularGraphSpec,
        #[serde(default)]
        levels: Option<Vec<f64>>,
    },
    /// Levels are homophily coefficients `mu`.
    Pa {
        #[serde(default)]
        spec: PaSpec,
        #[serde(default)]
        levels: Option<Vec<f64>>,
    },
    /// Levels are integer `beta` shifts of the base graph's class preferences.
    Gencat {
        #[serde(default)]
        base: GenCatBase,
        #[serde(default)]
        options: GenCatOptions,
        #[serde(default)]
        betas: Option<Vec<i32>>,
    },
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig::Regular { spec: RegularGraphSpec::default(), levels: None }
    }
}

impl GeneratorConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            GeneratorConfig::Regular { .. } => "regular",
            GeneratorConfig::Pa { .. } => "pa",
            GeneratorConfig::Gencat { .. } => "gencat",
        }
    }

    /// Short label used for output directories and report columns.
    pub fn default_name(&self) -> &'static str {
        match self {
            GeneratorConfig::Regular { .. } => "rg",
            GeneratorConfig::Pa { .. } => "pa",
            GeneratorConfig::Gencat { .. } => "gencat",
        }
    }

    /// Sweep levels, ordered from heterophilic to homophilic by default.
    /// GenCat needs the fitted base parameters to know its `beta` range;
    /// larger `beta` is more heterophilic, so the default range descends.
    pub fn levels(&self, gencat: Option<&GenCatParams>) -> Result<Vec<f64>> {
        match self {
            GeneratorConfig::Regular { levels, .. } => Ok(levels.clone().unwrap_or_else(|| STANDARD_LEVELS.to_vec())),
            GeneratorConfig::Pa { levels, .. } => Ok(levels.clone().unwrap_or_else(|| STANDARD_MU_LEVELS.to_vec())),
            GeneratorConfig::Gencat { betas, .. } => {
                if let Some(b) = betas {
                    return Ok(b.iter().map(|&v| v as f64).collect());
                }
                let params =
                    gencat.ok_or_else(|| Error::Config("GenCat beta range needs the fitted base graph".into()))?;
                let (lo, hi) = params.beta_range();
                Ok((lo..=hi).rev().map(|v| v as f64).collect())
            }
        }
    }

    /// Fits the GenCat base parameters; `None` for the other generators.
    pub fn fit_base(&self) -> Result<Option<GenCatParams>> {
        let GeneratorConfig::Gencat { base, .. } = self else {
            return Ok(None);
        };
        let g = match base {
            GenCatBase::Regular { spec } => generate_regular(spec)?,
            GenCatBase::Bundle { path } => read_bundle(path)?.0,
        };
        gencat_fit(&g).map(Some)
    }

    /// One graph at sweep level `level` (`h`, `mu` or `beta`), with the
    /// concrete parameters used, for the bundle metadata.
    pub fn generate(&self, level: f64, seed: u64, base: Option<&GenCatParams>) -> Result<(Graph, serde_json::Value)> {
        match self {
            GeneratorConfig::Regular { spec, .. } => {
                let spec = RegularGraphSpec { target_edge_homophily: level, seed, ..spec.clone() };
                Ok((generate_regular(&spec)?, serde_json::to_value(&spec)?))
            }
            GeneratorConfig::Pa { spec, .. } => {
                let spec = PaSpec { homophily_coefficient: level, seed, ..spec.clone() };
                Ok((generate_pa(&spec)?, serde_json::to_value(&spec)?))
            }
            GeneratorConfig::Gencat { options, .. } => {
                let base = base.ok_or_else(|| Error::Config("GenCat generation needs fitted base parameters".into()))?;
                if level.fract() != 0.0 {
                    return Err(Error::Config(format!("GenCat level {level} is not an integer beta")));
                }
                let beta = level as i32;
                let g = gencat_generate(&gencat_adjust(base, beta)?, options, seed)?;
                Ok((g, serde_json::json!({ "beta": beta, "options": options })))
            }
        }
    }
}

/// Base graph whose statistics a GenCat sweep reproduces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum GenCatBase {
    Regular {
        #[serde(default = "default_gencat_base_spec")]
        spec: RegularGraphSpec,
    },
    Bundle {
        path: PathBuf,
    },
}

fn default_gencat_base_spec() -> RegularGraphSpec {
    RegularGraphSpec { target_edge_homophily: 0.8, seed: 99, ..RegularGraphSpec::default() }
}

impl Default for GenCatBase {
    fn default() -> Self {
        GenCatBase::Regular { spec: default_gencat_base_spec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPreset {
    #[default]
    Full,
    Reduced,
}

/// Hyperparameter lattice: a preset, with any list overridden individually.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub preset: GridPreset,
    pub learning_rates: Option<Vec<f64>>,
    pub weight_decays: Option<Vec<f64>>,
    pub dropouts: Option<Vec<f64>>,
    pub hidden_width: Option<usize>,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
}

impl GridSpec {
    pub fn resolve(&self) -> TrainGrid {
        let mut g = match self.preset {
            GridPreset::Full => TrainGrid::full(),
            GridPreset::Reduced => TrainGrid::reduced(),
        };
        if let Some(v) = &self.learning_rates {
            g.learning_rates = v.clone();
        }
        if let Some(v) = &self.weight_decays {
            g.weight_decays = v.clone();
        }
        if let Some(v) = &self.dropouts {
            g.dropouts = v.clone();
        }
        g.hidden_width = self.hidden_width.unwrap_or(g.hidden_width);
        g.max_epochs = self.max_epochs.unwrap_or(g.max_epochs);
        g.patience = self.patience.unwrap_or(g.patience);
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Label of the sweep; defaults to the generator's short name.
    pub name: Option<String>,
    pub generator: GeneratorConfig,
    pub repeats: usize,
    pub metrics: Vec<Metric>,
    pub models: Vec<ModelKind>,
    /// Train, validation and test fractions.
    pub split: [f64; 3],
    pub grid: GridSpec,
    pub metric_options: MetricOptions,
    pub seed: u64,
    /// Defaults to `out/<name>`.
    pub out: Option<PathBuf>,
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    /// Write every generated graph as a bundle next to its results.
    pub persist_graphs: bool,
    pub report: ReportOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            name: None,
            generator: GeneratorConfig::default(),
            repeats: 10,
            metrics: Metric::ALL.to_vec(),
            models: ModelKind::ALL.to_vec(),
            split: [0.6, 0.2, 0.2],
            grid: GridSpec::default(),
            metric_options: MetricOptions::default(),
            seed: 0,
            out: None,
            jobs: 0,
            persist_graphs: true,
            report: ReportOptions::default(),
        }
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read_to_string(path)?).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or(self.generator.default_name())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| Path::new("out").join(self.name()))
    }

    pub fn needs_cpm(&self) -> bool {
        self.metrics.iter().any(|m| m.is_cpm())
    }

    /// Checks everything that does not need the generator to run.
    pub fn validate(&self) -> Result<()> {
        if self.repeats < 1 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.split.iter().any(|p| !(0.0..=1.0).contains(p)) || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split {:?} must be fractions summing to 1", self.split)));
        }
        let name = self.name();
        if name.is_empty() || name.contains(['/', '\\', ',']) {
            return Err(Error::Config(format!("sweep name `{name}` must be nonempty without `/`, `\\` or `,`")));
        }
        let levels = match &self.generator {
            GeneratorConfig::Regular { spec, levels } => {
                spec.features.validate()?;
                levels.as_ref().map(Vec::len)
            }
            GeneratorConfig::Pa { spec, levels } => {
                if let Some(l) = levels {
                    if let Some(mu) = l.iter().find(|mu| !(0.0..=1.0).contains(*mu)) {
                        return Err(Error::Config(format!("mu level {mu} outside [0, 1]")));
                    }
                }
                PaSpec { homophily_coefficient: 0.5, ..spec.clone() }.validate()?;
                levels.as_ref().map(Vec::len)
            }
            GeneratorConfig::Gencat { betas, .. } => betas.as_ref().map(Vec::len),
        };
        if let Some(n) = levels {
            if n < 2 {
                return Err(Error::Config(format!("a sweep needs at least 2 levels, got {n}")));
            }
        }
        if let GeneratorConfig::Regular { levels: Some(l), .. } = &self.generator {
            if let Some(h) = l.iter().find(|h| !(**h > 0.0 && **h <= 1.0)) {
                return Err(Error::Config(format!("edge homophily level {h} outside (0, 1]")));
            }
        }
        let grid = self.grid.resolve();
        if grid.configs(0).is_empty() && !self.models.is_empty() {
            return Err(Error::Config("hyperparameter grid is empty".into()));
        }
        Ok(())
    }

    /// Everything a stored cell result depends on. The metric and model sets
    /// and the repeat count are excluded: extending them only adds cells.
    pub(crate) fn fingerprint(&self) -> serde_json::Value {
        serde_json::json!({
            "generator": self.generator,
            "split": self.split,
            "grid": self.grid.resolve(),
            "aggregation_affinity": self.metric_options.aggregation_affinity,
            "cpm": self.metric_options.cpm,
            "seed": self.seed,
        })
    }
}
