//! Experiment configuration: a JSON document, with command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nlfermion::scaling::{saturation_cap, Abscissa};
use nlfermion::{FitForm, LatticeSpec, ModelKind, ModelSpec, Stencil};
use serde::{Deserialize, Serialize};

use crate::Usage;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledModel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub spec: ModelSpec,
}

impl LabeledModel {
    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| format!("{} alpha={}", self.spec.kind, self.spec.alpha))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepSpec {
    List(Vec<usize>),
    Range {
        start: usize,
        end: usize,
        #[serde(default = "one")]
        step: usize,
    },
}

fn one() -> usize {
    1
}

impl SweepSpec {
    pub fn lengths(&self) -> Vec<usize> {
        match self {
            SweepSpec::List(v) => v.clone(),
            SweepSpec::Range { start, end, step } => (*start..=*end).step_by((*step).max(1)).collect(),
        }
    }

    /// `start:end[:step]`.
    pub fn parse_range(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| Usage(format!("bad range {text:?}")));
        match parts.as_slice() {
            [a, b] => Ok(SweepSpec::Range { start: num(a)?, end: num(b)?, step: 1 }),
            [a, b, c] => Ok(SweepSpec::Range { start: num(a)?, end: num(b)?, step: num(c)? }),
            _ => Err(Usage(format!("range must be start:end[:step], got {text:?}")).into()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRequest {
    pub form: FitForm,
    /// Inclusive `[L_min, L_max]`; defaults to `[1, saturation cap]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
    #[serde(default)]
    pub abscissa: Abscissa,
}

impl FitRequest {
    /// `form[:lo:hi]`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let form = match parts[0] {
            "linear" => FitForm::Linear,
            "log1d" => FitForm::Log1d,
            "area_log2d" => FitForm::AreaLog2d,
            other => bail!(Usage(format!("unknown fit form {other:?}"))),
        };
        let window = match parts.len() {
            1 => None,
            3 => {
                let lo = parts[1].parse().map_err(|_| Usage(format!("bad fit window in {text:?}")))?;
                let hi = parts[2].parse().map_err(|_| Usage(format!("bad fit window in {text:?}")))?;
                Some((lo, hi))
            }
            _ => bail!(Usage(format!("fit must be form or form:lo:hi, got {text:?}"))),
        };
        Ok(FitRequest {
            form,
            window,
            abscissa: Abscissa::Log,
        })
    }

    pub fn window_for(&self, lattice: &LatticeSpec) -> (usize, usize) {
        self.window.unwrap_or((1, saturation_cap(lattice)))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoloConfig {
    pub alpha_c: f64,
    pub a: f64,
    pub b: f64,
    /// Fit the metric parameters instead of using the given ones.
    #[serde(default)]
    pub fit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
}

impl Default for HoloConfig {
    fn default() -> Self {
        HoloConfig {
            alpha_c: 9.0,
            a: 0.6,
            b: 0.7,
            fit: false,
            window: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotY {
    #[default]
    S,
    /// `S/L`.
    SOverL,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    #[serde(default)]
    pub log_x: bool,
    #[serde(default)]
    pub plot_y: PlotY,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<LabeledModel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub models: Vec<LabeledModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<FitRequest>,
    #[serde(default)]
    pub crossover: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holography: Option<HoloConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Usage(format!("cannot read config {}: {e}", path.display())))?;
        let config: Config = serde_json::from_str(&text)
            .map_err(|e| Usage(format!("invalid config {}: {e}", path.display())))?;
        Ok(config)
    }

    /// `model` and `models` merged into one list.
    pub fn model_list(&self) -> Vec<LabeledModel> {
        self.model.iter().cloned().chain(self.models.iter().cloned()).collect()
    }

    pub fn single_model(&self) -> Result<LabeledModel> {
        match self.model_list().as_slice() {
            [m] => Ok(m.clone()),
            [] => bail!(Usage("config has no model".into())),
            _ => bail!(Usage("this command takes exactly one model".into())),
        }
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        self.lattice.clone().ok_or_else(|| Usage("config has no lattice".into()).into())
    }

    pub fn lengths(&self) -> Result<Vec<usize>> {
        let lengths = self.sweep.as_ref().map(SweepSpec::lengths).unwrap_or_default();
        if lengths.is_empty() {
            bail!(Usage("sweep list is empty".into()));
        }
        Ok(lengths)
    }

    pub fn echo(&self) -> String {
        serde_json::to_string_pretty(self).context("serializing config").unwrap_or_default()
    }
}

/// Flag values that override config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub kind: Option<ModelKind>,
    pub alpha: Option<f64>,
    pub filling: Option<f64>,
    pub extent: Option<Vec<usize>>,
    pub stencil: Option<Stencil>,
    pub lengths: Option<Vec<usize>>,
    pub range: Option<SweepSpec>,
    pub fits: Vec<FitRequest>,
    pub crossover: bool,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub log_x: bool,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn apply(self, mut config: Config) -> Result<Config> {
        if config.model.is_none() && config.models.is_empty() {
            if let Some(kind) = self.kind {
                config.model = Some(LabeledModel {
                    label: None,
                    spec: ModelSpec::new(kind, 0.0),
                });
            }
        }
        for m in config.model.iter_mut().chain(config.models.iter_mut()) {
            if let Some(kind) = self.kind {
                m.spec.kind = kind;
            }
            if let Some(alpha) = self.alpha {
                m.spec.alpha = alpha;
            }
            if let Some(filling) = self.filling {
                m.spec.filling = filling;
            }
        }
        if let Some(extent) = self.extent {
            let mut lattice = LatticeSpec::new(extent).map_err(|e| Usage(e.to_string()))?;
            // a previous stencil carries over only within the same dimension
            if let Some(old) = config.lattice.as_ref().filter(|l| l.dim() == lattice.dim()) {
                lattice = lattice.with_stencil(old.stencil());
            }
            config.lattice = Some(lattice);
        }
        if let Some(stencil) = self.stencil {
            let lattice = config.lattice.take().ok_or_else(|| Usage("--stencil needs a lattice".into()))?;
            config.lattice = Some(lattice.with_stencil(stencil));
        }
        if let Some(lengths) = self.lengths {
            config.sweep = Some(SweepSpec::List(lengths));
        }
        if let Some(range) = self.range {
            config.sweep = Some(range);
        }
        if !self.fits.is_empty() {
            config.fits = self.fits;
        }
        config.crossover |= self.crossover;
        if self.csv.is_some() {
            config.output.csv = self.csv;
        }
        if self.svg.is_some() {
            config.output.svg = self.svg;
        }
        config.output.log_x |= self.log_x;
        if self.seed.is_some() {
            config.seed = self.seed;
        }
        if self.workers.is_some() {
            config.workers = self.workers;
        }
        Ok(config)
    }
}
