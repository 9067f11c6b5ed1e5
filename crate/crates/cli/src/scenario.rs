//! Scenario files: TOML with an explicit `schema = 1` field.
//!
//! ```toml
//! schema = 1
//! kind = "network-run"        # element-sweep | network-run | cnn-run | analyze
//! output = "out/edge"         # optional, overridden by --out
//!
//! [network]
//! rows = 64
//! cols = 64
//! coupling = 0.1
//! pump_amplitude = 0.3
//! pump_period = 1.55
//! cycles = 200
//!
//! [bias]
//! source = "rectangle"
//! v_lo = 0.1
//! v_hi = 0.5
//! top = 22
//! left = 22
//! height = 20
//! width = 20
//! ```
//!
//! Unknown keys, missing required keys and sections the kind does not use
//! are all rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ElementSweep,
    NetworkRun,
    CnnRun,
    Analyze,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::ElementSweep => "element-sweep",
            Kind::NetworkRun => "network-run",
            Kind::CnnRun => "cnn-run",
            Kind::Analyze => "analyze",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub kind: Kind,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub element: Option<ElementSection>,
    pub network: Option<NetworkSection>,
    pub bias: Option<BiasSource>,
    pub initial_charge: Option<ChargeSource>,
    pub stochastic: Option<StochasticSection>,
    pub analysis: Option<AnalysisSection>,
    pub cnn: Option<CnnSection>,
    pub frames: Option<FramesSection>,
}

/// A single value or an evenly spaced range with both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SweepAxis {
    Value(f64),
    Range(AxisRange),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSection {
    pub v_dc: SweepAxis,
    pub v_ac: SweepAxis,
    pub pump_period: SweepAxis,
    #[serde(default)]
    pub pump_phase: f64,
    #[serde(default = "one")]
    pub resistance: f64,
    #[serde(default = "half")]
    pub threshold: f64,
    #[serde(default)]
    pub initial_charge: f64,
    #[serde(default = "default_transient")]
    pub transient_cycles: usize,
    #[serde(default = "default_window")]
    pub window_cycles: usize,
    #[serde(default = "default_steps")]
    pub steps_per_cycle: usize,
    #[serde(default = "default_jitter")]
    pub jitter_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    #[default]
    Open,
    Periodic,
    Fixed,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub rows: usize,
    pub cols: usize,
    pub coupling: f64,
    pub pump_amplitude: f64,
    pub pump_period: f64,
    pub cycles: usize,
    #[serde(default)]
    pub pump_phase: f64,
    #[serde(default = "one")]
    pub resistance: f64,
    #[serde(default = "half")]
    pub threshold: f64,
    #[serde(default = "default_steps")]
    pub steps_per_cycle: usize,
    #[serde(default)]
    pub boundary: BoundaryKind,
    /// Coupling to the fixed electrodes (`boundary = "fixed"` only).
    pub fixed_coupling: Option<f64>,
    /// Electrode voltage (`boundary = "fixed"` only).
    pub fixed_voltage: Option<f64>,
}

/// Where the bias grid comes from. Every source is a greyscale image
/// mapped onto `[v_lo, v_hi]` except `uniform`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BiasSource {
    Uniform {
        level: f64,
    },
    Image {
        path: PathBuf,
        v_lo: f64,
        v_hi: f64,
        #[serde(default = "one_usize")]
        pixel_scale: usize,
    },
    Rectangle {
        v_lo: f64,
        v_hi: f64,
        top: usize,
        left: usize,
        height: usize,
        width: usize,
    },
    SquareInSquare {
        v_lo: f64,
        v_hi: f64,
        inner: usize,
    },
    RampBlob {
        v_lo: f64,
        v_hi: f64,
        ramp_max: u8,
        blob_row: f64,
        blob_col: f64,
        blob_radius: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisName {
    Rows,
    Columns,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChargeSource {
    Uniform {
        value: f64,
    },
    Gradient {
        q_min: f64,
        q_max: f64,
        axis: AxisName,
    },
    Image {
        path: PathBuf,
        q_lo: f64,
        q_hi: f64,
        #[serde(default = "one_usize")]
        pixel_scale: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticSection {
    pub tunnel_resistance: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default)]
    pub transient_skip: usize,
    #[serde(default = "default_max_period")]
    pub max_period: usize,
    #[serde(default)]
    pub edge: bool,
    pub corner_radius: Option<usize>,
    #[serde(default)]
    pub segmentation: bool,
    #[serde(default)]
    pub centroid: bool,
    /// Emit `classes.pgm` for this lock order over the analyzed cycles.
    pub class_order: Option<u32>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            transient_skip: 0,
            max_period: default_max_period(),
            edge: false,
            corner_radius: None,
            segmentation: false,
            centroid: false,
            class_order: None,
        }
    }
}

/// Template given inline (19 numbers) or as a path to a text file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TemplateSpec {
    Inline(Vec<f64>),
    File(PathBuf),
}

/// A constant or a greyscale image mapped to `[-1, 1]` (0 -> -1, 255 -> 1).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Value(f64),
    Image(PathBuf),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnnSection {
    pub template: TemplateSpec,
    pub rows: usize,
    pub cols: usize,
    pub dt: f64,
    pub t_end: f64,
    pub tol: f64,
    pub x0: FieldSpec,
    pub u: FieldSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramesSection {
    /// Directory holding `cycle_%06d.pgm` frames.
    pub dir: PathBuf,
    /// Binary input mask for edge and corner scores.
    pub mask: Option<PathBuf>,
    /// Greyscale input for segmentation.
    pub gray: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    tplcnn_core::element::DEFAULT_THRESHOLD
}
fn one_usize() -> usize {
    1
}
fn default_transient() -> usize {
    100
}
fn default_window() -> usize {
    1000
}
fn default_steps() -> usize {
    tplcnn_core::element::DEFAULT_STEPS_PER_CYCLE
}
fn default_jitter() -> f64 {
    0.05
}
fn default_max_period() -> usize {
    64
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| CliError::config(e.to_string().replace('\n', " ")))?;
        scenario.check()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Scenario::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Schema version and section presence for the kind.
    pub fn check(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        let present = [
            ("element", self.element.is_some()),
            ("network", self.network.is_some()),
            ("bias", self.bias.is_some()),
            ("initial_charge", self.initial_charge.is_some()),
            ("stochastic", self.stochastic.is_some()),
            ("analysis", self.analysis.is_some()),
            ("cnn", self.cnn.is_some()),
            ("frames", self.frames.is_some()),
        ];
        let (required, allowed): (&[&str], &[&str]) = match self.kind {
            Kind::ElementSweep => (&["element"], &["element", "stochastic"]),
            Kind::NetworkRun => (
                &["network", "bias"],
                &["network", "bias", "initial_charge", "stochastic", "analysis"],
            ),
            Kind::CnnRun => (&["cnn"], &["cnn"]),
            Kind::Analyze => (&["frames"], &["frames", "analysis"]),
        };
        for (name, is_present) in present {
            if required.contains(&name) && !is_present {
                return Err(CliError::config(format!(
                    "{} scenario needs a [{name}] section",
                    self.kind.name()
                )));
            }
            if is_present && !allowed.contains(&name) {
                return Err(CliError::config(format!(
                    "[{name}] is not used by {} scenarios",
                    self.kind.name()
                )));
            }
        }
        if let Some(net) = &self.network {
            let fixed_keys = net.fixed_coupling.is_some() || net.fixed_voltage.is_some();
            match net.boundary {
                BoundaryKind::Fixed if net.fixed_coupling.is_none() || net.fixed_voltage.is_none() => {
                    return Err(CliError::config(
                        "boundary = \"fixed\" needs fixed_coupling and fixed_voltage",
                    ))
                }
                BoundaryKind::Open | BoundaryKind::Periodic if fixed_keys => {
                    return Err(CliError::config(
                        "fixed_coupling/fixed_voltage only apply to boundary = \"fixed\"",
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }
}
