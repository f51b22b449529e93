//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// When to register the receiver's state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeChoice {
    Fixed(f64),
    Named(TimeKeyword),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeKeyword {
    Optimize,
}

impl TimeChoice {
    pub const OPTIMIZE: TimeChoice = TimeChoice::Named(TimeKeyword::Optimize);
}

impl FromStr for TimeChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "optimize" {
            return Ok(Self::OPTIMIZE);
        }
        match s.parse::<f64>() {
            Ok(t) if t.is_finite() => Ok(TimeChoice::Fixed(t)),
            _ => Err(format!("expected a time or `optimize`, got `{s}`")),
        }
    }
}

impl fmt::Display for TimeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeChoice::Fixed(t) => write!(f, "{t}"),
            TimeChoice::Named(TimeKeyword::Optimize) => f.write_str("optimize"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainSection {
    pub n: usize,
    pub coupling: f64,
}

impl Default for ChainSection {
    fn default() -> Self {
        ChainSection { n: 40, coupling: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub value: TimeChoice,
    /// Search interval and coarse step used by `optimize`.
    pub search_start: f64,
    pub search_stop: f64,
    pub search_step: f64,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection { value: TimeChoice::OPTIMIZE, search_start: 0.0, search_stop: 50.0, search_step: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub angle_step: f64,
    pub lambda_step: f64,
    pub lambda_start: f64,
    pub lambda_stop: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { angle_step: 0.05, lambda_step: 0.05, lambda_start: 0.0, lambda_stop: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub quantity: String,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { quantity: "concurrence_mean".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundarySection {
    pub angle_step: f64,
    pub refine_step: f64,
    pub tol: f64,
    pub ray_step: f64,
    /// When set, also trace the bisectrix crossing over this time grid.
    pub evolution: Option<[f64; 3]>,
}

impl Default for BoundarySection {
    fn default() -> Self {
        BoundarySection { angle_step: 0.05, refine_step: 0.005, tol: 1e-7, ray_step: 0.025, evolution: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContourSection {
    /// `(lambda_r, lambda_s)` pairs.
    pub pairs: Vec<[f64; 2]>,
    pub grid_step: f64,
    /// When set, contours are taken along the boundary moved by this distance
    /// instead of at `pairs`.
    pub shift: Option<f64>,
}

impl Default for ContourSection {
    fn default() -> Self {
        ContourSection { pairs: vec![[0.5, 1.0], [1.0, 1.0], [0.7988, 0.7988]], grid_step: 0.005, shift: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeCurveSection {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for TimeCurveSection {
    fn default() -> Self {
        TimeCurveSection { start: 0.0, stop: 50.0, step: 0.5 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub threads: Option<usize>,
    /// Directory of cached tensor archives; caching is off when absent.
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { threads: None, cache_dir: Some(PathBuf::from(".xychain-cache")) }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub chain: ChainSection,
    pub time: TimeSection,
    pub grids: GridSection,
    pub sweep: SweepSection,
    pub boundary: BoundarySection,
    pub contours: ContourSection,
    pub time_curves: TimeCurveSection,
    pub output: OutputSection,
    pub run: RunSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn sections_and_time_forms() {
        let c = RunConfig::parse(
            "[chain]\nn = 12\n[time]\nvalue = 3.5\n[contours]\npairs = [[0.5, 1.0]]\n[output]\nformat = \"json\"\n",
        )
        .unwrap();
        assert_eq!(c.chain.n, 12);
        assert_eq!(c.chain.coupling, 1.0);
        assert_eq!(c.time.value, TimeChoice::Fixed(3.5));
        assert_eq!(c.contours.pairs, vec![[0.5, 1.0]]);
        assert_eq!(c.output.format, Format::Json);
        let o = RunConfig::parse("[time]\nvalue = \"optimize\"\n").unwrap();
        assert_eq!(o.time.value, TimeChoice::OPTIMIZE);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("[chain]\nnodes = 3\n").is_err());
        assert!(RunConfig::parse("[extra]\n").is_err());
        assert!(RunConfig::parse("[time]\nvalue = \"later\"\n").is_err());
    }

    #[test]
    fn time_flag_parsing() {
        assert_eq!("optimize".parse::<TimeChoice>().unwrap(), TimeChoice::OPTIMIZE);
        assert_eq!("43.442".parse::<TimeChoice>().unwrap(), TimeChoice::Fixed(43.442));
        assert!("soon".parse::<TimeChoice>().is_err());
        assert!("inf".parse::<TimeChoice>().is_err());
    }
}
