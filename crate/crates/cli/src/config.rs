//! Experiment configuration: a TOML file with one section per concern.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// A config problem, pinned to a line of the file when possible.
#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum DiskKind {
    Circle,
    Profile,
    Counterexample,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    pub kind: DiskKind,
    #[serde(default = "one")]
    pub radius: f64,
    /// CSV `s,kappa`, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for DiskSpec {
    fn default() -> Self {
        DiskSpec { kind: DiskKind::Circle, radius: 1.0, path: None }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind {
    /// Intersection of translates of the disk.
    Translates,
    /// A Euclidean circle of the given radius.
    Circle,
    /// The disk itself.
    Disk,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub kind: BodyKind,
    #[serde(default)]
    pub translates: Vec<[f64; 2]>,
    #[serde(default = "one")]
    pub radius: f64,
}

impl Default for BodySpec {
    fn default() -> Self {
        BodySpec { kind: BodyKind::Disk, translates: Vec::new(), radius: 1.0 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructParams {
    pub samples: usize,
}

impl Default for ReconstructParams {
    fn default() -> Self {
        ReconstructParams { samples: 1024 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DowkerParams {
    pub n_min: usize,
    pub n_max: usize,
    pub grid: usize,
}

impl Default for DowkerParams {
    fn default() -> Self {
        DowkerParams { n_min: 3, n_max: 7, grid: 2048 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleParams {
    pub samples: usize,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams { samples: 100 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DerivativeParams {
    pub samples: usize,
    /// Mixed-difference step, relative to the perimeter of `K`.
    pub step: f64,
}

impl Default for DerivativeParams {
    fn default() -> Self {
        DerivativeParams { samples: 50, step: 1e-4 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct PmParams {
    pub depth: u32,
}

impl Default for PmParams {
    fn default() -> Self {
        PmParams { depth: 12 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefinementParams {
    pub n_max: u32,
}

impl Default for RefinementParams {
    fn default() -> Self {
        RefinementParams { n_max: 1000 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleParams {
    pub kappa0: f64,
    pub lambda: f64,
    pub s0: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// Build even when `λ ≤ 9κ₀³/2`.
    pub control: bool,
    pub s_bar: Vec<f64>,
    /// Scale of the radial difference in the SVG overlay.
    pub exaggeration: f64,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        CounterexampleParams {
            kappa0: 1.0,
            lambda: 5.0,
            s0: 0.05,
            delta: 0.2,
            epsilon: 0.05,
            control: false,
            s_bar: vec![0.003, 0.005, 0.01],
            exaggeration: 20.0,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Where artifacts go; not echoed into reports, so moving a run does
    /// not change its bytes.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub disk: DiskSpec,
    /// Second disk for `pm-distance`.
    pub other: DiskSpec,
    pub body: BodySpec,
    pub reconstruct: ReconstructParams,
    pub dowker: DowkerParams,
    pub quadrangle: SampleParams,
    pub derivative_check: DerivativeParams,
    pub pm_distance: PmParams,
    pub refinement_demo: RefinementParams,
    pub counterexample: CounterexampleParams,
}

fn one() -> f64 {
    1.0
}

/// 1-based line of byte offset `at`.
fn line_at(text: &str, at: usize) -> usize {
    text[..at.min(text.len())].matches('\n').count() + 1
}

/// Line where `key` is assigned inside `[section]`, or the section header.
pub fn line_of(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    toml::from_str::<Config>(text).map_err(|e| ConfigError {
        line: e.span().map(|s| line_at(text, s.start)),
        message: e.message().to_string(),
    })
}

pub fn load(path: &Path) -> Result<(Config, String), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError { line: None, message: format!("{}: {e}", path.display()) })?;
    let mut cfg = parse(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    for spec in [&mut cfg.disk, &mut cfg.other] {
        if let Some(p) = spec.path.as_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
    Ok((cfg, text))
}

/// Range and consistency checks for the parts `command` uses.
pub fn validate(cfg: &Config, text: &str, command: &str) -> Result<(), ConfigError> {
    let err = |section: &str, key: &str, message: String| Err(ConfigError { line: line_of(text, section, key), message });
    let check_disk = |section: &str, d: &DiskSpec| -> Result<(), ConfigError> {
        match d.kind {
            DiskKind::Circle if !(d.radius > 0.0 && d.radius.is_finite()) => {
                err(section, "radius", format!("[{section}] radius must be positive, got {}", d.radius))
            }
            DiskKind::Profile => match &d.path {
                None => err(section, "kind", format!("[{section}] kind = \"profile\" needs a path")),
                Some(p) if !p.is_file() => err(section, "path", format!("[{section}] profile file {} does not exist", p.display())),
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    };
    check_disk("disk", &cfg.disk)?;
    if command == "pm-distance" {
        check_disk("other", &cfg.other)?;
    }
    if matches!(command, "dowker" | "quadrangle" | "derivative-check") {
        let b = &cfg.body;
        match b.kind {
            BodyKind::Translates if b.translates.is_empty() => {
                return err("body", "translates", "[body] kind = \"translates\" needs at least one translate".into());
            }
            BodyKind::Circle if !(b.radius > 0.0) => return err("body", "radius", format!("[body] radius must be positive, got {}", b.radius)),
            _ => {}
        }
    }
    if matches!(command, "quadrangle" | "derivative-check") && cfg.seed.is_none() {
        return Err(ConfigError { line: None, message: format!("`{command}` draws random samples and needs a seed (config `seed` or --seed)") });
    }
    match command {
        "reconstruct" if cfg.reconstruct.samples < 3 => err("reconstruct", "samples", "samples must be at least 3".into()),
        "dowker" => {
            let d = &cfg.dowker;
            if d.n_min < 3 {
                return err("dowker", "n_min", format!("n_min must be at least 3, got {}", d.n_min));
            }
            if d.n_max < d.n_min + 2 {
                return err("dowker", "n_max", format!("n_max must be at least n_min + 2 = {}, got {}", d.n_min + 2, d.n_max));
            }
            if d.grid < 8 * d.n_max || d.grid > 1 << 14 {
                return err("dowker", "grid", format!("grid must lie in [8 n_max, 16384] = [{}, 16384], got {}", 8 * d.n_max, d.grid));
            }
            Ok(())
        }
        "quadrangle" if cfg.quadrangle.samples == 0 => err("quadrangle", "samples", "samples must be positive".into()),
        "derivative-check" => {
            let d = &cfg.derivative_check;
            if d.samples == 0 {
                return err("derivative_check", "samples", "samples must be positive".into());
            }
            if !(d.step > 0.0 && d.step < 1e-2) {
                return err("derivative_check", "step", format!("step must lie in (0, 0.01), got {}", d.step));
            }
            Ok(())
        }
        "pm-distance" if cfg.pm_distance.depth > 20 => err("pm_distance", "depth", format!("depth must be at most 20, got {}", cfg.pm_distance.depth)),
        "refinement-demo" if !(2..=100_000).contains(&cfg.refinement_demo.n_max) => {
            err("refinement_demo", "n_max", format!("n_max must lie in [2, 100000], got {}", cfg.refinement_demo.n_max))
        }
        "counterexample" => {
            let c = &cfg.counterexample;
            if cfg.disk.kind == DiskKind::Counterexample {
                return err("disk", "kind", "counterexample needs a circle or profile base disk".into());
            }
            if c.s_bar.is_empty() || c.s_bar.iter().any(|&s| !(s > 0.0 && s <= c.s0)) {
                return err("counterexample", "s_bar", format!("s_bar entries must lie in (0, s0 = {}]", c.s0));
            }
            if !(c.exaggeration > 0.0) {
                return err("counterexample", "exaggeration", "exaggeration must be positive".into());
            }
            Ok(())
        }
        _ => Ok(()),
    }
}
