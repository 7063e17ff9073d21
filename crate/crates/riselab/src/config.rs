//! Scenario manifests.
//!
//! A manifest is a TOML file; every field has a default, so an empty file is
//! a valid manifest. Command-line flags override the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use riselab_core::{ConcaveWeight, RadialWeight, Young};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};
use crate::generate::InstanceKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Conservation,
    Pythagoras,
    Triangle,
    Contraction,
    FlatCompare,
    MeetBound,
    MonotoneApprox,
    LeastAction,
    MetricTable,
    LagrangianStructure,
    ExploratoryStrongTriangle,
}

impl Scenario {
    pub const ALL: [Scenario; 11] = [
        Scenario::Conservation,
        Scenario::Pythagoras,
        Scenario::Triangle,
        Scenario::Contraction,
        Scenario::FlatCompare,
        Scenario::MeetBound,
        Scenario::MonotoneApprox,
        Scenario::LeastAction,
        Scenario::MetricTable,
        Scenario::LagrangianStructure,
        Scenario::ExploratoryStrongTriangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Conservation => "conservation",
            Scenario::Pythagoras => "pythagoras",
            Scenario::Triangle => "triangle",
            Scenario::Contraction => "contraction",
            Scenario::FlatCompare => "flat-compare",
            Scenario::MeetBound => "meet-bound",
            Scenario::MonotoneApprox => "monotone-approx",
            Scenario::LeastAction => "least-action",
            Scenario::MetricTable => "metric-table",
            Scenario::LagrangianStructure => "lagrangian-structure",
            Scenario::ExploratoryStrongTriangle => "exploratory-strong-triangle",
        }
    }

    /// Scenarios that only record findings and never fail a run.
    pub fn is_exploratory(self) -> bool {
        self == Scenario::ExploratoryStrongTriangle
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

/// Which random instances a scenario draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindChoice {
    /// Kinky for even seeds, smooth for odd ones.
    Mixed,
    Kinky,
    Smooth,
}

impl KindChoice {
    pub fn for_seed(self, seed: u64) -> InstanceKind {
        match self {
            KindChoice::Kinky => InstanceKind::Kinky,
            KindChoice::Smooth => InstanceKind::Smooth,
            KindChoice::Mixed if seed.is_multiple_of(2) => InstanceKind::Kinky,
            KindChoice::Mixed => InstanceKind::Smooth,
        }
    }
}

/// Tolerances. Discretization tolerances are dimensionless multipliers of
/// the scale named on each field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Identities exact in exact arithmetic.
    pub identity: f64,
    /// Inequalities exact in exact arithmetic.
    pub inequality: f64,
    /// Conservation deviation in units of `h + dt`.
    pub conservation: f64,
    /// Flat comparisons in units of diameter times x spacing.
    pub flat: f64,
    /// Final truncation deviation in units of slope bound times `h`.
    pub monotone: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { identity: 1e-12, inequality: 1e-9, conservation: 6.0, flat: 1.0, monotone: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Option<Scenario>,
    pub dim: usize,
    /// Intervals per axis of the polytope grid.
    pub grid: usize,
    pub seeds: u64,
    pub base_seed: u64,
    pub dt: f64,
    pub kind: KindChoice,
    pub tolerances: Tolerances,
    /// Weights for `d_χ`, by name (`pow2`, `soft-quadratic`, `huber`,
    /// `log1p`, `concave-pow0.5`, ...).
    pub chi: Vec<String>,
    /// Exponents for `d_p`.
    pub p: Vec<f64>,
    /// Lagrangians for actions, by name (`linear`, `weight`, `fenchel`,
    /// `orlicz-integral:pow2`, `orlicz-norm:huber`, ...).
    pub lagrangians: Vec<String>,
    /// Grids for refinement studies.
    pub grid_sweep: Vec<usize>,
    /// For metric-table: use `û_v = û_u − shift` instead of a random `v`.
    pub shift: Option<f64>,
    /// Potential files used instead of generated instances.
    pub potentials: Vec<PathBuf>,
    /// Write every generated instance under `out/instances`.
    pub write_instances: bool,
    pub out: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: None,
            dim: 1,
            grid: 64,
            seeds: 10,
            base_seed: 0,
            dt: 1.0 / 256.0,
            kind: KindChoice::Mixed,
            tolerances: Tolerances::default(),
            chi: ["pow1", "pow2", "soft-quadratic", "huber", "log1p", "concave-pow0.5"].map(String::from).to_vec(),
            p: vec![1.0, 2.0, 3.0],
            lagrangians: [
                "linear",
                "weight",
                "fenchel",
                "orlicz-integral:pow1",
                "orlicz-integral:pow2",
                "orlicz-integral:soft-quadratic",
                "orlicz-integral:huber",
                "orlicz-norm:pow1",
                "orlicz-norm:pow2",
                "orlicz-norm:pow4",
                "orlicz-norm:huber",
            ]
            .map(String::from)
            .to_vec(),
            grid_sweep: Vec::new(),
            shift: None,
            potentials: Vec::new(),
            write_instances: false,
            out: PathBuf::from("riselab-out"),
        }
    }
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<u64>,
    pub dt: Option<f64>,
    pub out: Option<PathBuf>,
}

/// A Lagrangian selected by name; `weight` and `fenchel` are drawn per seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LagrangianChoice {
    Linear,
    RandomWeight,
    RandomFenchel,
    OrliczIntegral(Young),
    OrliczNorm(Young),
}

impl LagrangianChoice {
    pub fn label(self) -> String {
        match self {
            LagrangianChoice::Linear => "linear".into(),
            LagrangianChoice::RandomWeight => "weight".into(),
            LagrangianChoice::RandomFenchel => "fenchel".into(),
            LagrangianChoice::OrliczIntegral(y) => format!("orlicz-integral:{}", y.name()),
            LagrangianChoice::OrliczNorm(y) => format!("orlicz-norm:{}", y.name()),
        }
    }
}

pub fn parse_young(s: &str) -> Result<Young, String> {
    let y = match s {
        "soft-quadratic" => Young::SoftQuadratic,
        "huber" => Young::Huber,
        _ => {
            let p = s.strip_prefix("pow").and_then(|p| p.parse::<f64>().ok());
            Young::Power(p.ok_or_else(|| format!("unknown convex weight `{s}`"))?)
        }
    };
    y.validate().map_err(|e| format!("`{s}`: {e}"))
}

pub fn parse_radial(s: &str) -> Result<RadialWeight, String> {
    if s == "log1p" {
        return Ok(RadialWeight::Concave(ConcaveWeight::Log1p));
    }
    if let Some(p) = s.strip_prefix("concave-pow") {
        let p: f64 = p.parse().map_err(|_| format!("unknown weight `{s}`"))?;
        return ConcaveWeight::Power(p).validate().map(RadialWeight::Concave).map_err(|e| format!("`{s}`: {e}"));
    }
    parse_young(s).map(RadialWeight::Young)
}

pub fn parse_lagrangian(s: &str) -> Result<LagrangianChoice, String> {
    match s {
        "linear" => Ok(LagrangianChoice::Linear),
        "weight" => Ok(LagrangianChoice::RandomWeight),
        "fenchel" => Ok(LagrangianChoice::RandomFenchel),
        _ => {
            if let Some(y) = s.strip_prefix("orlicz-integral:") {
                Ok(LagrangianChoice::OrliczIntegral(parse_young(y)?))
            } else if let Some(y) = s.strip_prefix("orlicz-norm:") {
                Ok(LagrangianChoice::OrliczNorm(parse_young(y)?))
            } else {
                Err(format!("unknown Lagrangian `{s}`"))
            }
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        // an unreadable manifest is a usage error, not an output failure
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        Self::from_toml(&text).map_err(|message| LabError::Parse { path: path.to_path_buf(), message })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.scenario {
            self.scenario = Some(s);
        }
        if let Some(m) = o.grid {
            self.grid = m;
        }
        if let Some(s) = o.seed {
            self.base_seed = s;
        }
        if let Some(n) = o.seeds {
            self.seeds = n;
        }
        if let Some(dt) = o.dt {
            self.dt = dt;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
    }

    pub fn h(&self) -> f64 {
        1.0 / self.grid as f64
    }

    pub fn radial_weights(&self) -> Result<Vec<RadialWeight>, String> {
        self.chi.iter().map(|s| parse_radial(s)).collect()
    }

    pub fn lagrangian_choices(&self) -> Result<Vec<LagrangianChoice>, String> {
        self.lagrangians.iter().map(|s| parse_lagrangian(s)).collect()
    }

    /// Checks every invariant of a runnable manifest.
    pub fn validate(&self) -> LabResult<Scenario> {
        let bad = |m: String| Err(LabError::Config(m));
        let Some(scenario) = self.scenario else {
            return bad("no scenario given".into());
        };
        if self.dim != 1 && self.dim != 2 {
            return bad(format!("dim must be 1 or 2, got {}", self.dim));
        }
        if self.grid < 8 {
            return bad(format!("grid must be at least 8, got {}", self.grid));
        }
        if self.seeds < 1 {
            return bad("seeds must be at least 1".into());
        }
        if !(self.dt > 0.0 && self.dt <= 0.125) {
            return bad(format!("dt must lie in (0, 1/8], got {}", self.dt));
        }
        if let Some(&m) = self.grid_sweep.iter().find(|&&m| m < 8) {
            return bad(format!("grid_sweep entries must be at least 8, got {m}"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("identity", t.identity),
            ("inequality", t.inequality),
            ("conservation", t.conservation),
            ("flat", t.flat),
            ("monotone", t.monotone),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("tolerance `{name}` must be finite and nonnegative"));
            }
        }
        if let Some(p) = self.p.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
            return bad(format!("d_p exponents must be at least 1, got {p}"));
        }
        self.radial_weights().map_err(LabError::Config)?;
        self.lagrangian_choices().map_err(LabError::Config)?;
        match scenario {
            Scenario::Conservation => {
                if self.dim != 1 {
                    return bad("conservation runs in one dimension".into());
                }
                if self.dt >= self.h() {
                    return bad(format!("grid too coarse for dt: need dt < h = {}, got {}", self.h(), self.dt));
                }
            }
            Scenario::MetricTable => {
                if let Some(c) = self.shift {
                    if !c.is_finite() {
                        return bad("shift must be finite".into());
                    }
                }
            }
            _ => {}
        }
        let needed = match scenario {
            Scenario::Triangle | Scenario::MeetBound | Scenario::ExploratoryStrongTriangle => 3,
            Scenario::LagrangianStructure => 0,
            _ => 2,
        };
        if !self.potentials.is_empty() && self.potentials.len() < needed {
            return bad(format!("{scenario} needs {needed} potential files, got {}", self.potentials.len()));
        }
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_takes_defaults() {
        let c = ScenarioConfig::from_toml("").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert!(c.validate().is_err());
    }

    #[test]
    fn manifest_fields_and_overrides() {
        let text = r#"
            scenario = "flat-compare"
            dim = 2
            grid = 16
            seeds = 5
            kind = "smooth"
            [tolerances]
            flat = 2.0
        "#;
        let mut c = ScenarioConfig::from_toml(text).unwrap();
        assert_eq!(c.scenario, Some(Scenario::FlatCompare));
        assert_eq!(c.tolerances.flat, 2.0);
        assert_eq!(c.tolerances.identity, 1e-12);
        c.apply(&Overrides { grid: Some(32), seed: Some(9), ..Default::default() });
        assert_eq!((c.grid, c.base_seed, c.seeds), (32, 9, 5));
        assert_eq!(c.validate().unwrap(), Scenario::FlatCompare);
    }

    #[test]
    fn invariants_are_enforced() {
        let base = ScenarioConfig { scenario: Some(Scenario::Pythagoras), ..Default::default() };
        assert!(base.validate().is_ok());
        assert!(ScenarioConfig { grid: 4, ..base.clone() }.validate().is_err());
        assert!(ScenarioConfig { seeds: 0, ..base.clone() }.validate().is_err());
        assert!(ScenarioConfig { dt: 0.2, ..base.clone() }.validate().is_err());
        assert!(ScenarioConfig { dim: 3, ..base.clone() }.validate().is_err());
        assert!(ScenarioConfig { chi: vec!["pow9".into()], ..base.clone() }.validate().is_err());
        let cons = ScenarioConfig { scenario: Some(Scenario::Conservation), grid: 8, dt: 0.125, ..base };
        assert!(cons.validate().is_err());
        assert!(ScenarioConfig { dt: 1.0 / 16.0, ..cons }.validate().is_ok());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ScenarioConfig::from_toml("gird = 64").is_err());
        assert!(ScenarioConfig::from_toml("scenario = \"nope\"").is_err());
    }

    #[test]
    fn weight_names() {
        assert_eq!(parse_young("pow1.5").unwrap(), Young::Power(1.5));
        assert_eq!(parse_radial("concave-pow0.5").unwrap(), RadialWeight::Concave(ConcaveWeight::Power(0.5)));
        assert!(parse_radial("concave-pow2").is_err());
        assert_eq!(parse_lagrangian("orlicz-norm:huber").unwrap(), LagrangianChoice::OrliczNorm(Young::Huber));
        for c in ScenarioConfig::default().lagrangian_choices().unwrap() {
            assert_eq!(parse_lagrangian(&c.label()).unwrap(), c);
        }
    }
}
