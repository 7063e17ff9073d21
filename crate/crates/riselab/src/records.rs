//! JSON records for the core types.
//!
//! Field names follow the published file formats: step functions carry `V`,
//! space functions carry `R`, and check results use `max_violation` and
//! `pass`.

use std::fs;
use std::path::Path;

use riselab_core::{
    Check, ConvexPotential, FenchelFamily, FenchelMember, LagrangianSpec, Pairing, Polytope, SpaceFunction,
    StepFunction, WeightedSample, XGrid, Young,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunctionRecord {
    #[serde(rename = "V")]
    pub v: f64,
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl From<&StepFunction> for StepFunctionRecord {
    fn from(f: &StepFunction) -> Self {
        StepFunctionRecord { v: f.mass(), breakpoints: f.breakpoints().to_vec(), values: f.values().to_vec() }
    }
}

impl TryFrom<StepFunctionRecord> for StepFunction {
    type Error = riselab_core::Error;

    fn try_from(r: StepFunctionRecord) -> Result<Self, Self::Error> {
        if r.breakpoints.last() != Some(&r.v) {
            return Err(riselab_core::Error::MassMismatch {
                left: r.v,
                right: r.breakpoints.last().copied().unwrap_or(f64::NAN),
            });
        }
        StepFunction::new(r.breakpoints, r.values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSampleRecord {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl From<&WeightedSample> for WeightedSampleRecord {
    fn from(s: &WeightedSample) -> Self {
        WeightedSampleRecord { values: s.values().to_vec(), weights: s.weights().to_vec() }
    }
}

impl TryFrom<WeightedSampleRecord> for WeightedSample {
    type Error = riselab_core::Error;

    fn try_from(r: WeightedSampleRecord) -> Result<Self, Self::Error> {
        WeightedSample::new(r.values, r.weights)
    }
}

/// A potential on a box, values row-major with the first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialRecord {
    pub dim: usize,
    pub bounds: Vec<[f64; 2]>,
    pub m: usize,
    pub values: Vec<f64>,
}

impl From<&ConvexPotential> for PotentialRecord {
    fn from(p: &ConvexPotential) -> Self {
        let poly = p.polytope();
        PotentialRecord {
            dim: poly.dim(),
            bounds: poly.bounds().iter().map(|&(a, b)| [a, b]).collect(),
            m: poly.m(),
            values: p.values().to_vec(),
        }
    }
}

impl TryFrom<PotentialRecord> for ConvexPotential {
    type Error = riselab_core::Error;

    fn try_from(r: PotentialRecord) -> Result<Self, Self::Error> {
        let bounds: Vec<(f64, f64)> = r.bounds.iter().map(|b| (b[0], b[1])).collect();
        ConvexPotential::new(Polytope::new(r.dim, &bounds, r.m)?, r.values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFunctionRecord {
    pub dim: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub n: usize,
    pub values: Vec<f64>,
}

impl From<&SpaceFunction> for SpaceFunctionRecord {
    fn from(f: &SpaceFunction) -> Self {
        let g = f.grid();
        SpaceFunctionRecord { dim: g.dim(), r: g.r(), n: g.n(), values: f.values().to_vec() }
    }
}

impl TryFrom<SpaceFunctionRecord> for SpaceFunction {
    type Error = riselab_core::Error;

    fn try_from(r: SpaceFunctionRecord) -> Result<Self, Self::Error> {
        SpaceFunction::new(XGrid::new(r.dim, r.r, r.n)?, r.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum YoungRecord {
    Power { p: f64 },
    SoftQuadratic,
    Huber,
}

impl From<Young> for YoungRecord {
    fn from(y: Young) -> Self {
        match y {
            Young::Power(p) => YoungRecord::Power { p },
            Young::SoftQuadratic => YoungRecord::SoftQuadratic,
            Young::Huber => YoungRecord::Huber,
        }
    }
}

impl TryFrom<YoungRecord> for Young {
    type Error = riselab_core::Error;

    fn try_from(r: YoungRecord) -> Result<Self, Self::Error> {
        match r {
            YoungRecord::Power { p } => Young::Power(p).validate(),
            YoungRecord::SoftQuadratic => Ok(Young::SoftQuadratic),
            YoungRecord::Huber => Ok(Young::Huber),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FenchelMemberRecord {
    pub a: f64,
    pub profile: WeightedSampleRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingRecord {
    Signed,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LagrangianRecord {
    Weight { weight: StepFunctionRecord },
    OrliczIntegral { chi: YoungRecord },
    OrliczNorm { chi: YoungRecord },
    Fenchel { pairing: PairingRecord, members: Vec<FenchelMemberRecord> },
}

impl From<&LagrangianSpec> for LagrangianRecord {
    fn from(spec: &LagrangianSpec) -> Self {
        match spec {
            LagrangianSpec::Weight(f) => LagrangianRecord::Weight { weight: f.into() },
            LagrangianSpec::OrliczIntegral(chi) => LagrangianRecord::OrliczIntegral { chi: (*chi).into() },
            LagrangianSpec::OrliczNorm(chi) => LagrangianRecord::OrliczNorm { chi: (*chi).into() },
            LagrangianSpec::Fenchel(fam) => LagrangianRecord::Fenchel {
                pairing: match fam.pairing() {
                    Pairing::Signed => PairingRecord::Signed,
                    Pairing::Absolute => PairingRecord::Absolute,
                },
                members: fam
                    .members()
                    .iter()
                    .map(|m| FenchelMemberRecord { a: m.a, profile: (&m.profile).into() })
                    .collect(),
            },
        }
    }
}

impl TryFrom<LagrangianRecord> for LagrangianSpec {
    type Error = riselab_core::Error;

    fn try_from(r: LagrangianRecord) -> Result<Self, Self::Error> {
        Ok(match r {
            LagrangianRecord::Weight { weight } => LagrangianSpec::Weight(weight.try_into()?),
            LagrangianRecord::OrliczIntegral { chi } => LagrangianSpec::OrliczIntegral(chi.try_into()?),
            LagrangianRecord::OrliczNorm { chi } => LagrangianSpec::OrliczNorm(chi.try_into()?),
            LagrangianRecord::Fenchel { pairing, members } => {
                let members = members
                    .into_iter()
                    .map(|m| Ok(FenchelMember { a: m.a, profile: m.profile.try_into()? }))
                    .collect::<Result<Vec<_>, riselab_core::Error>>()?;
                let pairing = match pairing {
                    PairingRecord::Signed => Pairing::Signed,
                    PairingRecord::Absolute => Pairing::Absolute,
                };
                LagrangianSpec::Fenchel(FenchelFamily::with_pairing(members, pairing)?)
            }
        })
    }
}

/// One check outcome for one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub seed: u64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn from_check(check: &Check, seed: u64) -> Self {
        CheckRecord {
            check: check.name.to_string(),
            seed,
            max_violation: check.max_violation,
            tolerance: check.tolerance,
            pass: check.passed(),
        }
    }

    /// A check under its own name, e.g. with a grid or Lagrangian suffix.
    pub fn named(name: impl Into<String>, check: &Check, seed: u64) -> Self {
        CheckRecord { check: name.into(), ..Self::from_check(check, seed) }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> LabResult<T> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| LabError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> LabResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("records serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

/// Reads a potential file and validates it.
pub fn read_potential(path: &Path) -> LabResult<ConvexPotential> {
    let record: PotentialRecord = read_json(path)?;
    record.try_into().map_err(|e: riselab_core::Error| LabError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use riselab_core::rearrange;

    #[test]
    fn step_function_uses_published_field_names() {
        let f = StepFunction::new(vec![0.0, 0.5, 1.0], vec![2.0, -1.0]).unwrap();
        let json = serde_json::to_string(&StepFunctionRecord::from(&f)).unwrap();
        assert_eq!(json, r#"{"V":1.0,"breakpoints":[0.0,0.5,1.0],"values":[2.0,-1.0]}"#);
        let back: StepFunctionRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(StepFunction::try_from(back).unwrap(), f);
    }

    #[test]
    fn mismatched_mass_is_rejected() {
        let r = StepFunctionRecord { v: 2.0, breakpoints: vec![0.0, 1.0], values: vec![1.0] };
        assert!(StepFunction::try_from(r).is_err());
    }

    #[test]
    fn potential_round_trip() {
        let poly = Polytope::unit(2, 8).unwrap();
        let u = ConvexPotential::from_fn(poly, |y| y[0] * y[0] + (y[1] - 0.5).abs()).unwrap();
        let json = serde_json::to_string(&PotentialRecord::from(&u)).unwrap();
        assert!(json.starts_with(r#"{"dim":2,"bounds":[[0.0,1.0],[0.0,1.0]],"m":8,"values":["#));
        let back: PotentialRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(ConvexPotential::try_from(back).unwrap(), u);
    }

    #[test]
    fn non_convex_potential_is_rejected() {
        let r = PotentialRecord { dim: 1, bounds: vec![[0.0, 1.0]], m: 8, values: vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0] };
        assert!(ConvexPotential::try_from(r).is_err());
    }

    #[test]
    fn space_function_round_trip() {
        let f = SpaceFunction::from_fn(XGrid::new(1, 2.0, 8).unwrap(), |x| x[0].abs()).unwrap();
        let rec = SpaceFunctionRecord::from(&f);
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains(r#""R":2.0"#));
        assert_eq!(SpaceFunction::try_from(rec).unwrap(), f);
    }

    #[test]
    fn lagrangians_round_trip() {
        let profile = WeightedSample::uniform(vec![1.0, -0.5], 1.0).unwrap();
        let specs = [
            LagrangianSpec::Weight(rearrange(&profile)),
            LagrangianSpec::OrliczIntegral(Young::Power(1.5)),
            LagrangianSpec::OrliczNorm(Young::Huber),
            LagrangianSpec::Fenchel(
                FenchelFamily::with_pairing(vec![FenchelMember { a: 0.25, profile }], Pairing::Absolute).unwrap(),
            ),
        ];
        for spec in specs {
            let json = serde_json::to_string(&LagrangianRecord::from(&spec)).unwrap();
            let back: LagrangianRecord = serde_json::from_str(&json).unwrap();
            assert_eq!(LagrangianSpec::try_from(back).unwrap(), spec);
        }
        let json = serde_json::to_string(&LagrangianRecord::from(&LagrangianSpec::OrliczNorm(Young::Power(2.0)))).unwrap();
        assert_eq!(json, r#"{"kind":"orlicz-norm","chi":{"kind":"power","p":2.0}}"#);
        let bad: LagrangianRecord = serde_json::from_str(r#"{"kind":"orlicz-norm","chi":{"kind":"power","p":7.0}}"#).unwrap();
        assert!(LagrangianSpec::try_from(bad).is_err());
    }

    #[test]
    fn check_record_fields() {
        let mut c = Check::new("pythagoras", 1e-12);
        c.equal(1.0, 1.0);
        let json = serde_json::to_string(&CheckRecord::from_check(&c, 3)).unwrap();
        assert_eq!(json, r#"{"check":"pythagoras","seed":3,"max_violation":0.0,"tolerance":1e-12,"pass":true}"#);
    }
}
