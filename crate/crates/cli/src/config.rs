//! Scenario files: TOML with one top-level `kind` and nested sections.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use serde::Deserialize;
use topophase_core::dynamics::DEFAULT_STEP;
use topophase_core::qlinalg::{Ket, Operator};
use topophase_core::{CouplingConfig, PointerParams, Trajectory, TrajectorySample};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<topophase_core::Error> for ConfigError {
    fn from(e: topophase_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Precession,
    TwoPath,
    VerifyC,
    PhaseUncertainty,
    Ensemble,
    DecohereSweep,
    CPi,
    TopologicalVsUniform,
    ScalarAb,
    Duality,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Precession => "precession",
            Kind::TwoPath => "two_path",
            Kind::VerifyC => "verify_c",
            Kind::PhaseUncertainty => "phase_uncertainty",
            Kind::Ensemble => "ensemble",
            Kind::DecohereSweep => "decohere_sweep",
            Kind::CPi => "c_pi",
            Kind::TopologicalVsUniform => "topological_vs_uniform",
            Kind::ScalarAb => "scalar_ab",
            Kind::Duality => "duality",
        }
    }
}

fn default_trials() -> usize {
    10_000
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// RK4 step for `precession`.
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub include_dynamical_phase: bool,
    #[serde(default)]
    pub extra_phase_a: f64,
    #[serde(default)]
    pub extra_phase_b: f64,
    #[serde(default)]
    pub spin: SpinSpec,
    pub coupling: Option<CouplingSection>,
    pub trajectory: Option<PathSection>,
    pub arm_a: Option<PathSection>,
    pub arm_b: Option<PathSection>,
    #[serde(default)]
    pub pointer: PointerSection,
    #[serde(default)]
    pub measurement: MeasurementSection,
    pub ensemble: Option<EnsembleSection>,
    pub field: Option<FieldSection>,
    pub duality: Option<DualitySection>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub xi: f64,
    pub mu: Option<f64>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
}

/// A path either as explicit `[t, θ, r]` knots or as a uniform arc given by
/// its sweep `delta_theta` or by the spin rotation `rotation` it produces.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSection {
    pub samples: Option<Vec<[f64; 3]>>,
    pub delta_theta: Option<f64>,
    pub rotation: Option<f64>,
    #[serde(default)]
    pub start_time: f64,
    #[serde(default)]
    pub start_theta: f64,
    pub duration: Option<f64>,
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SpinSpec {
    Named(String),
    Angles {
        polar: f64,
        #[serde(default)]
        azimuth: f64,
    },
}

impl Default for SpinSpec {
    fn default() -> Self {
        SpinSpec::Named("up".into())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointerSection {
    #[serde(default = "strong")]
    pub s: f64,
    #[serde(default = "unit")]
    pub width: f64,
    /// Resolutions to scan in `decohere_sweep` and `phase_uncertainty`.
    pub s_values: Option<Vec<f64>>,
}

fn strong() -> f64 {
    topophase_core::measurement::STRONG_RESOLUTION
}

fn unit() -> f64 {
    1.0
}

impl Default for PointerSection {
    fn default() -> Self {
        Self {
            s: strong(),
            width: unit(),
            s_values: None,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSection {
    pub coupling_time: Option<f64>,
    /// `"x"`, `"y"` or `"z"`.
    pub observable: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub spins: usize,
    pub phi: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    /// `[t, B]` knots of a homogeneous field, linear in between.
    pub samples: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualitySection {
    #[serde(default = "unit")]
    pub charge: f64,
    #[serde(default = "unit")]
    pub field: f64,
    /// `[t, V]` knots of the plate potential difference.
    pub potential: Vec<[f64; 2]>,
    /// `[t, d]` knots; derived from `charge·V/field` when absent.
    pub dipole: Option<Vec<[f64; 2]>>,
}

/// Dotted names accepted by `sweep --param`.
pub const NUMERIC_PARAMS: &[&str] = &[
    "seed",
    "trials",
    "step",
    "extra_phase_a",
    "extra_phase_b",
    "coupling.xi",
    "coupling.mu",
    "coupling.hbar",
    "coupling.mass",
    "pointer.s",
    "pointer.width",
    "measurement.coupling_time",
    "ensemble.spins",
    "ensemble.phi",
    "duality.charge",
    "duality.field",
    "spin.polar",
    "spin.azimuth",
];

const PATH_FIELDS: &[&str] = &[
    "delta_theta",
    "rotation",
    "start_time",
    "start_theta",
    "duration",
    "radius",
];

const INTEGER_PARAMS: &[&str] = &["seed", "trials", "ensemble.spins"];

pub fn is_numeric_param(name: &str) -> bool {
    if NUMERIC_PARAMS.contains(&name) {
        return true;
    }
    match name.split_once('.') {
        Some((section, field)) => {
            ["trajectory", "arm_a", "arm_b"].contains(&section) && PATH_FIELDS.contains(&field)
        }
        None => false,
    }
}

/// Writes `value` at the dotted `name` inside a parsed scenario table.
const SHAPE_KEYS: &[&str] = &["samples", "delta_theta", "rotation"];

pub fn set_param(table: &mut toml::Table, name: &str, value: f64) -> ConfigResult<()> {
    if !is_numeric_param(name) {
        return Err(ConfigError(format!("unknown sweep parameter `{name}`")));
    }
    let item = if INTEGER_PARAMS.contains(&name) {
        if value.fract() != 0.0 || value < 0.0 || value > i64::MAX as f64 {
            return Err(ConfigError(format!(
                "`{name}` takes non-negative integers, got {value}"
            )));
        }
        toml::Value::Integer(value as i64)
    } else {
        toml::Value::Float(value)
    };
    let mut node = table;
    let mut parts = name.split('.').peekable();
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            // a new path shape replaces whichever one the file gave
            if SHAPE_KEYS.contains(&part) {
                node.retain(|k, _| !SHAPE_KEYS.contains(&k));
            }
            node.insert(part.to_string(), item);
            break;
        }
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(ConfigError(format!("`{part}` is not a section"))),
        };
    }
    Ok(())
}

pub fn parse_table(text: &str) -> ConfigResult<toml::Table> {
    text.parse::<toml::Table>()
        .map_err(|e| ConfigError(format!("invalid TOML: {e}")))
}

pub fn from_table(table: toml::Table) -> ConfigResult<ScenarioConfig> {
    ScenarioConfig::deserialize(toml::Value::Table(table))
        .map_err(|e| ConfigError(format!("invalid scenario: {e}")))
}

impl ScenarioConfig {
    pub fn coupling(&self) -> ConfigResult<CouplingConfig> {
        let c = self.coupling.as_ref().ok_or_else(|| {
            ConfigError(format!(
                "{} needs a [coupling] section with key `xi`",
                self.kind.name()
            ))
        })?;
        let cfg = match c.mu {
            Some(mu) => CouplingConfig::from_mu_xi(mu, c.xi),
            None => CouplingConfig::from_xi(c.xi),
        }
        .map_err(|e| ConfigError(format!("coupling.xi/mu: {e}")))?;
        let cfg = cfg
            .with_hbar(c.hbar.unwrap_or(1.0))
            .map_err(|e| ConfigError(format!("coupling.hbar: {e}")))?;
        cfg.with_mass(c.mass.unwrap_or(1.0))
            .map_err(|e| ConfigError(format!("coupling.mass: {e}")))
    }

    pub fn spin(&self) -> ConfigResult<Ket> {
        match &self.spin {
            SpinSpec::Named(name) => match name.as_str() {
                "up" | "+z" => Ok(Ket::spin_up()),
                "down" | "-z" => Ok(Ket::spin_down()),
                "+x" => Ok(Ket::plus_x()),
                "-x" => Ok(Ket::minus_x()),
                "+y" => Ok(Ket::plus_y()),
                "-y" => Ok(Ket::spin_coherent(FRAC_PI_2, -FRAC_PI_2)),
                other => Err(ConfigError(format!(
                    "spin: unknown state `{other}` (use up, down, +x, -x, +y, -y or {{ polar, azimuth }})"
                ))),
            },
            SpinSpec::Angles { polar, azimuth } => {
                if !(polar.is_finite() && azimuth.is_finite()) {
                    return Err(ConfigError("spin.polar/azimuth must be finite".into()));
                }
                Ok(Ket::spin_coherent(*polar, *azimuth))
            }
        }
    }

    pub fn pointer(&self) -> ConfigResult<PointerParams> {
        pointer_with(self.pointer.s, self.pointer.width)
    }

    /// Pointer settings for each entry of `s_values`, or just `s`.
    pub fn pointer_scan(&self) -> ConfigResult<Vec<PointerParams>> {
        match &self.pointer.s_values {
            Some(list) => list
                .iter()
                .map(|&s| pointer_with(s, self.pointer.width))
                .collect(),
            None => Ok(vec![self.pointer()?]),
        }
    }

    pub fn observable(&self) -> ConfigResult<Operator> {
        match self.measurement.observable.as_deref().unwrap_or("x") {
            "x" => Ok(Operator::sigma_x()),
            "y" => Ok(Operator::sigma_y()),
            "z" => Ok(Operator::sigma_z()),
            other => Err(ConfigError(format!(
                "measurement.observable: expected x, y or z, got `{other}`"
            ))),
        }
    }

    pub fn trials_nonzero(&self) -> ConfigResult<usize> {
        if self.trials == 0 {
            return Err(ConfigError("trials must be positive".into()));
        }
        Ok(self.trials)
    }

    pub fn path(
        &self,
        section: &str,
        cfg: &CouplingConfig,
        fallback_rotation: Option<f64>,
    ) -> ConfigResult<Trajectory> {
        let spec = match section {
            "trajectory" => self.trajectory.as_ref(),
            "arm_a" => self.arm_a.as_ref(),
            "arm_b" => self.arm_b.as_ref(),
            _ => unreachable!("unknown path section"),
        };
        match (spec, fallback_rotation) {
            (Some(p), _) => build_path(section, p, cfg),
            (None, Some(chi)) => {
                let sweep = cfg
                    .sweep_for_rotation(chi)
                    .map_err(|e| ConfigError(format!("coupling.xi: {e}")))?;
                Ok(Trajectory::arc(0.0, 1.0, 0.0, sweep, 1.0)?)
            }
            (None, None) => Err(ConfigError(format!(
                "{} needs a [{section}] section",
                self.kind.name()
            ))),
        }
    }

    /// Closed single loop used by `duality` when no trajectory is given.
    pub fn duality_loop(&self, cfg: &CouplingConfig) -> ConfigResult<Trajectory> {
        match &self.trajectory {
            Some(p) => build_path("trajectory", p, cfg),
            None => Ok(Trajectory::arc(0.0, 1.0, 0.0, TAU, 1.0)?),
        }
    }
}

fn pointer_with(s: f64, width: f64) -> ConfigResult<PointerParams> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(ConfigError(format!("pointer.s must be finite and >= 0, got {s}")));
    }
    PointerParams::new(s * width, width).map_err(|e| ConfigError(format!("pointer.width: {e}")))
}

fn build_path(section: &str, p: &PathSection, cfg: &CouplingConfig) -> ConfigResult<Trajectory> {
    let wrap = |e: topophase_core::Error| ConfigError(format!("[{section}]: {e}"));
    let given = [p.samples.is_some(), p.delta_theta.is_some(), p.rotation.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(ConfigError(format!(
            "[{section}] needs exactly one of `samples`, `delta_theta`, `rotation`"
        )));
    }
    if let Some(samples) = &p.samples {
        if p.duration.is_some() || p.radius.is_some() {
            return Err(ConfigError(format!(
                "[{section}]: `duration`/`radius` do not apply to explicit samples"
            )));
        }
        let knots = samples
            .iter()
            .map(|&[t, theta, r]| TrajectorySample::new(t, theta, r))
            .collect();
        return Trajectory::new(knots).map_err(wrap);
    }
    let sweep = match (p.delta_theta, p.rotation) {
        (Some(d), _) => d,
        (_, Some(chi)) => cfg.sweep_for_rotation(chi).map_err(wrap)?,
        _ => unreachable!(),
    };
    let duration = p.duration.unwrap_or(1.0);
    Trajectory::arc(
        p.start_time,
        p.start_time + duration,
        p.start_theta,
        p.start_theta + sweep,
        p.radius.unwrap_or(1.0),
    )
    .map_err(wrap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_xi_is_named() {
        let t = parse_table("kind = \"precession\"\n[coupling]\nmu = 1.0\n").unwrap();
        let err = from_table(t).unwrap_err();
        assert!(err.0.contains("xi"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let t = parse_table("kind = \"precession\"\nsede = 3\n").unwrap();
        assert!(from_table(t).unwrap_err().0.contains("sede"));
    }

    #[test]
    fn set_param_creates_sections() {
        let mut t = parse_table("kind = \"ensemble\"\n").unwrap();
        set_param(&mut t, "ensemble.phi", 0.1).unwrap();
        set_param(&mut t, "ensemble.spins", 25.0).unwrap();
        let cfg = from_table(t).unwrap();
        let e = cfg.ensemble.unwrap();
        assert_eq!((e.spins, e.phi), (25, 0.1));
    }

    #[test]
    fn set_param_rejects_unknown_and_fractional() {
        let mut t = toml::Table::new();
        assert!(set_param(&mut t, "pointer.q", 1.0).is_err());
        assert!(set_param(&mut t, "trials", 2.5).is_err());
        assert!(set_param(&mut t, "arm_a.radius", 2.0).is_ok());
    }

    #[test]
    fn swept_shape_replaces_given_one() {
        let mut t = parse_table("kind = \"two_path\"\n[arm_a]\nrotation = 1.0\nradius = 2.0\n").unwrap();
        set_param(&mut t, "arm_a.delta_theta", 0.5).unwrap();
        let arm = from_table(t).unwrap().arm_a.unwrap();
        assert_eq!((arm.delta_theta, arm.rotation, arm.radius), (Some(0.5), None, Some(2.0)));
    }

    #[test]
    fn path_needs_one_shape() {
        let cfg = CouplingConfig::default();
        let p = PathSection {
            samples: None,
            delta_theta: Some(1.0),
            rotation: Some(1.0),
            start_time: 0.0,
            start_theta: 0.0,
            duration: None,
            radius: None,
        };
        assert!(build_path("trajectory", &p, &cfg).is_err());
    }
}
