//! Scenario configuration: flat `key=value` documents with `#` comments,
//! one scenario per file. Unknown keys are rejected and every diagnostic
//! carries the offending line and key.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: cannot parse `{text}` (expected key=value)")]
    Malformed { line: usize, text: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },

    #[error("line {line}: key `{key}`: expected {expected}, got `{value}`")]
    TypeMismatch {
        line: usize,
        key: String,
        expected: &'static str,
        value: String,
    },

    #[error("missing required key `{key}` for kind `{kind}`")]
    MissingKey { kind: String, key: &'static str },

    #[error("key `{key}` does not apply to kind `{kind}`")]
    ForeignKey { kind: String, key: String },

    #[error("unknown kind `{0}` (run `holonomy list-scenarios`)")]
    UnknownKind(String),

    #[error("missing required key `kind`")]
    MissingKind,

    #[error("key `{key}`: {message}")]
    BadValue { key: &'static str, message: String },
}

/// The built-in scenario families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Precession,
    RandomHamiltonian,
    RotatingField,
    FrameFamily,
    SpinMonopole,
    MeasurementLoop,
    GateCheck,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::Precession,
        ScenarioKind::RandomHamiltonian,
        ScenarioKind::RotatingField,
        ScenarioKind::FrameFamily,
        ScenarioKind::SpinMonopole,
        ScenarioKind::MeasurementLoop,
        ScenarioKind::GateCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Precession => "precession",
            ScenarioKind::RandomHamiltonian => "random-hamiltonian",
            ScenarioKind::RotatingField => "rotating-field",
            ScenarioKind::FrameFamily => "frame-family",
            ScenarioKind::SpinMonopole => "spin-monopole",
            ScenarioKind::MeasurementLoop => "measurement-loop",
            ScenarioKind::GateCheck => "gate-check",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            ScenarioKind::Precession => {
                "spin precession at polar angle theta: per-state phases, phase sum rule, mirror check"
            }
            ScenarioKind::RandomHamiltonian => {
                "seeded random constant Hamiltonian: cyclic-state phase table and sum-rule residual"
            }
            ScenarioKind::RotatingField => {
                "driven qubit (omega0, omega): time-dependent evolution and sum-rule residual"
            }
            ScenarioKind::FrameFamily => {
                "curvature 2-forms of a frame family (bloch | random): cancellation residual at two refinements"
            }
            ScenarioKind::SpinMonopole => {
                "radial spin-j field on a sphere mesh: integer band charges and their sum"
            }
            ScenarioKind::MeasurementLoop => {
                "projective measurement loop (octant | points): Bargmann geometric phase"
            }
            ScenarioKind::GateCheck => {
                "determinant verdict for a named gate (hadamard | identity)"
            }
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }

    /// Keys this kind accepts beyond `kind` itself.
    fn allowed_keys(&self) -> &'static [&'static str] {
        match self {
            ScenarioKind::Precession => {
                &["theta", "omega", "duration", "steps", "tolerance", "seed"]
            }
            ScenarioKind::RandomHamiltonian => &["dim", "seed", "duration", "steps", "tolerance"],
            ScenarioKind::RotatingField => {
                &["omega0", "omega", "duration", "steps", "tolerance", "seed"]
            }
            ScenarioKind::FrameFamily => &["family", "dim", "seed", "grid", "tolerance"],
            ScenarioKind::SpinMonopole => &["spin", "radius", "grid", "tolerance", "seed"],
            ScenarioKind::MeasurementLoop => &["loop", "points", "tolerance", "seed"],
            ScenarioKind::GateCheck => &["gate", "dim", "tolerance", "seed"],
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Frame family selector for `kind=frame-family`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyChoice {
    Bloch,
    Random,
}

/// Gate selector for `kind=gate-check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateChoice {
    Hadamard,
    Identity,
}

/// A fully resolved scenario: every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub dim: usize,
    pub seed: u64,
    pub steps: usize,
    pub grid: (usize, usize),
    pub duration: f64,
    pub tolerance: f64,
    pub theta: Option<f64>,
    pub omega: Option<f64>,
    pub omega0: Option<f64>,
    pub spin: Option<f64>,
    pub radius: Option<f64>,
    pub family: Option<FamilyChoice>,
    pub gate: Option<GateChoice>,
    pub loop_points: Option<Vec<Vec<(f64, f64)>>>,
}

pub const DEFAULT_STEPS: usize = 4096;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_GRID: (usize, usize) = (64, 64);

struct RawEntry {
    line: usize,
    value: String,
}

struct RawConfig {
    entries: Vec<(String, RawEntry)>,
}

impl RawConfig {
    fn take(&mut self, key: &str) -> Option<RawEntry> {
        self.entries
            .iter()
            .position(|(k, _)| k == key)
            .map(|idx| self.entries.remove(idx).1)
    }
}

fn parse_typed<T: FromStr>(
    entry: &RawEntry,
    key: &str,
    expected: &'static str,
) -> Result<T, ConfigError> {
    entry
        .value
        .parse::<T>()
        .map_err(|_| ConfigError::TypeMismatch {
            line: entry.line,
            key: key.to_string(),
            expected,
            value: entry.value.clone(),
        })
}

fn parse_grid(entry: &RawEntry) -> Result<(usize, usize), ConfigError> {
    let mismatch = || ConfigError::TypeMismatch {
        line: entry.line,
        key: "grid".into(),
        expected: "AxB, e.g. 64x64",
        value: entry.value.clone(),
    };
    let (a, b) = entry.value.split_once(['x', 'X']).ok_or_else(mismatch)?;
    let a = a.trim().parse::<usize>().map_err(|_| mismatch())?;
    let b = b.trim().parse::<usize>().map_err(|_| mismatch())?;
    if a < 2 || b < 2 {
        return Err(mismatch());
    }
    Ok((a, b))
}

/// `points` syntax: states separated by `;`, complex amplitudes within a
/// state separated by `,`, each amplitude in num-complex form (`0.7+0.7i`).
fn parse_points(entry: &RawEntry) -> Result<Vec<Vec<(f64, f64)>>, ConfigError> {
    let mut states = Vec::new();
    for state_text in entry.value.split(';') {
        let mut amps = Vec::new();
        for amp_text in state_text.split(',') {
            let z = num_complex::Complex64::from_str(amp_text.trim()).map_err(|_| {
                ConfigError::TypeMismatch {
                    line: entry.line,
                    key: "points".into(),
                    expected: "complex amplitude like 0.7+0.7i",
                    value: amp_text.trim().to_string(),
                }
            })?;
            amps.push((z.re, z.im));
        }
        states.push(amps);
    }
    Ok(states)
}

fn split_raw(text: &str) -> Result<RawConfig, ConfigError> {
    let mut entries: Vec<(String, RawEntry)> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ConfigError::Malformed {
            line,
            text: content.to_string(),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::DuplicateKey { line, key });
        }
        entries.push((key, RawEntry { line, value }));
    }
    Ok(RawConfig { entries })
}

const ALL_KEYS: [&str; 16] = [
    "kind",
    "dim",
    "seed",
    "steps",
    "grid",
    "duration",
    "tolerance",
    "theta",
    "omega",
    "omega0",
    "spin",
    "radius",
    "family",
    "gate",
    "loop",
    "points",
];

/// Parse and validate one scenario document, applying defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut raw = split_raw(text)?;

    // every key must at least be known globally
    if let Some((key, entry)) = raw
        .entries
        .iter()
        .find(|(k, _)| !ALL_KEYS.contains(&k.as_str()))
    {
        return Err(ConfigError::UnknownKey {
            line: entry.line,
            key: key.clone(),
        });
    }

    let kind_entry = raw.take("kind").ok_or(ConfigError::MissingKind)?;
    let kind = ScenarioKind::parse(&kind_entry.value)
        .ok_or_else(|| ConfigError::UnknownKind(kind_entry.value.clone()))?;

    // and must apply to this kind
    if let Some((key, entry)) = raw
        .entries
        .iter()
        .find(|(k, _)| !kind.allowed_keys().contains(&k.as_str()))
    {
        let _ = entry;
        return Err(ConfigError::ForeignKey {
            kind: kind.name().into(),
            key: key.clone(),
        });
    }

    let seed = match raw.take("seed") {
        Some(e) => parse_typed::<u64>(&e, "seed", "unsigned integer")?,
        None => 0,
    };
    let steps = match raw.take("steps") {
        Some(e) => {
            let v = parse_typed::<usize>(&e, "steps", "positive integer")?;
            if v == 0 {
                return Err(ConfigError::TypeMismatch {
                    line: e.line,
                    key: "steps".into(),
                    expected: "positive integer",
                    value: e.value,
                });
            }
            v
        }
        None => DEFAULT_STEPS,
    };
    let grid = match raw.take("grid") {
        Some(e) => parse_grid(&e)?,
        None => DEFAULT_GRID,
    };
    let tolerance = match raw.take("tolerance") {
        Some(e) => {
            let v = parse_typed::<f64>(&e, "tolerance", "positive real")?;
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::TypeMismatch {
                    line: e.line,
                    key: "tolerance".into(),
                    expected: "positive real",
                    value: e.value,
                });
            }
            v
        }
        None => DEFAULT_TOLERANCE,
    };

    let positive_real =
        |raw: &mut RawConfig, key: &'static str| -> Result<Option<f64>, ConfigError> {
            match raw.take(key) {
                Some(e) => {
                    let v = parse_typed::<f64>(&e, key, "positive real")?;
                    if !(v.is_finite() && v > 0.0) {
                        return Err(ConfigError::TypeMismatch {
                            line: e.line,
                            key: key.into(),
                            expected: "positive real",
                            value: e.value,
                        });
                    }
                    Ok(Some(v))
                }
                None => Ok(None),
            }
        };

    let theta = positive_real(&mut raw, "theta")?;
    let omega = positive_real(&mut raw, "omega")?.or(Some(1.0));
    let omega0 = positive_real(&mut raw, "omega0")?.or(Some(1.0));
    let spin = positive_real(&mut raw, "spin")?;
    let radius = positive_real(&mut raw, "radius")?.or(Some(1.0));
    let duration_key = positive_real(&mut raw, "duration")?;
    let dim_key = match raw.take("dim") {
        Some(e) => {
            let v = parse_typed::<usize>(&e, "dim", "integer >= 2")?;
            if v < 2 {
                return Err(ConfigError::TypeMismatch {
                    line: e.line,
                    key: "dim".into(),
                    expected: "integer >= 2",
                    value: e.value,
                });
            }
            Some(v)
        }
        None => None,
    };

    let family = match raw.take("family") {
        Some(e) => Some(match e.value.as_str() {
            "bloch" => FamilyChoice::Bloch,
            "random" => FamilyChoice::Random,
            _ => {
                return Err(ConfigError::TypeMismatch {
                    line: e.line,
                    key: "family".into(),
                    expected: "bloch | random",
                    value: e.value,
                })
            }
        }),
        None => None,
    };
    let gate = match raw.take("gate") {
        Some(e) => Some(match e.value.as_str() {
            "hadamard" => GateChoice::Hadamard,
            "identity" => GateChoice::Identity,
            _ => {
                return Err(ConfigError::TypeMismatch {
                    line: e.line,
                    key: "gate".into(),
                    expected: "hadamard | identity",
                    value: e.value,
                })
            }
        }),
        None => None,
    };
    let loop_choice = match raw.take("loop") {
        Some(e) => {
            if e.value != "octant" {
                return Err(ConfigError::TypeMismatch {
                    line: e.line,
                    key: "loop".into(),
                    expected: "octant",
                    value: e.value,
                });
            }
            Some(())
        }
        None => None,
    };
    let points = match raw.take("points") {
        Some(e) => Some(parse_points(&e)?),
        None => None,
    };

    // per-kind requirements and resolved dimension
    let (dim, theta, spin, family, gate, loop_points) = match kind {
        ScenarioKind::Precession => {
            let theta = theta.ok_or(ConfigError::MissingKey {
                kind: kind.name().into(),
                key: "theta",
            })?;
            if theta >= PI {
                return Err(ConfigError::BadValue {
                    key: "theta",
                    message: format!("polar angle must lie in (0, pi), got {theta}"),
                });
            }
            (2, Some(theta), None, None, None, None)
        }
        ScenarioKind::RandomHamiltonian => {
            let dim = dim_key.ok_or(ConfigError::MissingKey {
                kind: kind.name().into(),
                key: "dim",
            })?;
            (dim, None, None, None, None, None)
        }
        ScenarioKind::RotatingField => (2, None, None, None, None, None),
        ScenarioKind::FrameFamily => {
            let family = family.unwrap_or(FamilyChoice::Bloch);
            let dim = match family {
                FamilyChoice::Bloch => 2,
                FamilyChoice::Random => dim_key.unwrap_or(4),
            };
            (dim, None, None, Some(family), None, None)
        }
        ScenarioKind::SpinMonopole => {
            let spin = spin.unwrap_or(0.5);
            let two_j = 2.0 * spin;
            if (two_j - two_j.round()).abs() > 1e-12 || two_j < 1.0 {
                return Err(ConfigError::BadValue {
                    key: "spin",
                    message: format!("spin must be a positive half-integer, got {spin}"),
                });
            }
            let dim = two_j.round() as usize + 1;
            (dim, None, Some(spin), None, None, None)
        }
        ScenarioKind::MeasurementLoop => {
            if loop_choice.is_some() && points.is_some() {
                return Err(ConfigError::BadValue {
                    key: "points",
                    message: "give either loop=octant or points=..., not both".into(),
                });
            }
            match &points {
                Some(pts) => {
                    let dim = pts.first().map(|s| s.len()).unwrap_or(0);
                    if dim < 2 || pts.len() < 2 || pts.iter().any(|s| s.len() != dim) {
                        return Err(ConfigError::BadValue {
                            key: "points",
                            message: "need at least two states of one common dimension >= 2".into(),
                        });
                    }
                    (dim, None, None, None, None, points)
                }
                None => (2, None, None, None, None, None),
            }
        }
        ScenarioKind::GateCheck => {
            let gate = gate.ok_or(ConfigError::MissingKey {
                kind: kind.name().into(),
                key: "gate",
            })?;
            (dim_key.unwrap_or(2), None, None, None, Some(gate), None)
        }
    };

    // kind-aware duration default: one full drive period
    let duration = duration_key.unwrap_or(match kind {
        ScenarioKind::Precession | ScenarioKind::RotatingField => {
            2.0 * PI / omega.expect("defaulted")
        }
        _ => 1.0,
    });

    Ok(ScenarioConfig {
        kind,
        dim,
        seed,
        steps,
        grid,
        duration,
        tolerance,
        theta,
        omega,
        omega0,
        spin,
        radius,
        family,
        gate,
        loop_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precession_defaults_fill_in() {
        let cfg = parse_config("kind=precession\ntheta=1.25\n").unwrap();
        assert_eq!(cfg.kind, ScenarioKind::Precession);
        assert_eq!(cfg.steps, 4096);
        assert_eq!(cfg.grid, (64, 64));
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.tolerance, 1e-6);
        assert_eq!(cfg.dim, 2);
        assert!((cfg.duration - 2.0 * PI).abs() < 1e-12);
        assert_eq!(cfg.theta, Some(1.25));
    }

    #[test]
    fn gate_check_hadamard_dim_three() {
        let cfg = parse_config("kind=gate-check\ngate=hadamard\ndim=3\n").unwrap();
        assert_eq!(cfg.gate, Some(GateChoice::Hadamard));
        assert_eq!(cfg.dim, 3);
    }

    #[test]
    fn missing_theta_is_reported_by_name() {
        let err = parse_config("kind=precession\n").unwrap_err();
        assert!(matches!(err, ConfigError::MissingKey { key: "theta", .. }));
        assert!(err.to_string().contains("theta"));
    }

    #[test]
    fn unknown_kind_and_key_diagnostics() {
        assert!(matches!(
            parse_config("kind=warp-drive\n").unwrap_err(),
            ConfigError::UnknownKind(_)
        ));
        let err = parse_config("kind=precession\ntheta=1.0\nshininess=9\n").unwrap_err();
        match err {
            ConfigError::UnknownKey { line, key } => {
                assert_eq!(line, 3);
                assert_eq!(key, "shininess");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn foreign_key_for_kind_is_rejected() {
        let err = parse_config("kind=gate-check\ngate=hadamard\ntheta=0.4\n").unwrap_err();
        assert!(matches!(err, ConfigError::ForeignKey { .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg =
            parse_config("# a comment\n\nkind=rotating-field # trailing\nomega=2.0\n").unwrap();
        assert_eq!(cfg.kind, ScenarioKind::RotatingField);
        assert!((cfg.duration - PI).abs() < 1e-12);
    }

    #[test]
    fn type_mismatch_carries_line_and_key() {
        let err = parse_config("kind=precession\ntheta=sideways\n").unwrap_err();
        match err {
            ConfigError::TypeMismatch { line, key, .. } => {
                assert_eq!(line, 2);
                assert_eq!(key, "theta");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_parsing() {
        let cfg = parse_config("kind=spin-monopole\nspin=1.0\ngrid=60x60\n").unwrap();
        assert_eq!(cfg.grid, (60, 60));
        assert_eq!(cfg.dim, 3);
        assert!(parse_config("kind=spin-monopole\ngrid=60by60\n").is_err());
    }

    #[test]
    fn spin_must_be_half_integer() {
        assert!(parse_config("kind=spin-monopole\nspin=0.7\n").is_err());
        assert_eq!(
            parse_config("kind=spin-monopole\nspin=1.5\n").unwrap().dim,
            4
        );
    }

    #[test]
    fn measurement_loop_points_parse_complex_amplitudes() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let cfg = parse_config(&format!(
            "kind=measurement-loop\npoints=1,0; {r},{r}; {r},{r}i\n"
        ))
        .unwrap();
        let pts = cfg.loop_points.unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], vec![(1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(pts[2][1], (0.0, r));
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_config("kind=precession\ntheta=1\ntheta=2\n").unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { line: 3, .. }));
    }
}
