//! Scenario documents.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! kind = "quantum-lifecycle"
//! seed = 42
//!
//! [parameters]
//! parties = 3
//! amplitude_a = [0.6, 0.0]
//! amplitude_b = [0.0, 0.8]
//! splits = [[0, 3], [0, 3], [0, 3]]
//! ```
//!
//! Unknown keys are rejected, and so are parameters the chosen kind does not
//! use.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use qtcss_core::classical::AttackMethod;
use qtcss_core::quantum::SecretQubit;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    ClassicalDemo,
    ClassicalAttack,
    QuantumLifecycle,
    LeakageSweep,
    HidingTest,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::ClassicalDemo => "classical-demo",
            ScenarioKind::ClassicalAttack => "classical-attack",
            ScenarioKind::QuantumLifecycle => "quantum-lifecycle",
            ScenarioKind::LeakageSweep => "leakage-sweep",
            ScenarioKind::HidingTest => "hiding-test",
        }
    }

    fn allowed(&self) -> &'static [&'static str] {
        const DEALING: [&str; 6] = [
            "modulus",
            "parties",
            "x_degree",
            "y_degree",
            "secret",
            "polynomial",
        ];
        match self {
            ScenarioKind::ClassicalDemo => &DEALING,
            ScenarioKind::ClassicalAttack => &[
                "modulus",
                "parties",
                "x_degree",
                "y_degree",
                "secret",
                "polynomial",
                "colluders",
                "declared_threshold",
                "method",
                "deals",
            ],
            ScenarioKind::QuantumLifecycle => {
                &["parties", "amplitude_a", "amplitude_b", "splits", "stage"]
            }
            ScenarioKind::LeakageSweep => &["parties", "amplitude_a", "amplitude_b"],
            ScenarioKind::HidingTest => &["parties", "omega", "theta", "trials"],
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How far a quantum lifecycle runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Deal,
    Split,
    Reconstruct,
}

/// Split the handle at `index` in the current live list into `arity`
/// handles. The new handles go to the end of the list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStep(pub usize, pub usize);

impl SplitStep {
    pub fn index(&self) -> usize {
        self.0
    }

    pub fn arity(&self) -> usize {
        self.1
    }
}

impl FromStr for SplitStep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (index, arity) = s
            .split_once(':')
            .ok_or_else(|| format!("split step {s:?} is not index:arity"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("split step {s:?}: {e}"))
        };
        Ok(SplitStep(parse(index)?, parse(arity)?))
    }
}

/// Parses a complex number written `re,im`.
pub fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("{s:?} is not re,im"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    Ok([parse(re)?, parse(im)?])
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parties: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secret: Option<u64>,
    /// Coefficient rows by power of x: `polynomial[i][j]` multiplies `x^i y^j`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colluders: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared_threshold: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<AttackMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deals: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude_a: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude_b: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splits: Option<Vec<SplitStep>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

impl Parameters {
    fn present(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(map)) => map.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub parameters: Parameters,
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::InvalidScenario {
        field: field.to_string(),
        message: message.into(),
    }
}

impl Scenario {
    pub fn new(kind: ScenarioKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            parameters: Parameters::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let field = e
                .span()
                .and_then(|span| text.get(span))
                .map(|s| s.trim().to_string())
                .unwrap_or_else(|| "document".to_string());
            invalid(&field, message)
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenarios serialize")
    }

    /// Field-level checks that do not need to run anything.
    pub fn validate(&self) -> Result<(), CliError> {
        let allowed = self.kind.allowed();
        for name in self.parameters.present() {
            if !allowed.contains(&name.as_str()) {
                return Err(invalid(
                    &format!("parameters.{name}"),
                    format!("not used by {}", self.kind),
                ));
            }
        }
        let p = &self.parameters;
        if let Some(n) = p.parties {
            if n == 0 {
                return Err(invalid("parameters.parties", "must be at least 1"));
            }
        }
        for (name, value) in [("omega", p.omega), ("theta", p.theta)] {
            if value.is_some_and(|v| !v.is_finite()) {
                return Err(invalid(&format!("parameters.{name}"), "must be finite"));
            }
        }
        if p.trials == Some(0) {
            return Err(invalid("parameters.trials", "must be at least 1"));
        }
        if p.deals == Some(0) {
            return Err(invalid("parameters.deals", "must be at least 1"));
        }
        if let Some(splits) = &p.splits {
            if let Some(step) = splits.iter().find(|s| s.arity() < 2) {
                return Err(invalid(
                    "parameters.splits",
                    format!("arity {} is below 2", step.arity()),
                ));
            }
        }
        if p.amplitude_a.is_some() || p.amplitude_b.is_some() {
            self.secret_qubit()?;
        }
        Ok(())
    }

    /// The quantum secret, `0.6|0⟩ + 0.8i|1⟩` unless overridden.
    pub fn secret_qubit(&self) -> Result<SecretQubit, CliError> {
        let [ar, ai] = self.parameters.amplitude_a.unwrap_or([0.6, 0.0]);
        let [br, bi] = self.parameters.amplitude_b.unwrap_or([0.0, 0.8]);
        SecretQubit::new(Complex64::new(ar, ai), Complex64::new(br, bi))
            .map_err(|e| invalid("parameters.amplitude_a", format!("with amplitude_b: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lifecycle_document() {
        let s = Scenario::from_toml(
            r#"
kind = "quantum-lifecycle"
seed = 42

[parameters]
parties = 3
amplitude_a = [0.6, 0.0]
amplitude_b = [0.0, 0.8]
splits = [[0, 3], [0, 3], [0, 3]]
"#,
        )
        .unwrap();
        assert_eq!(s.kind, ScenarioKind::QuantumLifecycle);
        assert_eq!(s.seed, 42);
        assert_eq!(s.parameters.splits, Some(vec![SplitStep(0, 3); 3]));
        assert_eq!(Scenario::from_toml(&s.to_toml()).unwrap(), s);
    }

    #[test]
    fn rejects_unknown_and_misplaced_fields() {
        let e =
            Scenario::from_toml("kind = \"hiding-test\"\n[parameters]\nomgea = 1.0\n").unwrap_err();
        assert!(e.to_string().contains("omgea"), "{e}");
        let e = Scenario::from_toml("kind = \"hiding-test\"\n[parameters]\nmodulus = 11\n")
            .unwrap_err();
        assert_eq!(
            e,
            CliError::InvalidScenario {
                field: "parameters.modulus".into(),
                message: "not used by hiding-test".into()
            }
        );
        let e = Scenario::from_toml("kind = \"quantum-teleport\"\n").unwrap_err();
        assert!(matches!(e, CliError::InvalidScenario { .. }));
    }

    #[test]
    fn rejects_bad_values() {
        let e = Scenario::from_toml(
            "kind = \"leakage-sweep\"\n[parameters]\namplitude_a = [0.6, 0.0]\namplitude_b = [0.6, 0.0]\n",
        )
        .unwrap_err();
        assert!(
            matches!(e, CliError::InvalidScenario { ref field, .. } if field == "parameters.amplitude_a")
        );
        let e =
            Scenario::from_toml("kind = \"quantum-lifecycle\"\n[parameters]\nsplits = [[0, 1]]\n")
                .unwrap_err();
        assert!(
            matches!(e, CliError::InvalidScenario { ref field, .. } if field == "parameters.splits")
        );
        let e =
            Scenario::from_toml("kind = \"hiding-test\"\n[parameters]\ntrials = 0\n").unwrap_err();
        assert!(
            matches!(e, CliError::InvalidScenario { ref field, .. } if field == "parameters.trials")
        );
    }

    #[test]
    fn split_schedule_syntax() {
        assert_eq!("0:3".parse::<SplitStep>().unwrap(), SplitStep(0, 3));
        assert_eq!(" 2 : 2".parse::<SplitStep>().unwrap(), SplitStep(2, 2));
        assert!("0-3".parse::<SplitStep>().is_err());
        assert!("a:3".parse::<SplitStep>().is_err());
    }

    #[test]
    fn complex_syntax() {
        assert_eq!(parse_complex("0.6,-0.1").unwrap(), [0.6, -0.1]);
        assert!(parse_complex("0.6").is_err());
    }
}
