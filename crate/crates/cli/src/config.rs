use std::path::{Path, PathBuf};

use num_complex::Complex;
use sbpsat::experiments::{InitialData, ProblemParameters};
use sbpsat::model_problems::MappingSpec;
use sbpsat::AccuracyOrder;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Accuracy order as written in a config file: `4`, `"4"`, `"4,2"` or `"(4,2)"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OrderValue {
    Interior(u32),
    Text(String),
}

impl OrderValue {
    pub fn resolve(&self) -> CliResult<AccuracyOrder> {
        match self {
            Self::Interior(p) => Ok(AccuracyOrder::from_interior(*p)?),
            Self::Text(s) => parse_order(s),
        }
    }
}

pub fn parse_order(text: &str) -> CliResult<AccuracyOrder> {
    let trimmed = text.trim().trim_start_matches('(').trim_end_matches(')');
    let invalid = || CliError::Invalid {
        field: "order",
        reason: format!("expected `p` or `p,r`, got {text:?}"),
    };
    let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
    let number = |s: &str| s.parse::<u32>().map_err(|_| invalid());
    match parts.as_slice() {
        [p] => Ok(AccuracyOrder::from_interior(number(p)?)?),
        [p, r] => Ok(AccuracyOrder::new(number(p)?, number(r)?)?),
        _ => Err(invalid()),
    }
}

/// Parses `a+bi`, `a-bi`, `a`, or `bi`.
pub fn parse_complex(field: &'static str, text: &str) -> CliResult<Complex<f64>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    compact.parse::<Complex<f64>>().map_err(|_| CliError::Invalid {
        field,
        reason: format!("expected a complex number such as \"-1+2i\", got {text:?}"),
    })
}

/// Flat experiment configuration. Every field is optional; command-line
/// flags are overlaid on the file and commands fill in their own defaults.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Option<String>,
    pub system: Option<String>,
    pub order: Option<OrderValue>,
    pub levels: Option<Vec<usize>>,
    pub n: Option<usize>,
    pub nodes: Option<usize>,
    pub rate_nodes: Option<Vec<usize>>,
    pub speed: Option<f64>,
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub sigma_left: Option<f64>,
    pub sigma_right: Option<f64>,
    pub stretch_amplitude: Option<f64>,
    pub lambda: Option<String>,
    pub initial_value: Option<String>,
    pub t_final: Option<f64>,
    pub cfl_safety: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub perturbations: Option<Vec<f64>>,
    pub allow_unstable: Option<bool>,
    pub initial: Option<InitialData>,
    pub data: Option<bool>,
    pub sample_every: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::ParseConfig {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load_optional(path: Option<&Path>) -> CliResult<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    /// Fields set in `top` replace those of `self`.
    pub fn overlay(self, top: Self) -> Self {
        Self {
            problem: top.problem.or(self.problem),
            system: top.system.or(self.system),
            order: top.order.or(self.order),
            levels: top.levels.or(self.levels),
            n: top.n.or(self.n),
            nodes: top.nodes.or(self.nodes),
            rate_nodes: top.rate_nodes.or(self.rate_nodes),
            speed: top.speed.or(self.speed),
            epsilon: top.epsilon.or(self.epsilon),
            sigma: top.sigma.or(self.sigma),
            sigma_left: top.sigma_left.or(self.sigma_left),
            sigma_right: top.sigma_right.or(self.sigma_right),
            stretch_amplitude: top.stretch_amplitude.or(self.stretch_amplitude),
            lambda: top.lambda.or(self.lambda),
            initial_value: top.initial_value.or(self.initial_value),
            t_final: top.t_final.or(self.t_final),
            cfl_safety: top.cfl_safety.or(self.cfl_safety),
            out_dir: top.out_dir.or(self.out_dir),
            seed: top.seed.or(self.seed),
            count: top.count.or(self.count),
            perturbations: top.perturbations.or(self.perturbations),
            allow_unstable: top.allow_unstable.or(self.allow_unstable),
            initial: top.initial.or(self.initial),
            data: top.data.or(self.data),
            sample_every: top.sample_every.or(self.sample_every),
        }
    }

    pub fn order_or(&self, default: AccuracyOrder) -> CliResult<AccuracyOrder> {
        self.order.as_ref().map_or(Ok(default), OrderValue::resolve)
    }

    pub fn t_final_or(&self, default: f64) -> CliResult<f64> {
        let t = self.t_final.unwrap_or(default);
        if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(invalid("t_final", format!("must be positive and finite, got {t}")))
        }
    }

    pub fn cfl_safety_or(&self, default: f64) -> CliResult<f64> {
        let c = self.cfl_safety.unwrap_or(default);
        if c > 0.0 && c <= 1.0 {
            Ok(c)
        } else {
            Err(invalid("cfl_safety", format!("must lie in (0, 1], got {c}")))
        }
    }

    /// Physical and penalty parameters after range checks. Penalty
    /// admissibility is enforced when a system is assembled.
    pub fn parameters(&self) -> CliResult<ProblemParameters> {
        let defaults = ProblemParameters::default();
        let speed = self.speed.unwrap_or(defaults.speed);
        if !(speed.is_finite() && speed > 0.0) {
            return Err(invalid("speed", format!("must be positive, got {speed}")));
        }
        let epsilon = self.epsilon.unwrap_or(defaults.epsilon);
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
        }
        let mapping = match self.stretch_amplitude {
            None => defaults.mapping,
            Some(0.0) => MappingSpec::Identity,
            Some(a) if a.is_finite() => MappingSpec::SineStretch { amplitude: a },
            Some(a) => return Err(invalid("stretch_amplitude", format!("must be finite, got {a}"))),
        };
        for (name, value) in [
            ("sigma", self.sigma),
            ("sigma_left", self.sigma_left),
            ("sigma_right", self.sigma_right),
        ] {
            if value.is_some_and(|v| !v.is_finite()) {
                return Err(invalid(name, "must be finite".into()));
            }
        }
        Ok(ProblemParameters {
            speed,
            epsilon,
            sigma: self.sigma.unwrap_or(defaults.sigma),
            sigma_left: self.sigma_left.unwrap_or(defaults.sigma_left),
            sigma_right: self.sigma_right,
            mapping,
            allow_unstable: self.allow_unstable.unwrap_or(false),
        })
    }
}

pub fn invalid(field: &'static str, reason: String) -> CliError {
    CliError::Invalid { field, reason }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_spellings() {
        assert_eq!(parse_order("4").unwrap(), AccuracyOrder::FOURTH);
        assert_eq!(parse_order("(6,3)").unwrap(), AccuracyOrder::SIXTH);
        assert_eq!(parse_order(" 2, 1 ").unwrap(), AccuracyOrder::SECOND);
        assert!(matches!(
            parse_order("5"),
            Err(CliError::Core(sbpsat::Error::UnsupportedOrder { .. }))
        ));
        assert!(matches!(parse_order("4,3"), Err(CliError::Core(_))));
        assert!(matches!(parse_order("four"), Err(CliError::Invalid { .. })));
    }

    #[test]
    fn complex_spellings() {
        assert_eq!(parse_complex("lambda", "-1+2i").unwrap(), Complex::new(-1.0, 2.0));
        assert_eq!(parse_complex("lambda", "-1e4").unwrap(), Complex::new(-1e4, 0.0));
        assert_eq!(parse_complex("lambda", "3i").unwrap(), Complex::new(0.0, 3.0));
        assert_eq!(parse_complex("lambda", "-0.5 - 1i").unwrap(), Complex::new(-0.5, -1.0));
        assert!(parse_complex("lambda", "abc").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: ExperimentConfig = serde_json::from_str(r#"{"order": "6,3", "n": 33, "t_final": 2.0}"#).unwrap();
        let flags = ExperimentConfig {
            n: Some(65),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.n, Some(65));
        assert_eq!(merged.t_final, Some(2.0));
        assert_eq!(merged.order_or(AccuracyOrder::SECOND).unwrap(), AccuracyOrder::SIXTH);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"ordr": 4}"#).is_err());
    }

    #[test]
    fn integer_order_in_file() {
        let file: ExperimentConfig = serde_json::from_str(r#"{"order": 2}"#).unwrap();
        assert_eq!(file.order_or(AccuracyOrder::FOURTH).unwrap(), AccuracyOrder::SECOND);
    }
}
