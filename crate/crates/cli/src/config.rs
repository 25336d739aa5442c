//! Input parsing: system files and sweep grids.

use std::path::Path;

use oscavg_core::{Perturbation, QMatrix, Rational, SystemSpec, TrigPolyMatrix, TrigPolyTerm};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// On-disk system description; every number is an exact rational string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub alpha: Rational,
    pub a0: QMatrix,
    /// Grade `j` (from 1) as a list of `{frequency, matrix}` terms.
    pub grades: Vec<Vec<TrigPolyTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

impl SystemFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            CliError::Schema {
                path: origin.to_string(),
                field,
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn from_spec(spec: &SystemSpec) -> Self {
        SystemFile {
            alpha: spec.alpha().clone(),
            a0: spec.a0().clone(),
            grades: spec.grades().iter().map(TrigPolyMatrix::to_terms).collect(),
            perturbation: spec.perturbation().cloned(),
        }
    }

    pub fn to_spec(&self) -> Result<SystemSpec> {
        let n = self.a0.dim();
        let grades = self
            .grades
            .iter()
            .enumerate()
            .map(|(j, terms)| {
                TrigPolyMatrix::from_terms(n, terms.iter().map(|t| (t.frequency.clone(), t.matrix.clone()))).map_err(
                    |e| CliError::Schema {
                        path: "system".into(),
                        field: format!("grades[{j}]"),
                        line: 0,
                        column: 0,
                        message: e.to_string(),
                    },
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SystemSpec::new(self.a0.clone(), self.alpha.clone(), grades, self.perturbation.clone())?)
    }
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// Values along one sweep axis, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis(pub Vec<Rational>);

impl Axis {
    /// `lo:hi:steps` (evenly spaced, endpoints included) or a comma list.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |why: &str| CliError::Usage(format!("invalid grid axis {text:?}: {why}"));
        let rational = |s: &str| s.trim().parse::<Rational>().map_err(|e| bad(&e.to_string()));
        if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            let [lo, hi, steps] = parts.as_slice() else {
                return Err(bad("expected lo:hi:steps"));
            };
            let (lo, hi) = (rational(lo)?, rational(hi)?);
            let steps: usize = steps.trim().parse().map_err(|_| bad("steps must be a positive integer"))?;
            if steps == 0 {
                return Err(bad("steps must be at least 1"));
            }
            if steps == 1 {
                return Ok(Axis(vec![lo]));
            }
            let width = &(&hi - &lo) / &Rational::from_integer(steps as i64 - 1);
            Ok(Axis((0..steps).map(|i| &lo + &(&width * &Rational::from_integer(i as i64))).collect()))
        } else {
            let values = text.split(',').map(rational).collect::<Result<Vec<_>>>()?;
            Ok(Axis(values))
        }
    }
}

/// `λ-axis;α-axis`; cells run λ-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub lambda: Axis,
    pub alpha: Axis,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self> {
        let Some((l, a)) = text.split_once(';') else {
            return Err(CliError::Usage(format!("invalid grid {text:?}: expected \"<lambda axis>;<alpha axis>\"")));
        };
        Ok(Grid { lambda: Axis::parse(l)?, alpha: Axis::parse(a)? })
    }

    pub fn cells(&self) -> Vec<(Rational, Rational)> {
        self.lambda
            .0
            .iter()
            .flat_map(|l| self.alpha.0.iter().map(move |a| (l.clone(), a.clone())))
            .collect()
    }
}
