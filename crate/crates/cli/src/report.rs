//! The per-case report and its one-line summary.

use oscavg_core::asymptotics::classify_remainder_dominated;
use oscavg_core::oracle::{
    Comparison, OracleFit, PredictedValue, StepStats, Verdict, VerifyOutcome, VerifySettings,
};
use oscavg_core::oscillator::{CasePrediction, Envelope, OscillatorConstants, Phase, SolutionForm};
use oscavg_core::{
    asymptotics, AveragedSystem, ComplexRational, GrowthClass, OscillatorCase, QMatrix, Rational, ResonanceTag,
    SystemSpec,
};
use serde::{Deserialize, Serialize};

use crate::config::SystemFile;

/// Square matrix of exact entries written as `"p/q"`, `"p/q+r/si"` and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExactMatrix(pub Vec<Vec<String>>);

impl ExactMatrix {
    pub fn new(m: &QMatrix) -> Self {
        ExactMatrix(m.rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect())
    }

    pub fn parse(&self) -> Result<QMatrix, String> {
        let rows = self
            .0
            .iter()
            .map(|r| r.iter().map(|s| s.parse::<ComplexRational>().map_err(|e| e.to_string())).collect())
            .collect::<Result<Vec<_>, _>>()?;
        QMatrix::from_rows(rows).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputEcho {
    Oscillator { lambda: Rational, alpha: Rational },
    System { system: SystemFile },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictionSummary {
    Leading {
        leading_index: usize,
        /// `lα`
        leading_power: Rational,
        /// Eigenvalues of the leading averaged matrix as `[re, im]`.
        eigenvalues: Vec<[f64; 2]>,
        growth: Vec<GrowthClass>,
    },
    RemainderDominated { growth: Vec<GrowthClass> },
}

impl PredictionSummary {
    pub fn growth(&self) -> &[GrowthClass] {
        match self {
            PredictionSummary::Leading { growth, .. } | PredictionSummary::RemainderDominated { growth } => growth,
        }
    }

    pub fn leading_index(&self) -> Option<usize> {
        match self {
            PredictionSummary::Leading { leading_index, .. } => Some(*leading_index),
            PredictionSummary::RemainderDominated { .. } => None,
        }
    }

    pub fn leading_power(&self) -> Option<&Rational> {
        match self {
            PredictionSummary::Leading { leading_power, .. } => Some(leading_power),
            PredictionSummary::RemainderDominated { .. } => None,
        }
    }

    fn from_case(prediction: &CasePrediction) -> Self {
        match prediction {
            CasePrediction::Leading(p) => Self::leading(p),
            CasePrediction::RemainderDominated { .. } => {
                PredictionSummary::RemainderDominated { growth: prediction.growth_classes() }
            }
        }
    }

    fn leading(p: &asymptotics::AsymptoticPrediction) -> Self {
        PredictionSummary::Leading {
            leading_index: p.leading_index,
            leading_power: p.leading_power(),
            eigenvalues: p.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            growth: p.growth.clone(),
        }
    }
}

/// One predicted fundamental solution of the oscillator, as data and as a formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    #[serde(flatten)]
    pub form: SolutionForm,
    pub formula: String,
}

impl SolutionReport {
    pub fn new(form: &SolutionForm) -> Self {
        SolutionReport { form: form.clone(), formula: render_form(form) }
    }
}

/// `y ≈ envelope · cos(t + phase) + o(1)`-style text.
pub fn render_form(form: &SolutionForm) -> String {
    let envelope = match &form.envelope {
        Envelope::Unit => String::new(),
        Envelope::Power { exponent } => format!("t^{exponent:.6} * "),
        Envelope::StretchedExp { coeff, power } => format!("exp({coeff:.6} * t^({power})) * "),
    };
    let signed = |x: f64| if x < 0.0 { format!(" - {:.6}", -x) } else { format!(" + {x:.6}") };
    let phase = match &form.phase {
        Phase::Shift { shift } if *shift == 0.0 => "cos(t)".to_string(),
        Phase::Shift { shift } => format!("cos(t{})", signed(*shift)),
        Phase::LogDrift { gamma } => format!("cos(t{} * ln t)", signed(*gamma)),
        Phase::PowerDrift { coeff, power } => format!("cos(t{} * t^({power}))", signed(*coeff)),
    };
    let remainder = if matches!(form.envelope, Envelope::Unit) { " + o(1)" } else { " * (1 + o(1))" };
    format!("{envelope}{phase}{remainder}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorDetails {
    pub resonance: ResonanceTag,
    pub constants: OscillatorConstants,
    pub solutions: Vec<SolutionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub settings: VerifySettings,
    pub target: PredictedValue,
    pub horizon: f64,
    pub window: (f64, f64),
    pub fit: Option<OracleFit>,
    pub comparison: Option<Comparison>,
    pub verdict: Verdict,
    pub stats: StepStats,
    pub wronskian_drift: f64,
}

impl VerificationReport {
    pub fn new(settings: &VerifySettings, outcome: &VerifyOutcome) -> Self {
        VerificationReport {
            settings: *settings,
            target: outcome.target,
            horizon: outcome.horizon,
            window: outcome.window,
            fit: outcome.fit.clone(),
            comparison: outcome.comparison.clone(),
            verdict: outcome.verdict,
            stats: outcome.stats.clone(),
            wronskian_drift: outcome.wronskian_drift,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub input: InputEcho,
    pub dimension: usize,
    pub alpha: Rational,
    pub k: usize,
    pub epsilon: Rational,
    pub t_star: f64,
    /// `A_0..A_k`.
    pub averaged: Vec<ExactMatrix>,
    /// Number of frequency terms in each transform grade `Y_0..Y_k`.
    pub transform_terms: Vec<usize>,
    pub prediction: PredictionSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillator: Option<OscillatorDetails>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

impl CaseReport {
    fn base(input: InputEcho, spec: &SystemSpec, averaged: &AveragedSystem, prediction: PredictionSummary) -> Self {
        CaseReport {
            input,
            dimension: spec.dim(),
            alpha: spec.alpha().clone(),
            k: averaged.k(),
            epsilon: averaged.remainder.epsilon.clone(),
            t_star: averaged.t_star,
            averaged: averaged.averaged.iter().map(ExactMatrix::new).collect(),
            transform_terms: averaged.transform.grades().iter().map(|g| g.term_count()).collect(),
            prediction,
            oscillator: None,
            verification: None,
        }
    }

    /// Report for a user-supplied system.
    pub fn for_system(file: &SystemFile, spec: &SystemSpec, averaged: &AveragedSystem) -> oscavg_core::Result<Self> {
        let prediction = match asymptotics::leading_index(&averaged.averaged) {
            None => PredictionSummary::RemainderDominated {
                growth: vec![classify_remainder_dominated(&averaged.remainder.epsilon); spec.dim()],
            },
            Some(_) => PredictionSummary::leading(&asymptotics::predict(averaged)?),
        };
        Ok(Self::base(InputEcho::System { system: file.clone() }, spec, averaged, prediction))
    }

    pub fn for_oscillator(case: &OscillatorCase) -> Self {
        let input = InputEcho::Oscillator { lambda: case.lambda.clone(), alpha: case.alpha.clone() };
        let mut report = Self::base(input, &case.system, &case.averaged, PredictionSummary::from_case(&case.prediction));
        report.oscillator = Some(OscillatorDetails {
            resonance: case.resonance,
            constants: case.constants.clone(),
            solutions: case.solution_forms.iter().map(SolutionReport::new).collect(),
        });
        report
    }

    pub fn summary(&self) -> CaseSummary {
        let growth = self.prediction.growth();
        let dominant = dominant_growth(growth);
        CaseSummary {
            resonance: self.oscillator.as_ref().map(|o| o.resonance),
            leading_index: self.prediction.leading_index(),
            leading_power: self.prediction.leading_power().cloned(),
            growth_class: dominant.map(|g| g.label().to_string()),
            growth_parameter: dominant.map(GrowthClass::parameter),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// The fastest-growing mode: stretched exponential above polynomial above
/// bounded, then by parameter. Decaying modes rank last.
pub fn dominant_growth(classes: &[GrowthClass]) -> Option<&GrowthClass> {
    let rank = |g: &GrowthClass| match g {
        GrowthClass::StretchedExponential { coeff, .. } if *coeff > 0.0 => 3,
        GrowthClass::Polynomial { exponent } if *exponent > 0.0 => 2,
        GrowthClass::Bounded | GrowthClass::LogPhase { .. } => 1,
        _ => 0,
    };
    classes.iter().max_by(|a, b| rank(a).cmp(&rank(b)).then(a.parameter().total_cmp(&b.parameter())))
}

/// The columns a sweep row shares with a single-case report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub resonance: Option<ResonanceTag>,
    pub leading_index: Option<usize>,
    pub leading_power: Option<Rational>,
    pub growth_class: Option<String>,
    pub growth_parameter: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use oscavg_core::analyze_case;
    use oscavg_core::rational::q;

    #[test]
    fn report_round_trips() {
        for (l, a) in [(q(2, 1), q(1, 1)), (q(1, 1), q(1, 2)), (q(3, 1), q(3, 4)), (q(2, 3), q(1, 3))] {
            let report = CaseReport::for_oscillator(&analyze_case(&l, &a).unwrap());
            let text = report.to_json();
            let back: CaseReport = serde_json::from_str(&text).unwrap();
            assert_eq!(back, report);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn exact_entries_parse_back() {
        let case = analyze_case(&q(2, 3), &q(1, 3)).unwrap();
        let report = CaseReport::for_oscillator(&case);
        for (m, exact) in report.averaged.iter().zip(&case.averaged.averaged) {
            assert_eq!(&m.parse().unwrap(), exact);
        }
        let complex = QMatrix::from_rows(vec![vec![oscavg_core::rational::cq(q(1, 2), q(-1, 3))]]).unwrap();
        assert_eq!(ExactMatrix::new(&complex).parse().unwrap(), complex);
    }

    #[test]
    fn remainder_dominated_forms_read_cos_t() {
        let report = CaseReport::for_oscillator(&analyze_case(&q(3, 1), &q(3, 4)).unwrap());
        assert!(matches!(report.prediction, PredictionSummary::RemainderDominated { .. }));
        let osc = report.oscillator.unwrap();
        assert!(osc.solutions.iter().all(|s| s.formula == "cos(t) + o(1)"));
    }

    #[test]
    fn dominant_mode_is_the_growing_one() {
        let classes = [GrowthClass::Polynomial { exponent: -0.25 }, GrowthClass::Polynomial { exponent: 0.25 }];
        assert_eq!(dominant_growth(&classes), Some(&classes[1]));
        let mixed = [GrowthClass::Bounded, GrowthClass::StretchedExponential { coeff: 0.25, power: q(1, 2) }];
        assert_eq!(dominant_growth(&mixed), Some(&mixed[1]));
        assert_eq!(dominant_growth(&[]), None);
    }
}
