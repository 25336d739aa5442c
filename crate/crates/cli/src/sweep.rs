//! Classification raster over a `(λ, α)` grid.

use std::io::Write;

use oscavg_core::{analyze_case, Rational, ResonanceTag};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Grid;
use crate::report::CaseReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub lambda: Rational,
    pub alpha: Rational,
    pub resonance: String,
    pub leading_index: Option<usize>,
    pub leading_power: Option<Rational>,
    pub growth_class: Option<String>,
    pub growth_parameter: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn for_cell(index: usize, lambda: Rational, alpha: Rational) -> Self {
        let resonance = ResonanceTag::of(&lambda).label().to_string();
        match analyze_case(&lambda, &alpha) {
            Ok(case) => {
                let s = CaseReport::for_oscillator(&case).summary();
                SweepRow {
                    index,
                    lambda,
                    alpha,
                    resonance,
                    leading_index: s.leading_index,
                    leading_power: s.leading_power,
                    growth_class: s.growth_class,
                    growth_parameter: s.growth_parameter,
                    error: None,
                }
            }
            Err(e) => SweepRow {
                index,
                lambda,
                alpha,
                resonance,
                leading_index: None,
                leading_power: None,
                growth_class: None,
                growth_parameter: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// One row per cell in λ-major order; failing cells keep their row and carry the error.
pub fn run_sweep(grid: &Grid) -> Vec<SweepRow> {
    grid.cells()
        .into_par_iter()
        .enumerate()
        .map(|(i, (lambda, alpha))| SweepRow::for_cell(i, lambda, alpha))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use oscavg_core::rational::q;

    #[test]
    fn five_cases_classify() {
        let grid = Grid::parse("2,1,3,2/3;1,1/2,3/4,1/3").unwrap();
        let rows = run_sweep(&grid);
        assert_eq!(rows.len(), 16);
        let find = |l: Rational, a: Rational| rows.iter().find(|r| r.lambda == l && r.alpha == a).unwrap();
        let class = |l, a| find(l, a).growth_class.clone();
        assert_eq!(class(q(2, 1), q(1, 1)).as_deref(), Some("polynomial"));
        assert_eq!(find(q(2, 1), q(1, 1)).growth_parameter, Some(0.25));
        assert_eq!(class(q(1, 1), q(1, 2)).as_deref(), Some("polynomial"));
        assert_eq!(class(q(2, 1), q(1, 2)).as_deref(), Some("stretched_exponential"));
        assert_eq!(class(q(3, 1), q(1, 2)).as_deref(), Some("log_phase"));
        assert_eq!(class(q(3, 1), q(3, 4)).as_deref(), Some("bounded"));
        assert_eq!(class(q(2, 3), q(1, 3)).as_deref(), Some("bounded"));
        assert_eq!(find(q(3, 1), q(3, 4)).leading_index, None);
    }

    #[test]
    fn failing_cells_keep_their_rows() {
        let rows = run_sweep(&Grid::parse("0,2;1,3/2").unwrap());
        assert_eq!(rows.len(), 4);
        assert!(rows[0].error.is_some() && rows[1].error.is_some() && rows[3].error.is_some());
        assert!(rows[2].error.is_none());
        assert_eq!(rows.iter().map(|r| r.index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }
}
