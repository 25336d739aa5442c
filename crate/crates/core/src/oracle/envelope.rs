//! Amplitude envelopes and zero crossings of integrated solutions.

use std::io::{self, Write};

use serde::Serialize;

use super::rk::{IntegrationResult, StepView};

/// Per-column amplitude `r_j(t) = |X(t) e_j|` sampled at the recorded times.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Envelope {
    pub t: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

impl Envelope {
    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    /// Index of the column with the largest final amplitude.
    pub fn dominant_column(&self) -> usize {
        (0..self.columns.len())
            .max_by(|&a, &b| {
                let fa = self.columns[a].last().copied().unwrap_or(0.0);
                let fb = self.columns[b].last().copied().unwrap_or(0.0);
                fa.total_cmp(&fb)
            })
            .unwrap_or(0)
    }

    /// CSV with header `t,r1,r2,…`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = (1..=self.columns.len()).map(|j| format!("r{j}")).collect();
        writeln!(w, "t,{}", header.join(","))?;
        for (i, t) in self.t.iter().enumerate() {
            write!(w, "{t:e}")?;
            for c in &self.columns {
                write!(w, ",{:e}", c[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Column norms of every recorded fundamental matrix. For a second-order
/// equation in `(y, y')` form these are `sqrt(y² + y'²)`.
pub fn amplitude_envelope(result: &IntegrationResult) -> Envelope {
    let n = result.dim;
    let mut columns = vec![Vec::with_capacity(result.states.len()); n];
    for s in &result.states {
        for (j, c) in columns.iter_mut().enumerate() {
            c.push(s.column(j).norm());
        }
    }
    Envelope { t: result.t_samples.clone(), columns }
}

/// Largest singular value of every recorded fundamental matrix.
pub fn spectral_envelope(result: &IntegrationResult) -> Vec<f64> {
    result.states.iter().map(|s| s.clone().singular_values().max()).collect()
}

/// Subsamples `(t, r)` at strict local maxima of `r`.
pub fn local_maxima(t: &[f64], r: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut ts = Vec::new();
    let mut rs = Vec::new();
    for i in 1..r.len().saturating_sub(1) {
        if r[i] > r[i - 1] && r[i] >= r[i + 1] {
            ts.push(t[i]);
            rs.push(r[i]);
        }
    }
    (ts, rs)
}

/// Collects sign changes of one state component, refined on the step's
/// cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct ZeroCrossings {
    pub component: usize,
    pub from: f64,
    pub times: Vec<f64>,
}

impl ZeroCrossings {
    pub fn new(component: usize, from: f64) -> Self {
        ZeroCrossings { component, from, times: Vec::new() }
    }

    pub fn observe(&mut self, step: &StepView) {
        if step.t1 < self.from {
            return;
        }
        let i = self.component;
        let (a, b) = (step.x0[i], step.x1[i]);
        if a == 0.0 || a.signum() == b.signum() {
            return;
        }
        let (mut lo, mut hi) = (step.t0, step.t1);
        let mut f_lo = a;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let fm = step.interpolate(i, mid);
            if fm.signum() == f_lo.signum() {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.abs() {
                break;
            }
        }
        let root = 0.5 * (lo + hi);
        if root >= self.from {
            self.times.push(root);
        }
    }
}
