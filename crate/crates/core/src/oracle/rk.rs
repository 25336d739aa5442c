//! Dormand–Prince 5(4) with PI step control, specialised to linear matrix
//! systems `X' = C(t) X` started from `X(t0) = I`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants (Hairer–Wanner)
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Which states to keep in the [`IntegrationResult`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Recording {
    /// Every accepted step.
    AllSteps,
    /// The first accepted step at or past each point of a logarithmic grid.
    LogSpaced { per_decade: usize },
    /// Only the initial and final states.
    Endpoints,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub first_step: Option<f64>,
    /// Disables step control and takes every step with this size.
    pub fixed_step: Option<f64>,
    pub max_steps: u64,
    pub recording: Recording,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { rtol: 1e-10, atol: 1e-12, first_step: None, fixed_step: None, max_steps: 200_000_000, recording: Recording::AllSteps }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evaluations: u64,
    pub min_step: f64,
    pub max_step: f64,
}

#[derive(Debug, Clone)]
pub struct IntegrationResult {
    pub dim: usize,
    pub t_samples: Vec<f64>,
    /// Fundamental matrix snapshots, aligned with `t_samples`.
    pub states: Vec<DMatrix<f64>>,
    pub rtol: f64,
    pub atol: f64,
    pub stats: StepStats,
}

impl IntegrationResult {
    pub fn final_state(&self) -> &DMatrix<f64> {
        self.states.last().expect("at least the initial state")
    }
}

/// One accepted step, with cubic Hermite interpolation between its ends.
pub struct StepView<'a> {
    pub t0: f64,
    pub t1: f64,
    pub x0: &'a [f64],
    pub x1: &'a [f64],
    pub f0: &'a [f64],
    pub f1: &'a [f64],
}

impl StepView<'_> {
    /// Interpolated component `i` at `t ∈ [t0, t1]`.
    pub fn interpolate(&self, i: usize, t: f64) -> f64 {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.x0[i] + h10 * h * self.f0[i] + h01 * self.x1[i] + h11 * h * self.f1[i]
    }
}

/// Integrates `X' = C(t) X`, `X(t0) = I`, where `coefficient(t, c)` fills the
/// `dim × dim` matrix `c` (row-major).
pub fn integrate_system<C>(coefficient: C, dim: usize, t0: f64, t1: f64, opts: &IntegrateOptions) -> Result<IntegrationResult>
where
    C: FnMut(f64, &mut [f64]),
{
    integrate_observed(coefficient, dim, t0, t1, opts, |_| {})
}

/// As [`integrate_system`], calling `observer` after every accepted step.
/// The state is the fundamental matrix flattened column-major.
pub fn integrate_observed<C, O>(
    mut coefficient: C,
    dim: usize,
    t0: f64,
    t1: f64,
    opts: &IntegrateOptions,
    mut observer: O,
) -> Result<IntegrationResult>
where
    C: FnMut(f64, &mut [f64]),
    O: FnMut(&StepView),
{
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::InvalidParameter(format!("invalid interval [{t0}, {t1}]")));
    }
    let n = dim * dim;
    let mut cbuf = vec![0.0; n];
    let mut stats = StepStats { min_step: f64::INFINITY, ..StepStats::default() };
    let mut rhs = |t: f64, x: &[f64], out: &mut [f64], stats: &mut StepStats| {
        stats.rhs_evaluations += 1;
        coefficient(t, &mut cbuf);
        for col in 0..dim {
            let xc = &x[col * dim..(col + 1) * dim];
            for row in 0..dim {
                let crow = &cbuf[row * dim..(row + 1) * dim];
                out[col * dim + row] = crow.iter().zip(xc).map(|(a, b)| a * b).sum();
            }
        }
    };

    let mut x = vec![0.0; n];
    for i in 0..dim {
        x[i * dim + i] = 1.0;
    }
    let mut ts = vec![t0];
    let mut states = vec![to_matrix(&x, dim)];
    let mut next_record = match opts.recording {
        Recording::LogSpaced { per_decade } => t0 * 10f64.powf(1.0 / per_decade.max(1) as f64),
        _ => f64::INFINITY,
    };

    let mut f = vec![0.0; n];
    rhs(t0, &x, &mut f, &mut stats);
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut err_vec = vec![0.0; n];

    let mut t = t0;
    let mut h = opts.fixed_step.or(opts.first_step).unwrap_or_else(|| initial_step(&x, &f, opts, t1 - t0));
    let mut err_old: f64 = 1e-4;
    let mut last_rejected = false;

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepUnderflow(t));
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow(t));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        k[0].copy_from_slice(&f);
        stage(&mut tmp, &x, h, &k, &[A21]);
        rhs(t + C2 * h, &tmp, &mut k[1], &mut stats);
        stage(&mut tmp, &x, h, &k, &[A31, A32]);
        rhs(t + C3 * h, &tmp, &mut k[2], &mut stats);
        stage(&mut tmp, &x, h, &k, &[A41, A42, A43]);
        rhs(t + C4 * h, &tmp, &mut k[3], &mut stats);
        stage(&mut tmp, &x, h, &k, &[A51, A52, A53, A54]);
        rhs(t + C5 * h, &tmp, &mut k[4], &mut stats);
        stage(&mut tmp, &x, h, &k, &[A61, A62, A63, A64, A65]);
        rhs(t + h, &tmp, &mut k[5], &mut stats);
        stage(&mut x_new, &x, h, &k, &[A71, 0.0, A73, A74, A75, A76]);
        let t_new = if last { t1 } else { t + h };
        rhs(t_new, &x_new, &mut k[6], &mut stats);
        for i in 0..n {
            err_vec[i] = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
        }
        let err = (err_vec
            .iter()
            .zip(&x)
            .zip(&x_new)
            .map(|((e, a), b)| {
                let sc = opts.atol + opts.rtol * a.abs().max(b.abs());
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / n as f64)
            .sqrt();
        if !err.is_finite() || x_new.iter().any(|v| !v.is_finite()) {
            if opts.fixed_step.is_some() || x.iter().any(|v| v.abs() > 1e250) {
                return Err(Error::NonFiniteState(t));
            }
            stats.rejected += 1;
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }

        if err <= 1.0 || opts.fixed_step.is_some() {
            stats.accepted += 1;
            stats.min_step = stats.min_step.min(h);
            stats.max_step = stats.max_step.max(h);
            observer(&StepView { t0: t, t1: t_new, x0: &x, x1: &x_new, f0: &k[0], f1: &k[6] });
            t = t_new;
            x.copy_from_slice(&x_new);
            f.copy_from_slice(&k[6]);
            let record = match opts.recording {
                Recording::AllSteps => true,
                Recording::LogSpaced { per_decade } => {
                    if t >= next_record {
                        let ratio = 10f64.powf(1.0 / per_decade.max(1) as f64);
                        while next_record <= t {
                            next_record *= ratio;
                        }
                        true
                    } else {
                        false
                    }
                }
                Recording::Endpoints => false,
            };
            if record || (t >= t1 && *ts.last().expect("seeded") < t) {
                ts.push(t);
                states.push(to_matrix(&x, dim));
            }
            let fac = (err.max(1e-10).powf(EXPO) / err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            err_old = err.max(1e-4);
            last_rejected = false;
            h = opts.fixed_step.unwrap_or(h_new);
        } else {
            stats.rejected += 1;
            let fac = (err.powf(EXPO) / SAFETY).min(1.0 / FAC_MIN);
            h /= if fac.is_finite() { fac } else { 1.0 / FAC_MIN };
            last_rejected = true;
        }
    }
    if stats.accepted == 0 {
        stats.min_step = 0.0;
    }
    Ok(IntegrationResult { dim, t_samples: ts, states, rtol: opts.rtol, atol: opts.atol, stats })
}

fn stage(out: &mut [f64], x: &[f64], h: f64, k: &[Vec<f64>], coeffs: &[f64]) {
    for i in 0..out.len() {
        let mut acc = 0.0;
        for (c, kj) in coeffs.iter().zip(k) {
            acc += c * kj[i];
        }
        out[i] = x[i] + h * acc;
    }
}

fn to_matrix(x: &[f64], dim: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(dim, dim, x)
}

fn initial_step(x: &[f64], f: &[f64], opts: &IntegrateOptions, span: f64) -> f64 {
    let sc = |v: f64| opts.atol + opts.rtol * v.abs();
    let d0 = (x.iter().map(|v| (v / sc(*v)).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
    let d1 = (f.iter().zip(x).map(|(a, v)| (a / sc(*v)).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span.max(f64::MIN_POSITIVE))
}

/// Integrates a complex system `X' = C(t) X` through its real form
/// `[[Re C, −Im C], [Im C, Re C]]` and returns the complex fundamental
/// matrices alongside the raw result.
pub fn integrate_complex_system<C>(
    mut coefficient: C,
    dim: usize,
    t0: f64,
    t1: f64,
    opts: &IntegrateOptions,
) -> Result<(IntegrationResult, Vec<CMatrix>)>
where
    C: FnMut(f64) -> CMatrix,
{
    let m = 2 * dim;
    let res = integrate_system(
        |t, out| {
            let c = coefficient(t);
            for i in 0..dim {
                for j in 0..dim {
                    let z = c[(i, j)];
                    out[i * m + j] = z.re;
                    out[i * m + j + dim] = -z.im;
                    out[(i + dim) * m + j] = z.im;
                    out[(i + dim) * m + j + dim] = z.re;
                }
            }
        },
        m,
        t0,
        t1,
        opts,
    )?;
    let complex = res
        .states
        .iter()
        .map(|s| CMatrix::from_fn(dim, dim, |i, j| num_complex::Complex64::new(s[(i, j)], s[(i + dim, j)])))
        .collect();
    Ok((res, complex))
}
