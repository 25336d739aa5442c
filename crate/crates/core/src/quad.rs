//! Adaptive Gauss–Kronrod (7, 15) quadrature for vector-valued complex integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_INTERVALS: usize = 4000;

/// `∫_a^b f(x) dx` componentwise, to a total error of
/// `max(abs_tol, rel_tol·max_i |I_i|)`.
///
/// Globally adaptive: the subinterval with the largest error estimate is
/// bisected until the summed estimate meets the tolerance.
pub fn integrate<F>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Vec<Complex64>>
where
    F: FnMut(f64) -> Result<Vec<Complex64>>,
{
    let (k, e) = kronrod(&mut f, a, b)?;
    let mut parts = vec![(a, b, k, e)];
    loop {
        let n = parts[0].2.len();
        let mut total = vec![Complex64::new(0.0, 0.0); n];
        let mut err = 0.0;
        for (_, _, k, e) in &parts {
            for (t, v) in total.iter_mut().zip(k) {
                *t += v;
            }
            err += e;
        }
        let scale = total.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let roundoff = 50.0 * f64::EPSILON * parts.iter().map(|p| p.2.iter().map(|z| z.norm()).fold(0.0, f64::max)).sum::<f64>();
        if err <= abs_tol.max(rel_tol * scale).max(roundoff) {
            return Ok(total);
        }
        let worst = (0..parts.len()).max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3)).expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if parts.len() >= MAX_INTERVALS || mid <= lo || mid >= hi {
            return Err(Error::QuadratureFailed { lo, hi });
        }
        let (k1, e1) = kronrod(&mut f, lo, mid)?;
        let (k2, e2) = kronrod(&mut f, mid, hi)?;
        parts.push((lo, mid, k1, e1));
        parts.push((mid, hi, k2, e2));
    }
}

/// Kronrod estimate and max componentwise |K − G|.
fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(Vec<Complex64>, f64)>
where
    F: FnMut(f64) -> Result<Vec<Complex64>>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let center = f(c)?;
    let n = center.len();
    let mut k: Vec<Complex64> = center.iter().map(|v| v * WGK[7]).collect();
    let mut g: Vec<Complex64> = center.iter().map(|v| v * WG[3]).collect();
    for i in 0..7 {
        let dx = h * XGK[i];
        let lo = f(c - dx)?;
        let hi = f(c + dx)?;
        for j in 0..n {
            let s = lo[j] + hi[j];
            k[j] += s * WGK[i];
            if i % 2 == 1 {
                g[j] += s * WG[i / 2];
            }
        }
    }
    let err = k.iter().zip(&g).map(|(a, b)| ((a - b) * h).norm()).fold(0.0, f64::max);
    Ok((k.into_iter().map(|v| v * h).collect(), err))
}
