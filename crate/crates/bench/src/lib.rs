//! Benchmark fixtures. The benchmarks themselves live under `benches/`.

use oscavg_core::rational::{cq, q};
use oscavg_core::{ComplexRational, Frequency, QMatrix, Rational, TrigPolyMatrix};

/// The `(λ, α)` pairs exercised by the pipeline benchmarks.
pub const OSCILLATOR_CASES: [(i64, i64, i64, i64); 5] = [(2, 1, 1, 1), (1, 1, 1, 2), (3, 1, 1, 2), (2, 3, 1, 3), (3, 1, 1, 4)];

pub fn oscillator_case(i: usize) -> (Rational, Rational) {
    let (ln, ld, an, ad) = OSCILLATOR_CASES[i];
    (q(ln, ld), q(an, ad))
}

/// Upper triangular `n × n` matrix with distinct real diagonal `1..=n`.
pub fn real_spectrum(n: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = ComplexRational::real(Rational::from_integer(i as i64 + 1));
        for j in i + 1..n {
            m[(i, j)] = ComplexRational::real(q(1, (i + j + 2) as i64));
        }
    }
    m
}

/// Dense complex right-hand side with small rational entries.
pub fn dense_rhs(n: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = cq(q((i * n + j) as i64 % 7 - 3, 5), q(j as i64 - i as i64, 3));
        }
    }
    m
}

/// Zero-mean trigonometric polynomial with `terms` frequencies `±1/2, ±1, …`.
pub fn zero_mean_poly(n: usize, terms: usize) -> TrigPolyMatrix {
    let rhs = dense_rhs(n);
    let freqs = (1..=terms).map(|k| {
        let f = q(k.div_ceil(2) as i64, 2);
        let f = if k % 2 == 0 { -f } else { f };
        (Frequency(f), rhs.clone())
    });
    TrigPolyMatrix::from_terms(n, freqs).expect("square terms")
}
