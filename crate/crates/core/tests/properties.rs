//! Property suites for the exact pipeline and the predictor.

use nalgebra::DMatrix;
use num_complex::Complex64;
use oscavg_core::asymptotics::predict_from;
use oscavg_core::averaging::{average_system, solve_homological, solve_sylvester, SystemSpec};
use oscavg_core::oscillator::{back_transform, build_oscillator_system, nonresonant_a2, to_y_coordinates, CasePrediction};
use oscavg_core::rational::{cq, q};
use oscavg_core::series::{eval_graded_terms, GradedOscSeries};
use oscavg_core::{analyze_case, ComplexRational, Frequency, QMatrix, Rational, TrigPolyMatrix};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

fn complex() -> impl Strategy<Value = ComplexRational> {
    (rational(), rational()).prop_map(|(a, b)| cq(a, b))
}

fn matrix(n: usize) -> impl Strategy<Value = QMatrix> {
    proptest::collection::vec(proptest::collection::vec(complex(), n), n).prop_map(|rows| QMatrix::from_rows(rows).unwrap())
}

fn trig_poly(n: usize, zero_mean: bool) -> impl Strategy<Value = TrigPolyMatrix> {
    proptest::collection::vec((rational(), matrix(n)), 1..4).prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .filter(|(f, _)| !(zero_mean && f.is_zero()))
            .map(|(f, m)| (Frequency(f), m));
        TrigPolyMatrix::from_terms(n, terms).unwrap()
    })
}

/// `M + conj(M)` at mirrored frequencies.
fn real_trig_poly(n: usize) -> impl Strategy<Value = TrigPolyMatrix> {
    trig_poly(n, false).prop_map(|p| {
        let mirrored =
            TrigPolyMatrix::from_terms(p.dim(), p.terms().map(|(f, m)| (-f, m.conj()))).unwrap();
        p.checked_add(&mirrored).unwrap()
    })
}

/// `L U L⁻¹` with `U` upper triangular with real diagonal and `L` unit lower
/// triangular, so the spectrum is the real diagonal of `U`.
fn real_spectrum_matrix(n: usize) -> impl Strategy<Value = QMatrix> {
    (proptest::collection::vec(rational(), n * n), proptest::collection::vec(-3i64..=3, n * n)).prop_map(move |(u, l)| {
        let mut upper = QMatrix::zeros(n);
        let mut nil = QMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if j >= i {
                    upper[(i, j)] = ComplexRational::real(u[i * n + j].clone());
                } else {
                    nil[(i, j)] = ComplexRational::real(Rational::from_integer(l[i * n + j]));
                }
            }
        }
        let id = QMatrix::identity(n);
        let lower = &id + &nil;
        // (I + N)⁻¹ = Σ (−N)^m for nilpotent N
        let mut inv = id.clone();
        let mut power = id;
        for _ in 1..n {
            power = &power * &(-&nil);
            inv = &inv + &power;
        }
        &(&lower * &upper) * &inv
    })
}

fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in trig_poly(2, false), b in trig_poly(2, false), t in -20.0f64..20.0) {
        let sum = a.checked_add(&b).unwrap();
        prop_assert!(close(&sum.eval(t), &(a.eval(t) + b.eval(t)), 1e-12));
        let prod = a.checked_mul(&b).unwrap();
        prop_assert!(close(&prod.eval(t), &(a.eval(t) * b.eval(t)), 1e-12));
    }

    #[test]
    fn realness_is_closed_under_ring_operations(a in real_trig_poly(2), b in real_trig_poly(2), t in -5.0f64..5.0) {
        prop_assert!(a.is_real_valued());
        let prod = a.checked_mul(&b).unwrap();
        prop_assert!(prod.is_real_valued());
        prop_assert!(a.checked_add(&b).unwrap().is_real_valued());
        prop_assert!(prod.eval(t).iter().all(|z| z.im.abs() < 1e-10 * (1.0 + z.norm())));
    }

    #[test]
    fn derivative_has_zero_mean_and_matches_finite_differences(a in trig_poly(2, false), t in -5.0f64..5.0) {
        let d = a.derivative();
        prop_assert!(d.mean().is_zero());
        let h = 1e-5;
        let fd = (a.eval(t + h) - a.eval(t - h)) / Complex64::from(2.0 * h);
        prop_assert!(close(&d.eval(t), &fd, 1e-6));
    }

    #[test]
    fn mean_and_oscillating_part_split(a in trig_poly(3, false)) {
        let rebuilt = TrigPolyMatrix::constant(a.mean()).checked_add(&a.oscillating_part()).unwrap();
        prop_assert_eq!(rebuilt, a.clone());
        prop_assert!(a.oscillating_part().mean().is_zero());
    }

    #[test]
    fn graded_product_evaluates_with_overflow(
        x in proptest::collection::vec(trig_poly(2, false), 3),
        y in proptest::collection::vec(trig_poly(2, false), 3),
        t in 1.0f64..50.0,
    ) {
        let alpha = q(1, 2);
        let xs = GradedOscSeries::new(alpha.clone(), x).unwrap();
        let ys = GradedOscSeries::new(alpha.clone(), y).unwrap();
        let (prod, overflow) = xs.mul(&ys, 2).unwrap();
        let full = prod.eval(t).unwrap() + eval_graded_terms(&overflow, &alpha, 0.0, 2, t);
        prop_assert!(close(&full, &(xs.eval(t).unwrap() * ys.eval(t).unwrap()), 1e-10));
        prop_assert!(overflow.iter().all(|term| term.grade > 2 && term.grade <= 4));
    }

    #[test]
    fn graded_derivative_matches_finite_differences(x in proptest::collection::vec(trig_poly(2, false), 3), t in 2.0f64..30.0) {
        let alpha = q(1, 3);
        let xs = GradedOscSeries::new(alpha.clone(), x).unwrap();
        let (osc, w) = xs.derivative();
        let analytic = osc.eval(t).unwrap() + eval_graded_terms(&w, &alpha, 1.0, 2, t);
        let h = 1e-5;
        let fd = (xs.eval(t + h).unwrap() - xs.eval(t - h).unwrap()) / Complex64::from(2.0 * h);
        prop_assert!(close(&analytic, &fd, 1e-6));
    }

    #[test]
    fn rational_text_round_trip(r in rational(), z in complex()) {
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
        prop_assert_eq!(z.to_string().parse::<ComplexRational>().unwrap(), z);
    }

    #[test]
    fn sylvester_solution_is_exact(n in 1usize..=3, seed in any::<u64>()) {
        let (a0, b) = seeded_pair(n, seed);
        let lambda = Frequency(q(3, 2));
        let y = solve_sylvester(&a0, &lambda, &b).unwrap();
        let i_lambda = ComplexRational::imag(lambda.0.clone());
        let residual = &(&(&y.scale(&i_lambda) - &(&a0 * &y)) + &(&y * &a0)) - &b;
        prop_assert!(residual.is_zero());
    }

    #[test]
    fn doubling_transform_norm_never_lowers_threshold(y1 in trig_poly(2, true)) {
        prop_assume!(!y1.is_zero());
        let alpha = q(1, 2);
        let base = GradedOscSeries::new(alpha.clone(), vec![TrigPolyMatrix::identity(2), y1.clone()]).unwrap();
        let doubled = GradedOscSeries::new(alpha, vec![TrigPolyMatrix::identity(2), y1.scale_real(&q(2, 1))]).unwrap();
        let (t1, t2) = (base.invertibility_threshold().unwrap(), doubled.invertibility_threshold().unwrap());
        prop_assert!(t2 >= t1);
        // the transform is invertible beyond the threshold
        for t in [t1, 3.0 * t1, 100.0 * t1] {
            let sv = base.eval(t).unwrap().singular_values();
            prop_assert!(sv.min() >= 0.5 - 1e-12);
        }
    }

    #[test]
    fn change_of_variables_preserves_norm(x1 in -5.0f64..5.0, x2 in -5.0f64..5.0, t in -100.0f64..100.0) {
        let (y, dy) = to_y_coordinates(x1, x2, t);
        prop_assert!(((y * y + dy * dy) - (x1 * x1 + x2 * x2)).abs() < 1e-10 * (1.0 + x1 * x1 + x2 * x2));
    }
}

fn seeded_pair(n: usize, seed: u64) -> (QMatrix, QMatrix) {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::{Config, TestRng, TestRunner};
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &bytes));
    let a0 = real_spectrum_matrix(n).new_tree(&mut runner).unwrap().current();
    let b = matrix(n).new_tree(&mut runner).unwrap().current();
    (a0, b)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn homological_identity_is_exact(n in 1usize..=4, seed in any::<u64>(), b in trig_poly(4, true)) {
        let (a0, _) = seeded_pair(n, seed);
        // restrict the 4×4 right-hand side to the leading n×n block
        let b = TrigPolyMatrix::from_terms(n, b.terms().map(|(f, m)| {
            let rows = m.rows().into_iter().take(n).map(|r| r.into_iter().take(n).collect()).collect();
            (f.clone(), QMatrix::from_rows(rows).unwrap())
        })).unwrap();
        let y = solve_homological(&a0, &b).unwrap();
        let lhs = y
            .derivative()
            .checked_sub(&y.left_mul_const(&a0).unwrap()).unwrap()
            .checked_add(&y.right_mul_const(&a0).unwrap()).unwrap();
        prop_assert_eq!(lhs, b);
        prop_assert!(y.mean().is_zero());
    }

    #[test]
    fn nonresonant_second_grade_closed_form(num in 1i64..60, den in 1i64..12) {
        let lambda = q(num, den);
        prop_assume!(![q(1, 1), q(2, 1), q(2, 3)].contains(&lambda));
        let spec = build_oscillator_system(&lambda, &q(1, 2)).unwrap();
        let averaged = average_system(&spec).unwrap().averaged;
        prop_assert!(averaged[1].is_zero());
        prop_assert_eq!(&averaged[2], &nonresonant_a2(&lambda));
        // sign symmetry of the tagging and of the average
        let mirrored = average_system(&build_oscillator_system(&-lambda.clone(), &q(1, 2)).unwrap()).unwrap().averaged;
        prop_assert_eq!(&mirrored[2], &nonresonant_a2(&-lambda));
    }

    #[test]
    fn real_systems_average_to_real_matrices(a0 in real_spectrum_matrix(2), g1 in real_trig_poly(2), g2 in real_trig_poly(2)) {
        let spec = SystemSpec::new(a0, q(1, 2), vec![g1, g2], None).unwrap();
        prop_assume!(spec.is_real());
        match average_system(&spec) {
            Ok(av) => {
                prop_assert!(av.averaged.iter().all(QMatrix::is_real));
                prop_assert!(av.transform.grades().iter().all(TrigPolyMatrix::is_real_valued));
            }
            // a combination frequency can still hit an eigenvalue gap of zero
            Err(e) => prop_assert!(matches!(e, oscavg_core::Error::Resonance { .. }), "{e}"),
        }
    }

    #[test]
    fn curve_sum_is_the_trace(d1 in nonzero_rational(), d2 in nonzero_rational(), m in matrix(2), t in 1.0f64..1e4) {
        prop_assume!(d1 != d2);
        let lead = QMatrix::diagonal(&[ComplexRational::real(d1), ComplexRational::real(d2)]);
        let averaged = vec![QMatrix::zeros(2), lead.clone(), m.clone()];
        let pred = predict_from(&averaged, &q(1, 2), 1.0).unwrap();
        if let Ok(curves) = pred.curves_at(t) {
            let sum: Complex64 = curves.iter().sum();
            let trace = (lead.to_c64().trace() * Complex64::from(t.powf(-0.5))) + m.to_c64().trace() / Complex64::from(t);
            prop_assert!((sum - trace).norm() < 1e-9 * (1.0 + trace.norm()));
        }
    }
}

#[test]
fn predicted_fundamental_pair_for_lambda_two_unit_alpha() {
    let case = analyze_case(&q(2, 1), &q(1, 1)).unwrap();
    let CasePrediction::Leading(pred) = &case.prediction else { panic!("expected a leading grade") };
    for t in [10.0, 1e3, 1e5] {
        let fm = back_transform(&case.prediction, t).unwrap();
        let c = (t / pred.t_star).powf(0.25);
        assert!((fm[0][0] - c * t.cos()).abs() < 1e-9 * c);
        assert!((fm[0][1] - t.sin() / c).abs() < 1e-9);
        assert!((fm[1][0] + c * t.sin()).abs() < 1e-9 * c);
        assert!((fm[1][1] - t.cos() / c).abs() < 1e-9);
    }
}
