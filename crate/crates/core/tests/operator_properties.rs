use approx::assert_relative_eq;
use hpme::eigen::{EigenFunction, EigenParams};
use hpme::operator::{apply_algebraic_operator, apply_to_polynomial, hyperbolic_residual, radial_laplacian_fd};
use hpme::series::{series_derivative, series_eval, series_pow};
use hpme::{OperatorParams, Series};
use proptest::prelude::*;

fn leading() -> impl Strategy<Value = f64> {
    (0.1..2.0_f64, any::<bool>()).prop_map(|(x, neg)| if neg { -x } else { x })
}

fn polynomial() -> impl Strategy<Value = Series> {
    (prop::collection::vec(-2.0..2.0_f64, 1..=5), leading()).prop_map(|(mut c, l)| {
        c.push(l);
        Series::at_origin(c).unwrap()
    })
}

proptest! {
    #[test]
    fn degree_law(p in polynomial(), n in 2u32..=3, delta in 0.5..3.0_f64) {
        let op = OperatorParams::new(n, delta).unwrap();
        let image = apply_to_polynomial(&p, &op).unwrap();
        prop_assert_eq!(image.degree(), Some(n as usize * p.order()));
    }

    #[test]
    fn homogeneity_of_degree_n(
        rest in prop::collection::vec(-1.0..1.0_f64, 2..=10),
        a0 in 0.5..2.0_f64,
        alpha in prop_oneof![-3.0..-0.2_f64, 0.2..3.0_f64],
        n in 2u32..=4,
        delta in 0.5..2.0_f64,
        center in -3.0..3.0_f64,
    ) {
        let mut coeffs = vec![a0];
        coeffs.extend(rest);
        let u = Series::new(center, coeffs).unwrap();
        let op = OperatorParams::new(n, delta).unwrap();
        let base = apply_algebraic_operator(&u, &op).unwrap();
        let scaled = apply_algebraic_operator(&u.scaled(&alpha), &op).unwrap();
        let factor = alpha.powi(n as i32);
        let magnitude = base.max_magnitude().max(f64::MIN_POSITIVE);
        for (s, b) in scaled.coeffs().iter().zip(base.coeffs()) {
            prop_assert!((s - factor * b).abs() <= 1e-12 * factor.abs() * magnitude);
        }
    }

    // Grid kept where the O(h²) stencil error of a degree-6 test series stays below 1e−6.
    #[test]
    fn chain_rule(
        coeffs in prop::collection::vec(-1.0..1.0_f64, 1..=6),
        delta in 0.5..1.0_f64,
        eta in 0.2..1.0_f64,
    ) {
        let f = Series::at_origin(coeffs).unwrap();
        let op = OperatorParams::new(2, delta).unwrap();
        let h = 1e-4;
        let g = |x: f64| series_eval(&f, &op.z_of_eta(x).unwrap());
        let lhs = (g(eta + h) - g(eta - h)) / (2.0 * h * eta.sinh());
        let rhs = delta * series_eval(&series_derivative(&f), &op.z_of_eta(eta).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-6, "{} vs {}", lhs, rhs);
    }
}

/// Relative error of `acosh(cosh η)` caused by rounding `cosh η` once:
/// `|Δη| / η ≈ ε coth η / η`.
fn round_trip_bound(eta: f64) -> f64 {
    f64::EPSILON * eta.cosh() / (eta.sinh() * eta)
}

#[test]
fn coordinate_round_trip() {
    for delta in [0.5, 1.0, 2.0] {
        let op = OperatorParams::new(2, delta).unwrap();
        for k in 0..=200 {
            // log-spaced over [1e−6, 20]
            let eta = 1e-6 * (20.0e6_f64).powf(k as f64 / 200.0);
            let back = op.eta_of_z(op.z_of_eta(eta).unwrap()).unwrap();
            let rel = (back - eta).abs() / eta;
            assert!(
                rel <= 1e-10_f64.max(4.0 * round_trip_bound(eta)),
                "eta = {eta}: relative error {rel}"
            );
            if eta >= 2e-3 {
                assert!(rel <= 1e-10, "eta = {eta}: relative error {rel}");
            }
        }
    }
}

#[test]
fn constant_is_in_the_kernel() {
    let op = OperatorParams::new(3, 1.0).unwrap();
    for eta in [0.5, 1.0, 2.0] {
        let r = hyperbolic_residual(|_| 1.7, &op, 0.0, eta, 1e-4).unwrap();
        assert!(r.abs() < 1e-8);
    }
}

#[test]
fn residual_rejects_step_beyond_origin() {
    let op = OperatorParams::new(2, 1.0).unwrap();
    assert!(hyperbolic_residual(|_| 1.0, &op, 1.0, 1e-5, 1e-4).is_err());
    assert!(hyperbolic_residual(|_| 1.0, &op, 1.0, 0.5, 0.0).is_err());
}

/// `Δ_H uⁿ` by finite differences in η agrees with `L[uⁿ]` from the series.
#[test]
fn laplacian_matches_algebraic_operator() {
    let u = Series::new(2.0, vec![1.0, 0.3, -0.2, 0.05]).unwrap();
    for (n, delta) in [(2, 1.0), (3, 0.8)] {
        let op = OperatorParams::new(n, delta).unwrap();
        let image = apply_to_polynomial(&u, &op).unwrap();
        for eta in [1.0, 1.2, 1.4] {
            let g = |x: f64| series_eval(&u, &op.z_of_eta(x).unwrap());
            let fd = radial_laplacian_fd(|x| g(x).powi(n as i32), eta, 1e-4);
            let exact = series_eval(&image, &op.z_of_eta(eta).unwrap());
            assert_relative_eq!(fd, exact, max_relative = 1e-6);
        }
    }
}

#[test]
fn eigen_series_residual_in_eta() {
    let params = EigenParams::new(2, 1.0, 1.0, 1.0, 0.0).unwrap().with_center(2.0).unwrap();
    let ef = EigenFunction::build(params, 24).unwrap();
    let op = ef.params().operator();
    let r = ef.trusted_radius();
    let (lo, hi) = (op.eta_of_z(2.0 - r).unwrap(), op.eta_of_z(2.0 + r).unwrap());
    let q = |x: f64| ef.eval_in_eta(x).unwrap().value;
    for k in 1..10 {
        let eta = lo + (hi - lo) * k as f64 / 10.0;
        let residual = hyperbolic_residual(q, &op, 1.0, eta, 1e-4).unwrap();
        assert!(residual.abs() < 1e-6, "eta = {eta}: {residual}");
    }
}

#[test]
fn truncated_operator_keeps_trusted_orders() {
    let u = Series::at_origin(vec![1.0, 0.5, -0.25, 0.125, 0.0625]).unwrap();
    let op = OperatorParams::new(3, 1.5).unwrap();
    let truncated = apply_algebraic_operator(&u, &op).unwrap();
    let exact = apply_to_polynomial(&u, &op).unwrap();
    assert_eq!(truncated.order(), u.order() - 2);
    for (t, e) in truncated.coeffs().iter().zip(exact.coeffs()) {
        assert_relative_eq!(*t, *e, max_relative = 1e-13);
    }
    let power = series_pow(&u, 3, 4).unwrap();
    assert_eq!(power.order(), 4);
}
