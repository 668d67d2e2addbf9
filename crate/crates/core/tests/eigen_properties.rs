use approx::assert_relative_eq;
use hpme::eigen::{
    a2_closed_form, determinism_check, eigen_coefficients, eigen_residual, literal_origin_recursion, literal_recursion_check,
    radius_estimate,
    EigenParams,
};
use hpme::{Error, ExactEigenParams, Series};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

// Dense polynomial arithmetic, written independently of the library.
fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_deriv(a: &[BigRational]) -> Vec<BigRational> {
    if a.len() < 2 {
        return vec![BigRational::zero()];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer((i as i64).into()))
        .collect()
}

/// Coefficient `k` of `d/dz[(z² − δ²) d(uⁿ)/dz] − λu` for the polynomial `u`.
fn residual_coeff(u: &[BigRational], n: u32, delta: &BigRational, lambda: &BigRational, k: usize) -> BigRational {
    let mut power = vec![BigRational::one()];
    for _ in 0..n {
        power = poly_mul(&power, u);
    }
    let quad = vec![-(delta * delta), BigRational::zero(), BigRational::one()];
    let image = poly_deriv(&poly_mul(&quad, &poly_deriv(&power)));
    image.get(k).cloned().unwrap_or_else(BigRational::zero) - lambda * &u[k]
}

/// Builds the series one unknown at a time: residual coefficient `k − 2` is
/// affine in `a_k`, so two trial values determine it.
fn exact_oracle(n: u32, lambda: BigRational, delta: BigRational, a0: BigRational, a1: BigRational, order: usize) -> Vec<BigRational> {
    let mut u = vec![a0, a1];
    for k in 2..=order {
        let mut trial = u.clone();
        trial.push(BigRational::zero());
        let r0 = residual_coeff(&trial, n, &delta, &lambda, k - 2);
        trial[k] = BigRational::one();
        let r1 = residual_coeff(&trial, n, &delta, &lambda, k - 2);
        u.push(-r0.clone() / (r1 - r0));
    }
    u
}

#[test]
fn exact_rational_oracle_at_order_eight() {
    let expected = exact_oracle(2, q(2, 1), q(1, 1), q(1, 1), q(1, 1), 8);
    let p = ExactEigenParams::new(2, q(2, 1), q(1, 1), q(1, 1), q(1, 1)).unwrap();
    let exact = eigen_coefficients(&p, 8).unwrap();
    assert_eq!(exact.coeffs(), expected.as_slice());
    // a₂ = −λ/(2δ′²n) − (n − 1)a₁²/(2a₀) = −1/2 − 1/2
    assert_eq!(expected[2], q(-1, 1));

    let p = EigenParams::new(2, 2.0, 1.0, 1.0, 1.0).unwrap();
    let float = eigen_coefficients(&p, 8).unwrap();
    for (f, e) in float.coeffs().iter().zip(&expected) {
        let e = num_traits::ToPrimitive::to_f64(e).unwrap();
        assert_relative_eq!(*f, e, max_relative = 1e-13);
    }
}

#[test]
fn exact_oracle_about_a_shifted_center() {
    // shift z = 2 + w, so the quadratic is 3 + 4w + w²; build the oracle in w
    let n = 3;
    let (lambda, delta, a0, a1) = (q(-3, 2), q(1, 1), q(1, 2), q(1, 3));
    let mut u = vec![a0.clone(), a1.clone()];
    for k in 2..=6 {
        let coeff = |u: &[BigRational]| {
            let mut power = vec![BigRational::one()];
            for _ in 0..n {
                power = poly_mul(&power, u);
            }
            let quad = vec![q(3, 1), q(4, 1), q(1, 1)];
            let image = poly_deriv(&poly_mul(&quad, &poly_deriv(&power)));
            image[k - 2].clone() - &lambda * &u[k - 2]
        };
        let mut trial = u.clone();
        trial.push(BigRational::zero());
        let r0 = coeff(&trial);
        trial[k] = BigRational::one();
        let r1 = coeff(&trial);
        u.push(-r0.clone() / (r1 - r0));
    }
    let p = ExactEigenParams::new(n, lambda, delta, a0, a1).unwrap().with_center(q(2, 1)).unwrap();
    assert_eq!(eigen_coefficients(&p, 6).unwrap().coeffs(), u.as_slice());
}

fn params_strategy() -> impl Strategy<Value = EigenParams> {
    (
        2u32..=4,
        prop_oneof![-5.0..-0.05_f64, 0.05..5.0_f64],
        0.5..2.0_f64,
        prop_oneof![-2.0..-0.5_f64, 0.5..2.0_f64],
        -1.0..1.0_f64,
        0usize..3,
        0.5..2.0_f64,
    )
        .prop_map(|(n, lambda, delta, a0, a1, side, offset)| {
            let center = match side {
                0 => 0.0,
                1 => delta + offset,
                _ => -(delta + offset),
            };
            EigenParams::new(n, lambda, delta, a0, a1).unwrap().with_center(center).unwrap()
        })
}

fn origin_params() -> impl Strategy<Value = EigenParams> {
    params_strategy().prop_map(|p| {
        EigenParams::new(p.n(), *p.lambda(), *p.delta_prime(), *p.a0(), *p.a1()).unwrap()
    })
}

proptest! {
    #[test]
    fn residual_vanishes(p in params_strategy()) {
        let u = eigen_coefficients(&p, 16).unwrap();
        let report = eigen_residual(&p, &u).unwrap();
        prop_assert_eq!(report.residual.len(), 15);
        prop_assert!(report.passes(1e-9), "scaled residual {}", report.max_scaled());
    }

    // A coefficient produced by cancellation is compared against the size of
    // its neighbour, the scale at which both routes accumulate rounding.
    #[test]
    fn matches_literal_origin_recursion(p in origin_params()) {
        let matched = eigen_coefficients(&p, 12).unwrap();
        let literal = literal_origin_recursion(&p, 12).unwrap();
        let c = matched.coeffs();
        for i in 0..c.len() {
            let local = c[i].abs().max(if i > 0 { c[i - 1].abs() } else { 0.0 });
            prop_assert!((c[i] - literal.coeffs()[i]).abs() <= 1e-12 * local, "index {}", i);
        }
    }

    #[test]
    fn second_coefficient_is_closed_form(p in origin_params()) {
        let a2 = eigen_coefficients(&p, 2).unwrap().coeffs()[2];
        let closed = a2_closed_form(&p).unwrap();
        let (n, d, a0, a1) = (p.n() as f64, *p.delta_prime(), *p.a0(), *p.a1());
        let terms = (p.lambda() / (2.0 * d * d * n * a0.powi(p.n() as i32 - 2))).abs()
            + ((n - 1.0) * a1 * a1 / (2.0 * a0)).abs();
        prop_assert!((a2 - closed).abs() <= 1e-12 * terms);
    }

    #[test]
    fn second_coefficient_scales_with_eigenvalue(
        p in origin_params(),
        alpha in prop_oneof![-4.0..-0.25_f64, 0.25..4.0_f64],
    ) {
        let base = EigenParams::new(p.n(), *p.lambda(), *p.delta_prime(), *p.a0(), 0.0).unwrap();
        let scaled = EigenParams::new(p.n(), alpha * p.lambda(), *p.delta_prime(), *p.a0(), 0.0).unwrap();
        let a2 = eigen_coefficients(&base, 2).unwrap().coeffs()[2];
        let a2_scaled = eigen_coefficients(&scaled, 2).unwrap().coeffs()[2];
        prop_assert!((a2_scaled - alpha * a2).abs() <= 1e-12 * (alpha * a2).abs());
    }

    #[test]
    fn deterministic(p in params_strategy()) {
        prop_assert!(determinism_check(&p, 16));
    }
}

#[test]
fn literal_recursion_breaks_away_from_the_origin() {
    let p = EigenParams::new(2, 1.0, 1.0, 1.0, 0.3).unwrap().with_center(2.5).unwrap();
    let check = literal_recursion_check(&p, 8, 1e-12).unwrap();
    assert!(!check.agrees);
    assert!(check.max_relative_difference > 1e-3);
}

#[test]
fn perturbation_sensitivity() {
    let base = eigen_coefficients(&EigenParams::new(3, 1.5, 1.0, 1.0, 0.4).unwrap(), 10).unwrap();
    let a1 = eigen_coefficients(&EigenParams::new(3, 1.5, 1.0, 1.0, 0.5).unwrap(), 10).unwrap();
    let lambda = eigen_coefficients(&EigenParams::new(3, 1.6, 1.0, 1.0, 0.4).unwrap(), 10).unwrap();
    assert_eq!(base.coeffs()[0], a1.coeffs()[0]);
    assert!(base.coeffs()[2..].iter().zip(&a1.coeffs()[2..]).all(|(x, y)| x != y));
    assert_eq!(&base.coeffs()[..2], &lambda.coeffs()[..2]);
    assert_ne!(base.coeffs()[2], lambda.coeffs()[2]);
}

#[test]
fn single_precision_tracks_double() {
    let p32 = hpme::eigen::EigenParams::<f32>::new(2, 1.0, 1.0, 1.0, 0.2).unwrap();
    let p64 = EigenParams::new(2, 1.0, 1.0, 1.0, 0.2).unwrap();
    let s32 = eigen_coefficients(&p32, 8).unwrap();
    let s64 = eigen_coefficients(&p64, 8).unwrap();
    for (a, b) in s32.coeffs().iter().zip(s64.coeffs()) {
        assert!((f64::from(*a) - b).abs() <= 1e-5 * b.abs().max(1.0));
    }
}

#[test]
fn degenerate_slope_is_reported() {
    // a₀³ ≈ 1e−21 leaves no usable slope for the affine solve
    let p = EigenParams::new(4, 1.0, 1.0, 1e-7, 0.0).unwrap();
    assert!(matches!(eigen_coefficients(&p, 4), Err(Error::DegenerateSolve { index: 2, .. })));
}

#[test]
fn radius_of_geometric_series() {
    let s = Series::at_origin((0..=16).map(|i| 2f64.powi(-i)).collect()).unwrap();
    assert_relative_eq!(radius_estimate(&s).unwrap(), 2.0, max_relative = 0.05);
    let s = Series::at_origin((0..=16).map(|i| 3f64.powi(-i)).collect()).unwrap();
    assert_relative_eq!(radius_estimate(&s).unwrap(), 3.0, max_relative = 1e-12);
}

#[test]
fn radius_of_eigen_series_bounds_oracle_grid() {
    let p = EigenParams::new(2, 1.0, 1.0, 1.0, 0.0).unwrap();
    let r = radius_estimate(&eigen_coefficients(&p, 32).unwrap()).unwrap();
    assert!(r.is_finite() && r > 0.0);
    // the singular points ±δ′ bound the disk about the origin; the ratio test
    // overshoots by O(1/N) when the coefficients decay algebraically
    assert!((0.9..1.15).contains(&r), "{r}");
}
