//! The substitution `z = δ′ cosh η` and the algebraic operator
//! `L[u] = d/dz[(z² − δ′²) d(uⁿ)/dz]`.
//!
//! Under the substitution, the radial hyperbolic Laplacian
//! `(1/sinh η) d/dη (sinh η d/dη)` acting on `uⁿ` is exactly `L[u]`, so series
//! built in `z` can be evaluated back on the η axis.

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};
use crate::series::{
    series_derivative, series_mul, series_mul_capped, series_pow, series_pow_exact, series_eval,
    TruncatedSeries,
};

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorParams<T = f64> {
    n: u32,
    delta_prime: T,
}

impl<T: RealScalar> OperatorParams<T> {
    pub fn new(n: u32, delta_prime: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("exponent must be an integer >= 2, got {n}"),
            });
        }
        if !delta_prime.finite() || delta_prime <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("delta' must be positive and finite, got {delta_prime:?}"),
            });
        }
        Ok(Self { n, delta_prime })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn delta_prime(&self) -> &T {
        &self.delta_prime
    }

    /// `q(z) = z² − δ′²` re-expanded about `center`: `q(a) + 2a w + w²`.
    pub fn quadratic_about(&self, center: &T) -> TruncatedSeries<T> {
        let a = center.clone();
        let d2 = self.delta_prime.clone() * self.delta_prime.clone();
        let coeffs = vec![a.clone() * a.clone() - d2, T::from_i64(2) * a, T::one()];
        TruncatedSeries::from_parts(center.clone(), coeffs)
    }
}

impl OperatorParams<f64> {
    /// `z(η) = δ′ cosh η`, for `η ≥ 0`.
    pub fn z_of_eta(&self, eta: f64) -> Result<f64> {
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::Domain(format!("eta must be finite and >= 0, got {eta}")));
        }
        Ok(self.delta_prime * eta.cosh())
    }

    /// `η(z) = arccosh(z/δ′)`, for `z ≥ δ′`.
    pub fn eta_of_z(&self, z: f64) -> Result<f64> {
        if !z.is_finite() || z < self.delta_prime {
            return Err(Error::Domain(format!(
                "z = {z} is below delta' = {}",
                self.delta_prime
            )));
        }
        Ok((z / self.delta_prime).acosh())
    }
}

/// `L[u]` for a truncated series, reliable (and returned) through order `u.order() − 2`.
pub fn apply_algebraic_operator<T: Scalar + RealScalar>(
    u: &TruncatedSeries<T>,
    p: &OperatorParams<T>,
) -> Result<TruncatedSeries<T>> {
    let order = u.order();
    if order < 2 {
        return Err(Error::InsufficientOrder { required: 2, actual: order });
    }
    let power = series_pow(u, p.n, order)?;
    let flux = series_mul_capped(&p.quadratic_about(u.center()), &series_derivative(&power), order - 1)?;
    Ok(series_derivative(&flux))
}

/// `L[P]` for a polynomial `P`, computed with full-length products.
///
/// Trailing zeros are dropped, so the result's order is its exact degree
/// (`[0]` for the zero polynomial).
pub fn apply_to_polynomial<T: Scalar + RealScalar>(
    poly: &TruncatedSeries<T>,
    p: &OperatorParams<T>,
) -> Result<TruncatedSeries<T>> {
    let power = series_pow_exact(poly, p.n)?;
    let flux = series_mul(&p.quadratic_about(poly.center()), &series_derivative(&power))?;
    let out = series_derivative(&flux);
    let keep = out.degree().unwrap_or(0);
    Ok(out.truncated(keep))
}

/// Value of a z-series at `z(η)`, flagged by whether `z` lies within the
/// trusted disk about the series center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaValue {
    pub eta: f64,
    pub z: f64,
    pub value: f64,
    pub trusted: bool,
}

/// Evaluates `u(δ′ cosh η)`. Points outside `trusted_radius` are still
/// evaluated and returned with `trusted = false`.
pub fn eval_in_eta(
    u: &TruncatedSeries<f64>,
    p: &OperatorParams<f64>,
    eta: f64,
    trusted_radius: f64,
) -> Result<EtaValue> {
    let z = p.z_of_eta(eta)?;
    Ok(EtaValue {
        eta,
        z,
        value: series_eval(u, &z),
        trusted: (z - u.center()).abs() <= trusted_radius,
    })
}

/// Default finite-difference step for η-stencils.
pub fn default_step(eta: f64) -> f64 {
    1e-5 * eta.abs().max(1.0)
}

/// Second-order conservative stencil for `(1/sinh η) d/dη(sinh η dG/dη)`.
///
/// Samples `G` at `η − h`, `η`, `η + h`. The caller guarantees `η > h > 0`.
pub fn radial_laplacian_fd<T: Scalar, G: Fn(f64) -> T>(big_g: G, eta: f64, h: f64) -> T {
    let g_minus = big_g(eta - h);
    let g_mid = big_g(eta);
    let g_plus = big_g(eta + h);
    let s_plus = T::from_f64((eta + 0.5 * h).sinh());
    let s_minus = T::from_f64((eta - 0.5 * h).sinh());
    let numer = s_plus * (g_plus - g_mid.clone()) - s_minus * (g_mid - g_minus);
    numer / T::from_f64(h * h * eta.sinh())
}

/// Finite-difference residual `Δ_H gⁿ − λ g` at `η`, with O(h²) truncation error.
pub fn hyperbolic_residual<G: Fn(f64) -> f64>(
    g: G,
    p: &OperatorParams<f64>,
    lambda: f64,
    eta: f64,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && eta > h) {
        return Err(Error::StepTooLarge { eta, h });
    }
    let n = p.n as i32;
    let lap = radial_laplacian_fd(|x| g(x).powi(n), eta, h);
    Ok(lap - lambda * g(eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: u32, d: f64) -> OperatorParams<f64> {
        OperatorParams::new(n, d).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(OperatorParams::new(1, 1.0).is_err());
        assert!(OperatorParams::new(2, 0.0).is_err());
        assert!(OperatorParams::new(2, f64::NAN).is_err());
        assert!(OperatorParams::new(3, 0.5).is_ok());
    }

    #[test]
    fn coordinate_change() {
        assert_eq!(params(2, 1.0).z_of_eta(0.0).unwrap(), 1.0);
        assert_eq!(params(2, 2.0).z_of_eta(0.0).unwrap(), 2.0);
        assert_relative_eq!(params(2, 1.0).z_of_eta(3.0_f64.acosh()).unwrap(), 3.0, max_relative = 1e-15);
        assert!(params(2, 1.0).z_of_eta(-0.1).is_err());

        assert_eq!(params(2, 1.0).eta_of_z(1.0).unwrap(), 0.0);
        assert_relative_eq!(params(2, 2.0).eta_of_z(2.0 * 1.0_f64.cosh()).unwrap(), 1.0, max_relative = 1e-14);
        // arccosh(2) = ln(2 + √3)
        let expected = (2.0 + 3.0_f64.sqrt()).ln();
        assert_relative_eq!(params(2, 0.5).eta_of_z(1.0).unwrap(), expected, max_relative = 1e-15);
        assert!(params(2, 1.0).eta_of_z(0.99).is_err());
    }

    #[test]
    fn polynomial_operator_examples() {
        let p = params(2, 1.0);
        let z = TruncatedSeries::at_origin(vec![0.0, 1.0]).unwrap();
        assert_eq!(apply_to_polynomial(&z, &p).unwrap().coeffs(), &[-2.0, 0.0, 6.0]);
        // d/dz((z² − 1)(2 + 2z)) = 6z² + 4z − 2
        let one_plus_z = TruncatedSeries::at_origin(vec![1.0, 1.0]).unwrap();
        assert_eq!(apply_to_polynomial(&one_plus_z, &p).unwrap().coeffs(), &[-2.0, 4.0, 6.0]);
        for n in 2..5 {
            let c = TruncatedSeries::at_origin(vec![1.7]).unwrap();
            assert_eq!(apply_to_polynomial(&c, &params(n, 0.3)).unwrap().coeffs(), &[0.0]);
        }
    }

    #[test]
    fn truncated_operator_matches_closed_form_at_origin() {
        // coefficient i of L[u] is (i+1)(i b_i − δ′²(i+2) b_{i+2})
        let p = params(3, 1.3);
        let u = TruncatedSeries::at_origin(vec![0.9, -0.4, 0.25, 0.1, -0.05, 0.02, 0.3]).unwrap();
        let b = series_pow(&u, 3, u.order()).unwrap();
        let l = apply_algebraic_operator(&u, &p).unwrap();
        assert_eq!(l.order(), u.order() - 2);
        let d2 = 1.3 * 1.3;
        for i in 0..=l.order() {
            let bi = b.coeffs()[i];
            let bi2 = b.coeffs()[i + 2];
            let fi = i as f64;
            let expected = (fi + 1.0) * (fi * bi - d2 * (fi + 2.0) * bi2);
            assert_relative_eq!(l.coeffs()[i], expected, max_relative = 1e-14, epsilon = 1e-15);
        }
    }

    #[test]
    fn truncated_operator_errors() {
        let p = params(2, 1.0);
        let short = TruncatedSeries::at_origin(vec![1.0, 1.0]).unwrap();
        assert_eq!(
            apply_algebraic_operator(&short, &p),
            Err(Error::InsufficientOrder { required: 2, actual: 1 })
        );
        let zero_const = TruncatedSeries::at_origin(vec![0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            apply_algebraic_operator(&zero_const, &p),
            Err(Error::NearZeroConstant { .. })
        ));
    }

    #[test]
    fn shifted_center_agrees_with_polynomial_route() {
        // For a polynomial, the truncated route about a nonzero center must agree
        // with re-expanding the exact result about that center.
        let p = params(2, 1.0);
        let center = 2.5;
        let u = TruncatedSeries::new(center, vec![1.0, 0.5, -0.25, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let l = apply_algebraic_operator(&u, &p).unwrap();
        let exact = apply_to_polynomial(&u, &p).unwrap();
        for &dz in &[-0.3, 0.0, 0.2, 0.4] {
            let z = center + dz;
            assert_relative_eq!(series_eval(&l, &z), series_eval(&exact, &z), max_relative = 1e-12);
        }
    }

    #[test]
    fn eta_evaluation() {
        let p = params(2, 1.0);
        let u = TruncatedSeries::at_origin(vec![0.0, 1.0]).unwrap();
        let v = eval_in_eta(&u, &p, 2.0_f64.acosh(), f64::INFINITY).unwrap();
        assert_relative_eq!(v.value, 2.0, max_relative = 1e-15);
        assert!(v.trusted);
        let v0 = eval_in_eta(&u, &p, 0.0, 0.5).unwrap();
        assert_eq!(v0.value, series_eval(&u, &1.0));
        assert!(!v0.trusted);
        let c = TruncatedSeries::at_origin(vec![4.2]).unwrap();
        for eta in [0.0, 0.7, 3.0] {
            assert_eq!(eval_in_eta(&c, &p, eta, 1.0).unwrap().value, 4.2);
        }
    }

    #[test]
    fn residual_step_guard() {
        let p = params(2, 1.0);
        assert!(matches!(
            hyperbolic_residual(|_| 1.0, &p, 0.0, 1e-5, 1e-4),
            Err(Error::StepTooLarge { .. })
        ));
        let r = hyperbolic_residual(|_| 2.0, &p, 0.0, 1.0, 1e-4).unwrap();
        assert!(r.abs() < 1e-8);
    }

    #[test]
    fn kernel_family_has_small_residual() {
        let p = params(3, 1.0);
        let g = |eta: f64| (-0.8 * (0.5 * eta).tanh().ln() + 1.2).powf(1.0 / 3.0);
        for eta in [0.6, 1.0, 2.0] {
            let r = hyperbolic_residual(g, &p, 0.0, eta, 1e-4).unwrap();
            assert!(r.abs() < 1e-6, "eta {eta}: {r}");
        }
    }
}
