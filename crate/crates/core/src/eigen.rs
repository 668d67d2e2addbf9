//! Eigenfunction coefficients of `L[u] = λ u` about an arbitrary center.
//!
//! Given `u(a) = a₀` and `u′(a) = a₁`, every further Taylor coefficient is
//! fixed by matching coefficient `i` of `L[u] − λu` to zero. Coefficient `i`
//! of `L[u]` about `a` is
//!
//! ```text
//! (i+1) [ q(a)(i+2) b_{i+2} + 2a(i+1) b_{i+1} + i b_i ],   q(a) = a² − δ′²
//! ```
//!
//! where `b` are the coefficients of `uⁿ`. Only `b_{i+2}` involves the unknown
//! `a_{i+2}`, and it does so affinely with slope `n a₀ⁿ⁻¹`, so each step is a
//! scalar linear solve.

use crate::error::{Error, Result};
use crate::operator::{apply_algebraic_operator, eval_in_eta, EtaValue, OperatorParams};
use crate::scalar::{powi, RealScalar, Scalar};
use crate::series::{series_pow, TruncatedSeries, EPS_CONSTANT};

/// Lower bound on `|center² − δ′²|` for nonzero centers.
pub const EPS_QUADRATIC: f64 = 1e-6;

/// Floor on the solve slope relative to `(i+1)(i+2) n (a² + δ′²) max(1, |a₀|)ⁿ⁻¹`.
const SLOPE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenParams<T = f64> {
    n: u32,
    lambda: T,
    delta_prime: T,
    a0: T,
    a1: T,
    center: T,
}

impl<T: RealScalar> EigenParams<T> {
    /// Parameters for an expansion about the origin.
    pub fn new(n: u32, lambda: T, delta_prime: T, a0: T, a1: T) -> Result<Self> {
        OperatorParams::new(n, delta_prime.clone())?;
        if lambda.is_zero() || !lambda.finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("eigenvalue must be finite and nonzero, got {lambda:?}"),
            });
        }
        if !a0.finite() || a0.magnitude() < EPS_CONSTANT {
            return Err(Error::InvalidParameter {
                name: "a0",
                reason: format!("|a0| must be at least {EPS_CONSTANT:e}, got {a0:?}"),
            });
        }
        if !a1.finite() {
            return Err(Error::NonFinite("a1"));
        }
        Ok(Self {
            n,
            lambda,
            delta_prime,
            a0,
            a1,
            center: T::zero(),
        })
    }

    /// Moves the expansion point; `a₀`, `a₁` become `u(center)`, `u′(center)`.
    pub fn with_center(mut self, center: T) -> Result<Self> {
        if !center.finite() {
            return Err(Error::NonFinite("center"));
        }
        if !center.is_zero() {
            let q = center.clone() * center.clone() - self.delta_prime.clone() * self.delta_prime.clone();
            if q.magnitude() < EPS_QUADRATIC {
                return Err(Error::InvalidParameter {
                    name: "center",
                    reason: format!(
                        "|center^2 - delta'^2| = {:e} is below {EPS_QUADRATIC:e}",
                        q.magnitude()
                    ),
                });
            }
        }
        self.center = center;
        Ok(self)
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn lambda(&self) -> &T {
        &self.lambda
    }
    pub fn delta_prime(&self) -> &T {
        &self.delta_prime
    }
    pub fn a0(&self) -> &T {
        &self.a0
    }
    pub fn a1(&self) -> &T {
        &self.a1
    }
    pub fn center(&self) -> &T {
        &self.center
    }

    pub fn operator(&self) -> OperatorParams<T> {
        OperatorParams::new(self.n, self.delta_prime.clone()).expect("validated at construction")
    }
}

/// `a₂ = −λ / (2 δ′² n a₀ⁿ⁻²) − (n−1) a₁² / (2 a₀)`, valid about the origin only.
pub fn a2_closed_form<T: RealScalar>(p: &EigenParams<T>) -> Result<T> {
    if !p.center.is_zero() {
        return Err(Error::WrongCenter(p.center.to_f64()));
    }
    let two = T::from_i64(2);
    let n = T::from_i64(i64::from(p.n));
    let d2 = p.delta_prime.clone() * p.delta_prime.clone();
    let first = p.lambda.clone() / (two.clone() * d2 * n.clone() * powi(&p.a0, p.n - 2));
    let second = (n - T::one()) * p.a1.clone() * p.a1.clone() / (two * p.a0.clone());
    Ok(-first - second)
}

/// Taylor coefficients `a₀ … a_order` of the eigenfunction about `p.center`.
pub fn eigen_coefficients<T: RealScalar>(p: &EigenParams<T>, order: usize) -> Result<TruncatedSeries<T>> {
    if order < 2 {
        return Err(Error::InsufficientOrder { required: 2, actual: order });
    }
    let n = p.n;
    let np1 = i64::from(n) + 1;
    let a0 = p.a0.clone();
    let lead = T::from_i64(i64::from(n)) * powi(&a0, n - 1);
    let q = p.center.clone() * p.center.clone() - p.delta_prime.clone() * p.delta_prime.clone();
    let two_center = T::from_i64(2) * p.center.clone();

    let mut a = Vec::with_capacity(order + 1);
    let mut b = Vec::with_capacity(order + 1);
    a.push(a0.clone());
    a.push(p.a1.clone());
    b.push(powi(&a0, n));
    b.push(lead.clone() * p.a1.clone());
    // natural size of the slope with q(center) and a₀ at full strength
    let slope_scale = (p.center.magnitude().powi(2) + p.delta_prime.magnitude().powi(2))
        * f64::from(n)
        * a0.magnitude().max(1.0).powi(n as i32 - 1);

    for i in 0..=order - 2 {
        let m = i + 2;
        // b_m without its a_m contribution
        let partial = (1..m).fold(T::zero(), |acc, k| {
            let w = T::from_i64(k as i64 * np1 - m as i64);
            acc + w * a[k].clone() * b[m - k].clone()
        }) / (T::from_usize(m) * a0.clone());

        let fi = T::from_usize(i);
        let fi1 = T::from_usize(i + 1);
        let fi2 = T::from_usize(i + 2);
        let base = fi1.clone()
            * (q.clone() * fi2.clone() * partial.clone()
                + two_center.clone() * fi1.clone() * b[i + 1].clone()
                + fi * b[i].clone())
            - p.lambda.clone() * a[i].clone();
        let slope = fi1 * fi2 * q.clone() * lead.clone();

        let threshold = SLOPE_FLOOR * slope_scale * ((i + 1) * (i + 2)) as f64;
        if slope.magnitude() < threshold {
            return Err(Error::DegenerateSolve {
                index: m,
                slope: slope.magnitude(),
                threshold,
            });
        }
        let next = -base / slope;
        let b_next = partial + lead.clone() * next.clone();
        a.push(next);
        b.push(b_next);
    }
    TruncatedSeries::new(p.center.clone(), a)
}

/// Direct transcription of the origin recursion
///
/// ```text
/// a_{i+2} = −λ a_i / (δ′²(i+1)(i+2) n a₀ⁿ⁻¹)
///         + [Σ_{k=1}^{i} (k(n+1)−i) a_k b_{i−k} − δ′² Σ_{k=1}^{i+1} (k(n+1)−i−2) a_k b_{i+2−k}] / (δ′²(i+2) n a₀ⁿ)
/// ```
///
/// applied verbatim regardless of `p.center`. About the origin it must agree
/// with [`eigen_coefficients`]; elsewhere it ignores the re-expansion of
/// `z² − δ′²` and is only kept as a diagnostic.
pub fn literal_origin_recursion<T: RealScalar>(p: &EigenParams<T>, order: usize) -> Result<TruncatedSeries<T>> {
    if order < 2 {
        return Err(Error::InsufficientOrder { required: 2, actual: order });
    }
    let n = p.n;
    let nn = T::from_i64(i64::from(n));
    let np1 = i64::from(n) + 1;
    let a0 = p.a0.clone();
    let d2 = p.delta_prime.clone() * p.delta_prime.clone();
    let mut a = vec![a0.clone(), p.a1.clone()];
    let mut b = vec![powi(&a0, n)];
    push_power_coefficient(&mut b, &a, np1);

    for i in 0..=order - 2 {
        let fi = i as i64;
        let s1 = (1..=i).fold(T::zero(), |acc, k| {
            acc + T::from_i64(k as i64 * np1 - fi) * a[k].clone() * b[i - k].clone()
        });
        let s2 = (1..=i + 1).fold(T::zero(), |acc, k| {
            acc + T::from_i64(k as i64 * np1 - fi - 2) * a[k].clone() * b[i + 2 - k].clone()
        });
        let first = -(p.lambda.clone() * a[i].clone())
            / (d2.clone() * T::from_usize((i + 1) * (i + 2)) * nn.clone() * powi(&a0, n - 1));
        let second = (s1 - d2.clone() * s2) / (d2.clone() * T::from_usize(i + 2) * nn.clone() * powi(&a0, n));
        a.push(first + second);
        push_power_coefficient(&mut b, &a, np1);
    }
    TruncatedSeries::new(p.center.clone(), a)
}

/// Appends `b_i` (i = b.len()) from the power recurrence.
fn push_power_coefficient<T: Scalar>(b: &mut Vec<T>, a: &[T], np1: i64) {
    let i = b.len();
    let sum = (1..=i).fold(T::zero(), |acc, k| {
        acc + T::from_i64(k as i64 * np1 - i as i64) * a[k].clone() * b[i - k].clone()
    });
    b.push(sum / (T::from_usize(i) * a[0].clone()));
}

/// Outcome of comparing [`literal_origin_recursion`] with [`eigen_coefficients`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiteralRecursionCheck {
    pub agrees: bool,
    pub max_relative_difference: f64,
}

pub fn literal_recursion_check(p: &EigenParams<f64>, order: usize, tol: f64) -> Result<LiteralRecursionCheck> {
    let matched = eigen_coefficients(p, order)?;
    let literal = literal_origin_recursion(p, order)?;
    let max_relative_difference = matched
        .coeffs()
        .iter()
        .zip(literal.coeffs())
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(LiteralRecursionCheck {
        agrees: max_relative_difference <= tol,
        max_relative_difference,
    })
}

/// Coefficient residual of `L[u] − λu` through order `u.order() − 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub residual: Vec<f64>,
    pub max_abs: f64,
    /// `max(1, largest coefficient of u, uⁿ and L[u])`.
    pub scale: f64,
}

impl ResidualReport {
    pub fn max_scaled(&self) -> f64 {
        self.max_abs / self.scale
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs <= tol * self.scale
    }
}

pub fn eigen_residual(p: &EigenParams<f64>, u: &TruncatedSeries<f64>) -> Result<ResidualReport> {
    let op = p.operator();
    let l = apply_algebraic_operator(u, &op)?;
    let power = series_pow(u, p.n, u.order())?;
    let residual: Vec<f64> = l
        .coeffs()
        .iter()
        .zip(u.coeffs())
        .map(|(li, ui)| li - p.lambda * ui)
        .collect();
    let max_abs = residual.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let scale = 1.0_f64
        .max(u.max_magnitude())
        .max(power.max_magnitude())
        .max(l.max_magnitude());
    Ok(ResidualReport {
        residual,
        max_abs,
        scale,
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len().is_multiple_of(2) {
        0.5 * (xs[mid - 1] + xs[mid])
    } else {
        xs[mid]
    }
}

/// Decay rate of the largest coefficient between the last two windows.
fn envelope_ratio(c: &[f64], window: usize) -> Option<f64> {
    if c.len() < 2 * window + 1 {
        return None;
    }
    let argmax = |range: std::ops::Range<usize>| {
        range
            .map(|i| (i, c[i].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .filter(|&(_, m)| m > 0.0)
    };
    let last = c.len() - window..c.len();
    let previous = c.len() - 2 * window..c.len() - window;
    let ((i1, m1), (i2, m2)) = (argmax(previous)?, argmax(last)?);
    Some((m1 / m2).powf(1.0 / (i2 - i1) as f64))
}

/// Radius of convergence from the last eight coefficients.
///
/// Median of `|c_{i−1}/c_i|` over the window, capped by the median of the
/// two-step estimates `|c_{i−2}/c_i|^{1/2}`; the latter is what survives when
/// singularities at `±R` make consecutive ratios alternate between large and
/// small. With at least sixteen coefficients the estimate is further capped by
/// the decay of the window maxima, `(max|c| in the previous window / max|c| in
/// the last window)^{1/gap}`, which tracks the envelope when a conjugate pair
/// of singularities makes the coefficients oscillate. When more than half of
/// the one-step ratios are undefined (a zero on either side), falls back to
/// `1 / max |c_i|^{1/i}` over the window.
pub fn radius_estimate(s: &TruncatedSeries<f64>) -> Result<f64> {
    const WINDOW: usize = 8;
    let order = s.order();
    if order < WINDOW {
        return Err(Error::InsufficientOrder {
            required: WINDOW,
            actual: order,
        });
    }
    let c = s.coeffs();
    let tail = order + 1 - WINDOW..=order;
    if tail.clone().filter(|&i| c[i] != 0.0).count() < 2 {
        return Err(Error::NoRadiusEstimate);
    }
    let ratios: Vec<f64> = tail
        .clone()
        .filter(|&i| c[i] != 0.0 && c[i - 1] != 0.0)
        .map(|i| (c[i - 1] / c[i]).abs())
        .collect();
    if 2 * ratios.len() >= WINDOW {
        let one_step = median(ratios);
        let two_step: Vec<f64> = tail
            .clone()
            .filter(|&i| c[i] != 0.0 && c[i - 2] != 0.0)
            .map(|i| (c[i - 2] / c[i]).abs().sqrt())
            .collect();
        let mut estimate = one_step;
        if !two_step.is_empty() {
            estimate = estimate.min(median(two_step));
        }
        if let Some(envelope) = envelope_ratio(c, WINDOW) {
            estimate = estimate.min(envelope);
        }
        return Ok(estimate);
    }
    let limsup = tail
        .filter(|&i| c[i] != 0.0)
        .map(|i| c[i].abs().powf(1.0 / i as f64))
        .fold(0.0, f64::max);
    Ok(1.0 / limsup)
}

/// True when repeated evaluations give bitwise-identical coefficients,
/// including one on another thread.
pub fn determinism_check(p: &EigenParams<f64>, order: usize) -> bool {
    let first = eigen_coefficients(p, order);
    let second = eigen_coefficients(&p.clone(), order);
    let moved = p.clone();
    let third = std::thread::spawn(move || eigen_coefficients(&moved, order))
        .join()
        .ok();
    let bits = |r: &Result<TruncatedSeries<f64>>| -> Option<Vec<u64>> {
        r.as_ref()
            .ok()
            .map(|s| s.coeffs().iter().map(|c| c.to_bits()).collect())
    };
    match (bits(&first), bits(&second), third.as_ref().and_then(bits)) {
        (Some(x), Some(y), Some(z)) => x == y && y == z,
        (None, None, None) => first == second,
        _ => false,
    }
}

/// An eigenfunction series with its working radius.
#[derive(Debug, Clone)]
pub struct EigenFunction {
    params: EigenParams<f64>,
    series: TruncatedSeries<f64>,
    radius: Option<f64>,
}

impl EigenFunction {
    pub fn build(params: EigenParams<f64>, order: usize) -> Result<Self> {
        let series = eigen_coefficients(&params, order)?;
        let radius = radius_estimate(&series).ok();
        Ok(Self { params, series, radius })
    }

    pub fn params(&self) -> &EigenParams<f64> {
        &self.params
    }

    pub fn series(&self) -> &TruncatedSeries<f64> {
        &self.series
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// Half the estimated radius (zero when no estimate exists).
    pub fn trusted_radius(&self) -> f64 {
        self.radius.map_or(0.0, |r| 0.5 * r)
    }

    pub fn eval_in_eta(&self, eta: f64) -> Result<EtaValue> {
        eval_in_eta(&self.series, &self.params.operator(), eta, self.trusted_radius())
    }

    pub fn residual(&self) -> Result<ResidualReport> {
        eigen_residual(&self.params, &self.series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: u32, lambda: f64, d: f64, a0: f64, a1: f64) -> EigenParams<f64> {
        EigenParams::new(n, lambda, d, a0, a1).unwrap()
    }

    #[test]
    fn validation() {
        assert!(EigenParams::new(2, 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(EigenParams::new(2, 1.0, 1.0, 1e-9, 0.0).is_err());
        assert!(EigenParams::new(1, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(EigenParams::new(2, 1.0, -1.0, 1.0, 0.0).is_err());
        assert!(params(2, 1.0, 1.0, 1.0, 0.0).with_center(1.0).is_err());
        assert!(params(2, 1.0, 1.0, 1.0, 0.0).with_center(-1.0 - 1e-7).is_err());
        assert!(params(2, 1.0, 1.0, 1.0, 0.0).with_center(2.0).is_ok());
    }

    #[test]
    fn a2_worked_values() {
        assert_eq!(a2_closed_form(&params(2, 2.0, 1.0, 1.0, 0.0)).unwrap(), -0.5);
        assert_eq!(a2_closed_form(&params(3, 24.0, 2.0, 1.0, 0.0)).unwrap(), -1.0);
        // with λ → 0 only the a₁ term survives
        let tiny = a2_closed_form(&params(2, 1e-300, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(tiny, -0.5);
        let shifted = params(2, 1.0, 1.0, 1.0, 0.0).with_center(2.0).unwrap();
        assert_eq!(a2_closed_form(&shifted), Err(Error::WrongCenter(2.0)));
    }

    #[test]
    fn order_two_series_matches_closed_form() {
        let p = params(2, 2.0, 1.0, 1.0, 0.0);
        let s = eigen_coefficients(&p, 2).unwrap();
        assert_eq!(s.coeffs(), &[1.0, 0.0, -0.5]);
        let p = params(4, -1.3, 0.7, -1.4, 0.6);
        let s = eigen_coefficients(&p, 2).unwrap();
        assert_relative_eq!(s.coeffs()[2], a2_closed_form(&p).unwrap(), max_relative = 1e-12);
        assert!(eigen_coefficients(&p, 1).is_err());
    }

    #[test]
    fn residual_vanishes_about_shifted_center() {
        let p = params(3, -2.0, 1.2, 0.8, 0.3).with_center(-2.1).unwrap();
        let s = eigen_coefficients(&p, 16).unwrap();
        let report = eigen_residual(&p, &s).unwrap();
        assert!(report.passes(1e-10), "{report:?}");
    }

    #[test]
    fn literal_recursion_only_agrees_at_origin() {
        let p = params(2, 1.0, 1.0, 1.0, 0.5);
        assert!(literal_recursion_check(&p, 12, 1e-12).unwrap().agrees);
        let shifted = p.with_center(2.0).unwrap();
        let check = literal_recursion_check(&shifted, 12, 1e-12).unwrap();
        assert!(!check.agrees);
        assert!(check.max_relative_difference > 1e-3);
    }

    #[test]
    fn radius_of_geometric_series() {
        let geo = |r: f64, order: i32| {
            TruncatedSeries::at_origin((0..=order).map(|i| r.powi(-i)).collect()).unwrap()
        };
        assert_relative_eq!(radius_estimate(&geo(2.0, 12)).unwrap(), 2.0, max_relative = 0.05);
        assert_relative_eq!(radius_estimate(&geo(3.0, 16)).unwrap(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn radius_falls_back_for_even_series() {
        // 1/(1 − w²/4): only even powers, radius 2
        let coeffs = (0..=20)
            .map(|i: i32| if i % 2 == 0 { 0.25_f64.powi(i / 2) } else { 0.0 })
            .collect();
        let s = TruncatedSeries::at_origin(coeffs).unwrap();
        assert_relative_eq!(radius_estimate(&s).unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn radius_errors() {
        let short = TruncatedSeries::at_origin(vec![1.0; 5]).unwrap();
        assert!(matches!(radius_estimate(&short), Err(Error::InsufficientOrder { .. })));
        let mut c = vec![0.0; 12];
        c[0] = 1.0;
        c[11] = 1.0;
        let s = TruncatedSeries::at_origin(c).unwrap();
        assert_eq!(radius_estimate(&s), Err(Error::NoRadiusEstimate));
    }

    #[test]
    fn determinism_and_sensitivity() {
        let p = params(3, 1.5, 0.9, 1.1, -0.4);
        assert!(determinism_check(&p, 16));

        let base = eigen_coefficients(&p, 8).unwrap();
        let other_a1 = eigen_coefficients(&params(3, 1.5, 0.9, 1.1, 0.2), 8).unwrap();
        assert_eq!(base.coeffs()[0], other_a1.coeffs()[0]);
        assert!(base.coeffs()[2..].iter().zip(&other_a1.coeffs()[2..]).all(|(x, y)| x != y));

        let other_lambda = eigen_coefficients(&params(3, 2.5, 0.9, 1.1, -0.4), 8).unwrap();
        assert_eq!(base.coeffs()[..2], other_lambda.coeffs()[..2]);
        assert_ne!(base.coeffs()[2], other_lambda.coeffs()[2]);
    }
}
