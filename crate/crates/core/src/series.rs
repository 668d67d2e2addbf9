//! Truncated power series about an arbitrary center.
//!
//! A [`TruncatedSeries`] holds `c_0 … c_N` of `Σ c_i (z − a)^i`. Nothing past
//! `c_N` is assumed: sums keep the shorter length, and products either keep the
//! full polynomial product or an explicit cap.

use crate::error::{Error, Result};
use crate::scalar::{powi, Scalar};

/// Near-zero floor on the constant term for the power recurrence.
pub const EPS_CONSTANT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    center: T,
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn new(center: T, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if !center.finite() {
            return Err(Error::NonFinite("series center"));
        }
        if coeffs.iter().any(|c| !c.finite()) {
            return Err(Error::NonFinite("series coefficients"));
        }
        Ok(Self { center, coeffs })
    }

    /// Series about the origin.
    pub fn at_origin(coeffs: Vec<T>) -> Result<Self> {
        Self::new(T::zero(), coeffs)
    }

    pub fn constant(center: T, value: T) -> Result<Self> {
        Self::new(center, vec![value])
    }

    /// Internal constructor for results of operations on already-validated series.
    pub(crate) fn from_parts(center: T, coeffs: Vec<T>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { center, coeffs }
    }

    pub fn center(&self) -> &T {
        &self.center
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> Option<&T> {
        self.coeffs.get(i)
    }

    /// Keeps coefficients through `order` (no-op when already shorter).
    pub fn truncated(&self, order: usize) -> Self {
        let len = (order + 1).min(self.coeffs.len());
        Self::from_parts(self.center.clone(), self.coeffs[..len].to_vec())
    }

    pub fn scaled(&self, alpha: &T) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.clone() * alpha.clone()).collect();
        Self::from_parts(self.center.clone(), coeffs)
    }

    /// Replaces coefficient `i`, extending with zeros if needed.
    pub fn with_coeff(&self, i: usize, value: T) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() <= i {
            coeffs.resize(i + 1, T::zero());
        }
        coeffs[i] = value;
        Self::new(self.center.clone(), coeffs)
    }

    /// Index of the last nonzero coefficient, or `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Largest coefficient magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}

impl<T: Scalar> std::ops::Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn neg(self) -> TruncatedSeries<T> {
        let coeffs = self.coeffs.iter().map(|c| -c.clone()).collect();
        TruncatedSeries::from_parts(self.center.clone(), coeffs)
    }
}

fn check_centers<T: Scalar>(s: &TruncatedSeries<T>, t: &TruncatedSeries<T>) -> Result<()> {
    if s.center != t.center {
        return Err(Error::CenterMismatch);
    }
    Ok(())
}

/// Coefficientwise sum, truncated to the shorter input.
pub fn series_add<T: Scalar>(s: &TruncatedSeries<T>, t: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    check_centers(s, t)?;
    let coeffs = s
        .coeffs
        .iter()
        .zip(&t.coeffs)
        .map(|(a, b)| a.clone() + b.clone())
        .collect();
    Ok(TruncatedSeries::from_parts(s.center.clone(), coeffs))
}

pub fn series_sub<T: Scalar>(s: &TruncatedSeries<T>, t: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    series_add(s, &-t)
}

/// Full Cauchy product (order `s.order + t.order`).
pub fn series_mul<T: Scalar>(s: &TruncatedSeries<T>, t: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    series_mul_capped(s, t, s.order() + t.order())
}

/// Cauchy product `c_i = Σ_k a_k b_{i−k}` through order `min(cap, s.order + t.order)`.
///
/// Accumulation runs in ascending `k` with no compensation.
pub fn series_mul_capped<T: Scalar>(
    s: &TruncatedSeries<T>,
    t: &TruncatedSeries<T>,
    cap: usize,
) -> Result<TruncatedSeries<T>> {
    check_centers(s, t)?;
    let (a, b) = (&s.coeffs, &t.coeffs);
    let order = cap.min(s.order() + t.order());
    let coeffs = (0..=order)
        .map(|i| {
            let lo = i.saturating_sub(b.len() - 1);
            let hi = i.min(a.len() - 1);
            (lo..=hi).fold(T::zero(), |acc, k| acc + a[k].clone() * b[i - k].clone())
        })
        .collect();
    Ok(TruncatedSeries::from_parts(s.center.clone(), coeffs))
}

/// Coefficients of `sⁿ` through order `cap` by the power recurrence
///
/// `b_0 = a_0ⁿ`, `b_i = 1/(i a_0) Σ_{k=1}^{i} (k(n+1) − i) a_k b_{i−k}`.
///
/// Coefficients of `s` beyond its order are taken as zero, so a `cap` above
/// `s.order()` treats `s` as a polynomial. `n = 0` yields `[1]`.
pub fn series_pow<T: Scalar>(s: &TruncatedSeries<T>, n: u32, cap: usize) -> Result<TruncatedSeries<T>> {
    if n == 0 {
        return Ok(TruncatedSeries::from_parts(s.center.clone(), vec![T::one()]));
    }
    if n == 1 {
        return Ok(s.truncated(cap));
    }
    let a = &s.coeffs;
    let a0 = &a[0];
    if a0.magnitude() < EPS_CONSTANT {
        return Err(Error::NearZeroConstant {
            value: a0.magnitude(),
            floor: EPS_CONSTANT,
        });
    }
    let np1 = i64::from(n) + 1;
    let mut b = Vec::with_capacity(cap + 1);
    b.push(powi(a0, n));
    for i in 1..=cap {
        let top = i.min(a.len() - 1);
        let sum = (1..=top).fold(T::zero(), |acc, k| {
            let weight = T::from_i64(k as i64 * np1 - i as i64);
            acc + weight * a[k].clone() * b[i - k].clone()
        });
        b.push(sum / (T::from_usize(i) * a0.clone()));
    }
    Ok(TruncatedSeries::from_parts(s.center.clone(), b))
}

/// `sⁿ` as an exact polynomial by repeated full products (no truncation, no
/// constraint on the constant term).
pub fn series_pow_exact<T: Scalar>(s: &TruncatedSeries<T>, n: u32) -> Result<TruncatedSeries<T>> {
    let mut acc = TruncatedSeries::from_parts(s.center.clone(), vec![T::one()]);
    for _ in 0..n {
        acc = series_mul(&acc, s)?;
    }
    Ok(acc)
}

/// Termwise derivative; a constant maps to `[0]`.
pub fn series_derivative<T: Scalar>(s: &TruncatedSeries<T>) -> TruncatedSeries<T> {
    if s.order() == 0 {
        return TruncatedSeries::from_parts(s.center.clone(), vec![T::zero()]);
    }
    let coeffs = s
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| T::from_usize(i) * c.clone())
        .collect();
    TruncatedSeries::from_parts(s.center.clone(), coeffs)
}

/// Horner evaluation of `Σ c_i (z − center)^i`.
pub fn series_eval<T: Scalar>(s: &TruncatedSeries<T>, z: &T) -> T {
    let w = z.clone() - s.center.clone();
    s.coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, c| acc * w.clone() + c.clone())
}
