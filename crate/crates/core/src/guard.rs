//! No polynomial is an eigenfunction.
//!
//! For `P` of degree `m ≥ 1`, `L[P]` has degree exactly `nm` with leading
//! coefficient `nm(nm+1) l_m(P)ⁿ`. Since `nm > m` for `n ≥ 2`, that coefficient
//! survives in `L[P] − λP`. The checks here use full-length polynomial
//! products so degrees are exact.

use crate::error::{Error, Result};
use crate::operator::{apply_to_polynomial, OperatorParams};
use crate::scalar::{powi, RealScalar};
use crate::series::TruncatedSeries;

/// Polynomial about the origin whose last coefficient is its true leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T = f64>(TruncatedSeries<T>);

impl<T: RealScalar> Poly<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        let s = TruncatedSeries::at_origin(coeffs)?;
        if s.order() < 1 {
            return Err(Error::InvalidParameter {
                name: "poly",
                reason: "degree must be at least 1".into(),
            });
        }
        if s.coeffs()[s.order()].is_zero() {
            return Err(Error::InvalidParameter {
                name: "poly",
                reason: "leading coefficient must be nonzero".into(),
            });
        }
        Ok(Self(s))
    }

    pub fn degree(&self) -> usize {
        self.0.order()
    }

    pub fn as_series(&self) -> &TruncatedSeries<T> {
        &self.0
    }

    pub fn leading_coeff(&self) -> &T {
        &self.0.coeffs()[self.degree()]
    }
}

/// `(computed, predicted)` degree of `L[P]`; predicted is `n·m`.
pub fn operator_degree_law<T: RealScalar>(p: &Poly<T>, params: &OperatorParams<T>) -> Result<(usize, usize)> {
    let image = apply_to_polynomial(p.as_series(), params)?;
    let computed = image.degree().unwrap_or(0);
    Ok((computed, params.n() as usize * p.degree()))
}

fn leading_law_rhs<T: RealScalar>(p: &Poly<T>, n: u32) -> T {
    let nm = n as usize * p.degree();
    T::from_usize(nm * (nm + 1)) * powi(p.leading_coeff(), n)
}

/// `(lhs, rhs)`: leading coefficient of `L[P]` and `nm(nm+1) l_m(P)ⁿ`.
pub fn leading_coeff_law<T: RealScalar>(p: &Poly<T>, params: &OperatorParams<T>) -> Result<(T, T)> {
    let image = apply_to_polynomial(p.as_series(), params)?;
    let lhs = image.coeffs()[image.order()].clone();
    Ok((lhs, leading_law_rhs(p, params.n())))
}

/// Coefficient of `z^{nm}` in `L[P] − λP`.
pub fn nonexistence_witness<T: RealScalar>(p: &Poly<T>, params: &OperatorParams<T>, lambda: &T) -> Result<T> {
    let image = apply_to_polynomial(p.as_series(), params)?;
    let nm = params.n() as usize * p.degree();
    let l_coeff = image.coeff(nm).cloned().unwrap_or_else(T::zero);
    let p_coeff = p.as_series().coeff(nm).cloned().unwrap_or_else(T::zero);
    Ok(l_coeff - lambda.clone() * p_coeff)
}
