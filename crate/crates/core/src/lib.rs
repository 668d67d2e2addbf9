//! Power-series eigenfunctions of the nonlinear hyperbolic operator
//! `Δ_H uⁿ = λ u` on the radial coordinate of the hyperbolic half-plane, and
//! separable solutions `u(η, t) = f(t) Q(η)` of the associated reactive and
//! time-periodic porous-medium equations.
//!
//! The substitution `z = δ′ cosh η` turns `Δ_H uⁿ` into the algebraic operator
//! `d/dz[(z² − δ′²) d(uⁿ)/dz]`, whose Taylor coefficients obey a recursion in
//! `(a₀, a₁, λ, δ′)`. The crate builds those series ([`eigen`]), checks them
//! against a numerical integration of the explicit ODE ([`ode`]), shows that
//! no polynomial can be an eigenfunction ([`guard`]), and assembles full
//! space-time solutions with the closed-form temporal factor ([`temporal`]).
//!
//! The algebraic kernels are generic over [`Scalar`]; the aliases below fix
//! the common instantiations.

pub mod eigen;
pub mod error;
pub mod guard;
pub mod ode;
pub mod operator;
pub mod scalar;
pub mod series;
pub mod temporal;
pub mod verify;

pub use error::{Error, Guard, Result};
pub use scalar::{RealScalar, Scalar};
pub use series::TruncatedSeries;

use num_complex::Complex64;
use num_rational::BigRational;

pub type Series = TruncatedSeries<f64>;
pub type Series32 = TruncatedSeries<f32>;
pub type ComplexSeries = TruncatedSeries<Complex64>;
pub type ExactSeries = TruncatedSeries<BigRational>;

pub type EigenParams = eigen::EigenParams<f64>;
pub type ExactEigenParams = eigen::EigenParams<BigRational>;
pub type OperatorParams = operator::OperatorParams<f64>;
pub type Poly = guard::Poly<f64>;
