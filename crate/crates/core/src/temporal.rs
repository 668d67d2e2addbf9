//! Closed-form temporal factor for `f′ = A₁ fⁿ + A₂ f`,
//!
//! ```text
//! f(t) = [ −A₂ / (A₁ − c e^{−(n−1)A₂ t}) ]^{1/(n−1)},
//! ```
//!
//! and separable solutions `u(η, t) = f(t) Q(η)` of
//! `∂u/∂t − A₂ u = Δ_H uⁿ` built from an eigenfunction `Q` with eigenvalue `A₁`.
//! `A₂ = −1` gives the reactive equation `∂u/∂t = Δ_H uⁿ − u`, `A₂ = iω/α` the
//! time-periodic one.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::eigen::EigenFunction;
use crate::error::{Error, Result};
use crate::operator::{apply_to_polynomial, radial_laplacian_fd};
use crate::series::{series_eval, TruncatedSeries};

/// `|A₁ − c e^{−(n−1)A₂t}|` below this is reported as a pole.
pub const POLE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalParams {
    n: u32,
    a1: Complex64,
    a2: Complex64,
    c: Complex64,
    branch: u32,
}

impl TemporalParams {
    pub fn new(n: u32, a1: Complex64, a2: Complex64, c: Complex64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("exponent must be an integer >= 2, got {n}"),
            });
        }
        for (name, v) in [("A1", a1), ("A2", a2)] {
            if v.norm() == 0.0 || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and nonzero, got {v}"),
                });
            }
        }
        if !c.is_finite() {
            return Err(Error::NonFinite("c"));
        }
        Ok(Self {
            n,
            a1,
            a2,
            c,
            branch: 0,
        })
    }

    /// `A₁ = λ`, `A₂ = −1`.
    pub fn reactive(n: u32, lambda: f64, c: f64) -> Result<Self> {
        Self::new(n, lambda.into(), Complex64::new(-1.0, 0.0), c.into())
    }

    /// `A₁ = λ`, `A₂ = i ω/α`.
    pub fn periodic(n: u32, lambda: f64, omega_over_alpha: f64, c: Complex64) -> Result<Self> {
        Self::new(n, lambda.into(), Complex64::new(0.0, omega_over_alpha), c)
    }

    /// Selects the root `e^{2πik/(n−1)} × principal`; `k = 0` is the principal branch.
    pub fn with_branch(mut self, k: u32) -> Result<Self> {
        if k >= self.n - 1 {
            return Err(Error::InvalidParameter {
                name: "branch",
                reason: format!("branch index must be below n - 1 = {}", self.n - 1),
            });
        }
        self.branch = k;
        Ok(self)
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn a1(&self) -> Complex64 {
        self.a1
    }
    pub fn a2(&self) -> Complex64 {
        self.a2
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn branch(&self) -> u32 {
        self.branch
    }

    /// All parameters real and principal branch.
    pub fn is_real(&self) -> bool {
        self.a1.im == 0.0 && self.a2.im == 0.0 && self.c.im == 0.0 && self.branch == 0
    }

    fn root_index(&self) -> u32 {
        self.n - 1
    }

    fn decay(&self, t: f64) -> Complex64 {
        self.c * (-(f64::from(self.root_index())) * self.a2 * t).exp()
    }

    /// Real pole times `t` with `c e^{−(n−1)A₂t} = A₁`, nearest to `near` first.
    pub fn pole_time(&self, near: f64) -> Option<f64> {
        if self.c.norm() == 0.0 {
            return None;
        }
        let log = (self.a1 / self.c).ln();
        let denom = -(f64::from(self.root_index())) * self.a2;
        (-8..=8)
            .map(|k| (log + Complex64::new(0.0, 2.0 * PI * f64::from(k))) / denom)
            .filter(|t| t.im.abs() <= 1e-9 * (1.0 + t.re.abs()))
            .map(|t| t.re)
            .min_by(|x, y| (x - near).abs().total_cmp(&(y - near).abs()))
    }

    fn denominator(&self, t: f64) -> Result<Complex64> {
        let denom = self.a1 - self.decay(t);
        if denom.norm() < POLE_FLOOR || !denom.is_finite() {
            return Err(Error::Pole {
                t,
                pole_time: self.pole_time(t),
            });
        }
        Ok(denom)
    }

    /// `−A₂ / (A₁ − c e^{−(n−1)A₂ t})`.
    pub fn bracket(&self, t: f64) -> Result<Complex64> {
        Ok(-self.a2 / self.denominator(t)?)
    }
}

/// Principal `m`-th root, argument in `(−π/m, π/m]`.
fn principal_root(z: Complex64, m: u32) -> Complex64 {
    if m == 1 {
        z
    } else {
        z.powf(1.0 / f64::from(m))
    }
}

fn branch_factor(k: u32, m: u32) -> Complex64 {
    if k == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * f64::from(k) / f64::from(m))
    }
}

pub fn f_closed_form(p: &TemporalParams, t: f64) -> Result<Complex64> {
    let m = p.root_index();
    Ok(principal_root(p.bracket(t)?, m) * branch_factor(p.branch, m))
}

/// Real-valued closed form. Fails rather than choosing a branch when the
/// bracket is negative and `n − 1` is even.
pub fn f_closed_form_real(p: &TemporalParams, t: f64) -> Result<f64> {
    if !p.is_real() {
        return Err(Error::InvalidParameter {
            name: "mode",
            reason: "real mode needs real A1, A2, c and the principal branch".into(),
        });
    }
    let bracket = p.bracket(t)?.re;
    let m = p.root_index();
    if bracket >= 0.0 {
        Ok(bracket.powf(1.0 / f64::from(m)))
    } else if m % 2 == 1 {
        Ok(-(-bracket).powf(1.0 / f64::from(m)))
    } else {
        Err(Error::Branch { index: m })
    }
}

/// `f′ = [−A₂ c e^{−(n−1)A₂t} / (A₁ − c e^{−(n−1)A₂t})] f`.
pub fn f_derivative(p: &TemporalParams, t: f64) -> Result<Complex64> {
    let decay = p.decay(t);
    let denom = p.denominator(t)?;
    Ok(-p.a2 * decay / denom * f_closed_form(p, t)?)
}

/// `f′ − A₁ fⁿ − A₂ f`.
pub fn ode_residual(p: &TemporalParams, t: f64) -> Result<Complex64> {
    let f = f_closed_form(p, t)?;
    let df = f_derivative(p, t)?;
    Ok(df - p.a1 * f.powu(p.n) - p.a2 * f)
}

/// Parameters whose closed form passes through `f0` at `t = 0`:
/// `c = A₁ + A₂ / f0ⁿ⁻¹`, with the root branch chosen to reproduce `f0`.
pub fn c_from_initial(n: u32, a1: Complex64, a2: Complex64, f0: Complex64) -> Result<TemporalParams> {
    if f0.norm() == 0.0 || !f0.is_finite() {
        return Err(Error::InvalidInitial);
    }
    let m = n.checked_sub(1).filter(|&m| m >= 1).ok_or(Error::InvalidParameter {
        name: "n",
        reason: format!("exponent must be an integer >= 2, got {n}"),
    })?;
    let c = a1 + a2 / f0.powu(m);
    let p = TemporalParams::new(n, a1, a2, c)?;
    let principal = principal_root(p.bracket(0.0)?, m);
    let branch = (0..m)
        .min_by(|&j, &k| {
            let dj = (principal * branch_factor(j, m) - f0).norm();
            let dk = (principal * branch_factor(k, m) - f0).norm();
            dj.total_cmp(&dk)
        })
        .unwrap_or(0);
    p.with_branch(branch)
}

/// `u(η, t) = f(t) Q(η)` sampled on a grid, with a finite-difference residual of
/// `∂u/∂t − A₂u − Δ_H uⁿ` at interior points.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub eta_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// `values[i][j] = u(eta_grid[i], t_grid[j])`.
    pub values: Vec<Vec<Complex64>>,
    pub residual_max: f64,
    /// `truncation_bound + stencil_bound`.
    pub tolerance_budget: f64,
    /// Largest `|f|ⁿ |L[Q_N] − λ Q_N|`: the exact residual of the truncated series.
    pub truncation_bound: f64,
    /// Richardson estimate of the O(h²) stencil error plus a rounding allowance.
    pub stencil_bound: f64,
}

impl GridSolution {
    pub fn within_budget(&self) -> bool {
        self.residual_max <= self.tolerance_budget
    }
}

fn interior(len: usize) -> std::ops::Range<usize> {
    if len >= 3 {
        1..len - 1
    } else {
        0..len
    }
}

fn check_grid(name: &'static str, grid: &[f64], lower: f64, strict: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name,
            reason: "grid is empty".into(),
        });
    }
    let ascending = grid.windows(2).all(|w| w[0] < w[1]);
    let bounded = grid
        .iter()
        .all(|&x| x.is_finite() && if strict { x > lower } else { x >= lower });
    if !(ascending && bounded) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("grid must be ascending and {} {lower}", if strict { ">" } else { ">=" }),
        });
    }
    Ok(())
}

pub fn separable_solution(
    tp: &TemporalParams,
    ef: &EigenFunction,
    eta_grid: &[f64],
    t_grid: &[f64],
) -> Result<GridSolution> {
    let ep = ef.params();
    let lambda = *ep.lambda();
    if (tp.a1 - lambda).norm() > 1e-12 * lambda.abs().max(1.0) {
        return Err(Error::InconsistentParameters(format!(
            "A1 = {} must equal the eigenvalue {lambda}",
            tp.a1
        )));
    }
    if tp.n != ep.n() {
        return Err(Error::InconsistentParameters(format!(
            "temporal exponent {} differs from operator exponent {}",
            tp.n,
            ep.n()
        )));
    }
    check_grid("eta_grid", eta_grid, 0.0, true)?;
    check_grid("t_grid", t_grid, 0.0, false)?;

    let op = ep.operator();
    let series = ef.series();
    let center = *series.center();
    let radius = ef.trusted_radius();
    for &eta in eta_grid {
        let z = op.z_of_eta(eta)?;
        if (z - center).abs() > radius {
            return Err(Error::OutOfRadius { z, center, radius });
        }
    }

    let q = |eta: f64| series_eval(series, &(op.delta_prime() * eta.cosh()));
    let f_values: Vec<Complex64> = t_grid.iter().map(|&t| f_closed_form(tp, t)).collect::<Result<_>>()?;
    let values: Vec<Vec<Complex64>> = eta_grid
        .iter()
        .map(|&eta| {
            let qe = q(eta);
            f_values.iter().map(|f| f * qe).collect()
        })
        .collect();

    // L[Q_N] − λ Q_N as an exact polynomial about the center
    let image = apply_to_polynomial(series, &op)?;
    let len = image.coeffs().len().max(series.coeffs().len());
    let residual_coeffs = (0..len)
        .map(|i| image.coeff(i).copied().unwrap_or(0.0) - lambda * series.coeff(i).copied().unwrap_or(0.0))
        .collect();
    let series_residual = TruncatedSeries::new(center, residual_coeffs)?;

    let n = tp.n;
    let residual_at = |eta: f64, t: f64, h_eta: f64, h_t: f64| -> Result<Complex64> {
        let f = f_closed_form(tp, t)?;
        let u = f * q(eta);
        let u_t = (f_closed_form(tp, t + h_t)? - f_closed_form(tp, t - h_t)?) * q(eta) / (2.0 * h_t);
        let lap = radial_laplacian_fd(|x| (f * q(x)).powu(n), eta, h_eta);
        Ok(u_t - tp.a2 * u - lap)
    };

    let mut residual_max = 0.0_f64;
    let mut truncation_bound = 0.0_f64;
    let mut stencil_bound = 0.0_f64;
    for i in interior(eta_grid.len()) {
        let eta = eta_grid[i];
        let h_eta = 1e-4 * eta.max(1.0);
        let z = op.z_of_eta(eta)?;
        let trunc = series_eval(&series_residual, &z).abs();
        for j in interior(t_grid.len()) {
            let t = t_grid[j];
            let h_t = 1e-4 * t.abs().max(1.0);
            let fine = residual_at(eta, t, h_eta, h_t)?;
            let coarse = residual_at(eta, t, 2.0 * h_eta, 2.0 * h_t)?;
            residual_max = residual_max.max(fine.norm());

            let f = f_values[j];
            truncation_bound = truncation_bound.max(f.norm().powi(n as i32) * trunc);
            let magnitude = (f * q(eta)).norm();
            let rounding = 8.0 * f64::EPSILON * magnitude.powi(n as i32) / (h_eta * h_eta)
                + 2.0 * f64::EPSILON * magnitude / h_t;
            let richardson = 2.0 * (coarse - fine).norm() / 3.0;
            stencil_bound = stencil_bound.max(richardson + rounding);
        }
    }

    Ok(GridSolution {
        eta_grid: eta_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        values,
        residual_max,
        tolerance_budget: truncation_bound + stencil_bound,
        truncation_bound,
        stencil_bound,
    })
}
