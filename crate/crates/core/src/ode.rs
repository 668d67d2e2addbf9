//! Independent check on the series: the explicit second-order ODE
//!
//! ```text
//! u'' = λ / (n (z² − δ′²) uⁿ⁻²) − (n−1) u′² / u − 2 z u′ / (z² − δ′²)
//! ```
//!
//! integrated as the first-order system `(z, u, u₁)′ = (1, u₁, u'')` with an
//! embedded Dormand–Prince 5(4) pair. The independent variable is `z` itself
//! (the initial point is the series center), and dense output is cubic
//! Hermite on `u` and `u₁`.

use crate::eigen::{EigenFunction, EigenParams, EPS_QUADRATIC};
use crate::error::{Error, Guard, Result};
use crate::series::{series_derivative, series_eval, EPS_CONSTANT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    GuardUZero,
    GuardSingularZ,
    StepUnderflow,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ReachedEnd => "reached_end",
            Termination::GuardUZero => "guard_u_zero",
            Termination::GuardSingularZ => "guard_singular_z",
            Termination::StepUnderflow => "step_underflow",
        }
    }
}

impl From<Guard> for Termination {
    fn from(g: Guard) -> Self {
        match g {
            Guard::UZero => Termination::GuardUZero,
            Guard::SingularZ => Termination::GuardSingularZ,
        }
    }
}

/// Point `(z, u, u₁)` of the Cauchy system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyState {
    pub z: f64,
    pub u: f64,
    pub u1: f64,
}

impl CauchyState {
    pub fn new(z: f64, u: f64, u1: f64) -> Self {
        Self { z, u, u1 }
    }

    pub fn check_guards(&self, delta_prime: f64) -> std::result::Result<(), Guard> {
        // NaN fails both guards
        if self.u.is_nan() || self.u.abs() < EPS_CONSTANT {
            return Err(Guard::UZero);
        }
        let q = self.z * self.z - delta_prime * delta_prime;
        if q.is_nan() || q.abs() < EPS_QUADRATIC {
            return Err(Guard::SingularZ);
        }
        Ok(())
    }
}

/// `F(τ, u, u₁)` with τ = z.
pub fn rhs(state: &CauchyState, p: &EigenParams<f64>) -> Result<(f64, f64, f64)> {
    let d = *p.delta_prime();
    state.check_guards(d).map_err(Error::SingularEvaluation)?;
    let CauchyState { z, u, u1 } = *state;
    let n = p.n();
    let q = z * z - d * d;
    // u^(n−2) with n = 2 contributing exactly 1
    let u_pow = (0..n - 2).fold(1.0, |acc, _| acc * u);
    let second = p.lambda() / (f64::from(n) * q * u_pow) - u1 * u1 * f64::from(n - 1) / u - 2.0 * u1 * z / q;
    Ok((1.0, u1, second))
}

/// Accepted step endpoint, with `u''` for Hermite interpolation of `u₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub z: f64,
    pub u: f64,
    pub u1: f64,
    pub u2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    tolerances: Tolerances,
    termination: Termination,
}

impl Trajectory {
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory holds its initial point")
    }

    /// `(u, u₁)` at `z` by cubic Hermite interpolation, or `None` outside the covered range.
    pub fn interpolate(&self, z: f64) -> Option<(f64, f64)> {
        let first = self.samples[0].z;
        let dir = (self.last().z - first).signum();
        let offset = (z - first) * dir;
        if offset < 0.0 || offset > (self.last().z - first) * dir {
            return None;
        }
        if self.samples.len() == 1 {
            let s = self.samples[0];
            return Some((s.u, s.u1));
        }
        let idx = self
            .samples
            .partition_point(|s| (s.z - first) * dir < offset)
            .clamp(1, self.samples.len() - 1);
        let (s0, s1) = (&self.samples[idx - 1], &self.samples[idx]);
        let h = s1.z - s0.z;
        let t = (z - s0.z) / h;
        Some((
            hermite(t, h, s0.u, s0.u1, s1.u, s1.u1),
            hermite(t, h, s0.u1, s0.u2, s1.u1, s1.u2),
        ))
    }
}

fn hermite(t: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

const MIN_STEP: f64 = 1e-14;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_BETA: f64 = 0.04;
const MAX_STEPS: usize = 1_000_000;

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type Deriv = [f64; 2];

fn field(p: &EigenParams<f64>, z: f64, y: [f64; 2]) -> std::result::Result<Deriv, Guard> {
    match rhs(&CauchyState::new(z, y[0], y[1]), p) {
        Ok((_, du, du1)) => Ok([du, du1]),
        Err(Error::SingularEvaluation(g)) => Err(g),
        Err(_) => unreachable!("rhs only fails on guards"),
    }
}

struct StepResult {
    y: [f64; 2],
    k_end: Deriv,
    err: f64,
}

fn dopri_step(
    p: &EigenParams<f64>,
    z: f64,
    y: [f64; 2],
    k1: Deriv,
    h: f64,
    tol: Tolerances,
) -> std::result::Result<StepResult, Guard> {
    let mut k = [[0.0; 2]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for c in 0..2 {
                ys[c] += h * A[s][j] * kj[c];
            }
        }
        k[s] = field(p, z + C[s] * h, ys)?;
        if s == 6 {
            // stage 7 is evaluated at the fifth-order solution (FSAL)
            let mut sq = 0.0;
            for c in 0..2 {
                let e: f64 = (0..7).map(|j| E[j] * k[j][c]).sum::<f64>() * h;
                let sc = tol.abs + tol.rel * y[c].abs().max(ys[c].abs());
                sq += (e / sc).powi(2);
            }
            return Ok(StepResult {
                y: ys,
                k_end: k[6],
                err: (sq / 2.0).sqrt(),
            });
        }
    }
    unreachable!()
}

/// Integrates the Cauchy system from `init` toward `z_end`.
///
/// Terminates early (not an error) when a guard or the minimum step is hit.
pub fn integrate(p: &EigenParams<f64>, init: CauchyState, z_end: f64, tol: Tolerances) -> Result<Trajectory> {
    integrate_with_max_step(p, init, z_end, tol, f64::INFINITY)
}

/// [`integrate`] with accepted steps capped at `max_step`, which bounds the
/// O(h⁴) error of the Hermite dense output.
pub fn integrate_with_max_step(
    p: &EigenParams<f64>,
    init: CauchyState,
    z_end: f64,
    tol: Tolerances,
    max_step: f64,
) -> Result<Trajectory> {
    if max_step.is_nan() || max_step <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "max_step",
            reason: format!("must be positive, got {max_step}"),
        });
    }
    if !(init.z.is_finite() && z_end.is_finite()) || init.z == z_end {
        return Err(Error::InvalidParameter {
            name: "z_end",
            reason: format!("integration interval [{}, {z_end}] is empty or non-finite", init.z),
        });
    }
    init.check_guards(*p.delta_prime())
        .map_err(Error::RejectedInitialCondition)?;

    let dir = (z_end - init.z).signum();
    let span = (z_end - init.z).abs();
    let mut z = init.z;
    let mut y = [init.u, init.u1];
    let mut k1 = field(p, z, y).map_err(Error::RejectedInitialCondition)?;
    let mut h = (1e-4 * init.z.abs().max(1.0)).min(span).min(max_step) * dir;
    let mut err_old = 1e-4_f64;
    let mut samples = vec![Sample {
        z,
        u: y[0],
        u1: y[1],
        u2: k1[1],
    }];
    let mut termination = Termination::StepUnderflow;

    for _ in 0..MAX_STEPS {
        let remaining = (z_end - z) * dir;
        if remaining <= 0.0 {
            termination = Termination::ReachedEnd;
            break;
        }
        if h.abs() > max_step {
            h = max_step * dir;
        }
        let last_step = h.abs() >= remaining;
        if last_step {
            h = remaining * dir;
        }
        if h.abs() < MIN_STEP {
            termination = Termination::StepUnderflow;
            break;
        }
        match dopri_step(p, z, y, k1, h, tol) {
            Err(guard) => {
                if h.abs() * 0.5 < MIN_STEP {
                    termination = guard.into();
                    break;
                }
                h *= 0.5;
            }
            Ok(step) if step.err <= 1.0 => {
                z = if last_step { z_end } else { z + h };
                y = step.y;
                k1 = step.k_end;
                samples.push(Sample {
                    z,
                    u: y[0],
                    u1: y[1],
                    u2: k1[1],
                });
                if let Err(g) = CauchyState::new(z, y[0], y[1]).check_guards(*p.delta_prime()) {
                    termination = g.into();
                    break;
                }
                let err = step.err.max(1e-10);
                let fac = (SAFETY * err.powf(-0.17) * err_old.powf(PI_BETA)).clamp(FAC_MIN, FAC_MAX);
                err_old = err.max(1e-4);
                h *= fac;
            }
            Ok(step) => {
                let fac = (SAFETY * step.err.powf(-0.2)).max(FAC_MIN);
                h *= fac;
            }
        }
    }

    Ok(Trajectory {
        samples,
        tolerances: tol,
        termination,
    })
}

/// Deviation between the eigen series and the integrated Cauchy problem.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub radius: f64,
    pub interval: (f64, f64),
    pub samples: usize,
    pub reached: usize,
    pub max_value_deviation: f64,
    pub max_derivative_deviation: f64,
    pub forward_termination: Termination,
    pub backward_termination: Termination,
}

impl OracleReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.reached == self.samples && self.max_value_deviation < tol
    }
}

/// Sampling interval: half the estimated radius about the center, clipped to
/// the side of `±δ′` that contains the center.
pub fn oracle_interval(p: &EigenParams<f64>, radius: f64) -> (f64, f64) {
    let a = *p.center();
    let d = *p.delta_prime();
    let margin = 1e-3 * d;
    let (mut lo, mut hi) = (a - 0.5 * radius, a + 0.5 * radius);
    if a.abs() < d {
        lo = lo.max(-d + margin);
        hi = hi.min(d - margin);
    } else if a > d {
        lo = lo.max(d + margin);
    } else {
        hi = hi.min(-d - margin);
    }
    (lo, hi)
}

/// Minimum number of accepted steps across the sampling interval.
const DENSE_STEPS: f64 = 128.0;

pub fn compare_series_oracle(p: &EigenParams<f64>, order: usize, n_samples: usize) -> Result<OracleReport> {
    compare_series_oracle_with(p, order, n_samples, Tolerances::default())
}

pub fn compare_series_oracle_with(
    p: &EigenParams<f64>,
    order: usize,
    n_samples: usize,
    tol: Tolerances,
) -> Result<OracleReport> {
    let ef = EigenFunction::build(p.clone(), order)?;
    let radius = ef.radius().ok_or(Error::NoRadiusEstimate)?;
    let (lo, hi) = oracle_interval(p, radius);
    let series = ef.series();
    let slope = series_derivative(series);
    let a = *p.center();
    let init = CauchyState::new(a, *p.a0(), *p.a1());

    let max_step = (hi - lo) / DENSE_STEPS;
    let forward = integrate_with_max_step(p, init, hi, tol, max_step)?;
    let backward = integrate_with_max_step(p, init, lo, tol, max_step)?;

    let n_samples = n_samples.max(2);
    let mut reached = 0;
    let mut max_value_deviation = 0.0_f64;
    let mut max_derivative_deviation = 0.0_f64;
    for j in 0..n_samples {
        let z = lo + (hi - lo) * j as f64 / (n_samples - 1) as f64;
        let traj = if z >= a { &forward } else { &backward };
        if let Some((u, u1)) = traj.interpolate(z) {
            reached += 1;
            max_value_deviation = max_value_deviation.max((series_eval(series, &z) - u).abs());
            max_derivative_deviation = max_derivative_deviation.max((series_eval(&slope, &z) - u1).abs());
        }
    }
    Ok(OracleReport {
        radius,
        interval: (lo, hi),
        samples: n_samples,
        reached,
        max_value_deviation,
        max_derivative_deviation,
        forward_termination: forward.termination(),
        backward_termination: backward.termination(),
    })
}
