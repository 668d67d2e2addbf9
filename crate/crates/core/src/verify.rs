//! Verification suite.
//!
//! Each check runs one family of oracle comparisons and reports its worst
//! error against a tolerance. Random cases come from a seeded ChaCha8 stream,
//! so a fixed seed gives a byte-identical report.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eigen::{
    a2_closed_form, determinism_check, eigen_coefficients, eigen_residual, literal_recursion_check, EigenFunction,
    EigenParams,
};
use crate::error::{Error, Result};
use crate::guard::{leading_coeff_law, nonexistence_witness, operator_degree_law, Poly};
use crate::ode::compare_series_oracle;
use crate::operator::{hyperbolic_residual, OperatorParams};
use crate::series::{series_mul, series_pow, TruncatedSeries};
use crate::temporal::{c_from_initial, f_closed_form, f_derivative, ode_residual, separable_solution, TemporalParams};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const DEFAULT_CASES: usize = 100;

/// Order used for residual checks.
pub const RESIDUAL_ORDER: usize = 16;
/// Order used for the series/ODE comparison.
pub const ORACLE_ORDER: usize = 32;
pub const ORACLE_SAMPLES: usize = 33;
/// Size of the coefficient perturbation used by the negative control and `tamper`.
pub const TAMPER_DELTA: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, max_error: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            name,
            max_error,
            tolerance,
            pass: pass && max_error.is_finite(),
        }
    }

    fn bounded(name: &'static str, max_error: f64, tolerance: f64) -> Self {
        Self::new(name, max_error, tolerance, max_error <= tolerance)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub cases: usize,
    /// Perturb one coefficient of every residual-check series.
    pub tamper: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            cases: DEFAULT_CASES,
            tamper: false,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let x = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Valid eigen parameters: `n ∈ {2,3,4}`, `λ ∈ [−5,5]∖{0}`, `δ′ ∈ [0.5,2]`,
/// `a₀ ∈ ±[0.5,2]`, `a₁ ∈ [−1,1]`, center `0` or `±[δ′+0.5, δ′+2]`.
pub fn random_eigen_params<R: Rng>(rng: &mut R) -> EigenParams<f64> {
    let n = rng.gen_range(2..=4);
    let lambda = signed(rng, 0.05, 5.0);
    let delta = rng.gen_range(0.5..=2.0);
    let a0 = signed(rng, 0.5, 2.0);
    let a1 = rng.gen_range(-1.0..=1.0);
    let center = match rng.gen_range(0..3) {
        0 => 0.0,
        _ => signed(rng, delta + 0.5, delta + 2.0),
    };
    EigenParams::new(n, lambda, delta, a0, a1)
        .and_then(|p| p.with_center(center))
        .expect("sampled parameters satisfy the invariants")
}

pub fn random_origin_params<R: Rng>(rng: &mut R) -> EigenParams<f64> {
    loop {
        let p = random_eigen_params(rng);
        if *p.center() == 0.0 {
            return p;
        }
    }
}

pub fn random_suite(seed: u64, cases: usize) -> Vec<EigenParams<f64>> {
    let mut rng = rng(seed);
    (0..cases).map(|_| random_eigen_params(&mut rng)).collect()
}

/// `n = 2, λ = 1, δ′ = 1, a₀ = 1, a₁ = 0` about the origin.
pub fn standard_params() -> EigenParams<f64> {
    EigenParams::new(2, 1.0, 1.0, 1.0, 0.0).expect("valid")
}

fn relative(x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    if d == 0.0 {
        0.0
    } else {
        d / x.abs().max(y.abs())
    }
}

/// Power recurrence against repeated Cauchy products on random series.
pub fn check_power_recurrence(seed: u64, count: usize) -> Result<Check> {
    let mut rng = rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..count {
        let order = rng.gen_range(0..=12);
        let n = rng.gen_range(2..=5);
        let mut coeffs = vec![signed(&mut rng, 0.1, 10.0)];
        coeffs.extend((0..order).map(|_| rng.gen_range(-1.0..=1.0)));
        let s = TruncatedSeries::at_origin(coeffs)?;
        let fast = series_pow(&s, n, order)?;
        let mut slow = s.clone();
        for _ in 1..n {
            slow = series_mul(&slow, &s)?.truncated(order);
        }
        for (x, y) in fast.coeffs().iter().zip(slow.coeffs()) {
            worst = worst.max(relative(*x, *y));
        }
    }
    Ok(Check::bounded("power_recurrence", worst, 1e-12))
}

/// Computed `a₂` against the closed form, plus the three worked values.
pub fn check_a2_closed_form(seed: u64, count: usize) -> Result<Check> {
    let mut rng = rng(seed);
    let mut worst = 0.0_f64;
    let worked = [
        (EigenParams::new(2, 2.0, 1.0, 1.0, 0.0)?, -0.5),
        // λ → 0: only the a₁ term survives
        (EigenParams::new(2, 1e-300, 1.0, 1.0, 1.0)?, -0.5),
        (EigenParams::new(3, 24.0, 2.0, 1.0, 0.0)?, -1.0),
    ];
    let mut params: Vec<(EigenParams<f64>, Option<f64>)> = worked.into_iter().map(|(p, v)| (p, Some(v))).collect();
    params.extend((0..count).map(|_| (random_origin_params(&mut rng), None)));
    for (p, expected) in params {
        let computed = eigen_coefficients(&p, 2)?.coeffs()[2];
        let closed = a2_closed_form(&p)?;
        worst = worst.max(relative(computed, closed));
        if let Some(v) = expected {
            worst = worst.max(relative(computed, v));
        }
    }
    Ok(Check::bounded("a2_closed_form", worst, 1e-12))
}

fn tampered(s: &TruncatedSeries<f64>, index: usize) -> Result<TruncatedSeries<f64>> {
    s.with_coeff(index, s.coeffs()[index] + TAMPER_DELTA)
}

/// Largest scaled coefficient of `L[u] − λu` over the suite at order 16,
/// optionally after perturbing coefficient `tamper` of every series.
pub fn check_residual(suite: &[EigenParams<f64>], tamper: Option<usize>) -> Result<Check> {
    let mut worst = 0.0_f64;
    for p in suite {
        let mut u = eigen_coefficients(p, RESIDUAL_ORDER)?;
        if let Some(index) = tamper {
            u = tampered(&u, index)?;
        }
        worst = worst.max(eigen_residual(p, &u)?.max_scaled());
    }
    Ok(Check::bounded("residual_vanishing", worst, 1e-9))
}

/// Matching-based coefficients against the literal origin recursion at N = 12.
pub fn check_origin_recursion(seed: u64, count: usize) -> Result<Check> {
    let mut rng = rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..count {
        let p = random_origin_params(&mut rng);
        worst = worst.max(literal_recursion_check(&p, 12, 1e-12)?.max_relative_difference);
    }
    Ok(Check::bounded("origin_recursion", worst, 1e-12))
}

pub fn check_determinism(suite: &[EigenParams<f64>]) -> Check {
    let failures = suite.iter().filter(|p| !determinism_check(p, RESIDUAL_ORDER)).count();
    Check::new("determinism", failures as f64, 0.0, failures == 0)
}

/// Series against the integrated Cauchy problem within half the radius.
pub fn check_oracle(suite: &[EigenParams<f64>]) -> Result<Check> {
    let mut worst = 0.0_f64;
    let mut complete = true;
    for p in suite {
        let report = compare_series_oracle(p, ORACLE_ORDER, ORACLE_SAMPLES)?;
        complete &= report.reached == report.samples;
        worst = worst.max(report.max_value_deviation);
    }
    Ok(Check::new("series_vs_ode", worst, 1e-8, complete && worst < 1e-8))
}

/// Degree and leading-coefficient laws on random polynomials.
pub fn check_polynomial_guard(seed: u64, count: usize) -> Result<Check> {
    let mut rng = rng(seed);
    let mut worst = 0.0_f64;
    let mut laws_hold = true;
    for _ in 0..count {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(2..=3);
        let mut coeffs: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        coeffs.push(signed(&mut rng, 0.1, 2.0));
        let poly = Poly::new(coeffs)?;
        let op = OperatorParams::new(n, rng.gen_range(0.5..=2.0))?;
        let lambda = rng.gen_range(-5.0..=5.0);
        let (computed, predicted) = operator_degree_law(&poly, &op)?;
        let (_, rhs) = leading_coeff_law(&poly, &op)?;
        let witness = nonexistence_witness(&poly, &op, &lambda)?;
        laws_hold &= computed == predicted && witness != 0.0;
        worst = worst.max(relative(witness, rhs));
    }
    Ok(Check::new("polynomial_nonexistence", worst, 1e-12, laws_hold && worst <= 1e-12))
}

fn random_temporal<R: Rng>(rng: &mut R, complex: bool) -> Result<TemporalParams> {
    let n = rng.gen_range(2..=5);
    let pick = |rng: &mut R, lo: f64, hi: f64| {
        if complex {
            Complex64::new(rng.gen_range(-hi..=hi), rng.gen_range(-hi..=hi))
        } else {
            Complex64::new(signed(rng, lo, hi), 0.0)
        }
    };
    let a1 = pick(rng, 0.2, 3.0);
    let a2 = pick(rng, 0.2, 2.0);
    let f0 = pick(rng, 0.2, 2.0);
    if a1.norm() < 0.05 || a2.norm() < 0.05 || f0.norm() < 0.05 {
        return random_temporal(rng, complex);
    }
    c_from_initial(n, a1, a2, f0)
}

/// Relative distance below which a time is treated as sitting on a pole.
const POLE_MARGIN: f64 = 1e-3;

/// `f′ − A₁fⁿ − A₂f` for the closed form over `t ∈ [0, 3]`, half real and half complex.
pub fn check_temporal(seed: u64, count: usize) -> Result<Check> {
    let mut rng = rng(seed);
    let mut worst = 0.0_f64;
    for k in 0..count {
        let p = random_temporal(&mut rng, k % 2 == 1)?;
        for j in 0..=60 {
            let t = 3.0 * j as f64 / 60.0;
            let denom = p.a1() - p.c() * (-(f64::from(p.n() - 1)) * p.a2() * t).exp();
            if denom.norm() < POLE_MARGIN * p.a1().norm() {
                continue;
            }
            let f = f_closed_form(&p, t)?;
            let df = f_derivative(&p, t)?;
            let scale = 1.0_f64
                .max(df.norm())
                .max((p.a1() * f.powu(p.n())).norm())
                .max((p.a2() * f).norm());
            worst = worst.max(ode_residual(&p, t)?.norm() / scale);
        }
    }
    Ok(Check::bounded("temporal_identity", worst, 1e-10))
}

/// Grid of the end-to-end residual run: reactive equation with `λ = 1`,
/// `n = 2`, `δ′ = 1`, `a₀ = 1`, `a₁ = 0`, `N = 24`, expanded about `z = 2`.
#[derive(Debug, Clone)]
pub struct PdeSetup {
    pub temporal: TemporalParams,
    pub eigen: EigenFunction,
    pub eta_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
}

pub const PDE_CENTER: f64 = 2.0;
pub const PDE_ORDER: usize = 24;
pub const PDE_INITIAL: f64 = 0.5;

/// `count` points strictly inside the part of the trusted disk that the map
/// `z = δ′ cosh η` reaches.
pub fn trusted_eta_grid(ef: &EigenFunction, count: usize) -> Result<Vec<f64>> {
    let op = ef.params().operator();
    let d = *op.delta_prime();
    let center = *ef.params().center();
    let r = ef.trusted_radius();
    let lo = (center - r).max(d);
    let hi = center + r;
    if hi.is_nan() || lo.is_nan() || hi <= lo || count == 0 {
        return Err(Error::Domain(format!(
            "trusted disk of radius {r} about {center} does not meet z >= {d}"
        )));
    }
    let (eta_lo, eta_hi) = (op.eta_of_z(lo)?, op.eta_of_z(hi)?);
    Ok((1..=count)
        .map(|i| eta_lo + (eta_hi - eta_lo) * i as f64 / (count + 1) as f64)
        .collect())
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

pub fn pde_setup() -> Result<PdeSetup> {
    let params = EigenParams::new(2, 1.0, 1.0, 1.0, 0.0)?.with_center(PDE_CENTER)?;
    let eigen = EigenFunction::build(params, PDE_ORDER)?;
    let temporal = c_from_initial(2, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(PDE_INITIAL, 0.0))?;
    Ok(PdeSetup {
        eta_grid: trusted_eta_grid(&eigen, 20)?,
        t_grid: linspace(0.0, 3.0, 20),
        temporal,
        eigen,
    })
}

/// Largest budget the end-to-end residual run may print.
pub const PDE_BUDGET_CEILING: f64 = 1e-5;

/// Finite-difference residual of the separable solution against its budget.
pub fn check_pde() -> Result<Check> {
    let s = pde_setup()?;
    let grid = separable_solution(&s.temporal, &s.eigen, &s.eta_grid, &s.t_grid)?;
    let pass = grid.within_budget() && grid.tolerance_budget <= PDE_BUDGET_CEILING;
    Ok(Check::new("pde_residual", grid.residual_max, grid.tolerance_budget, pass))
}

/// `g = (c₁ ln tanh(η/2) + c₂)^{1/n}` has `Δ_H gⁿ = 0`.
pub fn kernel_function(c1: f64, c2: f64, n: u32) -> impl Fn(f64) -> f64 {
    move |eta: f64| (c1 * (eta / 2.0).tanh().ln() + c2).powf(1.0 / f64::from(n))
}

pub fn check_kernel() -> Result<Check> {
    let mut worst = 0.0_f64;
    for (c1, c2, n) in [(1.0, 3.0, 2), (-1.0, 1.0, 2), (0.5, 2.0, 3), (-2.0, 0.5, 4), (1.5, 4.0, 5)] {
        let g = kernel_function(c1, c2, n);
        for delta in [0.5, 1.0, 2.0] {
            let op = OperatorParams::new(n, delta)?;
            for eta in linspace(0.5, 3.0, 26) {
                let r = hyperbolic_residual(&g, &op, 0.0, eta, 1e-4)?;
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(Check::bounded("kernel_family", worst, 1e-6))
}

/// Coefficient perturbed by the `tamper` option.
pub const TAMPER_INDEX: usize = 3;

/// Reruns the residual check once per coefficient index with that
/// coefficient perturbed, and reports the weakest detection as the ratio of
/// the threshold to the perturbed residual. Below one means the residual
/// check fails for every index.
pub fn check_negative_control(suite: &[EigenParams<f64>]) -> Result<Check> {
    let mut worst = 0.0_f64;
    for index in 0..=RESIDUAL_ORDER {
        let perturbed = check_residual(suite, Some(index))?;
        worst = worst.max(perturbed.tolerance / perturbed.max_error);
    }
    Ok(Check::new("negative_control", worst, 1.0, worst < 1.0))
}

/// Runs every check. Independent checks draw from independent streams
/// derived from the seed.
pub fn run_suite(opts: SuiteOptions) -> Result<Report> {
    let seed = opts.seed;
    let cases = opts.cases;
    let suite = random_suite(seed, cases);
    let checks = vec![
        check_power_recurrence(seed.wrapping_add(1), 2 * cases)?,
        check_a2_closed_form(seed.wrapping_add(2), cases)?,
        check_residual(&suite, opts.tamper.then_some(TAMPER_INDEX))?,
        check_origin_recursion(seed.wrapping_add(3), cases)?,
        check_determinism(&suite),
        check_oracle(&suite)?,
        check_polynomial_guard(seed.wrapping_add(4), 5 * cases)?,
        check_temporal(seed.wrapping_add(5), cases)?,
        check_pde()?,
        check_kernel()?,
        check_negative_control(&suite)?,
    ];
    Ok(Report { seed, checks })
}
