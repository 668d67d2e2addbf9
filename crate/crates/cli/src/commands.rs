use clap::Args;
use hpme::eigen::{eigen_coefficients, eigen_residual, radius_estimate, EigenFunction, EigenParams};
use hpme::guard::{leading_coeff_law, nonexistence_witness, operator_degree_law, Poly};
use hpme::operator::OperatorParams;
use hpme::temporal::{f_closed_form, f_derivative, ode_residual, separable_solution, GridSolution, TemporalParams};
use hpme::verify::{self, Report, SuiteOptions};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::{emit, fmt_f64, nums, to_json, Cx, Num, Render};
use crate::params::{merge, Common, EigenArgs, EtaGridArgs, TemporalArgs, TimeGridArgs};

/// Scaled residual tolerance for emitted series.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Center used by `eigenfun` and `pde` when none is given. The trusted disk
/// of an expansion about the origin never reaches `z = δ′ cosh η`.
pub const GRID_CENTER: f64 = 2.0;

fn finish(doc: &dyn Render, common: &Common) -> Result<(), CliError> {
    emit(doc, common.format, common.out.as_deref())
}

#[derive(Serialize)]
struct EigenParamsDoc {
    n: u32,
    lambda: Num,
    delta: Num,
    a0: Num,
    a1: Num,
    center: Num,
    order: usize,
}

impl EigenParamsDoc {
    fn new(p: &EigenParams<f64>, order: usize) -> Self {
        Self {
            n: p.n(),
            lambda: Num(*p.lambda()),
            delta: Num(*p.delta_prime()),
            a0: Num(*p.a0()),
            a1: Num(*p.a1()),
            center: Num(*p.center()),
            order,
        }
    }
}

#[derive(Serialize)]
struct TemporalParamsDoc {
    n: u32,
    #[serde(rename = "A1")]
    a1: Cx,
    #[serde(rename = "A2")]
    a2: Cx,
    c: Cx,
    branch: u32,
}

impl TemporalParamsDoc {
    fn new(p: &TemporalParams) -> Self {
        Self {
            n: p.n(),
            a1: Cx(p.a1()),
            a2: Cx(p.a2()),
            c: Cx(p.c()),
            branch: p.branch(),
        }
    }
}

// ---- coeffs ---------------------------------------------------------------

#[derive(Debug, Args)]
pub struct CoeffsCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: EigenArgs,
}

#[derive(Serialize)]
struct CoeffsDoc {
    params: EigenParamsDoc,
    coefficients: Vec<Num>,
    radius_estimate: Option<Num>,
    residual_max: Num,
    residual_scale: Num,
    residual_tolerance: Num,
}

impl Render for CoeffsDoc {
    fn json(&self) -> serde_json::Result<String> {
        to_json(self)
    }
    fn csv_header(&self) -> &'static [&'static str] {
        &["index", "coefficient"]
    }
    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| vec![i.to_string(), fmt_f64(c.0)])
            .collect()
    }
}

pub fn coeffs(cmd: CoeffsCmd) -> Result<(), CliError> {
    let args = merge(&cmd.params, cmd.common.params_json.as_deref())?;
    let (p, order) = args.resolve(0.0)?;
    let u = eigen_coefficients(&p, order)?;
    let report = eigen_residual(&p, &u)?;
    let doc = CoeffsDoc {
        params: EigenParamsDoc::new(&p, order),
        coefficients: nums(u.coeffs()),
        radius_estimate: radius_estimate(&u).ok().map(Num),
        residual_max: Num(report.max_abs),
        residual_scale: Num(report.scale),
        residual_tolerance: Num(RESIDUAL_TOLERANCE * report.scale),
    };
    finish(&doc, &cmd.common)?;
    if !report.passes(RESIDUAL_TOLERANCE) {
        return Err(CliError::Contract(format!(
            "residual {:e} exceeds {RESIDUAL_TOLERANCE:e} x scale {:e}",
            report.max_abs, report.scale
        )));
    }
    Ok(())
}

// ---- verify ---------------------------------------------------------------

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct VerifyArgs {
    /// Seed of the random parameter suite [default: 1592598564]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random parameter sets [default: 100]
    #[arg(long)]
    pub cases: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: VerifyArgs,
    /// Perturbs one coefficient of every residual-check series
    #[arg(long, hide = true)]
    pub tamper: bool,
}

#[derive(Serialize)]
struct CheckDoc {
    name: &'static str,
    max_error: Num,
    tolerance: Num,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyDoc {
    seed: u64,
    cases: usize,
    all_pass: bool,
    checks: Vec<CheckDoc>,
}

impl VerifyDoc {
    fn new(report: &Report, cases: usize) -> Self {
        Self {
            seed: report.seed,
            cases,
            all_pass: report.all_pass(),
            checks: report
                .checks
                .iter()
                .map(|c| CheckDoc {
                    name: c.name,
                    max_error: Num(c.max_error),
                    tolerance: Num(c.tolerance),
                    pass: c.pass,
                })
                .collect(),
        }
    }
}

impl Render for VerifyDoc {
    fn json(&self) -> serde_json::Result<String> {
        to_json(self)
    }
    fn csv_header(&self) -> &'static [&'static str] {
        &["name", "max_error", "tolerance", "pass"]
    }
    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| vec![c.name.to_string(), fmt_f64(c.max_error.0), fmt_f64(c.tolerance.0), c.pass.to_string()])
            .collect()
    }
}

pub fn verify(cmd: VerifyCmd) -> Result<(), CliError> {
    let args = merge(&cmd.params, cmd.common.params_json.as_deref())?;
    let cases = args.cases.unwrap_or(verify::DEFAULT_CASES);
    if cases == 0 {
        return Err(CliError::Invalid("cases must be ≥ 1".into()));
    }
    let opts = SuiteOptions {
        seed: args.seed.unwrap_or(verify::DEFAULT_SEED),
        cases,
        tamper: cmd.tamper,
    };
    let report = verify::run_suite(opts)?;
    finish(&VerifyDoc::new(&report, cases), &cmd.common)?;
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if !failed.is_empty() {
        return Err(CliError::Contract(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(())
}

// ---- eigenfun -------------------------------------------------------------

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct EigenfunArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub eigen: EigenArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: EtaGridArgs,
}

#[derive(Debug, Args)]
pub struct EigenfunCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: EigenfunArgs,
}

#[derive(Serialize)]
struct EigenRow {
    eta: Num,
    z: Num,
    u: Num,
    trusted: bool,
}

#[derive(Serialize)]
struct EigenfunDoc {
    params: EigenParamsDoc,
    radius_estimate: Option<Num>,
    trusted_radius: Num,
    untrusted: usize,
    rows: Vec<EigenRow>,
}

impl Render for EigenfunDoc {
    fn json(&self) -> serde_json::Result<String> {
        to_json(self)
    }
    fn csv_header(&self) -> &'static [&'static str] {
        &["eta", "z", "u", "trusted"]
    }
    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![fmt_f64(r.eta.0), fmt_f64(r.z.0), fmt_f64(r.u.0), r.trusted.to_string()])
            .collect()
    }
}

pub fn eigenfun(cmd: EigenfunCmd) -> Result<(), CliError> {
    let args = merge(&cmd.params, cmd.common.params_json.as_deref())?;
    let (p, order) = args.eigen.resolve(GRID_CENTER)?;
    let ef = EigenFunction::build(p, order)?;
    let grid = args.grid.resolve(&ef)?;
    let rows = grid
        .iter()
        .map(|&eta| {
            ef.eval_in_eta(eta).map(|v| EigenRow {
                eta: Num(v.eta),
                z: Num(v.z),
                u: Num(v.value),
                trusted: v.trusted,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let untrusted = rows.iter().filter(|r| !r.trusted).count();
    let doc = EigenfunDoc {
        params: EigenParamsDoc::new(ef.params(), order),
        radius_estimate: ef.radius().map(Num),
        trusted_radius: Num(ef.trusted_radius()),
        untrusted,
        rows,
    };
    finish(&doc, &cmd.common)?;
    if untrusted > 0 {
        eprintln!(
            "warning: {untrusted} of {} points lie outside the trusted radius {}",
            doc.rows.len(),
            ef.trusted_radius()
        );
    }
    Ok(())
}

// ---- pde ------------------------------------------------------------------

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct PdeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub eigen: EigenArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub temporal: TemporalArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub eta: EtaGridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub time: TimeGridArgs,
}

#[derive(Debug, Args)]
pub struct PdeCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: PdeArgs,
}

#[derive(Serialize)]
struct PdeDoc {
    params: EigenParamsDoc,
    temporal: TemporalParamsDoc,
    eta_grid: Vec<Num>,
    t_grid: Vec<Num>,
    /// `values[i][j]` is `u(eta_grid[i], t_grid[j])`.
    values: Vec<Vec<Cx>>,
    residual_max: Num,
    tolerance_budget: Num,
    truncation_bound: Num,
    stencil_bound: Num,
    within_budget: bool,
}

impl PdeDoc {
    fn new(p: &EigenParams<f64>, order: usize, tp: &TemporalParams, g: &GridSolution) -> Self {
        Self {
            params: EigenParamsDoc::new(p, order),
            temporal: TemporalParamsDoc::new(tp),
            eta_grid: nums(&g.eta_grid),
            t_grid: nums(&g.t_grid),
            values: g.values.iter().map(|row| row.iter().copied().map(Cx).collect()).collect(),
            residual_max: Num(g.residual_max),
            tolerance_budget: Num(g.tolerance_budget),
            truncation_bound: Num(g.truncation_bound),
            stencil_bound: Num(g.stencil_bound),
            within_budget: g.within_budget(),
        }
    }
}

impl Render for PdeDoc {
    fn json(&self) -> serde_json::Result<String> {
        to_json(self)
    }
    fn csv_header(&self) -> &'static [&'static str] {
        &["eta", "t", "re", "im"]
    }
    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for (eta, row) in self.eta_grid.iter().zip(&self.values) {
            for (t, u) in self.t_grid.iter().zip(row) {
                rows.push(vec![fmt_f64(eta.0), fmt_f64(t.0), fmt_f64(u.0.re), fmt_f64(u.0.im)]);
            }
        }
        rows
    }
}

pub fn pde(cmd: PdeCmd) -> Result<(), CliError> {
    let args = merge(&cmd.params, cmd.common.params_json.as_deref())?;
    let (p, order) = args.eigen.resolve(GRID_CENTER)?;
    let tp = args.temporal.resolve(p.n(), *p.lambda())?;
    let ef = EigenFunction::build(p, order)?;
    let eta = args.eta.resolve(&ef)?;
    let t = args.time.resolve()?;
    let grid = separable_solution(&tp, &ef, &eta, &t)?;
    let doc = PdeDoc::new(ef.params(), order, &tp, &grid);
    finish(&doc, &cmd.common)?;
    if !grid.within_budget() {
        return Err(CliError::Contract(format!(
            "PDE residual {:e} exceeds the tolerance budget {:e}",
            grid.residual_max, grid.tolerance_budget
        )));
    }
    Ok(())
}

// ---- guard ----------------------------------------------------------------

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GuardArgs {
    /// Seed of the polynomial sweep [default: 1592598564]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random polynomials [default: 100]
    #[arg(long)]
    pub count: Option<usize>,
    /// Largest polynomial degree, >= 1 [default: 5]
    #[arg(long)]
    pub max_degree: Option<usize>,
    /// Fixed exponent n >= 2 [default: random in {2, 3}]
    #[arg(long)]
    pub n: Option<u32>,
    /// Fixed delta' > 0 [default: random in [0.5, 2]]
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Fixed eigenvalue [default: random in [-5, 5]]
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GuardCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: GuardArgs,
}

#[derive(Serialize)]
struct GuardRow {
    coefficients: Vec<Num>,
    n: u32,
    delta: Num,
    lambda: Num,
    degree: usize,
    operator_degree: usize,
    predicted_degree: usize,
    leading: Num,
    predicted_leading: Num,
    witness: Num,
    pass: bool,
}

#[derive(Serialize)]
struct GuardDoc {
    seed: u64,
    all_pass: bool,
    rows: Vec<GuardRow>,
}

impl Render for GuardDoc {
    fn json(&self) -> serde_json::Result<String> {
        to_json(self)
    }
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "index",
            "n",
            "delta",
            "lambda",
            "degree",
            "operator_degree",
            "predicted_degree",
            "leading",
            "predicted_leading",
            "witness",
            "pass",
        ]
    }
    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    i.to_string(),
                    r.n.to_string(),
                    fmt_f64(r.delta.0),
                    fmt_f64(r.lambda.0),
                    r.degree.to_string(),
                    r.operator_degree.to_string(),
                    r.predicted_degree.to_string(),
                    fmt_f64(r.leading.0),
                    fmt_f64(r.predicted_leading.0),
                    fmt_f64(r.witness.0),
                    r.pass.to_string(),
                ]
            })
            .collect()
    }
}

/// Relative agreement required between the computed and predicted leading coefficients.
pub const GUARD_TOLERANCE: f64 = 1e-12;

fn guard_row<R: Rng>(rng: &mut R, args: &GuardArgs, max_degree: usize) -> Result<GuardRow, CliError> {
    let degree = rng.gen_range(1..=max_degree);
    let mut coeffs: Vec<f64> = (0..degree).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    let lead = rng.gen_range(0.1..=2.0);
    coeffs.push(if rng.gen_bool(0.5) { lead } else { -lead });
    let n = rng.gen_range(2..=3);
    let delta = rng.gen_range(0.5..=2.0);
    let lambda = rng.gen_range(-5.0..=5.0);
    let (n, delta, lambda) = (args.n.unwrap_or(n), args.delta.unwrap_or(delta), args.lambda.unwrap_or(lambda));

    let poly = Poly::new(coeffs.clone())?;
    let op = OperatorParams::new(n, delta)?;
    let (operator_degree, predicted_degree) = operator_degree_law(&poly, &op)?;
    let (leading, predicted_leading) = leading_coeff_law(&poly, &op)?;
    let witness = nonexistence_witness(&poly, &op, &lambda)?;
    let agree = (leading - predicted_leading).abs() <= GUARD_TOLERANCE * predicted_leading.abs();
    Ok(GuardRow {
        coefficients: nums(&coeffs),
        n,
        delta: Num(delta),
        lambda: Num(lambda),
        degree,
        operator_degree,
        predicted_degree,
        leading: Num(leading),
        predicted_leading: Num(predicted_leading),
        witness: Num(witness),
        pass: operator_degree == predicted_degree && agree && witness != 0.0,
    })
}

pub fn guard(cmd: GuardCmd) -> Result<(), CliError> {
    let args = merge(&cmd.params, cmd.common.params_json.as_deref())?;
    let seed = args.seed.unwrap_or(verify::DEFAULT_SEED);
    let count = args.count.unwrap_or(100);
    let max_degree = args.max_degree.unwrap_or(5);
    if max_degree == 0 {
        return Err(CliError::Invalid("max-degree must be ≥ 1".into()));
    }
    let mut rng = verify::rng(seed);
    let rows = (0..count)
        .map(|_| guard_row(&mut rng, &args, max_degree))
        .collect::<Result<Vec<_>, _>>()?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    let doc = GuardDoc {
        seed,
        all_pass: failed == 0,
        rows,
    };
    finish(&doc, &cmd.common)?;
    if failed > 0 {
        return Err(CliError::Contract(format!("{failed} polynomials violate the degree or leading-coefficient law")));
    }
    Ok(())
}

// ---- temporal -------------------------------------------------------------

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct TemporalCmdArgs {
    /// Exponent n >= 2 [default: 2]
    #[arg(long)]
    pub n: Option<u32>,
    #[command(flatten)]
    #[serde(flatten)]
    pub temporal: TemporalArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub time: TimeGridArgs,
}

#[derive(Debug, Args)]
pub struct TemporalCmd {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub params: TemporalCmdArgs,
}

#[derive(Serialize)]
struct TemporalRow {
    t: Num,
    f: Cx,
    df: Cx,
    residual: Num,
}

#[derive(Serialize)]
struct TemporalDoc {
    params: TemporalParamsDoc,
    rows: Vec<TemporalRow>,
}

impl Render for TemporalDoc {
    fn json(&self) -> serde_json::Result<String> {
        to_json(self)
    }
    fn csv_header(&self) -> &'static [&'static str] {
        &["t", "f_re", "f_im", "df_re", "df_im", "residual"]
    }
    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    fmt_f64(r.t.0),
                    fmt_f64(r.f.0.re),
                    fmt_f64(r.f.0.im),
                    fmt_f64(r.df.0.re),
                    fmt_f64(r.df.0.im),
                    fmt_f64(r.residual.0),
                ]
            })
            .collect()
    }
}

pub fn temporal(cmd: TemporalCmd) -> Result<(), CliError> {
    let args = merge(&cmd.params, cmd.common.params_json.as_deref())?;
    let tp = args.temporal.resolve(args.n.unwrap_or(2), 1.0)?;
    let rows = args
        .time
        .resolve()?
        .into_iter()
        .map(|t| {
            Ok(TemporalRow {
                t: Num(t),
                f: Cx(f_closed_form(&tp, t)?),
                df: Cx(f_derivative(&tp, t)?),
                residual: Num(ode_residual(&tp, t)?.norm()),
            })
        })
        .collect::<Result<Vec<_>, hpme::Error>>()?;
    let doc = TemporalDoc {
        params: TemporalParamsDoc::new(&tp),
        rows,
    };
    finish(&doc, &cmd.common)
}
