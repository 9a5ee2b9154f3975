//! Residual checks run by `graphwave verify`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::averaging::{apply_averaging, averaging_eigen_action};
use crate::continuous::{gamma_lift, kappa, spectrum_report, ContinuousEigenpair, SpectrumReport};
use crate::discrete::{apply_transition, VertexFunction};
use crate::edge_function::{phi, phi1, SampledEdgeFunction};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::random::{random_sampled, rng};
use crate::wave::{cc2_residual, extend, half_angle_residual, wave_residual, wave_solution, WAVE_STEPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Discrete,
    Gamma,
    Averaging,
    Dalembert,
    Wave,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["discrete", "gamma", "averaging", "dalembert", "wave", "all"];

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "discrete" => Suite::Discrete,
            "gamma" => Suite::Gamma,
            "averaging" => Suite::Averaging,
            "dalembert" => Suite::Dalembert,
            "wave" => Suite::Wave,
            "all" => Suite::All,
            _ => return Err(Error::Domain(format!("unknown suite '{s}'"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Suite::Discrete,
            Suite::Gamma,
            Suite::Averaging,
            Suite::Dalembert,
            Suite::Wave,
            Suite::All,
        ]
        .iter()
        .position(|s| s == self)
        .expect("listed");
        f.write_str(Self::NAMES[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyParams {
    pub grid: usize,
    pub bands: usize,
    pub tau_max: f64,
    pub seed: u64,
    /// Random sampled functions per property check.
    pub samples: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            grid: 256,
            bands: 3,
            tau_max: 2.0,
            seed: 42,
            samples: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckParams {
    #[serde(rename = "N")]
    pub grid: usize,
    pub tau: Option<f64>,
    pub n_max: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// `None` when skipped.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: Option<bool>,
    pub status: &'static str,
    pub reason: Option<String>,
    pub parameters: CheckParams,
}

impl Check {
    fn new(name: &str, residual: f64, tolerance: f64, parameters: CheckParams) -> Self {
        let pass = residual <= tolerance;
        Check {
            name: name.to_string(),
            residual: Some(residual),
            tolerance,
            pass: Some(pass),
            status: if pass { "pass" } else { "fail" },
            reason: None,
            parameters,
        }
    }

    fn skipped(name: &str, tolerance: f64, reason: String, parameters: CheckParams) -> Self {
        Check {
            name: name.to_string(),
            residual: None,
            tolerance,
            pass: None,
            status: "skipped",
            reason: Some(reason),
            parameters,
        }
    }

    fn failed(name: &str, tolerance: f64, err: &Error, parameters: CheckParams) -> Self {
        Check {
            name: name.to_string(),
            residual: None,
            tolerance,
            pass: Some(false),
            status: "fail",
            reason: Some(err.to_string()),
            parameters,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub suite: String,
    #[serde(rename = "N")]
    pub grid: usize,
    pub bands: usize,
    pub tau_max: f64,
    pub seed: u64,
    /// Sorted by name.
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.pass == Some(false))
    }
}

struct Ctx<'a> {
    net: &'a Network,
    report: SpectrumReport<'a>,
    params: VerifyParams,
    checks: Vec<Check>,
}

impl<'a> Ctx<'a> {
    fn params(&self, tau: Option<f64>) -> CheckParams {
        CheckParams {
            grid: self.params.grid,
            tau,
            n_max: self.params.bands,
            seed: self.params.seed,
        }
    }

    fn record(&mut self, name: &str, tolerance: f64, tau: Option<f64>, residual: Result<f64>) {
        let p = self.params(tau);
        self.checks.push(match residual {
            Ok(r) => Check::new(name, r, tolerance, p),
            Err(e) => Check::failed(name, tolerance, &e, p),
        });
    }

    fn skip(&mut self, name: &str, tolerance: f64, tau: Option<f64>, reason: &str) {
        let p = self.params(tau);
        self.checks
            .push(Check::skipped(name, tolerance, reason.to_string(), p));
    }

    fn sampled(&self, pair: &ContinuousEigenpair<'a>) -> Result<SampledEdgeFunction<'a>> {
        pair.eigenfunction.sample(self.params.grid)
    }

    /// `N / 4` steps, the largest aligned `tau <= 1/4`.
    fn quarter(&self) -> f64 {
        (self.params.grid / 4) as f64 / self.params.grid as f64
    }
}

/// Runs the requested suite on `net`; `pass` is false iff some check failed.
pub fn run_suite(net: &Network, suite: Suite, params: VerifyParams) -> Result<ResidualReport> {
    crate::edge_function::check_grid(params.grid)?;
    if params.grid < 4 {
        return Err(Error::InvalidGrid(params.grid));
    }
    if !(params.tau_max.is_finite() && params.tau_max >= 0.0) {
        return Err(Error::Domain(format!(
            "tau-max = {} must be >= 0",
            params.tau_max
        )));
    }
    let mut ctx = Ctx {
        net,
        report: spectrum_report(net, params.bands)?,
        params,
        checks: Vec::new(),
    };
    if suite.includes(Suite::Discrete) {
        discrete_checks(&mut ctx);
    }
    if suite.includes(Suite::Gamma) {
        gamma_checks(&mut ctx);
    }
    if suite.includes(Suite::Averaging) {
        averaging_checks(&mut ctx);
    }
    if suite.includes(Suite::Dalembert) {
        dalembert_checks(&mut ctx);
    }
    if suite.includes(Suite::Wave) {
        wave_checks(&mut ctx);
    }
    let mut checks = ctx.checks;
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let pass = checks.iter().all(|c| c.pass != Some(false));
    Ok(ResidualReport {
        suite: suite.to_string(),
        grid: params.grid,
        bands: params.bands,
        tau_max: params.tau_max,
        seed: params.seed,
        checks,
        pass,
    })
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn random_vertex<'a>(net: &'a Network, r: &mut impl rand::Rng) -> VertexFunction<'a> {
    use rand_distr::StandardNormal;
    let values = (0..net.num_vertices())
        .map(|_| Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
        .collect();
    VertexFunction::new(net, values).expect("finite")
}

fn discrete_checks(ctx: &mut Ctx<'_>) {
    let net = ctx.net;
    let spec = &ctx.report.p_spectrum;
    let eigen = max_of(spec.iter().map(|p| {
        apply_transition(net, &p.vector)
            .combine(Complex64::new(1.0, 0.0), &p.vector, Complex64::new(-p.value, 0.0))
            .norm()
    }));
    let ortho = max_of(spec.iter().enumerate().flat_map(|(i, p)| {
        spec.iter().enumerate().map(move |(j, q)| {
            let delta = if i == j { 1.0 } else { 0.0 };
            (p.vector.inner_product(&q.vector) - delta).norm()
        })
    }));
    let one = VertexFunction::constant(net, Complex64::new(1.0, 0.0));
    let fixed = max_of(
        apply_transition(net, &one)
            .values()
            .iter()
            .map(|v| (v - 1.0).norm()),
    );
    let bound = max_of(spec.iter().map(|p| p.value.abs() - 1.0));
    let mut r = rng(ctx.params.seed);
    let adjoint = max_of((0..ctx.params.samples).map(|_| {
        let (f, g) = (random_vertex(net, &mut r), random_vertex(net, &mut r));
        let lhs = apply_transition(net, &f).inner_product(&g);
        let rhs = f.inner_product(&apply_transition(net, &g));
        (lhs - rhs).norm() / (f.norm() * g.norm())
    }));
    ctx.record("discrete.constant_fixed", 1e-12, None, Ok(fixed));
    ctx.record("discrete.eigen_residual", 1e-10, None, Ok(eigen));
    ctx.record("discrete.orthonormality", 1e-10, None, Ok(ortho));
    ctx.record("discrete.self_adjoint", 1e-12, None, Ok(adjoint));
    ctx.record("discrete.spectrum_bound", 1e-12, None, Ok(bound));
}

fn gamma_checks(ctx: &mut Ctx<'_>) {
    let net = ctx.net;
    let bands: Vec<&ContinuousEigenpair<'_>> = ctx.report.bands.iter().flat_map(|b| &b.pairs).collect();
    let unitarity: Result<f64> = bands
        .iter()
        .map(|p| {
            let h = p.source_vector.as_ref().expect("band pairs keep their source");
            let g = gamma_lift(net, p.lambda, h)?;
            Ok((2.0 * g.norm().powi(2) - h.norm().powi(2)).abs())
        })
        .collect::<Result<Vec<f64>>>()
        .map(max_of);
    let pairs = ctx.report.pairs();
    let mut cross = Ok(0.0f64);
    for (i, p) in pairs.iter().enumerate() {
        for q in &pairs[i + 1..] {
            let ip = p.eigenfunction.inner_product(&q.eigenfunction);
            cross = match (cross, ip) {
                (Ok(m), Ok(v)) => Ok(m.max(v.norm())),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
        }
    }
    let vertex = max_of(pairs.iter().flat_map(|p| {
        p.eigenfunction
            .vertex_residuals()
            .into_iter()
            .map(|r| r.continuity_spread.max(r.kirchhoff.norm()))
    }));
    let dims = ctx
        .report
        .dirichlet
        .iter()
        .map(|d| d.dim_vertex.abs_diff(d.predicted_vertex) + d.dim_flow.abs_diff(d.predicted_flow))
        .sum::<usize>() as f64;
    let interior = ctx
        .report
        .p_spectrum
        .iter()
        .filter(|p| p.value.abs() < 1.0 - 1e-9)
        .count();
    let top = ctx
        .report
        .p_spectrum
        .iter()
        .filter(|p| p.value > 1.0 - 1e-9)
        .count();
    let count_gap = ctx
        .report
        .bands
        .iter()
        .map(|b| b.pairs.len().abs_diff(interior + if b.n == 0 { top } else { 0 }))
        .sum::<usize>() as f64;
    ctx.record("gamma.band_counts", 0.0, None, Ok(count_gap));
    ctx.record("gamma.dirichlet_dimensions", 0.0, None, Ok(dims));
    ctx.record("gamma.orthogonality", 1e-6, None, cross);
    ctx.record("gamma.unitarity", 1e-6, None, unitarity);
    ctx.record("gamma.vertex_conditions", 1e-9, None, Ok(vertex));
}

/// `1e-3` at `N = 256`, scaled with the `O(N^-2)` quadrature error.
fn averaging_tolerance(n: usize) -> f64 {
    1e-3 * (256.0 / n as f64).powi(2)
}

fn averaging_checks(ctx: &mut Ctx<'_>) {
    let net = ctx.net;
    let n = ctx.params.grid;
    let tol = averaging_tolerance(n);
    let one = SampledEdgeFunction::constant(net, n, Complex64::new(1.0, 0.0));
    let constant = one.and_then(|one| {
        let d = apply_averaging(net, &one).sub(&one)?;
        Ok(d.max_abs())
    });
    ctx.record("averaging.constant_fixed", 1e-12, None, constant);

    let pairs: Vec<&ContinuousEigenpair<'_>> = ctx
        .report
        .pairs()
        .into_iter()
        .filter(|p| p.lambda <= 4.0 * PI * PI + 1e-9)
        .collect();
    let eigen = pairs
        .iter()
        .map(|p| {
            let f = ctx.sampled(p)?;
            let d = apply_averaging(net, &f).combine(
                Complex64::new(1.0, 0.0),
                &f,
                Complex64::new(-averaging_eigen_action(p), 0.0),
            )?;
            Ok(d.norm() / f.norm())
        })
        .collect::<Result<Vec<f64>>>()
        .map(max_of);
    ctx.record("averaging.eigen_action", tol, None, eigen);

    let mut r = rng(ctx.params.seed);
    let contraction = (0..ctx.params.samples)
        .map(|_| {
            let f = random_sampled(net, n, &mut r)?;
            Ok(apply_averaging(net, &f).norm() / f.norm() - 1.0)
        })
        .collect::<Result<Vec<f64>>>()
        .map(max_of);
    ctx.record("averaging.contraction", tol, None, contraction);

    let symbols = spectrum_of_a_gap(ctx);
    ctx.record("averaging.spectrum_of_a", 1e-9, None, symbols);
}

/// Compares `{Phi(sqrt(lambda))}` over the assembled spectrum with the
/// prediction from the spectrum of `P` and the structural kernel dimensions.
fn spectrum_of_a_gap(ctx: &Ctx<'_>) -> Result<f64> {
    let s = ctx.net.structure_report();
    let mut expected = Vec::new();
    for n in 0..=ctx.params.bands {
        for p in &ctx.report.p_spectrum {
            let t = p.value;
            let inside = if n == 0 {
                t > -1.0 + 1e-9
            } else {
                t.abs() < 1.0 - 1e-9
            };
            if inside {
                expected.push(kappa(t.min(1.0), n)?);
            }
        }
        if n >= 1 {
            let vertex = usize::from(n % 2 == 0 || s.bipartite);
            let flow = if n % 2 == 0 {
                s.cycle_rank
            } else {
                (ctx.net.num_edges() + usize::from(s.bipartite)) - ctx.net.num_vertices()
            };
            expected.extend(std::iter::repeat_n((PI * n as f64).powi(2), vertex + flow));
        }
    }
    expected.sort_by(f64::total_cmp);
    let computed = ctx.report.lambdas();
    if computed.len() != expected.len() {
        return Ok(f64::INFINITY);
    }
    let mut want: Vec<f64> = expected.iter().map(|l| phi1(l.sqrt())).collect();
    let mut got: Vec<f64> = ctx
        .report
        .pairs()
        .iter()
        .map(|p| averaging_eigen_action(p))
        .collect();
    want.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    let lambdas = max_of(computed.iter().zip(&expected).map(|(a, b)| (a - b).abs()));
    let symbols = max_of(got.iter().zip(&want).map(|(a, b)| (a - b).abs()));
    Ok(lambdas.max(symbols))
}

fn dalembert_checks(ctx: &mut Ctx<'_>) {
    let net = ctx.net;
    let n = ctx.params.grid;
    let max_steps = (ctx.params.tau_max * n as f64).floor() as i64;
    let tau_max = max_steps as f64 / n as f64;
    let horizon = (max_steps as usize).div_ceil(n).max(1);
    let eigen = ctx
        .report
        .pairs()
        .iter()
        .map(|p| {
            let f = ctx.sampled(p)?;
            let ext = extend(net, &f, horizon)?;
            let z = p.lambda.sqrt();
            let norm = f.norm();
            let mut worst = 0.0f64;
            for j in 0..=max_steps {
                let c = ext.dalembert_steps(j)?;
                let cos = Complex64::new((j as f64 / n as f64 * z).cos(), 0.0);
                worst = worst.max(c.combine(Complex64::new(1.0, 0.0), &f, -cos)?.norm() / norm);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()
        .map(max_of);
    ctx.record("dalembert.eigen_action", 1e-9, Some(tau_max), eigen);

    let tau = ctx.quarter();
    let mut r = rng(ctx.params.seed.wrapping_add(1));
    let mut cc2 = Vec::new();
    let mut half = Vec::new();
    let mut bounded = Vec::new();
    let mut consistency = Vec::new();
    for _ in 0..ctx.params.samples {
        let f = match random_sampled(net, n, &mut r) {
            Ok(f) => f,
            Err(e) => {
                ctx.record("dalembert.cc2", 1e-10, Some(tau), Err(e));
                return;
            }
        };
        cc2.push(cc2_residual(net, &f, tau));
        half.push(half_angle_residual(net, &f, tau));
        bounded.push(shift_growth(&f));
        consistency.push(averaging_consistency(&f));
    }
    let fold = |v: Vec<Result<f64>>| v.into_iter().collect::<Result<Vec<f64>>>().map(max_of);
    // the end nodes of each edge see one-sided limits in the s-quadrature,
    // an O(N^-1.5) effect on discontinuous data
    let consistency_tol = 1e-3 * (256.0 / n as f64).powf(1.5).max(1.0);
    ctx.record(
        "dalembert.averaging_consistency",
        consistency_tol,
        Some(1.0),
        fold(consistency),
    );
    ctx.record("dalembert.cc2", 1e-10, Some(tau), fold(cc2));
    ctx.record("dalembert.half_angle", 1e-10, Some(tau), fold(half));
    ctx.record("dalembert.shift_bound", 10.0, None, fold(bounded));
}

/// Largest `||F^{m+1}||^2 / ||F^m||^2` for `m = -2..=1`.
fn shift_growth(f: &SampledEdgeFunction<'_>) -> Result<f64> {
    let n = f.grid_size() as i64;
    let ext = extend(f.network(), f, 2)?;
    let mut worst = 0.0f64;
    for m in -2..=1 {
        let base = ext.shifted(m * n)?.norm().powi(2);
        let next = ext.shifted((m + 1) * n)?.norm().powi(2);
        worst = worst.max(next / base).max(base / next);
    }
    Ok(worst)
}

/// `||A F - int_0^1 C(s) F ds|| / ||F||`.
pub fn averaging_consistency(f: &SampledEdgeFunction<'_>) -> Result<f64> {
    let net = f.network();
    let zero = SampledEdgeFunction::zeros(net, f.grid_size())?;
    let integral = wave_solution(net, &zero, f, 1.0)?;
    Ok(apply_averaging(net, f).sub(&integral)?.norm() / f.norm())
}

/// `residual(2 dt) / residual(dt)` for the wave defect of `C(tau) F`, with
/// `dt = steps / N`.
pub fn wave_convergence_ratio(f: &SampledEdgeFunction<'_>, tau: f64, steps: usize) -> Result<f64> {
    let net = f.network();
    let fine = wave_residual(net, f, tau, steps)?;
    let coarse = wave_residual(net, f, tau, 2 * steps)?;
    Ok(coarse / fine)
}

fn wave_checks(ctx: &mut Ctx<'_>) {
    let net = ctx.net;
    let n = ctx.params.grid;
    let tau = (n / 2) as f64 / n as f64;
    let one = SampledEdgeFunction::constant(net, n, Complex64::new(1.0, 0.0));
    ctx.record(
        "wave.constant",
        1e-12,
        Some(tau),
        one.and_then(|one| wave_residual(net, &one, tau, WAVE_STEPS)),
    );

    let pairs: Vec<&ContinuousEigenpair<'_>> = ctx
        .report
        .pairs()
        .into_iter()
        .filter(|p| p.lambda > 0.0)
        .collect();
    // the grid stencil error must stay well below the time-difference error
    let fine = WAVE_STEPS / 2;
    let second_order = if n < 256 {
        Err(format!(
            "grid {n} below 256: space step not small against time steps {fine}/N, {WAVE_STEPS}/N"
        ))
    } else if pairs.is_empty() {
        Err("no eigenpair with lambda > 0".to_string())
    } else {
        Ok(pairs
            .iter()
            .map(|p| {
                // away from the zeros of cos(tau sqrt(lambda)), where both sides vanish
                let z = p.lambda.sqrt();
                let t = [n / 4, 3 * n / 8, n / 2]
                    .map(|k| k as f64 / n as f64)
                    .into_iter()
                    .max_by(|a, b| (a * z).cos().abs().total_cmp(&(b * z).cos().abs()))
                    .expect("three candidates");
                Ok((wave_convergence_ratio(&ctx.sampled(p)?, t, fine)? - 4.0).abs())
            })
            .collect::<Result<Vec<f64>>>()
            .map(max_of))
    };

    let steps = (ctx.params.tau_max * n as f64).floor() as usize;
    let tau_end = steps as f64 / n as f64;
    let velocity = pairs
        .iter()
        .filter(|p| p.lambda <= 4.0 * PI * PI + 1e-9)
        .map(|p| {
            let f = ctx.sampled(p)?;
            let zero = SampledEdgeFunction::zeros(net, n)?;
            let g = wave_solution(net, &zero, &f, tau_end)?;
            let s = Complex64::new(phi(p.lambda.sqrt(), tau_end), 0.0);
            Ok(g.combine(Complex64::new(1.0, 0.0), &f, -s)?.norm() / f.norm())
        })
        .collect::<Result<Vec<f64>>>()
        .map(max_of);
    match second_order {
        Ok(r) => ctx.record("wave.second_order", 0.4, None, r),
        Err(reason) => ctx.skip("wave.second_order", 0.4, None, &reason),
    }
    ctx.record(
        "wave.velocity",
        2e-3 * (256.0 / n as f64).powi(2),
        Some(tau_end),
        velocity,
    );
}
