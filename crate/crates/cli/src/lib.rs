//! The `sturm` command line.
//!
//! Every command reads JSON problem or function files and writes CSV. Floats
//! are printed in the shortest form that parses back to the same binary64
//! value, so identical runs produce identical bytes.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use sturm_core::corpus::{random_potential, rng};
use sturm_core::eigensolver::Solver;
use sturm_core::lemma_lab::{
    g0_bound, geometric_grid, h_field, oscillatory_sup, supnorm_sweep, voc_residual, Component,
    DecaySeries, TREND_LIMIT,
};
use sturm_core::sensitivity::{default_fd_step, path_bounds_gauss, DEFAULT_T_NODES};
use sturm_core::{
    derivative_functional, fd_derivative, liouville_transform, lipschitz_ratio, propagate_transfer,
    Backend, PiecewiseFn, SLProblem, SolverOptions,
};

/// Regular Sturm–Liouville eigenvalues, sensitivities and decay experiments.
#[derive(Debug, Parser)]
#[command(name = "sturm", version)]
pub struct RunConfig {
    /// Print extra diagnostics to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues (and optionally eigenfunctions) of a problem file.
    Solve(SolveArgs),
    /// Write the Liouville normal form of a problem file.
    Transform(TransformArgs),
    /// Compare the eigenvalue derivative formula with a central difference.
    Sensitivity(SensitivityArgs),
    /// Lipschitz ratios of eigenvalues between two potentials.
    LipschitzSweep(LipschitzArgs),
    /// Run one of the oscillatory-integral experiments over a λ grid.
    LemmaCheck(LemmaArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SolveArgs {
    /// Problem file (JSON).
    pub problem: PathBuf,
    /// Compute only the n-th eigenvalue.
    #[arg(long, conflicts_with = "upto")]
    pub n: Option<usize>,
    /// Compute eigenvalues 1..=N.
    #[arg(long)]
    pub upto: Option<usize>,
    /// Relative eigenvalue tolerance.
    #[arg(long, default_value = "1e-9")]
    pub tol: f64,
    /// Shooting method: exact transfer matrices or adaptive Runge–Kutta.
    #[arg(long, value_enum, default_value_t = BackendArg::Transfer)]
    pub backend: BackendArg,
    /// Write sampled normalized eigenfunctions (n, x, phi, phi_prime).
    #[arg(long, value_name = "PATH")]
    pub emit_eigenfunctions: Option<PathBuf>,
    /// Write the Prüfer trajectory (x, theta, log_rho) of the normal form at
    /// the eigenvalue; needs `--n`.
    #[arg(long, value_name = "PATH", requires = "n")]
    pub trajectory: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Transfer,
    Prufer,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Transfer => Backend::Transfer,
            BackendArg::Prufer => Backend::Prufer,
        }
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    pub problem: PathBuf,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SensitivityArgs {
    pub problem: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Direction h as a piecewise function file.
    #[arg(long)]
    pub direction: PathBuf,
    /// Finite-difference step; defaults to 1e-4 · max(1, ‖q‖₁).
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LipschitzArgs {
    /// First potential (piecewise function file).
    #[arg(long)]
    pub q1: PathBuf,
    /// Second potential (piecewise function file).
    #[arg(long)]
    pub q2: PathBuf,
    /// Problem supplying p, ω and the boundary angles; its potential is
    /// ignored. Defaults to Dirichlet with p ≡ ω ≡ 1.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    #[arg(long)]
    pub upto: usize,
    /// Gauss–Legendre nodes for the path integral.
    #[arg(long, default_value_t = DEFAULT_T_NODES)]
    pub t_nodes: usize,
    /// Report file (n, lambda_q1, lambda_q2, ratio, path_bound); stdout when
    /// omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    /// Sine integral of a decreasing g against the G₀ ceiling.
    #[value(name = "3.2")]
    G0,
    /// sup |H(·; λ)| for a monotone weight.
    #[value(name = "3.3")]
    HField,
    /// Decay of the oscillatory integral for an arbitrary L¹ function g.
    #[value(name = "3.4")]
    Decay,
    /// Eigenfunction sup-norms over random potentials, by index.
    #[value(name = "prop3.5")]
    Supnorm,
    /// Variation-of-constants residual √λ · sup |y − C₁ψ|.
    #[value(name = "voc")]
    Voc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComponentArg {
    Sine,
    Cosine,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LemmaArgs {
    #[arg(long, value_enum)]
    pub lemma: Lemma,
    /// Weight ω (piecewise function file).
    #[arg(long)]
    pub omega: PathBuf,
    /// Integrand g for 3.2 and 3.4.
    #[arg(long)]
    pub g: Option<PathBuf>,
    /// Potential for voc (defaults to 0).
    #[arg(long)]
    pub q: Option<PathBuf>,
    /// Geometric grid `lo:hi:points`.
    #[arg(long, default_value = "100:1000000:65")]
    pub lambda_grid: String,
    /// Initial Prüfer angle.
    #[arg(long, default_value_t = 0.0)]
    pub theta0: f64,
    /// Which integral 3.4 tracks.
    #[arg(long, value_enum, default_value_t = ComponentArg::Sine)]
    pub component: ComponentArg,
    /// Seed for the random potentials of prop3.5.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random potentials for prop3.5.
    #[arg(long, default_value_t = 10)]
    pub potentials: usize,
    /// ‖q‖₁ radius for prop3.5.
    #[arg(long, default_value_t = 5.0)]
    pub radius: f64,
    /// Largest eigenvalue index for prop3.5.
    #[arg(long, default_value_t = 50)]
    pub upto: usize,
    /// Series file (lambda, raw, scaled); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a successful run concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    CertificateFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Done => 0,
            Outcome::CertificateFailed => 2,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("--{name} must be positive, got {v}");
    }
    Ok(())
}

fn at_least_one(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        bail!("--{name} must be at least 1");
    }
    Ok(())
}

/// `lo:hi:points`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        bail!("--lambda-grid must look like lo:hi:points, got `{text}`");
    };
    let lo: f64 = lo.parse().with_context(|| format!("grid start `{lo}`"))?;
    let hi: f64 = hi.parse().with_context(|| format!("grid end `{hi}`"))?;
    let n: usize = n.parse().with_context(|| format!("grid size `{n}`"))?;
    Ok(geometric_grid(lo, hi, n)?)
}

impl RunConfig {
    /// Check numeric flags before any work is done.
    pub fn validate(&self) -> Result<()> {
        match &self.command {
            Command::Solve(a) => {
                positive("tol", a.tol)?;
                if let Some(n) = a.n {
                    at_least_one("n", n)?;
                }
                if let Some(n) = a.upto {
                    at_least_one("upto", n)?;
                }
                if a.n.is_none() && a.upto.is_none() {
                    bail!("solve needs --n or --upto");
                }
            }
            Command::Transform(_) => {}
            Command::Sensitivity(a) => {
                at_least_one("n", a.n)?;
                if let Some(e) = a.eps {
                    positive("eps", e)?;
                }
            }
            Command::LipschitzSweep(a) => {
                at_least_one("upto", a.upto)?;
                at_least_one("t-nodes", a.t_nodes)?;
            }
            Command::LemmaCheck(a) => {
                parse_grid(&a.lambda_grid)?;
                at_least_one("upto", a.upto)?;
                at_least_one("potentials", a.potentials)?;
                positive("radius", a.radius)?;
                if !a.theta0.is_finite() {
                    bail!("--theta0 must be finite");
                }
                let needs_g = matches!(a.lemma, Lemma::G0 | Lemma::Decay);
                if needs_g && a.g.is_none() {
                    bail!("--lemma {:?} needs --g", a.lemma);
                }
            }
        }
        Ok(())
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let verbose = config.verbose > 0;
    match &config.command {
        Command::Solve(a) => solve(a, verbose),
        Command::Transform(a) => transform(a),
        Command::Sensitivity(a) => sensitivity(a),
        Command::LipschitzSweep(a) => lipschitz(a, verbose),
        Command::LemmaCheck(a) => lemma(a, verbose),
    }
}

pub fn read_problem(path: &Path) -> Result<SLProblem> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SLProblem::from_json(&text).with_context(|| format!("parsing problem {}", path.display()))
}

pub fn read_function(path: &Path) -> Result<PiecewiseFn> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PiecewiseFn::from_json(&text).with_context(|| format!("parsing function {}", path.display()))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn csv_writer(out: &Option<PathBuf>) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::Writer::from_writer(sink(out)?))
}

fn row(w: &mut csv::Writer<Box<dyn Write>>, fields: &[String]) -> Result<()> {
    w.write_record(fields)?;
    Ok(())
}

trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    /// Shortest round-trip digits, with an exponent outside `[1e-4, 1e16)`.
    fn cell(&self) -> String {
        format!("{self:?}")
    }
}

impl Cell for usize {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for &str {
    fn cell(&self) -> String {
        self.to_string()
    }
}

macro_rules! fields {
    ($($v:expr),* $(,)?) => { [$(Cell::cell(&$v)),*] };
}

fn solve(a: &SolveArgs, verbose: bool) -> Result<Outcome> {
    let prob = read_problem(&a.problem)?;
    let opts = SolverOptions {
        backend: a.backend.into(),
        ..SolverOptions::with_tol(a.tol)
    };
    let solver = Solver::new(&prob, opts)?;
    let pairs = match (a.n, a.upto) {
        (Some(n), _) => vec![solver.eigenpair(n)?],
        (None, Some(count)) => solver.eigenpairs_up_to(count)?,
        (None, None) => unreachable!("validated"),
    };
    let mut w = csv_writer(&a.out)?;
    row(
        &mut w,
        &fields!("n", "lambda_n", "sup_norm", "oscillations"),
    )?;
    for p in &pairs {
        row(
            &mut w,
            &fields!(p.index, p.lambda_n, p.sup_norm, p.oscillations),
        )?;
    }
    w.flush()?;
    if let Some(path) = &a.emit_eigenfunctions {
        let mut w = csv_writer(&Some(path.clone()))?;
        row(&mut w, &fields!("n", "x", "phi", "phi_prime"))?;
        for p in &pairs {
            for i in 0..p.xs.len() {
                row(&mut w, &fields!(p.index, p.xs[i], p.phi[i], p.phi_prime[i]))?;
            }
        }
        w.flush()?;
    }
    if let Some(path) = &a.trajectory {
        let tr = propagate_transfer(solver.normal_form(), pairs[0].lambda_n, 4)?;
        if tr.theta.is_empty() {
            bail!(
                "the trajectory needs a positive eigenvalue, got {}",
                pairs[0].lambda_n
            );
        }
        let mut w = csv_writer(&Some(path.clone()))?;
        row(&mut w, &fields!("x", "theta", "log_rho"))?;
        for i in 0..tr.xs.len() {
            row(&mut w, &fields!(tr.xs[i], tr.theta[i], tr.log_rho[i]))?;
        }
        w.flush()?;
    }
    if verbose {
        eprintln!("floor {} with {:?} backend", solver.floor(), opts.backend);
    }
    Ok(Outcome::Done)
}

fn transform(a: &TransformArgs) -> Result<Outcome> {
    let prob = read_problem(&a.problem)?;
    let normal = liouville_transform(&prob)?;
    let mut out = sink(&a.out)?;
    writeln!(out, "{}", normal.to_json())?;
    out.flush()?;
    Ok(Outcome::Done)
}

fn sensitivity(a: &SensitivityArgs) -> Result<Outcome> {
    let prob = read_problem(&a.problem)?;
    let h = read_function(&a.direction)?;
    let eps = a.eps.unwrap_or_else(|| default_fd_step(&prob));
    let exact = derivative_functional(&prob, a.n, &h)?;
    let fd = fd_derivative(&prob, a.n, &h, eps)?;
    let mut w = csv_writer(&None)?;
    row(
        &mut w,
        &fields!("n", "eps", "functional", "fd", "discrepancy"),
    )?;
    row(&mut w, &fields!(a.n, eps, exact, fd, (exact - fd).abs()))?;
    w.flush()?;
    Ok(Outcome::Done)
}

fn lipschitz(a: &LipschitzArgs, verbose: bool) -> Result<Outcome> {
    let q1 = read_function(&a.q1)?;
    let q2 = read_function(&a.q2)?;
    let template = match &a.problem {
        Some(p) => read_problem(p)?,
        None => {
            let one = PiecewiseFn::constant(q1.start(), q1.end(), 1.0)?;
            SLProblem::new(one.clone(), q1.clone(), one, 0.0, 0.0)?
        }
    };
    let rep = lipschitz_ratio(&template, &q1, &q2, a.upto)?;
    let paths = path_bounds_gauss(
        &template,
        &q1,
        &q2,
        a.upto,
        a.t_nodes,
        &SolverOptions::default(),
    )?;
    let mut w = csv_writer(&a.out)?;
    row(
        &mut w,
        &fields!("n", "lambda_q1", "lambda_q2", "ratio", "path_bound"),
    )?;
    for n in 0..a.upto {
        row(
            &mut w,
            &fields!(
                n + 1,
                rep.lambda_q1[n],
                rep.lambda_q2[n],
                rep.ratios[n],
                paths[n]
            ),
        )?;
    }
    w.flush()?;
    eprintln!(
        "sup ratio {} vs M̂² = {} ({}), ‖q1 − q2‖₁ = {}",
        rep.sup_ratio,
        rep.bound,
        verdict(rep.pass),
        rep.distance
    );
    if verbose {
        for (n, s) in rep.supnorm_per_n.iter().enumerate() {
            eprintln!("n = {}: max sup-norm along the path {s}", n + 1);
        }
    }
    Ok(if rep.pass {
        Outcome::Done
    } else {
        Outcome::CertificateFailed
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn write_series(out: &Option<PathBuf>, s: &DecaySeries) -> Result<()> {
    let mut w = csv_writer(out)?;
    row(&mut w, &fields!("lambda", "raw", "scaled"))?;
    for i in 0..s.lambdas.len() {
        row(
            &mut w,
            &fields!(s.lambdas[i], s.raw_values[i], s.scaled_values[i]),
        )?;
    }
    w.flush()?;
    Ok(())
}

fn trend_report(s: &DecaySeries) -> bool {
    let flat = s.is_flat();
    match s.trend() {
        Some(r) => eprintln!("trend {r} (limit {TREND_LIMIT}): {}", verdict(flat)),
        None => eprintln!("constant series: PASS"),
    }
    flat
}

/// 101 equally spaced points of `[a, b]`.
fn c_grid(f: &PiecewiseFn) -> Vec<f64> {
    let (a, b) = (f.start(), f.end());
    (0..=100).map(|i| a + (b - a) * i as f64 / 100.0).collect()
}

fn lemma(a: &LemmaArgs, verbose: bool) -> Result<Outcome> {
    let omega = read_function(&a.omega)?;
    let grid = parse_grid(&a.lambda_grid)?;
    let cs = c_grid(&omega);
    let pass = match a.lemma {
        Lemma::G0 => {
            let g = read_function(a.g.as_ref().unwrap())?;
            let bound = g0_bound(&g, &omega)?;
            let raw = grid
                .iter()
                .map(|&l| oscillatory_sup(&omega, &g, l, &[a.theta0], &cs, Component::Sine))
                .collect::<sturm_core::Result<Vec<_>>>()?;
            let series = DecaySeries::new(grid.clone(), raw)?;
            write_series(&a.out, &series)?;
            let worst = series
                .scaled_values
                .iter()
                .map(|s| 0.5 * s)
                .fold(0.0, f64::max);
            let capped = worst <= 1.01 * bound.g0_half;
            eprintln!(
                "max |G| = {worst} vs G0/2 = {} ({})",
                bound.g0_half,
                verdict(capped)
            );
            if verbose {
                eprintln!("f(0) = {}, f~(0) = {}", bound.f0, bound.f0_tilde);
            }
            trend_report(&series) & capped
        }
        Lemma::HField => {
            let raw = grid
                .iter()
                .map(|&l| h_field(&omega, l, a.theta0).map(|h| 2.0 * h.sup / l.sqrt()))
                .collect::<sturm_core::Result<Vec<_>>>()?;
            let series = DecaySeries::new(grid.clone(), raw)?;
            write_series(&a.out, &series)?;
            trend_report(&series)
        }
        Lemma::Decay => {
            let g = read_function(a.g.as_ref().unwrap())?;
            let comp = match a.component {
                ComponentArg::Sine => Component::Sine,
                ComponentArg::Cosine => Component::Cosine,
            };
            let raw = grid
                .iter()
                .map(|&l| oscillatory_sup(&omega, &g, l, &[a.theta0], &cs, comp))
                .collect::<sturm_core::Result<Vec<_>>>()?;
            let series = DecaySeries::new(grid.clone(), raw)?;
            write_series(&a.out, &series)?;
            let ratio = series.decay_ratio();
            let pass = ratio < 0.1;
            eprintln!("last / first = {ratio} (limit 0.1): {}", verdict(pass));
            pass
        }
        Lemma::Supnorm => {
            let mut r = rng(a.seed);
            let potentials: Vec<PiecewiseFn> = (0..a.potentials)
                .map(|_| {
                    let pieces = r.gen_range(2..8);
                    let q = random_potential(&mut r, pieces, a.radius);
                    // move the unit-interval sample onto the weight's interval
                    let (s, e) = (omega.start(), omega.end());
                    let bp = q.breakpoints().iter().map(|x| s + (e - s) * x).collect();
                    let scale = 1.0 / (e - s);
                    PiecewiseFn::new(bp, q.values().iter().map(|v| v * scale).collect())
                })
                .collect::<sturm_core::Result<_>>()?;
            let template = SLProblem::new(
                PiecewiseFn::constant(omega.start(), omega.end(), 1.0)?,
                potentials[0].clone(),
                omega.clone(),
                0.0,
                0.0,
            )?;
            let sweep = supnorm_sweep(&template, &potentials, a.upto)?;
            let lambdas = Solver::new(
                &template.with_potential(PiecewiseFn::constant(
                    omega.start(),
                    omega.end(),
                    0.0,
                )?)?,
                SolverOptions::default(),
            )?
            .eigenvalues_up_to(a.upto)?;
            let mut w = csv_writer(&a.out)?;
            row(&mut w, &fields!("n", "lambda", "sup_norm"))?;
            for n in 0..a.upto {
                row(&mut w, &fields!(n + 1, lambdas[n], sweep.per_n[n]))?;
            }
            w.flush()?;
            let half = a.upto / 2;
            let head = sweep.per_n[..half.max(1)]
                .iter()
                .copied()
                .fold(0.0, f64::max);
            let tail = sweep.per_n[half..].iter().copied().fold(0.0, f64::max);
            let pass = tail <= 1.05 * head;
            eprintln!(
                "M̂ = {}, tail max {tail} vs head max {head}: {}",
                sweep.m_hat,
                verdict(pass)
            );
            pass
        }
        Lemma::Voc => {
            let q = match &a.q {
                Some(p) => read_function(p)?,
                None => PiecewiseFn::constant(omega.start(), omega.end(), 0.0)?,
            };
            let raw = grid
                .iter()
                .map(|&l| voc_residual(&omega, &q, 1.0, 0.0, l))
                .collect::<sturm_core::Result<Vec<_>>>()?;
            let series = DecaySeries::new(grid.clone(), raw)?;
            write_series(&a.out, &series)?;
            trend_report(&series)
        }
    };
    if verbose {
        eprintln!("theta0 = {} ({}π)", a.theta0, a.theta0 / PI);
    }
    Ok(if pass {
        Outcome::Done
    } else {
        Outcome::CertificateFailed
    })
}
