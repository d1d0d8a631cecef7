//! Iterative schemes for the split common null point problem.
//!
//! With `S = J^B(I − γA*(I − J^F)A)` the basic operator of a two-mapping
//! instance:
//!
//! | algorithm         | update                                              |
//! |-------------------|-----------------------------------------------------|
//! | forward-backward  | `x ← S x`                                           |
//! | product space     | `x ← x + γ(Σ(J^{B_i}x − x) + Σ A_j*(J^{F_j} − I)A_j x)` |
//! | Halpern           | `x ← α_k x⁰ + (1 − α_k) S x`                        |
//! | Haugazeau         | `x ← T(x⁰, x, (x + S x)/2)`                         |
//!
//! Every run stops on the null-point residuals of the mappings, never on the
//! step length alone.

mod haugazeau;

pub use haugazeau::{haugazeau_t, InconsistentHalfspaces};

use haugazeau::haugazeau_t_into;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linops::{LinearOp, Vector, L_SAFETY_FACTOR};
use crate::mappings::{MappingError, Resolvent, ResolventParams, WarmStart};
use crate::problems::{Residuals, ScnppInstance, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    ForwardBackward,
    ProductSpace,
    Halpern,
    Haugazeau,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::ForwardBackward,
        Algorithm::ProductSpace,
        Algorithm::Halpern,
        Algorithm::Haugazeau,
    ];

    /// Short name used on the command line and in file names.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ForwardBackward => "fb",
            Algorithm::ProductSpace => "product",
            Algorithm::Halpern => "halpern",
            Algorithm::Haugazeau => "haugazeau",
        }
    }

    /// Whether the scheme is defined only for one domain and one image mapping.
    pub fn needs_two_mapping(self) -> bool {
        self != Algorithm::ProductSpace
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}' (expected fb, product, halpern or haugazeau)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// `γ = gamma_fraction · 2 / L_safe`.
    Auto,
    Explicit(f64),
}

/// Anchor weights `α_k` of the Halpern scheme. Both choices satisfy
/// `α_k → 0` and `Σ α_k = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSchedule {
    /// `α_k = 1/(k+1)`
    Harmonic,
    /// `α_k = (k+1)^(−q)` with `q ∈ (0, 1]`
    PowerLaw(f64),
}

impl AlphaSchedule {
    pub fn alpha(&self, k: usize) -> f64 {
        let k1 = k as f64 + 1.0;
        match self {
            AlphaSchedule::Harmonic => 1.0 / k1,
            AlphaSchedule::PowerLaw(q) => k1.powf(-q),
        }
    }
}

impl FromStr for AlphaSchedule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "harmonic" {
            return Ok(AlphaSchedule::Harmonic);
        }
        if let Some(q) = s.strip_prefix("power:") {
            let q: f64 = q.parse().map_err(|_| format!("bad exponent in '{s}'"))?;
            return Ok(AlphaSchedule::PowerLaw(q));
        }
        Err(format!("unknown alpha schedule '{s}' (expected harmonic or power:q)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub lambda: f64,
    pub gamma: Gamma,
    pub gamma_fraction: f64,
    pub alpha_schedule: AlphaSchedule,
    /// Relaxation `x ← c x + (1 − c) S x` for forward-backward; off when `None`.
    pub relaxation_c: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    /// `None`: every iterate up to 1000, then every 10th.
    pub record_every: Option<usize>,
    pub inner_tol: f64,
    pub inner_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let inner = ResolventParams::default();
        SolverConfig {
            algorithm: Algorithm::ForwardBackward,
            lambda: 1.0,
            gamma: Gamma::Auto,
            gamma_fraction: 0.5,
            alpha_schedule: AlphaSchedule::Harmonic,
            relaxation_c: None,
            tol: 1e-8,
            max_iter: 100_000,
            record_every: None,
            inner_tol: inner.inner_tol,
            inner_max_iter: inner.inner_max_iter,
        }
    }
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SolverConfig {
            algorithm,
            ..Default::default()
        }
    }

    pub fn resolvent_params(&self) -> ResolventParams {
        ResolventParams {
            lambda: self.lambda,
            inner_tol: self.inner_tol,
            inner_max_iter: self.inner_max_iter,
        }
    }

    pub fn check(&self) -> Result<(), SolveError> {
        let bad = |m: String| Err(SolveError::Config(m));
        self.resolvent_params().check()?;
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if !(self.gamma_fraction > 0.0 && self.gamma_fraction < 1.0) {
            return bad(format!("gamma_fraction must lie in (0, 1), got {}", self.gamma_fraction));
        }
        if let Gamma::Explicit(g) = self.gamma {
            if !(g.is_finite() && g > 0.0) {
                return bad(format!("gamma must be positive, got {g}"));
            }
        }
        if let Some(c) = self.relaxation_c {
            if !(c > 0.0 && c < 1.0) {
                return bad(format!("relaxation_c must lie in (0, 1), got {c}"));
            }
        }
        if let AlphaSchedule::PowerLaw(q) = self.alpha_schedule {
            if !(q > 0.0 && q <= 1.0) {
                return bad(format!("power-law exponent must lie in (0, 1], got {q}"));
            }
        }
        if self.record_every == Some(0) {
            return bad("record_every must be positive".into());
        }
        Ok(())
    }

    fn should_record(&self, k: usize) -> bool {
        match self.record_every {
            Some(n) => k % n == 0,
            None => k <= 1000 || k % 10 == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("gamma = {gamma} is outside (0, 2/L_safe) = (0, {upper})")]
    GammaOutOfRange { gamma: f64, upper: f64 },
    #[error("{algorithm} needs one domain and one image mapping, got p = {p}, r = {r}; lift the instance first")]
    NotTwoMapping { algorithm: Algorithm, p: usize, r: usize },
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error("{0}")]
    Breakdown(String),
}

impl From<InconsistentHalfspaces> for SolveError {
    fn from(e: InconsistentHalfspaces) -> Self {
        SolveError::Breakdown(e.to_string())
    }
}

/// Lipschitz-type constant `L` that bounds admissible step sizes
/// `γ ∈ (0, 2/L)`: `‖A*A‖` for the two-mapping schemes and
/// `p + Σ ‖A_j‖²` for the product-space scheme. Returns the raw estimate.
pub fn step_constant(inst: &ScnppInstance, algorithm: Algorithm) -> f64 {
    match algorithm {
        Algorithm::ProductSpace => {
            inst.p() as f64
                + inst
                    .a_ops
                    .iter()
                    .map(|a| a.gram_norm_default().estimate)
                    .sum::<f64>()
        }
        _ => inst
            .a_ops
            .first()
            .map(|a| a.gram_norm_default().estimate)
            .unwrap_or(0.0),
    }
}

/// Resolves `cfg.gamma` against the instance. Returns `(γ, L_safe)`.
pub fn resolve_gamma(inst: &ScnppInstance, cfg: &SolverConfig) -> Result<(f64, f64), SolveError> {
    let l_safe = step_constant(inst, cfg.algorithm) * L_SAFETY_FACTOR;
    let upper = if l_safe > 0.0 { 2.0 / l_safe } else { f64::INFINITY };
    let gamma = match cfg.gamma {
        // With L = 0 the forward term vanishes and γ is irrelevant.
        Gamma::Auto if l_safe == 0.0 => 1.0,
        Gamma::Auto => cfg.gamma_fraction * upper,
        Gamma::Explicit(g) => {
            if !(g > 0.0 && g < upper) {
                return Err(SolveError::GammaOutOfRange { gamma: g, upper });
            }
            g
        }
    };
    Ok((gamma, l_safe))
}

/// `c·x + (1 − c)·s_out`: the relaxation of an operator whose value at `x`
/// is `s_out`. Same fixed points, asymptotically regular.
pub fn relax(c: f64, s_out: &Vector, x: &Vector) -> Vector {
    x.lincomb(c, 1.0 - c, s_out)
}

/// Prepared resolvents and step size for one instance; evaluates single steps.
#[derive(Debug, Clone)]
pub struct Stepper {
    b: Vec<Resolvent>,
    f: Vec<Resolvent>,
    a: Vec<LinearOp>,
    n1: usize,
    gamma: f64,
}

impl Stepper {
    /// Validates `cfg` and resolves its step size for `inst`.
    pub fn new(inst: &ScnppInstance, cfg: &SolverConfig) -> Result<Self, SolveError> {
        cfg.check()?;
        let (gamma, _) = resolve_gamma(inst, cfg)?;
        Self::with_gamma(inst, &cfg.resolvent_params(), gamma)
    }

    /// Uses `gamma` as given, without checking it against `2/L`.
    pub fn with_gamma(
        inst: &ScnppInstance,
        params: &ResolventParams,
        gamma: f64,
    ) -> Result<Self, SolveError> {
        let prep = |maps: &[crate::mappings::MonotoneMap]| {
            maps.iter()
                .map(|m| m.resolvent(params))
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(Stepper {
            b: prep(&inst.b_maps)?,
            f: prep(&inst.f_maps)?,
            a: inst.a_ops.clone(),
            n1: inst.n1,
            gamma,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn two_mapping(&self, algorithm: Algorithm) -> Result<(&Resolvent, &Resolvent, &LinearOp), SolveError> {
        match (&self.b[..], &self.f[..], &self.a[..]) {
            ([b], [f], [a]) => Ok((b, f, a)),
            _ => Err(SolveError::NotTwoMapping {
                algorithm,
                p: self.b.len(),
                r: self.f.len(),
            }),
        }
    }

    fn check_point(&self, x: &Vector) -> Result<(), SolveError> {
        if x.dim() != self.n1 {
            return Err(SolveError::Config(format!(
                "point has dimension {}, expected {}",
                x.dim(),
                self.n1
            )));
        }
        Ok(())
    }

    /// `J^B(x − γ A*(Ax − J^F(Ax)))`.
    pub fn fb_step(&self, x: &Vector) -> Result<Vector, SolveError> {
        self.check_point(x)?;
        let (b, f, a) = self.two_mapping(Algorithm::ForwardBackward)?;
        let ax = a.apply_unchecked(x);
        let gap = &ax - &f.apply(&ax)?;
        let forward = x.add_scaled(-self.gamma, &a.adjoint_apply_unchecked(&gap));
        Ok(b.apply(&forward)?)
    }

    /// `x + γ(Σ_i (J^{B_i}x − x) + Σ_j A_j*(J^{F_j}(A_j x) − A_j x))`.
    pub fn product_step(&self, x: &Vector) -> Result<Vector, SolveError> {
        self.check_point(x)?;
        let mut dir = Vector::zeros(self.n1);
        for b in &self.b {
            dir = &dir + &(&b.apply(x)? - x);
        }
        for (f, a) in self.f.iter().zip(&self.a) {
            let ax = a.apply_unchecked(x);
            let pull = &f.apply(&ax)? - &ax;
            dir = &dir + &a.adjoint_apply_unchecked(&pull);
        }
        Ok(x.add_scaled(self.gamma, &dir))
    }

    /// `α_k x⁰ + (1 − α_k) S x`.
    pub fn halpern_step(
        &self,
        schedule: &AlphaSchedule,
        x0: &Vector,
        x: &Vector,
        k: usize,
    ) -> Result<Vector, SolveError> {
        let alpha = schedule.alpha(k);
        let sx = self.fb_step(x)?;
        Ok(x0.lincomb(alpha, 1.0 - alpha, &sx))
    }

    /// `T(x⁰, x, (x + S x)/2)`.
    pub fn haugazeau_step(&self, x0: &Vector, x: &Vector) -> Result<Vector, SolveError> {
        let half = relax(0.5, &self.fb_step(x)?, x);
        Ok(haugazeau_t(x0, x, &half)?)
    }

    /// Largest domain-side and image-side fixed-point residuals at `x`.
    pub fn residuals(&self, x: &Vector) -> Result<Residuals, MappingError> {
        let mut primal: f64 = 0.0;
        for b in &self.b {
            primal = primal.max(b.residual(x)?);
        }
        let mut image: f64 = 0.0;
        for (f, a) in self.f.iter().zip(&self.a) {
            image = image.max(f.residual(&a.apply_unchecked(x))?);
        }
        Ok(Residuals { primal, image })
    }

    /// Residuals at `x` and the next iterate (written to `next`), sharing
    /// the resolvent evaluations the two have in common. The outer error
    /// means the residuals themselves could not be evaluated.
    fn evaluate_into(
        &self,
        cfg: &SolverConfig,
        x0: &[f64],
        x: &[f64],
        k: usize,
        ws: &mut Workspace,
        next: &mut [f64],
    ) -> Result<(Residuals, Result<(), SolveError>), MappingError> {
        // acc collects Σ(J^{B_i}x − x) for the product scheme.
        ws.acc.fill(0.0);
        let mut primal: f64 = 0.0;
        for (b, warm) in self.b.iter().zip(&mut ws.warm_b) {
            b.apply_warm(x, &mut ws.jb, warm)?;
            let mut sq = 0.0;
            for ((d, j), xi) in ws.acc.iter_mut().zip(&ws.jb).zip(x) {
                let g = j - xi;
                sq += g * g;
                *d += g;
            }
            primal = primal.max(sq.sqrt());
        }
        // pull_j = J^{F_j}(A_j x) − A_j x, kept for the step.
        let mut image: f64 = 0.0;
        let image_side = ws.ax.iter_mut().zip(ws.pull.iter_mut()).zip(&mut ws.warm_f);
        for ((f, a), ((ax, pull), warm)) in self.f.iter().zip(&self.a).zip(image_side) {
            a.apply_into(x, ax);
            f.apply_warm(ax, pull, warm)?;
            let mut sq = 0.0;
            for (p, v) in pull.iter_mut().zip(ax.iter()) {
                *p -= v;
                sq += *p * *p;
            }
            image = image.max(sq.sqrt());
        }
        let res = Residuals { primal, image };

        if cfg.algorithm == Algorithm::ProductSpace {
            for (a, pull) in self.a.iter().zip(&ws.pull) {
                a.adjoint_accumulate(pull, 1.0, &mut ws.acc);
            }
            for ((n, xi), d) in next.iter_mut().zip(x).zip(&ws.acc) {
                *n = xi + self.gamma * d;
            }
            return Ok((res, Ok(())));
        }
        if let Err(e) = self.two_mapping(cfg.algorithm) {
            return Ok((res, Err(e)));
        }
        ws.acc.copy_from_slice(x);
        self.a[0].adjoint_accumulate(&ws.pull[0], self.gamma, &mut ws.acc);
        if let Err(e) = self.b[0].apply_warm(&ws.acc, &mut ws.sx, &mut ws.warm_step) {
            return Ok((res, Err(e.into())));
        }
        let sx = &ws.sx;
        let step = match cfg.algorithm {
            Algorithm::Halpern => {
                let alpha = cfg.alpha_schedule.alpha(k);
                for ((n, a), s) in next.iter_mut().zip(x0).zip(sx) {
                    *n = alpha * a + (1.0 - alpha) * s;
                }
                Ok(())
            }
            Algorithm::Haugazeau => {
                for ((h, xi), s) in ws.acc.iter_mut().zip(x).zip(sx) {
                    *h = 0.5 * xi + 0.5 * s;
                }
                haugazeau_t_into(x0, x, &ws.acc, next).map_err(SolveError::from)
            }
            _ => {
                match cfg.relaxation_c {
                    Some(c) => {
                        for ((n, xi), s) in next.iter_mut().zip(x).zip(sx) {
                            *n = c * xi + (1.0 - c) * s;
                        }
                    }
                    None => next.copy_from_slice(sx),
                }
                Ok(())
            }
        };
        Ok((res, step))
    }
}

/// Scratch buffers for [`Stepper::evaluate_into`], sized once per run.
struct Workspace {
    ax: Vec<Vec<f64>>,
    pull: Vec<Vec<f64>>,
    jb: Vec<f64>,
    acc: Vec<f64>,
    sx: Vec<f64>,
    // Inner-loop starts for J^{B_i}(x), J^{F_j}(A_j x) and the step's J^B.
    warm_b: Vec<WarmStart>,
    warm_f: Vec<WarmStart>,
    warm_step: WarmStart,
}

impl Workspace {
    fn new(stepper: &Stepper) -> Self {
        let image = || stepper.a.iter().map(|a| vec![0.0; a.rows()]).collect();
        Workspace {
            ax: image(),
            pull: image(),
            jb: vec![0.0; stepper.n1],
            acc: vec![0.0; stepper.n1],
            sx: vec![0.0; stepper.n1],
            warm_b: vec![WarmStart::default(); stepper.b.len()],
            warm_f: vec![WarmStart::default(); stepper.f.len()],
            warm_step: WarmStart::default(),
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Converged,
    MaxIterReached,
    Breakdown(String),
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Converged => "Converged",
            RunStatus::MaxIterReached => "MaxIterReached",
            RunStatus::Breakdown(_) => "Breakdown",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::Breakdown(reason) => write!(f, "Breakdown({reason})"),
            other => f.write_str(other.label()),
        }
    }
}

/// One recorded iteration: residuals at `x^k` and `‖x^{k+1} − x^k‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub primal_residual: f64,
    pub image_residual: f64,
    /// NaN when the step out of the final iterate could not be evaluated.
    pub step_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub gamma: f64,
    pub lambda: f64,
    pub iterates: Vec<(usize, Vector)>,
    pub history: Vec<TraceRow>,
    pub status: RunStatus,
    pub final_point: Vector,
    pub iterations_used: usize,
    pub warnings: Vec<String>,
}

impl RunTrace {
    pub fn final_row(&self) -> Option<&TraceRow> {
        self.history.last()
    }

    pub fn is_converged(&self) -> bool {
        self.status == RunStatus::Converged
    }

    /// `sup ‖x^m − x^n‖` over recorded iterates with `m, n ≥ from_k` and the
    /// final point: the Cauchy diameter of the recorded tail.
    pub fn tail_diameter(&self, from_k: usize) -> f64 {
        let tail: Vec<&Vector> = self
            .iterates
            .iter()
            .filter(|(k, _)| *k >= from_k)
            .map(|(_, x)| x)
            .chain(std::iter::once(&self.final_point))
            .collect();
        let mut diam: f64 = 0.0;
        for (i, a) in tail.iter().enumerate() {
            for b in &tail[i + 1..] {
                diam = diam.max(a.dist(b));
            }
        }
        diam
    }
}

/// Iterates the configured scheme from `x0` until both residuals are at most
/// `cfg.tol` or `cfg.max_iter` steps have been taken.
///
/// Instance and configuration problems are errors; failures during the
/// iteration (inner resolvent loops, Haugazeau breakdown) end the run with
/// [`RunStatus::Breakdown`].
pub fn run(inst: &ScnppInstance, cfg: &SolverConfig, x0: &Vector) -> Result<RunTrace, SolveError> {
    inst.validate().map_err(SolveError::Invalid)?;
    cfg.check()?;
    if cfg.algorithm.needs_two_mapping() && !inst.is_two_mapping() {
        return Err(SolveError::NotTwoMapping {
            algorithm: cfg.algorithm,
            p: inst.p(),
            r: inst.r(),
        });
    }
    let stepper = Stepper::new(inst, cfg)?;
    stepper.check_point(x0)?;
    let params = cfg.resolvent_params();
    let warnings = inst
        .b_maps
        .iter()
        .chain(&inst.f_maps)
        .flat_map(|m| m.warnings(&params))
        .collect();

    let mut trace = RunTrace {
        algorithm: cfg.algorithm,
        gamma: stepper.gamma(),
        lambda: cfg.lambda,
        iterates: Vec::new(),
        history: Vec::new(),
        status: RunStatus::MaxIterReached,
        final_point: x0.clone(),
        iterations_used: 0,
        warnings,
    };
    let mut ws = Workspace::new(&stepper);
    let mut x = x0.as_slice().to_vec();
    let mut next = vec![0.0; x.len()];
    let mut k = 0usize;
    loop {
        let (res, step) = match stepper.evaluate_into(cfg, x0, &x, k, &mut ws, &mut next) {
            Ok(pair) => pair,
            Err(e) => {
                trace.status = RunStatus::Breakdown(e.to_string());
                break;
            }
        };
        let done = res.max() <= cfg.tol;
        let at_cap = k >= cfg.max_iter;
        let step_norm = if step.is_ok() { distance(&next, &x) } else { f64::NAN };
        if cfg.should_record(k) || done || at_cap || step.is_err() {
            trace.history.push(TraceRow {
                k,
                primal_residual: res.primal,
                image_residual: res.image,
                step_norm,
            });
            trace.iterates.push((k, Vector::from(x.as_slice())));
        }
        if done {
            trace.status = RunStatus::Converged;
            break;
        }
        if at_cap {
            trace.status = RunStatus::MaxIterReached;
            break;
        }
        if let Err(e) = step {
            trace.status = RunStatus::Breakdown(e.to_string());
            break;
        }
        std::mem::swap(&mut x, &mut next);
        k += 1;
    }
    trace.final_point = x.into();
    trace.iterations_used = k;
    Ok(trace)
}

/// Outcome of [`cauchy_tail`].
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyTail {
    /// First iteration whose residuals are at most `tol / 10`.
    pub tail_start: Option<usize>,
    /// `sup ‖x^m − x^n‖` over the tail, including the final point.
    pub diameter: f64,
    /// Residuals at the final point.
    pub limit_residual: f64,
    pub trace: RunTrace,
}

impl CauchyTail {
    pub fn passes(&self, tol: f64) -> bool {
        self.tail_start.is_some() && self.diameter <= tol && self.limit_residual <= tol
    }
}

/// Runs `cfg` past its own tolerance, to `tol / 1000`, recording every
/// iterate, and measures the diameter of the tail that starts where the
/// residuals first reach `tol / 10`. A Cauchy sequence drives this diameter
/// below `tol`.
pub fn cauchy_tail(inst: &ScnppInstance, cfg: &SolverConfig, x0: &Vector) -> Result<CauchyTail, SolveError> {
    let deep = SolverConfig {
        tol: cfg.tol * 1e-3,
        record_every: Some(1),
        ..cfg.clone()
    };
    let trace = run(inst, &deep, x0)?;
    let max_res = |row: &TraceRow| row.primal_residual.max(row.image_residual);
    let tail_start = trace
        .history
        .iter()
        .find(|row| max_res(row) <= cfg.tol * 0.1)
        .map(|row| row.k);
    let diameter = tail_start.map_or(f64::INFINITY, |k| trace.tail_diameter(k));
    let limit_residual = trace.final_row().map_or(f64::INFINITY, max_res);
    Ok(CauchyTail {
        tail_start,
        diameter,
        limit_residual,
        trace,
    })
}
