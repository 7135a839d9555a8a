//! Multigrid cycles and the stand-alone solve loop.
//!
//! The recursion of every cycle is written once against [`CycleBackend`],
//! so the numeric solver and the data-free dry run share control flow and
//! instrumentation. Levels are 0-based internally (0 = finest); trace
//! events report 1-based levels.

use crate::clock::Stopwatch;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::costmodel::Kappa;
use crate::error::{MgError, Result};
use crate::mesh::{build_hierarchy, dot, norm2, Coarsening, GridFunction, HierarchySpec};
use crate::operator::{
    apply, build_operators, residual_into, CoarseOperator, ProblemSpec, Rhs, Stencil9,
};
use crate::smoother::{relax_in_place, SmootherKind, SmootherScratch, SmootherSpec};
use crate::transfer::{prolong_into, restrict_into};

/// Consecutive growing cycles that count as divergence.
pub const DIVERGENCE_STREAK: usize = 5;

/// Recursion pattern of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleShape {
    Kappa(Kappa),
    /// Classical cycle index: `gamma` identical recursive calls.
    Gamma(u32),
    /// Recursive F-call followed by a V-cycle.
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleConfig {
    pub kappa: Kappa,
    pub gamma: u32,
    pub nu1: usize,
    pub nu2: usize,
    pub smoother: SmootherSpec,
    pub coarsening: Coarsening,
    pub coarse_op: CoarseOperator,
    pub n: usize,
}

impl CycleConfig {
    pub fn new(n: usize, kappa: Kappa) -> Self {
        Self {
            kappa,
            gamma: 1,
            nu1: 2,
            nu2: 2,
            smoother: SmootherSpec::default(),
            coarsening: Coarsening::FullStandard,
            coarse_op: CoarseOperator::Galerkin,
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(MgError::InvalidLevels(self.n));
        }
        if self.kappa == Kappa::Finite(0) {
            return Err(MgError::InvalidParameter("cycle counter must be >= 1".into()));
        }
        if self.gamma < 1 {
            return Err(MgError::InvalidParameter("cycle index must be >= 1".into()));
        }
        self.smoother.validate()?;
        if self.smoother.kind == SmootherKind::ZebraAlternating {
            for count in [self.nu1, self.nu2] {
                if count % 2 != 0 {
                    return Err(MgError::OddAlternatingCount(count));
                }
            }
        }
        Ok(())
    }
}

/// One routine entry: 1-based level and the counter (kappa, gamma, or
/// 2 for F-calls / 1 for V-calls) it was entered with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub level: u32,
    pub counter: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    /// Routine calls per level, finest first.
    pub visits: Vec<u64>,
    pub kernel_launches: u64,
    /// `N_l` per non-coarsest call plus `N_coarsest` per coarsest solve.
    pub unknown_touches: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEvent>,
    #[serde(skip)]
    pub record_trace: bool,
}

impl CycleStats {
    pub fn new(levels: usize) -> Self {
        Self {
            visits: vec![0; levels],
            kernel_launches: 0,
            unknown_touches: 0.0,
            trace: Vec::new(),
            record_trace: false,
        }
    }

    pub fn with_trace(levels: usize) -> Self {
        Self {
            record_trace: true,
            ..Self::new(levels)
        }
    }

    pub fn total_visits(&self) -> u64 {
        self.visits.iter().sum()
    }

    pub fn accumulate(&mut self, other: &CycleStats) {
        if self.visits.len() < other.visits.len() {
            self.visits.resize(other.visits.len(), 0);
        }
        for (a, b) in self.visits.iter_mut().zip(&other.visits) {
            *a += b;
        }
        self.kernel_launches += other.kernel_launches;
        self.unknown_touches += other.unknown_touches;
        if self.record_trace {
            self.trace.extend_from_slice(&other.trace);
        }
    }
}

/// The work steps a cycle routine performs on a level.
pub trait CycleBackend {
    fn levels(&self) -> usize;
    fn unknowns(&self, level: usize) -> usize;
    fn nu1(&self) -> usize;
    fn nu2(&self) -> usize;
    fn coarsest_solve(&mut self, level: usize) -> Result<()>;
    fn pre_relax(&mut self, level: usize) -> Result<()>;
    /// `f[level + 1] <- R (f[level] - A v[level])`.
    fn restrict_residual(&mut self, level: usize) -> Result<()>;
    fn zero_coarse(&mut self, level: usize);
    /// `v[level] += P v[level + 1]`.
    fn prolong_correct(&mut self, level: usize) -> Result<()>;
    fn post_relax(&mut self, level: usize) -> Result<()>;
}

struct Driver<'a, B: CycleBackend> {
    backend: &'a mut B,
    stats: &'a mut CycleStats,
}

impl<B: CycleBackend> Driver<'_, B> {
    fn enter(&mut self, level: usize, counter: u32) {
        self.stats.visits[level] += 1;
        if self.stats.record_trace {
            self.stats.trace.push(TraceEvent {
                level: level as u32 + 1,
                counter,
            });
        }
    }

    /// Coarsest solve, or the steps before the recursive calls.
    /// Returns true on the coarsest level.
    fn descend(&mut self, level: usize) -> Result<bool> {
        let n_level = self.backend.unknowns(level) as f64;
        self.stats.unknown_touches += n_level;
        if level + 1 == self.backend.levels() {
            self.backend.coarsest_solve(level)?;
            self.stats.kernel_launches += 1;
            return Ok(true);
        }
        self.backend.pre_relax(level)?;
        self.backend.restrict_residual(level)?;
        self.backend.zero_coarse(level);
        self.stats.kernel_launches += self.backend.nu1() as u64 + 3;
        Ok(false)
    }

    fn ascend(&mut self, level: usize) -> Result<()> {
        self.backend.prolong_correct(level)?;
        self.backend.post_relax(level)?;
        self.stats.kernel_launches += self.backend.nu2() as u64 + 2;
        Ok(())
    }

    fn kappa(&mut self, level: usize, kappa: u32) -> Result<()> {
        self.enter(level, kappa);
        if self.descend(level)? {
            return Ok(());
        }
        self.kappa(level + 1, kappa)?;
        if kappa > 1 {
            self.kappa(level + 1, kappa - 1)?;
        }
        self.ascend(level)
    }

    fn gamma(&mut self, level: usize, gamma: u32) -> Result<()> {
        self.enter(level, gamma);
        if self.descend(level)? {
            return Ok(());
        }
        for _ in 0..gamma {
            self.gamma(level + 1, gamma)?;
        }
        self.ascend(level)
    }

    fn f(&mut self, level: usize) -> Result<()> {
        self.enter(level, 2);
        if self.descend(level)? {
            return Ok(());
        }
        self.f(level + 1)?;
        self.gamma(level + 1, 1)?;
        self.ascend(level)
    }
}

/// Runs the kappa-cycle from `level` with counter `kappa >= 1`.
pub fn kappa_cycle<B: CycleBackend>(
    backend: &mut B,
    level: usize,
    kappa: u32,
    stats: &mut CycleStats,
) -> Result<()> {
    if kappa < 1 {
        return Err(MgError::InvalidParameter("cycle counter must be >= 1".into()));
    }
    Driver { backend, stats }.kappa(level, kappa)
}

pub fn gamma_cycle<B: CycleBackend>(
    backend: &mut B,
    level: usize,
    gamma: u32,
    stats: &mut CycleStats,
) -> Result<()> {
    if gamma < 1 {
        return Err(MgError::InvalidParameter("cycle index must be >= 1".into()));
    }
    Driver { backend, stats }.gamma(level, gamma)
}

pub fn f_cycle<B: CycleBackend>(backend: &mut B, level: usize, stats: &mut CycleStats) -> Result<()> {
    Driver { backend, stats }.f(level)
}

/// Runs one complete cycle of the given shape from the finest level.
pub fn run_shape<B: CycleBackend>(backend: &mut B, shape: CycleShape, stats: &mut CycleStats) -> Result<()> {
    let n = backend.levels() as u32;
    match shape {
        CycleShape::Kappa(k) => kappa_cycle(backend, 0, k.effective(n), stats),
        CycleShape::Gamma(g) => gamma_cycle(backend, 0, g, stats),
        CycleShape::F => f_cycle(backend, 0, stats),
    }
}

/// Backend that only walks the recursion, for call and launch counting.
#[derive(Debug, Clone)]
pub struct DryBackend {
    unknowns: Vec<usize>,
    nu1: usize,
    nu2: usize,
}

impl DryBackend {
    pub fn new(unknowns: Vec<usize>, nu1: usize, nu2: usize) -> Self {
        Self { unknowns, nu1, nu2 }
    }

    /// Full-coarsening sizes `(2^(n - l + 1) - 1)^2` without allocating
    /// any grids.
    pub fn full_standard(n: usize, nu1: usize, nu2: usize) -> Self {
        let unknowns = (0..n)
            .map(|l| {
                let side = (1usize << (n - l)) - 1;
                side * side
            })
            .collect();
        Self::new(unknowns, nu1, nu2)
    }

    pub fn from_hierarchy(h: &HierarchySpec, nu1: usize, nu2: usize) -> Self {
        Self::new((0..h.n).map(|l| h.unknowns(l)).collect(), nu1, nu2)
    }
}

impl CycleBackend for DryBackend {
    fn levels(&self) -> usize {
        self.unknowns.len()
    }
    fn unknowns(&self, level: usize) -> usize {
        self.unknowns[level]
    }
    fn nu1(&self) -> usize {
        self.nu1
    }
    fn nu2(&self) -> usize {
        self.nu2
    }
    fn coarsest_solve(&mut self, _: usize) -> Result<()> {
        Ok(())
    }
    fn pre_relax(&mut self, _: usize) -> Result<()> {
        Ok(())
    }
    fn restrict_residual(&mut self, _: usize) -> Result<()> {
        Ok(())
    }
    fn zero_coarse(&mut self, _: usize) {}
    fn prolong_correct(&mut self, _: usize) -> Result<()> {
        Ok(())
    }
    fn post_relax(&mut self, _: usize) -> Result<()> {
        Ok(())
    }
}

/// Statistics of one cycle on a full-coarsening hierarchy without any
/// numerical work.
pub fn dry_run(n: usize, shape: CycleShape, nu1: usize, nu2: usize, record_trace: bool) -> Result<CycleStats> {
    if n < 1 {
        return Err(MgError::InvalidLevels(n));
    }
    let mut backend = DryBackend::full_standard(n, nu1, nu2);
    let mut stats = if record_trace {
        CycleStats::with_trace(n)
    } else {
        CycleStats::new(n)
    };
    run_shape(&mut backend, shape, &mut stats)?;
    Ok(stats)
}

/// Exact solve on the coarsest level, which is a single x-line: the
/// cross-line stencil entries only see boundary zeros.
pub fn coarsest_solve(op: &Stencil9, f: &GridFunction) -> Result<GridFunction> {
    let mut v = GridFunction::zeros(f.nx(), f.ny());
    let mut factors = vec![0.0; f.nx()];
    coarsest_solve_into(op, f, &mut v, &mut factors)?;
    Ok(v)
}

fn coarsest_solve_into(op: &Stencil9, f: &GridFunction, v: &mut GridFunction, factors: &mut [f64]) -> Result<()> {
    if f.ny() != 1 {
        return Err(MgError::InvalidParameter(format!(
            "coarsest level must be a single line, got {}x{}",
            f.nx(),
            f.ny()
        )));
    }
    let (lo, di, up) = (op.at(-1, 0), op.center(), op.at(1, 0));
    let x = v.values_mut();
    x.copy_from_slice(f.values());
    let m = x.len();
    if di == 0.0 {
        return Err(MgError::SingularCoarsest);
    }
    factors[0] = up / di;
    x[0] /= di;
    for k in 1..m {
        let denom = di - lo * factors[k - 1];
        if denom == 0.0 {
            return Err(MgError::SingularCoarsest);
        }
        factors[k] = up / denom;
        x[k] = (x[k] - lo * x[k - 1]) / denom;
    }
    for k in (0..m.saturating_sub(1)).rev() {
        x[k] -= factors[k] * x[k + 1];
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct LevelData {
    v: GridFunction,
    f: GridFunction,
    tmp: GridFunction,
    scratch: SmootherScratch,
}

/// Per-level vectors for one solve.
#[derive(Debug, Clone)]
pub struct Workspace {
    levels: Vec<LevelData>,
    factors: Vec<f64>,
}

impl Workspace {
    pub fn solution(&self) -> &GridFunction {
        &self.levels[0].v
    }

    pub fn solution_mut(&mut self) -> &mut GridFunction {
        &mut self.levels[0].v
    }

    pub fn rhs(&self) -> &GridFunction {
        &self.levels[0].f
    }

    pub fn set_rhs(&mut self, f: &GridFunction) -> Result<()> {
        self.levels[0].f.copy_from(f)
    }

    pub fn set_solution(&mut self, v: &GridFunction) -> Result<()> {
        self.levels[0].v.copy_from(v)
    }
}

/// Level operators and cycle parameters for one problem.
#[derive(Debug, Clone)]
pub struct Multigrid {
    hierarchy: HierarchySpec,
    ops: Vec<Stencil9>,
    smoother: SmootherSpec,
    nu1: usize,
    nu2: usize,
}

impl Multigrid {
    pub fn new(finest: Stencil9, config: &CycleConfig) -> Result<Self> {
        config.validate()?;
        let hierarchy = build_hierarchy(config.n, config.coarsening)?;
        let ops = build_operators(finest, config.n, config.coarsening, config.coarse_op);
        Ok(Self {
            hierarchy,
            ops,
            smoother: config.smoother,
            nu1: config.nu1,
            nu2: config.nu2,
        })
    }

    pub fn hierarchy(&self) -> &HierarchySpec {
        &self.hierarchy
    }

    pub fn operators(&self) -> &[Stencil9] {
        &self.ops
    }

    pub fn finest_operator(&self) -> &Stencil9 {
        &self.ops[0]
    }

    pub fn workspace(&self) -> Workspace {
        let levels = self
            .hierarchy
            .dims
            .iter()
            .map(|&(nx, ny)| LevelData {
                v: GridFunction::zeros(nx, ny),
                f: GridFunction::zeros(nx, ny),
                tmp: GridFunction::zeros(nx, ny),
                scratch: SmootherScratch::new(nx, ny),
            })
            .collect();
        let (nx, _) = self.hierarchy.coarsest();
        Workspace {
            levels,
            factors: vec![0.0; nx],
        }
    }

    /// One cycle on the workspace's finest-level `v` and `f`.
    pub fn run_cycle(&self, ws: &mut Workspace, shape: CycleShape, stats: &mut CycleStats) -> Result<()> {
        let mut backend = NumericBackend { mg: self, ws };
        run_shape(&mut backend, shape, stats)
    }

    /// One cycle applied to `v` for right-hand side `f`.
    pub fn cycle(
        &self,
        v: &GridFunction,
        f: &GridFunction,
        shape: CycleShape,
        stats: &mut CycleStats,
    ) -> Result<GridFunction> {
        let mut ws = self.workspace();
        ws.set_solution(v)?;
        ws.set_rhs(f)?;
        self.run_cycle(&mut ws, shape, stats)?;
        Ok(ws.levels.swap_remove(0).v)
    }
}

struct NumericBackend<'a> {
    mg: &'a Multigrid,
    ws: &'a mut Workspace,
}

impl CycleBackend for NumericBackend<'_> {
    fn levels(&self) -> usize {
        self.mg.hierarchy.n
    }

    fn unknowns(&self, level: usize) -> usize {
        self.mg.hierarchy.unknowns(level)
    }

    fn nu1(&self) -> usize {
        self.mg.nu1
    }

    fn nu2(&self) -> usize {
        self.mg.nu2
    }

    fn coarsest_solve(&mut self, level: usize) -> Result<()> {
        let lv = &mut self.ws.levels[level];
        coarsest_solve_into(&self.mg.ops[level], &lv.f, &mut lv.v, &mut self.ws.factors)
    }

    fn pre_relax(&mut self, level: usize) -> Result<()> {
        let lv = &mut self.ws.levels[level];
        relax_in_place(&self.mg.ops[level], &mut lv.v, &lv.f, &self.mg.smoother, self.mg.nu1, &mut lv.scratch)
    }

    fn restrict_residual(&mut self, level: usize) -> Result<()> {
        let (fine, coarse) = self.ws.levels.split_at_mut(level + 1);
        let lv = &mut fine[level];
        residual_into(&self.mg.ops[level], &lv.v, &lv.f, &mut lv.tmp)?;
        restrict_into(&lv.tmp, self.mg.hierarchy.coarsening, &mut coarse[0].f)
    }

    fn zero_coarse(&mut self, level: usize) {
        self.ws.levels[level + 1].v.fill_zero();
    }

    fn prolong_correct(&mut self, level: usize) -> Result<()> {
        let (fine, coarse) = self.ws.levels.split_at_mut(level + 1);
        let lv = &mut fine[level];
        prolong_into(&coarse[0].v, self.mg.hierarchy.coarsening, &mut lv.tmp)?;
        lv.v.axpy(1.0, &lv.tmp)
    }

    fn post_relax(&mut self, level: usize) -> Result<()> {
        let lv = &mut self.ws.levels[level];
        relax_in_place(&self.mg.ops[level], &mut lv.v, &lv.f, &self.mg.smoother, self.mg.nu2, &mut lv.scratch)
    }
}

/// Seeded uniform values in `[0, 1)`.
pub fn random_grid(nx: usize, ny: usize, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::from_fn(nx, ny, |_, _| rng.gen::<f64>())
}

/// Which norm the solve loop drives down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    /// `||v||`, the error when the exact solution is zero.
    Error,
    /// `||f - A v||`.
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Converged,
    Diverged,
    MaxIterations,
    /// Krylov breakdown: nonpositive curvature or preconditioned inner product.
    Breakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    pub norm: NormKind,
    pub iterations: usize,
    pub initial_error_norm: f64,
    pub final_error_norm: f64,
    pub per_cycle_reduction: Vec<f64>,
    /// Geometric mean of the last five reductions.
    pub asymptotic_factor: f64,
    pub stats: CycleStats,
    pub wall_time_ms: f64,
}

pub(crate) fn asymptotic_factor(reductions: &[f64]) -> f64 {
    let tail = &reductions[reductions.len().saturating_sub(5)..];
    if tail.is_empty() {
        return 0.0;
    }
    let log_mean = tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64;
    log_mean.exp()
}

/// Tracks norms across iterations and decides when to stop.
#[derive(Debug)]
pub(crate) struct ConvergenceMonitor {
    pub current: f64,
    pub reductions: Vec<f64>,
    target: f64,
    growing: usize,
}

impl ConvergenceMonitor {
    pub fn new(initial: f64, target_reduction: f64) -> Self {
        Self {
            current: initial,
            reductions: Vec::new(),
            target: initial / target_reduction,
            growing: 0,
        }
    }

    pub fn converged(&self) -> bool {
        self.current <= self.target
    }

    /// Records a new norm; returns the outcome if the loop should stop.
    pub fn record(&mut self, norm: f64) -> Option<SolveOutcome> {
        let ratio = if self.current > 0.0 { norm / self.current } else { 0.0 };
        self.reductions.push(ratio);
        if !norm.is_finite() {
            self.current = norm;
            return Some(SolveOutcome::Diverged);
        }
        self.growing = if norm > self.current { self.growing + 1 } else { 0 };
        self.current = norm;
        if self.converged() {
            Some(SolveOutcome::Converged)
        } else if self.growing >= DIVERGENCE_STREAK {
            Some(SolveOutcome::Diverged)
        } else {
            None
        }
    }
}

/// The stopping norm for the current iterate.
pub(crate) fn measure(kind: NormKind, op: &Stencil9, v: &GridFunction, f: &GridFunction, tmp: &mut GridFunction) -> Result<f64> {
    match kind {
        NormKind::Error => Ok(norm2(v)),
        NormKind::Residual => {
            residual_into(op, v, f, tmp)?;
            Ok(norm2(tmp))
        }
    }
}

/// Finest-level right-hand side, initial guess and stopping norm for a
/// problem on the given multigrid hierarchy.
pub fn problem_setup(problem: &ProblemSpec, mg: &Multigrid) -> (GridFunction, GridFunction, NormKind) {
    let (nx, ny) = mg.hierarchy().finest();
    let f = problem.rhs.grid(nx, ny);
    let v0 = problem.initial_guess(nx, ny);
    let kind = match problem.rhs {
        Rhs::Zero => NormKind::Error,
        _ => NormKind::Residual,
    };
    (f, v0, kind)
}

/// Repeats kappa-cycles until the stopping norm drops by
/// `target_reduction`, divergence, or `max_cycles`.
pub fn solve_standalone(
    problem: &ProblemSpec,
    config: &CycleConfig,
    target_reduction: f64,
    max_cycles: usize,
) -> Result<SolveReport> {
    if !(target_reduction > 1.0) {
        return Err(MgError::InvalidParameter(format!(
            "target reduction must exceed 1, got {target_reduction}"
        )));
    }
    let mg = Multigrid::new(problem.stencil()?, config)?;
    let (f, v0, kind) = problem_setup(problem, &mg);
    solve_with(&mg, &f, &v0, kind, CycleShape::Kappa(config.kappa), target_reduction, max_cycles)
}

/// Stand-alone cycling on an existing hierarchy.
pub fn solve_with(
    mg: &Multigrid,
    f: &GridFunction,
    v0: &GridFunction,
    kind: NormKind,
    shape: CycleShape,
    target_reduction: f64,
    max_cycles: usize,
) -> Result<SolveReport> {
    let start = Stopwatch::start();
    let mut ws = mg.workspace();
    ws.set_rhs(f)?;
    ws.set_solution(v0)?;
    let mut tmp = GridFunction::zeros(f.nx(), f.ny());
    let initial = measure(kind, mg.finest_operator(), v0, f, &mut tmp)?;
    let mut monitor = ConvergenceMonitor::new(initial, target_reduction);
    let mut stats = CycleStats::new(mg.hierarchy().n);
    let mut outcome = if monitor.converged() {
        SolveOutcome::Converged
    } else {
        SolveOutcome::MaxIterations
    };
    let mut iterations = 0;
    if outcome != SolveOutcome::Converged {
        while iterations < max_cycles {
            mg.run_cycle(&mut ws, shape, &mut stats)?;
            iterations += 1;
            let norm = measure(kind, mg.finest_operator(), ws.solution(), f, &mut tmp)?;
            if let Some(o) = monitor.record(norm) {
                outcome = o;
                break;
            }
        }
    }
    Ok(SolveReport {
        outcome,
        norm: kind,
        iterations,
        initial_error_norm: initial,
        final_error_norm: monitor.current,
        asymptotic_factor: asymptotic_factor(&monitor.reductions),
        per_cycle_reduction: monitor.reductions,
        stats,
        wall_time_ms: start.elapsed_ms(),
    })
}

/// `sqrt(v^T A v)`.
pub fn energy_norm(op: &Stencil9, v: &GridFunction) -> f64 {
    dot(v, &apply(op, v)).expect("same dims").max(0.0).sqrt()
}
