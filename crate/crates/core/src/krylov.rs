//! Conjugate gradients preconditioned by one multigrid cycle per
//! iteration.

use crate::clock::Stopwatch;

use serde::{Deserialize, Serialize};

use crate::cycle::{
    asymptotic_factor, measure, problem_setup, ConvergenceMonitor, CycleConfig, CycleShape,
    CycleStats, Multigrid, NormKind, SolveOutcome, SolveReport, Workspace,
};
use crate::error::{MgError, Result};
use crate::mesh::{dot, GridFunction};
use crate::operator::{apply_into, residual_into, ProblemSpec, Stencil9};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcgConfig {
    /// Preconditioning cycle.
    pub cycle: CycleConfig,
    pub target_reduction: f64,
    pub max_iterations: usize,
}

/// `z <- M^-1 r`.
pub trait Preconditioner {
    fn apply(&mut self, r: &GridFunction, z: &mut GridFunction, stats: &mut CycleStats) -> Result<()>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&mut self, r: &GridFunction, z: &mut GridFunction, _: &mut CycleStats) -> Result<()> {
        z.copy_from(r)
    }
}

/// One multigrid cycle from a zero initial guess.
pub struct CyclePreconditioner<'a> {
    mg: &'a Multigrid,
    ws: Workspace,
    shape: CycleShape,
}

impl<'a> CyclePreconditioner<'a> {
    pub fn new(mg: &'a Multigrid, shape: CycleShape) -> Self {
        Self {
            mg,
            ws: mg.workspace(),
            shape,
        }
    }
}

impl Preconditioner for CyclePreconditioner<'_> {
    fn apply(&mut self, r: &GridFunction, z: &mut GridFunction, stats: &mut CycleStats) -> Result<()> {
        self.ws.set_rhs(r)?;
        self.ws.solution_mut().fill_zero();
        self.mg.run_cycle(&mut self.ws, self.shape, stats)?;
        z.copy_from(self.ws.solution())
    }
}

/// Preconditioned CG on `A x = f` from `x0`. The loop stops when the
/// chosen norm has dropped by `target_reduction`, on breakdown
/// (nonpositive `<r, M^-1 r>` or `<p, A p>`), on divergence or after
/// `max_iterations`.
#[allow(clippy::too_many_arguments)]
pub fn pcg<P: Preconditioner>(
    op: &Stencil9,
    f: &GridFunction,
    x0: &GridFunction,
    precond: &mut P,
    kind: NormKind,
    target_reduction: f64,
    max_iterations: usize,
    levels: usize,
) -> Result<SolveReport> {
    if !(target_reduction > 1.0) {
        return Err(MgError::InvalidParameter(format!(
            "target reduction must exceed 1, got {target_reduction}"
        )));
    }
    let start = Stopwatch::start();
    let (nx, ny) = f.dims();
    let mut x = x0.clone();
    let mut r = GridFunction::zeros(nx, ny);
    let mut z = GridFunction::zeros(nx, ny);
    let mut ap = GridFunction::zeros(nx, ny);
    let mut tmp = GridFunction::zeros(nx, ny);
    let mut stats = CycleStats::new(levels);

    residual_into(op, &x, f, &mut r)?;
    let initial = measure(kind, op, &x, f, &mut tmp)?;
    let mut monitor = ConvergenceMonitor::new(initial, target_reduction);
    let mut iterations = 0;
    let mut outcome = SolveOutcome::MaxIterations;

    if monitor.converged() {
        outcome = SolveOutcome::Converged;
    } else {
        precond.apply(&r, &mut z, &mut stats)?;
        let mut p = z.clone();
        let mut rz = dot(&r, &z)?;
        while iterations < max_iterations {
            if !(rz > 0.0) {
                outcome = SolveOutcome::Breakdown;
                break;
            }
            apply_into(op, &p, &mut ap)?;
            let pap = dot(&p, &ap)?;
            if !(pap > 0.0) {
                outcome = SolveOutcome::Breakdown;
                break;
            }
            let step = rz / pap;
            x.axpy(step, &p)?;
            r.axpy(-step, &ap)?;
            iterations += 1;

            let norm = match kind {
                NormKind::Error => crate::mesh::norm2(&x),
                NormKind::Residual => crate::mesh::norm2(&r),
            };
            if let Some(o) = monitor.record(norm) {
                outcome = o;
                break;
            }

            precond.apply(&r, &mut z, &mut stats)?;
            let rz_next = dot(&r, &z)?;
            let beta = rz_next / rz;
            rz = rz_next;
            for (pv, zv) in p.values_mut().iter_mut().zip(z.values()) {
                *pv = zv + beta * *pv;
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

/// MGCG on an existing hierarchy, one `kappa`-cycle per iteration.
pub fn pcg_solve(
    mg: &Multigrid,
    f: &GridFunction,
    x0: &GridFunction,
    kind: NormKind,
    config: &PcgConfig,
) -> Result<SolveReport> {
    let mut precond = CyclePreconditioner::new(mg, CycleShape::Kappa(config.cycle.kappa));
    pcg(
        mg.finest_operator(),
        f,
        x0,
        &mut precond,
        kind,
        config.target_reduction,
        config.max_iterations,
        mg.hierarchy().n,
    )
}

/// Builds the hierarchy for `problem` and runs MGCG from its initial guess.
pub fn solve_pcg(problem: &ProblemSpec, config: &PcgConfig) -> Result<SolveReport> {
    let mg = Multigrid::new(problem.stencil()?, &config.cycle)?;
    let (f, x0, kind) = problem_setup(problem, &mg);
    pcg_solve(&mg, &f, &x0, kind, config)
}
