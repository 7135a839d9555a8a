//! Per-cycle timing sweeps over cycle counters and level counts.

use crate::clock::Stopwatch;

use serde::{Deserialize, Serialize};

use crate::costmodel::{Kappa, Observation};
use crate::cycle::{
    problem_setup, run_shape, solve_with, CycleConfig, CycleShape, CycleStats, DryBackend,
    Multigrid, SolveOutcome,
};
use crate::error::Result;
use crate::mesh::build_hierarchy;
use crate::operator::ProblemSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub kappa: Kappa,
    pub levels: u32,
    /// Mean wall time of one cycle; `None` for dry runs.
    pub mean_ms: Option<f64>,
    pub launches: u64,
    pub op_units: f64,
    /// Cycles to reach the target reduction; `None` unless requested or
    /// if the solve did not converge.
    pub cycles_to_target: Option<usize>,
}

impl BenchRow {
    pub fn observation(&self) -> Option<Observation> {
        self.mean_ms.map(|ms| Observation {
            kappa: self.kappa,
            levels: self.levels,
            ms,
        })
    }
}

/// Optional convergence run attached to each bench cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergeSpec {
    pub target_reduction: f64,
    pub max_cycles: usize,
}

/// Times `repetitions` single cycles on fixed random data. With zero
/// repetitions only the counts are produced, without allocating grids.
pub fn bench_cell(
    problem: &ProblemSpec,
    config: &CycleConfig,
    repetitions: usize,
    converge: Option<ConvergeSpec>,
) -> Result<BenchRow> {
    config.validate()?;
    let shape = CycleShape::Kappa(config.kappa);
    let hierarchy = build_hierarchy(config.n, config.coarsening)?;
    let mut counts = CycleStats::new(config.n);
    run_shape(
        &mut DryBackend::from_hierarchy(&hierarchy, config.nu1, config.nu2),
        shape,
        &mut counts,
    )?;

    let needs_grids = repetitions > 0 || converge.is_some();
    let mg = if needs_grids {
        Some(Multigrid::new(problem.stencil()?, config)?)
    } else {
        None
    };

    let mean_ms = match (&mg, repetitions) {
        (Some(mg), reps) if reps > 0 => {
            let (f, v0, _) = problem_setup(problem, mg);
            let mut ws = mg.workspace();
            ws.set_rhs(&f)?;
            ws.set_solution(&v0)?;
            let mut scratch = CycleStats::new(config.n);
            // warm-up
            mg.run_cycle(&mut ws, shape, &mut scratch)?;
            let mut total = 0.0;
            for _ in 0..reps {
                ws.set_solution(&v0)?;
                let t = Stopwatch::start();
                mg.run_cycle(&mut ws, shape, &mut scratch)?;
                total += t.elapsed_ms();
            }
            Some(total / reps as f64)
        }
        _ => None,
    };

    let cycles_to_target = match (&mg, converge) {
        (Some(mg), Some(spec)) => {
            let (f, v0, kind) = problem_setup(problem, mg);
            let report = solve_with(mg, &f, &v0, kind, shape, spec.target_reduction, spec.max_cycles)?;
            (report.outcome == SolveOutcome::Converged).then_some(report.iterations)
        }
        _ => None,
    };

    Ok(BenchRow {
        kappa: config.kappa,
        levels: config.n as u32,
        mean_ms,
        launches: counts.kernel_launches,
        op_units: counts.unknown_touches,
        cycles_to_target,
    })
}

/// Runs [`bench_cell`] for every `(kappa, levels)` pair, kappa-major, in
/// the given order.
pub fn bench_sweep(
    problem: &ProblemSpec,
    base: &CycleConfig,
    kappas: &[Kappa],
    levels: &[usize],
    repetitions: usize,
    converge: Option<ConvergeSpec>,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(kappas.len() * levels.len());
    for &kappa in kappas {
        for &n in levels {
            let config = CycleConfig { kappa, n, ..*base };
            rows.push(bench_cell(problem, &config, repetitions, converge)?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::n_gpu_calls;

    #[test]
    fn dry_sweep_counts_match_formula() {
        let problem = ProblemSpec::new(1.0, 0.0);
        let base = CycleConfig::new(4, Kappa::Finite(1));
        let rows = bench_sweep(
            &problem,
            &base,
            &[Kappa::Finite(1), Kappa::Finite(2)],
            &[4, 5],
            0,
            None,
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!(row.mean_ms.is_none());
            assert_eq!(row.launches as u128, n_gpu_calls(row.kappa, row.levels, 4).unwrap());
        }
    }

    #[test]
    fn timed_cell_reports_a_mean() {
        let problem = ProblemSpec::new(1.0, 0.0);
        let config = CycleConfig::new(4, Kappa::Finite(2));
        let row = bench_cell(
            &problem,
            &config,
            2,
            Some(ConvergeSpec {
                target_reduction: 1e6,
                max_cycles: 50,
            }),
        )
        .unwrap();
        assert!(row.mean_ms.unwrap() >= 0.0);
        assert!(row.cycles_to_target.is_some());
    }
}
