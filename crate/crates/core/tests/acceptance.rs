//! Acceptance suite: one numbered check per exit criterion, run in order,
//! one PASS/FAIL line each. Exits nonzero if any check fails.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kcycle_core::bench::bench_sweep;
use kcycle_core::costmodel::{
    coarse_counter_histogram, fit_params, level_calls, n_gpu_calls, n_ops_model, predict_runtime,
    total_calls, turning_point, CostModelParams, Kappa, Observation, OpCountSpec,
};
use kcycle_core::cycle::{dry_run, random_grid, solve_standalone, CycleConfig, CycleShape, CycleStats, Multigrid};
use kcycle_core::krylov::{solve_pcg, PcgConfig};
use kcycle_core::mesh::{dot, Coarsening, GridFunction};
use kcycle_core::operator::{apply, galerkin_coarsen, rotated_anisotropic_stencil, ProblemSpec};
use kcycle_core::smoother::{thomas_solve, SmootherKind, SmootherSpec, TridiagonalSystem};
use kcycle_core::transfer::{prolong, restrict};
use kcycle_core::SolveOutcome;

use common::*;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

const PAPER_ALPHA: f64 = 2.48e-3;
const PAPER_BETA: f64 = 1.18e-6;

fn c01_combinatorics() -> Check {
    let mut kappas: Vec<Kappa> = (1..=8).map(Kappa::Finite).collect();
    kappas.push(Kappa::Infinite);
    let mut cells = 0;
    for &kappa in &kappas {
        for n in 1..=14u32 {
            let stats = dry_run(n as usize, CycleShape::Kappa(kappa), 2, 2, false).map_err(|e| e.to_string())?;
            for level in 1..=n {
                let expected = level_calls(kappa, level).unwrap();
                let got = stats.visits[level as usize - 1] as u128;
                ensure!(got == expected, "kappa={kappa} n={n} level={level}: visits {got} != {expected}");
            }
            let total = total_calls(kappa, n).unwrap();
            ensure!(
                stats.total_visits() as u128 == total,
                "kappa={kappa} n={n}: total {} != {total}",
                stats.total_visits()
            );
            cells += 1;
        }
    }
    Ok(format!("{cells} (kappa, n) cells exact"))
}

fn bits(g: &GridFunction) -> Vec<u64> {
    g.values().iter().map(|v| v.to_bits()).collect()
}

fn c02_equivalences() -> Check {
    let n = 5;
    let op = rotated_anisotropic_stencil(0.1, 30.0);
    let mg = Multigrid::new(op, &CycleConfig::new(n, Kappa::Finite(1))).map_err(|e| e.to_string())?;
    let (nx, ny) = mg.hierarchy().finest();
    let v = random_grid(nx, ny, 11);
    let f = random_grid(nx, ny, 12);
    let run = |shape: CycleShape| {
        let mut stats = CycleStats::with_trace(n);
        let out = mg.cycle(&v, &f, shape, &mut stats).unwrap();
        (out, stats.trace)
    };

    let (a, ta) = run(CycleShape::Kappa(Kappa::Finite(1)));
    let (b, tb) = run(CycleShape::Gamma(1));
    ensure!(ta == tb, "kappa=1 trace differs from gamma=1");
    ensure!(bits(&a) == bits(&b), "kappa=1 output differs from gamma=1");

    let (a, ta) = run(CycleShape::Kappa(Kappa::Finite(2)));
    let (b, tb) = run(CycleShape::F);
    ensure!(ta == tb, "kappa=2 trace differs from F-cycle");
    ensure!(bits(&a) == bits(&b), "kappa=2 output differs from F-cycle");

    let (w, tw) = run(CycleShape::Gamma(2));
    let w_levels: Vec<u32> = tw.iter().map(|e| e.level).collect();
    for kappa in [Kappa::Finite(5), Kappa::Finite(7), Kappa::Infinite] {
        let (a, ta) = run(CycleShape::Kappa(kappa));
        let levels: Vec<u32> = ta.iter().map(|e| e.level).collect();
        ensure!(levels == w_levels, "kappa={kappa} level sequence differs from W-cycle");
        ensure!(bits(&a) == bits(&w), "kappa={kappa} output differs from W-cycle");
    }
    Ok(format!("V, F and W equivalences hold bitwise on {nx}x{ny}"))
}

fn c03_histogram() -> Check {
    let mut cells = 0;
    for kappa in 1..=6u32 {
        for n in 1..=10u32 {
            let mut brute: BTreeMap<u32, u128> = BTreeMap::new();
            for (level, counter) in kappa_trace(n, kappa) {
                if level == n {
                    *brute.entry(counter).or_default() += 1;
                }
            }
            let mut formula = BTreeMap::new();
            for j in 0..=(kappa - 1).min(n - 1) {
                let mut binom: u128 = 1;
                for i in 0..j {
                    binom = binom * (n - 1 - i) as u128 / (i + 1) as u128;
                }
                formula.insert(kappa - j, binom);
            }
            ensure!(brute == formula, "kappa={kappa} n={n}: {brute:?} != {formula:?}");
            let api = coarse_counter_histogram(Kappa::Finite(kappa), n).unwrap();
            ensure!(api == formula, "kappa={kappa} n={n}: histogram {api:?} != {formula:?}");

            let stats = dry_run(n as usize, CycleShape::Kappa(Kappa::Finite(kappa)), 1, 1, true).unwrap();
            let mut traced: BTreeMap<u32, u128> = BTreeMap::new();
            for e in stats.trace.iter().filter(|e| e.level == n) {
                *traced.entry(e.counter).or_default() += 1;
            }
            ensure!(traced == formula, "kappa={kappa} n={n}: instrumented {traced:?} != {formula:?}");
            cells += 1;
        }
    }
    Ok(format!("{cells} cells exact"))
}

fn c04_op_counts() -> Check {
    let specs = [
        OpCountSpec::default(),
        OpCountSpec {
            c_fine: 1.3,
            c_coarsest: 7.5,
            n_coarsest: 3.0,
        },
    ];
    let mut worst: f64 = 0.0;
    for spec in specs {
        for c in [0.2, 0.25, 0.3, 0.5, 0.6] {
            for kappa in 1..=6u32 {
                for n in 1..=12u32 {
                    let model = n_ops_model(Kappa::Finite(kappa), c, n, &spec).map_err(|e| e.to_string())?;
                    let brute = brute_force_ops(kappa, c, n, spec.c_fine, spec.c_coarsest, spec.n_coarsest);
                    let err = rel_err(model, brute);
                    worst = worst.max(err);
                    ensure!(err <= 1e-12, "kappa={kappa} c={c} n={n}: {model} vs {brute} (rel {err:e})");
                }
            }
        }
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn c05_launches() -> Check {
    let mut cells = 0;
    for kappa in KAPPAS {
        for n in 1..=12u32 {
            for nu in [2usize, 4] {
                for (nu1, nu2) in [(nu / 2, nu / 2), (nu, 0)] {
                    let stats = dry_run(n as usize, CycleShape::Kappa(kappa), nu1, nu2, false).unwrap();
                    let t_n = total_calls(kappa, n).unwrap();
                    let t_prev = total_calls(kappa, n - 1).unwrap();
                    let expected = (5 + nu as u128) * t_prev + t_n - t_prev;
                    ensure!(
                        stats.kernel_launches as u128 == expected,
                        "kappa={kappa} n={n} nu=({nu1},{nu2}): {} != {expected}",
                        stats.kernel_launches
                    );
                    ensure!(n_gpu_calls(kappa, n, nu as u32).unwrap() == expected, "n_gpu_calls mismatch");
                    cells += 1;
                }
            }
        }
    }
    Ok(format!("{cells} configurations exact"))
}

fn c06_turning_points() -> Check {
    let params = CostModelParams::new(PAPER_ALPHA, PAPER_BETA, 4);
    let targets = [
        (Kappa::Finite(1), 8.2, 0.4),
        (Kappa::Finite(2), 9.1, 0.4),
        (Kappa::Finite(3), 10.0, 0.4),
        (Kappa::Infinite, 12.4, 0.3),
    ];
    let mut report = Vec::new();
    for (kappa, want, tol) in targets {
        let tp = turning_point(&params, kappa).map_err(|e| e.to_string())?;
        ensure!(
            (tp.n_tp - want).abs() <= tol,
            "kappa={kappa}: n_tp {:.3} outside {want}+-{tol}",
            tp.n_tp
        );
        report.push(format!("{kappa}:{:.2}", tp.n_tp));
    }
    let mut prev = f64::NEG_INFINITY;
    for kappa in KAPPAS {
        let tp = turning_point(&params, kappa).unwrap().n_tp;
        ensure!(tp > prev, "turning point not increasing at kappa={kappa}");
        prev = tp;
    }
    Ok(report.join(" "))
}

fn paper_grid() -> Vec<(Kappa, u32)> {
    KAPPAS
        .iter()
        .flat_map(|&k| (4..=13).map(move |n| (k, n)))
        .collect()
}

fn c07_fit_roundtrip() -> Check {
    let params = CostModelParams::new(PAPER_ALPHA, PAPER_BETA, 4);
    let exact: Vec<Observation> = paper_grid()
        .into_iter()
        .map(|(kappa, levels)| Observation {
            kappa,
            levels,
            ms: predict_runtime(&params, kappa, levels).unwrap(),
        })
        .collect();
    let (a, b) = fit_params(&exact, 4, 0.25).map_err(|e| e.to_string())?;
    ensure!(rel_err(a, PAPER_ALPHA) <= 1e-9, "exact alpha {a:e}");
    ensure!(rel_err(b, PAPER_BETA) <= 1e-9, "exact beta {b:e}");

    let mut worst: f64 = 0.0;
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let noisy: Vec<Observation> = exact
            .iter()
            .map(|o| {
                // Box-Muller
                let u1: f64 = 1.0 - rng.gen::<f64>();
                let u2: f64 = rng.gen();
                let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
                Observation {
                    ms: o.ms * (1.0 + 0.05 * z),
                    ..*o
                }
            })
            .collect();
        let (a, b) = fit_params(&noisy, 4, 0.25).map_err(|e| e.to_string())?;
        let err = rel_err(a, PAPER_ALPHA).max(rel_err(b, PAPER_BETA));
        worst = worst.max(err);
        ensure!(err <= 0.10, "trial {trial}: alpha {a:e} beta {b:e} (rel {err:.3})");
    }
    Ok(format!("exact recovery; worst noisy relative error {:.1}%", worst * 100.0))
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn c08_linear_algebra() -> Check {
    let stencils = [
        rotated_anisotropic_stencil(1.0, 0.0),
        rotated_anisotropic_stencil(1e-2, 30.0),
        rotated_anisotropic_stencil(1e-4, 45.0),
        rotated_anisotropic_stencil(0.3, 117.0),
    ];
    let kinds = [Coarsening::FullStandard, Coarsening::SemiY];

    for (seed, kind) in kinds.into_iter().enumerate() {
        let (cnx, cny) = (6, 5);
        let (fnx, fny) = match kind {
            Coarsening::FullStandard => (13, 11),
            Coarsening::SemiY => (6, 11),
        };
        let uf = random_grid(fnx, fny, 40 + seed as u64);
        let vc = random_grid(cnx, cny, 50 + seed as u64);
        let scale = match kind {
            Coarsening::FullStandard => 0.25,
            Coarsening::SemiY => 0.5,
        };
        let lhs = dot(&restrict(&uf, kind).unwrap(), &vc).unwrap();
        let rhs = scale * dot(&uf, &prolong(&vc, kind).unwrap()).unwrap();
        ensure!(rel_err(lhs, rhs) <= 1e-13, "{kind:?} adjointness {lhs} vs {rhs}");
    }

    for op in &stencils {
        let scale = max_abs(op.w.iter().flatten().copied());
        ensure!(op.sum().abs() <= 1e-13 * scale, "row sum {:e}", op.sum());
        ensure!(op.centro_asymmetry() <= 1e-13 * scale, "centro-asymmetry");
        for kind in kinds {
            let coarse = galerkin_coarsen(op, kind);
            let cs = max_abs(coarse.w.iter().flatten().copied());
            ensure!(coarse.sum().abs() <= 1e-13 * cs, "{kind:?} Galerkin row sum {:e}", coarse.sum());
            ensure!(coarse.centro_asymmetry() <= 1e-13 * cs, "{kind:?} Galerkin centro-asymmetry");

            let (cnx, cny) = (5, 4);
            let (rap, _, _) = dense_rap(op, kind, cnx, cny);
            let stencil_matrix = dense_operator(&coarse, cnx, cny);
            let diff = rap
                .iter()
                .flatten()
                .zip(stencil_matrix.iter().flatten())
                .map(|(a, b)| a - b);
            let d = max_abs(diff);
            ensure!(d <= 1e-13 * cs, "{kind:?} Galerkin vs dense RAP differ by {d:e}");
        }

        let u = random_grid(9, 7, 3);
        let v = random_grid(9, 7, 4);
        let a = dot(&apply(op, &u), &v).unwrap();
        let b = dot(&u, &apply(op, &v)).unwrap();
        ensure!(rel_err(a, b) <= 1e-13, "operator symmetry {a} vs {b}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for m in [1usize, 2, 5, 17, 40] {
        let lower: Vec<f64> = (0..m).map(|i| if i == 0 { 0.0 } else { -rng.gen::<f64>() }).collect();
        let upper: Vec<f64> = (0..m).map(|i| if i + 1 == m { 0.0 } else { -rng.gen::<f64>() }).collect();
        let diag: Vec<f64> = (0..m).map(|i| 2.0 + lower[i].abs() + upper[i].abs() + rng.gen::<f64>()).collect();
        let rhs: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mut dense = vec![vec![0.0; m]; m];
        for i in 0..m {
            dense[i][i] = diag[i];
            if i > 0 {
                dense[i][i - 1] = lower[i];
            }
            if i + 1 < m {
                dense[i][i + 1] = upper[i];
            }
        }
        let oracle = dense_solve(dense, rhs.clone());
        let x = thomas_solve(&TridiagonalSystem { lower, diag, upper, rhs }).map_err(|e| e.to_string())?;
        let d = max_abs(x.iter().zip(&oracle).map(|(a, b)| a - b));
        let s = max_abs(oracle.iter().copied());
        ensure!(d <= 1e-12 * s.max(1.0), "Thomas m={m} differs by {d:e}");
    }
    Ok("transfers, Galerkin, stencils, symmetry and Thomas within tolerance".into())
}

fn c09_poisson() -> Check {
    let problem = ProblemSpec::new(1.0, 0.0);
    let n = 8;
    let config = CycleConfig::new(n, Kappa::Finite(1));
    let report = solve_standalone(&problem, &config, 1e8, 100).map_err(|e| e.to_string())?;
    ensure!(report.outcome == SolveOutcome::Converged, "V-cycle outcome {:?}", report.outcome);
    ensure!(report.iterations <= 25, "V-cycle needed {} cycles", report.iterations);
    ensure!(report.asymptotic_factor < 0.45, "asymptotic factor {:.3}", report.asymptotic_factor);

    let kappas = [Kappa::Finite(1), Kappa::Finite(2), Kappa::Finite(3), Kappa::Finite(4)];
    let mut cycles = Vec::new();
    for &kappa in &kappas {
        let r = solve_standalone(&problem, &CycleConfig { kappa, ..config }, 1e8, 100).map_err(|e| e.to_string())?;
        ensure!(r.outcome == SolveOutcome::Converged, "kappa={kappa} did not converge");
        cycles.push(r.iterations);
    }

    let mut sweep_kappas = kappas.to_vec();
    sweep_kappas.push(Kappa::Infinite);
    let rows = bench_sweep(&problem, &config, &sweep_kappas, &[5, 6, 7, 8], 10, None).map_err(|e| e.to_string())?;
    let obs: Vec<Observation> = rows.iter().filter_map(|r| r.observation()).collect();
    let (alpha, beta) = fit_params(&obs, 4, 0.25).map_err(|e| e.to_string())?;
    let params = CostModelParams::new(alpha, beta, 4);
    let totals: Vec<f64> = kappas
        .iter()
        .zip(&cycles)
        .map(|(&k, &c)| c as f64 * predict_runtime(&params, k, n as u32).unwrap())
        .collect();
    let best = totals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| kappas[i])
        .unwrap();
    ensure!(best == Kappa::Finite(1), "predicted total time minimized at kappa={best}: {totals:?}");
    Ok(format!(
        "{} cycles, factor {:.3}; cycles {cycles:?}, predicted totals {:?} ms",
        report.iterations,
        report.asymptotic_factor,
        totals.iter().map(|t| format!("{t:.1}")).collect::<Vec<_>>()
    ))
}

fn hard_problem_cycles(pcg: bool, kappas: &[Kappa]) -> Result<Vec<usize>, String> {
    let problem = ProblemSpec::new(1e-4, 45.0);
    let mut out = Vec::new();
    for &kappa in kappas {
        let config = CycleConfig::new(9, kappa);
        let report = if pcg {
            solve_pcg(
                &problem,
                &PcgConfig {
                    cycle: config,
                    target_reduction: 1e8,
                    max_iterations: 2000,
                },
            )
        } else {
            solve_standalone(&problem, &config, 1e8, 5000)
        }
        .map_err(|e| e.to_string())?;
        if report.outcome != SolveOutcome::Converged {
            return Err(format!("kappa={kappa} pcg={pcg}: {:?} after {}", report.outcome, report.iterations));
        }
        out.push(report.iterations);
    }
    Ok(out)
}

fn c10_anisotropy_ordering() -> Check {
    let c = hard_problem_cycles(false, &KAPPAS)?;
    ensure!(
        c[0] > c[1] && c[1] > c[2] && c[2] >= c[3] && c[3] >= c[4],
        "ordering violated: {c:?}"
    );
    let ratio = c[0] as f64 / c[4] as f64;
    ensure!(ratio >= 2.0, "V/W cycle ratio {ratio:.2}");
    Ok(format!("cycles {c:?}, V/W ratio {ratio:.2}"))
}

fn c11_mgcg() -> Check {
    let kappas = &KAPPAS[..3];
    let standalone = hard_problem_cycles(false, kappas)?;
    let pcg = hard_problem_cycles(true, kappas)?;
    for i in 0..3 {
        ensure!(pcg[i] < standalone[i], "kappa={}: MGCG {} >= stand-alone {}", kappas[i], pcg[i], standalone[i]);
    }
    ensure!(pcg.windows(2).all(|w| w[1] <= w[0]), "MGCG iterations increase: {pcg:?}");
    Ok(format!("MGCG {pcg:?} vs stand-alone {standalone:?}"))
}

fn c12_zebra() -> Check {
    let kappas = &KAPPAS[1..];
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for phi in [10.0, 45.0] {
        let problem = ProblemSpec::new(1e-5, phi);
        let mut cycles = Vec::new();
        for &kappa in kappas {
            let mut config = CycleConfig::new(8, kappa);
            config.smoother = SmootherSpec::zebra(SmootherKind::ZebraAlternating);
            let r = solve_standalone(&problem, &config, 1e8, 2000).map_err(|e| e.to_string())?;
            if r.outcome != SolveOutcome::Converged {
                failures.push(format!("phi={phi} kappa={kappa}: {:?}", r.outcome));
            }
            cycles.push(r.iterations);
        }
        if !(cycles[0] > cycles[1] && cycles[1] > cycles[2]) {
            failures.push(format!("phi={phi}: cycles not strictly decreasing for kappa 2..4: {cycles:?}"));
        }
        lines.push(format!("phi={phi}: {cycles:?}"));
    }
    ensure!(failures.is_empty(), "{}; all {}", failures.join("; "), lines.join(", "));
    Ok(lines.join(", "))
}

fn c13_semi_coarsening() -> Check {
    let spec = OpCountSpec::default();
    let ns: Vec<u32> = (2..=20).collect();
    let ratio = |kappa: Kappa, n: u32| {
        let n_fine = 0.5f64.powi(1 - n as i32) * spec.n_coarsest;
        n_ops_model(kappa, 0.5, n, &spec).map(|ops| ops / n_fine)
    };
    let ys: Vec<f64> = ns.iter().map(|&n| ratio(Kappa::Infinite, n)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let m = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let icept = (sy - slope * sx) / m;
    let resid = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((slope * x + icept) - y).abs() / y.abs())
        .fold(0.0, f64::max);
    ensure!(slope > 0.0, "no growth: slope {slope}");
    ensure!(resid < 0.10, "affine fit residual {resid:.3}");

    let mut worst: f64 = 0.0;
    for k in 1..=6u32 {
        let r = ratio(Kappa::Finite(k), 20).map_err(|e| e.to_string())?;
        let err = rel_err(r, 2.0 * k as f64 * spec.c_fine);
        worst = worst.max(err);
        ensure!(err <= 0.05, "kappa={k}: ratio {r:.4} vs {}", 2 * k);
    }
    Ok(format!(
        "W slope {slope:.3}/level, fit residual {:.1e}; fixed kappa within {:.2}% of 2 kappa at n=20",
        resid,
        worst * 100.0
    ))
}

fn c14_runtime_model() -> Check {
    let problem = ProblemSpec::new(1.0, 0.0);
    let base = CycleConfig::new(6, Kappa::Finite(1));
    let levels: Vec<usize> = (6..=10).collect();
    let train = bench_sweep(
        &problem,
        &base,
        &[Kappa::Finite(1), Kappa::Finite(2), Kappa::Infinite],
        &levels,
        20,
        None,
    )
    .map_err(|e| e.to_string())?;
    let obs: Vec<Observation> = train.iter().filter_map(|r| r.observation()).collect();
    let (alpha, beta) = fit_params(&obs, 4, 0.25).map_err(|e| e.to_string())?;
    let params = CostModelParams::new(alpha, beta, 4);

    let test = bench_sweep(&problem, &base, &[Kappa::Finite(3), Kappa::Finite(4)], &levels, 20, None)
        .map_err(|e| e.to_string())?;
    let mut errors: Vec<f64> = test
        .iter()
        .map(|r| {
            let predicted = predict_runtime(&params, r.kappa, r.levels).unwrap();
            rel_err(predicted, r.mean_ms.unwrap())
        })
        .collect();
    errors.sort_by(f64::total_cmp);
    let median = (errors[errors.len() / 2 - 1] + errors[errors.len() / 2]) / 2.0;
    ensure!(
        median <= 0.25,
        "median relative error {:.1}% (alpha {alpha:.3e}, beta {beta:.3e})",
        median * 100.0
    );
    Ok(format!(
        "alpha {alpha:.3e} ms, beta {beta:.3e} ms; median error {:.1}%",
        median * 100.0
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 14] = [
        ("combinatorics exactness", c01_combinatorics),
        ("V/F/W equivalences", c02_equivalences),
        ("coarse-counter histogram", c03_histogram),
        ("operation-count formula", c04_op_counts),
        ("kernel-launch identity", c05_launches),
        ("turning points", c06_turning_points),
        ("fit roundtrip", c07_fit_roundtrip),
        ("linear-algebra invariants", c08_linear_algebra),
        ("Poisson convergence", c09_poisson),
        ("hard-anisotropy ordering", c10_anisotropy_ordering),
        ("MGCG dominance", c11_mgcg),
        ("zebra/Galerkin robustness", c12_zebra),
        ("semi-coarsening superlinearity", c13_semi_coarsening),
        ("run-time model sanity", c14_runtime_model),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
