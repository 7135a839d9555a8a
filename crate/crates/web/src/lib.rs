//! WebAssembly bindings behind `www/index.html`. Each export returns a
//! JSON string; the `*_json` functions are the same entry points for
//! native callers.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use kcycle_core::costmodel::{
    level_calls, predict_components, total_calls, turning_point, CostModelParams, Kappa, TurningStatus,
};
use kcycle_core::cycle::{dry_run, problem_setup, solve_with, CycleConfig, CycleShape, Multigrid};
use kcycle_core::smoother::{SmootherKind, SmootherSpec};
use kcycle_core::ProblemSpec;

/// Largest hierarchy the page will solve on.
pub const MAX_SOLVE_LEVELS: u32 = 7;
/// Largest hierarchy whose full call trace is returned.
pub const MAX_TRACE_LEVELS: u32 = 10;

const MODEL_KAPPAS: [Kappa; 5] = [
    Kappa::Finite(1),
    Kappa::Finite(2),
    Kappa::Finite(3),
    Kappa::Finite(4),
    Kappa::Infinite,
];

// 0 means infinite from JS.
fn kappa_from_js(k: u32) -> Kappa {
    if k == 0 {
        Kappa::Infinite
    } else {
        Kappa::Finite(k)
    }
}

#[derive(Serialize)]
struct CallTree {
    kappa: Kappa,
    levels: u32,
    level_calls: Vec<u64>,
    total_calls: u64,
    /// `[level, counter]` per routine entry in call order.
    trace: Vec<[u32; 2]>,
}

pub fn call_tree_json(kappa: u32, levels: u32) -> Result<String, String> {
    if !(1..=MAX_TRACE_LEVELS).contains(&levels) {
        return Err(format!("levels must be in 1..={MAX_TRACE_LEVELS}"));
    }
    let kappa = kappa_from_js(kappa);
    let stats = dry_run(levels as usize, CycleShape::Kappa(kappa), 1, 1, true).map_err(|e| e.to_string())?;
    let tree = CallTree {
        kappa,
        levels,
        level_calls: (1..=levels)
            .map(|l| level_calls(kappa, l).map(|c| c as u64))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?,
        total_calls: total_calls(kappa, levels).map_err(|e| e.to_string())? as u64,
        trace: stats.trace.iter().map(|e| [e.level, e.counter]).collect(),
    };
    serde_json::to_string(&tree).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ModelCurve {
    kappa: Kappa,
    levels: Vec<u32>,
    launch_ms: Vec<f64>,
    op_ms: Vec<f64>,
    n_tp: Option<f64>,
}

pub fn model_curves_json(alpha: f64, beta: f64, nu: u32, max_levels: u32) -> Result<String, String> {
    if !(alpha >= 0.0 && beta > 0.0) {
        return Err("need alpha >= 0 and beta > 0".into());
    }
    if !(2..=20).contains(&max_levels) {
        return Err("max_levels must be in 2..=20".into());
    }
    let params = CostModelParams::new(alpha, beta, nu);
    let mut curves = Vec::new();
    for kappa in MODEL_KAPPAS {
        let levels: Vec<u32> = (1..=max_levels).collect();
        let mut launch_ms = Vec::new();
        let mut op_ms = Vec::new();
        for &n in &levels {
            let (l, o) = predict_components(&params, kappa, n).map_err(|e| e.to_string())?;
            launch_ms.push(l);
            op_ms.push(o);
        }
        let tp = turning_point(&params, kappa).map_err(|e| e.to_string())?;
        curves.push(ModelCurve {
            kappa,
            levels,
            launch_ms,
            op_ms,
            n_tp: (tp.status != TurningStatus::ZeroOverhead).then_some(tp.n_tp),
        });
    }
    serde_json::to_string(&curves).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct SolveHistory {
    outcome: String,
    iterations: usize,
    /// Stopping norm after each cycle, starting with the initial norm.
    norms: Vec<f64>,
    asymptotic_factor: f64,
    nx: usize,
    ny: usize,
    /// Final error field, row-major.
    error: Vec<f64>,
}

/// `smoother`: "jacobi" or "zebra-xy".
pub fn solve_history_json(
    levels: u32,
    kappa: u32,
    eps: f64,
    phi: f64,
    smoother: &str,
    max_cycles: u32,
) -> Result<String, String> {
    if !(2..=MAX_SOLVE_LEVELS).contains(&levels) {
        return Err(format!("levels must be in 2..={MAX_SOLVE_LEVELS}"));
    }
    let problem = ProblemSpec::new(eps, phi);
    let mut config = CycleConfig::new(levels as usize, kappa_from_js(kappa));
    config.smoother = match smoother {
        "jacobi" => SmootherSpec::default(),
        "zebra-xy" => SmootherSpec::zebra(SmootherKind::ZebraAlternating),
        other => return Err(format!("unknown smoother {other:?}")),
    };
    let mg = Multigrid::new(problem.stencil().map_err(|e| e.to_string())?, &config).map_err(|e| e.to_string())?;
    let (f, v0, kind) = problem_setup(&problem, &mg);
    let report = solve_with(&mg, &f, &v0, kind, CycleShape::Kappa(config.kappa), 1e8, max_cycles as usize)
        .map_err(|e| e.to_string())?;

    let mut norms = vec![report.initial_error_norm];
    for r in &report.per_cycle_reduction {
        let last = *norms.last().unwrap();
        norms.push(last * r);
    }
    // rerun to recover the final iterate for the heat map
    let mut ws = mg.workspace();
    ws.set_rhs(&f).map_err(|e| e.to_string())?;
    ws.set_solution(&v0).map_err(|e| e.to_string())?;
    let mut stats = kcycle_core::CycleStats::new(levels as usize);
    for _ in 0..report.iterations {
        mg.run_cycle(&mut ws, CycleShape::Kappa(config.kappa), &mut stats)
            .map_err(|e| e.to_string())?;
    }
    let (nx, ny) = mg.hierarchy().finest();
    let history = SolveHistory {
        outcome: format!("{:?}", report.outcome),
        iterations: report.iterations,
        norms,
        asymptotic_factor: report.asymptotic_factor,
        nx,
        ny,
        error: ws.solution().values().to_vec(),
    };
    serde_json::to_string(&history).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn call_tree(kappa: u32, levels: u32) -> Result<String, JsValue> {
    call_tree_json(kappa, levels).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn model_curves(alpha: f64, beta: f64, nu: u32, max_levels: u32) -> Result<String, JsValue> {
    model_curves_json(alpha, beta, nu, max_levels).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn solve_history(
    levels: u32,
    kappa: u32,
    eps: f64,
    phi: f64,
    smoother: &str,
    max_cycles: u32,
) -> Result<String, JsValue> {
    solve_history_json(levels, kappa, eps, phi, smoother, max_cycles).map_err(|e| JsValue::from_str(&e))
}
