//! Closed-form call and operation counts of the kappa-cycle, the linear
//! run-time model `T = alpha * launches + beta * ops`, its least-squares
//! fit and the turning point where both terms balance.
//!
//! Counts are exact integers in `u128`, which covers every level count up
//! to [`MAX_LEVELS`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MgError, Result};

/// Largest level count accepted by the exact integer formulas.
pub const MAX_LEVELS: u32 = 64;

/// Fixed-point iterations used by [`turning_point`].
pub const TURNING_POINT_ITERATIONS: usize = 20;

/// Step size (in levels) below which the turning-point iteration counts
/// as converged.
pub const TURNING_POINT_TOLERANCE: f64 = 1e-4;

/// Cycle counter. `Infinite` stands for any counter at least as large as
/// the level count, which makes the cycle a W-cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kappa {
    Finite(u32),
    Infinite,
}

impl Kappa {
    /// The finite counter that reproduces this cycle on `n` levels.
    pub fn effective(self, n: u32) -> u32 {
        match self {
            Kappa::Finite(k) => k,
            Kappa::Infinite => n,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Kappa::Infinite)
    }
}

impl From<u32> for Kappa {
    fn from(k: u32) -> Self {
        Kappa::Finite(k)
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::Finite(k) => write!(f, "{k}"),
            Kappa::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Kappa {
    type Err = MgError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Kappa::Infinite);
        }
        match t.parse::<u32>() {
            Ok(k) if k >= 1 => Ok(Kappa::Finite(k)),
            _ => Err(MgError::InvalidParameter(format!(
                "cycle counter must be a positive integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

impl Serialize for Kappa {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Kappa::Finite(k) => s.serialize_u32(*k),
            Kappa::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Kappa {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u32),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(k) => Ok(Kappa::Finite(k)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn check_levels(n: u32) -> Result<()> {
    if n > MAX_LEVELS {
        return Err(MgError::TooManyLevels(n));
    }
    Ok(())
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Routine calls on level `level` (1 = finest) in one cycle.
/// `level_calls(Finite(0), _) == 0`.
pub fn level_calls(kappa: Kappa, level: u32) -> Result<u128> {
    if level < 1 {
        return Err(MgError::InvalidLevels(level as usize));
    }
    check_levels(level)?;
    let upper = match kappa {
        Kappa::Finite(0) => return Ok(0),
        Kappa::Finite(k) => (k - 1).min(level - 1),
        Kappa::Infinite => level - 1,
    };
    Ok((0..=upper).map(|j| binomial(level - 1, j)).sum())
}

/// Routine calls over all `n` levels in one cycle; `total_calls(_, 0) == 0`.
pub fn total_calls(kappa: Kappa, n: u32) -> Result<u128> {
    check_levels(n)?;
    let upper = match kappa {
        Kappa::Finite(k) => k.min(n),
        Kappa::Infinite => n,
    };
    Ok((1..=upper).map(|j| binomial(n, j)).sum())
}

/// Multiset of counters seen by the coarsest level: counter `kappa - j`
/// occurs `C(n - 1, j)` times.
pub fn coarse_counter_histogram(kappa: Kappa, n: u32) -> Result<BTreeMap<u32, u128>> {
    if n < 1 {
        return Err(MgError::InvalidLevels(0));
    }
    check_levels(n)?;
    let k = kappa.effective(n);
    if k < 1 {
        return Err(MgError::InvalidParameter("cycle counter must be >= 1".into()));
    }
    let mut out = BTreeMap::new();
    for j in 0..=(k - 1).min(n - 1) {
        out.insert(k - j, binomial(n - 1, j));
    }
    Ok(out)
}

/// Per-unknown work factor of one cycle relative to one fine-level pass
/// for coarsening factor `c`.
pub fn f_factor(kappa: Kappa, c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(MgError::InvalidParameter(format!(
            "coarsening factor must lie in (0, 1), got {c}"
        )));
    }
    match kappa {
        Kappa::Infinite => {
            if c >= 0.5 {
                Err(MgError::UndefinedInfiniteFactor(c))
            } else {
                Ok(1.0 / (1.0 - 2.0 * c))
            }
        }
        Kappa::Finite(k) => {
            if c == 0.5 {
                Ok(2.0 * k as f64)
            } else {
                let q = c / (1.0 - c);
                Ok((1.0 - q.powi(k as i32)) / (1.0 - 2.0 * c))
            }
        }
    }
}

/// Work constants of the operation-count model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpCountSpec {
    /// Op-units per unknown per non-coarsest routine call.
    pub c_fine: f64,
    /// Op-units per unknown of one coarsest solve.
    pub c_coarsest: f64,
    /// Unknowns on the coarsest level.
    pub n_coarsest: f64,
}

impl Default for OpCountSpec {
    fn default() -> Self {
        Self {
            c_fine: 1.0,
            c_coarsest: 1.0,
            n_coarsest: 1.0,
        }
    }
}

/// Exact operation count of one cycle on `n` levels with idealized level
/// sizes `N_l = c^(l - 1) N_1` (l counted from the coarsest): the linear
/// term `f(kappa, c) C N_n` plus the coarsest-solve correction.
///
/// Counters at or above `n` give the same cycle as `n`, which is how the
/// infinite counter is evaluated (also for `c >= 0.5`, where it grows
/// superlinearly).
pub fn n_ops_model(kappa: Kappa, c: f64, n: u32, spec: &OpCountSpec) -> Result<f64> {
    if n < 1 {
        return Err(MgError::InvalidLevels(0));
    }
    check_levels(n)?;
    let k = kappa.effective(n).min(n);
    if k < 1 {
        return Err(MgError::InvalidParameter("cycle counter must be >= 1".into()));
    }
    let n_finest = c.powi(1 - n as i32) * spec.n_coarsest;
    let linear = f_factor(Kappa::Finite(k), c)? * spec.c_fine * n_finest;
    let mut correction = 0.0;
    for j in 0..=(k - 1).min(n - 1) {
        let fj = f_factor(Kappa::Finite(k - j), c)?;
        correction +=
            (spec.c_coarsest - fj * spec.c_fine) * spec.n_coarsest * binomial(n - 1, j) as f64;
    }
    Ok(linear + correction)
}

/// Kernel-equivalent launches of one cycle: `5 + nu` per non-coarsest
/// routine call and one per coarsest solve.
pub fn n_gpu_calls(kappa: Kappa, n: u32, nu: u32) -> Result<u128> {
    if n < 1 {
        return Err(MgError::InvalidLevels(0));
    }
    let above = total_calls(kappa, n - 1)?;
    let all = total_calls(kappa, n)?;
    Ok((5 + nu as u128) * above + all - above)
}

/// Run-time model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModelParams {
    /// ms per kernel-equivalent launch.
    pub alpha: f64,
    /// ms per op-unit.
    pub beta: f64,
    /// Relaxations per routine call.
    pub nu: u32,
    /// Coarsening factor.
    pub c: f64,
}

impl CostModelParams {
    pub fn new(alpha: f64, beta: f64, nu: u32) -> Self {
        Self {
            alpha,
            beta,
            nu,
            c: 0.25,
        }
    }
}

/// Unknowns on the finest level of an `n`-level full-coarsening hierarchy.
pub fn finest_unknowns(n: u32) -> f64 {
    let side = 2f64.powi(n as i32) - 1.0;
    side * side
}

/// Model operation count per cycle, `N * f(kappa, c)` with the coarsest
/// correction dropped. For `c = 1/4` this is `N * 2 (1 - 3^-kappa)`.
pub fn model_ops(kappa: Kappa, n: u32, c: f64) -> Result<f64> {
    Ok(finest_unknowns(n) * f_factor(kappa, c)?)
}

/// `T = alpha * launches + beta * ops` for one cycle, in ms.
pub fn predict_runtime(params: &CostModelParams, kappa: Kappa, n: u32) -> Result<f64> {
    let launches = n_gpu_calls(kappa, n, params.nu)? as f64;
    let ops = model_ops(kappa, n, params.c)?;
    Ok(params.alpha * launches + params.beta * ops)
}

/// Launch and operation components of [`predict_runtime`].
pub fn predict_components(params: &CostModelParams, kappa: Kappa, n: u32) -> Result<(f64, f64)> {
    let launches = n_gpu_calls(kappa, n, params.nu)? as f64;
    let ops = model_ops(kappa, n, params.c)?;
    Ok((params.alpha * launches, params.beta * ops))
}

/// One timing observation for [`fit_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub kappa: Kappa,
    pub levels: u32,
    pub ms: f64,
}

/// Residual weighting of the least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitWeighting {
    /// Minimize the sum of squared relative residuals `(model - ms) / ms`.
    #[default]
    Relative,
    /// Minimize the sum of squared residuals in ms.
    Absolute,
}

/// Least-squares `(alpha, beta)` with relative residuals; see
/// [`fit_params_weighted`].
pub fn fit_params(observations: &[Observation], nu: u32, c: f64) -> Result<(f64, f64)> {
    fit_params_weighted(observations, nu, c, FitWeighting::Relative)
}

/// Least-squares `(alpha, beta)` over the observations, using the model
/// launch and operation counts as regressors. Relative weighting needs
/// positive timings.
pub fn fit_params_weighted(
    observations: &[Observation],
    nu: u32,
    c: f64,
    weighting: FitWeighting,
) -> Result<(f64, f64)> {
    if observations.len() < 2 {
        return Err(MgError::RankDeficient);
    }
    let mut rows = Vec::with_capacity(observations.len());
    for o in observations {
        let w = match weighting {
            FitWeighting::Absolute => 1.0,
            FitWeighting::Relative if o.ms > 0.0 && o.ms.is_finite() => 1.0 / o.ms,
            FitWeighting::Relative => {
                return Err(MgError::InvalidParameter(format!(
                    "relative fit needs positive timings, got {}",
                    o.ms
                )))
            }
        };
        let a = n_gpu_calls(o.kappa, o.levels, nu)? as f64;
        let b = model_ops(o.kappa, o.levels, c)?;
        rows.push((w * a, w * b, w * o.ms));
    }
    // Column scaling keeps the 2x2 normal equations well conditioned even
    // though launches and op counts differ by many orders of magnitude.
    let sa = rows.iter().map(|r| r.0 * r.0).sum::<f64>().sqrt();
    let sb = rows.iter().map(|r| r.1 * r.1).sum::<f64>().sqrt();
    if sa == 0.0 || sb == 0.0 {
        return Err(MgError::RankDeficient);
    }
    let (mut g11, mut g12, mut g22, mut h1, mut h2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(a, b, t) in &rows {
        let (a, b) = (a / sa, b / sb);
        g11 += a * a;
        g12 += a * b;
        g22 += b * b;
        h1 += a * t;
        h2 += b * t;
    }
    let det = g11 * g22 - g12 * g12;
    if det.abs() <= 1e-12 * g11 * g22 {
        return Err(MgError::RankDeficient);
    }
    let x1 = (g22 * h1 - g12 * h2) / det;
    let x2 = (g11 * h2 - g12 * h1) / det;
    Ok((x1 / sa, x2 / sb))
}

/// Binomial coefficient evaluated at a real argument through the falling
/// factorial `x (x - 1) ... (x - j + 1) / j!`.
pub fn binom_real(x: f64, j: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..j {
        acc *= (x - i as f64) / (i + 1) as f64;
    }
    acc
}

/// `total_calls` continued to real `n` by its polynomial form.
pub fn total_calls_real(kappa: Kappa, n: f64) -> f64 {
    match kappa {
        Kappa::Infinite => 2f64.powf(n) - 1.0,
        Kappa::Finite(k) => (1..=k).map(|j| binom_real(n, j)).sum(),
    }
}

fn gpu_calls_real(kappa: Kappa, n: f64, nu: u32) -> f64 {
    let above = total_calls_real(kappa, n - 1.0);
    let all = total_calls_real(kappa, n);
    (5.0 + nu as f64) * above + all - above
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TurningStatus {
    Converged,
    /// The iteration budget ran out; the values are the last iterate.
    NotConverged,
    /// Zero launch overhead: operations dominate at every size.
    ZeroOverhead,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    /// Unrounded finest level.
    pub n_tp: f64,
    /// Finest-level unknowns, `(2^n_tp - 1)^2`.
    pub unknowns_tp: f64,
    pub iterations: usize,
    pub status: TurningStatus,
}

/// Problem size at which launch cost equals operation cost, found by the
/// fixed-point iteration `n <- log2(1 + sqrt(alpha/beta * launches(n) / f(kappa, c)))`
/// started from `n = 2`.
pub fn turning_point(params: &CostModelParams, kappa: Kappa) -> Result<TurningPoint> {
    if params.alpha < 0.0 || params.beta <= 0.0 {
        return Err(MgError::InvalidParameter(
            "turning point needs alpha >= 0 and beta > 0".into(),
        ));
    }
    if params.alpha == 0.0 {
        return Ok(TurningPoint {
            n_tp: 0.0,
            unknowns_tp: 0.0,
            iterations: 0,
            status: TurningStatus::ZeroOverhead,
        });
    }
    let work = f_factor(kappa, params.c)?;
    let ratio = params.alpha / params.beta;
    let mut n = 2.0f64;
    for it in 1..=TURNING_POINT_ITERATIONS {
        let next = (1.0 + (ratio * gpu_calls_real(kappa, n, params.nu) / work).sqrt()).log2();
        let step = (next - n).abs();
        n = next;
        if step < TURNING_POINT_TOLERANCE {
            return Ok(TurningPoint {
                n_tp: n,
                unknowns_tp: (2f64.powf(n) - 1.0).powi(2),
                iterations: it,
                status: TurningStatus::Converged,
            });
        }
    }
    Ok(TurningPoint {
        n_tp: n,
        unknowns_tp: (2f64.powf(n) - 1.0).powi(2),
        iterations: TURNING_POINT_ITERATIONS,
        status: TurningStatus::NotConverged,
    })
}
