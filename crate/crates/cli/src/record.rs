//! JSON run records emitted by `kcycle solve`.

use serde::{Deserialize, Serialize};

use kcycle_core::cycle::{CycleConfig, NormKind, SolveOutcome, SolveReport};
use kcycle_core::operator::ProblemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Standalone,
    Pcg,
}

/// Echo of everything that determined the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub solver: SolverKind,
    pub problem: ProblemSpec,
    pub cycle: CycleConfig,
    pub target_reduction: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub outcome: SolveOutcome,
    pub norm: NormKind,
    pub iterations: usize,
    #[serde(with = "float_or_null")]
    pub initial_norm: f64,
    #[serde(with = "float_or_null")]
    pub final_norm: f64,
    #[serde(with = "float_or_null")]
    pub asymptotic_factor: f64,
    pub launches: u64,
    pub op_units: f64,
    pub wall_ms: f64,
    #[serde(with = "floats_or_null")]
    pub per_cycle_reduction: Vec<f64>,
    pub visits: Vec<u64>,
}

impl From<&SolveReport> for RunResult {
    fn from(r: &SolveReport) -> Self {
        Self {
            outcome: r.outcome,
            norm: r.norm,
            iterations: r.iterations,
            initial_norm: r.initial_error_norm,
            final_norm: r.final_error_norm,
            asymptotic_factor: r.asymptotic_factor,
            launches: r.stats.kernel_launches,
            op_units: r.stats.unknown_touches,
            wall_ms: r.wall_time_ms,
            per_cycle_reduction: r.per_cycle_reduction.clone(),
            visits: r.stats.visits.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub result: RunResult,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunRecord {
    pub fn new(config: RunConfig, report: &SolveReport) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            config,
            result: RunResult::from(report),
            version: kcycle_core::VERSION.to_string(),
            timestamp,
        }
    }

    pub const CSV_HEADER: &'static str =
        "kappa,levels,eps,phi,iterations,initial_norm,final_norm,asymptotic_factor,launches,op_units,wall_ms";

    pub fn csv_row(&self) -> String {
        let r = &self.result;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.config.cycle.kappa,
            self.config.cycle.n,
            self.config.problem.epsilon,
            self.config.problem.phi,
            r.iterations,
            r.initial_norm,
            r.final_norm,
            r.asymptotic_factor,
            r.launches,
            r.op_units,
            r.wall_ms
        )
    }
}

// Non-finite norms (diverged runs) are written as null.
mod float_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

mod floats_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.is_finite().then_some(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<Option<f64>>::deserialize(d)?
            .into_iter()
            .map(|x| x.unwrap_or(f64::NAN))
            .collect())
    }
}
