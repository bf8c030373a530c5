use serde::{Deserialize, Serialize};

use crate::certifier::{self, InequalityReport, InstanceDigest, Theorem};
use crate::error::{Error, Result};
use crate::matrix::{self, C64};
use crate::measurements::Measurement;
use crate::states::DensityState;
use crate::tolerances;

use super::fuzz::FuzzConfig;
use super::scenario::{Instance, ScenarioSpec};

/// One certifier call. Failed preconditions are kept as entries with
/// `error` set and `pass = false`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub theorem: Theorem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub dims: Vec<usize>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<InequalityReport>,
}

impl Evaluation {
    pub fn slack(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.slack)
    }

    fn from_result(theorem: Theorem, dims: &[usize], tolerance: f64, result: Result<InequalityReport>) -> Self {
        match result {
            Ok(report) => Self {
                theorem,
                trial: None,
                seed: report.instance.seed,
                dims: report.instance.dims.clone(),
                tolerance: report.tolerance,
                pass: report.pass,
                error: None,
                report: Some(report),
            },
            Err(e) => Self {
                theorem,
                trial: None,
                seed: None,
                dims: dims.to_vec(),
                tolerance,
                pass: false,
                error: Some(e.to_string()),
                report: None,
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub pass_count: usize,
    pub fail_count: usize,
    pub min_slack: Option<f64>,
    /// Only filled in on request, so that machine output stays reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuzz: Option<FuzzConfig>,
    pub seeds: Vec<u64>,
    pub evaluations: Vec<Evaluation>,
    pub aggregate: Aggregate,
}

impl RunReport {
    pub(crate) fn assemble(
        scenario: Option<ScenarioSpec>,
        fuzz: Option<FuzzConfig>,
        seeds: Vec<u64>,
        evaluations: Vec<Evaluation>,
    ) -> Self {
        let pass_count = evaluations.iter().filter(|e| e.pass).count();
        let min_slack = evaluations.iter().filter_map(Evaluation::slack).reduce(f64::min);
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            scenario,
            fuzz,
            seeds,
            aggregate: Aggregate {
                pass_count,
                fail_count: evaluations.len() - pass_count,
                min_slack,
                wall_time_seconds: None,
            },
            evaluations,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.aggregate.fail_count == 0
    }
}

/// Options shared by scenario and fuzz runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RunOptions {
    pub tolerance: f64,
    pub regularization_delta: Option<f64>,
    pub concavity_trials: usize,
    pub concavity_seed: u64,
}

fn bipartite(state: &DensityState) -> Result<DensityState> {
    match state.factor_count() {
        2 => Ok(state.clone()),
        3 => state.marginal(&[0, 1]),
        _ => Err(Error::precondition(format!(
            "needs a bipartite state, scenario has dims {:?}",
            state.dims()
        ))),
    }
}

fn tripartite(state: &DensityState) -> Result<DensityState> {
    match state.factor_count() {
        2 => state.purify(),
        3 => Ok(state.clone()),
        _ => Err(Error::precondition(format!(
            "needs a bi- or tripartite state, scenario has dims {:?}",
            state.dims()
        ))),
    }
}

/// Orthonormal vectors behind a rank-one measurement: the top eigenvector of
/// each effect.
fn basis_vectors(m: &Measurement) -> Result<Vec<Vec<C64>>> {
    if !m.is_rank_one() || m.outcomes() != m.dim() {
        return Err(Error::precondition("Maassen–Uffink needs both measurements to be orthonormal bases"));
    }
    m.effects()
        .iter()
        .map(|e| {
            let eig = matrix::hermitian_eig(e)?;
            Ok(eig.eigenvectors.column_vec(eig.dim() - 1))
        })
        .collect()
}

fn regate(mut report: InequalityReport, tolerance: f64) -> InequalityReport {
    report.tolerance = tolerance;
    report.pass = report.slack >= -tolerance && report.links.iter().all(|l| l.pass);
    report
}

/// Runs one certifier on an instance. Errors are returned, not captured.
pub(crate) fn evaluate_theorem(theorem: Theorem, inst: &Instance, opts: &RunOptions) -> Result<InequalityReport> {
    let (a, b) = (&inst.a, &inst.b);
    let report = match theorem {
        Theorem::TwoSpace => certifier::two_space(&bipartite(&inst.state)?, a, b)?,
        Theorem::TwoHalfSpace => certifier::two_half_space(&bipartite(&inst.state)?, a, b)?,
        Theorem::ThreeSpace => certifier::three_space(&tripartite(&inst.state)?, a, b)?,
        Theorem::MaassenUffink => {
            let single = if inst.state.factor_count() == 1 {
                inst.state.clone()
            } else {
                inst.state.marginal(&[0])?
            };
            certifier::maassen_uffink(&single, &basis_vectors(a)?, &basis_vectors(b)?)?
        }
        Theorem::ProofReplay2 => {
            certifier::proof_replay_two_space(&bipartite(&inst.state)?, a, b, opts.regularization_delta)?
        }
        Theorem::ProofReplay2Half => {
            certifier::proof_replay_two_half_space(&bipartite(&inst.state)?, a, b, opts.regularization_delta)?
        }
        Theorem::Concavity => {
            let gap = certifier::concavity_suite(inst.state.dims(), a, opts.concavity_trials, opts.concavity_seed)?;
            return Ok(InequalityReport::from_gap(theorem, &gap).with_instance(InstanceDigest {
                dims: inst.state.dims().to_vec(),
                seed: Some(opts.concavity_seed),
                description: format!("{} random mixtures", opts.concavity_trials),
                ..Default::default()
            }));
        }
        Theorem::PurificationReduction => {
            let state = bipartite(&inst.state)?;
            let gap = certifier::purification_reduction_check(&state, b)?;
            return Ok(InequalityReport::from_gap(theorem, &gap).with_instance(InstanceDigest {
                dims: state.dims().to_vec(),
                ..Default::default()
            }));
        }
        Theorem::TripleGoldenThompson | Theorem::GibbsVariational | Theorem::OperatorJensen => {
            return Err(Error::precondition(format!("{theorem} takes operator inputs, not a scenario")));
        }
    };
    Ok(regate(report, opts.tolerance))
}

pub(crate) fn evaluate_all(theorems: &[Theorem], inst: &Instance, opts: &RunOptions) -> Vec<Evaluation> {
    theorems
        .iter()
        .map(|&t| Evaluation::from_result(t, inst.state.dims(), opts.tolerance, evaluate_theorem(t, inst, opts)))
        .collect()
}

/// Executes every theorem a scenario requests.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<RunReport> {
    spec.validate()?;
    let inst = spec.build()?;
    let opts = RunOptions {
        tolerance: spec.tolerance,
        regularization_delta: spec.regularization_delta,
        concavity_trials: spec.concavity_trials,
        concavity_seed: spec.concavity_seed,
    };
    let evaluations = evaluate_all(&spec.theorems, &inst, &opts);
    Ok(RunReport::assemble(Some(spec.clone()), None, spec.seeds(), evaluations))
}

fn equality_case(theorem: Theorem, description: String, result: Result<InequalityReport>, tol: f64) -> Evaluation {
    let mut eval = Evaluation::from_result(theorem, &[], tol, result);
    if let Some(r) = eval.report.as_mut() {
        r.instance.description = description;
        r.tolerance = tol;
        r.pass = r.slack.abs() <= tol;
        eval.pass = r.pass;
        eval.tolerance = tol;
    }
    eval
}

/// Analytic equality cases: each evaluation passes iff its slack is zero to
/// within its tolerance.
pub fn selftest() -> RunReport {
    use crate::measurements::{dft_measurement, dft_vectors, standard_basis_vectors, standard_measurement};
    use crate::states;

    let mut evals = Vec::new();
    for d in 2..=5 {
        let std_a = standard_measurement(d);
        let dft_b = dft_measurement(d);
        let run = |f: fn(&DensityState, &Measurement, &Measurement) -> Result<InequalityReport>,
                   state: Result<DensityState>| {
            let (a, b) = (std_a.clone()?, dft_b.clone()?);
            f(&state?, &a, &b)
        };
        evals.push(equality_case(
            Theorem::TwoSpace,
            format!("maximally entangled, standard vs Fourier, d={d}"),
            run(certifier::two_space, states::maximally_entangled(d)),
            tolerances::THEOREM,
        ));
        evals.push(equality_case(
            Theorem::ThreeSpace,
            format!("pure product ⊗ maximally entangled, standard vs Fourier, d={d}"),
            run(
                certifier::three_space,
                states::maximally_entangled(d).and_then(|phi| {
                    let e0 = DensityState::from_pure_vector(&standard_basis_vectors(d)[0], vec![d])?;
                    // |0⟩ on factor 2, Φ on factors 1 and 3
                    states::product_state(&phi, &e0)?.permuted(&[0, 2, 1])
                }),
            ),
            tolerances::THEOREM,
        ));
        evals.push(equality_case(
            Theorem::MaassenUffink,
            format!("basis state, standard vs Fourier, d={d}"),
            DensityState::from_pure_vector(&standard_basis_vectors(d)[0], vec![d])
                .and_then(|rho| certifier::maassen_uffink(&rho, &standard_basis_vectors(d), &dft_vectors(d))),
            tolerances::THEOREM,
        ));
    }
    RunReport::assemble(None, None, Vec::new(), evals)
}
