use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certifier::Theorem;
use crate::error::{Error, Result};
use crate::measurements::{self, Measurement};
use crate::rng;
use crate::states;
use crate::tolerances;

use super::run::{evaluate_all, Evaluation, RunOptions, RunReport};
use super::scenario::{scenario_theorem, Instance};

/// Parameters of a fuzz campaign. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub trials: usize,
    pub seed: u64,
    pub dims: (usize, usize),
    pub outcomes: (usize, usize),
    pub theorems: Vec<Theorem>,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularization_delta: Option<f64>,
    pub concavity_trials: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            dims: (2, 4),
            outcomes: (2, 5),
            theorems: vec![Theorem::TwoSpace],
            tolerance: tolerances::THEOREM,
            regularization_delta: Some(tolerances::REGULARIZATION_DELTA),
            concavity_trials: 20,
        }
    }
}

/// Draws a Kraus measurement, or a Haar basis one time in four.
fn draw_measurement(r: &mut rng::Rng, d: usize, outcomes: (usize, usize)) -> Result<Measurement> {
    if r.random_range(0..4) == 0 {
        measurements::from_basis(&measurements::random_orthonormal_basis_with(r, d)?)
    } else {
        let n = r.random_range(outcomes.0..=outcomes.1);
        measurements::random_measurement_with(r, d, n)
    }
}

/// Instance of one trial, drawn from the stream `(seed, index)`. Tripartite
/// states are drawn only when a three-space check is requested, after
/// everything else, so the bipartite draws do not depend on that choice.
pub fn draw_trial(config: &FuzzConfig, index: usize) -> Result<(Instance, u64)> {
    let mut r = rng::trial(config.seed, index as u64);
    let (lo, hi) = config.dims;
    let d1 = r.random_range(lo..=hi);
    let d2 = r.random_range(lo..=hi);
    let rank = r.random_range(1..=d1 * d2);
    let state = states::random_density_with(&mut r, &[d1, d2], rank)?;
    let a = draw_measurement(&mut r, d1, config.outcomes)?;
    let b = draw_measurement(&mut r, d1, config.outcomes)?;
    let concavity_seed: u64 = r.random();
    let mut inst = Instance { state, a, b };
    if config.theorems.contains(&Theorem::ThreeSpace) {
        let d3 = r.random_range(lo..=hi);
        let rank = r.random_range(1..=d1 * d2 * d3);
        inst.state = states::random_density_with(&mut r, &[d1, d2, d3], rank)?;
    }
    Ok((inst, concavity_seed))
}

/// Seeded campaign. Trials run in parallel; the report is ordered by trial.
pub fn fuzz(config: &FuzzConfig) -> Result<RunReport> {
    if config.trials == 0 {
        return Err(Error::precondition("fuzz needs at least one trial"));
    }
    let (lo, hi) = config.dims;
    if lo == 0 || lo > hi {
        return Err(Error::validation("dims", format!("invalid range {lo}..{hi}")));
    }
    let (olo, ohi) = config.outcomes;
    if olo == 0 || olo > ohi {
        return Err(Error::validation("outcomes", format!("invalid range {olo}..{ohi}")));
    }
    if config.tolerance.is_nan() || config.tolerance <= 0.0 {
        return Err(Error::validation("tolerance", "must be positive"));
    }
    if let Some(t) = config.theorems.iter().find(|t| !scenario_theorem(**t)) {
        return Err(Error::validation("theorems", format!("{t} cannot be fuzzed")));
    }
    let per_trial: Vec<Vec<Evaluation>> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect();
    let evaluations = per_trial.into_iter().flatten().collect();
    Ok(RunReport::assemble(None, Some(config.clone()), vec![config.seed], evaluations))
}

fn run_trial(config: &FuzzConfig, index: usize) -> Vec<Evaluation> {
    let mut evals = match draw_trial(config, index) {
        Ok((inst, concavity_seed)) => {
            let opts = RunOptions {
                tolerance: config.tolerance,
                regularization_delta: config.regularization_delta,
                concavity_trials: config.concavity_trials,
                concavity_seed,
            };
            evaluate_all(&config.theorems, &inst, &opts)
        }
        Err(e) => config
            .theorems
            .iter()
            .map(|&theorem| Evaluation {
                theorem,
                trial: None,
                seed: None,
                dims: Vec::new(),
                tolerance: config.tolerance,
                pass: false,
                error: Some(format!("drawing the instance failed: {e}")),
                report: None,
            })
            .collect(),
    };
    for e in &mut evals {
        e.trial = Some(index);
        e.seed = Some(config.seed);
        if let Some(r) = e.report.as_mut() {
            r.instance.seed = Some(config.seed);
        }
    }
    evals
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_is_an_error() {
        let config = FuzzConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(matches!(fuzz(&config), Err(Error::Precondition(_))));
    }

    #[test]
    fn reports_are_ordered_and_reproducible() {
        let config = FuzzConfig {
            trials: 40,
            seed: 9,
            theorems: vec![Theorem::TwoSpace, Theorem::TwoHalfSpace],
            ..Default::default()
        };
        let r1 = fuzz(&config).unwrap();
        let r2 = fuzz(&config).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.evaluations.len(), 80);
        let trials: Vec<usize> = r1.evaluations.iter().map(|e| e.trial.unwrap()).collect();
        assert!(trials.windows(2).all(|w| w[0] <= w[1]));
        assert!(r1.all_pass());
    }

    #[test]
    fn three_space_draws_tripartite_states() {
        let config = FuzzConfig {
            trials: 5,
            dims: (2, 3),
            theorems: vec![Theorem::ThreeSpace, Theorem::TwoSpace],
            ..Default::default()
        };
        let r = fuzz(&config).unwrap();
        for e in &r.evaluations {
            let expected = if e.theorem == Theorem::ThreeSpace { 3 } else { 2 };
            assert_eq!(e.dims.len(), expected);
            assert!(e.pass);
        }
    }
}
