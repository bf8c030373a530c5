//! Von Neumann, conditional, and measured conditional entropies.
//!
//! The measured conditional entropy `H(1^A|2)` is evaluated through the
//! block state `Γ = Σ_j σ_j ⊗ |e_j⟩⟨e_j|` on the conditioning factors and an
//! outcome register, where `σ_j = tr_1 (A_j ⊗ 1) ρ (A_j ⊗ 1)†`. Then
//! `H(1^A|2) = S(Γ) − S(Γ_2)` and `Γ_2 = ρ_2`.

use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix};
use crate::measurements::Measurement;
use crate::states::DensityState;
use crate::tolerances;

/// `−tr σ ln σ` with `0 ln 0 = 0`.
///
/// Eigenvalues below [`tolerances::ENTROPY_CLIP`] times the trace are treated
/// as zero. With `allow_subnormalized` the trace may differ from one, which is
/// how the per-outcome terms `−tr σ_k ln σ_k` are evaluated.
pub fn von_neumann(sigma: &ComplexMatrix, allow_subnormalized: bool) -> Result<f64> {
    let eig = matrix::hermitian_eig(sigma)?;
    let trace: f64 = eig.eigenvalues.iter().sum();
    let scale = trace.abs().max(1.0);
    if eig.min() < -tolerances::PSD_ABS * scale {
        return Err(Error::precondition(format!(
            "entropy of an operator with negative eigenvalue {:.3e}",
            eig.min()
        )));
    }
    if !allow_subnormalized && (trace - 1.0).abs() > tolerances::COMPLETENESS {
        return Err(Error::precondition(format!(
            "entropy expects unit trace, got {trace:.12}"
        )));
    }
    if trace <= 0.0 {
        return Ok(0.0);
    }
    let cutoff = tolerances::ENTROPY_CLIP * trace;
    Ok(-eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|&l| l * l.ln())
        .sum::<f64>())
}

/// Shannon entropy `−Σ p ln p` of a probability vector, skipping zeros.
pub fn shannon(probabilities: &[f64]) -> f64 {
    -probabilities
        .iter()
        .filter(|&&p| p > tolerances::ENTROPY_CLIP)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// `S(ρ_{target,condition}) − S(ρ_condition)`.
pub fn conditional_entropy(state: &DensityState, target: usize, condition: usize) -> Result<f64> {
    let n = state.factor_count();
    if target >= n || condition >= n || target == condition {
        return Err(Error::precondition(format!(
            "invalid factor pair ({target}, {condition}) for a state with {n} factors"
        )));
    }
    let joint = state.marginal(&[target, condition])?;
    let cond = state.marginal(&[condition])?;
    Ok(von_neumann(joint.matrix(), false)? - von_neumann(cond.matrix(), false)?)
}

fn check_measured(state: &DensityState, a: &Measurement, measured: usize, kept: &[usize]) -> Result<()> {
    let n = state.factor_count();
    if measured >= n {
        return Err(Error::precondition(format!(
            "measured factor {measured} out of range for {n} factors"
        )));
    }
    if a.dim() != state.dims()[measured] {
        return Err(Error::dimension(format!(
            "measurement acts on dimension {}, factor {measured} has dimension {}",
            a.dim(),
            state.dims()[measured]
        )));
    }
    if let Some(&bad) = kept.iter().find(|&&f| f >= n || f == measured) {
        return Err(Error::precondition(format!(
            "kept factor {bad} is out of range or equals the measured factor"
        )));
    }
    Ok(())
}

/// For each outcome `j`, `tr_measured (A_j ⊗ 1) ρ (A_j ⊗ 1)†` reduced to the
/// `kept` factors (in increasing factor order). An empty `kept` yields the
/// outcome probabilities as 1×1 matrices.
pub fn post_measurement_marginals(
    state: &DensityState,
    a: &Measurement,
    measured: usize,
    kept: &[usize],
) -> Result<Vec<ComplexMatrix>> {
    check_measured(state, a, measured, kept)?;
    // canonical order: measured factor first, the rest in original order
    let mut order = vec![measured];
    order.extend((0..state.factor_count()).filter(|&f| f != measured));
    let canonical = state.permuted(&order)?;
    let dims = canonical.dims().to_vec();
    let rest: usize = dims[1..].iter().product();
    let traced: Vec<usize> = std::iter::once(0)
        .chain((1..dims.len()).filter(|&i| !kept.contains(&order[i])))
        .collect();
    let id = ComplexMatrix::identity(rest);
    a.ops()
        .iter()
        .map(|op| {
            let lifted = matrix::kron(op, &id);
            let post = lifted.conjugate(canonical.matrix());
            Ok(matrix::partial_trace(&post, &dims, &traced)?.hermitian_part())
        })
        .collect()
}

/// Classical-outcome / quantum-side-information block state.
#[derive(Debug, Clone)]
pub struct CQExtension {
    /// State on `(conditioning dims…, outcome count)`.
    pub gamma: DensityState,
    pub outcome_weights: Vec<f64>,
    /// The diagonal blocks `σ_j`.
    pub blocks: Vec<ComplexMatrix>,
}

pub fn cq_extension(
    state: &DensityState,
    a: &Measurement,
    measured: usize,
    conditioning: &[usize],
) -> Result<CQExtension> {
    if conditioning.is_empty() {
        return Err(Error::precondition("conditioning factor set is empty"));
    }
    let blocks = post_measurement_marginals(state, a, measured, conditioning)?;
    let n = blocks.len();
    let cond_dim = blocks[0].rows();
    let mut gamma = ComplexMatrix::zeros(cond_dim * n, cond_dim * n);
    for (j, sigma) in blocks.iter().enumerate() {
        for r in 0..cond_dim {
            for c in 0..cond_dim {
                gamma[(r * n + j, c * n + j)] = sigma[(r, c)];
            }
        }
    }
    let mut dims: Vec<usize> = conditioning
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|f| state.dims()[f])
        .collect();
    dims.push(n);
    let outcome_weights = blocks.iter().map(|s| s.trace().re).collect();
    Ok(CQExtension {
        gamma: DensityState::new(gamma, dims)?,
        outcome_weights,
        blocks,
    })
}

/// `H(1^A|cond) = S(Γ) − S(ρ_cond)`.
pub fn measured_conditional_entropy(
    state: &DensityState,
    a: &Measurement,
    measured: usize,
    conditioning: &[usize],
) -> Result<f64> {
    let cq = cq_extension(state, a, measured, conditioning)?;
    let cond = state.marginal(conditioning)?;
    Ok(von_neumann(cq.gamma.matrix(), false)? - von_neumann(cond.matrix(), false)?)
}

/// The defining sum `−Σ_j tr σ_j ln σ_j − S(ρ_cond)`, block by block.
pub fn measured_conditional_entropy_direct(
    state: &DensityState,
    a: &Measurement,
    measured: usize,
    conditioning: &[usize],
) -> Result<f64> {
    let blocks = post_measurement_marginals(state, a, measured, conditioning)?;
    let cond = state.marginal(conditioning)?;
    let mut total = 0.0;
    for sigma in &blocks {
        total += von_neumann(sigma, true)?;
    }
    Ok(total - von_neumann(cond.matrix(), false)?)
}

/// `−Σ_k tr ω_k ln ω_k` with `ω_k = (B_k ⊗ 1) ρ (B_k ⊗ 1)†`, the operator on
/// all factors left after measuring factor `measured` without discarding it.
pub fn post_measurement_entropy_sum(state: &DensityState, b: &Measurement, measured: usize) -> Result<f64> {
    let mut total = 0.0;
    for omega in post_measurement_operators(state, b, measured)? {
        total += von_neumann(&omega, true)?;
    }
    Ok(total)
}

/// `(B_k ⊗ 1) ρ (B_k ⊗ 1)†` on the full space, in the state's own factor order.
pub fn post_measurement_operators(
    state: &DensityState,
    b: &Measurement,
    measured: usize,
) -> Result<Vec<ComplexMatrix>> {
    check_measured(state, b, measured, &[])?;
    b.ops()
        .iter()
        .map(|op| {
            let lifted = matrix::embed(op, state.dims(), measured)?;
            Ok(lifted.conjugate(state.matrix()).hermitian_part())
        })
        .collect()
}
