//! Link-by-link re-evaluation of the proofs of the two-space and
//! two-and-a-half-space relations.
//!
//! Every logarithm taken along the way needs a positive definite argument.
//! Rank-deficient inputs must be regularized with an explicit `δ`, which
//! replaces `ρ` by `(1 − δ)ρ + δ·1/d` before anything is evaluated.

use crate::entropy::{post_measurement_marginals, post_measurement_operators, von_neumann};
use crate::error::{Error, Result};
use crate::ingredients::{jensen_difference, log_partition, resolvent_pair_integral};
use crate::matrix::{self, ComplexMatrix, HermitianEigen};
use crate::measurements::Measurement;
use crate::states::DensityState;
use crate::tolerances::{CHAIN_IDENTITY, CHAIN_LINK, REPLAY_PD_FLOOR, REPLAY_SAMPLE_TIMES};

use super::report::{ChainLink, InequalityReport, Theorem};

fn replay_state(rho: &DensityState, delta: Option<f64>) -> Result<DensityState> {
    match delta {
        Some(d) => rho.regularized(d),
        None => Ok(rho.clone()),
    }
}

fn pd(m: &ComplexMatrix, what: &str, delta: Option<f64>) -> Result<HermitianEigen> {
    let eig = matrix::hermitian_eig(m)?;
    if eig.min() > REPLAY_PD_FLOOR {
        return Ok(eig);
    }
    let hint = if delta.is_none() {
        "; pass a regularization delta"
    } else {
        ""
    };
    Err(Error::precondition(format!(
        "{what} is not positive definite (smallest eigenvalue {:.3e}){hint}",
        eig.min()
    )))
}

fn identity_link(name: &str, lhs: f64, rhs: f64) -> ChainLink {
    ChainLink::identity(name, lhs, rhs, CHAIN_IDENTITY * rhs.abs().max(1.0))
}

fn inequality_link(name: &str, lhs: f64, rhs: f64) -> ChainLink {
    ChainLink::inequality(name, lhs, rhs, CHAIN_LINK * rhs.abs().max(1.0))
}

struct Davis {
    link: ChainLink,
    log_inner: ComplexMatrix,
    operator_min: f64,
}

/// Jensen step `−tr ρ Σ A†(ln K)A ≥ −tr ρ ln Σ A†KA`, the traced form the
/// argument uses. The operator gap `λ_min` is kept as a diagnostic: near a
/// regularized kernel it carries errors of order `ε/δ`.
fn davis_link(
    name: &str,
    rho: &ComplexMatrix,
    ops: &[ComplexMatrix],
    ks: &[ComplexMatrix],
    logs: &[ComplexMatrix],
) -> Result<Davis> {
    let (log_inner, outer) = jensen_difference(ops, ks, logs)?;
    let operator_min = matrix::hermitian_eig(&(&log_inner - &outer))?.min();
    let lhs = -rho.trace_product(&outer).re;
    let rhs = -rho.trace_product(&log_inner).re;
    Ok(Davis {
        link: inequality_link(name, lhs, rhs),
        log_inner,
        operator_min,
    })
}

fn lifted(left: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    matrix::kron(left, m)
}

fn check_bipartite(rho: &DensityState, a: &Measurement, b: &Measurement) -> Result<(usize, usize)> {
    if rho.factor_count() != 2 {
        return Err(Error::precondition(format!(
            "proof replay needs a bipartite state, got dims {:?}",
            rho.dims()
        )));
    }
    let (d1, d2) = (rho.dims()[0], rho.dims()[1]);
    if a.dim() != d1 || b.dim() != d1 {
        return Err(Error::dimension(format!(
            "measurements act on dimensions {} and {}, factor 1 has dimension {d1}",
            a.dim(),
            b.dim()
        )));
    }
    Ok((d1, d2))
}

/// Worst `(lhs, rhs)` pair of a family by the gap the link would compute.
fn worst_identity(pairs: &[(f64, f64)]) -> (f64, f64) {
    *pairs
        .iter()
        .max_by(|x, y| (x.0 - x.1).abs().total_cmp(&(y.0 - y.1).abs()))
        .expect("non-empty family")
}

fn worst_inequality(pairs: &[(f64, f64)]) -> (f64, f64) {
    *pairs
        .iter()
        .min_by(|x, y| (x.0 - x.1).total_cmp(&(y.0 - y.1)))
        .expect("non-empty family")
}

/// Re-evaluates the proof of the two-space relation.
///
/// `h = 1⊗ln ρ₂ − ln X − ln Z` with `X = Σ_j A_j†A_j ⊗ σ_j` and
/// `Z = Σ_k B_k†B_k ⊗ τ_k`. The chain is
/// Davis (A and B) → `tr ρh − S(ρ₁₂)` → Gibbs → Golden–Thompson →
/// resolvent decomposition → overlap bound → `c₁² ≥ tr e^{−h}`,
/// plus pointwise resolvent identities at a few fixed `t`.
pub fn proof_replay_two_space(
    rho: &DensityState,
    a: &Measurement,
    b: &Measurement,
    delta: Option<f64>,
) -> Result<InequalityReport> {
    let (d1, d2) = check_bipartite(rho, a, b)?;
    let state = replay_state(rho, delta)?;
    let theorem = super::two_space(&state, a, b)?;
    let c1 = theorem.term("c1").expect("recorded by two_space");
    let id1 = ComplexMatrix::identity(d1);
    let id2 = ComplexMatrix::identity(d2);

    let rho2 = state.marginal(&[1])?.matrix().clone();
    let e2 = pd(&rho2, "ρ₂", delta)?;
    let sigmas = post_measurement_marginals(&state, a, 0, &[1])?;
    let taus = post_measurement_marginals(&state, b, 0, &[1])?;
    let logs = |blocks: &[ComplexMatrix], label: &str| -> Result<Vec<ComplexMatrix>> {
        blocks
            .iter()
            .enumerate()
            .map(|(j, s)| pd(s, &format!("{label}_{j}"), delta)?.apply(f64::ln))
            .collect()
    };
    let sigma_logs = logs(&sigmas, "σ")?;
    let tau_logs = logs(&taus, "τ")?;

    let a_ops: Vec<_> = a.ops().iter().map(|op| matrix::kron(op, &id2)).collect();
    let b_ops: Vec<_> = b.ops().iter().map(|op| matrix::kron(op, &id2)).collect();
    let lift_all = |ms: &[ComplexMatrix]| ms.iter().map(|m| lifted(&id1, m)).collect::<Vec<_>>();
    let davis_a = davis_link("davis_A", state.matrix(), &a_ops, &lift_all(&sigmas), &lift_all(&sigma_logs))?;
    let davis_b = davis_link("davis_B", state.matrix(), &b_ops, &lift_all(&taus), &lift_all(&tau_logs))?;

    let e_ops = a.effects();
    let f_ops = b.effects();
    let x = matrix::sum(e_ops.iter().zip(&sigmas).map(|(e, s)| matrix::kron(e, s)).collect::<Vec<_>>().iter())
        .expect("at least one outcome");
    let z = matrix::sum(f_ops.iter().zip(&taus).map(|(f, t)| matrix::kron(f, t)).collect::<Vec<_>>().iter())
        .expect("at least one outcome");

    let ln_rho2 = e2.apply(f64::ln)?;
    let h = (&(&lifted(&id1, &ln_rho2) - &davis_a.log_inner) - &davis_b.log_inner).hermitian_part();
    let s12 = von_neumann(state.matrix(), false)?;
    let energy = state.matrix().trace_product(&h).re - s12;
    let mut links = Vec::new();
    let operator_mins = [davis_a.operator_min, davis_b.operator_min];
    links.push(davis_a.link);
    links.push(davis_b.link);
    let theorem_lhs = theorem.slack - 2.0 * c1.ln();
    links.push(inequality_link("scalar_step", theorem_lhs, energy));
    let log_z = log_partition(&h)?;
    links.push(inequality_link("gibbs_variational", energy, -log_z));
    let tr_exp = log_z.exp();

    let ey = matrix::hermitian_eig(&lifted(&id1, &rho2))?;
    let gt = resolvent_pair_integral(&x, &ey, &z);
    links.push(inequality_link("golden_thompson", gt, tr_exp));

    let mut weighted = 0.0;
    let mut plain = 0.0;
    for (e, s) in e_ops.iter().zip(&sigmas) {
        for (f, t) in f_ops.iter().zip(&taus) {
            let w = e.trace_product(f).re;
            let i = resolvent_pair_integral(s, &e2, t);
            weighted += w * i;
            plain += i;
        }
    }
    links.push(identity_link("integral_decomposition", gt, weighted));
    links.push(inequality_link("overlap_bound", c1 * c1 * plain, weighted));
    links.push(identity_link("resolvent_normalization", plain, 1.0));
    // ∫ tr ρ₂²(ρ₂+t)⁻² dt, evaluated in the eigenbasis of ρ₂
    let square_trace = resolvent_pair_integral(&rho2, &e2, &rho2);
    links.push(identity_link("resolvent_square_trace", square_trace, 1.0));
    links.push(inequality_link("conclusion", c1 * c1, tr_exp));

    for t in REPLAY_SAMPLE_TIMES {
        let r = e2.reconstruct_with(&e2.eigenvalues.iter().map(|m| 1.0 / (m + t)).collect::<Vec<_>>());
        let big_r = lifted(&id1, &r);
        let mut factorization = Vec::new();
        let mut bound = Vec::new();
        let mut d_sum = 0.0;
        for (e, s) in e_ops.iter().zip(&sigmas) {
            let left = &matrix::kron(e, s) * &big_r;
            for (f, tau) in f_ops.iter().zip(&taus) {
                let w = e.trace_product(f).re;
                let tr_d = (&(s * &r) * &(tau * &r)).trace().re;
                let tr_c = (&left * &(&matrix::kron(f, tau) * &big_r)).trace().re;
                factorization.push((tr_c, w * tr_d));
                bound.push((c1 * c1 * tr_d, tr_c));
                d_sum += tr_d;
            }
        }
        let (l, rr) = worst_identity(&factorization);
        links.push(identity_link(&format!("trace_factorization@t={t}"), l, rr));
        let (l, rr) = worst_inequality(&bound);
        links.push(inequality_link(&format!("pointwise_bound@t={t}"), l, rr));
        let rho2_r = &rho2 * &r;
        links.push(identity_link(&format!("d_sum@t={t}"), d_sum, (&rho2_r * &rho2_r).trace().re));
    }

    let mut report = InequalityReport {
        theorem: Theorem::ProofReplay2,
        ..theorem
    };
    report.instance.regularization_delta = delta;
    report.intermediates.push(super::NamedValue::new("davis_A_operator_min", operator_mins[0]));
    report.intermediates.push(super::NamedValue::new("davis_B_operator_min", operator_mins[1]));
    report.intermediates.push(super::NamedValue::new("tr_exp_minus_h", tr_exp));
    report.intermediates.push(super::NamedValue::new("golden_thompson_integral", gt));
    Ok(report.with_links(links))
}

/// Re-evaluates the proof of the two-and-a-half-space relation.
///
/// Same skeleton as the two-space replay with `Z̃ = Σ_k (B_k†B_k⊗1)ρ(B_k†B_k⊗1)`.
/// The B-side Jensen step uses `K_k = ω_k`, whose logarithm is taken on its
/// support; this is exact when `ρ₁₂` is positive definite because every
/// `B_k ⊗ 1` then maps into the support of `ω_k`.
pub fn proof_replay_two_half_space(
    rho: &DensityState,
    a: &Measurement,
    b: &Measurement,
    delta: Option<f64>,
) -> Result<InequalityReport> {
    let (d1, d2) = check_bipartite(rho, a, b)?;
    let state = replay_state(rho, delta)?;
    let theorem = super::two_half_space(&state, a, b)?;
    let c_inf = theorem.term("c_infinity").expect("recorded by two_half_space");
    let c2 = c_inf * c_inf;
    let id1 = ComplexMatrix::identity(d1);
    let id2 = ComplexMatrix::identity(d2);

    pd(state.matrix(), "ρ₁₂", delta)?;
    let rho2 = state.marginal(&[1])?.matrix().clone();
    let e2 = pd(&rho2, "ρ₂", delta)?;
    let sigmas = post_measurement_marginals(&state, a, 0, &[1])?;
    let sigma_logs = sigmas
        .iter()
        .enumerate()
        .map(|(j, s)| pd(s, &format!("σ_{j}"), delta)?.apply(f64::ln))
        .collect::<Result<Vec<_>>>()?;
    let omegas = post_measurement_operators(&state, b, 0)?;
    let omega_logs = omegas
        .iter()
        .map(|w| {
            matrix::hermitian_eig(w)?.apply(|x| if x > REPLAY_PD_FLOOR { x.ln() } else { 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;

    let a_ops: Vec<_> = a.ops().iter().map(|op| matrix::kron(op, &id2)).collect();
    let b_ops: Vec<_> = b.ops().iter().map(|op| matrix::kron(op, &id2)).collect();
    let lift_all = |ms: &[ComplexMatrix]| ms.iter().map(|m| lifted(&id1, m)).collect::<Vec<_>>();
    let davis_a = davis_link("davis_A", state.matrix(), &a_ops, &lift_all(&sigmas), &lift_all(&sigma_logs))?;
    let davis_b = davis_link("davis_B", state.matrix(), &b_ops, &omegas, &omega_logs)?;

    let e_ops = a.effects();
    let f_lifted: Vec<_> = b.effects().iter().map(|f| matrix::kron(f, &id2)).collect();
    let x = matrix::sum(e_ops.iter().zip(&sigmas).map(|(e, s)| matrix::kron(e, s)).collect::<Vec<_>>().iter())
        .expect("at least one outcome");
    let z_parts: Vec<_> = f_lifted.iter().map(|f| f.conjugate(state.matrix())).collect();
    let z = matrix::sum(z_parts.iter()).expect("at least one outcome");

    let ln_rho2 = e2.apply(f64::ln)?;
    let h = (&(&lifted(&id1, &ln_rho2) - &davis_a.log_inner) - &davis_b.log_inner).hermitian_part();
    let s12 = von_neumann(state.matrix(), false)?;
    let energy = state.matrix().trace_product(&h).re - s12;
    let mut links = Vec::new();
    let operator_mins = [davis_a.operator_min, davis_b.operator_min];
    links.push(davis_a.link);
    links.push(davis_b.link);
    let theorem_lhs = theorem.slack - 2.0 * c_inf.ln();
    links.push(inequality_link("scalar_step", theorem_lhs, energy));
    let log_z = log_partition(&h)?;
    links.push(inequality_link("gibbs_variational", energy, -log_z));
    let tr_exp = log_z.exp();

    let ey = matrix::hermitian_eig(&lifted(&id1, &rho2))?;
    let gt = resolvent_pair_integral(&x, &ey, &z);
    links.push(inequality_link("golden_thompson", gt, tr_exp));

    // M_jk = B_k A_j†A_j B_k†
    let mut weighted = 0.0;
    let mut plain = 0.0;
    let mut operator_gap = f64::INFINITY;
    let mut m_ops = Vec::new();
    for (e, s) in e_ops.iter().zip(&sigmas) {
        let lifted_sigma = lifted(&id1, s);
        let mut row = Vec::new();
        for (bk, omega) in b.ops().iter().zip(&omegas) {
            let m = bk.conjugate(e).hermitian_part();
            let shifted = &id1.scale(c2) - &m;
            operator_gap = operator_gap.min(matrix::hermitian_eig(&shifted)?.min());
            weighted += resolvent_pair_integral(&matrix::kron(&m, s), &ey, omega);
            plain += resolvent_pair_integral(&lifted_sigma, &ey, omega);
            row.push(m);
        }
        m_ops.push(row);
    }
    links.push(identity_link("integral_decomposition", gt, weighted));
    links.push(inequality_link("operator_bound", operator_gap, 0.0));
    links.push(inequality_link("overlap_bound", c2 * plain, weighted));
    links.push(identity_link("resolvent_normalization", plain, 1.0));
    links.push(inequality_link("conclusion", c2, tr_exp));

    for t in REPLAY_SAMPLE_TIMES {
        let r = e2.reconstruct_with(&e2.eigenvalues.iter().map(|m| 1.0 / (m + t)).collect::<Vec<_>>());
        let big_r = lifted(&id1, &r);
        let mut cyclicity = Vec::new();
        let mut bound = Vec::new();
        let mut d_sum = 0.0;
        for ((e, s), row) in e_ops.iter().zip(&sigmas).zip(&m_ops) {
            let left = &matrix::kron(e, s) * &big_r;
            let lifted_sigma = lifted(&id1, s);
            for ((zk, omega), m) in z_parts.iter().zip(&omegas).zip(row) {
                let q = &(&big_r * omega) * &big_r;
                let d = &lifted_sigma * &q;
                let tr_d = d.trace().re;
                let tr_c = (&left * &(zk * &big_r)).trace().re;
                let rotated = (&matrix::kron(m, &id2) * &d).trace().re;
                cyclicity.push((tr_c, rotated));
                bound.push((c2 * tr_d, tr_c));
                d_sum += tr_d;
            }
        }
        let (l, rr) = worst_identity(&cyclicity);
        links.push(identity_link(&format!("cyclicity@t={t}"), l, rr));
        let (l, rr) = worst_inequality(&bound);
        links.push(inequality_link(&format!("pointwise_bound@t={t}"), l, rr));
        let rho2_r = &rho2 * &r;
        links.push(identity_link(&format!("d_sum@t={t}"), d_sum, (&rho2_r * &rho2_r).trace().re));
    }

    let mut report = InequalityReport {
        theorem: Theorem::ProofReplay2Half,
        ..theorem
    };
    report.instance.regularization_delta = delta;
    report.intermediates.push(super::NamedValue::new("davis_A_operator_min", operator_mins[0]));
    report.intermediates.push(super::NamedValue::new("davis_B_operator_min", operator_mins[1]));
    report.intermediates.push(super::NamedValue::new("tr_exp_minus_h", tr_exp));
    report.intermediates.push(super::NamedValue::new("golden_thompson_integral", gt));
    Ok(report.with_links(links))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{dft_measurement, random_measurement, standard_measurement};
    use crate::states::{maximally_entangled, random_density};

    fn assert_links(r: &InequalityReport) {
        for l in &r.links {
            assert!(l.pass, "{} failed: lhs {} rhs {} gap {}", l.name, l.lhs, l.rhs, l.gap);
        }
        assert!(r.pass);
    }

    #[test]
    fn full_rank_replays_pass_without_regularization() {
        for seed in 0..5 {
            let rho = random_density(&[2, 2], 4, seed).unwrap();
            let a = random_measurement(2, 3, 10 + seed).unwrap();
            let b = random_measurement(2, 2, 20 + seed).unwrap();
            let r2 = proof_replay_two_space(&rho, &a, &b, None).unwrap();
            assert_links(&r2);
            let r25 = proof_replay_two_half_space(&rho, &a, &b, None).unwrap();
            assert_links(&r25);
            assert!(r2.link("trace_factorization@t=1").is_some());
            assert!(r25.link("cyclicity@t=0.1").is_some());
        }
    }

    #[test]
    fn replay_slack_matches_theorem_on_same_state() {
        let rho = random_density(&[2, 3], 6, 3).unwrap();
        let a = random_measurement(2, 3, 4).unwrap();
        let b = random_measurement(2, 3, 5).unwrap();
        let plain = super::super::two_space(&rho, &a, &b).unwrap();
        let replay = proof_replay_two_space(&rho, &a, &b, None).unwrap();
        assert!((plain.slack - replay.slack).abs() < 1e-12);
        assert_eq!(replay.theorem, Theorem::ProofReplay2);
    }

    #[test]
    fn singular_inputs_need_regularization() {
        let phi = maximally_entangled(2).unwrap();
        let a = standard_measurement(2).unwrap();
        let b = dft_measurement(2).unwrap();
        // σ_j are rank one for the maximally entangled state
        let err = proof_replay_two_space(&phi, &a, &b, None).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)), "{err}");
        assert!(matches!(
            proof_replay_two_half_space(&phi, &a, &b, None),
            Err(Error::Precondition(_))
        ));
        let r = proof_replay_two_space(&phi, &a, &b, Some(1e-10)).unwrap();
        assert_links(&r);
        assert_eq!(r.instance.regularization_delta, Some(1e-10));
        let r = proof_replay_two_half_space(&phi, &a, &b, Some(1e-10)).unwrap();
        assert_links(&r);
    }
}
