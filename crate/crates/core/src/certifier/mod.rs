//! Evaluation of the uncertainty relations with quantum side information.
//!
//! All measurements act on factor 0 of the supplied state. Slacks are
//! `Σ lhs − Σ rhs`; a negative slack beyond the tolerance is a violation.

mod replay;
mod report;

pub use replay::{proof_replay_two_half_space, proof_replay_two_space};
pub use report::{ChainLink, InequalityReport, InstanceDigest, LinkKind, NamedValue, Theorem};

use rand::Rng;

use crate::entropy::{
    conditional_entropy, measured_conditional_entropy, post_measurement_entropy_sum, shannon, von_neumann,
};
use crate::error::{Error, Result};
use crate::ingredients::GapResult;
use crate::matrix::C64;
use crate::measurements::{self, c1_constant, c_infinity_constant, Measurement};
use crate::rng;
use crate::states::{self, DensityState};
use crate::tolerances;

fn require_factors(state: &DensityState, n: usize, what: &str) -> Result<()> {
    if state.factor_count() != n {
        return Err(Error::precondition(format!(
            "{what} needs a state with {n} factors, got dims {:?}",
            state.dims()
        )));
    }
    Ok(())
}

fn require_dim(state: &DensityState, m: &Measurement, label: &str) -> Result<()> {
    if m.dim() != state.dims()[0] {
        return Err(Error::dimension(format!(
            "measurement {label} acts on dimension {}, factor 1 has dimension {}",
            m.dim(),
            state.dims()[0]
        )));
    }
    Ok(())
}

fn digest(state: &DensityState, a: &Measurement, b: &Measurement) -> InstanceDigest {
    InstanceDigest {
        dims: state.dims().to_vec(),
        description: format!("A: {} outcomes, B: {} outcomes", a.outcomes(), b.outcomes()),
        ..Default::default()
    }
}

/// `H(1^A|2) + H(1^B|2) ≥ S(1|2) − 2 ln c₁`.
///
/// The slack with `c_∞` in place of `c₁` is recorded as the intermediate
/// `slack_with_c_infinity`; it is not asserted.
pub fn two_space(rho: &DensityState, a: &Measurement, b: &Measurement) -> Result<InequalityReport> {
    require_factors(rho, 2, "two-space relation")?;
    require_dim(rho, a, "A")?;
    require_dim(rho, b, "B")?;
    let h_a = measured_conditional_entropy(rho, a, 0, &[1])?;
    let h_b = measured_conditional_entropy(rho, b, 0, &[1])?;
    let s_cond = conditional_entropy(rho, 0, 1)?;
    let c1 = c1_constant(a, b)?;
    let c_inf = c_infinity_constant(a, b)?;
    let report = InequalityReport::new(
        Theorem::TwoSpace,
        vec![NamedValue::new("H(1^A|2)", h_a), NamedValue::new("H(1^B|2)", h_b)],
        vec![NamedValue::new("S(1|2)", s_cond), NamedValue::new("-2ln(c1)", -2.0 * c1.ln())],
        tolerances::THEOREM,
    );
    let with_c_inf = h_a + h_b - s_cond + 2.0 * c_inf.ln();
    Ok(report
        .with_intermediate("c1", c1)
        .with_intermediate("c_infinity", c_inf)
        .with_intermediate("slack_with_c_infinity", with_c_inf)
        .with_instance(digest(rho, a, b)))
}

/// `H(1^A|2) − Σ_k tr ω_k ln ω_k − S(ρ₁₂) ≥ −2 ln c_∞` with
/// `ω_k = (B_k ⊗ 1) ρ₁₂ (B_k ⊗ 1)†`.
pub fn two_half_space(rho: &DensityState, a: &Measurement, b: &Measurement) -> Result<InequalityReport> {
    require_factors(rho, 2, "two-and-a-half-space relation")?;
    require_dim(rho, a, "A")?;
    require_dim(rho, b, "B")?;
    let h_a = measured_conditional_entropy(rho, a, 0, &[1])?;
    let middle = post_measurement_entropy_sum(rho, b, 0)?;
    let s12 = von_neumann(rho.matrix(), false)?;
    let c_inf = c_infinity_constant(a, b)?;
    Ok(InequalityReport::new(
        Theorem::TwoHalfSpace,
        vec![
            NamedValue::new("H(1^A|2)", h_a),
            NamedValue::new("-sum_k tr w_k ln w_k", middle),
            NamedValue::new("-S(12)", -s12),
        ],
        vec![NamedValue::new("-2ln(c_infinity)", -2.0 * c_inf.ln())],
        tolerances::THEOREM,
    )
    .with_intermediate("c_infinity", c_inf)
    .with_intermediate("B_term", middle - s12)
    .with_instance(digest(rho, a, b)))
}

/// `H(1^A|2) + H(1^B|3) ≥ −2 ln c_∞` on a tripartite state.
pub fn three_space(rho: &DensityState, a: &Measurement, b: &Measurement) -> Result<InequalityReport> {
    require_factors(rho, 3, "three-space relation")?;
    require_dim(rho, a, "A")?;
    require_dim(rho, b, "B")?;
    let h_a = measured_conditional_entropy(rho, a, 0, &[1])?;
    let h_b = measured_conditional_entropy(rho, b, 0, &[2])?;
    let c_inf = c_infinity_constant(a, b)?;
    Ok(InequalityReport::new(
        Theorem::ThreeSpace,
        vec![NamedValue::new("H(1^A|2)", h_a), NamedValue::new("H(1^B|3)", h_b)],
        vec![NamedValue::new("-2ln(c_infinity)", -2.0 * c_inf.ln())],
        tolerances::THEOREM,
    )
    .with_intermediate("c_infinity", c_inf)
    .with_instance(digest(rho, a, b)))
}

fn basis_distribution(rho: &DensityState, basis: &[Vec<C64>]) -> Vec<f64> {
    let m = rho.matrix();
    basis
        .iter()
        .map(|v| {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..v.len() {
                for c in 0..v.len() {
                    acc += v[r].conj() * m[(r, c)] * v[c];
                }
            }
            acc.re
        })
        .collect()
}

/// `H(A) + H(B) ≥ −2 ln max |⟨a_j, b_k⟩|` for a single-factor state.
///
/// The intermediate `slack_with_side_entropy` is the slack of the sharper
/// single-system form `H(A) + H(B) ≥ S(ρ) − 2 ln max |⟨a_j, b_k⟩|`.
pub fn maassen_uffink(rho: &DensityState, basis_a: &[Vec<C64>], basis_b: &[Vec<C64>]) -> Result<InequalityReport> {
    require_factors(rho, 1, "Maassen–Uffink relation")?;
    // from_basis validates orthonormality and size
    let ma = measurements::from_basis(basis_a)?;
    measurements::from_basis(basis_b)?;
    require_dim(rho, &ma, "A")?;
    let h_a = shannon(&basis_distribution(rho, basis_a));
    let h_b = shannon(&basis_distribution(rho, basis_b));
    let overlap = measurements::max_overlap(basis_a, basis_b);
    let s = von_neumann(rho.matrix(), false)?;
    let report = InequalityReport::new(
        Theorem::MaassenUffink,
        vec![NamedValue::new("H(A)", h_a), NamedValue::new("H(B)", h_b)],
        vec![NamedValue::new("-2ln(max_overlap)", -2.0 * overlap.ln())],
        tolerances::THEOREM,
    );
    let side = report.slack - s;
    Ok(report
        .with_intermediate("max_overlap", overlap)
        .with_intermediate("S(rho)", s)
        .with_intermediate("slack_with_side_entropy", side)
        .with_instance(InstanceDigest {
            dims: rho.dims().to_vec(),
            description: format!("two bases of dimension {}", basis_a.len()),
            ..Default::default()
        }))
}

/// Compares `H(1^B|3)` on the purification of `ρ₁₂` with
/// `−Σ_k tr ω_k ln ω_k − S(ρ₁₂)` computed on `ρ₁₂` itself.
///
/// The returned gap is `−|difference|`, so `pass ⇔ |difference| ≤ 1e-7`.
pub fn purification_reduction_check(rho: &DensityState, b: &Measurement) -> Result<GapResult> {
    require_factors(rho, 2, "purification reduction")?;
    require_dim(rho, b, "B")?;
    let psi = rho.purify()?;
    let on_purification = measured_conditional_entropy(&psi, b, 0, &[2])?;
    let direct = post_measurement_entropy_sum(rho, b, 0)? - von_neumann(rho.matrix(), false)?;
    let diff = (on_purification - direct).abs();
    Ok(GapResult::new(on_purification, direct, -diff, tolerances::PURIFICATION))
}

/// `H(1^A|rest)` on the mixture minus the mixture of the values.
pub fn concavity_gap(rho: &DensityState, sigma: &DensityState, lambda: f64, a: &Measurement) -> Result<GapResult> {
    let conditioning: Vec<usize> = (1..rho.factor_count()).collect();
    let mix = rho.mix(sigma, lambda)?;
    let h = |s: &DensityState| measured_conditional_entropy(s, a, 0, &conditioning);
    let lhs = h(&mix)?;
    let rhs = lambda * h(rho)? + (1.0 - lambda) * h(sigma)?;
    Ok(GapResult::new(lhs, rhs, lhs - rhs, tolerances::CONCAVITY))
}

/// Concavity of `ρ ↦ H(1^A|2)` over random mixtures. The aggregate carries
/// the sides of the worst trial and the minimum gap.
pub fn concavity_suite(dims: &[usize], a: &Measurement, trials: usize, seed: u64) -> Result<GapResult> {
    if trials == 0 {
        return Err(Error::precondition("concavity suite needs at least one trial"));
    }
    if dims.len() < 2 {
        return Err(Error::precondition("concavity needs a conditioning factor"));
    }
    let total: usize = dims.iter().product();
    let mut worst: Option<GapResult> = None;
    for trial in 0..trials {
        let mut r = rng::trial(seed, trial as u64);
        let rank_rho = r.random_range(1..=total);
        let rank_sigma = r.random_range(1..=total);
        let rho = states::random_density_with(&mut r, dims, rank_rho)?;
        let sigma = states::random_density_with(&mut r, dims, rank_sigma)?;
        let lambda: f64 = r.random_range(0.0..=1.0);
        let g = concavity_gap(&rho, &sigma, lambda, a)?;
        if worst.is_none_or(|w| g.gap < w.gap) {
            worst = Some(g);
        }
    }
    Ok(worst.expect("trials >= 1"))
}

/// Result of searching for states where the two-space relation fails once
/// `c₁` is replaced by `c_∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct CInfinityExploration {
    pub min_slack: f64,
    pub trial: usize,
    pub violations: usize,
    pub trials: usize,
}

/// Fuzzes the `c_∞` variant of the two-space relation with general Kraus
/// measurements. Purely exploratory: violations are counted, not errors.
pub fn explore_c_infinity_variant(d1: usize, d2: usize, trials: usize, seed: u64) -> Result<CInfinityExploration> {
    let mut best = CInfinityExploration {
        min_slack: f64::INFINITY,
        trial: 0,
        violations: 0,
        trials,
    };
    for trial in 0..trials {
        let mut r = rng::trial(seed, trial as u64);
        let rank = r.random_range(1..=d1 * d2);
        let rho = states::random_density_with(&mut r, &[d1, d2], rank)?;
        let na = r.random_range(2..=4);
        let nb = r.random_range(2..=4);
        let a = measurements::random_measurement_with(&mut r, d1, na)?;
        let b = measurements::random_measurement_with(&mut r, d1, nb)?;
        let report = two_space(&rho, &a, &b)?;
        let s = report.term("slack_with_c_infinity").expect("recorded by two_space");
        if s < -tolerances::THEOREM {
            best.violations += 1;
        }
        if s < best.min_slack {
            best.min_slack = s;
            best.trial = trial;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{dft_measurement, dft_vectors, standard_basis_vectors, standard_measurement};
    use crate::states::{maximally_entangled, product_state, random_density};

    #[test]
    fn maximally_entangled_mub_is_tight() {
        for d in 2..=5 {
            let phi = maximally_entangled(d).unwrap();
            let r = two_space(&phi, &standard_measurement(d).unwrap(), &dft_measurement(d).unwrap()).unwrap();
            assert!(r.slack.abs() < 1e-8, "d={d} slack {}", r.slack);
            assert!(r.pass);
        }
    }

    #[test]
    fn slack_recomputes_from_terms() {
        let rho = random_density(&[2, 3], 3, 1).unwrap();
        let a = measurements::random_measurement(2, 3, 2).unwrap();
        let b = measurements::random_measurement(2, 2, 3).unwrap();
        for r in [
            two_space(&rho, &a, &b).unwrap(),
            two_half_space(&rho, &a, &b).unwrap(),
            three_space(&rho.purify().unwrap(), &a, &b).unwrap(),
        ] {
            assert!((r.slack - r.recomputed_slack()).abs() <= 1e-12);
            assert_eq!(r.pass, r.slack >= -r.tolerance);
        }
    }

    #[test]
    fn c_infinity_slack_never_exceeds_c1_slack() {
        for seed in 0..20 {
            let rho = random_density(&[2, 2], 4, seed).unwrap();
            let a = measurements::random_measurement(2, 3, 100 + seed).unwrap();
            let b = measurements::random_measurement(2, 3, 200 + seed).unwrap();
            let r = two_space(&rho, &a, &b).unwrap();
            assert!(r.slack >= r.term("slack_with_c_infinity").unwrap() - 1e-12);
        }
    }

    #[test]
    fn unitary_b_collapses_two_half_space() {
        let rho = random_density(&[2, 2], 3, 5).unwrap();
        let a = measurements::random_measurement(2, 3, 6).unwrap();
        let b = Measurement::unitary(measurements::random_unitary(2, 7).unwrap()).unwrap();
        let r = two_half_space(&rho, &a, &b).unwrap();
        let s12 = von_neumann(rho.matrix(), false).unwrap();
        assert!((r.term("-sum_k tr w_k ln w_k").unwrap() - s12).abs() < 1e-10);
        let h_a = r.term("H(1^A|2)").unwrap();
        let c_inf = r.term("c_infinity").unwrap();
        assert!((r.slack - (h_a + 2.0 * c_inf.ln())).abs() < 1e-10);
        assert!(r.pass);
    }

    #[test]
    fn two_half_space_product_scalar_oracle() {
        // ρ₁ ⊗ ρ₂ with qubit bases; every term reduces to scalars.
        let r1 = random_density(&[2], 2, 8).unwrap();
        let r2 = random_density(&[2], 2, 9).unwrap();
        let rho = product_state(&r1, &r2).unwrap();
        let va = measurements::random_orthonormal_basis(2, 10).unwrap();
        let vb = measurements::random_orthonormal_basis(2, 11).unwrap();
        let a = measurements::from_basis(&va).unwrap();
        let b = measurements::from_basis(&vb).unwrap();
        let r = two_half_space(&rho, &a, &b).unwrap();

        let pa = basis_distribution(&r1, &va);
        let pb = basis_distribution(&r1, &vb);
        let s2 = von_neumann(r2.matrix(), false).unwrap();
        let s1 = von_neumann(r1.matrix(), false).unwrap();
        // ω_k = |b_k⟩⟨b_k| p_k ⊗ ρ₂, so −Σ tr ω ln ω = H(p^B) + S(ρ₂)
        let expected = shannon(&pa) + (shannon(&pb) + s2) - (s1 + s2)
            + 2.0 * measurements::max_overlap(&va, &vb).ln();
        assert!((r.slack - expected).abs() < 1e-10);
    }

    #[test]
    fn three_space_product_sign_structure() {
        let r1 = random_density(&[2], 2, 1).unwrap();
        let r2 = random_density(&[2], 2, 2).unwrap();
        let r3 = random_density(&[3], 3, 3).unwrap();
        let rho = product_state(&product_state(&r1, &r2).unwrap(), &r3).unwrap();
        let a = measurements::haar_basis_measurement(2, 4).unwrap();
        let b = measurements::haar_basis_measurement(2, 5).unwrap();
        let r = three_space(&rho, &a, &b).unwrap();
        assert!(r.term("H(1^A|2)").unwrap() >= 0.0);
        assert!(r.term("H(1^B|3)").unwrap() >= 0.0);
        assert!(r.term("c_infinity").unwrap() <= 1.0 + 1e-12);
        assert!(r.term("-2ln(c_infinity)").unwrap() >= -1e-12);
        assert!(r.pass);
    }

    #[test]
    fn three_space_on_purification_matches_two_half_space() {
        for seed in 0..10 {
            let rho = random_density(&[2, 3], 1 + seed as usize % 6, seed).unwrap();
            let a = measurements::random_measurement(2, 3, 40 + seed).unwrap();
            let b = measurements::random_measurement(2, 2, 80 + seed).unwrap();
            let three = three_space(&rho.purify().unwrap(), &a, &b).unwrap();
            let half = two_half_space(&rho, &a, &b).unwrap();
            assert!((three.slack - half.slack).abs() < 1e-8);
            assert!((three.term("H(1^B|3)").unwrap() - half.term("B_term").unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn maassen_uffink_qubit_example() {
        let rho = DensityState::new(
            crate::matrix::ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
            vec![2],
        )
        .unwrap();
        let r = maassen_uffink(&rho, &standard_basis_vectors(2), &dft_vectors(2)).unwrap();
        assert!(r.term("H(A)").unwrap().abs() < 1e-12);
        assert!((r.term("H(B)").unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((r.term("-2ln(max_overlap)").unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(r.slack.abs() < 1e-12);
    }

    #[test]
    fn maassen_uffink_maximally_mixed() {
        for d in 2..=4 {
            let rho = states::maximally_mixed(&[d]).unwrap();
            let vb = measurements::random_orthonormal_basis(d, d as u64).unwrap();
            let r = maassen_uffink(&rho, &standard_basis_vectors(d), &vb).unwrap();
            let sum = r.term("H(A)").unwrap() + r.term("H(B)").unwrap();
            assert!((sum - 2.0 * (d as f64).ln()).abs() < 1e-10);
            assert!(r.pass);
        }
    }

    #[test]
    fn maassen_uffink_matches_two_space_with_trivial_factor() {
        for seed in 0..10 {
            let rho = random_density(&[3], 1 + seed as usize % 3, seed).unwrap();
            let va = measurements::random_orthonormal_basis(3, 20 + seed).unwrap();
            let vb = measurements::random_orthonormal_basis(3, 40 + seed).unwrap();
            let mu = maassen_uffink(&rho, &va, &vb).unwrap();
            let trivial = states::maximally_mixed(&[1]).unwrap();
            let lifted = product_state(&rho, &trivial).unwrap();
            let two = two_space(
                &lifted,
                &measurements::from_basis(&va).unwrap(),
                &measurements::from_basis(&vb).unwrap(),
            )
            .unwrap();
            assert!((two.slack - mu.term("slack_with_side_entropy").unwrap()).abs() < 1e-9);
            if seed % 3 == 0 {
                // pure input: no side entropy, the two slacks coincide
                assert!((two.slack - mu.slack).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn maassen_uffink_rejects_non_orthonormal() {
        let rho = states::maximally_mixed(&[2]).unwrap();
        let bad = vec![
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ];
        assert!(maassen_uffink(&rho, &standard_basis_vectors(2), &bad).is_err());
    }

    #[test]
    fn purification_reduction_cases() {
        let pure = states::random_pure(&[2, 2], 1).unwrap();
        let b = measurements::random_measurement(2, 3, 2).unwrap();
        let g = purification_reduction_check(&pure, &b).unwrap();
        assert!(g.pass);
        let expected = post_measurement_entropy_sum(&pure, &b, 0).unwrap();
        assert!((g.rhs - expected).abs() < 1e-8);

        let rho = random_density(&[2, 2], 2, 3).unwrap();
        let u = Measurement::unitary(measurements::random_unitary(2, 4).unwrap()).unwrap();
        let g = purification_reduction_check(&rho, &u).unwrap();
        // one outcome: H(1^B|3) = S(ρ₃) − S(ρ₃) and −tr ω ln ω = S(ρ₁₂)
        assert!(g.lhs.abs() < 1e-9);
        assert!(g.rhs.abs() < 1e-9);
        assert!(g.gap.abs() <= 1e-9);
    }

    #[test]
    fn concavity_trivial_mixtures() {
        let rho = random_density(&[2, 2], 3, 1).unwrap();
        let sigma = random_density(&[2, 2], 2, 2).unwrap();
        let a = measurements::random_measurement(2, 3, 3).unwrap();
        assert!(concavity_gap(&rho, &rho, 0.3, &a).unwrap().gap.abs() < 1e-12);
        assert!(concavity_gap(&rho, &sigma, 0.0, &a).unwrap().gap.abs() < 1e-12);
        assert!(concavity_gap(&rho, &sigma, 1.0, &a).unwrap().gap.abs() < 1e-12);
    }

    #[test]
    fn concavity_suite_small() {
        let a = measurements::random_measurement(2, 3, 9).unwrap();
        let g = concavity_suite(&[2, 2], &a, 50, 7).unwrap();
        assert!(g.pass, "min gap {}", g.gap);
        assert!(concavity_suite(&[2, 2], &a, 0, 7).is_err());
    }

    #[test]
    fn dimension_errors() {
        let rho = random_density(&[2, 3], 2, 1).unwrap();
        let a3 = standard_measurement(3).unwrap();
        let a2 = standard_measurement(2).unwrap();
        assert!(matches!(two_space(&rho, &a3, &a2), Err(Error::Dimension(_))));
        assert!(matches!(three_space(&rho, &a2, &a2), Err(Error::Precondition(_))));
    }
}
