//! Density matrices on tensor products of up to three factors.

use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, C64};
use crate::rng;
use crate::tolerances;

/// Positive semidefinite, unit-trace operator together with the dimensions of
/// its tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityState {
    /// Validates and wraps a matrix. Near-Hermitian input is symmetrized.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(Error::precondition(format!(
                "a state needs between one and three factors, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::precondition("factor dimensions must be positive"));
        }
        let total: usize = dims.iter().product();
        if matrix.rows() != total || matrix.cols() != total {
            return Err(Error::dimension(format!(
                "dims {dims:?} need a {total}x{total} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let matrix = matrix.symmetrized()?;
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tolerances::TRACE_ABS {
            return Err(Error::precondition(format!(
                "density matrix trace is {trace:.12}, expected 1"
            )));
        }
        let lambda_min = matrix::hermitian_eig(&matrix)?.min();
        if lambda_min < -tolerances::PSD_ABS {
            return Err(Error::precondition(format!(
                "density matrix has negative eigenvalue {lambda_min:.3e}"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn from_pure_vector(psi: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::precondition("state vector must be non-zero"));
        }
        let m = ComplexMatrix::outer(psi, psi).scale(1.0 / norm2);
        Self::new(m, dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn factor_count(&self) -> usize {
        self.dims.len()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Reduced state on the listed factors, in increasing factor order.
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityState> {
        if keep.is_empty() {
            return Err(Error::precondition("marginal needs at least one factor to keep"));
        }
        if let Some(&bad) = keep.iter().find(|&&f| f >= self.dims.len()) {
            return Err(Error::dimension(format!(
                "factor {bad} out of range for {} factors",
                self.dims.len()
            )));
        }
        let traced: Vec<usize> = (0..self.dims.len()).filter(|f| !keep.contains(f)).collect();
        let kept_dims: Vec<usize> = (0..self.dims.len())
            .filter(|f| keep.contains(f))
            .map(|f| self.dims[f])
            .collect();
        let m = matrix::partial_trace(&self.matrix, &self.dims, &traced)?;
        Ok(Self {
            matrix: m.hermitian_part(),
            dims: kept_dims,
        })
    }

    /// Same state with its factors reordered; factor `i` of the result is
    /// factor `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<DensityState> {
        let m = matrix::permute_factors(&self.matrix, &self.dims, order)?;
        Ok(Self {
            matrix: m,
            dims: order.iter().map(|&f| self.dims[f]).collect(),
        })
    }

    /// `(1 − δ)ρ + δ·1/d`.
    pub fn regularized(&self, delta: f64) -> Result<DensityState> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::precondition(format!(
                "regularization weight {delta} outside [0, 1]"
            )));
        }
        let d = self.dim() as f64;
        let m = &self.matrix.scale(1.0 - delta) + &ComplexMatrix::identity(self.dim()).scale(delta / d);
        Ok(Self {
            matrix: m,
            dims: self.dims.clone(),
        })
    }

    /// `λρ + (1 − λ)σ` on identical factor dimensions.
    pub fn mix(&self, other: &DensityState, lambda: f64) -> Result<DensityState> {
        if self.dims != other.dims {
            return Err(Error::dimension(format!(
                "cannot mix states on {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::precondition(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let m = &self.matrix.scale(lambda) + &other.matrix.scale(1.0 - lambda);
        Ok(Self {
            matrix: m,
            dims: self.dims.clone(),
        })
    }

    /// Pure state `|Ψ⟩ = Σ √λ_i |v_i⟩ ⊗ |i⟩` on `dims + [r]`, where `r` is the
    /// number of eigenvalues above the rank cutoff.
    pub fn purify(&self) -> Result<DensityState> {
        if self.dims.len() > 2 {
            return Err(Error::precondition(
                "purification adds a factor; input must have at most two",
            ));
        }
        let eig = matrix::hermitian_eig(&self.matrix)?;
        let support: Vec<usize> = (0..eig.dim())
            .filter(|&i| eig.eigenvalues[i] > tolerances::PURIFY_RANK)
            .collect();
        let r = support.len().max(1);
        let d = self.dim();
        let mut psi = vec![C64::new(0.0, 0.0); d * r];
        for (slot, &i) in support.iter().enumerate() {
            let weight = eig.eigenvalues[i].sqrt();
            for a in 0..d {
                psi[a * r + slot] = eig.eigenvectors[(a, i)] * weight;
            }
        }
        let mut dims = self.dims.clone();
        dims.push(r);
        Self::from_pure_vector(&psi, dims)
    }
}

/// `ρ = GG†/tr(GG†)` with `G` a `dim × rank` Ginibre matrix drawn from `seed`.
pub fn random_density(dims: &[usize], rank: usize, seed: u64) -> Result<DensityState> {
    let mut rng = rng::seeded(seed);
    random_density_with(&mut rng, dims, rank)
}

/// As [`random_density`], drawing from an existing generator.
pub fn random_density_with(rng: &mut rng::Rng, dims: &[usize], rank: usize) -> Result<DensityState> {
    let total: usize = dims.iter().product();
    if rank == 0 || rank > total {
        return Err(Error::precondition(format!(
            "rank {rank} outside 1..={total} for dims {dims:?}"
        )));
    }
    let g = rng::ginibre(rng, total, rank);
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityState::new(gg.scale(1.0 / tr), dims.to_vec())
}

pub fn random_pure(dims: &[usize], seed: u64) -> Result<DensityState> {
    random_density(dims, 1, seed)
}

/// `Σ_i |i⟩⊗|i⟩/√d` on `(d, d)`.
pub fn maximally_entangled(d: usize) -> Result<DensityState> {
    if d < 2 {
        return Err(Error::precondition(format!(
            "maximally entangled state needs d >= 2, got {d}"
        )));
    }
    let mut psi = vec![C64::new(0.0, 0.0); d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        psi[i * d + i] = C64::new(amp, 0.0);
    }
    DensityState::from_pure_vector(&psi, vec![d, d])
}

/// `1/d` on the given factors.
pub fn maximally_mixed(dims: &[usize]) -> Result<DensityState> {
    let total: usize = dims.iter().product();
    DensityState::new(
        ComplexMatrix::identity(total).scale(1.0 / total as f64),
        dims.to_vec(),
    )
}

/// `ρ_a ⊗ ρ_b` with concatenated factor dimensions.
pub fn product_state(a: &DensityState, b: &DensityState) -> Result<DensityState> {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    DensityState::new(matrix::kron(&a.matrix, &b.matrix), dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::von_neumann;

    #[test]
    fn rank_one_is_pure() {
        for seed in 0..5 {
            let rho = random_density(&[2, 3], 1, seed).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-10);
            let rho = random_pure(&[3, 3], seed).unwrap();
            assert!(von_neumann(rho.matrix(), false).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let a = random_density(&[2, 2], 4, 1).unwrap();
        let b = random_density(&[2, 2], 4, 1).unwrap();
        assert_eq!(a.matrix().as_slice(), b.matrix().as_slice());
        let c = random_density(&[2, 2], 4, 2).unwrap();
        assert_ne!(a.matrix().as_slice(), c.matrix().as_slice());
    }

    #[test]
    fn numerical_rank_bounded_by_requested_rank() {
        for seed in 0..100 {
            let rank = 1 + (seed as usize % 6);
            let rho = random_density(&[2, 3], rank, seed).unwrap();
            let eig = matrix::hermitian_eig(rho.matrix()).unwrap();
            let count = eig.eigenvalues.iter().filter(|&&l| l > 1e-8).count();
            assert!(count <= rank);
        }
    }

    #[test]
    fn rank_out_of_range() {
        assert!(random_density(&[2, 2], 0, 0).is_err());
        assert!(random_density(&[2, 2], 5, 0).is_err());
    }

    #[test]
    fn pure_marginals_share_entropy() {
        for d in 2..=4 {
            let rho = random_pure(&[d, d], d as u64).unwrap();
            let s1 = von_neumann(rho.marginal(&[0]).unwrap().matrix(), false).unwrap();
            let s2 = von_neumann(rho.marginal(&[1]).unwrap().matrix(), false).unwrap();
            assert!((s1 - s2).abs() < 1e-8);
        }
    }

    #[test]
    fn maximally_entangled_cases() {
        let phi = maximally_entangled(2).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if (r == 0 || r == 3) && (c == 0 || c == 3) { 0.5 } else { 0.0 };
                assert!((phi.matrix()[(r, c)] - C64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
        for d in 2..=5 {
            let phi = maximally_entangled(d).unwrap();
            let m2 = phi.marginal(&[1]).unwrap();
            let expected = ComplexMatrix::identity(d).scale(1.0 / d as f64);
            assert!(m2.matrix().max_abs_diff(&expected) < 1e-15);
        }
        assert!(maximally_entangled(1).is_err());
    }

    #[test]
    fn product_state_properties() {
        let a = random_pure(&[2], 1).unwrap();
        let b = random_pure(&[3], 2).unwrap();
        let p = product_state(&a, &b).unwrap();
        assert!((p.purity() - 1.0).abs() < 1e-10);
        assert_eq!(p.dims(), &[2, 3]);

        let a = random_density(&[2], 2, 3).unwrap();
        let b = random_density(&[3], 3, 4).unwrap();
        let p = product_state(&a, &b).unwrap();
        let sa = von_neumann(a.matrix(), false).unwrap();
        let sb = von_neumann(b.matrix(), false).unwrap();
        let sp = von_neumann(p.matrix(), false).unwrap();
        assert!((sp - sa - sb).abs() < 1e-8);
        assert!(p.marginal(&[0]).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-12);
    }

    #[test]
    fn purify_pure_input() {
        let rho = random_pure(&[2, 2], 5).unwrap();
        let psi = rho.purify().unwrap();
        assert_eq!(psi.dims(), &[2, 2, 1]);
        assert!(psi.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn purify_reproduces_state_and_entropy() {
        let rho = random_density(&[2, 3], 4, 8).unwrap();
        let psi = rho.purify().unwrap();
        assert_eq!(psi.dims(), &[2, 3, 4]);
        assert!((psi.purity() - 1.0).abs() < 1e-10);
        let back = psi.marginal(&[0, 1]).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-9);
        let s3 = von_neumann(psi.marginal(&[2]).unwrap().matrix(), false).unwrap();
        let s12 = von_neumann(rho.matrix(), false).unwrap();
        assert!((s3 - s12).abs() < 1e-8);
    }

    #[test]
    fn purify_round_trip_many() {
        for seed in 0..100 {
            let d1 = 2 + (seed as usize % 2);
            let d2 = 2 + (seed as usize / 2 % 2);
            let rank = 1 + (seed as usize % (d1 * d2));
            let rho = random_density(&[d1, d2], rank, 1000 + seed).unwrap();
            let back = rho.purify().unwrap().marginal(&[0, 1]).unwrap();
            assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn marginal_errors() {
        let rho = maximally_entangled(2).unwrap();
        assert!(rho.marginal(&[]).is_err());
        assert!(rho.marginal(&[2]).is_err());
    }

    #[test]
    fn constructor_rejects_invalid() {
        let bad_trace = ComplexMatrix::identity(2).scale(0.45);
        assert!(DensityState::new(bad_trace, vec![2]).is_err());
        let negative = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(DensityState::new(negative, vec![2]).is_err());
        assert!(DensityState::new(ComplexMatrix::identity(4).scale(0.25), vec![2, 3]).is_err());
    }

    #[test]
    fn regularize_and_mix() {
        let rho = random_pure(&[2, 2], 3).unwrap();
        let reg = rho.regularized(1e-10).unwrap();
        let eig = matrix::hermitian_eig(reg.matrix()).unwrap();
        assert!(eig.min() > 0.0);
        assert!((reg.matrix().trace().re - 1.0).abs() < 1e-14);
        let sigma = random_density(&[2, 2], 4, 4).unwrap();
        let m = rho.mix(&sigma, 1.0).unwrap();
        assert_eq!(m.matrix(), rho.matrix());
    }
}
