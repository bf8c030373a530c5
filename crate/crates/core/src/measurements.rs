//! Measurements on factor 1 and the incompatibility constants `c₁`, `c_∞`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, C64};
use crate::rng;
use crate::tolerances;

/// Operators `{A_j}` with `Σ A_j†A_j = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    ops: Vec<ComplexMatrix>,
    labels: Option<Vec<String>>,
}

impl Measurement {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::precondition("a measurement needs at least one operator"))?;
        let d = first.rows();
        if let Some(bad) = ops.iter().position(|a| a.rows() != d || a.cols() != d) {
            return Err(Error::dimension(format!(
                "operator {bad} is {}x{}, expected {d}x{d}",
                ops[bad].rows(),
                ops[bad].cols()
            )));
        }
        let m = Self { ops, labels: None };
        let residual = m.completeness_residual();
        if residual > tolerances::COMPLETENESS {
            return Err(Error::precondition(format!(
                "measurement is not complete: ‖Σ A†A − 1‖ = {residual:.3e}"
            )));
        }
        Ok(m)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.ops.len() {
            return Err(Error::dimension(format!(
                "{} labels for {} outcomes",
                labels.len(),
                self.ops.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// One outcome with a unitary Kraus operator.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn outcomes(&self) -> usize {
        self.ops.len()
    }

    /// The effects `A_j†A_j`.
    pub fn effects(&self) -> Vec<ComplexMatrix> {
        self.ops.iter().map(|a| (&a.adjoint() * a).hermitian_part()).collect()
    }

    pub fn completeness_residual(&self) -> f64 {
        let total = matrix::sum(self.effects().iter()).expect("non-empty");
        total.max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }

    /// `{A_j V}`; leaves every effect `A_j†A_j` conjugated by `V`.
    pub fn right_multiplied(&self, v: &ComplexMatrix) -> Result<Self> {
        let ops = self.ops.iter().map(|a| a.matmul(v)).collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    /// `{V A_j}`; leaves every effect unchanged when `V` is unitary.
    pub fn left_multiplied(&self, v: &ComplexMatrix) -> Result<Self> {
        let ops = self.ops.iter().map(|a| v.matmul(a)).collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    /// True iff every operator has exactly one singular value above the
    /// relative cutoff.
    pub fn is_rank_one(&self) -> bool {
        self.ops.iter().all(|a| {
            let sv = matrix::singular_values(a);
            let top = sv.first().copied().unwrap_or(0.0);
            top > 0.0 && sv.iter().filter(|&&s| s > tolerances::RANK_ONE_REL * top).count() == 1
        })
    }
}

fn check_orthonormal(vectors: &[Vec<C64>]) -> Result<usize> {
    let d = vectors.len();
    if d == 0 {
        return Err(Error::precondition("empty basis"));
    }
    if let Some(bad) = vectors.iter().position(|v| v.len() != d) {
        return Err(Error::dimension(format!(
            "basis vector {bad} has length {}, expected {d}",
            vectors[bad].len()
        )));
    }
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let ip: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (ip - expected).norm() > tolerances::ORTHONORMAL {
                return Err(Error::precondition(format!(
                    "basis is not orthonormal: ⟨v{i}, v{j}⟩ = {:.6}{:+.6}i",
                    ip.re, ip.im
                )));
            }
        }
    }
    Ok(d)
}

/// Rank-one measurement `A_j = |a_j⟩⟨a_j|` from an orthonormal basis.
pub fn from_basis(vectors: &[Vec<C64>]) -> Result<Measurement> {
    check_orthonormal(vectors)?;
    Measurement::new(vectors.iter().map(|v| ComplexMatrix::outer(v, v)).collect())
}

pub fn standard_basis_vectors(d: usize) -> Vec<Vec<C64>> {
    (0..d)
        .map(|i| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[i] = C64::new(1.0, 0.0);
            v
        })
        .collect()
}

/// Kernel rows `x ↦ e^{2πikx/d}/√d`, one per frequency `k`.
pub fn dft_vectors(d: usize) -> Vec<Vec<C64>> {
    let norm = 1.0 / (d as f64).sqrt();
    (0..d)
        .map(|k| {
            (0..d)
                .map(|x| C64::from_polar(norm, 2.0 * PI * ((k * x) % d) as f64 / d as f64))
                .collect()
        })
        .collect()
}

pub fn standard_measurement(d: usize) -> Result<Measurement> {
    from_basis(&standard_basis_vectors(d))
}

/// Rank-one measurement onto the discrete Fourier basis.
pub fn dft_measurement(d: usize) -> Result<Measurement> {
    if d < 2 {
        return Err(Error::precondition(format!("DFT measurement needs d >= 2, got {d}")));
    }
    from_basis(&dft_vectors(d))
}

/// Haar-random orthonormal basis: QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_orthonormal_basis(d: usize, seed: u64) -> Result<Vec<Vec<C64>>> {
    random_orthonormal_basis_with(&mut rng::seeded(seed), d)
}

pub fn random_orthonormal_basis_with(rng: &mut rng::Rng, d: usize) -> Result<Vec<Vec<C64>>> {
    if d == 0 {
        return Err(Error::precondition("basis dimension must be at least 1"));
    }
    let g = rng::ginibre(rng, d, d);
    let qr = g.to_nalgebra().qr();
    let q = qr.q();
    let r = qr.r();
    Ok((0..d)
        .map(|c| {
            let diag = r[(c, c)];
            let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { C64::new(1.0, 0.0) };
            (0..d).map(|row| q[(row, c)] * phase).collect()
        })
        .collect())
}

/// Haar-random unitary whose columns are [`random_orthonormal_basis`].
pub fn random_unitary(d: usize, seed: u64) -> Result<ComplexMatrix> {
    let v = random_orthonormal_basis(d, seed)?;
    Ok(ComplexMatrix::from_fn(d, d, |r, c| v[c][r]))
}

pub fn haar_basis_measurement(d: usize, seed: u64) -> Result<Measurement> {
    from_basis(&random_orthonormal_basis(d, seed)?)
}

/// General Kraus measurement: `A_j = G_j M^{-1/2}` with `M = Σ G_j†G_j`.
pub fn random_measurement(d: usize, n: usize, seed: u64) -> Result<Measurement> {
    if n == 0 || d == 0 {
        return Err(Error::precondition("need at least one outcome and d >= 1"));
    }
    for attempt in 0..=3u64 {
        let s = if attempt == 0 { seed } else { rng::derived_seed(seed, attempt) };
        if let Some(m) = try_random_measurement(&mut rng::seeded(s), d, n)? {
            return Ok(m);
        }
    }
    Err(Error::precondition(format!(
        "Σ G†G was numerically singular after 3 retries (seed {seed})"
    )))
}

/// Draws a Kraus measurement from an existing generator, retrying on the same
/// stream.
pub fn random_measurement_with(rng: &mut rng::Rng, d: usize, n: usize) -> Result<Measurement> {
    if n == 0 || d == 0 {
        return Err(Error::precondition("need at least one outcome and d >= 1"));
    }
    for _ in 0..=3 {
        if let Some(m) = try_random_measurement(rng, d, n)? {
            return Ok(m);
        }
    }
    Err(Error::precondition("Σ G†G was numerically singular after 3 retries"))
}

fn try_random_measurement(rng: &mut rng::Rng, d: usize, n: usize) -> Result<Option<Measurement>> {
    let gs: Vec<ComplexMatrix> = (0..n).map(|_| rng::ginibre(rng, d, d)).collect();
    let m = matrix::sum(gs.iter().map(|g| &g.adjoint() * g).collect::<Vec<_>>().iter())
        .expect("n >= 1")
        .hermitian_part();
    let eig = matrix::hermitian_eig(&m)?;
    if eig.min() <= 1e-10 {
        return Ok(None);
    }
    let inv_sqrt = eig.apply(|x| 1.0 / x.sqrt())?;
    Ok(Some(Measurement::new(gs.iter().map(|g| g * &inv_sqrt).collect())?))
}

fn check_same_dim(a: &Measurement, b: &Measurement) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::dimension(format!(
            "measurements act on dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `max_{j,k} √tr(B_k A_j†A_j B_k†)`.
pub fn c1_constant(a: &Measurement, b: &Measurement) -> Result<f64> {
    check_same_dim(a, b)?;
    let ea = a.effects();
    let eb = b.effects();
    let mut best = 0.0f64;
    for e in &ea {
        for f in &eb {
            // tr B A†A B† = tr A†A B†B
            best = best.max(e.trace_product(f).re.max(0.0));
        }
    }
    Ok(best.sqrt())
}

/// `max_{j,k} √‖B_k A_j†A_j B_k†‖_∞`.
pub fn c_infinity_constant(a: &Measurement, b: &Measurement) -> Result<f64> {
    check_same_dim(a, b)?;
    let ea = a.effects();
    let mut best = 0.0f64;
    for e in &ea {
        for bk in b.ops() {
            best = best.max(matrix::op_norm(&bk.conjugate(e))?);
        }
    }
    Ok(best.sqrt())
}

/// `max_{j,k} ‖√(A_j†A_j) √(B_k†B_k)‖_∞`, an independent route to `c_∞`.
pub fn c_infinity_via_roots(a: &Measurement, b: &Measurement) -> Result<f64> {
    check_same_dim(a, b)?;
    let root = |m: &ComplexMatrix| matrix::matrix_fn(m, |x| x.max(0.0).sqrt());
    let ra = a.effects().iter().map(root).collect::<Result<Vec<_>>>()?;
    let rb = b.effects().iter().map(root).collect::<Result<Vec<_>>>()?;
    let mut best = 0.0f64;
    for x in &ra {
        for y in &rb {
            best = best.max(matrix::singular_values(&(x * y))[0]);
        }
    }
    Ok(best)
}

/// `max_{j,k} |⟨a_j, b_k⟩|` for two bases.
pub fn max_overlap(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    a.iter()
        .flat_map(|u| {
            b.iter()
                .map(move |v| u.iter().zip(v).map(|(x, y)| x.conj() * y).sum::<C64>().norm())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_residual(vectors: &[Vec<C64>]) -> f64 {
        let m = ComplexMatrix::from_fn(vectors.len(), vectors.len(), |i, j| {
            vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum()
        });
        m.max_abs_diff(&ComplexMatrix::identity(vectors.len()))
    }

    #[test]
    fn standard_basis_projectors() {
        let m = standard_measurement(3).unwrap();
        for (i, a) in m.ops().iter().enumerate() {
            let mut diag = vec![0.0; 3];
            diag[i] = 1.0;
            assert_eq!(a, &ComplexMatrix::from_real_diagonal(&diag));
        }
        assert!(m.is_rank_one());
    }

    #[test]
    fn dft_two_is_hadamard_basis() {
        let m = dft_measurement(2).unwrap();
        let plus = ComplexMatrix::from_fn(2, 2, |_, _| C64::new(0.5, 0.0));
        let minus = ComplexMatrix::from_fn(2, 2, |r, c| C64::new(if r == c { 0.5 } else { -0.5 }, 0.0));
        assert!(m.ops()[0].max_abs_diff(&plus) < 1e-15);
        assert!(m.ops()[1].max_abs_diff(&minus) < 1e-15);
    }

    #[test]
    fn dft_kernel_has_uniform_modulus() {
        for d in 2..=7 {
            let v = dft_vectors(d);
            for row in &v {
                for z in row {
                    assert!((z.norm() - 1.0 / (d as f64).sqrt()).abs() < 1e-15);
                }
            }
            let c1 = c1_constant(&standard_measurement(d).unwrap(), &dft_measurement(d).unwrap()).unwrap();
            assert!((c1 - 1.0 / (d as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_basis_is_complete_and_deterministic() {
        let v = random_orthonormal_basis(4, 5).unwrap();
        assert!(gram_residual(&v) < 1e-10);
        let m = from_basis(&v).unwrap();
        assert!(m.completeness_residual() < 1e-10);
        let again = random_orthonormal_basis(4, 5).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn haar_basis_unit_determinant() {
        let v = random_orthonormal_basis(2, 3).unwrap();
        // columns are the basis vectors
        let det = v[0][0] * v[1][1] - v[1][0] * v[0][1];
        assert!((det.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn from_basis_rejects_non_orthonormal() {
        let v = vec![
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
        ];
        assert!(matches!(from_basis(&v), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_measurement_completeness() {
        for seed in 0..100 {
            let m = random_measurement(3, 1 + (seed as usize % 5), seed).unwrap();
            assert!(m.completeness_residual() <= 1e-10, "seed {seed}");
        }
        let single = random_measurement(3, 1, 42).unwrap();
        let a = &single.ops()[0];
        assert!((&a.adjoint() * a).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-10);
        assert!(random_measurement(3, 0, 0).is_err());
    }

    #[test]
    fn rank_one_detection() {
        assert!(haar_basis_measurement(3, 1).unwrap().is_rank_one());
        for seed in 0..10 {
            assert!(!random_measurement(3, 4, seed).unwrap().is_rank_one());
        }
        assert!(!Measurement::unitary(ComplexMatrix::identity(2)).unwrap().is_rank_one());
        assert!(Measurement::unitary(ComplexMatrix::identity(1)).unwrap().is_rank_one());
    }

    #[test]
    fn c1_identical_bases_is_one() {
        let a = standard_measurement(3).unwrap();
        assert!((c1_constant(&a, &a).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn c1_matches_overlap_for_bases() {
        for seed in 0..20 {
            let va = random_orthonormal_basis(4, seed).unwrap();
            let vb = random_orthonormal_basis(4, 100 + seed).unwrap();
            let c1 = c1_constant(&from_basis(&va).unwrap(), &from_basis(&vb).unwrap()).unwrap();
            assert!((c1 - max_overlap(&va, &vb)).abs() < 1e-12);
        }
    }

    #[test]
    fn c_infinity_cases() {
        let id = Measurement::unitary(ComplexMatrix::identity(3)).unwrap();
        assert!((c_infinity_constant(&id, &id).unwrap() - 1.0).abs() < 1e-12);
        for seed in 0..20 {
            let a = haar_basis_measurement(3, seed).unwrap();
            let b = haar_basis_measurement(3, 50 + seed).unwrap();
            let c1 = c1_constant(&a, &b).unwrap();
            let ci = c_infinity_constant(&a, &b).unwrap();
            assert!((c1 - ci).abs() < 1e-12);

            let ga = random_measurement(3, 3, seed).unwrap();
            let gb = random_measurement(3, 2, 70 + seed).unwrap();
            let ci = c_infinity_constant(&ga, &gb).unwrap();
            let alt = c_infinity_via_roots(&ga, &gb).unwrap();
            assert!((ci - alt).abs() < 1e-10);
            assert!(ci <= c1_constant(&ga, &gb).unwrap() + 1e-12);
        }
    }

    #[test]
    fn constants_reject_mismatched_dims() {
        let a = standard_measurement(2).unwrap();
        let b = standard_measurement(3).unwrap();
        assert!(matches!(c1_constant(&a, &b), Err(Error::Dimension(_))));
        assert!(matches!(c_infinity_constant(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn unitary_prefactor_preserves_constants() {
        let v = random_unitary(3, 9).unwrap();
        for seed in 0..10 {
            let a = random_measurement(3, 3, seed).unwrap();
            let b = random_measurement(3, 4, 30 + seed).unwrap();
            let a_rot = a.left_multiplied(&v).unwrap();
            for (e, f) in a.effects().iter().zip(a_rot.effects().iter()) {
                assert!(e.max_abs_diff(f) < 1e-10);
            }
            let c1 = c1_constant(&a, &b).unwrap();
            let ci = c_infinity_constant(&a, &b).unwrap();
            assert!((c1 - c1_constant(&a_rot, &b).unwrap()).abs() < 1e-10);
            assert!((ci - c_infinity_constant(&a_rot, &b).unwrap()).abs() < 1e-10);
        }
    }
}
