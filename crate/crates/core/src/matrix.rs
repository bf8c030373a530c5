//! Dense complex matrices and the handful of spectral operations the
//! certifiers need.
//!
//! Storage is row-major. Tensor-product factors are ordered with factor 0 as
//! the most significant index, so `kron(A, B)` acts on factor 0 with `A` and
//! factor 1 with `B`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting shape mismatches and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::precondition(format!(
                "non-finite entry at ({}, {})",
                i / cols.max(1),
                i % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector from a slice.
    pub fn column(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column_vec(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `M − M†`.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    /// Re tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for r in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(r, k)] * other[(k, r)];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self · inner · self†`.
    pub fn conjugate(&self, inner: &Self) -> Self {
        &(self * inner) * &self.adjoint()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }

    /// Checks that the matrix is square and Hermitian within the relative
    /// tolerance and returns its Hermitian part.
    pub fn symmetrized(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::precondition(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let residual = self.hermitian_residual();
        if residual > tolerances::HERMITIAN_REL * scale {
            return Err(Error::precondition(format!(
                "matrix is not Hermitian (residual {residual:.3e})"
            )));
        }
        Ok(self.hermitian_part())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch {}x{} · {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        self.mul_unchecked(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Sum of a non-empty sequence of equally shaped matrices.
pub fn sum<'a>(mut items: impl Iterator<Item = &'a ComplexMatrix>) -> Option<ComplexMatrix> {
    let first = items.next()?.clone();
    Some(items.fold(first, |acc, m| &acc + m))
}

/// Spectral decomposition `M = U diag(λ) U†` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U diag(values) U†` for arbitrary real values on the same eigenbasis.
    pub fn reconstruct_with(&self, values: &[f64]) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in r..n {
                let mut acc = ZERO;
                for (k, &v) in values.iter().enumerate() {
                    if v != 0.0 {
                        acc += u[(r, k)] * u[(c, k)].conj() * v;
                    }
                }
                out[(r, c)] = acc;
                out[(c, r)] = acc.conj();
            }
            out[(r, r)] = C64::new(out[(r, r)].re, 0.0);
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(&self.eigenvalues)
    }

    /// Applies `f` to the spectrum; errors when `f` is not finite on it.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
        let mut values = Vec::with_capacity(self.dim());
        for &lambda in &self.eigenvalues {
            let v = f(lambda);
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "function is not finite at eigenvalue {lambda:.6e}"
                )));
            }
            values.push(v);
        }
        Ok(self.reconstruct_with(&values))
    }
}

/// Eigendecomposition of a Hermitian matrix. Inputs within the Hermitian
/// tolerance are symmetrized first.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let h = m.symmetrized()?;
    let n = h.rows();
    if n == 0 {
        return Ok(HermitianEigen {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let eig = nalgebra::SymmetricEigen::new(h.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// `f(M)` for Hermitian `M`, evaluated on the spectrum.
pub fn matrix_fn(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    hermitian_eig(m)?.apply(f)
}

/// Largest eigenvalue of a positive semidefinite matrix.
pub fn op_norm(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(m)?;
    let scale = eig.max().abs().max(1.0);
    if eig.min() < -tolerances::PSD_ABS * scale {
        return Err(Error::precondition(format!(
            "operator is not positive semidefinite (smallest eigenvalue {:.3e})",
            eig.min()
        )));
    }
    Ok(eig.max().max(0.0))
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Inverse of a square matrix by LU with partial pivoting.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::precondition("inverse of a non-square matrix"));
    }
    m.to_nalgebra()
        .try_inverse()
        .map(|inv| ComplexMatrix::from_nalgebra(&inv))
        .ok_or_else(|| Error::precondition("matrix is singular"))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, m| kron(&acc, m))
}

fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::dimension(format!(
            "factor dimensions {dims:?} (product {total}) do not match a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Offsets of every multi-index over `factors` within the full row-major
/// index space described by `dims`.
fn offsets(dims: &[usize], factors: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &base in &out {
            for digit in 0..dims[f] {
                next.push(base + digit * strides[f]);
            }
        }
        out = next;
    }
    out
}

/// Traces out the factors listed in `traced`. The remaining factors keep
/// their relative order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], traced: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    if let Some(&bad) = traced.iter().find(|&&f| f >= dims.len()) {
        return Err(Error::dimension(format!(
            "factor {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|f| !traced.contains(f)).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|f| traced.contains(f)).collect();
    let keep_off = offsets(dims, &kept);
    let trace_off = offsets(dims, &traced);
    let n = keep_off.len();
    let total = m.rows();
    let src = m.as_slice();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        trace_off
            .iter()
            .map(|&t| src[(keep_off[r] + t) * total + keep_off[c] + t])
            .sum()
    }))
}

/// Reorders tensor factors: factor `i` of the result is factor `order[i]` of
/// the input.
pub fn permute_factors(m: &ComplexMatrix, dims: &[usize], order: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    let mut seen = vec![false; dims.len()];
    if order.len() != dims.len() || order.iter().any(|&f| f >= dims.len() || std::mem::replace(&mut seen[f], true)) {
        return Err(Error::dimension(format!(
            "{order:?} is not a permutation of {} factors",
            dims.len()
        )));
    }
    let map = offsets(dims, order);
    let total = m.rows();
    let src = m.as_slice();
    Ok(ComplexMatrix::from_fn(total, total, |r, c| {
        src[map[r] * total + map[c]]
    }))
}

/// Embeds an operator on factor `target` as `1 ⊗ … ⊗ op ⊗ … ⊗ 1`.
pub fn embed(op: &ComplexMatrix, dims: &[usize], target: usize) -> Result<ComplexMatrix> {
    if target >= dims.len() || op.rows() != dims[target] || !op.is_square() {
        return Err(Error::dimension(format!(
            "cannot embed a {}x{} operator on factor {target} of {dims:?}",
            op.rows(),
            op.cols()
        )));
    }
    let left: usize = dims[..target].iter().product();
    let right: usize = dims[target + 1..].iter().product();
    Ok(kron(
        &kron(&ComplexMatrix::identity(left), op),
        &ComplexMatrix::identity(right),
    ))
}
