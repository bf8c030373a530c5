//! Trace inequalities behind the uncertainty relations: the three-matrix
//! Golden–Thompson bound, the Gibbs variational principle, and the operator
//! Jensen inequality for the logarithm.

use serde::{Deserialize, Serialize};

use crate::entropy::von_neumann;
use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, HermitianEigen};
use crate::measurements::Measurement;
use crate::states::DensityState;
use crate::tolerances;

/// Outcome of a single inequality check, `pass ⇔ gap ≥ −tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl GapResult {
    pub fn new(lhs: f64, rhs: f64, gap: f64, tolerance: f64) -> Self {
        Self {
            lhs,
            rhs,
            gap,
            tolerance,
            pass: gap >= -tolerance,
        }
    }
}

/// `(1 − δ)σ + δ·1/d`, the explicit regularizer for near-singular inputs.
pub fn regularize(sigma: &ComplexMatrix, delta: f64) -> ComplexMatrix {
    let d = sigma.rows();
    &sigma.scale(1.0 - delta) + &ComplexMatrix::identity(d).scale(delta / d as f64)
}

/// Eigendecomposition of a matrix required to be positive definite with
/// smallest eigenvalue above `floor`.
pub(crate) fn pd_eig(m: &ComplexMatrix, floor: f64, what: &str) -> Result<HermitianEigen> {
    let eig = matrix::hermitian_eig(m)?;
    if eig.min().is_nan() || eig.min() <= floor {
        return Err(Error::precondition(format!(
            "{what} is not positive definite (smallest eigenvalue {:.3e})",
            eig.min()
        )));
    }
    Ok(eig)
}

fn same_dim(ms: &[&ComplexMatrix]) -> Result<usize> {
    let d = ms[0].rows();
    if ms.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(Error::dimension("operators must share one square dimension"));
    }
    Ok(d)
}

/// `1/L(a, b)` for the logarithmic mean `L`, i.e. `∫₀^∞ dt / ((a+t)(b+t))`.
pub fn reciprocal_log_mean(a: f64, b: f64) -> f64 {
    if a == b {
        return 1.0 / a;
    }
    let x = (a - b) / b;
    if x.abs() < 1e-8 {
        (1.0 - x / 2.0 + x * x / 3.0) / b
    } else {
        x.ln_1p() / (a - b)
    }
}

/// `tr exp(ln X − ln Y + ln Z)`.
pub fn triple_gt_lhs(x: &ComplexMatrix, y: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    same_dim(&[x, y, z])?;
    let lx = pd_eig(x, tolerances::PD_MIN, "X")?.apply(f64::ln)?;
    let ly = pd_eig(y, tolerances::PD_MIN, "Y")?.apply(f64::ln)?;
    let lz = pd_eig(z, tolerances::PD_MIN, "Z")?.apply(f64::ln)?;
    trace_exp(&(&(&lx - &ly) + &lz))
}

pub(crate) fn trace_exp(h: &ComplexMatrix) -> Result<f64> {
    Ok(matrix::hermitian_eig(h)?.eigenvalues.iter().map(|l| l.exp()).sum())
}

/// `∫₀^∞ tr X (Y+t)⁻¹ Z (Y+t)⁻¹ dt` in closed form: in the eigenbasis of `Y`
/// the integral is `Σ_{m,n} X̃_{mn} Z̃_{nm} k(μ_m, μ_n)` with `k` the
/// reciprocal logarithmic mean.
pub fn triple_gt_rhs(x: &ComplexMatrix, y: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    same_dim(&[x, y, z])?;
    pd_eig(x, tolerances::PD_MIN, "X")?;
    pd_eig(z, tolerances::PD_MIN, "Z")?;
    let ey = pd_eig(y, tolerances::PD_MIN, "Y")?;
    Ok(resolvent_pair_integral(x, &ey, z))
}

/// Closed-form `∫₀^∞ tr X (Y+t)⁻¹ Z (Y+t)⁻¹ dt` given the spectrum of `Y`.
/// No positivity is required of `X` or `Z`.
pub(crate) fn resolvent_pair_integral(x: &ComplexMatrix, ey: &HermitianEigen, z: &ComplexMatrix) -> f64 {
    let u = &ey.eigenvectors;
    let ud = u.adjoint();
    let xt = &(&ud * x) * u;
    let zt = &(&ud * z) * u;
    let mu = &ey.eigenvalues;
    let n = mu.len();
    let mut total = 0.0;
    for m in 0..n {
        for k in 0..n {
            total += (xt[(m, k)] * zt[(k, m)]).re * reciprocal_log_mean(mu[m], mu[k]);
        }
    }
    total
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const NODES_PER_PANEL: usize = 16;

/// `∫₀^∞ f(t) dt` via `t = s/(1−s)` and composite Gauss–Legendre in `s`.
///
/// Panels are graded geometrically towards both ends of `(0, 1)`, where the
/// resolvent integrands vary on scales set by the smallest and largest
/// eigenvalues. `points` is split into panels of 16 nodes.
pub fn half_line_quadrature<F>(points: usize, f: F) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    if points < 64 {
        return Err(Error::precondition(format!("quadrature needs at least 64 points, got {points}")));
    }
    let half_panels = (points / NODES_PER_PANEL / 2).max(2);
    let (nodes, weights) = gauss_legendre(NODES_PER_PANEL);
    // breakpoints in (0, 1/2]: 0, s_min·r^k, ..., 1/2
    let s_min: f64 = 1e-7;
    let ratio = (0.5 / s_min).powf(1.0 / (half_panels - 1) as f64);
    let mut left = vec![0.0];
    for k in 0..half_panels {
        left.push(if k + 1 == half_panels { 0.5 } else { s_min * ratio.powi(k as i32) });
    }
    let mut breaks = left.clone();
    for &s in left.iter().rev().skip(1) {
        breaks.push(1.0 - s);
    }
    let mut acc: Option<ComplexMatrix> = None;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (&xi, &wi) in nodes.iter().zip(&weights) {
            let s = mid + half * xi;
            let t = s / (1.0 - s);
            let jac = 1.0 / ((1.0 - s) * (1.0 - s));
            let term = f(t)?.scale(wi * half * jac);
            acc = Some(match acc {
                None => term,
                Some(sum) => &sum + &term,
            });
        }
    }
    Ok(acc.expect("at least one panel"))
}

/// Quadrature evaluation of the same integral as [`triple_gt_rhs`], with the
/// resolvent formed by LU inversion at every node.
pub fn triple_gt_rhs_quadrature(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    z: &ComplexMatrix,
    points: usize,
) -> Result<f64> {
    let d = same_dim(&[x, y, z])?;
    pd_eig(x, tolerances::PD_MIN, "X")?;
    pd_eig(y, tolerances::PD_MIN, "Y")?;
    pd_eig(z, tolerances::PD_MIN, "Z")?;
    let id = ComplexMatrix::identity(d);
    let value = half_line_quadrature(points, |t| {
        let r = matrix::inverse(&(y + &id.scale(t)))?;
        let v = (&(x * &r) * &(z * &r)).trace().re;
        Ok(ComplexMatrix::from_real_diagonal(&[v]))
    })?;
    Ok(value[(0, 0)].re)
}

/// Checks `tr e^{ln X − ln Y + ln Z} ≤ ∫ tr X(Y+t)⁻¹Z(Y+t)⁻¹ dt`.
pub fn check_triple_gt(x: &ComplexMatrix, y: &ComplexMatrix, z: &ComplexMatrix) -> Result<GapResult> {
    let lhs = triple_gt_lhs(x, y, z)?;
    let rhs = triple_gt_rhs(x, y, z)?;
    Ok(GapResult::new(lhs, rhs, rhs - lhs, tolerances::INGREDIENT * rhs.abs().max(1.0)))
}

/// `ln tr e^{−h}`, shifted for stability.
pub fn log_partition(h: &ComplexMatrix) -> Result<f64> {
    let eig = matrix::hermitian_eig(h)?;
    let lo = eig.min();
    Ok(-lo + eig.eigenvalues.iter().map(|l| (-(l - lo)).exp()).sum::<f64>().ln())
}

/// Gibbs variational gap `tr ρh − S(ρ) + ln tr e^{−h} ≥ 0`.
pub fn gibbs_gap(rho: &DensityState, h: &ComplexMatrix) -> Result<GapResult> {
    if h.rows() != rho.dim() || h.cols() != rho.dim() {
        return Err(Error::dimension(format!(
            "state has dimension {}, Hamiltonian is {}x{}",
            rho.dim(),
            h.rows(),
            h.cols()
        )));
    }
    let h = h.symmetrized()?;
    let lhs = rho.matrix().trace_product(&h).re - von_neumann(rho.matrix(), false)?;
    let rhs = -log_partition(&h)?;
    Ok(GapResult::new(lhs, rhs, lhs - rhs, tolerances::INGREDIENT))
}

/// Gibbs state `e^{−h}/tr e^{−h}`.
pub fn gibbs_state(h: &ComplexMatrix) -> Result<DensityState> {
    let eig = matrix::hermitian_eig(h)?;
    let lo = eig.min();
    let weights: Vec<f64> = eig.eigenvalues.iter().map(|l| (-(l - lo)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let normalized: Vec<f64> = weights.iter().map(|w| w / z).collect();
    DensityState::new(eig.reconstruct_with(&normalized), vec![h.rows()])
}

/// `ln(Σ A_j†K_jA_j) − Σ A_j†(ln K_j)A_j` given precomputed logarithms.
pub(crate) fn jensen_difference(
    ops: &[ComplexMatrix],
    ks: &[ComplexMatrix],
    logs: &[ComplexMatrix],
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let d = ops[0].cols();
    let mut inner = ComplexMatrix::zeros(d, d);
    let mut outer = ComplexMatrix::zeros(d, d);
    for ((a, k), lk) in ops.iter().zip(ks).zip(logs) {
        let ad = a.adjoint();
        inner = &inner + &(&(&ad * k) * a);
        outer = &outer + &(&(&ad * lk) * a);
    }
    let log_inner = pd_eig(&inner.hermitian_part(), 0.0, "Σ A†KA")?.apply(f64::ln)?;
    Ok((log_inner, outer.hermitian_part()))
}

/// Smallest eigenvalue of `ln(Σ A_j†K_jA_j) − Σ A_j†(ln K_j)A_j`.
pub fn operator_jensen_gap(a: &Measurement, ks: &[ComplexMatrix]) -> Result<GapResult> {
    if ks.len() != a.outcomes() {
        return Err(Error::dimension(format!(
            "{} operators K for {} outcomes",
            ks.len(),
            a.outcomes()
        )));
    }
    if let Some(bad) = ks.iter().position(|k| k.rows() != a.dim() || k.cols() != a.dim()) {
        return Err(Error::dimension(format!("K_{bad} does not match the measurement dimension")));
    }
    let logs = ks
        .iter()
        .enumerate()
        .map(|(j, k)| pd_eig(k, tolerances::PD_MIN, &format!("K_{j}"))?.apply(f64::ln))
        .collect::<Result<Vec<_>>>()?;
    let (rhs, lhs) = jensen_difference(a.ops(), ks, &logs)?;
    let gap = matrix::hermitian_eig(&(&rhs - &lhs))?.min();
    Ok(GapResult::new(lhs.trace().re, rhs.trace().re, gap, tolerances::INGREDIENT))
}

/// `∫₀^∞ (Y+t)⁻² dt = Y⁻¹`.
pub fn resolvent_square_integral(y: &ComplexMatrix) -> Result<ComplexMatrix> {
    pd_eig(y, tolerances::PD_MIN, "Y")?.apply(|x| 1.0 / x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;
    use crate::measurements::{self, from_basis, random_measurement};
    use crate::rng;
    use crate::states::random_density;

    fn random_pd(d: usize, seed: u64) -> ComplexMatrix {
        let mut r = rng::seeded(seed);
        let g = rng::ginibre(&mut r, d, d);
        &(&g * &g.adjoint()) + &ComplexMatrix::identity(d).scale(0.05)
    }

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(v)
    }

    #[test]
    fn log_mean_kernel_limits() {
        assert_eq!(reciprocal_log_mean(2.0, 2.0), 0.5);
        let near = reciprocal_log_mean(2.0 + 1e-12, 2.0);
        assert!((near - 0.5).abs() < 1e-12);
        let k = reciprocal_log_mean(1.0, 4.0);
        assert!((k - 4f64.ln() / 3.0).abs() < 1e-15);
        assert_eq!(reciprocal_log_mean(1.0, 4.0), reciprocal_log_mean(4.0, 1.0));
    }

    #[test]
    fn commuting_triples_saturate() {
        let x = [0.3, 1.2, 2.0];
        let y = [0.5, 0.7, 1.9];
        let z = [1.1, 0.4, 0.8];
        let expected: f64 = (0..3).map(|i| x[i] * z[i] / y[i]).sum();
        let (x, y, z) = (diag(&x), diag(&y), diag(&z));
        assert!((triple_gt_lhs(&x, &y, &z).unwrap() - expected).abs() < 1e-12);
        assert!((triple_gt_rhs(&x, &y, &z).unwrap() - expected).abs() < 1e-12);
        assert!((triple_gt_rhs_quadrature(&x, &y, &z, 256).unwrap() - expected).abs() < 1e-6);
        assert!(check_triple_gt(&x, &y, &z).unwrap().gap.abs() < 1e-9);
    }

    #[test]
    fn triple_gt_special_cases() {
        let x = random_pd(4, 1);
        let y = random_pd(4, 2);
        let id = ComplexMatrix::identity(4);
        // Z = 1 gives the two-matrix exponent and the classical bound tr X Y⁻¹
        let two = trace_exp(&(&matrix_ln(&x) - &matrix_ln(&y))).unwrap();
        assert!((triple_gt_lhs(&x, &y, &id).unwrap() - two).abs() < 1e-10);
        let classical = x.trace_product(&matrix::inverse(&y).unwrap()).re;
        assert!((triple_gt_rhs(&x, &y, &id).unwrap() - classical).abs() < 1e-9 * classical);

        let rho = random_density(&[4], 4, 3).unwrap();
        let r = rho.matrix();
        assert!((triple_gt_lhs(r, r, r).unwrap() - 1.0).abs() < 1e-10);

        // X = Z = 1: both sides equal tr Y⁻¹
        let res = check_triple_gt(&id, &y, &id).unwrap();
        let tr_inv = matrix::inverse(&y).unwrap().trace().re;
        assert!((res.lhs - tr_inv).abs() < 1e-9 * tr_inv);
        assert!((res.rhs - tr_inv).abs() < 1e-9 * tr_inv);
        assert!(res.gap.abs() < 1e-9 * tr_inv.max(1.0));
    }

    fn matrix_ln(m: &ComplexMatrix) -> ComplexMatrix {
        matrix::matrix_fn(m, f64::ln).unwrap()
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for seed in 0..10 {
            let x = random_pd(4, 10 + seed);
            let y = random_pd(4, 20 + seed);
            let z = random_pd(4, 30 + seed);
            let closed = triple_gt_rhs(&x, &y, &z).unwrap();
            let quad = triple_gt_rhs_quadrature(&x, &y, &z, 256).unwrap();
            assert!((closed - quad).abs() < 1e-6 * closed.abs(), "{closed} vs {quad}");
        }
    }

    #[test]
    fn quadrature_is_linear_in_x() {
        let x = random_pd(3, 1);
        let y = random_pd(3, 2);
        let z = random_pd(3, 3);
        let base = triple_gt_rhs_quadrature(&x, &y, &z, 128).unwrap();
        let scaled = triple_gt_rhs_quadrature(&x.scale(3.5), &y, &z, 128).unwrap();
        assert!((scaled - 3.5 * base).abs() < 1e-10 * scaled.abs());
        assert!(triple_gt_rhs_quadrature(&x, &y, &z, 32).is_err());
    }

    #[test]
    fn non_pd_inputs_rejected() {
        let x = diag(&[1.0, 0.0]);
        let y = ComplexMatrix::identity(2);
        assert!(triple_gt_lhs(&x, &y, &y).is_err());
        assert!(triple_gt_rhs(&y, &x, &y).is_err());
        assert!(resolvent_square_integral(&x).is_err());
    }

    #[test]
    fn gibbs_equality_at_gibbs_state() {
        for seed in 0..10 {
            let h = random_pd(4, seed).scale(0.7);
            let h = &h - &ComplexMatrix::identity(4);
            let rho = gibbs_state(&h).unwrap();
            let g = gibbs_gap(&rho, &h).unwrap();
            assert!(g.gap.abs() < 1e-8, "{}", g.gap);
        }
    }

    #[test]
    fn gibbs_zero_hamiltonian() {
        let rho = random_density(&[3], 2, 4).unwrap();
        let g = gibbs_gap(&rho, &ComplexMatrix::zeros(3, 3)).unwrap();
        let expected = 3f64.ln() - von_neumann(rho.matrix(), false).unwrap();
        assert!((g.gap - expected).abs() < 1e-12);
        assert!(g.pass);
        assert!(gibbs_gap(&rho, &ComplexMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn jensen_scalar_blocks_are_exact() {
        let v = measurements::random_orthonormal_basis(3, 7).unwrap();
        let a = from_basis(&v).unwrap();
        let kappas = [0.2, 1.5, 4.0];
        let ks: Vec<_> = kappas.iter().map(|&k| ComplexMatrix::identity(3).scale(k)).collect();
        let g = operator_jensen_gap(&a, &ks).unwrap();
        assert!(g.gap.abs() < 1e-9);
        assert!((g.lhs - kappas.iter().map(|k: &f64| k.ln()).sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn jensen_unitary_is_exact() {
        let u = measurements::random_unitary(3, 2).unwrap();
        let a = Measurement::unitary(u).unwrap();
        let g = operator_jensen_gap(&a, &[random_pd(3, 5)]).unwrap();
        assert!(g.gap.abs() < 1e-9);
    }

    #[test]
    fn jensen_random_instances_hold() {
        for seed in 0..50 {
            let a = random_measurement(3, 3, seed).unwrap();
            let ks: Vec<_> = (0..3).map(|j| random_pd(3, 100 * seed + j)).collect();
            assert!(operator_jensen_gap(&a, &ks).unwrap().pass);
        }
    }

    #[test]
    fn jensen_rejects_non_pd() {
        let a = measurements::standard_measurement(2).unwrap();
        let ks = vec![diag(&[1.0, 0.0]), ComplexMatrix::identity(2)];
        assert!(operator_jensen_gap(&a, &ks).is_err());
        assert!(operator_jensen_gap(&a, &ks[..1]).is_err());
    }

    #[test]
    fn resolvent_square_cases() {
        let id = ComplexMatrix::identity(2);
        assert!(resolvent_square_integral(&id).unwrap().max_abs_diff(&id) < 1e-15);
        let r = resolvent_square_integral(&diag(&[2.0, 4.0])).unwrap();
        assert!(r.max_abs_diff(&diag(&[0.5, 0.25])) < 1e-15);

        let y = random_pd(3, 9);
        let closed = resolvent_square_integral(&y).unwrap();
        let quad = half_line_quadrature(256, |t| {
            let r = matrix::inverse(&(&y + &ComplexMatrix::identity(3).scale(t)))?;
            Ok(&r * &r)
        })
        .unwrap();
        assert!(closed.max_abs_diff(&quad) < 1e-6);
    }

    #[test]
    fn regularizer_keeps_trace() {
        let rho = random_density(&[4], 1, 1).unwrap();
        let r = regularize(rho.matrix(), 1e-10);
        assert!((r.trace() - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(matrix::hermitian_eig(&r).unwrap().min() > 0.0);
    }
}
