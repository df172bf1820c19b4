//! Convergence-rate theory for the shifted iterations: the iteration
//! Jacobian at an eigenpair, the augmented Jacobian of the extrapolated
//! two-step map, closed-form rates, the convexity threshold estimate, and
//! eigenpair stability classification.
//!
//! The central facts: at an eigenpair (lambda, x) the iteration Jacobian
//!
//! ```text
//! J(x; alpha) = [(m-1)(A x^{m-2} - lambda x x^T) + alpha (I - x x^T)] / (lambda + alpha)
//! ```
//!
//! is symmetric positive semidefinite, and its spectral radius rho < 1 is
//! the linear convergence rate of the plain iteration. Extrapolating with
//! weight gamma turns the map into a two-step iteration whose 2n x 2n
//! Jacobian has block form [(1-gamma) J, gamma J; I, 0]; each eigenvalue mu
//! of J spawns the root pair
//!
//! ```text
//! a = ((1-gamma) mu +/- sqrt(((1-gamma) mu)^2 + 4 gamma mu)) / 2,
//! ```
//!
//! so the extrapolated rate rho_gamma follows in closed form, minimized at
//! gamma_opt = ((rho-2) + 2 sqrt(1-rho))/rho with value 1 - sqrt(1-rho).

use crate::error::{Error, Result};
use crate::linalg::{eigh, ortho_complement, project_symmetric, solve_linear, Mat, SymMatrix};
use crate::rng::SplitMix64;
use crate::solve::{
    jacobian_from_contraction, norm, residual_norm, Eigenpair, Stability, RESIDUAL_CONTRACT,
};
use crate::tensor::SymmetricTensor;
use serde::Serialize;

/// Classification threshold on the projected-Hessian eigenvalues. Residuals
/// converge to ~1e-10, so Hessian eigenvalues are trustworthy to ~1e-8.
pub const CLASSIFY_EPS: f64 = 1e-8;

/// Safety multiplier applied to the sampled convexity-threshold estimate
/// when suggesting a shift.
pub const BETA_SAFETY: f64 = 1.1;

/// Iteration Jacobian J(x; alpha) at an eigenpair.
pub fn sshopm_jacobian(
    a: &SymmetricTensor,
    lambda: f64,
    x: &[f64],
    alpha: f64,
) -> Result<SymMatrix> {
    let nx = norm(x);
    if (nx - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit(nx));
    }
    let c = a.contract_all(x)?;
    jacobian_from_contraction(&c.matrix, a.order(), lambda, x, alpha)
}

/// Block Jacobian [(1-gamma) J, gamma J; I, 0] of the extrapolated two-step
/// fixed-point map.
pub fn augmented_jacobian(j: &SymMatrix, gamma: f64) -> Mat {
    let n = j.dim();
    let mut out = Mat::zeros(2 * n);
    for i in 0..n {
        for jj in 0..n {
            out.set(i, jj, (1.0 - gamma) * j.get(i, jj));
            out.set(i, n + jj, gamma * j.get(i, jj));
        }
        out.set(n + i, i, 1.0);
    }
    out
}

/// The two augmented-Jacobian roots spawned by a Jacobian eigenvalue `mu`,
/// as (re, im) pairs.
pub fn augmented_roots(mu: f64, gamma: f64) -> [(f64, f64); 2] {
    let b = (1.0 - gamma) * mu;
    let disc = b * b + 4.0 * gamma * mu;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [((b + s) / 2.0, 0.0), ((b - s) / 2.0, 0.0)]
    } else {
        let s = (-disc).sqrt() / 2.0;
        [(b / 2.0, s), (b / 2.0, -s)]
    }
}

/// Extrapolation weight minimizing the two-step spectral radius, for a base
/// rate rho in (0, 1).
pub fn gamma_opt(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(((rho - 2.0) + 2.0 * (1.0 - rho).sqrt()) / rho)
}

/// The minimized rate 1 - sqrt(1 - rho).
pub fn rho_opt(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(1.0 - (1.0 - rho).sqrt())
}

/// Spectral radius of the augmented Jacobian as a function of gamma: the
/// dominant real root for gamma in [gamma_opt, 0], the complex-pair modulus
/// sqrt(-gamma rho) below it.
pub fn rho_gamma(rho: f64, gamma: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(gamma > -1.0 && gamma <= 0.0) {
        return Err(Error::BadConfig(format!(
            "gamma must lie in (-1, 0], got {gamma}"
        )));
    }
    let go = gamma_opt(rho)?;
    if gamma >= go {
        let b = (1.0 - gamma) * rho;
        let disc = (b * b + 4.0 * gamma * rho).max(0.0);
        Ok((b + disc.sqrt()) / 2.0)
    } else {
        Ok((-gamma * rho).sqrt())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::RhoOutOfRange(rho));
    }
    Ok(())
}

/// Monte Carlo lower bound on the convexity threshold
/// beta(A) = (m-1) max over the unit sphere of rho(A x^{m-2}),
/// from `samples` uniformly distributed sphere points.
///
/// This is a lower bound: shifting by the raw estimate may still undershoot
/// the true threshold. Scale by [`BETA_SAFETY`] (or more) when choosing a
/// shift.
pub fn beta_estimate(a: &SymmetricTensor, samples: usize, seed: u64) -> Result<f64> {
    let mf = (a.order() - 1) as f64;
    let mut g = SplitMix64::new(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = g.unit_uniform_sphere(a.dim());
        let c = a.contract_all(&x)?;
        let spec = eigh(&c.matrix)?;
        let radius = spec.min_eigenvalue().abs().max(spec.max_eigenvalue().abs());
        best = best.max(mf * radius);
    }
    Ok(best)
}

/// Shift suggestion from a sampled threshold estimate.
pub fn suggest_shift(beta_estimate: f64) -> f64 {
    beta_estimate * BETA_SAFETY
}

/// Classify an eigenpair by the eigenvalues of the projected Hessian
/// C(lambda, x) = U^T ((m-1) A x^{m-2} - lambda I) U, where the columns of U
/// span the complement of x. Requires the eigenpair residual contract.
pub fn classify(a: &SymmetricTensor, lambda: f64, x: &[f64]) -> Result<Stability> {
    let c = a.contract_all(x)?;
    let resid = residual_norm(&c.vector, lambda, x);
    if resid > RESIDUAL_CONTRACT {
        return Err(Error::ResidualContract(resid));
    }
    let n = a.dim();
    let mf = (a.order() - 1) as f64;
    let mut h = c.matrix.clone();
    h.scale(mf);
    let mut vals = h.values().to_vec();
    for i in 0..n {
        vals[i * n + i] -= lambda;
    }
    let h = SymMatrix::symmetrized(n, vals);
    let u = ortho_complement(x)?;
    if u.is_empty() {
        return Ok(Stability::Degenerate);
    }
    let proj = project_symmetric(&h, &u);
    let spec = eigh(&proj)?;
    let min = spec.min_eigenvalue();
    let max = spec.max_eigenvalue();
    Ok(if min > CLASSIFY_EPS {
        Stability::PositiveStable
    } else if max < -CLASSIFY_EPS {
        Stability::NegativeStable
    } else if min < -CLASSIFY_EPS && max > CLASSIFY_EPS {
        Stability::Unstable
    } else {
        Stability::Degenerate
    })
}

/// Newton refinement of a near-eigenpair (e.g. a pair quoted to four
/// decimals) to contract precision. Solves
/// F(x, lambda) = [A x^{m-1} - lambda x; (x^T x - 1)/2] = 0.
pub fn newton_polish(
    a: &SymmetricTensor,
    lambda0: f64,
    x0: &[f64],
    max_steps: usize,
) -> Result<Eigenpair> {
    let n = a.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    let mf = (a.order() - 1) as f64;
    let mut lambda = lambda0;
    let mut x = x0.to_vec();
    for _ in 0..max_steps {
        let c = a.contract_all(&x)?;
        let mut f: Vec<f64> = c
            .vector
            .iter()
            .zip(&x)
            .map(|(v, xi)| v - lambda * xi)
            .collect();
        f.push((x.iter().map(|v| v * v).sum::<f64>() - 1.0) / 2.0);
        if norm(&f) < 1e-14 {
            break;
        }
        let dim = n + 1;
        let mut jac = Mat::zeros(dim);
        for (i, &xi) in x.iter().enumerate() {
            for j in 0..n {
                let eye = if i == j { lambda } else { 0.0 };
                jac.set(i, j, mf * c.matrix.get(i, j) - eye);
            }
            jac.set(i, n, -xi);
            jac.set(n, i, xi);
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = solve_linear(&jac, &rhs)?;
        for (xi, s) in x.iter_mut().zip(&step) {
            *xi += s;
        }
        lambda += step[n];
    }
    let c = a.contract_all(&x)?;
    let resid = residual_norm(&c.vector, lambda, &x);
    if resid > RESIDUAL_CONTRACT {
        return Err(Error::ResidualContract(resid));
    }
    Ok(Eigenpair {
        lambda,
        x,
        classification: None,
    })
}

/// Geometric-mean slope of the residual history over the asymptotic window
/// 1e-12 <= r <= 1e-4, skipping preasymptotic and floor regimes. Needs at
/// least five in-window iterations, otherwise None.
pub fn measured_rate(residuals: &[f64]) -> Option<f64> {
    measured_rate_windowed(residuals, 1e-12, 1e-4)
}

pub fn measured_rate_windowed(residuals: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let in_window: Vec<usize> = residuals
        .iter()
        .enumerate()
        .filter(|(_, &r)| r >= lo && r <= hi)
        .map(|(k, _)| k)
        .collect();
    if in_window.len() < 5 {
        return None;
    }
    let mut log_sum = 0.0;
    let mut count = 0usize;
    for pair in in_window.windows(2) {
        if pair[1] == pair[0] + 1 {
            log_sum += (residuals[pair[1]] / residuals[pair[0]]).ln();
            count += 1;
        }
    }
    if count < 4 {
        return None;
    }
    Some((log_sum / count as f64).exp())
}

/// Predicted versus measured convergence for one extrapolated run.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    /// spectral radius of J(x; alpha) at the converged pair
    pub rho: f64,
    pub gamma_opt: f64,
    pub rho_opt: f64,
    /// the gamma this run used
    pub gamma: f64,
    /// (gamma, predicted rho_gamma) over the experiment grid
    pub rho_gamma_curve: Vec<(f64, f64)>,
    /// geometric residual slope, absent when the window is too short
    pub measured_rate: Option<f64>,
    /// gamma below gamma_opt: complex-pair regime, excluded from slope
    /// comparisons
    pub oscillatory: bool,
    pub eigenpair: Eigenpair,
    pub alpha: f64,
}

impl RateReport {
    /// Prediction for this run's own gamma.
    pub fn predicted(&self) -> Option<f64> {
        self.rho_gamma_curve
            .iter()
            .find(|(g, _)| *g == self.gamma)
            .map(|(_, p)| *p)
    }
}
