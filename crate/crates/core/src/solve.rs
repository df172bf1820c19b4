//! The five power-iteration solver loops with shared stopping logic and full
//! trace capture.
//!
//! All variants share one engine. Per iterate `x_k` a single contraction
//! pass produces `A x_k^{m-2}`, `A x_k^{m-1}` and `lambda_k = A x_k^m`; the
//! shift is either a fixed `alpha` or the adaptive choice keeping the local
//! Hessian definite; the update is `v_{k+1} = chi (A x_k^{m-1} + alpha_k
//! x_k)`, optionally blended with the previous update `u_{k+1} = (1 - gamma)
//! v_{k+1} + gamma v_k` before normalization. The extrapolation weight is
//! either a fixed `gamma` in (-1, 0] or chosen per iteration from the
//! largest eigenvalue of the current iteration Jacobian.
//!
//! Stopping follows the eigenvalue test `|lambda_{k+1} - lambda_k| < tol`;
//! the iteration index where it first fires is the reported iteration count.
//! The loop then keeps refining until the returned pair also satisfies the
//! eigenpair contract `|A x^{m-1} - lambda x| <= residual_target`, so that
//! downstream classification and rate reporting can rely on it. Refinement
//! rows stay in the trace; the reported count does not include them.

use crate::error::{Error, Result};
use crate::linalg::{eigh, SymMatrix};
use crate::tensor::{Contractions, SymmetricTensor};
use serde::Serialize;

/// Shift strategy: a fixed scalar, or the adaptive rule with margin `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ShiftPolicy {
    Static(f64),
    Adaptive { tau: f64 },
}

/// Extrapolation strategy: none, a fixed weight in (-1, 0], or dynamic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GammaPolicy {
    None,
    Static(f64),
    Dynamic,
}

/// Whether the iteration seeks maxima (convex, chi = +1) or minima
/// (concave, chi = -1) of the shifted objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Convex,
    Concave,
}

impl Sense {
    pub fn chi(self) -> f64 {
        match self {
            Sense::Convex => 1.0,
            Sense::Concave => -1.0,
        }
    }

    /// Static-shift convention: chi = +1 iff alpha >= 0.
    pub fn from_alpha(alpha: f64) -> Self {
        if alpha >= 0.0 {
            Sense::Convex
        } else {
            Sense::Concave
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Converged,
    MaxIters,
    Breakdown,
}

/// Stability class of an eigenpair under the projected Hessian test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    PositiveStable,
    NegativeStable,
    Unstable,
    Degenerate,
}

/// Solver policy without a starting vector; campaigns instantiate one config
/// per trial from a template.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvePolicy {
    pub shift: ShiftPolicy,
    pub gamma: GammaPolicy,
    pub sense: Sense,
    pub tol: f64,
    pub max_iters: usize,
    /// Residual level the returned eigenpair must reach for Converged status.
    pub residual_target: f64,
}

pub const DEFAULT_TOL: f64 = 1e-15;
pub const DEFAULT_MAX_ITERS: usize = 1000;
/// Eigenpair contract: converged pairs satisfy |A x^{m-1} - lambda x| <= this.
pub const RESIDUAL_CONTRACT: f64 = 1e-10;

impl SolvePolicy {
    fn base(shift: ShiftPolicy, gamma: GammaPolicy, sense: Sense) -> Self {
        Self {
            shift,
            gamma,
            sense,
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            residual_target: RESIDUAL_CONTRACT,
        }
    }

    pub fn sshopm(alpha: f64) -> Self {
        Self::base(
            ShiftPolicy::Static(alpha),
            GammaPolicy::None,
            Sense::from_alpha(alpha),
        )
    }

    pub fn es_sshopm(alpha: f64, gamma: f64) -> Self {
        Self::base(
            ShiftPolicy::Static(alpha),
            GammaPolicy::Static(gamma),
            Sense::from_alpha(alpha),
        )
    }

    pub fn geap(tau: f64, sense: Sense) -> Self {
        Self::base(ShiftPolicy::Adaptive { tau }, GammaPolicy::None, sense)
    }

    pub fn des_sshopm(alpha: f64) -> Self {
        Self::base(
            ShiftPolicy::Static(alpha),
            GammaPolicy::Dynamic,
            Sense::from_alpha(alpha),
        )
    }

    pub fn de_geap(tau: f64, sense: Sense) -> Self {
        Self::base(ShiftPolicy::Adaptive { tau }, GammaPolicy::Dynamic, sense)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_residual_target(mut self, target: f64) -> Self {
        self.residual_target = target;
        self
    }

    pub fn with_start(&self, x0: Vec<f64>) -> SolveConfig {
        SolveConfig {
            policy: self.clone(),
            x0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::BadConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::BadConfig("max_iters must be >= 1".into()));
        }
        if !self.residual_target.is_finite() || self.residual_target <= 0.0 {
            return Err(Error::BadConfig("residual target must be positive".into()));
        }
        if let GammaPolicy::Static(g) = self.gamma {
            if !(g > -1.0 && g <= 0.0) {
                return Err(Error::BadConfig(format!(
                    "static gamma must lie in (-1, 0], got {g}"
                )));
            }
        }
        match self.shift {
            ShiftPolicy::Static(alpha) => {
                if !alpha.is_finite() {
                    return Err(Error::BadConfig("alpha must be finite".into()));
                }
                if Sense::from_alpha(alpha) != self.sense {
                    return Err(Error::BadConfig(format!(
                        "sense must match the shift sign: alpha = {alpha} implies {:?}",
                        Sense::from_alpha(alpha)
                    )));
                }
            }
            ShiftPolicy::Adaptive { tau } => {
                if !tau.is_finite() || tau <= 0.0 {
                    return Err(Error::BadConfig(format!("tau must be positive, got {tau}")));
                }
            }
        }
        Ok(())
    }
}

/// One solver run: policy plus unit starting vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveConfig {
    pub policy: SolvePolicy,
    pub x0: Vec<f64>,
}

impl SolveConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        self.policy.validate()?;
        if self.x0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.x0.len(),
            });
        }
        let norm = norm(&self.x0);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit(norm));
        }
        Ok(())
    }
}

/// Converged (or best-so-far) eigenvalue/eigenvector pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenpair {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub classification: Option<Stability>,
}

impl Eigenpair {
    /// |A x^{m-1} - lambda x|
    pub fn residual(&self, a: &SymmetricTensor) -> Result<f64> {
        let c = a.contract_all(&self.x)?;
        Ok(residual_norm(&c.vector, self.lambda, &self.x))
    }
}

/// Per-iteration record.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub k: usize,
    /// lambda_k = A x_k^m
    pub lambda: f64,
    pub x: Vec<f64>,
    /// |A x_k^{m-1} - lambda_k x_k|
    pub residual: f64,
    /// shift computed at x_k (applied in the update leaving x_k)
    pub alpha: f64,
    /// extrapolation weight used to form x_k (None for plain steps)
    pub gamma: Option<f64>,
    /// |u_k| that normalized into x_k
    pub update_norm: Option<f64>,
    /// extrapolated quotient (u_k, x^gamma)/(x^gamma, x^gamma)
    pub quotient: Option<f64>,
    /// smallest eigenvalue of chi m (m-1) A x_k^{m-2} (adaptive shifts only)
    pub lambda_min: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveTrace {
    pub rows: Vec<TraceRow>,
    pub status: Status,
    /// First k with |lambda_k - lambda_{k-1}| < tol; the reported iteration
    /// count, comparable across methods.
    pub stop_iteration: Option<usize>,
}

impl SolveTrace {
    /// Iterations to satisfy the eigenvalue stopping test.
    pub fn iterations(&self) -> Option<usize> {
        self.stop_iteration
    }

    pub fn final_row(&self) -> &TraceRow {
        self.rows
            .last()
            .expect("trace has at least the starting row")
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.lambda).collect()
    }
}

/// S-SHOPM: static shift, no extrapolation.
pub fn sshopm(a: &SymmetricTensor, cfg: &SolveConfig) -> Result<(Eigenpair, SolveTrace)> {
    expect_policy(cfg, "sshopm", |p| {
        matches!(p.shift, ShiftPolicy::Static(_)) && matches!(p.gamma, GammaPolicy::None)
    })?;
    run(a, cfg)
}

/// ES-SHOPM: static shift, fixed extrapolation weight in (-1, 0].
pub fn es_sshopm(a: &SymmetricTensor, cfg: &SolveConfig) -> Result<(Eigenpair, SolveTrace)> {
    expect_policy(cfg, "es_sshopm", |p| {
        matches!(p.shift, ShiftPolicy::Static(_)) && matches!(p.gamma, GammaPolicy::Static(_))
    })?;
    run(a, cfg)
}

/// GEAP: adaptive shift, no extrapolation.
pub fn geap(a: &SymmetricTensor, cfg: &SolveConfig) -> Result<(Eigenpair, SolveTrace)> {
    expect_policy(cfg, "geap", |p| {
        matches!(p.shift, ShiftPolicy::Adaptive { .. }) && matches!(p.gamma, GammaPolicy::None)
    })?;
    run(a, cfg)
}

/// DES-SHOPM: static shift, extrapolation weight chosen per iteration.
pub fn des_sshopm(a: &SymmetricTensor, cfg: &SolveConfig) -> Result<(Eigenpair, SolveTrace)> {
    expect_policy(cfg, "des_sshopm", |p| {
        matches!(p.shift, ShiftPolicy::Static(_)) && matches!(p.gamma, GammaPolicy::Dynamic)
    })?;
    run(a, cfg)
}

/// DE-GEAP: adaptive shift plus dynamic extrapolation.
pub fn de_geap(a: &SymmetricTensor, cfg: &SolveConfig) -> Result<(Eigenpair, SolveTrace)> {
    expect_policy(cfg, "de_geap", |p| {
        matches!(p.shift, ShiftPolicy::Adaptive { .. }) && matches!(p.gamma, GammaPolicy::Dynamic)
    })?;
    run(a, cfg)
}

/// Dispatch on the policy combination.
pub fn solve(a: &SymmetricTensor, cfg: &SolveConfig) -> Result<(Eigenpair, SolveTrace)> {
    run(a, cfg)
}

fn expect_policy(cfg: &SolveConfig, name: &str, ok: impl Fn(&SolvePolicy) -> bool) -> Result<()> {
    if ok(&cfg.policy) {
        Ok(())
    } else {
        Err(Error::BadConfig(format!(
            "policy combination does not match {name}"
        )))
    }
}

/// Extrapolation weight from the largest Jacobian eigenvalue, with the
/// real-part guard for lmax > 1 and the continuity limit gamma -> 0 as
/// lmax -> 0.
pub fn dynamic_gamma(lmax: f64) -> f64 {
    if lmax.abs() < 1e-12 {
        return 0.0;
    }
    let re_sqrt = if lmax <= 1.0 {
        (1.0 - lmax).sqrt()
    } else {
        0.0
    };
    (lmax - 2.0 + 2.0 * re_sqrt) / lmax
}

/// Iteration Jacobian at (lambda, x) with shift alpha:
/// [(m-1)(A x^{m-2} - lambda x x^T) + alpha (I - x x^T)] / (lambda + alpha).
/// `matrix` must be A x^{m-2} at the same x.
pub(crate) fn jacobian_from_contraction(
    matrix: &SymMatrix,
    m: usize,
    lambda: f64,
    x: &[f64],
    alpha: f64,
) -> Result<SymMatrix> {
    let denom = lambda + alpha;
    if denom.abs() <= 1e-12 {
        return Err(Error::DegenerateShift(denom.abs()));
    }
    let n = x.len();
    let mf = (m - 1) as f64;
    let mut vals = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let eye = if i == j { 1.0 } else { 0.0 };
            let proj = eye - x[i] * x[j];
            vals[i * n + j] =
                (mf * (matrix.get(i, j) - lambda * x[i] * x[j]) + alpha * proj) / denom;
        }
    }
    Ok(SymMatrix::symmetrized(n, vals))
}

struct ShiftStep {
    alpha: f64,
    lambda_min: Option<f64>,
}

fn shift_at(policy: &SolvePolicy, m: usize, c: &Contractions) -> Result<ShiftStep> {
    match policy.shift {
        ShiftPolicy::Static(alpha) => Ok(ShiftStep {
            alpha,
            lambda_min: None,
        }),
        ShiftPolicy::Adaptive { tau } => {
            let chi = policy.sense.chi();
            let mf = m as f64;
            let mut hess = c.matrix.clone();
            hess.scale(chi * mf * (mf - 1.0));
            let lmin = eigh(&hess)?.min_eigenvalue();
            let alpha = chi * (0.0f64).max((tau - lmin) / mf);
            Ok(ShiftStep {
                alpha,
                lambda_min: Some(lmin),
            })
        }
    }
}

fn run(a: &SymmetricTensor, cfg: &SolveConfig) -> Result<(Eigenpair, SolveTrace)> {
    cfg.validate(a.dim())?;
    let policy = &cfg.policy;
    let m = a.order();
    let chi = policy.sense.chi();

    let mut x = cfg.x0.clone();
    let nx = norm(&x);
    for e in &mut x {
        *e /= nx;
    }

    let mut contraction = a.contract_all(&x)?;
    let mut lambda = contraction.scalar;
    let mut shift = shift_at(policy, m, &contraction)?;

    let mut rows = vec![TraceRow {
        k: 0,
        lambda,
        x: x.clone(),
        residual: residual_norm(&contraction.vector, lambda, &x),
        alpha: shift.alpha,
        gamma: None,
        update_norm: None,
        quotient: None,
        lambda_min: shift.lambda_min,
    }];

    let mut x_prev: Option<Vec<f64>> = None;
    let mut v_prev: Option<Vec<f64>> = None;
    let mut stop: Option<usize> = None;
    let mut status = Status::MaxIters;

    for k in 0..policy.max_iters {
        let alpha_k = shift.alpha;
        let v: Vec<f64> = contraction
            .vector
            .iter()
            .zip(&x)
            .map(|(w, xi)| chi * (w + alpha_k * xi))
            .collect();

        // extrapolation weight; the first step is always a plain iteration
        let gamma_k = if k == 0 {
            None
        } else {
            match policy.gamma {
                GammaPolicy::None => None,
                GammaPolicy::Static(g) => Some(g),
                GammaPolicy::Dynamic => {
                    // Jacobian at the current iterate; a transiently singular
                    // lambda + alpha falls back to a plain step
                    match jacobian_from_contraction(&contraction.matrix, m, lambda, &x, alpha_k) {
                        Ok(jac) => Some(dynamic_gamma(eigh(&jac)?.max_eigenvalue())),
                        Err(Error::DegenerateShift(_)) => Some(0.0),
                        Err(e) => return Err(e),
                    }
                }
            }
        };

        let u: Vec<f64> = match (gamma_k, &v_prev) {
            (Some(g), Some(vp)) => v
                .iter()
                .zip(vp)
                .map(|(vn, vo)| (1.0 - g) * vn + g * vo)
                .collect(),
            _ => v.clone(),
        };

        let unorm = norm(&u);
        if unorm < 1e-300 {
            status = Status::Breakdown;
            break;
        }
        let x_next: Vec<f64> = u.iter().map(|e| e / unorm).collect();

        // extrapolated quotient, recorded for trace fidelity
        let mut quotient = None;
        if let (Some(g), Some(xp)) = (gamma_k, &x_prev) {
            let xg: Vec<f64> = x
                .iter()
                .zip(xp)
                .map(|(a, b)| (1.0 - g) * a + g * b)
                .collect();
            let ng = norm(&xg);
            if ng < 1e-300 {
                status = Status::Breakdown;
                break;
            }
            let dot: f64 = u.iter().zip(&xg).map(|(a, b)| a * b).sum();
            quotient = Some(dot / (ng * ng));
        }

        let c_next = a.contract_all(&x_next)?;
        let lambda_next = c_next.scalar;
        if !lambda_next.is_finite() {
            return Err(Error::NonFinite("iteration eigenvalue estimate"));
        }
        let shift_next = shift_at(policy, m, &c_next)?;
        let resid = residual_norm(&c_next.vector, lambda_next, &x_next);

        rows.push(TraceRow {
            k: k + 1,
            lambda: lambda_next,
            x: x_next.clone(),
            residual: resid,
            alpha: shift_next.alpha,
            gamma: gamma_k,
            update_norm: Some(unorm),
            quotient,
            lambda_min: shift_next.lambda_min,
        });

        if stop.is_none() && (lambda_next - lambda).abs() < policy.tol {
            stop = Some(k + 1);
        }

        x_prev = Some(std::mem::replace(&mut x, x_next));
        v_prev = Some(v);
        contraction = c_next;
        lambda = lambda_next;
        shift = shift_next;

        if stop.is_some() && resid <= policy.residual_target {
            status = Status::Converged;
            break;
        }
    }

    let pair = Eigenpair {
        lambda,
        x,
        classification: None,
    };
    Ok((
        pair,
        SolveTrace {
            rows,
            status,
            stop_iteration: stop,
        },
    ))
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn residual_norm(v: &[f64], lambda: f64, x: &[f64]) -> f64 {
    v.iter()
        .zip(x)
        .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{example1, example2};
    use crate::rng::SplitMix64;
    use crate::tensor::EntryList;

    fn diag4() -> SymmetricTensor {
        SymmetricTensor::from_entries(
            &EntryList::new(4, 3, (1..=3).map(|i| (vec![i; 4], 1.0)).collect()).unwrap(),
        )
        .unwrap()
    }

    const EX1_START: [f64; 3] = [-0.402911, 0.903051, -0.148865];

    fn unit(x: &[f64]) -> Vec<f64> {
        let n = norm(x);
        x.iter().map(|v| v / n).collect()
    }

    #[test]
    fn sshopm_example1_reaches_dominant_pair() {
        let a = example1();
        let cfg = SolvePolicy::sshopm(1.0).with_start(unit(&EX1_START));
        let (pair, trace) = sshopm(&a, &cfg).unwrap();
        assert_eq!(trace.status, Status::Converged);
        assert!(
            (pair.lambda - 0.8730).abs() < 5e-5,
            "lambda = {}",
            pair.lambda
        );
        assert!(pair.residual(&a).unwrap() <= RESIDUAL_CONTRACT);
        let its = trace.iterations().unwrap();
        assert!((20..=40).contains(&its), "iterations {its}");
    }

    #[test]
    fn sshopm_example2_reaches_dominant_pair() {
        let a = example2();
        let x0 = unit(&[0.00106864, -0.0655103, -0.997851]);
        let (pair, trace) = sshopm(&a, &SolvePolicy::sshopm(2.0).with_start(x0)).unwrap();
        assert_eq!(trace.status, Status::Converged);
        assert!(
            (pair.lambda - 0.8893).abs() < 5e-5,
            "lambda = {}",
            pair.lambda
        );
    }

    #[test]
    fn fixed_point_start_stops_immediately() {
        let a = diag4();
        let (pair, trace) = sshopm(
            &a,
            &SolvePolicy::sshopm(2.0).with_start(vec![1.0, 0.0, 0.0]),
        )
        .unwrap();
        assert_eq!(trace.status, Status::Converged);
        assert!((pair.lambda - 1.0).abs() < 1e-14);
        assert!(trace.iterations().unwrap() <= 2);
        assert!((pair.x[0].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn es_with_zero_gamma_reproduces_sshopm_exactly() {
        let a = example1();
        let mut g = SplitMix64::new(77);
        for _ in 0..10 {
            let x0 = g.unit_from_cube(3);
            let (_, t1) = sshopm(&a, &SolvePolicy::sshopm(1.0).with_start(x0.clone())).unwrap();
            let (_, t2) = es_sshopm(&a, &SolvePolicy::es_sshopm(1.0, 0.0).with_start(x0)).unwrap();
            assert_eq!(t1.rows.len(), t2.rows.len());
            for (r1, r2) in t1.rows.iter().zip(&t2.rows) {
                assert!(
                    (r1.lambda - r2.lambda).abs() <= 1e-15,
                    "k={} {} vs {}",
                    r1.k,
                    r1.lambda,
                    r2.lambda
                );
            }
        }
    }

    #[test]
    fn es_concave_example2_lands_in_reported_spectrum() {
        let a = example2();
        let mut g = SplitMix64::new(3);
        let expected = [-0.0451, -0.5629, -1.0954];
        for _ in 0..20 {
            let cfg = SolvePolicy::es_sshopm(-2.0, -0.20).with_start(g.unit_from_cube(3));
            let (pair, trace) = es_sshopm(&a, &cfg).unwrap();
            assert_eq!(trace.status, Status::Converged);
            assert!(
                expected.iter().any(|l| (pair.lambda - l).abs() < 5e-5),
                "unexpected eigenvalue {}",
                pair.lambda
            );
        }
    }

    #[test]
    fn es_shares_basin_with_sshopm_on_example1() {
        let a = example1();
        let mut g = SplitMix64::new(41);
        for _ in 0..50 {
            let x0 = g.unit_from_cube(3);
            let (p1, _) = sshopm(&a, &SolvePolicy::sshopm(1.0).with_start(x0.clone())).unwrap();
            let (p2, _) =
                es_sshopm(&a, &SolvePolicy::es_sshopm(1.0, -0.30).with_start(x0)).unwrap();
            assert!(
                (p1.lambda - p2.lambda).abs() < 1e-6,
                "basin split: {} vs {}",
                p1.lambda,
                p2.lambda
            );
        }
    }

    #[test]
    fn geap_on_fixed_point_and_example1() {
        let a = diag4();
        let (pair, trace) = geap(
            &a,
            &SolvePolicy::geap(1e-8, Sense::Convex).with_start(vec![1.0, 0.0, 0.0]),
        )
        .unwrap();
        assert_eq!(trace.status, Status::Converged);
        assert!((pair.lambda - 1.0).abs() < 1e-12);

        let a = example1();
        let x0 = unit(&EX1_START);
        let (pg, tg) = geap(
            &a,
            &SolvePolicy::geap(1e-6, Sense::Convex).with_start(x0.clone()),
        )
        .unwrap();
        let (_, ts) = sshopm(&a, &SolvePolicy::sshopm(1.0).with_start(x0)).unwrap();
        assert!((pg.lambda - 0.8730).abs() < 5e-5);
        assert!(
            tg.iterations().unwrap() < ts.iterations().unwrap(),
            "adaptive shift should beat alpha=1 here: {} vs {}",
            tg.iterations().unwrap(),
            ts.iterations().unwrap()
        );
    }

    #[test]
    fn geap_concave_finds_negated_spectrum() {
        let a = example1();
        let mut g = SplitMix64::new(9);
        let expected = [-0.8730, -0.4306, -0.0180, 0.0006];
        for _ in 0..20 {
            let cfg = SolvePolicy::geap(1e-6, Sense::Concave).with_start(g.unit_from_cube(3));
            let (pair, trace) = geap(&a, &cfg).unwrap();
            assert_eq!(trace.status, Status::Converged);
            assert!(
                expected.iter().any(|l| (pair.lambda - l).abs() < 5e-5),
                "unexpected eigenvalue {}",
                pair.lambda
            );
        }
    }

    #[test]
    fn geap_shift_contract_holds_every_iteration() {
        let a = example1();
        let mut g = SplitMix64::new(13);
        let tau = 1e-6;
        for _ in 0..10 {
            let cfg = SolvePolicy::geap(tau, Sense::Convex).with_start(g.unit_from_cube(3));
            let (_, trace) = geap(&a, &cfg).unwrap();
            for row in &trace.rows {
                let lmin = row.lambda_min.expect("adaptive rows carry lambda_min");
                let margin = lmin + 3.0 * 1.0 * row.alpha - tau;
                assert!(margin >= -1e-12, "shift contract margin {margin}");
            }
        }
    }

    #[test]
    fn des_beats_plain_iteration_from_paper_start() {
        let a = example1();
        let x0 = unit(&EX1_START);
        let (pd, td) =
            des_sshopm(&a, &SolvePolicy::des_sshopm(1.0).with_start(x0.clone())).unwrap();
        let (_, ts) = sshopm(&a, &SolvePolicy::sshopm(1.0).with_start(x0)).unwrap();
        assert!((pd.lambda - 0.8730).abs() < 5e-5);
        assert!(td.iterations().unwrap() < ts.iterations().unwrap());
    }

    #[test]
    fn des_gamma_approaches_optimal_weight_at_convergence() {
        let a = example1();
        let cfg = SolvePolicy::des_sshopm(1.0).with_start(unit(&EX1_START));
        let (pair, trace) = des_sshopm(&a, &cfg).unwrap();
        let c = a.contract_all(&pair.x).unwrap();
        let jac = jacobian_from_contraction(&c.matrix, 3, pair.lambda, &pair.x, 1.0).unwrap();
        let rho = eigh(&jac).unwrap().max_eigenvalue();
        let expected = (rho - 2.0 + 2.0 * (1.0 - rho).sqrt()) / rho;
        let last_gamma = trace.rows.iter().rev().find_map(|r| r.gamma).unwrap();
        assert!(
            (last_gamma - expected).abs() < 1e-6,
            "gamma {last_gamma} vs optimal {expected}"
        );
    }

    #[test]
    fn dynamic_gamma_guard_values() {
        // real part of sqrt(1 - 1.5) is zero: gamma = (1.5 - 2)/1.5
        assert!((dynamic_gamma(1.5) - (-1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(dynamic_gamma(0.0), 0.0);
        assert_eq!(dynamic_gamma(1e-13), 0.0);
        // smooth regime matches the closed form
        let rho = 0.75f64;
        assert!((dynamic_gamma(rho) - (-1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn de_geap_fixed_point_start() {
        let a = diag4();
        let cfg = SolvePolicy::de_geap(1e-8, Sense::Convex).with_start(vec![1.0, 0.0, 0.0]);
        let (pair, trace) = de_geap(&a, &cfg).unwrap();
        assert_eq!(trace.status, Status::Converged);
        assert!((pair.lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn de_geap_wins_on_example1_start() {
        let a = example1();
        let x0 = unit(&EX1_START);
        let (p, t) = de_geap(
            &a,
            &SolvePolicy::de_geap(1e-6, Sense::Convex).with_start(x0.clone()),
        )
        .unwrap();
        let (_, tg) = geap(&a, &SolvePolicy::geap(1e-6, Sense::Convex).with_start(x0)).unwrap();
        assert!((p.lambda - 0.8730).abs() < 5e-5);
        assert!(t.iterations().unwrap() <= tg.iterations().unwrap());
    }

    #[test]
    fn sshopm_lambda_monotone_under_convex_shift() {
        let mut g = SplitMix64::new(21);
        for (a, alpha) in [(example1(), 1.0), (example2(), 2.0)] {
            for _ in 0..10 {
                let cfg = SolvePolicy::sshopm(alpha).with_start(g.unit_from_cube(3));
                let (_, trace) = sshopm(&a, &cfg).unwrap();
                for w in trace.lambdas().windows(2) {
                    assert!(w[1] - w[0] >= -1e-12, "lambda step {} -> {}", w[0], w[1]);
                }
            }
        }
    }

    #[test]
    fn iterates_stay_normalized() {
        let a = example2();
        let cfg = SolvePolicy::des_sshopm(2.0).with_start(unit(&[0.3, -0.5, 0.8]));
        let (_, trace) = des_sshopm(&a, &cfg).unwrap();
        for row in &trace.rows {
            assert!((norm(&row.x) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_tensor_breaks_down() {
        let a = SymmetricTensor::from_entries(&EntryList::new(3, 2, vec![]).unwrap()).unwrap();
        let cfg = SolvePolicy::sshopm(0.0).with_start(vec![1.0, 0.0]);
        let (_, trace) = sshopm(&a, &cfg).unwrap();
        assert_eq!(trace.status, Status::Breakdown);
    }

    #[test]
    fn config_rejections() {
        assert!(
            SolvePolicy::es_sshopm(1.0, 0.5).validate().is_err(),
            "gamma > 0"
        );
        assert!(
            SolvePolicy::es_sshopm(1.0, -1.0).validate().is_err(),
            "gamma = -1"
        );
        assert!(
            SolvePolicy::sshopm(1.0).with_tol(0.0).validate().is_err(),
            "tol = 0"
        );
        assert!(SolvePolicy::sshopm(1.0)
            .with_max_iters(0)
            .validate()
            .is_err());
        assert!(
            SolvePolicy::geap(0.0, Sense::Convex).validate().is_err(),
            "tau = 0"
        );
        let mut p = SolvePolicy::sshopm(-1.0);
        p.sense = Sense::Convex;
        assert!(p.validate().is_err(), "sense must match shift sign");
        let cfg = SolvePolicy::sshopm(1.0).with_start(vec![1.0, 1.0, 0.0]);
        assert!(matches!(cfg.validate(3), Err(Error::NotUnit(_))));
    }

    #[test]
    fn wrapper_policy_checks() {
        let a = example1();
        let cfg = SolvePolicy::sshopm(1.0).with_start(vec![1.0, 0.0, 0.0]);
        assert!(es_sshopm(&a, &cfg).is_err());
        assert!(geap(&a, &cfg).is_err());
        assert!(sshopm(&a, &cfg).is_ok());
    }
}
