//! Z-eigenpair solvers for real symmetric tensors.
//!
//! A Z-eigenpair of a symmetric order-m tensor A is a pair (lambda, x) with
//! `A x^{m-1} = lambda x` and `|x| = 1`. This crate implements the shifted
//! symmetric higher-order power method of Kolda and Mayo, its adaptively
//! shifted variant, and depth-1 extrapolated versions of both, together with
//! the spectral rate theory that predicts (and lets you verify) the
//! acceleration the extrapolation buys.
//!
//! Modules:
//! - [`tensor`]: dense symmetric storage and the contraction kernels
//!   `A x^{m-2}`, `A x^{m-1}`, `A x^m`.
//! - [`linalg`]: self-contained dense symmetric eigensolver (cyclic Jacobi),
//!   orthogonal complements, and a Hessenberg-QR routine for the complex
//!   spectra of augmented Jacobians.
//! - [`solve`]: the five iteration loops with shared stopping logic and full
//!   trace capture.
//! - [`rate`]: iteration Jacobians, the augmented two-step Jacobian, the
//!   closed-form optimal extrapolation weight, convexity-threshold
//!   estimation, and eigenpair stability classification.
//! - [`experiment`]: multi-start occurrence tables, rate-verification
//!   sweeps, triangle tensors from graphs, and trace export.

pub mod error;
pub mod experiment;
pub mod linalg;
pub mod rate;
pub mod reference;
pub mod rng;
pub mod solve;
pub mod tensor;

pub use error::{Error, Result};
pub use experiment::{
    default_gamma_grid, export_traces, graph_to_tensor, rate_experiment, render_table, run_trials,
    Campaign, CampaignAudit, EigenRow, GraphSpec, RunArtifacts, TrialMethod, TrialSummary,
    EIGENVALUE_IDENTITY_TOL,
};
pub use linalg::{
    eig_general, eigh, ortho_complement, spectral_radius, ComplexEig, Mat, Spectrum, SymMatrix,
};
pub use rate::{
    augmented_jacobian, augmented_roots, beta_estimate, classify, gamma_opt, measured_rate,
    newton_polish, rho_gamma, rho_opt, sshopm_jacobian, suggest_shift, RateReport, BETA_SAFETY,
    CLASSIFY_EPS,
};
pub use rng::SplitMix64;
pub use solve::{
    de_geap, des_sshopm, dynamic_gamma, es_sshopm, geap, solve, sshopm, Eigenpair, GammaPolicy,
    Sense, ShiftPolicy, SolveConfig, SolvePolicy, SolveTrace, Stability, Status, TraceRow,
    DEFAULT_MAX_ITERS, DEFAULT_TOL, RESIDUAL_CONTRACT,
};
pub use tensor::{Contractions, EntryList, SymmetricTensor, DEFAULT_STORAGE_CAP};
