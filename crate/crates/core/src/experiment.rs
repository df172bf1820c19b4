//! Multi-start experiment harness: occurrence tables over random starts,
//! rate-verification sweeps, triangle-tensor construction from graphs, and
//! trace export.

use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::rate::{gamma_opt, measured_rate, rho_gamma, rho_opt, sshopm_jacobian, RateReport};
use crate::rng::SplitMix64;
use crate::solve::{
    solve, Eigenpair, GammaPolicy, ShiftPolicy, SolveConfig, SolvePolicy, SolveTrace, Status,
};
use crate::tensor::{EntryList, SymmetricTensor};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Two converged eigenvalues belong to the same class when they differ by
/// less than this; the spectra of interest are quoted to four decimals and
/// separated by far more.
pub const EIGENVALUE_IDENTITY_TOL: f64 = 1e-6;

/// One solver entry in a campaign.
#[derive(Debug, Clone, Serialize)]
pub struct TrialMethod {
    pub id: String,
    pub policy: SolvePolicy,
}

impl TrialMethod {
    pub fn new(id: impl Into<String>, policy: SolvePolicy) -> Self {
        Self {
            id: id.into(),
            policy,
        }
    }
}

/// Occurrence-table row: one eigenvalue class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    /// class representative (mean over merged trials)
    pub lambda: f64,
    pub occurrences: usize,
    /// lower median of iteration counts over converged trials
    pub median_iterations: usize,
}

/// Occurrence table for one method over a campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub method: String,
    pub rows: Vec<EigenRow>,
    pub trials: usize,
    pub non_converged: usize,
    pub master_seed: u64,
}

/// Contract checks accumulated while a campaign runs.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignAudit {
    /// max |A x^{m-1} - lambda x| over converged runs
    pub max_converged_residual: f64,
    /// max | |x| - 1 | over converged final iterates
    pub max_final_norm_error: f64,
    /// min of lambda_min + m chi alpha_k - tau over all adaptive iterations
    pub min_shift_margin: Option<f64>,
    /// min per-step lambda change over plain convex static-shift runs
    pub min_monotone_step: Option<f64>,
    /// trials where both the plain and the extrapolated static method
    /// converged
    pub basin_comparable: usize,
    /// of those, trials converging to the same eigenvalue class
    pub basin_agreements: usize,
    /// converged pairs run through the stability classifier
    pub classified: usize,
    /// pairs whose class disagrees with the iteration sense (convex runs
    /// should land on negative stable pairs, concave on positive stable)
    pub class_mismatches: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Campaign {
    pub summaries: Vec<TrialSummary>,
    pub audit: CampaignAudit,
}

/// Run `trials` random starts, every method from the same start, and
/// aggregate occurrence tables.
///
/// Start vectors are uniform on [-1,1]^n normalized; trial t seeds its own
/// generator from (master_seed, t), so the campaign is reproducible
/// bit-for-bit regardless of scheduling.
pub fn run_trials(
    a: &SymmetricTensor,
    methods: &[TrialMethod],
    trials: usize,
    master_seed: u64,
) -> Result<Campaign> {
    if trials < 1 {
        return Err(Error::BadConfig("trials must be >= 1".into()));
    }
    if methods.is_empty() {
        return Err(Error::BadConfig("at least one method".into()));
    }
    for m in methods {
        m.policy.validate()?;
    }
    let n = a.dim();
    let m_order = a.order();
    let odd = m_order % 2 == 1;

    // indices used for the basin-agreement audit: the first plain
    // static-shift method and the first statically extrapolated one
    let plain_idx = methods.iter().position(|m| {
        matches!(m.policy.shift, ShiftPolicy::Static(_))
            && matches!(m.policy.gamma, GammaPolicy::None)
    });
    let extrap_idx = methods.iter().position(|m| {
        matches!(m.policy.shift, ShiftPolicy::Static(_))
            && matches!(m.policy.gamma, GammaPolicy::Static(_))
    });

    let mut per_method: Vec<Vec<(f64, usize)>> = vec![Vec::new(); methods.len()];
    let mut non_converged = vec![0usize; methods.len()];
    let mut audit = CampaignAudit {
        max_converged_residual: 0.0,
        max_final_norm_error: 0.0,
        min_shift_margin: None,
        min_monotone_step: None,
        basin_comparable: 0,
        basin_agreements: 0,
        classified: 0,
        class_mismatches: 0,
    };

    for t in 0..trials {
        let x0 = SplitMix64::for_trial(master_seed, t as u64).unit_from_cube(n);
        let mut trial_lambdas: Vec<Option<f64>> = vec![None; methods.len()];
        for (mi, method) in methods.iter().enumerate() {
            let cfg = method.policy.with_start(x0.clone());
            let (pair, trace) = solve(a, &cfg)?;
            audit_trace(&mut audit, &method.policy, m_order, &trace);
            if trace.status == Status::Converged {
                let its = trace
                    .stop_iteration
                    .expect("converged run has a stop iteration");
                per_method[mi].push((pair.lambda, its));
                trial_lambdas[mi] = Some(pair.lambda);
                let resid = trace.final_row().residual;
                audit.max_converged_residual = audit.max_converged_residual.max(resid);
                let norm_err = (crate::solve::norm(&pair.x) - 1.0).abs();
                audit.max_final_norm_error = audit.max_final_norm_error.max(norm_err);
                audit.classified += 1;
                let expected = match method.policy.sense {
                    crate::solve::Sense::Convex => crate::solve::Stability::NegativeStable,
                    crate::solve::Sense::Concave => crate::solve::Stability::PositiveStable,
                };
                match crate::rate::classify(a, pair.lambda, &pair.x) {
                    Ok(class) if class == expected => {}
                    _ => audit.class_mismatches += 1,
                }
            } else {
                non_converged[mi] += 1;
            }
        }
        if let (Some(pi), Some(ei)) = (plain_idx, extrap_idx) {
            if let (Some(lp), Some(le)) = (trial_lambdas[pi], trial_lambdas[ei]) {
                audit.basin_comparable += 1;
                if same_class(lp, le, odd) {
                    audit.basin_agreements += 1;
                }
            }
        }
    }

    let summaries = methods
        .iter()
        .zip(per_method)
        .zip(non_converged)
        .map(|((method, outcomes), nc)| TrialSummary {
            method: method.id.clone(),
            rows: cluster_rows(outcomes, odd),
            trials,
            non_converged: nc,
            master_seed,
        })
        .collect();

    Ok(Campaign { summaries, audit })
}

fn audit_trace(audit: &mut CampaignAudit, policy: &SolvePolicy, m: usize, trace: &SolveTrace) {
    if let ShiftPolicy::Adaptive { tau } = policy.shift {
        let chi = policy.sense.chi();
        for row in &trace.rows {
            if let Some(lmin) = row.lambda_min {
                let margin = lmin + m as f64 * chi * row.alpha - tau;
                audit.min_shift_margin = Some(
                    audit
                        .min_shift_margin
                        .map_or(margin, |v: f64| v.min(margin)),
                );
            }
        }
    }
    let plain_convex_static = matches!(policy.shift, ShiftPolicy::Static(alpha) if alpha >= 0.0)
        && matches!(policy.gamma, GammaPolicy::None);
    if plain_convex_static {
        for w in trace.rows.windows(2) {
            let step = w[1].lambda - w[0].lambda;
            audit.min_monotone_step =
                Some(audit.min_monotone_step.map_or(step, |v: f64| v.min(step)));
        }
    }
}

/// Class identity: |difference| below tolerance, keyed on |lambda| for odd
/// order where (lambda, x) and (-lambda, -x) name the same pair.
fn same_class(a: f64, b: f64, odd: bool) -> bool {
    if odd {
        (a.abs() - b.abs()).abs() < EIGENVALUE_IDENTITY_TOL && a.signum() == b.signum()
            || (a - b).abs() < EIGENVALUE_IDENTITY_TOL
    } else {
        (a - b).abs() < EIGENVALUE_IDENTITY_TOL
    }
}

fn cluster_rows(outcomes: Vec<(f64, usize)>, odd: bool) -> Vec<EigenRow> {
    let mut sorted = outcomes;
    let key = |l: f64| if odd { l.abs() } else { l };
    sorted.sort_by(|x, y| key(x.0).partial_cmp(&key(y.0)).unwrap());
    let mut rows: Vec<EigenRow> = Vec::new();
    let mut cluster: Vec<(f64, usize)> = Vec::new();
    let flush = |cluster: &mut Vec<(f64, usize)>, rows: &mut Vec<EigenRow>| {
        if cluster.is_empty() {
            return;
        }
        let mean = cluster.iter().map(|(l, _)| l).sum::<f64>() / cluster.len() as f64;
        let mut its: Vec<usize> = cluster.iter().map(|&(_, i)| i).collect();
        its.sort_unstable();
        rows.push(EigenRow {
            lambda: mean,
            occurrences: cluster.len(),
            median_iterations: its[(its.len() - 1) / 2],
        });
        cluster.clear();
    };
    let mut last_key: Option<f64> = None;
    for (l, its) in sorted {
        if let Some(k) = last_key {
            if (key(l) - k).abs() >= EIGENVALUE_IDENTITY_TOL {
                flush(&mut cluster, &mut rows);
            }
        }
        last_key = Some(key(l));
        cluster.push((l, its));
    }
    flush(&mut cluster, &mut rows);
    // class key descending: |lambda| for sign-merged odd-order classes
    rows.sort_by(|a, b| key(b.lambda).partial_cmp(&key(a.lambda)).unwrap());
    rows
}

/// Run the extrapolated iteration over a gamma grid from one start and pair
/// each run's measured residual slope with the closed-form prediction.
///
/// Runs push the residual through the measurement window, so they use a
/// tighter residual target than the eigenpair contract.
pub fn rate_experiment(
    a: &SymmetricTensor,
    alpha: f64,
    x0: &[f64],
    gamma_grid: &[f64],
) -> Result<Vec<RateReport>> {
    let base_policy = SolvePolicy::sshopm(alpha)
        .with_residual_target(1e-13)
        .with_max_iters(5000);
    let (base_pair, base_trace) = solve(a, &base_policy.with_start(x0.to_vec()))?;
    if base_trace.status != Status::Converged {
        return Err(Error::BadConfig(format!(
            "base run did not converge from the given start (status {:?})",
            base_trace.status
        )));
    }
    let jac = sshopm_jacobian(a, base_pair.lambda, &base_pair.x, alpha)?;
    // J is positive semidefinite at an attracting pair, so the largest
    // eigenvalue is the spectral radius
    let rho = eigh(&jac)?.max_eigenvalue();
    let go = gamma_opt(rho)?;
    let ro = rho_opt(rho)?;
    let curve: Vec<(f64, f64)> = gamma_grid
        .iter()
        .map(|&g| Ok((g, rho_gamma(rho, g)?)))
        .collect::<Result<_>>()?;

    let mut reports = Vec::with_capacity(gamma_grid.len());
    for &gamma in gamma_grid {
        let policy = SolvePolicy::es_sshopm(alpha, gamma)
            .with_residual_target(1e-13)
            .with_max_iters(5000);
        let (pair, trace) = solve(a, &policy.with_start(x0.to_vec()))?;
        let measured = if trace.status == Status::Converged {
            measured_rate(&trace.residuals())
        } else {
            None
        };
        reports.push(RateReport {
            rho,
            gamma_opt: go,
            rho_opt: ro,
            gamma,
            rho_gamma_curve: curve.clone(),
            measured_rate: measured,
            oscillatory: gamma < go,
            eigenpair: pair,
            alpha,
        });
    }
    Ok(reports)
}

/// The standard verification grid {0, gamma_opt/2, gamma_opt} for a base
/// rate rho.
pub fn default_gamma_grid(rho: f64) -> Result<[f64; 3]> {
    let go = gamma_opt(rho)?;
    Ok([0.0, go / 2.0, go])
}

/// Undirected simple graph, 1-based vertex labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSpec {
    pub n: usize,
    /// deduplicated edges with i < j
    pub edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::BadEdge(a, b, "self-loop"));
            }
            if a < 1 || b < 1 || a > n || b > n {
                return Err(Error::BadEdge(a, b, "vertex out of range"));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::BadEdge(a, b, "duplicate edge"));
            }
            out.push(e);
        }
        out.sort_unstable();
        Ok(Self { n, edges: out })
    }

    /// Parse coordinate-format sparse matrix text: a header `rows cols nnz`,
    /// then `i j [value]` lines; `%` and `#` start comments. Off-diagonal
    /// entries become undirected edges, duplicates (including the symmetric
    /// counterpart) collapse, diagonal entries are ignored.
    pub fn from_coordinate_text(text: &str) -> Result<Self> {
        let mut header: Option<usize> = None;
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let int = |s: &str, what: &str| -> Result<usize> {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("{what}: {e}"),
                })
            };
            match header {
                None => {
                    if fields.len() < 2 {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: "expected header `rows cols nnz`".into(),
                        });
                    }
                    let rows = int(fields[0], "rows")?;
                    let cols = int(fields[1], "cols")?;
                    if rows != cols {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!("adjacency matrix must be square, got {rows}x{cols}"),
                        });
                    }
                    header = Some(rows);
                }
                Some(n) => {
                    if fields.len() < 2 {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: "expected `i j [value]`".into(),
                        });
                    }
                    let i = int(fields[0], "row index")?;
                    let j = int(fields[1], "col index")?;
                    if i == j {
                        continue;
                    }
                    if i < 1 || j < 1 || i > n || j > n {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!("index ({i}, {j}) outside 1..={n}"),
                        });
                    }
                    seen.insert((i.min(j), i.max(j)));
                }
            }
        }
        let n = header.ok_or(Error::Parse {
            line: 0,
            msg: "empty graph file".into(),
        })?;
        Ok(Self {
            n,
            edges: seen.into_iter().collect(),
        })
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_coordinate_text(&std::fs::read_to_string(path)?)
    }

    /// Triangles (3-cycles) as sorted vertex triples.
    pub fn triangles(&self) -> Vec<(usize, usize, usize)> {
        let mut adj = vec![BTreeSet::new(); self.n + 1];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            for &c in adj[a].intersection(&adj[b]) {
                if c > b {
                    out.push((a, b, c));
                }
            }
        }
        out
    }
}

/// Order-3 adjacency tensor of the graph's triangles: a_{ijk} = 1 on every
/// permutation of each triangle, zero elsewhere.
pub fn graph_to_tensor(g: &GraphSpec) -> Result<SymmetricTensor> {
    let entries: Vec<(Vec<usize>, f64)> = g
        .triangles()
        .into_iter()
        .map(|(a, b, c)| (vec![a, b, c], 1.0))
        .collect();
    SymmetricTensor::from_entries(&EntryList::new(3, g.n, entries)?)
}

/// Everything worth persisting about one solver run.
#[derive(Debug, Clone, Serialize)]
pub struct RunArtifacts {
    pub label: String,
    pub method: String,
    pub config: SolveConfig,
    pub eigenpair: Eigenpair,
    pub trace: SolveTrace,
    pub rate: Option<RateReport>,
}

/// Write one CSV (k, lambda, residual, alpha_k, gamma_k) plus one JSON
/// sidecar per run; returns the paths written.
pub fn export_traces(
    runs: &[RunArtifacts],
    dir: impl AsRef<Path>,
) -> Result<Vec<(PathBuf, PathBuf)>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(runs.len());
    for run in runs {
        let stem = sanitize(&run.label);
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));

        let mut csv = String::from("k,lambda,residual,alpha_k,gamma_k\n");
        for row in &run.trace.rows {
            let gamma = row.gamma.map(|g| g.to_string()).unwrap_or_default();
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                row.k, row.lambda, row.residual, row.alpha, gamma
            );
        }
        std::fs::write(&csv_path, csv)?;

        let sidecar = serde_json::json!({
            "label": run.label,
            "method": run.method,
            "config": run.config,
            "status": run.trace.status,
            "iterations": run.trace.stop_iteration,
            "eigenpair": run.eigenpair,
            "classification": run.eigenpair.classification,
            "rate": run.rate,
        });
        std::fs::write(&json_path, serde_json::to_string_pretty(&sidecar)?)?;
        written.push((csv_path, json_path));
    }
    Ok(written)
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Aligned text table in the style of the occurrence tables: one row per
/// eigenvalue class, (Its., #Occ.) per method.
pub fn render_table(summaries: &[TrialSummary], odd_order: bool) -> String {
    // union of class representatives across methods
    let mut reps: Vec<f64> = Vec::new();
    let key = |l: f64| if odd_order { l.abs() } else { l };
    for s in summaries {
        for row in &s.rows {
            if !reps
                .iter()
                .any(|&r| (key(r) - key(row.lambda)).abs() < EIGENVALUE_IDENTITY_TOL)
            {
                reps.push(row.lambda);
            }
        }
    }
    reps.sort_by(|a, b| key(*b).partial_cmp(&key(*a)).unwrap());

    let mut out = String::new();
    let _ = write!(out, "{:>10} ", "lambda");
    for s in summaries {
        let _ = write!(out, "| {:>18} ", s.method);
    }
    let _ = writeln!(out);
    let _ = write!(out, "{:>10} ", "");
    for _ in summaries {
        let _ = write!(out, "| {:>8} {:>9} ", "Its.", "# Occ.");
    }
    let _ = writeln!(out);
    for rep in &reps {
        let _ = write!(out, "{:>10.4} ", rep);
        for s in summaries {
            match s
                .rows
                .iter()
                .find(|r| (key(r.lambda) - key(*rep)).abs() < EIGENVALUE_IDENTITY_TOL)
            {
                Some(row) => {
                    let _ = write!(
                        out,
                        "| {:>8} {:>9} ",
                        row.median_iterations, row.occurrences
                    );
                }
                None => {
                    let _ = write!(out, "| {:>8} {:>9} ", "-", "-");
                }
            }
        }
        let _ = writeln!(out);
    }
    let nc: usize = summaries.iter().map(|s| s.non_converged).sum();
    if nc > 0 {
        let _ = write!(out, "non-converged:");
        for s in summaries {
            let _ = write!(out, " {}={}", s.method, s.non_converged);
        }
        let _ = writeln!(out);
    }
    out
}
