//! Command-line front end for the tensor Z-eigenpair solvers.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use zeig_core::rng::SplitMix64;
use zeig_core::*;

/// Exit code for runs that finish without converging.
const EXIT_NONCONVERGED: i32 = 2;

#[derive(Parser)]
#[command(
    name = "zeig",
    about = "Z-eigenpair solvers for symmetric tensors: shifted higher-order power iterations with extrapolation acceleration",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance from a single starting vector
    Solve(SolveArgs),
    /// Run a multi-start campaign and print an occurrence table
    Trials(TrialsArgs),
    /// Verify predicted versus measured convergence rates over a gamma grid
    Rate(RateArgs),
    /// Convert an undirected graph (coordinate format) to its triangle tensor
    Graph2tensor(GraphArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Sshopm,
    Es,
    Geap,
    Des,
    Degeap,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Sshopm => "sshopm",
            Method::Es => "es",
            Method::Geap => "geap",
            Method::Des => "des",
            Method::Degeap => "degeap",
        }
    }

    fn static_shift(self) -> bool {
        matches!(self, Method::Sshopm | Method::Es | Method::Des)
    }

    fn takes_gamma(self) -> bool {
        matches!(self, Method::Es | Method::Des | Method::Degeap)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct SolveArgs {
    /// Tensor file (text format: `m n` header, then `i_1 .. i_m value` lines)
    #[arg(long)]
    tensor: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Shift for static-shift methods: a number, or `auto` to sample the
    /// convexity threshold and scale by the safety factor
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Extrapolation weight for `es`: a number in (-1, 0] or `opt`
    /// (resolved from a preliminary plain solve); `des`/`degeap` choose
    /// their weight dynamically
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Seek minima of the shifted objective (adaptive-shift methods)
    #[arg(long)]
    concave: bool,
    /// Convexity margin for adaptive-shift methods (default 1e-6)
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// Starting vector: comma-separated values, or @path to a file; drawn
    /// from the seed when omitted
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    /// Seed for randomized choices (start vector, threshold sampling)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for trace CSV and JSON sidecar (defaults to $ZEIG_OUT_DIR)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct TrialsArgs {
    #[arg(long)]
    tensor: PathBuf,
    /// Single method to run
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Run all five methods from the same starts
    #[arg(long)]
    all_methods: bool,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Static extrapolation weight for `es`
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long)]
    concave: bool,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long)]
    tensor: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Starting vector (same syntax as `solve --start`); must lie in the
    /// basin of the targeted eigenpair
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    /// Comma-separated gamma grid, or `auto` for {0, gamma_opt/2, gamma_opt}
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    gammas: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct GraphArgs {
    /// Coordinate-format adjacency file (`rows cols nnz` header, `i j
    /// [value]` lines)
    #[arg(long)]
    graph: PathBuf,
    /// Output tensor file
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Trials(args) => cmd_trials(args),
        Command::Rate(args) => cmd_rate(args),
        Command::Graph2tensor(args) => cmd_graph(args),
    }
}

fn load_tensor(path: &Path) -> Result<SymmetricTensor> {
    SymmetricTensor::read_file(path).with_context(|| format!("reading tensor {}", path.display()))
}

fn resolve_alpha(spec: &str, a: &SymmetricTensor, seed: u64) -> Result<f64> {
    if spec == "auto" {
        let est = beta_estimate(a, 10_000, seed)?;
        let alpha = suggest_shift(est);
        println!("alpha auto: threshold estimate {est:.4} -> shift {alpha:.4} (x{BETA_SAFETY})");
        Ok(alpha)
    } else {
        spec.parse::<f64>()
            .map_err(|e| anyhow!("--alpha {spec}: {e}"))
    }
}

fn parse_start(spec: &str, n: usize) -> Result<Vec<f64>> {
    let text = if let Some(path) = spec.strip_prefix('@') {
        std::fs::read_to_string(path).with_context(|| format!("reading start vector {path}"))?
    } else {
        spec.to_string()
    };
    let vals: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| anyhow!("start component {s}: {e}"))
        })
        .collect::<Result<_>>()?;
    if vals.len() != n {
        bail!(
            "start vector has {} components, tensor dimension is {n}",
            vals.len()
        );
    }
    let norm = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-12 {
        bail!("start vector is numerically zero");
    }
    Ok(vals.iter().map(|v| v / norm).collect())
}

fn start_vector(spec: Option<&str>, n: usize, seed: u64) -> Result<Vec<f64>> {
    match spec {
        Some(s) => parse_start(s, n),
        None => {
            let x0 = SplitMix64::for_trial(seed, 0).unit_from_cube(n);
            println!("start: drawn from seed {seed}");
            Ok(x0)
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os("ZEIG_OUT_DIR").map(PathBuf::from))
}

struct MethodSetup {
    policy: SolvePolicy,
    /// resolved gamma and the preliminary solve's iteration count, when
    /// `--gamma opt` triggered a base run
    opt_resolution: Option<(f64, usize)>,
}

#[allow(clippy::too_many_arguments)]
fn build_policy(
    method: Method,
    alpha: Option<&str>,
    gamma: Option<&str>,
    tau: Option<f64>,
    concave: bool,
    tol: f64,
    max_iters: usize,
    a: &SymmetricTensor,
    seed: u64,
    x0: Option<&[f64]>,
) -> Result<MethodSetup> {
    if method.static_shift() {
        if tau.is_some() {
            bail!(
                "--tau applies to adaptive-shift methods only ({} has a static shift)",
                method.name()
            );
        }
        if alpha.is_none() {
            bail!("--alpha is required for {}", method.name());
        }
    } else if alpha.is_some() {
        bail!(
            "--alpha applies to static-shift methods only ({} adapts its shift)",
            method.name()
        );
    }
    if !method.takes_gamma() && gamma.is_some() {
        bail!("--gamma is not accepted for {}", method.name());
    }

    let sense = if concave {
        Sense::Concave
    } else {
        Sense::Convex
    };
    let mut opt_resolution = None;

    let policy = match method {
        Method::Sshopm | Method::Es | Method::Des => {
            let alpha = resolve_alpha(alpha.unwrap(), a, seed)?;
            if concave && alpha >= 0.0 {
                bail!("--concave requires a negative shift, got alpha = {alpha}");
            }
            match method {
                Method::Sshopm => SolvePolicy::sshopm(alpha),
                Method::Des => SolvePolicy::des_sshopm(alpha),
                Method::Es => {
                    let gspec = gamma.ok_or_else(|| anyhow!("--gamma is required for es"))?;
                    let g = if gspec == "opt" {
                        let x0 = x0.ok_or_else(|| {
                            anyhow!("--gamma opt needs a starting vector (preliminary solve)")
                        })?;
                        let base = SolvePolicy::sshopm(alpha)
                            .with_tol(tol)
                            .with_max_iters(max_iters)
                            .with_start(x0.to_vec());
                        let (pair, trace) = sshopm(a, &base)?;
                        if trace.status != Status::Converged {
                            bail!("preliminary plain solve did not converge; cannot resolve gamma opt");
                        }
                        let jac = sshopm_jacobian(a, pair.lambda, &pair.x, alpha)?;
                        let rho = eigh(&jac)?.max_eigenvalue();
                        let g = gamma_opt(rho)
                            .with_context(|| format!("rho = {rho} has no optimal static weight"))?;
                        println!(
                            "gamma opt: rho {rho:.6} -> gamma {g:.6} (preliminary solve took {} iterations)",
                            trace.iterations().unwrap()
                        );
                        opt_resolution = Some((g, trace.iterations().unwrap()));
                        g
                    } else {
                        gspec
                            .parse::<f64>()
                            .map_err(|e| anyhow!("--gamma {gspec}: {e}"))?
                    };
                    SolvePolicy::es_sshopm(alpha, g)
                }
                _ => unreachable!(),
            }
        }
        Method::Geap | Method::Degeap => {
            if let Some(g) = gamma {
                if g != "dynamic" {
                    bail!(
                        "{} chooses gamma dynamically; only `--gamma dynamic` is accepted",
                        method.name()
                    );
                }
            }
            let tau = tau.unwrap_or(1e-6);
            match method {
                Method::Geap => SolvePolicy::geap(tau, sense),
                Method::Degeap => SolvePolicy::de_geap(tau, sense),
                _ => unreachable!(),
            }
        }
    };
    Ok(MethodSetup {
        policy: policy.with_tol(tol).with_max_iters(max_iters),
        opt_resolution,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let a = load_tensor(&args.tensor)?;
    let x0 = start_vector(args.start.as_deref(), a.dim(), args.seed)?;
    let setup = build_policy(
        args.method,
        args.alpha.as_deref(),
        args.gamma.as_deref(),
        args.tau,
        args.concave,
        args.tol,
        args.max_iters,
        &a,
        args.seed,
        Some(&x0),
    )?;
    let cfg = setup.policy.with_start(x0);
    let (mut pair, trace) = solve(&a, &cfg)?;
    pair.classification = classify(&a, pair.lambda, &pair.x).ok();
    let residual = pair.residual(&a)?;

    match args.format {
        Format::Table => {
            println!("method:         {}", args.method.name());
            if let Some((g, its)) = setup.opt_resolution {
                println!("resolved gamma: {g:.6} (plus {its} preliminary iterations)");
            }
            println!("status:         {:?}", trace.status);
            println!("lambda:         {:.4} ({:.12})", pair.lambda, pair.lambda);
            println!(
                "x:              [{}]",
                pair.x
                    .iter()
                    .map(|v| format!("{v:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            println!(
                "classification: {}",
                pair.classification
                    .map_or("unclassified".into(), |c| format!("{c:?}"))
            );
            println!("residual:       {residual:.3e}");
            match trace.iterations() {
                Some(its) => println!("iterations:     {its} (trace rows {})", trace.rows.len()),
                None => println!("iterations:     - (trace rows {})", trace.rows.len()),
            }
        }
        Format::Json => {
            let doc = serde_json::json!({
                "method": args.method.name(),
                "status": trace.status,
                "lambda": pair.lambda,
                "x": pair.x,
                "classification": pair.classification,
                "residual": residual,
                "iterations": trace.iterations(),
                "trace_rows": trace.rows.len(),
                "resolved_gamma": setup.opt_resolution.map(|(g, _)| g),
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }

    let status = trace.status;
    if let Some(dir) = out_dir(args.out) {
        let label = format!(
            "solve-{}-{}",
            args.method.name(),
            args.tensor
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("tensor")
        );
        let runs = vec![RunArtifacts {
            label,
            method: args.method.name().into(),
            config: cfg,
            eigenpair: pair,
            trace,
            rate: None,
        }];
        let written = export_traces(&runs, &dir)?;
        println!(
            "wrote {} and {}",
            written[0].0.display(),
            written[0].1.display()
        );
    }
    Ok(if status == Status::Converged {
        0
    } else {
        EXIT_NONCONVERGED
    })
}

fn trial_methods(args: &TrialsArgs, a: &SymmetricTensor) -> Result<Vec<TrialMethod>> {
    let sense = if args.concave {
        Sense::Concave
    } else {
        Sense::Convex
    };
    let alpha = match args.alpha.as_deref() {
        Some(spec) => Some(resolve_alpha(spec, a, args.seed)?),
        None => None,
    };
    let need_alpha =
        || alpha.ok_or_else(|| anyhow!("--alpha is required for static-shift methods"));
    let tau = args.tau.unwrap_or(1e-6);
    let tune = |p: SolvePolicy| p.with_tol(args.tol).with_max_iters(args.max_iters);

    if args.all_methods {
        let alpha = need_alpha()?;
        if args.concave != (alpha < 0.0) {
            bail!("the sense must match the shift sign (alpha = {alpha})");
        }
        let gamma = args
            .gamma
            .ok_or_else(|| anyhow!("--gamma is required with --all-methods"))?;
        Ok(vec![
            TrialMethod::new("S-SHOPM", tune(SolvePolicy::sshopm(alpha))),
            TrialMethod::new("ES-SHOPM", tune(SolvePolicy::es_sshopm(alpha, gamma))),
            TrialMethod::new("DES-SHOPM", tune(SolvePolicy::des_sshopm(alpha))),
            TrialMethod::new("GEAP", tune(SolvePolicy::geap(tau, sense))),
            TrialMethod::new("DE-GEAP", tune(SolvePolicy::de_geap(tau, sense))),
        ])
    } else {
        let method = args
            .method
            .ok_or_else(|| anyhow!("pass --method or --all-methods"))?;
        if args.gamma.is_some() && !method.takes_gamma() {
            bail!("--gamma is not accepted for {}", method.name());
        }
        if args.tau.is_some() && method.static_shift() {
            bail!("--tau applies to adaptive-shift methods only");
        }
        let policy = match method {
            Method::Sshopm => SolvePolicy::sshopm(need_alpha()?),
            Method::Es => SolvePolicy::es_sshopm(
                need_alpha()?,
                args.gamma
                    .ok_or_else(|| anyhow!("--gamma is required for es"))?,
            ),
            Method::Des => SolvePolicy::des_sshopm(need_alpha()?),
            Method::Geap => SolvePolicy::geap(tau, sense),
            Method::Degeap => SolvePolicy::de_geap(tau, sense),
        };
        Ok(vec![TrialMethod::new(method.name(), tune(policy))])
    }
}

fn cmd_trials(args: TrialsArgs) -> Result<i32> {
    let a = load_tensor(&args.tensor)?;
    let methods = trial_methods(&args, &a)?;
    let campaign = run_trials(&a, &methods, args.trials, args.seed)?;
    let odd = a.order() % 2 == 1;

    let rendered = match args.format {
        Format::Table => {
            let mut text = render_table(&campaign.summaries, odd);
            let audit = &campaign.audit;
            if audit.basin_comparable > 0 {
                text.push_str(&format!(
                    "static basin agreement: {}/{}\n",
                    audit.basin_agreements, audit.basin_comparable
                ));
            }
            text.push_str(&format!(
                "max converged residual: {:.2e}\n",
                audit.max_converged_residual
            ));
            text
        }
        Format::Json => serde_json::to_string_pretty(&campaign)?,
    };
    print!("{rendered}");

    if let Some(dir) = out_dir(args.out) {
        std::fs::create_dir_all(&dir)?;
        let ext = match args.format {
            Format::Table => "txt",
            Format::Json => "json",
        };
        let path = dir.join(format!("trials-seed{}.{ext}", args.seed));
        std::fs::write(&path, rendered)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn cmd_rate(args: RateArgs) -> Result<i32> {
    let a = load_tensor(&args.tensor)?;
    let alpha = resolve_alpha(&args.alpha, &a, args.seed)?;
    let x0 = parse_start(&args.start, a.dim())?;

    let grid: Vec<f64> = if args.gammas == "auto" {
        match rate_experiment(&a, alpha, &x0, &[0.0]) {
            Ok(reports) => default_gamma_grid(reports[0].rho)?.to_vec(),
            Err(zeig_core::Error::BadConfig(msg)) => {
                eprintln!("error: {msg}");
                return Ok(EXIT_NONCONVERGED);
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        let grid: Vec<f64> = args
            .gammas
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| anyhow!("--gammas {s}: {e}"))
            })
            .collect::<Result<_>>()?;
        if let Some(bad) = grid.iter().find(|g| !(**g > -1.0 && **g <= 0.0)) {
            bail!("--gammas values must lie in (-1, 0], got {bad}");
        }
        grid
    };

    let reports = match rate_experiment(&a, alpha, &x0, &grid) {
        Ok(r) => r,
        Err(zeig_core::Error::BadConfig(msg)) => {
            eprintln!("error: {msg}");
            return Ok(EXIT_NONCONVERGED);
        }
        Err(e) => return Err(e.into()),
    };

    match args.format {
        Format::Table => {
            let head = &reports[0];
            println!(
                "base pair: lambda {:.6}, rho {:.6}, gamma_opt {:.6}, rho_opt {:.6}",
                head.eigenpair.lambda, head.rho, head.gamma_opt, head.rho_opt
            );
            println!(
                "{:>12} {:>12} {:>12} {:>9} {:>12}",
                "gamma", "predicted", "measured", "rel.err", "regime"
            );
            for r in &reports {
                let predicted = r.predicted().unwrap_or(f64::NAN);
                let (measured, rel) = match r.measured_rate {
                    Some(m) => (
                        format!("{m:.6}"),
                        format!("{:+.2}%", 100.0 * (m - predicted) / predicted),
                    ),
                    None => ("-".into(), "-".into()),
                };
                println!(
                    "{:>12.6} {:>12.6} {:>12} {:>9} {:>12}",
                    r.gamma,
                    predicted,
                    measured,
                    rel,
                    if r.oscillatory {
                        "oscillatory"
                    } else {
                        "monotone"
                    }
                );
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&reports)?),
    }

    if let Some(dir) = out_dir(args.out) {
        std::fs::create_dir_all(&dir)?;
        let path = dir.join(format!("rate-alpha{alpha}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&reports)?)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn cmd_graph(args: GraphArgs) -> Result<i32> {
    let g = GraphSpec::read_file(&args.graph)
        .with_context(|| format!("reading graph {}", args.graph.display()))?;
    let triangles = g.triangles().len();
    let t = graph_to_tensor(&g)?;
    t.write_file(&args.out)?;
    println!(
        "graph: {} vertices, {} edges, {} triangles -> tensor {} (order 3, dimension {})",
        g.n,
        g.edges.len(),
        triangles,
        args.out.display(),
        t.dim()
    );
    Ok(0)
}
