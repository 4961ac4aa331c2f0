//! Command-line driver for the insurance-market solver.
//!
//! Three subcommands cover the workflows: `solve` reports the equilibrium of
//! a single market, `sweep` profiles the insurer's profit across the
//! weighting parameter and emits CSV, and `verify` runs the full numerical
//! verification battery (independent-route agreement, indifference, random
//! falsification searches) with a machine-readable summary.
//!
//! Exit codes: 0 on success, 2 for configuration problems (unreadable or
//! invalid config files, bad flag values), 3 for verification failures
//! (battery checks or internal route disagreement).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bowley::config::{parse_tie, RunConfig, DEFAULT_RESOLUTION};
use bowley::oracle;
use bowley::{
    best_response, drm_of_loss, equilibrium_from_pareto, is_pareto_optimal,
    policyholder_objective, solve, Contract, DistortionFunction, EquilibriumResult, Error,
    LossModel, TiePolicy,
};

#[derive(Parser)]
#[command(
    name = "bowley",
    version,
    about = "Stackelberg insurance-market solver for distortion risk measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one market and print the equilibrium report.
    Solve(SolveArgs),
    /// Sweep the weighting parameter theta and emit the profit curve as CSV.
    Sweep(SweepArgs),
    /// Run the verification battery and print a machine-readable summary.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of the config's `output` (or stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the solver's sign-scan resolution.
    #[arg(long)]
    resolution: Option<usize>,
    /// Override the tie policy: retain | cede | insurer.
    #[arg(long)]
    tie: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Path to the TOML run configuration (distortion kind must be "tk").
    #[arg(long)]
    config: PathBuf,
    /// Write the CSV here instead of the config's `output` (or stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the solver's sign-scan resolution.
    #[arg(long)]
    resolution: Option<usize>,
    /// Override the tie policy: retain | cede | insurer.
    #[arg(long)]
    tie: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Optional config whose market is checked ahead of the built-in battery.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the random pricing-distortion searches.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Random pricing distortions sampled per battery pair.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sign-scan resolution for the battery solves.
    #[arg(long)]
    resolution: Option<usize>,
}

/// A terminal failure, carrying the exit-code class.
enum Failure {
    /// Unreadable, unparseable, or invalid configuration and parameters.
    Config(String),
    /// A numerical verification failed.
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Verification(m) => m,
        }
    }
}

fn config_err(e: Error) -> Failure {
    Failure::Config(e.to_string())
}

/// Map an engine error to the exit-code class: a profit-route disagreement is
/// a verification failure, everything else is bad input.
fn classify(e: Error) -> Failure {
    match e {
        Error::ProfitRouteDisagreement { .. } => Failure::Verification(e.to_string()),
        other => Failure::Config(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn tie_name(tie: TiePolicy) -> &'static str {
    match tie {
        TiePolicy::Retain => "retain",
        TiePolicy::Cede => "cede",
        TiePolicy::InsurerOptimal => "insurer",
    }
}

/// Resolve the effective resolution and tie policy from flags and config.
fn solver_options(
    config: &RunConfig,
    resolution: Option<usize>,
    tie: &Option<String>,
) -> Result<(usize, TiePolicy), Failure> {
    let resolution = resolution.unwrap_or(config.solver.resolution);
    let tie = match tie {
        Some(name) => parse_tie(name).map_err(config_err)?,
        None => config.solver.tie_policy().map_err(config_err)?,
    };
    Ok((resolution, tie))
}

fn write_output(
    text: &str,
    flag_out: Option<&Path>,
    config_out: Option<&str>,
) -> Result<(), Failure> {
    let target = flag_out
        .map(Path::to_path_buf)
        .or_else(|| config_out.map(PathBuf::from));
    match target {
        Some(path) => fs::write(&path, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let t = config.distortion.build().map_err(config_err)?;
    let m = config.loss.build().map_err(config_err)?;
    let (resolution, tie) = solver_options(&config, args.resolution, &args.tie)?;

    let eq = solve(&t, &m, tie, resolution).map_err(classify)?;
    let report = solve_report(&t, &m, tie, resolution, &eq).map_err(classify)?;
    write_output(&report, args.out.as_deref(), config.output.as_deref())
}

/// Render the equilibrium summary: crossings, region table, premium, profit
/// by both routes, policyholder risk with its indifference gap, and the
/// Pareto certificate of the equilibrium contract.
fn solve_report(
    t: &DistortionFunction,
    m: &LossModel,
    tie: TiePolicy,
    resolution: usize,
    eq: &EquilibriumResult,
) -> bowley::Result<String> {
    let uninsured = drm_of_loss(m, t)?;
    let contract = Contract::new(eq.indemnity.clone(), eq.premium)?;
    let certificate = is_pareto_optimal(&contract, m, t, resolution, 0)?;

    let crossings = if eq.crossing_set.points.is_empty() {
        "none".to_string()
    } else {
        eq.crossing_set
            .points
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    };

    let mut regions = String::new();
    for (i, r) in eq.partition.regions.iter().enumerate() {
        if i > 0 {
            regions.push_str("; ");
        }
        let closer = if i + 1 == eq.partition.regions.len() {
            ']'
        } else {
            ')'
        };
        write!(regions, "[{}, {}{}: {}", r.y_lo, r.y_hi, closer, r.label).unwrap();
    }

    let mut out = String::new();
    writeln!(out, "market: T = {t}, loss = {m}").unwrap();
    writeln!(out, "solver: resolution = {resolution}, tie = {}", tie_name(tie)).unwrap();
    writeln!(out, "crossings (t-space): {crossings}").unwrap();
    writeln!(out, "regions: {regions}").unwrap();
    writeln!(out, "premium: {}", eq.premium).unwrap();
    writeln!(out, "profit (layer route): {}", eq.profit).unwrap();
    writeln!(out, "profit (marginal route): {}", eq.profit_insurer_route).unwrap();
    writeln!(out, "policyholder risk: {}", eq.policyholder_risk).unwrap();
    writeln!(out, "uninsured risk: {uninsured}").unwrap();
    writeln!(
        out,
        "indifference gap: {:e}",
        eq.policyholder_risk - uninsured
    )
    .unwrap();
    writeln!(
        out,
        "pareto: {} (objective {}, minimum {}, gap {:e})",
        if certificate.is_optimal {
            "optimal"
        } else {
            "NOT OPTIMAL"
        },
        certificate.objective,
        certificate.minimal_objective,
        certificate.gap
    )
    .unwrap();
    Ok(out)
}

struct SweepRow {
    theta: f64,
    t1: f64,
    deductible: f64,
    premium: f64,
    profit: f64,
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    if config.distortion.kind != "tk" {
        return Err(Failure::Config(format!(
            "sweep requires distortion kind 'tk' (theta is the swept parameter), got '{}'",
            config.distortion.kind
        )));
    }
    let m = config.loss.build().map_err(config_err)?;
    let (resolution, tie) = solver_options(&config, args.resolution, &args.tie)?;
    let grid = config
        .sweep
        .clone()
        .unwrap_or_default()
        .grid()
        .map_err(config_err)?;

    let rows = sweep_rows(&grid, &m, tie, resolution).map_err(classify)?;
    let csv = render_csv(&rows);
    write_output(&csv, args.out.as_deref(), config.output.as_deref())
}

/// Solve every grid point, in parallel, preserving grid order in the output.
fn sweep_rows(
    grid: &[f64],
    m: &LossModel,
    tie: TiePolicy,
    resolution: usize,
) -> bowley::Result<Vec<SweepRow>> {
    let mut slots: Vec<Option<bowley::Result<SweepRow>>> = Vec::new();
    slots.resize_with(grid.len(), || None);
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .clamp(1, grid.len().max(1));
    let chunk = grid.len().div_ceil(workers);
    std::thread::scope(|scope| {
        for (slot_chunk, theta_chunk) in slots.chunks_mut(chunk).zip(grid.chunks(chunk)) {
            scope.spawn(move || {
                for (slot, &theta) in slot_chunk.iter_mut().zip(theta_chunk) {
                    *slot = Some(sweep_row(theta, m, tie, resolution));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.expect("every sweep slot is filled"))
        .collect()
}

fn sweep_row(theta: f64, m: &LossModel, tie: TiePolicy, resolution: usize) -> bowley::Result<SweepRow> {
    let t = DistortionFunction::tversky_kahneman(theta)?;
    let eq = solve(&t, m, tie, resolution)?;
    let t1 = eq.crossing_set.points.first().copied().unwrap_or(f64::NAN);
    let deductible = if t1.is_nan() {
        f64::NAN
    } else {
        m.quantile(1.0 - t1)?
    };
    Ok(SweepRow {
        theta,
        t1,
        deductible,
        premium: eq.premium,
        profit: eq.profit,
    })
}

fn render_csv(rows: &[SweepRow]) -> String {
    // First row attaining the maximal profit is the reported argmax.
    let mut argmax = 0usize;
    for (i, row) in rows.iter().enumerate() {
        if row.profit > rows[argmax].profit {
            argmax = i;
        }
    }
    let mut out = String::from("theta,t1,deductible,premium,profit,is_argmax\n");
    for (i, r) in rows.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.theta,
            r.t1,
            r.deductible,
            r.premium,
            r.profit,
            i == argmax
        )
        .unwrap();
    }
    out
}

/// Accumulates verification check lines, failure counts, and per-check worst
/// gaps. Gaps are oriented so that larger is worse (absolute deviations, or
/// signed exceedance for the falsification search); `gap <= tol` passes.
struct Recorder {
    out: String,
    checks: usize,
    failures: usize,
    worst: Vec<(&'static str, f64)>,
}

impl Recorder {
    fn new() -> Self {
        Recorder {
            out: String::new(),
            checks: 0,
            failures: 0,
            worst: Vec::new(),
        }
    }

    fn record(&mut self, check: &'static str, pair: &str, gap: f64, tol: f64) {
        let pass = gap <= tol;
        self.checks += 1;
        if !pass {
            self.failures += 1;
        }
        writeln!(
            self.out,
            "check={check} pair={pair} gap={gap:e} tol={tol:e} status={}",
            if pass { "pass" } else { "fail" }
        )
        .unwrap();
        match self.worst.iter_mut().find(|(name, _)| *name == check) {
            Some((_, w)) => *w = w.max(gap),
            None => self.worst.push((check, gap)),
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let mut battery: Vec<(String, DistortionFunction, LossModel)> = Vec::new();
    if let Some(path) = &args.config {
        let config = load_config(path)?;
        let t = config.distortion.build().map_err(config_err)?;
        let m = config.loss.build().map_err(config_err)?;
        battery.push((format!("config:{t}+{m}"), t, m));
    }
    battery.extend(oracle::battery());
    let resolution = args.resolution.unwrap_or(DEFAULT_RESOLUTION);
    if args.trials < 1 {
        return Err(Failure::Config("--trials must be at least 1".to_string()));
    }

    let mut rec = Recorder::new();
    let pricing_g = DistortionFunction::tvar(0.95).expect("0.95 is a valid level");

    for (index, (name, t, m)) in battery.iter().enumerate() {
        let pair = name.replace(' ', "");
        let eq = match solve(t, m, TiePolicy::Retain, resolution) {
            Ok(eq) => eq,
            Err(e) => {
                // Route disagreement (or any solve failure) fails the pair's
                // internal check and skips its dependent checks.
                let gap = match e {
                    Error::ProfitRouteDisagreement { gap, .. } => gap,
                    _ => f64::INFINITY,
                };
                rec.record("route-internal", &pair, gap, 1e-7);
                continue;
            }
        };
        rec.record(
            "route-internal",
            &pair,
            (eq.profit - eq.profit_insurer_route).abs(),
            1e-7,
        );

        let uninsured = drm_of_loss(m, t).map_err(classify)?;
        rec.record(
            "indifference",
            &pair,
            (eq.policyholder_risk - uninsured).abs(),
            1e-7,
        );

        // Independent quantile-space route for the equilibrium profit. The
        // VaR family's jump gets the looser documented budget.
        let quantile_tol = if matches!(t, DistortionFunction::VaR { .. }) {
            1e-4
        } else {
            1e-6
        };
        let quantile_profit = oracle::quantile_route_profit(t, m, 1 << 18).map_err(classify)?;
        rec.record(
            "quantile-route",
            &pair,
            (quantile_profit - eq.profit).abs(),
            quantile_tol,
        );

        // Falsification search: no random pricing distortion may beat the
        // equilibrium profit. The gap is signed: negative means no strain.
        let found = oracle::random_pricing_search(
            t,
            m,
            args.trials,
            16,
            args.seed.wrapping_add(index as u64),
        )
        .map_err(classify)?;
        rec.record("pricing-search", &pair, found - eq.profit, 1e-6);

        // Discrete-grid best response against an independent pricing
        // distortion must track the analytic best response.
        let grid = oracle::DiscreteGrid::new(4096, m.bound()).map_err(classify)?;
        let (_, discrete) =
            oracle::discrete_best_response(t, &pricing_g, m, &grid).map_err(classify)?;
        let (analytic_ind, _) =
            best_response(t, &pricing_g, m, TiePolicy::Retain, resolution).map_err(classify)?;
        let analytic =
            policyholder_objective(&analytic_ind, m, t, &pricing_g).map_err(classify)?;
        rec.record("discrete-response", &pair, (discrete - analytic).abs(), 1e-3);

        // Pareto certificate and converse round trip for the equilibrium.
        let contract = Contract::new(eq.indemnity.clone(), eq.premium).map_err(classify)?;
        let certificate = is_pareto_optimal(&contract, m, t, resolution, 0).map_err(classify)?;
        rec.record("pareto-gap", &pair, certificate.gap, 1e-7);
        let roundtrip_gap = match equilibrium_from_pareto(&contract, m, t, resolution) {
            Ok(back) => (back.premium - eq.premium).abs(),
            Err(_) => f64::INFINITY,
        };
        rec.record("roundtrip-premium", &pair, roundtrip_gap, 1e-7);
    }

    let Recorder {
        mut out,
        checks,
        failures,
        worst,
    } = rec;
    for (check, gap) in &worst {
        writeln!(out, "worst: check={check} gap={gap:e}").unwrap();
    }
    writeln!(
        out,
        "summary: pairs={} checks={checks} failures={failures} seed={} trials={} resolution={resolution}",
        battery.len(),
        args.seed,
        args.trials
    )
    .unwrap();

    write_output(&out, args.out.as_deref(), None)?;
    if failures > 0 {
        return Err(Failure::Verification(format!(
            "{failures} of {checks} verification checks failed"
        )));
    }
    Ok(())
}
