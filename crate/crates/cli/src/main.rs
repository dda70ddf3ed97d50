//! Command-line surface for the product-state testing library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 resource budget exceeded, 4 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prodtest_core::depolarising::{
    apply_depolarising, output_purity_closed, pprod, stability_upper_bound, DepolarisingParams,
};
use prodtest_core::product_approx::{brute_force_eps, closest_product, OptimizerOptions};
use prodtest_core::product_test::{
    kcopy_test_value, ptest_exact, ptest_partition, ptest_sampled, theorem_bounds,
};
use prodtest_core::qma::{
    channel_to_measurement, channel_to_measurement_printed, min_output_infinity,
    repeat_measurement, sep_maximize, sep_minimize, soundness_bound_check, threshold_repeat,
    RepetitionSpec,
};
use prodtest_core::tensor::Partition;
use prodtest_core::unitary_test::{closest_product_unitary, unitary_bounds, unitary_ptest};
use prodtest_core::verify::{run_suite, Suite};
use prodtest_core::{Budget, Error};

use prodtest_cli::files::{parse_operator, parse_state, realize_state, NormPolicy, OperatorFile};
use prodtest_cli::report::{digest, Report};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "prodtest",
    about = "Product tests for multipartite states and unitaries, depolarising purity identities, closest-product optimization, and the separable-measurement protocol harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Product test of a state file: exact subset sum by default, or the
    /// sampled two-copy cascade, a partition test, or a k-copy projection.
    Ptest {
        state: PathBuf,
        /// Exact subset-sum evaluation (the default mode).
        #[arg(long)]
        exact: bool,
        /// Simulate the swap-test cascade with this many shots.
        #[arg(long, conflicts_with_all = ["partition", "kcopies"])]
        shots: Option<u64>,
        /// Partition spec like "0,1;2" (blocks of 0-based site indices).
        #[arg(long, conflicts_with = "kcopies")]
        partition: Option<String>,
        /// k-copy test value with this many copies.
        #[arg(long)]
        kcopies: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest dense dimension exact operations may build.
        #[arg(long, default_value_t = 4096)]
        max_dim: usize,
    },
    /// Closest-product distance ε of a state, with the theorem window and an
    /// optional brute-force oracle cross-check.
    Eps {
        state: PathBuf,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run the grid oracle at this per-site resolution.
        #[arg(long)]
        oracle: Option<usize>,
        #[arg(long, default_value_t = 4096)]
        max_dim: usize,
    },
    /// Depolarising-channel output purity in direct and closed form, the
    /// product-input value, and the stability bound.
    Depolarise {
        state: PathBuf,
        /// Retention amplitude δ (noise rate is 1-δ).
        #[arg(long)]
        delta: f64,
        /// Evaluate the stability upper bound at this ε.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 4096)]
        max_dim: usize,
    },
    /// Product test for a unitary via its Choi state, with nearest
    /// product-unitary extraction.
    Unitary {
        operator: PathBuf,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4096)]
        max_dim: usize,
    },
    /// Seesaw optimization of tr Mρ over separable states.
    SepOpt {
        operator: PathBuf,
        /// Minimize instead of maximize.
        #[arg(long)]
        minimize: bool,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cross-check against the two-party grid oracle at this resolution.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Protocol objects: the composite accept operator with its soundness
    /// bounds for a measurement, or the channel-norm correspondence for a
    /// Kraus list.
    QmaSim {
        operator: PathBuf,
        /// Parallel repetitions to analyze.
        #[arg(long)]
        ell: Option<usize>,
        /// Accept threshold for the repetition (defaults to ell).
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4096)]
        max_dim: usize,
    },
    /// Bound-curve CSV data for external plotting.
    Curves {
        /// Theorem window over an ε grid "start:stop:step".
        #[arg(long, conflicts_with = "delta_grid")]
        eps_grid: Option<String>,
        /// Depolarising curves over a δ grid "start:stop:step".
        #[arg(long, requires = "d", requires = "n")]
        delta_grid: Option<String>,
        /// Local dimension for the δ grid.
        #[arg(long)]
        d: Option<usize>,
        /// Site count for the δ grid.
        #[arg(long)]
        n: Option<usize>,
        /// ε at which the stability bound column is evaluated.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the verification suite and print one pass/fail line per criterion.
    Verify {
        #[arg(long, default_value = "full")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<ExitCode, (u8, String)>;

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Budget { .. } => EXIT_BUDGET,
        _ => EXIT_INPUT,
    }
}

fn lift(err: Error) -> (u8, String) {
    (exit_for(&err), err.to_string())
}

fn read_input(path: &Path) -> Result<(String, String), (u8, String)> {
    let bytes = std::fs::read(path)
        .map_err(|e| (EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| (EXIT_INPUT, format!("{} is not UTF-8: {e}", path.display())))?;
    Ok((text, digest(&bytes)))
}

fn load_state(
    path: &Path,
    report: &mut Report,
) -> Result<prodtest_core::tensor::PureState, (u8, String)> {
    let (text, sha) = read_input(path)?;
    let file =
        parse_state(&text).map_err(|e| (EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let (state, policy) =
        realize_state(&file).map_err(|e| (EXIT_INPUT, format!("{}: {e}", path.display())))?;
    if let NormPolicy::Renormalized { deviation } = policy {
        eprintln!(
            "warning: {} renormalized (norm deviated from 1 by {deviation:.3e})",
            path.display()
        );
    }
    report.field("input", path.display());
    report.field("sha256", sha);
    report.field_opt("label", file.label.as_deref());
    report.field(
        "dims",
        file.dims
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x"),
    );
    Ok(state)
}

fn load_operator(path: &Path, report: &mut Report) -> Result<OperatorFile, (u8, String)> {
    let (text, sha) = read_input(path)?;
    let op =
        parse_operator(&text).map_err(|e| (EXIT_INPUT, format!("{}: {e}", path.display())))?;
    report.field("input", path.display());
    report.field("sha256", sha);
    report.field("kind", op.kind());
    Ok(op)
}

fn parse_partition_spec(spec: &str, n: usize) -> Result<Partition, (u8, String)> {
    let blocks: Vec<Vec<usize>> = spec
        .split(';')
        .map(|block| {
            block
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|e| (EXIT_INPUT, format!("bad partition index '{t}': {e}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Partition::new(blocks, n).map_err(lift)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, (u8, String)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err((EXIT_INPUT, format!("grid '{spec}' is not start:stop:step")));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|e| (EXIT_INPUT, format!("bad grid start: {e}")))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|e| (EXIT_INPUT, format!("bad grid stop: {e}")))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|e| (EXIT_INPUT, format!("bad grid step: {e}")))?;
    if step <= 0.0 || stop < start {
        return Err((EXIT_INPUT, format!("grid '{spec}' is empty or descending")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// Pr[Bin(ell, p) >= t].
fn binomial_tail(ell: usize, t: usize, p: f64) -> f64 {
    let mut total = 0.0;
    for j in t..=ell {
        let mut term = 1.0f64;
        for i in 0..j {
            term *= (ell - i) as f64 / (i + 1) as f64;
        }
        total += term * p.powi(j as i32) * (1.0 - p).powi((ell - j) as i32);
    }
    total.min(1.0)
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Ptest {
            state,
            exact: _,
            shots,
            partition,
            kcopies,
            seed,
            max_dim,
        } => cmd_ptest(&state, shots, partition, kcopies, seed, Budget::new(max_dim)),
        Command::Eps {
            state,
            restarts,
            seed,
            oracle,
            max_dim,
        } => cmd_eps(&state, restarts, seed, oracle, Budget::new(max_dim)),
        Command::Depolarise {
            state,
            delta,
            eps,
            max_dim,
        } => cmd_depolarise(&state, delta, eps, Budget::new(max_dim)),
        Command::Unitary {
            operator,
            restarts,
            seed,
            max_dim,
        } => cmd_unitary(&operator, restarts, seed, Budget::new(max_dim)),
        Command::SepOpt {
            operator,
            minimize,
            restarts,
            seed,
            grid,
        } => cmd_sep_opt(&operator, minimize, restarts, seed, grid),
        Command::QmaSim {
            operator,
            ell,
            threshold,
            restarts,
            seed,
            max_dim,
        } => cmd_qma_sim(&operator, ell, threshold, restarts, seed, Budget::new(max_dim)),
        Command::Curves {
            eps_grid,
            delta_grid,
            d,
            n,
            eps,
            out,
        } => cmd_curves(eps_grid, delta_grid, d, n, eps, &out),
        Command::Verify { suite, seed } => cmd_verify(&suite, seed),
    }
}

/// Input of the ptest command: a pure state file, or an operator file of
/// kind density for the exact and partition modes.
enum PtestInput {
    Pure(prodtest_core::tensor::PureState),
    Mixed(prodtest_core::tensor::DensityOperator),
}

fn load_ptest_input(path: &Path, report: &mut Report) -> Result<PtestInput, (u8, String)> {
    let (text, _) = read_input(path)?;
    let first_record = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first_record.starts_with("kind") {
        match load_operator(path, report)? {
            OperatorFile::Density(rho) => Ok(PtestInput::Mixed(rho)),
            other => Err((
                EXIT_INPUT,
                format!("ptest accepts state files or kind density, found {}", other.kind()),
            )),
        }
    } else {
        Ok(PtestInput::Pure(load_state(path, report)?))
    }
}

fn cmd_ptest(
    state: &Path,
    shots: Option<u64>,
    partition: Option<String>,
    kcopies: Option<usize>,
    seed: u64,
    budget: Budget,
) -> CmdResult {
    let mut report = Report::new("ptest");
    let input = load_ptest_input(state, &mut report)?;
    let pure_only = |input: &PtestInput, mode: &str| match input {
        PtestInput::Pure(psi) => Ok(psi.clone()),
        PtestInput::Mixed(_) => Err((
            EXIT_INPUT,
            format!("{mode} takes pure inputs only; mixed-state values come from --exact"),
        )),
    };
    if let Some(shots) = shots {
        let psi = pure_only(&input, "--shots")?;
        report.field("seed", seed);
        let r = ptest_sampled(&psi, shots, seed, budget).map_err(lift)?;
        report.field("method", r.method);
        report.field("shots", r.shots.unwrap_or(0));
        report.field("ptest_value", r.value);
        report.field_opt("std_error", r.std_error);
    } else if let Some(spec) = partition {
        let rho = match &input {
            PtestInput::Pure(psi) => psi.projector(),
            PtestInput::Mixed(rho) => rho.clone(),
        };
        let p = parse_partition_spec(&spec, rho.dims().n())?;
        let r = ptest_partition(&rho, &p, budget).map_err(lift)?;
        report.field("method", r.method);
        report.field("partition", spec);
        report.field("blocks", p.k());
        report.field("ptest_value", r.value);
    } else if let Some(k) = kcopies {
        let psi = pure_only(&input, "--kcopies")?;
        let value = kcopy_test_value(&psi, k, budget).map_err(lift)?;
        report.field("method", "k-copy");
        report.field("kcopies", k);
        report.field("ptest_value", value);
    } else {
        let rho = match &input {
            PtestInput::Pure(psi) => psi.projector(),
            PtestInput::Mixed(rho) => rho.clone(),
        };
        let r = ptest_exact(&rho, budget).map_err(lift)?;
        report.field("method", r.method);
        report.field("ptest_value", r.value);
    }
    report.finish();
    Ok(ExitCode::SUCCESS)
}

fn cmd_eps(
    state: &Path,
    restarts: usize,
    seed: u64,
    oracle: Option<usize>,
    budget: Budget,
) -> CmdResult {
    let mut report = Report::new("eps");
    let psi = load_state(state, &mut report)?;
    report.field("seed", seed);
    report.field("restarts", restarts);
    let opts = OptimizerOptions {
        restarts,
        seed,
        ..OptimizerOptions::default()
    };
    let found = closest_product(&psi, &opts).map_err(lift)?;
    let eps = found.ansatz.eps();
    report.field("eps", eps);
    report.field("overlap_sq", found.ansatz.overlap_sq());
    report.field("iterations", found.iterations);
    report.field("converged", found.converged);
    if let Some(resolution) = oracle {
        let o = brute_force_eps(&psi, resolution, budget).map_err(lift)?;
        report.field("oracle_resolution", resolution);
        report.field("oracle_eps", o.eps);
        report.field("oracle_error_bound", o.error_bound);
    }
    let window = theorem_bounds(eps.clamp(0.0, 1.0)).map_err(lift)?;
    report.field("bound_lower", window.lower);
    report.field("bound_upper", window.upper);
    report.field("high_eps_cap", window.high_eps_cap_applies);
    let ptest = ptest_exact(&psi.projector(), budget).map_err(lift)?.value;
    report.field("ptest_value", ptest);
    let inside = ptest >= window.lower - 1e-6 && ptest <= window.upper + 1e-6;
    report.field("containment", if inside { "inside" } else { "outside" });
    report.finish();
    Ok(ExitCode::SUCCESS)
}

fn cmd_depolarise(state: &Path, delta: f64, eps: Option<f64>, budget: Budget) -> CmdResult {
    let mut report = Report::new("depolarise");
    let psi = load_state(state, &mut report)?;
    let Some(d) = psi.dims().uniform_dim() else {
        return Err((
            EXIT_INPUT,
            "the depolarising channel needs uniform local dimensions".into(),
        ));
    };
    let n = psi.dims().n();
    let params = DepolarisingParams::new(delta, d, n).map_err(lift)?;
    report.field("delta", delta);
    report.field("gamma", params.gamma());
    let rho = psi.projector();
    let direct = apply_depolarising(&rho, &params).map_err(lift)?.purity();
    let closed = output_purity_closed(&rho, &params).map_err(lift)?;
    report.field("output_purity_direct", direct);
    report.field("output_purity_closed", closed);
    report.field("closed_direct_gap", (direct - closed).abs());
    report.field("pprod", pprod(&params));
    if let Some(eps) = eps {
        report.field("eps", eps);
        report.field(
            "stability_bound",
            stability_upper_bound(eps, &params).map_err(lift)?,
        );
    }
    let star = DepolarisingParams::product_test_point(d, n).map_err(lift)?;
    let scaled = ((d as f64 + 1.0) / 2.0).powi(n as i32)
        * apply_depolarising(&rho, &star).map_err(lift)?.purity();
    let exact = ptest_exact(&rho, budget).map_err(lift)?.value;
    report.field("scaled_purity_at_star", scaled);
    report.field("ptest_value", exact);
    report.field("reduction_gap", (scaled - exact).abs());
    report.finish();
    Ok(ExitCode::SUCCESS)
}

fn cmd_unitary(operator: &Path, restarts: usize, seed: u64, budget: Budget) -> CmdResult {
    let mut report = Report::new("unitary");
    let op = load_operator(operator, &mut report)?;
    let OperatorFile::Unitary(u) = op else {
        return Err((
            EXIT_INPUT,
            format!("expected kind unitary, found {}", op.kind()),
        ));
    };
    report.field("seed", seed);
    let value = unitary_ptest(&u, budget).map_err(lift)?.value;
    report.field("ptest_value", value);
    let opts = OptimizerOptions {
        restarts,
        seed,
        ..OptimizerOptions::default()
    };
    let (_, overlap) = closest_product_unitary(&u, &opts, budget).map_err(lift)?;
    report.field("eps_operator", overlap.eps_operator);
    report.field("eps_unitary", overlap.eps_unitary);
    report.field("hs_overlap_sq", overlap.hs_value.norm_sqr());
    report.field("flagged_singular", overlap.flagged_singular);
    if overlap.eps_operator <= 0.5 {
        let target = (1.0 - 2.0 * overlap.eps_operator).powi(2);
        report.field("extraction_guarantee", target);
        report.field(
            "guarantee_holds",
            overlap.hs_value.norm_sqr() >= target - 1e-6,
        );
    }
    let window = unitary_bounds(overlap.eps_unitary.clamp(0.0, 1.0)).map_err(lift)?;
    report.field("bound_upper", window.upper);
    report.field("high_eps_cap", window.high_eps_cap_applies);
    report.field("bound_holds", value <= window.upper + 1e-6);
    report.finish();
    Ok(ExitCode::SUCCESS)
}

fn cmd_sep_opt(
    operator: &Path,
    minimize: bool,
    restarts: usize,
    seed: u64,
    grid: Option<usize>,
) -> CmdResult {
    let mut report = Report::new("sep-opt");
    let op = load_operator(operator, &mut report)?;
    let OperatorFile::Measurement(m) = op else {
        return Err((
            EXIT_INPUT,
            format!("expected kind measurement, found {}", op.kind()),
        ));
    };
    report.field("seed", seed);
    report.field("direction", if minimize { "minimize" } else { "maximize" });
    let opts = OptimizerOptions {
        restarts,
        seed,
        ..OptimizerOptions::default()
    };
    let out = if minimize {
        sep_minimize(&m, &opts).map_err(lift)?
    } else {
        sep_maximize(&m, &opts).map_err(lift)?
    };
    report.field("sep_value", out.value);
    report.field("iterations", out.iterations);
    report.field("restarts", out.restarts_used);
    report.field("converged", out.converged);
    if let Some(resolution) = grid {
        let oracle =
            prodtest_core::qma::grid_sep_value(&m, resolution, !minimize).map_err(lift)?;
        report.field("grid_resolution", resolution);
        report.field("grid_value", oracle);
        report.field("grid_gap", (out.value - oracle).abs());
    }
    report.finish();
    Ok(ExitCode::SUCCESS)
}

fn cmd_qma_sim(
    operator: &Path,
    ell: Option<usize>,
    threshold: Option<usize>,
    restarts: usize,
    seed: u64,
    budget: Budget,
) -> CmdResult {
    let mut report = Report::new("qma-sim");
    let op = load_operator(operator, &mut report)?;
    report.field("seed", seed);
    let opts = OptimizerOptions {
        restarts,
        seed,
        ..OptimizerOptions::default()
    };
    match op {
        OperatorFile::Measurement(m) => {
            let soundness = soundness_bound_check(&m, &opts, budget).map_err(lift)?;
            report.field("s", soundness.s);
            report.field("s_prime", soundness.s_prime);
            report.field("bound_general", soundness.bound_general);
            report.field("holds_general", soundness.holds_general);
            report.field_opt("bound_two_party", soundness.bound_two_party);
            report.field_opt("holds_two_party", soundness.holds_two_party);
            report.field("slack", soundness.slack);
            if let Some(ell) = ell {
                let spec = RepetitionSpec::plain(ell).map_err(lift)?;
                let repeated = repeat_measurement(&m, &spec, budget).map_err(lift)?;
                let rep_value = sep_maximize(&repeated, &opts).map_err(lift)?.value;
                report.field("ell", ell);
                report.field("repeated_sep_value", rep_value);
                report.field("s_pow_ell", soundness.s.powi(ell as i32));
                if let Some(t) = threshold {
                    let spec = RepetitionSpec::new(ell, t).map_err(lift)?;
                    let thresh = threshold_repeat(&m, &spec, budget).map_err(lift)?;
                    let t_value = sep_maximize(&thresh, &opts).map_err(lift)?.value;
                    report.field("threshold", t);
                    report.field("threshold_sep_value", t_value);
                    report.field("binomial_tail_at_s", binomial_tail(ell, t, soundness.s));
                }
            }
        }
        OperatorFile::KrausList(channel) => {
            let m = channel_to_measurement(&channel).map_err(lift)?;
            let sep = sep_maximize(&m, &opts).map_err(lift)?.value;
            let printed = channel_to_measurement_printed(&channel).map_err(lift)?;
            let sep_printed = sep_maximize(&printed, &opts).map_err(lift)?.value;
            let norm = min_output_infinity(&channel, &opts).map_err(lift)?;
            report.field("kraus_count", channel.kraus_count());
            report.field("sep_value", sep);
            report.field("channel_norm_1_to_inf", norm.value);
            report.field("s_inf_min", norm.s_inf_min);
            report.field("correspondence_gap", (sep - norm.value).abs());
            report.field("printed_form_sep_value", sep_printed);
            report.field("printed_form_discrepancy", (sep_printed - sep).abs());
        }
        other => {
            return Err((
                EXIT_INPUT,
                format!(
                    "qma-sim expects kind measurement or kraus-list, found {}",
                    other.kind()
                ),
            ));
        }
    }
    report.finish();
    Ok(ExitCode::SUCCESS)
}

fn cmd_curves(
    eps_grid: Option<String>,
    delta_grid: Option<String>,
    d: Option<usize>,
    n: Option<usize>,
    eps_at: f64,
    out: &Path,
) -> CmdResult {
    let mut csv = String::new();
    if let Some(spec) = eps_grid {
        csv.push_str("eps,lower,upper,cap\n");
        for eps in parse_grid(&spec)? {
            let eps = eps.clamp(0.0, 1.0);
            let window = theorem_bounds(eps).map_err(lift)?;
            csv.push_str(&format!(
                "{},{},{},{}\n",
                window.eps,
                window.lower,
                window.upper,
                u8::from(window.high_eps_cap_applies)
            ));
        }
    } else if let Some(spec) = delta_grid {
        let (d, n) = (d.expect("required by clap"), n.expect("required by clap"));
        let mut deltas = parse_grid(&spec)?;
        // The distinguished product-test point always appears in the curve.
        let star = 1.0 / ((d as f64 + 1.0).sqrt());
        if !deltas.iter().any(|&x| (x - star).abs() < 1e-12) {
            deltas.push(star);
            deltas.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        }
        csv.push_str("delta,pprod,stability_bound\n");
        for delta in deltas {
            let delta = delta.clamp(0.0, 1.0);
            let params = DepolarisingParams::new(delta, d, n).map_err(lift)?;
            csv.push_str(&format!(
                "{},{},{}\n",
                delta,
                pprod(&params),
                stability_upper_bound(eps_at, &params).map_err(lift)?
            ));
        }
    } else {
        return Err((
            EXIT_INPUT,
            "curves needs either --eps-grid or --delta-grid".into(),
        ));
    }
    std::fs::write(out, csv)
        .map_err(|e| (EXIT_IO, format!("cannot write {}: {e}", out.display())))?;
    let mut report = Report::new("curves");
    report.field("out", out.display());
    report.finish();
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str, seed: u64) -> CmdResult {
    let suite: Suite = suite
        .parse()
        .map_err(|e: Error| (EXIT_INPUT, e.to_string()))?;
    let results = run_suite(suite, seed);
    let mut failing = Vec::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {:>2}. {:<26} {:>7} ms  {}",
            r.index, r.name, r.millis, r.details
        );
        if !r.passed {
            failing.push(r.index);
        }
    }
    if failing.is_empty() {
        println!("verify: all {} criteria passed", results.len());
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verify: failing criteria: {failing:?}");
        Ok(ExitCode::from(EXIT_VERIFY))
    }
}
