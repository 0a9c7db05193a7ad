//! Command-line frontend: argument parsing, config merging, subcommand
//! dispatch, JSON/CSV serialization, and the self-check suite.

use crate::correlations::{boundary_correlation, pfaffian_factorization_residual};
use crate::error::IsingError;
use crate::kasteleyn::{partition_function, prefactor};
use crate::lattice::{build_decorated_graph, verify_clockwise_odd, BoundaryTuple, LatticeSpec, Side, Tau};
use crate::oracle::{brute_correlation, brute_partition, transfer_matrix_partition, InteractionSpec};
use crate::perturbation::zspin_first_order;
use crate::propagators::{
    cutoff_propagator, edge_critical, full_critical_propagator, infinite_critical,
    massive_propagator, mat_add_assign, mat_max_norm, mat_sub, scale_le_propagator,
    scale_propagator, t1_critical, bulk_edge_split, PropagatorKind, PropagatorSample,
    QuadratureGrid,
};
use crate::scaling::{two_point_decay, universality_probe, DecayFit};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Optional JSON config file; every key mirrors a global flag and unknown
/// keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "ising-boundary", version, about = "Exact cylinder Ising solver: Pfaffians, propagators, and boundary renormalization")]
pub struct Cli {
    /// Write machine-readable output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format (csv applies to scaling-fit and universality).
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Worker thread budget (default: ISING_THREADS env var, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized check draws.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON config file supplying defaults for the global flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[arg(long = "L", value_parser = clap::value_parser!(u32).range(2..=4096))]
    pub l: u32,
    #[arg(long = "M", value_parser = clap::value_parser!(u32).range(2..=4096))]
    pub m: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t2: f64,
    /// Spin boundary condition around the cylinder: p(eriodic) or a(ntiperiodic).
    #[arg(long, default_value = "p")]
    pub tau: String,
}

impl LatticeArgs {
    fn spec(&self) -> Result<LatticeSpec, IsingError> {
        LatticeSpec::new(self.l as usize, self.m as usize, self.t1, self.t2, parse_tau(&self.tau)?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Partition function via the Kasteleyn Pfaffian.
    Partition(LatticeArgs),
    /// Boundary m-point correlation at lambda = 0.
    Correlate {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Comma-separated sites "side:col", e.g. "l:7,l:5" or "l:2,u:0".
        #[arg(long)]
        sites: String,
    },
    /// Brute-force ground truth on small lattices.
    Oracle {
        #[arg(long = "L", value_parser = clap::value_parser!(u32).range(2..=12))]
        l: u32,
        #[arg(long = "M", value_parser = clap::value_parser!(u32).range(2..=12))]
        m: u32,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda: f64,
        /// Interaction preset: "none" or "appB" (next-nearest vertical pair).
        #[arg(long, default_value = "none")]
        interaction: String,
        #[arg(long, default_value = "p")]
        tau: String,
        /// Optional sites for a correlation; omitted = partition function.
        #[arg(long)]
        sites: Option<String>,
        #[arg(long, default_value = "enum")]
        mode: String,
    },
    /// Half-plane propagator components.
    Propagator {
        /// One of massive, cutoff, scale, le, bulk, edge, full.
        #[arg(long)]
        kind: String,
        /// Scale index (scale, le, bulk, edge).
        #[arg(long, allow_hyphen_values = true)]
        h: Option<i32>,
        /// Cutoff parameter (cutoff kind).
        #[arg(long)]
        eta: Option<f64>,
        /// Site "x,y" with y >= 1 (half-plane row).
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        zp: String,
        /// Horizontal dressed coupling (default: isotropic critical).
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long = "grid-n", default_value_t = 512)]
        grid_n: usize,
    },
    /// First-order boundary renormalization report.
    Zspin {
        #[arg(long = "grid-n", default_value_t = 2048)]
        grid_n: usize,
    },
    /// Critical boundary two-point decay fit on an L = M cylinder.
    ScalingFit {
        #[arg(long = "Lmax", default_value_t = 128, value_parser = clap::value_parser!(u32).range(16..=512))]
        lmax: u32,
        /// Separation range "min:max" or "min:max:step".
        #[arg(long, default_value = "8:32")]
        seps: String,
    },
    /// Small-lattice interacting two-point probe against the first-order
    /// prediction.
    Universality {
        #[arg(long, default_value_t = 0.05)]
        lambda: f64,
        #[arg(long = "L", default_value_t = 4)]
        l: u32,
        #[arg(long = "M", default_value_t = 5)]
        m: u32,
    },
    /// Invariant self-check suite.
    Check {
        /// "all" or "orientation".
        #[arg(default_value = "all")]
        what: String,
    },
}

fn parse_tau(s: &str) -> Result<Tau, IsingError> {
    match s {
        "p" | "periodic" => Ok(Tau::Periodic),
        "a" | "antiperiodic" => Ok(Tau::Antiperiodic),
        other => Err(IsingError::InvalidSpec(format!("tau must be p or a, got {other}"))),
    }
}

fn parse_sites(s: &str) -> Result<BoundaryTuple, IsingError> {
    let mut sites = Vec::new();
    for part in s.split(',') {
        let (side, col) = part
            .split_once(':')
            .ok_or_else(|| IsingError::InvalidSpec(format!("site {part:?} is not side:col")))?;
        let side = match side.trim() {
            "l" => Side::Lower,
            "u" => Side::Upper,
            other => return Err(IsingError::InvalidSpec(format!("side must be l or u, got {other}"))),
        };
        let col: usize = col
            .trim()
            .parse()
            .map_err(|_| IsingError::InvalidSpec(format!("bad column in {part:?}")))?;
        sites.push((col, side));
    }
    Ok(BoundaryTuple::new(sites))
}

fn parse_point(s: &str) -> Result<(i64, i64), IsingError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| IsingError::InvalidSpec(format!("point {s:?} is not x,y")))?;
    let x = a.trim().parse().map_err(|_| IsingError::InvalidSpec(format!("bad x in {s:?}")))?;
    let y = b.trim().parse().map_err(|_| IsingError::InvalidSpec(format!("bad y in {s:?}")))?;
    Ok((x, y))
}

fn parse_seps(s: &str) -> Result<Vec<usize>, IsingError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || IsingError::InvalidSpec(format!("separations {s:?} are not min:max[:step]"));
    if parts.len() < 2 || parts.len() > 3 {
        return Err(bad());
    }
    let lo: usize = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: usize = parts[1].trim().parse().map_err(|_| bad())?;
    let step: usize = if parts.len() == 3 {
        parts[2].trim().parse().map_err(|_| bad())?
    } else {
        4
    };
    if lo == 0 || hi < lo || step == 0 {
        return Err(bad());
    }
    Ok((lo..=hi).step_by(step).collect())
}

fn meta(seed: u64) -> serde_json::Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
    })
}

/// Writes the fit as CSV (`separation,value,fit_value` with the r^2 in a
/// comment header) plus a gnuplot script next to it that references only the
/// CSV.
pub fn emit_plot_data(fit: &DecayFit, path: &Path) -> Result<(), IsingError> {
    if fit.separations.is_empty() {
        return Err(IsingError::InvalidSpec("fit has no separations".into()));
    }
    let csv = render_fit_csv(fit);
    let io_err = |source, p: &Path| IsingError::Io { path: p.display().to_string(), source };
    std::fs::write(path, csv).map_err(|e| io_err(e, path))?;
    let script_path = path.with_extension("gnuplot");
    let script = format!(
        "set logscale xy\nset xlabel 'separation'\nset ylabel 'two-point'\n\
         plot '{}' using 1:2 with points title 'data', \\\n     '' using 1:3 with lines title 'fit'\n",
        path.display()
    );
    std::fs::write(&script_path, script).map_err(|e| io_err(e, &script_path))?;
    Ok(())
}

fn render_fit_csv(fit: &DecayFit) -> String {
    let mut out = format!(
        "# exponent={:.6} amplitude={:.6} r_squared={:.8}\nseparation,value,fit_value\n",
        fit.exponent, fit.amplitude, fit.r_squared
    );
    for (d, v) in fit.separations.iter().zip(&fit.values) {
        let fitted = fit.amplitude * (*d as f64).powf(fit.exponent);
        out.push_str(&format!("{d},{v:.12e},{fitted:.12e}\n"));
    }
    out
}


struct Rendered {
    text: String,
    all_passed: bool,
}

fn run_cmd(cli: &Cli, seed: u64) -> Result<Rendered, IsingError> {
    let m = meta(seed);
    let body = match &cli.cmd {
        Cmd::Partition(args) => {
            let spec = args.spec()?;
            let z = partition_function(&spec)?;
            let pre = prefactor(&spec, &[]);
            json!({
                "log_Z": z.log_abs,
                "sign": z.sign,
                "prefactor_log": pre.log_value,
                "meta": m,
            })
        }
        Cmd::Correlate { lattice, sites } => {
            let spec = lattice.spec()?;
            let tuple = parse_sites(sites)?;
            let res = boundary_correlation(&spec, &tuple)?;
            json!({
                "value": res.value,
                "method": res.method,
                "sites": sites,
                "meta": m,
            })
        }
        Cmd::Oracle { l, m: rows, beta, lambda, interaction, tau, sites, mode } => {
            let t = beta.tanh();
            let spec = LatticeSpec::new(*l as usize, *rows as usize, t, t, parse_tau(tau)?)?;
            let inter = match interaction.as_str() {
                "none" => InteractionSpec::none(),
                "appB" => InteractionSpec::appendix_b(*lambda),
                other => {
                    return Err(IsingError::InvalidSpec(format!(
                        "interaction must be none or appB, got {other}"
                    )))
                }
            };
            match sites {
                Some(s) => {
                    let tuple = parse_sites(s)?;
                    let v = brute_correlation(&spec, &inter, *beta, &tuple)?;
                    json!({"value": v, "mode": mode, "meta": m})
                }
                None => {
                    let z = match mode.as_str() {
                        "enum" => brute_partition(&spec, &inter, *beta)?,
                        "transfer" => transfer_matrix_partition(&spec, &inter, *beta)?,
                        other => {
                            return Err(IsingError::InvalidSpec(format!(
                                "mode must be enum or transfer, got {other}"
                            )))
                        }
                    };
                    json!({"log_Z": z.log_abs, "sign": z.sign, "mode": mode, "meta": m})
                }
            }
        }
        Cmd::Propagator { kind, h, eta, z, zp, t1, grid_n } => {
            let z = parse_point(z)?;
            let zp = parse_point(zp)?;
            let t1s = t1.unwrap_or_else(t1_critical);
            let grid = QuadratureGrid { n_k_2d: *grid_n, ..QuadratureGrid::default() };
            let need_h = || h.ok_or_else(|| IsingError::InvalidSpec("--h required for this kind".into()));
            let sample = match kind.as_str() {
                "massive" => PropagatorSample::from_mat(
                    z, zp, PropagatorKind::Massive, massive_propagator(z.0 - zp.0, t1s)),
                "cutoff" => {
                    let eta = eta.ok_or_else(|| {
                        IsingError::InvalidSpec("--eta required for kind cutoff".into())
                    })?;
                    PropagatorSample::from_mat(
                        z, zp, PropagatorKind::CutoffEta(eta),
                        cutoff_propagator(z, zp, eta, t1s, &grid))
                }
                "scale" => {
                    let h = need_h()?;
                    PropagatorSample::from_mat(
                        z, zp, PropagatorKind::Scale(h), scale_propagator(z, zp, h, t1s, &grid))
                }
                "le" => {
                    let h = need_h()?;
                    PropagatorSample::from_mat(
                        z, zp, PropagatorKind::ScaleLE(h), scale_le_propagator(z, zp, h, t1s, &grid))
                }
                "bulk" => {
                    let h = need_h()?;
                    PropagatorSample::from_mat(
                        z, zp, PropagatorKind::Infinite(h), bulk_edge_split(z, zp, h, t1s, &grid).0)
                }
                "edge" => {
                    let h = need_h()?;
                    PropagatorSample::from_mat(
                        z, zp, PropagatorKind::Edge(h), bulk_edge_split(z, zp, h, t1s, &grid).1)
                }
                "full" => PropagatorSample::from_mat(
                    z, zp, PropagatorKind::FullCritical,
                    full_critical_propagator(z, zp, t1s, &grid)),
                other => {
                    return Err(IsingError::InvalidSpec(format!(
                        "kind must be one of massive|cutoff|scale|le|bulk|edge|full, got {other}"
                    )))
                }
            };
            json!({
                "sample": sample,
                "grid": {"n_k_1d": grid.n_k_1d, "n_k_2d": grid.n_k_2d, "eta_nodes": grid.eta_nodes},
                "meta": m,
            })
        }
        Cmd::Zspin { grid_n } => {
            let grid = QuadratureGrid { n_k_1d: *grid_n, ..QuadratureGrid::default() };
            let rep = zspin_first_order(&grid)?;
            eprintln!("coefficient        value");
            eprintln!("2 nu_1     {:>14.9}", 2.0 * rep.nu1);
            eprintln!("eta_1      {:>14.9}", rep.eta1);
            eprintln!("Z_1        {:>14.9}", rep.z1);
            eprintln!("beta_1     {:>14.9}", rep.beta1);
            eprintln!("tau_1      {:>14.9}", rep.tau1);
            eprintln!("Bspin_1    {:>14.9}", rep.bspin1);
            eprintln!("Zspin_1    {:>14.9}", rep.zspin1);
            json!({"report": rep, "meta": m})
        }
        Cmd::ScalingFit { lmax, seps } => {
            let seps = parse_seps(seps)?;
            let fit = two_point_decay(*lmax as usize, *lmax as usize, &seps)?;
            if let Some(out) = &cli.output {
                emit_plot_data(&fit, out)?;
            }
            if cli.format == OutputFormat::Csv {
                return Ok(Rendered { text: render_fit_csv(&fit), all_passed: true });
            }
            json!({"fit": fit, "meta": m})
        }
        Cmd::Universality { lambda, l, m: rows } => {
            let lam = lambda.abs();
            let lambdas = [-lam, -0.4 * lam, 0.0, 0.4 * lam, lam];
            let grid = QuadratureGrid::default();
            let table = universality_probe(&lambdas, *l as usize, *rows as usize, &grid)?;
            if cli.format == OutputFormat::Csv {
                let mut text = String::from("lambda,beta_c,ratio,linear_prediction\n");
                for r in &table {
                    text.push_str(&format!(
                        "{},{:.12e},{:.12e},{:.12e}\n",
                        r.lambda, r.beta_c, r.ratio, r.linear_prediction
                    ));
                }
                return Ok(Rendered { text, all_passed: true });
            }
            json!({"table": table, "meta": m})
        }
        Cmd::Check { what } => {
            let checks = match what.as_str() {
                "all" => run_check_suite(seed)?,
                "orientation" => vec![orientation_check()?],
                other => {
                    return Err(IsingError::InvalidSpec(format!(
                        "check target must be all or orientation, got {other}"
                    )))
                }
            };
            let all = checks.iter().all(|c| c.passed);
            for c in &checks {
                eprintln!("{} {:<34} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let v = json!({"checks": checks, "all_passed": all, "meta": m});
            return Ok(Rendered {
                text: serde_json::to_string_pretty(&v).unwrap(),
                all_passed: all,
            });
        }
    };
    Ok(Rendered { text: serde_json::to_string_pretty(&body).unwrap(), all_passed: true })
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name: name.into(), passed, detail }
}

fn orientation_check() -> Result<CheckResult, IsingError> {
    let spec = LatticeSpec::new(4, 3, 0.3, 0.45, Tau::Periodic)?;
    let graph = build_decorated_graph(&spec, &[])?;
    let bad = verify_clockwise_odd(&graph);
    Ok(check(
        "clockwise-odd orientation",
        bad.is_empty(),
        format!("{} violating faces", bad.len()),
    ))
}

/// The randomized-invariant suite behind `check all`: oracle equivalences,
/// Wick factorization, propagator cancellation, and the first-order report.
pub fn run_check_suite(seed: u64) -> Result<Vec<CheckResult>, IsingError> {
    let mut out = Vec::new();
    out.push(orientation_check()?);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_z: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    for l in [2usize, 3] {
        for m in [2usize, 3] {
            for _ in 0..3 {
                let t1 = rng.gen_range(0.15..0.7);
                let t2 = rng.gen_range(0.15..0.7);
                let tau = if rng.gen_bool(0.5) { Tau::Periodic } else { Tau::Antiperiodic };
                let spec = LatticeSpec::new(l, m, t1, t2, tau)?;
                let z = partition_function(&spec)?;
                let o = brute_partition(&spec, &InteractionSpec::none(), 1.0)?;
                worst_z = worst_z.max((z.log_abs - o.log_abs).abs() / o.log_abs.abs());
                let tup = BoundaryTuple::lower(&[1, 0]);
                let v = boundary_correlation(&spec, &tup)?.value;
                let ov = brute_correlation(&spec, &InteractionSpec::none(), 1.0, &tup)?;
                worst_c = worst_c.max((v - ov).abs());
            }
        }
    }
    out.push(check("partition vs oracle", worst_z < 1e-10, format!("max rel err {worst_z:.2e}")));
    out.push(check("correlation vs oracle", worst_c < 1e-10, format!("max abs err {worst_c:.2e}")));

    let spec = LatticeSpec::new(12, 6, 0.3, 0.45, Tau::Periodic)?;
    let r4 = pfaffian_factorization_residual(&spec, &BoundaryTuple::lower(&[10, 7, 4, 1]))?;
    let r6 = pfaffian_factorization_residual(&spec, &BoundaryTuple::lower(&[11, 9, 7, 5, 3, 1]))?;
    let rmax = r4.max(r6);
    out.push(check("Wick factorization m=4,6", rmax <= 1e-9, format!("max residual {rmax:.2e}")));

    // cancellation of the cutoff propagator on the fictitious row
    let grid = QuadratureGrid::default();
    let t1s = t1_critical();
    let g = cutoff_propagator((3, 0), (1, 2), 0.37, t1s, &grid);
    let cz = g[0][0].norm().max(g[0][1].norm());
    out.push(check("fictitious-row cancellation", cz < 1e-10, format!("max component {cz:.2e}")));

    // one telescoping point: Scale(0) + Scale(-1) + LE(-2) = full
    let z = (1i64, 2i64);
    let zp = (0i64, 1i64);
    let mut sum = scale_propagator(z, zp, 0, t1s, &grid);
    mat_add_assign(&mut sum, &scale_propagator(z, zp, -1, t1s, &grid));
    mat_add_assign(&mut sum, &scale_le_propagator(z, zp, -2, t1s, &grid));
    let full = full_critical_propagator(z, zp, t1s, &grid);
    let tel = mat_max_norm(&mat_sub(&sum, &full));
    out.push(check("scale telescoping", tel < 1e-7, format!("defect {tel:.2e}")));

    // bulk + edge = full at the critical point
    let bulk = infinite_critical(z.0 - zp.0, z.1 - zp.1, &grid);
    let mut be = edge_critical(z, zp, &grid);
    mat_add_assign(&mut be, &bulk);
    let split = mat_max_norm(&mat_sub(&be, &full));
    out.push(check("bulk-edge split", split < 1e-10, format!("defect {split:.2e}")));

    let rep = zspin_first_order(&grid)?;
    let rk = |k: &str| rep.residuals[k];
    let const_ok = rk("nu1") < 1e-8
        && rk("eta1") < 1e-8
        && rk("edge_term") < 1e-8
        && rk("bracket_sum") < 1e-8
        && rk("sum_rule") < 1e-6
        && rk("zspin_closed_form") < 1e-6;
    out.push(check(
        "first-order constants",
        const_ok,
        format!("Zspin1 = {:.6}", rep.zspin1),
    ));
    Ok(out)
}

/// Parses argv, merges config-file defaults, pins the worker budget, runs the
/// subcommand, and returns the process exit code (0 success, 1 computation
/// error, 2 argument error).
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let cfg = match &cli.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    print_error(&IsingError::Io { path: path.display().to_string(), source: e });
                    return 1;
                }
            };
            match serde_json::from_str::<ConfigFile>(&text) {
                Ok(c) => c,
                Err(e) => {
                    print_error(&IsingError::InvalidSpec(format!("config: {e}")));
                    return 1;
                }
            }
        }
        None => ConfigFile::default(),
    };
    if cli.output.is_none() {
        cli.output = cfg.output;
    }
    if let Some(f) = cfg.format {
        cli.format = f;
    }
    let threads = cli
        .threads
        .or(cfg.threads)
        .or_else(|| std::env::var("ISING_THREADS").ok().and_then(|s| s.parse().ok()))
        .unwrap_or_else(num_threads_default);
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();

    match run_cmd(&cli, seed) {
        Ok(r) => {
            match &cli.output {
                Some(path) if !matches!(cli.cmd, Cmd::ScalingFit { .. }) => {
                    if let Err(e) = std::fs::write(path, r.text + "\n") {
                        print_error(&IsingError::Io { path: path.display().to_string(), source: e });
                        return 1;
                    }
                }
                _ => {
                    let mut stdout = std::io::stdout();
                    let _ = writeln!(stdout, "{}", r.text);
                }
            }
            if r.all_passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            print_error(&e);
            1
        }
    }
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn print_error(e: &IsingError) {
    let obj = json!({"error": e.to_string()});
    println!("{}", serde_json::to_string_pretty(&obj).unwrap());
}
