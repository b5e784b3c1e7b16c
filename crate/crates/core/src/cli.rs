//! Command-line orchestration: parameter tables, ansatz construction,
//! residual measurement, decay sweeps, linear probes, and fixed-point runs.
//!
//! Every run writes machine-readable reports (JSON + CSV) under --out and
//! embeds the fully resolved configuration, so outputs are reproducible from
//! their own headers. Exit status: 0 ok, 2 config error, 3 scale collapse,
//! 4 no contraction, 5 quadrature failure, 1 otherwise.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::Ansatz;
use crate::linear::{
    kernel_mode_check, linear_fit, probe_series, LinearProbePoint,
    ModeOperator,
};
use crate::params::{CoprimeForm, GammaRatio, Precision, TowerSpec};
use crate::refine::{RefineConfig, Refiner};
use crate::report::{
    params_table, write_decay_csv, write_params_csv, write_probe_csv, write_summary_csv, Envelope,
    FieldDocument,
};
use crate::residual::{
    decay_fit_checked, diagonal_decay_exponent, ladder_start, residual_report, rho_ladder,
    ResidualReport,
    LADDER_RATIO,
};

/// Thread-pool size override for sweeps.
pub const WORKERS_ENV: &str = "BUBBLE_TOWER_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "bubble-tower", version, about = "Bubble-tower construction and verification for the asymmetric sinh-Poisson problem on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// Asymmetry parameter gamma, as m/n or a decimal in (0, 1].
    #[arg(long)]
    gamma: Option<String>,
    /// Number of bubbles.
    #[arg(long)]
    k: Option<usize>,
    /// tau in (0, 1].
    #[arg(long)]
    tau: Option<f64>,
    /// Robin value h(0); 0 on the unit disk.
    #[arg(long)]
    robin: Option<f64>,
    /// Arithmetic policy: exact | float:<bits>.
    #[arg(long)]
    precision: Option<String>,
    /// RNG seed for randomized probes.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key = value config file; flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact parameter tables: alpha, s, r, q, kappa/c/d logs, masses.
    Params {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Assemble the tower ansatz at one rho and serialize it.
    Ansatz {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Residual components, Theta sups and L^p norms at one rho.
    Residual {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        rho: Option<f64>,
        /// Comma-separated L^p exponents.
        #[arg(long)]
        p: Option<String>,
    },
    /// Kernel-mode arithmetic, inverse-norm and eigenvalue probes.
    Linear {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        rho_start: Option<f64>,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Refine the ansatz to a solution by the contraction map.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Residual decay sweep over a rho ladder with slope fits.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        rho_start: Option<f64>,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// Comma-separated L^p exponents.
        #[arg(long)]
        p: Option<String>,
    },
}

/// Flat key = value file, '#' comments.
fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigParse(format!(
                "{}:{}: expected key = value",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_from<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::ConfigParse(format!("bad value for {key}: {v:?}"))),
    }
}

/// Fully resolved run parameters (file < flags).
#[derive(Debug, Clone, Serialize)]
struct Resolved {
    gamma: String,
    k: usize,
    tau: f64,
    robin: f64,
    precision: String,
    seed: u64,
    out: String,
}

#[derive(Debug)]
struct Context {
    spec: TowerSpec,
    resolved: Resolved,
    file: BTreeMap<String, String>,
    out: PathBuf,
    seed: u64,
}

fn resolve(common: &CommonArgs) -> Result<Context> {
    let file = match &common.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let gamma_str = common
        .gamma
        .clone()
        .or_else(|| file.get("gamma").cloned())
        .ok_or_else(|| Error::ConfigParse("gamma is required (flag or config)".into()))?;
    let gamma: GammaRatio = gamma_str.parse()?;
    let k = match common.k {
        Some(k) => k,
        None => parse_from::<usize>(&file, "k")?
            .ok_or_else(|| Error::ConfigParse("k is required (flag or config)".into()))?,
    };
    let tau = match common.tau {
        Some(t) => t,
        None => parse_from::<f64>(&file, "tau")?.unwrap_or(1.0),
    };
    let robin = match common.robin {
        Some(h) => h,
        None => parse_from::<f64>(&file, "robin")?.unwrap_or(0.0),
    };
    let mut spec = TowerSpec::new(k, gamma, tau)
        .map_err(|e| Error::ConfigParse(e.to_string()))?
        .with_robin(robin);
    let precision_str = common.precision.clone().or_else(|| file.get("precision").cloned());
    if let Some(ps) = &precision_str {
        let prec = match ps.as_str() {
            "exact" => Precision::Exact,
            other => {
                let bits = other
                    .strip_prefix("float:")
                    .and_then(|b| b.parse::<u32>().ok())
                    .ok_or_else(|| {
                        Error::ConfigParse(format!("precision must be exact or float:<bits>, got {other:?}"))
                    })?;
                Precision::float(bits).map_err(|e| Error::ConfigParse(e.to_string()))?
            }
        };
        spec = spec.with_precision(prec);
    }
    let seed = match common.seed {
        Some(s) => s,
        None => parse_from::<u64>(&file, "seed")?.unwrap_or(0),
    };
    let out = common
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let resolved = Resolved {
        gamma: spec.gamma.to_string(),
        k: spec.k,
        tau: spec.tau,
        robin: spec.robin_at_origin,
        precision: format!("{:?}", spec.precision),
        seed,
        out: out.display().to_string(),
    };
    Ok(Context { spec, resolved, file, out, seed })
}

fn required_f64(
    flag: Option<f64>,
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<f64> {
    match flag {
        Some(v) => Ok(v),
        None => parse_from::<f64>(file, key)?
            .ok_or_else(|| Error::ConfigParse(format!("{key} is required (flag or config)"))),
    }
}

fn parse_p_list(flag: Option<String>, file: &BTreeMap<String, String>) -> Result<Vec<f64>> {
    let raw = flag.or_else(|| file.get("p").cloned()).unwrap_or_else(|| "1,1.05,1.1".into());
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::ConfigParse(format!("bad p value {s:?}")))
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn config_json(ctx: &Context, extra: serde_json::Value) -> serde_json::Value {
    let mut base = serde_json::to_value(&ctx.resolved).expect("serializable");
    if let (Some(obj), Some(add)) = (base.as_object_mut(), extra.as_object()) {
        for (k, v) in add {
            obj.insert(k.clone(), v.clone());
        }
    }
    base
}

fn cmd_params(common: &CommonArgs) -> Result<()> {
    let ctx = resolve(common)?;
    fs::create_dir_all(&ctx.out)?;
    let table = params_table(&ctx.spec);
    let mut csv = Vec::new();
    write_params_csv(&mut csv, &table)?;
    write_file(&ctx.out.join("params.csv"), &String::from_utf8_lossy(&csv))?;
    let mut csv = Vec::new();
    write_summary_csv(&mut csv, &table.summary)?;
    write_file(&ctx.out.join("params_summary.csv"), &String::from_utf8_lossy(&csv))?;
    let env = Envelope::new(config_json(&ctx, serde_json::json!({"command": "params"})), &table);
    write_file(&ctx.out.join("params.json"), &env.to_json()?)
}

fn cmd_ansatz(common: &CommonArgs, rho: Option<f64>) -> Result<()> {
    let ctx = resolve(common)?;
    let rho = required_f64(rho, &ctx.file, "rho")?;
    fs::create_dir_all(&ctx.out)?;
    let ansatz = Ansatz::new(&ctx.spec, rho)?;
    let grid = ansatz.grid();
    let field = ansatz.sample(&grid);
    let mut csv = Vec::new();
    field.write_csv(&mut csv)?;
    write_file(&ctx.out.join("ansatz.csv"), &String::from_utf8_lossy(&csv))?;
    let doc = FieldDocument::new(&field, &ansatz);
    #[derive(Serialize)]
    struct AnsatzPayload {
        far_field_deviation: f64,
        m_k: f64,
        sign_changes: usize,
        field: FieldDocument,
    }
    let payload = AnsatzPayload {
        far_field_deviation: ansatz.far_field_deviation(&[0.3, 0.5, 0.7]),
        m_k: ansatz.m_k,
        sign_changes: crate::geometry::count_sign_changes(
            &field.values,
            crate::geometry::SIGN_NOISE_FLOOR,
        ),
        field: doc,
    };
    let env = Envelope::new(
        config_json(&ctx, serde_json::json!({"command": "ansatz", "rho": rho})),
        payload,
    );
    write_file(&ctx.out.join("ansatz.json"), &env.to_json()?)
}

fn cmd_residual(common: &CommonArgs, rho: Option<f64>, p: Option<String>) -> Result<()> {
    let ctx = resolve(common)?;
    let rho = required_f64(rho, &ctx.file, "rho")?;
    let ps = parse_p_list(p, &ctx.file)?;
    fs::create_dir_all(&ctx.out)?;
    let report = residual_report(&ctx.spec, rho, &ps)?;
    let rows: Vec<(f64, String, f64, f64)> =
        report.norms.iter().map(|n| (rho, n.component.clone(), n.p, n.total)).collect();
    let mut csv = Vec::new();
    write_decay_csv(&mut csv, &rows)?;
    write_file(&ctx.out.join("residual_norms.csv"), &String::from_utf8_lossy(&csv))?;
    let env = Envelope::new(
        config_json(&ctx, serde_json::json!({"command": "residual", "rho": rho, "p": ps})),
        &report,
    );
    write_file(&ctx.out.join("residual.json"), &env.to_json()?)
}

#[derive(Debug, Serialize)]
struct DiagnosticPoint {
    rho: f64,
    mode: u32,
    smallest_singular_value: f64,
}

fn cmd_linear(
    common: &CommonArgs,
    rho_start: Option<f64>,
    ratio: Option<f64>,
    count: Option<usize>,
    p: Option<f64>,
) -> Result<()> {
    let ctx = resolve(common)?;
    let ratio = match ratio {
        Some(r) => r,
        None => parse_from::<f64>(&ctx.file, "ratio")?.unwrap_or(LADDER_RATIO),
    };
    let count = match count {
        Some(c) => c,
        None => parse_from::<usize>(&ctx.file, "count")?.unwrap_or(5),
    };
    let p = match p {
        Some(v) => v,
        None => parse_from::<f64>(&ctx.file, "p")?.unwrap_or(1.05),
    };
    let start = match rho_start {
        Some(r) => r,
        None => match parse_from::<f64>(&ctx.file, "rho-start")? {
            Some(r) => r,
            None => ladder_start(&ctx.spec, 1e-2, ratio)?,
        },
    };
    fs::create_dir_all(&ctx.out)?;
    let ladder = rho_ladder(start, ratio, count);
    let kernel_modes = kernel_mode_check(&ctx.spec)?;
    let probes = probe_series(&ctx.spec, &ladder, p, ctx.seed)?;
    // Diagnostic series at the first integral alpha_j/2 mode.
    let gamma = ctx.spec.gamma.exact();
    let diag_mode = (1..=ctx.spec.k).find_map(|j| match crate::params::coprime_form(j, &ctx.spec.gamma) {
        CoprimeForm::Integer { .. } => {
            use num_traits::ToPrimitive;
            let half = crate::params::alpha_closed(j, &gamma) / crate::params::rat_int(2);
            half.to_integer().to_u32()
        }
        _ => None,
    });
    let mut diagnostics = Vec::new();
    if let Some(mode) = diag_mode {
        for &rho in &ladder {
            let ansatz = Ansatz::new(&ctx.spec, rho)?;
            let grid = ansatz.grid();
            let op = ModeOperator::from_ansatz(&ansatz, &grid, mode);
            diagnostics.push(DiagnosticPoint {
                rho,
                mode,
                smallest_singular_value: op.smallest_eigenvalue(),
            });
        }
    }
    let xs: Vec<f64> = probes.iter().map(|pt| pt.abs_ln_rho).collect();
    let ys: Vec<f64> = probes.iter().map(|pt| pt.inv_norm_estimate).collect();
    let (fit_intercept, fit_slope, fit_r2) = linear_fit(&xs, &ys);
    #[derive(Serialize)]
    struct LinearPayload {
        kernel_modes: crate::linear::KernelModeReport,
        probes: Vec<LinearProbePoint>,
        diagnostics: Vec<DiagnosticPoint>,
        inv_norm_vs_abs_ln_rho: (f64, f64, f64),
    }
    let mut csv = Vec::new();
    write_probe_csv(&mut csv, &probes)?;
    write_file(&ctx.out.join("linear_probe.csv"), &String::from_utf8_lossy(&csv))?;
    let payload = LinearPayload {
        kernel_modes,
        probes,
        diagnostics,
        inv_norm_vs_abs_ln_rho: (fit_intercept, fit_slope, fit_r2),
    };
    let env = Envelope::new(
        config_json(
            &ctx,
            serde_json::json!({"command": "linear", "rho_start": start, "ratio": ratio, "count": count, "p": p}),
        ),
        payload,
    );
    write_file(&ctx.out.join("linear.json"), &env.to_json()?)
}

fn cmd_solve(
    common: &CommonArgs,
    rho: Option<f64>,
    max_iters: Option<usize>,
    tol: Option<f64>,
    p: Option<f64>,
) -> Result<()> {
    let ctx = resolve(common)?;
    let rho = required_f64(rho, &ctx.file, "rho")?;
    let mut cfg = RefineConfig::default();
    if let Some(m) = max_iters {
        cfg.max_iters = m;
    }
    if let Some(t) = tol {
        cfg.tol_rel = t;
    }
    if let Some(v) = p {
        cfg.p = v;
    }
    fs::create_dir_all(&ctx.out)?;
    let refiner = Refiner::new(Ansatz::new(&ctx.spec, rho)?);
    let (phi, report) = refiner.iterate_to_fixed_point(&cfg)?;
    let newton = refiner.newton_solve(1e-11, 60)?;
    let u: Vec<f64> = (0..refiner.grid.len()).map(|i| refiner.w[i] + phi[i]).collect();
    let diff: Vec<f64> = (0..u.len()).map(|i| u[i] - newton[i]).collect();
    let newton_rel_diff =
        refiner.energy_norm(&diff) / refiner.energy_norm(&u).max(f64::MIN_POSITIVE);
    let solution = crate::geometry::RadialField::new(
        std::sync::Arc::clone(&refiner.grid),
        u,
        0,
        crate::geometry::FieldKind::Solution,
    );
    let mut csv = Vec::new();
    solution.write_csv(&mut csv)?;
    write_file(&ctx.out.join("solution.csv"), &String::from_utf8_lossy(&csv))?;
    #[derive(Serialize)]
    struct SolvePayload {
        report: crate::refine::SolutionReport,
        newton_rel_diff: f64,
        field: FieldDocument,
    }
    let payload = SolvePayload {
        report,
        newton_rel_diff,
        field: FieldDocument::new(&solution, &refiner.ansatz),
    };
    let env = Envelope::new(
        config_json(&ctx, serde_json::json!({"command": "solve", "rho": rho, "max_iters": cfg.max_iters, "tol": cfg.tol_rel, "p": cfg.p})),
        payload,
    );
    write_file(&ctx.out.join("solve.json"), &env.to_json()?)
}

fn cmd_sweep(
    common: &CommonArgs,
    rho_start: Option<f64>,
    ratio: Option<f64>,
    count: Option<usize>,
    p: Option<String>,
) -> Result<()> {
    let ctx = resolve(common)?;
    let ratio = match ratio {
        Some(r) => r,
        None => parse_from::<f64>(&ctx.file, "ratio")?.unwrap_or(LADDER_RATIO),
    };
    let count = match count {
        Some(c) => c,
        None => parse_from::<usize>(&ctx.file, "count")?.unwrap_or(8),
    };
    let ps = parse_p_list(p, &ctx.file)?;
    let start = match rho_start {
        Some(r) => r,
        None => match parse_from::<f64>(&ctx.file, "rho-start")? {
            Some(r) => r,
            None => ladder_start(&ctx.spec, 1e-2, ratio)?,
        },
    };
    fs::create_dir_all(&ctx.out)?;
    let ladder = rho_ladder(start, ratio, count);

    // Ladder points are independent; fan out to a worker pool.
    let workers = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    let reports: Vec<ResidualReport> = {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.unwrap_or(0))
            .build()
            .map_err(|e| Error::ConfigParse(format!("worker pool: {e}")))?;
        let results: Vec<Result<ResidualReport>> = pool.install(|| {
            ladder.par_iter().map(|&rho| residual_report(&ctx.spec, rho, &ps)).collect()
        });
        results.into_iter().collect::<Result<Vec<_>>>()?
    };

    let mut rows: Vec<(f64, String, f64, f64)> = Vec::new();
    for rep in &reports {
        for n in &rep.norms {
            rows.push((rep.rho, n.component.clone(), n.p, n.total));
        }
    }
    let mut csv = Vec::new();
    write_decay_csv(&mut csv, &rows)?;
    write_file(&ctx.out.join("sweep_decay.csv"), &String::from_utf8_lossy(&csv))?;

    #[derive(Serialize)]
    struct SlopeRow {
        component: String,
        p: f64,
        slope: f64,
        r2: f64,
        expected_exponent: Option<f64>,
    }
    let beta_bar = crate::params::concentration_params(&ctx.spec).beta_bar_f64();
    let mut slopes = Vec::new();
    let mut keys: Vec<(String, f64)> = Vec::new();
    for rep in &reports {
        for n in &rep.norms {
            if !keys.contains(&(n.component.clone(), n.p)) {
                keys.push((n.component.clone(), n.p));
            }
        }
    }
    for (component, p) in keys {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        let mut floors: Vec<f64> = Vec::new();
        for rep in &reports {
            for n in &rep.norms {
                if n.component == component && n.p == p {
                    pts.push((rep.rho, n.total));
                    floors.push(n.noise_floor.powf(1.0 / p));
                }
            }
        }
        // Components at the quadrature noise floor are excluded from the
        // slope table; their norms stay in the CSV.
        if let Ok(fit) = decay_fit_checked(&pts, &floors) {
            let expected = match component.as_str() {
                "E+" | "E-" | "R" | "S" | "E+1" | "E-1" => Some(if p == 1.0 {
                    beta_bar
                } else {
                    diagonal_decay_exponent(&ctx.spec, p)
                }),
                _ => None,
            };
            slopes.push(SlopeRow { component, p, slope: fit.slope, r2: fit.r2, expected_exponent: expected });
        }
    }
    #[derive(Serialize)]
    struct SweepPayload {
        ladder: Vec<f64>,
        slopes: Vec<SlopeRow>,
        theta_sup: Vec<Vec<f64>>,
        reports: Vec<ResidualReport>,
    }
    let payload = SweepPayload {
        ladder: ladder.clone(),
        slopes,
        theta_sup: reports.iter().map(|r| r.theta_sup.clone()).collect(),
        reports,
    };
    let env = Envelope::new(
        config_json(
            &ctx,
            serde_json::json!({"command": "sweep", "rho_start": start, "ratio": ratio, "count": count, "p": ps}),
        ),
        payload,
    );
    write_file(&ctx.out.join("sweep_slopes.json"), &env.to_json()?)
}

/// Parse argv and execute; returns the process exit status.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Params { common } => cmd_params(common),
        Command::Ansatz { common, rho } => cmd_ansatz(common, *rho),
        Command::Residual { common, rho, p } => cmd_residual(common, *rho, p.clone()),
        Command::Linear { common, rho_start, ratio, count, p } => {
            cmd_linear(common, *rho_start, *ratio, *count, *p)
        }
        Command::Solve { common, rho, max_iters, tol, p } => {
            cmd_solve(common, *rho, *max_iters, *tol, *p)
        }
        Command::Sweep { common, rho_start, ratio, count, p } => {
            cmd_sweep(common, *rho_start, *ratio, *count, p.clone())
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_status()
        }
    }
}
