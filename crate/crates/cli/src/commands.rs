//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::anyhow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use ujel_core::{
    bandwidths, bootstrap_percentile_ci, combined_pseudo_values, jackknife_variance,
    jel_confidence_interval, leave_one_out, normal_ci, numeric, run_coverage, smoothed_theta,
    CiMethod, ConfidenceInterval, KernelSpec, MultiSampleDataset, UStatResult,
};

use crate::config::{parse_config, parse_method, resolve_rows};
use crate::csv_io::{ingest_grouped_file, ingest_multi_file, IngestedDataset};
use crate::report::{
    render_ci, render_estimate, render_simulate, CiReport, EngineDiagnostics, EstimateReport,
    Meta, OutputFormat, SimulateReport,
};
use crate::{AppError, AppResult};

/// Shared dataset-loading arguments.
pub struct DataArgs {
    pub files: Vec<PathBuf>,
    pub group_col: Option<String>,
    pub order: Option<Vec<String>>,
}

pub fn load_dataset(args: &DataArgs) -> AppResult<IngestedDataset> {
    match &args.group_col {
        Some(col) => {
            if args.files.len() != 1 {
                return Err(AppError::usage(
                    "--group-col takes exactly one input file",
                ));
            }
            // Group order matters for ordering probabilities; never guess it.
            let order = args.order.as_deref().ok_or_else(|| {
                AppError::usage(
                    "single-file group-column input requires --order g1,g2,... to fix the group ordering",
                )
            })?;
            ingest_grouped_file(&args.files[0], col, Some(order))
        }
        None => {
            if args.order.is_some() {
                return Err(AppError::usage("--order only applies with --group-col"));
            }
            ingest_multi_file(&args.files)
        }
    }
}

/// Brute-force cross-check for small inputs: re-evaluates by enumeration
/// and reports the worst gap against the fast path.
fn oracle_cross_check(
    data: &MultiSampleDataset,
    kernel: &KernelSpec,
    fast: &UStatResult,
) -> Option<f64> {
    if fast.stats.path != ujel_core::EvalPath::Counting {
        return None;
    }
    let work: f64 = data
        .group_sizes()
        .iter()
        .map(|&n| n as f64)
        .product::<f64>()
        * data.n_total() as f64;
    if work > 2e7 {
        return None;
    }
    let slow = ujel_core::engine::leave_one_out_enumerated(data, kernel).ok()?;
    let mut delta = (fast.value - slow.value).abs();
    for (a, b) in fast.leave_one_out.iter().zip(&slow.leave_one_out) {
        delta = delta.max((a - b).abs());
    }
    Some(delta)
}

#[derive(Serialize)]
struct EstimateEcho<'a> {
    files: Vec<String>,
    group_col: &'a Option<String>,
    order: &'a Option<Vec<String>>,
    kernel: &'a str,
    seed: u64,
}

pub fn cmd_estimate(
    data_args: &DataArgs,
    kernel_name: &str,
    seed: u64,
    format: OutputFormat,
) -> AppResult<String> {
    let ingested = load_dataset(data_args)?;
    let kernel = KernelSpec::builtin(kernel_name, ingested.dataset.k())?;
    let loo = leave_one_out(&ingested.dataset, &kernel)?;
    let pv = combined_pseudo_values(&loo, kernel.degrees())?;
    let var = jackknife_variance(&pv)?;
    let oracle = oracle_cross_check(&ingested.dataset, &kernel, &loo);
    let echo = EstimateEcho {
        files: data_args.files.iter().map(|p| p.display().to_string()).collect(),
        group_col: &data_args.group_col,
        order: &data_args.order,
        kernel: kernel_name,
        seed,
    };
    let report = EstimateReport {
        meta: Meta::new(seed, &echo),
        kernel: kernel_name.to_string(),
        group_names: ingested.group_names,
        group_sizes: ingested.dataset.group_sizes(),
        estimate: loo.value,
        sigma_hat: var.sigma_hat(),
        engine: EngineDiagnostics::from_stats(&loo.stats, oracle),
    };
    render_estimate(&report, format)
}

#[derive(Serialize)]
struct CiEcho<'a> {
    files: Vec<String>,
    group_col: &'a Option<String>,
    order: &'a Option<Vec<String>>,
    kernel: &'a str,
    methods: Vec<&'static str>,
    levels: &'a [f64],
    boot_b: usize,
    seed: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_ci(
    data_args: &DataArgs,
    kernel_name: &str,
    method_names: &[String],
    levels: &[f64],
    boot_b: usize,
    seed: u64,
    workers: usize,
    format: OutputFormat,
) -> AppResult<String> {
    let methods = method_names
        .iter()
        .map(|m| parse_method(m))
        .collect::<AppResult<Vec<CiMethod>>>()?;
    if levels.is_empty() {
        return Err(AppError::usage("need at least one --level"));
    }
    let ingested = load_dataset(data_args)?;
    let kernel = KernelSpec::builtin(kernel_name, ingested.dataset.k())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AppError::Failure(anyhow!("thread pool: {e}")))?;

    let loo = leave_one_out(&ingested.dataset, &kernel)?;
    let pv = combined_pseudo_values(&loo, kernel.degrees())?;
    let var = jackknife_variance(&pv)?;
    let oracle = oracle_cross_check(&ingested.dataset, &kernel, &loo);

    let mut intervals: Vec<ConfidenceInterval> = Vec::new();
    for (idx, &method) in methods.iter().enumerate() {
        for &level in levels {
            let interval = match method {
                CiMethod::Jel => jel_confidence_interval(&pv, level)?,
                CiMethod::NormalApprox => normal_ci(loo.value, &var, level)?.interval,
                CiMethod::KernelBootstrap => {
                    let boot_seed = numeric::derive_seed(seed, idx as u64);
                    pool.install(|| {
                        bootstrap_percentile_ci(&ingested.dataset, level, boot_b, boot_seed)
                    })?
                    .interval
                }
            };
            intervals.push(interval);
        }
    }

    let echo = CiEcho {
        files: data_args.files.iter().map(|p| p.display().to_string()).collect(),
        group_col: &data_args.group_col,
        order: &data_args.order,
        kernel: kernel_name,
        methods: methods.iter().map(|m| m.label()).collect(),
        levels,
        boot_b,
        seed,
    };
    let report = CiReport {
        meta: Meta::new(seed, &echo),
        kernel: kernel_name.to_string(),
        group_names: ingested.group_names,
        group_sizes: ingested.dataset.group_sizes(),
        estimate: loo.value,
        sigma_hat: var.sigma_hat(),
        engine: EngineDiagnostics::from_stats(&loo.stats, oracle),
        intervals,
    };
    render_ci(&report, format)
}

// Worker count is deliberately absent: it must not influence results, so
// it is not part of the configuration identity.
#[derive(Serialize)]
struct SimulateEcho<'a> {
    config: &'a crate::config::SimulateConfig,
    reps: usize,
    seed: u64,
}

pub fn cmd_simulate(
    config_path: &Path,
    reps_override: Option<usize>,
    seed_override: Option<u64>,
    workers_override: Option<usize>,
    format: OutputFormat,
) -> AppResult<String> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| AppError::usage(format!("{}: {e}", config_path.display())))?;
    let config = parse_config(&text)?;
    let (reps, rows) = resolve_rows(&config, reps_override)?;
    let seed = seed_override.or(config.seed).unwrap_or(0);
    let workers = workers_override.or(config.workers).unwrap_or(4);

    let mut reports = Vec::with_capacity(rows.len());
    for row in &rows {
        let start = Instant::now();
        let report = run_coverage(&row.scenario, row.method, reps, seed, workers)?;
        eprintln!(
            "[timing] {} {} n={:?}: {:.2}s",
            row.scenario.id,
            row.method.label(),
            row.scenario.sizes,
            start.elapsed().as_secs_f64()
        );
        reports.push(report);
    }

    let echo = SimulateEcho {
        config: &config,
        reps,
        seed,
    };
    let report = SimulateReport {
        meta: Meta::new(seed, &echo),
        rows: reports,
    };
    render_simulate(&report, format)
}

fn random_dataset(rng: &mut ChaCha8Rng, k: usize, q: usize, lo: usize, hi: usize) -> MultiSampleDataset {
    let groups: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|_| {
            let n = rng.random_range(lo..=hi);
            (0..n)
                .map(|_| (0..q).map(|_| rng.random::<f64>()).collect())
                .collect()
        })
        .collect();
    MultiSampleDataset::from_rows(&groups).unwrap()
}

/// Built-in smoke battery: exercises both evaluation paths, the solver unit
/// values, identities, and determinism. One line per check.
pub fn cmd_selftest(seed: u64) -> AppResult<String> {
    let mut out = String::new();
    let mut failed = 0usize;
    let mut check = |out: &mut String, name: &str, ok: bool, detail: String| {
        if ok {
            out.push_str(&format!("ok - {name} ({detail})\n"));
        } else {
            out.push_str(&format!("FAIL - {name} ({detail})\n"));
            failed += 1;
        }
    };

    let z = numeric::normal_quantile(0.975).unwrap_or(f64::NAN);
    check(
        &mut out,
        "normal quantile 97.5%",
        (z - 1.959963984540054).abs() < 1e-9,
        format!("{z:.12}"),
    );
    let cut = numeric::chi_square_quantile_1df(0.95).unwrap_or(f64::NAN);
    check(
        &mut out,
        "chi-square(1) 95% quantile",
        (cut - 3.841458820694124).abs() < 1e-9,
        format!("{cut:.12}"),
    );
    let lambda = ujel_core::jel::solve_lambda_for_terms(&[-1.0, -1.0, 3.0]).unwrap_or(f64::NAN);
    check(
        &mut out,
        "multiplier closed form",
        (lambda - 1.0 / 9.0).abs() < 1e-10,
        format!("{lambda:.12}"),
    );
    let h = ujel_core::silverman_bandwidth(&[0.0, 1.0]).unwrap_or(f64::NAN);
    check(
        &mut out,
        "bandwidth reference",
        (h - 0.29234906976362374).abs() < 1e-12,
        format!("{h:.12}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0f64;
    for trial in 0..25 {
        let k = if trial % 5 == 0 { 4 } else { 3 };
        let data = random_dataset(&mut rng, k, 2, 3, 9);
        let kernel = if k == 3 {
            KernelSpec::builtin("vus-diff", 3).unwrap()
        } else {
            KernelSpec::builtin("hum-diff", 4).unwrap()
        };
        let fast = leave_one_out(&data, &kernel).unwrap();
        let slow = ujel_core::engine::leave_one_out_enumerated(&data, &kernel).unwrap();
        worst = worst.max((fast.value - slow.value).abs());
        for (a, b) in fast.leave_one_out.iter().zip(&slow.leave_one_out) {
            worst = worst.max((a - b).abs());
        }
    }
    check(
        &mut out,
        "counting path vs enumeration (25 datasets)",
        worst <= 1e-12,
        format!("worst gap {worst:.2e}"),
    );

    let mut worst_mean = 0f64;
    let mut worst_coeff = 0f64;
    for _ in 0..10 {
        let data = random_dataset(&mut rng, 3, 2, 4, 12);
        let kernel = KernelSpec::builtin("vus-diff", 3).unwrap();
        let loo = leave_one_out(&data, &kernel).unwrap();
        let pv = combined_pseudo_values(&loo, kernel.degrees()).unwrap();
        let mean = pv.combined().iter().sum::<f64>() / pv.n_total() as f64;
        worst_mean = worst_mean.max((mean - loo.value).abs());
        let cmean = pv.ev_coefficients().iter().sum::<f64>() / pv.n_total() as f64;
        worst_coeff = worst_coeff.max((cmean - 1.0).abs());
    }
    check(
        &mut out,
        "pseudo-value identities (10 datasets)",
        worst_mean <= 1e-10 && worst_coeff <= 1e-12,
        format!("mean gap {worst_mean:.2e}, coeff gap {worst_coeff:.2e}"),
    );

    let data = random_dataset(&mut rng, 3, 2, 10, 16);
    let kernel = KernelSpec::builtin("vus-diff", 3).unwrap();
    let exact = ujel_core::u_statistic(&data, &kernel).unwrap();
    let bw = bandwidths(&data).unwrap().scaled(1e-6).unwrap();
    let smooth = smoothed_theta(&data, &bw).unwrap();
    check(
        &mut out,
        "smoothed estimator consistency",
        (smooth - exact).abs() < 1e-3,
        format!("gap {:.2e}", (smooth - exact).abs()),
    );

    let scenario = ujel_core::Scenario {
        id: "selftest".into(),
        models: vec![
            ujel_core::GroupModel::Mobve(ujel_core::MobveParams::new(1.0, 1.0, 1.0).unwrap());
            3
        ],
        sizes: vec![10, 10, 10],
        level: 0.95,
        bootstrap_b: 16,
    };
    let a = run_coverage(&scenario, CiMethod::Jel, 6, seed, 1)
        .map_err(|e| AppError::Failure(anyhow!(e)))?;
    let b = run_coverage(&scenario, CiMethod::Jel, 6, seed, 4)
        .map_err(|e| AppError::Failure(anyhow!(e)))?;
    let same = serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap();
    check(
        &mut out,
        "coverage harness worker determinism",
        same,
        format!("cp {}", a.coverage_probability),
    );

    let boot1 = bootstrap_percentile_ci(&data, 0.95, 32, seed).unwrap();
    let boot2 = bootstrap_percentile_ci(&data, 0.95, 32, seed).unwrap();
    check(
        &mut out,
        "bootstrap seed determinism",
        boot1.replicates == boot2.replicates,
        format!("B=32, interval width {:.4}", boot1.interval.width()),
    );

    if failed == 0 {
        out.push_str("selftest: all checks passed\n");
        Ok(out)
    } else {
        Err(AppError::Failure(anyhow!(
            "{out}selftest: {failed} check(s) failed"
        )))
    }
}
