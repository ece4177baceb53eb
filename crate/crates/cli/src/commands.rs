use qwalk::analysis::{DENSITY_TOL, UNITARY_TOL};
use qwalk::trajectories::DEFAULT_BRANCH_CAP;
use qwalk::{
    enumerate_exact, final_distribution, sample_monte_carlo, std_dev, symmetry_verdict, total_variation,
    uniformity_deviation, Distribution, Error, SweepPoint, Symmetry, WalkConfig,
};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

use crate::config::{self, ChannelSpec, ExperimentConfig, SymmetrySpec, TopologySpec, TrajectoryMode};
use crate::output::{distribution_csv, emit, fmt_g17, sweep_csv};
use crate::{CliError, Common, SweepParam};

const DEFAULT_SAMPLES: usize = 100_000;
const GOLDEN_PATH: &str = "crates/core/tests/golden/cycle.json";

fn numerical(e: Error) -> CliError {
    match e {
        Error::BranchCapExceeded { .. } => CliError::Config(format!("field `trajectories.branch_cap`: {e}")),
        e => CliError::Numerical(e.to_string()),
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    match &common.config {
        Some(p) => config::load(p),
        None => Err(CliError::Config("--config <path> is required".into())),
    }
}

fn out_path(common: &Common, cfg: &ExperimentConfig) -> Option<PathBuf> {
    common.out.clone().or_else(|| cfg.output.clone())
}

/// Metadata goes to stdout unless stdout carries the CSV.
fn metadata(lines: &[String], csv_on_stdout: bool) {
    for l in lines {
        if csv_on_stdout {
            eprintln!("{l}");
        } else {
            println!("{l}");
        }
    }
}

fn check_total(d: &Distribution) -> Result<(), CliError> {
    let total = d.total();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CliError::Numerical(format!("probabilities sum to {}", fmt_g17(total))));
    }
    Ok(())
}

fn spread_line(d: &Distribution) -> Result<String, CliError> {
    if d.topology().is_line() {
        Ok(format!("sigma={}", fmt_g17(std_dev(d).map_err(numerical)?)))
    } else {
        Ok(format!("uniformity_deviation={}", fmt_g17(uniformity_deviation(d).map_err(numerical)?)))
    }
}

fn describe(cfg: &ExperimentConfig, walk: &WalkConfig) -> Vec<String> {
    let channel = match &walk.pipeline.channel {
        Some(ch) => ch.label().to_string(),
        None => "none".into(),
    };
    let symmetries: Vec<String> = cfg.symmetries.iter().map(|s| format!("{s:?}")).collect();
    vec![
        format!("topology={}", walk.topology),
        format!("steps={}", walk.steps),
        format!(
            "coin_deg=({}, {}, {})",
            fmt_g17(cfg.coin.xi_deg),
            fmt_g17(cfg.coin.theta_deg),
            fmt_g17(cfg.coin.zeta_deg)
        ),
        format!("channel={channel}"),
        format!("symmetries=[{}]", symmetries.join(", ")),
    ]
}

fn run_config(common: &Common, cfg: &ExperimentConfig) -> Result<u8, CliError> {
    let walk = cfg.walk()?;
    let d = final_distribution(&walk).map_err(numerical)?;
    check_total(&d)?;
    let out = out_path(common, cfg);
    emit(out.as_deref(), &distribution_csv(&d, None))?;
    let mut meta = describe(cfg, &walk);
    meta.push(spread_line(&d)?);
    if let Some(p) = &out {
        meta.push(format!("output={}", p.display()));
    }
    metadata(&meta, out.is_none());
    Ok(0)
}

pub fn run(common: &Common) -> Result<u8, CliError> {
    reject_regen(common)?;
    run_config(common, &load(common)?)
}

fn reject_regen(common: &Common) -> Result<(), CliError> {
    if common.regen_golden {
        return Err(CliError::Config("--regen-golden only applies to the cycle subcommand".into()));
    }
    Ok(())
}

fn tolerance(common: &Common, walk: &WalkConfig) -> Result<f64, CliError> {
    match common.tol {
        Some(t) if t.is_finite() && t >= 0.0 => Ok(t),
        Some(t) => Err(CliError::Config(format!("--tol must be a non-negative number, got {t}"))),
        None if walk.pipeline.channel.is_some() => Ok(DENSITY_TOL),
        None => Ok(UNITARY_TOL),
    }
}

/// `results/z.csv` → `results/z.plain.csv`.
fn tagged(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

pub fn symmetry_check(common: &Common, name: &str) -> Result<u8, CliError> {
    reject_regen(common)?;
    let cfg = load(common)?;
    let symmetry: Symmetry = SymmetrySpec::from_name(name)?.to_symmetry("--symmetry")?;
    let plain = cfg.walk()?;
    let augmented = symmetry.apply(&plain).map_err(|e| CliError::Config(format!("--symmetry: {e}")))?;
    let tol = tolerance(common, &plain)?;
    let (a, b) = rayon::join(|| final_distribution(&plain), || final_distribution(&augmented));
    let (a, b) = (a.map_err(numerical)?, b.map_err(numerical)?);
    check_total(&a)?;
    check_total(&b)?;
    let verdict = symmetry_verdict(&a, &b, tol).map_err(numerical)?;

    let out = out_path(common, &cfg);
    match &out {
        Some(p) => {
            emit(Some(&tagged(p, "plain")), &distribution_csv(&a, None))?;
            emit(Some(&tagged(p, "augmented")), &distribution_csv(&b, None))?;
        }
        None => {
            emit(None, "# plain\n")?;
            emit(None, &distribution_csv(&a, None))?;
            emit(None, "# augmented\n")?;
            emit(None, &distribution_csv(&b, None))?;
        }
    }
    let mut meta = describe(&cfg, &plain);
    meta.push(format!("symmetry={}", symmetry.name()));
    meta.push(format!("total_variation={}", fmt_g17(verdict.total_variation)));
    metadata(&meta, out.is_none());
    println!(
        "max_abs_diff={} tol={} holds={}",
        fmt_g17(verdict.max_abs_diff),
        fmt_g17(verdict.tolerance),
        verdict.holds
    );
    Ok(if verdict.holds { 0 } else { 3 })
}

fn sweep_point(base: &ExperimentConfig, param: SweepParam, value: f64) -> Result<SweepPoint, CliError> {
    let mut cfg = base.clone();
    match param {
        SweepParam::P => {
            let ch = cfg
                .channel
                .as_ref()
                .ok_or_else(|| CliError::Config("field `channel`: a p sweep needs a channel".into()))?;
            cfg.channel = Some(ch.with_p(value)?);
        }
        SweepParam::Theta => cfg.coin.theta_deg = value,
        SweepParam::N => {
            if !(value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                return Err(CliError::Config(format!("--values: step count must be a non-negative integer, got {value}")));
            }
            cfg.steps = value as usize;
            if let Some(TopologySpec::Line { half_width }) = &mut cfg.topology {
                *half_width = None;
            }
        }
    }
    let symmetries = cfg.symmetry_list()?;
    cfg.symmetries.clear();
    let plain = cfg.walk()?;
    let mut augmented = plain.clone();
    for s in symmetries {
        augmented = s.apply(&augmented).map_err(|e| CliError::Config(format!("field `symmetries`: {e}")))?;
    }
    let sigma_of = |w: &WalkConfig| -> Result<f64, CliError> {
        let d = final_distribution(w).map_err(numerical)?;
        check_total(&d)?;
        std_dev(&d).map_err(numerical)
    };
    let sigma = sigma_of(&plain)?;
    let sigma_ratio = if augmented == plain { 1.0 } else { sigma / sigma_of(&augmented)? };
    Ok(SweepPoint { value, sigma, sigma_ratio })
}

pub fn sweep(common: &Common, param: SweepParam, values: &[f64]) -> Result<u8, CliError> {
    reject_regen(common)?;
    let cfg = load(common)?;
    if values.is_empty() {
        return Err(CliError::Config("--values: empty value list".into()));
    }
    if !cfg.is_line() {
        return Err(CliError::Config("field `topology`: sweeps report σ, which needs a line".into()));
    }
    let points: Vec<SweepPoint> = values
        .par_iter()
        .map(|&v| sweep_point(&cfg, param, v))
        .collect::<Result<_, _>>()?;
    let out = out_path(common, &cfg);
    emit(out.as_deref(), &sweep_csv(&points))?;
    let name = match param {
        SweepParam::P => "p",
        SweepParam::Theta => "theta",
        SweepParam::N => "n",
    };
    let mut meta = vec![format!("sweep={name}"), format!("points={}", points.len())];
    if let Some(p) = &out {
        meta.push(format!("output={}", p.display()));
    }
    metadata(&meta, out.is_none());
    Ok(0)
}

pub fn trajectories(common: &Common) -> Result<u8, CliError> {
    reject_regen(common)?;
    let cfg = load(common)?;
    let walk = cfg.walk()?;
    let spec = cfg.trajectories.clone().unwrap_or(config::TrajectorySpec {
        mode: TrajectoryMode::Exact,
        samples: None,
        seed: None,
        branch_cap: None,
    });
    let out = out_path(common, &cfg);
    let mut meta = describe(&cfg, &walk);
    let (d, csv) = match spec.mode {
        TrajectoryMode::Exact => {
            let cap = spec.branch_cap.unwrap_or(DEFAULT_BRANCH_CAP);
            let d = enumerate_exact(&walk, cap).map_err(numerical)?;
            meta.push("mode=exact".into());
            meta.push(format!("branch_cap={cap}"));
            let csv = distribution_csv(&d, None);
            (d, csv)
        }
        TrajectoryMode::MonteCarlo => {
            let samples = spec.samples.unwrap_or(DEFAULT_SAMPLES);
            if samples == 0 {
                return Err(CliError::Config("field `trajectories.samples`: must be positive".into()));
            }
            let seed = common.seed.or(spec.seed).unwrap_or(0);
            let est = sample_monte_carlo(&walk, samples, seed).map_err(numerical)?;
            meta.push("mode=monte_carlo".into());
            meta.push(format!("samples={samples}"));
            meta.push(format!("seed={seed}"));
            let csv = distribution_csv(&est.distribution, Some(&est.std_error));
            (est.distribution, csv)
        }
    };
    check_total(&d)?;
    emit(out.as_deref(), &csv)?;
    meta.push(spread_line(&d)?);
    metadata(&meta, out.is_none());
    Ok(0)
}

fn cycle_config(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => config::load(p)?,
        None => ExperimentConfig::cycle_default(),
    };
    if cfg.topology.is_none() {
        cfg.topology = Some(TopologySpec::Cycle { sites: 101 });
    }
    if cfg.is_line() {
        return Err(CliError::Config("field `topology`: the cycle subcommand needs a cycle".into()));
    }
    Ok(cfg)
}

pub fn cycle(common: &Common) -> Result<u8, CliError> {
    let cfg = cycle_config(common)?;
    if common.regen_golden {
        return regen_golden(common, &cfg);
    }
    run_config(common, &cfg)
}

/// Phase-flip symmetry breakdown on the cycle, without and with noise.
fn regen_golden(common: &Common, cfg: &ExperimentConfig) -> Result<u8, CliError> {
    const PHI_DEG: f64 = 180.0;
    let p = match &cfg.channel {
        None => 0.02,
        Some(ChannelSpec::PhaseFlip { p }) => *p,
        Some(_) => return Err(CliError::Config("field `channel`: golden runs use phase flip".into())),
    };
    let mut unitary = cfg.clone();
    unitary.channel = None;
    unitary.symmetries.clear();
    let mut noisy = unitary.clone();
    noisy.channel = Some(ChannelSpec::PhaseFlip { p });
    let sites = match cfg.topology {
        Some(TopologySpec::Cycle { sites }) => sites,
        _ => unreachable!("cycle_config checked the topology"),
    };

    let compare = |c: &ExperimentConfig| -> Result<(f64, f64, f64), CliError> {
        let plain = c.walk()?;
        let augmented = Symmetry::Phi(PHI_DEG.to_radians()).apply(&plain).map_err(numerical)?;
        let (a, b) = rayon::join(|| final_distribution(&plain), || final_distribution(&augmented));
        let (a, b) = (a.map_err(numerical)?, b.map_err(numerical)?);
        let mad = qwalk::analysis::max_abs_diff(&a, &b).map_err(numerical)?;
        let tv = total_variation(&a, &b).map_err(numerical)?;
        Ok((mad, tv, uniformity_deviation(&a).map_err(numerical)?))
    };
    let (u, n) = rayon::join(|| compare(&unitary), || compare(&noisy));
    let (u, n) = (u?, n?);
    let start = if cfg.initial == config::InitialSpec::default() { "symmetric" } else { "custom" };
    let golden = serde_json::json!({
        "sites": sites,
        "steps": cfg.steps,
        "theta_deg": cfg.coin.theta_deg,
        "phi_deg": PHI_DEG,
        "phase_flip_p": p,
        "start": start,
        "unitary": { "max_abs_diff": u.0, "total_variation": u.1 },
        "noisy": { "max_abs_diff": n.0, "total_variation": n.1, "uniformity_deviation": n.2 },
    });
    let path = common.out.clone().unwrap_or_else(|| PathBuf::from(GOLDEN_PATH));
    let text = serde_json::to_string_pretty(&golden).expect("plain JSON") + "\n";
    emit(Some(&path), &text)?;
    println!("golden={}", path.display());
    println!("unitary max_abs_diff={} total_variation={}", fmt_g17(u.0), fmt_g17(u.1));
    println!(
        "noisy max_abs_diff={} total_variation={} uniformity_deviation={}",
        fmt_g17(n.0),
        fmt_g17(n.1),
        fmt_g17(n.2)
    );
    Ok(0)
}
