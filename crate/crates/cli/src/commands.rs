use std::f64::consts::PI;

use serde_json::{json, Map, Value};
use stepharm::scattering::{delay_curve, find_resonances};
use stepharm::spectrum::{bound_eigenfunction, solve_levels};
use stepharm::wavepacket::{evolve_with, measure_delay_with, EvolveOptions, WavePacketSpec};
use stepharm::PotentialConfig;

use crate::args::WavepacketArgs;
use crate::output::Table;
use crate::CliError;

const LEVEL_TOL: f64 = 1e-13;

pub fn unit_parameters(config: &PotentialConfig) -> Map<String, Value> {
    let mut p = Map::new();
    p.insert("beta0".into(), json!(config.beta0()));
    p.insert("hbar".into(), json!(config.hbar()));
    p.insert("mass".into(), json!(config.mass()));
    p.insert("kappa".into(), json!(config.kappa()));
    p.insert("u0".into(), json!(config.u0()));
    p
}

pub fn levels(config: &PotentialConfig) -> Result<Table, CliError> {
    let mut table = Table::new(vec!["n", "beta_n", "energy_over_hbar_omega", "k_n", "marginal"]);
    let quantum = config.hbar() * config.omega();
    for level in solve_levels(config, LEVEL_TOL)? {
        table.push(vec![
            level.n.into(),
            level.beta_n.into(),
            (level.energy / quantum).into(),
            level.k_n.into(),
            level.marginal.into(),
        ]);
    }
    Ok(table)
}

pub fn delay(config: &PotentialConfig, beta_min: f64, beta_max: f64, steps: usize) -> Result<Table, CliError> {
    if !(beta_min > config.beta0()) {
        return Err(CliError::BadArgs(format!(
            "--beta-min {beta_min} must exceed beta0 = {}",
            config.beta0()
        )));
    }
    if !(beta_max > beta_min) || steps < 2 {
        return Err(CliError::BadArgs("need --beta-max > --beta-min and --steps >= 2".into()));
    }
    let scale = config.omega() / PI;
    let mut table = Table::new(vec!["beta", "tau_omega_over_pi"]);
    for s in delay_curve(config, beta_min, beta_max, steps)? {
        table.push(vec![s.beta.into(), (s.tau * scale).into()]);
    }
    Ok(table)
}

pub fn eigenfunction(
    config: &PotentialConfig,
    n: usize,
    x_min: f64,
    x_max: f64,
    points: usize,
) -> Result<Table, CliError> {
    if !(x_max > x_min) || points < 2 || !x_min.is_finite() || !x_max.is_finite() {
        return Err(CliError::BadArgs("need finite --x-max > --x-min and --points >= 2".into()));
    }
    let levels = solve_levels(config, LEVEL_TOL)?;
    let level = levels.get(n).ok_or_else(|| {
        CliError::MissingLevel(format!("level {n} does not exist for beta0 = {} ({} levels)", config.beta0(), levels.len()))
    })?;
    let xs: Vec<f64> = (0..points)
        .map(|i| x_min + (x_max - x_min) * i as f64 / (points - 1) as f64)
        .collect();
    let u = bound_eigenfunction(level, config, &xs)?;
    let mut table = Table::new(vec!["x", "re_u", "im_u", "density"]);
    for (x, v) in xs.iter().zip(u) {
        table.push(vec![(*x).into(), v.re.into(), v.im.into(), v.norm_sqr().into()]);
    }
    Ok(table)
}

pub fn resonances(config: &PotentialConfig, beta_max: f64) -> Result<Table, CliError> {
    if !(beta_max > config.beta0() + 1.0) {
        return Err(CliError::BadArgs(format!("--beta-max must exceed beta0 + 1 = {}", config.beta0() + 1.0)));
    }
    let scale = config.omega() / PI;
    let mut table = Table::new(vec!["beta_peak", "tau_peak_omega_over_pi", "width"]);
    for r in find_resonances(config, beta_max)? {
        table.push(vec![r.beta_peak.into(), (r.tau_peak * scale).into(), r.width.into()]);
    }
    Ok(table)
}

/// Packet spec from the flags, filling in the documented defaults.
pub fn packet_spec(config: &PotentialConfig, args: &WavepacketArgs) -> Result<WavePacketSpec, CliError> {
    let k_center = match (args.k_center, args.beta_center) {
        (Some(k), None) => k,
        (None, Some(b)) if b > config.beta0() => config.k_of_beta(b),
        (None, Some(b)) => {
            return Err(CliError::BadArgs(format!("--beta-center {b} must exceed beta0 = {}", config.beta0())))
        }
        _ => return Err(CliError::BadArgs("give exactly one of --k-center, --beta-center".into())),
    };
    let sigma_k = args.sigma_k.unwrap_or(k_center / 30.0);
    let x_start = args.x_start.unwrap_or(3.0 / sigma_k);
    Ok(WavePacketSpec::new(k_center, sigma_k, x_start, *config)?)
}

pub struct PacketRun {
    pub frames: Table,
    pub summary: Table,
}

pub fn wavepacket(config: &PotentialConfig, args: &WavepacketArgs) -> Result<PacketRun, CliError> {
    let spec = packet_spec(config, args)?;
    if args.frames < 1 || args.points < 2 {
        return Err(CliError::BadArgs("need --frames >= 1 and --points >= 2".into()));
    }
    let opts = EvolveOptions { mirror: args.mirror, ..Default::default() };
    let mirror_time = 2.0 * spec.x_start / spec.group_velocity();
    let t_max = args.t_max.unwrap_or(2.0 * mirror_time);
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(CliError::BadArgs("--t-max must be finite and >= 0".into()));
    }
    let x_min = if args.include_interior { -4.0 / config.alpha() } else { 0.0 };
    let x_max = 4.0 * spec.x_start;
    let xs: Vec<f64> = (0..args.points)
        .map(|i| x_min + (x_max - x_min) * i as f64 / (args.points - 1) as f64)
        .collect();
    let times: Vec<f64> = if args.frames == 1 {
        vec![0.0]
    } else {
        (0..args.frames).map(|i| t_max * i as f64 / (args.frames - 1) as f64).collect()
    };

    let measured = measure_delay_with(&spec, opts)?;
    let set = evolve_with(&spec, &xs, &times, opts)?;

    let mut frames = Table::new(vec!["t", "x", "re_psi", "im_psi", "density"]);
    for (t, row) in set.times.iter().zip(&set.psi) {
        for (x, v) in set.x_grid.iter().zip(row) {
            frames.push(vec![(*t).into(), (*x).into(), v.re.into(), v.im.into(), v.norm_sqr().into()]);
        }
    }

    let scale = config.omega() / PI;
    let mut summary = Table::new(vec![
        "k_center",
        "beta_center",
        "sigma_k",
        "x_start",
        "mirror",
        "measured_delay",
        "analytic_tau",
        "relative_difference",
        "measured_delay_omega_over_pi",
    ]);
    let relative = if args.mirror { f64::NAN } else { measured.relative_difference() };
    summary.push(vec![
        spec.k_center.into(),
        spec.beta_center().into(),
        spec.sigma_k.into(),
        spec.x_start.into(),
        args.mirror.into(),
        measured.delay.into(),
        measured.analytic_tau.into(),
        relative.into(),
        (measured.delay * scale).into(),
    ]);
    Ok(PacketRun { frames, summary })
}
