//! Continuum wave packets reflected by the step.
//!
//! A packet is the superposition
//!
//! ψ(x, t) = ∫ c(k) e^{iγ(k)} e^{-iΩ(k)t} u_k(x) dk,  Ω(k) = U₀/ħ + ħk²/(2m),
//!
//! with a Gaussian envelope |c(k)| and launch phase γ(k) = k·x_start, so the
//! incoming part sits at x_start at t = 0 and moves towards the step. Off the
//! step the reflected part follows x = v(t - τ) - x_start, where τ is the
//! delay time; [`measure_delay`] recovers τ from the centroid of |ψ|².

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite_contour::{f_beta, ContourSpec};
use crate::quadrature::{self, ORDER};
use crate::scattering::{delay_time, pi_coefficient, zeta};
use crate::spectrum::PotentialConfig;

/// Envelope and launch parameters of a packet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavePacketSpec {
    pub k_center: f64,
    pub sigma_k: f64,
    pub x_start: f64,
    pub config: PotentialConfig,
}

/// Launch offset in units of 1/σ_k below which the initial packet leaks more
/// than 1e-6 of its norm into x < 0.
const MIN_START_WIDTHS: f64 = 2.4;
/// Launch offset used by [`WavePacketSpec::at_beta`].
const DEFAULT_START_WIDTHS: f64 = 3.0;
/// Half-width of the k window in units of σ_k.
const K_WINDOW: f64 = 5.0;

impl WavePacketSpec {
    pub fn new(k_center: f64, sigma_k: f64, x_start: f64, config: PotentialConfig) -> Result<Self> {
        let spec = WavePacketSpec { k_center, sigma_k, x_start, config };
        spec.validate()?;
        Ok(spec)
    }

    /// Packet centred on β̃ with σ_k = k̃/`width_ratio` and the default launch offset.
    pub fn at_beta(beta_center: f64, width_ratio: f64, config: PotentialConfig) -> Result<Self> {
        if !(beta_center > config.beta0()) || !(width_ratio > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "packet centre beta = {beta_center} must lie above beta0 = {} with width_ratio > 0",
                config.beta0()
            )));
        }
        let k_center = config.k_of_beta(beta_center);
        let sigma_k = k_center / width_ratio;
        Self::new(k_center, sigma_k, DEFAULT_START_WIDTHS / sigma_k, config)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.k_center, self.sigma_k, self.x_start].iter().all(|v| v.is_finite());
        if !finite || !(self.sigma_k > 0.0) || !(self.k_center > 0.0) {
            return Err(Error::InvalidConfig("k_center and sigma_k must be finite and > 0".into()));
        }
        if !(self.k_center - 4.0 * self.sigma_k > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "k_center - 4 sigma_k = {} must stay above threshold",
                self.k_center - 4.0 * self.sigma_k
            )));
        }
        if !(self.x_start >= MIN_START_WIDTHS / self.sigma_k) {
            return Err(Error::InvalidConfig(format!(
                "x_start = {} overlaps the step; need >= {}",
                self.x_start,
                MIN_START_WIDTHS / self.sigma_k
            )));
        }
        Ok(())
    }

    pub fn beta_center(&self) -> f64 {
        self.config.beta_of_k(self.k_center)
    }

    /// ħk̃/m.
    pub fn group_velocity(&self) -> f64 {
        self.config.hbar() * self.k_center / self.config.mass()
    }

    /// c(k) e^{iγ(k)}.
    pub fn envelope(&self, k: f64) -> Complex64 {
        let amp = (2.0 * PI * self.sigma_k * self.sigma_k).powf(-0.25)
            * (-(k - self.k_center).powi(2) / (4.0 * self.sigma_k * self.sigma_k)).exp();
        Complex64::from_polar(amp, k * self.x_start)
    }

    /// Ω(k).
    pub fn angular_frequency(&self, k: f64) -> f64 {
        let c = &self.config;
        c.u0() / c.hbar() + c.hbar() * k * k / (2.0 * c.mass())
    }

    fn k_window(&self) -> (f64, f64) {
        let lo = (self.k_center - K_WINDOW * self.sigma_k).max(1e-3 * self.sigma_k);
        (lo, self.k_center + K_WINDOW * self.sigma_k)
    }
}

/// Sampled ψ(x, t); `psi[i][j]` is the value at `times[i]`, `x_grid[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSet {
    pub times: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub psi: Vec<Vec<Complex64>>,
}

impl FrameSet {
    pub fn density(&self, frame: usize) -> Vec<f64> {
        self.psi[frame].iter().map(|v| v.norm_sqr()).collect()
    }

    /// ∫|ψ|² dx over the grid (trapezoid).
    pub fn norm(&self, frame: usize) -> f64 {
        trapezoid(&self.x_grid, &self.density(frame))
    }

    /// ∫x|ψ|² dx / ∫|ψ|² dx over the grid.
    pub fn centroid(&self, frame: usize) -> f64 {
        let rho = self.density(frame);
        let first: Vec<f64> = rho.iter().zip(&self.x_grid).map(|(r, x)| r * x).collect();
        trapezoid(&self.x_grid, &first) / trapezoid(&self.x_grid, &rho)
    }

    /// Standard deviation of |ψ|² about its centroid.
    pub fn spread(&self, frame: usize) -> f64 {
        let rho = self.density(frame);
        let mean = self.centroid(frame);
        let second: Vec<f64> =
            rho.iter().zip(&self.x_grid).map(|(r, x)| r * (x - mean).powi(2)).collect();
        (trapezoid(&self.x_grid, &second) / trapezoid(&self.x_grid, &rho)).sqrt()
    }
}

fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2).zip(f.windows(2)).map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1])).sum()
}

/// Controls for [`evolve_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    /// Replace ζ by 1 and drop the interior: an instantaneous reflector.
    pub mirror: bool,
    /// Largest accepted change of any frame value between k-rule doublings,
    /// relative to the largest |ψ|.
    pub tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { mirror: false, tol: 1e-6 }
    }
}

/// Improper eigenfunction u_k(x), normalized to δ(k - k').
pub fn improper_eigenfunction(beta: f64, config: &PotentialConfig, x: f64) -> Result<Complex64> {
    let norm = 1.0 / (2.0 * PI).sqrt();
    if x >= 0.0 {
        let k = config.k_of_beta(beta);
        let z = zeta(beta, config)?;
        Ok(norm * (Complex64::from_polar(1.0, -k * x) + z * Complex64::from_polar(1.0, k * x)))
    } else {
        let p = pi_coefficient(beta, config)?;
        let y = config.alpha() * x;
        let f = f_beta(beta, y, &ContourSpec::default())?;
        Ok(norm * p * f * (-0.5 * y * y).exp())
    }
}

const START_PANELS: usize = 4;
const MAX_DOUBLINGS: usize = 8;

/// Quadrature node of the k-integral with everything that does not depend on x or t.
struct Node {
    k: f64,
    omega: f64,
    /// weight · c(k) e^{iγ} / √(2π)
    amplitude: Complex64,
    zeta: Complex64,
}

fn nodes(spec: &WavePacketSpec, panels: usize, mirror: bool) -> Result<Vec<Node>> {
    let (lo, hi) = spec.k_window();
    let norm = 1.0 / (2.0 * PI).sqrt();
    quadrature::nodes_weights(lo, hi, panels)
        .into_par_iter()
        .map(|(k, w)| {
            let z = if mirror {
                Complex64::new(1.0, 0.0)
            } else {
                zeta(spec.config.beta_of_k(k), &spec.config)?
            };
            Ok(Node { k, omega: spec.angular_frequency(k), amplitude: w * norm * spec.envelope(k), zeta: z })
        })
        .collect()
}

fn exterior_frame(nodes: &[Node], xs: &[f64], t: f64) -> Vec<Complex64> {
    let phased: Vec<Complex64> =
        nodes.iter().map(|n| n.amplitude * Complex64::from_polar(1.0, -n.omega * t)).collect();
    xs.iter()
        .map(|&x| {
            nodes.iter().zip(&phased).fold(Complex64::new(0.0, 0.0), |acc, (n, a)| {
                let wave = Complex64::from_polar(1.0, n.k * x);
                acc + a * (wave.conj() + n.zeta * wave)
            })
        })
        .collect()
}

/// ψ on `x_grid` at each of `times` with default options.
pub fn evolve(spec: &WavePacketSpec, x_grid: &[f64], times: &[f64]) -> Result<FrameSet> {
    evolve_with(spec, x_grid, times, EvolveOptions::default())
}

/// ψ on `x_grid` at each of `times`. The Gauss-Legendre k-rule is doubled
/// until the exterior frames settle; interior points (x < 0) are then filled
/// in with the converged rule.
pub fn evolve_with(
    spec: &WavePacketSpec,
    x_grid: &[f64],
    times: &[f64],
    opts: EvolveOptions,
) -> Result<FrameSet> {
    spec.validate()?;
    if x_grid.windows(2).any(|w| !(w[1] > w[0])) || x_grid.is_empty() {
        return Err(Error::Domain("x_grid must be non-empty and strictly increasing".into()));
    }
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("times must be non-empty and finite".into()));
    }
    let split = x_grid.partition_point(|&x| x < 0.0);
    let (interior_x, exterior_x) = x_grid.split_at(split);

    let frames_for = |nodes: &[Node]| -> Vec<Vec<Complex64>> {
        times.par_iter().map(|&t| exterior_frame(nodes, exterior_x, t)).collect()
    };

    let mut panels = START_PANELS;
    let mut rule = nodes(spec, panels, opts.mirror)?;
    let mut exterior = frames_for(&rule);
    let mut converged = false;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let finer = nodes(spec, panels, opts.mirror)?;
        let next = frames_for(&finer);
        let scale = next.iter().flatten().fold(0.0f64, |m, v| m.max(v.norm()));
        let change = exterior
            .iter()
            .flatten()
            .zip(next.iter().flatten())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        rule = finer;
        exterior = next;
        if change <= opts.tol * scale.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "wave packet k-rule with {} nodes",
            panels * ORDER
        )));
    }

    let interior = if interior_x.is_empty() {
        vec![Vec::new(); times.len()]
    } else if opts.mirror {
        vec![vec![Complex64::new(0.0, 0.0); interior_x.len()]; times.len()]
    } else {
        interior_frames(spec, &rule, interior_x, times)?
    };

    let psi = interior
        .into_iter()
        .zip(exterior)
        .map(|(mut inside, outside)| {
            inside.extend(outside);
            inside
        })
        .collect();
    Ok(FrameSet { times: times.to_vec(), x_grid: x_grid.to_vec(), psi })
}

fn interior_frames(
    spec: &WavePacketSpec,
    rule: &[Node],
    xs: &[f64],
    times: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let config = &spec.config;
    let contour = ContourSpec::default();
    let alpha = config.alpha();
    // profile[j][i] = Π(β_j) F(β_j, αx_i) e^{-α²x_i²/2}
    let profile: Vec<Vec<Complex64>> = rule
        .par_iter()
        .map(|n| {
            let beta = config.beta_of_k(n.k);
            let p = pi_coefficient(beta, config)?;
            xs.iter()
                .map(|&x| {
                    let y = alpha * x;
                    Ok(p * f_beta(beta, y, &contour)? * (-0.5 * y * y).exp())
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(times
        .par_iter()
        .map(|&t| {
            let mut row = vec![Complex64::new(0.0, 0.0); xs.len()];
            for (n, prof) in rule.iter().zip(&profile) {
                let a = n.amplitude * Complex64::from_polar(1.0, -n.omega * t);
                for (r, p) in row.iter_mut().zip(prof) {
                    *r += a * p;
                }
            }
            row
        })
        .collect())
}

/// Outcome of a delay measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayMeasurement {
    /// Crossing time of the detector minus the mirror prediction 2·x_start/v.
    pub delay: f64,
    /// τ(β̃) from the closed form, for comparison.
    pub analytic_tau: f64,
    /// Time at which the reflected centroid passes x_start.
    pub crossing_time: f64,
    /// 2·x_start/v.
    pub mirror_time: f64,
    /// Fitted centroid velocity of the reflected packet.
    pub velocity: f64,
    /// Spread of |ψ|² at the middle sample.
    pub width: f64,
}

impl DelayMeasurement {
    /// |measured - analytic| / |analytic|.
    pub fn relative_difference(&self) -> f64 {
        (self.delay - self.analytic_tau).abs() / self.analytic_tau.abs()
    }
}

/// Reflection delay read off at a detector at x_start, in the time units of the config.
pub fn measure_delay(spec: &WavePacketSpec) -> Result<f64> {
    Ok(measure_delay_with(spec, EvolveOptions::default())?.delay)
}

/// Samples the reflected packet while its centroid travels from about
/// 1.5·x_start to 2.5·x_start, fits a straight line to the centroid and
/// extrapolates it back to the detector. Free motion keeps the centroid exactly
/// linear in time, so the fit is insensitive to spreading.
pub fn measure_delay_with(spec: &WavePacketSpec, opts: EvolveOptions) -> Result<DelayMeasurement> {
    spec.validate()?;
    let v = spec.group_velocity();
    let x_start = spec.x_start;
    let mirror_time = 2.0 * x_start / v;
    let (_, k_max) = spec.k_window();

    let extent = 4.0 * x_start;
    let dx = (PI / (8.0 * k_max)).min(0.1 / spec.sigma_k);
    let points = (extent / dx).ceil() as usize + 1;
    let xs: Vec<f64> = (0..points).map(|i| extent * i as f64 / (points - 1) as f64).collect();
    let times: Vec<f64> =
        (0..5).map(|j| mirror_time + x_start / v * (0.5 + 0.25 * j as f64)).collect();

    let frames = evolve_with(spec, &xs, &times, opts)?;
    let centroids: Vec<f64> = (0..times.len()).map(|i| frames.centroid(i)).collect();
    let width = frames.spread(times.len() / 2);
    let limit = 0.5 * x_start;
    if !(width <= limit) {
        return Err(Error::PacketDispersion { width, limit });
    }

    let (intercept, velocity) = line_fit(&times, &centroids);
    let crossing_time = (x_start - intercept) / velocity;
    let analytic_tau = if opts.mirror { 0.0 } else { delay_time(spec.beta_center(), &spec.config)? };
    Ok(DelayMeasurement {
        delay: crossing_time - mirror_time,
        analytic_tau,
        crossing_time,
        mirror_time,
        velocity,
        width,
    })
}

/// Least-squares (intercept, slope).
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}
