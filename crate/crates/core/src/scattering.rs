//! Continuum states above the step: reflection coefficient ζ(β), phase shift,
//! its closed-form derivative, the delay time and resonance search.
//!
//! With R(β) = Γ((β+1)/2)/Γ(β/2) and s = √(2/(β - β₀)), the reflection
//! coefficient reduces to
//!
//! ζ(β) = (a - ib)/(a + ib),  a = sin(πβ/2),  b = s·R·cos(πβ/2),
//!
//! so |ζ| = 1 holds by construction.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite_contour::j_beta;
use crate::special_fn::{cos_pi, digamma, gamma, gamma_half_ratio, sin_pi};
use crate::spectrum::PotentialConfig;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// ζ, δ, δ' and τ at one continuum point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseShiftSample {
    pub beta: f64,
    pub zeta: Complex64,
    /// Principal value in (-π, π].
    pub delta: f64,
    /// dδ/dβ.
    pub delta_prime: f64,
    /// δ'/ω.
    pub tau: f64,
}

impl PhaseShiftSample {
    pub fn at(beta: f64, config: &PotentialConfig) -> Result<Self> {
        let zeta = zeta(beta, config)?;
        let delta_prime = delta_prime(beta, config)?;
        Ok(PhaseShiftSample {
            beta,
            zeta,
            delta: principal(zeta),
            delta_prime,
            tau: delta_prime / config.omega(),
        })
    }
}

/// A local maximum of the delay time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resonance {
    pub beta_peak: f64,
    pub tau_peak: f64,
    /// Full width in β at half the excess of τ over π/ω.
    pub width: f64,
}

fn check_continuum(beta: f64, config: &PotentialConfig) -> Result<f64> {
    let d = beta - config.beta0();
    if !(d > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!(
            "continuum quantity needs beta > beta0 = {}, got {beta}",
            config.beta0()
        )));
    }
    Ok(d)
}

/// (a, b) with ζ = (a - ib)/(a + ib).
fn zeta_parts(beta: f64, d: f64) -> Result<(f64, f64)> {
    let ratio = gamma_half_ratio(0.5 * beta)?;
    let a = sin_pi(0.5 * beta);
    let b = (2.0 / d).sqrt() * ratio * cos_pi(0.5 * beta);
    Ok((a, b))
}

/// Reflection coefficient, |ζ| = 1.
pub fn zeta(beta: f64, config: &PotentialConfig) -> Result<Complex64> {
    let d = check_continuum(beta, config)?;
    let (a, b) = zeta_parts(beta, d)?;
    let num = Complex64::new(a, -b);
    Ok(num * num / (a * a + b * b))
}

/// ζ from the unreduced Gamma ratio
/// [Γ((1-β)/2) - i s Γ(1-β/2)] / [Γ((1-β)/2) + i s Γ(1-β/2)];
/// undefined where either Gamma argument hits a pole (β a positive integer).
pub fn zeta_literal(beta: f64, config: &PotentialConfig) -> Result<Complex64> {
    let d = check_continuum(beta, config)?;
    let s = (2.0 / d).sqrt();
    let g1 = gamma(0.5 * (1.0 - beta))?;
    let g2 = gamma(1.0 - 0.5 * beta)?;
    Ok((g1 - I * s * g2) / (g1 + I * s * g2))
}

/// Phase shift δ = arg ζ, principal value.
pub fn phase_shift(beta: f64, config: &PotentialConfig) -> Result<f64> {
    Ok(principal(zeta(beta, config)?))
}

/// arg in (-π, π]; a signed zero imaginary part would otherwise give -π.
fn principal(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Closed-form dδ/dβ:
///
/// δ' = ½√d [sin(πβ)(1/d + Ψ(β/2) - Ψ((β+1)/2)) + 2π]
///      / [d sin²(πβ/2)/(√2 R) + √2 R cos²(πβ/2)],  d = β - β₀.
///
/// The 2π/sin(πβ) term is distributed through the sin(πβ) prefactor so the
/// expression stays finite at integer β.
pub fn delta_prime(beta: f64, config: &PotentialConfig) -> Result<f64> {
    let d = check_continuum(beta, config)?;
    let ratio = gamma_half_ratio(0.5 * beta)?;
    let psi_diff = digamma(0.5 * beta)? - digamma(0.5 * (beta + 1.0))?;
    let num = 0.5 * d.sqrt() * (sin_pi(beta) * (1.0 / d + psi_diff) + 2.0 * PI);
    let s = sin_pi(0.5 * beta);
    let c = cos_pi(0.5 * beta);
    let den = d * s * s / (SQRT_2 * ratio) + SQRT_2 * ratio * c * c;
    Ok(num / den)
}

/// Reflection delay τ = δ'(β)/ω.
pub fn delay_time(beta: f64, config: &PotentialConfig) -> Result<f64> {
    Ok(delta_prime(beta, config)? / config.omega())
}

/// Interior amplitude Π(β) = 2 [J(β) + i√(2/(β-β₀)) J(β-1)]⁻¹.
pub fn pi_coefficient(beta: f64, config: &PotentialConfig) -> Result<Complex64> {
    let d = check_continuum(beta, config)?;
    let den = j_beta(beta) + I * (2.0 / d).sqrt() * j_beta(beta - 1.0);
    if den.norm() == 0.0 || !den.norm().is_finite() {
        return Err(Error::SingularDenominator(beta));
    }
    Ok(2.0 / den)
}

/// τ sampled on `steps` evenly spaced points of [beta_min, beta_max].
pub fn delay_curve(
    config: &PotentialConfig,
    beta_min: f64,
    beta_max: f64,
    steps: usize,
) -> Result<Vec<PhaseShiftSample>> {
    if steps < 2 || !(beta_max > beta_min) {
        return Err(Error::Domain("delay_curve needs steps >= 2 and beta_max > beta_min".into()));
    }
    let h = (beta_max - beta_min) / (steps - 1) as f64;
    (0..steps)
        .into_par_iter()
        .map(|i| PhaseShiftSample::at(beta_min + i as f64 * h, config))
        .collect()
}

/// Coarse scan step for resonance search.
const SCAN_STEP: f64 = 0.01;
/// Peaks below this multiple of π/ω are treated as ripple.
const SIGNIFICANCE: f64 = 1.05;

/// Local maxima of τ on (β₀, beta_max]: coarse scan, golden-section
/// refinement, FWHM of the excess over π/ω by bisection on each flank.
pub fn find_resonances(config: &PotentialConfig, beta_max: f64) -> Result<Vec<Resonance>> {
    let beta0 = config.beta0();
    if !(beta_max > beta0 + 1.0) {
        return Err(Error::Domain(format!("beta_max must exceed beta0 + 1 = {}", beta0 + 1.0)));
    }
    let tau = |b: f64| delay_time(b, config);
    let n = ((beta_max - beta0) / SCAN_STEP).floor() as usize;
    let grid: Vec<f64> = (1..=n).map(|i| beta0 + i as f64 * SCAN_STEP).collect();
    let values: Vec<f64> = grid.par_iter().map(|&b| tau(b)).collect::<Result<_>>()?;
    let baseline = PI / config.omega();

    let mut out = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        if !(values[i] > values[i - 1] && values[i] >= values[i + 1]) {
            continue;
        }
        let (beta_peak, tau_peak) = golden_max(&tau, grid[i - 1], grid[i + 1])?;
        if tau_peak < SIGNIFICANCE * baseline {
            continue;
        }
        let half = 0.5 * (tau_peak + baseline);
        let left = flank(&tau, &grid, &values, i, half, -1)?;
        let right = flank(&tau, &grid, &values, i, half, 1)?;
        out.push(Resonance { beta_peak, tau_peak, width: right - left });
    }
    Ok(out)
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Half-level crossing on one side of peak index `i`. Stops at the adjacent
/// local minimum (or the scan edge) if τ never drops to `half` there.
fn flank(
    f: &impl Fn(f64) -> Result<f64>,
    grid: &[f64],
    values: &[f64],
    i: usize,
    half: f64,
    dir: isize,
) -> Result<f64> {
    let mut j = i as isize;
    loop {
        let next = j + dir;
        if next < 0 || next as usize >= grid.len() {
            return Ok(grid[j as usize]);
        }
        let (cur_v, next_v) = (values[j as usize], values[next as usize]);
        if next_v < half {
            let (mut a, mut b) = (grid[j as usize], grid[next as usize]);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if f(m)? >= half {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        if next_v > cur_v {
            return Ok(grid[j as usize]);
        }
        j = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(b: f64) -> PotentialConfig {
        PotentialConfig::dimensionless(b).unwrap()
    }

    #[test]
    fn unit_modulus() {
        for b0 in [0.5, 1.5, 2.0, 3.5] {
            let c = cfg(b0);
            for db in [0.01, 1.0, 10.0, 123.4] {
                assert!((zeta(b0 + db, &c).unwrap().norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reduced_and_literal_forms_agree() {
        let c = cfg(1.5);
        let mut b: f64 = 1.53;
        while b < 20.0 {
            if (b - b.round()).abs() > 1e-3 {
                let z1 = zeta(b, &c).unwrap();
                let z2 = zeta_literal(b, &c).unwrap();
                assert!((z1 - z2).norm() < 1e-10, "beta = {b}");
            }
            b += 0.0917;
        }
    }

    #[test]
    fn pi_coefficient_consistency() {
        for b0 in [1.5, 2.0, 4.5] {
            let c = cfg(b0);
            let mut b = b0 + 0.05;
            while b < 50.0 {
                let p = pi_coefficient(b, &c).unwrap();
                let s = (2.0 / (b - b0)).sqrt();
                let z = p * (j_beta(b) - I * s * j_beta(b - 1.0)) / 2.0;
                assert!((z - zeta(b, &c).unwrap()).norm() < 1e-10);
                // 1 + ζ = Π J(β)
                assert!((1.0 + zeta(b, &c).unwrap() - p * j_beta(b)).norm() < 1e-10);
                assert!(p.norm().is_finite());
                b += 0.173;
            }
        }
    }

    #[test]
    fn phase_is_principal() {
        let c = cfg(2.5);
        for i in 1..500 {
            let d = phase_shift(2.5 + 0.05 * i as f64, &c).unwrap();
            assert!(d > -PI && d <= PI);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for b0 in [1.5, 2.0, 2.5, 4.5] {
            let c = cfg(b0);
            let h = 1e-4;
            let mut b = b0 + 0.2;
            while b < b0 + 15.0 {
                let mut dp = phase_shift(b + h, &c).unwrap() - phase_shift(b - h, &c).unwrap();
                if dp > PI {
                    dp -= 2.0 * PI;
                } else if dp < -PI {
                    dp += 2.0 * PI;
                }
                let fd = dp / (2.0 * h);
                let exact = delta_prime(b, &c).unwrap();
                assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()), "b0={b0} b={b}: {fd} vs {exact}");
                b += 0.37;
            }
        }
    }

    #[test]
    fn integer_beta_is_finite() {
        let c = cfg(1.5);
        for b in [2.0, 3.0, 4.0, 7.0] {
            assert!(delta_prime(b, &c).unwrap().is_finite());
        }
    }

    #[test]
    fn domain_errors() {
        let c = cfg(2.0);
        assert!(zeta(2.0, &c).is_err());
        assert!(delta_prime(1.0, &c).is_err());
        assert!(pi_coefficient(1.9, &c).is_err());
        assert!(find_resonances(&c, 2.5).is_err());
    }

    #[test]
    fn high_energy_limit() {
        let c = cfg(1.5);
        let mut prev = f64::INFINITY;
        for b in [50.0, 100.0, 200.0, 400.0] {
            let dev = (delta_prime(b, &c).unwrap() - PI).abs();
            assert!(dev < prev);
            prev = dev;
        }
        assert!((delay_time(400.0, &c).unwrap() * c.omega() / PI - 1.0).abs() < 0.02);
    }

    #[test]
    fn even_integer_threshold_is_flat() {
        for b0 in [2.0, 4.0] {
            let tau = delay_time(b0 + 1e-6, &cfg(b0)).unwrap();
            assert!(tau.abs() < 0.1, "beta0 = {b0}: {tau}");
        }
    }

    #[test]
    fn resonances_at_odd_beta() {
        let c = cfg(1.5);
        let res = find_resonances(&c, 10.0).unwrap();
        let peaks: Vec<f64> = res.iter().map(|r| r.beta_peak).collect();
        for target in [3.0, 5.0, 7.0, 9.0] {
            assert!(peaks.iter().any(|p| (p - target).abs() < 0.2), "{peaks:?}");
        }
        for w in res.windows(2) {
            assert!(w[1].tau_peak < w[0].tau_peak);
        }
        for r in &res {
            assert!(r.width > 0.0 && r.tau_peak > PI);
        }
        let res = find_resonances(&cfg(3.5), 10.0).unwrap();
        assert!(res.iter().all(|r| (r.beta_peak - 3.0).abs() > 0.2));
    }
}
