//! Oracle cross-checks behind the `verify` subcommand.

use std::f64::consts::PI;

use stepharm::hermite_contour::{f_beta, hermite_poly, j_beta_with, ContourSpec};
use stepharm::oracle::{contour_quadrature_j, numerov_hermite, shoot_bound_states, stirling_ln_gamma};
use stepharm::scattering::{delay_time, delta_prime, find_resonances, phase_shift, zeta};
use stepharm::special_fn::{digamma, Lanczos};
use stepharm::spectrum::solve_levels;
use stepharm::{ComplexValue, PotentialConfig, Result};

use crate::output::{Cell, Table};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// The production kernel with its second coefficient nudged by one part in 10⁶.
pub fn corrupted_kernel() -> Lanczos {
    let mut k = Lanczos::G7;
    k.coeffs[1] *= 1.0 + 1e-6;
    k
}

fn cfg(beta0: f64) -> PotentialConfig {
    PotentialConfig::dimensionless(beta0).expect("valid beta0")
}

fn j_routes(kernel: &Lanczos) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for beta in [-1.5, -0.5, 0.3, 0.5, 0.9, 1.3, 2.6, 4.1] {
        let closed = j_beta_with(kernel, beta);
        worst = worst.max((contour_quadrature_j(beta)? - closed).norm() / (1.0 + closed.norm()));
    }
    Ok(worst)
}

fn hermite_degeneracy() -> Result<f64> {
    let contour = ContourSpec::default();
    let mut worst: f64 = 0.0;
    let mut factorial = 1.0;
    for n in 0..=5usize {
        factorial *= n.max(1) as f64;
        for i in 0..=8 {
            let y = -2.0 + 0.5 * i as f64;
            let reference = ComplexValue::new(0.0, 2.0 * PI / factorial * hermite_poly(n, y));
            let value = f_beta(n as f64 + 1.0, y, &contour)?;
            worst = worst.max((value - reference).norm() / (1.0 + reference.norm()));
        }
    }
    Ok(worst)
}

fn ode_agreement(kernel: &Lanczos) -> Result<f64> {
    let contour = ContourSpec::default();
    let ys: Vec<f64> = (0..=20).map(|i| -4.0 + 0.25 * i as f64).collect();
    let mut worst: f64 = 0.0;
    for beta in [0.8, 1.3, 2.6] {
        let seed = j_beta_with(kernel, beta);
        let slope = 2.0 * j_beta_with(kernel, beta - 1.0);
        let ode = numerov_hermite(beta, &ys, seed, slope)?;
        for (y, v) in ys.iter().zip(ode) {
            let f = f_beta(beta, *y, &contour)?;
            worst = worst.max((v - f).norm() / f.norm());
        }
    }
    Ok(worst)
}

fn stirling(kernel: &Lanczos) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..300 {
        let x = 0.1 + 0.1 * i as f64;
        let lanczos = kernel.ln_gamma(ComplexValue::new(x, 0.0))?.re;
        worst = worst.max((lanczos - stirling_ln_gamma(x)?).abs() / (1.0 + lanczos.abs()));
    }
    Ok(worst)
}

fn duplication(kernel: &Lanczos) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let z = 0.01 + 0.37 * i as f64;
        let product = kernel.gamma_half_ratio(z)? * kernel.gamma_half_ratio(z + 0.5)?;
        worst = worst.max((product / z - 1.0).abs());
    }
    Ok(worst)
}

fn digamma_recurrence() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let x = 0.1 + 0.0998 * i as f64;
        worst = worst.max((digamma(x + 1.0)? - digamma(x)? - 1.0 / x).abs());
    }
    Ok(worst)
}

fn shooting() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for beta0 in [1.5, 2.5, 4.5] {
        let c = cfg(beta0);
        let analytic = solve_levels(&c, 1e-13)?;
        let shot = shoot_bound_states(&c, analytic.len().max(1))?;
        if shot.energies.len() != analytic.len() {
            return Ok(f64::INFINITY);
        }
        for (level, e) in analytic.iter().zip(&shot.energies) {
            worst = worst.max((level.energy - e).abs() / (c.hbar() * c.omega()));
        }
    }
    Ok(worst)
}

fn unitarity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for beta0 in [0.7, 1.5, 2.0, 4.5] {
        let c = cfg(beta0);
        for i in 0..1000 {
            worst = worst.max((zeta(beta0 + 1e-6 + 0.1 * i as f64, &c)?.norm() - 1.0).abs());
        }
    }
    Ok(worst)
}

fn phase_derivative() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for beta0 in [1.5, 2.5] {
        let c = cfg(beta0);
        let peaks: Vec<f64> = find_resonances(&c, beta0 + 20.5)?.iter().map(|r| r.beta_peak).collect();
        let slope = |b: f64, h: f64| -> Result<f64> {
            let mut d = phase_shift(b + h, &c)? - phase_shift(b - h, &c)?;
            d -= 2.0 * PI * (d / (2.0 * PI)).round();
            Ok(d / (2.0 * h))
        };
        for i in 0..400 {
            let b = beta0 + 0.1 + 0.05 * i as f64 + 0.013;
            if peaks.iter().any(|p| (b - p).abs() <= 0.05) {
                continue;
            }
            let fd = (4.0 * slope(b, 5e-4)? - slope(b, 1e-3)?) / 3.0;
            let exact = delta_prime(b, &c)?;
            worst = worst.max((fd - exact).abs() / exact.abs());
        }
    }
    Ok(worst)
}

fn junction() -> Result<f64> {
    let contour = ContourSpec::default();
    let mut worst: f64 = 0.0;
    for beta0 in [1.5, 2.5, 4.5] {
        let c = cfg(beta0);
        for level in solve_levels(&c, 1e-13)? {
            let inside = 2.0 * c.alpha() * f_beta(level.beta_n - 1.0, 0.0, &contour)?;
            let outside = -level.k_n * f_beta(level.beta_n, 0.0, &contour)?;
            worst = worst.max((inside - outside).norm() / outside.norm());
        }
    }
    Ok(worst)
}

fn half_period() -> Result<f64> {
    let c = cfg(1.5);
    Ok((delay_time(400.0, &c)? * c.omega() / PI - 1.0).abs())
}

type Residual<'a> = Box<dyn Fn() -> Result<f64> + 'a>;

/// Runs every check with `kernel` standing in for the Gamma function where
/// the analytic route takes one explicitly.
pub fn run_checks(kernel: &Lanczos) -> Vec<Check> {
    let suite: Vec<(&'static str, f64, Residual<'_>)> = vec![
        ("J closed form vs contour quadrature", 1e-8, Box::new(|| j_routes(kernel))),
        ("Hermite degeneracy of the contour solution", 1e-6, Box::new(hermite_degeneracy)),
        ("contour solution vs RK4 integration", 1e-6, Box::new(|| ode_agreement(kernel))),
        ("log-Gamma kernel vs Stirling series", 1e-12, Box::new(|| stirling(kernel))),
        ("Gamma half-ratio duplication identity", 1e-10, Box::new(|| duplication(kernel))),
        ("digamma recurrence", 1e-12, Box::new(digamma_recurrence)),
        ("analytic vs shooting energies (units of hbar omega)", 1e-6, Box::new(shooting)),
        ("bound-state derivative junction", 1e-8, Box::new(junction)),
        ("unit modulus of zeta", 1e-10, Box::new(unitarity)),
        ("closed-form delta' vs finite difference", 1e-5, Box::new(phase_derivative)),
        ("delay at beta = 400 vs half period", 0.02, Box::new(half_period)),
    ];
    suite
        .into_iter()
        .map(|(name, tolerance, run)| Check { name, residual: run().unwrap_or(f64::INFINITY), tolerance })
        .collect()
}

pub fn report_text(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "{} {:<52} residual {:.3e}  tolerance {:.1e}\n",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance
        ));
    }
    let passed = checks.iter().filter(|c| c.passed()).count();
    out.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    out
}

pub fn report_table(checks: &[Check]) -> Table {
    let mut t = Table::new(vec!["check", "residual", "tolerance", "pass"]);
    for c in checks {
        t.push(vec![Cell::from(c.name), c.residual.into(), c.tolerance.into(), c.passed().into()]);
    }
    t
}
