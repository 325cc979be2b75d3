//! Brute-force cross-checks that share no numerical kernel with the analytic
//! path: RK4 integration of the Hermite and Schrödinger equations, tanh-sinh
//! quadrature of the contour integral for J(β), and a Stirling-series log Γ.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectrum::PotentialConfig;

/// Energies found by shooting and the log-derivative mismatch left at each.
#[derive(Clone, Debug, PartialEq)]
pub struct ShootingResult {
    pub energies: Vec<f64>,
    pub mismatch_residuals: Vec<f64>,
    /// True for a threshold state with zero exterior decay.
    pub marginal: Vec<bool>,
}

/// Integrate F'' = 2yF' - (ε - 1)F over a uniform `y_grid` containing 0,
/// starting from F(0), F'(0). Each grid cell is split into RK4 substeps and
/// the substep count doubled until the solution changes by < 1e-8 relative.
pub fn numerov_hermite(
    beta: f64,
    y_grid: &[f64],
    f0: Complex64,
    f0_prime: Complex64,
) -> Result<Vec<Complex64>> {
    let origin = y_grid
        .iter()
        .position(|&y| y == 0.0)
        .ok_or_else(|| Error::Domain("y_grid must contain 0".into()))?;
    if y_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("y_grid must be strictly increasing".into()));
    }
    let eps = 2.0 * beta - 1.0;
    let rhs = |y: f64, f: Complex64, fp: Complex64| (fp, 2.0 * y * fp - (eps - 1.0) * f);
    let run = |substeps: usize| hermite_sweep(&rhs, y_grid, origin, f0, f0_prime, substeps);

    let mut substeps = 4;
    let mut prev = run(substeps);
    while substeps < 1 << 16 {
        substeps *= 2;
        let cur = run(substeps);
        let converged = cur
            .iter()
            .zip(&prev)
            .all(|(a, b)| (a - b).norm() <= 1e-8 * (1.0 + a.norm()));
        if converged {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::StepUnderflow(format!("RK4 on the Hermite equation at beta = {beta}")))
}

type Rhs<'a> = dyn Fn(f64, Complex64, Complex64) -> (Complex64, Complex64) + 'a;

fn rk4_step(rhs: &Rhs, y: f64, f: Complex64, fp: Complex64, h: f64) -> (Complex64, Complex64) {
    let (k1, l1) = rhs(y, f, fp);
    let (k2, l2) = rhs(y + 0.5 * h, f + 0.5 * h * k1, fp + 0.5 * h * l1);
    let (k3, l3) = rhs(y + 0.5 * h, f + 0.5 * h * k2, fp + 0.5 * h * l2);
    let (k4, l4) = rhs(y + h, f + h * k3, fp + h * l3);
    (
        f + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
        fp + h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4),
    )
}

fn hermite_sweep(
    rhs: &Rhs,
    grid: &[f64],
    origin: usize,
    f0: Complex64,
    fp0: Complex64,
    substeps: usize,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    out[origin] = f0;
    for dir in [1isize, -1] {
        let (mut f, mut fp) = (f0, fp0);
        let mut i = origin as isize;
        loop {
            let next = i + dir;
            if next < 0 || next as usize >= grid.len() {
                break;
            }
            let (a, b) = (grid[i as usize], grid[next as usize]);
            let h = (b - a) / substeps as f64;
            for s in 0..substeps {
                (f, fp) = rk4_step(rhs, a + s as f64 * h, f, fp, h);
            }
            out[next as usize] = f;
            i = next;
        }
    }
    out
}

/// Left seed for shooting, in units of y = αx.
const SEED_Y: f64 = -8.0;

/// Real RK4 integration of u'' = (y² - ε)u from y = -8 to 0, seeded on the
/// decaying asymptote u ~ |y|^{(ε-1)/2} e^{-y²/2}. Returns (u(0), u'(0)).
fn shoot_to_origin(beta: f64, steps: usize) -> (f64, f64) {
    let eps = 2.0 * beta - 1.0;
    let p = 0.5 * (eps - 1.0);
    let y0 = SEED_Y;
    let mut u = 1.0;
    // d/dy [|y|^p e^{-y²/2}] / u  at y < 0
    let mut up = -y0 + p / y0;
    let f = |y: f64, u: f64| (y * y - eps) * u;
    let h = -y0 / steps as f64;
    let mut y = y0;
    for _ in 0..steps {
        let k1 = (up, f(y, u));
        let k2 = (up + 0.5 * h * k1.1, f(y + 0.5 * h, u + 0.5 * h * k1.0));
        let k3 = (up + 0.5 * h * k2.1, f(y + 0.5 * h, u + 0.5 * h * k2.0));
        let k4 = (up + h * k3.1, f(y + h, u + h * k3.0));
        u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        up += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        y += h;
        // keep the magnitude bounded; only the ratio matters
        let m = u.abs().max(up.abs());
        if m > 1e100 {
            u /= m;
            up /= m;
        }
    }
    (u, up)
}

const SHOOT_STEPS: usize = 16_000;

/// Normalized mismatch [u'(0)/α + k u(0)/α] / √(u² + u'²) at trial β.
fn shooting_mismatch(beta: f64, beta0: f64) -> f64 {
    let (u, up) = shoot_to_origin(beta, SHOOT_STEPS);
    let kappa = (2.0 * (beta0 - beta).max(0.0)).sqrt();
    (up + kappa * u) / u.hypot(up)
}

/// Bound-state energies (absolute units of `config`) by shooting.
///
/// Searches the brackets (2n+1, min(2n+2, β₀)) for n < n_max. At β₀ = 1 the
/// threshold ground state is reported as marginal when the mismatch at β = 1
/// vanishes.
pub fn shoot_bound_states(config: &PotentialConfig, n_max: usize) -> Result<ShootingResult> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be >= 1".into()));
    }
    let beta0 = config.beta0();
    let mut result = ShootingResult { energies: vec![], mismatch_residuals: vec![], marginal: vec![] };
    if beta0 < 1.0 {
        return Ok(result);
    }
    if beta0 == 1.0 {
        let m = shooting_mismatch(1.0, beta0);
        if m.abs() < 1e-6 {
            result.energies.push(config.energy_of_beta(1.0));
            result.mismatch_residuals.push(m);
            result.marginal.push(true);
        }
        return Ok(result);
    }
    let brackets: Vec<(f64, f64)> = (0..n_max)
        .map(|n| (2.0 * n as f64 + 1.0, (2.0 * n as f64 + 2.0).min(beta0)))
        .filter(|(lo, hi)| hi > lo)
        .collect();
    let roots: Vec<(f64, f64)> = brackets
        .par_iter()
        .map(|&(lo, hi)| {
            let f = |b: f64| shooting_mismatch(b, beta0);
            let (mut a, mut b) = (lo, hi - 1e-9);
            let (fa, fb) = (f(a), f(b));
            if fa.signum() == fb.signum() {
                return Err(Error::BracketFailure { lo, hi });
            }
            while b - a > 1e-13 {
                let m = 0.5 * (a + b);
                if f(m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let root = 0.5 * (a + b);
            Ok((root, f(root)))
        })
        .collect::<Result<_>>()?;
    for (beta, resid) in roots {
        result.energies.push(config.energy_of_beta(beta));
        result.mismatch_residuals.push(resid);
        result.marginal.push(false);
    }
    Ok(result)
}

/// Tanh-sinh quadrature of a complex integrand on [a, b]. The integrand is
/// handed the distances to both endpoints so singular endpoint factors can
/// be evaluated without cancellation.
fn tanh_sinh(
    f: &(dyn Fn(f64, f64, f64) -> Complex64 + Sync),
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64> {
    let half = 0.5 * (b - a);
    // wide enough that an endpoint factor like t^{-0.9} leaves a negligible tail
    let t_max = 6.5;
    let eval = |t: f64| -> Complex64 {
        let u = 0.5 * PI * t.sinh();
        let from_a = (b - a) / (1.0 + (-2.0 * u).exp());
        let from_b = (b - a) / (1.0 + (2.0 * u).exp());
        if from_a <= 0.0 || from_b <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w = half * 0.5 * PI * t.cosh() / u.cosh().powi(2);
        w * f(a + from_a, from_a, from_b)
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        // new nodes are the odd multiples of h
        let n = (t_max / h) as usize;
        let extra: Complex64 = (1..=n)
            .step_by(2)
            .map(|k| {
                let t = k as f64 * h;
                eval(t) + eval(-t)
            })
            .sum();
        sum += extra;
        let next = sum * h;
        if (next - estimate).norm() <= tol * (1.0 + next.norm()) {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::NonConvergence(format!("tanh-sinh on [{a}, {b}]")))
}

/// J(β) by direct numerical contour integration of ∫ e^{-t²} t^{-β} dt.
///
/// For β < 1 the loop shrinks onto the two cut edges:
/// J = (e^{-2πiβ} - 1) ∫_0^∞ e^{-t²} t^{-β} dt. Otherwise the loop is kept
/// at radius 1 and both edges run from 1 outward.
pub fn contour_quadrature_j(beta: f64) -> Result<Complex64> {
    if !beta.is_finite() {
        return Err(Error::Domain(format!("contour_quadrature_j at beta = {beta}")));
    }
    let tol = 1e-13;
    let edge = Complex64::from_polar(1.0, -2.0 * PI * beta) - 1.0;
    // e^{-t²} t^{|β|} < 1e-16 beyond this point
    let mut t_end: f64 = 2.0;
    while -t_end * t_end + beta.abs() * t_end.ln() > -37.0 {
        t_end += 0.5;
    }
    if beta < 1.0 {
        let ray = |t: f64, _: f64, _: f64| Complex64::new((-t * t - beta * t.ln()).exp(), 0.0);
        let ray0 = |_: f64, from_a: f64, _: f64| {
            let t = from_a;
            Complex64::new((-t * t - beta * t.ln()).exp(), 0.0)
        };
        let near = tanh_sinh(&ray0, 0.0, 1.0, tol)?;
        let far = tanh_sinh(&ray, 1.0, t_end, tol)?;
        Ok(edge * (near + far))
    } else {
        let circle = |theta: f64, _: f64, _: f64| {
            let t = Complex64::from_polar(1.0, theta);
            // t^{-β} on arg ∈ [0, 2π), dt = i t dθ
            let power = Complex64::from_polar(1.0, -beta * theta);
            Complex64::new(0.0, 1.0) * t * power * (-t * t).exp()
        };
        let ray = |t: f64, _: f64, _: f64| Complex64::new((-t * t - beta * t.ln()).exp(), 0.0);
        let loop_part = tanh_sinh(&circle, 0.0, 2.0 * PI, tol)?;
        let ray_part = tanh_sinh(&ray, 1.0, t_end, tol)?;
        Ok(loop_part + edge * ray_part)
    }
}

/// ln Γ(x) for x > 0 from the Stirling series after upward recurrence to x ≥ 15.
pub fn stirling_ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("stirling_ln_gamma needs x > 0, got {x}")));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 15.0 {
        shift -= x.ln();
        x += 1.0;
    }
    // B_2k / (2k(2k-1))
    const C: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut series = 0.0;
    for c in C {
        series += c * pow;
        pow *= inv2;
    }
    Ok(shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    fn hermite(n: usize, y: f64) -> f64 {
        // explicit sum, independent of any recurrence
        let mut s = 0.0;
        for m in 0..=n / 2 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * factorial(n) / (factorial(m) * factorial(n - 2 * m)) * (2.0 * y).powi((n - 2 * m) as i32);
        }
        s
    }

    fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|i| lo + i as f64 * h).collect()
    }

    #[test]
    fn rk4_reproduces_hermite_polynomials() {
        let ys = grid(-3.0, 2.0, 0.25);
        let i2pi = Complex64::new(0.0, 2.0 * PI);
        // β = 2: F = 2πi H_1(y), F(0) = 0, F'(0) = 4πi
        let sol = numerov_hermite(2.0, &ys, Complex64::new(0.0, 0.0), 2.0 * i2pi).unwrap();
        for (y, f) in ys.iter().zip(&sol) {
            assert!((f - i2pi * hermite(1, *y)).norm() < 1e-9);
        }
        // β = 4: (2πi/3!) H_3
        let c = i2pi / factorial(3);
        let sol = numerov_hermite(4.0, &ys, c * hermite(3, 0.0), c * -12.0).unwrap();
        for (y, f) in ys.iter().zip(&sol) {
            assert!((f - c * hermite(3, *y)).norm() < 1e-7 * (1.0 + (c * hermite(3, *y)).norm()));
        }
    }

    #[test]
    fn constant_solution_at_ground_level() {
        let ys = grid(-2.0, 1.0, 0.5);
        let f0 = Complex64::new(1.3, -0.4);
        let sol = numerov_hermite(1.0, &ys, f0, Complex64::new(0.0, 0.0)).unwrap();
        for f in sol {
            assert!((f - f0).norm() < 1e-14);
        }
    }

    #[test]
    fn rk4_order_is_four() {
        let rhs = |y: f64, f: Complex64, fp: Complex64| (fp, 2.0 * y * fp - 1.6 * f);
        let ys = [0.0, 1.0];
        let f0 = Complex64::new(1.0, 0.0);
        let fp0 = Complex64::new(0.3, 0.0);
        let at = |n: usize| hermite_sweep(&rhs, &ys, 0, f0, fp0, n)[1];
        let reference = at(1 << 12);
        let e1 = (at(16) - reference).norm();
        let e2 = (at(32) - reference).norm();
        let order = (e1 / e2).log2();
        assert!((3.7..=4.3).contains(&order), "order {order}");
    }

    #[test]
    fn grid_must_contain_origin() {
        let z = Complex64::new(0.0, 0.0);
        assert!(numerov_hermite(1.5, &[0.1, 0.2], z, z).is_err());
    }

    #[test]
    fn j_quadrature_special_values() {
        assert!(contour_quadrature_j(0.0).unwrap().norm() < 1e-10);
        assert!(contour_quadrature_j(-1.0).unwrap().norm() < 1e-10);
        let gamma_quarter = 3.625_609_908_221_908_3;
        let j = contour_quadrature_j(0.5).unwrap();
        assert!((j - Complex64::new(-gamma_quarter, 0.0)).norm() < 1e-8 * gamma_quarter);
        // β = 1 through the loop: 2πi
        let j = contour_quadrature_j(1.0).unwrap();
        assert!((j - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn frozen_quadrature_values() {
        let frozen = [
            (-1.5, -9.064024770554771e-1, 0.0),
            (-0.5, -1.225416702465178e0, 0.0),
            (0.3, -1.666474831673644e0, -1.210764837061477e0),
            (0.9, -1.859227706259884e0, 5.722114503416153e0),
            (1.3, 4.854200392104298e0, 3.526783024324070e0),
            (2.6, 5.190571433453250e0, -1.686518893432834e0),
            (4.1, -2.204578330012391e-1, -6.784994432692478e-1),
        ];
        for (beta, re, im) in frozen {
            let j = contour_quadrature_j(beta).unwrap();
            assert!((j - Complex64::new(re, im)).norm() < 1e-12, "beta = {beta}: {j}");
        }
    }

    #[test]
    fn frozen_shooting_energies() {
        let frozen: [(f64, &[f64]); 3] = [
            (1.5, &[0.7880532262124418]),
            (2.5, &[0.9889398802908991]),
            (4.5, &[1.1321923056300336, 2.856985051822014]),
        ];
        for (beta0, energies) in frozen {
            let c = PotentialConfig::dimensionless(beta0).unwrap();
            let r = shoot_bound_states(&c, 3).unwrap();
            assert_eq!(r.energies.len(), energies.len());
            for (got, want) in r.energies.iter().zip(energies) {
                assert!((got - want).abs() < 1e-9, "beta0 = {beta0}: {got}");
            }
        }
    }

    #[test]
    fn shooting_levels() {
        let c = PotentialConfig::dimensionless(4.5).unwrap();
        let r = shoot_bound_states(&c, 5).unwrap();
        assert_eq!(r.energies.len(), 2);
        assert!(r.energies[0] > 0.5 && r.energies[0] < 1.5);
        assert!(r.energies[1] > 2.5 && r.energies[1] < 3.5);
        assert!(r.mismatch_residuals.iter().all(|m| m.abs() < 1e-6));

        let c = PotentialConfig::dimensionless(0.7).unwrap();
        assert!(shoot_bound_states(&c, 3).unwrap().energies.is_empty());

        let c = PotentialConfig::dimensionless(1.0).unwrap();
        let r = shoot_bound_states(&c, 3).unwrap();
        assert_eq!(r.energies.len(), 1);
        assert!(r.marginal[0]);
        assert!((r.energies[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stirling_values() {
        assert!(stirling_ln_gamma(1.0).unwrap().abs() < 1e-14);
        assert!((stirling_ln_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((stirling_ln_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-13);
    }
}
