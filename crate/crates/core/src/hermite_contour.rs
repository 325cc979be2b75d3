//! The loop-contour solution F_ε(y) of the Hermite equation
//! F'' - 2yF' + (ε - 1)F = 0.
//!
//! F_ε(y) = ∮ t^{-β} e^{-t² + 2ty} dt, β = (ε + 1)/2, on a path that comes in
//! from +∞ above the cut on the positive real axis, circles the origin
//! anticlockwise and returns to +∞ below the cut (arg t ∈ [0, 2π)).
//! Deformed onto a circle of radius r plus the two cut edges:
//!
//! F_ε(y) = I_β(y) + (e^{-2πiβ} - 1) ∫_r^∞ t^{-β} e^{-t² + 2ty} dt
//!
//! where I_β is the circle integral. This is the solution whose
//! u(y) = F_ε(y) e^{-y²/2} decays for y → -∞.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{self, ORDER};
use crate::special_fn::{cos_pi, sin_pi, Lanczos};
use crate::spectrum::PotentialConfig;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Maximum number of node doublings before giving up.
const MAX_DOUBLINGS: usize = 10;

/// Discretization of the deformed loop contour.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourSpec {
    pub circle_radius: f64,
    /// Lower bound on the upper limit of the cut-edge integral; extended
    /// automatically when the integrand at the requested `y` needs more room.
    pub line_truncation: f64,
    pub circle_nodes: usize,
    pub line_nodes: usize,
    pub target_tol: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            circle_radius: 1.0,
            line_truncation: 8.0,
            circle_nodes: 64,
            line_nodes: 64,
            target_tol: 1e-11,
        }
    }
}

impl ContourSpec {
    pub fn with_tol(target_tol: f64) -> Self {
        ContourSpec { target_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.circle_radius > 0.0) {
            return Err(Error::InvalidConfig("circle_radius must be > 0".into()));
        }
        if !(self.line_truncation > self.circle_radius) {
            return Err(Error::InvalidConfig(
                "line_truncation must exceed circle_radius".into(),
            ));
        }
        if self.circle_nodes < ORDER || self.line_nodes < ORDER {
            return Err(Error::InvalidConfig(format!("node counts must be >= {ORDER}")));
        }
        if !(self.target_tol > 0.0) {
            return Err(Error::InvalidConfig("target_tol must be > 0".into()));
        }
        Ok(())
    }
}

/// A spectral coordinate: β, ε = 2β - 1, the energy E = ħω ε / 2 and the
/// exterior wavenumber (continuum) or decay constant (bound), ħk = √(2m|E - U₀|).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaPoint {
    pub beta: f64,
    pub epsilon: f64,
    pub energy: f64,
    pub k: f64,
}

impl BetaPoint {
    pub fn new(beta: f64, config: &PotentialConfig) -> Self {
        BetaPoint {
            beta,
            epsilon: 2.0 * beta - 1.0,
            energy: config.energy_of_beta(beta),
            k: config.k_of_beta(beta),
        }
    }

    /// Point carrying only β (energy in units of ħω, k left at zero).
    pub fn from_beta(beta: f64) -> Self {
        BetaPoint { beta, epsilon: 2.0 * beta - 1.0, energy: beta - 0.5, k: 0.0 }
    }

    pub fn is_continuum(&self, config: &PotentialConfig) -> bool {
        self.beta > config.beta0()
    }
}

/// J(β) = F_ε(0), in the entire form 2π sin(πβ/2) / (i e^{iπβ} Γ((β+1)/2)).
pub fn j_beta(beta: f64) -> Complex64 {
    j_beta_with(&Lanczos::G7, beta)
}

/// [`j_beta`] with an explicit Gamma kernel.
pub fn j_beta_with(kernel: &Lanczos, beta: f64) -> Complex64 {
    let amplitude = 2.0 * PI * sin_pi(0.5 * beta) * kernel.rgamma(0.5 * (beta + 1.0));
    // 1 / (i e^{iπβ}) = -i e^{-iπβ}
    let phase = -I * Complex64::new(cos_pi(beta), -sin_pi(beta));
    amplitude * phase
}

/// J(β) in the literal form sin(πβ)/(i e^{iπβ}) · Γ((1-β)/2); fails on the
/// removable singularities at β = 1, 3, 5, ...
pub fn j_beta_literal(beta: f64) -> Result<Complex64> {
    let g = crate::special_fn::gamma(0.5 * (1.0 - beta))?;
    Ok(sin_pi(beta) * g * (-I) * Complex64::new(cos_pi(beta), -sin_pi(beta)))
}

/// H_n(y), physicists' convention.
pub fn hermite_poly(n: usize, y: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * y);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * y * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// F_ε(y) for the contour solution, refined until two successive node
/// doublings agree to `target_tol · (1 + |F|)`.
pub fn f_epsilon(point: &BetaPoint, y: f64, contour: &ContourSpec) -> Result<Complex64> {
    f_beta(point.beta, y, contour)
}

/// dF_ε/dy = 2 F_{ε-2}(y).
pub fn f_epsilon_derivative(point: &BetaPoint, y: f64, contour: &ContourSpec) -> Result<Complex64> {
    Ok(2.0 * f_beta(point.beta - 1.0, y, contour)?)
}

/// [`f_epsilon`] keyed directly by β.
pub fn f_beta(beta: f64, y: f64, contour: &ContourSpec) -> Result<Complex64> {
    contour.validate()?;
    if !beta.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("f_epsilon at beta = {beta}, y = {y}")));
    }
    let t_max = line_upper_limit(y, contour);
    let mut circle_panels = contour.circle_nodes.div_ceil(ORDER);
    let mut line_panels = contour.line_nodes.div_ceil(ORDER);
    let edge_factor = Complex64::new(cos_pi(2.0 * beta), -sin_pi(2.0 * beta)) - 1.0;

    let evaluate = |cp: usize, lp: usize| {
        let (circle, scale) = circle_integral(beta, y, contour.circle_radius, cp);
        let line = if edge_factor.norm() == 0.0 {
            0.0
        } else {
            line_integral(beta, y, contour.circle_radius, t_max, lp)
        };
        (circle + edge_factor * line, scale)
    };

    let (mut prev, mut scale) = evaluate(circle_panels, line_panels);
    for _ in 0..MAX_DOUBLINGS {
        circle_panels *= 2;
        line_panels *= 2;
        let (cur, s) = evaluate(circle_panels, line_panels);
        scale = scale.max(s);
        let diff = (cur - prev).norm();
        // cancellation on the circle limits attainable accuracy to ~eps·scale
        let floor = 1e3 * f64::EPSILON * scale;
        if diff <= contour.target_tol * (1.0 + cur.norm()) || diff <= floor {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "f_epsilon at beta = {beta}, y = {y}: {} circle and {} line nodes",
        circle_panels * ORDER,
        line_panels * ORDER
    )))
}

/// Upper limit of the cut-edge integral: where the exponent -t² + 2ty has
/// fallen `ln(tol/100)` below its maximum over [r, ∞).
fn line_upper_limit(y: f64, contour: &ContourSpec) -> f64 {
    let r = contour.circle_radius;
    let peak = if y > r { y * y } else { -r * r + 2.0 * r * y };
    let drop = -(contour.target_tol * 1e-2).ln();
    let t = y + (y * y - peak + drop).max(0.0).sqrt();
    t.max(contour.line_truncation)
}

/// Circle part, t = r e^{iθ}. Returns the integral and the largest
/// integrand modulus times 2π (the cancellation scale).
fn circle_integral(beta: f64, y: f64, r: f64, panels: usize) -> (Complex64, f64) {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut max_mod: f64 = 0.0;
    let prefactor = I * r.powf(1.0 - beta);
    quadrature::for_each_node(0.0, 2.0 * PI, panels, |theta, w| {
        let (s, c) = theta.sin_cos();
        let (s2, c2) = (2.0 * theta).sin_cos();
        // exponent of t^{1-β} e^{-t² + 2ty} beyond the r^{1-β} prefactor
        let re = -r * r * c2 + 2.0 * y * r * c;
        let im = (1.0 - beta) * theta - r * r * s2 + 2.0 * y * r * s;
        let m = re.exp();
        max_mod = max_mod.max(m);
        sum += w * m * Complex64::new(im.cos(), im.sin());
    });
    let scale = 2.0 * PI * max_mod * prefactor.norm();
    (prefactor * sum, scale)
}

/// ∫_r^{t_max} t^{-β} e^{-t² + 2ty} dt along the upper cut edge (arg t = 0).
///
/// The exponent is combined before exponentiating so large t and large |y|
/// never produce an overflow/underflow product. For y < 0 the integrand
/// decays on a scale 1/(2|y|) near t = r, so panels are graded toward r.
fn line_integral(beta: f64, y: f64, r: f64, t_max: f64, panels: usize) -> f64 {
    let f = |t: f64| (-t * t + 2.0 * t * y - beta * t.ln()).exp();
    if y < -1.0 {
        // split at a few decay lengths from r
        let knee = (r + 10.0 / (2.0 * y.abs() + 2.0 * r)).min(t_max);
        let mut s = 0.0;
        quadrature::for_each_node(r, knee, panels, |t, w| s += w * f(t));
        quadrature::for_each_node(knee, t_max, panels.div_ceil(2), |t, w| s += w * f(t));
        s
    } else {
        let mut s = 0.0;
        quadrature::for_each_node(r, t_max, panels, |t, w| s += w * f(t));
        s
    }
}

/// Leading y → +∞ behaviour of the contour solution,
/// -2i e^{-iπβ} √π sin(πβ) e^{y²} / y^β.
///
/// Identically zero (and meaningless) when β is a positive integer: the
/// solution is then a Hermite polynomial.
pub fn asymptotic_f2(point: &BetaPoint, y: f64) -> Result<Complex64> {
    let beta = point.beta;
    if !(y > 0.0) {
        return Err(Error::Domain(format!("asymptotic_f2 needs y > 0, got {y}")));
    }
    if beta >= 1.0 && beta == beta.round() {
        return Err(Error::Domain(format!(
            "asymptotic_f2 vanishes for integer beta = {beta}; the solution is polynomial"
        )));
    }
    let phase = Complex64::new(cos_pi(beta), -sin_pi(beta));
    let mag = PI.sqrt() * sin_pi(beta) * (y * y - beta * y.ln()).exp();
    Ok(-2.0 * I * phase * mag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(beta: f64, y: f64) -> Complex64 {
        f_beta(beta, y, &ContourSpec::default()).unwrap()
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn j_values() {
        assert_eq!(j_beta(0.0).norm(), 0.0);
        assert!((j_beta(1.0) - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-13);
        // -Γ(1/4)
        assert!((j_beta(0.5) - Complex64::new(-3.625_609_908_221_908, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn j_forms_agree_off_the_removable_points() {
        let mut beta: f64 = -3.9;
        while beta < 7.0 {
            let odd = (beta - 1.0) / 2.0;
            if (odd - odd.round()).abs() > 1e-3 {
                let a = j_beta(beta);
                let b = j_beta_literal(beta).unwrap();
                assert!((a - b).norm() <= 1e-11 * (1.0 + a.norm()), "beta = {beta}");
            }
            beta += 0.137;
        }
    }

    #[test]
    fn hermite_poly_values() {
        assert_eq!(hermite_poly(0, 3.3), 1.0);
        let y: f64 = 1.0;
        assert_eq!(hermite_poly(3, y), 8.0 * y.powi(3) - 12.0 * y);
        assert_eq!(hermite_poly(3, 1.0), -4.0);
        for n in [1, 3, 5, 7] {
            assert_eq!(hermite_poly(n, 0.0), 0.0);
        }
        // H_4 explicit
        let y: f64 = -0.7;
        let h4 = 16.0 * y.powi(4) - 48.0 * y * y + 12.0;
        assert!((hermite_poly(4, y) - h4).abs() < 1e-12);
    }

    #[test]
    fn boundary_value_is_j() {
        let mut beta = 0.05;
        while beta < 6.0 {
            let a = f(beta, 0.0);
            let b = j_beta(beta);
            assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "beta = {beta}: {a} vs {b}");
            beta += 0.23;
        }
    }

    #[test]
    fn hermite_case() {
        // β = 2: (2πi/1!) H_1(1) = 4πi
        assert!((f(2.0, 1.0) - Complex64::new(0.0, 4.0 * PI)).norm() < 1e-9);
        for n in 0..=5 {
            for y in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                let h = hermite_poly(n, y);
                let expected = I * (2.0 * PI / factorial(n)) * h;
                let got = f(n as f64 + 1.0, y);
                let tol = 1e-6 * (1.0 + h.abs() * 2.0 * PI / factorial(n));
                assert!((got - expected).norm() < tol, "n={n} y={y}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn derivative_recurrence() {
        let c = ContourSpec::default();
        let p = BetaPoint::from_beta(2.0);
        let d = f_epsilon_derivative(&p, 1.0, &c).unwrap();
        assert!((d - Complex64::new(0.0, 4.0 * PI)).norm() < 1e-9);

        let p = BetaPoint::from_beta(1.7);
        let d0 = f_epsilon_derivative(&p, 0.0, &c).unwrap();
        assert!((d0 - 2.0 * j_beta(0.7)).norm() < 1e-9);

        let h = 1e-4;
        let y = -1.0;
        let fd = (f(1.7, y + h) - f(1.7, y - h)) / (2.0 * h);
        let d = f_epsilon_derivative(&p, y, &c).unwrap();
        assert!((fd - d).norm() / d.norm() < 1e-5);
    }

    #[test]
    fn solves_the_hermite_equation() {
        let h = 1e-2;
        for beta in [0.8, 1.3, 2.6] {
            let eps = 2.0 * beta - 1.0;
            let mut y = -4.0;
            while y <= 1.0 {
                let v: Vec<Complex64> = (-2..=2).map(|k| f(beta, y + k as f64 * h)).collect();
                let d1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h);
                let d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
                let resid = d2 - 2.0 * y * d1 + (eps - 1.0) * v[2];
                let scale = d2.norm() + 2.0 * y.abs() * d1.norm() + (eps - 1.0).abs() * v[2].norm();
                assert!(resid.norm() < 1e-6 * (1.0 + scale), "beta={beta} y={y}: {resid}");
                y += 0.5;
            }
        }
    }

    #[test]
    fn physical_solution_decays_to_the_left() {
        for beta in [0.8, 1.5, 2.6, 4.3] {
            let u = |y: f64| f(beta, y).norm() * (-0.5 * y * y).exp();
            assert!(u(-6.0) / u(-3.0) < 1e-3, "beta = {beta}");
        }
    }

    #[test]
    fn asymptotic_form_for_large_y() {
        let p = BetaPoint::from_beta(1.5);
        let mut prev = f64::INFINITY;
        for y in [3.0, 4.0, 5.0, 6.0] {
            let ratio = (f(1.5, y) / asymptotic_f2(&p, y).unwrap()).norm();
            let dev = (ratio - 1.0).abs();
            assert!(dev < prev, "y = {y}: ratio {ratio}");
            prev = dev;
            if y == 4.0 {
                assert!(dev < 0.1);
            }
        }
        assert!(asymptotic_f2(&BetaPoint::from_beta(3.0), 2.0).is_err());
        assert!(asymptotic_f2(&p, -1.0).is_err());
    }

    #[test]
    fn radius_does_not_change_the_value() {
        let mut c = ContourSpec::default();
        let a = f_beta(2.3, -1.2, &c).unwrap();
        c.circle_radius = 0.5;
        let b = f_beta(2.3, -1.2, &c).unwrap();
        assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
    }

    #[test]
    fn rejects_invalid_contours() {
        let c = ContourSpec { circle_nodes: 4, ..Default::default() };
        assert!(f_beta(1.5, 0.0, &c).is_err());
        let c = ContourSpec { circle_radius: 2.0, line_truncation: 1.0, ..Default::default() };
        assert!(c.validate().is_err());
        assert!(f_beta(f64::NAN, 0.0, &ContourSpec::default()).is_err());
    }
}
