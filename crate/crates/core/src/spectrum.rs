//! Bound states of the step-harmonic potential
//! U(x) = U₀ for x ≥ 0, κx²/2 for x < 0.
//!
//! Matching u'/u at x = 0 between the contour solution on the left and e^{-kx}
//! on the right gives the level condition
//!
//! g(β) = Γ((β+1)/2)/Γ(β/2) · cot(πβ/2) + √((β₀ - β)/2) = 0,
//!
//! which has exactly one root in each (2n+1, min(2n+2, β₀)).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite_contour::{f_beta, j_beta, ContourSpec};
use crate::quadrature;
use crate::special_fn::{cos_pi, gamma_half_ratio, sin_pi};

/// Physical constants of the potential. Derived quantities are always
/// recomputed from these four.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialConfig {
    hbar: f64,
    mass: f64,
    kappa: f64,
    u0: f64,
}

impl PotentialConfig {
    pub fn new(hbar: f64, mass: f64, kappa: f64, u0: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("kappa", kappa)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(u0 >= 0.0) || !u0.is_finite() {
            return Err(Error::InvalidConfig(format!("u0 must be >= 0 and finite, got {u0}")));
        }
        Ok(PotentialConfig { hbar, mass, kappa, u0 })
    }

    /// ħ = m = ω = 1, step height from β₀ = U₀/(ħω) + 1/2.
    pub fn dimensionless(beta0: f64) -> Result<Self> {
        if !(beta0 >= 0.5) || !beta0.is_finite() {
            return Err(Error::InvalidConfig(format!("beta0 must be >= 1/2, got {beta0}")));
        }
        Self::new(1.0, 1.0, 1.0, beta0 - 0.5)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn omega(&self) -> f64 {
        (self.kappa / self.mass).sqrt()
    }

    /// Inverse oscillator length, (mκ/ħ²)^{1/4}.
    pub fn alpha(&self) -> f64 {
        (self.mass * self.kappa / (self.hbar * self.hbar)).powf(0.25)
    }

    pub fn beta0(&self) -> f64 {
        self.u0 / (self.hbar * self.omega()) + 0.5
    }

    /// Classical period 2π/ω.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega()
    }

    pub fn energy_of_beta(&self, beta: f64) -> f64 {
        self.hbar * self.omega() * (beta - 0.5)
    }

    /// ħk = √(2m|E - U₀|), i.e. k = α√(2|β - β₀|).
    pub fn k_of_beta(&self, beta: f64) -> f64 {
        self.alpha() * (2.0 * (beta - self.beta0()).abs()).sqrt()
    }

    /// Continuum β for exterior wavenumber k.
    pub fn beta_of_k(&self, k: f64) -> f64 {
        let a = self.alpha();
        self.beta0() + k * k / (2.0 * a * a)
    }
}

/// One bound state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyLevel {
    pub n: usize,
    pub beta_n: f64,
    /// Absolute energy, ħω(β_n - 1/2).
    pub energy: f64,
    /// Decay constant on x > 0.
    pub k_n: f64,
    /// Threshold state at β₀ = 1 with k_n = 0 (not square-summable).
    pub marginal: bool,
}

/// Number of bound states: k + 1 for 2k+1 < β₀ ≤ 2k+3, plus the marginal
/// ground state at β₀ = 1.
pub fn level_count(config: &PotentialConfig) -> usize {
    let beta0 = config.beta0();
    if beta0 < 1.0 {
        0
    } else if beta0 == 1.0 {
        1
    } else {
        ((beta0 - 3.0) / 2.0).ceil().max(0.0) as usize + 1
    }
}

/// g(β) for 0 < β ≤ β₀, β not an even integer.
pub fn level_equation_residual(beta: f64, config: &PotentialConfig) -> Result<f64> {
    let beta0 = config.beta0();
    if !(beta > 0.0 && beta <= beta0) {
        return Err(Error::Domain(format!("level residual needs 0 < beta <= {beta0}, got {beta}")));
    }
    let s = sin_pi(0.5 * beta);
    if s == 0.0 {
        return Err(Error::Domain(format!("cot pole at even beta = {beta}")));
    }
    let ratio = gamma_half_ratio(0.5 * beta)?;
    Ok(ratio * cos_pi(0.5 * beta) / s + (0.5 * (beta0 - beta)).sqrt())
}

/// Distance kept from the cot pole at β = 2n+2.
const POLE_GUARD: f64 = 1e-9;

/// All bound states, sorted by n, each β_n located by bisection to `tol`.
pub fn solve_levels(config: &PotentialConfig, tol: f64) -> Result<Vec<EnergyLevel>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol must be > 0, got {tol}")));
    }
    let beta0 = config.beta0();
    let count = level_count(config);
    if count == 0 {
        return Ok(Vec::new());
    }
    if beta0 == 1.0 {
        return Ok(vec![EnergyLevel {
            n: 0,
            beta_n: 1.0,
            energy: config.energy_of_beta(1.0),
            k_n: 0.0,
            marginal: true,
        }]);
    }
    (0..count)
        .into_par_iter()
        .map(|n| {
            let lo = 2.0 * n as f64 + 1.0;
            let hi = (2.0 * n as f64 + 2.0 - POLE_GUARD).min(beta0);
            let beta_n = bisect(|b| level_equation_residual(b, config), lo, hi, tol)?;
            Ok(EnergyLevel {
                n,
                beta_n,
                energy: config.energy_of_beta(beta_n),
                k_n: config.k_of_beta(beta_n),
                marginal: false,
            })
        })
        .collect()
}

fn bisect(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { lo, hi });
    }
    let sa = fa.signum();
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Normalized bound-state wavefunction sampled at `xs`.
///
/// u(x) = F_ε(αx) e^{-α²x²/2} for x < 0 and J(β_n) e^{-k_n x} for x ≥ 0,
/// scaled so that ∫|u|² = 1 and u(0) is real and positive. The x < 0 half is
/// integrated numerically outward until a unit-length chunk adds less than
/// 1e-8 of the total; the x ≥ 0 half contributes |J|²/(2k_n) exactly. A
/// marginal level has no normalizable tail and is normalized on x < 0 only.
pub fn bound_eigenfunction(
    level: &EnergyLevel,
    config: &PotentialConfig,
    xs: &[f64],
) -> Result<Vec<Complex64>> {
    let contour = ContourSpec::default();
    let alpha = config.alpha();
    let beta = level.beta_n;
    let j = j_beta(beta);

    let left = |y: f64| -> Result<Complex64> { Ok(f_beta(beta, y, &contour)? * (-0.5 * y * y).exp()) };

    // ∫_{-∞}^0 |u|² dx = (1/α) ∫_{-∞}^0 |F(y)|² e^{-y²} dy
    let mut left_norm = 0.0;
    let mut y_hi = 0.0;
    loop {
        let y_lo = y_hi - 1.0;
        let nodes = quadrature::nodes_weights(y_lo, y_hi, 1);
        let chunk: f64 = nodes
            .par_iter()
            .map(|&(y, w)| left(y).map(|u| w * u.norm_sqr()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum();
        left_norm += chunk;
        y_hi = y_lo;
        let past_turning_point = y_hi * y_hi > 2.0 * beta;
        if past_turning_point && chunk < 1e-8 * left_norm {
            break;
        }
        if y_hi < -60.0 {
            return Err(Error::NonConvergence("bound-state norm tail".into()));
        }
    }
    let mut norm2 = left_norm / alpha;
    if !level.marginal {
        norm2 += j.norm_sqr() / (2.0 * level.k_n);
    }
    let phase = if j.norm() > 0.0 { j.conj() / j.norm() } else { Complex64::new(1.0, 0.0) };
    let scale = phase / norm2.sqrt();

    xs.par_iter()
        .map(|&x| {
            let u = if x < 0.0 { left(alpha * x)? } else { j * (-level.k_n * x).exp() };
            Ok(u * scale)
        })
        .collect()
}
