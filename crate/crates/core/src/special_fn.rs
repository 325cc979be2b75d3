//! Gamma-family kernel: complex log-Gamma (Lanczos), real reciprocal Gamma,
//! digamma on the positive axis and the half-integer Gamma ratio.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// ln(√(2π))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Lanczos approximation parameters.
///
/// The crate-wide kernel is [`Lanczos::G7`]; a custom instance is only useful
/// for fault-injection runs of the verification suite.
#[derive(Clone, Debug, PartialEq)]
pub struct Lanczos {
    pub g: f64,
    pub coeffs: [f64; 9],
}

impl Lanczos {
    /// g = 7, n = 9 coefficient set (double precision, ~1e-15 relative).
    #[allow(clippy::excessive_precision)]
    pub const G7: Lanczos = Lanczos {
        g: 7.0,
        coeffs: [
            0.999_999_999_999_809_93,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_13,
            -176.615_029_162_140_59,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_571_6e-6,
            1.505_632_735_149_311_6e-7,
        ],
    };

    /// log Γ(z) for Re z ≥ 1/2, no reflection.
    fn ln_gamma_right(&self, z: Complex64) -> Complex64 {
        let x = z - 1.0;
        let mut series = Complex64::new(self.coeffs[0], 0.0);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            series += c / (x + i as f64);
        }
        let w = x + self.g + 0.5;
        LN_SQRT_2PI + (x + 0.5) * w.ln() - w + series.ln()
    }

    /// Principal-branch log Γ(z) for complex z.
    pub fn ln_gamma(&self, z: Complex64) -> Result<Complex64> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("log_gamma of non-finite argument {z}")));
        }
        if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
            return Err(Error::Pole(z.re));
        }
        let value = if z.re >= 0.5 {
            self.ln_gamma_right(z)
        } else {
            // Γ(z)Γ(1-z) = π / sin(πz)
            let s = (PI * z).sin();
            Complex64::new(PI.ln(), 0.0) - s.ln() - self.ln_gamma_right(1.0 - z)
        };
        if value.re.is_nan() || value.im.is_nan() {
            return Err(Error::Domain(format!("log_gamma overflows at {z}")));
        }
        Ok(value)
    }

    /// Γ(x) for real x, reflected below 1/2.
    pub fn gamma(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("gamma of non-finite argument {x}")));
        }
        if x <= 0.0 && x == x.round() {
            return Err(Error::Pole(x));
        }
        if x >= 0.5 {
            Ok(self.ln_gamma_right(Complex64::new(x, 0.0)).re.exp())
        } else {
            let g = self.ln_gamma_right(Complex64::new(1.0 - x, 0.0)).re.exp();
            Ok(PI / (sin_pi(x) * g))
        }
    }

    /// 1/Γ(x), an entire function: zero at the non-positive integers.
    pub fn rgamma(&self, x: f64) -> f64 {
        if x <= 0.0 && x == x.round() {
            return 0.0;
        }
        if x >= 0.5 {
            (-self.ln_gamma_right(Complex64::new(x, 0.0)).re).exp()
        } else {
            let g = self.ln_gamma_right(Complex64::new(1.0 - x, 0.0)).re.exp();
            sin_pi(x) * g / PI
        }
    }

    /// Γ(z + 1/2) / Γ(z) for z > 0, via a log-space difference.
    pub fn gamma_half_ratio(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::Domain(format!("gamma_half_ratio requires z > 0, got {z}")));
        }
        if z >= 0.5 {
            Ok(self.ln_half_ratio_right(z).exp())
        } else {
            // Γ(z) = Γ(z+1)/z, so the ratio is z / [Γ(z+1)/Γ(z+1/2)].
            Ok(z * (-self.ln_half_ratio_right(z + 0.5)).exp())
        }
    }

    /// ln[Γ(z + 1/2)/Γ(z)] for z ≥ 1/2 with the large (z - 1/2)·ln w terms of
    /// the two Lanczos expansions cancelled analytically, so the result keeps
    /// full relative accuracy and never overflows.
    fn ln_half_ratio_right(&self, z: f64) -> f64 {
        let w = z + self.g - 0.5;
        let series = |x: f64| -> f64 {
            let x = x - 1.0;
            self.coeffs.iter().enumerate().skip(1).fold(self.coeffs[0], |acc, (i, &c)| acc + c / (x + i as f64))
        };
        z * (0.5 / w).ln_1p() + 0.5 * w.ln() - 0.5 + (series(z + 0.5) / series(z)).ln()
    }
}

impl Default for Lanczos {
    fn default() -> Self {
        Lanczos::G7
    }
}

/// Principal branch of log Γ(z).
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    Lanczos::G7.ln_gamma(z)
}

/// Γ(x) on the real axis.
pub fn gamma(x: f64) -> Result<f64> {
    Lanczos::G7.gamma(x)
}

/// Reciprocal Gamma on the real axis.
pub fn rgamma(x: f64) -> f64 {
    Lanczos::G7.rgamma(x)
}

/// Γ(z + 1/2) / Γ(z), z > 0.
pub fn gamma_half_ratio(z: f64) -> Result<f64> {
    Lanczos::G7.gamma_half_ratio(z)
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let (quadrant, rem) = reduce_half(x);
    match quadrant {
        0 => (PI * rem).sin(),
        1 => (PI * rem).cos(),
        2 => -(PI * rem).sin(),
        _ => -(PI * rem).cos(),
    }
}

/// cos(πx) with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let (quadrant, rem) = reduce_half(x);
    match quadrant {
        0 => (PI * rem).cos(),
        1 => -(PI * rem).sin(),
        2 => -(PI * rem).cos(),
        _ => (PI * rem).sin(),
    }
}

/// x = quadrant/2 + rem (mod 2), rem ∈ [-1/4, 1/4].
fn reduce_half(x: f64) -> (u8, f64) {
    // beyond 2^52 every float is an integer; fold exactly so 2x cannot overflow
    let x = if x.abs() >= 4_503_599_627_370_496.0 { x.rem_euclid(2.0) } else { x };
    let n = (2.0 * x).round();
    let rem = x - 0.5 * n;
    (n.rem_euclid(4.0) as u8, rem)
}

/// Ψ(x) = d/dx ln Γ(x) for x > 0.
///
/// Upward recurrence Ψ(x) = Ψ(x+1) - 1/x until x ≥ 10, then the asymptotic
/// Bernoulli series, truncated after the x^-14 term.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // B_2k / (2k)
    const TERMS: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32_760.0,
        1.0 / 12.0,
    ];
    let inv2 = 1.0 / (x * x);
    let mut pow = inv2;
    let mut tail = 0.0;
    for c in TERMS {
        tail += c * pow;
        pow *= inv2;
    }
    Ok(acc + x.ln() - 0.5 / x - tail)
}
