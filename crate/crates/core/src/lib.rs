//! Quantum mechanics of the step-harmonic potential
//! U(x) = U₀ (x ≥ 0), κx²/2 (x < 0).
//!
//! The interior solution is the loop-contour integral of the Hermite equation
//! ([`hermite_contour`]); matching it to the exterior at x = 0 gives the bound
//! levels ([`spectrum`]), the reflection coefficient and delay time
//! ([`scattering`]) and reflected wave packets ([`wavepacket`]). Every
//! analytic route has an independent brute-force counterpart in [`oracle`].

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hermite_contour;
pub mod oracle;
mod quadrature;
pub mod scattering;
pub mod special_fn;
pub mod spectrum;
pub mod wavepacket;

pub use error::{Error, Result};
pub use hermite_contour::{BetaPoint, ContourSpec};
pub use num_complex::Complex64 as ComplexValue;
pub use scattering::{PhaseShiftSample, Resonance};
pub use spectrum::{EnergyLevel, PotentialConfig};
pub use wavepacket::{FrameSet, WavePacketSpec};
