#![no_main]

use libfuzzer_sys::fuzz_target;
use stepharm::special_fn::{cos_pi, digamma, gamma_half_ratio, log_gamma, sin_pi};
use stepharm::ComplexValue;

// Successful results are finite; failures are errors, not panics.
fuzz_target!(|data: [u8; 16]| {
    let re = f64::from_le_bytes(data[..8].try_into().unwrap());
    let im = f64::from_le_bytes(data[8..].try_into().unwrap());
    if let Ok(v) = log_gamma(ComplexValue::new(re, im)) {
        assert!(!v.re.is_nan() && !v.im.is_nan(), "log_gamma({re}, {im}) = {v}");
    }
    if let Ok(v) = digamma(re) {
        assert!(!v.is_nan(), "digamma({re})");
    }
    if let Ok(v) = gamma_half_ratio(re) {
        assert!(!v.is_nan(), "gamma_half_ratio({re})");
    }
    if re.is_finite() {
        assert!(sin_pi(re).abs() <= 1.0 && cos_pi(re).abs() <= 1.0);
    }
});
