#![no_main]

use libfuzzer_sys::fuzz_target;
use stepharm::scattering::{delta_prime, zeta};
use stepharm::PotentialConfig;

fuzz_target!(|data: [u8; 16]| {
    let beta0 = f64::from_le_bytes(data[..8].try_into().unwrap());
    let beta = f64::from_le_bytes(data[8..].try_into().unwrap());
    let Ok(config) = PotentialConfig::dimensionless(beta0) else { return };
    if let Ok(z) = zeta(beta, &config) {
        assert!((z.norm() - 1.0).abs() < 1e-9, "|zeta({beta})| = {}", z.norm());
    }
    if let Ok(d) = delta_prime(beta, &config) {
        assert!(!d.is_nan(), "delta'({beta}) at beta0 = {beta0}");
    }
});
