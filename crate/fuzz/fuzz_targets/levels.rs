#![no_main]

use libfuzzer_sys::fuzz_target;
use stepharm::spectrum::{level_count, solve_levels};
use stepharm::PotentialConfig;

// Step heights are folded into [0, 200] so a single input stays cheap.
fuzz_target!(|data: [u8; 8]| {
    let raw = f64::from_le_bytes(data);
    if !raw.is_finite() {
        return;
    }
    let beta0 = raw.abs() % 200.0;
    let Ok(config) = PotentialConfig::dimensionless(beta0) else { return };
    if let Ok(levels) = solve_levels(&config, 1e-12) {
        assert_eq!(levels.len(), level_count(&config));
        for (i, l) in levels.iter().enumerate() {
            assert_eq!(l.n, i);
            assert!(l.beta_n >= 2.0 * i as f64 + 1.0 && l.beta_n <= beta0);
        }
    }
});
