#![no_main]

use libfuzzer_sys::fuzz_target;
use stepharm_cli::output::format_sig;

// Twelve significant digits must survive a text round trip.
fuzz_target!(|data: [u8; 8]| {
    let v = f64::from_le_bytes(data);
    let text = format_sig(v);
    if v.is_finite() && v != 0.0 {
        let back: f64 = text.parse().expect("formatted value parses");
        assert!(((back - v) / v).abs() <= 5e-12 || !back.is_normal(), "{v} -> {text}");
    }
});
