#![no_main]

use libfuzzer_sys::fuzz_target;
use stepharm_cli::thread_count;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(n) = thread_count(Some(s)) {
            assert_eq!(n, s.trim().parse::<usize>().unwrap_or(0));
        }
    }
});
