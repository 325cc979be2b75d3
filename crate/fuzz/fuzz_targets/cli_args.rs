#![no_main]

use clap::Parser;
use libfuzzer_sys::fuzz_target;
use stepharm_cli::args::Cli;

// Arbitrary argument vectors must parse or be rejected, never panic.
fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let argv = std::iter::once("stepharm").chain(text.split(['\0', '\n', ' ']).filter(|s| !s.is_empty()));
    if let Ok(cli) = Cli::try_parse_from(argv) {
        let _ = cli.units.resolve();
    }
});
