#![no_main]

use libfuzzer_sys::fuzz_target;
use majfix_cli::ProblemConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = ProblemConfig::from_toml(text);
    }
});
