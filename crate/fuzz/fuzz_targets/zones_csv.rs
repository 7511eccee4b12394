#![no_main]

use libfuzzer_sys::fuzz_target;
use majfix_cli::parse_zones;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(z) = parse_zones(text) {
            // a parsed table writes back to something that parses the same
            assert_eq!(parse_zones(&z.combined()).ok().map(|b| b.curve.len()), Some(z.curve.len()));
        }
    }
});
