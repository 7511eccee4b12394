#![no_main]

use libfuzzer_sys::fuzz_target;
use majfix_core::discretize::KernelTable;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(k) = KernelTable::from_csv(text, None) {
            let _ = k.sup_row_norm();
        }
    }
});
