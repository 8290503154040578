#![no_main]

use libfuzzer_sys::fuzz_target;
use rtc_core::io::{apply_config, parse_config};
use rtc_core::sweep::SweepSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pairs) = parse_config(text) {
        let mut spec = SweepSpec::default();
        if apply_config(&mut spec, text).is_ok() {
            let _ = spec.validate();
        }
        assert!(pairs.len() <= rtc_core::io::SPEC_KEYS.len());
    }
});
