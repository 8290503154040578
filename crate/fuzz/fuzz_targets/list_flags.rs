#![no_main]

use libfuzzer_sys::fuzz_target;
use rtc_core::io::{parse_f64_list, parse_format, parse_methods, parse_spacing, parse_variant};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = parse_f64_list(text) {
        assert!(values.iter().all(|v| v.is_finite()));
    }
    if let Ok(methods) = parse_methods(text) {
        assert!(methods.windows(2).all(|w| w[0] < w[1]));
    }
    let _ = parse_spacing(text);
    let _ = parse_format(text);
    let _ = parse_variant(text);
});
