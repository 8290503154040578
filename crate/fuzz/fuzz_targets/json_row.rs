#![no_main]

use libfuzzer_sys::fuzz_target;
use rtc_core::io::{emit_json, parse_json, parse_json_row};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(row) = parse_json_row(text) {
        let rows = vec![row];
        assert_eq!(parse_json(&emit_json(&rows)).expect("emitted rows parse"), rows);
    }
    let _ = parse_json(text);
});
