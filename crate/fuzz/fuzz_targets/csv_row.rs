#![no_main]

use libfuzzer_sys::fuzz_target;
use rtc_core::io::{csv_line, parse_csv, parse_csv_row};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(row) = parse_csv_row(text) {
        let line = csv_line(&row);
        let again = parse_csv_row(&line).expect("emitted rows parse");
        assert_eq!(csv_line(&again), line);
    }
    let _ = parse_csv(text);
});
