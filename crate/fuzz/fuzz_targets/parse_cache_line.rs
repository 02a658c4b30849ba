#![no_main]

use libfuzzer_sys::fuzz_target;
use redei::report::{parse_cache_line, render_cache_line};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok((triple, value)) = parse_cache_line(s) {
            assert!(value == 1 || value == -1);
            assert_eq!(parse_cache_line(&render_cache_line(triple, value)).unwrap(), (triple, value));
        }
    }
});
