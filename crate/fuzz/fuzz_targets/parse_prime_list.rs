#![no_main]

use libfuzzer_sys::fuzz_target;
use redei::report::parse_prime_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(list) = parse_prime_list(s) {
            let rendered = list.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
            assert_eq!(parse_prime_list(&rendered).unwrap(), list);
        }
    }
});
