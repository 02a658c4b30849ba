#![no_main]

use libfuzzer_sys::fuzz_target;
use redei::report::CertificateReport;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(report) = CertificateReport::from_json(s) {
            assert_eq!(CertificateReport::from_json(&report.to_json()).unwrap(), report);
            if let Some(w) = &report.witness {
                let _ = w.to_decomposition();
            }
        }
    }
});
