#![no_main]

use libfuzzer_sys::fuzz_target;
use thompson_core::io::{parse_certificate, serialize_certificate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cert) = parse_certificate(text) {
        let back = parse_certificate(&serialize_certificate(&cert)).expect("serialized certificates parse");
        assert_eq!(back, cert);
    }
});
