#![no_main]

use libfuzzer_sys::fuzz_target;
use thompson_core::io::{parse_element, parse_inline, serialize_element, serialize_inline};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((g, _)) = parse_element(text) {
        let (back, reduced) = parse_element(&serialize_element(&g)).expect("serialized elements parse");
        assert!(reduced);
        assert_eq!(back, g);
    }
    if let Ok(g) = parse_inline(text) {
        assert_eq!(parse_inline(&serialize_inline(&g)).expect("inline form parses"), g);
    }
});
