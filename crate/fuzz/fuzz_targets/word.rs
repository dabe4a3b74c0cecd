#![no_main]

use libfuzzer_sys::fuzz_target;
use thompson_core::io::{parse_word, serialize_word};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = parse_word(text, None) {
        let back = parse_word(&serialize_word(&w), Some(w.alphabet())).expect("serialized words parse");
        assert_eq!(back.letters(), w.letters());
        assert_eq!(back.length(), w.length());
    }
});
