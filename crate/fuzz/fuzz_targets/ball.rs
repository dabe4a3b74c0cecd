#![no_main]

use libfuzzer_sys::fuzz_target;
use thompson_core::io::{parse_ball, serialize_ball};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ball) = parse_ball(text) {
        let once = serialize_ball(&ball);
        let again = serialize_ball(&parse_ball(&once).expect("serialized balls parse"));
        assert_eq!(once, again);
    }
});
